use super::MetricError;

/// Fraction of the SBS-to-VBS gap closed by a solver, for a base metric
/// summed over instances and minimized.
///
/// `1` at the VBS, `0` at the SBS, negative (without bound) below the SBS.
pub fn closed_gap(m_solver: f64, m_sbs: f64, m_vbs: f64) -> Result<f64, MetricError> {
    if !(m_sbs > m_vbs) {
        return Err(MetricError::DegenerateGap { m_sbs, m_vbs });
    }
    Ok((m_sbs - m_solver) / (m_sbs - m_vbs))
}
