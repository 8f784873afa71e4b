//! Minimal reader for the ASlib `algorithm_runs.arff` table.
//!
//! Only dense data rows are supported. Attributes other than the five used
//! here are skipped, except relational ones, which are rejected.

use std::fs;
use std::path::Path;

use super::IoError;
use crate::scenario::{validate_scenario, Instance, InstanceId, RawScenario, RunOutcome, Scenario, SolverId};

const REQUIRED: [(&str, AttrType); 5] = [
    ("instance_id", AttrType::Text),
    ("repetition", AttrType::Numeric),
    ("algorithm", AttrType::Text),
    ("runtime", AttrType::Numeric),
    ("runstatus", AttrType::Text),
];

#[derive(Clone, Copy, Debug, PartialEq)]
enum AttrType {
    Numeric,
    /// String or nominal.
    Text,
    Date,
    Relational,
}

#[derive(Debug)]
pub struct AslibImport {
    pub scenario: Scenario,
    pub warnings: Vec<String>,
}

pub fn parse_aslib_runs(path: &Path, timeout_s: f64) -> Result<AslibImport, IoError> {
    let text = fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
    read_aslib_runs(&text, timeout_s)
}

fn attr_type(line: u64, name: &str, spec: &str) -> Result<AttrType, IoError> {
    let s = spec.trim();
    if s.starts_with('{') {
        return Ok(AttrType::Text);
    }
    let word = s.split_whitespace().next().unwrap_or("").to_ascii_lowercase();
    match word.as_str() {
        "numeric" | "real" | "integer" => Ok(AttrType::Numeric),
        "string" => Ok(AttrType::Text),
        "date" => Ok(AttrType::Date),
        "relational" => Ok(AttrType::Relational),
        _ => Err(IoError::row(line, format!("attribute `{name}`: unknown type `{s}`"))),
    }
}

/// Splits a leading name token, honouring single or double quotes.
fn split_name(s: &str) -> (String, &str) {
    let s = s.trim_start();
    if let Some(q) = s.chars().next().filter(|c| *c == '\'' || *c == '"') {
        if let Some(end) = s[1..].find(q) {
            return (s[1..1 + end].to_string(), &s[end + 2..]);
        }
    }
    match s.find(char::is_whitespace) {
        Some(k) => (s[..k].to_string(), &s[k..]),
        None => (s.to_string(), ""),
    }
}

/// Splits a dense data row into fields; `None` marks a missing value (`?`).
fn split_row(line: u64, row: &str) -> Result<Vec<Option<String>>, IoError> {
    let mut fields = Vec::new();
    let mut chars = row.chars().peekable();
    loop {
        while chars.peek().is_some_and(|c| c.is_whitespace()) {
            chars.next();
        }
        let mut value = String::new();
        let quoted = match chars.peek() {
            Some(&q) if q == '\'' || q == '"' => {
                chars.next();
                let mut closed = false;
                while let Some(c) = chars.next() {
                    if c == '\\' {
                        if let Some(n) = chars.next() {
                            value.push(n);
                        }
                    } else if c == q {
                        closed = true;
                        break;
                    } else {
                        value.push(c);
                    }
                }
                if !closed {
                    return Err(IoError::row(line, "unterminated quoted value"));
                }
                while chars.peek().is_some_and(|c| *c != ',') {
                    if !chars.next().unwrap().is_whitespace() {
                        return Err(IoError::row(line, "text after closing quote"));
                    }
                }
                true
            }
            _ => {
                while let Some(&c) = chars.peek() {
                    if c == ',' {
                        break;
                    }
                    value.push(c);
                    chars.next();
                }
                value = value.trim_end().to_string();
                false
            }
        };
        fields.push(if !quoted && value == "?" { None } else { Some(value) });
        match chars.next() {
            Some(',') => continue,
            None => break,
            Some(_) => unreachable!(),
        }
    }
    Ok(fields)
}

/// Parses an `algorithm_runs.arff` document. Only repetition 1 is kept;
/// runs other than `ok` are recorded at the timeout (`timeout` as a timeout,
/// anything else as an error).
pub fn read_aslib_runs(text: &str, timeout_s: f64) -> Result<AslibImport, IoError> {
    let mut relation = String::new();
    let mut attrs: Vec<(String, AttrType)> = Vec::new();
    let mut in_data = false;
    let mut raw = RawScenario { timeout_s, ..Default::default() };
    let mut columns: Option<[usize; 5]> = None;
    let mut warnings = Vec::new();
    let mut skipped_repetitions = 0usize;
    let mut late_ok = 0usize;
    let mut seen_instances = std::collections::HashSet::new();
    let mut seen_solvers = std::collections::HashSet::new();

    for (k, line_text) in text.lines().enumerate() {
        let line = k as u64 + 1;
        let trimmed = line_text.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        if !in_data {
            let lower = trimmed.to_ascii_lowercase();
            if lower.starts_with("@relation") {
                relation = split_name(&trimmed[9..]).0;
            } else if lower.starts_with("@attribute") {
                let (name, rest) = split_name(&trimmed[10..]);
                let ty = attr_type(line, &name, rest)?;
                if ty == AttrType::Relational {
                    return Err(IoError::UnsupportedAttribute { name, reason: "relational attributes are not supported".into() });
                }
                attrs.push((name, ty));
            } else if lower.starts_with("@end") {
                continue;
            } else if lower.starts_with("@data") {
                in_data = true;
                let mut idx = [0usize; 5];
                for (slot, (name, want)) in idx.iter_mut().zip(REQUIRED) {
                    let Some(pos) = attrs.iter().position(|(n, _)| n == name) else {
                        return Err(IoError::SchemaError(format!("missing attribute `{name}`")));
                    };
                    let got = attrs[pos].1;
                    if got != want {
                        return Err(IoError::UnsupportedAttribute {
                            name: name.into(),
                            reason: format!("expected a {} attribute", if want == AttrType::Numeric { "numeric" } else { "string or nominal" }),
                        });
                    }
                    *slot = pos;
                }
                columns = Some(idx);
            } else {
                return Err(IoError::row(line, format!("unexpected header line `{trimmed}`")));
            }
            continue;
        }

        if trimmed.starts_with('{') {
            return Err(IoError::row(line, "sparse data rows are not supported"));
        }
        let [ci, cr, ca, ct, cs] = columns.expect("set when @data is read");
        let fields = split_row(line, trimmed)?;
        if fields.len() != attrs.len() {
            return Err(IoError::row(line, format!("expected {} values, found {}", attrs.len(), fields.len())));
        }
        let get = |c: usize, what: &str| fields[c].clone().ok_or_else(|| IoError::row(line, format!("missing {what}")));
        let repetition: f64 = get(cr, "repetition")?
            .trim()
            .parse()
            .map_err(|_| IoError::row(line, "repetition is not a number"))?;
        if repetition != 1.0 {
            skipped_repetitions += 1;
            continue;
        }
        let instance = InstanceId(get(ci, "instance_id")?);
        let solver = SolverId(get(ca, "algorithm")?);
        let status = get(cs, "runstatus")?.to_ascii_lowercase();
        let outcome = match status.as_str() {
            "ok" => {
                let t: f64 = get(ct, "runtime")?.trim().parse().map_err(|_| IoError::row(line, "runtime is not a number"))?;
                if !(t.is_finite() && t >= 0.0) {
                    return Err(IoError::row(line, format!("runtime {t} is not a valid time")));
                }
                if t >= timeout_s {
                    late_ok += 1;
                    RunOutcome::timeout(timeout_s)
                } else {
                    RunOutcome::solved(t)
                }
            }
            "timeout" => RunOutcome::timeout(timeout_s),
            _ => RunOutcome::error(timeout_s),
        };
        if seen_instances.insert(instance.clone()) {
            raw.instances.push(Instance::decision(instance.clone()));
        }
        if seen_solvers.insert(solver.clone()) {
            raw.solvers.push(solver.clone());
        }
        raw.outcomes.push((instance, solver, outcome));
    }
    if columns.is_none() {
        return Err(IoError::SchemaError("no @data section".into()));
    }
    if skipped_repetitions > 0 {
        warnings.push(format!("ignored {skipped_repetitions} row(s) with repetition other than 1"));
    }
    if late_ok > 0 {
        warnings.push(format!("{late_ok} `ok` run(s) at or beyond the timeout recorded as timeouts"));
    }
    raw.id = relation;
    Ok(AslibImport { scenario: validate_scenario(raw)?, warnings })
}
