use std::io::Write;
use std::panic;
use std::process::ExitCode;

fn main() -> ExitCode {
    let code = panic::catch_unwind(|| {
        let stdout = std::io::stdout();
        let stderr = std::io::stderr();
        solvmetric_cli::run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
    })
    .unwrap_or_else(|_| {
        let _ = writeln!(std::io::stderr(), "internal error: unexpected panic");
        2
    });
    ExitCode::from(code as u8)
}
