use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let result = metric_preserve::cli::run(std::env::args_os(), &mut std::io::stdin());
    // A closed pipe is not an error worth reporting.
    let _ = writeln!(std::io::stdout().lock(), "{}", result.render());
    ExitCode::from(result.exit_code as u8)
}
