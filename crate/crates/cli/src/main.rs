use std::io::{self, Write};
use std::process::ExitCode;

fn main() -> ExitCode {
    let env_tol = std::env::var(mixtura_cli::TOL_ENV).ok();
    let stdout = io::stdout();
    let stderr = io::stderr();
    let (mut out, mut err) = (stdout.lock(), stderr.lock());
    let code = mixtura_cli::run(std::env::args_os(), env_tol.as_deref(), &mut out, &mut err);
    let _ = out.flush();
    ExitCode::from(code as u8)
}
