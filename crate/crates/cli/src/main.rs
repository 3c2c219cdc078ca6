use std::process::ExitCode;

fn main() -> ExitCode {
    let threads = std::env::var(conehankel_cli::THREADS_VAR).ok();
    ExitCode::from(conehankel_cli::run_cli(std::env::args_os(), threads.as_deref()))
}
