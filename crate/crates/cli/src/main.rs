use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(sep2n_cli::run(std::env::args_os()))
}
