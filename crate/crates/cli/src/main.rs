use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(ttf_cli::run(std::env::args_os()))
}
