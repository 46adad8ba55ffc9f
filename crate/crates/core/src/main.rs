use std::process::ExitCode;

fn main() -> ExitCode {
    quasimetric::cli::main_with_args(std::env::args_os())
}
