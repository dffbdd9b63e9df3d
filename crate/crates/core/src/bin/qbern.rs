use std::process::ExitCode;

fn main() -> ExitCode {
    qbernstein::cli::main_with_args(std::env::args_os())
}
