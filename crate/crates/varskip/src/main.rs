use std::process::ExitCode;

fn main() -> ExitCode {
    varskip::cli::main_with_args(std::env::args_os())
}
