use std::process::ExitCode;

fn main() -> ExitCode {
    wlpkit::cli::main_with_args(std::env::args_os())
}
