fn main() -> std::process::ExitCode {
    htm::cli::main_with_args(std::env::args_os())
}
