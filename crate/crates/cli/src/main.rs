fn main() -> std::process::ExitCode {
    crisk_cli::main_with_args(std::env::args_os())
}
