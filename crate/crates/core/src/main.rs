fn main() -> std::process::ExitCode {
    epps_lab::cli::main_with(std::env::args_os())
}
