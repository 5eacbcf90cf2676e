fn main() -> std::process::ExitCode {
    tuberrt::cli::main()
}
