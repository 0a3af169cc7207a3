fn main() -> std::process::ExitCode {
    metamorph::cli::run()
}
