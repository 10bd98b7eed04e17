fn main() -> std::process::ExitCode {
    mediahub_gateway::cli::main()
}
