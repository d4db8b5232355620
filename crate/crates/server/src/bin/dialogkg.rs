fn main() -> std::process::ExitCode {
    dialogkg_server::cli::main()
}
