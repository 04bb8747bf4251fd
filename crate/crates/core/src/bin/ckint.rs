fn main() -> std::process::ExitCode {
    cayley_klein::cli::main()
}
