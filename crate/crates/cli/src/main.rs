fn main() {
    std::process::exit(cvqml_cli::cli_main(std::env::args_os()));
}
