fn main() {
    std::process::exit(ea_lab_cli::run_cli(std::env::args_os()));
}
