fn main() {
    std::process::exit(modelwalk::cli::run_command(std::env::args_os()));
}
