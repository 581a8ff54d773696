fn main() {
    std::process::exit(rmt_gaps_cli::run(std::env::args_os()));
}
