fn main() {
    std::process::exit(dae_score::cli::cli_main(std::env::args_os()));
}
