fn main() {
    std::process::exit(gibbs_ilp_cli::run(std::env::args_os()));
}
