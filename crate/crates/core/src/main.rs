fn main() {
    std::process::exit(energy_flowshop::cli::run(std::env::args_os()));
}
