fn main() {
    std::process::exit(transit_tree::cli::run(std::env::args_os()));
}
