fn main() {
    std::process::exit(wptbeam::cli::main_entry());
}
