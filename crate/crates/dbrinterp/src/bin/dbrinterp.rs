fn main() {
    std::process::exit(dbrinterp::cli::main_entry());
}
