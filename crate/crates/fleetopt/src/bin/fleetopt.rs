fn main() {
    std::process::exit(fleetopt::cli::main_entry());
}
