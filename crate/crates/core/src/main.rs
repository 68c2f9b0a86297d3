fn main() {
    std::process::exit(leafine::cli::main_entry());
}
