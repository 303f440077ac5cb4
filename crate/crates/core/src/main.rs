fn main() {
    std::process::exit(skorokhod::cli::main());
}
