use gabm::cli;

fn main() {
    std::process::exit(cli::main_entry());
}
