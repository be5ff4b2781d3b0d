use pwfs::cli;

fn main() {
    std::process::exit(cli::run());
}
