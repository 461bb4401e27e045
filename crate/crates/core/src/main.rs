fn main() {
    std::process::exit(ame_phase::cli::run(std::env::args_os()));
}
