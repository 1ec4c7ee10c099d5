fn main() {
    std::process::exit(kcut_core::cli::run());
}
