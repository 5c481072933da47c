fn main() {
    std::process::exit(cibench::run());
}
