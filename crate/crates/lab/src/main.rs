fn main() {
    std::process::exit(liouville_lab::run(std::env::args().collect()));
}
