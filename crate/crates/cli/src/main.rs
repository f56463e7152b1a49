fn main() {
    std::process::exit(hibit::run(std::env::args_os()));
}
