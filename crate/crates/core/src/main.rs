fn main() {
    std::process::exit(mgtapf::cli::run(std::env::args_os()));
}
