fn main() {
    std::process::exit(haptofv::simio::cli_main(std::env::args_os()));
}
