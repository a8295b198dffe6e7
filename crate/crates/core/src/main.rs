fn main() {
    env_logger::init();
    std::process::exit(tnl_core::experiments::cli_main(std::env::args_os()));
}
