fn main() {
    std::process::exit(vecon::cli::dispatch(std::env::args_os()));
}
