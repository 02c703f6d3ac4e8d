fn main() {
    std::process::exit(lakm_bench::cli::run(std::env::args_os()));
}
