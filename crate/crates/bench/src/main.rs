fn main() {
    std::process::exit(sghelm_bench::cli::main_with_args(std::env::args_os()));
}
