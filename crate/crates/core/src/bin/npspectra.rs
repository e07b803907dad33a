fn main() {
    std::process::exit(np_spectra::cli::main_with_args(std::env::args_os()));
}
