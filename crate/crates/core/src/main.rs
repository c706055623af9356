fn main() {
    let code = parity_slice::cli::run(std::env::args_os(), &mut std::io::stdout().lock());
    std::process::exit(code);
}
