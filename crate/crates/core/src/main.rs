fn main() {
    let out = idemgen::cli::run_from_args(std::env::args_os());
    print!("{}", out.stdout);
    std::process::exit(out.code);
}
