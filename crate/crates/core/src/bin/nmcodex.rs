use std::io;

fn main() {
    let stdin = io::stdin();
    let code = nmcodex::cli::main_with_args(std::env::args_os(), &mut stdin.lock(), &mut io::stdout(), &mut io::stderr());
    std::process::exit(code);
}
