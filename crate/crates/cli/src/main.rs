use std::io;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let stdin = io::stdin();
    let code = liargame_cli::run(
        args,
        &mut stdin.lock(),
        &mut io::stdout(),
        &mut io::stderr(),
    );
    std::process::exit(code);
}
