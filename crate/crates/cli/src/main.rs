use clap::Parser;
use rspcert::Cli;

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                rspcert::exit::USAGE
            } else {
                0
            };
            e.print().ok();
            std::process::exit(code);
        }
    };
    let stdout = std::io::stdout();
    let code = rspcert::run(&cli, &mut stdout.lock());
    std::process::exit(code);
}
