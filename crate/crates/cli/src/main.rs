use clap::Parser;
use contact_spectra::args::Cli;
use contact_spectra::error::EXIT_BAD_ARGS;

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_BAD_ARGS } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match contact_spectra::run(&cli) {
        Ok(files) => {
            println!("{}", files.data.display());
            println!("{}", files.header.display());
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.code);
        }
    }
}
