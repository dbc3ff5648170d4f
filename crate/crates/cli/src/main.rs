use clap::Parser;
use pairgf_cli::args::Cli;
use pairgf_cli::error::{EXIT_CONFIG, EXIT_SUCCESS};
use pairgf_cli::{configure_threads, run};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_SUCCESS };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let result = configure_threads().and_then(|()| run(&cli));
    if let Err(e) = result {
        eprintln!("pairgf: {e}");
        std::process::exit(e.exit_code());
    }
}
