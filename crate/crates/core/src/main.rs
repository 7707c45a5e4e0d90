use clap::Parser;

use rgcf::cli::{self, Cli, EXIT_USAGE};

fn main() {
    // WORKERS caps the rayon pool; default is available parallelism.
    if let Ok(workers) = std::env::var("WORKERS") {
        match workers.parse::<usize>() {
            Ok(n) if n > 0 => {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .expect("rayon pool is built once");
            }
            _ => {
                eprintln!("WORKERS must be a positive integer, got {workers:?}");
                std::process::exit(EXIT_USAGE);
            }
        }
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap exits 2 on usage errors by default; the contract here
            // reserves 2 for I/O and uses 1 for usage.
            let _ = err.print();
            let code = if err.use_stderr() { EXIT_USAGE } else { 0 };
            std::process::exit(code);
        }
    };
    if let Err(err) = cli::run(cli) {
        eprintln!("error: {err}");
        std::process::exit(cli::exit_code(&err));
    }
}
