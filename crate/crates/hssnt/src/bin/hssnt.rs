use clap::Parser;

fn main() {
    // HSSNT_THREADS caps the sampling parallelism
    if let Ok(val) = std::env::var("HSSNT_THREADS") {
        match val.trim().parse::<usize>() {
            Ok(n) if n >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            _ => {
                eprintln!("error: HSSNT_THREADS must be a positive integer, got '{val}'");
                std::process::exit(2);
            }
        }
    }
    let cli = hssnt::cli::Cli::parse();
    let code = hssnt::cli::run(cli, &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
