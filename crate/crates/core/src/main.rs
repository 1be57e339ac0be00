use clap::Parser;
use maxmin_ident::cli::{main_with, Cli};

fn main() {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("MAXMIN_IDENT_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        // Fails only if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    std::process::exit(main_with(cli));
}
