use clap::Parser;

use hcl_core::cli::{run, Cli, RunConfig};

fn main() {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("HCL_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).filter(|&n| n > 0) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("hcl: cannot size thread pool: {e}");
        }
    }
    std::process::exit(run(&RunConfig::from(cli)));
}
