//! One binary, subcommand per module. Deterministic output for a fixed
//! configuration: exact counts are worker-count independent, and floating
//! accumulations run in fixed order.
//!
//! Exit codes: 0 success, 1 resource-budget failure, 2 usage error.

mod args;
mod commands;
mod config;
mod output;

use args::{Cli, Command, ExpsumCommand, Format};
use clap::Parser;
use commands::Globals;
use output::{Meta, Report};
use std::time::Instant;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Resource(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{}", m),
            CliError::Resource(m) => write!(f, "{}", m),
        }
    }
}

fn main() {
    let code = match run() {
        Ok(()) => 0,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {}", m);
            2
        }
        Err(CliError::Resource(m)) => {
            eprintln!("error: {}", m);
            1
        }
    };
    std::process::exit(code);
}

fn run() -> Result<(), CliError> {
    let mut argv: Vec<String> = std::env::args().collect();

    // a config file appends overriding tokens; parse twice so --config
    // itself is discovered by the first pass
    let first = Cli::try_parse_from(&argv).unwrap_or_else(|e| e.exit());
    if let Some(path) = &first.config {
        let extra = config::config_to_argv(path).map_err(|e| CliError::Usage(e.to_string()))?;
        argv.extend(extra);
    }
    let cli = Cli::try_parse_from(&argv).unwrap_or_else(|e| e.exit());

    let workers = cli
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    if workers == 0 {
        return Err(CliError::Usage("workers must be positive".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Resource(e.to_string()))?;

    let globals = Globals {
        eps: cli.eps,
        seed: cli.seed,
        mem_budget: cli.mem_budget,
        stable: cli.stable,
    };
    let start = Instant::now();
    let out = pool.install(|| match &cli.command {
        Command::Count(a) => commands::run_count(a, &globals),
        Command::Asym(a) => commands::run_asym(a, &globals),
        Command::Sigma(a) => commands::run_sigma(a, &globals),
        Command::Exppair(a) => commands::run_exppair(a, &globals),
        Command::Vaaler(a) => commands::run_vaaler(a, &globals),
        Command::Expsum(ExpsumCommand::Triple(a)) => commands::run_expsum_triple(a, &globals),
        Command::Expsum(ExpsumCommand::Bilinear(a)) => commands::run_expsum_bilinear(a, &globals),
        Command::Expsum(ExpsumCommand::Prime(a)) => commands::run_expsum_prime(a, &globals),
        Command::HbCheck(a) => commands::run_hb_check(a, &globals),
        Command::HbWindow(a) => commands::run_hb_window(a, &globals),
        Command::SieveDump(a) => commands::run_sieve_dump(a, &globals),
    })?;

    let mut payload = out.payload;
    if cli.stable {
        zero_wall_times(&mut payload);
    }
    let meta = Meta {
        tool: "pslab",
        version: env!("CARGO_PKG_VERSION"),
        command: cli.command.name(),
        eps: cli.eps,
        seed: cli.seed,
        workers,
        stable: cli.stable,
        config: serde_json::to_value(&cli.command).expect("args serialization"),
        wall_time_s: if cli.stable { 0.0 } else { start.elapsed().as_secs_f64() },
    };
    match cli.format {
        Format::Json => {
            let report = Report { meta, kind: cli.command.kind(), payload };
            println!("{}", report.to_json());
        }
        Format::Csv => out.csv.print(),
        Format::Human => println!("{}", out.human),
    }
    Ok(())
}

/// Recursively zero any "wall_time_s" fields so output is byte-stable.
fn zero_wall_times(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Object(map) => {
            for (k, val) in map.iter_mut() {
                if k == "wall_time_s" {
                    *val = serde_json::json!(0.0);
                } else {
                    zero_wall_times(val);
                }
            }
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(zero_wall_times),
        _ => {}
    }
}
