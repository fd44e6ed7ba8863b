//! `vislat` command-line tool.
//!
//! Every run prints a one-line JSON summary to standard output. Exit codes:
//! 0 on success, 2 for bad arguments, 1 when a computation hits a size or
//! overflow ceiling.

mod args;
mod commands;

use std::process::ExitCode;

use clap::{CommandFactory, Parser};
use serde_json::json;

use args::{Cli, Command};
use commands::{Failure, Sink};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let rendered = e.render().to_string();
            eprint!("{rendered}");
            if !rendered.contains("Usage:") {
                eprintln!("\n{}", usage_for_argv());
            }
            return ExitCode::from(2);
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(t as usize)
            .build_global()
        {
            eprintln!("vislat: cannot start thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    let sink = Sink {
        out: cli.out.as_deref(),
        format: cli.format,
    };
    let outcome = match &cli.command {
        Command::Points(a) => commands::points(a, &sink),
        Command::Kfree(a) => commands::kfree(a, &sink),
        Command::Density(a) => commands::density(a, &sink),
        Command::Autocorr(a) => commands::autocorr(a, &sink),
        Command::Fourier(a) => commands::fourier(a, &sink),
        Command::Peaks(a) => commands::peaks(a, &sink),
        Command::Map(a) => commands::map(a, &sink),
        Command::Holes(a) => commands::holes(a, &sink),
        Command::Gaps(a) => commands::gaps(a, &sink),
        Command::Series(a) => commands::series(a, &sink),
    };
    match outcome {
        Ok(mut summary) => {
            let mut line = json!({ "schema": 1 });
            line.as_object_mut()
                .unwrap()
                .append(summary.as_object_mut().unwrap());
            if let Some(t) = cli.threads {
                line["parameters"]["threads"] = json!(t);
            }
            println!("{line}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            let name = cli.command.name();
            eprintln!("vislat {name}: {msg}\n");
            eprintln!("{}", usage(Some(name)));
            ExitCode::from(2)
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("vislat {}: {msg}", cli.command.name());
            ExitCode::from(1)
        }
    }
}

/// Usage line of a subcommand, or of the tool when `name` is not one.
fn usage(name: Option<&str>) -> String {
    let mut cmd = Cli::command();
    cmd.build();
    match name.and_then(|n| cmd.find_subcommand_mut(n)) {
        Some(sub) => sub.render_usage().to_string(),
        None => cmd.render_usage().to_string(),
    }
}

fn usage_for_argv() -> String {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cmd = Cli::command();
    let name = args
        .iter()
        .find(|a| cmd.get_subcommands().any(|s| s.get_name() == a.as_str()));
    usage(name.map(String::as_str))
}
