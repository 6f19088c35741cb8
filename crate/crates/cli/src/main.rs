use std::process::ExitCode;

use clap::Parser;

use erasim_cli::args::{Cli, Command};
use erasim_cli::commands::{cmd_analyze, cmd_list, cmd_run};
use erasim_cli::config::RunConfig;
use erasim_cli::verify::run_suite;
use erasim_cli::{CliError, CliResult};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn dispatch(cli: Cli) -> CliResult<()> {
    if let Some(n) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| CliError::Usage(format!("--jobs: {e}")))?;
    }
    match cli.command {
        Command::Run(a) => {
            let cfg = RunConfig::from_args(&a)?;
            let out = cmd_run(&cfg)?;
            print!("{}", out.summary_csv);
            for f in &out.files {
                eprintln!("wrote {}", f.display());
            }
        }
        Command::Analyze(a) => {
            let table = cmd_analyze(&a.files, &a.policy.policies()?, a.seed)?;
            match &a.out {
                Some(p) => std::fs::write(p, &table).map_err(|e| CliError::io(p, e))?,
                None => print!("{table}"),
            }
        }
        Command::Verify(a) => {
            let text = match &a.codes {
                Some(p) => Some(std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?),
                None => None,
            };
            let checks = run_suite(text.as_deref(), a.oracle_circuits, a.seed);
            for c in &checks {
                println!("{}", c.line());
            }
            let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
            if !failed.is_empty() {
                return Err(CliError::Verify(failed.join(", ")));
            }
        }
        Command::List => print!("{}", cmd_list()),
    }
    Ok(())
}
