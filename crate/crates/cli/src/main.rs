//! `intq`: run law checkers over the bundled corpus or a corpus file.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use intq::commands::{self, Command, Invocation, RunError};
use intq::presheaf::InstanceKind;
use intq::report::Report;

#[derive(Parser, Debug)]
#[command(name = "intq", version, about = "Exhaustive law checks for quantale-valued presheaves and their total categories")]
struct Cli {
    /// check-quantale, girard, check-dualizing, check-closed, nucleus,
    /// represent, fixpoint, lift-check or experiment.
    #[arg(required_unless_present = "replay")]
    command: Option<Command>,

    /// A block name from the corpus. Commands that take a quantale or an
    /// endofunctor run over all of them when it is left out.
    target: Option<String>,

    /// Corpus file read on top of the bundled corpus.
    #[arg(long)]
    corpus: Option<PathBuf>,

    #[arg(long, value_parser = ["powq", "nuts", "orth"])]
    instance: Option<String>,

    /// Label of the dualizing candidate in the value at the one-element set.
    #[arg(long)]
    omega: Option<String>,

    /// Largest object size to enumerate.
    #[arg(long)]
    max_obj: Option<usize>,

    /// Worker threads for the checkers; the default is one.
    #[arg(long, default_value_t = 1)]
    parallel: usize,

    /// Write the structured report here.
    #[arg(long)]
    json: Option<PathBuf>,

    /// Rerun the invocation stored in a report and compare its witnesses.
    #[arg(long, conflicts_with_all = ["command", "target", "corpus", "instance", "omega", "max_obj"])]
    replay: Option<PathBuf>,
}

fn invocation(cli: &Cli) -> Invocation {
    Invocation {
        command: cli.command,
        target: cli.target.clone(),
        instance: cli.instance.as_deref().map(|s| s.parse::<InstanceKind>().expect("restricted by clap")),
        omega: cli.omega.clone(),
        max_obj: cli.max_obj,
        corpus: cli.corpus.clone(),
    }
}

fn execute(cli: &Cli) -> Result<Report, RunError> {
    match &cli.replay {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| RunError::Io { path: path.display().to_string(), message: e.to_string() })?;
            let stored: Report =
                serde_json::from_str(&text).map_err(|e| RunError::Usage(format!("{} is not a report: {e}", path.display())))?;
            commands::replay(&stored)
        }
        None => commands::run(&invocation(cli)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.parallel.max(1)).build_global() {
        eprintln!("error: cannot start worker threads: {e}");
        return ExitCode::from(2);
    }
    let result = execute(&cli);
    let code = commands::exit_code(&result);
    match result {
        Ok(mut report) => {
            let elapsed = report.elapsed_ms.take();
            println!("{report}");
            println!("report digest {}", report.digest());
            if let Some(ms) = elapsed {
                println!("elapsed {ms} ms");
            }
            if let Some(path) = &cli.json {
                let json = serde_json::to_string_pretty(&report).expect("reports serialize");
                if let Err(e) = std::fs::write(path, json + "\n") {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
        }
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(code as u8)
}
