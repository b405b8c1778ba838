//! Scenario-driven front end for `gselab`: TOML scenarios in, CSV/JSON out.

pub mod commands;
pub mod error;
pub mod output;
pub mod scenario;

use std::path::Path;

pub use error::CliError;
pub use scenario::Scenario;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Quantize,
    Evolve,
    ClosedForm,
    Compare,
    Phase,
    Chaos,
    SweepLambda,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Quantize => "quantize",
            Command::Evolve => "evolve",
            Command::ClosedForm => "closed-form",
            Command::Compare => "compare",
            Command::Phase => "phase",
            Command::Chaos => "chaos",
            Command::SweepLambda => "sweep-lambda",
        }
    }
}

/// Outcome of one scenario run.
#[derive(Debug)]
pub struct RunReport {
    pub scenario: String,
    pub summary: String,
    pub files: Vec<std::path::PathBuf>,
}

pub fn load(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    Scenario::parse(&text).map_err(|e| match e {
        CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Runs `command` on one scenario, writing into `out_dir/<name>/`.
pub fn run(command: Command, scenario: &Scenario, out_dir: &Path, opts: commands::Options) -> Result<RunReport, CliError> {
    let mut sink = output::Sink::new(out_dir, command.name(), scenario)?;
    let f = match command {
        Command::Quantize => commands::quantize,
        Command::Evolve => commands::evolve,
        Command::ClosedForm => commands::closed_form,
        Command::Compare => commands::compare,
        Command::Phase => commands::phase,
        Command::Chaos => commands::chaos,
        Command::SweepLambda => commands::sweep_lambda,
    };
    let summary = f(scenario, &mut sink, opts)?;
    Ok(RunReport {
        scenario: scenario.name.clone(),
        summary,
        files: sink.written,
    })
}
