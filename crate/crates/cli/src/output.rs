//! Output files. Text outputs start with `#` lines holding the artifact
//! version, the subcommand and the resolved scenario; JSON outputs carry
//! the same under `gselab_version`, `command` and `config`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::error::CliError;
use crate::scenario::Scenario;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
const CONFIG_BEGIN: &str = "# --- resolved config ---";
const CONFIG_END: &str = "# --- end config ---";

/// Comment block prepended to every text output.
pub fn header(command: &str, scenario: &Scenario) -> String {
    let mut s = format!("# gselab {VERSION}\n# command: {command}\n{CONFIG_BEGIN}\n");
    for line in scenario.to_toml().lines() {
        if line.is_empty() {
            s.push_str("#\n");
        } else {
            s.push_str("# ");
            s.push_str(line);
            s.push('\n');
        }
    }
    s.push_str(CONFIG_END);
    s.push('\n');
    s
}

/// Recovers the scenario from an output file's header.
pub fn config_from_header(text: &str) -> Result<Scenario, CliError> {
    let mut inside = false;
    let mut toml = String::new();
    for line in text.lines() {
        if line == CONFIG_BEGIN {
            inside = true;
        } else if line == CONFIG_END {
            return Scenario::parse(&toml);
        } else if inside {
            let body = line.strip_prefix('#').unwrap_or(line);
            toml.push_str(body.strip_prefix(' ').unwrap_or(body));
            toml.push('\n');
        }
    }
    Err(CliError::Config("no resolved-config header found".into()))
}

/// Writes into one scenario's output directory.
pub struct Sink<'a> {
    dir: PathBuf,
    command: &'a str,
    scenario: &'a Scenario,
    pub written: Vec<PathBuf>,
}

impl<'a> Sink<'a> {
    pub fn new(root: &Path, command: &'a str, scenario: &'a Scenario) -> Result<Self, CliError> {
        let dir = root.join(&scenario.name);
        fs::create_dir_all(&dir)?;
        Ok(Sink {
            dir,
            command,
            scenario,
            written: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Writes `header + body` to `name` (relative to the scenario dir).
    pub fn text(&mut self, name: &str, body: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        let mut f = fs::File::create(&path)?;
        f.write_all(header(self.command, self.scenario).as_bytes())?;
        f.write_all(body)?;
        self.written.push(path);
        Ok(())
    }

    /// Writes `<command>_summary.json`, so subcommands sharing a scenario
    /// directory keep separate summaries.
    pub fn summary(&mut self, results: Value) -> Result<(), CliError> {
        let name = format!("{}_summary.json", self.command.replace('-', "_"));
        self.json(&name, results)
    }

    pub fn json(&mut self, name: &str, results: Value) -> Result<(), CliError> {
        let doc = json!({
            "gselab_version": VERSION,
            "command": self.command,
            "config": self.scenario,
            "results": results,
        });
        let path = self.dir.join(name);
        let mut text = serde_json::to_string_pretty(&doc).expect("JSON serialization");
        text.push('\n');
        fs::write(&path, text)?;
        self.written.push(path);
        Ok(())
    }
}

/// Joins values as a CSV row using the shortest exact float form.
pub fn row(values: &[f64]) -> String {
    let mut s = values.iter().map(|v| format!("{v:e}")).collect::<Vec<_>>().join(",");
    s.push('\n');
    s
}
