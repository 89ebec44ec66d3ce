//! Resolution of flags, `--config` overrides and the environment into one
//! run configuration, echoed in every report header.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::args::{Cli, Command, Format};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    seed: Option<u64>,
    workers: Option<usize>,
    format: Option<Format>,
    out: Option<PathBuf>,
    #[serde(default)]
    params: Map<String, Value>,
}

#[derive(Debug)]
pub struct RunConfig {
    pub command: Command,
    pub seed: u64,
    /// Whether a seed was supplied explicitly.
    pub seed_given: bool,
    pub workers: usize,
    pub format: Format,
    pub out: Option<PathBuf>,
}

/// What the report header records. The worker count is left out: it never
/// changes the output, and keeping it would break byte-identity across
/// worker counts.
#[derive(Debug, Serialize)]
pub struct Header {
    pub tool: &'static str,
    pub version: &'static str,
    pub verb: &'static str,
    pub seed: u64,
    pub format: Format,
    pub params: Value,
}

/// The argument object of the innermost subcommand.
fn leaf(v: &mut Value) -> Option<&mut Map<String, Value>> {
    let map = v.as_object_mut()?;
    let descend = map.len() == 1 && map.values().next().is_some_and(Value::is_object);
    if descend {
        leaf(map.values_mut().next().unwrap())
    } else {
        Some(map)
    }
}

pub fn resolve(cli: Cli) -> Result<RunConfig, String> {
    let g = cli.globals;
    let file = match &g.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            serde_json::from_str::<ConfigFile>(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => ConfigFile::default(),
    };
    let mut command = cli.command;
    if !file.params.is_empty() {
        let mut v = serde_json::to_value(&command).map_err(|e| e.to_string())?;
        let args = leaf(&mut v).ok_or("command has no parameters")?;
        for (k, val) in file.params {
            args.insert(k, val);
        }
        command = serde_json::from_value(v).map_err(|e| format!("config params: {e}"))?;
    }
    let seed = file.seed.or(g.seed);
    let workers = file.workers.or(g.workers).unwrap_or_else(|| {
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    });
    if workers == 0 {
        return Err("--workers must be positive".into());
    }
    Ok(RunConfig {
        command,
        seed: seed.unwrap_or(0),
        seed_given: seed.is_some(),
        workers,
        format: file.format.or(g.format).unwrap_or_default(),
        out: file.out.or(g.out),
    })
}

impl RunConfig {
    pub fn header(&self) -> Header {
        let mut params = serde_json::to_value(&self.command).unwrap_or(Value::Null);
        let params = leaf(&mut params).map(|m| Value::Object(m.clone())).unwrap_or(Value::Null);
        Header {
            tool: "bacharach",
            version: env!("CARGO_PKG_VERSION"),
            verb: self.command.verb(),
            seed: self.seed,
            format: self.format,
            params,
        }
    }
}
