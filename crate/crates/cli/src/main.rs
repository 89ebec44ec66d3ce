mod args;
mod config;
mod verbs;

use std::process::ExitCode;

use clap::Parser;
use serde_json::{json, Value};

use args::{Cli, Format};
use config::RunConfig;
use verbs::{CliError, Outcome};

const EXIT_NEGATIVE: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn render(cfg: &RunConfig, out: &Outcome) -> Result<String, String> {
    let header = serde_json::to_value(cfg.header()).unwrap();
    match cfg.format {
        Format::Json => {
            let doc = json!({ "header": header, "result": out.result });
            Ok(serde_json::to_string_pretty(&doc).unwrap() + "\n")
        }
        Format::Csv => {
            let body = out.csv.as_ref().ok_or_else(|| format!("csv output is not available for `{}`", cfg.command.verb()))?;
            Ok(comment_header(&header) + body)
        }
        Format::Text => {
            let mut s = comment_header(&header);
            if let Value::Object(m) = &out.result {
                for (k, v) in m {
                    let v = match v {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    };
                    s.push_str(&format!("{k}: {v}\n"));
                }
            }
            Ok(s)
        }
    }
}

fn comment_header(header: &Value) -> String {
    format!("# bacharach {}\n# config {}\n", env!("CARGO_PKG_VERSION"), header)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cfg = match config::resolve(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let outcome = pool.install(|| verbs::run(&cfg.command, cfg.seed, cfg.seed_given));
    let outcome = match outcome {
        Ok(o) => o,
        Err(CliError::Usage(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
        Err(CliError::Failure(e)) => {
            eprintln!("failure: {e}");
            return ExitCode::from(EXIT_NEGATIVE);
        }
    };
    let text = match render(&cfg, &outcome) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match &cfg.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(EXIT_NEGATIVE);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(if outcome.negative { EXIT_NEGATIVE } else { 0 })
}
