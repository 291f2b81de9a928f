use clap::ValueEnum;
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Human-readable text.
    Table,
    /// One JSON object per line.
    Structured,
}

/// Run parameters echoed into every experiment's output.
#[derive(Debug, Clone)]
pub struct RunInfo {
    pub seed: u64,
    pub trials: Option<usize>,
    pub cap: usize,
    pub threads: usize,
    pub rng: &'static str,
}

pub struct Out {
    format: Format,
}

impl Out {
    pub fn new(format: Format) -> Self {
        Out { format }
    }

    pub fn format(&self) -> Format {
        self.format
    }

    /// Prints `text` in table mode, else `record` tagged with `kind` as one line.
    pub fn emit(&self, kind: &str, text: impl AsRef<str>, record: Value) {
        match self.format {
            Format::Table => println!("{}", text.as_ref()),
            Format::Structured => {
                let mut m = Map::new();
                m.insert("record".into(), Value::from(kind));
                if let Value::Object(fields) = record {
                    m.extend(fields);
                } else {
                    m.insert("value".into(), record);
                }
                println!("{}", Value::Object(m));
            }
        }
    }

    pub fn meta(&self, command: &str, info: &RunInfo, extra: Value) {
        let version = env!("CARGO_PKG_VERSION");
        let mut text = format!(
            "# kroncover {version} {command} seed={} rng={} cap={} threads={}",
            info.seed, info.rng, info.cap, info.threads
        );
        if let Some(t) = info.trials {
            text.push_str(&format!(" trials={t}"));
        }
        if let Value::Object(fields) = &extra {
            for (k, v) in fields {
                let v = v.as_str().map(str::to_string).unwrap_or_else(|| v.to_string());
                text.push_str(&format!(" {k}={v}"));
            }
        }
        let record = json!({
            "command": command,
            "version": version,
            "seed": info.seed,
            "rng": info.rng,
            "config": {
                "cap": info.cap,
                "threads": info.threads,
                "trials": info.trials,
                "params": extra,
            },
        });
        self.emit("meta", text, record);
    }
}
