use serde::Serialize;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

/// Operational failure; serialized as the JSON error record on stderr.
#[derive(Debug)]
pub enum Failure {
    Module(anisoreg::Error),
    Config(String),
    Io(String),
}

impl Failure {
    pub fn kind(&self) -> &'static str {
        match self {
            Failure::Module(e) => e.kind(),
            Failure::Config(_) => "malformed_config",
            Failure::Io(_) => "io",
        }
    }

    pub fn message(&self) -> String {
        match self {
            Failure::Module(e) => e.to_string(),
            Failure::Config(m) | Failure::Io(m) => m.clone(),
        }
    }

    pub fn record(&self, command: Option<&str>) -> Value {
        json!({ "status": "error", "command": command, "kind": self.kind(), "message": self.message() })
    }
}

impl From<anisoreg::Error> for Failure {
    fn from(e: anisoreg::Error) -> Self {
        Failure::Module(e)
    }
}

pub fn config_error(msg: impl Into<String>) -> Failure {
    Failure::Config(msg.into())
}

/// What a command produced; `pass` is false when an invariant check failed.
pub struct Outcome {
    pub report: Value,
    pub pass: bool,
}

impl Outcome {
    pub fn new(report: impl Serialize, pass: bool) -> Result<Self, Failure> {
        let report = serde_json::to_value(report).map_err(|e| Failure::Io(e.to_string()))?;
        Ok(Self { report, pass })
    }
}

/// Shortest representation that parses back to the same f64.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:?}")
    }
}

/// Artifact sink rooted at the output directory.
pub struct Sink {
    dir: PathBuf,
    pub written: Vec<PathBuf>,
}

impl Sink {
    pub fn new(dir: &Path) -> Result<Self, Failure> {
        std::fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
        Ok(Self { dir: dir.to_path_buf(), written: Vec::new() })
    }

    pub fn csv<I, R>(&mut self, name: &str, header: &[&str], rows: I) -> Result<(), Failure>
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator<Item = String>,
    {
        let path = self.dir.join(name);
        let io = |e: csv::Error| Failure::Io(format!("{}: {e}", path.display()));
        let mut w = csv::Writer::from_path(&path).map_err(io)?;
        w.write_record(header).map_err(io)?;
        for row in rows {
            w.write_record(row).map_err(io)?;
        }
        w.flush().map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        self.written.push(path);
        Ok(())
    }

    /// CSV whose cells are all numbers.
    pub fn table<I>(&mut self, name: &str, header: &[&str], rows: I) -> Result<(), Failure>
    where
        I: IntoIterator<Item = Vec<f64>>,
    {
        self.csv(name, header, rows.into_iter().map(|r| r.into_iter().map(num).collect::<Vec<_>>()))
    }

    pub fn json(&mut self, name: &str, value: &Value) -> Result<(), Failure> {
        let path = self.dir.join(name);
        let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Io(e.to_string()))?;
        std::fs::write(&path, text + "\n").map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        self.written.push(path);
        Ok(())
    }
}
