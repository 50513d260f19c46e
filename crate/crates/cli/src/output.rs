use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use serde::Serialize;
use serde_json::{json, Value};

/// Seventeen significant digits, locale independent.
pub fn real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

pub struct Csv {
    rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Self { rows: vec![header.iter().map(|h| h.as_ref().to_string()).collect()] }
    }

    pub fn row(&mut self, fields: Vec<String>) {
        self.rows.push(fields);
    }

    pub fn reals(&mut self, values: &[f64]) {
        self.row(values.iter().map(|&x| real(x)).collect());
    }

    pub fn write(&self, path: &Path) -> io::Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_path(path)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()
    }
}

/// Output files of one command, all derived from a common path prefix.
pub struct Outputs {
    prefix: PathBuf,
    written: Vec<String>,
}

impl Outputs {
    pub fn new(prefix: &Path) -> io::Result<Self> {
        if let Some(dir) = prefix.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        Ok(Self { prefix: prefix.to_path_buf(), written: Vec::new() })
    }

    pub fn path(&self, suffix: &str) -> PathBuf {
        let mut name = self.prefix.file_name().map(|s| s.to_os_string()).unwrap_or_default();
        name.push(suffix);
        self.prefix.with_file_name(name)
    }

    pub fn csv(&mut self, suffix: &str, table: &Csv) -> io::Result<()> {
        let p = self.path(suffix);
        table.write(&p)?;
        self.written.push(p.display().to_string());
        Ok(())
    }

    pub fn text(&mut self, suffix: &str, body: &str) -> io::Result<()> {
        let p = self.path(suffix);
        fs::write(&p, body)?;
        self.written.push(p.display().to_string());
        Ok(())
    }

    pub fn written(&self) -> &[String] {
        &self.written
    }
}

/// Everything needed to re-run a command and audit its outputs.
pub struct Manifest {
    pub command: &'static str,
    pub command_line: Vec<String>,
    pub parameters: Value,
    pub master_seed: Option<u64>,
    pub workers: Option<usize>,
    pub started: String,
    pub failures: Value,
    pub results: Value,
}

pub fn timestamp() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

impl Manifest {
    pub fn new(command: &'static str, command_line: Vec<String>, parameters: impl Serialize) -> Self {
        Self {
            command,
            command_line,
            parameters: serde_json::to_value(parameters).unwrap_or(Value::Null),
            master_seed: None,
            workers: None,
            started: timestamp(),
            failures: json!({}),
            results: json!({}),
        }
    }

    pub fn result(&mut self, key: &str, value: impl Serialize) {
        if let Value::Object(m) = &mut self.results {
            m.insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
        }
    }

    pub fn to_json(&self, outputs: &[String], status: &str) -> Value {
        json!({
            "artifact": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "command_line": self.command_line,
            "parameters": self.parameters,
            "master_seed": self.master_seed,
            "workers": self.workers,
            "started": self.started,
            "finished": timestamp(),
            "failures": self.failures,
            "status": status,
            "outputs": outputs,
            "results": self.results,
        })
    }
}

/// Parses `lo:hi:steps` into `steps` points with both endpoints included.
pub fn parse_range(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("range '{s}' is not of the form lo:hi:steps"));
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| format!("bad lower bound '{}'", parts[0]))?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| format!("bad upper bound '{}'", parts[1]))?;
    let steps: usize = parts[2].trim().parse().map_err(|_| format!("bad step count '{}'", parts[2]))?;
    if !(lo.is_finite() && hi.is_finite()) {
        return Err("range bounds must be finite".into());
    }
    match steps {
        0 => Err("range needs at least one step".into()),
        1 if lo != hi => Err(format!("a single-step range needs lo == hi, got {lo}:{hi}")),
        1 => Ok(vec![lo]),
        n => Ok(linspace(lo, hi, n)),
    }
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    v[n - 1] = hi;
    v
}

/// Minimal gnuplot script plotting columns 2.. of a CSV against column 1.
pub fn gnuplot_stub(csv: &Path, columns: &[&str], xlabel: &str, logscale_y: bool) -> String {
    let file = csv.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let mut s = String::from("set datafile separator ','\nset key autotitle columnhead\n");
    s.push_str(&format!("set xlabel '{xlabel}'\n"));
    if logscale_y {
        s.push_str("set logscale y\n");
    }
    let plots: Vec<String> =
        (2..=columns.len()).map(|c| format!("'{file}' using 1:{c} with lines")).collect();
    s.push_str(&format!("plot {}\n", plots.join(", \\\n     ")));
    s
}
