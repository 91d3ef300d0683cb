//! Run manifest: a flat `key=value` text file written next to the outputs.

use std::fmt::Write as _;

pub const MANIFEST_FILE: &str = "manifest.txt";

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunManifest {
    pub version: String,
    pub problem: String,
    /// Resolved configuration as one-line JSON.
    pub config: String,
    pub duration_seconds: f64,
    /// `(name, value)` in emission order; values are the shortest round-trip text.
    pub metrics: Vec<(String, String)>,
    /// File names relative to the output directory.
    pub artifacts: Vec<String>,
    pub error: Option<String>,
}

fn one_line(s: &str) -> String {
    s.replace('\\', "\\\\").replace('\n', "\\n")
}

fn unescape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut it = s.chars();
    while let Some(c) = it.next() {
        if c == '\\' {
            match it.next() {
                Some('n') => out.push('\n'),
                Some(o) => out.push(o),
                None => out.push('\\'),
            }
        } else {
            out.push(c);
        }
    }
    out
}

impl RunManifest {
    pub fn metric(&self, name: &str) -> Option<&str> {
        self.metrics.iter().find(|(k, _)| k == name).map(|(_, v)| v.as_str())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "tool=dirode");
        let _ = writeln!(s, "version={}", self.version);
        let _ = writeln!(s, "problem={}", self.problem);
        let _ = writeln!(s, "config={}", one_line(&self.config));
        let _ = writeln!(s, "duration_seconds={:.6}", self.duration_seconds);
        let _ = writeln!(s, "status={}", if self.error.is_some() { "error" } else { "ok" });
        if let Some(e) = &self.error {
            let _ = writeln!(s, "error={}", one_line(e));
        }
        for (k, v) in &self.metrics {
            let _ = writeln!(s, "metric.{k}={v}");
        }
        for (i, a) in self.artifacts.iter().enumerate() {
            let _ = writeln!(s, "artifact.{i}={a}");
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut m = RunManifest::default();
        for (n, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected key=value", n + 1))?;
            match k {
                "tool" | "status" => {}
                "version" => m.version = v.to_string(),
                "problem" => m.problem = v.to_string(),
                "config" => m.config = unescape(v),
                "duration_seconds" => m.duration_seconds = v.parse().map_err(|e| format!("line {}: {e}", n + 1))?,
                "error" => m.error = Some(unescape(v)),
                _ => {
                    if let Some(name) = k.strip_prefix("metric.") {
                        m.metrics.push((name.to_string(), v.to_string()));
                    } else if k.starts_with("artifact.") {
                        m.artifacts.push(v.to_string());
                    } else {
                        return Err(format!("line {}: unknown key `{k}`", n + 1));
                    }
                }
            }
        }
        Ok(m)
    }
}
