use std::fmt::{Display, Write as _};
use std::time::Duration;

use clap::ValueEnum;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Aligned table with a header.
    Text,
    /// One `key=value` per line, byte-stable for a fixed seed.
    Machine,
}

/// Exit status of a command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    /// Success, feasible, or true.
    Ok = 0,
    /// Infeasible, false, or not found.
    Negative = 1,
    Usage = 2,
    NotConverged = 3,
}

impl Status {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub command: String,
    /// SHA-256 over the bytes of every input file, in argument order.
    pub input_digest: Option<String>,
    pub seed: u64,
    pub fields: Vec<(String, String)>,
    /// Printed in text format only, so machine output stays reproducible.
    pub wall_time: Duration,
}

impl RunReport {
    pub fn new(command: impl Into<String>, seed: u64) -> Self {
        Self {
            command: command.into(),
            input_digest: None,
            seed,
            fields: Vec::new(),
            wall_time: Duration::ZERO,
        }
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl Display) {
        self.fields.push((key.into(), value.to_string()));
    }

    pub fn push_vec(&mut self, key: impl Into<String>, v: &[f64]) {
        let joined: Vec<String> = v.iter().map(|&x| num(x)).collect();
        self.push(key, joined.join(","));
    }

    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        match format {
            Format::Machine => {
                let _ = writeln!(out, "command={}", self.command);
                if let Some(d) = &self.input_digest {
                    let _ = writeln!(out, "input_sha256={d}");
                }
                let _ = writeln!(out, "seed={}", self.seed);
                for (k, v) in &self.fields {
                    let _ = writeln!(out, "{k}={v}");
                }
            }
            Format::Text => {
                let _ = writeln!(out, "# {}", self.command);
                let width = self
                    .fields
                    .iter()
                    .map(|(k, _)| k.len())
                    .max()
                    .unwrap_or(0)
                    .max(12);
                if let Some(d) = &self.input_digest {
                    let _ = writeln!(out, "{:<width$}  {d}", "input sha256");
                }
                let _ = writeln!(out, "{:<width$}  {}", "seed", self.seed);
                for (k, v) in &self.fields {
                    let _ = writeln!(out, "{k:<width$}  {v}");
                }
                let _ = writeln!(out, "{:<width$}  {:.3?}", "wall time", self.wall_time);
            }
        }
        out
    }
}

/// Shortest round-trip form, switching to exponent notation for very small
/// or very large magnitudes.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

pub fn sha256_hex(chunks: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for c in chunks {
        h.update(c);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}
