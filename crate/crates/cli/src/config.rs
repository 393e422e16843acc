//! Run configuration: defaults, the key-value config file, command-line
//! overrides, and validation. File and flags describe the same fields;
//! flags win.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use bconv_core::equi::TruncationMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Linear,
    Geometric,
}

impl Mode {
    pub fn truncation(self) -> TruncationMode {
        match self {
            Mode::Linear => TruncationMode::Linear,
            Mode::Geometric => TruncationMode::Geometric,
        }
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "linear" => Ok(Mode::Linear),
            "geometric" => Ok(Mode::Geometric),
            other => Err(format!("mode must be linear or geometric, got {other:?}")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Linear => "linear",
            Mode::Geometric => "geometric",
        })
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Monic integer polynomial, descending coefficients.
    pub poly: Vec<i64>,
    /// Force this representative index as the free direction.
    pub free_override: Option<usize>,
    /// Free-coordinate half-width of the window.
    pub b: f64,
    /// Attractor approximation depth.
    pub k: usize,
    /// Membership resolution for the window consistency sweep.
    pub eps_r: f64,
    /// Clustering tolerance for gap statistics.
    pub delta: f64,
    /// Stabilization depth of the weight table.
    pub n_stab: usize,
    /// Levels in the distance table and criterion series.
    pub n_max: usize,
    pub mode: Mode,
    /// Atom-count ceiling for measure iteration.
    pub atom_cap: usize,
    /// Point-count ceiling for window and cloud generation.
    pub window_cap: usize,
    pub out: PathBuf,
    /// Worker-thread cap; 0 leaves the runtime default.
    pub jobs: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            poly: vec![1, -1, -1, 1, -1],
            free_override: None,
            b: 200.0,
            k: 12,
            eps_r: 1e-3,
            delta: 1e-9,
            n_stab: 40,
            n_max: 20,
            mode: Mode::Linear,
            atom_cap: 10_000_000,
            window_cap: 10_000_000,
            out: PathBuf::from("out"),
            jobs: 0,
        }
    }
}

fn parse_poly(s: &str) -> Result<Vec<i64>, String> {
    let coeffs: Result<Vec<i64>, _> = s
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<i64>())
        .collect();
    let coeffs = coeffs.map_err(|e| format!("bad polynomial coefficient: {e}"))?;
    if coeffs.is_empty() {
        return Err("polynomial must have at least one coefficient".into());
    }
    Ok(coeffs)
}

impl RunConfig {
    /// Apply one key-value pair from the config file.
    fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let bad = |e: &dyn fmt::Display| format!("{key}: {e}");
        match key {
            "poly" => self.poly = parse_poly(value)?,
            "free_override" => {
                self.free_override = Some(value.parse().map_err(|e| bad(&e))?)
            }
            "b" => self.b = value.parse().map_err(|e| bad(&e))?,
            "k" => self.k = value.parse().map_err(|e| bad(&e))?,
            "eps_r" => self.eps_r = value.parse().map_err(|e| bad(&e))?,
            "delta" => self.delta = value.parse().map_err(|e| bad(&e))?,
            "n_stab" => self.n_stab = value.parse().map_err(|e| bad(&e))?,
            "n_max" => self.n_max = value.parse().map_err(|e| bad(&e))?,
            "mode" => self.mode = value.parse()?,
            "atom_cap" => self.atom_cap = value.parse().map_err(|e| bad(&e))?,
            "window_cap" => self.window_cap = value.parse().map_err(|e| bad(&e))?,
            "out" => self.out = PathBuf::from(value),
            "jobs" => self.jobs = value.parse().map_err(|e| bad(&e))?,
            other => return Err(format!("unknown config key {other:?}")),
        }
        Ok(())
    }

    /// Parse a config file: one `key = value` per line, `#` comments.
    pub fn load(text: &str) -> Result<RunConfig, String> {
        let mut cfg = RunConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", lineno + 1))?;
            cfg.set(key.trim(), value.trim())
                .map_err(|e| format!("line {}: {e}", lineno + 1))?;
        }
        Ok(cfg)
    }

    /// Checks that need no number-field work. The bound-vs-threshold check
    /// lives in the pipeline, after classification.
    pub fn validate(&self) -> Result<(), String> {
        if self.poly.is_empty() {
            return Err("polynomial must have at least one coefficient".into());
        }
        for (name, v) in [("eps_r", self.eps_r), ("delta", self.delta), ("b", self.b)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(format!("{name} must be positive and finite, got {v}"));
            }
        }
        if self.n_max == 0 {
            return Err("n_max must be at least 1".into());
        }
        if self.atom_cap == 0 || self.window_cap == 0 {
            return Err("resource caps must be positive".into());
        }
        Ok(())
    }
}
