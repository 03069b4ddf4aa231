//! Experiment configs: line-oriented `key = value` text.
//!
//! Every key has a resolved value after parsing, and [`ExperimentConfig::canonical`]
//! prints all of them in a fixed order. That text is what run headers embed and what
//! the config hash covers.

use std::fmt;
use std::path::PathBuf;

use collapse_core::lattice::EpsRange;
use collapse_core::real::RealInput;
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Collapse,
    Rayleigh,
    Badapprox,
    Mu,
    Spectrum,
}

impl Kind {
    pub const ALL: [Kind; 5] = [Kind::Collapse, Kind::Rayleigh, Kind::Badapprox, Kind::Mu, Kind::Spectrum];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Collapse => "collapse",
            Kind::Rayleigh => "rayleigh",
            Kind::Badapprox => "badapprox",
            Kind::Mu => "mu",
            Kind::Spectrum => "spectrum",
        }
    }

    fn parse(s: &str) -> Option<Kind> {
        Kind::ALL.into_iter().find(|k| k.name() == s)
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(n) => write!(f, "config line {n}: {}", self.message),
            None => write!(f, "config: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

fn fail<T>(line: Option<usize>, message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError { line, message: message.into() })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub kind: Kind,
    /// Direction spec list in the shared real-number grammar.
    pub alpha: String,
    pub eps_min: f64,
    pub eps_max: f64,
    pub per_octave: u32,
    /// Add the convergent subgrid to k = 2 collapse scans.
    pub convergents: bool,
    /// Continued-fraction terms for `mu` and for the convergent subgrid.
    pub terms: usize,
    /// First index of the μ tail window; defaults to terms / 3.
    pub tail: usize,
    pub q_bound: u64,
    /// Quadrature nodes per variable for `rayleigh`.
    pub n: usize,
    /// Single ε for `spectrum`.
    pub eps: f64,
    pub p: usize,
    pub count: usize,
    pub csv: Option<PathBuf>,
    pub jsonl: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub workers: Option<usize>,
}

pub const KEYS: [&str; 17] = [
    "kind",
    "alpha",
    "eps_min",
    "eps_max",
    "per_octave",
    "convergents",
    "terms",
    "tail",
    "q_bound",
    "n",
    "eps",
    "p",
    "count",
    "csv",
    "jsonl",
    "svg",
    "workers",
];

/// Accepts `2^-k` as well as plain floats.
pub fn parse_eps(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Some(e) = s.strip_prefix("2^") {
        return e.parse::<i32>().ok().map(|e| 2f64.powi(e));
    }
    s.parse().ok()
}

fn fmt_eps(x: f64) -> String {
    let l = x.log2();
    if l.fract() == 0.0 && 2f64.powi(l as i32) == x {
        format!("2^{}", l as i32)
    } else {
        format!("{x:e}")
    }
}

impl ExperimentConfig {
    /// Defaults for `kind` with the given direction.
    pub fn new(kind: Kind, alpha: &str) -> Self {
        let (eps_min, eps_max, q_bound) = match kind {
            Kind::Rayleigh => (2f64.powi(-8), 0.5, 10_000),
            _ => (2f64.powi(-24), 2f64.powi(-4), 10_000),
        };
        ExperimentConfig {
            kind,
            alpha: alpha.to_string(),
            eps_min,
            eps_max,
            per_octave: 1,
            convergents: true,
            terms: 60,
            tail: 20,
            q_bound,
            n: 128,
            eps: 1.0,
            p: 1,
            count: 20,
            csv: None,
            jsonl: None,
            svg: None,
            workers: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut pairs: Vec<(usize, &str, &str)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split_once('#').map_or(raw, |(l, _)| l).trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return fail(Some(line_no), "expected `key = value`");
            };
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return fail(Some(line_no), format!("unknown key '{key}'"));
            }
            if let Some((prev, ..)) = pairs.iter().find(|p| p.1 == key) {
                return fail(Some(line_no), format!("'{key}' already set on line {prev}"));
            }
            pairs.push((line_no, key, value));
        }
        let get = |k: &str| pairs.iter().find(|p| p.1 == k).map(|p| (p.0, p.2));
        let Some((kind_line, kind)) = get("kind") else {
            return fail(None, "missing 'kind'");
        };
        let Some(kind) = Kind::parse(kind) else {
            return fail(Some(kind_line), format!("unknown kind '{kind}'"));
        };
        let Some((alpha_line, alpha)) = get("alpha") else {
            return fail(None, "missing 'alpha'");
        };
        if let Err(e) = RealInput::parse_list(alpha) {
            return fail(Some(alpha_line), e.to_string());
        }
        let mut c = ExperimentConfig::new(kind, alpha);
        let mut tail_set = false;
        for &(line, key, value) in &pairs {
            let bad = || ConfigError { line: Some(line), message: format!("bad value '{value}' for '{key}'") };
            let num = |v: &str| v.parse::<u64>().map_err(|_| bad());
            let eps = |v: &str| parse_eps(v).filter(|e| *e > 0.0 && *e <= 1.0).ok_or_else(bad);
            let path = |v: &str| if v.is_empty() { None } else { Some(PathBuf::from(v)) };
            match key {
                "kind" | "alpha" => {}
                "eps_min" => c.eps_min = eps(value)?,
                "eps_max" => c.eps_max = eps(value)?,
                "eps" => c.eps = eps(value)?,
                "per_octave" => c.per_octave = num(value)?.try_into().map_err(|_| bad())?,
                "convergents" => c.convergents = value.parse().map_err(|_| bad())?,
                "terms" => c.terms = num(value)? as usize,
                "tail" => {
                    c.tail = num(value)? as usize;
                    tail_set = true;
                }
                "q_bound" => c.q_bound = num(value)?,
                "n" => c.n = num(value)? as usize,
                "p" => c.p = num(value)? as usize,
                "count" => c.count = num(value)? as usize,
                "csv" => c.csv = path(value),
                "jsonl" => c.jsonl = path(value),
                "svg" => c.svg = path(value),
                "workers" if value.is_empty() => c.workers = None,
                "workers" => c.workers = Some(num(value)? as usize).filter(|&w| w > 0),
                _ => unreachable!("checked against KEYS"),
            }
        }
        if !tail_set {
            c.tail = c.terms / 3;
        }
        if c.eps_min > c.eps_max {
            return fail(None, format!("eps_min {} exceeds eps_max {}", c.eps_min, c.eps_max));
        }
        Ok(c)
    }

    pub fn alpha(&self) -> collapse_core::Result<Vec<RealInput>> {
        RealInput::parse_list(&self.alpha)
    }

    pub fn range(&self) -> EpsRange {
        EpsRange { eps_min: self.eps_min, eps_max: self.eps_max, per_octave: self.per_octave }
    }

    /// Every key with its resolved value, one per line, in [`KEYS`] order.
    pub fn canonical(&self) -> String {
        let path = |p: &Option<PathBuf>| p.as_ref().map_or(String::new(), |p| p.display().to_string());
        let values = [
            self.kind.to_string(),
            self.alpha.clone(),
            fmt_eps(self.eps_min),
            fmt_eps(self.eps_max),
            self.per_octave.to_string(),
            self.convergents.to_string(),
            self.terms.to_string(),
            self.tail.to_string(),
            self.q_bound.to_string(),
            self.n.to_string(),
            fmt_eps(self.eps),
            self.p.to_string(),
            self.count.to_string(),
            path(&self.csv),
            path(&self.jsonl),
            path(&self.svg),
            self.workers.map_or(String::new(), |w| w.to_string()),
        ];
        KEYS.iter().zip(values).map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    /// sha256 of the canonical text, hex.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
