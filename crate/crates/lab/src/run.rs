//! Dispatch from a config to the core operations, and the run artifacts.
//!
//! A CSV artifact is a block of `#` header lines followed by the table. The header
//! carries the schema version, tool version, config hash and the canonical config. The
//! timestamp and wall time share one header line, so two runs of one config differ on
//! that line only.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use collapse_core::diophantine::{cf_expand_partial, mu_estimate, BadApproxScanner};
use collapse_core::lattice::{scan_collapse, GramSource};
use collapse_core::real::RealInput;
use collapse_core::spectra::{rayleigh_scan, torus_hodge_spectrum};
use rayon::prelude::*;
use serde::ser::{Serialize, SerializeMap, Serializer};

use crate::config::{ExperimentConfig, Kind};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = concat!("collapse-lab ", env!("CARGO_PKG_VERSION"));
const TIMESTAMP_PREFIX: &str = "# timestamp ";

/// Column names and meanings per experiment kind.
pub const COLUMNS: &[(Kind, &[(&str, &str)])] = &[
    (
        Kind::Collapse,
        &[
            ("eps", "collapse parameter ε"),
            ("convergent", "convergent index n when the row is on the convergent subgrid, else empty"),
            ("injrad", "half the shortest lattice vector of G_ε"),
            ("diam_lo", "lower bound on the diameter (covering radius)"),
            ("diam_hi", "upper bound on the diameter"),
            ("vol", "√det G_ε"),
            ("dual_min", "shortest vector of the dual lattice"),
            ("exp_injrad", "ln injrad / ln ε"),
            ("exp_diam", "ln diam_hi / ln ε"),
        ],
    ),
    (
        Kind::Rayleigh,
        &[
            ("eps", "collapse parameter ε"),
            ("R_eps", "Rayleigh quotient of the test 1-form in the ε-metric"),
            ("R1_times_eps2", "ε² times the quotient at ε = 1"),
            ("rel_gap", "|R_eps / R1_times_eps2 − 1|"),
            ("n_used", "quadrature nodes per variable after refinement"),
        ],
    ),
    (
        Kind::Badapprox,
        &[
            ("q", "denominator at which the running minimum improved"),
            ("dist", "max-norm distance of q·α to the integer lattice"),
            ("quality", "q^{1/(k−1)} · dist"),
            ("p", "nearest integer vector, space separated"),
        ],
    ),
    (
        Kind::Mu,
        &[
            ("n", "convergent index"),
            ("a", "partial quotient a_n"),
            ("ln_q", "ln q_n"),
            ("ratio", "1 + ln q_{n+1} / ln q_n, empty where q_n = 1 or at the last index"),
        ],
    ),
    (
        Kind::Spectrum,
        &[
            ("level", "index of the distinct eigenvalue, from 0"),
            ("eigenvalue", "eigenvalue of the p-form Laplacian"),
            ("multiplicity", "multiplicity including the binom(k, p) form factor"),
            ("norm2", "wᵀG⁻¹w for the dual vectors of the level"),
        ],
    ),
];

pub fn columns(kind: Kind) -> Vec<String> {
    COLUMNS.iter().find(|c| c.0 == kind).expect("every kind has columns").1.iter().map(|c| c.0.to_string()).collect()
}

/// Column documentation for `--help`.
pub fn columns_help() -> String {
    let mut s = format!("CSV schema version {SCHEMA_VERSION}. Columns by experiment kind:\n");
    for (kind, cols) in COLUMNS {
        let _ = writeln!(s, "\n  {kind}:");
        for (name, doc) in *cols {
            let _ = writeln!(s, "    {name:<14} {doc}");
        }
    }
    s
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => format!("{x:e}"),
            Cell::Text(t) => t.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn from_csv(s: &str) -> Cell {
        if s.is_empty() {
            Cell::Empty
        } else if let Ok(i) = s.parse() {
            Cell::Int(i)
        } else if let Ok(x) = s.parse() {
            Cell::Num(x)
        } else {
            Cell::Text(s.to_string())
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(i) => Some(*i as f64),
            Cell::Num(x) => Some(*x),
            _ => None,
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Cell::Int(i) => s.serialize_i64(*i),
            Cell::Num(x) if x.is_finite() => s.serialize_f64(*x),
            Cell::Text(t) => s.serialize_str(t),
            _ => s.serialize_none(),
        }
    }
}

struct JsonRow<'a> {
    hash: &'a str,
    columns: &'a [String],
    row: &'a [Cell],
}

impl Serialize for JsonRow<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.columns.len() + 1))?;
        m.serialize_entry("config_hash", self.hash)?;
        for (c, v) in self.columns.iter().zip(self.row) {
            m.serialize_entry(c, v)?;
        }
        m.end()
    }
}

#[derive(Clone, Debug)]
pub struct RunRecord {
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub tool_version: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Derived scalars (fitted slopes, minima), in a fixed order.
    pub summary: Vec<(String, String)>,
    pub wall_time: f64,
    pub timestamp: u64,
}

impl RunRecord {
    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i].as_f64()).collect())
    }

    pub fn summary_value(&self, key: &str) -> Option<&str> {
        self.summary.iter().find(|s| s.0 == key).map(|s| s.1.as_str())
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# schema {SCHEMA_VERSION}");
        let _ = writeln!(s, "# tool {}", self.tool_version);
        let _ = writeln!(s, "# config_hash {}", self.config_hash);
        for line in self.config.canonical().lines() {
            let _ = writeln!(s, "# config: {line}");
        }
        let _ = writeln!(s, "{TIMESTAMP_PREFIX}{} wall_s={:.3}", self.timestamp, self.wall_time);
        for (k, v) in &self.summary {
            let _ = writeln!(s, "# summary: {k} = {v}");
        }
        let _ = writeln!(s, "{}", self.columns.join(","));
        for r in &self.rows {
            let _ = writeln!(s, "{}", r.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
        }
        s
    }

    /// Reads back a CSV artifact written by [`RunRecord::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut config_text = String::new();
        let mut summary = Vec::new();
        let mut tool_version = String::new();
        let mut config_hash = String::new();
        let mut timestamp = 0;
        let mut wall_time = 0.0;
        let mut lines = text.lines().peekable();
        while let Some(line) = lines.next_if(|l| l.starts_with('#')) {
            if let Some(c) = line.strip_prefix("# config: ") {
                config_text.push_str(c);
                config_text.push('\n');
            } else if let Some(kv) = line.strip_prefix("# summary: ") {
                let (k, v) = kv.split_once(" = ").context("malformed summary line")?;
                summary.push((k.to_string(), v.to_string()));
            } else if let Some(t) = line.strip_prefix("# tool ") {
                tool_version = t.to_string();
            } else if let Some(h) = line.strip_prefix("# config_hash ") {
                config_hash = h.to_string();
            } else if let Some(t) = line.strip_prefix(TIMESTAMP_PREFIX) {
                let (ts, wall) = t.split_once(" wall_s=").unwrap_or((t, "0"));
                timestamp = ts.parse().unwrap_or(0);
                wall_time = wall.parse().unwrap_or(0.0);
            } else if let Some(v) = line.strip_prefix("# schema ") {
                if v.trim() != SCHEMA_VERSION.to_string() {
                    bail!("unsupported schema version {v}");
                }
            }
        }
        let config = ExperimentConfig::parse(&config_text)?;
        let body = lines.collect::<Vec<_>>().join("\n");
        let mut reader = csv::ReaderBuilder::new().from_reader(body.as_bytes());
        let columns: Vec<String> = reader.headers()?.iter().map(String::from).collect();
        let rows = reader
            .records()
            .map(|r| r.map(|r| r.iter().map(Cell::from_csv).collect()))
            .collect::<std::result::Result<Vec<Vec<Cell>>, _>>()?;
        Ok(RunRecord { config, config_hash, tool_version, columns, rows, summary, wall_time, timestamp })
    }

    /// One JSON object per row; a trailing object carries the timestamp.
    pub fn to_jsonl(&self) -> Result<String> {
        let mut s = String::new();
        let head = serde_json::json!({
            "schema": SCHEMA_VERSION,
            "tool": self.tool_version,
            "config_hash": self.config_hash,
            "config": self.config.canonical(),
            "summary": self.summary.iter().map(|(k, v)| (k.clone(), serde_json::Value::from(v.clone()))).collect::<serde_json::Map<_, _>>(),
        });
        s.push_str(&serde_json::to_string(&head)?);
        s.push('\n');
        for r in &self.rows {
            s.push_str(&serde_json::to_string(&JsonRow { hash: &self.config_hash, columns: &self.columns, row: r })?);
            s.push('\n');
        }
        s.push_str(&serde_json::to_string(&serde_json::json!({ "timestamp": self.timestamp, "wall_s": self.wall_time }))?);
        s.push('\n');
        Ok(s)
    }

    /// Writes the artifacts named in the config.
    pub fn write_outputs(&self) -> Result<()> {
        let write = |p: &Path, body: String| fs::write(p, body).with_context(|| format!("writing {}", p.display()));
        if let Some(p) = &self.config.csv {
            write(p, self.to_csv())?;
        }
        if let Some(p) = &self.config.jsonl {
            write(p, self.to_jsonl()?)?;
        }
        if let Some(p) = &self.config.svg {
            write(p, crate::plot::plot(self)?)?;
        }
        Ok(())
    }
}

/// CSV text with the timestamp line removed, for determinism comparisons.
pub fn strip_timestamp(csv: &str) -> String {
    csv.lines().filter(|l| !l.starts_with(TIMESTAMP_PREFIX)).map(|l| format!("{l}\n")).collect()
}

/// Runs the experiment, inside a dedicated pool when the config names a worker count.
pub fn run(config: &ExperimentConfig) -> Result<RunRecord> {
    match config.workers {
        Some(w) => rayon::ThreadPoolBuilder::new().num_threads(w).build()?.install(|| run_inner(config)),
        None => run_inner(config),
    }
}

fn run_inner(config: &ExperimentConfig) -> Result<RunRecord> {
    let start = Instant::now();
    let alpha = config.alpha()?;
    let (rows, summary) = match config.kind {
        Kind::Collapse => collapse(config, &alpha)?,
        Kind::Rayleigh => rayleigh(config, &alpha)?,
        Kind::Badapprox => badapprox(config, &alpha)?,
        Kind::Mu => mu(config, &alpha)?,
        Kind::Spectrum => spectrum(config, &alpha)?,
    };
    Ok(RunRecord {
        config: config.clone(),
        config_hash: config.hash(),
        tool_version: TOOL_VERSION.to_string(),
        columns: columns(config.kind),
        rows,
        summary,
        wall_time: start.elapsed().as_secs_f64(),
        timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
    })
}

type Table = (Vec<Vec<Cell>>, Vec<(String, String)>);

fn single(alpha: &[RealInput], kind: Kind) -> Result<&RealInput> {
    match alpha {
        [a] => Ok(a),
        _ => bail!("{kind} takes a single α, got {}", alpha.len()),
    }
}

fn collapse(c: &ExperimentConfig, alpha: &[RealInput]) -> Result<Table> {
    let k = alpha.len() + 1;
    let range = c.range();
    let cf = if k == 2 && c.convergents { Some(cf_expand_partial(&alpha[0], c.terms)?) } else { None };
    let rows = scan_collapse(k, alpha, &range.grid()?, cf.as_ref().map(|cf| (cf, &range)))?;
    let mut summary = vec![("k".to_string(), k.to_string())];
    if let Some(cf) = &cf {
        if let Ok(m) = mu_estimate(cf, c.tail) {
            summary.push(("mu_hat".into(), format!("{:.6}", m.estimate)));
        }
    }
    let finite = |f: fn(&collapse_core::lattice::CollapseScanRow) -> f64| rows.iter().map(f).filter(|x| x.is_finite());
    summary.push(("min_exp_diam".into(), format!("{:.6}", finite(|r| r.exp_diam()).fold(f64::INFINITY, f64::min))));
    summary.push(("max_exp_injrad".into(), format!("{:.6}", finite(|r| r.exp_injrad()).fold(f64::NEG_INFINITY, f64::max))));
    let rows = rows
        .iter()
        .map(|r| {
            vec![
                Cell::Num(r.eps),
                r.convergent.map_or(Cell::Empty, |n| Cell::Int(n as i64)),
                Cell::Num(r.injrad),
                Cell::Num(r.diam_lo),
                Cell::Num(r.diam_hi),
                Cell::Num(r.vol),
                Cell::Num(r.dual_min),
                Cell::Num(r.exp_injrad()),
                Cell::Num(r.exp_diam()),
            ]
        })
        .collect();
    Ok((rows, summary))
}

fn rayleigh(c: &ExperimentConfig, alpha: &[RealInput]) -> Result<Table> {
    let a = single(alpha, c.kind)?.to_f64();
    let grid = c.range().grid()?;
    let (rows, slope) = rayleigh_scan(a, &grid, c.n)?;
    let max_gap = rows.iter().map(|r| r.rel_gap).fold(0.0, f64::max);
    let summary = vec![("slope".into(), format!("{slope:.6}")), ("max_rel_gap".into(), format!("{max_gap:.3e}"))];
    let rows = rows
        .iter()
        .map(|r| vec![Cell::Num(r.eps), Cell::Num(r.r_eps), Cell::Num(r.r1_times_eps2), Cell::Num(r.rel_gap), Cell::Int(r.n_used as i64)])
        .collect();
    Ok((rows, summary))
}

fn badapprox(c: &ExperimentConfig, alpha: &[RealInput]) -> Result<Table> {
    let scanner = BadApproxScanner::new(alpha, c.q_bound)?;
    let quality: Vec<f64> = (1..=c.q_bound).into_par_iter().map(|q| scanner.row(q).0.quality).collect();
    let mut rows = Vec::new();
    let mut best = f64::INFINITY;
    for (i, &x) in quality.iter().enumerate() {
        if x < best {
            best = x;
            let (r, _) = scanner.row(i as u64 + 1);
            let p = r.p.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
            rows.push(vec![Cell::Int(r.q as i64), Cell::Num(r.dist), Cell::Num(r.quality), Cell::Text(p)]);
        }
    }
    let witness = rows.last().map_or(0, |r| match r[0] {
        Cell::Int(q) => q,
        _ => 0,
    });
    let summary = vec![("min_quality".into(), format!("{best:e}")), ("witness_q".into(), witness.to_string())];
    Ok((rows, summary))
}

fn mu(c: &ExperimentConfig, alpha: &[RealInput]) -> Result<Table> {
    let cf = cf_expand_partial(single(alpha, c.kind)?, c.terms)?;
    let est = mu_estimate(&cf, c.tail)?;
    let rows = cf
        .quotients()
        .iter()
        .zip(cf.convergents())
        .enumerate()
        .map(|(n, (a, (_, q)))| {
            let ratio = est.ratios.iter().find(|r| r.0 == n).map_or(Cell::Empty, |r| Cell::Num(r.1));
            vec![Cell::Int(n as i64), Cell::Text(a.to_string()), Cell::Num(collapse_core::interval::ln_big(q)), ratio]
        })
        .collect();
    let summary = vec![
        ("mu_hat".into(), format!("{:.6}", est.estimate)),
        ("window".into(), format!("{}..{}", est.window.0, est.window.1)),
        ("window_max".into(), format!("{:.6}", est.window_max)),
        ("a_form".into(), format!("{:.6}", est.a_form)),
        ("forms_agree".into(), est.forms_agree.to_string()),
    ];
    Ok((rows, summary))
}

fn spectrum(c: &ExperimentConfig, alpha: &[RealInput]) -> Result<Table> {
    let g = GramSource::collapsed(alpha, c.eps)?;
    let s = torus_hodge_spectrum(&g, c.p, c.count)?;
    let summary = vec![
        ("k".into(), s.k.to_string()),
        ("zero_multiplicity".into(), s.zero_multiplicity().to_string()),
        ("certified_up_to".into(), format!("{:e}", s.certified_up_to)),
    ];
    let rows = s
        .levels
        .iter()
        .enumerate()
        .map(|(i, l)| vec![Cell::Int(i as i64), Cell::Num(l.eigenvalue), Cell::Int(l.multiplicity as i64), Cell::Num(l.norm2)])
        .collect();
    Ok((rows, summary))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> ExperimentConfig {
        ExperimentConfig::parse(text).unwrap()
    }

    #[test]
    fn csv_round_trip() {
        let c = cfg("kind = collapse\nalpha = phi\neps_min = 2^-12\n");
        let r = run(&c).unwrap();
        assert_eq!(r.columns.len(), 9);
        let back = RunRecord::from_csv(&r.to_csv()).unwrap();
        assert_eq!(back.config, c);
        assert_eq!(back.rows.len(), r.rows.len());
        assert_eq!(back.summary, r.summary);
        assert_eq!(strip_timestamp(&back.to_csv()), strip_timestamp(&r.to_csv()));
    }

    #[test]
    fn jsonl_rows_carry_the_hash() {
        let r = run(&cfg("kind = mu\nalpha = sqrt:2\nterms = 12\n")).unwrap();
        let text = r.to_jsonl().unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), r.rows.len() + 2);
        let v: serde_json::Value = serde_json::from_str(lines[1]).unwrap();
        assert_eq!(v["config_hash"], r.config_hash.as_str());
        assert_eq!(v["n"], 0);
        assert_eq!(v["ratio"], serde_json::Value::Null);
    }

    #[test]
    fn badapprox_rows_are_running_minima() {
        let r = run(&cfg("kind = badapprox\nalpha = sqrt:2\nq_bound = 1000\n")).unwrap();
        let q = r.column("quality").unwrap();
        assert!(q.windows(2).all(|w| w[1] < w[0]));
        assert_eq!(r.rows[0][0], Cell::Int(1));
    }

    #[test]
    fn spectrum_of_the_square_torus() {
        let r = run(&cfg("kind = spectrum\nalpha = rat:0\neps = 1\np = 0\ncount = 5\n")).unwrap();
        assert_eq!(r.rows[0][2], Cell::Int(1));
        assert_eq!(r.rows[1][2], Cell::Int(4));
    }

    #[test]
    fn rayleigh_needs_one_alpha() {
        assert!(run(&cfg("kind = rayleigh\nalpha = sqrt:2, sqrt:3\n")).is_err());
    }
}
