use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use collapse_core::cohomology::{catalog, gysin_consistency, lookup, m_p, twisted_dims, vanishing_criteria, FlowProfile};
use collapse_core::diophantine::{cf_expand_partial, check_convergent_bounds};
use collapse_core::linalg::IntMatrix;
use collapse_core::numberfields::{
    appendix_matrices_check, gv_check, gv_element, mult_matrix, parse_matrix, unit_search, NumberFieldOrder,
};
use collapse_core::real::RealInput;
use collapse_lab::config::{parse_eps, ExperimentConfig, Kind};
use collapse_lab::run::{columns_help, run, RunRecord};
use collapse_lab::verify::{self, Fault, Options};
use collapse_lab::ConfigError;

const WORKERS_ENV: &str = "COLLAPSE_LAB_WORKERS";

#[derive(Parser)]
#[command(
    name = "collapse-lab",
    version,
    about = "Experiments on collapsing flat tori, Diophantine exponents, small eigenvalues and number-field units",
    after_long_help = columns_help() + ENV_HELP
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

const ENV_HELP: &str = "\nEnvironment:\n  COLLAPSE_LAB_WORKERS  worker threads (default: all cores); results do not depend on it\n\n\
Exit codes: 0 success, 1 verification or computation failure, 2 usage error.\n\n\
Real numbers: phi, plastic, sqrt:N, cbrt:N, surd:a,b,c,d for (a+b√d)/c, rat:p/q, dec:<digits>[:n],\n\
poly:<f>@lo,hi[:g] for g(θ) with θ the root of f in (lo, hi], mu:<target>[:depth] or mu:inf.\n\
Lists separate entries with commas.";

#[derive(Subcommand)]
enum Command {
    /// Continued fraction expansion with convergents.
    Cf {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = 20)]
        terms: usize,
    },
    /// Irrationality exponent estimate from convergent denominators.
    Mu {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = 60)]
        terms: usize,
        /// First index of the tail window (default terms/3).
        #[arg(long)]
        tail: Option<usize>,
        #[command(flatten)]
        out: Outputs,
    },
    /// Minimum of q^{1/(k-1)}·dist(qα, Z^{k-1}) over q ≤ Q.
    Badapprox {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = 100_000)]
        q: u64,
        #[command(flatten)]
        out: Outputs,
    },
    /// ε-scan of injectivity radius, diameter and volume of the collapsed torus.
    Collapse {
        #[arg(long)]
        alpha: String,
        #[command(flatten)]
        eps: EpsArgs,
        /// Skip the convergent subgrid (k = 2).
        #[arg(long)]
        no_convergents: bool,
        #[arg(long, default_value_t = 60)]
        terms: usize,
        #[command(flatten)]
        out: Outputs,
    },
    /// Hodge spectrum of the flat torus with the collapsed metric at one ε.
    Spectrum {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value = "1", value_parser = eps_arg)]
        eps: f64,
        #[arg(long, default_value_t = 1)]
        p: usize,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[command(flatten)]
        out: Outputs,
    },
    /// Rayleigh quotient of the Hopf test form across ε.
    Rayleigh {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value = "2^-8", value_parser = eps_arg)]
        eps_min: f64,
        #[arg(long, default_value = "2^-1", value_parser = eps_arg)]
        eps_max: f64,
        #[arg(long, default_value_t = 128)]
        n: usize,
        #[command(flatten)]
        out: Outputs,
    },
    /// Signature, unit rank and (optionally) units of Z[θ].
    Field {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        units: bool,
        #[arg(long, default_value_t = 10)]
        bound: u32,
    },
    /// Membership of an integer matrix in the stabilizer of a direction.
    Gv {
        /// Whitespace-separated integer rows, '#' comments.
        #[arg(long)]
        matrix: PathBuf,
        /// Full vector v, e.g. "rat:1, sqrt:2".
        #[arg(long)]
        v: String,
    },
    /// Commuting pair conjugation check.
    AppendixCheck,
    /// Basic-cohomology report for a flow profile.
    Profile {
        /// Catalog entry name.
        #[arg(long, conflicts_with = "file")]
        name: Option<String>,
        /// Profile in key = value form.
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Log-log SVG plot of a CSV run artifact.
    Plot {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Run an experiment config file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the acceptance suite; exits 1 if any criterion fails.
    VerifyAll {
        /// Comma-separated criterion ids, e.g. AC-3,AC-12.
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
        /// Mutation smoke test: gram-sign.
        #[arg(long)]
        inject_fault: Option<Fault>,
    },
}

#[derive(Args)]
struct EpsArgs {
    #[arg(long, default_value = "2^-24", value_parser = eps_arg)]
    eps_min: f64,
    #[arg(long, default_value = "2^-4", value_parser = eps_arg)]
    eps_max: f64,
    #[arg(long, default_value_t = 1)]
    per_octave: u32,
}

#[derive(Args)]
struct Outputs {
    /// CSV output path; stdout when no output is given.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    jsonl: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

fn eps_arg(s: &str) -> std::result::Result<f64, String> {
    parse_eps(s).filter(|e| *e > 0.0 && *e <= 1.0).ok_or_else(|| format!("'{s}' is not in (0, 1]"))
}

/// Failure that should exit with status 1 without an error message of its own.
#[derive(Debug)]
struct Failed;

impl std::fmt::Display for Failed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("verification failed")
    }
}

impl std::error::Error for Failed {}

fn main() -> ExitCode {
    // Die quietly on a closed pipe (`collapse-lab cf ... | head`) instead of panicking in println!.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Ok(w) = std::env::var(WORKERS_ENV) {
        match w.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: {WORKERS_ENV} must be a positive integer, got '{w}'");
                return ExitCode::from(2);
            }
        }
    }
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<Failed>() => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_usage(&e) { 2 } else { 1 })
        }
    }
}

fn is_usage(e: &anyhow::Error) -> bool {
    if e.is::<ConfigError>() {
        return true;
    }
    matches!(
        e.downcast_ref::<collapse_core::Error>(),
        Some(
            collapse_core::Error::Parse(_)
                | collapse_core::Error::InvalidInput(_)
                | collapse_core::Error::EpsilonOutOfRange(_)
                | collapse_core::Error::TooFewConvergents { .. }
        )
    )
}

fn experiment(mut c: ExperimentConfig, out: Outputs) -> Result<()> {
    c.csv = out.csv;
    c.jsonl = out.jsonl;
    c.svg = out.svg;
    execute(&c)
}

fn execute(c: &ExperimentConfig) -> Result<()> {
    let record = run(c)?;
    record.write_outputs()?;
    if c.csv.is_none() && c.jsonl.is_none() {
        print!("{}", record.to_csv());
    } else {
        for (k, v) in &record.summary {
            println!("{k} = {v}");
        }
    }
    Ok(())
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Cf { alpha, terms } => {
            let x = RealInput::parse(&alpha)?;
            let cf = cf_expand_partial(&x, terms)?;
            let q: Vec<String> = cf.quotients().iter().map(|a| a.to_string()).collect();
            println!("[{}]", q.join(", "));
            if cf.len() < terms && !cf.is_terminated() {
                println!("# only {} of {terms} quotients are certified by the input precision", cf.len());
            }
            for (n, (p, q)) in cf.convergents().iter().enumerate() {
                println!("{n} {p}/{q}");
            }
            println!("# convergent error bounds hold: {}", check_convergent_bounds(&x, &cf));
            Ok(())
        }
        Command::Mu { alpha, terms, tail, out } => {
            let mut c = ExperimentConfig::new(Kind::Mu, &alpha);
            c.terms = terms;
            c.tail = tail.unwrap_or(terms / 3);
            experiment(c, out)
        }
        Command::Badapprox { alpha, q, out } => {
            let mut c = ExperimentConfig::new(Kind::Badapprox, &alpha);
            c.q_bound = q;
            experiment(c, out)
        }
        Command::Collapse { alpha, eps, no_convergents, terms, out } => {
            let mut c = ExperimentConfig::new(Kind::Collapse, &alpha);
            c.eps_min = eps.eps_min;
            c.eps_max = eps.eps_max;
            c.per_octave = eps.per_octave;
            c.convergents = !no_convergents;
            c.terms = terms;
            c.tail = terms / 3;
            experiment(c, out)
        }
        Command::Spectrum { alpha, eps, p, count, out } => {
            let mut c = ExperimentConfig::new(Kind::Spectrum, &alpha);
            c.eps = eps;
            c.p = p;
            c.count = count;
            experiment(c, out)
        }
        Command::Rayleigh { alpha, eps_min, eps_max, n, out } => {
            let mut c = ExperimentConfig::new(Kind::Rayleigh, &alpha);
            c.eps_min = eps_min;
            c.eps_max = eps_max;
            c.n = n;
            experiment(c, out)
        }
        Command::Run { config } => {
            let text = fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            execute(&ExperimentConfig::parse(&text)?)
        }
        Command::Plot { input, output } => {
            let text = fs::read_to_string(&input).with_context(|| format!("reading {}", input.display()))?;
            let svg = collapse_lab::plot::plot(&RunRecord::from_csv(&text)?)?;
            fs::write(&output, svg).with_context(|| format!("writing {}", output.display()))?;
            Ok(())
        }
        Command::Field { poly, units, bound } => field(&poly, units, bound),
        Command::Gv { matrix, v } => {
            let text = fs::read_to_string(&matrix).with_context(|| format!("reading {}", matrix.display()))?;
            let a = parse_matrix(&text)?;
            let v = RealInput::parse_list(&v)?;
            match gv_check(&a, &v) {
                Ok(c) => {
                    println!("member: yes");
                    println!("λ ∈ [{:.15}, {:.15}]{}", c.lambda_lo, c.lambda_hi, if c.exact { " (exact)" } else { "" });
                    if let Some(l) = &c.lambda_exact {
                        println!("λ = {l}");
                    }
                    println!("residual ≤ {:.3e}", c.residual);
                    println!("charpoly {}", c.charpoly);
                    println!("multiplicities {:?}", c.multiplicities);
                    println!("diagonalizable {}", c.minpoly_squarefree);
                    println!("equal multiplicities {}", c.equal_multiplicities);
                    println!("simple eigenvalue {}", opt(c.simple));
                    println!("deg minpoly = k {}", opt(c.field_degree_ok));
                    println!("v independent over Q {}", opt(c.independent));
                    Ok(())
                }
                Err(collapse_core::Error::NotInGv(why)) => {
                    println!("member: no ({why})");
                    Err(Failed.into())
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::AppendixCheck => {
            let r = appendix_matrices_check();
            println!("AB = BA: {}", r.commute);
            println!("P⁻¹AP integral: {}", r.conj_a_integral);
            println!("P⁻¹BP integral: {}", r.conj_b_integral);
            println!("A diagonalizable: {}, B diagonalizable: {}", r.a_diagonalizable, r.b_diagonalizable);
            println!("B on A's eigenvectors: {:?} (residual {:.1e})", r.b_eigenvalues, r.eigen_residual);
            println!("A in G_v: {}", r.a_member.as_ref().map_or_else(|e| format!("no ({e})"), |_| "yes".into()));
            println!("B in G_v: {}", r.b_member.as_ref().map_or_else(|e| format!("no ({e})"), |_| "yes".into()));
            if r.commute && !r.conj_a_integral && r.conj_b_integral {
                Ok(())
            } else {
                Err(Failed.into())
            }
        }
        Command::Profile { name, file, json } => {
            let profiles: Vec<FlowProfile> = match (name, file) {
                (Some(n), _) => vec![lookup(&n).with_context(|| format!("no catalog entry '{n}'")).map_err(usage)?],
                (None, Some(f)) => {
                    let text = fs::read_to_string(&f).with_context(|| format!("reading {}", f.display()))?;
                    vec![FlowProfile::parse(&text)?]
                }
                (None, None) => catalog(),
            };
            let mut ok = true;
            for p in &profiles {
                ok &= profile_report(p, json)?;
            }
            if ok {
                Ok(())
            } else {
                Err(Failed.into())
            }
        }
        Command::VerifyAll { only, inject_fault } => {
            let opts = Options { only, fault: inject_fault };
            let mut stdout = std::io::stdout();
            let report = verify::verify_all(&opts, |r| {
                let _ = writeln!(stdout, "{r}");
                let _ = stdout.flush();
            })
            .map_err(usage)?;
            println!("{}", report.summary_line());
            if report.passed() {
                Ok(())
            } else {
                Err(Failed.into())
            }
        }
    }
}

fn usage(e: anyhow::Error) -> anyhow::Error {
    ConfigError { line: None, message: format!("{e:#}") }.into()
}

fn opt(b: Option<bool>) -> String {
    b.map_or("undecided".into(), |b| b.to_string())
}

fn matrix_text(m: &IntMatrix) -> String {
    let rows: Vec<String> =
        m.iter().map(|r| format!("[{}]", r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))).collect();
    format!("[{}]", rows.join(", "))
}

fn field(poly: &str, units: bool, bound: u32) -> Result<()> {
    let o = NumberFieldOrder::parse(poly)?;
    let r = o.rank();
    println!("{o}");
    println!("signature (r, s) = ({}, {})", r.r, r.s);
    println!("unit rank {} (upper bound k − 1 = {} holds: {})", r.rank, r.k - 1, r.upper_ok);
    println!(
        "lower bounds: Dirichlet with r ≥ 1 gives {}, quoted bound ⌊(k+1)/2⌋ = {} is {}",
        r.dirichlet_lower,
        r.claimed_lower,
        if r.meets_claimed_lower { "met" } else { "NOT met" }
    );
    if units {
        let s = unit_search(&o, bound)?;
        println!("units with |c_i| ≤ {bound}: {} (norm +1 and positive: {})", s.units.len(), s.positive.len());
        for u in &s.units {
            let marker = if s.positive.contains(u) { " +" } else { "" };
            println!("  {u}  norm {}  M = {}{marker}", u.norm, matrix_text(&mult_matrix(&o, u)?));
        }
        for u in s.positive.iter().filter(|u| !u.is_one()) {
            println!("  G_v element of {u}: {}", matrix_text(&gv_element(&o, u)?));
        }
    }
    Ok(())
}

fn profile_report(p: &FlowProfile, json: bool) -> Result<bool> {
    let m = m_p(p)?;
    let g = gysin_consistency(p)?;
    let v = vanishing_criteria(p)?;
    if json {
        let obj = serde_json::json!({
            "name": p.name,
            "n": p.n,
            "h": p.h,
            "b": p.b,
            "kappa_zero": p.kappa_zero,
            "euler_zero": p.euler_zero,
            "twisted": twisted_dims(p),
            "m": m,
            "gysin_feasible": g.feasible,
            "gysin_reason": g.reason,
            "euler_ranks": g.euler_ranks(),
            "vanishing_passes": v.passes(),
        });
        println!("{obj}");
    } else {
        println!("{}: n = {}, h = {:?}, b = {:?}", p.name, p.n, p.h, p.b);
        println!("  isometric {}, Euler class zero {}", p.kappa_zero, p.euler_zero);
        println!("  twisted {:?}", twisted_dims(p));
        println!("  m_p {m:?}");
        println!("  exact sequence feasible {}{}", g.feasible, g.reason.as_ref().map_or(String::new(), |r| format!(" ({r})")));
        println!("  vanishing criteria hold {}", v.passes());
    }
    Ok(g.feasible && v.passes())
}
