//! The acceptance suite behind `verify-all`.
//!
//! Each criterion runs at its stated tolerance and runtime budget. Oracles that the
//! criteria compare against (brute-force spectra, matrix products) are computed here
//! independently of the code paths under test.

use std::fmt;
use std::time::Instant;

use anyhow::{bail, Result};
use collapse_core::cohomology::{catalog, lookup, m_p, vanishing_criteria};
use collapse_core::diophantine::{badapprox_scan, cf_expand, construct_alpha_with_mu, mu_estimate};
use collapse_core::lattice::metric::fault;
use collapse_core::lattice::{gram, verify_th2, verify_th3, EpsRange, GramSource, Th2Report};
use collapse_core::linalg::{det_bareiss, int_mat_mul, int_matrix, IntMatrix};
use collapse_core::numberfields::{appendix_matrices_check, basis_direction, mult_matrix, transpose_identity_residual, unit_search, NumberFieldOrder};
use collapse_core::real::RealInput;
use collapse_core::spectra::{binom, dodziuk_check, rayleigh_scan, torus_hodge_spectrum, FOUR_PI2};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::config::ExperimentConfig;
use crate::run::{run, strip_timestamp};

/// Regression baseline for the cube-root badly-approximable scan at Q = 10⁵: attained
/// at q = 46, nearest integers (58, 73).
pub const AC7_BASELINE: f64 = 0.295_924_619_922_951_55;
pub const AC7_WITNESS: u64 = 46;
pub const TOTAL_BUDGET_S: f64 = 300.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Flip the sign of the collapse term in every Gram matrix.
    GramSign,
}

impl std::str::FromStr for Fault {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "gram-sign" => Ok(Fault::GramSign),
            _ => Err(format!("unknown fault '{s}' (known: gram-sign)")),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Options {
    /// Criterion ids to run; empty means all.
    pub only: Vec<String>,
    pub fault: Option<Fault>,
}

#[derive(Clone, Debug)]
pub struct AcResult {
    pub id: &'static str,
    pub title: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for AcResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "{:<6} {verdict}  {:<34} {:>8.2}s  {}", self.id, self.title, self.seconds, self.detail)
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub results: Vec<AcResult>,
    pub total_seconds: f64,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }

    pub fn get(&self, id: &str) -> Option<&AcResult> {
        self.results.iter().find(|r| r.id == id)
    }

    pub fn summary_line(&self) -> String {
        let n = self.results.iter().filter(|r| r.pass).count();
        let failed: Vec<&str> = self.results.iter().filter(|r| !r.pass).map(|r| r.id).collect();
        if failed.is_empty() {
            format!("{n}/{} criteria passed in {:.1}s", self.results.len(), self.total_seconds)
        } else {
            format!("{n}/{} criteria passed in {:.1}s; failed: {}", self.results.len(), self.total_seconds, failed.join(", "))
        }
    }
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

#[derive(Default)]
struct Ctx {
    started: Option<Instant>,
    th2: Option<(Th2Report, f64)>,
}

type Check = fn(&mut Ctx) -> Result<Outcome>;

pub const CRITERIA: [(&str, &str); 14] = [
    ("AC-1", "μ of quadratic irrationals"),
    ("AC-2", "prescribed μ"),
    ("AC-3", "diameter exponent at μ = 2"),
    ("AC-4", "injectivity-radius exponent"),
    ("AC-5", "volume law"),
    ("AC-6", "diameter ≍ ε^{1/k}, cube-root field"),
    ("AC-7", "badly-approximable floor"),
    ("AC-8", "flat torus Hodge spectra"),
    ("AC-9", "metric comparison of spectra"),
    ("AC-10", "Rayleigh quotient ε² rate"),
    ("AC-11", "small-eigenvalue catalog"),
    ("AC-12", "commuting pair conjugation"),
    ("AC-13", "unit representation"),
    ("AC-14", "full-suite budget and determinism"),
];

const CHECKS: [Check; 14] = [ac1, ac2, ac3, ac4, ac5, ac6, ac7, ac8, ac9, ac10, ac11, ac12, ac13, ac14];

pub fn ids() -> impl Iterator<Item = &'static str> {
    CRITERIA.iter().map(|c| c.0)
}

/// Runs the selected criteria in order, reporting each result as it completes.
pub fn verify_all(opts: &Options, mut on_result: impl FnMut(&AcResult)) -> Result<Report> {
    for id in &opts.only {
        if !ids().any(|k| k == id) {
            bail!("unknown criterion '{id}'");
        }
    }
    let _guard = FaultGuard::set(opts.fault);
    let start = Instant::now();
    let mut ctx = Ctx { started: Some(start), th2: None };
    let mut results = Vec::new();
    for ((id, title), check) in CRITERIA.iter().zip(CHECKS) {
        if !opts.only.is_empty() && !opts.only.iter().any(|o| o == id) {
            continue;
        }
        let t = Instant::now();
        let o = check(&mut ctx).unwrap_or_else(|e| Outcome { pass: false, detail: format!("error: {e}") });
        let r = AcResult { id, title, pass: o.pass, detail: o.detail, seconds: t.elapsed().as_secs_f64() };
        on_result(&r);
        results.push(r);
    }
    Ok(Report { results, total_seconds: start.elapsed().as_secs_f64() })
}

struct FaultGuard(bool);

impl FaultGuard {
    fn set(f: Option<Fault>) -> Self {
        let on = f == Some(Fault::GramSign);
        if on {
            fault::set_gram_sign_flip(true);
        }
        FaultGuard(on)
    }
}

impl Drop for FaultGuard {
    fn drop(&mut self) {
        if self.0 {
            fault::set_gram_sign_flip(false);
        }
    }
}

fn within(x: f64, lo: f64, hi: f64) -> bool {
    x >= lo && x <= hi
}

fn ac1(_: &mut Ctx) -> Result<Outcome> {
    let t = Instant::now();
    let mut vals = Vec::new();
    for x in [RealInput::phi(), RealInput::sqrt(2)?] {
        vals.push(mu_estimate(&cf_expand(&x, 60)?, 20)?.estimate);
    }
    let secs = t.elapsed().as_secs_f64();
    let pass = vals.iter().all(|&v| within(v, 1.99, 2.01)) && secs < 1.0;
    outcome(pass, format!("μ̂(φ) = {:.5}, μ̂(√2) = {:.5}, want [1.99, 2.01] in < 1 s", vals[0], vals[1]))
}

fn ac2(_: &mut Ctx) -> Result<Outcome> {
    let t = Instant::now();
    let m4 = mu_estimate(&construct_alpha_with_mu(4.0, 12)?, 12 / 3)?.estimate;
    let m3 = mu_estimate(&construct_alpha_with_mu(3.0, 14)?, 14 / 3)?.estimate;
    let secs = t.elapsed().as_secs_f64();
    let pass = within(m4, 3.8, 4.2) && within(m3, 2.85, 3.15) && secs < 5.0;
    outcome(pass, format!("μ̂ = {m4:.4} (want [3.8, 4.2]), {m3:.4} (want [2.85, 3.15]) in < 5 s"))
}

/// The φ scan shared by AC-3 and AC-4, with its runtime.
fn th2(ctx: &mut Ctx) -> Result<&(Th2Report, f64)> {
    if ctx.th2.is_none() {
        let t = Instant::now();
        let x = RealInput::phi();
        let cf = cf_expand(&x, 60)?;
        let r = verify_th2(&x, &cf, &EpsRange::octaves(-48, -4), Some(20), 0.05)?;
        ctx.th2 = Some((r, t.elapsed().as_secs_f64()));
    }
    Ok(ctx.th2.as_ref().unwrap())
}

fn ac3(ctx: &mut Ctx) -> Result<Outcome> {
    let (r, secs) = th2(ctx)?;
    let secs = *secs;
    let pass = within(r.liminf, 0.45, 0.55) && secs < 30.0;
    outcome(
        pass,
        format!(
            "min ln diam/ln ε = {:.4} at ε = {:.3e} over {} rows (1/μ̂ = {:.4}), want [0.45, 0.55] in < 30 s",
            r.liminf,
            r.witness_eps,
            r.rows.len(),
            r.target
        ),
    )
}

fn ac4(ctx: &mut Ctx) -> Result<Outcome> {
    let (r, _) = th2(ctx)?;
    // informational only: the same maximum with the full shortest length in place of injrad
    let full = r
        .rows
        .iter()
        .map(|row| (2.0 * row.injrad).ln() / row.eps.ln())
        .filter(|x| x.is_finite())
        .fold(f64::NEG_INFINITY, f64::max);
    outcome(
        within(r.injrad_max, 0.45, 0.55),
        format!(
            "max ln injrad/ln ε = {:.4} (1 − 1/μ̂ = {:.4}), want [0.45, 0.55]; with the full shortest length: {full:.4}",
            r.injrad_max, r.injrad_target
        ),
    )
}

fn ac5(_: &mut Ctx) -> Result<Outcome> {
    let mut rng = StdRng::seed_from_u64(0xac5);
    let mut worst = 0f64;
    for i in 0..100 {
        let alpha = if i % 2 == 0 {
            RealInput::rational(rng.gen_range(-1000..1000), rng.gen_range(1..1000))
        } else {
            let d = loop {
                let d: i64 = rng.gen_range(2..1000);
                if (d as f64).sqrt().fract() != 0.0 {
                    break d;
                }
            };
            RealInput::surd(rng.gen_range(-50..50), rng.gen_range(1..20), rng.gen_range(1..20), d)?
        };
        let eps = 2f64.powf(-rng.gen_range(0.0..40.0));
        let v = gram(2, &[alpha], eps)?.volume().mid_f64();
        worst = worst.max((v / eps - 1.0).abs());
    }
    outcome(worst < 1e-12, format!("max |√det G_ε / ε − 1| = {worst:.2e} over 100 draws, want < 1e-12"))
}

fn ac6(_: &mut Ctx) -> Result<Outcome> {
    let t = Instant::now();
    let range = EpsRange::octaves(-40, -4);
    let order = NumberFieldOrder::parse("x^3-2")?;
    let r = verify_th3(&basis_direction(&order), &range, None, 10_000, 10.0)?;
    let cf = construct_alpha_with_mu(4.0, 12)?;
    let neg = verify_th3(&[RealInput::parse("mu:4:12")?], &range, Some(&cf), 10_000, 10.0)?;
    let secs = t.elapsed().as_secs_f64();
    let pass = r.ratio_min >= 0.1 && r.ratio_max <= 10.0 && neg.drift > 100.0 && secs < 60.0;
    outcome(
        pass,
        format!(
            "diam_hi/ε^(1/3) ∈ [{:.3}, {:.3}] (want within [0.1, 10]); μ = 4 control drift {:.1} (want > 100) in < 60 s",
            r.ratio_min, r.ratio_max, neg.drift
        ),
    )
}

fn ac7(_: &mut Ctx) -> Result<Outcome> {
    let order = NumberFieldOrder::parse("x^3-2")?;
    let c = badapprox_scan(&basis_direction(&order), 100_000)?;
    let baseline_ok = (c.min_quality / AC7_BASELINE - 1.0).abs() < 1e-9 && c.witness_q == AC7_WITNESS;
    outcome(
        c.min_quality > 0.01 && baseline_ok,
        format!(
            "min q^(1/2)·dist = {:.10} at q = {} (want > 0.01; baseline {AC7_BASELINE:.10} {})",
            c.min_quality,
            c.witness_q,
            if baseline_ok { "matches" } else { "MISMATCH" }
        ),
    )
}

pub fn random_spd(rng: &mut StdRng, k: usize) -> Vec<Vec<f64>> {
    let a: Vec<Vec<f64>> = (0..k).map(|_| (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    let mut g = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..=i {
            let v = (0..k).map(|l| a[i][l] * a[j][l]).sum::<f64>() + if i == j { 0.3 } else { 0.0 };
            g[i][j] = v;
            g[j][i] = v;
        }
    }
    g
}

/// Cofactor inverse, k ≤ 3.
fn inverse(g: &[Vec<f64>]) -> Vec<Vec<f64>> {
    match g.len() {
        1 => vec![vec![1.0 / g[0][0]]],
        2 => {
            let d = g[0][0] * g[1][1] - g[0][1] * g[1][0];
            vec![vec![g[1][1] / d, -g[0][1] / d], vec![-g[1][0] / d, g[0][0] / d]]
        }
        3 => {
            let c = |i: usize, j: usize| {
                let (r0, r1) = ((i + 1) % 3, (i + 2) % 3);
                let (c0, c1) = ((j + 1) % 3, (j + 2) % 3);
                g[r0][c0] * g[r1][c1] - g[r0][c1] * g[r1][c0]
            };
            let d: f64 = (0..3).map(|j| g[0][j] * c(0, j)).sum();
            (0..3).map(|i| (0..3).map(|j| c(j, i) / d).collect()).collect()
        }
        k => panic!("inverse: k = {k}"),
    }
}

/// Sorted values of wᵀHw over the box |w_i| ≤ b.
fn box_values(h: &[Vec<f64>], b: i64) -> Vec<f64> {
    let k = h.len();
    let mut out = Vec::new();
    let mut w = vec![-b; k];
    loop {
        out.push((0..k).map(|i| (0..k).map(|j| h[i][j] * (w[i] * w[j]) as f64).sum::<f64>()).sum());
        let mut i = 0;
        loop {
            if i == k {
                out.sort_by(f64::total_cmp);
                return out;
            }
            if w[i] < b {
                w[i] += 1;
                break;
            }
            w[i] = -b;
            i += 1;
        }
    }
}

fn ac8(_: &mut Ctx) -> Result<Outcome> {
    let mut rng = StdRng::seed_from_u64(0xac8);
    let mut worst_enum = 0f64;
    let mut worst_first = 0f64;
    let mut zero_ok = true;
    for trial in 0..50 {
        let k = 1 + trial % 3;
        let p = rng.gen_range(0..=k);
        let g = random_spd(&mut rng, k);
        let src = GramSource::from_f64(&g)?;
        let mult = binom(k, p) as usize;
        let points = 40;
        let got = torus_hodge_spectrum(&src, p, points * mult)?.eigenvalues();
        let oracle: Vec<f64> = box_values(&inverse(&g), 50)
            .into_iter()
            .take(points)
            .flat_map(|v| std::iter::repeat_n(FOUR_PI2 * v, mult))
            .collect();
        for (a, b) in got.iter().zip(&oracle) {
            worst_enum = worst_enum.max((a - b).abs() / b.max(1.0));
        }
        let s0 = torus_hodge_spectrum(&src, 0, 4)?;
        zero_ok &= torus_hodge_spectrum(&src, p, mult)?.zero_multiplicity() == binom(k, p);
        let dual = shortest_vector_source_len(&src)?;
        let first = s0.first_positive().unwrap_or(f64::NAN);
        worst_first = worst_first.max((first / (FOUR_PI2 * dual * dual) - 1.0).abs());
    }
    outcome(
        worst_enum <= 1e-9 && zero_ok && worst_first < 1e-10,
        format!(
            "50 Grams: enumeration vs |w| ≤ 50 box max rel err {worst_enum:.1e}; zero multiplicity = binom(k,p): {zero_ok}; \
             λ_(0,1) vs 4π²·dual min² rel err {worst_first:.1e} (want < 1e-10)"
        ),
    )
}

fn shortest_vector_source_len(src: &GramSource) -> Result<f64> {
    Ok(collapse_core::lattice::geometry::shortest_vector_source(&src.dual()?)?.length)
}

fn ac9(_: &mut Ctx) -> Result<Outcome> {
    let mut rng = StdRng::seed_from_u64(0xac9);
    let mut checked = 0;
    let mut failures = Vec::new();
    for trial in 0..100 {
        let k = 1 + trial % 3;
        let g = GramSource::from_f64(&random_spd(&mut rng, k))?;
        let g2 = GramSource::from_f64(&random_spd(&mut rng, k))?;
        for p in 0..=k {
            let r = dodziuk_check(&g, &g2, p, 50)?;
            checked += r.rows.len();
            if !r.holds {
                failures.push(format!("trial {trial} p {p}"));
            }
        }
    }
    outcome(failures.is_empty(), format!("{checked} eigenvalue pairs over 100 Gram pairs, violations: {}", failures.len()))
}

fn ac10(_: &mut Ctx) -> Result<Outcome> {
    let t = Instant::now();
    let eps: Vec<f64> = (1..=8).map(|j| 2f64.powi(-j)).collect();
    let mut parts = Vec::new();
    let mut pass = true;
    for (name, alpha) in [("1", 1.0), ("√2", 2f64.sqrt())] {
        let (rows, slope) = rayleigh_scan(alpha, &eps, 128)?;
        let gap = rows.iter().map(|r| r.rel_gap).fold(0.0, f64::max);
        pass &= (slope - 2.0).abs() <= 0.02 && gap < 1e-6;
        parts.push(format!("α = {name}: slope {slope:.5}, max gap {gap:.1e}"));
    }
    let secs = t.elapsed().as_secs_f64();
    pass &= secs < 60.0;
    outcome(pass, format!("{} (want 2 ± 0.02, < 1e-6, < 60 s)", parts.join("; ")))
}

fn ac11(_: &mut Ctx) -> Result<Outcome> {
    let expect: &[(&str, &[u32])] = &[
        ("hopf-s3", &[0, 1, 1, 0]),
        ("sphere-s5", &[0, 1, 1, 1, 1, 0]),
        ("torus-t2", &[0, 0, 0]),
        ("torus-t3", &[0, 0, 0, 0]),
        ("carriere-sol", &[0, 0, 0, 0]),
        ("euler-surgery", &[0, 0, 0, 0, 0]),
    ];
    let mut bad = Vec::new();
    for (name, want) in expect {
        let Some(p) = lookup(name) else {
            bad.push(format!("{name} missing"));
            continue;
        };
        let m = m_p(&p)?;
        if m != *want {
            bad.push(format!("{name}: m = {m:?}"));
        }
    }
    let t4 = m_p(&lookup("suspension-t4").expect("catalog entry"))?;
    if t4[2] == 0 {
        bad.push("suspension-t4: m_2 = 0".into());
    }
    let entries = catalog();
    for p in &entries {
        if !vanishing_criteria(p)?.passes() {
            bad.push(format!("{}: vanishing criteria", p.name));
        }
    }
    let detail = if bad.is_empty() {
        format!("{} catalog entries; named counts match, suspension-t4 m = {t4:?}", entries.len())
    } else {
        bad.join("; ")
    };
    outcome(bad.is_empty(), detail)
}

fn ac12(_: &mut Ctx) -> Result<Outcome> {
    let r = appendix_matrices_check();
    outcome(
        r.commute && !r.conj_a_integral && r.conj_b_integral,
        format!("AB = BA: {}; P⁻¹AP integral: {}; P⁻¹BP integral: {}", r.commute, r.conj_a_integral, r.conj_b_integral),
    )
}

fn morphism_pairs(o: &NumberFieldOrder) -> Result<(usize, usize)> {
    let s = unit_search(o, 10)?;
    let mats: Vec<IntMatrix> = s.units.iter().map(|u| mult_matrix(o, u)).collect::<collapse_core::Result<_>>()?;
    let mut pairs = 0;
    let mut bad = 0;
    for (a, ma) in s.units.iter().zip(&mats) {
        for (b, mb) in s.units.iter().zip(&mats) {
            pairs += 1;
            if mult_matrix(o, &o.mul(a, b))? != int_mat_mul(ma, mb) {
                bad += 1;
            }
        }
    }
    Ok((pairs, bad))
}

fn ac13(_: &mut Ctx) -> Result<Outcome> {
    let o = NumberFieldOrder::quadratic(2)?;
    let a = o.element_i64(&[3, 2]);
    let m = mult_matrix(&o, &a)?;
    let named = m == int_matrix(&[&[3, 4], &[2, 3]]);
    let det = det_bareiss(&m);
    let residual = transpose_identity_residual(&o, &a, 200)?;
    let (p2, b2) = morphism_pairs(&o)?;
    let (pp, bp) = morphism_pairs(&NumberFieldOrder::parse("x^3-x-1")?)?;
    outcome(
        named && det == 1.into() && residual < 1e-10 && b2 == 0 && bp == 0,
        format!(
            "M(3+2√2) = [[3,4],[2,3]]: {named}, det {det}, residual {residual:.1e}; morphism failures {b2}/{p2} in Z[√2], \
             {bp}/{pp} in the plastic order"
        ),
    )
}

fn ac14(ctx: &mut Ctx) -> Result<Outcome> {
    let configs = [
        "kind = collapse\nalpha = phi\neps_min = 2^-20\n",
        "kind = collapse\nalpha = cbrt:2, poly:x^3-2@1,2:x^2\neps_min = 2^-16\n",
        "kind = rayleigh\nalpha = sqrt:2\neps_min = 2^-4\nn = 64\n",
        "kind = badapprox\nalpha = sqrt:3\nq_bound = 5000\n",
    ];
    let mut differing = Vec::new();
    for text in configs {
        let mut outputs = Vec::new();
        for workers in [None, Some(1), Some(4)] {
            let mut c = ExperimentConfig::parse(text)?;
            c.workers = workers;
            // the worker count is part of the embedded config, so compare everything else
            let csv = strip_timestamp(&run(&c)?.to_csv());
            outputs.push(csv.lines().filter(|l| !l.starts_with("# config")).collect::<Vec<_>>().join("\n"));
        }
        if outputs.windows(2).any(|w| w[0] != w[1]) {
            differing.push(text.lines().next().unwrap_or_default().to_string());
        }
    }
    let elapsed = ctx.started.map_or(0.0, |s| s.elapsed().as_secs_f64());
    outcome(
        differing.is_empty() && elapsed < TOTAL_BUDGET_S,
        format!(
            "suite time {elapsed:.1}s (want < {TOTAL_BUDGET_S} s); {} configs byte-identical across 1, 4 and default workers{}",
            configs.len(),
            if differing.is_empty() { String::new() } else { format!("; differing: {}", differing.join(", ")) }
        ),
    )
}
