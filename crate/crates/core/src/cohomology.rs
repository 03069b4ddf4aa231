//! Dimension bookkeeping for basic cohomology of Riemannian flows: twisted duality,
//! small-eigenvalue counts, the Gysin sequence and the vanishing criteria.
//!
//! Basic Betti numbers are input data. The basic complex stops at degree n − 1, so
//! H^n(M/F) is taken to be 0 throughout.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowProfile {
    pub name: String,
    /// Manifold dimension.
    pub n: usize,
    /// dim H^p(M/F) for p = 0..n−1.
    pub h: Vec<u32>,
    /// b_p(M) for p = 0..n.
    pub b: Vec<u32>,
    /// The mean-curvature class vanishes (the flow is isometric).
    pub kappa_zero: bool,
    /// The Euler class vanishes.
    pub euler_zero: bool,
    pub note: String,
}

impl FlowProfile {
    /// h_p, extended by 0 outside 0..n−1.
    pub fn h_at(&self, p: i64) -> u32 {
        if p < 0 { 0 } else { self.h.get(p as usize).copied().unwrap_or(0) }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::ProfileInconsistent(format!("{}: {m}", self.name)));
        let n = self.n;
        if n == 0 {
            return bad("dimension must be positive".into());
        }
        if self.h.len() != n {
            return bad(format!("expected {n} basic Betti numbers, got {}", self.h.len()));
        }
        if self.b.len() != n + 1 {
            return bad(format!("expected {} Betti numbers, got {}", n + 1, self.b.len()));
        }
        if self.h[0] != 1 {
            return bad("h_0 must be 1".into());
        }
        if self.b[0] != 1 || self.b[n] != 1 {
            return bad("b_0 and b_n must be 1".into());
        }
        if (0..=n).any(|p| self.b[p] != self.b[n - p]) {
            return bad("Betti numbers are not symmetric".into());
        }
        let top = self.h[n - 1];
        if self.kappa_zero {
            if top == 0 {
                return bad("an isometric flow has h_{n-1} ≠ 0".into());
            }
            if (0..n).any(|p| self.h[p] != self.h[n - 1 - p]) {
                return bad("basic cohomology of an isometric flow satisfies h_p = h_{n-1-p}".into());
            }
        } else if top != 0 {
            return bad("a non-isometric flow has h_{n-1} = 0".into());
        }
        Ok(())
    }

    /// Line-oriented `key = value` text, readable by [`FlowProfile::parse`].
    pub fn to_text(&self) -> String {
        let list = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(", ");
        format!(
            "name = {}\nn = {}\nh = {}\nb = {}\nkappa_zero = {}\neuler_zero = {}\nnote = {}\n",
            self.name,
            self.n,
            list(&self.h),
            list(&self.b),
            self.kappa_zero,
            self.euler_zero,
            self.note
        )
    }

    /// Parses the `key = value` format. Blank lines and `#` comments are skipped; unknown
    /// or repeated keys are errors naming the line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut name = None;
        let mut n = None;
        let mut h = None;
        let mut b = None;
        let mut kappa = None;
        let mut euler = None;
        let mut note = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |m: &str| Error::Parse(format!("line {line_no}: {m}"));
            let (key, value) = line.split_once('=').ok_or_else(|| err("expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            let ints = || -> Result<Vec<u32>> {
                value
                    .split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse::<u32>().map_err(|_| err(&format!("`{s}` is not a nonnegative integer"))))
                    .collect()
            };
            let flag = || -> Result<bool> { value.parse::<bool>().map_err(|_| err("expected true or false")) };
            let dup = |set: bool| if set { Err(err(&format!("duplicate key `{key}`"))) } else { Ok(()) };
            match key {
                "name" => {
                    dup(name.is_some())?;
                    name = Some(value.to_string());
                }
                "n" => {
                    dup(n.is_some())?;
                    n = Some(value.parse::<usize>().map_err(|_| err("n must be a positive integer"))?);
                }
                "h" => {
                    dup(h.is_some())?;
                    h = Some(ints()?);
                }
                "b" => {
                    dup(b.is_some())?;
                    b = Some(ints()?);
                }
                "kappa_zero" => {
                    dup(kappa.is_some())?;
                    kappa = Some(flag()?);
                }
                "euler_zero" => {
                    dup(euler.is_some())?;
                    euler = Some(flag()?);
                }
                "note" => {
                    dup(note.is_some())?;
                    note = Some(value.to_string());
                }
                _ => return Err(err(&format!("unknown key `{key}`"))),
            }
        }
        let missing = |k: &str| Error::Parse(format!("missing key `{k}`"));
        let profile = FlowProfile {
            name: name.unwrap_or_else(|| "unnamed".into()),
            n: n.ok_or_else(|| missing("n"))?,
            h: h.ok_or_else(|| missing("h"))?,
            b: b.ok_or_else(|| missing("b"))?,
            kappa_zero: kappa.ok_or_else(|| missing("kappa_zero"))?,
            euler_zero: euler.ok_or_else(|| missing("euler_zero"))?,
            note: note.unwrap_or_default(),
        };
        Ok(profile)
    }
}

impl fmt::Display for FlowProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (n = {}, h = {:?}, b = {:?})", self.name, self.n, self.h, self.b)
    }
}

/// dim H^i_κ(M/F) = h_{n−1−i}, i = 0..n−1.
pub fn twisted_dims(p: &FlowProfile) -> Vec<u32> {
    p.h.iter().rev().copied().collect()
}

/// Small-eigenvalue counts m_0..m_n, computed as h_p + h_{n−p} − b_p and again as
/// h_p + twisted_{p−1} − b_p; the two must agree and be nonnegative.
pub fn m_p(profile: &FlowProfile) -> Result<Vec<u32>> {
    profile.validate()?;
    let n = profile.n as i64;
    let tw = twisted_dims(profile);
    let tw_at = |i: i64| if i < 0 { 0 } else { tw.get(i as usize).copied().unwrap_or(0) };
    (0..=n)
        .map(|p| {
            let b = profile.b[p as usize] as i64;
            let direct = profile.h_at(p) as i64 + profile.h_at(n - p) as i64 - b;
            let twisted = profile.h_at(p) as i64 + tw_at(p - 1) as i64 - b;
            if direct != twisted {
                return Err(Error::ProfileInconsistent(format!("m_{p}: {direct} ≠ {twisted}")));
            }
            if direct < 0 {
                return Err(Error::ProfileInconsistent(format!("{}: m_{p} = {direct} < 0", profile.name)));
            }
            Ok(direct as u32)
        })
        .collect()
}

/// One map of the long exact sequence with its forced rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GysinMap {
    pub from: String,
    pub to: String,
    pub rank: i64,
    /// Multiplication by the Euler class.
    pub euler: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GysinReport {
    pub feasible: bool,
    pub maps: Vec<GysinMap>,
    pub reason: Option<String>,
}

impl GysinReport {
    pub fn euler_ranks(&self) -> Vec<i64> {
        self.maps.iter().filter(|m| m.euler).map(|m| m.rank).collect()
    }
}

/// Decides whether the sequence
/// `… → H^i(M/F) → H^i(M) → H^{i−1}_κ(M/F) → H^{i+1}(M/F) → …` can be exact with the
/// profile's dimensions.
///
/// Exactness at each term forces `rank f_j = dim V_j − rank f_{j−1}` starting from
/// the zero map into H^0(M/F), so the ranks are determined by propagation; the profile
/// is feasible when every rank lies in `0..=min(dim source, dim target)`, the last
/// map is zero, and, when the Euler class vanishes, every multiplication map is zero.
pub fn gysin_consistency(profile: &FlowProfile) -> Result<GysinReport> {
    profile.validate()?;
    let n = profile.n as i64;
    let tw = |i: i64| if i < 0 || i >= n { 0 } else { profile.h_at(n - 1 - i) as i64 };
    let mut terms: Vec<(String, i64)> = Vec::new();
    for i in 0..=n {
        terms.push((format!("H^{i}(M/F)"), profile.h_at(i) as i64));
        terms.push((format!("H^{i}(M)"), profile.b[i as usize] as i64));
        terms.push((format!("H^{}_κ(M/F)", i - 1), tw(i - 1)));
    }
    terms.push((format!("H^{}(M/F)", n + 1), 0));
    let mut maps = Vec::new();
    let mut prev = 0i64;
    let mut reason = None;
    for j in 0..terms.len() - 1 {
        let rank = terms[j].1 - prev;
        let euler = j % 3 == 2;
        let cap = terms[j].1.min(terms[j + 1].1);
        if reason.is_none() {
            if rank < 0 || rank > cap {
                reason = Some(format!("{} → {} would need rank {rank}", terms[j].0, terms[j + 1].0));
            } else if euler && profile.euler_zero && rank != 0 {
                reason = Some(format!("vanishing Euler class but {} → {} has rank {rank}", terms[j].0, terms[j + 1].0));
            }
        }
        maps.push(GysinMap { from: terms[j].0.clone(), to: terms[j + 1].0.clone(), rank, euler });
        prev = rank;
    }
    if reason.is_none() && prev != 0 {
        reason = Some("sequence does not close at the top degree".into());
    }
    Ok(GysinReport { feasible: reason.is_none(), maps, reason })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VanishingReport {
    pub m: Vec<u32>,
    /// Some m_p > 0 ⇒ the Euler class is nonzero.
    pub small_needs_euler: bool,
    /// m_1 > 0 ⇔ (isometric ∧ nonzero Euler class).
    pub m1_iff: bool,
}

impl VanishingReport {
    pub fn passes(&self) -> bool {
        self.small_needs_euler && self.m1_iff
    }
}

pub fn vanishing_criteria(profile: &FlowProfile) -> Result<VanishingReport> {
    let m = m_p(profile)?;
    let any = m.iter().any(|&x| x > 0);
    let small_needs_euler = !any || !profile.euler_zero;
    let m1 = m.get(1).copied().unwrap_or(0) > 0;
    let m1_iff = m1 == (profile.kappa_zero && !profile.euler_zero);
    Ok(VanishingReport { m, small_needs_euler, m1_iff })
}

fn entry(name: &str, h: &[u32], b: &[u32], kappa_zero: bool, euler_zero: bool, note: &str) -> FlowProfile {
    FlowProfile {
        name: name.into(),
        n: b.len() - 1,
        h: h.to_vec(),
        b: b.to_vec(),
        kappa_zero,
        euler_zero,
        note: note.into(),
    }
}

/// Odd sphere S^{2m−1} with a dense linear torus flow: h = 1 in even degrees.
fn sphere(m: usize) -> FlowProfile {
    let n = 2 * m - 1;
    let h: Vec<u32> = (0..n).map(|p| (p % 2 == 0) as u32).collect();
    let mut b = vec![0; n + 1];
    b[0] = 1;
    b[n] = 1;
    entry(
        &format!("sphere-s{n}"),
        &h,
        &b,
        true,
        false,
        "dense linear flow on an odd sphere; leaf closures are tori, basic cohomology is R in even degrees",
    )
}

/// The built-in profiles.
pub fn catalog() -> Vec<FlowProfile> {
    let mut out = vec![entry(
        "hopf-s3",
        &[1, 0, 1],
        &[1, 0, 0, 1],
        true,
        false,
        "S³ with X(a,b) = (ia, iαb); isometric, nonzero Euler class",
    )];
    out.extend((2..=4).map(sphere));
    out.push(entry(
        "torus-t2",
        &[1, 1],
        &[1, 2, 1],
        true,
        true,
        "dense linear flow on T²; basic forms are constant transverse forms",
    ));
    out.push(entry(
        "torus-t3",
        &[1, 2, 1],
        &[1, 3, 3, 1],
        true,
        true,
        "totally irrational linear flow on T³",
    ));
    out.push(entry(
        "carriere-sol",
        &[1, 1, 0],
        &[1, 1, 1, 1],
        false,
        true,
        "suspension of [[2,1],[1,1]] on T² flowing along an eigendirection; see docs/derivations.md §3",
    ));
    out.push(entry(
        "suspension-t4",
        &[1, 1, 2, 1, 0],
        &[1, 1, 2, 2, 1, 1],
        false,
        false,
        "suspension of a 4×4 block monodromy with two golden-ratio blocks; dimensions chosen to carry small \
         eigenvalues on 2-forms (an invariant-form count gives h_2 = 1, see the decisions ledger)",
    ));
    out.push(entry(
        "euler-surgery",
        &[1, 1, 0, 0],
        &[1, 1, 0, 1, 1],
        false,
        false,
        "flag profile only: non-isometric, nonzero Euler class, no small eigenvalues",
    ));
    out
}

pub fn lookup(name: &str) -> Option<FlowProfile> {
    catalog().into_iter().find(|p| p.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hopf_counts() {
        let p = lookup("hopf-s3").unwrap();
        assert_eq!(twisted_dims(&p), vec![1, 0, 1]);
        assert_eq!(m_p(&p).unwrap(), vec![0, 1, 1, 0]);
        let g = gysin_consistency(&p).unwrap();
        assert!(g.feasible);
        assert_eq!(g.euler_ranks().iter().filter(|&&r| r > 0).count(), 1);
        let e = g.maps.iter().find(|m| m.euler && m.rank > 0).unwrap();
        assert_eq!((e.from.as_str(), e.to.as_str()), ("H^0_κ(M/F)", "H^2(M/F)"));
    }

    #[test]
    fn sphere_and_torus_counts() {
        assert_eq!(m_p(&lookup("sphere-s5").unwrap()).unwrap(), vec![0, 1, 1, 1, 1, 0]);
        assert_eq!(m_p(&lookup("torus-t2").unwrap()).unwrap(), vec![0, 0, 0]);
        let g = gysin_consistency(&lookup("torus-t2").unwrap()).unwrap();
        assert!(g.feasible && g.euler_ranks().iter().all(|&r| r == 0));
    }

    #[test]
    fn suspension_twisted_dims() {
        assert_eq!(twisted_dims(&lookup("carriere-sol").unwrap()), vec![0, 1, 1]);
    }

    #[test]
    fn circle() {
        let p = entry("circle", &[1], &[1, 1], true, true, "");
        assert_eq!(twisted_dims(&p), vec![1]);
        assert_eq!(m_p(&p).unwrap(), vec![0, 0]);
    }

    #[test]
    fn euler_zero_with_small_eigenvalues_is_infeasible() {
        let mut p = lookup("hopf-s3").unwrap();
        p.euler_zero = true;
        assert!(!gysin_consistency(&p).unwrap().feasible);
        assert!(!vanishing_criteria(&p).unwrap().passes());
    }

    #[test]
    fn negative_count_is_an_error() {
        let p = entry("bad", &[1, 0, 1], &[1, 3, 3, 1], true, false, "");
        assert!(matches!(m_p(&p), Err(Error::ProfileInconsistent(_))));
    }

    #[test]
    fn text_round_trip() {
        for p in catalog() {
            assert_eq!(FlowProfile::parse(&p.to_text()).unwrap(), p);
        }
    }

    #[test]
    fn parse_errors_name_the_line() {
        let e = FlowProfile::parse("n = 3\n\nh = 1, 0, 1\ncolour = red\n").unwrap_err();
        assert_eq!(e, Error::Parse("line 4: unknown key `colour`".into()));
        let e = FlowProfile::parse("n = 3\nh = 1, x\n").unwrap_err();
        assert!(e.to_string().contains("line 2"));
    }
}
