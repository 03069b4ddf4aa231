//! Integer matrices with a positive real eigenvector: membership certificates, their
//! structure, and the linear models built from them.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::field::{kernel, q_rank, RealField};
use super::order::NumberFieldOrder;
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::linalg::{self, IntMatrix};
use crate::poly::{self, IntPoly, RatPoly};
use crate::real::RealInput;

#[derive(Clone, Debug)]
pub struct GvCertificate {
    pub k: usize,
    pub matrix: IntMatrix,
    pub v: Vec<RealInput>,
    pub lambda_lo: f64,
    pub lambda_hi: f64,
    /// λ as an exact real when v lives in a single number field.
    pub lambda_exact: Option<RealInput>,
    /// Upper bound on max_i |(Av - λv)_i|; zero on the exact path.
    pub residual: f64,
    pub exact: bool,
    pub charpoly: IntPoly,
    /// Multiplicity of every distinct characteristic root, largest first.
    pub multiplicities: Vec<usize>,
    pub equal_multiplicities: bool,
    pub minpoly_squarefree: bool,
    pub minpoly_degree: Option<usize>,
    /// Whether λ is a simple root of the characteristic polynomial.
    pub simple: Option<bool>,
    /// deg(minpoly) = k, asked only when λ is simple.
    pub field_degree_ok: Option<bool>,
    /// Q-linear independence of the components of v, when decidable.
    pub independent: Option<bool>,
}

impl GvCertificate {
    pub fn lambda(&self) -> f64 {
        0.5 * (self.lambda_lo + self.lambda_hi)
    }

    pub fn structure_ok(&self) -> bool {
        self.minpoly_squarefree && self.equal_multiplicities && self.field_degree_ok != Some(false)
    }
}

fn mat_is_square(a: &IntMatrix) -> bool {
    !a.is_empty() && a.iter().all(|r| r.len() == a.len())
}

/// p(A) over the rationals.
fn eval_at_matrix(p: &RatPoly, a: &IntMatrix) -> Vec<Vec<BigRational>> {
    let k = a.len();
    let ar = linalg::to_rat_matrix(a);
    let mut acc = vec![vec![BigRational::zero(); k]; k];
    for c in p.coeffs().iter().rev() {
        let mut next = vec![vec![BigRational::zero(); k]; k];
        for i in 0..k {
            for j in 0..k {
                let mut s = BigRational::zero();
                for l in 0..k {
                    s += &acc[i][l] * &ar[l][j];
                }
                next[i][j] = s;
            }
            next[i][i] += c;
        }
        acc = next;
    }
    acc
}

/// Structure of the characteristic polynomial: squarefree factors with multiplicity,
/// whether the radical annihilates A, and the radical itself.
struct CharStructure {
    charpoly: IntPoly,
    factors: Vec<(usize, RatPoly)>,
    radical: RatPoly,
    diagonalizable: bool,
}

fn char_structure(a: &IntMatrix) -> CharStructure {
    let charpoly = poly::charpoly(a);
    let factors = charpoly.squarefree_decomposition();
    let radical = factors.iter().fold(RatPoly::constant(BigRational::one()), |acc, (_, p)| acc.mul(p));
    let diagonalizable = eval_at_matrix(&radical, a).iter().flatten().all(Zero::is_zero);
    CharStructure { charpoly, factors, radical, diagonalizable }
}

fn field_horner(field: &mut RealField, p: &RatPoly, x: &RatPoly) -> RatPoly {
    let mut acc = RatPoly::constant(BigRational::zero());
    for c in p.coeffs().iter().rev() {
        acc = field.reduce(&field.mul(&acc, x).add(&RatPoly::constant(c.clone())));
    }
    acc
}

struct Eigen {
    lambda: Interval,
    lambda_exact: Option<RealInput>,
    residual: f64,
    exact: bool,
    /// multiplicity lookup: index into the factor list
    factor: Option<usize>,
    independent: Option<bool>,
}

/// The common number field of v's components, or `None` if they do not share one.
fn common_field(v: &[RealInput]) -> Option<(RealField, Vec<RatPoly>)> {
    let mut field: Option<RealField> = None;
    let mut elems = Vec::with_capacity(v.len());
    for x in v {
        match x {
            RealInput::Rational(r) => elems.push(RatPoly::constant(r.clone())),
            _ => {
                let (f, e) = RealField::from_real(x)?;
                match &field {
                    None => field = Some(f),
                    Some(g) if g.same_generator(&f) => {}
                    Some(_) => return None,
                }
                elems.push(e);
            }
        }
    }
    // all rational: Q as the field of θ = 0
    let field = field.unwrap_or_else(|| {
        RealField::new(&IntPoly::x(), -BigRational::one(), BigRational::one()).expect("x has the root 0")
    });
    Some((field, elems))
}

fn exact_eigen(a: &IntMatrix, v: &[RealInput], cs: &CharStructure) -> Option<Result<Eigen>> {
    let (mut field, elems) = common_field(v)?;
    let k = a.len();
    let w: Vec<RatPoly> = (0..k)
        .map(|i| {
            let s = (0..k).fold(RatPoly::constant(BigRational::zero()), |acc, j| {
                acc.add(&elems[j].scale(&BigRational::from_integer(a[i][j].clone())))
            });
            field.reduce(&s)
        })
        .collect();
    let Some(j) = (0..k).find(|&j| !field.is_zero(&elems[j])) else {
        return Some(Err(Error::InvalidInput("v = 0".into())));
    };
    let lambda = field.div(&w[j], &elems[j]).expect("v_j ≠ 0");
    for i in 0..k {
        let r = w[i].sub(&field.mul(&lambda, &elems[i]));
        if !field.is_zero(&r) {
            return Some(Err(Error::NotInGv(format!("Av is not a multiple of v (component {i})"))));
        }
    }
    if field.sign(&lambda) != std::cmp::Ordering::Greater {
        return Some(Err(Error::NotInGv("eigenvalue is not positive".into())));
    }
    let factor = cs.factors.iter().position(|(_, p)| {
        let at = field_horner(&mut field, p, &lambda);
        field.is_zero(&at)
    });
    let independent = if v.iter().all(|x| x.as_rational().is_some()) {
        Some(k == 1)
    } else {
        match field.is_minimal() {
            Some(true) => Some(q_rank(&field, &elems) == k),
            _ => None,
        }
    };
    let enclosure = field.eval(&lambda, 128);
    let lambda_exact = field.to_real(&lambda).ok();
    Some(Ok(Eigen { lambda: enclosure, lambda_exact, residual: 0.0, exact: true, factor, independent }))
}

fn interval_eigen(a: &IntMatrix, v: &[RealInput], cs: &CharStructure) -> Result<Eigen> {
    let k = a.len();
    for prec in [128u32, 256, 512, 1024] {
        let vi: Vec<Interval> = v.iter().map(|x| x.eval(prec)).collect();
        let w: Vec<Interval> = (0..k)
            .map(|i| (0..k).fold(Interval::zero(prec), |acc, j| &acc + &vi[j].mul_int(&a[i][j])))
            .collect();
        let Some(j) = (0..k)
            .filter(|&j| vi[j].sign().is_some_and(|s| s != std::cmp::Ordering::Equal))
            .max_by(|&x, &y| vi[x].mid_f64().abs().total_cmp(&vi[y].mid_f64().abs()))
        else {
            continue;
        };
        let lambda = &w[j] / &vi[j];
        let mut residual = 0f64;
        for i in 0..k {
            let r = &w[i] - &(&lambda * &vi[i]);
            if !r.contains_zero() {
                return Err(Error::NotInGv(format!("Av is not a multiple of v (component {i})")));
            }
            residual = residual.max(r.abs().hi_f64());
        }
        if lambda.is_negative() || (lambda.contains_zero() && lambda.width_f64() < 1e-300) {
            return Err(Error::NotInGv("eigenvalue is not positive".into()));
        }
        if !lambda.is_positive() {
            continue;
        }
        let hits: Vec<usize> = cs
            .factors
            .iter()
            .enumerate()
            .filter(|(_, (_, p))| p.to_primitive_int().eval_interval(&lambda).contains_zero())
            .map(|(i, _)| i)
            .collect();
        let factor = if hits.len() == 1 { Some(hits[0]) } else { None };
        return Ok(Eigen { lambda, lambda_exact: None, residual, exact: false, factor, independent: None });
    }
    Err(Error::PrecisionInsufficient { retries: 4 })
}

/// Certifies A ∈ SL_k(Z) with Av = λv, λ > 0, and reports the structure the
/// membership forces when v has Q-independent components: A diagonalizable over C,
/// all characteristic roots of equal multiplicity, and deg(minpoly) = k when v is a
/// simple eigenvector.
///
/// Membership failures are errors naming the clause. Structural failures are errors
/// only when independence of v is certified (they would contradict the structure
/// theorem); otherwise they are reported in the certificate.
pub fn gv_check(a: &IntMatrix, v: &[RealInput]) -> Result<GvCertificate> {
    if !mat_is_square(a) || v.len() != a.len() {
        return Err(Error::InvalidInput(format!("need a square matrix and a vector of length {}", a.len())));
    }
    let k = a.len();
    let det = linalg::det_bareiss(a);
    if !det.is_one() {
        return Err(Error::NotInGv(format!("det A = {det}, not 1")));
    }
    let cs = char_structure(a);
    let eig = match exact_eigen(a, v, &cs) {
        Some(r) => r?,
        None => interval_eigen(a, v, &cs)?,
    };
    let mut multiplicities: Vec<usize> =
        cs.factors.iter().flat_map(|(m, p)| std::iter::repeat_n(*m, p.degree())).collect();
    multiplicities.sort_unstable_by(|x, y| y.cmp(x));
    let equal_multiplicities = cs.factors.len() == 1;
    let minpoly_degree = cs.diagonalizable.then(|| cs.radical.degree());
    let simple = eig.factor.map(|i| cs.factors[i].0 == 1);
    let field_degree_ok = if simple == Some(true) { Some(minpoly_degree == Some(k)) } else { None };
    let cert = GvCertificate {
        k,
        matrix: a.clone(),
        v: v.to_vec(),
        lambda_lo: eig.lambda.lo_f64(),
        lambda_hi: eig.lambda.hi_f64(),
        lambda_exact: eig.lambda_exact,
        residual: eig.residual,
        exact: eig.exact,
        charpoly: cs.charpoly,
        multiplicities,
        equal_multiplicities,
        minpoly_squarefree: cs.diagonalizable,
        minpoly_degree,
        simple,
        field_degree_ok,
        independent: eig.independent,
    };
    if cert.independent == Some(true) {
        if !cert.minpoly_squarefree {
            return Err(Error::NotInGv("minimal polynomial is not squarefree".into()));
        }
        if !cert.equal_multiplicities {
            return Err(Error::NotInGv("characteristic roots have unequal multiplicities".into()));
        }
        if cert.field_degree_ok == Some(false) {
            return Err(Error::NotInGv("simple eigenvector but deg(minpoly) < k".into()));
        }
    }
    Ok(cert)
}

/// The direction (θ, θ², …, θ^{k-1}) of the power basis, i.e. the flow (1, α).
pub fn basis_direction(order: &NumberFieldOrder) -> Vec<RealInput> {
    let mut field = RealField::new(&order.f, order.lo.clone(), order.hi.clone()).expect("order root is isolated");
    let mut out = Vec::with_capacity(order.k - 1);
    let mut p = RatPoly::constant(BigRational::one());
    let x = field.generator();
    for _ in 1..order.k {
        p = field.mul(&p, &x);
        out.push(field.to_real(&p).expect("power of an irreducible root"));
    }
    out
}

#[derive(Clone, Debug)]
pub struct SuspensionModel {
    pub k: usize,
    pub monodromy: IntMatrix,
    pub eigenvalue: RealInput,
    /// Eigenvector with first coordinate 1.
    pub direction: Vec<RealInput>,
    pub geometric_multiplicity: usize,
    pub charpoly: IntPoly,
    /// Squarefree factors of the characteristic polynomial with multiplicities.
    pub factors: Vec<(usize, IntPoly)>,
    pub diagonalizable: bool,
    /// The holonomy image is trivial exactly when the monodromy is the identity.
    pub isometric: bool,
}

impl SuspensionModel {
    /// α with direction = (1, α), as consumed by the lattice scans.
    pub fn alpha(&self) -> &[RealInput] {
        &self.direction[1..]
    }
}

/// Fiber model of the suspension of A ∈ SL_k(Z): the flow runs along the eigenvector of
/// the `eigen_index`-th real eigenvalue (decreasing order), which must be irrational.
pub fn suspension_model(a: &IntMatrix, eigen_index: usize) -> Result<SuspensionModel> {
    if !mat_is_square(a) {
        return Err(Error::InvalidInput("monodromy must be square".into()));
    }
    if !linalg::det_bareiss(a).is_one() {
        return Err(Error::InvalidInput("monodromy must have determinant 1".into()));
    }
    let k = a.len();
    let cs = char_structure(a);
    let sq = cs.radical.to_primitive_int();
    let mut roots = sq.isolate_real_roots();
    roots.reverse();
    let (lo, hi) = roots.get(eigen_index).cloned().ok_or(Error::NoIrrationalEigenvalue(eigen_index))?;
    if lo == hi || sq.rational_roots().iter().any(|r| &lo < r && r <= &hi) {
        return Err(Error::NoIrrationalEigenvalue(eigen_index));
    }
    let mut field = RealField::new(&sq, lo, hi)?;
    let lambda = field.generator();
    let m: Vec<Vec<RatPoly>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let c = RatPoly::constant(BigRational::from_integer(a[i][j].clone()));
                    if i == j { c.sub(&lambda) } else { c }
                })
                .collect()
        })
        .collect();
    let basis = kernel(&mut field, &m);
    let v = basis.first().ok_or_else(|| Error::InvalidInput("empty eigenspace".into()))?;
    let v0 = v[0].clone();
    if field.is_zero(&v0) {
        return Err(Error::InvalidInput("eigenvector has vanishing first coordinate".into()));
    }
    let normed: Vec<RatPoly> = v.iter().map(|x| field.div(x, &v0).expect("v0 ≠ 0")).collect();
    let direction = normed.iter().map(|x| field.to_real(x)).collect::<Result<Vec<_>>>()?;
    let eigenvalue = field.to_real(&lambda)?;
    Ok(SuspensionModel {
        k,
        monodromy: a.clone(),
        eigenvalue,
        direction,
        geometric_multiplicity: basis.len(),
        charpoly: cs.charpoly,
        factors: cs.factors.iter().map(|(m, p)| (*m, p.to_primitive_int())).collect(),
        diagonalizable: cs.diagonalizable,
        isometric: *a == linalg::identity(k),
    })
}

pub fn appendix_a() -> IntMatrix {
    linalg::int_matrix(&[&[0, 0, 1], &[1, 0, 6], &[0, 1, 0]])
}

pub fn appendix_b() -> IntMatrix {
    linalg::int_matrix(&[&[-3, -2, -6], &[-6, -15, -38], &[-2, -6, -15]])
}

pub fn appendix_p() -> IntMatrix {
    linalg::int_matrix(&[&[2, 0, 0], &[0, 1, 0], &[0, 0, 1]])
}

#[derive(Clone, Debug)]
pub struct AppendixReport {
    pub commute: bool,
    pub conj_a: Vec<Vec<BigRational>>,
    pub conj_b: Vec<Vec<BigRational>>,
    pub conj_a_integral: bool,
    pub conj_b_integral: bool,
    pub a_diagonalizable: bool,
    pub b_diagonalizable: bool,
    /// max over A's real eigenvectors u of |Bu - μu|, in f64
    pub eigen_residual: f64,
    /// B's eigenvalues on A's eigenvectors, in the order of A's decreasing eigenvalues
    pub b_eigenvalues: Vec<f64>,
    /// Exact membership of A and B for the eigenvector of A's largest eigenvalue.
    pub a_member: std::result::Result<(), String>,
    pub b_member: std::result::Result<(), String>,
}

impl AppendixReport {
    pub fn ok(&self) -> bool {
        self.commute
            && !self.conj_a_integral
            && self.conj_b_integral
            && self.a_diagonalizable
            && self.b_diagonalizable
            && self.eigen_residual < 1e-9
    }
}

fn conjugate(p: &IntMatrix, m: &IntMatrix) -> Vec<Vec<BigRational>> {
    let pr = linalg::to_rat_matrix(p);
    let pi = linalg::rat_inverse(&pr).expect("P invertible");
    let mr = linalg::to_rat_matrix(m);
    let mul = |x: &Vec<Vec<BigRational>>, y: &Vec<Vec<BigRational>>| -> Vec<Vec<BigRational>> {
        let n = x.len();
        (0..n).map(|i| (0..n).map(|j| (0..n).map(|l| &x[i][l] * &y[l][j]).sum()).collect()).collect()
    };
    mul(&mul(&pi, &mr), &pr)
}

fn is_integral(m: &[Vec<BigRational>]) -> bool {
    m.iter().flatten().all(|x| x.is_integer())
}

/// Unit eigenvector of a 3×3 matrix for a real eigenvalue: the longest cross product
/// of two rows of A - λI.
fn eigvec3(a: &IntMatrix, lambda: f64) -> [f64; 3] {
    let m: Vec<[f64; 3]> = (0..3)
        .map(|i| {
            let mut r = [0.0; 3];
            for (j, x) in r.iter_mut().enumerate() {
                *x = a[i][j].to_f64().unwrap_or(f64::NAN) - if i == j { lambda } else { 0.0 };
            }
            r
        })
        .collect();
    let cross = |u: &[f64; 3], w: &[f64; 3]| [u[1] * w[2] - u[2] * w[1], u[2] * w[0] - u[0] * w[2], u[0] * w[1] - u[1] * w[0]];
    let best = [(0, 1), (0, 2), (1, 2)]
        .iter()
        .map(|&(i, j)| cross(&m[i], &m[j]))
        .max_by(|x, y| x.iter().map(|t| t * t).sum::<f64>().total_cmp(&y.iter().map(|t| t * t).sum::<f64>()))
        .unwrap();
    let n = best.iter().map(|t| t * t).sum::<f64>().sqrt();
    [best[0] / n, best[1] / n, best[2] / n]
}

pub fn appendix_matrices_check() -> AppendixReport {
    let (a, b, p) = (appendix_a(), appendix_b(), appendix_p());
    let commute = linalg::int_mat_mul(&a, &b) == linalg::int_mat_mul(&b, &a);
    let conj_a = conjugate(&p, &a);
    let conj_b = conjugate(&p, &b);
    let sa = char_structure(&a);
    let sb = char_structure(&b);
    let mut roots = poly::approx_real_roots(&sa.charpoly);
    roots.reverse();
    let mut eigen_residual = 0f64;
    let mut b_eigenvalues = Vec::new();
    for &l in &roots {
        let u = eigvec3(&a, l);
        let bu: Vec<f64> =
            (0..3).map(|i| (0..3).map(|j| b[i][j].to_f64().unwrap_or(f64::NAN) * u[j]).sum()).collect();
        let mu: f64 = (0..3).map(|i| bu[i] * u[i]).sum();
        eigen_residual = eigen_residual.max((0..3).map(|i| (bu[i] - mu * u[i]).abs()).fold(0.0, f64::max));
        b_eigenvalues.push(mu);
    }
    let member = |m: &IntMatrix| -> std::result::Result<(), String> {
        let s = suspension_model(&a, 0).map_err(|e| e.to_string())?;
        gv_check(m, &s.direction).map(|_| ()).map_err(|e| e.to_string())
    };
    AppendixReport {
        commute,
        conj_a_integral: is_integral(&conj_a),
        conj_b_integral: is_integral(&conj_b),
        conj_a,
        conj_b,
        a_diagonalizable: sa.diagonalizable,
        b_diagonalizable: sb.diagonalizable,
        eigen_residual,
        b_eigenvalues,
        a_member: member(&a),
        b_member: member(&b),
    }
}

/// Parses whitespace-separated integer rows.
pub fn parse_matrix(text: &str) -> Result<IntMatrix> {
    let rows: Vec<Vec<BigInt>> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .enumerate()
        .map(|(n, l)| {
            l.split_whitespace()
                .map(|t| t.parse::<BigInt>().map_err(|_| Error::Parse(format!("matrix row {}: bad entry '{t}'", n + 1))))
                .collect()
        })
        .collect::<Result<_>>()?;
    if !mat_is_square(&rows) {
        return Err(Error::Parse("matrix must be square".into()));
    }
    Ok(rows)
}
