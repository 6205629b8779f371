//! Parabolic isometries of an integral hyperbolic lattice that fix an
//! isotropic class D₀, and the quadratic degree formula they satisfy.
//!
//! Matrices act on column vectors: column j of an auto is the image of the
//! j-th basis vector.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type IntMatrix = Vec<Vec<i64>>;

/// Input form of a system; validated by `check_parabolic_system`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalphenSystem {
    pub gram: IntMatrix,
    pub d0: Vec<i64>,
    #[serde(rename = "ample")]
    pub a: Vec<i64>,
    pub autos: Vec<IntMatrix>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Violation {
    GramShape,
    GramNotSymmetric,
    Signature { positive: usize, negative: usize, zero: usize },
    VectorShape,
    D0Zero,
    D0NotIsotropic,
    AmpleNotPositive,
    AmpleNotPositiveOnD0,
    AutoShape(usize),
    FormNotPreserved(usize),
    D0NotFixed(usize),
    QuotientNotIdentity(usize),
    NotUnipotent(usize),
    ExtraFixedIsotropic(usize),
    NotCommuting(usize, usize),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::GramShape => write!(f, "Gram matrix is not square"),
            Violation::GramNotSymmetric => write!(f, "Gram matrix is not symmetric"),
            Violation::Signature { positive, negative, zero } => {
                write!(f, "signature is ({positive}, {negative}) with {zero} null directions, not (1, r-1)")
            }
            Violation::VectorShape => write!(f, "D₀ or A has the wrong length"),
            Violation::D0Zero => write!(f, "D₀ is zero"),
            Violation::D0NotIsotropic => write!(f, "D₀·D₀ ≠ 0"),
            Violation::AmpleNotPositive => write!(f, "A·A ≤ 0"),
            Violation::AmpleNotPositiveOnD0 => write!(f, "A·D₀ ≤ 0"),
            Violation::AutoShape(i) => write!(f, "auto {i} has the wrong shape"),
            Violation::FormNotPreserved(i) => write!(f, "auto {i} does not preserve the form"),
            Violation::D0NotFixed(i) => write!(f, "D₀ not fixed by auto {i}"),
            Violation::QuotientNotIdentity(i) => write!(f, "auto {i} is not the identity on D₀^⊥/D₀"),
            Violation::NotUnipotent(i) => write!(f, "characteristic polynomial of auto {i} is not (t-1)^r"),
            Violation::ExtraFixedIsotropic(i) => {
                write!(f, "auto {i} fixes an isotropic class outside the line of D₀")
            }
            Violation::NotCommuting(i, j) => write!(f, "autos {i} and {j} do not commute"),
        }
    }
}

type Mat = Vec<Vec<BigInt>>;
type Vector = Vec<BigInt>;

fn big_mat(m: &IntMatrix) -> Mat {
    m.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect()
}

fn big_vec(v: &[i64]) -> Vector {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn identity(r: usize) -> Mat {
    (0..r).map(|i| (0..r).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let n = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| (0..n).map(|j| row.iter().zip(b).map(|(x, brow)| x * &brow[j]).sum()).collect())
        .collect()
}

fn mat_vec(a: &Mat, v: &[BigInt]) -> Vector {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

fn transpose(a: &Mat) -> Mat {
    let n = a.first().map_or(0, Vec::len);
    (0..n).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

fn sub(a: &[BigInt], b: &[BigInt]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn mat_sub(a: &Mat, b: &Mat) -> Mat {
    a.iter().zip(b).map(|(x, y)| sub(x, y)).collect()
}

fn is_zero_mat(a: &Mat) -> bool {
    a.iter().all(|r| r.iter().all(Zero::is_zero))
}

fn pair(g: &Mat, u: &[BigInt], v: &[BigInt]) -> BigInt {
    u.iter().zip(mat_vec(g, v)).map(|(x, y)| x * y).sum()
}

/// The scalar c with v = c·d, if v lies on the line of d ≠ 0.
fn multiple_of(v: &[BigInt], d: &[BigInt]) -> Option<BigRational> {
    let k = d.iter().position(|x| !x.is_zero())?;
    let c = BigRational::new(v[k].clone(), d[k].clone());
    v.iter()
        .zip(d)
        .all(|(x, y)| BigRational::from_integer(x.clone()) == &c * BigRational::from_integer(y.clone()))
        .then_some(c)
}

/// Integer basis of the kernel of a rational matrix (rows are equations).
fn kernel(rows: &[Vec<BigRational>], n: usize) -> Vec<Vector> {
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..n {
                    let d = &f * &m[r][j];
                    m[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![BigRational::zero(); n];
            v[fc] = BigRational::one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[i][fc].clone();
            }
            let den = v.iter().fold(BigInt::one(), |acc, x| num_integer::lcm(acc, x.denom().clone()));
            v.iter().map(|x| (x * BigRational::from_integer(den.clone())).to_integer()).collect()
        })
        .collect()
}

fn rational_rows(a: &Mat) -> Vec<Vec<BigRational>> {
    a.iter().map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect()
}

/// (positive, negative, zero) counts by symmetric Gaussian elimination.
fn signature(g: &Mat) -> (usize, usize, usize) {
    let n = g.len();
    let mut a: Vec<Vec<BigRational>> = rational_rows(g);
    let (mut pos, mut neg) = (0, 0);
    let mut k = 0;
    while k < n {
        if a[k][k].is_zero() {
            if let Some(i) = (k + 1..n).find(|&i| !a[i][i].is_zero()) {
                a.swap(k, i);
                for row in a.iter_mut() {
                    row.swap(k, i);
                }
            } else if let Some(i) = (k + 1..n).find(|&i| !a[k][i].is_zero()) {
                // e_k += e_i makes the diagonal 2·a[k][i]
                for j in 0..n {
                    let v = a[i][j].clone();
                    a[k][j] += v;
                }
                for row in a.iter_mut() {
                    let v = row[i].clone();
                    row[k] += v;
                }
            } else {
                k += 1;
                continue;
            }
        }
        let p = a[k][k].clone();
        if p.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        for i in k + 1..n {
            let f = &a[i][k] / &p;
            for j in k..n {
                let d = &f * &a[k][j];
                a[i][j] -= d;
            }
        }
        for i in k + 1..n {
            a[k][i] = BigRational::zero();
            a[i][k] = BigRational::zero();
        }
        k += 1;
    }
    (pos, neg, n - pos - neg)
}

/// A basis w₁..w_(r−2) of D₀^⊥ completing D₀, as integer vectors.
fn quotient_basis(g: &Mat, d0: &[BigInt]) -> Vec<Vector> {
    let gd: Vec<BigRational> = mat_vec(g, d0).into_iter().map(BigRational::from_integer).collect();
    let perp = kernel(&[gd], d0.len());
    let mut chosen: Vec<Vector> = vec![d0.to_vec()];
    for v in perp {
        let mut trial = chosen.clone();
        trial.push(v.clone());
        let rows = rational_rows(&transpose(&trial));
        if kernel(&rows, trial.len()).is_empty() {
            chosen = trial;
        }
    }
    chosen.remove(0);
    chosen
}

/// Coordinates of v in the basis (D₀, w₁, ...), when v lies in their span.
fn coordinates(basis: &[Vector], v: &[BigInt]) -> Option<Vec<BigRational>> {
    let n = basis.len();
    // columns: basis vectors, then −v
    let rows: Vec<Vec<BigRational>> = (0..v.len())
        .map(|i| {
            let mut r: Vec<BigRational> = basis.iter().map(|b| BigRational::from_integer(b[i].clone())).collect();
            r.push(BigRational::from_integer(-v[i].clone()));
            r
        })
        .collect();
    let k = kernel(&rows, n + 1);
    let sol = k.iter().find(|s| !s[n].is_zero())?;
    let last = BigRational::from_integer(sol[n].clone());
    Some(sol[..n].iter().map(|x| BigRational::from_integer(x.clone()) / &last).collect())
}

/// Checks every defining condition and returns the full list of failures.
pub fn check_parabolic_system(sys: &HalphenSystem) -> std::result::Result<HalphenSystem, Vec<Violation>> {
    let r = sys.gram.len();
    let mut bad = Vec::new();
    if r == 0 || sys.gram.iter().any(|row| row.len() != r) {
        return Err(vec![Violation::GramShape]);
    }
    let g = big_mat(&sys.gram);
    if g != transpose(&g) {
        return Err(vec![Violation::GramNotSymmetric]);
    }
    let (positive, negative, zero) = signature(&g);
    if positive != 1 || zero != 0 {
        bad.push(Violation::Signature { positive, negative, zero });
    }
    if sys.d0.len() != r || sys.a.len() != r {
        bad.push(Violation::VectorShape);
        return Err(bad);
    }
    let (d0, a) = (big_vec(&sys.d0), big_vec(&sys.a));
    if d0.iter().all(Zero::is_zero) {
        bad.push(Violation::D0Zero);
        return Err(bad);
    }
    if !pair(&g, &d0, &d0).is_zero() {
        bad.push(Violation::D0NotIsotropic);
    }
    if !pair(&g, &a, &a).is_positive() {
        bad.push(Violation::AmpleNotPositive);
    }
    if !pair(&g, &a, &d0).is_positive() {
        bad.push(Violation::AmpleNotPositiveOnD0);
    }
    let basis = quotient_basis(&g, &d0);
    let gd0 = mat_vec(&g, &d0);
    let mut mats: Vec<Option<Mat>> = Vec::new();
    for (i, f) in sys.autos.iter().enumerate() {
        if f.len() != r || f.iter().any(|row| row.len() != r) {
            bad.push(Violation::AutoShape(i));
            mats.push(None);
            continue;
        }
        let m = big_mat(f);
        if mat_mul(&mat_mul(&transpose(&m), &g), &m) != g {
            bad.push(Violation::FormNotPreserved(i));
        }
        if mat_vec(&m, &d0) != d0 {
            bad.push(Violation::D0NotFixed(i));
        }
        if basis.iter().any(|w| multiple_of(&sub(&mat_vec(&m, w), w), &d0).is_none()) {
            bad.push(Violation::QuotientNotIdentity(i));
        }
        let nil = mat_sub(&m, &identity(r));
        let mut p = identity(r);
        for _ in 0..r {
            p = mat_mul(&p, &nil);
        }
        if !is_zero_mat(&p) {
            bad.push(Violation::NotUnipotent(i));
        }
        // a fixed vector pairing nontrivially with D₀ spans with D₀ a
        // hyperbolic plane, which contains a second isotropic line
        if !is_zero_mat(&nil) {
            let fixed = kernel(&rational_rows(&nil), r);
            if fixed.iter().any(|v| !v.iter().zip(&gd0).map(|(x, y)| x * y).sum::<BigInt>().is_zero()) {
                bad.push(Violation::ExtraFixedIsotropic(i));
            }
        }
        mats.push(Some(m));
    }
    for i in 0..mats.len() {
        for j in i + 1..mats.len() {
            if let (Some(a), Some(b)) = (&mats[i], &mats[j]) {
                if mat_mul(a, b) != mat_mul(b, a) {
                    bad.push(Violation::NotCommuting(i, j));
                }
            }
        }
    }
    if bad.is_empty() {
        Ok(sys.clone())
    } else {
        Err(bad)
    }
}

/// R_i and t_ij, exact.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HalphenCoefficients {
    /// (f_i)_*A − A.
    pub r: Vec<Vector>,
    /// (f_i)_*R_j = R_j + t_ij·D₀.
    pub t: Vec<Vec<BigRational>>,
}

pub fn halphen_coefficients(sys: &HalphenSystem) -> Result<HalphenCoefficients> {
    let g = big_mat(&sys.gram);
    let (d0, a) = (big_vec(&sys.d0), big_vec(&sys.a));
    let mats: Vec<Mat> = sys.autos.iter().map(big_mat).collect();
    let r: Vec<Vector> = mats.iter().map(|m| sub(&mat_vec(m, &a), &a)).collect();
    for (i, ri) in r.iter().enumerate() {
        if !pair(&g, ri, &d0).is_zero() {
            return Err(Error::PreconditionFailed(format!("R_{i} is not orthogonal to D₀")));
        }
    }
    let mut t = Vec::with_capacity(mats.len());
    for (i, m) in mats.iter().enumerate() {
        let mut row = Vec::with_capacity(r.len());
        for (j, rj) in r.iter().enumerate() {
            let c = multiple_of(&sub(&mat_vec(m, rj), rj), &d0).ok_or_else(|| {
                Error::PreconditionFailed(format!("f_{i} moves R_{j} off the line R_{j} + k·D₀"))
            })?;
            row.push(c);
        }
        t.push(row);
    }
    Ok(HalphenCoefficients { r, t })
}

fn check_exponents(sys: &HalphenSystem, n: &[i64]) -> Result<()> {
    if n.len() != sys.autos.len() {
        return Err(Error::invalid("one exponent per auto"));
    }
    Ok(())
}

/// (A + Σ nᵢRᵢ + (Σ nᵢ(nᵢ−1)/2·tᵢᵢ + Σ_{i<j} nᵢnⱼtᵢⱼ)·D₀)·A.
pub fn closed_form_degree(sys: &HalphenSystem, n: &[i64]) -> Result<BigInt> {
    check_exponents(sys, n)?;
    let c = halphen_coefficients(sys)?;
    let g = big_mat(&sys.gram);
    let (d0, a) = (big_vec(&sys.d0), big_vec(&sys.a));
    let mut deg = BigRational::from_integer(pair(&g, &a, &a));
    let ad0 = BigRational::from_integer(pair(&g, &d0, &a));
    let k = n.len();
    for i in 0..k {
        let ni = BigInt::from(n[i]);
        deg += BigRational::from_integer(&ni * pair(&g, &c.r[i], &a));
        let half = BigRational::new(&ni * (&ni - 1), BigInt::from(2));
        deg += half * &c.t[i][i] * &ad0;
        for j in i + 1..k {
            deg += BigRational::from_integer(&ni * BigInt::from(n[j])) * &c.t[i][j] * &ad0;
        }
    }
    if !deg.is_integer() {
        return Err(Error::Verification("closed-form degree is not an integer".into()));
    }
    Ok(deg.to_integer())
}

/// Inverse of a unimodular integer matrix by Gauss–Jordan over Q.
fn inverse(m: &Mat) -> Result<Mat> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = rational_rows(m);
    let mut inv: Vec<Vec<BigRational>> = rational_rows(&identity(n));
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero()).ok_or_else(|| Error::invalid("singular auto"))?;
        a.swap(c, p);
        inv.swap(c, p);
        let s = a[c][c].recip();
        for j in 0..n {
            a[c][j] *= &s;
            inv[c][j] *= &s;
        }
        for i in 0..n {
            if i != c && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..n {
                    let (x, y) = (&f * &a[c][j], &f * &inv[c][j]);
                    a[i][j] -= x;
                    inv[i][j] -= y;
                }
            }
        }
    }
    if inv.iter().flatten().any(|x| !x.is_integer()) {
        return Err(Error::invalid("auto is not invertible over the integers"));
    }
    Ok(inv.into_iter().map(|r| r.into_iter().map(|x| x.to_integer()).collect()).collect())
}

/// Literal push-forward: apply each auto |nᵢ| times, then pair with A.
pub fn push_forward_degree(sys: &HalphenSystem, n: &[i64]) -> Result<BigInt> {
    check_exponents(sys, n)?;
    let g = big_mat(&sys.gram);
    let a = big_vec(&sys.a);
    let mut v = a.clone();
    for (f, &e) in sys.autos.iter().zip(n) {
        let m = big_mat(f);
        let step = if e < 0 { inverse(&m)? } else { m };
        for _ in 0..e.unsigned_abs() {
            v = mat_vec(&step, &v);
        }
    }
    Ok(pair(&g, &v, &a))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum QuotientOrder {
    Finite(u64),
    Infinite,
}

/// Largest power tried; finite subgroups of GL_n(Z) for the ranks in use
/// have far smaller exponents.
const ORDER_BOUND: u64 = 10_000;

/// Order of the map induced on D₀^⊥/D₀.
///
/// When the auto preserves the line of D₀ the induced form on the quotient
/// is negative definite, so the induced map has finite order and is found
/// by iterating. An auto that moves the line but has |tr fᵏ| > r for some
/// k has an eigenvalue off the unit circle and hence infinite order.
pub fn finite_order_on_quotient(auto: &IntMatrix, sys: &HalphenSystem) -> Result<QuotientOrder> {
    let g = big_mat(&sys.gram);
    let r = g.len();
    if auto.len() != r || auto.iter().any(|row| row.len() != r) {
        return Err(Error::invalid("auto has the wrong shape"));
    }
    let m = big_mat(auto);
    if mat_mul(&mat_mul(&transpose(&m), &g), &m) != g {
        return Err(Error::PreconditionFailed("auto does not preserve the form".into()));
    }
    let d0 = big_vec(&sys.d0);
    let md0 = mat_vec(&m, &d0);
    let on_line = multiple_of(&md0, &d0).is_some_and(|c| c.abs().is_one());
    if !on_line {
        let mut p = m.clone();
        for _ in 0..ORDER_BOUND {
            let tr: BigInt = (0..r).map(|i| p[i][i].clone()).sum();
            if tr.abs() > BigInt::from(r) {
                return Ok(QuotientOrder::Infinite);
            }
            if p == identity(r) {
                break;
            }
            p = mat_mul(&p, &m);
        }
        return Err(Error::PreconditionFailed("auto does not preserve the line of D₀".into()));
    }
    let ws = quotient_basis(&g, &d0);
    let mut full = vec![d0.clone()];
    full.extend(ws.iter().cloned());
    // induced matrix on the quotient, columns = images of the wᵢ
    let cols: Vec<Vec<BigRational>> = ws
        .iter()
        .map(|w| coordinates(&full, &mat_vec(&m, w)).map(|c| c[1..].to_vec()))
        .collect::<Option<_>>()
        .ok_or_else(|| Error::Verification("D₀^⊥ is not preserved".into()))?;
    let q = ws.len();
    let induced: Vec<Vec<BigRational>> = (0..q).map(|i| (0..q).map(|j| cols[j][i].clone()).collect()).collect();
    let id: Vec<Vec<BigRational>> =
        (0..q).map(|i| (0..q).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect()).collect();
    let mut p = induced.clone();
    for k in 1..=ORDER_BOUND {
        if p == id {
            return Ok(QuotientOrder::Finite(k));
        }
        p = (0..q)
            .map(|i| (0..q).map(|j| (0..q).map(|l| &p[i][l] * &induced[l][j]).sum()).collect())
            .collect();
    }
    Ok(QuotientOrder::Infinite)
}

impl HalphenSystem {
    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::invalid(format!("bad system description: {e}")))
    }
}

/// Degree as an i64, for tables.
pub fn degree_i64(d: &BigInt) -> Option<i64> {
    d.to_i64()
}
