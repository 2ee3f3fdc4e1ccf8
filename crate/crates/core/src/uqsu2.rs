//! Irreducible admissible representations of `U_q(su(2))`.
//!
//! The spin `n/2` representation acts on `C^{n+1}` with orthonormal basis
//! `ξ_0, …, ξ_n`, `k ξ_p = q^{n-2p} ξ_p`, `e` lowering and `f` raising the
//! index `p`. The coproduct is `Δ(e) = e⊗1 + k⊗e`, `Δ(f) = f⊗k^{-1} + 1⊗f`,
//! `Δ(k) = k⊗k`, and tensor products are decomposed numerically into
//! irreducibles.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, RwLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::qnum::{c, max_abs_diff, CMatrix, CVector};

/// A half-integer spin, stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "f64", try_from = "f64")]
pub struct Spin(u32);

impl Spin {
    pub const ZERO: Spin = Spin(0);
    pub const HALF: Spin = Spin(1);
    pub const ONE: Spin = Spin(2);

    pub const fn from_twice(n: u32) -> Self {
        Spin(n)
    }

    pub const fn integer(l: u32) -> Self {
        Spin(2 * l)
    }

    /// `n = 2·spin`.
    pub const fn twice(self) -> u32 {
        self.0
    }

    pub const fn dim(self) -> usize {
        self.0 as usize + 1
    }

    pub const fn is_integer(self) -> bool {
        self.0.is_multiple_of(2)
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    /// Labels `m = n - 2p` of the basis vectors `ξ_p`, in basis order.
    pub fn labels(self) -> impl Iterator<Item = i64> {
        let n = self.0 as i64;
        (0..=n).map(move |p| n - 2 * p)
    }

    /// All spins `0, 1/2, 1, …, self`.
    pub fn up_to(self) -> impl Iterator<Item = Spin> {
        (0..=self.0).map(Spin)
    }

    /// Spins `|n1-n2|/2, …, (n1+n2)/2` occurring in `self ⊗ other`.
    pub fn coupled(self, other: Spin) -> impl Iterator<Item = Spin> {
        let lo = self.0.abs_diff(other.0);
        let hi = self.0 + other.0;
        (lo..=hi).step_by(2).map(Spin)
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl From<Spin> for f64 {
    fn from(s: Spin) -> f64 {
        s.value()
    }
}

impl TryFrom<f64> for Spin {
    type Error = String;

    fn try_from(v: f64) -> std::result::Result<Self, String> {
        let twice = 2.0 * v;
        if v < 0.0 || (twice - twice.round()).abs() > 1e-12 || twice > u32::MAX as f64 {
            return Err(format!("{v} is not a nonnegative half-integer"));
        }
        Ok(Spin(twice.round() as u32))
    }
}

impl FromStr for Spin {
    type Err = String;

    /// Accepts `3`, `2.5` or `5/2`.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let num: u32 = num.trim().parse().map_err(|e| format!("{s}: {e}"))?;
            match den.trim() {
                "2" => Ok(Spin(num)),
                "1" => Ok(Spin(2 * num)),
                _ => Err(format!("{s}: denominator must be 1 or 2")),
            }
        } else {
            let v: f64 = s.parse().map_err(|e| format!("{s}: {e}"))?;
            Spin::try_from(v)
        }
    }
}

/// Generator matrices of `π_{n/2}`.
#[derive(Clone, Debug)]
pub struct SpinRep {
    pub spin: Spin,
    pub e: CMatrix,
    pub f: CMatrix,
    pub k: CMatrix,
    pub k_inv: CMatrix,
}

pub fn make_rep(spin: Spin, q: f64) -> SpinRep {
    let n = spin.twice() as i32;
    let d = spin.dim();
    let mut e = CMatrix::zeros(d, d);
    let mut f = CMatrix::zeros(d, d);
    let scale = 1.0 / (1.0 / q - q);
    for p in 0..=n {
        if p >= 1 {
            let r = (q.powi(-n + p - 1) - q.powi(n - p + 1)) * (q.powi(-p) - q.powi(p));
            let v = r.sqrt() * q.powf(n as f64 / 2.0 - p as f64 + 1.0) * scale;
            e[(p as usize - 1, p as usize)] = c(v);
        }
        if p < n {
            let r = (q.powi(-n + p) - q.powi(n - p)) * (q.powi(-p - 1) - q.powi(p + 1));
            let v = r.sqrt() * q.powf(-(n as f64) / 2.0 + p as f64) * scale;
            f[(p as usize + 1, p as usize)] = c(v);
        }
    }
    SpinRep {
        spin,
        e,
        f,
        k: k_power(spin, q, c(1.0)),
        k_inv: k_power(spin, q, c(-1.0)),
    }
}

/// `π(k)^w`: diagonal with entries `q^{w(n-2p)}`, for complex `w`.
pub fn k_power(spin: Spin, q: f64, w: Complex64) -> CMatrix {
    let lnq = q.ln();
    let diag = CVector::from_iterator(spin.dim(), spin.labels().map(|m| (w * (m as f64 * lnq)).exp()));
    CMatrix::from_diagonal(&diag)
}

/// `π(δ_A)^z = k^{2z}` (the modular element satisfies `δ_A^{1/2} = k`).
pub fn delta_a_power(spin: Spin, q: f64, z: Complex64) -> CMatrix {
    k_power(spin, q, z * 2.0)
}

/// Quantum dimension `Tr π(δ_A)^{1/2} = Tr π(k) = [n+1]`.
pub fn qdim(spin: Spin, q: f64) -> f64 {
    spin.labels().map(|m| q.powi(m as i32)).sum()
}

/// Coproduct images of `e`, `f`, `k`, `k^{-1}` on `V_1 ⊗ V_2`.
#[derive(Clone, Debug)]
pub struct TensorRep {
    pub e: CMatrix,
    pub f: CMatrix,
    pub k: CMatrix,
    pub k_inv: CMatrix,
}

pub fn tensor_rep(r1: &SpinRep, r2: &SpinRep) -> TensorRep {
    let i1 = CMatrix::identity(r1.spin.dim(), r1.spin.dim());
    let i2 = CMatrix::identity(r2.spin.dim(), r2.spin.dim());
    TensorRep {
        e: r1.e.kronecker(&i2) + r1.k.kronecker(&r2.e),
        f: r1.f.kronecker(&r2.k_inv) + i1.kronecker(&r2.f),
        k: r1.k.kronecker(&r2.k),
        k_inv: r1.k_inv.kronecker(&r2.k_inv),
    }
}

/// One irreducible summand `T: V_γ → V_left ⊗ V_right` (an isometric
/// intertwiner, stored as a `(d_left·d_right) × d_γ` matrix).
#[derive(Clone, Debug)]
pub struct CgComponent {
    pub spin: Spin,
    pub isometry: CMatrix,
}

#[derive(Clone, Debug)]
pub struct CgDecomposition {
    pub left: Spin,
    pub right: Spin,
    pub components: Vec<CgComponent>,
}

impl CgDecomposition {
    pub fn component(&self, spin: Spin) -> Option<&CgComponent> {
        self.components.iter().find(|c| c.spin == spin)
    }

    /// `max |T_γ^† T_γ' - δ_{γγ'}|` together with `max |Σ T_γ T_γ^† - 1|`.
    pub fn orthonormality_residual(&self) -> f64 {
        let dim = self.left.dim() * self.right.dim();
        let mut worst: f64 = 0.0;
        let mut sum = CMatrix::zeros(dim, dim);
        for a in &self.components {
            for b in &self.components {
                let g = a.isometry.adjoint() * &b.isometry;
                let target = if a.spin == b.spin {
                    CMatrix::identity(a.spin.dim(), a.spin.dim())
                } else {
                    CMatrix::zeros(a.spin.dim(), b.spin.dim())
                };
                worst = worst.max(max_abs_diff(&g, &target).unwrap_or(f64::INFINITY));
            }
            sum += &a.isometry * a.isometry.adjoint();
        }
        worst.max(max_abs_diff(&sum, &CMatrix::identity(dim, dim)).unwrap_or(f64::INFINITY))
    }

    /// Largest residual of `Δ(x) T_γ = T_γ π_γ(x)` over `x ∈ {e, f, k}`.
    /// Largest `|Δ(g) T - T π(g)|` over `g ∈ {e, f, k}`, relative to the
    /// largest entry of `Δ(g)`.
    pub fn intertwining_residual(&self, alg: &Uqsu2) -> f64 {
        let t = tensor_rep(&alg.rep(self.left), &alg.rep(self.right));
        let mut worst: f64 = 0.0;
        for comp in &self.components {
            let r = alg.rep(comp.spin);
            let iso = &comp.isometry;
            for (big, small) in [(&t.e, &r.e), (&t.f, &r.f), (&t.k, &r.k)] {
                let lhs = big * iso;
                let rhs = iso * small;
                let scale = big.camax().max(1.0);
                worst = worst.max(max_abs_diff(&lhs, &rhs).unwrap_or(f64::INFINITY) / scale);
            }
        }
        worst
    }
}

/// `1/x` to full double-double precision (one Newton step on top of the
/// library reciprocal, which is only accurate to about `1e-17`).
pub(crate) fn recip_dd(x: TwoFloat) -> TwoFloat {
    let one = TwoFloat::from(1.0);
    let r = one / x;
    r + r * (one - x * r)
}

/// `x^k` for integer `k`, using only multiplications and `recip_dd`.
pub(crate) fn pow_dd(x: TwoFloat, x_inv: TwoFloat, k: i32) -> TwoFloat {
    if k >= 0 {
        x.powi(k)
    } else {
        x_inv.powi(-k)
    }
}

/// Lowering coefficients `f_p = π(f)_{p+1,p}` and the diagonal of `π(k^{-1})`
/// in double-double precision.
pub(crate) fn lowering_dd(n: i32, q: TwoFloat) -> (Vec<TwoFloat>, Vec<TwoFloat>) {
    let qi = recip_dd(q);
    let qh = q.sqrt();
    let qhi = recip_dd(qh);
    let scale = recip_dd(qi - q);
    let f = (0..n)
        .map(|p| {
            let r = (pow_dd(q, qi, -n + p) - pow_dd(q, qi, n - p)) * (pow_dd(q, qi, -p - 1) - pow_dd(q, qi, p + 1));
            r.sqrt() * pow_dd(qh, qhi, 2 * p - n) * scale
        })
        .collect();
    let kinv = (0..=n).map(|p| pow_dd(q, qi, 2 * p - n)).collect();
    (f, kinv)
}

/// Numerical Clebsch–Gordan decomposition of `V_{n1/2} ⊗ V_{n2/2}`.
///
/// Highest-weight vectors are found as the orthogonal complement, inside
/// each `Δ(k)`-weight space, of the vectors already produced by higher
/// components (this complement is `ker Δ(e)` because `Δ(e)^† = Δ(f k)`).
/// Each component is then generated by `Δ(f)`. The coefficient of the first
/// basis tensor with nonzero weight in every highest-weight vector is made
/// positive.
///
/// All coefficients are real. Lowering by `Δ(f)` cancels terms of size
/// `q^{-n}`, so the construction runs in double-double arithmetic and is
/// rounded once at the end.
pub fn clebsch_gordan(left: Spin, right: Spin, q: f64) -> Result<CgDecomposition> {
    let qd = TwoFloat::from(q);
    let zero = TwoFloat::from(0.0);
    let (n1, n2) = (left.twice() as i64, right.twice() as i64);
    let (f1, _) = lowering_dd(n1 as i32, qd);
    let (f2, kinv2) = lowering_dd(n2 as i32, qd);
    let d2 = right.dim();
    let dim = left.dim() * d2;
    let weight = |idx: usize| (n1 - 2 * (idx / d2) as i64) + (n2 - 2 * (idx % d2) as i64);
    let dot = |u: &[TwoFloat], v: &[TwoFloat]| u.iter().zip(v).fold(zero, |acc, (a, b)| acc + *a * *b);
    // Δ(f) = f ⊗ k^{-1} + 1 ⊗ f
    let lower = |v: &[TwoFloat]| {
        let mut out = vec![zero; dim];
        for (idx, x) in v.iter().enumerate() {
            if x.hi() == 0.0 {
                continue;
            }
            let (p1, p2) = (idx / d2, idx % d2);
            if p1 + 1 < left.dim() {
                out[idx + d2] += f1[p1] * kinv2[p2] * *x;
            }
            if p2 + 1 < d2 {
                out[idx + 1] += f2[p2] * *x;
            }
        }
        out
    };

    let mut produced: Vec<Vec<TwoFloat>> = Vec::with_capacity(dim);
    let mut components = Vec::new();
    for gamma in left.coupled(right).collect::<Vec<_>>().into_iter().rev() {
        let w = gamma.twice() as i64;
        let mut best: Option<(TwoFloat, Vec<TwoFloat>)> = None;
        for idx in (0..dim).filter(|&i| weight(i) == w) {
            let mut v = vec![zero; dim];
            v[idx] = TwoFloat::from(1.0);
            for _ in 0..2 {
                for u in &produced {
                    let proj = dot(u, &v);
                    for (x, y) in v.iter_mut().zip(u) {
                        *x -= proj * *y;
                    }
                }
            }
            let nrm = dot(&v, &v).sqrt();
            if best.as_ref().is_none_or(|(b, _)| nrm > *b) {
                best = Some((nrm, v));
            }
        }
        let (nrm, mut hw) =
            best.ok_or_else(|| Error::Internal(format!("empty weight space {w} in {left} ⊗ {right}")))?;
        if nrm.hi() < 1e-6 {
            return Err(Error::Internal(format!(
                "no highest-weight vector of spin {gamma} in {left} ⊗ {right}"
            )));
        }
        let amax = hw.iter().map(|x| x.hi().abs()).fold(0.0, f64::max);
        let lead = hw.iter().find(|x| x.hi().abs() > 1e-8 * amax).copied().unwrap_or(nrm);
        let sign = if lead.hi() < 0.0 { -1.0 } else { 1.0 };
        let s = TwoFloat::from(sign) * recip_dd(nrm);
        hw.iter_mut().for_each(|x| *x *= s);

        let (fg, _) = lowering_dd(w as i32, qd);
        let mut cols = vec![hw];
        for coef in fg {
            let inv = recip_dd(coef);
            let next: Vec<TwoFloat> = lower(cols.last().unwrap()).into_iter().map(|x| x * inv).collect();
            cols.push(next);
        }
        let iso = CMatrix::from_fn(dim, cols.len(), |i, j| c(f64::from(cols[j][i])));
        produced.extend(cols);
        components.push(CgComponent {
            spin: gamma,
            isometry: iso,
        });
    }
    components.sort_by_key(|c| c.spin);
    let decomposition = CgDecomposition {
        left,
        right,
        components,
    };
    let residual = decomposition.orthonormality_residual();
    if residual > 1e-12 {
        return Err(Error::Internal(format!(
            "Clebsch–Gordan basis of {left} ⊗ {right} not orthonormal (residual {residual:.3e})"
        )));
    }
    Ok(decomposition)
}

/// The antiunitary self-duality `J v = u_n v̄` with `u_n ξ_p = (-1)^p ξ_{n-p}`.
///
/// `J² = (-1)^n`, so `J` is an involution on integer spins and squares to
/// `-1` on half-odd spins.
#[derive(Clone, Debug)]
pub struct SelfDuality {
    pub spin: Spin,
    pub u: CMatrix,
}

impl SelfDuality {
    pub fn new(spin: Spin) -> Self {
        let n = spin.twice() as usize;
        let mut u = CMatrix::zeros(n + 1, n + 1);
        for p in 0..=n {
            u[(n - p, p)] = c(if p % 2 == 0 { 1.0 } else { -1.0 });
        }
        Self { spin, u }
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        &self.u * v.conjugate()
    }

    pub fn apply_inverse(&self, v: &CVector) -> CVector {
        (self.u.transpose() * v).conjugate()
    }

    /// `(J^{-1} x J)^†`, which equals `u^T x^T u`.
    pub fn conjugate_adjoint(&self, x: &CMatrix) -> CMatrix {
        // J^{-1} x J = u^T x̄ u as a linear map, since u is real orthogonal.
        let inner = self.u.transpose() * x.conjugate() * &self.u;
        inner.adjoint()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Representations, Clebsch–Gordan data and antipodes at fixed `q`, with
/// per-spin and per-spin-pair caches that are safe for concurrent use.
#[derive(Debug)]
pub struct Uqsu2 {
    q: f64,
    reps: RwLock<HashMap<Spin, Arc<SpinRep>>>,
    cg: RwLock<HashMap<(Spin, Spin), Arc<CgDecomposition>>>,
}

impl Uqsu2 {
    pub fn new(q: f64) -> Self {
        Self {
            q,
            reps: RwLock::new(HashMap::new()),
            cg: RwLock::new(HashMap::new()),
        }
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn rep(&self, spin: Spin) -> Arc<SpinRep> {
        if let Some(r) = self.reps.read().unwrap().get(&spin) {
            return r.clone();
        }
        let r = Arc::new(make_rep(spin, self.q));
        self.reps.write().unwrap().entry(spin).or_insert(r).clone()
    }

    pub fn cg(&self, left: Spin, right: Spin) -> Result<Arc<CgDecomposition>> {
        if let Some(d) = self.cg.read().unwrap().get(&(left, right)) {
            return Ok(d.clone());
        }
        let d = Arc::new(clebsch_gordan(left, right, self.q)?);
        Ok(self.cg.write().unwrap().entry((left, right)).or_insert(d).clone())
    }

    pub fn k_power(&self, spin: Spin, w: Complex64) -> CMatrix {
        k_power(spin, self.q, w)
    }

    pub fn delta_a_power(&self, spin: Spin, z: Complex64) -> CMatrix {
        delta_a_power(spin, self.q, z)
    }

    pub fn qdim(&self, spin: Spin) -> f64 {
        qdim(spin, self.q)
    }

    /// The unitary antipode `R` on the block of `spin`.
    pub fn unitary_antipode(&self, spin: Spin, x: &CMatrix) -> CMatrix {
        SelfDuality::new(spin).conjugate_adjoint(x)
    }

    /// `S(x) = δ^{-1/4} R(x) δ^{1/4}` or `S^{-1}(x) = δ^{1/4} R(x) δ^{-1/4}`,
    /// with `δ^{1/4} = k^{1/2}`.
    pub fn antipode(&self, spin: Spin, x: &CMatrix, direction: Direction) -> CMatrix {
        let sign = match direction {
            Direction::Forward => -1.0,
            Direction::Inverse => 1.0,
        };
        let left = self.k_power(spin, c(0.5 * sign));
        let right = self.k_power(spin, c(-0.5 * sign));
        left * self.unitary_antipode(spin, x) * right
    }
}
