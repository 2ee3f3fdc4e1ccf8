//! The Podleś coideal `B_t = q^{-1/2}(e - fk) - i(q - q^{-1})^{-1} t k`, the
//! stabilizer `I = U_q(k_t)` it generates inside `𝒰`, and the coideal
//! subalgebra `B = O_q(S_t^2)` of `O_q(SU(2))`.
//!
//! On `V_{n/2}` the operator `iB_t` is self-adjoint with simple spectrum
//! `{[a+m] : m = n, n-2, …, -n}`. The element `e_m ∈ I` acts as the
//! projection onto the `[a+m]`-eigenvector `v_m`, and `Φ_C = e_0`.
//!
//! Elements of `B` are the coefficient elements whose density matrices
//! satisfy `D = D Φ_C` blockwise.

use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, RwLock};

use num_complex::Complex64;
use twofloat::TwoFloat;

use crate::coeffalg::{CoeffAlgebra, CoeffElement, DualElement};
use crate::error::{Error, Result};
use crate::qnum::{c, max_abs_diff, q_pochhammer, CMatrix, CVector, QContext, Scalar};
use crate::uqsu2::{lowering_dd, pow_dd, recip_dd, Direction, Spin, Uqsu2};

/// An element `Σ_m c_m e_{[a+m]}` of the stabilizer `I`, finitely supported.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StabElement {
    coeffs: BTreeMap<i64, Scalar>,
}

impl StabElement {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The spectral projection `e_{[a+m]}`.
    pub fn projection(m: i64) -> Self {
        Self::from_coeffs([(m, c(1.0))])
    }

    /// `Σ_{|m| ≤ M} e_{[a+m]}`. The unit of `I` has infinite support; this
    /// is the unit of the truncated algebra.
    pub fn truncated_unit(truncation: i64) -> Self {
        Self::from_coeffs((-truncation..=truncation).map(|m| (m, c(1.0))))
    }

    pub fn from_coeffs(iter: impl IntoIterator<Item = (i64, Scalar)>) -> Self {
        let mut out = Self::zero();
        for (m, v) in iter {
            out.add_coeff(m, v);
        }
        out
    }

    pub fn coeff(&self, m: i64) -> Scalar {
        self.coeffs.get(&m).copied().unwrap_or(c(0.0))
    }

    pub fn add_coeff(&mut self, m: i64, v: Scalar) {
        *self.coeffs.entry(m).or_insert(c(0.0)) += v;
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Scalar)> + '_ {
        self.coeffs.iter().map(|(m, v)| (*m, *v))
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest `|m|` in the support.
    pub fn radius(&self) -> Option<i64> {
        self.coeffs.keys().map(|m| m.abs()).max()
    }

    /// `I` is commutative and the `e_m` are orthogonal idempotents.
    pub fn product(&self, other: &Self) -> Self {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .filter_map(|(m, v)| other.coeffs.get(m).map(|w| (*m, v * w))),
        )
    }

    pub fn star(&self) -> Self {
        Self::from_coeffs(self.iter().map(|(m, v)| (m, v.conj())))
    }

    pub fn distance(&self, other: &Self) -> f64 {
        let keys: std::collections::BTreeSet<_> = self.coeffs.keys().chain(other.coeffs.keys()).copied().collect();
        keys.into_iter()
            .map(|m| (self.coeff(m) - other.coeff(m)).norm())
            .fold(0.0, f64::max)
    }

    pub fn pruned(mut self, tol: f64) -> Self {
        self.coeffs.retain(|_, v| v.norm() > tol);
        self
    }
}

impl Add for &StabElement {
    type Output = StabElement;
    fn add(self, rhs: &StabElement) -> StabElement {
        let mut out = self.clone();
        for (m, v) in rhs.iter() {
            out.add_coeff(m, v);
        }
        out
    }
}

impl Neg for &StabElement {
    type Output = StabElement;
    fn neg(self) -> StabElement {
        StabElement::from_coeffs(self.iter().map(|(m, v)| (m, -v)))
    }
}

impl Sub for &StabElement {
    type Output = StabElement;
    fn sub(self, rhs: &StabElement) -> StabElement {
        self + &(-rhs)
    }
}

impl Mul<Scalar> for &StabElement {
    type Output = StabElement;
    fn mul(self, rhs: Scalar) -> StabElement {
        StabElement::from_coeffs(self.iter().map(|(m, v)| (m, v * rhs)))
    }
}

/// One eigenpair of `π_{n/2}(iB_t)`.
#[derive(Clone, Debug)]
pub struct EigenPair {
    pub m: i64,
    /// `[a+m]`.
    pub eigenvalue: f64,
    /// Unit eigenvector, first component real positive.
    pub vector: CVector,
}

/// Spectral data of `iB_t` on one spin block.
#[derive(Clone, Debug)]
pub struct CoidealBlock {
    pub spin: Spin,
    /// `π(iB_t)`.
    pub i_bt: CMatrix,
    /// Eigenpairs ordered by `m = n, n-2, …, -n`.
    pub eigen: Vec<EigenPair>,
    /// Eigenvalues from an independent dense Hermitian solver, ascending.
    pub numeric_spectrum: Vec<f64>,
    /// `π(Φ_C)`: zero on half-odd spins, rank one otherwise.
    pub phi_c: CMatrix,
}

impl CoidealBlock {
    pub fn pair(&self, m: i64) -> Option<&EigenPair> {
        self.eigen.iter().find(|e| e.m == m)
    }

    /// `π(e_{[a+m]})`, zero if `m` is not a label of this block.
    pub fn projection(&self, m: i64) -> CMatrix {
        match self.pair(m) {
            Some(e) => &e.vector * e.vector.adjoint(),
            None => CMatrix::zeros(self.spin.dim(), self.spin.dim()),
        }
    }

    /// The unit `Φ_C`-fixed vector, for integer spins.
    pub fn phi_c_vector(&self) -> Option<&CVector> {
        self.pair(0).map(|e| &e.vector)
    }

    /// Largest gap between the numeric spectrum and `{[a+m]}`.
    pub fn spectrum_residual(&self) -> f64 {
        let mut expected: Vec<f64> = self.eigen.iter().map(|e| e.eigenvalue).collect();
        expected.sort_by(f64::total_cmp);
        expected
            .iter()
            .zip(&self.numeric_spectrum)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    /// Largest `|iB_t v_m - [a+m] v_m|`.
    pub fn eigenvector_residual(&self) -> f64 {
        self.eigen
            .iter()
            .map(|e| (&self.i_bt * &e.vector - &e.vector * c(e.eigenvalue)).camax())
            .fold(0.0, f64::max)
    }
}

struct DdQ {
    q: TwoFloat,
    qi: TwoFloat,
    qa: TwoFloat,
    qai: TwoFloat,
}

impl DdQ {
    fn new(q: f64, qa: f64) -> Self {
        let (q, qa) = (TwoFloat::from(q), TwoFloat::from(qa));
        Self {
            q,
            qi: recip_dd(q),
            qa,
            qai: recip_dd(qa),
        }
    }

    fn pow(&self, k: i32) -> TwoFloat {
        pow_dd(self.q, self.qi, k)
    }

    /// `[a+m]`.
    fn shifted_int(&self, m: i32) -> TwoFloat {
        (self.qa * self.pow(m) - self.qai * self.pow(-m)) * recip_dd(self.q - self.qi)
    }
}

/// `D^{-1} π(iB_t) D` with `D = diag(i^p)`: a real symmetric tridiagonal
/// matrix, returned as (diagonal, off-diagonal).
fn real_tridiagonal(n: i32, dq: &DdQ) -> (Vec<TwoFloat>, Vec<TwoFloat>) {
    let a0 = dq.shifted_int(0);
    let diag = (0..=n).map(|p| a0 * dq.pow(n - 2 * p)).collect();
    let (f, _) = lowering_dd(n, dq.q);
    let qmh = recip_dd(dq.q.sqrt());
    // -q^{-1/2} π(fk)_{p+1,p}
    let off = (0..n as usize)
        .map(|p| -(qmh * f[p] * dq.pow(n - 2 * p as i32)))
        .collect();
    (diag, off)
}

/// Solves `M x = b` by Gaussian elimination with partial pivoting.
#[allow(clippy::needless_range_loop)]
fn solve_dd(mut m: Vec<Vec<TwoFloat>>, mut b: Vec<TwoFloat>, floor: TwoFloat) -> Vec<TwoFloat> {
    let d = b.len();
    for col in 0..d {
        let piv = (col..d)
            .max_by(|&i, &j| m[i][col].hi().abs().total_cmp(&m[j][col].hi().abs()))
            .unwrap();
        m.swap(col, piv);
        b.swap(col, piv);
        if m[col][col].hi().abs() < floor.hi() {
            m[col][col] = floor;
        }
        let inv = recip_dd(m[col][col]);
        for row in col + 1..d {
            let factor = m[row][col] * inv;
            if factor.hi() == 0.0 {
                continue;
            }
            for k in col..d {
                let v = m[col][k];
                m[row][k] -= factor * v;
            }
            let v = b[col];
            b[row] -= factor * v;
        }
    }
    let mut x = vec![TwoFloat::from(0.0); d];
    for row in (0..d).rev() {
        let mut acc = b[row];
        for k in row + 1..d {
            acc -= m[row][k] * x[k];
        }
        x[row] = acc * recip_dd(m[row][row]);
    }
    x
}

fn normalize_dd(x: &mut [TwoFloat]) {
    let nrm = x.iter().fold(TwoFloat::from(0.0), |acc, v| acc + *v * *v).sqrt();
    let mut s = recip_dd(nrm);
    if x[0].hi() < 0.0 {
        s = -s;
    }
    x.iter_mut().for_each(|v| *v *= s);
}

/// Eigenvectors of `π_{n/2}(iB_t)` by inverse iteration at the exact
/// eigenvalues `[a+m]`, in double-double precision.
fn eigenvectors_dd(n: i32, dq: &DdQ) -> Vec<(i64, TwoFloat, Vec<TwoFloat>)> {
    let d = (n + 1) as usize;
    let (diag, off) = real_tridiagonal(n, dq);
    let scale = diag.iter().chain(&off).map(|v| v.hi().abs()).fold(1.0, f64::max);
    let floor = TwoFloat::from(scale * 1e-30);
    (0..=n)
        .map(|p| {
            let m = n - 2 * p;
            let lambda = dq.shifted_int(m);
            let mut x = vec![TwoFloat::from(1.0); d];
            for _ in 0..3 {
                let mut mat = vec![vec![TwoFloat::from(0.0); d]; d];
                for i in 0..d {
                    mat[i][i] = diag[i] - lambda;
                    if i + 1 < d {
                        mat[i][i + 1] = off[i];
                        mat[i + 1][i] = off[i];
                    }
                }
                x = solve_dd(mat, x, floor);
                normalize_dd(&mut x);
            }
            (m as i64, lambda, x)
        })
        .collect()
}

/// The Podleś coideal data for a fixed `(q, a)`.
///
/// Spectral blocks, right-action kernels and `Δ(Φ_C)` blocks are computed
/// on demand and cached behind read-write locks.
#[derive(Debug)]
pub struct Coideal {
    ctx: QContext,
    coeff: CoeffAlgebra,
    qa: f64,
    blocks: RwLock<HashMap<Spin, Arc<CoidealBlock>>>,
    kernels: RwLock<HashMap<(Spin, i64, i64), Arc<CMatrix>>>,
    delta_phi: RwLock<HashMap<(Spin, Spin), Arc<CMatrix>>>,
}

impl Coideal {
    /// Builds and validates every block up to `ctx.max_spin`.
    pub fn new(ctx: QContext) -> Result<Self> {
        Self::with_algebra(ctx, Arc::new(Uqsu2::new(ctx.q)))
    }

    pub fn with_algebra(ctx: QContext, alg: Arc<Uqsu2>) -> Result<Self> {
        if (alg.q() - ctx.q).abs() > 0.0 {
            return Err(Error::InvalidContext("algebra and context disagree on q".into()));
        }
        let out = Self {
            ctx,
            coeff: CoeffAlgebra::new(alg),
            qa: ctx.q.powf(ctx.a),
            blocks: RwLock::default(),
            kernels: RwLock::default(),
            delta_phi: RwLock::default(),
        };
        for s in ctx.max_spin.up_to() {
            out.block(s)?;
        }
        Ok(out)
    }

    pub fn ctx(&self) -> &QContext {
        &self.ctx
    }

    pub fn coeff_algebra(&self) -> &CoeffAlgebra {
        &self.coeff
    }

    pub fn uqsu2(&self) -> &Arc<Uqsu2> {
        self.coeff.uqsu2()
    }

    /// `[a+m]`, consistent with the eigenvalues stored in the blocks.
    pub fn shifted_q_int(&self, m: i64) -> f64 {
        f64::from(DdQ::new(self.ctx.q, self.qa).shifted_int(m as i32))
    }

    pub fn block(&self, spin: Spin) -> Result<Arc<CoidealBlock>> {
        if let Some(b) = self.blocks.read().unwrap().get(&spin) {
            return Ok(b.clone());
        }
        let b = Arc::new(self.build_block(spin)?);
        self.blocks.write().unwrap().insert(spin, b.clone());
        Ok(b)
    }

    fn build_block(&self, spin: Spin) -> Result<CoidealBlock> {
        let n = spin.twice() as i32;
        let d = spin.dim();
        let dq = DdQ::new(self.ctx.q, self.qa);
        let (diag, off) = real_tridiagonal(n, &dq);
        let phase = |p: usize| Complex64::i().powu(p as u32);
        let mut i_bt = CMatrix::zeros(d, d);
        for p in 0..d {
            i_bt[(p, p)] = c(f64::from(diag[p]));
            if p + 1 < d {
                let v = f64::from(off[p]);
                // conjugating back by diag(i^p)
                i_bt[(p, p + 1)] = c(v) * phase(p) / phase(p + 1);
                i_bt[(p + 1, p)] = c(v) * phase(p + 1) / phase(p);
            }
        }

        let eigen: Vec<EigenPair> = eigenvectors_dd(n, &dq)
            .into_iter()
            .map(|(m, lambda, x)| EigenPair {
                m,
                eigenvalue: f64::from(lambda),
                vector: CVector::from_fn(d, |p, _| c(f64::from(x[p])) * phase(p)),
            })
            .collect();

        let hermitian = (&i_bt + i_bt.adjoint()) * c(0.5);
        let mut numeric_spectrum: Vec<f64> = hermitian.symmetric_eigenvalues().iter().copied().collect();
        numeric_spectrum.sort_by(f64::total_cmp);

        let mut sorted: Vec<f64> = eigen.iter().map(|e| e.eigenvalue).collect();
        sorted.sort_by(f64::total_cmp);
        let guard = 100.0 * self.ctx.tol;
        if let Some(w) = sorted.windows(2).find(|w| w[1] - w[0] <= guard) {
            return Err(Error::Degenerate {
                spin: spin.to_string(),
                detail: format!("eigenvalues {} and {} collide", w[0], w[1]),
            });
        }
        // the f64 solver is only accurate to ~eps·‖iB_t‖, so the cross-check scales
        for (x, y) in sorted.iter().zip(&numeric_spectrum) {
            if (x - y).abs() > guard * x.abs().max(1.0) {
                return Err(Error::Degenerate {
                    spin: spin.to_string(),
                    detail: format!("numeric eigenvalue {y} does not match q-integer {x}"),
                });
            }
        }

        let mut block = CoidealBlock {
            spin,
            i_bt,
            eigen,
            numeric_spectrum,
            phi_c: CMatrix::zeros(d, d),
        };
        block.phi_c = block.projection(0);
        Ok(block)
    }

    pub fn phi_c(&self, spin: Spin) -> Result<CMatrix> {
        Ok(self.block(spin)?.phi_c.clone())
    }

    /// `π_ℓ(x) = Σ_m x_m π_ℓ(e_{[a+m]})`.
    pub fn stab_block(&self, x: &StabElement, spin: Spin) -> Result<CMatrix> {
        let block = self.block(spin)?;
        let mut out = CMatrix::zeros(spin.dim(), spin.dim());
        for (m, v) in x.iter() {
            if let Some(e) = block.pair(m) {
                out += &e.vector * e.vector.adjoint() * v;
            }
        }
        Ok(out)
    }

    /// `x` as an element of `𝒰`, materialised on spins up to `max`.
    pub fn stab_dual(&self, x: &StabElement, max: Spin) -> Result<DualElement> {
        let mut blocks = BTreeMap::new();
        for s in max.up_to() {
            blocks.insert(s, self.stab_block(x, s)?);
        }
        Ok(DualElement::from_blocks(blocks))
    }

    /// The closed-form `[a+n]`-eigenvector of `π_{n/2}(iB_t)`,
    /// `ξ⁺_p = (-i q^{-(a+n)})^p sqrt((q^{2n}; q^{-2})_p / ((-1)^p (q^{-2}; q^{-2})_p))`.
    pub fn eigvec_plus(&self, n: u32) -> CVector {
        let q = self.ctx.q;
        let base = c(q.powi(-2));
        let lead = -Complex64::i() * q.powf(-(self.ctx.a + n as f64));
        CVector::from_fn(n as usize + 1, |p, _| {
            let num = q_pochhammer(c(q.powi(2 * n as i32)), base, p);
            let den = q_pochhammer(base, base, p) * (-1.0f64).powi(p as i32);
            lead.powu(p as u32) * (num / den).sqrt()
        })
    }

    /// `‖ξ⁺_{n/2}‖² = (-q^{-2a}; q^{-2})_n`.
    pub fn eigvec_plus_norm_sq(&self, n: u32) -> f64 {
        let q = self.ctx.q;
        q_pochhammer(c(-q.powf(-2.0 * self.ctx.a)), c(q.powi(-2)), n as usize).re
    }

    /// The matrix `Z` on `V_{n1}` with `(e_m ◁ a)_{m'} = Tr(D_a Z)` for `a`
    /// supported on spin `n1`.
    ///
    /// `Δ(e_m)` restricted to `V_{n1} ⊗ V_{|m'|}` is `Σ_γ w_γ w_γ^†` with
    /// `w_γ = T_γ v^γ_m`; pairing the first leg with `a` and reading the
    /// second leg against `v_{m'}` gives `Σ_γ r_γ r_γ^†` with
    /// `r_γ = W_γ \bar v_{m'}`.
    pub fn action_kernel(&self, n1: Spin, m: i64, m2: i64) -> Result<Arc<CMatrix>> {
        let key = (n1, m, m2);
        if let Some(z) = self.kernels.read().unwrap().get(&key) {
            return Ok(z.clone());
        }
        let z = Arc::new(self.build_kernel(n1, m, m2)?);
        self.kernels.write().unwrap().insert(key, z.clone());
        Ok(z)
    }

    fn build_kernel(&self, n1: Spin, m: i64, m2: i64) -> Result<CMatrix> {
        let d1 = n1.dim();
        let shift = (m2 - m).abs();
        if shift > n1.twice() as i64 || (m2 - m - n1.twice() as i64) % 2 != 0 {
            return Ok(CMatrix::zeros(d1, d1));
        }
        let n2 = Spin::from_twice(m2.unsigned_abs() as u32);
        let d2 = n2.dim();
        let target = self.block(n2)?;
        let cg = self.uqsu2().cg(n1, n2)?;
        let mut cross: Vec<CMatrix> = vec![CMatrix::zeros(d1, d1); target.eigen.len()];
        for comp in &cg.components {
            let g = comp.spin.twice() as i64;
            if g < m.abs() {
                continue;
            }
            let v = self
                .block(comp.spin)?
                .pair(m)
                .map(|e| e.vector.clone())
                .ok_or_else(|| Error::Internal(format!("label {m} missing from spin {}", comp.spin)))?;
            let w = &comp.isometry * v;
            let wm = CMatrix::from_fn(d1, d2, |i, k| w[i * d2 + k]);
            let rs: Vec<CVector> = target.eigen.iter().map(|e| &wm * e.vector.conjugate()).collect();
            let own = target
                .eigen
                .iter()
                .position(|e| e.m == m2)
                .ok_or_else(|| Error::Internal(format!("label {m2} missing from spin {n2}")))?;
            for (k, r) in rs.iter().enumerate() {
                cross[k] += &rs[own] * r.adjoint();
            }
        }
        let own = target.eigen.iter().position(|e| e.m == m2).unwrap_or(0);
        let z = cross[own].clone();
        let cross_worst = cross
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != own)
            .map(|(_, x)| x.camax())
            .fold(0.0, f64::max);
        // x ◁ a must again be diagonal in the eigenbasis of iB_t
        if cross_worst > 100.0 * self.ctx.tol {
            return Err(Error::Internal(format!(
                "right action leaves I: off-diagonal residual {cross_worst:.3e} at ({n1}, {m}, {m2})"
            )));
        }
        Ok(z)
    }

    /// The right `A`-module structure `τ(c, x ◁ a) = τ(ac, x)`.
    pub fn act_rmod(&self, x: &StabElement, a: &CoeffElement) -> Result<StabElement> {
        let mut out = StabElement::zero();
        for (spin, d) in a.blocks() {
            let n1 = spin.twice() as i64;
            for (m, xm) in x.iter() {
                for m2 in (m - n1..=m + n1).step_by(2) {
                    let z = self.action_kernel(spin, m, m2)?;
                    let v = (d * z.as_ref()).trace();
                    if v != c(0.0) {
                        out.add_coeff(m2, xm * v);
                    }
                }
            }
        }
        Ok(out)
    }

    /// `Φ_C(a -) = e_{[a]} ◁ a`; these span the ideal `𝓘 ⊆ I`.
    pub fn stab_from_coeff(&self, a: &CoeffElement) -> Result<StabElement> {
        self.act_rmod(&StabElement::projection(0), a)
    }

    /// `τ(a, Φ_C) = Σ_ℓ Tr(D_ℓ Φ_C)`.
    pub fn phi_c_functional(&self, a: &CoeffElement) -> Result<Scalar> {
        let mut acc = c(0.0);
        for (s, d) in a.blocks() {
            acc += (d * &self.block(s)?.phi_c).trace();
        }
        Ok(acc)
    }

    /// Largest entry of `D - D Φ_C` over all blocks.
    pub fn membership_residual(&self, a: &CoeffElement) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (s, d) in a.blocks() {
            let p = &self.block(s)?.phi_c;
            worst = worst.max(max_abs_diff(d, &(d * p))?);
        }
        Ok(worst)
    }

    pub fn ensure_in_b(&self, b: &CoeffElement) -> Result<()> {
        let residual = self.membership_residual(b)?;
        if residual > self.ctx.tol * b.norm_max().max(1.0) {
            return Err(Error::NotInCoideal { residual });
        }
        Ok(())
    }

    /// `E_B(π(ξ,η)) = π(Φ_C ξ, η)`.
    pub fn e_b(&self, a: &CoeffElement) -> Result<CoeffElement> {
        let mut out = CoeffElement::zero();
        for (s, d) in a.blocks() {
            out.add_block(s, d * &self.block(s)?.phi_c);
        }
        Ok(out)
    }

    /// `F_B(a) = E_B(a^*)^*`.
    pub fn f_b(&self, a: &CoeffElement) -> Result<CoeffElement> {
        Ok(self.coeff.star(&self.e_b(&self.coeff.star(a))?))
    }

    /// `σ_B = F_B ∘ σ_A` and `σ_B^{-1} = E_B ∘ σ_A^{-1}` on `B`.
    pub fn sigma_b(&self, b: &CoeffElement, direction: Direction) -> Result<CoeffElement> {
        self.ensure_in_b(b)?;
        match direction {
            Direction::Forward => self.f_b(&self.coeff.sigma_a(b, -Complex64::i())),
            Direction::Inverse => self.e_b(&self.coeff.sigma_a(b, Complex64::i())),
        }
    }

    /// `δ_B^{1/2} = Φ_C δ_A^{1/2} Φ_C` on one block.
    pub fn delta_b_half(&self, spin: Spin) -> Result<CMatrix> {
        let p = &self.block(spin)?.phi_c;
        Ok(p * &self.uqsu2().rep(spin).k * p)
    }

    /// `θ = σ_B^{-1} σ_A S_A^{-2}`, an automorphism of `B`.
    pub fn theta(&self, b: &CoeffElement) -> Result<CoeffElement> {
        self.ensure_in_b(b)?;
        let s2 = self
            .coeff
            .antipode(&self.coeff.antipode(b, Direction::Inverse), Direction::Inverse);
        let twisted = self.coeff.sigma_a(&s2, -Complex64::i());
        self.sigma_b(&twisted, Direction::Inverse)
    }

    /// The spherical function `π_ℓ(Φ_C ξ, R(Φ_C) η)`.
    pub fn spherical(&self, spin: Spin, xi: &CVector, eta: &CVector) -> Result<CoeffElement> {
        let p = &self.block(spin)?.phi_c;
        let rp = self.uqsu2().unitary_antipode(spin, p);
        Ok(CoeffElement::matrix_coefficient(spin, &(p * xi), &(rp * eta)))
    }

    /// `π(iB_t)` pushed through the coproduct onto `V_{n1} ⊗ V_{n2}`.
    pub fn tensor_i_bt(&self, n1: Spin, n2: Spin) -> CMatrix {
        let alg = self.uqsu2();
        let t = crate::uqsu2::tensor_rep(&alg.rep(n1), &alg.rep(n2));
        let q = self.ctx.q;
        let a0 = self.shifted_q_int(0);
        (&t.e - &t.f * &t.k) * (Complex64::i() * q.powf(-0.5)) + &t.k * c(a0)
    }

    /// `Δ(Φ_C)` on `V_{n1} ⊗ V_{n2}`: the `[a]`-eigenprojection of the
    /// coproduct of `iB_t`, computed directly from the tensor product.
    pub fn delta_phi_c(&self, n1: Spin, n2: Spin) -> Result<Arc<CMatrix>> {
        if let Some(p) = self.delta_phi.read().unwrap().get(&(n1, n2)) {
            return Ok(p.clone());
        }
        let a = self.tensor_i_bt(n1, n2);
        let h = (&a + a.adjoint()) * c(0.5);
        let eig = h.symmetric_eigen();
        let target = self.shifted_q_int(0);
        let window = 0.25
            * (self.shifted_q_int(1) - target)
                .abs()
                .min((target - self.shifted_q_int(-1)).abs());
        let dim = a.nrows();
        let mut proj = CMatrix::zeros(dim, dim);
        let mut rank = 0;
        for (i, lambda) in eig.eigenvalues.iter().enumerate() {
            if (lambda - target).abs() < window {
                let v = eig.eigenvectors.column(i);
                proj += v * v.adjoint();
                rank += 1;
            }
        }
        let expected = n1.coupled(n2).filter(|g| g.is_integer()).count();
        if rank != expected {
            return Err(Error::Degenerate {
                spin: format!("{n1} ⊗ {n2}"),
                detail: format!("[a]-eigenspace has dimension {rank}, expected {expected}"),
            });
        }
        let proj = Arc::new(proj);
        self.delta_phi.write().unwrap().insert((n1, n2), proj.clone());
        Ok(proj)
    }

    /// Residual of `Φ_C S(Φ_C) = S(Φ_C)`, `Φ_C S^{-1}(Φ_C) = Φ_C` and
    /// their adjoints `S(Φ_C)^* Φ_C = S(Φ_C)^*`, `S^{-1}(Φ_C)^* Φ_C = Φ_C`.
    pub fn antipode_identity_residual(&self, spin: Spin) -> Result<f64> {
        let p = self.block(spin)?.phi_c.clone();
        let alg = self.uqsu2();
        let sp = alg.antipode(spin, &p, Direction::Forward);
        let si = alg.antipode(spin, &p, Direction::Inverse);
        let r = [
            max_abs_diff(&(&p * &sp), &sp)?,
            max_abs_diff(&(&p * &si), &p)?,
            max_abs_diff(&(sp.adjoint() * &p), &sp.adjoint())?,
            max_abs_diff(&(si.adjoint() * &p), &p)?,
        ];
        Ok(r.into_iter().fold(0.0, f64::max))
    }

    /// Residual of `Δ(Φ_C)(1 ⊗ Φ_C) = Φ_C ⊗ Φ_C` and
    /// `(S(Φ_C) ⊗ 1)Δ(Φ_C) = Φ_C ⊗ Φ_C` on `V_{n1} ⊗ V_{n2}`.
    pub fn delta_identity_residual(&self, n1: Spin, n2: Spin) -> Result<f64> {
        let dp = self.delta_phi_c(n1, n2)?;
        let p1 = self.block(n1)?.phi_c.clone();
        let p2 = self.block(n2)?.phi_c.clone();
        let pp = p1.kronecker(&p2);
        let id1 = CMatrix::identity(n1.dim(), n1.dim());
        let id2 = CMatrix::identity(n2.dim(), n2.dim());
        let sp1 = self.uqsu2().antipode(n1, &p1, Direction::Forward);
        let lhs1 = dp.as_ref() * id1.kronecker(&p2);
        let lhs2 = sp1.kronecker(&id2) * dp.as_ref();
        Ok(max_abs_diff(&lhs1, &pp)?.max(max_abs_diff(&lhs2, &pp)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qnum::approx_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn coideal(q: f64, a: f64) -> Coideal {
        Coideal::new(QContext::new(q, a, 1e-9, Spin::integer(3)).unwrap()).unwrap()
    }

    fn rvec(rng: &mut ChaCha8Rng, d: usize) -> CVector {
        CVector::from_fn(d, |_, _| {
            Scalar::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    fn rmat(rng: &mut ChaCha8Rng, d: usize) -> CMatrix {
        CMatrix::from_fn(d, d, |_, _| {
            Scalar::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    fn rb(cd: &Coideal, rng: &mut ChaCha8Rng, max_l: u32) -> CoeffElement {
        let mut b = CoeffElement::zero();
        for l in 0..=max_l {
            let s = Spin::integer(l);
            b.add_block(s, rmat(rng, s.dim()));
        }
        cd.e_b(&b).unwrap()
    }

    #[test]
    fn spin_one_spectrum() {
        let cd = coideal(0.5, 1.0);
        let b = cd.block(Spin::ONE).unwrap();
        let mut want = vec![5.25, 1.0, -1.0];
        want.sort_by(f64::total_cmp);
        for (x, y) in b.numeric_spectrum.iter().zip(&want) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!(b.spectrum_residual() < 1e-12);
        assert!(b.eigenvector_residual() < 1e-12);
    }

    #[test]
    fn i_bt_matches_generators() {
        let cd = coideal(0.3, 1.7);
        let q: f64 = 0.3;
        for n in 0..=8 {
            let s = Spin::from_twice(n);
            let r = cd.uqsu2().rep(s);
            let t = q.powf(1.7) - q.powf(-1.7);
            let direct = (&r.e - &r.f * &r.k) * (Complex64::i() * q.powf(-0.5)) + &r.k * c(t / (q - 1.0 / q));
            let b = cd.block(s).unwrap();
            let scale = direct.camax();
            assert!(max_abs_diff(&b.i_bt, &direct).unwrap() < 1e-13 * scale, "n={n}");
            assert!(max_abs_diff(&b.i_bt, &b.i_bt.adjoint()).unwrap() < 1e-13 * scale);
        }
    }

    #[test]
    fn phi_c_rank_and_parity() {
        let cd = coideal(0.5, 1.0);
        assert_eq!(cd.phi_c(Spin::HALF).unwrap().camax(), 0.0);
        assert_eq!(cd.phi_c(Spin::from_twice(3)).unwrap().camax(), 0.0);
        for l in 0..=3 {
            let p = cd.phi_c(Spin::integer(l)).unwrap();
            assert!(max_abs_diff(&(&p * &p), &p).unwrap() < 1e-13);
            assert!(max_abs_diff(&p.adjoint(), &p).unwrap() < 1e-15);
            assert!((p.trace() - c(1.0)).norm() < 1e-13);
        }
        assert!(approx_eq(cd.phi_c(Spin::ZERO).unwrap()[(0, 0)], c(1.0), 1e-15));
    }

    #[test]
    fn phi_c_vector_matches_closed_form() {
        // (q^{-1/2}, (q+q^{-1})^{-1/2} i t, q^{1/2}) spans the fixed line in spin 1
        let cd = coideal(0.5, 1.0);
        let q: f64 = 0.5;
        let t = cd.ctx().t();
        let xi = CVector::from_vec(vec![
            c(q.powf(-0.5)),
            Complex64::i() * (t / (q + 1.0 / q).sqrt()),
            c(q.sqrt()),
        ]);
        let p = cd.phi_c(Spin::ONE).unwrap();
        assert!((&p * &xi - &xi).camax() < 1e-13);
    }

    #[test]
    fn eigvec_plus_closed_form() {
        let cd = coideal(0.5, 1.0);
        let v0 = cd.eigvec_plus(0);
        assert_eq!(v0.len(), 1);
        assert!(approx_eq(v0[0], c(1.0), 1e-15));
        let v1 = cd.eigvec_plus(1);
        assert!((v1.norm_squared() - 5.0).abs() < 1e-12);
        assert!((cd.eigvec_plus_norm_sq(1) - 5.0).abs() < 1e-12);
        let k = cd.uqsu2().rep(Spin::HALF).k.clone();
        let mu = v1.dotc(&(&k * &v1)).re / v1.norm_squared();
        assert!((mu - 1.7).abs() < 1e-12);
        for n in 0..=6u32 {
            let v = cd.eigvec_plus(n);
            let b = cd.block(Spin::from_twice(n)).unwrap();
            let lam = cd.shifted_q_int(n as i64);
            let res = (&b.i_bt * &v - &v * c(lam)).camax() / v.camax();
            assert!(res < 1e-12, "n={n} res={res}");
            let rel = (v.norm_squared() - cd.eigvec_plus_norm_sq(n)).abs() / v.norm_squared();
            assert!(rel < 1e-12);
        }
    }

    #[test]
    fn spectrum_across_grid() {
        for q in [0.3, 0.5, 0.8] {
            for a in [0.5, 1.0, 1.7] {
                let cd = coideal(q, a);
                for n in 0..=8 {
                    let b = cd.block(Spin::from_twice(n)).unwrap();
                    assert!(b.spectrum_residual() < 1e-9, "q={q} a={a} n={n}");
                    for e in &b.eigen {
                        let want = crate::qnum::q_int(q, a + e.m as f64);
                        assert!((e.eigenvalue - want).abs() <= 1e-12 * want.abs().max(1.0));
                    }
                }
            }
        }
    }

    #[test]
    fn co_gelfand_normalisation() {
        for q in [0.3, 0.5, 0.8] {
            let cd = coideal(q, 1.7);
            for l in 0..=6 {
                let s = Spin::integer(l);
                let b = cd.block(s).unwrap();
                let v = b.phi_c_vector().unwrap();
                let k = cd.uqsu2().rep(s).k.clone();
                assert!((v.dotc(&(&k * v)).re - 1.0).abs() < 1e-9, "q={q} l={l}");
                let dbh = cd.delta_b_half(s).unwrap();
                assert!(max_abs_diff(&dbh, &b.phi_c).unwrap() < 1e-9);
            }
        }
    }

    #[test]
    fn antipode_identities() {
        let cd = coideal(0.5, 1.0);
        for l in 0..=6 {
            assert!(cd.antipode_identity_residual(Spin::from_twice(l)).unwrap() < 1e-12);
        }
    }

    #[test]
    fn delta_phi_c_identities() {
        let cd = coideal(0.5, 1.0);
        for n1 in 0..=4 {
            for n2 in 0..=4 {
                let (s1, s2) = (Spin::from_twice(n1), Spin::from_twice(n2));
                let r = cd.delta_identity_residual(s1, s2).unwrap();
                assert!(r < 1e-10, "{s1} {s2}: {r}");
            }
        }
        let one = cd.delta_phi_c(Spin::ZERO, Spin::ZERO).unwrap();
        assert!(approx_eq(one[(0, 0)], c(1.0), 1e-12));
    }

    #[test]
    fn right_action_matches_pairing() {
        // τ(c, x ◁ a) = τ(ac, x) for c running over unit coefficients
        let cd = coideal(0.5, 1.0);
        let ca = cd.coeff_algebra();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = StabElement::from_coeffs([(0, c(1.0)), (1, Scalar::new(0.3, -0.2)), (-2, c(0.7))]);
        for n1 in 0..=3u32 {
            let s1 = Spin::from_twice(n1);
            let a = CoeffElement::from_block(s1, rmat(&mut rng, s1.dim()));
            let y = cd.act_rmod(&x, &a).unwrap();
            for n2 in 0..=5u32 {
                let s2 = Spin::from_twice(n2);
                let yb = cd.stab_block(&y, s2).unwrap();
                for i in 0..s2.dim() {
                    for j in 0..s2.dim() {
                        let cc = CoeffElement::unit_coefficient(s2, i, j);
                        let lhs = ca.pair_block(&cc, s2, &yb);
                        let ac = ca.product(&a, &cc).unwrap();
                        let mut rhs = c(0.0);
                        for (g, _) in ac.blocks() {
                            rhs += ca.pair_block(&ac, g, &cd.stab_block(&x, g).unwrap());
                        }
                        assert!((lhs - rhs).norm() < 1e-10, "n1={n1} n2={n2}");
                    }
                }
            }
        }
    }

    #[test]
    fn right_action_examples() {
        let cd = coideal(0.5, 1.0);
        let x = StabElement::from_coeffs([(0, c(2.0)), (3, c(-1.0))]);
        let y = cd.act_rmod(&x, &CoeffElement::one()).unwrap();
        assert!(y.distance(&x) < 1e-14);
        assert!(
            cd.stab_from_coeff(&CoeffElement::one())
                .unwrap()
                .distance(&StabElement::projection(0))
                < 1e-14
        );
        // e_{[a]} ◁ b for b in B of spin 1 lives on m ∈ {-2, 0, 2}
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let b = cd.e_b(&CoeffElement::from_block(Spin::ONE, rmat(&mut rng, 3))).unwrap();
        let y = cd.stab_from_coeff(&b).unwrap().pruned(1e-12);
        assert!(y.iter().all(|(m, _)| [-2, 0, 2].contains(&m)));
        assert!(!y.is_empty());
        // a spin-1/2 coefficient shifts by odd amounts only
        let a = CoeffElement::from_block(Spin::HALF, rmat(&mut rng, 2));
        let y = cd.stab_from_coeff(&a).unwrap().pruned(1e-12);
        assert!(y.iter().all(|(m, _)| m.abs() == 1));
    }

    #[test]
    fn ideal_spans_projections() {
        // every e_{[a+m]}, |m| ≤ 2, lies in the span of Φ_C(a -) over spins ≤ 2
        let cd = coideal(0.5, 1.0);
        let mut rows = Vec::new();
        for n in 0..=4u32 {
            let s = Spin::from_twice(n);
            for i in 0..s.dim() {
                for j in 0..s.dim() {
                    let y = cd.stab_from_coeff(&CoeffElement::unit_coefficient(s, i, j)).unwrap();
                    rows.push((-2..=2).map(|m| y.coeff(m)).collect::<Vec<_>>());
                }
            }
        }
        let mat = CMatrix::from_fn(rows.len(), 5, |i, j| rows[i][j]);
        let sv = mat.singular_values();
        assert!(sv.iter().all(|s| *s > 1e-6), "{sv:?}");
    }

    #[test]
    fn conditional_expectations() {
        let cd = coideal(0.5, 1.0);
        let ca = cd.coeff_algebra();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(cd.e_b(&CoeffElement::one()).unwrap().distance(&CoeffElement::one()) < 1e-14);
        let half = CoeffElement::matrix_coefficient(Spin::HALF, &rvec(&mut rng, 2), &rvec(&mut rng, 2));
        assert!(cd.e_b(&half).unwrap().norm_max() < 1e-15);
        let mut a = CoeffElement::zero();
        for n in 0..=4 {
            let s = Spin::from_twice(n);
            a.add_block(s, rmat(&mut rng, s.dim()));
        }
        let b = rb(&cd, &mut rng, 2);
        // E_B is idempotent, lands in B and is right B-linear
        let eb = cd.e_b(&a).unwrap();
        assert!(cd.membership_residual(&eb).unwrap() < 1e-13);
        assert!(cd.e_b(&eb).unwrap().distance(&eb) < 1e-13);
        let lhs = cd.e_b(&ca.product(&a, &b).unwrap()).unwrap();
        let rhs = ca.product(&eb, &b).unwrap();
        assert!(lhs.distance(&rhs) < 1e-9);
        let fb = cd.f_b(&a).unwrap();
        assert!(fb.distance(&ca.star(&cd.e_b(&ca.star(&a)).unwrap())) < 1e-15);
    }

    #[test]
    fn b_is_a_star_subalgebra() {
        let cd = coideal(0.5, 1.0);
        let ca = cd.coeff_algebra();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let b = rb(&cd, &mut rng, 2);
        let c2 = rb(&cd, &mut rng, 1);
        assert!(cd.membership_residual(&ca.product(&b, &c2).unwrap()).unwrap() < 1e-9);
        assert!(cd.membership_residual(&ca.star(&b)).unwrap() < 1e-9);
        let not_b = CoeffElement::unit_coefficient(Spin::ONE, 0, 0);
        assert!(matches!(
            cd.sigma_b(&not_b, Direction::Forward),
            Err(Error::NotInCoideal { .. })
        ));
    }

    #[test]
    fn modular_automorphism_of_b() {
        let cd = coideal(0.5, 1.0);
        let ca = cd.coeff_algebra();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let one = CoeffElement::one();
        assert!(cd.sigma_b(&one, Direction::Forward).unwrap().distance(&one) < 1e-14);
        for _ in 0..5 {
            let b = rb(&cd, &mut rng, 2);
            let cc = rb(&cd, &mut rng, 2);
            let sb = cd.sigma_b(&b, Direction::Forward).unwrap();
            assert!(cd.sigma_b(&sb, Direction::Inverse).unwrap().distance(&b) < 1e-9);
            let lhs = ca.haar(&ca.product(&b, &cc).unwrap());
            let rhs = ca.haar(&ca.product(&cc, &sb).unwrap());
            assert!((lhs - rhs).norm() < 1e-9);
        }
    }

    #[test]
    fn sigma_inverse_closed_form() {
        // σ_B^{-1}(π(ξ, η)) = π(Φ_C δ^{1/2} ξ, δ^{1/2} η) for Φ_C ξ = ξ
        let cd = coideal(0.5, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for l in 0..=3 {
            let s = Spin::integer(l);
            let (xi, eta) = (rvec(&mut rng, s.dim()), rvec(&mut rng, s.dim()));
            let p = cd.phi_c(s).unwrap();
            let k = cd.uqsu2().rep(s).k.clone();
            let b = CoeffElement::matrix_coefficient(s, &(&p * &xi), &eta);
            let want = CoeffElement::matrix_coefficient(s, &(&p * &k * &p * &xi), &(&k * &eta));
            let got = cd.sigma_b(&b, Direction::Inverse).unwrap();
            assert!(got.distance(&want) < 1e-11);
        }
    }

    #[test]
    fn characters_annihilate() {
        // σ_A^{-1} σ_B (π(Φ_C ξ, η)) = π(S^{-1}(Φ_C) ξ, η)
        let cd = coideal(0.5, 1.0);
        let ca = cd.coeff_algebra();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for l in 0..=3 {
            let s = Spin::integer(l);
            let (xi, eta) = (rvec(&mut rng, s.dim()), rvec(&mut rng, s.dim()));
            let p = cd.phi_c(s).unwrap();
            let b = CoeffElement::matrix_coefficient(s, &(&p * &xi), &eta);
            let lhs = ca.sigma_a(&cd.sigma_b(&b, Direction::Forward).unwrap(), Complex64::i());
            let sinv = cd.uqsu2().antipode(s, &p, Direction::Inverse);
            let want = CoeffElement::matrix_coefficient(s, &(&sinv * &xi), &eta);
            assert!(lhs.distance(&want) < 1e-11, "l={l}");
        }
    }

    #[test]
    fn theta_examples() {
        let cd = coideal(0.5, 1.0);
        let ca = cd.coeff_algebra();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let one = CoeffElement::one();
        assert!(cd.theta(&one).unwrap().distance(&one) < 1e-14);
        for _ in 0..4 {
            let b = rb(&cd, &mut rng, 2);
            let th = cd.theta(&b).unwrap();
            assert!(cd.membership_residual(&th).unwrap() < 1e-11);
            // θ(D) = k^{-1} D k Φ_C
            let closed = b.map_blocks(|s, d| {
                let r = cd.uqsu2().rep(s);
                &r.k_inv * d * &r.k * cd.phi_c(s).unwrap()
            });
            assert!(th.distance(&closed) < 1e-11);
            let s2 = ca.antipode(&ca.antipode(&b, Direction::Inverse), Direction::Inverse);
            let lhs = cd.phi_c_functional(&s2).unwrap();
            assert!((lhs - ca.counit(&th)).norm() < 1e-10);
            let c2 = rb(&cd, &mut rng, 1);
            let prod = cd.theta(&ca.product(&b, &c2).unwrap()).unwrap();
            let split = ca.product(&th, &cd.theta(&c2).unwrap()).unwrap();
            assert!(prod.distance(&split) < 1e-9);
        }
    }

    #[test]
    fn spherical_functions_commute() {
        let cd = coideal(0.5, 1.0);
        let ca = cd.coeff_algebra();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let zero = cd
            .spherical(Spin::ZERO, &rvec(&mut rng, 1), &rvec(&mut rng, 1))
            .unwrap();
        assert_eq!(zero.spins().collect::<Vec<_>>(), vec![Spin::ZERO]);
        for _ in 0..5 {
            let s = Spin::ONE;
            let x = cd.spherical(s, &rvec(&mut rng, 3), &rvec(&mut rng, 3)).unwrap();
            let y = cd
                .spherical(Spin::integer(2), &rvec(&mut rng, 5), &rvec(&mut rng, 5))
                .unwrap();
            let xy = ca.product(&x, &y).unwrap();
            let yx = ca.product(&y, &x).unwrap();
            assert!(xy.distance(&yx) < 1e-9);
            // the star of a spherical function is spherical: one block, rank one
            let st = ca.star(&x);
            let d = st.block(s).unwrap();
            let p = cd.phi_c(s).unwrap();
            let rp = cd.uqsu2().unitary_antipode(s, &p);
            assert!(max_abs_diff(d, &(&rp * d * &p)).unwrap() < 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn spectrum_is_shifted_q_integers(q in 0.2f64..0.9, a in 0.2f64..2.5, n in 0u32..9) {
            let cd = Coideal::new(QContext::new(q, a, 1e-9, Spin::ONE).unwrap()).unwrap();
            let b = cd.block(Spin::from_twice(n)).unwrap();
            let scale = b.i_bt.camax().max(1.0);
            prop_assert!(b.spectrum_residual() < 1e-12 * scale);
            prop_assert!(b.eigenvector_residual() < 1e-12 * scale);
        }

        #[test]
        fn stab_product_is_pointwise(x in proptest::collection::vec(-3.0f64..3.0, 5),
                                     y in proptest::collection::vec(-3.0f64..3.0, 5)) {
            let xs = StabElement::from_coeffs(x.iter().enumerate().map(|(i, v)| (i as i64 - 2, c(*v))));
            let ys = StabElement::from_coeffs(y.iter().enumerate().map(|(i, v)| (i as i64 - 2, c(*v))));
            let p = xs.product(&ys);
            for m in -2..=2 {
                prop_assert!((p.coeff(m) - xs.coeff(m) * ys.coeff(m)).norm() < 1e-14);
            }
            prop_assert!(xs.product(&ys).distance(&ys.product(&xs)) == 0.0);
        }
    }
}
