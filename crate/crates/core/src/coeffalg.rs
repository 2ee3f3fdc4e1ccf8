//! The CQG Hopf *-algebra `A = O_q(SU(2))` as finite sums of matrix
//! coefficients.
//!
//! An element is stored as one square matrix `D_ℓ` per spin, normalised so
//! that the pairing with `x ∈ 𝒰` reads `τ(a, x) = Σ_ℓ Tr(D_ℓ π_ℓ(x))`. The
//! matrix coefficient `π_ℓ(ξ, η)` is the rank-one matrix `η ξ^†`, so the
//! "left leg" `ξ` sits on the right of `D` and the "right leg" `η` on the
//! left. Under this convention:
//!
//! * product: `D_γ = T_γ^† (D_1 ⊗ D_2) T_γ` over the Clebsch–Gordan summands,
//! * counit: `ε(a) = Σ Tr D_ℓ`, Haar state: the spin-0 entry,
//! * `E_B` multiplies by `Φ_C` on the right, `x ⊳ a` multiplies by `π(x)`
//!   on the left.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::Result;
use crate::qnum::{c, max_abs_diff, CMatrix, CVector, Scalar};
use crate::uqsu2::{Direction, Spin, Uqsu2};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CoeffElement {
    blocks: BTreeMap<Spin, CMatrix>,
}

impl CoeffElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_block(Spin::ZERO, CMatrix::identity(1, 1))
    }

    pub fn from_block(spin: Spin, d: CMatrix) -> Self {
        assert_eq!(d.shape(), (spin.dim(), spin.dim()), "block size for spin {spin}");
        let mut blocks = BTreeMap::new();
        blocks.insert(spin, d);
        Self { blocks }
    }

    /// `π_ℓ(ξ, η)`, pairing with `x` as `⟨ξ, π_ℓ(x) η⟩`.
    pub fn matrix_coefficient(spin: Spin, xi: &CVector, eta: &CVector) -> Self {
        Self::from_block(spin, eta * xi.adjoint())
    }

    /// `π_ℓ(e_i, e_j)`.
    pub fn unit_coefficient(spin: Spin, i: usize, j: usize) -> Self {
        let mut d = CMatrix::zeros(spin.dim(), spin.dim());
        d[(j, i)] = c(1.0);
        Self::from_block(spin, d)
    }

    /// Builds from the coefficient matrix `C` of `Σ_ij C_ij π_ℓ(e_i, e_j)`;
    /// the stored block is `D = C^T`.
    pub fn from_coefficients(spin: Spin, coeffs: CMatrix) -> Self {
        Self::from_block(spin, coeffs.transpose())
    }

    /// `C_ij` with `a = Σ_ij C_ij π_ℓ(e_i, e_j)` on one block.
    pub fn coefficients(&self, spin: Spin) -> Option<CMatrix> {
        self.blocks.get(&spin).map(|d| d.transpose())
    }

    /// The entries `α, β, γ, δ` of the fundamental corepresentation
    /// `U = (α β; γ δ)`, i.e. `π_{1/2}(e_i, e_j)`.
    pub fn generators() -> [Self; 4] {
        [
            Self::unit_coefficient(Spin::HALF, 0, 0),
            Self::unit_coefficient(Spin::HALF, 0, 1),
            Self::unit_coefficient(Spin::HALF, 1, 0),
            Self::unit_coefficient(Spin::HALF, 1, 1),
        ]
    }

    pub fn block(&self, spin: Spin) -> Option<&CMatrix> {
        self.blocks.get(&spin)
    }

    pub fn blocks(&self) -> impl Iterator<Item = (Spin, &CMatrix)> {
        self.blocks.iter().map(|(s, d)| (*s, d))
    }

    pub fn spins(&self) -> impl Iterator<Item = Spin> + '_ {
        self.blocks.keys().copied()
    }

    /// Largest spin in the support, or `None` for the zero element.
    pub fn max_spin(&self) -> Option<Spin> {
        self.blocks.keys().next_back().copied()
    }

    pub fn add_block(&mut self, spin: Spin, d: CMatrix) {
        match self.blocks.get_mut(&spin) {
            Some(existing) => *existing += d,
            None => {
                self.blocks.insert(spin, d);
            }
        }
    }

    pub fn map_blocks(&self, mut f: impl FnMut(Spin, &CMatrix) -> CMatrix) -> Self {
        Self {
            blocks: self.blocks.iter().map(|(s, d)| (*s, f(*s, d))).collect(),
        }
    }

    /// Largest entrywise difference, treating missing blocks as zero.
    pub fn distance(&self, other: &Self) -> f64 {
        let mut worst: f64 = 0.0;
        for (s, d) in &self.blocks {
            worst = worst.max(match other.blocks.get(s) {
                Some(e) => max_abs_diff(d, e).unwrap_or(f64::INFINITY),
                None => d.camax(),
            });
        }
        for (s, e) in &other.blocks {
            if !self.blocks.contains_key(s) {
                worst = worst.max(e.camax());
            }
        }
        worst
    }

    pub fn norm_max(&self) -> f64 {
        self.blocks.values().map(|d| d.camax()).fold(0.0, f64::max)
    }

    /// Drops blocks whose entries are all below `tol`.
    pub fn pruned(mut self, tol: f64) -> Self {
        self.blocks.retain(|_, d| d.camax() > tol);
        self
    }
}

impl Add for &CoeffElement {
    type Output = CoeffElement;
    fn add(self, rhs: &CoeffElement) -> CoeffElement {
        let mut out = self.clone();
        for (s, d) in &rhs.blocks {
            out.add_block(*s, d.clone());
        }
        out
    }
}

impl Add for CoeffElement {
    type Output = CoeffElement;
    fn add(self, rhs: CoeffElement) -> CoeffElement {
        &self + &rhs
    }
}

impl Neg for &CoeffElement {
    type Output = CoeffElement;
    fn neg(self) -> CoeffElement {
        self.map_blocks(|_, d| -d)
    }
}

impl Sub for &CoeffElement {
    type Output = CoeffElement;
    fn sub(self, rhs: &CoeffElement) -> CoeffElement {
        self + &(-rhs)
    }
}

impl Sub for CoeffElement {
    type Output = CoeffElement;
    fn sub(self, rhs: CoeffElement) -> CoeffElement {
        &self - &rhs
    }
}

impl Mul<Scalar> for &CoeffElement {
    type Output = CoeffElement;
    fn mul(self, rhs: Scalar) -> CoeffElement {
        self.map_blocks(|_, d| d * rhs)
    }
}

impl Mul<Scalar> for CoeffElement {
    type Output = CoeffElement;
    fn mul(self, rhs: Scalar) -> CoeffElement {
        &self * rhs
    }
}

type BlockFn = dyn Fn(Spin) -> CMatrix + Send + Sync;

/// An element of the dual `𝒰 = Π_ℓ End(V_ℓ)`, evaluated lazily per block.
#[derive(Clone)]
pub struct DualElement {
    block: Arc<BlockFn>,
}

impl fmt::Debug for DualElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DualElement")
            .field("spin_0", &self.block(Spin::ZERO))
            .finish_non_exhaustive()
    }
}

impl DualElement {
    pub fn from_fn(f: impl Fn(Spin) -> CMatrix + Send + Sync + 'static) -> Self {
        Self { block: Arc::new(f) }
    }

    /// Finitely supported element; blocks not listed are zero.
    pub fn from_blocks(blocks: BTreeMap<Spin, CMatrix>) -> Self {
        Self::from_fn(move |s| {
            blocks
                .get(&s)
                .cloned()
                .unwrap_or_else(|| CMatrix::zeros(s.dim(), s.dim()))
        })
    }

    pub fn identity() -> Self {
        Self::from_fn(|s| CMatrix::identity(s.dim(), s.dim()))
    }

    /// `k^w`, blockwise.
    pub fn k_power(q: f64, w: Complex64) -> Self {
        Self::from_fn(move |s| crate::uqsu2::k_power(s, q, w))
    }

    /// `δ_A^z = k^{2z}`.
    pub fn delta_a_power(q: f64, z: Complex64) -> Self {
        Self::k_power(q, z * 2.0)
    }

    pub fn block(&self, spin: Spin) -> CMatrix {
        (self.block)(spin)
    }

    /// `ε(x)`, the spin-0 component.
    pub fn counit(&self) -> Scalar {
        self.block(Spin::ZERO)[(0, 0)]
    }
}

/// `(D_1 ⊗ D_2) T` for a `(d_1 d_2) × r` matrix `T`, without forming the
/// Kronecker product.
pub(crate) fn kron_apply(d1: &CMatrix, d2: &CMatrix, t: &CMatrix) -> CMatrix {
    let (n1, n2) = (d1.nrows(), d2.nrows());
    let d2t = d2.transpose();
    let mut out = CMatrix::zeros(n1 * n2, t.ncols());
    for col in 0..t.ncols() {
        let tm = CMatrix::from_fn(n1, n2, |i, k| t[(i * n2 + k, col)]);
        let r = d1 * tm * &d2t;
        for i in 0..n1 {
            for k in 0..n2 {
                out[(i * n2 + k, col)] = r[(i, k)];
            }
        }
    }
    out
}

/// The Hopf *-algebra operations of `O_q(SU(2))`.
#[derive(Clone, Debug)]
pub struct CoeffAlgebra {
    alg: Arc<Uqsu2>,
}

impl CoeffAlgebra {
    pub fn new(alg: Arc<Uqsu2>) -> Self {
        Self { alg }
    }

    pub fn with_q(q: f64) -> Self {
        Self::new(Arc::new(Uqsu2::new(q)))
    }

    pub fn uqsu2(&self) -> &Arc<Uqsu2> {
        &self.alg
    }

    pub fn q(&self) -> f64 {
        self.alg.q()
    }

    pub fn pair(&self, a: &CoeffElement, x: &DualElement) -> Scalar {
        a.blocks().map(|(s, d)| (d * x.block(s)).trace()).sum()
    }

    /// Pairing with a single block of a dual element.
    pub fn pair_block(&self, a: &CoeffElement, spin: Spin, x: &CMatrix) -> Scalar {
        a.block(spin).map_or(c(0.0), |d| (d * x).trace())
    }

    pub fn product(&self, a: &CoeffElement, b: &CoeffElement) -> Result<CoeffElement> {
        let mut out = CoeffElement::zero();
        for (s1, d1) in a.blocks() {
            for (s2, d2) in b.blocks() {
                let cg = self.alg.cg(s1, s2)?;
                for comp in &cg.components {
                    let t = &comp.isometry;
                    let block = t.adjoint() * kron_apply(d1, d2, t);
                    out.add_block(comp.spin, block);
                }
            }
        }
        Ok(out)
    }

    /// `π(ξ,η)^* = π(δ^{-1/4} J ξ, δ^{1/4} J η)` blockwise, which in the
    /// density convention is `D ↦ u^T k^{-1/2} D̄ k^{1/2} u`.
    pub fn star(&self, a: &CoeffElement) -> CoeffElement {
        a.map_blocks(|s, d| {
            let u = crate::uqsu2::SelfDuality::new(s).u;
            let kl = self.alg.k_power(s, c(-0.5));
            let kr = self.alg.k_power(s, c(0.5));
            u.transpose() * kl * d.conjugate() * kr * u
        })
    }

    pub fn counit(&self, a: &CoeffElement) -> Scalar {
        a.blocks().map(|(_, d)| d.trace()).sum()
    }

    /// The Haar state: the spin-0 coefficient.
    pub fn haar(&self, a: &CoeffElement) -> Scalar {
        a.block(Spin::ZERO).map_or(c(0.0), |d| d[(0, 0)])
    }

    /// `(σ_A)_z(π(ξ,η)) = π(δ^{i z̄/2} ξ, δ^{-iz/2} η)`, i.e.
    /// `D ↦ k^{-iz} D k^{-iz}`. The modular automorphism is `z = -i`.
    pub fn sigma_a(&self, a: &CoeffElement, z: Complex64) -> CoeffElement {
        let w = -Complex64::i() * z;
        a.map_blocks(|s, d| {
            let kp = self.alg.k_power(s, w);
            &kp * d * &kp
        })
    }

    /// `(τ_A)_z(π(ξ,η)) = π(δ^{i z̄/2} ξ, δ^{iz/2} η)`, i.e.
    /// `D ↦ k^{iz} D k^{-iz}`; `S_A^2 = (τ_A)_{-i}`.
    pub fn tau_a(&self, a: &CoeffElement, z: Complex64) -> CoeffElement {
        let w = Complex64::i() * z;
        a.map_blocks(|s, d| self.alg.k_power(s, w) * d * self.alg.k_power(s, -w))
    }

    /// The antipode `S_A` (or its inverse), dual to `S` on `𝒰`:
    /// `τ(S_A(a), x) = τ(a, S(x))`.
    pub fn antipode(&self, a: &CoeffElement, direction: Direction) -> CoeffElement {
        let h = match direction {
            Direction::Forward => 0.5,
            Direction::Inverse => -0.5,
        };
        a.map_blocks(|s, d| {
            let u = crate::uqsu2::SelfDuality::new(s).u;
            u.transpose() * self.alg.k_power(s, c(-h)) * d.transpose() * self.alg.k_power(s, c(h)) * u
        })
    }

    /// `Δ(a) = Σ a_(1) ⊗ a_(2)` as the explicit list of simple tensors
    /// `(E_ij D) ⊗ E_ji` per block. If `a ∈ B` then every left leg is in `B`.
    pub fn coproduct(&self, a: &CoeffElement) -> Vec<(CoeffElement, CoeffElement)> {
        let mut out = Vec::new();
        for (s, d) in a.blocks() {
            let dim = s.dim();
            for i in 0..dim {
                for j in 0..dim {
                    let row = d.row(j);
                    if row.camax() == 0.0 {
                        continue;
                    }
                    let mut left = CMatrix::zeros(dim, dim);
                    left.set_row(i, &row);
                    let mut right = CMatrix::zeros(dim, dim);
                    right[(j, i)] = c(1.0);
                    out.push((CoeffElement::from_block(s, left), CoeffElement::from_block(s, right)));
                }
            }
        }
        out
    }

    /// `x ⊳ a = (id ⊗ τ(-, x)) Δ(a)`, i.e. `D ↦ π(x) D`.
    pub fn left_act(&self, x: &DualElement, a: &CoeffElement) -> CoeffElement {
        a.map_blocks(|s, d| x.block(s) * d)
    }

    /// Residual of both Peter–Weyl relations for `a = π_{s1}(ξ1, η1)` and
    /// `b = π_{s2}(ξ2, η2)`:
    ///
    /// ```text
    /// Φ_A(a b^*) = δ ⟨ξ1, ξ2⟩ ⟨η2, δ_A^{-1/2} η1⟩ / dim_q
    /// Φ_A(b^* a) = δ ⟨ξ1, δ_A^{1/2} ξ2⟩ ⟨η2, η1⟩ / dim_q
    /// ```
    pub fn peter_weyl_residual(
        &self,
        (s1, xi1, eta1): (Spin, &CVector, &CVector),
        (s2, xi2, eta2): (Spin, &CVector, &CVector),
    ) -> Result<f64> {
        let a = CoeffElement::matrix_coefficient(s1, xi1, eta1);
        let b = CoeffElement::matrix_coefficient(s2, xi2, eta2);
        let bs = self.star(&b);
        let lhs1 = self.haar(&self.product(&a, &bs)?);
        let lhs2 = self.haar(&self.product(&bs, &a)?);
        let (rhs1, rhs2) = if s1 == s2 {
            let dim_q = c(self.alg.qdim(s1));
            let k = self.alg.k_power(s1, c(1.0));
            let kinv = self.alg.k_power(s1, c(-1.0));
            (
                xi1.dotc(xi2) * eta2.dotc(&(kinv * eta1)) / dim_q,
                xi1.dotc(&(k * xi2)) * eta2.dotc(eta1) / dim_q,
            )
        } else {
            (c(0.0), c(0.0))
        };
        Ok((lhs1 - rhs1).norm().max((lhs2 - rhs2).norm()))
    }

    /// Gram matrix `⟨a_i, a_j⟩ = Φ_A(a_i^* a_j)`.
    pub fn gram(&self, basis: &[CoeffElement]) -> Result<CMatrix> {
        let stars: Vec<_> = basis.iter().map(|b| self.star(b)).collect();
        let n = basis.len();
        let mut g = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                g[(i, j)] = self.haar(&self.product(&stars[i], &basis[j])?);
            }
        }
        Ok(g)
    }
}
