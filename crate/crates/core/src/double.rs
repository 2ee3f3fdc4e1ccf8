//! The Drinfeld double coideal `D(B, I)`, a model of `U_q(sl(2,R)_t)`.
//!
//! Elements are kept in `I·B` normal form `Σ_m e_m b_m`, where `e_m` is the
//! spectral projection `e_{[a+m]}` of the stabilizer and `b_m ∈ B`. The two
//! factors commute past each other by
//!
//! ```text
//! y b = b_(1) (y ◁ b_(2)),        b y = (y ◁ S^{-1}(b_(2))) b_(1).
//! ```
//!
//! With `Δ(b) = Σ_ij (E_ij D) ⊗ E_ji` on a block `D`, the second rule sends
//! `b e_m` to `Σ_{m'} e_{m'} (R D)` for a matrix `R = R(ℓ, m, m')` assembled
//! from the right-action kernels of [`Coideal`].
//!
//! `φ_D(y b) = ψ(y) Φ_A(b)` is positive, `g`-invariant and, for `g = k^{-1}`,
//! a trace. [`RegularRep`] realises the regular representation on truncated
//! `L²(B) ⊗ L²(I)`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use rayon::prelude::*;

use crate::coeffalg::{CoeffAlgebra, CoeffElement, DualElement};
use crate::coideal::{Coideal, StabElement};
use crate::error::{Error, Result};
use crate::qnum::{c, CMatrix, CVector, Scalar};
use crate::relint::{GCharacter, InvariantIntegral};
use crate::report::{Check, Worst};
use crate::uqsu2::{Direction, Spin};

/// `Σ_m e_m b_m` with `b_m ∈ B`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DoubleElement {
    terms: BTreeMap<i64, CoeffElement>,
}

impl DoubleElement {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `x · b`.
    pub fn from_parts(x: &StabElement, b: &CoeffElement) -> Self {
        let mut out = Self::zero();
        for (m, v) in x.iter() {
            out.add_term(m, &(b * v));
        }
        out
    }

    /// `Σ_k x_k · b_k`.
    pub fn from_terms<'a>(terms: impl IntoIterator<Item = (&'a StabElement, &'a CoeffElement)>) -> Self {
        let mut out = Self::zero();
        for (x, b) in terms {
            out = &out + &Self::from_parts(x, b);
        }
        out
    }

    /// `x · 1`.
    pub fn from_stab(x: &StabElement) -> Self {
        Self::from_parts(x, &CoeffElement::one())
    }

    /// `b` itself, with the unit of `I` replaced by `Σ_{|m| ≤ truncation} e_m`.
    pub fn from_b(b: &CoeffElement, truncation: i64) -> Self {
        Self::from_parts(&StabElement::truncated_unit(truncation), b)
    }

    /// The truncated unit `Σ_{|m| ≤ truncation} e_m`.
    pub fn truncated_unit(truncation: i64) -> Self {
        Self::from_stab(&StabElement::truncated_unit(truncation))
    }

    pub fn add_term(&mut self, m: i64, b: &CoeffElement) {
        let entry = self.terms.entry(m).or_insert_with(CoeffElement::zero);
        *entry = &*entry + b;
    }

    pub fn term(&self, m: i64) -> Option<&CoeffElement> {
        self.terms.get(&m)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &CoeffElement)> {
        self.terms.iter().map(|(m, b)| (*m, b))
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest `|m|` carrying a term.
    pub fn i_radius(&self) -> Option<i64> {
        self.terms.keys().map(|m| m.abs()).max()
    }

    /// Largest spin in any `b_m`.
    pub fn b_spin(&self) -> Option<Spin> {
        self.terms.values().filter_map(|b| b.max_spin()).max()
    }

    /// Largest coefficient difference over the normal form. The normal form
    /// is canonical since `I ⊗ B → D(B, I)` is a linear isomorphism.
    pub fn distance(&self, other: &Self) -> f64 {
        let empty = CoeffElement::zero();
        self.terms
            .keys()
            .chain(other.terms.keys())
            .map(|m| {
                let x = self.terms.get(m).unwrap_or(&empty);
                let y = other.terms.get(m).unwrap_or(&empty);
                x.distance(y)
            })
            .fold(0.0, f64::max)
    }

    pub fn norm_max(&self) -> f64 {
        self.terms.values().map(|b| b.norm_max()).fold(0.0, f64::max)
    }

    pub fn pruned(self, tol: f64) -> Self {
        let terms = self
            .terms
            .into_iter()
            .map(|(m, b)| (m, b.pruned(tol)))
            .filter(|(_, b)| b.blocks().next().is_some())
            .collect();
        Self { terms }
    }

    pub fn scale(&self, s: Scalar) -> Self {
        Self {
            terms: self.terms.iter().map(|(m, b)| (*m, b * s)).collect(),
        }
    }
}

impl std::ops::Add for &DoubleElement {
    type Output = DoubleElement;
    fn add(self, rhs: &DoubleElement) -> DoubleElement {
        let mut out = self.clone();
        for (m, b) in rhs.terms() {
            out.add_term(m, b);
        }
        out
    }
}

impl std::ops::Sub for &DoubleElement {
    type Output = DoubleElement;
    fn sub(self, rhs: &DoubleElement) -> DoubleElement {
        self + &rhs.scale(c(-1.0))
    }
}

type ReorderKey = (Spin, i64, i64);

/// Arithmetic in `D(B, I)` together with `φ_D` for a balanced `g`.
pub struct DoubleAlgebra {
    cd: Arc<Coideal>,
    integral: InvariantIntegral,
    reorder: RwLock<HashMap<ReorderKey, Arc<CMatrix>>>,
}

impl DoubleAlgebra {
    /// `integral` must be the `g`-invariant integral of `cd`.
    pub fn new(cd: Arc<Coideal>, integral: InvariantIntegral) -> Self {
        Self {
            cd,
            integral,
            reorder: RwLock::new(HashMap::new()),
        }
    }

    /// The Podleś double with `g = k^{-1}` and weights up to `truncation`.
    pub fn podles(cd: Arc<Coideal>, truncation: i64) -> Result<Self> {
        let integral = crate::relint::compute_weights(&GCharacter::podles(), &cd, truncation)?;
        Ok(Self::new(cd, integral))
    }

    pub fn coideal(&self) -> &Arc<Coideal> {
        &self.cd
    }

    pub fn integral(&self) -> &InvariantIntegral {
        &self.integral
    }

    pub fn g(&self) -> GCharacter {
        self.integral.g
    }

    fn ca(&self) -> &CoeffAlgebra {
        self.cd.coeff_algebra()
    }

    /// Rejects elements whose `b_m` leave `B`.
    pub fn ensure_valid(&self, d: &DoubleElement) -> Result<()> {
        d.terms().try_for_each(|(_, b)| self.cd.ensure_in_b(b))
    }

    /// `R(ℓ, m, m')_ij = (e_m ◁ S^{-1}(E_ji))_{m'}`.
    pub fn reorder_matrix(&self, spin: Spin, m: i64, m2: i64) -> Result<Arc<CMatrix>> {
        let key = (spin, m, m2);
        if let Some(r) = self.reorder.read().unwrap().get(&key) {
            return Ok(r.clone());
        }
        let z = self.cd.action_kernel(spin, m, m2)?;
        let dim = spin.dim();
        let mut r = CMatrix::zeros(dim, dim);
        if z.camax() > 0.0 {
            for i in 0..dim {
                for j in 0..dim {
                    let s_inv = self
                        .ca()
                        .antipode(&CoeffElement::unit_coefficient(spin, i, j), Direction::Inverse);
                    r[(i, j)] = self.ca().pair_block(&s_inv, spin, &z);
                }
            }
        }
        let r = Arc::new(r);
        self.reorder.write().unwrap().insert(key, r.clone());
        Ok(r)
    }

    /// `b e_m` rewritten as `Σ_{m'} e_{m'} b'_{m'}`.
    pub fn b_times_projection(&self, b: &CoeffElement, m: i64) -> Result<DoubleElement> {
        let mut out = DoubleElement::zero();
        for (spin, d) in b.blocks() {
            let n = spin.twice() as i64;
            for m2 in (m - n..=m + n).step_by(2) {
                let r = self.reorder_matrix(spin, m, m2)?;
                if r.camax() > 0.0 {
                    out.add_term(m2, &CoeffElement::from_block(spin, r.as_ref() * d));
                }
            }
        }
        Ok(out)
    }

    /// `(Σ e_m b_m)(Σ e_{m'} c_{m'}) = Σ e_m (b_m e_{m'})_m c_{m'}`: only
    /// the `e_m` component survives the left projection.
    pub fn dmul(&self, d1: &DoubleElement, d2: &DoubleElement) -> Result<DoubleElement> {
        let mut out = DoubleElement::zero();
        for (m, b) in d1.terms() {
            for (m2, cc) in d2.terms() {
                let moved = self.b_times_projection(b, m2)?;
                if let Some(bb) = moved.term(m) {
                    out.add_term(m, &self.ca().product(bb, cc)?);
                }
            }
        }
        Ok(out)
    }

    /// `(e_m b)^* = b^* e_m`, reordered.
    pub fn dstar(&self, d: &DoubleElement) -> Result<DoubleElement> {
        let mut out = DoubleElement::zero();
        for (m, b) in d.terms() {
            out = &out + &self.b_times_projection(&self.ca().star(b), m)?;
        }
        Ok(out)
    }

    /// `φ_D(Σ e_m b_m) = Σ_m μ_m Φ_A(b_m)`.
    pub fn phi_d(&self, d: &DoubleElement) -> Result<Scalar> {
        d.terms()
            .map(|(m, b)| Ok(self.ca().haar(b) * self.integral.weight(m)?))
            .sum()
    }

    /// `σ_D(y b) = κ(y) σ_B(g^{-1} ⊳ b)`. `I` is commutative with
    /// one-dimensional blocks, so `κ` is the identity.
    pub fn sigma_d(&self, d: &DoubleElement) -> Result<DoubleElement> {
        let ginv = DualElement::k_power(self.ca().q(), c(-self.g().s));
        let mut out = DoubleElement::zero();
        for (m, b) in d.terms() {
            let twisted = self.ca().left_act(&ginv, b);
            out.add_term(m, &self.cd.sigma_b(&twisted, Direction::Forward)?);
        }
        Ok(out)
    }

    /// `x ⊳ (y b) ◁ a = (y ◁ a)(x ⊳ b)`.
    pub fn bimodule_act(&self, x: &DualElement, d: &DoubleElement, a: &CoeffElement) -> Result<DoubleElement> {
        let mut out = DoubleElement::zero();
        for (m, b) in d.terms() {
            let xb = self.ca().left_act(x, b);
            let shifted = self.cd.act_rmod(&StabElement::projection(m), a)?;
            for (m2, v) in shifted.iter() {
                out.add_term(m2, &(&xb * v));
            }
        }
        Ok(out)
    }

    /// Rewrites `d` in `B·I` form: `Σ_k (b_k, x_k)` meaning `Σ_k b_k x_k`.
    pub fn to_bi_form(&self, d: &DoubleElement) -> Result<Vec<(CoeffElement, StabElement)>> {
        let mut out = Vec::new();
        for (m, b) in d.terms() {
            for (b1, b2) in self.ca().coproduct(b) {
                let y = self.cd.act_rmod(&StabElement::projection(m), &b2)?;
                if !y.is_empty() {
                    out.push((b1, y));
                }
            }
        }
        Ok(out)
    }
}

/// `{π_ℓ(v_ℓ, e_j)}` for integer `ℓ ≤ cutoff`, with its Gram matrix under
/// `⟨b, c⟩ = Φ_A(b^* c)`.
#[derive(Clone, Debug)]
pub struct GnsBasisB {
    pub cutoff: u32,
    pub labels: Vec<(Spin, usize)>,
    pub elements: Vec<CoeffElement>,
    pub vectors: BTreeMap<Spin, CVector>,
    pub gram: CMatrix,
}

impl GnsBasisB {
    pub fn new(cd: &Coideal, cutoff: u32) -> Result<Self> {
        let mut labels = Vec::new();
        let mut elements = Vec::new();
        let mut vectors = BTreeMap::new();
        for l in 0..=cutoff {
            let s = Spin::integer(l);
            let v = cd.block(s)?.phi_c_vector().expect("integer spin").clone();
            for j in 0..s.dim() {
                let mut e = CVector::zeros(s.dim());
                e[j] = c(1.0);
                labels.push((s, j));
                elements.push(CoeffElement::matrix_coefficient(s, &v, &e));
            }
            vectors.insert(s, v);
        }
        let gram = cd.coeff_algebra().gram(&elements)?;
        Ok(Self {
            cutoff,
            labels,
            elements,
            vectors,
            gram,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index(&self, spin: Spin, j: usize) -> Option<usize> {
        if !spin.is_integer() || spin.twice() / 2 > self.cutoff {
            return None;
        }
        let l = spin.twice() / 2;
        Some((l * l) as usize + j)
    }

    /// Coordinates of `b ∈ B`: block `D = (D v) v^†` contributes `D v`.
    /// Blocks beyond the cutoff are reported in the second component.
    pub fn coordinates(&self, b: &CoeffElement) -> (CVector, f64) {
        let mut out = CVector::zeros(self.len());
        let mut dropped: f64 = 0.0;
        for (s, d) in b.blocks() {
            match (self.vectors.get(&s), self.index(s, 0)) {
                (Some(v), Some(base)) => {
                    let col = d * v;
                    for (i, z) in col.iter().enumerate() {
                        out[base + i] += z;
                    }
                }
                _ => dropped = dropped.max(d.camax()),
            }
        }
        (out, dropped)
    }
}

/// `{e_m : |m| ≤ truncation}` with Gram matrix `diag(μ_m)`.
#[derive(Clone, Debug)]
pub struct GnsBasisI {
    pub truncation: i64,
    pub weights: Vec<f64>,
}

impl GnsBasisI {
    pub fn new(integral: &InvariantIntegral, truncation: i64) -> Result<Self> {
        let weights = (-truncation..=truncation)
            .map(|m| integral.weight(m))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { truncation, weights })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn index(&self, m: i64) -> Option<usize> {
        (m.abs() <= self.truncation).then_some((m + self.truncation) as usize)
    }

    pub fn gram(&self) -> CMatrix {
        CMatrix::from_diagonal(&CVector::from_iterator(self.len(), self.weights.iter().map(|w| c(*w))))
    }
}

/// The regular representation on `L²(B)_{≤ cutoff} ⊗ L²(I)_{|m| ≤ M}`:
///
/// ```text
/// π(c)(Λ_B(b) ⊗ Λ_I(x)) = Λ_B(cb) ⊗ Λ_I(x)
/// π(y)(Λ_B(b) ⊗ Λ_I(x)) = Λ_B(b_(1)) ⊗ Λ_I((y ◁ b_(2)) x)
/// ```
///
/// On `|ℓ, j, m'⟩ = Λ_B(π_ℓ(v_ℓ, e_j)) ⊗ Λ_I(e_{m'})` the projection `e_m`
/// acts as `Σ_i Z_ij |ℓ, i, m'⟩` with `Z = Z(ℓ, m, m')` the right-action
/// kernel.
pub struct RegularRep<'a> {
    da: &'a DoubleAlgebra,
    pub b: GnsBasisB,
    pub i: GnsBasisI,
}

impl<'a> RegularRep<'a> {
    pub fn new(da: &'a DoubleAlgebra, cutoff: u32, truncation: i64) -> Result<Self> {
        let b = GnsBasisB::new(&da.cd, cutoff)?;
        let i = GnsBasisI::new(&da.integral, truncation)?;
        Ok(Self { da, b, i })
    }

    pub fn dim(&self) -> usize {
        self.b.len() * self.i.len()
    }

    fn idx(&self, bidx: usize, m: i64) -> usize {
        bidx * self.i.len() + (m + self.i.truncation) as usize
    }

    /// `G_B ⊗ G_I`.
    pub fn gram(&self) -> CMatrix {
        self.b.gram.kronecker(&self.i.gram())
    }

    /// `⟨u, v⟩ = u^† G v`.
    pub fn inner(&self, u: &CVector, v: &CVector) -> Scalar {
        u.dotc(&(self.gram() * v))
    }

    /// Basis vectors with `B`-spin `≤ cutoff - s` and `|m| ≤ M - 2s`, on which
    /// operators built from elements of `B`-spin `≤ s` are exact.
    pub fn interior(&self, s: u32) -> Vec<usize> {
        let (b, reach) = self.interior_parts(s);
        let mut out = Vec::new();
        for bidx in b {
            for m in -reach..=reach {
                out.push(self.idx(bidx, m));
            }
        }
        out
    }

    /// Left multiplication by `c ∈ B` on `L²(B)`.
    pub fn left_mult_b(&self, cc: &CoeffElement) -> Result<CMatrix> {
        let ca = self.da.ca();
        let cols = self
            .b
            .elements
            .par_iter()
            .map(|e| Ok(self.b.coordinates(&ca.product(cc, e)?).0))
            .collect::<Result<Vec<_>>>()?;
        Ok(CMatrix::from_columns(&cols))
    }

    /// `π(e_m)` on each fiber.
    fn projection_fibers(&self, m: i64, then: &CMatrix) -> Result<Vec<CMatrix>> {
        let cd = &self.da.cd;
        let nb = self.b.len();
        let mut fibers = Vec::with_capacity(self.i.len());
        for m2 in -self.i.truncation..=self.i.truncation {
            let mut out = CMatrix::zeros(nb, nb);
            for l in 0..=self.b.cutoff {
                let s = Spin::integer(l);
                let z = cd.action_kernel(s, m, m2)?;
                if z.camax() == 0.0 {
                    continue;
                }
                let base = self.b.index(s, 0).expect("within cutoff");
                let rows = z.as_ref() * then.rows(base, s.dim());
                out.rows_mut(base, s.dim()).copy_from(&rows);
            }
            fibers.push(out);
        }
        Ok(fibers)
    }

    /// `π_reg(d)` restricted to the fibers `L²(B) ⊗ e_{m'}`, in order
    /// `m' = -M..=M`. The representation never changes `m'`, so these blocks
    /// determine [`RegularRep::matrix`]. Elements with `B`-spin beyond the
    /// cutoff are rejected.
    pub fn fibers(&self, d: &DoubleElement) -> Result<Vec<CMatrix>> {
        if let Some(s) = d.b_spin() {
            if !s.is_integer() || s.twice() / 2 > self.b.cutoff {
                return Err(Error::Margin {
                    required: format!("{}", s.value().ceil()),
                    cutoff: self.b.cutoff.to_string(),
                });
            }
        }
        let nb = self.b.len();
        let mut out = vec![CMatrix::zeros(nb, nb); self.i.len()];
        for (m, b) in d.terms() {
            let lb = self.left_mult_b(b)?;
            for (acc, f) in out.iter_mut().zip(self.projection_fibers(m, &lb)?) {
                *acc += f;
            }
        }
        Ok(out)
    }

    /// `π(e_m)` as a full matrix.
    pub fn projection_action(&self, m: i64) -> Result<CMatrix> {
        let eye = CMatrix::identity(self.b.len(), self.b.len());
        Ok(self.assemble(&self.projection_fibers(m, &eye)?))
    }

    fn assemble(&self, fibers: &[CMatrix]) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim(), self.dim());
        for (k, f) in fibers.iter().enumerate() {
            let m2 = k as i64 - self.i.truncation;
            for r in 0..f.nrows() {
                for col in 0..f.ncols() {
                    out[(self.idx(r, m2), self.idx(col, m2))] = f[(r, col)];
                }
            }
        }
        out
    }

    /// `π_reg(d)` on `L²(B)_{≤ cutoff} ⊗ L²(I)_{|m| ≤ M}`.
    pub fn matrix(&self, d: &DoubleElement) -> Result<CMatrix> {
        Ok(self.assemble(&self.fibers(d)?))
    }

    /// `π_reg(d) v`.
    pub fn apply(&self, d: &DoubleElement, v: &CVector) -> Result<CVector> {
        let mut out = CVector::zeros(self.dim());
        for (k, f) in self.fibers(d)?.iter().enumerate() {
            let m2 = k as i64 - self.i.truncation;
            let slice = CVector::from_fn(self.b.len(), |r, _| v[self.idx(r, m2)]);
            for (r, x) in (f * slice).iter().enumerate() {
                out[self.idx(r, m2)] = *x;
            }
        }
        Ok(out)
    }

    /// `B`-indices with spin `≤ cutoff - s`, and the `I`-reach `M - 2s`.
    fn interior_parts(&self, s: u32) -> (Vec<usize>, i64) {
        let b = self
            .b
            .labels
            .iter()
            .enumerate()
            .filter(|(_, (spin, _))| spin.twice() / 2 + s <= self.b.cutoff)
            .map(|(k, _)| k)
            .collect();
        (b, self.i.truncation - 2 * s as i64)
    }

    /// `Λ_D(Σ e_m b_m) = Σ Λ_B(E_ij D) ⊗ Λ_I(e_m ◁ E_ji)`, which on block
    /// `D` of `b_m` is `Σ_{m'} Z(ℓ, m, m') D v ⊗ e_{m'}`.
    pub fn lambda(&self, d: &DoubleElement) -> Result<CVector> {
        let cd = &self.da.cd;
        let mut out = CVector::zeros(self.dim());
        for (m, b) in d.terms() {
            for (s, block) in b.blocks() {
                let base = self.b.index(s, 0).ok_or_else(|| Error::Margin {
                    required: format!("{}", s.value().ceil()),
                    cutoff: self.b.cutoff.to_string(),
                })?;
                let dv = block * &self.b.vectors[&s];
                let n = s.twice() as i64;
                for m2 in (m - n..=m + n).step_by(2) {
                    let z = cd.action_kernel(s, m, m2)?;
                    if z.camax() == 0.0 {
                        continue;
                    }
                    if m2.abs() > self.i.truncation {
                        return Err(Error::OutsideTruncation {
                            index: m2,
                            truncation: self.i.truncation,
                        });
                    }
                    let col = z.as_ref() * &dv;
                    for (i, v) in col.iter().enumerate() {
                        out[self.idx(base + i, m2)] += v;
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Largest `|A_uv|` over `u, v` in the index set.
fn restricted_max(m: &CMatrix, rows: &[usize], cols: &[usize]) -> f64 {
    let mut worst: f64 = 0.0;
    for &r in rows {
        for &k in cols {
            worst = worst.max(m[(r, k)].norm());
        }
    }
    worst
}

fn spin_of(d: &DoubleElement) -> u32 {
    d.b_spin().map_or(0, |s| s.twice() / 2)
}

/// `φ_D(d^* d) ≥ -tol`. The residual is the most negative value found.
pub fn check_positivity(da: &DoubleAlgebra, samples: &[DoubleElement], tol: f64) -> Result<Check> {
    let mut lowest = f64::INFINITY;
    let mut worst_imag: f64 = 0.0;
    for d in samples {
        let v = da.phi_d(&da.dmul(&da.dstar(d)?, d)?)?;
        lowest = lowest.min(v.re);
        worst_imag = worst_imag.max(v.im.abs() / v.re.abs().max(1.0));
    }
    let residual = (-lowest).max(0.0).max(worst_imag);
    Ok(Check::at_most("phi_D positivity", residual, tol).with_detail(format!(
        "min phi_D(d* d) = {lowest:.6e}, max relative imaginary part {worst_imag:.3e}"
    )))
}

/// `|φ_D(d1 d2) - φ_D(d2 d1)|`.
pub fn check_trace(da: &DoubleAlgebra, pairs: &[(DoubleElement, DoubleElement)], tol: f64) -> Result<Check> {
    let mut worst = Worst::default();
    for (k, (d1, d2)) in pairs.iter().enumerate() {
        let lhs = da.phi_d(&da.dmul(d1, d2)?)?;
        let rhs = da.phi_d(&da.dmul(d2, d1)?)?;
        worst.update((lhs - rhs).norm(), || format!("pair {k}"));
    }
    Ok(worst.into_check("phi_D traciality", tol))
}

/// `|φ_D(d1 d2) - φ_D(d2 σ_D(d1))|`, and `σ_D = id` for the trace case.
pub fn check_modular(da: &DoubleAlgebra, pairs: &[(DoubleElement, DoubleElement)], tol: f64) -> Result<Check> {
    let mut worst = Worst::default();
    for (k, (d1, d2)) in pairs.iter().enumerate() {
        let s1 = da.sigma_d(d1)?;
        let lhs = da.phi_d(&da.dmul(d1, d2)?)?;
        let rhs = da.phi_d(&da.dmul(d2, &s1)?)?;
        worst.update((lhs - rhs).norm(), || format!("pair {k}"));
        if da.g().s == -1.0 {
            worst.update(s1.distance(d1), || format!("sigma_D(d) != d at pair {k}"));
        }
    }
    Ok(worst.into_check("phi_D modular property", tol))
}

/// `|φ_D(x ⊳ d ◁ a) - ε(x) φ_D(d) τ(a, g)|`.
pub fn check_g_invariance(
    da: &DoubleAlgebra,
    samples: &[(DualElement, DoubleElement, CoeffElement)],
    tol: f64,
) -> Result<Check> {
    let mut worst = Worst::default();
    let alg = da.cd.uqsu2();
    for (k, (x, d, a)) in samples.iter().enumerate() {
        let lhs = da.phi_d(&da.bimodule_act(x, d, a)?)?;
        let rhs = x.counit() * da.phi_d(d)? * da.g().pair(alg, a);
        let scale = lhs.norm().max(rhs.norm()).max(1.0);
        worst.update((lhs - rhs).norm() / scale, || format!("sample {k}"));
    }
    Ok(worst.into_check("phi_D g-invariance", tol))
}

/// `π(d1) π(d2) = π(d1 d2)` on vectors interior for `spin(d1) + spin(d2)`.
pub fn check_homomorphism(rep: &RegularRep, pairs: &[(DoubleElement, DoubleElement)], tol: f64) -> Result<Check> {
    let mut worst = Worst::default();
    let all: Vec<usize> = (0..rep.b.len()).collect();
    for (k, (d1, d2)) in pairs.iter().enumerate() {
        let s = spin_of(d1) + spin_of(d2);
        let (cols, reach) = rep.interior_parts(s);
        if cols.is_empty() || reach < 0 {
            return Err(Error::Margin {
                required: format!("{s} plus an interior"),
                cutoff: format!("{} (M = {})", rep.b.cutoff, rep.i.truncation),
            });
        }
        let (f1, f2) = (rep.fibers(d1)?, rep.fibers(d2)?);
        let f12 = rep.fibers(&rep.da.dmul(d1, d2)?)?;
        for m2 in -reach..=reach {
            let i = (m2 + rep.i.truncation) as usize;
            let diff = &f1[i] * &f2[i] - &f12[i];
            worst.update(restricted_max(&diff, &all, &cols), || format!("pair {k}, m' = {m2}"));
        }
    }
    Ok(worst.into_check("pi_reg homomorphism", tol))
}

/// `⟨π(d) u, v⟩ = ⟨u, π(d^*) v⟩` for interior `u, v`. On a fiber the Gram
/// matrix is `μ_{m'} G_B`.
pub fn check_adjoint(rep: &RegularRep, samples: &[DoubleElement], tol: f64) -> Result<Check> {
    let mut worst = Worst::default();
    let g = &rep.b.gram;
    for (k, d) in samples.iter().enumerate() {
        let (idx, reach) = rep.interior_parts(spin_of(d));
        let p = rep.fibers(d)?;
        let ps = rep.fibers(&rep.da.dstar(d)?)?;
        for m2 in -reach..=reach {
            let i = (m2 + rep.i.truncation) as usize;
            let diff = (p[i].adjoint() * g - g * &ps[i]) * c(rep.i.weights[i]);
            worst.update(restricted_max(&diff, &idx, &idx), || format!("sample {k}, m' = {m2}"));
        }
    }
    Ok(worst.into_check("pi_reg adjoint", tol))
}

/// `⟨Λ_D(d1), Λ_D(d2)⟩ = φ_D(d1^* d2)`.
pub fn check_gns(rep: &RegularRep, pairs: &[(DoubleElement, DoubleElement)], tol: f64) -> Result<Check> {
    let mut worst = Worst::default();
    for (k, (d1, d2)) in pairs.iter().enumerate() {
        let lhs = rep.inner(&rep.lambda(d1)?, &rep.lambda(d2)?);
        let rhs = rep.da.phi_d(&rep.da.dmul(&rep.da.dstar(d1)?, d2)?)?;
        worst.update((lhs - rhs).norm(), || format!("pair {k}"));
    }
    Ok(worst.into_check("GNS inner product", tol))
}

/// The normal form of `d1 d2` against the independent evaluation
/// `π_reg(d1) Λ_D(d2)`, both read in `Λ_D` coordinates.
pub fn check_oracle(rep: &RegularRep, pairs: &[(DoubleElement, DoubleElement)], tol: f64) -> Result<Check> {
    let mut worst = Worst::default();
    for (k, (d1, d2)) in pairs.iter().enumerate() {
        let normal = rep.lambda(&rep.da.dmul(d1, d2)?)?;
        let oracle = rep.apply(d1, &rep.lambda(d2)?)?;
        worst.update((normal - oracle).camax(), || format!("pair {k}"));
    }
    Ok(worst.into_check("dmul vs regular-representation oracle", tol))
}

/// `Σ_i π(ξ, k^{1/2} e_i)^* π(ξ, k^{1/2} e_i) = ‖k^{1/2} ξ‖² 1` for `ξ = Φ_C ξ`.
pub fn column_sum_residual(cd: &Coideal, spin: Spin, xi: &CVector) -> Result<f64> {
    let ca = cd.coeff_algebra();
    let k_half = cd.uqsu2().k_power(spin, c(0.5));
    let xi = &cd.block(spin)?.phi_c * xi;
    let mut acc = CoeffElement::zero();
    for i in 0..spin.dim() {
        let e = k_half.column(i).into_owned();
        let a = CoeffElement::matrix_coefficient(spin, &xi, &e);
        acc = acc + ca.product(&ca.star(&a), &a)?;
    }
    let norm = (&k_half * &xi).norm_squared();
    Ok(acc.distance(&(&CoeffElement::one() * c(norm))))
}
