//! Relatively invariant integrals on the stabilizer `I`.
//!
//! For a positive grouplike `g = k^s` a functional `ψ` on `I` is
//! `g`-invariant when `ψ(x ◁ a) = τ(a, g) ψ(x)`. Such a `ψ` exists exactly
//! when `Φ_C` is `g`-balanced, `Φ_C = S(Φ_C) g`, equivalently when
//! `τ(b, g) = ε(σ_A σ_B^{-1}(b))` on `B`. For the Podleś coideal this
//! singles out `s = -1`, and then `ψ(e_{[a+m]}) = ⟨v_m, k v_m⟩`.

use std::collections::BTreeMap;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coeffalg::CoeffElement;
use crate::coideal::{Coideal, StabElement};
use crate::error::{Error, Result};
use crate::qnum::{c, max_abs_diff, CMatrix, QContext, Scalar};
use crate::report::{Check, Worst};
use crate::uqsu2::{Direction, Spin, Uqsu2};

/// The grouplike `g = k^s = δ_A^{s/2}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GCharacter {
    pub s: f64,
}

impl GCharacter {
    pub fn new(s: f64) -> Self {
        Self { s }
    }

    /// `g = k^{-1} = δ_A^{-1/2}`, the Podleś answer.
    pub fn podles() -> Self {
        Self::new(-1.0)
    }

    pub fn block(&self, alg: &Uqsu2, spin: Spin) -> CMatrix {
        alg.k_power(spin, c(self.s))
    }

    /// `τ(a, g)`.
    pub fn pair(&self, alg: &Uqsu2, a: &CoeffElement) -> Scalar {
        a.blocks().map(|(s, d)| (d * self.block(alg, s)).trace()).sum()
    }

    /// `|T_γ^† (g ⊗ g) T_γ - g|` over the Clebsch–Gordan summands of
    /// `V_{n1} ⊗ V_{n2}`, i.e. `Δ(g) = g ⊗ g` read through the decomposition.
    pub fn grouplike_residual(&self, alg: &Uqsu2, n1: Spin, n2: Spin) -> Result<f64> {
        let gg = self.block(alg, n1).kronecker(&self.block(alg, n2));
        let cg = alg.cg(n1, n2)?;
        let mut worst: f64 = 0.0;
        for comp in &cg.components {
            let t = &comp.isometry;
            let lhs = t.adjoint() * &gg * t;
            let rhs = self.block(alg, comp.spin);
            worst = worst.max(max_abs_diff(&lhs, &rhs)? / rhs.camax().max(1.0));
        }
        Ok(worst)
    }
}

/// `(q^{a+m} + q^{-a-m}) / (q^a + q^{-a})`.
pub fn closed_form_weight(ctx: &QContext, m: i64) -> f64 {
    let (q, a) = (ctx.q, ctx.a);
    (q.powf(a + m as f64) + q.powf(-a - m as f64)) / (q.powf(a) + q.powf(-a))
}

/// Per-block residual `‖S(Φ_C) g - Φ_C‖` for spins up to `ctx.max_spin`.
pub fn balanced_residuals(g: &GCharacter, cd: &Coideal) -> Result<Vec<(Spin, f64)>> {
    let alg = cd.uqsu2();
    cd.ctx()
        .max_spin
        .up_to()
        .map(|s| {
            let p = cd.phi_c(s)?;
            let sp = alg.antipode(s, &p, Direction::Forward);
            Ok((s, max_abs_diff(&(sp * g.block(alg, s)), &p)?))
        })
        .collect()
}

pub fn check_balanced(g: &GCharacter, cd: &Coideal) -> Result<Check> {
    let mut worst = Worst::default();
    for (s, r) in balanced_residuals(g, cd)? {
        worst.update(r, || format!("spin {s}"));
    }
    Ok(worst.into_check(&format!("balanced(s={})", g.s), cd.ctx().tol))
}

/// Basis `π_ℓ(v_ℓ, e_j)` of `B` over integer spins up to `max`.
pub fn b_basis(cd: &Coideal, max: Spin) -> Result<Vec<(Spin, CoeffElement)>> {
    let mut out = Vec::new();
    for s in max.up_to().filter(|s| s.is_integer()) {
        let block = cd.block(s)?;
        let v = block.phi_c_vector().expect("integer spin has a fixed vector").clone();
        for j in 0..s.dim() {
            let mut e = crate::qnum::CVector::zeros(s.dim());
            e[j] = c(1.0);
            out.push((s, CoeffElement::matrix_coefficient(s, &v, &e)));
        }
    }
    Ok(out)
}

/// Residual `|τ(b, g) - ε(σ_A(σ_B^{-1}(b)))|` over a basis of `B`, each
/// relative to the size of the terms compared.
pub fn check_character_condition(g: &GCharacter, cd: &Coideal) -> Result<Check> {
    let ca = cd.coeff_algebra();
    let mut worst = Worst::default();
    for (s, b) in b_basis(cd, cd.ctx().max_spin)? {
        let lhs = g.pair(cd.uqsu2(), &b);
        let inner = cd.sigma_b(&b, Direction::Inverse)?;
        let rhs = ca.counit(&ca.sigma_a(&inner, -Complex64::i()));
        let scale = lhs.norm().max(rhs.norm()).max(1.0);
        worst.update((lhs - rhs).norm() / scale, || format!("spin {s}"));
    }
    Ok(worst.into_check(&format!("character(s={})", g.s), cd.ctx().tol))
}

/// A `g`-invariant functional `ψ(x) = Σ_m μ_m x_m` on `I`, truncated to
/// `|m| ≤ truncation`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantIntegral {
    pub g: GCharacter,
    pub truncation: i64,
    pub weights: BTreeMap<i64, f64>,
}

impl InvariantIntegral {
    /// Wraps explicit weights, e.g. to test sensitivity of the checks.
    pub fn from_weights(g: GCharacter, truncation: i64, weights: BTreeMap<i64, f64>) -> Self {
        Self { g, truncation, weights }
    }

    pub fn weight(&self, m: i64) -> Result<f64> {
        self.weights.get(&m).copied().ok_or(Error::OutsideTruncation {
            index: m,
            truncation: self.truncation,
        })
    }

    /// `ψ(x) = Σ_m μ_m x_m`.
    pub fn psi(&self, x: &StabElement) -> Result<Scalar> {
        x.iter().map(|(m, v)| Ok(v * self.weight(m)?)).sum()
    }
}

/// `μ_m = ⟨v_m, g^{-1} v_m⟩ / ⟨v_0, g^{-1} v_0⟩` for `|m| ≤ truncation`,
/// evaluated in every block `V_{n/2}` with `|m| ≤ n ≤ max(2 max_spin, |m|)`
/// and required to agree across them.
pub fn compute_weights(g: &GCharacter, cd: &Coideal, truncation: i64) -> Result<InvariantIntegral> {
    let bal = check_balanced(g, cd)?;
    if !bal.passed {
        return Err(Error::NotBalanced {
            exponent: g.s,
            residual: bal.residual,
        });
    }
    let alg = cd.uqsu2();
    let top = cd.ctx().max_spin.twice() as i64;
    let raw = |m: i64| -> Result<f64> {
        let mut first: Option<f64> = None;
        for n in (m.abs()..=top.max(m.abs())).step_by(2) {
            let s = Spin::from_twice(n as u32);
            let block = cd.block(s)?;
            let v = &block.pair(m).expect("label present").vector;
            let ginv = alg.k_power(s, c(-g.s));
            let mu = v.dotc(&(ginv * v)).re;
            match first {
                None => first = Some(mu),
                Some(f) if (f - mu).abs() > cd.ctx().tol * f.abs().max(1.0) => {
                    return Err(Error::Internal(format!(
                        "weight of e_{m} disagrees across blocks: {f} vs {mu} at spin {s}"
                    )))
                }
                Some(_) => {}
            }
        }
        Ok(first.expect("at least one block"))
    };
    let mu0 = raw(0)?;
    let mut weights = BTreeMap::new();
    for m in -truncation..=truncation {
        weights.insert(m, raw(m)? / mu0);
    }
    Ok(InvariantIntegral {
        g: *g,
        truncation,
        weights,
    })
}

/// `|ψ(x ◁ a) - τ(a, g) ψ(x)|` on the given samples; every sample must keep
/// `radius(x) + 2 spin(a) ≤ truncation`.
pub fn check_relative_invariance(
    integral: &InvariantIntegral,
    cd: &Coideal,
    samples: &[(StabElement, CoeffElement)],
) -> Result<Check> {
    let mut worst = Worst::default();
    for (i, (x, a)) in samples.iter().enumerate() {
        let reach = x.radius().unwrap_or(0) + a.max_spin().map_or(0, |s| s.twice() as i64);
        if reach > integral.truncation {
            return Err(Error::Margin {
                required: format!("truncation ≥ {reach}"),
                cutoff: integral.truncation.to_string(),
            });
        }
        let lhs = integral.psi(&cd.act_rmod(x, a)?)?;
        let rhs = integral.g.pair(cd.uqsu2(), a) * integral.psi(x)?;
        let scale = lhs.norm().max(rhs.norm()).max(1.0);
        worst.update((lhs - rhs).norm() / scale, || format!("sample {i}"));
    }
    Ok(worst.into_check("relative invariance", cd.ctx().tol))
}

/// `‖Δ(Φ_C) - Σ_m μ_m^{-1} S(e_m) g ⊗ e_m‖` on `V_{n1} ⊗ V_{n2}`, with the
/// left side taken from the spectral construction in [`Coideal::delta_phi_c`].
pub fn factorization_residual(integral: &InvariantIntegral, cd: &Coideal, n1: Spin, n2: Spin) -> Result<f64> {
    let alg = cd.uqsu2();
    let lhs = cd.delta_phi_c(n1, n2)?;
    let b1 = cd.block(n1)?;
    let b2 = cd.block(n2)?;
    let g1 = integral.g.block(alg, n1);
    let mut rhs = CMatrix::zeros(n1.dim() * n2.dim(), n1.dim() * n2.dim());
    for e in &b2.eigen {
        if b1.pair(e.m).is_none() {
            continue;
        }
        let left = alg.antipode(n1, &b1.projection(e.m), Direction::Forward) * &g1;
        rhs += left.kronecker(&b2.projection(e.m)) * c(1.0 / integral.weight(e.m)?);
    }
    max_abs_diff(&lhs, &rhs)
}

pub fn check_factorization(integral: &InvariantIntegral, cd: &Coideal, max: Spin) -> Result<Check> {
    let mut worst = Worst::default();
    for n1 in max.up_to() {
        for n2 in max.up_to() {
            let r = factorization_residual(integral, cd, n1, n2)?;
            worst.update(r, || format!("{n1} ⊗ {n2}"));
        }
    }
    Ok(worst.into_check("delta(Phi_C) factorization", cd.ctx().tol))
}

/// The invariance conditions `ψ(e_m ◁ a) = τ(a, g) ψ(e_m)` for unit
/// coefficients `a` and `|m| + 2 spin(a) ≤ truncation`, as a linear system in
/// the unknown weights.
#[derive(Clone, Debug)]
pub struct InvarianceSystem {
    pub truncation: i64,
    pub singular_values: Vec<f64>,
    /// Numerical nullity at relative threshold `1e-9`.
    pub nullity: usize,
    /// The null vector normalised to `μ_0 = 1`, when the nullity is one.
    pub solution: Option<BTreeMap<i64, f64>>,
}

pub fn invariance_system(g: &GCharacter, cd: &Coideal, truncation: i64) -> Result<InvarianceSystem> {
    let alg = cd.uqsu2();
    let width = (2 * truncation + 1) as usize;
    let col = |m: i64| (m + truncation) as usize;
    let mut rows: Vec<DVector<Scalar>> = Vec::new();
    for n1 in 1..=truncation as u32 {
        let s = Spin::from_twice(n1);
        for i in 0..s.dim() {
            for j in 0..s.dim() {
                let a = CoeffElement::unit_coefficient(s, i, j);
                let ga = g.pair(alg, &a);
                for m in -(truncation - n1 as i64)..=(truncation - n1 as i64) {
                    let y = cd.act_rmod(&StabElement::projection(m), &a)?;
                    let mut row = DVector::from_element(width, c(0.0));
                    for (m2, v) in y.iter() {
                        row[col(m2)] += v;
                    }
                    row[col(m)] -= ga;
                    if row.camax() > 0.0 {
                        rows.push(row);
                    }
                }
            }
        }
    }
    // zero rows keep V square when there are fewer equations than unknowns
    let mat = CMatrix::from_fn(rows.len().max(width), width, |r, k| {
        rows.get(r).map_or(c(0.0), |row| row[k])
    });
    let svd = mat.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let mut order: Vec<usize> = (0..width).collect();
    order.sort_by(|&x, &y| svd.singular_values[y].total_cmp(&svd.singular_values[x]));
    let sv: Vec<f64> = order.iter().map(|&k| svd.singular_values[k]).collect();
    let top = sv.first().copied().unwrap_or(0.0);
    let nullity = sv.iter().filter(|x| **x <= 1e-9 * top).count();
    let solution = (nullity == 1).then(|| {
        let v = vt.row(*order.last().expect("width > 0")).adjoint();
        let v0 = v[col(0)];
        (-truncation..=truncation).map(|m| (m, (v[col(m)] / v0).re)).collect()
    });
    Ok(InvarianceSystem {
        truncation,
        singular_values: sv,
        nullity,
        solution,
    })
}
