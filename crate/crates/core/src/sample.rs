//! Seeded random inputs for property checks.
//!
//! Entries are complex with real and imaginary parts uniform in `[-1, 1]`.

use rand::Rng;

use crate::coeffalg::CoeffElement;
use crate::coideal::{Coideal, StabElement};
use crate::double::DoubleElement;
use crate::error::Result;
use crate::qnum::{CMatrix, CVector, Scalar};
use crate::uqsu2::Spin;

pub fn scalar<R: Rng + ?Sized>(rng: &mut R) -> Scalar {
    Scalar::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))
}

pub fn vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CVector {
    CVector::from_fn(dim, |_, _| scalar(rng))
}

pub fn matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    CMatrix::from_fn(dim, dim, |_, _| scalar(rng))
}

/// A random coefficient element with one full block per listed spin.
pub fn coeff<R: Rng + ?Sized>(rng: &mut R, spins: impl IntoIterator<Item = Spin>) -> CoeffElement {
    let mut out = CoeffElement::zero();
    for s in spins {
        out.add_block(s, matrix(rng, s.dim()));
    }
    out
}

/// A random element of `B` with blocks on the integer spins `0..=max_l`.
pub fn b_element<R: Rng + ?Sized>(cd: &Coideal, rng: &mut R, max_l: u32) -> Result<CoeffElement> {
    cd.e_b(&coeff(rng, (0..=max_l).map(Spin::integer)))
}

/// A random element of `I` supported on `|m| ≤ radius`.
pub fn stab<R: Rng + ?Sized>(rng: &mut R, radius: i64) -> StabElement {
    StabElement::from_coeffs((-radius..=radius).map(|m| (m, scalar(rng))))
}

/// A random `Σ_k e_{m_k} b_k` with `|m_k| ≤ radius` and `b_k ∈ B` of spin
/// at most `max_l`.
pub fn double_element<R: Rng + ?Sized>(
    cd: &Coideal,
    rng: &mut R,
    radius: i64,
    max_l: u32,
    terms: usize,
) -> Result<DoubleElement> {
    let mut out = DoubleElement::zero();
    for _ in 0..terms {
        let m = rng.gen_range(-radius..=radius);
        out.add_term(m, &b_element(cd, rng, max_l)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn deterministic_given_seed() {
        let a = vector(&mut ChaCha8Rng::seed_from_u64(42), 4);
        let b = vector(&mut ChaCha8Rng::seed_from_u64(42), 4);
        assert_eq!(a, b);
        assert!(a.iter().all(|z| z.re.abs() <= 1.0 && z.im.abs() <= 1.0));
    }

    #[test]
    fn shapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = coeff(&mut rng, [Spin::ZERO, Spin::ONE]);
        assert_eq!(c.spins().collect::<Vec<_>>(), vec![Spin::ZERO, Spin::ONE]);
        assert_eq!(c.block(Spin::ONE).unwrap().shape(), (3, 3));
        assert_eq!(stab(&mut rng, 2).radius(), Some(2));
    }
}
