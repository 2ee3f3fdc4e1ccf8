// Products, involution and the invariant functional `φ_D` on the double
// coideal `D(B, I)`.

use std::error::Error;
use std::sync::Arc;

use qsl2r::double;
use qsl2r::{sample, Coideal, DoubleAlgebra, DoubleElement, QContext, Spin, StabElement};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let cd = Arc::new(Coideal::new(QContext::new(0.5, 1.0, 1e-9, Spin::integer(4))?)?);
    let da = DoubleAlgebra::podles(cd.clone(), 4)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    // e_0 * b for a spherical b, then its star
    let b = sample::b_element(&cd, &mut rng, 1)?;
    let x = DoubleElement::from_parts(&StabElement::projection(0), &b);
    let xs = da.dstar(&x)?;
    println!(
        "e_0 b has I-terms at m = {:?}",
        x.terms().map(|(m, _)| m).collect::<Vec<_>>()
    );
    println!(
        "(e_0 b)* has I-terms at m = {:?}",
        xs.terms().map(|(m, _)| m).collect::<Vec<_>>()
    );
    println!("phi_D((e_0 b)* (e_0 b)) = {:.6}", da.phi_d(&da.dmul(&xs, &x)?)?.re);

    let samples: Vec<_> = (0..10)
        .map(|_| sample::double_element(&cd, &mut rng, 2, 1, 2))
        .collect::<Result<_, _>>()?;
    let pairs: Vec<_> = samples.chunks(2).map(|p| (p[0].clone(), p[1].clone())).collect();
    for chk in [
        double::check_positivity(&da, &samples, 1e-9)?,
        double::check_trace(&da, &pairs, 1e-8)?,
        double::check_modular(&da, &pairs, 1e-8)?,
    ] {
        println!("{}: {} ({:.1e})", chk.name, chk.status(), chk.residual);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
