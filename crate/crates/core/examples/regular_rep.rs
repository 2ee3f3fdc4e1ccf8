// The truncated left regular representation of the double coideal on its
// GNS space, used as an independent oracle for the product.

use std::error::Error;
use std::sync::Arc;

use qsl2r::double::{self, RegularRep};
use qsl2r::{sample, Coideal, DoubleAlgebra, QContext, Spin};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let cd = Arc::new(Coideal::new(QContext::new(0.5, 1.0, 1e-9, Spin::integer(6))?)?);
    let da = DoubleAlgebra::podles(cd.clone(), 6)?;
    let rep = RegularRep::new(&da, 3, 6)?;
    println!("GNS space dimension: {}", rep.dim());
    println!("interior for spin-1 products: {} basis vectors", rep.interior(1).len());

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let pairs: Vec<_> = (0..3)
        .map(|_| -> qsl2r::Result<_> {
            Ok((
                sample::double_element(&cd, &mut rng, 1, 1, 2)?,
                sample::double_element(&cd, &mut rng, 1, 1, 2)?,
            ))
        })
        .collect::<Result<_, _>>()?;
    let singles: Vec<_> = pairs.iter().map(|p| p.0.clone()).collect();
    for chk in [
        double::check_homomorphism(&rep, &pairs, 1e-7)?,
        double::check_adjoint(&rep, &singles, 1e-7)?,
        double::check_gns(&rep, &pairs, 1e-8)?,
        double::check_oracle(&rep, &pairs, 1e-8)?,
    ] {
        println!("{}: {} ({:.1e})", chk.name, chk.status(), chk.residual);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
