// Spherical functions commute: the co-Gelfand property of the Podleś pair.

use std::error::Error;

use qsl2r::{sample, Coideal, QContext, Spin};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let cd = Coideal::new(QContext::new(0.3, 1.7, 1e-9, Spin::integer(2))?)?;
    let alg = cd.coeff_algebra();
    let mut rng = ChaCha8Rng::seed_from_u64(5);

    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let mut pick = || {
            let s = Spin::integer(rng.gen_range(0..=2));
            let (xi, eta) = (sample::vector(&mut rng, s.dim()), sample::vector(&mut rng, s.dim()));
            cd.spherical(s, &xi, &eta)
        };
        let (x, y) = (pick()?, pick()?);
        let xy = alg.product(&x, &y)?;
        let yx = alg.product(&y, &x)?;
        worst = worst.max(xy.distance(&yx));
    }
    println!("max |xy - yx| over 20 spherical pairs: {worst:.1e}");

    for l in 0..=2 {
        let r = cd.antipode_identity_residual(Spin::integer(l))?;
        println!("S(Phi_C) identity on spin {l}: {r:.1e}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
