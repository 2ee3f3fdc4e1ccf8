// The Haar state on `O_q(SU(2))` and the quantum Peter–Weyl relations.

use std::error::Error;

use qsl2r::{sample, CoeffAlgebra, CoeffElement, Spin};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let alg = CoeffAlgebra::with_q(0.5);
    let mut rng = ChaCha8Rng::seed_from_u64(1);

    // the generators a = u_{00}, b = u_{01}, ... of the fundamental corepresentation
    let [a, b, _, _] = CoeffElement::generators();
    let aa = alg.product(&alg.star(&a), &a)?;
    let bb = alg.product(&alg.star(&b), &b)?;
    println!("h(a* a) = {:.6}", alg.haar(&aa).re);
    println!("h(b* b) = {:.6}", alg.haar(&bb).re);

    let mut worst: f64 = 0.0;
    for s1 in Spin::ONE.up_to() {
        for s2 in Spin::ONE.up_to() {
            for _ in 0..10 {
                let (x1, y1) = (sample::vector(&mut rng, s1.dim()), sample::vector(&mut rng, s1.dim()));
                let (x2, y2) = (sample::vector(&mut rng, s2.dim()), sample::vector(&mut rng, s2.dim()));
                worst = worst.max(alg.peter_weyl_residual((s1, &x1, &y1), (s2, &x2, &y2))?);
            }
        }
    }
    println!("Peter-Weyl residual over spins <= 1: {worst:.1e}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
