// The relatively invariant integral on the stabilizer: balancedness of the
// modular character, the weights `μ_m`, and their uniqueness.

use std::error::Error;

use qsl2r::relint::{self, GCharacter};
use qsl2r::{sample, Coideal, QContext, Spin};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let cd = Coideal::new(QContext::new(0.5, 1.0, 1e-9, Spin::integer(4))?)?;

    for s in [-1.0, 0.0, 1.0] {
        let chk = relint::check_balanced(&GCharacter::new(s), &cd)?;
        println!("g = k^({s}): balanced {} (residual {:.1e})", chk.passed, chk.residual);
    }

    let g = GCharacter::podles();
    let psi = relint::compute_weights(&g, &cd, 4)?;
    for m in -4..=4 {
        println!(
            "mu_{m:<2} = {:>10.6}  closed form {:>10.6}",
            psi.weight(m)?,
            relint::closed_form_weight(cd.ctx(), m)
        );
    }

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let samples: Vec<_> = (0..10)
        .map(|_| {
            (
                sample::stab(&mut rng, 2),
                sample::coeff(&mut rng, [Spin::HALF, Spin::ONE]),
            )
        })
        .collect();
    let chk = relint::check_relative_invariance(&psi, &cd, &samples)?;
    println!("relative invariance: residual {:.1e}", chk.residual);

    let sys = relint::invariance_system(&g, &cd, 4)?;
    println!("invariance system nullity: {}", sys.nullity);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
