// Spin representations of `U_q(su(2))` and their Clebsch–Gordan splitting.
//
// ```bash
// cargo run --example spin_reps
// ```

use std::error::Error;

use qsl2r::{Spin, Uqsu2};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let alg = Uqsu2::new(0.5);

    let rep = alg.rep(Spin::ONE);
    // [e, f] = (k - k^-1) / (q - q^-1), with k acting as q^{2·weight}
    let q = alg.q();
    let lhs = &rep.e * &rep.f - &rep.f * &rep.e;
    let rhs = (&rep.k - &rep.k_inv) / qsl2r::Scalar::new(q - 1.0 / q, 0.0);
    println!(
        "spin 1: |[e,f] - (k-k^-1)/(q-q^-1)| = {:.1e}",
        qsl2r::qnum::max_abs(&(lhs - rhs))
    );
    println!("spin 1: quantum dimension {:.6}", alg.qdim(Spin::ONE));

    for (l, r) in [
        (Spin::HALF, Spin::HALF),
        (Spin::ONE, Spin::HALF),
        (Spin::from_twice(3), Spin::ONE),
    ] {
        let cg = alg.cg(l, r)?;
        let parts: Vec<String> = l.coupled(r).map(|s| s.to_string()).collect();
        println!(
            "{l} x {r} = {}: orthonormality {:.1e}, intertwining {:.1e}",
            parts.join(" + "),
            cg.orthonormality_residual(),
            cg.intertwining_residual(&alg)
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
