// Spectrum of the Podleś generator `iB_t` in each spin block, and the
// spherical vectors it singles out.

use std::error::Error;

use qsl2r::{Coideal, QContext, Spin};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let ctx = QContext::new(0.5, 1.0, 1e-9, Spin::integer(3))?;
    let cd = Coideal::new(ctx)?;

    for s in Spin::integer(3).up_to() {
        let block = cd.block(s)?;
        let labels: Vec<String> = block.eigen.iter().map(|e| e.m.to_string()).collect();
        println!(
            "spin {s}: labels [{}], spectrum residual {:.1e}, spherical vector: {}",
            labels.join(" "),
            block.spectrum_residual(),
            if block.phi_c_vector().is_some() { "yes" } else { "no" }
        );
    }
    for m in -2..=2 {
        println!("eigenvalue label {m:>2}: [a+m] = {:.6}", cd.shifted_q_int(m));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
