//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Desk scale: q ∈ {0.3, 0.5, 0.8}, a ∈ {0.5, 1, 1.7}, M = 6.

use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use qsl2r::coeffalg::DualElement;
use qsl2r::double::{self, DoubleAlgebra, RegularRep};

use qsl2r::relint::{self, GCharacter};
use qsl2r::{sample, Coideal, QContext, Spin};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

const QS: [f64; 3] = [0.3, 0.5, 0.8];
const AS: [f64; 3] = [0.5, 1.0, 1.7];
const TOL: f64 = 1e-9;
const M: i64 = 6;

fn grid() -> Vec<(f64, f64)> {
    QS.iter().flat_map(|q| AS.iter().map(move |a| (*q, *a))).collect()
}

fn coideal(q: f64, a: f64, max_twice: u32) -> Arc<Coideal> {
    Arc::new(Coideal::new(QContext::new(q, a, TOL, Spin::from_twice(max_twice)).unwrap()).unwrap())
}

fn rng(q: f64, a: f64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64((q * 1000.0) as u64 * 7919 + (a * 1000.0) as u64 * 31 + salt)
}

type Residuals = Vec<(f64, String)>;
type Criterion = (&'static str, fn() -> Outcome);

/// Verdict for one criterion plus a one-line summary.
struct Outcome {
    ok: bool,
    summary: String,
}

fn worst(items: Vec<(f64, String)>) -> (f64, String) {
    items.into_iter().fold(
        (0.0, String::new()),
        |acc, x| if x.0 > acc.0 || x.0.is_nan() { x } else { acc },
    )
}

fn within(name: &str, items: Vec<(f64, String)>, tol: f64) -> Outcome {
    let (r, at) = worst(items);
    Outcome {
        ok: r <= tol,
        summary: format!("{name}: max residual {r:.2e} (tol {tol:.0e}) at {at}"),
    }
}

fn all_of(parts: Vec<Outcome>) -> Outcome {
    Outcome {
        ok: parts.iter().all(|p| p.ok),
        summary: parts.into_iter().map(|p| p.summary).collect::<Vec<_>>().join("; "),
    }
}

fn spectrum() -> Outcome {
    let items = grid()
        .par_iter()
        .map(|&(q, a)| {
            let cd = coideal(q, a, 8);
            Spin::from_twice(8)
                .up_to()
                .map(|s| {
                    (
                        cd.block(s).unwrap().spectrum_residual(),
                        format!("q={q} a={a} spin {s}"),
                    )
                })
                .collect::<Vec<_>>()
        })
        .flatten()
        .collect();
    within("eigenvalues of pi_{n/2}(iB_t) vs [a+n-2p], n <= 8", items, 1e-9)
}

fn weights() -> Outcome {
    let items: Vec<(f64, String)> = grid()
        .par_iter()
        .flat_map(|&(q, a)| {
            let cd = coideal(q, a, 12);
            let psi = relint::compute_weights(&GCharacter::podles(), &cd, M).unwrap();
            (-M..=M)
                .map(|m| {
                    let exact = relint::closed_form_weight(cd.ctx(), m);
                    ((psi.weight(m).unwrap() - exact).abs(), format!("q={q} a={a} m={m}"))
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let cd = coideal(0.5, 1.0, 12);
    let psi = relint::compute_weights(&GCharacter::podles(), &cd, M).unwrap();
    let golden = vec![
        ((psi.weight(1).unwrap() - 1.7).abs(), "mu_1 = 1.7".to_string()),
        ((psi.weight(-1).unwrap() - 0.8).abs(), "mu_-1 = 0.8".to_string()),
        ((psi.weight(0).unwrap() - 1.0).abs(), "mu_0 = 1".to_string()),
    ];
    all_of(vec![
        within("weights vs closed form, |n| <= 6", items, 1e-9),
        within("golden values at (0.5, 1)", golden, 1e-9),
    ])
}

fn balance() -> Outcome {
    let parts: Vec<Outcome> = grid()
        .par_iter()
        .map(|&(q, a)| {
            let cd = coideal(q, a, 12);
            let bal = relint::check_balanced(&GCharacter::podles(), &cd).unwrap();
            let zero = relint::check_balanced(&GCharacter::new(0.0), &cd).unwrap();
            let plus = relint::check_balanced(&GCharacter::new(1.0), &cd).unwrap();
            let mut agree = true;
            for k in -6..=4 {
                let g = GCharacter::new(0.25 * k as f64);
                let b = relint::check_balanced(&g, &cd).unwrap().passed;
                let ch = relint::check_character_condition(&g, &cd).unwrap().passed;
                agree &= b == ch && b == (k == -4);
            }
            Outcome {
                ok: bal.residual <= 1e-9 && zero.residual > 1e-3 && plus.residual > 1e-3 && agree,
                summary: format!(
                    "q={q} a={a}: s=-1 {:.1e}, s=0 {:.1e}, s=1 {:.1e}, grid agreement {agree}",
                    bal.residual, zero.residual, plus.residual
                ),
            }
        })
        .collect();
    let ok = parts.iter().all(|p| p.ok);
    let worst = parts.iter().find(|p| !p.ok).unwrap_or(&parts[0]);
    Outcome {
        ok,
        summary: format!("balanced only at s=-1 on blocks <= 6, {} (first shown)", worst.summary),
    }
}

fn peter_weyl() -> Outcome {
    let items: Vec<(f64, String)> = QS
        .par_iter()
        .flat_map(|&q| {
            let cd = coideal(q, 1.0, 6);
            let ca = cd.coeff_algebra();
            let mut rng = rng(q, 0.0, 4);
            let mut out = Vec::new();
            for s1 in Spin::from_twice(6).up_to() {
                for s2 in Spin::from_twice(6).up_to() {
                    let mut w: f64 = 0.0;
                    for _ in 0..50 {
                        let (x1, y1) = (sample::vector(&mut rng, s1.dim()), sample::vector(&mut rng, s1.dim()));
                        let (x2, y2) = (sample::vector(&mut rng, s2.dim()), sample::vector(&mut rng, s2.dim()));
                        w = w.max(ca.peter_weyl_residual((s1, &x1, &y1), (s2, &x2, &y2)).unwrap());
                    }
                    out.push((w, format!("q={q} {s1} x {s2}")));
                }
            }
            out
        })
        .collect();
    within("Peter-Weyl relations, spin pairs <= 3, 50 quadruples each", items, 1e-8)
}

fn co_gelfand() -> Outcome {
    let results: Vec<(Residuals, Residuals)> = grid()
        .par_iter()
        .map(|&(q, a)| {
            let cd = coideal(q, a, 12);
            let ca = cd.coeff_algebra();
            let mut rng = rng(q, a, 5);
            let mut comm = Vec::new();
            for k in 0..100 {
                let mut pick = || {
                    let s = Spin::integer(rng.gen_range(0..=2));
                    let (xi, eta) = (sample::vector(&mut rng, s.dim()), sample::vector(&mut rng, s.dim()));
                    cd.spherical(s, &xi, &eta).unwrap()
                };
                let (x, y) = (pick(), pick());
                let d = ca.product(&x, &y).unwrap().distance(&ca.product(&y, &x).unwrap());
                comm.push((d, format!("q={q} a={a} pair {k}")));
            }
            let norms = (0..=6)
                .map(|l| {
                    let s = Spin::integer(l);
                    let v = cd.block(s).unwrap().phi_c_vector().unwrap().clone();
                    let kv = cd.uqsu2().k_power(s, c(1.0)) * &v;
                    ((v.dotc(&kv) - c(1.0)).norm(), format!("q={q} a={a} l={l}"))
                })
                .collect();
            (comm, norms)
        })
        .collect();
    let (comm, norms): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    all_of(vec![
        within("spherical commutators, 100 pairs, spins <= 2", comm.concat(), 1e-8),
        within("<v_l, K v_l> = 1, l <= 6", norms.concat(), 1e-9),
    ])
}

fn delta_phi_c() -> Outcome {
    let results: Vec<(Residuals, Residuals)> = grid()
        .par_iter()
        .map(|&(q, a)| {
            let cd = coideal(q, a, 12);
            let psi = relint::compute_weights(&GCharacter::podles(), &cd, M).unwrap();
            let mut lemma = Vec::new();
            let mut fact = Vec::new();
            for n1 in Spin::from_twice(6).up_to() {
                lemma.push((cd.antipode_identity_residual(n1).unwrap(), format!("q={q} a={a} {n1}")));
                for n2 in Spin::from_twice(6).up_to() {
                    let at = format!("q={q} a={a} {n1} x {n2}");
                    lemma.push((cd.delta_identity_residual(n1, n2).unwrap(), at.clone()));
                    fact.push((relint::factorization_residual(&psi, &cd, n1, n2).unwrap(), at));
                }
            }
            (lemma, fact)
        })
        .collect();
    let (lemma, fact): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    all_of(vec![
        within("Phi_C antipode/coproduct identities, pairs <= 3", lemma.concat(), 1e-8),
        within("Delta(Phi_C) factorization, pairs <= 3", fact.concat(), 1e-8),
    ])
}

fn double_functional() -> Outcome {
    let parts: Vec<Vec<Outcome>> = grid()
        .par_iter()
        .map(|&(q, a)| {
            let cd = coideal(q, a, 12);
            let da = DoubleAlgebra::podles(cd.clone(), M).unwrap();
            let mut rng = rng(q, a, 7);
            let mut draw = || sample::double_element(&cd, &mut rng, 2, 1, 2).unwrap();
            let singles: Vec<_> = (0..100).map(|_| draw()).collect();
            let pairs: Vec<_> = (0..30).map(|_| (draw(), draw())).collect();
            let mut rng = rng_next(q, a);
            let inv: Vec<_> = (0..30)
                .map(|_| {
                    let x = DualElement::k_power(q, c(rng.gen_range(-1.0..1.0)));
                    let coeff = sample::coeff(&mut rng, [Spin::ZERO, Spin::HALF, Spin::ONE]);
                    (x, sample::double_element(&cd, &mut rng, 2, 1, 2).unwrap(), coeff)
                })
                .collect();
            let tag = |chk: qsl2r::report::Check| Outcome {
                ok: chk.passed,
                summary: format!("{} q={q} a={a} {:.1e}", chk.name, chk.residual),
            };
            vec![
                tag(double::check_positivity(&da, &singles, 1e-9).unwrap()),
                tag(double::check_trace(&da, &pairs, 1e-8).unwrap()),
                tag(double::check_modular(&da, &pairs, 1e-8).unwrap()),
                tag(double::check_g_invariance(&da, &inv, 1e-8).unwrap()),
            ]
        })
        .collect();
    summarize("phi_D positivity (100), trace, modularity, g-invariance", parts)
}

fn rng_next(q: f64, a: f64) -> ChaCha8Rng {
    rng(q, a, 77)
}

fn summarize(what: &str, parts: Vec<Vec<Outcome>>) -> Outcome {
    let flat: Vec<Outcome> = parts.into_iter().flatten().collect();
    let failed: Vec<&Outcome> = flat.iter().filter(|o| !o.ok).collect();
    Outcome {
        ok: failed.is_empty(),
        summary: if failed.is_empty() {
            format!("{what}: {} checks within tolerance", flat.len())
        } else {
            format!(
                "{what}: {} of {} failed, e.g. {}",
                failed.len(),
                flat.len(),
                failed[0].summary
            )
        },
    }
}

fn regular_rep() -> Outcome {
    let parts: Vec<Vec<Outcome>> = grid()
        .par_iter()
        .map(|&(q, a)| {
            let cd = coideal(q, a, 12);
            let da = DoubleAlgebra::podles(cd.clone(), M).unwrap();
            let rep = RegularRep::new(&da, 4, M).unwrap();
            let mut rng = rng(q, a, 8);
            let pairs: Vec<_> = (0..8)
                .map(|_| {
                    (
                        sample::double_element(&cd, &mut rng, 2, 1, 2).unwrap(),
                        sample::double_element(&cd, &mut rng, 2, 1, 2).unwrap(),
                    )
                })
                .collect();
            let singles: Vec<_> = pairs.iter().map(|p| p.0.clone()).collect();
            let tag = |chk: qsl2r::report::Check| Outcome {
                ok: chk.passed,
                summary: format!("{} q={q} a={a} {:.1e}", chk.name, chk.residual),
            };
            vec![
                tag(double::check_homomorphism(&rep, &pairs, 1e-7).unwrap()),
                tag(double::check_adjoint(&rep, &singles, 1e-7).unwrap()),
                tag(double::check_gns(&rep, &pairs, 1e-8).unwrap()),
            ]
        })
        .collect();
    summarize(
        "pi_reg homomorphism/adjoint (cutoff 4, margin 2) and GNS identity",
        parts,
    )
}

fn oracle() -> Outcome {
    let parts: Vec<Vec<Outcome>> = grid()
        .par_iter()
        .map(|&(q, a)| {
            let cd = coideal(q, a, 12);
            let da = DoubleAlgebra::podles(cd.clone(), M).unwrap();
            let rep = RegularRep::new(&da, 4, M).unwrap();
            let mut rng = rng(q, a, 9);
            let pairs: Vec<_> = (0..20)
                .map(|_| {
                    (
                        sample::double_element(&cd, &mut rng, 2, 1, 2).unwrap(),
                        sample::double_element(&cd, &mut rng, 2, 1, 2).unwrap(),
                    )
                })
                .collect();
            let chk = double::check_oracle(&rep, &pairs, 1e-8).unwrap();
            vec![Outcome {
                ok: chk.passed,
                summary: format!("q={q} a={a} {:.1e}", chk.residual),
            }]
        })
        .collect();
    summarize("dmul normal form vs regular-representation oracle, 20 products", parts)
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 spectrum", spectrum),
        ("2 integral golden values", weights),
        ("3 balancedness/equivalence", balance),
        ("4 Peter-Weyl", peter_weyl),
        ("5 co-Gelfand", co_gelfand),
        ("6 Delta(Phi_C) identities", delta_phi_c),
        ("7 double functional", double_functional),
        ("8 regular representation", regular_rep),
        ("9 oracle equivalence", oracle),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (name, f) in criteria {
        let t = Instant::now();
        let out = std::panic::catch_unwind(f).unwrap_or_else(|e| Outcome {
            ok: false,
            summary: format!(
                "panicked: {}",
                e.downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default()
            ),
        });
        if !out.ok {
            failed += 1;
        }
        println!(
            "{} criterion {name}: {} [{:.1}s]",
            if out.ok { "PASS" } else { "FAIL" },
            out.summary,
            t.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} of 9 criteria passed in {:.1}s",
        9 - failed,
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
