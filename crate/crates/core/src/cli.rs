//! Verification suites behind the `qsl2r` binary.
//!
//! Each subcommand runs a fixed list of checks and produces a [`Report`].
//! Exit codes: `0` when every check passes, `1` when any fails, `2` for an
//! invalid configuration. `QSL2R_THREADS` bounds the worker pool.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coeffalg::{CoeffElement, DualElement};
use crate::coideal::Coideal;
use crate::double::{self, DoubleAlgebra, RegularRep};
use crate::error::{Error, Result};
use crate::qnum::{c, max_abs_diff, QContext};
use crate::relint::{self, GCharacter};
use crate::report::{Check, Worst};
use crate::sample;
use crate::uqsu2::Spin;

pub const SCHEMA: &str = "qsl2r-report/1";

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Subcommand)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    /// Spectra of π(iB_t) against the q-integers [a+m]
    Spectrum,
    /// g-balancedness of Φ_C and the character condition
    Balance,
    /// Weights of the invariant integral against the closed form
    Integral,
    /// Peter–Weyl relations and the Haar state
    Haar,
    /// Commutativity of spherical functions and δ_B^{1/2} = Φ_C
    Gelfand,
    /// Positivity, traciality and modularity of φ_D
    Double,
    /// The regular representation of the double
    Regrep,
    /// Every suite above
    All,
}

impl Suite {
    pub const EACH: [Suite; 7] = [
        Suite::Spectrum,
        Suite::Balance,
        Suite::Integral,
        Suite::Haar,
        Suite::Gelfand,
        Suite::Double,
        Suite::Regrep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Spectrum => "spectrum",
            Suite::Balance => "balance",
            Suite::Integral => "integral",
            Suite::Haar => "haar",
            Suite::Gelfand => "gelfand",
            Suite::Double => "double",
            Suite::Regrep => "regrep",
            Suite::All => "all",
        }
    }

    fn index(self) -> u64 {
        Suite::EACH.iter().position(|s| *s == self).unwrap_or(0) as u64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, clap::Args)]
pub struct RunConfig {
    /// Deformation parameter, 0 < q < 1
    #[arg(long, default_value_t = 0.5, global = true)]
    pub q: f64,
    /// Coideal parameter a > 0 (t = q^a - q^-a)
    #[arg(long, default_value_t = 1.0, global = true)]
    pub a: f64,
    /// Tolerance for exact identities
    #[arg(long, default_value_t = 1e-9, global = true)]
    pub tol: f64,
    /// Largest spin used by global checks (integer or half-integer)
    #[arg(long, default_value_t = 4.0, global = true)]
    pub max_spin: f64,
    /// Stabilizer truncation M (|m| <= M); defaults to floor(max_spin)
    #[arg(long, global = true)]
    pub truncation: Option<i64>,
    /// Exponent s of the candidate character g = k^s
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true, global = true)]
    pub g_exponent: f64,
    /// Seed for random sampling
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    /// Random samples per property check
    #[arg(long, default_value_t = 20, global = true)]
    pub samples: usize,
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            q: 0.5,
            a: 1.0,
            tol: 1e-9,
            max_spin: 4.0,
            truncation: None,
            g_exponent: -1.0,
            seed: 0,
            samples: 20,
            format: Format::Text,
        }
    }
}

impl RunConfig {
    pub fn max_spin(&self) -> Result<Spin> {
        let twice = 2.0 * self.max_spin;
        if !(twice.is_finite() && twice >= 0.0 && twice.fract() == 0.0) {
            return Err(Error::InvalidContext(format!(
                "max_spin must be a non-negative multiple of 1/2, got {}",
                self.max_spin
            )));
        }
        Ok(Spin::from_twice(twice as u32))
    }

    pub fn truncation(&self) -> i64 {
        self.truncation.unwrap_or(self.max_spin.floor() as i64)
    }

    /// Validates everything and returns the shared context.
    pub fn context(&self) -> Result<QContext> {
        let ctx = QContext::new(self.q, self.a, self.tol, self.max_spin()?)?;
        let m = self.truncation();
        if m < 2 || m as f64 > self.max_spin {
            return Err(Error::InvalidContext(format!(
                "truncation must satisfy 2 <= M <= max_spin, got M = {m}, max_spin = {}",
                self.max_spin
            )));
        }
        if !self.g_exponent.is_finite() {
            return Err(Error::InvalidContext("g_exponent must be finite".into()));
        }
        if self.samples == 0 {
            return Err(Error::InvalidContext("samples must be positive".into()));
        }
        Ok(ctx)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub subcommand: String,
    pub parameters: RunConfig,
    pub passed: bool,
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, f64>,
    /// Wall-clock milliseconds per suite; only with `--timing`, since it
    /// breaks bit-for-bit reproducibility.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<BTreeMap<String, f64>>,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }

    pub fn to_text(&self) -> String {
        let p = &self.parameters;
        let mut out = format!(
            "qsl2r {}  q={} a={} tol={:e} max_spin={} M={} s={} seed={}\n",
            self.subcommand,
            p.q,
            p.a,
            p.tol,
            p.max_spin,
            p.truncation(),
            p.g_exponent,
            p.seed
        );
        for chk in &self.checks {
            out += &format!(
                "{} {:<44} residual {:>10.3e}  tol {:.1e}",
                if chk.passed { "PASS" } else { "FAIL" },
                chk.name,
                chk.residual,
                chk.tolerance
            );
            if let Some(d) = &chk.detail {
                out += &format!("  ({d})");
            }
            out.push('\n');
        }
        for (k, v) in &self.values {
            out += &format!("  {k} = {v:.12}\n");
        }
        if let Some(t) = &self.timing_ms {
            for (k, v) in t {
                out += &format!("  time {k}: {v:.1} ms\n");
            }
        }
        let n_pass = self.checks.iter().filter(|c| c.passed).count();
        out += &format!(
            "result: {} ({}/{} checks passed)\n",
            if self.passed { "PASS" } else { "FAIL" },
            n_pass,
            self.checks.len()
        );
        out
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "qsl2r",
    version,
    about = "Numerical checks for U_q(su(2)), the Podles coideal and U_q(sl(2,R)_t)"
)]
pub struct Cli {
    #[command(subcommand)]
    pub suite: Suite,
    #[command(flatten)]
    pub config: RunConfig,
    /// Also write the JSON report to this path
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    /// Record wall-clock time per suite in the report
    #[arg(long, global = true)]
    pub timing: bool,
}

/// Everything a suite needs, built once per run.
struct Env {
    cfg: RunConfig,
    cd: Arc<Coideal>,
    g: GCharacter,
}

impl Env {
    fn tol(&self) -> f64 {
        self.cfg.tol
    }

    /// Identities that go through several products.
    fn tol_derived(&self) -> f64 {
        10.0 * self.cfg.tol
    }

    /// Identities between assembled regular-representation matrices.
    fn tol_matrix(&self) -> f64 {
        100.0 * self.cfg.tol
    }

    fn rng(&self, suite: Suite) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.cfg.seed.wrapping_mul(0x9e37_79b9).wrapping_add(suite.index()))
    }

    fn m(&self) -> i64 {
        self.cfg.truncation()
    }
}

type SuiteOutput = (Vec<Check>, BTreeMap<String, f64>);

fn spectrum(env: &Env) -> Result<SuiteOutput> {
    let mut eig = Worst::default();
    let mut vec = Worst::default();
    let mut rank = true;
    for s in env.cd.ctx().max_spin.up_to() {
        let block = env.cd.block(s)?;
        eig.update(block.spectrum_residual(), || format!("spin {s}"));
        let scale = block.eigen.iter().map(|e| e.eigenvalue.abs()).fold(1.0, f64::max);
        vec.update(block.eigenvector_residual() / scale, || format!("spin {s}"));
        let r = block.phi_c.trace().re;
        rank &= (r - if s.is_integer() { 1.0 } else { 0.0 }).abs() < env.tol();
    }
    Ok((
        vec![
            eig.into_check("spectrum/eigenvalues vs [a+m]", env.tol()),
            vec.into_check("spectrum/eigenvector residual", env.tol()),
            Check::holds("spectrum/Phi_C rank", rank),
        ],
        BTreeMap::new(),
    ))
}

fn balance(env: &Env) -> Result<SuiteOutput> {
    let bal = relint::check_balanced(&env.g, &env.cd)?;
    let chr = relint::check_character_condition(&env.g, &env.cd)?;
    let agree = Check::holds("balance/balanced iff character", bal.passed == chr.passed);
    let mut grid_ok = true;
    let mut disagree = Vec::new();
    for k in -4..=2 {
        let g = GCharacter::new(0.5 * k as f64);
        let b = relint::check_balanced(&g, &env.cd)?.passed;
        let ch = relint::check_character_condition(&g, &env.cd)?.passed;
        if b != ch {
            grid_ok = false;
            disagree.push(g.s.to_string());
        }
    }
    let grid = Check::holds("balance/equivalence on s-grid", grid_ok).with_detail(if disagree.is_empty() {
        "s in {-2, -1.5, ..., 1}".to_string()
    } else {
        format!("disagree at s = {}", disagree.join(", "))
    });
    Ok((vec![bal, chr, agree, grid], BTreeMap::new()))
}

fn integral(env: &Env) -> Result<SuiteOutput> {
    let mut checks = Vec::new();
    let mut values = BTreeMap::new();
    let m = env.m();
    let psi = match relint::compute_weights(&env.g, &env.cd, m) {
        Ok(p) => p,
        Err(e @ Error::NotBalanced { .. }) => {
            return Ok((
                vec![Check::holds("integral/weights", false).with_detail(e.to_string())],
                values,
            ));
        }
        Err(e) => return Err(e),
    };
    for (k, w) in &psi.weights {
        values.insert(format!("mu[{k}]"), *w);
    }
    let mut closed = Worst::default();
    let mut positive = true;
    for (k, w) in &psi.weights {
        closed.update((w - relint::closed_form_weight(env.cd.ctx(), *k)).abs(), || {
            format!("m = {k}")
        });
        positive &= *w > 0.0;
    }
    checks.push(closed.into_check("integral/weights vs closed form", env.tol()));
    checks.push(Check::holds("integral/weights positive", positive));

    let sys = relint::invariance_system(&env.g, &env.cd, m)?;
    checks.push(
        Check::holds("integral/uniqueness (nullity 1)", sys.nullity == 1)
            .with_detail(format!("nullity {}", sys.nullity)),
    );

    let mut rng = env.rng(Suite::Integral);
    let samples: Vec<_> = (0..env.cfg.samples)
        .map(|_| {
            let twice = rng.gen_range(0..=2u32.min(m as u32));
            let radius = m - twice as i64;
            let r = rng.gen_range(0..=radius);
            let x = sample::stab(&mut rng, r);
            (x, sample::coeff(&mut rng, [Spin::from_twice(twice)]))
        })
        .collect();
    checks.push(relint::check_relative_invariance(&psi, &env.cd, &samples)?);

    let top = Spin::from_twice(env.cd.ctx().max_spin.twice().min(6));
    let mut lemma = Worst::default();
    for n1 in top.up_to() {
        lemma.update(env.cd.antipode_identity_residual(n1)?, || format!("spin {n1}"));
        for n2 in top.up_to() {
            lemma.update(env.cd.delta_identity_residual(n1, n2)?, || format!("{n1} ⊗ {n2}"));
        }
    }
    checks.push(lemma.into_check("integral/Phi_C antipode and coproduct identities", env.tol_derived()));
    // the factorization reaches |m| = 2·top, independent of M
    let wide = relint::compute_weights(&env.g, &env.cd, top.twice() as i64)?;
    let mut fact = relint::check_factorization(&wide, &env.cd, top)?;
    fact.tolerance = env.tol_derived();
    fact.passed = fact.residual <= fact.tolerance;
    checks.push(fact);
    Ok((checks, values))
}

fn haar(env: &Env) -> Result<SuiteOutput> {
    let ca = env.cd.coeff_algebra();
    let mut rng = env.rng(Suite::Haar);
    let spins: Vec<Spin> = env.cd.ctx().max_spin.up_to().collect();
    let pairs: Vec<(Spin, Spin)> = spins.iter().flat_map(|a| spins.iter().map(move |b| (*a, *b))).collect();
    let seeds: Vec<u64> = pairs.iter().map(|_| rng.gen()).collect();
    let per_pair = pairs
        .par_iter()
        .zip(seeds)
        .map(|((s1, s2), seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut worst: f64 = 0.0;
            for _ in 0..env.cfg.samples {
                let (x1, y1) = (sample::vector(&mut rng, s1.dim()), sample::vector(&mut rng, s1.dim()));
                let (x2, y2) = (sample::vector(&mut rng, s2.dim()), sample::vector(&mut rng, s2.dim()));
                worst = worst.max(ca.peter_weyl_residual((*s1, &x1, &y1), (*s2, &x2, &y2))?);
            }
            Ok(worst)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut pw = Worst::default();
    for ((s1, s2), r) in pairs.iter().zip(per_pair) {
        pw.update(r, || format!("{s1} x {s2}"));
    }

    let mut lowest = f64::INFINITY;
    let mut at = String::new();
    for s in env.cd.ctx().max_spin.up_to().filter(|s| s.twice() <= 4) {
        let basis: Vec<_> = (0..s.dim())
            .flat_map(|i| (0..s.dim()).map(move |j| CoeffElement::unit_coefficient(s, i, j)))
            .collect();
        let low = ca.gram(&basis)?.symmetric_eigen().eigenvalues.min();
        if low < lowest {
            lowest = low;
            at = format!("smallest Gram eigenvalue at spin {s}");
        }
    }
    let faithful = Check::at_least("haar/Gram positive definite", lowest, 0.0).with_detail(at);

    let mut modular = Worst::default();
    let small: Vec<Spin> = spins.iter().copied().filter(|s| s.twice() <= 2).collect();
    for k in 0..env.cfg.samples {
        let a = sample::coeff(&mut rng, small.clone());
        let b = sample::coeff(&mut rng, small.clone());
        let lhs = ca.haar(&ca.product(&a, &b)?);
        let rhs = ca.haar(&ca.product(&b, &ca.sigma_a(&a, -num_complex::Complex64::i()))?);
        modular.update((lhs - rhs).norm(), || format!("sample {k}"));
    }
    Ok((
        vec![
            pw.into_check("haar/Peter-Weyl relations", env.tol_derived()),
            faithful,
            modular.into_check("haar/modular property of sigma_A", env.tol_derived()),
        ],
        BTreeMap::new(),
    ))
}

fn gelfand(env: &Env) -> Result<SuiteOutput> {
    let ca = env.cd.coeff_algebra();
    let mut rng = env.rng(Suite::Gelfand);
    let top = (env.cd.ctx().max_spin.twice() / 2).min(2);
    let mut comm = Worst::default();
    for k in 0..env.cfg.samples {
        let pick = |rng: &mut ChaCha8Rng| -> Result<CoeffElement> {
            let s = Spin::integer(rng.gen_range(0..=top));
            let (xi, eta) = (sample::vector(rng, s.dim()), sample::vector(rng, s.dim()));
            env.cd.spherical(s, &xi, &eta)
        };
        let (x, y) = (pick(&mut rng)?, pick(&mut rng)?);
        let xy = ca.product(&x, &y)?;
        let yx = ca.product(&y, &x)?;
        comm.update(xy.distance(&yx), || format!("pair {k}"));
    }
    let mut half = Worst::default();
    let mut norm = Worst::default();
    for s in env.cd.ctx().max_spin.up_to().filter(|s| s.is_integer()) {
        let block = env.cd.block(s)?;
        half.update(max_abs_diff(&env.cd.delta_b_half(s)?, &block.phi_c)?, || {
            format!("spin {s}")
        });
        let v = block.phi_c_vector().expect("integer spin");
        let kv = env.cd.uqsu2().k_power(s, c(1.0)) * v;
        norm.update((v.dotc(&kv) - c(1.0)).norm(), || format!("spin {s}"));
    }
    Ok((
        vec![
            comm.into_check("gelfand/spherical functions commute", env.tol_derived()),
            half.into_check("gelfand/delta_B^(1/2) = Phi_C", env.tol()),
            norm.into_check("gelfand/<v, K v> = 1", env.tol()),
        ],
        BTreeMap::new(),
    ))
}

fn double_algebra(env: &Env) -> Result<std::result::Result<DoubleAlgebra, Check>> {
    match relint::compute_weights(&env.g, &env.cd, env.m()) {
        Ok(psi) => Ok(Ok(DoubleAlgebra::new(env.cd.clone(), psi))),
        Err(e @ Error::NotBalanced { .. }) => Ok(Err(
            Check::holds("double/phi_D exists", false).with_detail(e.to_string())
        )),
        Err(e) => Err(e),
    }
}

fn double_suite(env: &Env) -> Result<SuiteOutput> {
    let da = match double_algebra(env)? {
        Ok(da) => da,
        Err(chk) => return Ok((vec![chk], BTreeMap::new())),
    };
    let mut rng = env.rng(Suite::Double);
    let radius = (env.m() - 2).clamp(0, 2);
    let n = env.cfg.samples;
    let draw = |rng: &mut ChaCha8Rng| sample::double_element(&env.cd, rng, radius, 1, 2);
    let singles = (0..n).map(|_| draw(&mut rng)).collect::<Result<Vec<_>>>()?;
    let pairs = (0..n)
        .map(|_| Ok((draw(&mut rng)?, draw(&mut rng)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut inv = Vec::new();
    for _ in 0..n {
        let x = DualElement::k_power(env.cfg.q, c(rng.gen_range(-1.0..1.0)));
        let a = sample::coeff(&mut rng, [Spin::ZERO, Spin::HALF, Spin::ONE]);
        inv.push((x, draw(&mut rng)?, a));
    }
    let mut cols = Worst::default();
    for s in env.cd.ctx().max_spin.up_to().filter(|s| s.is_integer()) {
        let xi = sample::vector(&mut rng, s.dim());
        cols.update(double::column_sum_residual(&env.cd, s, &xi)?, || format!("spin {s}"));
    }
    Ok((
        vec![
            double::check_positivity(&da, &singles, env.tol())?,
            double::check_trace(&da, &pairs, env.tol_derived())?,
            double::check_modular(&da, &pairs, env.tol_derived())?,
            double::check_g_invariance(&da, &inv, env.tol_derived())?,
            cols.into_check("double/column-sum identity", env.tol_derived()),
        ],
        BTreeMap::new(),
    ))
}

fn regrep(env: &Env) -> Result<SuiteOutput> {
    let da = match double_algebra(env)? {
        Ok(da) => da,
        Err(chk) => return Ok((vec![chk], BTreeMap::new())),
    };
    let cutoff = env.cd.ctx().max_spin.twice() / 2;
    // products of two spin-1 elements need a margin of 2 in both factors
    if cutoff < 2 || env.m() < 4 {
        return Err(Error::InvalidContext(format!(
            "regrep needs max_spin >= 2 and truncation >= 4, got max_spin = {}, M = {}",
            env.cfg.max_spin,
            env.m()
        )));
    }
    let rep = RegularRep::new(&da, cutoff, env.m())?;
    let mut rng = env.rng(Suite::Regrep);
    let radius = (env.m() - 4).clamp(0, 2);
    let n = env.cfg.samples;
    let pairs = (0..n)
        .map(|_| {
            Ok((
                sample::double_element(&env.cd, &mut rng, radius, 1, 2)?,
                sample::double_element(&env.cd, &mut rng, radius, 1, 2)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let singles: Vec<_> = pairs.iter().map(|p| p.0.clone()).collect();
    Ok((
        vec![
            double::check_homomorphism(&rep, &pairs, env.tol_matrix())?,
            double::check_adjoint(&rep, &singles, env.tol_matrix())?,
            double::check_gns(&rep, &pairs, env.tol_derived())?,
            double::check_oracle(&rep, &pairs, env.tol_derived())?,
        ],
        BTreeMap::new(),
    ))
}

fn run_suite(env: &Env, suite: Suite) -> Result<SuiteOutput> {
    let out = match suite {
        Suite::Spectrum => spectrum(env),
        Suite::Balance => balance(env),
        Suite::Integral => integral(env),
        Suite::Haar => haar(env),
        Suite::Gelfand => gelfand(env),
        Suite::Double => double_suite(env),
        Suite::Regrep => regrep(env),
        Suite::All => unreachable!("expanded by run"),
    };
    let prefix = |mut chk: Check| {
        if !chk.name.contains('/') {
            chk.name = format!("{}/{}", suite.name(), chk.name);
        }
        chk
    };
    let out = out.map(|(checks, values)| (checks.into_iter().map(prefix).collect(), values));
    match out {
        Err(e @ Error::InvalidContext(_)) => Err(e),
        Err(e) => Ok((
            vec![Check::holds(format!("{}/completed", suite.name()), false).with_detail(e.to_string())],
            BTreeMap::new(),
        )),
        ok => ok,
    }
}

/// Runs one subcommand. Only configuration problems are returned as errors;
/// numerical failures become failing checks.
pub fn run(suite: Suite, cfg: &RunConfig, timing: bool) -> Result<Report> {
    let ctx = cfg.context()?;
    let env = Env {
        cfg: cfg.clone(),
        cd: Arc::new(Coideal::new(ctx)?),
        g: GCharacter::new(cfg.g_exponent),
    };
    let suites: Vec<Suite> = match suite {
        Suite::All => Suite::EACH.to_vec(),
        s => vec![s],
    };
    let results = suites
        .par_iter()
        .map(|s| {
            let start = Instant::now();
            let out = run_suite(&env, *s)?;
            Ok((out, start.elapsed().as_secs_f64() * 1e3))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut checks = Vec::new();
    let mut values = BTreeMap::new();
    let mut times = BTreeMap::new();
    for (s, ((c, v), ms)) in suites.iter().zip(results) {
        checks.extend(c);
        values.extend(v);
        times.insert(s.name().to_string(), ms);
    }
    Ok(Report {
        schema: SCHEMA.to_string(),
        subcommand: suite.name().to_string(),
        parameters: RunConfig {
            truncation: Some(cfg.truncation()),
            ..cfg.clone()
        },
        passed: checks.iter().all(|c| c.passed),
        checks,
        values,
        timing_ms: timing.then_some(times),
    })
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("QSL2R_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| Error::InvalidContext(format!("QSL2R_THREADS must be a positive integer, got {v:?}")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| Error::Internal(e.to_string()))
}

/// Parses arguments, runs, prints, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let outcome = thread_pool().and_then(|pool| pool.install(|| run(cli.suite, &cli.config, cli.timing)));
    let report = match outcome {
        Ok(r) => r,
        Err(e) => {
            eprintln!("qsl2r: {e}");
            return 2;
        }
    };
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    match cli.config.format {
        Format::Text => print!("{}", report.to_text()),
        Format::Json => println!("{json}"),
    }
    if let Some(path) = &cli.report {
        if let Err(e) = std::fs::write(path, format!("{json}\n")) {
            eprintln!("qsl2r: cannot write {}: {e}", path.display());
            return 2;
        }
    }
    report.exit_code()
}
