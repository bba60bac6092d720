//! Verification suites behind `verify`.
//!
//! Every suite is a pure function of its parameters. Random waves come from
//! `ChaCha8Rng::seed_from_u64(seed + index)`, so a report is reproducible for a
//! fixed seed regardless of the worker count.

use crate::dynamics::{
    auxiliary_identity_suite, e4_symmetry_suite, ehrenfest_check, lrl_algebra_suite, lrl_factor, lrl_forms_check,
    radius_shift_residual, spectrum_from_symmetry, uncertainty_check, v2_h0_relation_check, v2_h0_square_form_check,
    velocity_commutator_check, velocity_superop, AuxOperatorSet, Check, SymmetryVerdict, LRL_TOLERANCE,
};
use crate::fock::{normal_number_power_exact, FockIndex, LadderKind, Mode, TruncatedFockSpace};
use crate::hamiltonian::{
    bound_energy, build_radial_hamiltonian, diagonalize, reflection_check, solve_radial_closed_form, ClosedFormCase,
    Family, SpectrumEnd,
};
use crate::opwave::{
    angular_momentum_superop, build_psi_jm, levi_civita, pauli, radial_norm_formula, window_abs_residual, AngularLabel,
    OpWave, RadialVector, SuperOp,
};
use crate::ordering::{falling_factorial, normal_exponential, normal_power_eigenvalue};
use crate::specfun::{
    confluent_limit_residual, euler_transform_residual, gamma, hyp1f1, hyp2f1, kummer_residual, SpecResult,
};
use nalgebra::DMatrix;
use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Algebra,
    Ordering,
    Specfun,
    Dynamics,
    Lrl,
    All,
}

impl Suite {
    pub const EACH: [Suite; 5] = [Suite::Algebra, Suite::Ordering, Suite::Specfun, Suite::Dynamics, Suite::Lrl];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Algebra => "algebra",
            Suite::Ordering => "ordering",
            Suite::Specfun => "specfun",
            Suite::Dynamics => "dynamics",
            Suite::Lrl => "lrl",
            Suite::All => "all",
        }
    }

    pub fn members(self) -> Vec<Suite> {
        match self {
            Suite::All => Self::EACH.to_vec(),
            s => vec![s],
        }
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Suite as clap::ValueEnum>::from_str(s, true)
    }
}

/// Knobs shared by the suites; `None` picks the suite's own default.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteParams {
    pub lambda: Option<f64>,
    pub q: Option<f64>,
    pub n_max: Option<usize>,
    pub seed: u64,
    pub samples: usize,
    pub threads: usize,
    pub tolerance: Option<f64>,
}

impl Default for SuiteParams {
    fn default() -> Self {
        Self {
            lambda: None,
            q: None,
            n_max: None,
            seed: 7,
            samples: 20,
            threads: 1,
            tolerance: None,
        }
    }
}

impl SuiteParams {
    fn tol(&self, default: f64) -> f64 {
        self.tolerance.unwrap_or(default)
    }
}

pub fn run_suite(suite: Suite, params: &SuiteParams) -> Vec<Check> {
    match suite {
        Suite::Algebra => algebra_suite(params),
        Suite::Ordering => ordering_suite(params),
        Suite::Specfun => specfun_suite(params),
        Suite::Dynamics => dynamics_suite(params),
        Suite::Lrl => lrl_suite(params),
        Suite::All => Suite::EACH.iter().flat_map(|&s| run_suite(s, params)).collect(),
    }
}

/// Evaluate `f(0..count)` on up to `threads` scoped workers, results in index order.
pub fn par_map<T: Send>(threads: usize, count: usize, f: impl Fn(usize) -> T + Sync) -> Vec<T> {
    let threads = threads.clamp(1, count.max(1));
    if threads == 1 {
        return (0..count).map(&f).collect();
    }
    let f = &f;
    let mut slots: Vec<Option<T>> = (0..count).map(|_| None).collect();
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|t| scope.spawn(move || (t..count).step_by(threads).map(|i| (i, f(i))).collect::<Vec<_>>()))
            .collect();
        for h in handles {
            for (i, v) in h.join().expect("suite worker panicked") {
                slots[i] = Some(v);
            }
        }
    });
    slots.into_iter().map(|v| v.expect("every index filled")).collect()
}

pub fn seeded_rng(seed: u64, index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(index as u64))
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    values
        .into_iter()
        .fold(0.0, |acc: f64, v| if v.is_nan() || acc.is_nan() { f64::NAN } else { acc.max(v) })
}

/// Merge per-sample check lists by name, keeping the worst residual.
fn merge_samples(samples: Vec<Vec<Check>>) -> Vec<Check> {
    let mut merged: Vec<Check> = Vec::new();
    for list in samples {
        for c in list {
            match merged.iter_mut().find(|m| m.name == c.name) {
                Some(m) => m.residual = worst([m.residual, c.residual]),
                None => merged.push(c),
            }
        }
    }
    merged
}

// ---------------------------------------------------------------------------
// algebra

type Dense = DMatrix<Complex64>;

fn coordinate_matrices(space: &TruncatedFockSpace, lambda: f64) -> Vec<Dense> {
    let lower: Vec<Dense> = Mode::BOTH.iter().map(|&m| space.ladder(LadderKind::lower(m)).entries).collect();
    let raise: Vec<Dense> = Mode::BOTH.iter().map(|&m| space.ladder(LadderKind::raise(m)).entries).collect();
    (0..3)
        .map(|i| {
            let s = pauli(i);
            let mut x = Dense::zeros(space.dim(), space.dim());
            for a in 0..2 {
                for b in 0..2 {
                    if s[a][b] != Complex64::new(0.0, 0.0) {
                        x += (&raise[a] * &lower[b]) * (s[a][b] * lambda);
                    }
                }
            }
            x
        })
        .collect()
}

/// Fock-space commutators, coordinate algebra, rotations and norm bookkeeping.
pub fn algebra_suite(p: &SuiteParams) -> Vec<Check> {
    let n_max = p.n_max.unwrap_or(12);
    let lam = p.lambda.unwrap_or(0.5);
    let tol = p.tol(1e-12);
    let space = TruncatedFockSpace::new(n_max);
    let dim = space.dim();
    let id = Dense::identity(dim, dim);
    let comm = |a: &Dense, b: &Dense| a * b - b * a;

    let mut canonical: f64 = 0.0;
    for a in Mode::BOTH {
        for b in Mode::BOTH {
            let la = space.ladder(LadderKind::lower(a)).entries;
            let lb = space.ladder(LadderKind::lower(b)).entries;
            let ra = space.ladder(LadderKind::raise(a)).entries;
            let rb = space.ladder(LadderKind::raise(b)).entries;
            let delta = if a == b { id.clone() } else { Dense::zeros(dim, dim) };
            canonical = canonical
                .max(space.window_max_abs(&(comm(&la, &rb) - delta), 1))
                .max(space.window_max_abs(&comm(&la, &lb), 1))
                .max(space.window_max_abs(&comm(&ra, &rb), 1));
        }
    }

    let x = coordinate_matrices(&space, lam);
    let mut coord: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let mut rhs = Dense::zeros(dim, dim);
            for k in 0..3 {
                let e = levi_civita(i, j, k);
                if e != 0.0 {
                    rhs += &x[k] * Complex64::new(0.0, 2.0 * lam * e);
                }
            }
            coord = coord.max(space.window_max_abs(&(comm(&x[i], &x[j]) - rhs), 1));
        }
    }
    let r = space.diagonal_by_level(|n| re(lam * (n as f64 + 1.0)));
    let radius_commutes = worst((0..3).map(|i| space.window_max_abs(&comm(&x[i], &r), 1)));
    let xx = x.iter().fold(Dense::zeros(dim, dim), |acc, xi| acc + xi * xi);
    let radius_square = space.window_max_abs(&(&r * &r - xx - &id * re(lam * lam)), 1);

    let l: Vec<SuperOp> = (0..3).map(angular_momentum_superop).collect();
    let v: Vec<SuperOp> = (0..3).map(|k| velocity_superop(k, lam)).collect();
    let eps = |ops: &[SuperOp], i: usize, j: usize| {
        SuperOp::sum((0..3).filter(|&k| levi_civita(i, j, k) != 0.0).map(|k| ops[k].scaled(Complex64::new(0.0, levi_civita(i, j, k)))))
    };
    let samples = par_map(p.threads, p.samples.min(5).max(1), |s| {
        let psi = OpWave::random_balanced(lam, n_max, &mut seeded_rng(p.seed, s));
        let mut rot: f64 = 0.0;
        let mut vec: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                rot = rot.max(window_abs_residual(&l[i].commutator(&l[j]), &eps(&l, i, j), &psi));
                vec = vec.max(window_abs_residual(&l[i].commutator(&v[j]), &eps(&v, i, j), &psi));
            }
        }
        (rot, vec)
    });

    let norm_tol = p.tol(1e-12);
    let norm_rel = par_map(p.threads, 3, |j| {
        let mut rng = seeded_rng(p.seed ^ 0x4e4f524d, j);
        let len = n_max - j + 1;
        worst((0..20).map(|_| {
            let degree = rng.gen_range(0..=3usize);
            let poly: Vec<Complex64> = (0..=degree).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let radial = RadialVector::from_fn(j, lam, len, |n| {
                poly.iter().rev().fold(re(0.0), |acc, c| acc * n as f64 + c)
            });
            let psi = build_psi_jm(AngularLabel::new(j, j as i64).expect("valid label"), &radial, n_max).expect("fits");
            let direct = psi.norm_sq();
            (radial_norm_formula(&radial) - direct).abs() / direct
        }))
    });

    vec![
        Check::new("canonical commutators [a_a, a_b^dag] = delta_ab", canonical, tol),
        Check::new("coordinate algebra [x_i, x_j] = 2i lambda eps_ijk x_k", coord, tol),
        Check::new("radius commutes with coordinates [x_i, r] = 0", radius_commutes, tol),
        Check::new("radius constraint r^2 - x_j x_j = lambda^2", radius_square, tol),
        Check::new("rotation algebra [L_i, L_j] = i eps_ijk L_k", worst(samples.iter().map(|s| s.0)), tol),
        Check::new("velocity is a rotation vector [L_i, V_j] = i eps_ijk V_k", worst(samples.iter().map(|s| s.1)), tol),
        Check::new("angular norm formula equals weighted trace", worst(norm_rel), norm_tol),
    ]
}

// ---------------------------------------------------------------------------
// ordering

/// Normal powers of the number operator and the normal exponential.
pub fn ordering_suite(p: &SuiteParams) -> Vec<Check> {
    let top = p.n_max.unwrap_or(30);
    let mismatches = par_map(p.threads, top + 1, |n| {
        let mut bad = 0usize;
        for n1 in 0..=n {
            let state = FockIndex::new(n1, n - n1);
            for k in 0..=n {
                let brute = BigInt::from(normal_number_power_exact(k, state));
                if brute != falling_factorial(n, k) {
                    bad += 1;
                }
            }
        }
        bad
    });
    let positive = mismatches.iter().sum::<usize>() as f64;

    // Negative powers: the exact rising factorial from ladder words fixes
    // the float eigenvalue to rounding.
    let lam = p.lambda.unwrap_or(0.7);
    let negative = worst(par_map(p.threads, top + 1, |n| {
        worst((1..=top.min(12)).map(|k| {
            let rising = normal_number_power_exact(k, FockIndex::new(n + k, 0));
            let expect = 1.0 / (lam.powi(k as i32) * biguint_to_f64(&rising));
            (normal_power_eigenvalue(-(k as i64), n, lam) - expect).abs() / expect
        }))
    }));

    let mut rng = seeded_rng(p.seed ^ 0x4558_5030, 0);
    let exponential = worst((0..50).map(|_| {
        let modulus = rng.gen_range(0.1..3.0);
        let angle = rng.gen_range(-std::f64::consts::FRAC_PI_8..std::f64::consts::FRAC_PI_8);
        let beta = Complex64::from_polar(modulus, angle);
        let lam = rng.gen_range(0.05..1.0);
        let n = rng.gen_range(0..=40usize);
        let z = beta * lam;
        let mut term = re(1.0);
        let mut sum = term;
        for k in 0..n {
            term = term * z * ((n - k) as f64 / (k + 1) as f64);
            sum += term;
        }
        (normal_exponential(beta, n, lam) - sum).norm() / sum.norm()
    }));

    vec![
        Check::new("normal power eigenvalue :(lambda N)^k: = lambda^k n!/(n-k)! (exact mismatches)", positive, 0.0),
        Check::new("negative normal power :(lambda N)^-k: = lambda^-k n!/(n+k)!", negative, p.tol(1e-14)),
        Check::new("normal exponential :exp(beta rho): = (1 + lambda beta)^N", exponential, p.tol(1e-13)),
    ]
}

fn biguint_to_f64(v: &BigUint) -> f64 {
    v.to_string().parse().expect("decimal digits")
}

// ---------------------------------------------------------------------------
// special functions

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// 5 x 4 x 5 grid of `(a, c, x)`.
pub fn kummer_grid() -> Vec<(Complex64, Complex64, Complex64)> {
    let a = [c(-3.0, 0.0), c(0.5, 0.0), c(1.5, 0.7), c(-0.3, -1.2), c(2.0, 0.0)];
    let cc = [c(1.0, 0.0), c(2.5, 0.0), c(4.0, 1.0), c(0.7, -0.4)];
    let x = [c(-2.0, 0.0), c(0.3, 0.0), c(1.7, 0.5), c(-0.6, 2.0), c(4.0, -1.0)];
    let mut out = Vec::with_capacity(100);
    for &ai in &a {
        for &ci in &cc {
            for &xi in &x {
                out.push((ai, ci, xi));
            }
        }
    }
    out
}

/// Largest relative Kummer-transformation defect over the grid.
pub fn kummer_grid_residual() -> SpecResult<f64> {
    let mut out: f64 = 0.0;
    for (a, cc, x) in kummer_grid() {
        let scale = ((-x / 2.0).exp() * hyp1f1(a, cc, x)?).norm().max(1.0);
        out = out.max(kummer_residual(a, cc, x)? / scale);
    }
    Ok(out)
}

/// Largest `|Gamma(z+1) - z Gamma(z)| / |Gamma(z+1)|` on a 10 x 10 grid.
pub fn gamma_recurrence_residual() -> SpecResult<f64> {
    let mut out: f64 = 0.0;
    for i in 0..10 {
        for k in 0..10 {
            let z = c(-4.35 + 1.1 * i as f64, -5.0 + 1.05 * k as f64);
            let next = gamma(z + 1.0)?;
            out = out.max((next - z * gamma(z)?).norm() / next.norm());
        }
    }
    Ok(out)
}

/// Worst deviation of the observed convergence order of the confluent limit from 1.
pub fn confluent_limit_order() -> SpecResult<f64> {
    let cases = [(c(0.5, 0.0), c(1.5, 0.0), c(0.8, 0.0)), (c(-2.0, 0.0), c(2.0, 0.0), c(1.3, 0.0)), (c(1.2, 0.4), c(3.0, 0.0), c(-0.9, 0.6))];
    let mut out: f64 = 0.0;
    for (a, cc, x) in cases {
        let r3 = confluent_limit_residual(a, cc, x, 1e3)?;
        let r4 = confluent_limit_residual(a, cc, x, 1e4)?;
        out = out.max(((r3 / r4).log10() - 1.0).abs());
    }
    Ok(out)
}

pub fn euler_transform_grid_residual() -> SpecResult<f64> {
    let mut out: f64 = 0.0;
    for &a in &[c(0.5, 0.0), c(-1.5, 0.3), c(2.0, 0.0)] {
        for &b in &[c(1.0, 0.0), c(0.3, -0.2), c(-2.0, 0.0)] {
            for &cc in &[c(2.5, 0.0), c(1.2, 0.6)] {
                for &x in &[c(0.2, 0.0), c(-0.3, 0.1), c(0.1, -0.35)] {
                    let scale = hyp2f1(a, b, cc, x)?.norm().max(1.0);
                    out = out.max(euler_transform_residual(a, b, cc, x)? / scale);
                }
            }
        }
    }
    Ok(out)
}

fn spec_check(name: &str, value: SpecResult<f64>, tol: f64) -> Check {
    Check::new(name, value.unwrap_or(f64::NAN), tol)
}

/// Hypergeometric identities, the gamma recurrence and the closed-form radial vectors.
pub fn specfun_suite(p: &SuiteParams) -> Vec<Check> {
    let lam = p.lambda.unwrap_or(0.5);
    let alpha = p.q.unwrap_or(1.0).abs().max(f64::MIN_POSITIVE);
    let len = p.n_max.unwrap_or(40);
    let reflection = worst((1..=3usize).flat_map(|n| (0..n.min(3)).map(move |j| (n, j))).map(|(n, j)| {
        reflection_check(n, j, alpha, lam, len).unwrap_or(f64::NAN)
    }));
    let closed = worst((1..=3usize).flat_map(|n| (0..n).map(move |j| (n, j))).flat_map(|(n, j)| {
        [Family::I, Family::II].map(|family| closed_form_eigen_residual(family, n, j, alpha, lam, len).unwrap_or(f64::NAN))
    }));
    vec![
        spec_check("Kummer transformation on a 100-point grid", kummer_grid_residual(), p.tol(1e-12)),
        spec_check("gamma recurrence Gamma(z+1) = z Gamma(z)", gamma_recurrence_residual(), p.tol(1e-12)),
        spec_check("confluent limit converges as 1/b (order defect)", confluent_limit_order(), 0.05),
        spec_check("Euler transformation of 2F1", euler_transform_grid_residual(), p.tol(1e-12)),
        Check::new("reflection R^II(-alpha) = (-1)^N R^I(alpha)", reflection, p.tol(1e-10)),
        Check::new("closed-form bound vectors solve the radial recurrence", closed, p.tol(1e-8)),
    ]
}

/// Weighted eigen-residual of the closed-form bound vector against the radial operator.
pub fn closed_form_eigen_residual(family: Family, n: usize, j: usize, alpha: f64, lambda: f64, n_max: usize) -> Result<f64, String> {
    let n_max = n_max.max(j + 4);
    let (q, case) = match family {
        Family::I => (alpha, ClosedFormCase::BoundI { n, alpha }),
        Family::II => (-alpha, ClosedFormCase::BoundII { n, alpha: -alpha }),
    };
    let h = build_radial_hamiltonian(j, q, lambda, n_max).map_err(|e| e.to_string())?;
    let radial = solve_radial_closed_form(case, j, lambda, h.window_len + 1).map_err(|e| e.to_string())?;
    let energy = bound_energy(family, n, j, q, lambda).map_err(|e| e.to_string())?.value;
    Ok(h.eigen_residual(energy, &radial))
}

// ---------------------------------------------------------------------------
// dynamics

pub const EHRENFEST_PRINTED: &str = "Ehrenfest theorem for V, printed form";
pub const EHRENFEST_REORDERED: &str = "Ehrenfest theorem for V, potential derivatives acting first";
pub const EHRENFEST_CORRECTED: &str = "Ehrenfest theorem for V, corrected coefficients";

/// Velocity relations, E(4) symmetry and the Ehrenfest theorem on seeded random waves.
pub fn dynamics_suite(p: &SuiteParams) -> Vec<Check> {
    let n_max = p.n_max.unwrap_or(10);
    let lam = p.lambda.unwrap_or(0.5);
    let q = p.q.unwrap_or(1.0);
    let tol = p.tol(1e-10);
    let per_sample = par_map(p.threads, p.samples.max(1), |s| {
        let psi = OpWave::random_balanced(lam, n_max, &mut seeded_rng(p.seed, s));
        let uncertainty = worst((0..3).flat_map(|i| (0..3).map(move |j| (i, j))).map(|(i, j)| uncertainty_check(i, j, &psi)));
        let mut checks = vec![
            Check::new("uncertainty [V_i, X_j] = -i delta_ij (1 - lambda^2 H0)", uncertainty, tol),
            Check::new("velocity components commute [V_i, V_j] = 0", velocity_commutator_check(&psi), tol),
            Check::new("V^2/2 = H0 (1 - lambda^2 H0/2)", v2_h0_relation_check(&psi), tol),
            Check::new("(1/lambda^2 - H0)^2 = (1/lambda^2)(1/lambda^2 - V^2)", v2_h0_square_form_check(&psi), tol),
        ];
        checks.extend(e4_symmetry_suite(&psi, tol));
        let e = ehrenfest_check(q, &psi);
        checks.push(Check::new(EHRENFEST_PRINTED, e.printed, tol));
        checks.push(Check::new(EHRENFEST_REORDERED, e.reordered, tol));
        checks.push(Check::new(EHRENFEST_CORRECTED, e.corrected, tol));
        checks
    });
    merge_samples(per_sample)
}

// ---------------------------------------------------------------------------
// LRL vector and the auxiliary identities

/// All `m` states of one radial eigenvector.
pub fn multiplet(j: usize, radial: &RadialVector, n_max: usize) -> Vec<OpWave> {
    (-(j as i64)..=j as i64)
        .map(|m| build_psi_jm(AngularLabel::new(j, m).expect("valid label"), radial, n_max).expect("fits"))
        .collect()
}

/// One labelled eigenspace sample for the LRL suite.
pub struct LrlSample {
    pub label: String,
    pub energy: f64,
    pub verdict: Result<SymmetryVerdict, String>,
}

/// Diagonalize sector `j` and run the LRL suite on the eigenvector chosen by `pick`.
pub fn lrl_sample(
    label: &str,
    j: usize,
    q: f64,
    lambda: f64,
    n_max: usize,
    end: SpectrumEnd,
    pick: impl Fn(&[(f64, RadialVector)]) -> Option<usize>,
) -> LrlSample {
    let run = || -> Result<(f64, SymmetryVerdict), String> {
        let h = build_radial_hamiltonian(j, q, lambda, n_max).map_err(|e| e.to_string())?;
        let pairs = diagonalize(&h, h.window_len, end).map_err(|e| e.to_string())?;
        let k = pick(&pairs).ok_or_else(|| format!("no eigenvalue matches the {label} selection"))?;
        let (e, r) = &pairs[k];
        let verdict = lrl_algebra_suite(*e, q, lambda, &multiplet(j, r, n_max)).map_err(|e| e.to_string())?;
        Ok((*e, verdict))
    };
    match run() {
        Ok((energy, verdict)) => LrlSample {
            label: label.to_string(),
            energy,
            verdict: Ok(verdict),
        },
        Err(e) => LrlSample {
            label: label.to_string(),
            energy: f64::NAN,
            verdict: Err(e),
        },
    }
}

/// The eigenspaces probed by the LRL suite: ground state, the `n = 2, j = 1`
/// multiplet, a quasi-continuum state and the mirror ground state.
pub fn lrl_samples(q: f64, lambda: f64, n_max: usize, threads: usize) -> Vec<LrlSample> {
    let q = q.abs();
    let upper = 2.0 / (lambda * lambda);
    par_map(threads, 4, |k| match k {
        0 => lrl_sample("ground state", 0, q, lambda, n_max, SpectrumEnd::Lowest, |_| Some(0)),
        1 => lrl_sample("n=2, j=1 multiplet", 1, q, lambda, n_max, SpectrumEnd::Lowest, |_| Some(0)),
        2 => lrl_sample("scattering state", 1, q, lambda, n_max, SpectrumEnd::Lowest, |p| {
            p.iter().position(|(e, _)| *e > 0.25 * upper && *e < 0.75 * upper)
        }),
        _ => lrl_sample("mirror ground state", 0, -q, lambda, n_max, SpectrumEnd::Highest, |_| Some(0)),
    })
}

pub fn lrl_suite(p: &SuiteParams) -> Vec<Check> {
    let lam = p.lambda.unwrap_or(1.0);
    let q = p.q.unwrap_or(2.0);
    let n_max = p.n_max.unwrap_or(40);
    let tol = p.tol(LRL_TOLERANCE);
    let mut checks = Vec::new();
    for sample in lrl_samples(q, lam, n_max, p.threads) {
        match sample.verdict {
            Ok(v) => {
                for c in v.checks {
                    checks.push(Check::new(format!("{}: {}", sample.label, c.name), c.residual, tol));
                }
                if let Some(f) = v.measured_factor {
                    let expect = lrl_factor(sample.energy, lam);
                    checks.push(Check::new(
                        format!("{}: measured [A,A] factor = -2E + lambda^2 E^2", sample.label),
                        (f - expect).abs() / expect.abs(),
                        tol,
                    ));
                }
            }
            Err(e) => checks.push(Check::new(format!("{}: {e}", sample.label), f64::NAN, tol)),
        }
    }

    let symmetry = worst((1..=5usize).map(|n| match spectrum_from_symmetry(q, lam, n) {
        Ok((lo, hi)) => {
            let want_lo = bound_energy(Family::I, n, 0, q.abs(), lam).map(|l| l.value).unwrap_or(f64::NAN);
            let want_hi = bound_energy(Family::II, n, 0, -q.abs(), lam).map(|l| l.value).unwrap_or(f64::NAN);
            worst([((lo - want_lo) / want_lo).abs(), ((hi - want_hi) / want_hi).abs()])
        }
        Err(_) => f64::NAN,
    }));
    checks.push(Check::new("energies from the second Casimir equal the closed forms", symmetry, p.tol(1e-12)));
    checks.extend(appendix_suite(lam, p));
    checks
}

/// Auxiliary operator identities on seeded random waves at `n_max = 10`.
pub fn appendix_suite(lambda: f64, p: &SuiteParams) -> Vec<Check> {
    let tol = p.tol(1e-10);
    let energy = -0.4;
    let per_sample = par_map(p.threads, p.samples.clamp(1, 4), |s| {
        let psi = OpWave::random_balanced(lambda, 10, &mut seeded_rng(p.seed ^ 0x4150_5045, s));
        let aux = AuxOperatorSet::new(lambda, energy);
        let mut checks = auxiliary_identity_suite(&psi, energy, tol);
        checks.extend(aux.invariant_checks(&psi, tol));
        let norm = worst((0..3).map(|i| (aux.ehrenfest_normalization(i, &psi) - 0.5).abs()));
        checks.push(Check::new("Ehrenfest W^i = W_i / (2 r) normalization", norm, tol));
        checks.push(Check::new("symmetrized LRL equals its W' rewriting", lrl_forms_check(p.q.unwrap_or(2.0), &psi), tol));
        checks
    });
    let mut checks = merge_samples(per_sample);
    let shift = worst([-2, -1, 1, 2, 3].map(|k| radius_shift_residual(lambda, 10, k)));
    checks.push(Check::new("radius shifts through ladders a r^k = (r + lambda)^k a", shift, tol));
    checks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn par_map_keeps_index_order() {
        let serial = par_map(1, 17, |i| i * i);
        assert_eq!(par_map(4, 17, |i| i * i), serial);
        assert_eq!(par_map(8, 0, |i| i), Vec::<usize>::new());
    }

    #[test]
    fn merge_keeps_worst_and_propagates_nan() {
        let a = vec![Check::new("x", 1e-3, 1.0), Check::new("y", 2.0, 1.0)];
        let b = vec![Check::new("x", 5e-3, 1.0), Check::new("y", f64::NAN, 1.0)];
        let m = merge_samples(vec![a, b]);
        assert_eq!(m[0].residual, 5e-3);
        assert!(m[1].residual.is_nan());
        assert!(!m[1].pass());
    }

    #[test]
    fn kummer_grid_has_100_points() {
        assert_eq!(kummer_grid().len(), 100);
    }

    #[test]
    fn algebra_suite_passes_small() {
        let p = SuiteParams {
            n_max: Some(6),
            samples: 2,
            ..Default::default()
        };
        for c in algebra_suite(&p) {
            assert!(c.pass(), "{c:?}");
        }
    }

    #[test]
    fn ordering_suite_passes_small() {
        let p = SuiteParams {
            n_max: Some(10),
            ..Default::default()
        };
        for c in ordering_suite(&p) {
            assert!(c.pass(), "{c:?}");
        }
    }

    #[test]
    fn suites_are_deterministic_across_thread_counts() {
        let one = SuiteParams {
            n_max: Some(6),
            samples: 3,
            ..Default::default()
        };
        let four = SuiteParams { threads: 4, ..one.clone() };
        assert_eq!(dynamics_suite(&one), dynamics_suite(&four));
    }

    #[test]
    fn suite_names_parse() {
        assert_eq!("LRL".parse::<Suite>(), Ok(Suite::Lrl));
        assert!("nope".parse::<Suite>().is_err());
        assert_eq!(Suite::All.members().len(), 5);
    }
}
