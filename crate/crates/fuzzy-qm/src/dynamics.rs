//! Velocity operator, the kinematic E(4) algebra and the Laplace-Runge-Lenz
//! vector.
//!
//! All identities are evaluated as residuals of super-operator equations on
//! a concrete wave. A residual is the weighted norm of the difference on the
//! valid window divided by the largest norm among the individual terms and
//! the wave itself, which keeps it scale-invariant.

use crate::fock::{LadderKind, Mode, Step, TruncatedFockSpace};
use crate::hamiltonian::{check_lambda, energy_attractive, hamiltonian_superop};
use crate::opwave::{angular_momentum_superop, coordinate_superop, left_coordinate, levi_civita, pauli, OpWave, Side, SuperOp};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("state {index} fails the eigenstate gate at E = {energy}: residual {residual:e}")]
    NotEigenstate { index: usize, energy: f64, residual: f64 },
    #[error("no states supplied")]
    NoStates,
    #[error("principal number must be at least 1")]
    BadPrincipal,
}

/// One named identity with its measured residual.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            residual,
            tolerance,
        }
    }

    pub fn pass(&self) -> bool {
        self.residual.is_finite() && self.residual <= self.tolerance
    }
}

// ---------------------------------------------------------------------------
// residual machinery

/// Residual of `sum(lhs) = sum(rhs)` restricted to levels `<= n_max - degree`.
pub fn relative_residual(psi: &OpWave, degree: usize, lhs: &[OpWave], rhs: &[OpWave]) -> f64 {
    let Some(top) = psi.n_max().checked_sub(degree) else {
        return f64::NAN;
    };
    let mut scale = psi.restrict(top).norm();
    let mut diff = OpWave::zero(psi.lambda(), psi.n_max());
    for (terms, sign) in [(lhs, 1.0), (rhs, -1.0)] {
        for t in terms {
            let r = t.restrict(top);
            scale = scale.max(r.norm());
            diff = &diff + &r.scale(re(sign));
        }
    }
    if scale == 0.0 {
        0.0
    } else {
        diff.norm() / scale
    }
}

fn max_degree(ops: &[&SuperOp]) -> usize {
    ops.iter().map(|o| o.degree).max().unwrap_or(0)
}

fn identity_residual(psi: &OpWave, lhs: &[&SuperOp], rhs: &[&SuperOp]) -> f64 {
    let degree = max_degree(lhs).max(max_degree(rhs));
    let l: Vec<OpWave> = lhs.iter().map(|o| o.apply(psi)).collect();
    let r: Vec<OpWave> = rhs.iter().map(|o| o.apply(psi)).collect();
    relative_residual(psi, degree, &l, &r)
}

/// Residual of `P Q + sign Q P = sum(rhs)`.
fn bracket_residual(psi: &OpWave, p: &SuperOp, q: &SuperOp, sign: f64, rhs: &[&SuperOp]) -> f64 {
    let degree = (p.degree + q.degree).max(max_degree(rhs));
    let pq = p.apply(&q.apply(psi));
    let qp = q.apply(&p.apply(psi)).scale(re(sign));
    let r: Vec<OpWave> = rhs.iter().map(|o| o.apply(psi)).collect();
    relative_residual(psi, degree, &[pq, qp], &r)
}

fn commutator_residual(psi: &OpWave, p: &SuperOp, q: &SuperOp, rhs: &[&SuperOp]) -> f64 {
    bracket_residual(psi, p, q, -1.0, rhs)
}

fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |a: f64, b| if b.is_nan() || a.is_nan() { f64::NAN } else { a.max(b) })
}

// ---------------------------------------------------------------------------
// building blocks

/// `a_alpha^dag Psi a_beta + sign a_beta Psi a_alpha^dag`.
fn pair_action(psi: &OpWave, alpha: Mode, beta: Mode, sign: f64) -> OpWave {
    let t1 = psi.left(Step::Raise(alpha)).right(Step::Lower(beta));
    let t2 = psi.left(Step::Lower(beta)).right(Step::Raise(alpha));
    &t1 + &t2.scale(re(sign))
}

/// `[a_beta, [a_alpha^dag, Psi]]`.
fn double_bracket(psi: &OpWave, alpha: Mode, beta: Mode) -> OpWave {
    let inner = &psi.left(Step::Raise(alpha)) - &psi.right(Step::Raise(alpha));
    &inner.left(Step::Lower(beta)) - &inner.right(Step::Lower(beta))
}

/// Contract a pair action with `sigma^k_{ab}` or, for `None`, with `delta_{ab}`.
fn contracted(psi: &OpWave, k: Option<usize>, action: impl Fn(&OpWave, Mode, Mode) -> OpWave) -> OpWave {
    let mut acc = OpWave::zero(psi.lambda(), psi.n_max());
    for a in Mode::BOTH {
        for b in Mode::BOTH {
            let c = match k {
                Some(k) => pauli(k)[a.index()][b.index()],
                None if a == b => ONE,
                None => ZERO,
            };
            if c != ZERO {
                acc = &acc + &action(psi, a, b).scale(c);
            }
        }
    }
    acc
}

fn axis_name(k: Option<usize>) -> String {
    k.map(|k| (k + 1).to_string()).unwrap_or_default()
}

pub fn w_pair(alpha: Mode, beta: Mode) -> SuperOp {
    SuperOp::new(format!("w{}{}", alpha.index() + 1, beta.index() + 1), 2, move |p| pair_action(p, alpha, beta, -1.0))
}

pub fn zeta_pair(alpha: Mode, beta: Mode) -> SuperOp {
    SuperOp::new(format!("zeta{}{}", alpha.index() + 1, beta.index() + 1), 2, move |p| pair_action(p, alpha, beta, 1.0))
}

/// `w` for `None` and `w_k = sigma^k_{ab} w_{ab}` otherwise.
pub fn w_contracted(k: Option<usize>) -> SuperOp {
    SuperOp::new(format!("w{}", axis_name(k)), 2, move |p| contracted(p, k, |w, a, b| pair_action(w, a, b, -1.0)))
}

pub fn zeta_contracted(k: Option<usize>) -> SuperOp {
    SuperOp::new(format!("zeta{}", axis_name(k)), 2, move |p| contracted(p, k, |w, a, b| pair_action(w, a, b, 1.0)))
}

/// Ladder form of `W`: `sum [a_a, [a_a^dag, Psi]]` or `sigma^k_{ab} [a_b, [a_a^dag, Psi]]`.
pub fn big_w_ladder(k: Option<usize>) -> SuperOp {
    SuperOp::new(format!("W{}", axis_name(k)), 2, move |p| contracted(p, k, double_bracket))
}

/// Multiplication by `f(r_hat)` with `r_hat = (r^L + r^R) / 2`.
pub fn radius_hat_superop(label: &str, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> SuperOp {
    SuperOp::new(label, 0, move |w| {
        let lam = w.lambda();
        w.map_blocks(|l, m, b| b * re(f(lam * (0.5 * (l + m) as f64 + 1.0))))
    })
}

fn r_hat() -> SuperOp {
    radius_hat_superop("r", |r| r)
}

fn r_hat_inv() -> SuperOp {
    radius_hat_superop("1/r", |r| 1.0 / r)
}

fn coordinate(k: usize) -> SuperOp {
    coordinate_superop(k, Side::Symmetric)
}

/// `V_i = (i / (2 r_hat)) w_i`.
pub fn velocity_superop(i: usize, lambda: f64) -> SuperOp {
    let w = w_contracted(Some(i));
    let inv = r_hat_inv();
    SuperOp::new(format!("V{}", i + 1), 2, move |psi| {
        check_lambda(psi, lambda);
        inv.apply(&w.apply(psi)).scale(I * 0.5)
    })
}

/// `V_4 = (1 / (2 r_hat)) zeta`.
pub fn velocity_fourth(lambda: f64) -> SuperOp {
    let z = zeta_contracted(None);
    let inv = r_hat_inv();
    SuperOp::new("V4", 2, move |psi| {
        check_lambda(psi, lambda);
        inv.apply(&z.apply(psi)).scale(re(0.5))
    })
}

/// Components `0..3` are spatial, `3` is the fourth component.
pub fn velocity_component(a: usize, lambda: f64) -> SuperOp {
    if a < 3 {
        velocity_superop(a, lambda)
    } else {
        velocity_fourth(lambda)
    }
}

/// `L_ab` with `L_ij = eps_ijk L_k` and `L_k4 = -L_4k = X_k / lambda`.
pub fn so4_generator(a: usize, b: usize, lambda: f64) -> SuperOp {
    match (a < 3, b < 3) {
        _ if a == b => SuperOp::zero(),
        (true, true) => {
            let k = 3 - a - b;
            angular_momentum_superop(k).scaled(re(levi_civita(a, b, k)))
        }
        (true, false) => coordinate(a).scaled(re(1.0 / lambda)),
        (false, true) => coordinate(b).scaled(re(-1.0 / lambda)),
        (false, false) => SuperOp::zero(),
    }
    .with_label(format!("L{}{}", a + 1, b + 1))
}

pub fn free_hamiltonian(lambda: f64) -> SuperOp {
    hamiltonian_superop(0.0, lambda).with_label("H0")
}

/// Operator `x_j` as a wave.
pub fn coordinate_wave(j: usize, lambda: f64, n_max: usize) -> OpWave {
    left_coordinate(j, &OpWave::identity(lambda, n_max))
}

/// Operator `f(r)` as a wave.
pub fn radial_wave(lambda: f64, n_max: usize, f: impl Fn(f64) -> f64) -> OpWave {
    OpWave::from_level_fn(lambda, n_max, |n| re(f(lambda * (n as f64 + 1.0))))
}

fn ladder_commutator(step: Step, a: &OpWave) -> OpWave {
    &a.left(step) - &a.right(step)
}

/// Correction to the Leibniz rule for the velocity operator.
pub fn leibniz_correction(i: usize, a: &OpWave, b: &OpWave) -> OpWave {
    let s = pauli(i);
    let mut acc = OpWave::zero(a.lambda(), a.n_max());
    for al in Mode::BOTH {
        for be in Mode::BOTH {
            let c = s[al.index()][be.index()];
            if c == ZERO {
                continue;
            }
            let t1 = ladder_commutator(Step::Raise(al), a).product(&ladder_commutator(Step::Lower(be), b));
            let t2 = ladder_commutator(Step::Lower(be), a).product(&ladder_commutator(Step::Raise(al), b));
            acc = &acc + &(&t1 - &t2).scale(c);
        }
    }
    let lam = a.lambda();
    acc.left_level_fn(|n| -I * (0.5 / (lam * (n as f64 + 1.0))))
}

// ---------------------------------------------------------------------------
// velocity suite

/// `[V_i, X_j] Psi = -i delta_ij (1 - lambda^2 H0) Psi`.
pub fn uncertainty_check(i: usize, j: usize, psi: &OpWave) -> f64 {
    let lam = psi.lambda();
    let v = velocity_superop(i, lam);
    let x = coordinate(j);
    if i == j {
        let rhs = (SuperOp::identity() - free_hamiltonian(lam).scaled(re(lam * lam))).scaled(-I);
        commutator_residual(psi, &v, &x, &[&rhs])
    } else {
        commutator_residual(psi, &v, &x, &[])
    }
}

/// Largest `[V_i, V_j] Psi` residual over axis pairs.
pub fn velocity_commutator_check(psi: &OpWave) -> f64 {
    let lam = psi.lambda();
    let v: Vec<SuperOp> = (0..3).map(|i| velocity_superop(i, lam)).collect();
    worst([(0, 1), (0, 2), (1, 2)].map(|(i, j)| commutator_residual(psi, &v[i], &v[j], &[])))
}

fn velocity_squared(lambda: f64) -> SuperOp {
    SuperOp::sum((0..3).map(|i| {
        let v = velocity_superop(i, lambda);
        v.compose(&v)
    }))
    .with_label("V^2")
}

/// `V^2 / 2 = H0 (1 - lambda^2 H0 / 2)`.
pub fn v2_h0_relation_check(psi: &OpWave) -> f64 {
    let lam = psi.lambda();
    let h0 = free_hamiltonian(lam);
    let lhs = velocity_squared(lam).scaled(re(0.5));
    let rhs = h0.clone() - h0.compose(&h0).scaled(re(0.5 * lam * lam));
    identity_residual(psi, &[&lhs], &[&rhs])
}

/// `(1/lambda^2 - H0)^2 = (1/lambda^2)(1/lambda^2 - V^2)`.
pub fn v2_h0_square_form_check(psi: &OpWave) -> f64 {
    let lam = psi.lambda();
    let c = 1.0 / (lam * lam);
    let shifted = SuperOp::scalar(re(c)) - free_hamiltonian(lam);
    let lhs = shifted.compose(&shifted);
    let rhs = (SuperOp::scalar(re(c)) - velocity_squared(lam)).scaled(re(c));
    identity_residual(psi, &[&lhs], &[&rhs])
}

fn delta(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

/// Kinematic E(4) relations on one wave, each relative to `tolerance`.
pub fn e4_symmetry_suite(psi: &OpWave, tolerance: f64) -> Vec<Check> {
    let lam = psi.lambda();
    let gen = |a: usize, b: usize| so4_generator(a, b, lam);
    let vel: Vec<SuperOp> = (0..4).map(|a| velocity_component(a, lam)).collect();
    let pairs: Vec<(usize, usize)> = (0..4).flat_map(|a| (a + 1..4).map(move |b| (a, b))).collect();

    let mut algebra = Vec::new();
    for &(a, b) in &pairs {
        for &(c, d) in &pairs {
            let rhs = SuperOp::sum([
                gen(b, d).scaled(re(delta(a, c))),
                gen(a, c).scaled(re(delta(b, d))),
                gen(b, c).scaled(re(-delta(a, d))),
                gen(a, d).scaled(re(-delta(b, c))),
            ])
            .scaled(I);
            algebra.push(commutator_residual(psi, &gen(a, b), &gen(c, d), &[&rhs]));
        }
    }

    let commute = worst(pairs.iter().map(|&(a, b)| commutator_residual(psi, &vel[a], &vel[b], &[])));

    let mut covariance = Vec::new();
    for &(a, b) in &pairs {
        for (c, vc) in vel.iter().enumerate() {
            let rhs = (vel[b].scaled(re(delta(a, c))) - vel[a].scaled(re(delta(b, c)))).scaled(I);
            covariance.push(commutator_residual(psi, &gen(a, b), vc, &[&rhs]));
        }
    }

    let fourth = {
        let lhs = vel[3].clone() + free_hamiltonian(lam).scaled(re(lam));
        identity_residual(psi, &[&lhs], &[&SuperOp::scalar(re(1.0 / lam))])
    };

    let casimir = {
        let c2 = SuperOp::sum(vel.iter().map(|v| v.compose(v)));
        identity_residual(psi, &[&c2], &[&SuperOp::scalar(re(1.0 / (lam * lam)))])
    };

    let lubanski = {
        let fourth = SuperOp::sum((0..3).map(|j| angular_momentum_superop(j).compose(&vel[j])));
        let mut res = vec![identity_residual(psi, &[&fourth], &[])];
        for i in 0..3 {
            let mut terms = vec![vel[3].compose(&angular_momentum_superop(i))];
            for j in 0..3 {
                for k in 0..3 {
                    let e = levi_civita(i, j, k);
                    if e != 0.0 {
                        terms.push(vel[j].compose(&gen(k, 3)).scaled(re(e)));
                    }
                }
            }
            res.push(identity_residual(psi, &[&SuperOp::sum(terms)], &[]));
        }
        worst(res)
    };

    vec![
        Check::new("so(4) generator algebra", worst(algebra), tolerance),
        Check::new("velocity components commute", commute, tolerance),
        Check::new("velocity is an so(4) vector", worst(covariance), tolerance),
        Check::new("V4 + lambda H0 = 1/lambda", fourth, tolerance),
        Check::new("E(4) quadratic Casimir = 1/lambda^2", casimir, tolerance),
        Check::new("E(4) Pauli-Lubanski vector vanishes", lubanski, tolerance),
    ]
}

// ---------------------------------------------------------------------------
// Ehrenfest correction

/// Residuals of the Ehrenfest correction.
///
/// `printed` places `U'` and `U''` left of `(lambda/r) L + lambda^2 W^i` and
/// `(lambda^2/2) V`; `reordered` lets them act on the wave first. `corrected`
/// is the form that follows from the Leibniz correction,
/// `U' ((lambda/r) L + lambda W^i) - i (lambda^2/2) U'' V`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EhrenfestResidual {
    pub printed: f64,
    pub reordered: f64,
    pub corrected: f64,
}

/// `W^i Psi = (1 / (2 r)) sigma^i_{ab} [a_b, [a_a^dag, Psi]]`.
pub fn ehrenfest_w_superop(i: usize) -> SuperOp {
    let w = big_w_ladder(Some(i));
    let inv = r_hat_inv();
    SuperOp::new(format!("W^{}", i + 1), 2, move |psi| inv.apply(&w.apply(psi)).scale(re(0.5)))
}

pub fn ehrenfest_residuals(i: usize, psi: &OpWave, u: impl Fn(f64) -> f64 + Clone + Send + Sync + 'static) -> EhrenfestResidual {
    let lam = psi.lambda();
    // The value below the origin only ever multiplies a vanishing block, so
    // any finite stand-in works there.
    let at = {
        let u = u.clone();
        move |r: f64, s: f64| {
            let x = r + s * lam;
            if x > 0.0 {
                u(x)
            } else {
                u(r)
            }
        }
    };
    let at2 = at.clone();
    let du = radius_hat_superop("U'", move |r| (at(r, 1.0) - at(r, -1.0)) / (2.0 * lam));
    let ddu = radius_hat_superop("U''", move |r| (at2(r, 1.0) - 2.0 * at2(r, 0.0) + at2(r, -1.0)) / (lam * lam));

    let v = velocity_superop(i, lam);
    let u_wave = radial_wave(lam, psi.n_max(), u.clone());
    let u_op = SuperOp::new("U", 0, move |w| {
        let lam = w.lambda();
        w.left_level_fn(|n| re(u(lam * (n as f64 + 1.0))))
    });

    let lhs = [v.apply(&u_op.apply(psi)).scale(-I), u_op.apply(&v.apply(psi)).scale(I)];
    let gradient = v.apply(&u_wave).product(psi).scale(-I);
    let orbital = r_hat_inv().compose(&angular_momentum_superop(i)).scaled(re(lam));
    let bracket = |c: f64| orbital.clone() + ehrenfest_w_superop(i).scaled(re(c));
    let half = 0.5 * lam * lam;

    let printed = [
        gradient.clone(),
        du.apply(&bracket(lam * lam).apply(psi)),
        ddu.apply(&v.apply(psi)).scale(re(half)),
    ];
    let reordered = [
        gradient.clone(),
        bracket(lam * lam).apply(&du.apply(psi)),
        v.apply(&ddu.apply(psi)).scale(re(half)),
    ];
    let corrected = [
        gradient,
        du.apply(&bracket(lam).apply(psi)),
        ddu.apply(&v.apply(psi)).scale(-I * half),
    ];
    EhrenfestResidual {
        printed: relative_residual(psi, 2, &lhs, &printed),
        reordered: relative_residual(psi, 2, &lhs, &reordered),
        corrected: relative_residual(psi, 2, &lhs, &corrected),
    }
}

/// Worst residual over the three axes for `U = -q / r`.
pub fn ehrenfest_check(q: f64, psi: &OpWave) -> EhrenfestResidual {
    let mut out = EhrenfestResidual {
        printed: 0.0,
        reordered: 0.0,
        corrected: 0.0,
    };
    for i in 0..3 {
        let r = ehrenfest_residuals(i, psi, move |r| -q / r);
        out.printed = worst([out.printed, r.printed]);
        out.reordered = worst([out.reordered, r.reordered]);
        out.corrected = worst([out.corrected, r.corrected]);
    }
    out
}

// ---------------------------------------------------------------------------
// auxiliary operators and the LRL vector

/// Auxiliary super-operators at fixed `lambda` and energy.
#[derive(Clone, Debug)]
pub struct AuxOperatorSet {
    pub lambda: f64,
    pub energy: f64,
    /// `-2 lambda E`
    pub omega: f64,
    /// `2 / lambda + omega`
    pub eta: f64,
    pub w_pair: [[SuperOp; 2]; 2],
    pub zeta_pair: [[SuperOp; 2]; 2],
    pub w: SuperOp,
    pub zeta: SuperOp,
    pub w_vec: [SuperOp; 3],
    pub zeta_vec: [SuperOp; 3],
    pub big_w: SuperOp,
    pub big_w_vec: [SuperOp; 3],
    pub big_w_prime: SuperOp,
    pub big_w_prime_vec: [SuperOp; 3],
}

impl AuxOperatorSet {
    pub fn new(lambda: f64, energy: f64) -> Self {
        let omega = -2.0 * lambda * energy;
        let eta = 2.0 / lambda + omega;
        let pairs = |f: fn(Mode, Mode) -> SuperOp| {
            [Mode::One, Mode::Two].map(|a| [Mode::One, Mode::Two].map(|b| f(a, b)))
        };
        let big_w = big_w_ladder(None);
        let big_w_vec = [0, 1, 2].map(|k| big_w_ladder(Some(k)));
        let big_w_prime = (big_w.clone() + r_hat().scaled(re(omega))).with_label("W'");
        let big_w_prime_vec =
            [0, 1, 2].map(|k| (big_w_vec[k].clone() + coordinate(k).scaled(re(omega))).with_label(format!("W'{}", k + 1)));
        Self {
            lambda,
            energy,
            omega,
            eta,
            w_pair: pairs(w_pair),
            zeta_pair: pairs(zeta_pair),
            w: w_contracted(None),
            zeta: zeta_contracted(None),
            w_vec: [0, 1, 2].map(|k| w_contracted(Some(k))),
            zeta_vec: [0, 1, 2].map(|k| zeta_contracted(Some(k))),
            big_w,
            big_w_vec,
            big_w_prime,
            big_w_prime_vec,
        }
    }

    /// `W = 2 r/lambda - zeta`, `W' = eta r - zeta` and their vector forms.
    pub fn invariant_checks(&self, psi: &OpWave, tolerance: f64) -> Vec<Check> {
        let lam = self.lambda;
        let scalar_w = r_hat().scaled(re(2.0 / lam)) - self.zeta.clone();
        let scalar_wp = r_hat().scaled(re(self.eta)) - self.zeta.clone();
        let vec_w = worst((0..3).map(|k| {
            let rhs = coordinate(k).scaled(re(2.0 / lam)) - self.zeta_vec[k].clone();
            identity_residual(psi, &[&self.big_w_vec[k]], &[&rhs])
        }));
        let vec_wp = worst((0..3).map(|k| {
            let rhs = coordinate(k).scaled(re(self.eta)) - self.zeta_vec[k].clone();
            identity_residual(psi, &[&self.big_w_prime_vec[k]], &[&rhs])
        }));
        let traces = {
            let w_sum = SuperOp::sum([self.w_pair[0][0].clone(), self.w_pair[1][1].clone()]);
            let z_sum = SuperOp::sum([self.zeta_pair[0][0].clone(), self.zeta_pair[1][1].clone()]);
            worst([
                identity_residual(psi, &[&w_sum], &[&self.w]),
                identity_residual(psi, &[&z_sum], &[&self.zeta]),
            ])
        };
        vec![
            Check::new("W = 2r/lambda - zeta", identity_residual(psi, &[&self.big_w], &[&scalar_w]), tolerance),
            Check::new("W' = eta r - zeta", identity_residual(psi, &[&self.big_w_prime], &[&scalar_wp]), tolerance),
            Check::new("W_k = 2X_k/lambda - zeta_k", vec_w, tolerance),
            Check::new("W'_k = eta X_k - zeta_k", vec_wp, tolerance),
            Check::new("pair traces", traces, tolerance),
        ]
    }

    /// Least-squares `c` in `W^i Psi = c r^{-1} W_i Psi`.
    pub fn ehrenfest_normalization(&self, i: usize, psi: &OpWave) -> f64 {
        let top = psi.n_max().saturating_sub(2);
        let u = r_hat_inv().apply(&self.big_w_vec[i].apply(psi)).restrict(top);
        let v = ehrenfest_w_superop(i).apply(psi).restrict(top);
        u.inner(&v).re / u.norm_sq()
    }
}

/// Symmetrized LRL vector `(1/2) eps_ijk (L_i V_j + V_j L_i) + q X_k / r`.
pub fn lrl_superop(k: usize, q: f64, lambda: f64) -> SuperOp {
    let mut terms = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            let e = levi_civita(i, j, k);
            if e != 0.0 {
                let l = angular_momentum_superop(i);
                let v = velocity_superop(j, lambda);
                terms.push((l.compose(&v) + v.compose(&l)).scaled(re(0.5 * e)));
            }
        }
    }
    terms.push(coordinate(k).compose(&r_hat_inv()).scaled(re(q)));
    SuperOp::sum(terms).with_label(format!("A{}", k + 1))
}

/// `(1 / (2 r lambda)) (r W'_k - X_k (W' - 2 lambda q))`.
pub fn lrl_superop_rewritten(k: usize, q: f64, aux: &AuxOperatorSet) -> SuperOp {
    let lam = aux.lambda;
    let shifted = aux.big_w_prime.clone() - SuperOp::scalar(re(2.0 * lam * q));
    let inner = r_hat().compose(&aux.big_w_prime_vec[k]) - coordinate(k).compose(&shifted);
    r_hat_inv().compose(&inner).scaled(re(0.5 / lam)).with_label(format!("A{}'", k + 1))
}

/// Worst disagreement between the two LRL constructions.
pub fn lrl_forms_check(q: f64, psi: &OpWave) -> f64 {
    let aux = AuxOperatorSet::new(psi.lambda(), 0.0);
    worst((0..3).map(|k| identity_residual(psi, &[&lrl_superop(k, q, psi.lambda())], &[&lrl_superop_rewritten(k, q, &aux)])))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Algebra {
    So4,
    So31,
    E3,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymmetryVerdict {
    pub algebra: Algebra,
    pub energy: f64,
    /// `-2E + lambda^2 E^2`
    pub factor: f64,
    /// Largest `|| L_j A_j Psi || / || Psi ||`.
    pub casimir1: f64,
    /// Mean Rayleigh quotient of the second Casimir.
    pub casimir2: f64,
    /// Scalar multiplying `i eps_ijk L_k` in `[A_i, A_j]`, read off the states.
    pub measured_factor: Option<f64>,
    pub checks: Vec<Check>,
}

impl SymmetryVerdict {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(Check::pass)
    }
}

pub fn lrl_factor(energy: f64, lambda: f64) -> f64 {
    -2.0 * energy + lambda * lambda * energy * energy
}

pub fn classify(energy: f64, lambda: f64) -> Algebra {
    let f = lrl_factor(energy, lambda);
    let scale = (2.0 * energy).abs().max(lambda * lambda * energy * energy);
    if f.abs() <= 1e-12 * scale {
        Algebra::E3
    } else if f > 0.0 {
        Algebra::So4
    } else {
        Algebra::So31
    }
}

pub const EIGEN_GATE: f64 = 1e-8;
pub const LRL_TOLERANCE: f64 = 1e-7;

/// LRL conservation, algebra and Casimirs on a sample of a fixed-energy eigenspace.
pub fn lrl_algebra_suite(energy: f64, q: f64, lambda: f64, states: &[OpWave]) -> Result<SymmetryVerdict, DynamicsError> {
    if states.is_empty() {
        return Err(DynamicsError::NoStates);
    }
    let h = hamiltonian_superop(q, lambda);
    let e_op = SuperOp::scalar(re(energy));
    for (index, psi) in states.iter().enumerate() {
        let residual = identity_residual(psi, &[&h], &[&e_op]);
        if !(residual <= EIGEN_GATE) {
            return Err(DynamicsError::NotEigenstate { index, energy, residual });
        }
    }
    let aux = AuxOperatorSet::new(lambda, energy);
    let factor = lrl_factor(energy, lambda);
    let a: Vec<SuperOp> = (0..3).map(|k| lrl_superop(k, q, lambda)).collect();
    let l: Vec<SuperOp> = (0..3).map(angular_momentum_superop).collect();
    let l2 = SuperOp::sum(l.iter().map(|x| x.compose(x)));
    let c1 = SuperOp::sum((0..3).map(|j| l[j].compose(&a[j])));
    let c2 = SuperOp::sum(a.iter().map(|x| x.compose(x))) + (l2 + SuperOp::identity()).scaled(re(factor));
    let q2 = SuperOp::scalar(re(q * q));
    let rescale = 1.0 / factor.abs().sqrt();
    let k_gen: Vec<SuperOp> = a.iter().map(|x| x.scaled(re(rescale))).collect();
    let eps_l = |i: usize, j: usize, c: Complex64| {
        SuperOp::sum((0..3).filter(|&k| levi_civita(i, j, k) != 0.0).map(|k| l[k].scaled(c * levi_civita(i, j, k))))
    };
    let eps_a = |i: usize, j: usize| {
        SuperOp::sum((0..3).filter(|&k| levi_civita(i, j, k) != 0.0).map(|k| a[k].scaled(I * levi_civita(i, j, k))))
    };
    let axis_pairs = [(0, 1), (0, 2), (1, 2)];

    let mut conservation = Vec::new();
    let mut eigen_form = Vec::new();
    let mut algebra = Vec::new();
    let mut covariance = Vec::new();
    let mut rescaled = Vec::new();
    let mut cas1 = Vec::new();
    let mut cas2 = Vec::new();
    let mut cas1_value: f64 = 0.0;
    let mut cas2_sum = 0.0;
    let mut fit = (ZERO, 0.0);
    for psi in states {
        for k in 0..3 {
            conservation.push(commutator_residual(psi, &a[k], &h, &[]));
            let wp = aux.big_w_prime_vec[k].scaled(re(0.5 / lambda));
            eigen_form.push(identity_residual(psi, &[&a[k]], &[&wp]));
        }
        for &(i, j) in &axis_pairs {
            algebra.push(commutator_residual(psi, &a[i], &a[j], &[&eps_l(i, j, I * factor)]));
            if factor != 0.0 {
                let sign = factor.signum();
                rescaled.push(commutator_residual(psi, &k_gen[i], &k_gen[j], &[&eps_l(i, j, I * sign)]));
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                covariance.push(commutator_residual(psi, &l[i], &a[j], &[&eps_a(i, j)]));
            }
        }
        cas1.push(identity_residual(psi, &[&c1], &[]));
        cas2.push(identity_residual(psi, &[&c2], &[&q2]));

        let top = psi.n_max().saturating_sub(c2.degree);
        let base = psi.restrict(top);
        cas1_value = cas1_value.max(c1.apply(psi).restrict(top).norm() / base.norm());
        cas2_sum += base.inner(&c2.apply(psi).restrict(top)).re / base.norm_sq();

        let top8 = psi.n_max().saturating_sub(2 * a[0].degree);
        let l3 = l[2].apply(psi).restrict(top8);
        let comm = (&a[0].apply(&a[1].apply(psi)) - &a[1].apply(&a[0].apply(psi))).restrict(top8);
        fit.0 += l3.inner(&comm);
        fit.1 += l3.norm_sq();
    }
    let tol = LRL_TOLERANCE;
    let mut checks = vec![
        Check::new("LRL conserved [A_k, H] = 0", worst(conservation), tol),
        Check::new("LRL eigen form A_k = W'_k / (2 lambda)", worst(eigen_form), tol),
        Check::new("LRL algebra [A_i, A_j] = i f eps L_k", worst(algebra), tol),
        Check::new("LRL is a vector [L_i, A_j] = i eps A_k", worst(covariance), tol),
        Check::new("first Casimir L.A = 0", worst(cas1), tol),
        Check::new("second Casimir = q^2", worst(cas2), tol),
    ];
    if !rescaled.is_empty() {
        checks.push(Check::new("rescaled generators close", worst(rescaled), tol));
    }
    let measured_factor = (fit.1 > 1e-20 * states.iter().map(|s| s.norm_sq()).sum::<f64>()).then(|| (fit.0 / (I * fit.1)).re);
    Ok(SymmetryVerdict {
        algebra: classify(energy, lambda),
        energy,
        factor,
        casimir1: cas1_value,
        casimir2: cas2_sum / states.len() as f64,
        measured_factor,
        checks,
    })
}

/// Energies fixed by the second Casimir: `n^2 = q^2 / (lambda^2 E^2 - 2E)`.
///
/// Returns the lower and upper roots.
pub fn spectrum_from_symmetry(q: f64, lambda: f64, n: usize) -> Result<(f64, f64), DynamicsError> {
    if n < 1 {
        return Err(DynamicsError::BadPrincipal);
    }
    let lower = energy_attractive(q.abs(), n, lambda);
    Ok((lower, 2.0 / (lambda * lambda) - lower))
}

// ---------------------------------------------------------------------------
// auxiliary identity ledger

/// Commutator and product identities among `X`, `r`, `zeta`, `w`, `L` and `W'`.
pub fn auxiliary_identity_suite(psi: &OpWave, energy: f64, tolerance: f64) -> Vec<Check> {
    let lam = psi.lambda();
    let aux = AuxOperatorSet::new(lam, energy);
    let (eta, omega) = (aux.eta, aux.omega);
    let r = r_hat();
    let x: Vec<SuperOp> = (0..3).map(coordinate).collect();
    let l: Vec<SuperOp> = (0..3).map(angular_momentum_superop).collect();
    let v: Vec<SuperOp> = (0..3).map(|k| velocity_superop(k, lam)).collect();
    let zeta = &aux.zeta;
    let zk = &aux.zeta_vec;
    let w = &aux.w;
    let eps = |ops: &[SuperOp], i: usize, j: usize, c: Complex64| {
        SuperOp::sum((0..3).filter(|&k| levi_civita(i, j, k) != 0.0).map(|k| ops[k].scaled(c * levi_civita(i, j, k))))
    };
    let all_pairs: Vec<(usize, usize)> = (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).collect();
    let rv = |k: usize| r.compose(&v[k]).scaled(I * 2.0 * lam);

    let mut out = Vec::new();
    let mut push = |name: &str, value: f64| out.push(Check::new(name, value, tolerance));

    push(
        "[zeta, X_k] = 2 i lambda r V_k",
        worst((0..3).map(|k| commutator_residual(psi, zeta, &x[k], &[&rv(k)]))),
    );
    push(
        "[zeta_k, r] = 2 i lambda r V_k",
        worst((0..3).map(|k| commutator_residual(psi, &zk[k], &r, &[&rv(k)]))),
    );
    push("[zeta, zeta_k] = 0", worst((0..3).map(|k| commutator_residual(psi, zeta, &zk[k], &[]))));
    push(
        "[W', W'_k] = 0",
        worst((0..3).map(|k| commutator_residual(psi, &aux.big_w_prime, &aux.big_w_prime_vec[k], &[]))),
    );
    push(
        "[zeta_i, zeta_j] = -4 i eps L_k",
        worst(all_pairs.iter().map(|&(i, j)| commutator_residual(psi, &zk[i], &zk[j], &[&eps(&l, i, j, -4.0 * I)]))),
    );
    push(
        "[X_i, zeta_j] = lambda delta_ij w",
        worst(all_pairs.iter().map(|&(i, j)| {
            let rhs = w.scaled(re(lam * delta(i, j)));
            commutator_residual(psi, &x[i], &zk[j], &[&rhs])
        })),
    );
    push(
        "[X_i, X_j] = i lambda^2 eps L_k",
        worst(all_pairs.iter().map(|&(i, j)| commutator_residual(psi, &x[i], &x[j], &[&eps(&l, i, j, I * lam * lam)]))),
    );
    push(
        "[W'_i, W'_j] = 4 i lambda omega (1 + lambda omega / 4) eps L_k",
        worst(all_pairs.iter().map(|&(i, j)| {
            let c = I * 4.0 * lam * omega * (1.0 + lam * omega / 4.0);
            commutator_residual(psi, &aux.big_w_prime_vec[i], &aux.big_w_prime_vec[j], &[&eps(&l, i, j, c)])
        })),
    );
    push(
        "[L_i, X_j] = i eps X_k",
        worst(all_pairs.iter().map(|&(i, j)| commutator_residual(psi, &l[i], &x[j], &[&eps(&x, i, j, I)]))),
    );
    push(
        "[L_i, zeta_j] = i eps zeta_k",
        worst(all_pairs.iter().map(|&(i, j)| commutator_residual(psi, &l[i], &zk[j], &[&eps(zk, i, j, I)]))),
    );
    push(
        "[L_i, W'_j] = i eps W'_k",
        worst(all_pairs.iter().map(|&(i, j)| {
            commutator_residual(psi, &l[i], &aux.big_w_prime_vec[j], &[&eps(&aux.big_w_prime_vec, i, j, I)])
        })),
    );
    let lz = SuperOp::sum((0..3).map(|j| l[j].compose(&zk[j])));
    let lx = SuperOp::sum((0..3).map(|j| l[j].compose(&x[j])));
    push("L_j zeta_j = 0", identity_residual(psi, &[&lz], &[]));
    push("L_j X_j = 0", identity_residual(psi, &[&lx], &[]));

    let quadratic = {
        let wpw = SuperOp::sum(aux.big_w_prime_vec.iter().map(|o| o.compose(o)));
        let l2 = SuperOp::sum(l.iter().map(|o| o.compose(o)));
        let lhs_b = (l2 + SuperOp::identity()).scaled(re(eta * eta * lam * lam - 4.0));
        let rhs = aux.big_w_prime.compose(&aux.big_w_prime);
        identity_residual(psi, &[&wpw, &lhs_b], &[&rhs])
    };
    push("W'_i W'_i + (eta^2 lambda^2 - 4)(L^2 + 1) = W'^2", quadratic);

    let lw = w.scaled(re(lam));
    push("[r, zeta] = lambda w", commutator_residual(psi, &r, zeta, &[&lw]));
    let zr2 = zeta.compose(&r).scaled(re(2.0));
    let rz = r.compose(zeta);
    push("{r, zeta} = lambda w + 2 zeta r", bracket_residual(psi, &r, zeta, 1.0, &[&lw, &zr2]));
    let zx = SuperOp::sum((0..3).map(|i| zk[i].compose(&x[i])));
    let xz = SuperOp::sum((0..3).map(|i| x[i].compose(&zk[i])));
    push(
        "zeta_i X_i = r zeta - 2 lambda w",
        identity_residual(psi, &[&zx], &[&rz, &w.scaled(re(-2.0 * lam))]),
    );
    push("X_i zeta_i = r zeta + lambda w", identity_residual(psi, &[&xz], &[&rz, &lw]));
    push(
        "[X_i, zeta_i] = 3 lambda w",
        identity_residual(psi, &[&xz, &zx.scaled(-ONE)], &[&w.scaled(re(3.0 * lam))]),
    );
    push(
        "{X_i, zeta_i} = 2 r zeta - lambda w",
        identity_residual(psi, &[&xz, &zx], &[&rz.scaled(re(2.0)), &lw.scaled(-ONE)]),
    );
    push(
        "lambda w + 2 zeta r = 2 r zeta - lambda w",
        identity_residual(psi, &[&lw, &zr2], &[&rz.scaled(re(2.0)), &lw.scaled(-ONE)]),
    );
    out
}

/// `a r^N = (r + lambda)^N a` and `a^dag r^N = (r - lambda)^N a^dag` as
/// matrices on the window, relative to the largest entry.
pub fn radius_shift_residual(lambda: f64, n_max: usize, power: i32) -> f64 {
    let space = TruncatedFockSpace::new(n_max);
    let diag = |shift: f64| space.diagonal_by_level(|n| re((lambda * (n as f64 + 1.0 + shift)).powi(power)));
    let (r, up, down) = (diag(0.0), diag(1.0), diag(-1.0));
    let mut num: f64 = 0.0;
    let mut den: f64 = 0.0;
    for mode in Mode::BOTH {
        let a = space.ladder(LadderKind::lower(mode)).entries;
        let ad = space.ladder(LadderKind::raise(mode)).entries;
        for (lhs, rhs) in [(&a * &r, &up * &a), (&ad * &r, &down * &ad)] {
            num = num.max(space.window_max_abs(&(&lhs - &rhs), 1));
            den = den.max(space.window_max_abs(&lhs, 1));
        }
    }
    num / den
}
