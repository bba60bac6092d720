//! Laplacian, Coulomb Hamiltonian and the radial sector.
//!
//! The radial sector at fixed `j` is reduced to a tridiagonal matrix `T` by
//! applying the full Hamiltonian super-operator to `Psi_jj` built on N-block
//! indicators. Symmetrizing `T` with the radial weights gives a real
//! symmetric matrix whose eigenpairs are the bound and quasi-continuum
//! levels of the truncated problem.

use crate::fock::Mode;
use crate::opwave::{build_psi_jm, radius_superop, super_ladder, AngularLabel, OpWave, Side, SuperLadder, SuperOp};
pub use crate::opwave::RadialVector;
use crate::scattering::{momentum_map, omega_map};
use crate::specfun::{hyp1f1_polynomial_sequence, hyp2f1_polynomial, hyp2f1_polynomial_sequence, SpecFunError};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HamiltonianError {
    #[error("truncation n_max = {n_max} too small for j = {j} (need n_max >= j + 4)")]
    WindowTooSmall { n_max: usize, j: usize },
    #[error("radial reduction is not tridiagonal: closure residual {0:e}")]
    NotTridiagonal(f64),
    #[error("weight similarity failed to symmetrize T: asymmetry {0:e}")]
    NotSymmetric(f64),
    #[error("eigensolver did not converge")]
    NoConvergence,
    #[error("family {family:?} needs alpha {need}, got {alpha}")]
    WrongSign { family: Family, alpha: f64, need: &'static str },
    #[error("principal number n = {n} must exceed j = {j}")]
    BadPrincipal { n: usize, j: usize },
    #[error("conformal map singular at E = {0}")]
    SingularMap(f64),
    #[error(transparent)]
    Special(#[from] SpecFunError),
}

pub type HamResult<T> = Result<T, HamiltonianError>;

pub(crate) fn check_lambda(w: &OpWave, lambda: f64) {
    assert!(
        (w.lambda() - lambda).abs() <= 1e-14 * lambda,
        "super-operator built for lambda = {lambda} applied to wave with lambda = {}",
        w.lambda()
    );
}

/// `sum_a [a_a^dag, [a_a, Psi]]`.
pub fn double_commutator_superop() -> SuperOp {
    let terms = Mode::BOTH.into_iter().map(|m| {
        let a = super_ladder(SuperLadder::A, m);
        let ad = super_ladder(SuperLadder::ADag, m);
        let b = super_ladder(SuperLadder::B, m);
        let bd = super_ladder(SuperLadder::BDag, m);
        ad.compose(&a) - b.compose(&ad) - bd.compose(&a) + bd.compose(&b)
    });
    SuperOp::sum(terms).with_label("[a^dag, [a, .]]")
}

/// `-(1 / (lambda r)) [a^dag, [a, Psi]]`.
pub fn laplacian_superop(lambda: f64) -> SuperOp {
    let core = radius_superop(-1, Side::Left).compose(&double_commutator_superop());
    SuperOp::new("Laplacian", 2, move |w| {
        check_lambda(w, lambda);
        core.apply(w).scale(Complex64::new(-1.0 / lambda, 0.0))
    })
}

/// `(1 / (2 lambda r)) [a^dag, [a, Psi]] - (q / r) Psi`.
pub fn hamiltonian_superop(q: f64, lambda: f64) -> SuperOp {
    let dc = double_commutator_superop();
    let inv_r = radius_superop(-1, Side::Left);
    SuperOp::new(format!("H(q={q})"), 2, move |w| {
        check_lambda(w, lambda);
        let kinetic = dc.apply(w).scale(Complex64::new(0.5 / lambda, 0.0));
        let pot = w.scale(Complex64::new(-q, 0.0));
        inv_r.apply(&(&kinetic + &pot))
    })
}

/// Radial potential solving the discrete Laplace equation away from the origin.
///
/// Starts from `U(0) = q0 - q/lambda`, takes `U(1)` from the first integral
/// `(M+1) U(M) - M U(M-1) = q0`, then runs the second-order recurrence.
pub fn solve_nc_laplace(q: f64, q0: f64, lambda: f64, n_max: usize) -> Vec<f64> {
    let mut u = Vec::with_capacity(n_max + 1);
    u.push(q0 - q / lambda);
    if n_max >= 1 {
        u.push((q0 + u[0]) / 2.0);
    }
    for n in 1..n_max {
        let nf = n as f64;
        let next = (2.0 * (nf + 1.0) * u[n] - nf * u[n - 1]) / (nf + 2.0);
        u.push(next);
    }
    u
}

/// `q0 - q / (lambda (N + 1))`.
pub fn coulomb_potential(q: f64, q0: f64, lambda: f64, n: usize) -> f64 {
    q0 - q / (lambda * (n as f64 + 1.0))
}

/// Discrete radial operator for one angular sector.
#[derive(Clone, Debug)]
pub struct RadialHamiltonian {
    pub j: usize,
    pub lambda: f64,
    pub q: f64,
    /// `T[n', n]`: coefficient of the `n'` indicator in `H` applied to the `n` indicator.
    pub t: DMatrix<f64>,
    pub weights: Vec<f64>,
    pub diag: Vec<f64>,
    pub off_diag: Vec<f64>,
    pub window_len: usize,
    pub closure_residual: f64,
}

impl RadialHamiltonian {
    pub fn h_sym(&self) -> DMatrix<f64> {
        let n = self.window_len;
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            if i + 1 < n {
                m[(i, i + 1)] = self.off_diag[i];
                m[(i + 1, i)] = self.off_diag[i];
            }
        }
        m
    }

    /// `|| T R - E R ||_w / || R ||_w` over rows whose neighbours lie inside the window.
    pub fn eigen_residual(&self, energy: f64, radial: &RadialVector) -> f64 {
        let len = self.window_len.min(radial.len().saturating_sub(1));
        let mut num = 0.0;
        let mut den = 0.0;
        for n in 0..len {
            let mut acc = -radial.coeffs[n] * energy;
            for k in n.saturating_sub(1)..=(n + 1) {
                if k < self.window_len + 1 && k < radial.len() {
                    acc += radial.coeffs[k] * self.t_entry(n, k);
                }
            }
            num += self.weights[n] * acc.norm_sqr();
            den += self.weights[n] * radial.coeffs[n].norm_sqr();
        }
        (num / den).sqrt()
    }

    fn t_entry(&self, row: usize, col: usize) -> f64 {
        if row < self.t.nrows() && col < self.t.ncols() {
            self.t[(row, col)]
        } else {
            0.0
        }
    }
}

fn indicator_wave(j: usize, n: usize, lambda: f64, n_max: usize) -> OpWave {
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
    coeffs[n] = Complex64::new(1.0, 0.0);
    build_psi_jm(
        AngularLabel { j, m: j as i64 },
        &RadialVector::new(j, lambda, coeffs),
        n_max,
    )
    .expect("valid label")
}

/// Assemble `T` by expanding `H B_n` over neighbouring indicators `B_{n'}`.
///
/// `T` carries one extra column beyond the symmetric window so that
/// residuals of trial vectors can use the last interior row.
pub fn build_radial_hamiltonian(j: usize, q: f64, lambda: f64, n_max: usize) -> HamResult<RadialHamiltonian> {
    if n_max < j + 4 {
        return Err(HamiltonianError::WindowTooSmall { n_max, j });
    }
    let h = hamiltonian_superop(q, lambda);
    let len = n_max - j - 1;
    let mut t = DMatrix::zeros(len, len + 1);
    let mut closure: f64 = 0.0;
    let norm_of = |b: &OpWave| b.norm_sq();
    let mut prev: Option<OpWave> = None;
    let mut cur = indicator_wave(j, 0, lambda, n_max);
    for n in 0..=len {
        let next = indicator_wave(j, n + 1, lambda, n_max);
        let hb = h.apply(&cur);
        let mut rest = hb.clone();
        let neighbours = [(n.checked_sub(1), prev.as_ref()), (Some(n), Some(&cur)), (Some(n + 1), Some(&next))];
        for (idx, basis) in neighbours {
            if let (Some(k), Some(b)) = (idx, basis) {
                let c = b.inner(&hb) / norm_of(b);
                if k < len {
                    t[(k, n)] = c.re;
                }
                rest = &rest - &b.scale(c);
            }
        }
        let scale = hb.norm().max(f64::MIN_POSITIVE);
        closure = closure.max(rest.restrict(n_max - 2).norm() / scale);
        prev = Some(cur);
        cur = next;
    }
    if closure > 1e-10 {
        return Err(HamiltonianError::NotTridiagonal(closure));
    }
    let weights: Vec<f64> = (0..=len).map(|n| RadialVector::weight(j, n)).collect();
    let diag: Vec<f64> = (0..len).map(|n| t[(n, n)]).collect();
    let mut off_diag = Vec::with_capacity(len.saturating_sub(1));
    let mut asym: f64 = 0.0;
    for n in 0..len - 1 {
        let up = (weights[n] / weights[n + 1]).sqrt() * t[(n, n + 1)];
        let down = (weights[n + 1] / weights[n]).sqrt() * t[(n + 1, n)];
        asym = asym.max((up - down).abs() / up.abs().max(down.abs()).max(1e-300));
        off_diag.push(0.5 * (up + down));
    }
    if asym > 1e-10 {
        return Err(HamiltonianError::NotSymmetric(asym));
    }
    Ok(RadialHamiltonian {
        j,
        lambda,
        q,
        t,
        weights,
        diag,
        off_diag,
        window_len: len,
        closure_residual: closure,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectrumEnd {
    Lowest,
    Highest,
}

/// Eigenpairs of the symmetrized radial operator, ordered away from `end`.
///
/// Eigenvectors are mapped back through `D^{-1/2}`, so they are orthonormal
/// in the bare weighted sum `sum_n w(n) R(n) R'(n)`.
pub fn diagonalize(h: &RadialHamiltonian, count: usize, end: SpectrumEnd) -> HamResult<Vec<(f64, RadialVector)>> {
    let eig = h
        .h_sym()
        .try_symmetric_eigen(f64::EPSILON, 1_000_000)
        .ok_or(HamiltonianError::NoConvergence)?;
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    if end == SpectrumEnd::Highest {
        order.reverse();
    }
    Ok(order
        .into_iter()
        .take(count)
        .map(|k| {
            let (value, v) = polish(h, eig.eigenvalues[k], eig.eigenvectors.column(k).into_owned());
            let sign = if v[0] < 0.0 { -1.0 } else { 1.0 };
            let coeffs = (0..h.window_len)
                .map(|n| Complex64::new(sign * v[n] / h.weights[n].sqrt(), 0.0))
                .collect();
            (value, RadialVector::new(h.j, h.lambda, coeffs))
        })
        .collect())
}

/// Two steps of shifted inverse iteration followed by a Rayleigh quotient.
fn polish(h: &RadialHamiltonian, value: f64, mut v: DVector<f64>) -> (f64, DVector<f64>) {
    let n = h.window_len;
    let scale = h.diag.iter().chain(&h.off_diag).fold(0.0f64, |a, x| a.max(x.abs())).max(f64::MIN_POSITIVE);
    let shift = value + 4.0 * f64::EPSILON * scale;
    let diag: Vec<f64> = h.diag.iter().map(|d| d - shift).collect();
    for _ in 0..2 {
        let Some(next) = solve_tridiagonal(&h.off_diag, &diag, &h.off_diag, v.as_slice(), scale) else {
            break;
        };
        let next = DVector::from_vec(next);
        let norm = next.norm();
        if !norm.is_finite() || norm == 0.0 {
            break;
        }
        v = next / norm;
    }
    let hv = DVector::from_fn(n, |i, _| {
        let mut acc = h.diag[i] * v[i];
        if i > 0 {
            acc += h.off_diag[i - 1] * v[i - 1];
        }
        if i + 1 < n {
            acc += h.off_diag[i] * v[i + 1];
        }
        acc
    });
    (v.dot(&hv) / v.dot(&v), v)
}

/// Gaussian elimination with partial pivoting for a tridiagonal system.
///
/// Exactly vanishing pivots are replaced by `eps * scale`, which is what
/// inverse iteration needs at an (almost) exact eigenvalue.
fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64], scale: f64) -> Option<Vec<f64>> {
    let n = diag.len();
    if n == 0 || rhs.len() != n {
        return None;
    }
    let tiny = f64::EPSILON * scale;
    let guard = |x: f64| if x == 0.0 { tiny } else { x };
    if n == 1 {
        return Some(vec![rhs[0] / guard(diag[0])]);
    }
    let dl = sub.to_vec();
    let mut d = diag.to_vec();
    let mut du = sup.to_vec();
    let mut fill = vec![0.0; n.saturating_sub(2)];
    let mut b = rhs.to_vec();
    for i in 0..n - 1 {
        if d[i].abs() >= dl[i].abs() {
            let f = dl[i] / guard(d[i]);
            d[i + 1] -= f * du[i];
            b[i + 1] -= f * b[i];
        } else {
            let f = d[i] / dl[i];
            d[i] = dl[i];
            let t = d[i + 1];
            d[i + 1] = du[i] - f * t;
            if i + 2 < n {
                fill[i] = du[i + 1];
                du[i + 1] = -f * fill[i];
            }
            du[i] = t;
            let t = b[i];
            b[i] = b[i + 1];
            b[i + 1] = t - f * b[i + 1];
        }
    }
    let mut x = vec![0.0; n];
    x[n - 1] = b[n - 1] / guard(d[n - 1]);
    x[n - 2] = (b[n - 2] - du[n - 2] * x[n - 1]) / guard(d[n - 2]);
    for i in (0..n.saturating_sub(2)).rev() {
        x[i] = (b[i] - du[i] * x[i + 1] - fill[i] * x[i + 2]) / guard(d[i]);
    }
    x.iter().all(|z| z.is_finite()).then_some(x)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Family {
    I,
    II,
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct EnergyLevel {
    pub family: Family,
    pub n: usize,
    pub j: usize,
    pub value: f64,
}

/// `-(a/n)^2 / (1 + sqrt(1 + (a lambda / n)^2))` for `a > 0`.
pub(crate) fn energy_attractive(alpha: f64, n: usize, lambda: f64) -> f64 {
    let kappa = alpha * lambda / n as f64;
    let a_n = alpha / n as f64;
    -a_n * a_n / (1.0 + (1.0 + kappa * kappa).sqrt())
}

pub fn bound_energy(family: Family, n: usize, j: usize, alpha: f64, lambda: f64) -> HamResult<EnergyLevel> {
    if n <= j {
        return Err(HamiltonianError::BadPrincipal { n, j });
    }
    let value = match family {
        Family::I => {
            if alpha <= 0.0 {
                return Err(HamiltonianError::WrongSign { family, alpha, need: "> 0" });
            }
            energy_attractive(alpha, n, lambda)
        }
        Family::II => {
            if alpha >= 0.0 {
                return Err(HamiltonianError::WrongSign { family, alpha, need: "< 0" });
            }
            2.0 / (lambda * lambda) - energy_attractive(-alpha, n, lambda)
        }
    };
    Ok(EnergyLevel { family, n, j, value })
}

/// `Omega_n` for the attractive family, `kappa = lambda alpha / n > 0`.
pub fn omega_bound_i(kappa: f64) -> f64 {
    let s = (1.0 + kappa * kappa).sqrt();
    (kappa - s + 1.0) / (kappa + s - 1.0)
}

/// `Omega_n` for the repulsive family, `kappa = lambda alpha / n < 0`.
pub fn omega_bound_ii(kappa: f64) -> f64 {
    let s = (1.0 + kappa * kappa).sqrt();
    -(kappa + s + 1.0) / (kappa - s - 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ClosedFormCase {
    /// Generic solution with the `+` sign choice.
    GenericPlus { energy: f64, alpha: f64 },
    /// Generic solution with the `-` sign choice.
    GenericMinus { energy: f64, alpha: f64 },
    /// `E = 0`.
    Eta0 { alpha: f64 },
    /// `E = 2 / lambda^2`.
    Eta1 { alpha: f64 },
    BoundI { n: usize, alpha: f64 },
    BoundII { n: usize, alpha: f64 },
    Scatter { energy: f64, alpha: f64 },
}

fn generic(sign: f64, energy: f64, alpha: f64, j: usize, lambda: f64, len: usize) -> HamResult<Vec<Complex64>> {
    let one = Complex64::new(1.0, 0.0);
    let eta = Complex64::new(energy * 2.0, 0.0).sqrt() * (lambda / 2.0);
    let root = (eta * eta - one).sqrt();
    let d = eta * root;
    let base = one + d * (2.0 * sign) - eta * eta * 2.0;
    let a = Complex64::new(j as f64 + 1.0, 0.0) + sign * alpha * lambda / (d * 2.0);
    let x = d * (4.0 * sign) / base;
    let c = Complex64::new(2.0 * j as f64 + 2.0, 0.0);
    let f = hyp2f1_polynomial_sequence(a, c, x, len)?;
    Ok(f.iter().enumerate().map(|(n, v)| base.powu(n as u32) * v).collect())
}

/// Closed-form radial solutions, normalized to `R(0) = 1`.
pub fn solve_radial_closed_form(case: ClosedFormCase, j: usize, lambda: f64, len: usize) -> HamResult<RadialVector> {
    let c = Complex64::new(2.0 * j as f64 + 2.0, 0.0);
    let re = |v: f64| Complex64::new(v, 0.0);
    let coeffs: Vec<Complex64> = match case {
        ClosedFormCase::GenericPlus { energy, alpha } => generic(1.0, energy, alpha, j, lambda, len)?,
        ClosedFormCase::GenericMinus { energy, alpha } => generic(-1.0, energy, alpha, j, lambda, len)?,
        ClosedFormCase::Eta0 { alpha } => hyp1f1_polynomial_sequence(c, re(2.0 * alpha * lambda), len)?,
        ClosedFormCase::Eta1 { alpha } => hyp1f1_polynomial_sequence(c, re(-2.0 * alpha * lambda), len)?
            .into_iter()
            .enumerate()
            .map(|(n, v)| if n % 2 == 0 { v } else { -v })
            .collect(),
        ClosedFormCase::BoundI { n: pn, alpha } => {
            if pn <= j {
                return Err(HamiltonianError::BadPrincipal { n: pn, j });
            }
            if alpha <= 0.0 {
                return Err(HamiltonianError::WrongSign { family: Family::I, alpha, need: "> 0" });
            }
            let kappa = lambda * alpha / pn as f64;
            let om = omega_bound_i(kappa);
            let a = re(j as f64 + 1.0 - pn as f64);
            (0..len)
                .map(|n| Ok(om.powi(n as i32) * hyp2f1_polynomial(a, n, c, re(-2.0 * kappa / om))?))
                .collect::<Result<_, SpecFunError>>()?
        }
        ClosedFormCase::BoundII { n: pn, alpha } => {
            if pn <= j {
                return Err(HamiltonianError::BadPrincipal { n: pn, j });
            }
            if alpha >= 0.0 {
                return Err(HamiltonianError::WrongSign { family: Family::II, alpha, need: "< 0" });
            }
            let kappa = lambda * alpha / pn as f64;
            let om = omega_bound_ii(kappa);
            let a = re(j as f64 + 1.0 - pn as f64);
            (0..len)
                .map(|n| Ok((-om).powi(n as i32) * hyp2f1_polynomial(a, n, c, re(2.0 * kappa / om))?))
                .collect::<Result<_, SpecFunError>>()?
        }
        ClosedFormCase::Scatter { energy, alpha } => {
            let e = re(energy);
            let p = momentum_map(e, lambda);
            let om = omega_map(e, lambda).map_err(|_| HamiltonianError::SingularMap(energy))?;
            let i = Complex64::new(0.0, 1.0);
            let a = re(j as f64 + 1.0) - i * alpha / p;
            let x = i * 2.0 * lambda * p * om;
            let f = hyp2f1_polynomial_sequence(a, c, x, len)?;
            f.iter().enumerate().map(|(n, v)| om.powi(-(n as i32)) * v).collect()
        }
    };
    let c0 = coeffs[0];
    Ok(RadialVector::new(j, lambda, coeffs.into_iter().map(|v| v / c0).collect()))
}

/// `max_n |R^II(-alpha)(n) - (-1)^n R^I(alpha)(n)|` for `R(0) = 1` normalizations.
pub fn reflection_check(n: usize, j: usize, alpha: f64, lambda: f64, len: usize) -> HamResult<f64> {
    let r1 = solve_radial_closed_form(ClosedFormCase::BoundI { n, alpha }, j, lambda, len)?;
    let r2 = solve_radial_closed_form(ClosedFormCase::BoundII { n, alpha: -alpha }, j, lambda, len)?;
    Ok(r1
        .coeffs
        .iter()
        .zip(&r2.coeffs)
        .enumerate()
        .map(|(k, (a, b))| {
            let s = if k % 2 == 0 { 1.0 } else { -1.0 };
            (b - a * s).norm()
        })
        .fold(0.0, f64::max))
}
