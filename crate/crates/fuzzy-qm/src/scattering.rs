//! Scattering kinematics, the partial-wave S-matrix and its poles.

use crate::hamiltonian::{bound_energy, EnergyLevel, Family, HamiltonianError};
use crate::specfun::{log_gamma, reciprocal_gamma, SpecFunError};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScatteringError {
    #[error("energy {energy} outside the scattering interval (0, {upper})")]
    OutsideInterval { energy: f64, upper: f64 },
    #[error("singular conformal map at E = {0}")]
    Singular(Complex64),
    #[error("pole enumeration needs a nonzero coupling")]
    ZeroCoupling,
    #[error(transparent)]
    Special(#[from] SpecFunError),
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
}

pub type ScatResult<T> = Result<T, ScatteringError>;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `p = sqrt(2E (1 - lambda^2 E / 2))`, continuous from the upper half E-plane.
///
/// Real energies outside `[0, 2/lambda^2]` sit on the cut; they take the
/// value reached from above, `+i|p|` below zero and `-i|p|` above `2/lambda^2`.
pub fn momentum_map(energy: Complex64, lambda: f64) -> Complex64 {
    let w = energy * 2.0 - energy * energy * (lambda * lambda);
    if w.im == 0.0 && w.re < 0.0 {
        let s = (-w.re).sqrt();
        let side = if 1.0 - lambda * lambda * energy.re > 0.0 { 1.0 } else { -1.0 };
        return I * (s * side);
    }
    w.sqrt()
}

/// Inverse map `E = (1 + i sqrt(lambda^2 p^2 - 1)) / lambda^2`, principal root.
pub fn energy_from_p(p: Complex64, lambda: f64) -> Complex64 {
    let l2 = lambda * lambda;
    (Complex64::new(1.0, 0.0) + I * (p * p * l2 - 1.0).sqrt()) / l2
}

/// `Omega = (p - i lambda E) / (p + i lambda E)`.
///
/// With the branch of [`momentum_map`] the upper half-plane lands outside
/// the unit circle, so decaying radial factors are powers of `1 / Omega`.
pub fn omega_map(energy: Complex64, lambda: f64) -> ScatResult<Complex64> {
    let p = momentum_map(energy, lambda);
    let den = p + I * lambda * energy;
    if den.norm() == 0.0 {
        return Err(ScatteringError::Singular(energy));
    }
    Ok((p - I * lambda * energy) / den)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScatterKinematics {
    pub energy: Complex64,
    pub lambda: f64,
    pub p: Complex64,
    pub omega: Complex64,
}

impl ScatterKinematics {
    pub fn new(energy: Complex64, lambda: f64) -> ScatResult<Self> {
        Ok(Self {
            energy,
            lambda,
            p: momentum_map(energy, lambda),
            omega: omega_map(energy, lambda)?,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct SMatrixEntry {
    pub j: usize,
    pub energy: f64,
    pub re: f64,
    pub im: f64,
}

impl SMatrixEntry {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

fn check_interval(energy: f64, lambda: f64) -> ScatResult<()> {
    let upper = 2.0 / (lambda * lambda);
    if !(energy > 0.0 && energy < upper) {
        return Err(ScatteringError::OutsideInterval { energy, upper });
    }
    Ok(())
}

/// `Gamma(j+1 - i alpha/p) / Gamma(j+1 + i alpha/p)` at complex momentum.
pub fn s_matrix_at_p(j: usize, p: Complex64, alpha: f64) -> ScatResult<Complex64> {
    let shift = I * alpha / p;
    let base = Complex64::new(j as f64 + 1.0, 0.0);
    Ok((log_gamma(base - shift)? - log_gamma(base + shift)?).exp())
}

pub fn s_matrix(j: usize, energy: f64, alpha: f64, lambda: f64) -> ScatResult<Complex64> {
    check_interval(energy, lambda)?;
    s_matrix_at_p(j, momentum_map(Complex64::new(energy, 0.0), lambda), alpha)
}

/// Undeformed Coulomb S-matrix with `k = sqrt(2E)`.
pub fn s_matrix_standard(j: usize, energy: f64, alpha: f64) -> ScatResult<Complex64> {
    if energy <= 0.0 {
        return Err(ScatteringError::OutsideInterval { energy, upper: f64::INFINITY });
    }
    s_matrix_at_p(j, Complex64::new((2.0 * energy).sqrt(), 0.0), alpha)
}

pub fn s_matrix_grid(j: usize, alpha: f64, lambda: f64, energies: &[f64]) -> ScatResult<Vec<SMatrixEntry>> {
    energies
        .iter()
        .map(|&e| {
            let v = s_matrix(j, e, alpha, lambda)?;
            Ok(SMatrixEntry { j, energy: e, re: v.re, im: v.im })
        })
        .collect()
}

/// `count` evenly spaced interior points of `(0, 2/lambda^2)`.
pub fn scattering_grid(lambda: f64, count: usize) -> Vec<f64> {
    let upper = 2.0 / (lambda * lambda);
    (1..=count).map(|k| upper * k as f64 / (count + 1) as f64).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct Pole {
    pub level: EnergyLevel,
    /// `i alpha / n`.
    pub p_re: f64,
    pub p_im: f64,
    /// `|1 / Gamma(j + 1 - i alpha / p_n)|`.
    pub residual: f64,
    /// Relative distance between the level and the inverse conformal map of `p_n`.
    pub energy_mismatch: f64,
}

/// Analytic pole positions `p_n = i alpha / n` for `n = j+1 .. j+count`.
pub fn enumerate_poles(j: usize, alpha: f64, lambda: f64, count: usize) -> ScatResult<Vec<Pole>> {
    if alpha == 0.0 {
        return Err(ScatteringError::ZeroCoupling);
    }
    let family = if alpha > 0.0 { Family::I } else { Family::II };
    (j + 1..j + 1 + count)
        .map(|n| {
            let level = bound_energy(family, n, j, alpha, lambda)?;
            let p = I * (alpha / n as f64);
            let arg = Complex64::new(j as f64 + 1.0, 0.0) - I * alpha / p;
            // The family II energy sits on the second root of the inverse map.
            let mapped = match family {
                Family::I => energy_from_p(p, lambda),
                Family::II => Complex64::new(2.0 / (lambda * lambda), 0.0) - energy_from_p(p, lambda),
            };
            Ok(Pole {
                level,
                p_re: 0.0,
                p_im: p.im,
                residual: reciprocal_gamma(arg).norm(),
                energy_mismatch: (mapped - level.value).norm() / level.value.abs(),
            })
        })
        .collect()
}

/// `tau = 1 + q^2 / (2E - lambda^2 E^2)` on the scattering interval.
pub fn so31_casimir_tau(energy: f64, q: f64, lambda: f64) -> ScatResult<f64> {
    check_interval(energy, lambda)?;
    Ok(1.0 + q * q / (2.0 * energy - lambda * lambda * energy * energy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{build_radial_hamiltonian, diagonalize, omega_bound_i, SpectrumEnd};
    use proptest::prelude::*;

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn momentum_examples() {
        let lam = 0.7;
        let p = momentum_map(c(1.0 / (lam * lam)), lam);
        assert!((p - c(1.0 / lam)).norm() < 1e-14);
        assert!(momentum_map(c(2.0 / (lam * lam)), lam).norm() < 1e-7);
        let e = 1e-9;
        assert!((momentum_map(c(e), lam).re / (2.0 * e).sqrt() - 1.0).abs() < 1e-8);
        for e in scattering_grid(lam, 50) {
            let p = momentum_map(c(e), lam);
            assert!(p.im == 0.0 && p.re > 0.0 && p.re <= 1.0 / lam + 1e-12);
        }
    }

    #[test]
    fn edges_of_the_cut() {
        let lam = 1.0;
        let eps = 1e-9;
        for &e in &[0.3, 0.8, 1.2, 1.7] {
            let above = momentum_map(Complex64::new(e, eps), lam);
            let on = momentum_map(c(e), lam);
            assert!((above - on).norm() < 1e-6);
            if e < 1.0 {
                assert!(above.im > 0.0);
            } else {
                assert!(above.im < 0.0);
            }
        }
        for &e in &[-0.5, 2.5] {
            let above = momentum_map(Complex64::new(e, eps), lam);
            assert!((above - momentum_map(c(e), lam)).norm() < 1e-6);
        }
    }

    #[test]
    fn omega_examples() {
        let lam = 0.9;
        for e in scattering_grid(lam, 40) {
            assert!((omega_map(c(e), lam).unwrap().norm() - 1.0).abs() < 1e-13);
        }
        for n in 1..5 {
            let lvl = bound_energy(Family::I, n, 0, 1.0, lam).unwrap();
            let om = omega_map(c(lvl.value), lam).unwrap();
            let expect = 1.0 / omega_bound_i(lam / n as f64);
            assert!(om.im.abs() < 1e-12 && (om.re - expect).abs() < 1e-12 * expect);
        }
        assert!((omega_map(c(1e-12), 1e-6).unwrap() - c(1.0)).norm() < 1e-9);
    }

    #[test]
    fn s_matrix_examples() {
        let lam = 0.5;
        for j in 0..3 {
            for e in scattering_grid(lam, 100) {
                assert!((s_matrix(j, e, 0.0, lam).unwrap() - c(1.0)).norm() < 1e-15);
                assert!((s_matrix(j, e, 1.3, lam).unwrap().norm() - 1.0).abs() < 1e-12);
            }
        }
        assert!(s_matrix(0, 0.0, 1.0, lam).is_err());
        assert!(s_matrix(0, 8.0, 1.0, lam).is_err());
        for &e in &[0.05, 0.5, 2.0] {
            let a = s_matrix(1, e, 1.0, 1e-4).unwrap();
            let b = s_matrix_standard(1, e, 1.0).unwrap();
            assert!((a - b).norm() <= 1e-6 * b.norm());
        }
    }

    #[test]
    fn s_matrix_mirror_energies() {
        let lam = 0.8;
        let upper = 2.0 / (lam * lam);
        for e in scattering_grid(lam, 30) {
            let a = s_matrix(2, e, -0.7, lam).unwrap();
            let b = s_matrix(2, upper - e, -0.7, lam).unwrap();
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn poles_examples() {
        let lam = 0.5;
        for j in 0..3 {
            for pole in enumerate_poles(j, 1.0, lam, 5).unwrap() {
                let e = bound_energy(Family::I, pole.level.n, j, 1.0, lam).unwrap().value;
                assert_eq!(pole.level.value, e);
                assert!(pole.residual <= 1e-12 && pole.energy_mismatch < 1e-12, "{pole:?}");
                let p = momentum_map(c(e), lam);
                assert!((p.im - pole.p_im).abs() < 1e-12 && p.re == 0.0);
            }
            for pole in enumerate_poles(j, -1.0, lam, 5).unwrap() {
                let e1 = bound_energy(Family::I, pole.level.n, j, 1.0, lam).unwrap().value;
                assert!((pole.level.value - (2.0 / (lam * lam) - e1)).abs() < 1e-13);
                assert!(pole.residual <= 1e-12 && pole.energy_mismatch < 1e-12, "{pole:?}");
                let p = momentum_map(c(pole.level.value), lam);
                assert!((p.im - pole.p_im).abs() < 1e-9 && p.re == 0.0);
            }
        }
        let first = enumerate_poles(0, 1.0, 1e-7, 1).unwrap()[0];
        assert!((first.level.value + 0.5).abs() < 1e-10);
        assert!(enumerate_poles(0, 0.0, 1.0, 3).is_err());
    }

    #[test]
    fn poles_match_diagonalization() {
        let lam = 1.0;
        let alpha = 2.0;
        let h = build_radial_hamiltonian(0, alpha, lam, 70).unwrap();
        let eig = diagonalize(&h, 3, SpectrumEnd::Lowest).unwrap();
        for (pole, (e, _)) in enumerate_poles(0, alpha, lam, 3).unwrap().iter().zip(&eig) {
            assert!((pole.level.value - e).abs() < 1e-9 * e.abs());
        }
        let hr = build_radial_hamiltonian(1, -alpha, lam, 70).unwrap();
        let top = diagonalize(&hr, 2, SpectrumEnd::Highest).unwrap();
        for (pole, (e, _)) in enumerate_poles(1, -alpha, lam, 2).unwrap().iter().zip(&top) {
            assert!((pole.level.value - e).abs() < 1e-9 * e.abs());
        }
    }

    #[test]
    fn tau_examples() {
        assert_eq!(so31_casimir_tau(1.0, 0.0, 1.0).unwrap(), 1.0);
        assert!((so31_casimir_tau(1.0, 1.0, 1.0).unwrap() - 2.0).abs() < 1e-15);
        let lam = 0.6;
        for e in scattering_grid(lam, 20) {
            let a = so31_casimir_tau(e, 1.5, lam).unwrap();
            let b = so31_casimir_tau(2.0 / (lam * lam) - e, 1.5, lam).unwrap();
            assert!(a > 1.0 && (a - b).abs() < 1e-12 * a);
        }
        assert!(so31_casimir_tau(-1.0, 1.0, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn inverse_map_roundtrip(re in -3.0f64..6.0, im in 0.01f64..4.0, lam in 0.2f64..2.0) {
            let e = Complex64::new(re, im);
            let p = momentum_map(e, lam);
            prop_assert!(p.re >= 0.0);
            let back = energy_from_p(p, lam);
            prop_assert!((back - e).norm() <= 1e-12 * e.norm().max(1.0 / (lam * lam)));
            let om = omega_map(e, lam).unwrap();
            prop_assert!(om.norm() > 1.0);
        }
    }
}
