//! Angular eigenfunctions built as operator waves: norms, L^2 and L3.
//!
//! The ladder-product construction is not normalized across m. The radial
//! norm formula gives the highest-weight norm, and the other members of the
//! multiplet carry an extra binomial factor C(2j, j+m).

use fuzzy_qm::opwave::{
    angular_momentum_squared, angular_momentum_superop, build_psi_jm, radial_norm_formula, window_residual,
    AngularLabel, RadialVector, SuperOp,
};
use num_complex::Complex64;

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn main() {
    let (lambda, n_max) = (0.5, 12);
    for j in 0..=2usize {
        let radial = RadialVector::from_fn(j, lambda, n_max - j + 1, |n| Complex64::new(0.7f64.powi(n as i32), 0.0));
        for m in -(j as i64)..=(j as i64) {
            let psi = build_psi_jm(AngularLabel::new(j, m).unwrap(), &radial, n_max).unwrap();
            let l2 = window_residual(&angular_momentum_squared(), &SuperOp::scalar(Complex64::new((j * (j + 1)) as f64, 0.0)), &psi);
            let l3 = window_residual(&angular_momentum_superop(2), &SuperOp::scalar(Complex64::new(m as f64, 0.0)), &psi);
            println!(
                "j={j} m={m:>2}: |Psi|^2 / (C(2j, j+m) * radial formula) - 1 = {:+.1e}, L^2 defect {l2:.1e}, L3 defect {l3:.1e}",
                psi.norm_sq() / (binomial(2 * j, (j as i64 + m) as usize) * radial_norm_formula(&radial)) - 1.0
            );
        }
    }
}
