//! Closed-form radial vectors of both bound families, checked against the
//! radial operator, and the reflection between them.

use fuzzy_qm::hamiltonian::{
    bound_energy, build_radial_hamiltonian, reflection_check, solve_radial_closed_form, ClosedFormCase, Family,
};

fn main() {
    let (lambda, alpha, n_max) = (0.5, 1.0, 80);
    for j in 0..2usize {
        for n in j + 1..=3 {
            let h1 = build_radial_hamiltonian(j, alpha, lambda, n_max).unwrap();
            let r1 = solve_radial_closed_form(ClosedFormCase::BoundI { n, alpha }, j, lambda, h1.window_len + 1).unwrap();
            let e1 = bound_energy(Family::I, n, j, alpha, lambda).unwrap().value;
            let h2 = build_radial_hamiltonian(j, -alpha, lambda, n_max).unwrap();
            let r2 = solve_radial_closed_form(ClosedFormCase::BoundII { n, alpha: -alpha }, j, lambda, h2.window_len + 1).unwrap();
            let e2 = bound_energy(Family::II, n, j, -alpha, lambda).unwrap().value;
            println!(
                "n={n} j={j}: E^I={e1:+.12} residual {:.1e} | E^II={e2:.12} residual {:.1e} | reflection {:.1e}",
                h1.eigen_residual(e1, &r1),
                h2.eigen_residual(e2, &r2),
                reflection_check(n, j, alpha, lambda, 40).unwrap()
            );
        }
    }
}
