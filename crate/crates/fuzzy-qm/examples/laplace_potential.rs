//! The discrete Laplace equation reproduces the Coulomb potential level by level.

use fuzzy_qm::hamiltonian::{coulomb_potential, solve_nc_laplace};

fn main() {
    let (q, q0, lambda) = (1.0, 0.0, 0.2);
    for (n, u) in solve_nc_laplace(q, q0, lambda, 10).iter().enumerate() {
        println!("N={n:>2} r={:.1} U={u:+.15} closed={:+.15}", lambda * (n as f64 + 1.0), coulomb_potential(q, q0, lambda, n));
    }
}
