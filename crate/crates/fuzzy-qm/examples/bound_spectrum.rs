//! Lowest radial eigenvalues of the Coulomb problem compared with the closed form.

use fuzzy_qm::hamiltonian::{bound_energy, build_radial_hamiltonian, diagonalize, Family, SpectrumEnd};
use std::time::Instant;

fn main() {
    let (lambda, q, n_max) = (0.5, 1.0, 300);
    let start = Instant::now();
    let h = build_radial_hamiltonian(0, q, lambda, n_max).expect("radial operator");
    let levels = diagonalize(&h, 3, SpectrumEnd::Lowest).expect("eigenpairs");
    for (k, (e, _)) in levels.iter().enumerate() {
        let exact = bound_energy(Family::I, k + 1, 0, q, lambda).unwrap().value;
        println!("n={} numeric={e:.12} closed={exact:.12} rel={:.2e}", k + 1, ((e - exact) / exact).abs());
    }
    println!("elapsed {:.2?}", start.elapsed());
}
