//! Velocity operators on random waves: commuting components, the E(4)
//! relations and the Ehrenfest theorem for the Coulomb potential.

use fuzzy_qm::dynamics::{e4_symmetry_suite, ehrenfest_check, uncertainty_check, v2_h0_relation_check, velocity_commutator_check};
use fuzzy_qm::opwave::OpWave;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let psi = OpWave::random_balanced(0.5, 10, &mut ChaCha8Rng::seed_from_u64(7));
    println!("[V1, X1] uncertainty relation: {:.1e}", uncertainty_check(0, 0, &psi));
    println!("[V_i, V_j] = 0: {:.1e}", velocity_commutator_check(&psi));
    println!("V^2/2 against H0: {:.1e}", v2_h0_relation_check(&psi));
    for c in e4_symmetry_suite(&psi, 1e-10) {
        println!("{}: {:.1e}", c.name, c.residual);
    }
    let e = ehrenfest_check(1.0, &psi);
    println!("Ehrenfest printed {:.2e}, reordered {:.2e}, corrected {:.2e}", e.printed, e.reordered, e.corrected);
}
