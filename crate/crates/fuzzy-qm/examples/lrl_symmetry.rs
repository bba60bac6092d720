//! The Laplace-Runge-Lenz vector on diagonalized eigenstates: so(4) below
//! the scattering interval, so(3,1) inside it.

use fuzzy_qm::cli::suites::lrl_samples;

fn main() {
    let (q, lambda, n_max) = (2.0, 1.0, 40);
    for s in lrl_samples(q, lambda, n_max, 1) {
        match s.verdict {
            Ok(v) => {
                println!("{} at E = {:+.10}: {:?}, factor {:+.6}, C2 = {:.10}", s.label, s.energy, v.algebra, v.factor, v.casimir2);
                for c in v.checks {
                    println!("    {}: {:.1e}", c.name, c.residual);
                }
            }
            Err(e) => println!("{}: {e}", s.label),
        }
    }
}
