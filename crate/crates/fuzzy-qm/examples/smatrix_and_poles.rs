//! Partial-wave S-matrix on the scattering interval and its bound-state poles.

use fuzzy_qm::scattering::{enumerate_poles, s_matrix, s_matrix_standard, scattering_grid};

fn main() {
    let (lambda, alpha, j) = (0.5, 1.0, 0);
    for e in scattering_grid(lambda, 6) {
        let s = s_matrix(j, e, alpha, lambda).unwrap();
        let std = s_matrix_standard(j, e, alpha).unwrap();
        println!("E={e:.4} S={s:.6} |S|-1={:+.1e} (undeformed {std:.6})", s.norm() - 1.0);
    }
    for a in [alpha, -alpha] {
        for p in enumerate_poles(j, a, lambda, 4).unwrap() {
            println!(
                "family {:?} n={} E={:+.12} p=i{:.4} |1/Gamma|={:.1e}",
                p.level.family, p.level.n, p.level.value, p.p_im, p.residual
            );
        }
    }
}
