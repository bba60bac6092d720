//! Ladder matrices on the truncated Fock space and the coordinate algebra they generate.

use fuzzy_qm::fock::{LadderKind, Mode, TruncatedFockSpace};
use fuzzy_qm::opwave::{levi_civita, pauli};
use nalgebra::DMatrix;
use num_complex::Complex64;

fn main() {
    let (n_max, lambda) = (10, 0.5);
    let space = TruncatedFockSpace::new(n_max);
    println!("n_max = {n_max}: dimension {}", space.dim());

    let lower: Vec<_> = Mode::BOTH.iter().map(|&m| space.ladder(LadderKind::lower(m)).entries).collect();
    let raise: Vec<_> = Mode::BOTH.iter().map(|&m| space.ladder(LadderKind::raise(m)).entries).collect();
    let id = DMatrix::<Complex64>::identity(space.dim(), space.dim());
    let canonical = &lower[0] * &raise[0] - &raise[0] * &lower[0] - &id;
    println!("[a1, a1^dag] - 1 on the valid window: {:.1e}", space.window_max_abs(&canonical, 1));

    let x: Vec<DMatrix<Complex64>> = (0..3)
        .map(|i| {
            let s = pauli(i);
            let mut m = DMatrix::zeros(space.dim(), space.dim());
            for a in 0..2 {
                for b in 0..2 {
                    m += (&raise[a] * &lower[b]) * (s[a][b] * lambda);
                }
            }
            m
        })
        .collect();
    for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        let lhs = &x[i] * &x[j] - &x[j] * &x[i];
        let rhs = &x[k] * Complex64::new(0.0, 2.0 * lambda * levi_civita(i, j, k));
        println!("[x{}, x{}] - 2i lambda x{}: {:.1e}", i + 1, j + 1, k + 1, space.window_max_abs(&(lhs - rhs), 1));
    }
    let r = space.diagonal_by_level(|n| Complex64::new(lambda * (n as f64 + 1.0), 0.0));
    let xx = x.iter().fold(DMatrix::zeros(space.dim(), space.dim()), |acc, m| acc + m * m);
    let constraint = &r * &r - xx - &id * Complex64::new(lambda * lambda, 0.0);
    println!("r^2 - x.x - lambda^2: {:.1e}", space.window_max_abs(&constraint, 1));
}
