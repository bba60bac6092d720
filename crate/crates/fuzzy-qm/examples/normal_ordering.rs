//! Normal powers of the number operator: exact ladder products, Stirling
//! conversion and the normal exponential.

use fuzzy_qm::fock::{normal_number_power_exact, FockIndex};
use fuzzy_qm::ordering::{falling_factorial, normal_exponential, normal_power_eigenvalue, stirling_first};
use num_complex::Complex64;

fn main() {
    let state = FockIndex::new(12, 8);
    for k in [0, 3, 10, 20] {
        let exact = normal_number_power_exact(k, state);
        println!(":N^{k}: on |12,8> = {exact} (falling factorial {})", falling_factorial(20, k));
    }
    println!("s(30, 5) = {}", stirling_first(30, 5));
    let lambda = 0.3;
    println!(":(lambda N)^-2: on level 4 = {:.15}", normal_power_eigenvalue(-2, 4, lambda));
    let beta = Complex64::new(0.8, 0.2);
    let n = 25;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 0..n {
        term *= beta * lambda * ((n - k) as f64 / (k + 1) as f64);
        sum += term;
    }
    println!(":exp(beta rho): on level {n}: closed {:.15} finite sum {:.15}", normal_exponential(beta, n, lambda), sum);
}
