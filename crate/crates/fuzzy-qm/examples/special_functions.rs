//! Confluent and Gauss hypergeometric functions, the complex gamma function
//! and the identities the radial solutions rely on.

use fuzzy_qm::specfun::{confluent_limit_residual, gamma, hyp1f1, hyp2f1, kummer_residual, log_gamma};
use num_complex::Complex64;

fn main() {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    println!("1F1(0.5; 1.5; 1) = {}", hyp1f1(c(0.5, 0.0), c(1.5, 0.0), c(1.0, 0.0)).unwrap());
    println!("2F1(1, 1; 2; 0.5) = {} (2 ln 2 = {})", hyp2f1(c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(0.5, 0.0)).unwrap(), 2.0 * 2f64.ln());
    println!("Gamma(5) = {}", gamma(c(5.0, 0.0)).unwrap());
    println!("log Gamma(1 + 2i) = {}", log_gamma(c(1.0, 2.0)).unwrap());
    println!("Kummer defect at a=1.5+0.7i, c=4+i, x=1.7+0.5i: {:.1e}", kummer_residual(c(1.5, 0.7), c(4.0, 1.0), c(1.7, 0.5)).unwrap());
    for b in [1e2, 1e3, 1e4] {
        let r = confluent_limit_residual(c(0.5, 0.0), c(1.5, 0.0), c(0.8, 0.0), b).unwrap();
        println!("|1F1 - 2F1(a, b; c; x/b)| at b = {b:.0e}: {r:.3e}");
    }
}
