//! Normal-ordering calculus for functions of `rho = lambda N`.
//!
//! A normal power `:rho^k:` acts on the level-`n` subspace as the falling
//! factorial `lambda^k n!/(n-k)!`. Conversions to ordinary powers go through
//! signed Stirling numbers of the first kind, kept as big integers.

use crate::specfun;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};

/// Signed Stirling numbers of the first kind `s(n, k)` for `k <= n <= max_n`.
#[derive(Clone, Debug)]
pub struct StirlingTable {
    rows: Vec<Vec<BigInt>>,
}

impl Default for StirlingTable {
    fn default() -> Self {
        Self::new(0)
    }
}

impl StirlingTable {
    pub fn new(max_n: usize) -> Self {
        let mut t = Self {
            rows: vec![vec![BigInt::one()]],
        };
        t.extend_to(max_n);
        t
    }

    pub fn max_n(&self) -> usize {
        self.rows.len() - 1
    }

    /// Grow the table with `s(n+1,k) = s(n,k-1) - n s(n,k)`.
    pub fn extend_to(&mut self, max_n: usize) {
        while self.rows.len() <= max_n {
            let n = self.rows.len() - 1;
            let prev = &self.rows[n];
            let mut next = vec![BigInt::zero(); n + 2];
            for k in 1..=n + 1 {
                let left = &prev[k - 1];
                let right = if k <= n { &prev[k] * BigInt::from(n) } else { BigInt::zero() };
                next[k] = left - right;
            }
            self.rows.push(next);
        }
    }

    /// `s(n, k)`, zero for `k > n`.
    pub fn get(&mut self, n: usize, k: usize) -> BigInt {
        if k > n {
            return BigInt::zero();
        }
        self.extend_to(n);
        self.rows[n][k].clone()
    }

    pub fn row(&mut self, n: usize) -> &[BigInt] {
        self.extend_to(n);
        &self.rows[n]
    }
}

/// `s(n, k)` from a fresh table.
pub fn stirling_first(n: usize, k: usize) -> BigInt {
    StirlingTable::new(n).get(n, k)
}

/// Falling factorial `n!/(n-k)!` as an exact integer; zero when `k > n`.
pub fn falling_factorial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    ((n - k + 1)..=n).fold(BigInt::one(), |acc, v| acc * BigInt::from(v))
}

/// Eigenvalue of `:(lambda N)^k:` on the level-`n` subspace.
///
/// Negative `k = -m` follows `lambda^-m n!/(n+m)!`.
pub fn normal_power_eigenvalue(k: i64, n: usize, lambda: f64) -> f64 {
    if k >= 0 {
        let k = k as usize;
        if k > n {
            return 0.0;
        }
        let ff: f64 = ((n - k + 1)..=n).map(|v| v as f64).product();
        lambda.powi(k as i32) * ff
    } else {
        let m = k.unsigned_abs() as usize;
        let rising: f64 = ((n + 1)..=(n + m)).map(|v| v as f64).product();
        lambda.powi(-(m as i32)) / rising
    }
}

/// Radial function written as `sum_k c_k :rho^k:`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalPolySeries {
    pub coeffs: Vec<Complex64>,
    pub lambda: f64,
}

impl NormalPolySeries {
    pub fn new(coeffs: Vec<Complex64>, lambda: f64) -> Self {
        Self { coeffs, lambda }
    }

    /// Value on the level-`n` subspace.
    pub fn eigenvalue(&self, n: usize) -> Complex64 {
        self.coeffs
            .iter()
            .enumerate()
            .take(n + 1)
            .map(|(k, c)| c * normal_power_eigenvalue(k as i64, n, self.lambda))
            .sum()
    }

    /// Coefficients `d_i` of the ordinary polynomial `sum_i d_i rho^i`.
    pub fn to_ordinary(&self, table: &mut StirlingTable) -> Vec<Complex64> {
        let len = self.coeffs.len();
        let mut out = vec![Complex64::zero(); len];
        for (k, c) in self.coeffs.iter().enumerate() {
            let row = table.row(k).to_vec();
            for (i, s) in row.iter().enumerate() {
                let s = s.to_f64().expect("Stirling number fits in f64");
                out[i] += c * s * self.lambda.powi((k - i) as i32);
            }
        }
        out
    }
}

/// Convert a normal series into an ordinary polynomial in `rho`.
pub fn normal_to_ordinary(p: &NormalPolySeries) -> Vec<Complex64> {
    let mut table = StirlingTable::new(p.coeffs.len().saturating_sub(1));
    p.to_ordinary(&mut table)
}

/// Horner evaluation of `sum_i d_i x^i`.
pub fn eval_poly(coeffs: &[Complex64], x: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::zero(), |acc, c| acc * x + c)
}

/// `:exp(beta rho):` on level `n`, equal to `(1 + lambda beta)^n`.
pub fn normal_exponential(beta: Complex64, n: usize, lambda: f64) -> Complex64 {
    (Complex64::one() + lambda * beta).powu(n as u32)
}

/// `:rho^m exp(beta rho):` on level `n` for any integer `m`.
pub fn normal_power_times_exponential(m: i64, beta: Complex64, n: usize, lambda: f64) -> Complex64 {
    let base = Complex64::one() + beta * lambda;
    if m >= 0 {
        let mu = m as usize;
        if mu > n {
            return Complex64::zero();
        }
        normal_power_eigenvalue(m, n, lambda) * base.powu((n - mu) as u32)
    } else {
        let mu = m.unsigned_abs() as usize;
        normal_power_eigenvalue(m, n, lambda) * base.powu((n + mu) as u32)
    }
}

/// `:exp(beta rho) 1F1(a; c; Q rho):` on level `n`.
///
/// Closed form `(1 + lambda beta)^n 2F1(a, -n; c; -Q lambda / (1 + lambda beta))`.
pub fn normal_exp_hyp1f1(
    beta: Complex64,
    a: Complex64,
    c: Complex64,
    q: Complex64,
    n: usize,
    lambda: f64,
) -> Result<Complex64, specfun::SpecFunError> {
    let base = Complex64::one() + lambda * beta;
    let x = -q * lambda / base;
    let poly = specfun::hyp2f1(a, Complex64::new(-(n as f64), 0.0), c, x)?;
    Ok(base.powu(n as u32) * poly)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    /// Expand `x(x-1)...(x-n+1)` coefficient by coefficient.
    fn falling_poly(n: usize) -> Vec<BigInt> {
        let mut p = vec![BigInt::one()];
        for i in 0..n {
            let mut next = vec![BigInt::zero(); p.len() + 1];
            for (d, coef) in p.iter().enumerate() {
                next[d + 1] += coef;
                next[d] -= coef * BigInt::from(i);
            }
            p = next;
        }
        p
    }

    #[test]
    fn stirling_examples() {
        assert_eq!(stirling_first(2, 1), BigInt::from(-1));
        assert_eq!(stirling_first(3, 2), BigInt::from(-3));
        assert_eq!(stirling_first(5, 5), BigInt::one());
        assert_eq!(stirling_first(3, 7), BigInt::zero());
        assert_eq!(stirling_first(4, 0), BigInt::zero());
    }

    #[test]
    fn stirling_matches_expanded_falling_factorial() {
        let mut t = StirlingTable::new(40);
        for n in 0..=40 {
            assert_eq!(t.row(n).to_vec(), falling_poly(n), "n = {n}");
            assert_eq!(t.get(n, n), BigInt::one());
        }
    }

    #[test]
    fn stirling_exceeds_i64_and_stays_exact() {
        let mut t = StirlingTable::new(30);
        let s = t.get(30, 1);
        assert!(s.to_i64().is_none());
        assert_eq!(s.magnitude(), falling_factorial(29, 29).magnitude());
    }

    #[test]
    fn falling_factorial_identity_at_integer_points() {
        let mut t = StirlingTable::new(25);
        for n in 0..=25usize {
            for x in -3i64..=8 {
                let lhs: BigInt = t
                    .row(n)
                    .iter()
                    .enumerate()
                    .map(|(k, s)| s * BigInt::from(x).pow(k as u32))
                    .sum();
                let rhs = (0..n as i64).fold(BigInt::one(), |acc, i| acc * BigInt::from(x - i));
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn eigenvalue_examples() {
        assert_eq!(normal_power_eigenvalue(2, 3, 1.0), 6.0);
        assert_eq!(normal_power_eigenvalue(4, 2, 1.0), 0.0);
        assert!((normal_power_eigenvalue(-1, 4, 0.5) - 0.4).abs() < 1e-15);
        assert_eq!(normal_power_eigenvalue(0, 0, 0.3), 1.0);
    }

    #[test]
    fn negative_power_inverts_shifted_positive_power() {
        for n in 0..12 {
            for m in 1..6i64 {
                let neg = normal_power_eigenvalue(-m, n, 0.7);
                let pos = normal_power_eigenvalue(m, n + m as usize, 0.7);
                assert!((neg * pos - 1.0).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn cubic_conversion() {
        let lam = 0.3;
        let p = NormalPolySeries::new(vec![c(0.0), c(0.0), c(0.0), c(1.0)], lam);
        let ord = normal_to_ordinary(&p);
        let expect = [0.0, 2.0 * lam * lam, -3.0 * lam, 1.0];
        for (a, b) in ord.iter().zip(expect) {
            assert!((a.re - b).abs() < 1e-15 && a.im == 0.0);
        }
        for n in 0..=6 {
            let rho = c(lam * n as f64);
            assert!((eval_poly(&ord, rho) - p.eigenvalue(n)).norm() < 1e-13);
        }
        assert_eq!(normal_to_ordinary(&NormalPolySeries::new(vec![c(1.0)], lam)), vec![c(1.0)]);
        assert_eq!(
            normal_to_ordinary(&NormalPolySeries::new(vec![c(0.0), c(1.0)], lam)),
            vec![c(0.0), c(1.0)]
        );
    }

    #[test]
    fn exponential_examples() {
        assert!((normal_exponential(c(1.0), 2, 0.5) - c(2.25)).norm() < 1e-15);
        assert_eq!(normal_exponential(Complex64::new(3.1, -2.0), 0, 0.4), c(1.0));
        assert_eq!(normal_exponential(c(-2.0), 3, 0.5), c(0.0));
        let brute: Complex64 = (0..=3)
            .map(|k| c((-2.0f64).powi(k) / (1..=k).product::<i32>().max(1) as f64 * normal_power_eigenvalue(k as i64, 3, 0.5)))
            .sum();
        assert!(brute.norm() < 1e-15);
    }

    #[test]
    fn power_times_exponential_examples() {
        assert!((normal_power_times_exponential(1, c(0.0), 3, 1.0) - c(3.0)).norm() < 1e-15);
        let b = Complex64::new(0.2, 0.1);
        assert!(
            (normal_power_times_exponential(0, b, 5, 0.4) - normal_exponential(b, 5, 0.4)).norm() < 1e-15
        );
        assert!((normal_power_times_exponential(2, c(1.0), 4, 0.5) - c(6.75)).norm() < 1e-13);
        // brute force: sum_k beta^k/k! :rho^(2+k):
        let brute: f64 = (0..=4)
            .map(|k| {
                let fact: f64 = (1..=k).map(|v| v as f64).product();
                normal_power_eigenvalue(2 + k as i64, 4, 0.5) / fact
            })
            .sum();
        assert!((brute - 6.75).abs() < 1e-13);
    }

    #[test]
    fn negative_power_times_exponential_series() {
        // :rho^-m e^{beta rho}: = sum_k beta^k/k! :rho^(k-m):, which terminates on level n
        // only through the falling factorial, so compare against a long partial sum.
        let (m, n, lam) = (2i64, 3usize, 0.5);
        let beta = c(0.3);
        let mut sum = 0.0;
        let mut fact = 1.0;
        for k in 0..60 {
            if k > 0 {
                fact *= k as f64;
            }
            sum += beta.re.powi(k) / fact * normal_power_eigenvalue(k as i64 - m, n, lam);
        }
        let closed = normal_power_times_exponential(-m, beta, n, lam);
        assert!((closed.re - sum).abs() < 1e-12 * sum.abs());
    }
}
