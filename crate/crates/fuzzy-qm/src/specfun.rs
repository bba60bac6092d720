//! Hypergeometric series, Bessel functions and the complex log-gamma.
//!
//! Every series is summed until 30 consecutive terms fall below
//! `1e-17 * |partial sum|`. Terminating series (a non-positive integer
//! numerator parameter) are summed exactly to their last term. Powers and
//! logarithms of complex numbers use the principal branch.

use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecFunError {
    #[error("argument outside the supported domain: {0}")]
    Domain(String),
    #[error("series did not converge within {0} terms")]
    NonConvergence(usize),
    #[error("unsupported equation: {0}")]
    Unsupported(String),
}

pub type SpecResult<T> = Result<T, SpecFunError>;

const TAIL_RUN: usize = 30;
const TAIL_REL: f64 = 1e-17;
const MAX_TERMS: usize = 200_000;

fn cz(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `Some(k)` when `z` equals the non-positive integer `-k`.
pub fn non_positive_integer(z: Complex64) -> Option<usize> {
    if z.im != 0.0 || z.re > 0.0 || z.re.fract() != 0.0 {
        return None;
    }
    Some((-z.re) as usize)
}

/// Rising factorial `(a)_m`.
pub fn pochhammer(a: Complex64, m: usize) -> Complex64 {
    (0..m).fold(cz(1.0), |acc, i| acc * (a + i as f64))
}

/// Sum `sum_m t_m` where `t_{m+1} = t_m * ratio(m)`, starting from `t_0 = 1`.
///
/// With `terms = Some(K)` exactly `K + 1` terms are added.
fn ratio_series(
    mut ratio: impl FnMut(usize) -> Complex64,
    terms: Option<usize>,
    run: usize,
) -> SpecResult<Complex64> {
    let mut term = cz(1.0);
    let mut sum = cz(1.0);
    if let Some(last) = terms {
        for m in 0..last {
            term *= ratio(m);
            sum += term;
        }
        return Ok(sum);
    }
    let mut small = 0usize;
    for m in 0..MAX_TERMS {
        term *= ratio(m);
        sum += term;
        if term.norm() < TAIL_REL * sum.norm() || term.norm() == 0.0 {
            small += 1;
            if small >= run {
                return Ok(sum);
            }
        } else {
            small = 0;
        }
    }
    Err(SpecFunError::NonConvergence(MAX_TERMS))
}

fn check_denominator(c: Complex64, last_term: Option<usize>) -> SpecResult<()> {
    if let Some(k) = non_positive_integer(c) {
        // (c)_m vanishes for m > k, so the series must stop at or before m = k.
        match last_term {
            Some(n) if n <= k => Ok(()),
            _ => Err(SpecFunError::Domain(format!(
                "denominator parameter {c} is a non-positive integer"
            ))),
        }
    } else {
        Ok(())
    }
}

/// Kummer's confluent function `1F1(a; c; x)`.
pub fn hyp1f1(a: Complex64, c: Complex64, x: Complex64) -> SpecResult<Complex64> {
    hyp1f1_with_run(a, c, x, TAIL_RUN)
}

fn hyp1f1_with_run(a: Complex64, c: Complex64, x: Complex64, run: usize) -> SpecResult<Complex64> {
    let last = non_positive_integer(a);
    check_denominator(c, last)?;
    ratio_series(|m| (a + m as f64) / (c + m as f64) * x / (m as f64 + 1.0), last, run)
}

/// Gauss hypergeometric function `2F1(a, b; c; x)`.
///
/// Non-terminating series are only accepted for `|x| < 1`.
pub fn hyp2f1(a: Complex64, b: Complex64, c: Complex64, x: Complex64) -> SpecResult<Complex64> {
    hyp2f1_with_run(a, b, c, x, TAIL_RUN)
}

fn hyp2f1_with_run(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    x: Complex64,
    run: usize,
) -> SpecResult<Complex64> {
    let last = match (non_positive_integer(a), non_positive_integer(b)) {
        (Some(p), Some(q)) => Some(p.min(q)),
        (p, q) => p.or(q),
    };
    check_denominator(c, last)?;
    if last.is_none() && x.norm() >= 1.0 {
        return Err(SpecFunError::Domain(format!(
            "non-terminating 2F1 needs |x| < 1, got |x| = {}",
            x.norm()
        )));
    }
    ratio_series(
        |m| {
            let mf = m as f64;
            (a + mf) * (b + mf) / ((c + mf) * (mf + 1.0)) * x
        },
        last,
        run,
    )
}

/// Finite `2F1(a, -n; c; x)` summed with the term ratio
/// `(a+m)(m-n) x / ((c+m)(m+1))`, stopping early when `a` is a
/// non-positive integer.
pub fn hyp2f1_polynomial(a: Complex64, n: usize, c: Complex64, x: Complex64) -> SpecResult<Complex64> {
    check_denominator(c, Some(n))?;
    let mut term = cz(1.0);
    let mut sum = term;
    for m in 0..n {
        let mf = m as f64;
        term = term * ((a + mf) / (c + mf)) * (x * ((mf - n as f64) / (mf + 1.0)));
        if term == cz(0.0) {
            break;
        }
        sum += term;
    }
    Ok(sum)
}

/// `2F1(a, -n; c; x)` for `n = 0..len`.
///
/// When `a` is a non-positive integer the series is short and is summed
/// directly. Otherwise the sequence comes from the contiguous relation
/// `(c+n) F_{n+1} = (2n + c - (a+n) x) F_n + n (x-1) F_{n-1}`, which stays
/// accurate where the series cancels (`|x|` and `|1-x|` near 1).
pub fn hyp2f1_polynomial_sequence(a: Complex64, c: Complex64, x: Complex64, len: usize) -> SpecResult<Vec<Complex64>> {
    check_denominator(c, None)?;
    if non_positive_integer(a).is_some() {
        return (0..len).map(|n| hyp2f1_polynomial(a, n, c, x)).collect();
    }
    let mut out = Vec::with_capacity(len);
    let (mut prev, mut cur) = (cz(0.0), cz(1.0));
    for n in 0..len {
        out.push(cur);
        let nf = n as f64;
        let next = ((c + 2.0 * nf - (a + nf) * x) * cur + (x - 1.0) * nf * prev) / (c + nf);
        (prev, cur) = (cur, next);
    }
    Ok(out)
}

/// `1F1(-n; c; x)` for `n = 0..len`, from the Laguerre-type recurrence
/// `(c+n) M_{n+1} = (2n + c - x) M_n - n M_{n-1}`.
pub fn hyp1f1_polynomial_sequence(c: Complex64, x: Complex64, len: usize) -> SpecResult<Vec<Complex64>> {
    check_denominator(c, None)?;
    let mut out = Vec::with_capacity(len);
    let (mut prev, mut cur) = (cz(0.0), cz(1.0));
    for n in 0..len {
        out.push(cur);
        let nf = n as f64;
        let next = ((c + 2.0 * nf - x) * cur - prev * nf) / (c + nf);
        (prev, cur) = (cur, next);
    }
    Ok(out)
}

/// Bessel function of the first kind `J_nu(x)` from its power series.
pub fn bessel_j(nu: Complex64, x: Complex64) -> SpecResult<Complex64> {
    if let Some(k) = non_positive_integer(nu) {
        if k > 0 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            return Ok(bessel_j(cz(k as f64), x)? * sign);
        }
    }
    if x == cz(0.0) {
        return Ok(if nu == cz(0.0) { cz(1.0) } else { cz(0.0) });
    }
    let half = x / 2.0;
    let lead = (nu * half.ln() - log_gamma(nu + 1.0)?).exp();
    let q = -(half * half);
    let series = ratio_series(|m| q / ((m as f64 + 1.0) * (nu + m as f64 + 1.0)), None, TAIL_RUN)?;
    Ok(lead * series)
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Logarithm of the gamma function.
///
/// Lanczos approximation (`g = 7`, nine terms) for `Re z >= 1/2`, with the
/// reflection formula below. The result is the analytic log-gamma whose
/// imaginary part is continuous off the negative real axis; it can differ
/// from `arg Gamma(z)` by a multiple of `2 pi`, which cancels in every ratio.
pub fn log_gamma(z: Complex64) -> SpecResult<Complex64> {
    if non_positive_integer(z).is_some() {
        return Err(SpecFunError::Domain(format!("gamma has a pole at {z}")));
    }
    if z.re < 0.5 {
        let s = (z * PI).sin();
        return Ok(cz(PI.ln()) - s.ln() - log_gamma(cz(1.0) - z)?);
    }
    let z = z - 1.0;
    let mut acc = cz(LANCZOS[0]);
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += *c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    Ok(cz(0.5 * (2.0 * PI).ln()) + (z + 0.5) * t.ln() - t + acc.ln())
}

pub fn gamma(z: Complex64) -> SpecResult<Complex64> {
    Ok(log_gamma(z)?.exp())
}

/// `1/Gamma(z)`, zero at the poles.
pub fn reciprocal_gamma(z: Complex64) -> Complex64 {
    match log_gamma(z) {
        Ok(lg) => (-lg).exp(),
        Err(_) => cz(0.0),
    }
}

/// `|e^{-x/2} 1F1(a,c;x) - e^{x/2} 1F1(c-a,c;-x)|`.
pub fn kummer_residual(a: Complex64, c: Complex64, x: Complex64) -> SpecResult<f64> {
    let lhs = (-x / 2.0).exp() * hyp1f1(a, c, x)?;
    let rhs = (x / 2.0).exp() * hyp1f1(c - a, c, -x)?;
    Ok((lhs - rhs).norm())
}

/// `|1F1(a;c;x) - 2F1(a,b;c;x/b)|` for a large real `b`.
pub fn confluent_limit_residual(a: Complex64, c: Complex64, x: Complex64, b: f64) -> SpecResult<f64> {
    let confluent = hyp1f1(a, c, x)?;
    let gauss = hyp2f1(a, cz(b), c, x / b)?;
    Ok((confluent - gauss).norm())
}

/// `|2F1(a,b;c;x) - (1-x)^{-b} 2F1(c-a,b;c;x/(x-1))|`, both sides inside the unit disc.
pub fn euler_transform_residual(a: Complex64, b: Complex64, c: Complex64, x: Complex64) -> SpecResult<f64> {
    let lhs = hyp2f1(a, b, c, x)?;
    let rhs = (cz(1.0) - x).powc(-b) * hyp2f1(c - a, b, c, x / (x - 1.0))?;
    Ok((lhs - rhs).norm())
}

/// `(a0 x + b0) y'' + (a1 x + b1) y' + (a2 x + b2) y = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneralSecondOrderEq {
    pub a0: Complex64,
    pub b0: Complex64,
    pub a1: Complex64,
    pub b1: Complex64,
    pub a2: Complex64,
    pub b2: Complex64,
}

impl GeneralSecondOrderEq {
    /// Equation with `a0 = 1`, `b0 = 0`.
    pub fn normalized(a1: Complex64, b1: Complex64, a2: Complex64, b2: Complex64) -> Self {
        Self {
            a0: cz(1.0),
            b0: cz(0.0),
            a1,
            b1,
            a2,
            b2,
        }
    }

    /// `D^2 = a1^2 - 4 a0 a2`.
    pub fn discriminant_sq(&self) -> Complex64 {
        self.a1 * self.a1 - 4.0 * self.a0 * self.a2
    }

    /// Left-hand side evaluated from supplied `y, y', y''`.
    pub fn residual(&self, x: Complex64, y: Complex64, dy: Complex64, d2y: Complex64) -> Complex64 {
        (self.a0 * x + self.b0) * d2y + (self.a1 * x + self.b1) * dy + (self.a2 * x + self.b2) * y
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ReducedKind {
    /// `y = e^{rate x} 1F1(a; c; -D x)`.
    Confluent { a: Complex64, c: Complex64, d: Complex64 },
    /// `y = e^{rate x} x^{(1-b1)/2} J_order(sqrt(arg_coeff x))`.
    Bessel { order: Complex64, arg_coeff: Complex64 },
}

/// Regular solution of a reduced second-order equation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReducedSolutionForm {
    pub kind: ReducedKind,
    pub exp_rate: Complex64,
    pub scale: Complex64,
}

impl ReducedSolutionForm {
    pub fn eval(&self, x: Complex64) -> SpecResult<Complex64> {
        let body = match self.kind {
            ReducedKind::Confluent { a, c, d } => hyp1f1(a, c, -d * x)?,
            ReducedKind::Bessel { order, arg_coeff } => {
                x.powc(order / 2.0) * bessel_j(order, (arg_coeff * x).sqrt())?
            }
        };
        Ok(self.scale * (self.exp_rate * x).exp() * body)
    }
}

/// Map a linear second-order equation with `a0 = 1, b0 = 0` to confluent or Bessel form.
pub fn reduce_general_equation(eq: &GeneralSecondOrderEq, branch: Branch) -> SpecResult<ReducedSolutionForm> {
    if eq.a0 != cz(1.0) || eq.b0 != cz(0.0) {
        return Err(SpecFunError::Unsupported("only a0 = 1 and b0 = 0 are handled".into()));
    }
    let d2 = eq.discriminant_sq();
    if d2 != cz(0.0) {
        let d = d2.sqrt() * branch.sign();
        let a = ((d - eq.a1) / 2.0 * eq.b1 + eq.b2) / d;
        Ok(ReducedSolutionForm {
            kind: ReducedKind::Confluent { a, c: eq.b1, d },
            exp_rate: (d - eq.a1) / 2.0,
            scale: cz(1.0),
        })
    } else {
        Ok(ReducedSolutionForm {
            kind: ReducedKind::Bessel {
                order: cz(1.0) - eq.b1,
                arg_coeff: -2.0 * eq.a1 * eq.b1 + 4.0 * eq.b2,
            },
            exp_rate: -eq.a1 / 2.0,
            scale: cz(1.0),
        })
    }
}
