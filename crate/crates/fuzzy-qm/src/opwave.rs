//! Operator wave functions and the super-operators acting on them.
//!
//! An [`OpWave`] is an operator on the truncated Fock space stored as dense
//! blocks indexed by `(row level, column level)`, where a level is the total
//! quanta `n1 + n2`. Physical states only populate diagonal blocks. Ladder
//! operators shift one level at a time, so left and right multiplications are
//! carried out by re-indexing rows or columns instead of matrix products.

use crate::fock::{level_offset, Mode, Step, TruncatedFockSpace};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;
use thiserror::Error;

pub type Block = DMatrix<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OpWaveError {
    #[error("|m| = {m} exceeds j = {j}")]
    BadLabel { j: usize, m: i64 },
    #[error("radial vector has j = {radial}, label has j = {label}")]
    LabelMismatch { radial: usize, label: usize },
}

/// Pauli matrix `sigma^i` with `i` in `0..3`.
pub fn pauli(i: usize) -> [[Complex64; 2]; 2] {
    match i {
        0 => [[ZERO, ONE], [ONE, ZERO]],
        1 => [[ZERO, -I], [I, ZERO]],
        2 => [[ONE, ZERO], [ZERO, -ONE]],
        _ => panic!("axis {i} out of range"),
    }
}

/// Levi-Civita symbol on `0..3`.
pub fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// Operator wave function on a truncated Fock space.
#[derive(Clone, Debug, PartialEq)]
pub struct OpWave {
    lambda: f64,
    n_max: usize,
    blocks: BTreeMap<(usize, usize), Block>,
}

fn level_rows(level: usize) -> usize {
    level + 1
}

/// Row (or column) remapping for a ladder step acting on one side:
/// entries `(target index, source index, factor)` and the target level.
fn shift_map(step: Step, level: usize, n_max: usize) -> Option<(usize, Vec<(usize, usize, f64)>)> {
    match step {
        Step::Lower(mode) => {
            if level == 0 {
                return None;
            }
            let target = level - 1;
            let map = (0..=target)
                .map(|i| match mode {
                    Mode::One => (i, i + 1, ((i + 1) as f64).sqrt()),
                    Mode::Two => (i, i, ((level - i) as f64).sqrt()),
                })
                .collect();
            Some((target, map))
        }
        Step::Raise(mode) => {
            let target = level + 1;
            if target > n_max {
                return None;
            }
            let map = match mode {
                Mode::One => (1..=target).map(|i| (i, i - 1, (i as f64).sqrt())).collect(),
                Mode::Two => (0..=level).map(|i| (i, i, ((target - i) as f64).sqrt())).collect(),
            };
            Some((target, map))
        }
    }
}

fn flip(step: Step) -> Step {
    match step {
        Step::Lower(m) => Step::Raise(m),
        Step::Raise(m) => Step::Lower(m),
    }
}

impl OpWave {
    pub fn zero(lambda: f64, n_max: usize) -> Self {
        Self {
            lambda,
            n_max,
            blocks: BTreeMap::new(),
        }
    }

    /// Diagonal operator `f(N)`.
    pub fn from_level_fn(lambda: f64, n_max: usize, f: impl Fn(usize) -> Complex64) -> Self {
        let mut w = Self::zero(lambda, n_max);
        for n in 0..=n_max {
            let v = f(n);
            if v != ZERO {
                w.blocks.insert((n, n), Block::identity(n + 1, n + 1) * v);
            }
        }
        w
    }

    pub fn identity(lambda: f64, n_max: usize) -> Self {
        Self::from_level_fn(lambda, n_max, |_| ONE)
    }

    /// Single matrix unit `|row><col|`.
    pub fn unit(lambda: f64, n_max: usize, row: (usize, usize), col: (usize, usize)) -> Self {
        let (lr, lc) = (row.0 + row.1, col.0 + col.1);
        assert!(lr <= n_max && lc <= n_max, "state outside truncation");
        let mut b = Block::zeros(lr + 1, lc + 1);
        b[(row.0, col.0)] = ONE;
        let mut w = Self::zero(lambda, n_max);
        w.blocks.insert((lr, lc), b);
        w
    }

    /// Random entries in the unit square on every diagonal block.
    pub fn random_balanced<R: Rng>(lambda: f64, n_max: usize, rng: &mut R) -> Self {
        let mut w = Self::zero(lambda, n_max);
        for n in 0..=n_max {
            let b = Block::from_fn(n + 1, n + 1, |_, _| {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            w.blocks.insert((n, n), b);
        }
        w
    }

    /// Random entries on every block with `|row level - column level| <= spread`.
    pub fn random_general<R: Rng>(lambda: f64, n_max: usize, spread: usize, rng: &mut R) -> Self {
        let mut w = Self::zero(lambda, n_max);
        for l in 0..=n_max {
            for m in 0..=n_max {
                if l.abs_diff(m) <= spread {
                    let b = Block::from_fn(l + 1, m + 1, |_, _| {
                        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                    });
                    w.blocks.insert((l, m), b);
                }
            }
        }
        w
    }

    pub fn from_dense(space: &TruncatedFockSpace, mat: &DMatrix<Complex64>, lambda: f64) -> Self {
        let n_max = space.n_max();
        let mut w = Self::zero(lambda, n_max);
        for l in 0..=n_max {
            for m in 0..=n_max {
                let b = mat
                    .view((level_offset(l), level_offset(m)), (l + 1, m + 1))
                    .into_owned();
                if b.iter().any(|z| *z != ZERO) {
                    w.blocks.insert((l, m), b);
                }
            }
        }
        w
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let d = level_offset(self.n_max + 1);
        let mut out = DMatrix::zeros(d, d);
        for (&(l, m), b) in &self.blocks {
            out.view_mut((level_offset(l), level_offset(m)), (l + 1, m + 1))
                .copy_from(b);
        }
        out
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn block(&self, row_level: usize, col_level: usize) -> Option<&Block> {
        self.blocks.get(&(row_level, col_level))
    }

    pub fn blocks(&self) -> impl Iterator<Item = (&(usize, usize), &Block)> {
        self.blocks.iter()
    }

    /// Add `b` into block `(l, m)`.
    pub fn accumulate(&mut self, l: usize, m: usize, b: Block) {
        match self.blocks.get_mut(&(l, m)) {
            Some(existing) => *existing += b,
            None => {
                self.blocks.insert((l, m), b);
            }
        }
    }

    /// Equal numbers of creators and annihilators: only diagonal blocks are nonzero.
    pub fn is_balanced(&self) -> bool {
        self.blocks
            .iter()
            .all(|(&(l, m), b)| l == m || b.iter().all(|z| *z == ZERO))
    }

    /// Keep blocks whose row and column levels are both at most `top`.
    pub fn restrict(&self, top: usize) -> Self {
        Self {
            lambda: self.lambda,
            n_max: self.n_max,
            blocks: self
                .blocks
                .iter()
                .filter(|(&(l, m), _)| l <= top && m <= top)
                .map(|(k, b)| (*k, b.clone()))
                .collect(),
        }
    }

    /// `4 pi lambda^3 Tr[(N+1) Phi^dag Psi]`.
    pub fn inner(&self, other: &OpWave) -> Complex64 {
        let mut acc = ZERO;
        for (&(l, m), a) in &self.blocks {
            if let Some(b) = other.blocks.get(&(l, m)) {
                acc += a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum::<Complex64>() * (m as f64 + 1.0);
            }
        }
        acc * 4.0 * PI * self.lambda.powi(3)
    }

    /// Weighted Hilbert-Schmidt norm squared.
    pub fn norm_sq(&self) -> f64 {
        let mut acc = 0.0;
        for (&(_, m), b) in &self.blocks {
            acc += b.norm_squared() * (m as f64 + 1.0);
        }
        acc * 4.0 * PI * self.lambda.powi(3)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks
            .values()
            .flat_map(|b| b.iter())
            .fold(0.0, |acc, z| acc.max(z.norm()))
    }

    pub fn map_blocks(&self, f: impl Fn(usize, usize, &Block) -> Block) -> Self {
        Self {
            lambda: self.lambda,
            n_max: self.n_max,
            blocks: self.blocks.iter().map(|(&(l, m), b)| ((l, m), f(l, m, b))).collect(),
        }
    }

    /// `f(N) Psi`.
    pub fn left_level_fn(&self, f: impl Fn(usize) -> Complex64) -> Self {
        self.map_blocks(|l, _, b| b * f(l))
    }

    /// `Psi f(N)`.
    pub fn right_level_fn(&self, f: impl Fn(usize) -> Complex64) -> Self {
        self.map_blocks(|_, m, b| b * f(m))
    }

    /// Left multiplication by one ladder operator.
    pub fn left(&self, step: Step) -> Self {
        let mut out = Self::zero(self.lambda, self.n_max);
        for (&(l, m), b) in &self.blocks {
            if let Some((target, map)) = shift_map(step, l, self.n_max) {
                let mut nb = Block::zeros(level_rows(target), b.ncols());
                for (t, s, f) in map {
                    for c in 0..b.ncols() {
                        nb[(t, c)] = b[(s, c)] * f;
                    }
                }
                out.accumulate(target, m, nb);
            }
        }
        out
    }

    /// Right multiplication by one ladder operator.
    pub fn right(&self, step: Step) -> Self {
        // (Psi a)[r, c] = sum_k Psi[r, k] a[k, c]: a lowering operator on the
        // right re-indexes columns exactly like a raising operator on the left.
        let mut out = Self::zero(self.lambda, self.n_max);
        for (&(l, m), b) in &self.blocks {
            if let Some((target, map)) = shift_map(flip(step), m, self.n_max) {
                let mut nb = Block::zeros(b.nrows(), level_rows(target));
                for (t, s, f) in map {
                    for r in 0..b.nrows() {
                        nb[(r, t)] = b[(r, s)] * f;
                    }
                }
                out.accumulate(l, target, nb);
            }
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map_blocks(|_, _, b| b * c)
    }

    /// Operator product `self other`, summed over intermediate levels.
    pub fn product(&self, other: &OpWave) -> Self {
        assert_eq!(self.n_max, other.n_max, "truncation mismatch");
        let mut by_row: BTreeMap<usize, Vec<(usize, &Block)>> = BTreeMap::new();
        for (&(k, m), b) in &other.blocks {
            by_row.entry(k).or_default().push((m, b));
        }
        let mut out = Self::zero(self.lambda, self.n_max);
        for (&(l, k), a) in &self.blocks {
            if let Some(row) = by_row.get(&k) {
                for &(m, b) in row {
                    out.accumulate(l, m, a * b);
                }
            }
        }
        out
    }

    fn combine(&self, other: &OpWave, sign: f64) -> Self {
        assert_eq!(self.n_max, other.n_max, "truncation mismatch");
        let mut out = self.clone();
        for (&(l, m), b) in &other.blocks {
            out.accumulate(l, m, b * Complex64::new(sign, 0.0));
        }
        out
    }
}

impl Add for &OpWave {
    type Output = OpWave;
    fn add(self, rhs: &OpWave) -> OpWave {
        self.combine(rhs, 1.0)
    }
}

impl Sub for &OpWave {
    type Output = OpWave;
    fn sub(self, rhs: &OpWave) -> OpWave {
        self.combine(rhs, -1.0)
    }
}

impl Add for OpWave {
    type Output = OpWave;
    fn add(self, rhs: OpWave) -> OpWave {
        &self + &rhs
    }
}

impl Sub for OpWave {
    type Output = OpWave;
    fn sub(self, rhs: OpWave) -> OpWave {
        &self - &rhs
    }
}

impl Mul<Complex64> for &OpWave {
    type Output = OpWave;
    fn mul(self, c: Complex64) -> OpWave {
        self.scale(c)
    }
}

impl Mul<f64> for &OpWave {
    type Output = OpWave;
    fn mul(self, c: f64) -> OpWave {
        self.scale(Complex64::new(c, 0.0))
    }
}

impl Neg for &OpWave {
    type Output = OpWave;
    fn neg(self) -> OpWave {
        self.scale(-ONE)
    }
}

type Action = dyn Fn(&OpWave) -> OpWave + Send + Sync;

/// Linear map on operator wave functions.
///
/// `degree` is the gross number of ladder operators in the map; results are
/// exact on levels up to `n_max - degree`.
#[derive(Clone)]
pub struct SuperOp {
    action: Arc<Action>,
    pub degree: usize,
    pub label: String,
}

impl fmt::Debug for SuperOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SuperOp")
            .field("label", &self.label)
            .field("degree", &self.degree)
            .finish()
    }
}

impl SuperOp {
    pub fn new(label: impl Into<String>, degree: usize, f: impl Fn(&OpWave) -> OpWave + Send + Sync + 'static) -> Self {
        Self {
            action: Arc::new(f),
            degree,
            label: label.into(),
        }
    }

    pub fn identity() -> Self {
        Self::new("1", 0, |w| w.clone())
    }

    pub fn zero() -> Self {
        Self::new("0", 0, |w| OpWave::zero(w.lambda(), w.n_max()))
    }

    pub fn scalar(c: Complex64) -> Self {
        Self::new(format!("{c}"), 0, move |w| w.scale(c))
    }

    pub fn apply(&self, psi: &OpWave) -> OpWave {
        (self.action)(psi)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &SuperOp) -> SuperOp {
        let (a, b) = (self.clone(), other.clone());
        SuperOp::new(
            format!("{} {}", self.label, other.label),
            self.degree + other.degree,
            move |w| a.apply(&b.apply(w)),
        )
    }

    pub fn scaled(&self, c: Complex64) -> SuperOp {
        let a = self.clone();
        SuperOp::new(format!("{c} {}", self.label), self.degree, move |w| a.apply(w).scale(c))
    }

    pub fn commutator(&self, other: &SuperOp) -> SuperOp {
        (self.compose(other) - other.compose(self)).with_label(format!("[{}, {}]", self.label, other.label))
    }

    pub fn anticommutator(&self, other: &SuperOp) -> SuperOp {
        (self.compose(other) + other.compose(self)).with_label(format!("{{{}, {}}}", self.label, other.label))
    }

    /// `sum` of an iterator of super-operators.
    pub fn sum<I: IntoIterator<Item = SuperOp>>(ops: I) -> SuperOp {
        let ops: Vec<SuperOp> = ops.into_iter().collect();
        let degree = ops.iter().map(|o| o.degree).max().unwrap_or(0);
        let label = ops.iter().map(|o| o.label.as_str()).collect::<Vec<_>>().join(" + ");
        SuperOp::new(label, degree, move |w| {
            let mut acc = OpWave::zero(w.lambda(), w.n_max());
            for o in &ops {
                acc = &acc + &o.apply(w);
            }
            acc
        })
    }
}

impl Add for SuperOp {
    type Output = SuperOp;
    fn add(self, rhs: SuperOp) -> SuperOp {
        let degree = self.degree.max(rhs.degree);
        let label = format!("{} + {}", self.label, rhs.label);
        SuperOp::new(label, degree, move |w| &self.apply(w) + &rhs.apply(w))
    }
}

impl Sub for SuperOp {
    type Output = SuperOp;
    fn sub(self, rhs: SuperOp) -> SuperOp {
        let degree = self.degree.max(rhs.degree);
        let label = format!("{} - {}", self.label, rhs.label);
        SuperOp::new(label, degree, move |w| &self.apply(w) - &rhs.apply(w))
    }
}

impl Mul for SuperOp {
    type Output = SuperOp;
    fn mul(self, rhs: SuperOp) -> SuperOp {
        self.compose(&rhs)
    }
}

impl Mul<SuperOp> for Complex64 {
    type Output = SuperOp;
    fn mul(self, rhs: SuperOp) -> SuperOp {
        rhs.scaled(self)
    }
}

impl Mul<SuperOp> for f64 {
    type Output = SuperOp;
    fn mul(self, rhs: SuperOp) -> SuperOp {
        rhs.scaled(Complex64::new(self, 0.0))
    }
}

impl Neg for SuperOp {
    type Output = SuperOp;
    fn neg(self) -> SuperOp {
        self.scaled(-ONE)
    }
}

/// Relative residual of `lhs Psi = rhs Psi` on the valid window.
///
/// The difference is measured in the weighted norm and divided by the
/// largest of the norms of both sides and of `Psi`, all restricted to levels
/// `<= n_max - degree`.
pub fn window_residual(lhs: &SuperOp, rhs: &SuperOp, psi: &OpWave) -> f64 {
    let degree = lhs.degree.max(rhs.degree);
    let Some(top) = psi.n_max().checked_sub(degree) else {
        return f64::NAN;
    };
    let l = lhs.apply(psi).restrict(top);
    let r = rhs.apply(psi).restrict(top);
    let scale = l.norm().max(r.norm()).max(psi.restrict(top).norm());
    if scale == 0.0 {
        return 0.0;
    }
    (&l - &r).norm() / scale
}

/// Largest entrywise deviation of `lhs Psi` from `rhs Psi` on the valid window.
pub fn window_abs_residual(lhs: &SuperOp, rhs: &SuperOp, psi: &OpWave) -> f64 {
    let degree = lhs.degree.max(rhs.degree);
    let Some(top) = psi.n_max().checked_sub(degree) else {
        return f64::NAN;
    };
    (&lhs.apply(psi).restrict(top) - &rhs.apply(psi).restrict(top)).max_abs()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuperLadder {
    /// `a Psi`
    A,
    /// `a^dag Psi`
    ADag,
    /// `Psi a`
    B,
    /// `Psi a^dag`
    BDag,
}

pub fn super_ladder(kind: SuperLadder, alpha: Mode) -> SuperOp {
    let label = format!("{kind:?}{}", alpha.index() + 1);
    SuperOp::new(label, 1, move |w| match kind {
        SuperLadder::A => w.left(Step::Lower(alpha)),
        SuperLadder::ADag => w.left(Step::Raise(alpha)),
        SuperLadder::B => w.right(Step::Lower(alpha)),
        SuperLadder::BDag => w.right(Step::Raise(alpha)),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
    Symmetric,
}

/// `x_i Psi = lambda sigma^i_{ab} a_a^dag a_b Psi` from the left.
pub fn left_coordinate(i: usize, psi: &OpWave) -> OpWave {
    let s = pauli(i);
    let mut acc = OpWave::zero(psi.lambda(), psi.n_max());
    for a in Mode::BOTH {
        for b in Mode::BOTH {
            let c = s[a.index()][b.index()];
            if c != ZERO {
                let t = psi.left(Step::Lower(b)).left(Step::Raise(a));
                acc = &acc + &t.scale(c);
            }
        }
    }
    acc.scale(Complex64::new(psi.lambda(), 0.0))
}

/// `Psi x_i`.
pub fn right_coordinate(i: usize, psi: &OpWave) -> OpWave {
    let s = pauli(i);
    let mut acc = OpWave::zero(psi.lambda(), psi.n_max());
    for a in Mode::BOTH {
        for b in Mode::BOTH {
            let c = s[a.index()][b.index()];
            if c != ZERO {
                let t = psi.right(Step::Raise(a)).right(Step::Lower(b));
                acc = &acc + &t.scale(c);
            }
        }
    }
    acc.scale(Complex64::new(psi.lambda(), 0.0))
}

/// Coordinate super-operator; `Symmetric` is the average of both sides.
pub fn coordinate_superop(i: usize, side: Side) -> SuperOp {
    let axis = i + 1;
    match side {
        Side::Left => SuperOp::new(format!("x{axis}L"), 2, move |w| left_coordinate(i, w)),
        Side::Right => SuperOp::new(format!("x{axis}R"), 2, move |w| right_coordinate(i, w)),
        Side::Symmetric => SuperOp::new(format!("X{axis}"), 2, move |w| {
            (&left_coordinate(i, w) + &right_coordinate(i, w)).scale(Complex64::new(0.5, 0.0))
        }),
    }
}

/// Multiplication by `r^power` with `r = lambda (N + 1)`.
pub fn radius_superop(power: i32, side: Side) -> SuperOp {
    let label = format!("r^{power}");
    SuperOp::new(label, 0, move |w| {
        let lam = w.lambda();
        let f = move |n: usize| Complex64::new((lam * (n as f64 + 1.0)).powi(power), 0.0);
        match side {
            Side::Left => w.left_level_fn(f),
            Side::Right => w.right_level_fn(f),
            Side::Symmetric => (&w.left_level_fn(f) + &w.right_level_fn(f)).scale(Complex64::new(0.5, 0.0)),
        }
    })
}

/// Multiplication from the left by a function of the level.
pub fn level_fn_superop(label: &str, f: impl Fn(f64, usize) -> f64 + Send + Sync + 'static) -> SuperOp {
    let f = Arc::new(f);
    SuperOp::new(label, 0, move |w| {
        let lam = w.lambda();
        let g = f.clone();
        w.left_level_fn(move |n| Complex64::new(g(lam, n), 0.0))
    })
}

/// `L_i Psi = (x_i Psi - Psi x_i) / (2 lambda)`.
pub fn angular_momentum_superop(i: usize) -> SuperOp {
    SuperOp::new(format!("L{}", i + 1), 2, move |w| {
        (&left_coordinate(i, w) - &right_coordinate(i, w)).scale(Complex64::new(0.5 / w.lambda(), 0.0))
    })
}

/// `L_1 +/- i L_2`.
pub fn angular_ladder_superop(raise: bool) -> SuperOp {
    let sign = if raise { I } else { -I };
    angular_momentum_superop(0) + angular_momentum_superop(1).scaled(sign)
}

/// `sum_i L_i L_i`.
pub fn angular_momentum_squared() -> SuperOp {
    SuperOp::sum((0..3).map(|i| angular_momentum_superop(i).compose(&angular_momentum_superop(i)))).with_label("L^2")
}

/// Angular labels `(j, m)` with `|m| <= j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AngularLabel {
    pub j: usize,
    pub m: i64,
}

impl AngularLabel {
    pub fn new(j: usize, m: i64) -> Result<Self, OpWaveError> {
        if m.unsigned_abs() as usize > j {
            return Err(OpWaveError::BadLabel { j, m });
        }
        Ok(Self { j, m })
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|v| v as f64).product()
}

/// Radial coefficients `R_j(n)` for `n = 0, 1, ...`, indexed by the level at
/// which the radial operator acts inside `Psi_jm`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialVector {
    pub j: usize,
    pub lambda: f64,
    pub coeffs: Vec<Complex64>,
}

impl RadialVector {
    pub fn new(j: usize, lambda: f64, coeffs: Vec<Complex64>) -> Self {
        Self { j, lambda, coeffs }
    }

    pub fn from_fn(j: usize, lambda: f64, len: usize, f: impl Fn(usize) -> Complex64) -> Self {
        Self::new(j, lambda, (0..len).map(f).collect())
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `(n + j + 1) C(n + 2j + 1, 2j + 1)`.
    pub fn weight(j: usize, n: usize) -> f64 {
        (n + j + 1) as f64 * binomial(n + 2 * j + 1, 2 * j + 1)
    }

    pub fn weights(&self) -> Vec<f64> {
        (0..self.len()).map(|n| Self::weight(self.j, n)).collect()
    }

    /// Weighted inner product without the overall `4 pi lambda^(3+2j)/(j!)^2`.
    pub fn weighted_inner(&self, other: &RadialVector) -> Complex64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .enumerate()
            .map(|(n, (a, b))| a.conj() * b * Self::weight(self.j, n))
            .sum()
    }

    pub fn norm_sq(&self) -> f64 {
        radial_norm_formula(self)
    }

    /// Rescale so that `R(0) = 1`.
    pub fn normalized_at_origin(&self) -> Self {
        let c0 = self.coeffs[0];
        Self::new(self.j, self.lambda, self.coeffs.iter().map(|c| c / c0).collect())
    }

    pub fn truncated(&self, len: usize) -> Self {
        Self::new(self.j, self.lambda, self.coeffs.iter().take(len).copied().collect())
    }
}

/// `4 pi lambda^(3+2j)/(j!)^2 sum_n (n+j+1) C(n+2j+1, 2j+1) |R_j(n)|^2`.
pub fn radial_norm_formula(radial: &RadialVector) -> f64 {
    let j = radial.j;
    let sum: f64 = radial
        .coeffs
        .iter()
        .enumerate()
        .map(|(n, c)| RadialVector::weight(j, n) * c.norm_sqr())
        .sum();
    4.0 * PI * radial.lambda.powi(3 + 2 * j as i32) / factorial(j).powi(2) * sum
}

/// `sum_{k=0}^{n-j} C(k+j, j) C(n-k, j)`, which equals `C(n+j+1, 2j+1)`.
pub fn binomial_convolution(n: usize, j: usize) -> f64 {
    if n < j {
        return 0.0;
    }
    (0..=n - j).map(|k| binomial(k + j, j) * binomial(n - k, j)).sum()
}

/// Angular eigenfunction with the given radial coefficients.
///
/// Quadruples `(m1, m2, n1, n2)` with `m1 + m2 = n1 + n2 = j` and
/// `m1 - n1 = m` are enumerated explicitly; the overall factor is `lambda^j`.
pub fn build_psi_jm(label: AngularLabel, radial: &RadialVector, n_max: usize) -> Result<OpWave, OpWaveError> {
    if radial.j != label.j {
        return Err(OpWaveError::LabelMismatch {
            radial: radial.j,
            label: label.j,
        });
    }
    let j = label.j;
    let lam = radial.lambda;
    let core = OpWave::from_level_fn(lam, n_max, |n| radial.coeffs.get(n).copied().unwrap_or(ZERO));
    let mut out = OpWave::zero(lam, n_max);
    for m1 in 0..=j {
        let m2 = j - m1;
        let n1 = m1 as i64 - label.m;
        if n1 < 0 || n1 as usize > j {
            continue;
        }
        let n1 = n1 as usize;
        let n2 = j - n1;
        let mut t = core.clone();
        for _ in 0..m2 {
            t = t.left(Step::Raise(Mode::Two));
        }
        for _ in 0..m1 {
            t = t.left(Step::Raise(Mode::One));
        }
        for _ in 0..n1 {
            t = t.right(Step::Lower(Mode::One));
        }
        for _ in 0..n2 {
            t = t.right(Step::Lower(Mode::Two));
        }
        let sign = if n2 % 2 == 0 { 1.0 } else { -1.0 };
        let coef = sign / (factorial(m1) * factorial(m2) * factorial(n1) * factorial(n2));
        out = &out + &t.scale(Complex64::new(coef, 0.0));
    }
    Ok(out.scale(Complex64::new(lam.powi(j as i32), 0.0)))
}

/// Radial coefficients read back from the `(j, j)` component of an `OpWave`.
///
/// Inverts [`build_psi_jm`] for `m = j` using the first diagonal entry of
/// each block.
pub fn extract_radial_jj(psi: &OpWave, j: usize) -> RadialVector {
    let lam = psi.lambda();
    let len = psi.n_max().saturating_sub(j) + 1;
    let unit = RadialVector::new(j, lam, vec![ONE; len]);
    let probe = build_psi_jm(AngularLabel { j, m: j as i64 }, &unit, psi.n_max()).expect("valid label");
    let coeffs = (0..len)
        .map(|n| {
            let level = n + j;
            match (psi.block(level, level), probe.block(level, level)) {
                (Some(a), Some(p)) => {
                    // probe row j (n1 = j, n2 = n) pairs with column 0 (n1 = 0, n2 = n + j)
                    let denom = p[(j, 0)];
                    a[(j, 0)] / denom
                }
                _ => ZERO,
            }
        })
        .collect();
    RadialVector::new(j, lam, coeffs)
}

/// `4 pi lambda^3 sum_{k=0}^{n} (k+1)^2`.
pub fn ball_volume(n: usize, lambda: f64) -> f64 {
    let s: f64 = (0..=n).map(|k| ((k + 1) * (k + 1)) as f64).sum();
    4.0 * PI * lambda.powi(3) * s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::LadderKind;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn cmax(m: &Block) -> f64 {
        m.iter().fold(0.0, |a, z| a.max(z.norm()))
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn block_product_matches_dense_product() {
        let a = OpWave::random_general(0.4, 5, 2, &mut rng(11));
        let b = OpWave::random_general(0.4, 5, 1, &mut rng(12));
        let diff = a.product(&b).to_dense() - a.to_dense() * b.to_dense();
        assert!(cmax(&diff) < 1e-13);
    }

    #[test]
    fn block_ladders_match_dense_products() {
        let space = TruncatedFockSpace::new(6);
        let psi = OpWave::random_general(0.7, 6, 2, &mut rng(1));
        let dense = psi.to_dense();
        for mode in Mode::BOTH {
            let a = space.ladder(LadderKind::lower(mode)).entries;
            let ad = space.ladder(LadderKind::raise(mode)).entries;
            let cases = [
                (psi.left(Step::Lower(mode)), &a * &dense),
                (psi.left(Step::Raise(mode)), &ad * &dense),
                (psi.right(Step::Lower(mode)), &dense * &a),
                (psi.right(Step::Raise(mode)), &dense * &ad),
            ];
            for (blocky, full) in cases {
                assert!(cmax(&(blocky.to_dense() - full)) < 1e-13);
            }
        }
        let back = OpWave::from_dense(&space, &dense, 0.7);
        assert!(cmax(&(back.to_dense() - dense)) == 0.0);
    }

    #[test]
    fn super_ladder_commutators() {
        let psi = OpWave::random_general(0.5, 8, 1, &mut rng(2));
        for a in Mode::BOTH {
            for b in Mode::BOTH {
                let delta = if a == b { 1.0 } else { 0.0 };
                let aa = super_ladder(SuperLadder::A, a);
                let ad = super_ladder(SuperLadder::ADag, b);
                let ba = super_ladder(SuperLadder::B, a);
                let bd = super_ladder(SuperLadder::BDag, b);
                let id = SuperOp::scalar(c(delta, 0.0));
                assert!(window_abs_residual(&aa.commutator(&ad), &id, &psi) < 1e-12);
                assert!(window_abs_residual(&ba.commutator(&bd), &SuperOp::scalar(c(-delta, 0.0)), &psi) < 1e-12);
                assert!(window_abs_residual(&aa.commutator(&bd), &SuperOp::zero(), &psi) < 1e-12);
                assert!(window_abs_residual(&ad.commutator(&ba), &SuperOp::zero(), &psi) < 1e-12);
            }
        }
    }

    #[test]
    fn norm_examples() {
        let lam = 0.3;
        let vac = OpWave::unit(lam, 4, (0, 0), (0, 0));
        assert!((vac.norm_sq() - 4.0 * PI * lam.powi(3)).abs() < 1e-15);
        assert_eq!(OpWave::zero(lam, 4).norm_sq(), 0.0);
    }

    #[test]
    fn norm_matches_dense_trace() {
        let space = TruncatedFockSpace::new(5);
        let lam = 0.8;
        let psi = OpWave::random_balanced(lam, 5, &mut rng(3));
        let d = psi.to_dense();
        let n1 = space.diagonal_by_level(|n| c(n as f64 + 1.0, 0.0));
        let tr = (n1 * d.adjoint() * &d).trace();
        assert!((psi.norm_sq() - 4.0 * PI * lam.powi(3) * tr.re).abs() < 1e-10);
    }

    #[test]
    fn coordinate_examples() {
        let lam = 0.4;
        let psi = OpWave::unit(lam, 6, (3, 1), (3, 1));
        let out = coordinate_superop(2, Side::Left).apply(&psi);
        let expect = psi.scale(c(lam * 2.0, 0.0));
        assert!((&out - &expect).max_abs() < 1e-15);

        let w = OpWave::random_general(lam, 9, 2, &mut rng(4));
        let x = |i| coordinate_superop(i, Side::Left);
        let xr = |i| coordinate_superop(i, Side::Right);
        for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            let lhs = x(i).commutator(&x(j));
            assert!(window_abs_residual(&lhs, &x(k).scaled(c(0.0, 2.0 * lam)), &w) < 1e-12);
            let lhs = xr(i).commutator(&xr(j));
            assert!(window_abs_residual(&lhs, &xr(k).scaled(c(0.0, -2.0 * lam)), &w) < 1e-12);
        }
        for i in 0..3 {
            for j in 0..3 {
                assert!(window_abs_residual(&x(i).commutator(&xr(j)), &SuperOp::zero(), &w) < 1e-12);
            }
        }
    }

    #[test]
    fn radius_examples() {
        let lam = 0.25;
        let psi = OpWave::unit(lam, 6, (2, 2), (1, 3));
        let r = radius_superop(1, Side::Left).apply(&psi);
        assert!((&r - &psi.scale(c(5.0 * lam, 0.0))).max_abs() < 1e-15);
        let w = OpWave::random_general(lam, 8, 1, &mut rng(5));
        let r2 = radius_superop(2, Side::Left);
        let xx = SuperOp::sum((0..3).map(|i| coordinate_superop(i, Side::Left).compose(&coordinate_superop(i, Side::Left))));
        assert!(window_abs_residual(&(r2 - xx), &SuperOp::scalar(c(lam * lam, 0.0)), &w) < 1e-12);
        let back = radius_superop(-1, Side::Left).compose(&radius_superop(1, Side::Left));
        assert!(window_abs_residual(&back, &SuperOp::identity(), &w) < 1e-14);
        let bal = OpWave::random_balanced(lam, 8, &mut rng(6));
        assert!(window_abs_residual(&radius_superop(-3, Side::Left), &radius_superop(-3, Side::Right), &bal) < 1e-12);
    }

    #[test]
    fn angular_momentum_algebra_and_scalars() {
        let w = OpWave::random_balanced(0.6, 9, &mut rng(7));
        let l = angular_momentum_superop;
        for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            assert!(window_residual(&l(i).commutator(&l(j)), &l(k).scaled(I), &w) < 1e-12);
        }
        let radial = OpWave::from_level_fn(0.6, 9, |n| c(1.0 / (n as f64 + 2.0), 0.3));
        for i in 0..3 {
            assert!(l(i).apply(&radial).max_abs() < 1e-13);
        }
    }

    #[test]
    fn psi_jm_eigenfunctions() {
        let lam = 0.5;
        let n_max = 12;
        let l2 = angular_momentum_squared();
        let l3 = angular_momentum_superop(2);
        for j in 0..=3usize {
            let radial = RadialVector::from_fn(j, lam, 8, |n| c(1.0 / (1.0 + n as f64), 0.1 * n as f64));
            for m in -(j as i64)..=(j as i64) {
                let psi = build_psi_jm(AngularLabel::new(j, m).unwrap(), &radial, n_max).unwrap();
                assert!(psi.is_balanced());
                let jj = (j * (j + 1)) as f64;
                assert!(window_residual(&l2, &SuperOp::scalar(c(jj, 0.0)), &psi) < 1e-12, "j={j} m={m}");
                assert!(window_residual(&l3, &SuperOp::scalar(c(m as f64, 0.0)), &psi) < 1e-12, "j={j} m={m}");
                for n in 0..j {
                    assert!(psi.block(n, n).map_or(true, |b| cmax(b) == 0.0));
                }
            }
        }
        assert!(AngularLabel::new(1, 2).is_err());
    }

    #[test]
    fn psi_jm_orthogonal() {
        let lam = 0.5;
        let radial = |j| RadialVector::from_fn(j, lam, 6, |n| c(1.0 + n as f64, -0.5));
        let mut states = Vec::new();
        for j in 0..=2usize {
            for m in -(j as i64)..=(j as i64) {
                states.push(build_psi_jm(AngularLabel::new(j, m).unwrap(), &radial(j), 10).unwrap());
            }
        }
        for (a, sa) in states.iter().enumerate() {
            for (b, sb) in states.iter().enumerate() {
                if a != b {
                    assert!(sa.inner(sb).norm() < 1e-12 * sa.norm() * sb.norm());
                }
            }
        }
    }

    #[test]
    fn j0_is_purely_radial() {
        let radial = RadialVector::from_fn(0, 0.3, 5, |n| c(n as f64, 1.0));
        let psi = build_psi_jm(AngularLabel::new(0, 0).unwrap(), &radial, 6).unwrap();
        let direct = OpWave::from_level_fn(0.3, 6, |n| radial.coeffs.get(n).copied().unwrap_or(ZERO));
        assert_eq!(psi, direct);
    }

    #[test]
    fn ladder_closure_of_multiplet() {
        let lam = 0.5;
        let n_max = 11;
        let j = 2usize;
        let radial = RadialVector::from_fn(j, lam, 7, |n| c(0.5f64.powi(n as i32), 0.0));
        let lp = angular_ladder_superop(true);
        for m in -(j as i64)..(j as i64) {
            let psi = build_psi_jm(AngularLabel::new(j, m).unwrap(), &radial, n_max).unwrap();
            let up = build_psi_jm(AngularLabel::new(j, m + 1).unwrap(), &radial, n_max).unwrap();
            let raised = lp.apply(&psi).restrict(n_max - 2);
            let target = up.restrict(n_max - 2);
            let coef = target.inner(&raised) / target.norm_sq();
            assert!(coef.norm() > 1e-6);
            assert!((&raised - &target.scale(coef)).norm() < 1e-11 * raised.norm());
        }
    }

    #[test]
    fn norm_formula_examples() {
        assert_eq!(binomial_convolution(3, 1), 10.0);
        assert_eq!(binomial(5, 3), 10.0);
        for j in 0..4 {
            for n in j..20 {
                assert_eq!(binomial_convolution(n, j), binomial(n + j + 1, 2 * j + 1));
            }
        }
        assert_eq!(radial_norm_formula(&RadialVector::new(1, 0.5, vec![ZERO; 4])), 0.0);
    }

    #[test]
    fn lower_weights_carry_binomial_factor() {
        let radial = RadialVector::from_fn(2, 0.5, 9, |n| c(0.6f64.powi(n as i32), 0.1 * n as f64));
        let top = radial_norm_formula(&radial);
        for m in -2i64..=2 {
            let psi = build_psi_jm(AngularLabel::new(2, m).unwrap(), &radial, 10).unwrap();
            let ratio = psi.norm_sq() / top;
            assert!((ratio - binomial(4, (2 + m) as usize)).abs() < 1e-12, "m={m}: {ratio}");
        }
    }

    #[test]
    fn extract_radial_roundtrip() {
        let radial = RadialVector::from_fn(2, 0.5, 7, |n| c(n as f64 - 1.5, 0.25));
        let psi = build_psi_jm(AngularLabel::new(2, 2).unwrap(), &radial, 8).unwrap();
        let back = extract_radial_jj(&psi, 2);
        for n in 0..7 {
            assert!((back.coeffs[n] - radial.coeffs[n]).norm() < 1e-12);
        }
    }

    #[test]
    fn ball_volume_examples() {
        let lam = 0.7;
        assert!((ball_volume(0, lam) - 4.0 * PI * lam.powi(3)).abs() < 1e-14);
        assert!((ball_volume(2, lam) - 56.0 * PI * lam.powi(3)).abs() < 1e-12);
        let ratio = ball_volume(100, lam) / (4.0 * PI / 3.0 * (101.0 * lam).powi(3));
        assert!((ratio - 1.0).abs() < 0.015);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn superop_linearity(seed in 0u64..1000, ar in -2.0f64..2.0, ai in -2.0f64..2.0) {
            let mut g = rng(seed);
            let phi = OpWave::random_balanced(0.5, 6, &mut g);
            let psi = OpWave::random_balanced(0.5, 6, &mut g);
            let alpha = c(ar, ai);
            let op = angular_momentum_superop(0).compose(&coordinate_superop(1, Side::Symmetric));
            let lhs = op.apply(&(&phi.scale(alpha) + &psi));
            let rhs = &op.apply(&phi).scale(alpha) + &op.apply(&psi);
            prop_assert!((&lhs - &rhs).max_abs() <= 1e-12 * lhs.max_abs().max(1.0));
        }

        #[test]
        fn inner_product_hermitian(seed in 0u64..1000) {
            let mut g = rng(seed);
            let phi = OpWave::random_general(0.9, 5, 1, &mut g);
            let psi = OpWave::random_general(0.9, 5, 1, &mut g);
            let a = phi.inner(&psi);
            let b = psi.inner(&phi);
            prop_assert!((a - b.conj()).norm() <= 1e-13 * a.norm().max(1.0));
            let s = c(0.3, -1.1);
            let lin = phi.inner(&psi.scale(s));
            prop_assert!((lin - a * s).norm() <= 1e-13 * lin.norm().max(1.0));
            let anti = phi.scale(s).inner(&psi);
            prop_assert!((anti - a * s.conj()).norm() <= 1e-13 * anti.norm().max(1.0));
        }

        #[test]
        fn balanced_sector_closure(seed in 0u64..1000) {
            let psi = OpWave::random_balanced(0.5, 7, &mut rng(seed));
            let ops = [
                angular_momentum_superop(1),
                coordinate_superop(0, Side::Symmetric),
                super_ladder(SuperLadder::ADag, Mode::One).compose(&super_ladder(SuperLadder::B, Mode::Two)),
                super_ladder(SuperLadder::A, Mode::Two).compose(&super_ladder(SuperLadder::BDag, Mode::Two)),
            ];
            for op in ops {
                prop_assert!(op.apply(&psi).is_balanced());
            }
        }
    }
}
