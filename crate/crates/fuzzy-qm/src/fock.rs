//! Truncated two-mode bosonic Fock space.
//!
//! States `|n1, n2>` with `n1 + n2 <= n_max` are enumerated by ascending total
//! quanta `n` and then ascending `n1`. Raising operators that would leave the
//! truncation are zeroed, so identities are only exact inside
//! [`TruncatedFockSpace::valid_window`].

use nalgebra::DMatrix;
use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{One, Zero};
use std::collections::HashMap;

/// Occupation numbers of the two modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FockIndex {
    pub n1: usize,
    pub n2: usize,
}

impl FockIndex {
    pub fn new(n1: usize, n2: usize) -> Self {
        Self { n1, n2 }
    }

    /// Eigenvalue of the number operator `N`.
    pub fn total(&self) -> usize {
        self.n1 + self.n2
    }

    pub fn occupation(&self, mode: Mode) -> usize {
        match mode {
            Mode::One => self.n1,
            Mode::Two => self.n2,
        }
    }
}

/// One of the two bosonic modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    One,
    Two,
}

impl Mode {
    pub const BOTH: [Mode; 2] = [Mode::One, Mode::Two];

    /// Zero-based position, used to index Pauli matrices.
    pub fn index(self) -> usize {
        match self {
            Mode::One => 0,
            Mode::Two => 1,
        }
    }

    pub fn from_index(i: usize) -> Self {
        match i {
            0 => Mode::One,
            1 => Mode::Two,
            _ => panic!("mode index {i} out of range"),
        }
    }
}

/// Which ladder matrix to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LadderKind {
    A1,
    A2,
    A1Dag,
    A2Dag,
    Number,
}

impl LadderKind {
    pub fn lower(mode: Mode) -> Self {
        match mode {
            Mode::One => LadderKind::A1,
            Mode::Two => LadderKind::A2,
        }
    }

    pub fn raise(mode: Mode) -> Self {
        match mode {
            Mode::One => LadderKind::A1Dag,
            Mode::Two => LadderKind::A2Dag,
        }
    }
}

/// Dense matrix of a ladder operator on a truncated space.
#[derive(Clone, Debug)]
pub struct LadderMatrix {
    pub kind: LadderKind,
    pub entries: DMatrix<Complex64>,
}

/// Basis of `|n1, n2>` with `n1 + n2 <= n_max`.
#[derive(Clone, Debug)]
pub struct TruncatedFockSpace {
    n_max: usize,
    basis: Vec<FockIndex>,
    index_of: HashMap<FockIndex, usize>,
}

/// Position of the first state with total quanta `level`.
pub fn level_offset(level: usize) -> usize {
    level * (level + 1) / 2
}

impl TruncatedFockSpace {
    pub fn new(n_max: usize) -> Self {
        let mut basis = Vec::with_capacity(level_offset(n_max + 1));
        for n in 0..=n_max {
            for n1 in 0..=n {
                basis.push(FockIndex::new(n1, n - n1));
            }
        }
        let index_of = basis.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        Self {
            n_max,
            basis,
            index_of,
        }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[FockIndex] {
        &self.basis
    }

    pub fn index_of(&self, state: FockIndex) -> Option<usize> {
        self.index_of.get(&state).copied()
    }

    pub fn state(&self, idx: usize) -> FockIndex {
        self.basis[idx]
    }

    /// States with `n <= n_max - degree`; empty when the degree exceeds `n_max`.
    pub fn valid_window(&self, degree: usize) -> Vec<FockIndex> {
        match self.window_level(degree) {
            Some(top) => self.basis[..level_offset(top + 1)].to_vec(),
            None => Vec::new(),
        }
    }

    /// Highest total quanta inside the window, if any.
    pub fn window_level(&self, degree: usize) -> Option<usize> {
        self.n_max.checked_sub(degree)
    }

    pub fn in_window(&self, state: FockIndex, degree: usize) -> bool {
        self.window_level(degree)
            .is_some_and(|top| state.total() <= top)
    }

    pub fn ladder(&self, kind: LadderKind) -> LadderMatrix {
        let d = self.dim();
        let mut m = DMatrix::<Complex64>::zeros(d, d);
        for (col, s) in self.basis.iter().enumerate() {
            let target = match kind {
                LadderKind::Number => Some((*s, s.total() as f64)),
                LadderKind::A1 => (s.n1 > 0).then(|| (FockIndex::new(s.n1 - 1, s.n2), s.n1 as f64)),
                LadderKind::A2 => (s.n2 > 0).then(|| (FockIndex::new(s.n1, s.n2 - 1), s.n2 as f64)),
                LadderKind::A1Dag => Some((FockIndex::new(s.n1 + 1, s.n2), (s.n1 + 1) as f64)),
                LadderKind::A2Dag => Some((FockIndex::new(s.n1, s.n2 + 1), (s.n2 + 1) as f64)),
            };
            if let Some((t, w)) = target {
                if let Some(row) = self.index_of(t) {
                    let v = if kind == LadderKind::Number { w } else { w.sqrt() };
                    m[(row, col)] = Complex64::new(v, 0.0);
                }
            }
        }
        LadderMatrix { kind, entries: m }
    }

    /// Diagonal matrix with `f(n)` on the block of total quanta `n`.
    pub fn diagonal_by_level(&self, f: impl Fn(usize) -> Complex64) -> DMatrix<Complex64> {
        let d = self.dim();
        let mut m = DMatrix::<Complex64>::zeros(d, d);
        for (i, s) in self.basis.iter().enumerate() {
            m[(i, i)] = f(s.total());
        }
        m
    }

    /// Largest entrywise modulus of `m` restricted to window rows and columns.
    pub fn window_max_abs(&self, m: &DMatrix<Complex64>, degree: usize) -> f64 {
        let Some(top) = self.window_level(degree) else {
            return 0.0;
        };
        let k = level_offset(top + 1);
        let mut worst = 0.0f64;
        for c in 0..k {
            for r in 0..k {
                worst = worst.max(m[(r, c)].norm());
            }
        }
        worst
    }
}

/// A single ladder step applied by [`ExactKet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    Lower(Mode),
    Raise(Mode),
}

/// A basis ket times an amplitude whose square is tracked as an exact integer.
///
/// Ladder amplitudes are square roots of integers, so products of them are
/// represented through their squares without any rounding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactKet {
    pub state: FockIndex,
    pub amplitude_sq: BigUint,
}

impl ExactKet {
    pub fn basis(state: FockIndex) -> Self {
        Self {
            state,
            amplitude_sq: BigUint::one(),
        }
    }

    /// Apply a word of ladder steps, rightmost first as in operator notation.
    pub fn apply(mut self, word: &[Step]) -> Self {
        for step in word.iter().rev() {
            if self.amplitude_sq.is_zero() {
                break;
            }
            let (n1, n2) = (self.state.n1, self.state.n2);
            let (factor, next) = match *step {
                Step::Lower(Mode::One) => (n1, FockIndex::new(n1.saturating_sub(1), n2)),
                Step::Lower(Mode::Two) => (n2, FockIndex::new(n1, n2.saturating_sub(1))),
                Step::Raise(Mode::One) => (n1 + 1, FockIndex::new(n1 + 1, n2)),
                Step::Raise(Mode::Two) => (n2 + 1, FockIndex::new(n1, n2 + 1)),
            };
            self.amplitude_sq *= BigUint::from(factor);
            self.state = next;
        }
        self
    }

    /// The amplitude itself when it is an integer (always the case for a
    /// word that returns to the starting ket).
    pub fn integer_amplitude(&self) -> Option<BigUint> {
        let root = self.amplitude_sq.sqrt();
        (&root * &root == self.amplitude_sq).then_some(root)
    }
}

/// `<n1,n2| :N^k: |n1,n2>` evaluated by applying the ladder words of
/// `sum_{k1+k2=k} C(k,k1) (a1^dag)^k1 (a2^dag)^k2 a1^k1 a2^k2` one step at a time.
pub fn normal_number_power_exact(k: usize, state: FockIndex) -> BigUint {
    let mut total = BigUint::zero();
    let mut binom = BigUint::one();
    for k1 in 0..=k {
        if k1 > 0 {
            binom = binom * BigUint::from(k - k1 + 1) / BigUint::from(k1);
        }
        let k2 = k - k1;
        let mut word = Vec::with_capacity(2 * k);
        word.extend(std::iter::repeat(Step::Raise(Mode::One)).take(k1));
        word.extend(std::iter::repeat(Step::Raise(Mode::Two)).take(k2));
        word.extend(std::iter::repeat(Step::Lower(Mode::One)).take(k1));
        word.extend(std::iter::repeat(Step::Lower(Mode::Two)).take(k2));
        let ket = ExactKet::basis(state).apply(&word);
        if ket.amplitude_sq.is_zero() {
            continue;
        }
        debug_assert_eq!(ket.state, state);
        let amp = ket
            .integer_amplitude()
            .expect("diagonal ladder word has an integer amplitude");
        total += &binom * amp;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn comm(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        a * b - b * a
    }

    #[test]
    fn dimensions() {
        assert_eq!(TruncatedFockSpace::new(0).dim(), 1);
        assert_eq!(TruncatedFockSpace::new(0).basis(), &[FockIndex::new(0, 0)]);
        assert_eq!(TruncatedFockSpace::new(2).dim(), 6);
        let s = TruncatedFockSpace::new(20);
        let mut count = 0;
        for n1 in 0..=20 {
            for n2 in 0..=20 {
                if n1 + n2 <= 20 {
                    count += 1;
                }
            }
        }
        assert_eq!(s.dim(), count);
        assert_eq!(s.dim(), 231);
    }

    #[test]
    fn ordering_is_by_level_then_n1() {
        let s = TruncatedFockSpace::new(3);
        let order: Vec<_> = s.basis().iter().map(|f| (f.n1, f.n2)).collect();
        assert_eq!(
            order,
            vec![(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0), (0, 3), (1, 2), (2, 1), (3, 0)]
        );
        for (i, f) in s.basis().iter().enumerate() {
            assert_eq!(s.index_of(*f), Some(i));
        }
    }

    #[test]
    fn ladder_examples() {
        let s = TruncatedFockSpace::new(8);
        let a1d = s.ladder(LadderKind::A1Dag).entries;
        let vac = s.index_of(FockIndex::new(0, 0)).unwrap();
        let one = s.index_of(FockIndex::new(1, 0)).unwrap();
        assert_eq!(a1d[(one, vac)], Complex64::new(1.0, 0.0));

        let a1 = s.ladder(LadderKind::A1).entries;
        let from = s.index_of(FockIndex::new(2, 1)).unwrap();
        let to = s.index_of(FockIndex::new(1, 1)).unwrap();
        assert!((a1[(to, from)].re - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(a1.column(from).iter().filter(|z| z.norm() > 0.0).count(), 1);

        let n = s.ladder(LadderKind::Number).entries;
        let i = s.index_of(FockIndex::new(3, 4)).unwrap();
        assert_eq!(n[(i, i)].re, 7.0);
    }

    #[test]
    fn window_examples() {
        assert!(TruncatedFockSpace::new(10)
            .valid_window(2)
            .iter()
            .all(|f| f.total() <= 8));
        assert_eq!(TruncatedFockSpace::new(10).valid_window(2).len(), 45);
        assert_eq!(TruncatedFockSpace::new(5).valid_window(0).len(), 21);
        assert!(TruncatedFockSpace::new(3).valid_window(4).is_empty());
    }

    #[test]
    fn canonical_commutators_on_window() {
        let s = TruncatedFockSpace::new(9);
        let id = DMatrix::<Complex64>::identity(s.dim(), s.dim());
        for alpha in Mode::BOTH {
            for beta in Mode::BOTH {
                let a = s.ladder(LadderKind::lower(alpha)).entries;
                let b = s.ladder(LadderKind::lower(beta)).entries;
                let bd = s.ladder(LadderKind::raise(beta)).entries;
                let ad = s.ladder(LadderKind::raise(alpha)).entries;
                let expect = if alpha == beta { id.clone() } else { id.clone() * Complex64::new(0.0, 0.0) };
                assert!(s.window_max_abs(&(comm(&a, &bd) - expect), 1) <= 1e-12);
                assert!(s.window_max_abs(&comm(&a, &b), 1) <= 1e-12);
                assert!(s.window_max_abs(&comm(&ad, &bd), 1) <= 1e-12);
            }
        }
    }

    #[test]
    fn adjoint_and_number() {
        let s = TruncatedFockSpace::new(7);
        for mode in Mode::BOTH {
            let a = s.ladder(LadderKind::lower(mode)).entries;
            let ad = s.ladder(LadderKind::raise(mode)).entries;
            assert_eq!(a.adjoint(), ad);
        }
        let a1 = s.ladder(LadderKind::A1).entries;
        let a2 = s.ladder(LadderKind::A2).entries;
        let built = a1.adjoint() * &a1 + a2.adjoint() * &a2;
        let n = s.ladder(LadderKind::Number).entries;
        assert!(s.window_max_abs(&(built - n), 1) <= 1e-12);
    }

    #[test]
    fn exact_ket_words() {
        let k = ExactKet::basis(FockIndex::new(2, 1)).apply(&[Step::Lower(Mode::One)]);
        assert_eq!(k.state, FockIndex::new(1, 1));
        assert_eq!(k.amplitude_sq, BigUint::from(2u32));
        let vac = ExactKet::basis(FockIndex::new(0, 0)).apply(&[Step::Lower(Mode::Two)]);
        assert!(vac.amplitude_sq.is_zero());
    }

    #[test]
    fn normal_number_power_small() {
        assert_eq!(normal_number_power_exact(2, FockIndex::new(2, 1)), BigUint::from(6u32));
        assert_eq!(normal_number_power_exact(4, FockIndex::new(1, 1)), BigUint::zero());
        assert_eq!(normal_number_power_exact(0, FockIndex::new(3, 3)), BigUint::one());
    }
}
