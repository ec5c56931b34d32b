//! Closed bounded intervals with Moore arithmetic, the gH-difference,
//! dominance, and norms.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::IntervalError;

/// A closed interval `[lo, hi]` with finite endpoints and `lo <= hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    /// The zero interval `[0, 0]`.
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };

    /// Builds `[lo, hi]`, rejecting reversed or non-finite endpoints.
    pub fn new(lo: f64, hi: f64) -> Result<Self, IntervalError> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(IntervalError::NonFinite { lo, hi });
        }
        if lo > hi {
            return Err(IntervalError::Reversed { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    /// Builds `[min(a, b), max(a, b)]`.
    pub fn from_unordered(a: f64, b: f64) -> Result<Self, IntervalError> {
        Interval::new(a.min(b), a.max(b))
    }

    /// The degenerate interval `[c, c]`.
    pub fn degenerate(c: f64) -> Result<Self, IntervalError> {
        Interval::new(c, c)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    /// Result of a Moore operation, checked for overflow to infinity.
    fn checked(lo: f64, hi: f64) -> Result<Self, IntervalError> {
        Interval::new(lo, hi)
    }

    pub fn try_add(self, rhs: Interval) -> Result<Self, IntervalError> {
        Interval::checked(self.lo + rhs.lo, self.hi + rhs.hi)
    }

    pub fn try_sub(self, rhs: Interval) -> Result<Self, IntervalError> {
        Interval::checked(self.lo - rhs.hi, self.hi - rhs.lo)
    }

    pub fn try_mul(self, rhs: Interval) -> Result<Self, IntervalError> {
        let p = [
            self.lo * rhs.lo,
            self.lo * rhs.hi,
            self.hi * rhs.lo,
            self.hi * rhs.hi,
        ];
        let lo = p.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval::checked(lo, hi)
    }

    pub fn try_scale(self, lambda: f64) -> Result<Self, IntervalError> {
        if !lambda.is_finite() {
            return Err(IntervalError::NonFinite {
                lo: lambda,
                hi: lambda,
            });
        }
        if lambda >= 0.0 {
            Interval::checked(lambda * self.lo, lambda * self.hi)
        } else {
            Interval::checked(lambda * self.hi, lambda * self.lo)
        }
    }

    /// The generalized Hukuhara difference `self ⊖gH rhs`.
    pub fn gh_difference(self, rhs: Interval) -> Result<Self, IntervalError> {
        Interval::from_unordered(self.lo - rhs.lo, self.hi - rhs.hi)
    }

    /// How `self` relates to `other` under the endpoint order.
    pub fn compare(&self, other: &Interval) -> DominanceRelation {
        if self.lo == other.lo && self.hi == other.hi {
            DominanceRelation::Equal
        } else if self.lo <= other.lo && self.hi <= other.hi {
            DominanceRelation::StrictlyDominates
        } else if self.lo >= other.lo && self.hi >= other.hi {
            DominanceRelation::StrictlyDominatedBy
        } else {
            DominanceRelation::Incomparable
        }
    }

    /// `self ⪯ other`: both endpoints are no larger.
    pub fn weakly_dominates(&self, other: &Interval) -> bool {
        self.lo <= other.lo && self.hi <= other.hi
    }

    /// `max(|lo|, |hi|)`.
    pub fn norm(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => write!(f, "[{:.*}, {:.*}]", p, self.lo, p, self.hi),
            None => write!(f, "[{}, {}]", self.lo, self.hi),
        }
    }
}

// The operator impls panic only when a finite result overflows to infinity.
impl Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        self.try_add(rhs).expect("interval addition overflowed")
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, rhs: Interval) -> Interval {
        self.try_sub(rhs).expect("interval subtraction overflowed")
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        self.try_mul(rhs)
            .expect("interval multiplication overflowed")
    }
}

impl Mul<Interval> for f64 {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        rhs.try_scale(self).expect("interval scaling overflowed")
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.lo, self.hi].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [lo, hi] = <[f64; 2]>::deserialize(d)?;
        Interval::new(lo, hi).map_err(serde::de::Error::custom)
    }
}

/// Outcome of comparing two intervals (or two interval vectors).
///
/// For a single pair of intervals, weak dominance without equality is always
/// strict, so `Dominates` and `DominatedBy` only arise for vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DominanceRelation {
    StrictlyDominates,
    Dominates,
    DominatedBy,
    StrictlyDominatedBy,
    Equal,
    Incomparable,
}

impl DominanceRelation {
    /// The relation seen from the other side.
    pub fn flip(self) -> Self {
        use DominanceRelation::*;
        match self {
            StrictlyDominates => StrictlyDominatedBy,
            Dominates => DominatedBy,
            DominatedBy => Dominates,
            StrictlyDominatedBy => StrictlyDominates,
            Equal => Equal,
            Incomparable => Incomparable,
        }
    }

    pub fn is_nondominated(self) -> bool {
        matches!(
            self,
            DominanceRelation::Incomparable | DominanceRelation::Equal
        )
    }
}

/// Compares two objective vectors `a` and `b`.
///
/// `a` strictly dominates when every component strictly dominates, dominates
/// when every component weakly dominates and at least one is not equal.
pub fn compare_vectors(a: &[Interval], b: &[Interval]) -> DominanceRelation {
    assert_eq!(a.len(), b.len(), "objective vectors differ in length");
    let rel: Vec<DominanceRelation> = a.iter().zip(b).map(|(s, t)| s.compare(t)).collect();
    use DominanceRelation::*;
    if rel.iter().all(|r| *r == Equal) {
        return Equal;
    }
    if rel.iter().all(|r| *r == StrictlyDominates) {
        return StrictlyDominates;
    }
    if rel.iter().all(|r| *r == StrictlyDominatedBy) {
        return StrictlyDominatedBy;
    }
    if rel.iter().all(|r| matches!(r, Equal | StrictlyDominates)) {
        return Dominates;
    }
    if rel.iter().all(|r| matches!(r, Equal | StrictlyDominatedBy)) {
        return DominatedBy;
    }
    Incomparable
}

/// A vector of intervals, e.g. a gH-gradient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntervalVector(pub Vec<Interval>);

impl IntervalVector {
    pub fn zeros(n: usize) -> Self {
        IntervalVector(vec![Interval::ZERO; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Interval> {
        self.0.iter()
    }

    /// Sum of the component norms.
    pub fn norm(&self) -> f64 {
        self.0.iter().map(Interval::norm).sum()
    }

    pub fn lower(&self) -> Vec<f64> {
        self.0.iter().map(Interval::lo).collect()
    }

    pub fn upper(&self) -> Vec<f64> {
        self.0.iter().map(Interval::hi).collect()
    }

    pub fn try_add(&self, other: &IntervalVector) -> Result<IntervalVector, IntervalError> {
        assert_eq!(self.len(), other.len(), "interval vectors differ in length");
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.try_add(*b))
            .collect::<Result<Vec<_>, _>>()
            .map(IntervalVector)
    }
}

impl std::ops::Index<usize> for IntervalVector {
    type Output = Interval;
    fn index(&self, i: usize) -> &Interval {
        &self.0[i]
    }
}

/// A square matrix of intervals stored row-major, e.g. a gH-Hessian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalMatrix {
    n: usize,
    entries: Vec<Interval>,
}

impl IntervalMatrix {
    pub fn zeros(n: usize) -> Self {
        IntervalMatrix {
            n,
            entries: vec![Interval::ZERO; n * n],
        }
    }

    /// Builds from a row-major list of `n * n` entries.
    pub fn from_row_major(n: usize, entries: Vec<Interval>) -> Self {
        assert_eq!(entries.len(), n * n, "expected {} entries", n * n);
        IntervalMatrix { n, entries }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, s: usize) -> Interval {
        self.entries[r * self.n + s]
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|r| (0..r).all(|s| self.get(r, s) == self.get(s, r)))
    }

    pub fn lower(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.n, self.n, |r, s| self.get(r, s).lo())
    }

    pub fn upper(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.n, self.n, |r, s| self.get(r, s).hi())
    }
}
