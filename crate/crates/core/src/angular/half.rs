//! Exact half-integer quantum numbers.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

/// A value in ½ℤ, stored as twice its value so that spins and projections
/// never pass through floating point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HalfInteger(i32);

impl HalfInteger {
    pub const ZERO: HalfInteger = HalfInteger(0);
    pub const HALF: HalfInteger = HalfInteger(1);
    pub const ONE: HalfInteger = HalfInteger(2);

    #[inline]
    pub const fn from_twice(twice: i32) -> Self {
        HalfInteger(twice)
    }

    #[inline]
    pub const fn from_int(value: i32) -> Self {
        HalfInteger(2 * value)
    }

    /// Returns `None` unless `2 * value` is an integer.
    pub fn from_f64(value: f64) -> Option<Self> {
        let twice = 2.0 * value;
        if twice.is_finite() && twice.fract() == 0.0 && twice.abs() < i32::MAX as f64 {
            Some(HalfInteger(twice as i32))
        } else {
            None
        }
    }

    #[inline]
    pub const fn twice(self) -> i32 {
        self.0
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.0 as f64 * 0.5
    }

    #[inline]
    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    #[inline]
    pub const fn abs(self) -> Self {
        HalfInteger(self.0.abs())
    }

    /// Dimension 2S+1 of the spin-S multiplet.
    #[inline]
    pub fn multiplicity(self) -> usize {
        debug_assert!(self.0 >= 0);
        (self.0 + 1) as usize
    }

    /// Projections m = S, S−1, …, −S (descending, the basis order of every
    /// sector matrix in this crate).
    pub fn projections(self) -> impl DoubleEndedIterator<Item = HalfInteger> + ExactSizeIterator {
        let s = self.0;
        (0..(s + 1).max(0)).map(move |i| HalfInteger(s - 2 * i))
    }

    /// Row index of projection `m` in the descending basis of spin `self`.
    #[inline]
    pub fn index_of(self, m: HalfInteger) -> Option<usize> {
        let diff = self.0 - m.0;
        if m.0.abs() <= self.0 && diff % 2 == 0 {
            Some((diff / 2) as usize)
        } else {
            None
        }
    }

    /// Projection at row `index` of the descending basis.
    #[inline]
    pub fn projection_at(self, index: usize) -> HalfInteger {
        HalfInteger(self.0 - 2 * index as i32)
    }

    /// `(-1)^self` for integer values.
    #[inline]
    pub fn phase(self) -> f64 {
        debug_assert!(self.is_integer());
        if (self.0 / 2) % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// The integer value, if any.
    #[inline]
    pub fn as_int(self) -> Option<i32> {
        self.is_integer().then_some(self.0 / 2)
    }
}

impl Add for HalfInteger {
    type Output = HalfInteger;
    #[inline]
    fn add(self, rhs: HalfInteger) -> HalfInteger {
        HalfInteger(self.0 + rhs.0)
    }
}

impl Sub for HalfInteger {
    type Output = HalfInteger;
    #[inline]
    fn sub(self, rhs: HalfInteger) -> HalfInteger {
        HalfInteger(self.0 - rhs.0)
    }
}

impl Neg for HalfInteger {
    type Output = HalfInteger;
    #[inline]
    fn neg(self) -> HalfInteger {
        HalfInteger(-self.0)
    }
}

impl From<i32> for HalfInteger {
    fn from(value: i32) -> Self {
        HalfInteger::from_int(value)
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projections_descend() {
        let s = HalfInteger::from_twice(3);
        let ms: Vec<i32> = s.projections().map(|m| m.twice()).collect();
        assert_eq!(ms, vec![3, 1, -1, -3]);
        for (i, m) in s.projections().enumerate() {
            assert_eq!(s.index_of(m), Some(i));
            assert_eq!(s.projection_at(i), m);
        }
        assert_eq!(s.index_of(HalfInteger::ONE), None);
        assert_eq!(HalfInteger::ZERO.projections().count(), 1);
    }

    #[test]
    fn parsing_and_display() {
        assert_eq!(HalfInteger::from_f64(1.5), Some(HalfInteger::from_twice(3)));
        assert_eq!(HalfInteger::from_f64(0.25), None);
        assert_eq!(HalfInteger::from_twice(3).to_string(), "3/2");
        assert_eq!(HalfInteger::from_int(-2).to_string(), "-2");
        assert_eq!(HalfInteger::from_int(3).phase(), -1.0);
        assert_eq!(HalfInteger::from_int(-2).phase(), 1.0);
    }
}
