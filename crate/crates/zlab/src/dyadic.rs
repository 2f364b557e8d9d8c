//! Exact powers of two.
//!
//! Scales of translates and collapse deadlines are products of values
//! `1/2^r` with integer `r >= 1`.  Multiplying them only ever adds
//! exponents, so we store the exponent and convert to `f64` at the last
//! moment.  This keeps deep products exact where floating point would
//! underflow or round.

use serde::{Deserialize, Serialize};
use std::fmt;

/// The exact value `2^(-exponent)` for a nonnegative integer exponent.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct DyadicScale {
    exponent: u64,
}

/// Exponents past this produce `f64` zero; comparisons fall back to
/// exponent arithmetic before any conversion.
const F64_FLOOR_EXP: u64 = 1074;

impl DyadicScale {
    /// The value 1 = 2^0.
    pub const ONE: DyadicScale = DyadicScale { exponent: 0 };

    pub fn from_exponent(exponent: u64) -> Self {
        DyadicScale { exponent }
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    /// Exact product: exponents add.
    #[must_use]
    pub fn times(&self, other: DyadicScale) -> DyadicScale {
        DyadicScale {
            exponent: self.exponent.saturating_add(other.exponent),
        }
    }

    /// Exact for exponents up to 1074 (subnormal range); 0.0 beyond.
    pub fn to_f64(&self) -> f64 {
        if self.exponent > F64_FLOOR_EXP {
            0.0
        } else {
            (-(self.exponent as f64)).exp2()
        }
    }

    /// `2^(-e) >= x`, exact even where `to_f64` would underflow.
    pub fn ge_f64(&self, x: f64) -> bool {
        if x <= 0.0 {
            return true;
        }
        if self.exponent <= F64_FLOOR_EXP {
            return self.to_f64() >= x;
        }
        false
    }

    /// `2^(-e) <= x`.
    pub fn le_f64(&self, x: f64) -> bool {
        if x <= 0.0 {
            return false;
        }
        if self.exponent <= F64_FLOOR_EXP {
            return self.to_f64() <= x;
        }
        true
    }

    /// Larger value first: 2^(-a) >= 2^(-b) iff a <= b.
    pub fn value_cmp(&self, other: &DyadicScale) -> std::cmp::Ordering {
        other.exponent.cmp(&self.exponent)
    }
}

impl fmt::Display for DyadicScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "2^-{}", self.exponent)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products_add_exponents() {
        let a = DyadicScale::from_exponent(3);
        let b = DyadicScale::from_exponent(7);
        assert_eq!(a.times(b).exponent(), 10);
        assert_eq!(DyadicScale::ONE.times(a), a);
    }

    #[test]
    fn f64_conversion_is_exact_in_range() {
        assert_eq!(DyadicScale::from_exponent(6).to_f64(), 1.0 / 64.0);
        assert_eq!(DyadicScale::ONE.to_f64(), 1.0);
        assert_eq!(DyadicScale::from_exponent(2000).to_f64(), 0.0);
    }

    #[test]
    fn comparisons_survive_underflow() {
        let tiny = DyadicScale::from_exponent(5000);
        assert!(tiny.le_f64(1e-300));
        assert!(!tiny.ge_f64(1e-300));
        assert!(DyadicScale::from_exponent(2).ge_f64(0.25));
        assert!(DyadicScale::from_exponent(2).le_f64(0.25));
    }
}
