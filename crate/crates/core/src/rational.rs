//! Exact non-negative rationals that serialise as `"num/den"`.

use std::fmt;

use num_rational::Ratio;
use serde::{Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(Ratio<u64>);

impl Rational {
    /// Reduced `num / den`. Panics if `den == 0`.
    pub fn new(num: u64, den: u64) -> Self {
        Rational(Ratio::new(num, den))
    }

    pub fn integer(value: u64) -> Self {
        Rational(Ratio::from_integer(value))
    }

    pub fn numer(&self) -> u64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> u64 {
        *self.0.denom()
    }

    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
