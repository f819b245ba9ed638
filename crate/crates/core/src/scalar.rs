//! Number types the corpus statistics can be computed in.
//!
//! Every statistic is a ratio of two counts, so any field that can represent
//! `num / den` works: `f64` and `f32` for reporting, [`Rational64`] when a
//! result has to be compared exactly.

use std::fmt::{Debug, Display};

use num_rational::Rational64;
use num_traits::{Num, ToPrimitive};

pub trait Scalar: Num + Copy + PartialOrd + Debug + Display + Send + Sync + 'static {
    /// `num / den`; `den` is never zero when called from this crate.
    fn from_ratio(num: u64, den: u64) -> Self;

    fn to_f64(self) -> f64;

    /// `100 * part / whole`.
    fn percent(part: u64, whole: u64) -> Self {
        Self::from_ratio(100 * part, whole)
    }
}

impl Scalar for f64 {
    fn from_ratio(num: u64, den: u64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(self) -> f64 {
        self
    }
}

impl Scalar for f32 {
    fn from_ratio(num: u64, den: u64) -> Self {
        (num as f64 / den as f64) as f32
    }

    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Scalar for Rational64 {
    fn from_ratio(num: u64, den: u64) -> Self {
        let num = i64::try_from(num).expect("count fits in i64");
        let den = i64::try_from(den).expect("count fits in i64");
        Rational64::new(num, den)
    }

    fn to_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}
