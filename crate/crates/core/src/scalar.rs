//! Scalar trait for the 2x2 matrix core.

use std::fmt::{Debug, Display};

use num_traits::Signed;

/// An exact, totally ordered ring scalar.
///
/// Implemented by `BigInt` and `Ratio<BigInt>` (the instantiations used by
/// the library proper) and by `i64` (used only by the bounded brute-force
/// oracle).
pub trait Scalar: Clone + Eq + Signed + Display + Debug {}

impl<T: Clone + Eq + Signed + Display + Debug> Scalar for T {}
