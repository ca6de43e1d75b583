//! Generic exact 2x2 matrices and the determinant-one subgroup.

use num_bigint::BigUint;
use thiserror::Error;

use crate::scalar::Scalar;

pub mod factor;

/// A 2x2 matrix `[[a, b], [c, d]]` over an exact scalar, row-major.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Mat2<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

impl<T: Scalar> Mat2<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn identity() -> Self {
        Mat2::new(T::one(), T::zero(), T::zero(), T::one())
    }

    pub fn det(&self) -> T {
        self.a.clone() * self.d.clone() - self.b.clone() * self.c.clone()
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Mat2::new(
            self.a.clone() * rhs.a.clone() + self.b.clone() * rhs.c.clone(),
            self.a.clone() * rhs.b.clone() + self.b.clone() * rhs.d.clone(),
            self.c.clone() * rhs.a.clone() + self.d.clone() * rhs.c.clone(),
            self.c.clone() * rhs.b.clone() + self.d.clone() * rhs.d.clone(),
        )
    }

    pub fn neg(&self) -> Self {
        Mat2::new(
            -self.a.clone(),
            -self.b.clone(),
            -self.c.clone(),
            -self.d.clone(),
        )
    }

    /// The adjugate `[[d, -b], [-c, a]]`; the inverse when the determinant
    /// is one.
    pub fn adjugate(&self) -> Self {
        Mat2::new(
            self.d.clone(),
            -self.b.clone(),
            -self.c.clone(),
            self.a.clone(),
        )
    }

    /// Exact power by repeated squaring.
    pub fn pow(&self, exp: &BigUint) -> Self {
        let mut result = Mat2::identity();
        let mut base = self.clone();
        for i in 0..exp.bits() {
            if exp.bit(i) {
                result = result.mul(&base);
            }
            if i + 1 < exp.bits() {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn is_identity(&self) -> bool {
        *self == Mat2::identity()
    }
}

#[derive(Error, Clone, PartialEq, Eq, Debug)]
pub enum Sl2Error {
    /// Determinant -1 is rejected separately: such matrices reverse the
    /// symplectic form and are never the invariant of a transform.
    #[error("matrix has determinant -1, not 1")]
    DeterminantMinusOne,
    #[error("matrix has determinant {0}, not 1")]
    DeterminantNotOne(String),
}

/// A 2x2 integer matrix of determinant one, checked at construction.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Sl2<T>(Mat2<T>);

impl<T: Scalar> Sl2<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Result<Self, Sl2Error> {
        Sl2::from_mat(Mat2::new(a, b, c, d))
    }

    pub fn from_mat(m: Mat2<T>) -> Result<Self, Sl2Error> {
        let det = m.det();
        if det.is_one() {
            Ok(Sl2(m))
        } else if (-det.clone()).is_one() {
            Err(Sl2Error::DeterminantMinusOne)
        } else {
            Err(Sl2Error::DeterminantNotOne(det.to_string()))
        }
    }

    pub fn identity() -> Self {
        Sl2(Mat2::identity())
    }

    /// `-I`; central of determinant one.
    pub fn minus_identity() -> Self {
        Sl2(Mat2::identity().neg())
    }

    pub fn mat(&self) -> &Mat2<T> {
        &self.0
    }

    pub fn a(&self) -> &T {
        &self.0.a
    }
    pub fn b(&self) -> &T {
        &self.0.b
    }
    pub fn c(&self) -> &T {
        &self.0.c
    }
    pub fn d(&self) -> &T {
        &self.0.d
    }

    /// Exact product; determinant one is preserved.
    pub fn mul(&self, rhs: &Self) -> Self {
        Sl2(self.0.mul(&rhs.0))
    }

    /// The inverse, i.e. the adjugate `[[d, -b], [-c, a]]`.
    pub fn invert(&self) -> Self {
        Sl2(self.0.adjugate())
    }

    pub fn pow(&self, exp: &BigUint) -> Self {
        Sl2(self.0.pow(exp))
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_identity()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Int;

    fn sl2(a: i64, b: i64, c: i64, d: i64) -> Sl2<Int> {
        Sl2::new(Int::from(a), Int::from(b), Int::from(c), Int::from(d)).unwrap()
    }

    #[test]
    fn det_minus_one_rejected_distinctly() {
        // the generator matrix misprint has determinant -1
        let err = Sl2::new(Int::from(-1), Int::from(1), Int::from(0), Int::from(1)).unwrap_err();
        assert_eq!(err, Sl2Error::DeterminantMinusOne);
        let err = Sl2::new(Int::from(2), Int::from(0), Int::from(0), Int::from(1)).unwrap_err();
        assert_eq!(err, Sl2Error::DeterminantNotOne("2".into()));
    }

    #[test]
    fn invert_is_adjugate() {
        assert_eq!(sl2(1, 0, 1, 1).invert(), sl2(1, 0, -1, 1));
        assert_eq!(sl2(2, 1, 1, 1).invert(), sl2(1, -1, -1, 2));
        let m = sl2(17, 12, 7, 5);
        assert!(m.mul(&m.invert()).is_identity());
    }

    #[test]
    fn pow_matches_repeated_mul() {
        let b = sl2(1, 0, 1, 1);
        let mut acc = Sl2::identity();
        for k in 0u32..20 {
            assert_eq!(b.pow(&BigUint::from(k)), acc);
            acc = acc.mul(&b);
        }
    }
}
