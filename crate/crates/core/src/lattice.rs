//! The reduced Grothendieck lattice of a genus-one fibre.
//!
//! The lattice is `Z ⊕ Z` via `(rank, degree)`, carrying the symplectic
//! Euler form and the column action of determinant-one matrices. The closed
//! formula for the form is `e((r1,d1),(r2,d2)) = r1*d2 - r2*d1`; it is
//! validated against the independent Riemann-Roch oracle in
//! [`crate::oracle`].

use crate::mat2::Sl2;
use crate::scalar::Scalar;

/// A formal K-theory class `(rank, degree)`. Both components may be negative
/// and are unbounded.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct KClass<T> {
    pub rank: T,
    pub degree: T,
}

impl<T: Scalar> KClass<T> {
    pub fn new(rank: T, degree: T) -> Self {
        KClass { rank, degree }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        KClass::new(
            self.rank.clone() + rhs.rank.clone(),
            self.degree.clone() + rhs.degree.clone(),
        )
    }

    pub fn neg(&self) -> Self {
        KClass::new(-self.rank.clone(), -self.degree.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.rank.is_zero() && self.degree.is_zero()
    }
}

/// The symplectic Euler form `x.rank * y.degree - y.rank * x.degree`.
pub fn euler_form<T: Scalar>(x: &KClass<T>, y: &KClass<T>) -> T {
    x.rank.clone() * y.degree.clone() - y.rank.clone() * x.degree.clone()
}

/// Column action of a determinant-one matrix on `(rank, degree)`.
pub fn apply<T: Scalar>(m: &Sl2<T>, v: &KClass<T>) -> KClass<T> {
    KClass::new(
        m.a().clone() * v.rank.clone() + m.b().clone() * v.degree.clone(),
        m.c().clone() * v.rank.clone() + m.d().clone() * v.degree.clone(),
    )
}

/// Exact matrix product. Alias for [`Sl2::mul`], kept for symmetry with the
/// other lattice operations.
pub fn multiply<T: Scalar>(m1: &Sl2<T>, m2: &Sl2<T>) -> Sl2<T> {
    m1.mul(m2)
}

/// The inverse (adjugate) of a determinant-one matrix.
pub fn invert<T: Scalar>(m: &Sl2<T>) -> Sl2<T> {
    m.invert()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Int, KClass as K, SL2Matrix};
    use proptest::prelude::*;

    fn k(r: i64, d: i64) -> K {
        KClass::new(Int::from(r), Int::from(d))
    }

    fn sl2(a: i64, b: i64, c: i64, d: i64) -> SL2Matrix {
        Sl2::new(Int::from(a), Int::from(b), Int::from(c), Int::from(d)).unwrap()
    }

    #[test]
    fn euler_form_examples() {
        // e([O_C], [O_x]) = chi(O_C, O_x) = 1
        assert_eq!(euler_form(&k(1, 0), &k(0, 1)), Int::from(1));
        assert_eq!(euler_form(&k(2, 3), &k(2, 3)), Int::from(0));
        // line bundles of degrees 2 and 5
        assert_eq!(euler_form(&k(1, 2), &k(1, 5)), Int::from(3));
    }

    #[test]
    fn apply_examples() {
        assert_eq!(apply(&Sl2::identity(), &k(7, -3)), k(7, -3));
        // twist by O(x0) raises degree by rank
        assert_eq!(apply(&sl2(1, 0, 1, 1), &k(1, 0)), k(1, 1));
        // the ideal-sheaf transform of a skyscraper has rank 1, chi = -1
        assert_eq!(apply(&sl2(-1, 1, 0, -1), &k(0, 1)), k(1, -1));
    }

    #[test]
    fn multiply_examples() {
        let b = sl2(1, 0, 1, 1);
        let a = sl2(-1, 1, 0, -1);
        assert_eq!(multiply(&Sl2::identity(), &b), b);
        assert_eq!(multiply(&b, &b), sl2(1, 0, 2, 1));
        // B*A*B is the order-four element
        assert_eq!(multiply(&multiply(&b, &a), &b), sl2(0, 1, -1, 0));
    }

    #[test]
    fn invert_examples() {
        assert_eq!(invert(&SL2Matrix::identity()), SL2Matrix::identity());
        assert_eq!(invert(&sl2(1, 0, 1, 1)), sl2(1, 0, -1, 1));
        assert_eq!(invert(&sl2(2, 1, 1, 1)), sl2(1, -1, -1, 2));
    }

    prop_compose! {
        fn arb_class()(r in -1000i64..1000, d in -1000i64..1000) -> K {
            k(r, d)
        }
    }

    prop_compose! {
        // random element of SL(2,Z) as a bounded word in the generators
        fn arb_sl2()(word in prop::collection::vec((0usize..2, -4i64..5), 0..8)) -> SL2Matrix {
            let b = sl2(1, 0, 1, 1);
            let s = sl2(0, 1, -1, 0);
            let mut m = SL2Matrix::identity();
            for (g, e) in word {
                let base = if g == 0 { b.clone() } else { s.clone() };
                let base = if e < 0 { base.invert() } else { base };
                m = m.mul(&base.pow(&num_bigint::BigUint::from(e.unsigned_abs())));
            }
            m
        }
    }

    proptest! {
        #[test]
        fn antisymmetry(v in arb_class(), w in arb_class()) {
            prop_assert_eq!(euler_form(&v, &v), Int::from(0));
            prop_assert_eq!(euler_form(&v, &w), -euler_form(&w, &v));
        }

        #[test]
        fn bilinearity(v1 in arb_class(), v2 in arb_class(), w in arb_class()) {
            prop_assert_eq!(
                euler_form(&v1.add(&v2), &w),
                euler_form(&v1, &w) + euler_form(&v2, &w)
            );
            prop_assert_eq!(
                euler_form(&w, &v1.add(&v2)),
                euler_form(&w, &v1) + euler_form(&w, &v2)
            );
        }

        #[test]
        fn symplectic_invariance(m in arb_sl2(), v in arb_class(), w in arb_class()) {
            prop_assert_eq!(
                euler_form(&apply(&m, &v), &apply(&m, &w)),
                euler_form(&v, &w)
            );
        }

        #[test]
        fn group_action(m1 in arb_sl2(), m2 in arb_sl2(), v in arb_class()) {
            prop_assert_eq!(
                apply(&multiply(&m1, &m2), &v),
                apply(&m1, &apply(&m2, &v))
            );
        }
    }
}
