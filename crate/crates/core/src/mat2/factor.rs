//! Euclidean reduction of a determinant-one integer matrix to a word over
//! the lower transvection `B = [[1,0],[1,1]]` and `S = [[0,1],[-1,0]]`.
//!
//! Shared by the genus-one factorizer (which rewrites `S` as `B A B`) and the
//! principally polarized factorizer (which rewrites `S` as `P^-1`).

use num_integer::Integer as _;
use num_traits::{Signed, Zero};

use crate::mat2::{Mat2, Sl2};
use crate::Int;

/// A factor of the reduced word, in product order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Step {
    /// `B^k` with `k != 0` of either sign.
    LowerPow(Int),
    /// `S = [[0,1],[-1,0]]`.
    S,
    /// `S^-1 = [[0,-1],[1,0]]`.
    SInv,
    /// `-I`; always the last factor when present.
    MinusI,
}

impl Step {
    pub fn matrix(&self) -> Sl2<Int> {
        let b = Sl2::new(Int::from(1), Int::zero(), Int::from(1), Int::from(1)).unwrap();
        match self {
            Step::LowerPow(k) => {
                let p = b.pow(&k.abs().to_biguint().unwrap());
                if k.is_negative() {
                    p.invert()
                } else {
                    p
                }
            }
            Step::S => Sl2::new(Int::zero(), Int::from(1), Int::from(-1), Int::zero()).unwrap(),
            Step::SInv => Sl2::new(Int::zero(), Int::from(-1), Int::from(1), Int::zero()).unwrap(),
            Step::MinusI => Sl2::minus_identity(),
        }
    }
}

/// Nearest integer to `c / a` (ties toward negative infinity); `a != 0`.
fn rounded_quotient(c: &Int, a: &Int) -> Int {
    let two = Int::from(2);
    let two_a = a * &two;
    (c * two + a).div_floor(&two_a)
}

// Left-multiplications applied during reduction, pushed in application
// order; the product-order word is the list of their inverses in the same
// order.
enum Op {
    LowerPow(Int),
    S,
    SInv,
}

impl Op {
    fn inverse_step(&self) -> Step {
        match self {
            Op::LowerPow(k) => Step::LowerPow(-k),
            Op::S => Step::SInv,
            Op::SInv => Step::S,
        }
    }
}

/// Factor `m` as a product of the returned steps, exactly. The number of
/// steps is `O(log max |entry|)`.
pub fn factor_steps(m: &Sl2<Int>) -> Vec<Step> {
    let mut cur: Mat2<Int> = m.mat().clone();
    let mut ops: Vec<Op> = Vec::new();

    let apply_s_inv = |cur: &Mat2<Int>| -> Mat2<Int> {
        // S^-1 * [[a,b],[c,d]] = [[-c,-d],[a,b]]
        Mat2::new(-cur.c.clone(), -cur.d.clone(), cur.a.clone(), cur.b.clone())
    };

    while !cur.c.is_zero() {
        if cur.a.is_zero() {
            cur = apply_s_inv(&cur);
            ops.push(Op::SInv);
            continue;
        }
        let q = rounded_quotient(&cur.c, &cur.a);
        if !q.is_zero() {
            // B^-q * [[a,b],[c,d]] = [[a, b],[c - qa, d - qb]]
            cur.c = &cur.c - &q * &cur.a;
            cur.d = &cur.d - &q * &cur.b;
            ops.push(Op::LowerPow(-q));
        }
        if !cur.c.is_zero() {
            cur = apply_s_inv(&cur);
            ops.push(Op::SInv);
        }
    }

    // upper triangular with unit diagonal up to sign: cur = ±[[1, b'],[0, 1]]
    let minus = cur.a.is_negative();
    let b_entry = if minus { -cur.b.clone() } else { cur.b.clone() };
    if !b_entry.is_zero() {
        // [[1, -t],[0, 1]] = S * B^t * S^-1; clearing needs t = b'
        ops.push(Op::SInv);
        ops.push(Op::LowerPow(b_entry));
        ops.push(Op::S);
    }

    let mut steps: Vec<Step> = ops.iter().map(Op::inverse_step).collect();
    if minus {
        steps.push(Step::MinusI);
    }
    steps
}

/// Remultiply a step word; used by tests and the round-trip certificates.
pub fn steps_product(steps: &[Step]) -> Sl2<Int> {
    steps
        .iter()
        .fold(Sl2::identity(), |acc, s| acc.mul(&s.matrix()))
}
