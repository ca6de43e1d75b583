//! The isometry calculus for abelian schemes.
//!
//! Isomorphisms `X ×_T X̂ → Y ×_T Ŷ` are modeled as 2x2 matrices over a
//! configured endomorphism arithmetic: plain integers in the principally
//! polarized `End = Z` mode, or an integer matrix representation of the
//! endomorphism ring otherwise. The module provides the dagger involution,
//! isometric membership, the `U ≅ SL(2,Z)` identification with constructive
//! generator factorization, the rational `ξ` slope datum, the `U₀`
//! factorization after Orlov, and the trivial kernel group
//! `Z ⊕ (X(T) × X̂(T) × Pic(T))`.
//!
//! The isometry test is a necessary condition for two abelian schemes to be
//! relative Fourier-Mukai partners; it is sufficient only under the
//! surjective-slope hypothesis, which is not decided here. Likewise `ξ`
//! outputs the slope datum a realizing semihomogeneous bundle must have, it
//! does not prove one exists. Finiteness of the partner set over a normal
//! base is a theorem, not an enumeration this module performs.

use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::groups::{Element, FGAbelian, GroupError};
use crate::mat2::factor::{factor_steps, Step};
use crate::mat2::Sl2;
use crate::{Int, Rat, SL2Matrix};

#[derive(Error, Clone, PartialEq, Eq, Debug)]
pub enum AbelianError {
    #[error("operation requires the integer principally polarized mode")]
    WrongMode,
    #[error("matrix is not isometric")]
    NotIsometric,
    #[error("beta entry is not an isogeny")]
    NotInU0,
    #[error("elements belong to different contexts")]
    ContextMismatch,
    #[error("entry does not match the endomorphism context")]
    EntryMismatch,
    #[error("invalid endomorphism context: {0}")]
    BadContext(String),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// A square integer matrix, the representation of one endomorphism.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SquareMat {
    rows: Vec<Vec<Int>>,
}

impl SquareMat {
    pub fn new(rows: Vec<Vec<Int>>) -> Result<Self, AbelianError> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(AbelianError::BadContext(
                "representation matrices must be square and nonempty".into(),
            ));
        }
        Ok(SquareMat { rows })
    }

    pub fn identity(n: usize) -> Self {
        SquareMat {
            rows: (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| if i == j { Int::one() } else { Int::zero() })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn zero(n: usize) -> Self {
        SquareMat {
            rows: vec![vec![Int::zero(); n]; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Int>] {
        &self.rows
    }

    pub fn add(&self, rhs: &Self) -> Self {
        SquareMat {
            rows: self
                .rows
                .iter()
                .zip(&rhs.rows)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        SquareMat {
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|x| -x).collect())
                .collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let n = self.dim();
        SquareMat {
            rows: (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| (0..n).map(|k| &self.rows[i][k] * &rhs.rows[k][j]).sum())
                        .collect()
                })
                .collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim();
        SquareMat {
            rows: (0..n)
                .map(|i| (0..n).map(|j| self.rows[j][i].clone()).collect())
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().flatten().all(|x| x.is_zero())
    }

    pub fn to_rational(&self) -> RatMat {
        RatMat {
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|x| Rat::from_integer(x.clone())).collect())
                .collect(),
        }
    }

    pub fn det(&self) -> Int {
        let d = self.to_rational().det();
        debug_assert!(d.is_integer());
        d.to_integer()
    }
}

/// A square rational matrix; only used for `ξ` outputs and for inverting
/// unimodular conjugators.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatMat {
    rows: Vec<Vec<Rat>>,
}

impl RatMat {
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Rat>] {
        &self.rows
    }

    pub fn identity(n: usize) -> Self {
        SquareMat::identity(n).to_rational()
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let n = self.dim();
        RatMat {
            rows: (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| (0..n).map(|k| &self.rows[i][k] * &rhs.rows[k][j]).sum())
                        .collect()
                })
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        RatMat {
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|x| -x).collect())
                .collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim();
        RatMat {
            rows: (0..n)
                .map(|i| (0..n).map(|j| self.rows[j][i].clone()).collect())
                .collect(),
        }
    }

    // row `col` and row `r` are indexed in the same step; an iterator would
    // need split borrows for no gain
    #[allow(clippy::needless_range_loop)]
    pub fn det(&self) -> Rat {
        // fraction-preserving Gaussian elimination
        let n = self.dim();
        let mut m = self.rows.clone();
        let mut det = Rat::one();
        for col in 0..n {
            let pivot = match (col..n).find(|&r| !m[r][col].is_zero()) {
                Some(p) => p,
                None => return Rat::zero(),
            };
            if pivot != col {
                m.swap(pivot, col);
                det = -det;
            }
            det *= m[col][col].clone();
            let inv = m[col][col].clone();
            for r in col + 1..n {
                if m[r][col].is_zero() {
                    continue;
                }
                let factor = &m[r][col] / &inv;
                for c in col..n {
                    let sub = &factor * &m[col][c];
                    m[r][c] = &m[r][c] - &sub;
                }
            }
        }
        det
    }

    /// Gauss-Jordan inverse; `None` when singular.
    pub fn inverse(&self) -> Option<RatMat> {
        let n = self.dim();
        let mut m = self.rows.clone();
        let mut inv = RatMat::identity(n).rows;
        for col in 0..n {
            let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
            m.swap(pivot, col);
            inv.swap(pivot, col);
            let p = m[col][col].clone();
            for c in 0..n {
                m[col][c] = &m[col][c] / &p;
                inv[col][c] = &inv[col][c] / &p;
            }
            for r in 0..n {
                if r == col || m[r][col].is_zero() {
                    continue;
                }
                let factor = m[r][col].clone();
                for c in 0..n {
                    let a = &factor * &m[col][c];
                    m[r][c] = &m[r][c] - &a;
                    let b = &factor * &inv[col][c];
                    inv[r][c] = &inv[r][c] - &b;
                }
            }
        }
        Some(RatMat { rows: inv })
    }

    fn to_integer(&self) -> Option<SquareMat> {
        let rows: Option<Vec<Vec<Int>>> = self
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| x.is_integer().then(|| x.to_integer()))
                    .collect()
            })
            .collect();
        Some(SquareMat { rows: rows? })
    }
}

/// The integer-matrix representation of an endomorphism ring together with
/// its involution `x ↦ C x^t C^-1` for a fixed unimodular conjugator `C`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ReprRing {
    dim: usize,
    generators: Vec<(String, SquareMat)>,
    conj: SquareMat,
    conj_inv: SquareMat,
}

impl ReprRing {
    pub fn new(
        dim: usize,
        generators: Vec<(String, SquareMat)>,
        conj: SquareMat,
    ) -> Result<Self, AbelianError> {
        if dim == 0 {
            return Err(AbelianError::BadContext("dimension must be positive".into()));
        }
        if conj.dim() != dim {
            return Err(AbelianError::BadContext(
                "conjugator dimension does not match the representation".into(),
            ));
        }
        if !conj.det().abs().is_one() {
            return Err(AbelianError::BadContext(
                "conjugator must be unimodular".into(),
            ));
        }
        let conj_inv = conj
            .to_rational()
            .inverse()
            .and_then(|m| m.to_integer())
            .ok_or_else(|| AbelianError::BadContext("conjugator must be unimodular".into()))?;
        let ring = ReprRing {
            dim,
            generators,
            conj,
            conj_inv,
        };
        for (name, g) in &ring.generators {
            if g.dim() != dim {
                return Err(AbelianError::BadContext(format!(
                    "generator {name} has wrong dimension"
                )));
            }
            // the involution must square to the identity on the generators;
            // additivity and product reversal hold by construction
            if ring.hat(&ring.hat(g)) != *g {
                return Err(AbelianError::BadContext(format!(
                    "involution does not square to the identity on generator {name}"
                )));
            }
        }
        Ok(ring)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[(String, SquareMat)] {
        &self.generators
    }

    fn hat(&self, m: &SquareMat) -> SquareMat {
        self.conj.mul(&m.transpose()).mul(&self.conj_inv)
    }

    fn hat_rational(&self, m: &RatMat) -> RatMat {
        self.conj
            .to_rational()
            .mul(&m.transpose())
            .mul(&self.conj_inv.to_rational())
    }
}

/// The endomorphism arithmetic of the fibration: either `End = Z` with a
/// principal polarization (the hat involution is the identity on entries),
/// or a represented ring.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum EndContext {
    IntegerPp,
    Represented(ReprRing),
}

/// One entry of an isomorphism matrix, in the context arithmetic.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum EndElem {
    Int(Int),
    Mat(SquareMat),
}

impl EndElem {
    fn is_zero(&self) -> bool {
        match self {
            EndElem::Int(x) => x.is_zero(),
            EndElem::Mat(m) => m.is_zero(),
        }
    }
}

/// A 2x2 matrix `[[alpha, beta], [gamma, delta]]` over the endomorphism
/// arithmetic, modeling an isomorphism `X ×_T X̂ → Y ×_T Ŷ`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IsomMatrix {
    pub alpha: EndElem,
    pub beta: EndElem,
    pub gamma: EndElem,
    pub delta: EndElem,
}

impl IsomMatrix {
    pub fn new(alpha: EndElem, beta: EndElem, gamma: EndElem, delta: EndElem) -> Self {
        IsomMatrix {
            alpha,
            beta,
            gamma,
            delta,
        }
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Self {
        IsomMatrix::new(
            EndElem::Int(Int::from(a)),
            EndElem::Int(Int::from(b)),
            EndElem::Int(Int::from(c)),
            EndElem::Int(Int::from(d)),
        )
    }

    pub fn entries(&self) -> [&EndElem; 4] {
        [&self.alpha, &self.beta, &self.gamma, &self.delta]
    }
}

/// One entry of a `ξ` matrix: the context arithmetic tensored with `Q`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum QElem {
    Rat(Rat),
    Mat(RatMat),
}

/// The rational symmetric slope datum `ξ(f)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct XiMatrix {
    pub entries: [QElem; 4],
}

impl EndContext {
    fn check_entry(&self, e: &EndElem) -> Result<(), AbelianError> {
        match (self, e) {
            (EndContext::IntegerPp, EndElem::Int(_)) => Ok(()),
            (EndContext::Represented(r), EndElem::Mat(m)) if m.dim() == r.dim() => Ok(()),
            _ => Err(AbelianError::EntryMismatch),
        }
    }

    pub fn check_isom(&self, f: &IsomMatrix) -> Result<(), AbelianError> {
        for e in f.entries() {
            self.check_entry(e)?;
        }
        Ok(())
    }

    fn elem_zero(&self) -> EndElem {
        match self {
            EndContext::IntegerPp => EndElem::Int(Int::zero()),
            EndContext::Represented(r) => EndElem::Mat(SquareMat::zero(r.dim)),
        }
    }

    fn elem_one(&self) -> EndElem {
        match self {
            EndContext::IntegerPp => EndElem::Int(Int::one()),
            EndContext::Represented(r) => EndElem::Mat(SquareMat::identity(r.dim)),
        }
    }

    fn elem_add(&self, x: &EndElem, y: &EndElem) -> EndElem {
        match (x, y) {
            (EndElem::Int(a), EndElem::Int(b)) => EndElem::Int(a + b),
            (EndElem::Mat(a), EndElem::Mat(b)) => EndElem::Mat(a.add(b)),
            _ => unreachable!("entries checked against the context"),
        }
    }

    fn elem_mul(&self, x: &EndElem, y: &EndElem) -> EndElem {
        match (x, y) {
            (EndElem::Int(a), EndElem::Int(b)) => EndElem::Int(a * b),
            (EndElem::Mat(a), EndElem::Mat(b)) => EndElem::Mat(a.mul(b)),
            _ => unreachable!("entries checked against the context"),
        }
    }

    fn elem_neg(&self, x: &EndElem) -> EndElem {
        match x {
            EndElem::Int(a) => EndElem::Int(-a),
            EndElem::Mat(a) => EndElem::Mat(a.neg()),
        }
    }

    /// The dual (hat) of an entry: the identity in the principally polarized
    /// mode, the configured involution otherwise.
    pub fn elem_hat(&self, x: &EndElem) -> EndElem {
        match (self, x) {
            (EndContext::IntegerPp, EndElem::Int(a)) => EndElem::Int(a.clone()),
            (EndContext::Represented(r), EndElem::Mat(m)) => EndElem::Mat(r.hat(m)),
            _ => unreachable!("entries checked against the context"),
        }
    }

    pub fn identity_isom(&self) -> IsomMatrix {
        IsomMatrix::new(
            self.elem_one(),
            self.elem_zero(),
            self.elem_zero(),
            self.elem_one(),
        )
    }

    /// Block 2x2 product of isomorphism matrices.
    pub fn multiply(&self, f: &IsomMatrix, g: &IsomMatrix) -> Result<IsomMatrix, AbelianError> {
        self.check_isom(f)?;
        self.check_isom(g)?;
        Ok(IsomMatrix::new(
            self.elem_add(
                &self.elem_mul(&f.alpha, &g.alpha),
                &self.elem_mul(&f.beta, &g.gamma),
            ),
            self.elem_add(
                &self.elem_mul(&f.alpha, &g.beta),
                &self.elem_mul(&f.beta, &g.delta),
            ),
            self.elem_add(
                &self.elem_mul(&f.gamma, &g.alpha),
                &self.elem_mul(&f.delta, &g.gamma),
            ),
            self.elem_add(
                &self.elem_mul(&f.gamma, &g.beta),
                &self.elem_mul(&f.delta, &g.delta),
            ),
        ))
    }

    /// The dagger `[[hat(delta), -hat(beta)], [-hat(gamma), hat(alpha)]]`.
    pub fn dagger(&self, f: &IsomMatrix) -> Result<IsomMatrix, AbelianError> {
        self.check_isom(f)?;
        Ok(IsomMatrix::new(
            self.elem_hat(&f.delta),
            self.elem_neg(&self.elem_hat(&f.beta)),
            self.elem_neg(&self.elem_hat(&f.gamma)),
            self.elem_hat(&f.alpha),
        ))
    }

    /// `f` is isometric when `dagger(f)` is a two-sided inverse of `f`.
    pub fn is_isometric(&self, f: &IsomMatrix) -> Result<bool, AbelianError> {
        let dag = self.dagger(f)?;
        let id = self.identity_isom();
        Ok(self.multiply(&dag, f)? == id && self.multiply(f, &dag)? == id)
    }

    /// Read an isometric matrix in the principally polarized mode through
    /// the polarization; the result has determinant one.
    pub fn u_iso_pp(&self, f: &IsomMatrix) -> Result<SL2Matrix, AbelianError> {
        if *self != EndContext::IntegerPp {
            return Err(AbelianError::WrongMode);
        }
        self.check_isom(f)?;
        if !self.is_isometric(f)? {
            return Err(AbelianError::NotIsometric);
        }
        let int = |e: &EndElem| match e {
            EndElem::Int(x) => x.clone(),
            EndElem::Mat(_) => unreachable!(),
        };
        Ok(Sl2::new(int(&f.alpha), int(&f.beta), int(&f.gamma), int(&f.delta))
            .expect("isometric matrices in the polarized mode have determinant one"))
    }

    /// `beta` is an isogeny: nonzero integer, or represented matrix of
    /// nonzero determinant.
    pub fn in_u0(&self, f: &IsomMatrix) -> Result<bool, AbelianError> {
        self.check_isom(f)?;
        Ok(match &f.beta {
            EndElem::Int(b) => !b.is_zero(),
            EndElem::Mat(m) => !m.det().is_zero(),
        })
    }

    /// The slope datum
    /// `ξ(f) = [[beta^-1 alpha, -beta^-1], [-hat(beta)^-1, delta beta^-1]]`
    /// with exact rational entries. When `f` is isometric the result is
    /// checked to be symmetric under the involution.
    pub fn xi(&self, f: &IsomMatrix) -> Result<XiMatrix, AbelianError> {
        if !self.in_u0(f)? {
            return Err(AbelianError::NotInU0);
        }
        let xi = match self {
            EndContext::IntegerPp => {
                let int = |e: &EndElem| match e {
                    EndElem::Int(x) => Rat::from_integer(x.clone()),
                    EndElem::Mat(_) => unreachable!(),
                };
                let beta = int(&f.beta);
                let beta_inv = Rat::one() / beta;
                XiMatrix {
                    entries: [
                        QElem::Rat(&beta_inv * int(&f.alpha)),
                        QElem::Rat(-beta_inv.clone()),
                        QElem::Rat(-beta_inv.clone()),
                        QElem::Rat(int(&f.delta) * &beta_inv),
                    ],
                }
            }
            EndContext::Represented(ring) => {
                let mat = |e: &EndElem| match e {
                    EndElem::Mat(m) => m.to_rational(),
                    EndElem::Int(_) => unreachable!(),
                };
                let beta = mat(&f.beta);
                let beta_inv = beta.inverse().ok_or(AbelianError::NotInU0)?;
                let hat_beta_inv = ring
                    .hat_rational(&beta)
                    .inverse()
                    .ok_or(AbelianError::NotInU0)?;
                XiMatrix {
                    entries: [
                        QElem::Mat(beta_inv.mul(&mat(&f.alpha))),
                        QElem::Mat(beta_inv.neg()),
                        QElem::Mat(hat_beta_inv.neg()),
                        QElem::Mat(mat(&f.delta).mul(&beta_inv)),
                    ],
                }
            }
        };
        if self.is_isometric(f)? {
            assert!(
                self.xi_is_symmetric(&xi),
                "slope datum of an isometric matrix must be symmetric"
            );
        }
        Ok(xi)
    }

    /// Symmetry of a slope datum under the involution-transpose: the
    /// diagonal entries are hat-fixed and the off-diagonal ones are swapped.
    pub fn xi_is_symmetric(&self, xi: &XiMatrix) -> bool {
        match self {
            EndContext::IntegerPp => xi.entries[1] == xi.entries[2],
            EndContext::Represented(ring) => {
                let hat = |e: &QElem| match e {
                    QElem::Mat(m) => QElem::Mat(ring.hat_rational(m)),
                    QElem::Rat(_) => unreachable!(),
                };
                hat(&xi.entries[0]) == xi.entries[0]
                    && hat(&xi.entries[3]) == xi.entries[3]
                    && hat(&xi.entries[1]) == xi.entries[2]
            }
        }
    }

    /// Factor an isometric matrix as `g * h` with both factors isometric and
    /// in `U₀`. Only the principally polarized mode is supported.
    pub fn factor_u0(&self, f: &IsomMatrix) -> Result<(IsomMatrix, IsomMatrix), AbelianError> {
        if *self != EndContext::IntegerPp {
            return Err(AbelianError::WrongMode);
        }
        if !self.is_isometric(f)? {
            return Err(AbelianError::NotIsometric);
        }
        let (h, h_inv) = if !f.alpha.is_zero() {
            // J = [[0,-1],[1,0]]
            (
                IsomMatrix::from_ints(0, -1, 1, 0),
                IsomMatrix::from_ints(0, 1, -1, 0),
            )
        } else {
            // alpha = 0 forces beta invertible; K = [[1,-1],[1,0]] keeps
            // both factors in U0
            (
                IsomMatrix::from_ints(1, -1, 1, 0),
                IsomMatrix::from_ints(0, 1, -1, 1),
            )
        };
        let g = self.multiply(f, &h_inv)?;
        debug_assert!(self.in_u0(&g)? && self.in_u0(&h)?);
        Ok((g, h))
    }
}

/// Generators of the principally polarized unitary group through the
/// `SL(2,Z)` identification: `P = [[0,-1],[1,0]]` (the Poincaré transform
/// composed with the inverse polarization) and `Q = [[1,0],[1,1]]` (the
/// twist by the polarizing bundle).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PpGen {
    P,
    PInv,
    Q,
    QInv,
}

impl PpGen {
    pub fn matrix(&self) -> SL2Matrix {
        let p = Sl2::new(Int::zero(), Int::from(-1), Int::one(), Int::zero()).unwrap();
        let q = Sl2::new(Int::one(), Int::zero(), Int::one(), Int::one()).unwrap();
        match self {
            PpGen::P => p,
            PpGen::PInv => p.invert(),
            PpGen::Q => q,
            PpGen::QInv => q.invert(),
        }
    }
}

/// A run `gen^exp` in a principally polarized generator word; `exp > 0`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PpSyllable {
    pub gen: PpGen,
    pub exp: BigUint,
}

impl PpSyllable {
    pub fn matrix(&self) -> SL2Matrix {
        self.gen.matrix().pow(&self.exp)
    }
}

/// Remultiply a generator word.
pub fn pp_word_product(word: &[PpSyllable]) -> SL2Matrix {
    word.iter()
        .fold(SL2Matrix::identity(), |acc, s| acc.mul(&s.matrix()))
}

/// Factor a determinant-one matrix into the generators `P` and `Q`,
/// certifying surjectivity of the transform-to-isometry map constructively.
/// The syllable count is `O(log max |entry|)`.
pub fn factor_u_pp(m: &SL2Matrix) -> Vec<PpSyllable> {
    let mut word: Vec<PpSyllable> = Vec::new();
    let mut push = |gen: PpGen, exp: BigUint| {
        if !exp.is_zero() {
            word.push(PpSyllable { gen, exp });
        }
    };
    for step in factor_steps(m) {
        match step {
            Step::LowerPow(k) => {
                let gen = if k.is_negative() { PpGen::QInv } else { PpGen::Q };
                push(gen, k.abs().to_biguint().unwrap());
            }
            // P = [[0,-1],[1,0]] is the inverse of S
            Step::S => push(PpGen::PInv, BigUint::from(1u8)),
            Step::SInv => push(PpGen::P, BigUint::from(1u8)),
            Step::MinusI => push(PpGen::P, BigUint::from(2u8)),
        }
    }
    word
}

/// A context for the trivial kernel group `Z ⊕ (X(T) × X̂(T) × Pic(T))` of
/// an abelian scheme, together with its endomorphism arithmetic.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AbelianContext {
    pub end: EndContext,
    pub sections: FGAbelian,
    pub dual_sections: FGAbelian,
    pub pic_t: FGAbelian,
}

impl AbelianContext {
    pub fn new(
        end: EndContext,
        sections: FGAbelian,
        dual_sections: FGAbelian,
        pic_t: FGAbelian,
    ) -> Arc<Self> {
        Arc::new(AbelianContext {
            end,
            sections,
            dual_sections,
            pic_t,
        })
    }

    pub fn integer_pp_minimal() -> Arc<Self> {
        AbelianContext::new(
            EndContext::IntegerPp,
            FGAbelian::free(0),
            FGAbelian::free(0),
            FGAbelian::free(0),
        )
    }
}

/// A trivial transform `T_x_*(-) ⊗ L ⊗ p^* M [n]` of an abelian scheme.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AbelianTrivial {
    ctx: Arc<AbelianContext>,
    pub n: Int,
    pub x: Element,
    pub l: Element,
    pub m: Element,
}

impl AbelianTrivial {
    pub fn new(
        ctx: Arc<AbelianContext>,
        n: Int,
        x: Element,
        l: Element,
        m: Element,
    ) -> Result<Self, AbelianError> {
        let x = ctx.sections.reduce(x)?;
        let l = ctx.dual_sections.reduce(l)?;
        let m = ctx.pic_t.reduce(m)?;
        Ok(AbelianTrivial { ctx, n, x, l, m })
    }

    pub fn identity(ctx: Arc<AbelianContext>) -> Self {
        AbelianTrivial {
            n: Int::zero(),
            x: ctx.sections.zero(),
            l: ctx.dual_sections.zero(),
            m: ctx.pic_t.zero(),
            ctx,
        }
    }

    pub fn context(&self) -> &Arc<AbelianContext> {
        &self.ctx
    }

    pub fn inverse(&self) -> Result<AbelianTrivial, AbelianError> {
        Ok(AbelianTrivial {
            ctx: self.ctx.clone(),
            n: -self.n.clone(),
            x: self.ctx.sections.neg(&self.x)?,
            l: self.ctx.dual_sections.neg(&self.l)?,
            m: self.ctx.pic_t.neg(&self.m)?,
        })
    }

    pub fn is_identity(&self) -> bool {
        self.n.is_zero()
            && self.x.iter().all(|c| c.is_zero())
            && self.l.iter().all(|c| c.is_zero())
            && self.m.iter().all(|c| c.is_zero())
    }
}

/// The direct product law: componentwise sum of all four components.
pub fn compose_abelian_trivial(
    t1: &AbelianTrivial,
    t2: &AbelianTrivial,
) -> Result<AbelianTrivial, AbelianError> {
    if t1.ctx != t2.ctx {
        return Err(AbelianError::ContextMismatch);
    }
    Ok(AbelianTrivial {
        ctx: t1.ctx.clone(),
        n: &t1.n + &t2.n,
        x: t1.ctx.sections.add(&t1.x, &t2.x)?,
        l: t1.ctx.dual_sections.add(&t1.l, &t2.l)?,
        m: t1.ctx.pic_t.add(&t1.m, &t2.m)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pp() -> EndContext {
        EndContext::IntegerPp
    }

    fn ints(v: &[i64]) -> Element {
        v.iter().map(|&x| Int::from(x)).collect()
    }

    fn sq(rows: &[&[i64]]) -> SquareMat {
        SquareMat::new(
            rows.iter()
                .map(|r| r.iter().map(|&x| Int::from(x)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn dagger_examples() {
        let ctx = pp();
        let id = ctx.identity_isom();
        assert_eq!(ctx.dagger(&id).unwrap(), id);

        let f = IsomMatrix::from_ints(0, -1, 1, 0);
        let dag = ctx.dagger(&f).unwrap();
        assert_eq!(dag, IsomMatrix::from_ints(0, 1, -1, 0));
        assert_eq!(ctx.multiply(&dag, &f).unwrap(), id);

        let g = IsomMatrix::from_ints(2, 3, 1, 2);
        assert_eq!(ctx.dagger(&ctx.dagger(&g).unwrap()).unwrap(), g);
    }

    #[test]
    fn is_isometric_examples() {
        let ctx = pp();
        assert!(ctx.is_isometric(&IsomMatrix::from_ints(0, -1, 1, 0)).unwrap());
        assert!(ctx.is_isometric(&IsomMatrix::from_ints(1, 0, 1, 1)).unwrap());
        assert!(!ctx.is_isometric(&IsomMatrix::from_ints(2, 0, 0, 1)).unwrap());
    }

    #[test]
    fn u_iso_pp_examples() {
        let ctx = pp();
        assert!(ctx.u_iso_pp(&ctx.identity_isom()).unwrap().is_identity());
        let m = ctx.u_iso_pp(&IsomMatrix::from_ints(0, -1, 1, 0)).unwrap();
        assert_eq!(
            m,
            Sl2::new(Int::zero(), Int::from(-1), Int::one(), Int::zero()).unwrap()
        );
        let m = ctx.u_iso_pp(&IsomMatrix::from_ints(3, 2, 4, 3)).unwrap();
        assert_eq!(
            m,
            Sl2::new(Int::from(3), Int::from(2), Int::from(4), Int::from(3)).unwrap()
        );
        assert_eq!(
            ctx.u_iso_pp(&IsomMatrix::from_ints(2, 0, 0, 1)).unwrap_err(),
            AbelianError::NotIsometric
        );
    }

    #[test]
    fn factor_u_pp_examples() {
        assert!(factor_u_pp(&SL2Matrix::identity()).is_empty());

        let q = PpGen::Q.matrix();
        let w = factor_u_pp(&q);
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].gen, PpGen::Q);
        assert_eq!(pp_word_product(&w), q);

        let m = Sl2::new(Int::one(), Int::from(-1), Int::zero(), Int::one()).unwrap();
        let w = factor_u_pp(&m);
        assert_eq!(pp_word_product(&w), m);
        let gens: Vec<PpGen> = w.iter().map(|s| s.gen).collect();
        assert_eq!(gens, vec![PpGen::PInv, PpGen::Q, PpGen::P]);
    }

    #[test]
    fn factor_u_pp_round_trip_small() {
        for a in -3i64..=3 {
            for b in -3i64..=3 {
                for c in -3i64..=3 {
                    for d in -3i64..=3 {
                        if a * d - b * c != 1 {
                            continue;
                        }
                        let m = Sl2::new(Int::from(a), Int::from(b), Int::from(c), Int::from(d))
                            .unwrap();
                        assert_eq!(pp_word_product(&factor_u_pp(&m)), m);
                    }
                }
            }
        }
    }

    #[test]
    fn in_u0_examples() {
        let ctx = pp();
        assert!(!ctx.in_u0(&ctx.identity_isom()).unwrap());
        assert!(ctx.in_u0(&IsomMatrix::from_ints(0, -1, 1, 0)).unwrap());

        let ring = ReprRing::new(
            2,
            vec![("g".into(), sq(&[&[0, -1], &[1, 0]]))],
            SquareMat::identity(2),
        )
        .unwrap();
        let ctx = EndContext::Represented(ring);
        let singular = EndElem::Mat(sq(&[&[1, 1], &[0, 0]]));
        let f = IsomMatrix::new(
            EndElem::Mat(SquareMat::identity(2)),
            singular,
            EndElem::Mat(SquareMat::zero(2)),
            EndElem::Mat(SquareMat::identity(2)),
        );
        assert!(!ctx.in_u0(&f).unwrap());
    }

    #[test]
    fn xi_examples() {
        let ctx = pp();
        let xi = ctx.xi(&IsomMatrix::from_ints(0, -1, 1, 0)).unwrap();
        let r = |n: i64| QElem::Rat(Rat::from_integer(Int::from(n)));
        assert_eq!(xi.entries, [r(0), r(1), r(1), r(0)]);

        let xi = ctx.xi(&IsomMatrix::from_ints(1, 1, -1, 0)).unwrap();
        assert_eq!(xi.entries, [r(1), r(-1), r(-1), r(0)]);

        assert_eq!(
            ctx.xi(&ctx.identity_isom()).unwrap_err(),
            AbelianError::NotInU0
        );
    }

    #[test]
    fn xi_fractional_entries() {
        let ctx = pp();
        // non-isometric but in U0: entries are genuine fractions
        let f = IsomMatrix::from_ints(1, 2, 0, 1);
        let xi = ctx.xi(&f).unwrap();
        let half = Rat::new(Int::one(), Int::from(2));
        assert_eq!(xi.entries[0], QElem::Rat(half.clone()));
        assert_eq!(xi.entries[1], QElem::Rat(-half));
    }

    #[test]
    fn factor_u0_examples() {
        let ctx = pp();
        let id = ctx.identity_isom();
        let (g, h) = ctx.factor_u0(&id).unwrap();
        assert_eq!(g, IsomMatrix::from_ints(0, 1, -1, 0));
        assert_eq!(h, IsomMatrix::from_ints(0, -1, 1, 0));
        assert_eq!(ctx.multiply(&g, &h).unwrap(), id);

        for f in [
            IsomMatrix::from_ints(1, 0, 1, 1),
            IsomMatrix::from_ints(0, -1, 1, 0),
            IsomMatrix::from_ints(5, 2, 2, 1),
        ] {
            let (g, h) = ctx.factor_u0(&f).unwrap();
            assert_eq!(ctx.multiply(&g, &h).unwrap(), f);
            assert!(ctx.in_u0(&g).unwrap());
            assert!(ctx.in_u0(&h).unwrap());
            assert!(ctx.is_isometric(&g).unwrap());
            assert!(ctx.is_isometric(&h).unwrap());
        }

        assert_eq!(
            ctx.factor_u0(&IsomMatrix::from_ints(1, 1, 1, 1)).unwrap_err(),
            AbelianError::NotIsometric
        );
    }

    #[test]
    fn represented_ring_involution() {
        // Gaussian integers acting on Z^2, hat = plain transpose
        let i_mat = sq(&[&[0, -1], &[1, 0]]);
        let ring = ReprRing::new(
            2,
            vec![("i".into(), i_mat.clone())],
            SquareMat::identity(2),
        )
        .unwrap();
        let ctx = EndContext::Represented(ring);
        // the transform sending (a + bi) to its conjugate is the hat of i
        let hat_i = ctx.elem_hat(&EndElem::Mat(i_mat.clone()));
        assert_eq!(hat_i, EndElem::Mat(i_mat.neg().transpose().neg()));

        // [[0, -i],[ -i? ]]: check an isometric represented matrix:
        // f = [[0, -1],[1, 0]] with matrix entries
        let one = EndElem::Mat(SquareMat::identity(2));
        let zero = EndElem::Mat(SquareMat::zero(2));
        let f = IsomMatrix::new(
            zero.clone(),
            ctx.elem_neg(&one),
            one.clone(),
            zero.clone(),
        );
        assert!(ctx.is_isometric(&f).unwrap());
        let xi = ctx.xi(&f).unwrap();
        assert!(ctx.xi_is_symmetric(&xi));
        assert_eq!(ctx.u_iso_pp(&f).unwrap_err(), AbelianError::WrongMode);
    }

    #[test]
    fn bad_conjugator_rejected() {
        let err = ReprRing::new(2, vec![], sq(&[&[2, 0], &[0, 1]])).unwrap_err();
        assert!(matches!(err, AbelianError::BadContext(_)));
    }

    #[test]
    fn compose_abelian_trivial_examples() {
        let ctx = AbelianContext::new(
            EndContext::IntegerPp,
            FGAbelian::free(1),
            FGAbelian::free(2),
            FGAbelian::free(1),
        );
        let id = AbelianTrivial::identity(ctx.clone());
        let t = AbelianTrivial::new(
            ctx.clone(),
            Int::from(1),
            ints(&[2]),
            ints(&[3, -1]),
            ints(&[0]),
        )
        .unwrap();
        assert_eq!(compose_abelian_trivial(&id, &t).unwrap(), t);
        assert!(compose_abelian_trivial(&t, &t.inverse().unwrap())
            .unwrap()
            .is_identity());

        let t1 = AbelianTrivial::new(
            ctx.clone(),
            Int::from(2),
            ints(&[1]),
            ints(&[0, 3]),
            ints(&[5]),
        )
        .unwrap();
        let t2 = AbelianTrivial::new(
            ctx.clone(),
            Int::from(3),
            ints(&[4]),
            ints(&[1, -3]),
            ints(&[0]),
        )
        .unwrap();
        let t12 = compose_abelian_trivial(&t1, &t2).unwrap();
        assert_eq!(t12.n, Int::from(5));
        assert_eq!(t12.x, ints(&[5]));
        assert_eq!(t12.l, ints(&[1, 0]));
        assert_eq!(t12.m, ints(&[5]));
    }

    #[test]
    fn compose_abelian_context_mismatch() {
        let t1 = AbelianTrivial::identity(AbelianContext::integer_pp_minimal());
        let ctx2 = AbelianContext::new(
            EndContext::IntegerPp,
            FGAbelian::free(1),
            FGAbelian::free(0),
            FGAbelian::free(0),
        );
        let t2 = AbelianTrivial::identity(ctx2);
        assert_eq!(
            compose_abelian_trivial(&t1, &t2).unwrap_err(),
            AbelianError::ContextMismatch
        );
    }

    proptest! {
        #[test]
        fn dagger_algebra(
            e1 in prop::array::uniform4(-1000i64..1000),
            e2 in prop::array::uniform4(-1000i64..1000),
        ) {
            let ctx = pp();
            let f = IsomMatrix::from_ints(e1[0], e1[1], e1[2], e1[3]);
            let g = IsomMatrix::from_ints(e2[0], e2[1], e2[2], e2[3]);
            prop_assert_eq!(ctx.dagger(&ctx.dagger(&f).unwrap()).unwrap(), f.clone());
            let lhs = ctx.dagger(&ctx.multiply(&f, &g).unwrap()).unwrap();
            let rhs = ctx.multiply(&ctx.dagger(&g).unwrap(), &ctx.dagger(&f).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn pp_isometric_iff_det_one(e in prop::array::uniform4(-20i64..=20)) {
            let ctx = pp();
            let f = IsomMatrix::from_ints(e[0], e[1], e[2], e[3]);
            let det = e[0] * e[3] - e[1] * e[2];
            prop_assert_eq!(ctx.is_isometric(&f).unwrap(), det == 1);
        }

        #[test]
        fn abelian_trivial_group_laws(
            ns in prop::array::uniform3(-10i64..=10),
            xs in prop::array::uniform3(-10i64..=10),
            ls in prop::array::uniform3(-10i64..=10),
            ms in prop::array::uniform3(-10i64..=10),
        ) {
            let ctx = AbelianContext::new(
                EndContext::IntegerPp,
                FGAbelian::free(1),
                FGAbelian::new(1, vec![Int::from(4)]).unwrap(),
                FGAbelian::free(1),
            );
            let ts: Vec<AbelianTrivial> = (0..3)
                .map(|i| AbelianTrivial::new(
                    ctx.clone(),
                    Int::from(ns[i]),
                    ints(&[xs[i]]),
                    ints(&[ls[i], ms[i]]),
                    ints(&[ms[i]]),
                ).unwrap())
                .collect();
            let l = compose_abelian_trivial(
                &compose_abelian_trivial(&ts[0], &ts[1]).unwrap(), &ts[2]).unwrap();
            let r = compose_abelian_trivial(
                &ts[0], &compose_abelian_trivial(&ts[1], &ts[2]).unwrap()).unwrap();
            prop_assert_eq!(&l, &r);
            // commutativity: it is a direct product
            prop_assert_eq!(
                compose_abelian_trivial(&ts[0], &ts[1]).unwrap(),
                compose_abelian_trivial(&ts[1], &ts[0]).unwrap()
            );
            for t in &ts {
                let inv = t.inverse().unwrap();
                prop_assert!(compose_abelian_trivial(t, &inv).unwrap().is_identity());
            }
        }
    }
}
