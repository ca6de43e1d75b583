//! Relative Fourier-Mukai transforms of a Weierstrass fibration.
//!
//! The group sits in an extension of the even-shift trivial transforms
//! `Aut(X/T) ⋊ (2Z × Pic^0(X))` by `SL(2,Z)`. A transform is represented
//! here as an [`FMWord`]: a formal word over the elementary generators
//! together with an explicit trivial transform. The extension's cocycle is
//! not part of the data, so two words are compared only by their `SL(2,Z)`
//! image and their trivial part; the library never decides equality in the
//! transform group itself.

use std::sync::Arc;

use num_bigint::BigUint;
use num_integer::Integer as _;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::groups::{
    Element, FGAbelian, FiniteGroup, GroupError, GroupHom, SemidirectContext, SemidirectElement,
};
use crate::lattice::{apply, KClass};
use crate::mat2::factor::{factor_steps, Step};
use crate::mat2::Sl2;
use crate::{Int, SL2Matrix};

#[derive(Error, Clone, PartialEq, Eq, Debug)]
pub enum Genus1Error {
    #[error("the zero class is not the class of a sheaf")]
    ZeroClass,
    #[error("class ({0}, {1}) violates the semistable sign convention")]
    NotSemistableClass(String, String),
    #[error("shift {0} is odd; trivial transforms carry even shifts only")]
    OddShiftComponent(String),
    #[error("line bundle has nonzero fibre degree {0}")]
    NonZeroFibreDegree(String),
    #[error("elements belong to different fibration contexts")]
    ContextMismatch,
    #[error("invalid fibration context: {0}")]
    BadContext(String),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// An elementary generator of the transform group modulo trivial transforms.
///
/// `PhiOne` is the ideal-of-the-diagonal transform with invariant
/// `A = [[-1,1],[0,-1]]`, `PhiTwo` the twist by a degree-one line bundle with
/// invariant `B = [[1,0],[1,1]]`, and `OddShift` the designated lift of `-I`
/// (the shift `[1]`, which is not an even-shift trivial transform).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ElementaryGen {
    PhiOne,
    PhiOneInv,
    PhiTwo,
    PhiTwoInv,
    OddShift,
}

impl ElementaryGen {
    pub fn matrix(&self) -> SL2Matrix {
        let m = |a: i64, b: i64, c: i64, d: i64| {
            Sl2::new(Int::from(a), Int::from(b), Int::from(c), Int::from(d)).unwrap()
        };
        match self {
            ElementaryGen::PhiOne => m(-1, 1, 0, -1),
            ElementaryGen::PhiOneInv => m(-1, 1, 0, -1).invert(),
            ElementaryGen::PhiTwo => m(1, 0, 1, 1),
            ElementaryGen::PhiTwoInv => m(1, 0, -1, 1),
            ElementaryGen::OddShift => SL2Matrix::minus_identity(),
        }
    }
}

/// A run `gen^exp` inside a word; `exp > 0`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Syllable {
    pub gen: ElementaryGen,
    pub exp: BigUint,
}

impl Syllable {
    pub fn new(gen: ElementaryGen, exp: BigUint) -> Self {
        Syllable { gen, exp }
    }

    pub fn single(gen: ElementaryGen) -> Self {
        Syllable {
            gen,
            exp: BigUint::from(1u8),
        }
    }

    pub fn matrix(&self) -> SL2Matrix {
        self.gen.matrix().pow(&self.exp)
    }
}

/// A formal word over the elementary generators paired with a trivial
/// transform. Words are stored run-length encoded; the word length is the
/// number of syllables.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FMWord {
    pub gens: Vec<Syllable>,
    /// `None` stands for the identity trivial transform of any context.
    pub trivial: Option<TrivialTransform>,
}

impl FMWord {
    pub fn identity() -> Self {
        FMWord {
            gens: Vec::new(),
            trivial: None,
        }
    }

    pub fn from_gens(gens: Vec<Syllable>) -> Self {
        FMWord {
            gens,
            trivial: None,
        }
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    /// Concatenate the generator parts and compose the trivial parts.
    /// Equality of the results is equality of `(ch, trivial)` pairs only;
    /// the extension cocycle is not modeled.
    pub fn mul(&self, rhs: &FMWord) -> Result<FMWord, Genus1Error> {
        let mut gens = self.gens.clone();
        gens.extend(rhs.gens.iter().cloned());
        let trivial = match (&self.trivial, &rhs.trivial) {
            (None, None) => None,
            (Some(t), None) | (None, Some(t)) => Some(t.clone()),
            (Some(t1), Some(t2)) => Some(compose_trivial(t1, t2)?),
        };
        Ok(FMWord { gens, trivial })
    }
}

/// The `SL(2,Z)` invariant of a word: the product of the generator matrices.
/// The trivial part contributes the identity.
pub fn ch_tilde(w: &FMWord) -> SL2Matrix {
    w.gens
        .iter()
        .fold(SL2Matrix::identity(), |acc, s| acc.mul(&s.matrix()))
}

/// Constructive preimage of `ch~`: factor a determinant-one matrix into the
/// elementary generators, with at most one trailing `OddShift` when the
/// Euclidean reduction terminates at `-I`. The syllable count is
/// `O(log max |entry|)`.
pub fn factor_sl2(m: &SL2Matrix) -> FMWord {
    let mut gens: Vec<Syllable> = Vec::new();
    let mut push = |gen: ElementaryGen, exp: BigUint| {
        if !exp.is_zero() {
            gens.push(Syllable::new(gen, exp));
        }
    };
    for step in factor_steps(m) {
        match step {
            Step::LowerPow(k) => {
                let gen = if k.is_negative() {
                    ElementaryGen::PhiTwoInv
                } else {
                    ElementaryGen::PhiTwo
                };
                push(gen, k.abs().to_biguint().unwrap());
            }
            // S = B A B, S^-1 = B^-1 A^-1 B^-1
            Step::S => {
                push(ElementaryGen::PhiTwo, BigUint::from(1u8));
                push(ElementaryGen::PhiOne, BigUint::from(1u8));
                push(ElementaryGen::PhiTwo, BigUint::from(1u8));
            }
            Step::SInv => {
                push(ElementaryGen::PhiTwoInv, BigUint::from(1u8));
                push(ElementaryGen::PhiOneInv, BigUint::from(1u8));
                push(ElementaryGen::PhiTwoInv, BigUint::from(1u8));
            }
            Step::MinusI => push(ElementaryGen::OddShift, BigUint::from(1u8)),
        }
    }
    FMWord::from_gens(gens)
}

fn is_semistable_class(v: &KClass<Int>) -> bool {
    v.rank.is_positive() || (v.rank.is_zero() && v.degree.is_positive())
}

/// Predict the WIT index of a semistable sheaf class under a transform with
/// sheaf kernel, and the class of its transform.
///
/// The kernel is assumed shift-normalized so the index lands in `{0, 1}`;
/// callers account for further shifts themselves.
pub fn wit_index(m: &SL2Matrix, v: &KClass<Int>) -> Result<(u8, KClass<Int>), Genus1Error> {
    if v.is_zero() {
        return Err(Genus1Error::ZeroClass);
    }
    if !is_semistable_class(v) {
        return Err(Genus1Error::NotSemistableClass(
            v.rank.to_string(),
            v.degree.to_string(),
        ));
    }
    let w = apply(m, v);
    if is_semistable_class(&w) {
        Ok((0, w))
    } else {
        Ok((1, w.neg()))
    }
}

/// A Weierstrass fibration context: `Pic(X)` with its fibre-degree map and
/// designated base summand, and a finite relative automorphism group acting
/// on `Pic(X)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WeierstrassContext {
    pic: FGAbelian,
    deg_t: GroupHom,
    base_summand: Vec<usize>,
    aut: SemidirectContext,
}

impl WeierstrassContext {
    pub fn new(
        pic: FGAbelian,
        deg_t: GroupHom,
        base_summand: Vec<usize>,
        aut: FiniteGroup,
        pic_action: Vec<GroupHom>,
    ) -> Result<Arc<Self>, Genus1Error> {
        if *deg_t.source() != pic {
            return Err(Genus1Error::BadContext(
                "fibre-degree map is not defined on Pic(X)".into(),
            ));
        }
        if deg_t.target().free_rank() != 1 || !deg_t.target().torsion_orders().is_empty() {
            return Err(Genus1Error::BadContext(
                "fibre-degree map must land in Z".into(),
            ));
        }
        let mut seen = vec![false; pic.len()];
        for &i in &base_summand {
            if i >= pic.len() || seen[i] {
                return Err(Genus1Error::BadContext(format!(
                    "invalid base summand coordinate {i}"
                )));
            }
            seen[i] = true;
            // pullbacks from the base have fibre degree zero
            let mut e = pic.zero();
            e[i] = Int::from(1);
            if !deg_t.apply(&e)?[0].is_zero() {
                return Err(Genus1Error::BadContext(format!(
                    "base summand coordinate {i} has nonzero fibre degree"
                )));
            }
        }
        let aut = SemidirectContext::new(aut, pic.clone(), pic_action)?;
        Ok(Arc::new(WeierstrassContext {
            pic,
            deg_t,
            base_summand,
            aut,
        }))
    }

    /// Context with trivial automorphism group and trivial `Pic`; the home of
    /// identity trivial transforms when no fibration data is configured.
    pub fn minimal() -> Arc<Self> {
        let pic = FGAbelian::free(0);
        let deg_t = GroupHom::new(pic.clone(), FGAbelian::free(1), vec![Vec::new()]).unwrap();
        let action = vec![GroupHom::identity(pic.clone())];
        WeierstrassContext::new(pic, deg_t, Vec::new(), FiniteGroup::trivial(), action).unwrap()
    }

    pub fn pic(&self) -> &FGAbelian {
        &self.pic
    }

    pub fn aut(&self) -> &FiniteGroup {
        self.aut.finite()
    }

    pub fn fibre_degree(&self, pic_elem: &[Int]) -> Result<Int, Genus1Error> {
        Ok(self.deg_t.apply(pic_elem)?[0].clone())
    }

    /// Split a fibre-degree-zero line bundle class into its fibrewise and
    /// base parts; the two projections sum back to the input.
    pub fn pic0_split(&self, pic_elem: &[Int]) -> Result<(Element, Element), Genus1Error> {
        let reduced = self.pic.reduce(pic_elem.to_vec())?;
        let deg = self.fibre_degree(&reduced)?;
        if !deg.is_zero() {
            return Err(Genus1Error::NonZeroFibreDegree(deg.to_string()));
        }
        let mut fibre = reduced.clone();
        let mut base = self.pic.zero();
        for &i in &self.base_summand {
            base[i] = std::mem::replace(&mut fibre[i], Int::zero());
        }
        Ok((fibre, base))
    }
}

/// An even-shift trivial transform `f_*(- ⊗ L)[n]` with `deg_t(L) = 0` and
/// `n` even, tied to its fibration context.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TrivialTransform {
    ctx: Arc<WeierstrassContext>,
    aut: usize,
    pic: Element,
    shift: Int,
}

impl TrivialTransform {
    pub fn new(
        ctx: Arc<WeierstrassContext>,
        aut_label: &str,
        pic: Element,
        shift: Int,
    ) -> Result<Self, Genus1Error> {
        let aut = ctx.aut().index_of(aut_label)?;
        TrivialTransform::from_parts(ctx, aut, pic, shift)
    }

    pub fn from_parts(
        ctx: Arc<WeierstrassContext>,
        aut: usize,
        pic: Element,
        shift: Int,
    ) -> Result<Self, Genus1Error> {
        if shift.is_odd() {
            return Err(Genus1Error::OddShiftComponent(shift.to_string()));
        }
        let pic = ctx.pic.reduce(pic)?;
        let deg = ctx.fibre_degree(&pic)?;
        if !deg.is_zero() {
            return Err(Genus1Error::NonZeroFibreDegree(deg.to_string()));
        }
        if aut >= ctx.aut().order() {
            return Err(Genus1Error::Group(GroupError::ContextMismatch));
        }
        Ok(TrivialTransform {
            ctx,
            aut,
            pic,
            shift,
        })
    }

    pub fn identity(ctx: Arc<WeierstrassContext>) -> Self {
        TrivialTransform {
            aut: ctx.aut().identity(),
            pic: ctx.pic.zero(),
            shift: Int::zero(),
            ctx,
        }
    }

    pub fn context(&self) -> &Arc<WeierstrassContext> {
        &self.ctx
    }

    pub fn aut_label(&self) -> &str {
        &self.ctx.aut().labels()[self.aut]
    }

    pub fn pic(&self) -> &Element {
        &self.pic
    }

    pub fn shift(&self) -> &Int {
        &self.shift
    }

    pub fn is_identity(&self) -> bool {
        self.aut == self.ctx.aut().identity()
            && self.pic.iter().all(|c| c.is_zero())
            && self.shift.is_zero()
    }

    pub fn inverse(&self) -> Result<TrivialTransform, Genus1Error> {
        let inv = self.ctx.aut.inverse(&SemidirectElement {
            g: self.aut,
            a: self.pic.clone(),
        })?;
        Ok(TrivialTransform {
            ctx: self.ctx.clone(),
            aut: inv.g,
            pic: inv.a,
            shift: -self.shift.clone(),
        })
    }
}

/// `(f1, L1, n1) * (f2, L2, n2) = (f1 f2, f2^*(L1) + L2, n1 + n2)`.
pub fn compose_trivial(
    t1: &TrivialTransform,
    t2: &TrivialTransform,
) -> Result<TrivialTransform, Genus1Error> {
    if t1.ctx != t2.ctx {
        return Err(Genus1Error::ContextMismatch);
    }
    let composed = t1.ctx.aut.compose(
        &SemidirectElement {
            g: t1.aut,
            a: t1.pic.clone(),
        },
        &SemidirectElement {
            g: t2.aut,
            a: t2.pic.clone(),
        },
    )?;
    Ok(TrivialTransform {
        ctx: t1.ctx.clone(),
        aut: composed.g,
        pic: composed.a,
        shift: &t1.shift + &t2.shift,
    })
}
