//! Finitely generated abelian groups, homomorphisms and semidirect products.
//!
//! These are the carriers for Picard groups, section groups and the trivial
//! transform subgroups. Elements are integer vectors; torsion coordinates
//! are kept reduced into `[0, order)`.

use num_integer::Integer as _;
use num_traits::Zero;
use thiserror::Error;

use crate::Int;

#[derive(Error, Clone, PartialEq, Eq, Debug)]
pub enum GroupError {
    #[error("element has {got} coordinates, group needs {want}")]
    ShapeMismatch { want: usize, got: usize },
    #[error("torsion order {0} is smaller than 2")]
    BadTorsionOrder(String),
    #[error("homomorphism does not respect torsion: column {col} has infinite order image")]
    TorsionViolation { col: usize },
    #[error("finite group table is not a group: {0}")]
    BadTable(String),
    #[error("unknown group label {0}")]
    UnknownLabel(String),
    #[error("action is not a homomorphism into automorphisms: {0}")]
    InvalidAction(String),
    #[error("elements belong to different group contexts")]
    ContextMismatch,
}

/// An element is a plain coordinate vector; all structure lives in the group.
pub type Element = Vec<Int>;

/// A finitely generated abelian group `Z^r ⊕ Z/n_1 ⊕ ... ⊕ Z/n_k`.
/// Free coordinates come first, torsion coordinates follow in order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FGAbelian {
    free_rank: usize,
    torsion_orders: Vec<Int>,
}

impl FGAbelian {
    pub fn new(free_rank: usize, torsion_orders: Vec<Int>) -> Result<Self, GroupError> {
        for t in &torsion_orders {
            if *t < Int::from(2) {
                return Err(GroupError::BadTorsionOrder(t.to_string()));
            }
        }
        Ok(FGAbelian {
            free_rank,
            torsion_orders,
        })
    }

    pub fn free(rank: usize) -> Self {
        FGAbelian {
            free_rank: rank,
            torsion_orders: Vec::new(),
        }
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion_orders(&self) -> &[Int] {
        &self.torsion_orders
    }

    /// Number of coordinates of an element vector.
    pub fn len(&self) -> usize {
        self.free_rank + self.torsion_orders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn zero(&self) -> Element {
        vec![Int::zero(); self.len()]
    }

    fn check_shape(&self, x: &[Int]) -> Result<(), GroupError> {
        if x.len() != self.len() {
            return Err(GroupError::ShapeMismatch {
                want: self.len(),
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Reduce torsion coordinates into `[0, order)`.
    pub fn reduce(&self, mut x: Element) -> Result<Element, GroupError> {
        self.check_shape(&x)?;
        for (i, order) in self.torsion_orders.iter().enumerate() {
            let coord = &mut x[self.free_rank + i];
            *coord = coord.mod_floor(order);
        }
        Ok(x)
    }

    /// Componentwise sum with torsion reduction.
    pub fn add(&self, x: &[Int], y: &[Int]) -> Result<Element, GroupError> {
        self.check_shape(x)?;
        self.check_shape(y)?;
        let sum: Element = x.iter().zip(y).map(|(a, b)| a + b).collect();
        self.reduce(sum)
    }

    pub fn neg(&self, x: &[Int]) -> Result<Element, GroupError> {
        self.check_shape(x)?;
        self.reduce(x.iter().map(|a| -a).collect())
    }

    pub fn is_zero_elem(&self, x: &[Int]) -> Result<bool, GroupError> {
        let r = self.reduce(x.to_vec())?;
        Ok(r.iter().all(|c| c.is_zero()))
    }
}

/// A homomorphism between finitely generated abelian groups, given by an
/// integer matrix with `target.len()` rows and `source.len()` columns.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GroupHom {
    source: FGAbelian,
    target: FGAbelian,
    matrix: Vec<Vec<Int>>,
}

impl GroupHom {
    pub fn new(
        source: FGAbelian,
        target: FGAbelian,
        matrix: Vec<Vec<Int>>,
    ) -> Result<Self, GroupError> {
        if matrix.len() != target.len() {
            return Err(GroupError::ShapeMismatch {
                want: target.len(),
                got: matrix.len(),
            });
        }
        for row in &matrix {
            if row.len() != source.len() {
                return Err(GroupError::ShapeMismatch {
                    want: source.len(),
                    got: row.len(),
                });
            }
        }
        let hom = GroupHom {
            source,
            target,
            matrix,
        };
        // image of a torsion generator of order n must be killed by n
        for j in 0..hom.source.torsion_orders.len() {
            let col = hom.source.free_rank + j;
            let order = hom.source.torsion_orders[j].clone();
            let image: Element = hom.matrix.iter().map(|row| &row[col] * &order).collect();
            if !hom.target.is_zero_elem(&image)? {
                return Err(GroupError::TorsionViolation { col });
            }
        }
        Ok(hom)
    }

    pub fn identity(group: FGAbelian) -> Self {
        let n = group.len();
        let matrix = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { Int::from(1) } else { Int::zero() })
                    .collect()
            })
            .collect();
        GroupHom {
            source: group.clone(),
            target: group,
            matrix,
        }
    }

    pub fn source(&self) -> &FGAbelian {
        &self.source
    }

    pub fn target(&self) -> &FGAbelian {
        &self.target
    }

    pub fn matrix(&self) -> &[Vec<Int>] {
        &self.matrix
    }

    /// Matrix-vector product followed by torsion reduction in the target.
    pub fn apply(&self, x: &[Int]) -> Result<Element, GroupError> {
        self.source.check_shape(x)?;
        let image: Element = self
            .matrix
            .iter()
            .map(|row| row.iter().zip(x).map(|(m, c)| m * c).sum())
            .collect();
        self.target.reduce(image)
    }

    /// `self ∘ rhs`.
    pub fn compose(&self, rhs: &GroupHom) -> Result<GroupHom, GroupError> {
        if rhs.target != self.source {
            return Err(GroupError::ContextMismatch);
        }
        let rows = self.target.len();
        let mid = self.source.len();
        let cols = rhs.source.len();
        let mut matrix = vec![vec![Int::zero(); cols]; rows];
        for (i, row) in matrix.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = (0..mid).map(|k| &self.matrix[i][k] * &rhs.matrix[k][j]).sum();
            }
        }
        GroupHom::new(rhs.source.clone(), self.target.clone(), matrix)
    }

    /// Equality as maps: matrices may differ by torsion, so compare the
    /// images of the standard generators.
    pub fn eq_as_map(&self, other: &GroupHom) -> bool {
        if self.source != other.source || self.target != other.target {
            return false;
        }
        for j in 0..self.source.len() {
            let mut e = self.source.zero();
            e[j] = Int::from(1);
            if self.apply(&e) != other.apply(&e) {
                return false;
            }
        }
        true
    }
}

/// A finite group presented by its full multiplication table.
/// `table[i][j]` is the index of `labels[i] * labels[j]`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FiniteGroup {
    labels: Vec<String>,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
}

impl FiniteGroup {
    pub fn new(labels: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        let n = labels.len();
        if n == 0 {
            return Err(GroupError::BadTable("empty label set".into()));
        }
        if table.len() != n || table.iter().any(|row| row.len() != n) {
            return Err(GroupError::BadTable("table is not square".into()));
        }
        if table.iter().flatten().any(|&e| e >= n) {
            return Err(GroupError::BadTable("index out of range".into()));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g))
            .ok_or_else(|| GroupError::BadTable("no identity element".into()))?;
        let mut inverses = vec![usize::MAX; n];
        for (g, inv) in inverses.iter_mut().enumerate() {
            *inv = (0..n)
                .find(|&h| table[g][h] == identity && table[h][g] == identity)
                .ok_or_else(|| GroupError::BadTable(format!("{} has no inverse", labels[g])))?;
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(GroupError::BadTable("table is not associative".into()));
                    }
                }
            }
        }
        Ok(FiniteGroup {
            labels,
            table,
            identity,
            inverses,
        })
    }

    pub fn trivial() -> Self {
        FiniteGroup::new(vec!["id".into()], vec![vec![0]]).unwrap()
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.table[g][h]
    }

    pub fn inverse(&self, g: usize) -> usize {
        self.inverses[g]
    }

    pub fn index_of(&self, label: &str) -> Result<usize, GroupError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| GroupError::UnknownLabel(label.to_string()))
    }
}

/// An element `(g, a)` of a semidirect product `G ⋉ A`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SemidirectElement {
    pub g: usize,
    pub a: Element,
}

/// The data of a semidirect product: a finite group acting on a finitely
/// generated abelian group through endomorphism matrices, one per label.
///
/// The composition law is `(g, a) * (g', a') = (g g', act(g')(a) + a')`,
/// matching the pullback convention for trivial transforms.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SemidirectContext {
    finite: FiniteGroup,
    module: FGAbelian,
    action: Vec<GroupHom>,
}

impl SemidirectContext {
    pub fn new(
        finite: FiniteGroup,
        module: FGAbelian,
        action: Vec<GroupHom>,
    ) -> Result<Self, GroupError> {
        if action.len() != finite.order() {
            return Err(GroupError::InvalidAction(format!(
                "{} action matrices for {} labels",
                action.len(),
                finite.order()
            )));
        }
        for hom in &action {
            if *hom.source() != module || *hom.target() != module {
                return Err(GroupError::InvalidAction(
                    "action endomorphism has wrong shape".into(),
                ));
            }
        }
        let ctx = SemidirectContext {
            finite,
            module,
            action,
        };
        if !ctx.action[ctx.finite.identity()].eq_as_map(&GroupHom::identity(ctx.module.clone())) {
            return Err(GroupError::InvalidAction(
                "identity label does not act as the identity".into(),
            ));
        }
        for g in 0..ctx.finite.order() {
            for h in 0..ctx.finite.order() {
                let gh = ctx.finite.mul(g, h);
                let composed = ctx.action[g].compose(&ctx.action[h])?;
                if !composed.eq_as_map(&ctx.action[gh]) {
                    return Err(GroupError::InvalidAction(format!(
                        "act({}) ∘ act({}) differs from act({})",
                        ctx.finite.labels()[g],
                        ctx.finite.labels()[h],
                        ctx.finite.labels()[gh]
                    )));
                }
            }
        }
        Ok(ctx)
    }

    pub fn finite(&self) -> &FiniteGroup {
        &self.finite
    }

    pub fn module(&self) -> &FGAbelian {
        &self.module
    }

    pub fn act(&self, g: usize, a: &[Int]) -> Result<Element, GroupError> {
        self.action[g].apply(a)
    }

    pub fn identity_element(&self) -> SemidirectElement {
        SemidirectElement {
            g: self.finite.identity(),
            a: self.module.zero(),
        }
    }

    /// `(g1, a1) * (g2, a2) = (g1 g2, act(g2)(a1) + a2)`.
    pub fn compose(
        &self,
        e1: &SemidirectElement,
        e2: &SemidirectElement,
    ) -> Result<SemidirectElement, GroupError> {
        if e1.g >= self.finite.order() || e2.g >= self.finite.order() {
            return Err(GroupError::ContextMismatch);
        }
        let moved = self.act(e2.g, &e1.a)?;
        Ok(SemidirectElement {
            g: self.finite.mul(e1.g, e2.g),
            a: self.module.add(&moved, &e2.a)?,
        })
    }

    /// `(g, a)^-1 = (g^-1, -act(g^-1)(a))`.
    pub fn inverse(&self, e: &SemidirectElement) -> Result<SemidirectElement, GroupError> {
        let ginv = self.finite.inverse(e.g);
        let moved = self.act(ginv, &e.a)?;
        Ok(SemidirectElement {
            g: ginv,
            a: self.module.neg(&moved)?,
        })
    }
}

/// Build the full relative transform group of a Fano or anti-Fano fibration:
/// `Aut(X/T) ⋉ (Pic(X) ⊕ Z)`, where the trailing free coordinate is the
/// shift and carries the trivial action.
pub fn fano_group(
    aut: FiniteGroup,
    pic: FGAbelian,
    pic_action: Vec<GroupHom>,
) -> Result<SemidirectContext, GroupError> {
    let module = FGAbelian::new(pic.free_rank() + 1, pic.torsion_orders().to_vec())?;
    if pic_action.len() != aut.order() {
        return Err(GroupError::InvalidAction(format!(
            "{} action matrices for {} labels",
            pic_action.len(),
            aut.order()
        )));
    }
    let mut extended = Vec::with_capacity(pic_action.len());
    for hom in &pic_action {
        if *hom.source() != pic || *hom.target() != pic {
            return Err(GroupError::InvalidAction(
                "Pic action endomorphism has wrong shape".into(),
            ));
        }
        // insert the shift row and column after the Pic free block
        let n = pic.len();
        let shift_pos = pic.free_rank();
        let mut matrix = vec![vec![Int::zero(); n + 1]; n + 1];
        for i in 0..n {
            let ti = if i < shift_pos { i } else { i + 1 };
            for j in 0..n {
                let tj = if j < shift_pos { j } else { j + 1 };
                matrix[ti][tj] = hom.matrix()[i][j].clone();
            }
        }
        matrix[shift_pos][shift_pos] = Int::from(1);
        extended.push(GroupHom::new(module.clone(), module.clone(), matrix)?);
    }
    SemidirectContext::new(aut, module, extended)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Element {
        v.iter().map(|&x| Int::from(x)).collect()
    }

    #[test]
    fn add_examples() {
        let z2 = FGAbelian::free(2);
        assert_eq!(z2.add(&ints(&[1, 2]), &ints(&[3, 4])).unwrap(), ints(&[4, 6]));

        let z3 = FGAbelian::new(0, vec![Int::from(3)]).unwrap();
        assert_eq!(z3.add(&ints(&[2]), &ints(&[2])).unwrap(), ints(&[1]));

        let mixed = FGAbelian::new(1, vec![Int::from(4)]).unwrap();
        assert_eq!(
            mixed.add(&ints(&[5, 3]), &ints(&[-5, 2])).unwrap(),
            ints(&[0, 1])
        );
    }

    #[test]
    fn shape_mismatch() {
        let z2 = FGAbelian::free(2);
        assert!(matches!(
            z2.add(&ints(&[1]), &ints(&[1, 2])),
            Err(GroupError::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn hom_apply_examples() {
        let z3 = FGAbelian::free(3);
        let z1 = FGAbelian::free(1);
        let id = GroupHom::identity(z3.clone());
        assert_eq!(id.apply(&ints(&[2, -2, 7])).unwrap(), ints(&[2, -2, 7]));

        let deg = GroupHom::new(z3.clone(), z1.clone(), vec![ints(&[1, 1, 0])]).unwrap();
        assert_eq!(deg.apply(&ints(&[2, -2, 7])).unwrap(), ints(&[0]));

        let zero = GroupHom::new(z3, z1, vec![ints(&[0, 0, 0])]).unwrap();
        assert_eq!(zero.apply(&ints(&[9, 9, 9])).unwrap(), ints(&[0]));
    }

    #[test]
    fn hom_torsion_respect() {
        let z2tor = FGAbelian::new(0, vec![Int::from(2)]).unwrap();
        let z = FGAbelian::free(1);
        // Z/2 -> Z can only be zero
        assert!(matches!(
            GroupHom::new(z2tor.clone(), z.clone(), vec![ints(&[1])]),
            Err(GroupError::TorsionViolation { .. })
        ));
        assert!(GroupHom::new(z2tor.clone(), z, vec![ints(&[0])]).is_ok());
        // Z/2 -> Z/4 must land in the order-2 subgroup
        let z4 = FGAbelian::new(0, vec![Int::from(4)]).unwrap();
        assert!(GroupHom::new(z2tor.clone(), z4.clone(), vec![ints(&[2])]).is_ok());
        assert!(matches!(
            GroupHom::new(z2tor, z4, vec![ints(&[1])]),
            Err(GroupError::TorsionViolation { .. })
        ));
    }

    #[test]
    fn hom_additivity() {
        let src = FGAbelian::new(1, vec![Int::from(6)]).unwrap();
        let tgt = FGAbelian::new(1, vec![Int::from(3)]).unwrap();
        let h = GroupHom::new(src.clone(), tgt.clone(), vec![ints(&[2, 0]), ints(&[1, 2])]).unwrap();
        for x in [ints(&[3, 5]), ints(&[-4, 2])] {
            for y in [ints(&[1, 1]), ints(&[7, -3])] {
                let lhs = h.apply(&src.add(&x, &y).unwrap()).unwrap();
                let rhs = tgt
                    .add(&h.apply(&x).unwrap(), &h.apply(&y).unwrap())
                    .unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    fn c2_negation_context() -> SemidirectContext {
        let c2 = FiniteGroup::new(
            vec!["e".into(), "s".into()],
            vec![vec![0, 1], vec![1, 0]],
        )
        .unwrap();
        let z = FGAbelian::free(1);
        let id = GroupHom::identity(z.clone());
        let negate = GroupHom::new(z.clone(), z.clone(), vec![ints(&[-1])]).unwrap();
        SemidirectContext::new(c2, z, vec![id, negate]).unwrap()
    }

    #[test]
    fn semidirect_examples() {
        let ctx = c2_negation_context();
        let x = SemidirectElement {
            g: 1,
            a: ints(&[1]),
        };
        let id = ctx.identity_element();
        assert_eq!(ctx.compose(&id, &x).unwrap(), x);
        assert_eq!(ctx.compose(&x, &id).unwrap(), x);
        // (s, 1) * (s, 1) = (e, act(s)(1) + 1) = (e, 0)
        let sq = ctx.compose(&x, &x).unwrap();
        assert_eq!(sq, ctx.identity_element());
    }

    #[test]
    fn semidirect_group_laws() {
        let ctx = c2_negation_context();
        let elems: Vec<SemidirectElement> = (0..2)
            .flat_map(|g| (-3i64..=3).map(move |a| SemidirectElement { g, a: ints(&[a]) }))
            .collect();
        for e1 in &elems {
            let inv = ctx.inverse(e1).unwrap();
            assert_eq!(ctx.compose(e1, &inv).unwrap(), ctx.identity_element());
            assert_eq!(ctx.compose(&inv, e1).unwrap(), ctx.identity_element());
            for e2 in &elems {
                for e3 in &elems {
                    let l = ctx.compose(&ctx.compose(e1, e2).unwrap(), e3).unwrap();
                    let r = ctx.compose(e1, &ctx.compose(e2, e3).unwrap()).unwrap();
                    assert_eq!(l, r);
                }
            }
        }
    }

    #[test]
    fn invalid_action_rejected() {
        let c2 = FiniteGroup::new(
            vec!["e".into(), "s".into()],
            vec![vec![0, 1], vec![1, 0]],
        )
        .unwrap();
        let z = FGAbelian::free(1);
        let id = GroupHom::identity(z.clone());
        // doubling is not an involution, so act(s)^2 != act(e)
        let double = GroupHom::new(z.clone(), z.clone(), vec![ints(&[2])]).unwrap();
        assert!(matches!(
            SemidirectContext::new(c2, z, vec![id, double]),
            Err(GroupError::InvalidAction(_))
        ));
    }

    #[test]
    fn fano_trivial_aut_is_direct_sum() {
        let ctx = fano_group(
            FiniteGroup::trivial(),
            FGAbelian::free(1),
            vec![GroupHom::identity(FGAbelian::free(1))],
        )
        .unwrap();
        // (e, (0, 2)) * (e, (0, 3)) = (e, (0, 5)); coordinate 1 is the shift
        let e1 = SemidirectElement { g: 0, a: ints(&[0, 2]) };
        let e2 = SemidirectElement { g: 0, a: ints(&[0, 3]) };
        assert_eq!(
            ctx.compose(&e1, &e2).unwrap(),
            SemidirectElement { g: 0, a: ints(&[0, 5]) }
        );
        // with trivial Aut the composition is plain addition
        let e3 = SemidirectElement { g: 0, a: ints(&[4, -1]) };
        assert_eq!(
            ctx.compose(&e1, &e3).unwrap().a,
            ctx.module().add(&e1.a, &e3.a).unwrap()
        );
    }

    #[test]
    fn fano_swap_action() {
        // Aut = Z/2 swapping the first two Pic generators of Pic = Z^3
        let c2 = FiniteGroup::new(
            vec!["e".into(), "s".into()],
            vec![vec![0, 1], vec![1, 0]],
        )
        .unwrap();
        let pic = FGAbelian::free(3);
        let id = GroupHom::identity(pic.clone());
        let swap = GroupHom::new(
            pic.clone(),
            pic.clone(),
            vec![ints(&[0, 1, 0]), ints(&[1, 0, 0]), ints(&[0, 0, 1])],
        )
        .unwrap();
        let ctx = fano_group(c2, pic, vec![id, swap]).unwrap();
        // module layout: three Pic coordinates, then the shift
        let e1 = SemidirectElement { g: 1, a: ints(&[1, 0, 0, 0]) };
        let e2 = SemidirectElement { g: 1, a: ints(&[0, 0, 0, 0]) };
        assert_eq!(
            ctx.compose(&e1, &e2).unwrap(),
            SemidirectElement { g: 0, a: ints(&[0, 1, 0, 0]) }
        );
    }
}
