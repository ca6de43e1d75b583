//! Exact arithmetic in the groups of relative Fourier-Mukai transforms.
//!
//! The library computes with the discrete invariants of relative
//! Fourier-Mukai transforms of three families of fibrations:
//!
//! * genus-one (Weierstrass) fibrations: the `SL(2,Z)`-valued invariant of a
//!   transform, its constructive factorization into the two elementary
//!   transforms, WIT-index prediction, and the trivial subgroup
//!   `Aut(X/T) ⋊ (2Z × Pic^0(X))` ([`genus1`]);
//! * abelian schemes: the dagger involution and isometry calculus on 2x2
//!   isomorphism matrices, the principally polarized `U ≅ SL(2,Z)`
//!   identification with constructive preimages, the rational `ξ` slope
//!   datum, `U₀` factorization, and the trivial kernel
//!   `Z ⊕ (X(T) × X̂(T) × Pic(T))` ([`abelian`]);
//! * Fano and anti-Fano fibrations: the full transform group
//!   `Aut(X/T) ⋉ (Pic(X) ⊕ Z)` ([`groups::fano_group`]).
//!
//! All arithmetic is exact: matrix entries are unbounded integers and the
//! slope data are exact rationals. The core matrix types are generic over the
//! scalar via [`scalar::Scalar`]; the aliases below fix the arbitrary
//! precision instantiations used everywhere outside the brute-force
//! [`oracle`].

pub mod abelian;
pub mod genus1;
pub mod groups;
pub mod lattice;
pub mod mat2;
pub mod oracle;
pub mod scalar;

/// Unbounded exact integer.
pub type Int = num_bigint::BigInt;
/// Exact rational, always kept in lowest terms.
pub type Rat = num_rational::Ratio<Int>;

/// A K-theory class of a genus-one fibre with unbounded entries.
pub type KClass = lattice::KClass<Int>;
/// A determinant-one integer 2x2 matrix with unbounded entries.
pub type SL2Matrix = mat2::Sl2<Int>;
/// A plain 2x2 matrix with unbounded entries.
pub type Mat2Int = mat2::Mat2<Int>;
