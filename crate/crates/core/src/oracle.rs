//! Independent brute-force verifiers.
//!
//! Nothing here goes through the lattice formula or the constructive
//! factorizers; these routines exist so that the main modules can be checked
//! against first principles before being trusted.
//!
//! This is the only module that uses machine-width integers: entries of the
//! matrices reachable by words of length at most 12 in any of the generator
//! sets used by the library stay far below `i64::MAX`.

use std::collections::HashMap;
use std::collections::VecDeque;

use crate::mat2::Sl2;

/// Euler characteristic of a pair of line bundles of degrees `d1`, `d2` on a
/// genus-one curve, computed by cohomology dimension counts:
/// `h0 = max(d, 0)`, `h1 = max(-d, 0)` for the degree `d = d2 - d1` when
/// `d != 0`, and `h0 = h1` when `d = 0`.
pub fn line_bundle_chi(d1: i64, d2: i64) -> i64 {
    let d = d2 - d1;
    let h0 = d.max(0);
    let h1 = (-d).max(0);
    h0 - h1
}

/// `chi(O_C, O_x) = dim Hom(O_C, O_x) = 1`: the hom space to a skyscraper
/// from a locally free sheaf is one-dimensional and there are no higher exts.
pub fn skyscraper_chi() -> i64 {
    1
}

/// One letter of a word over a generator set and its inverses.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Letter {
    /// Index into the generator list.
    pub gen: usize,
    pub inverse: bool,
}

/// Breadth-first search for a minimal-length word in the generators (and
/// their inverses) whose product is `target`. Ties between words of the same
/// length are broken lexicographically by the alphabet order
/// `g0, g0^-1, g1, g1^-1, ...`. Returns `None` if no word of length at most
/// `max_len` exists.
///
/// Panics if `max_len > 12`: the visited-set hashing assumes the bounded
/// entry growth of short words.
pub fn bfs_factor(
    target: &Sl2<i64>,
    generators: &[Sl2<i64>],
    max_len: usize,
) -> Option<Vec<Letter>> {
    assert!(max_len <= 12, "bfs_factor is restricted to max_len <= 12");

    let mut alphabet: Vec<(Letter, Sl2<i64>)> = Vec::with_capacity(2 * generators.len());
    for (i, g) in generators.iter().enumerate() {
        alphabet.push((
            Letter {
                gen: i,
                inverse: false,
            },
            g.clone(),
        ));
        alphabet.push((
            Letter {
                gen: i,
                inverse: true,
            },
            g.invert(),
        ));
    }

    let key = |m: &Sl2<i64>| (*m.a(), *m.b(), *m.c(), *m.d());

    let mut visited: HashMap<(i64, i64, i64, i64), ()> = HashMap::new();
    let mut queue: VecDeque<(Sl2<i64>, Vec<Letter>)> = VecDeque::new();
    let identity = Sl2::identity();
    visited.insert(key(&identity), ());
    queue.push_back((identity, Vec::new()));

    while let Some((m, word)) = queue.pop_front() {
        if m == *target {
            return Some(word);
        }
        if word.len() == max_len {
            continue;
        }
        for (letter, g) in &alphabet {
            let next = m.mul(g);
            if visited.contains_key(&key(&next)) {
                continue;
            }
            visited.insert(key(&next), ());
            let mut w = word.clone();
            w.push(*letter);
            queue.push_back((next, w));
        }
    }
    None
}

/// Remultiply a word returned by [`bfs_factor`].
pub fn word_product(word: &[Letter], generators: &[Sl2<i64>]) -> Sl2<i64> {
    let mut m = Sl2::identity();
    for letter in word {
        let g = &generators[letter.gen];
        let g = if letter.inverse { g.invert() } else { g.clone() };
        m = m.mul(&g);
    }
    m
}

/// The two elementary generator matrices `A = [[-1,1],[0,-1]]` and
/// `B = [[1,0],[1,1]]` over machine integers, in that order.
pub fn genus1_generators() -> Vec<Sl2<i64>> {
    vec![
        Sl2::new(-1, 1, 0, -1).unwrap(),
        Sl2::new(1, 0, 1, 1).unwrap(),
    ]
}

/// The principally polarized generator matrices `P = [[0,-1],[1,0]]` and
/// `Q = [[1,0],[1,1]]`, in that order.
pub fn pp_generators() -> Vec<Sl2<i64>> {
    vec![Sl2::new(0, -1, 1, 0).unwrap(), Sl2::new(1, 0, 1, 1).unwrap()]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi_examples() {
        assert_eq!(line_bundle_chi(0, 0), 0);
        assert_eq!(line_bundle_chi(0, 3), 3);
        assert_eq!(line_bundle_chi(5, 2), -3);
        assert_eq!(skyscraper_chi(), 1);
    }

    #[test]
    fn chi_antisymmetry() {
        for d1 in -20..=20 {
            for d2 in -20..=20 {
                assert_eq!(line_bundle_chi(d1, d2), -line_bundle_chi(d2, d1));
            }
        }
    }

    #[test]
    fn bfs_identity_is_empty() {
        let gens = genus1_generators();
        let w = bfs_factor(&Sl2::identity(), &gens, 0).unwrap();
        assert!(w.is_empty());
    }

    #[test]
    fn bfs_finds_bab() {
        let gens = genus1_generators();
        let s = Sl2::new(0, 1, -1, 0).unwrap();
        let w = bfs_factor(&s, &gens, 3).unwrap();
        assert_eq!(w.len(), 3);
        assert_eq!(word_product(&w, &gens), s);
    }

    #[test]
    fn bfs_not_found_within_bound() {
        let gens = genus1_generators();
        let m = Sl2::new(1, 0, 7, 1).unwrap();
        assert_eq!(bfs_factor(&m, &gens, 5), None);
        let w = bfs_factor(&m, &gens, 7).unwrap();
        assert_eq!(word_product(&w, &gens), m);
    }

    #[test]
    fn bfs_words_remultiply() {
        let gens = pp_generators();
        for a in -2i64..=2 {
            for b in -2i64..=2 {
                for c in -2i64..=2 {
                    for d in -2i64..=2 {
                        if a * d - b * c != 1 {
                            continue;
                        }
                        let m = Sl2::new(a, b, c, d).unwrap();
                        if let Some(w) = bfs_factor(&m, &gens, 6) {
                            assert_eq!(word_product(&w, &gens), m);
                        }
                    }
                }
            }
        }
    }
}
