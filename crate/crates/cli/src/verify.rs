//! The `verify` subcommand: cross-check the constructive algorithms against
//! the brute-force oracles.

use std::collections::HashSet;

use fmgroups::abelian::{factor_u_pp, pp_word_product};
use fmgroups::genus1::{ch_tilde, factor_sl2};
use fmgroups::lattice::{euler_form, KClass};
use fmgroups::mat2::Sl2;
use fmgroups::oracle;
use fmgroups::{Int, SL2Matrix};

pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub cases: usize,
}

/// All determinant-one matrices reachable by generator words of length at
/// most `max_len`, by breadth-first enumeration.
fn reachable(generators: &[Sl2<i64>], max_len: usize) -> Vec<Sl2<i64>> {
    let mut alphabet: Vec<Sl2<i64>> = Vec::new();
    for g in generators {
        alphabet.push(g.clone());
        alphabet.push(g.invert());
    }
    let mut seen: HashSet<(i64, i64, i64, i64)> = HashSet::new();
    let mut frontier = vec![Sl2::<i64>::identity()];
    let mut out = Vec::new();
    let key = |m: &Sl2<i64>| (*m.a(), *m.b(), *m.c(), *m.d());
    seen.insert(key(&frontier[0]));
    out.push(frontier[0].clone());
    for _ in 0..max_len {
        let mut next = Vec::new();
        for m in &frontier {
            for g in &alphabet {
                let p = m.mul(g);
                if seen.insert(key(&p)) {
                    out.push(p.clone());
                    next.push(p);
                }
            }
        }
        frontier = next;
    }
    out
}

fn widen(m: &Sl2<i64>) -> SL2Matrix {
    Sl2::new(
        Int::from(*m.a()),
        Int::from(*m.b()),
        Int::from(*m.c()),
        Int::from(*m.d()),
    )
    .unwrap()
}

/// The Euler form against cohomology dimension counts on line-bundle pairs
/// and the skyscraper pairing.
fn check_euler() -> Check {
    let mut cases = 0;
    let mut pass = true;
    for d1 in -50i64..=50 {
        for d2 in -50i64..=50 {
            let v = KClass::new(Int::from(1), Int::from(d1));
            let w = KClass::new(Int::from(1), Int::from(d2));
            pass &= euler_form(&v, &w) == Int::from(oracle::line_bundle_chi(d1, d2));
            cases += 1;
        }
    }
    let structure = KClass::new(Int::from(1), Int::from(0));
    let point = KClass::new(Int::from(0), Int::from(1));
    pass &= euler_form(&structure, &point) == Int::from(oracle::skyscraper_chi());
    cases += 1;
    Check {
        name: "euler-oracle",
        pass,
        cases,
    }
}

/// The composite elementary word realizing `S = [[0,1],[-1,0]]` squares to
/// `-I` and has order four.
fn check_generator_certificate() -> Check {
    let gens = oracle::genus1_generators();
    let s = gens[1].mul(&gens[0]).mul(&gens[1]);
    let pass = (*s.a(), *s.b(), *s.c(), *s.d()) == (0, 1, -1, 0)
        && s.mul(&s) == Sl2::minus_identity()
        && s.mul(&s).mul(&s).mul(&s).is_identity();
    Check {
        name: "generator-certificate",
        pass,
        cases: 1,
    }
}

/// Both constructive factorizers against the breadth-first word search, on
/// every matrix reachable by a short generator word.
fn check_factor(
    name: &'static str,
    generators: Vec<Sl2<i64>>,
    max_len: usize,
    remultiply: impl Fn(&SL2Matrix) -> SL2Matrix,
) -> Check {
    let mut pass = true;
    let matrices = reachable(&generators, max_len);
    for m in &matrices {
        let wide = widen(m);
        pass &= remultiply(&wide) == wide;
        let witness = match oracle::bfs_factor(m, &generators, max_len) {
            Some(w) => w,
            None => {
                pass = false;
                continue;
            }
        };
        pass &= oracle::word_product(&witness, &generators) == *m;
    }
    Check {
        name,
        pass,
        cases: matrices.len(),
    }
}

pub fn run_all(max_bfs_len: usize) -> Vec<Check> {
    vec![
        check_euler(),
        check_generator_certificate(),
        check_factor(
            "genus1-factor-vs-bfs",
            oracle::genus1_generators(),
            max_bfs_len,
            |m| ch_tilde(&factor_sl2(m)),
        ),
        check_factor(
            "pp-factor-vs-bfs",
            oracle::pp_generators(),
            max_bfs_len,
            |m| pp_word_product(&factor_u_pp(m)),
        ),
    ]
}
