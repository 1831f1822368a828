//! Generators and reference implementations shared by the integration tests.
//! The oracles here are written without the library's algorithms.
#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::{BTreeMap, BTreeSet};

use metric_preserve::classposet::SpaceClass;
use metric_preserve::finspace::{
    validate_ultrametric, DistanceMatrixCandidate, FiniteUltrametricSpace,
};
use metric_preserve::funspec::FunctionSpec;
use metric_preserve::rational::{q, Rational};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn pool6() -> Vec<Rational> {
    vec![q(1, 2), q(1, 1), q(3, 2), q(2, 1), q(3, 1), q(5, 1)]
}

/// Points on a line with gaps `h_i`; `d(i, j) = max(h_i..h_{j-1})` is an
/// ultrametric, and every finite ultrametric arises this way after relabeling.
pub fn random_space<R: Rng>(rng: &mut R, n: usize, pool: &[Rational]) -> FiniteUltrametricSpace {
    let gaps: Vec<Rational> = (1..n).map(|_| pool.choose(rng).unwrap().clone()).collect();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut m = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let d = gaps[i..j].iter().max().unwrap().clone();
            m[perm[i]][perm[j]] = d.clone();
            m[perm[j]][perm[i]] = d;
        }
    }
    validate_ultrametric(DistanceMatrixCandidate::unlabeled(m).unwrap())
        .expect("line construction is ultrametric")
}

pub fn random_class<R: Rng>(
    rng: &mut R,
    max_spaces: usize,
    max_points: usize,
    pool: &[Rational],
) -> SpaceClass {
    let k = rng.gen_range(1..=max_spaces);
    let spaces = (0..k)
        .map(|_| {
            let n = rng.gen_range(1..=max_points);
            random_space(rng, n, pool)
        })
        .collect();
    SpaceClass::new(spaces).unwrap()
}

/// Symmetric, zero diagonal, entries from `pool`; usually not ultrametric.
pub fn random_candidate<R: Rng>(
    rng: &mut R,
    n: usize,
    pool: &[Rational],
) -> DistanceMatrixCandidate {
    let mut m = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let d = pool.choose(rng).unwrap().clone();
            m[i][j] = d.clone();
            m[j][i] = d;
        }
    }
    DistanceMatrixCandidate::unlabeled(m).unwrap()
}

pub fn table<I: IntoIterator<Item = (Rational, Rational)>>(entries: I) -> FunctionSpec {
    FunctionSpec::tabulated(entries).unwrap()
}

/// Random table on `domain` (which contains 0) with values from `values`;
/// `f(0)` is usually 0.
pub fn random_table<R: Rng>(rng: &mut R, domain: &[Rational], values: &[Rational]) -> FunctionSpec {
    let entries = domain.iter().map(|x| {
        let v = if x.is_zero() && rng.gen_bool(0.9) {
            Rational::zero()
        } else {
            values.choose(rng).unwrap().clone()
        };
        (x.clone(), v)
    });
    table(entries)
}

pub fn distances(s: &FiniteUltrametricSpace) -> BTreeSet<Rational> {
    s.matrix().iter().flatten().cloned().collect()
}

/// Strong triangle inequality over all ordered triples, plus zero exactly on
/// the diagonal.
pub fn is_ultrametric_matrix(m: &[Vec<Rational>]) -> bool {
    let n = m.len();
    for i in 0..n {
        for j in 0..n {
            if (i == j) != m[i][j].is_zero() {
                return false;
            }
            for k in 0..n {
                let bound = if m[i][k] > m[k][j] {
                    &m[i][k]
                } else {
                    &m[k][j]
                };
                if m[i][j] > *bound {
                    return false;
                }
            }
        }
    }
    true
}

/// "`f ∘ d` is an ultrametric on every space", computed by direct evaluation.
pub fn preserves_each_space(f: &FunctionSpec, u: &SpaceClass) -> bool {
    u.spaces().iter().all(|s| {
        let image: Vec<Vec<Rational>> = s
            .matrix()
            .iter()
            .map(|row| row.iter().map(|x| f.eval(x).unwrap()).collect())
            .collect();
        is_ultrametric_matrix(&image)
    })
}

/// The class order by naive fixpoint iteration: start from base/leg pairs and
/// the diagonal, compose until nothing changes.
pub fn naive_order(u: &SpaceClass) -> BTreeSet<(Rational, Rational)> {
    let mut rel = BTreeSet::new();
    for s in u.spaces() {
        let n = s.len();
        for x1 in 0..n {
            rel.insert((s.dist(x1, x1).clone(), s.dist(x1, x1).clone()));
            for x2 in 0..n {
                for x3 in 0..n {
                    if s.dist(x1, x2) == s.dist(x2, x3) {
                        rel.insert((s.dist(x1, x3).clone(), s.dist(x1, x2).clone()));
                    }
                }
            }
        }
    }
    let ground: BTreeSet<Rational> = u.spaces().iter().flat_map(distances).collect();
    for t in &ground {
        rel.insert((t.clone(), t.clone()));
    }
    loop {
        let extra: Vec<(Rational, Rational)> = rel
            .iter()
            .flat_map(|(a, b)| {
                rel.iter()
                    .filter(move |(c, _)| c == b)
                    .map(move |(_, d)| (a.clone(), d.clone()))
            })
            .filter(|p| !rel.contains(p))
            .collect();
        if extra.is_empty() {
            return rel;
        }
        rel.extend(extra);
    }
}

/// Amenable on the range and isotone for the naive class order.
pub fn isotone_on_order(f: &FunctionSpec, u: &SpaceClass) -> bool {
    let order = naive_order(u);
    let value: BTreeMap<Rational, Rational> = order
        .iter()
        .flat_map(|(a, b)| [a.clone(), b.clone()])
        .map(|x| {
            let v = f.eval(&x).unwrap();
            (x, v)
        })
        .collect();
    let amenable = f.eval(&Rational::zero()).unwrap().is_zero()
        && value.iter().all(|(x, v)| x.is_zero() || v.is_positive());
    amenable && order.iter().all(|(s, t)| value[s] <= value[t])
}

/// Rank over Q by ordinary Gaussian elimination with rational pivots.
pub fn rational_rank(mut m: Vec<Vec<Rational>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let pivot = m[rank][c].clone();
        for r in 0..rows {
            if r != rank && !m[r][c].is_zero() {
                let factor = &m[r][c] / &pivot;
                for k in c..cols {
                    let sub = &factor * &m[rank][k];
                    m[r][k] = &m[r][k] - &sub;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Gram matrix `<x_i - x_0, x_j - x_0>` from squared distances.
pub fn gram_matrix(s: &FiniteUltrametricSpace) -> Vec<Vec<Rational>> {
    let n = s.len();
    let sq = |i: usize, j: usize| s.dist(i, j) * s.dist(i, j);
    (1..n)
        .map(|i| {
            (1..n)
                .map(|j| (sq(0, i) + sq(0, j) - sq(i, j)) / q(2, 1))
                .collect()
        })
        .collect()
}
