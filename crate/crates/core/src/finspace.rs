//! Finite ultrametric spaces as exact distance matrices.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::funspec::{EvalError, FunctionSpec};
use crate::rational::Rational;

/// Isometry search enumerates permutations, so it is capped here.
pub const MAX_ISOMETRY_POINTS: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpaceError {
    #[error("a space needs at least one point")]
    Empty,
    #[error("duplicate point label `{0}`")]
    DuplicateLabel(String),
    #[error("distance matrix is not {0}x{0}")]
    NotSquare(usize),
    #[error("d[{i}][{j}] != d[{j}][{i}]")]
    Asymmetric { i: usize, j: usize },
    #[error("d[{0}][{0}] is not zero")]
    NonzeroDiagonal(usize),
    #[error("negative distance d[{i}][{j}]")]
    NegativeEntry { i: usize, j: usize },
    #[error("spaces have {0} and {1} points")]
    SizeMismatch(usize, usize),
    #[error("isometry search is limited to {MAX_ISOMETRY_POINTS} points, got {0}")]
    TooLarge(usize),
    #[error("internal error: embedding dimension {expected} but Gram rank {rank}")]
    EmbeddingMismatch { expected: usize, rank: usize },
}

/// Why a symmetric nonnegative matrix is not an ultrametric.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Error)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UltrametricViolation {
    #[error("d({i},{i}) = {value} is not zero")]
    NonzeroDiagonal { i: usize, value: Rational },
    #[error("distinct points {i} and {j} are at distance 0")]
    ZeroDistance { i: usize, j: usize },
    #[error("d({i},{j}) exceeds max(d({i},{k}), d({k},{j}))")]
    StrongTriangle { i: usize, j: usize, k: usize },
}

#[derive(Serialize, Deserialize)]
struct SpaceJson {
    points: Vec<String>,
    d: Vec<Vec<Rational>>,
}

/// Symmetric nonnegative matrix with labels; not yet known to be ultrametric.
///
/// Candidates built by [`DistanceMatrixCandidate::new`] have a zero diagonal.
/// Images under [`apply_fn`] can have a nonzero diagonal when `f(0) != 0`;
/// validation reports that as a violation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SpaceJson", into = "SpaceJson")]
pub struct DistanceMatrixCandidate {
    labels: Vec<String>,
    dist: Vec<Vec<Rational>>,
}

impl TryFrom<SpaceJson> for DistanceMatrixCandidate {
    type Error = SpaceError;
    fn try_from(raw: SpaceJson) -> Result<Self, SpaceError> {
        DistanceMatrixCandidate::new(raw.points, raw.d)
    }
}

impl From<DistanceMatrixCandidate> for SpaceJson {
    fn from(c: DistanceMatrixCandidate) -> Self {
        SpaceJson {
            points: c.labels,
            d: c.dist,
        }
    }
}

impl DistanceMatrixCandidate {
    pub fn new(labels: Vec<String>, dist: Vec<Vec<Rational>>) -> Result<Self, SpaceError> {
        let c = Self::structural(labels, dist)?;
        if let Some(i) = (0..c.len()).find(|&i| !c.dist[i][i].is_zero()) {
            return Err(SpaceError::NonzeroDiagonal(i));
        }
        Ok(c)
    }

    /// Points named `x1, x2, ...`.
    pub fn unlabeled(dist: Vec<Vec<Rational>>) -> Result<Self, SpaceError> {
        let labels = (1..=dist.len()).map(|i| format!("x{i}")).collect();
        Self::new(labels, dist)
    }

    fn structural(labels: Vec<String>, dist: Vec<Vec<Rational>>) -> Result<Self, SpaceError> {
        let n = labels.len();
        if n == 0 {
            return Err(SpaceError::Empty);
        }
        let mut seen = BTreeSet::new();
        for l in &labels {
            if !seen.insert(l) {
                return Err(SpaceError::DuplicateLabel(l.clone()));
            }
        }
        if dist.len() != n || dist.iter().any(|row| row.len() != n) {
            return Err(SpaceError::NotSquare(n));
        }
        for i in 0..n {
            for j in 0..n {
                if dist[i][j].is_negative() {
                    return Err(SpaceError::NegativeEntry { i, j });
                }
                if dist[i][j] != dist[j][i] {
                    return Err(SpaceError::Asymmetric { i, j });
                }
            }
        }
        Ok(DistanceMatrixCandidate { labels, dist })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dist(&self, i: usize, j: usize) -> &Rational {
        &self.dist[i][j]
    }

    pub fn matrix(&self) -> &[Vec<Rational>] {
        &self.dist
    }
}

/// A validated finite ultrametric space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "DistanceMatrixCandidate", into = "DistanceMatrixCandidate")]
pub struct FiniteUltrametricSpace(DistanceMatrixCandidate);

impl TryFrom<DistanceMatrixCandidate> for FiniteUltrametricSpace {
    type Error = UltrametricViolation;
    fn try_from(c: DistanceMatrixCandidate) -> Result<Self, Self::Error> {
        validate_ultrametric(c)
    }
}

impl From<FiniteUltrametricSpace> for DistanceMatrixCandidate {
    fn from(s: FiniteUltrametricSpace) -> Self {
        s.0
    }
}

impl FiniteUltrametricSpace {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        self.0.labels()
    }

    pub fn dist(&self, i: usize, j: usize) -> &Rational {
        self.0.dist(i, j)
    }

    pub fn matrix(&self) -> &[Vec<Rational>] {
        self.0.matrix()
    }

    pub fn as_candidate(&self) -> &DistanceMatrixCandidate {
        &self.0
    }

    pub fn single_point() -> Self {
        FiniteUltrametricSpace(
            DistanceMatrixCandidate::unlabeled(vec![vec![Rational::zero()]])
                .expect("1x1 zero matrix"),
        )
    }

    /// Two points at distance `d > 0`.
    pub fn two_point(d: Rational) -> Self {
        let m = vec![vec![Rational::zero(), d.clone()], vec![d, Rational::zero()]];
        validate_ultrametric(DistanceMatrixCandidate::unlabeled(m).expect("symmetric"))
            .expect("positive distance")
    }
}

/// Checks diagonal, positivity off the diagonal and the strong triangle
/// inequality, reporting the first failure in index order.
pub fn validate_ultrametric(
    c: DistanceMatrixCandidate,
) -> Result<FiniteUltrametricSpace, UltrametricViolation> {
    let n = c.len();
    let d = &c.dist;
    for i in 0..n {
        if !d[i][i].is_zero() {
            return Err(UltrametricViolation::NonzeroDiagonal {
                i,
                value: d[i][i].clone(),
            });
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i != j && d[i][j].is_zero() {
                return Err(UltrametricViolation::ZeroDistance { i, j });
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if d[i][j] > *(&d[i][k]).max(&d[k][j]) {
                    return Err(UltrametricViolation::StrongTriangle { i, j, k });
                }
            }
        }
    }
    Ok(FiniteUltrametricSpace(c))
}

/// The isosceles characterization: zero exactly on the diagonal, and in every
/// triangle of distinct points the two longest sides are equal.
pub fn is_ultrametric_by_isosceles(c: &DistanceMatrixCandidate) -> bool {
    let n = c.len();
    let d = &c.dist;
    for i in 0..n {
        for j in 0..n {
            if (i == j) != d[i][j].is_zero() {
                return false;
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let mut sides = [&d[i][j], &d[j][k], &d[i][k]];
                sides.sort();
                if sides[1] != sides[2] {
                    return false;
                }
            }
        }
    }
    true
}

/// Entrywise image `f(d(x, y))`. Validation is a separate step.
pub fn apply_fn(
    s: &FiniteUltrametricSpace,
    f: &FunctionSpec,
) -> Result<DistanceMatrixCandidate, EvalError> {
    let dist = s
        .matrix()
        .iter()
        .map(|row| row.iter().map(|x| f.eval(x)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DistanceMatrixCandidate {
        labels: s.labels().to_vec(),
        dist,
    })
}

/// Distinct distance values, including 0, in increasing order.
pub fn range(s: &FiniteUltrametricSpace) -> Vec<Rational> {
    let set: BTreeSet<&Rational> = s.matrix().iter().flatten().collect();
    set.into_iter().cloned().collect()
}

/// `perm` maps point `i` of `a` to point `perm[i]` of `b` preserving distances.
pub fn is_isometry(a: &FiniteUltrametricSpace, b: &FiniteUltrametricSpace, perm: &[usize]) -> bool {
    let n = a.len();
    if b.len() != n || perm.len() != n {
        return false;
    }
    let mut used = vec![false; n];
    for &t in perm {
        if t >= n || std::mem::replace(&mut used[t], true) {
            return false;
        }
    }
    (0..n).all(|i| (0..n).all(|j| a.dist(i, j) == b.dist(perm[i], perm[j])))
}

fn search_isometries(
    a: &FiniteUltrametricSpace,
    b: &FiniteUltrametricSpace,
    first_only: bool,
) -> Result<Vec<Vec<usize>>, SpaceError> {
    if a.len() != b.len() {
        return Err(SpaceError::SizeMismatch(a.len(), b.len()));
    }
    if a.len() > MAX_ISOMETRY_POINTS {
        return Err(SpaceError::TooLarge(a.len()));
    }
    let n = a.len();
    let mut found = Vec::new();
    let mut perm = Vec::with_capacity(n);
    let mut used = vec![false; n];

    // Depth-first in increasing target order, so results come out lexicographically.
    fn extend(
        a: &FiniteUltrametricSpace,
        b: &FiniteUltrametricSpace,
        perm: &mut Vec<usize>,
        used: &mut [bool],
        found: &mut Vec<Vec<usize>>,
        first_only: bool,
    ) -> bool {
        let i = perm.len();
        if i == a.len() {
            found.push(perm.clone());
            return first_only;
        }
        for t in 0..a.len() {
            if used[t] || (0..i).any(|j| a.dist(i, j) != b.dist(t, perm[j])) {
                continue;
            }
            used[t] = true;
            perm.push(t);
            let stop = extend(a, b, perm, used, found, first_only);
            perm.pop();
            used[t] = false;
            if stop {
                return true;
            }
        }
        false
    }

    extend(a, b, &mut perm, &mut used, &mut found, first_only);
    Ok(found)
}

/// Lexicographically least distance-preserving bijection, if any.
pub fn isometry_search(
    a: &FiniteUltrametricSpace,
    b: &FiniteUltrametricSpace,
) -> Result<Option<Vec<usize>>, SpaceError> {
    Ok(search_isometries(a, b, true)?.into_iter().next())
}

/// Every distance-preserving bijection, in lexicographic order.
pub fn all_isometries(
    a: &FiniteUltrametricSpace,
    b: &FiniteUltrametricSpace,
) -> Result<Vec<Vec<usize>>, SpaceError> {
    search_isometries(a, b, false)
}

/// Exact rank of an integer matrix by fraction-free (Bareiss) elimination.
fn bareiss_rank(mut m: Vec<Vec<BigInt>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..cols {
        let Some(pivot) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        for i in rank + 1..rows {
            for j in col + 1..cols {
                let num = &m[i][j] * &m[rank][col] - &m[i][col] * &m[rank][j];
                let (q, r) = num.div_rem(&prev);
                debug_assert!(r.is_zero(), "Bareiss division must be exact");
                m[i][j] = q;
            }
            m[i][col] = BigInt::zero();
        }
        prev = m[rank][col].clone();
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Rank over Q of the Gram matrix `(d(0,i)^2 + d(0,j)^2 - d(i,j)^2) / 2`,
/// `i, j >= 1`. Zero for a single point.
pub fn gram_rank(s: &FiniteUltrametricSpace) -> usize {
    gram_rank_from(s, 0)
}

/// [`gram_rank`] with an arbitrary base point.
pub fn gram_rank_from(s: &FiniteUltrametricSpace, base: usize) -> usize {
    let n = s.len();
    if n < 2 {
        return 0;
    }
    let others: Vec<usize> = (0..n).filter(|&i| i != base).collect();
    let sq = |i: usize, j: usize| s.dist(i, j) * s.dist(i, j);
    let two = Rational::from(2);
    let gram: Vec<Vec<Rational>> = others
        .iter()
        .map(|&i| {
            others
                .iter()
                .map(|&j| (sq(base, i) + sq(base, j) - sq(i, j)) / &two)
                .collect()
        })
        .collect();
    let lcm = gram
        .iter()
        .flatten()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let scaled = gram
        .iter()
        .map(|row| row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect())
        .collect();
    bareiss_rank(scaled)
}

/// Least Euclidean dimension admitting an isometric copy: `|X| - 1` for a
/// finite ultrametric space, cross-checked against [`gram_rank`].
pub fn embed_min_dimension(s: &FiniteUltrametricSpace) -> Result<usize, SpaceError> {
    let expected = s.len() - 1;
    if s.len() >= 2 {
        let rank = gram_rank(s);
        if rank != expected {
            return Err(SpaceError::EmbeddingMismatch { expected, rank });
        }
    }
    Ok(expected)
}
