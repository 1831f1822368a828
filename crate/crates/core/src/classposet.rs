//! Finite classes of finite ultrametric spaces and the order they induce on
//! their distance values.
//!
//! For a class `U`, `G_U` pairs the base `s` of every isosceles triangle with
//! its equal legs `t` (points may repeat). The reflexive transitive closure
//! `⋞_U` is a partial order on `Ran_U` with least element 0, contained in `<=`.
//! A function preserves ultrametrics on every space of `U` iff it is amenable
//! on `Ran_U` and isotone for `⋞_U`; [`check_class_preserving`] computes both
//! sides and insists they agree.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::finspace::{
    apply_fn, validate_ultrametric, DistanceMatrixCandidate, FiniteUltrametricSpace,
    UltrametricViolation,
};
use crate::funspec::{EvalError, FunctionSpec};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassError {
    #[error("a class needs at least one space")]
    EmptyClass,
    #[error("no space in the class has two points")]
    NoPositiveDistances,
    #[error("the class order is not total")]
    NotTotallyOrdered,
    #[error("the class order is total, so every preserving function extends")]
    TotallyOrdered,
    #[error("the function does not preserve ultrametrics on the class")]
    NotPreserving(Box<ClassReport>),
    #[error("{x1} and {x2} are comparable")]
    Comparable { x1: Rational, x2: Rational },
    #[error("need 0 < p1 < p2, got p1 = {p1}, p2 = {p2}")]
    BadInterval { p1: Rational, p2: Rational },
    #[error("{0} is not in the ground set")]
    NotInGround(Rational),
    #[error("pair ({0}, {1}) is outside the ground set")]
    PairOutsideGround(Rational, Rational),
    #[error("relation is not a partial order: {0}")]
    NotPartialOrder(&'static str),
    #[error("internal error: space-by-space verdict {lhs} but order verdict {rhs}")]
    EquivalenceBreach { lhs: bool, rhs: bool },
    #[error("internal error: counterexample does not verify")]
    SelfCheckFailed,
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Nonempty list of nonempty ultrametric spaces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawClass")]
pub struct SpaceClass {
    spaces: Vec<FiniteUltrametricSpace>,
}

#[derive(Deserialize)]
struct RawClass {
    spaces: Vec<FiniteUltrametricSpace>,
}

impl TryFrom<RawClass> for SpaceClass {
    type Error = ClassError;
    fn try_from(raw: RawClass) -> Result<Self, ClassError> {
        SpaceClass::new(raw.spaces)
    }
}

impl SpaceClass {
    pub fn new(spaces: Vec<FiniteUltrametricSpace>) -> Result<Self, ClassError> {
        if spaces.is_empty() {
            return Err(ClassError::EmptyClass);
        }
        Ok(SpaceClass { spaces })
    }

    pub fn single(space: FiniteUltrametricSpace) -> Self {
        SpaceClass {
            spaces: vec![space],
        }
    }

    pub fn spaces(&self) -> &[FiniteUltrametricSpace] {
        &self.spaces
    }
}

/// Every ultrametric space on `1..=max_points` points whose distances lie in
/// `pool`, one per distance matrix (isometric copies included).
pub fn all_small_spaces(pool: &[Rational], max_points: usize) -> SpaceClass {
    let pool: Vec<Rational> = pool
        .iter()
        .filter(|r| r.is_positive())
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut spaces = vec![FiniteUltrametricSpace::single_point()];
    for n in 2..=max_points {
        let slots: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        let mut choice = vec![0usize; slots.len()];
        'odometer: loop {
            let mut m = vec![vec![Rational::zero(); n]; n];
            for (&(i, j), &c) in slots.iter().zip(&choice) {
                m[i][j] = pool[c].clone();
                m[j][i] = pool[c].clone();
            }
            let cand = DistanceMatrixCandidate::unlabeled(m).expect("symmetric with zero diagonal");
            if let Ok(s) = validate_ultrametric(cand) {
                spaces.push(s);
            }
            for c in choice.iter_mut() {
                *c += 1;
                if *c < pool.len() {
                    continue 'odometer;
                }
                *c = 0;
            }
            break;
        }
        if pool.is_empty() {
            break;
        }
    }
    SpaceClass { spaces }
}

/// A relation on a sorted ground set of rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteRelation {
    ground: Vec<Rational>,
    rel: Vec<Vec<bool>>,
}

#[derive(Serialize, Deserialize)]
struct RawRelation {
    ground: Vec<Rational>,
    pairs: Vec<(Rational, Rational)>,
}

impl Serialize for FiniteRelation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RawRelation {
            ground: self.ground.clone(),
            pairs: self.pairs(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FiniteRelation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawRelation::deserialize(d)?;
        FiniteRelation::new(raw.ground, raw.pairs).map_err(serde::de::Error::custom)
    }
}

impl FiniteRelation {
    pub fn new<I>(
        ground: I,
        pairs: impl IntoIterator<Item = (Rational, Rational)>,
    ) -> Result<Self, ClassError>
    where
        I: IntoIterator<Item = Rational>,
    {
        let ground: Vec<Rational> = ground
            .into_iter()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let mut r = FiniteRelation::empty(ground);
        for (s, t) in pairs {
            match (r.index(&s), r.index(&t)) {
                (Some(i), Some(j)) => r.rel[i][j] = true,
                _ => return Err(ClassError::PairOutsideGround(s, t)),
            }
        }
        Ok(r)
    }

    fn empty(ground: Vec<Rational>) -> Self {
        let n = ground.len();
        FiniteRelation {
            ground,
            rel: vec![vec![false; n]; n],
        }
    }

    pub fn ground(&self) -> &[Rational] {
        &self.ground
    }

    pub fn index(&self, x: &Rational) -> Option<usize> {
        self.ground.binary_search(x).ok()
    }

    pub fn contains(&self, s: &Rational, t: &Rational) -> bool {
        match (self.index(s), self.index(t)) {
            (Some(i), Some(j)) => self.rel[i][j],
            _ => false,
        }
    }

    /// All pairs, ordered by the ground order of `(s, t)`.
    pub fn pairs(&self) -> Vec<(Rational, Rational)> {
        self.index_pairs()
            .map(|(i, j)| (self.ground[i].clone(), self.ground[j].clone()))
            .collect()
    }

    fn index_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.ground.len();
        (0..n).flat_map(move |i| (0..n).filter(move |&j| self.rel[i][j]).map(move |j| (i, j)))
    }

    pub fn len(&self) -> usize {
        self.index_pairs().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn with_diagonal(&self) -> Self {
        let mut r = self.clone();
        for i in 0..r.ground.len() {
            r.rel[i][i] = true;
        }
        r
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.ground.len()).all(|i| self.rel[i][i])
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.index_pairs().all(|(i, j)| i == j || !self.rel[j][i])
    }

    pub fn is_transitive(&self) -> bool {
        let n = self.ground.len();
        self.index_pairs()
            .all(|(i, j)| (0..n).all(|k| !self.rel[j][k] || self.rel[i][k]))
    }
}

/// Smallest transitive superset (Warshall).
pub fn transitive_closure(r: &FiniteRelation) -> FiniteRelation {
    let mut out = r.clone();
    let n = out.ground.len();
    for k in 0..n {
        for i in 0..n {
            if !out.rel[i][k] {
                continue;
            }
            for j in 0..n {
                if out.rel[k][j] {
                    out.rel[i][j] = true;
                }
            }
        }
    }
    out
}

/// A reflexive, antisymmetric, transitive relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinitePoset {
    order: FiniteRelation,
}

impl Serialize for FinitePoset {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let g = &self.order.ground;
        RawRelation {
            ground: g.clone(),
            pairs: self
                .order
                .index_pairs()
                .filter(|(i, j)| i != j)
                .map(|(i, j)| (g[i].clone(), g[j].clone()))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FinitePoset {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawRelation::deserialize(d)?;
        let r = FiniteRelation::new(raw.ground, raw.pairs).map_err(serde::de::Error::custom)?;
        FinitePoset::new(r.with_diagonal()).map_err(serde::de::Error::custom)
    }
}

impl FinitePoset {
    pub fn new(order: FiniteRelation) -> Result<Self, ClassError> {
        if !order.is_reflexive() {
            return Err(ClassError::NotPartialOrder("not reflexive"));
        }
        if !order.is_antisymmetric() {
            return Err(ClassError::NotPartialOrder("not antisymmetric"));
        }
        if !order.is_transitive() {
            return Err(ClassError::NotPartialOrder("not transitive"));
        }
        Ok(FinitePoset { order })
    }

    pub fn ground(&self) -> &[Rational] {
        &self.order.ground
    }

    pub fn order(&self) -> &FiniteRelation {
        &self.order
    }

    pub fn leq(&self, s: &Rational, t: &Rational) -> bool {
        self.order.contains(s, t)
    }

    pub fn comparable(&self, a: &Rational, b: &Rational) -> bool {
        self.leq(a, b) || self.leq(b, a)
    }

    /// Non-reflexive pairs `s ⋞ t`.
    pub fn strict_pairs(&self) -> Vec<(Rational, Rational)> {
        self.order
            .pairs()
            .into_iter()
            .filter(|(s, t)| s != t)
            .collect()
    }

    /// The induced order on the elements satisfying `keep`.
    pub fn restrict(&self, keep: impl Fn(&Rational) -> bool) -> FinitePoset {
        let ground: Vec<Rational> = self.ground().iter().filter(|x| keep(x)).cloned().collect();
        let pairs = self
            .order
            .pairs()
            .into_iter()
            .filter(|(s, t)| keep(s) && keep(t));
        let order = FiniteRelation::new(ground, pairs).expect("pairs drawn from the ground set");
        FinitePoset { order }
    }
}

/// Union of the distance values of every space, 0 included.
pub fn ran_u(u: &SpaceClass) -> Vec<Rational> {
    let set: BTreeSet<&Rational> = u
        .spaces
        .iter()
        .flat_map(|s| s.matrix().iter().flatten())
        .collect();
    set.into_iter().cloned().collect()
}

/// `⟨s, t⟩` whenever `s = d(x1, x3)` and `t = d(x1, x2) = d(x2, x3)` in some
/// space of the class, points allowed to repeat.
pub fn g_relation(u: &SpaceClass) -> FiniteRelation {
    let mut r = FiniteRelation::empty(ran_u(u));
    for s in &u.spaces {
        let n = s.len();
        for a in 0..n {
            for b in 0..n {
                let leg = s.dist(a, b);
                for c in 0..n {
                    if s.dist(b, c) == leg {
                        let i = r.index(s.dist(a, c)).expect("distance in range");
                        let j = r.index(leg).expect("distance in range");
                        r.rel[i][j] = true;
                    }
                }
            }
        }
    }
    r
}

/// `⋞_U`, the reflexive transitive closure of `G_U` on `Ran_U`.
pub fn poset_u(u: &SpaceClass) -> FinitePoset {
    let order = transitive_closure(&g_relation(u)).with_diagonal();
    let poset = FinitePoset::new(order).expect("the closure of G_U is a partial order");
    let zero = Rational::zero();
    for t in poset.ground() {
        assert!(poset.leq(&zero, t), "0 is the least element");
    }
    for (s, t) in poset.order.pairs() {
        assert!(s <= t, "the class order refines <=");
    }
    poset
}

pub fn is_totally_ordered(p: &FinitePoset) -> bool {
    let g = p.ground();
    (0..g.len()).all(|i| (i + 1..g.len()).all(|j| p.comparable(&g[i], &g[j])))
}

/// Least and greatest positive distance in the class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassExtremes {
    pub t_low: Rational,
    pub t_high: Rational,
}

pub fn extremes(u: &SpaceClass) -> Result<ClassExtremes, ClassError> {
    let positive: Vec<Rational> = ran_u(u).into_iter().filter(Rational::is_positive).collect();
    match (positive.first(), positive.last()) {
        (Some(lo), Some(hi)) => Ok(ClassExtremes {
            t_low: lo.clone(),
            t_high: hi.clone(),
        }),
        _ => Err(ClassError::NoPositiveDistances),
    }
}

/// The first space of the class whose image under `f` is not ultrametric.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceWitness {
    pub space: usize,
    pub violation: UltrametricViolation,
}

/// Why `f` is not amenable and isotone on `(Ran_U, ⋞_U)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OrderWitness {
    Origin {
        value: Rational,
    },
    Vanishing {
        t: Rational,
    },
    Order {
        s: Rational,
        t: Rational,
        fs: Rational,
        ft: Rational,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassReport {
    pub preserving: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub space_witness: Option<SpaceWitness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order_witness: Option<OrderWitness>,
}

fn space_side(f: &FunctionSpec, u: &SpaceClass) -> Result<Option<SpaceWitness>, ClassError> {
    for (i, s) in u.spaces.iter().enumerate() {
        if let Err(violation) = validate_ultrametric(apply_fn(s, f)?) {
            return Ok(Some(SpaceWitness {
                space: i,
                violation,
            }));
        }
    }
    Ok(None)
}

fn order_side(f: &FunctionSpec, poset: &FinitePoset) -> Result<Option<OrderWitness>, ClassError> {
    let values: BTreeMap<&Rational, Rational> = poset
        .ground()
        .iter()
        .map(|t| Ok((t, f.eval(t)?)))
        .collect::<Result<_, EvalError>>()?;
    let zero = Rational::zero();
    let at_zero = f.eval(&zero)?;
    if !at_zero.is_zero() {
        return Ok(Some(OrderWitness::Origin { value: at_zero }));
    }
    if let Some((t, _)) = values
        .iter()
        .find(|(t, v)| t.is_positive() && !v.is_positive())
    {
        return Ok(Some(OrderWitness::Vanishing { t: (*t).clone() }));
    }
    Ok(poset
        .strict_pairs()
        .into_iter()
        .find(|(s, t)| values[s] > values[t])
        .map(|(s, t)| OrderWitness::Order {
            fs: values[&s].clone(),
            ft: values[&t].clone(),
            s,
            t,
        }))
}

/// Computes space-by-space preservation and order-side preservation
/// separately and returns their common verdict.
pub fn check_class_preserving(f: &FunctionSpec, u: &SpaceClass) -> Result<ClassReport, ClassError> {
    let space_witness = space_side(f, u)?;
    let order_witness = order_side(f, &poset_u(u))?;
    let (lhs, rhs) = (space_witness.is_none(), order_witness.is_none());
    if lhs != rhs {
        return Err(ClassError::EquivalenceBreach { lhs, rhs });
    }
    Ok(ClassReport {
        preserving: lhs,
        space_witness,
        order_witness,
    })
}

/// Increasing amenable step function agreeing with `f` on `Ran_U`:
/// `f(t_low)` on `(0, t_low)`, the running maximum of `f` over
/// `[t_low, t] ∩ Ran_U` up to `t_high`, and `f(t_high)` beyond.
pub fn build_extension(f: &FunctionSpec, u: &SpaceClass) -> Result<FunctionSpec, ClassError> {
    let poset = poset_u(u);
    if !is_totally_ordered(&poset) {
        return Err(ClassError::NotTotallyOrdered);
    }
    let report = check_class_preserving(f, u)?;
    if !report.preserving {
        return Err(ClassError::NotPreserving(Box::new(report)));
    }
    let ext = extremes(u)?;
    let initial = f.eval(&ext.t_low)?;
    let mut running = initial.clone();
    let mut steps = Vec::new();
    for t in poset.ground().iter().filter(|t| **t > ext.t_low) {
        let v = f.eval(t)?;
        if v > running {
            running = v;
            steps.push((t.clone(), running.clone()));
        }
    }
    Ok(FunctionSpec::step(initial, steps).expect("positive increasing steps"))
}

/// `Φ(x) = p2` if `x2 ⋞ x`, else `p1`: isotone into `[p1, p2]` with
/// `Φ(x1) = p1` and `Φ(x2) = p2`.
pub fn isotone_for_incomparables(
    p: &FinitePoset,
    x1: &Rational,
    x2: &Rational,
    p1: &Rational,
    p2: &Rational,
) -> Result<BTreeMap<Rational, Rational>, ClassError> {
    if !p1.is_positive() || p1 >= p2 {
        return Err(ClassError::BadInterval {
            p1: p1.clone(),
            p2: p2.clone(),
        });
    }
    for x in [x1, x2] {
        if p.order.index(x).is_none() {
            return Err(ClassError::NotInGround(x.clone()));
        }
    }
    if p.comparable(x1, x2) {
        return Err(ClassError::Comparable {
            x1: x1.clone(),
            x2: x2.clone(),
        });
    }
    let phi: BTreeMap<Rational, Rational> = p
        .ground()
        .iter()
        .map(|x| {
            (
                x.clone(),
                if p.leq(x2, x) { p2.clone() } else { p1.clone() },
            )
        })
        .collect();
    assert!(
        p.strict_pairs().iter().all(|(s, t)| phi[s] <= phi[t]),
        "up-set indicator is isotone"
    );
    Ok(phi)
}

/// A function preserving ultrametrics on every space of the class yet
/// decreasing somewhere on `Ran_U`, so it has no increasing extension.
pub fn counterexample_fn(u: &SpaceClass) -> Result<FunctionSpec, ClassError> {
    let poset = poset_u(u);
    let g = poset.ground();
    let (x1, x2) = (0..g.len())
        .rev()
        .flat_map(|i| (0..i).rev().map(move |j| (i, j)))
        .map(|(i, j)| (&g[i], &g[j]))
        .find(|(a, b)| !poset.comparable(a, b))
        .ok_or(ClassError::TotallyOrdered)?;
    let positive = poset.restrict(Rational::is_positive);
    let phi = isotone_for_incomparables(&positive, x1, x2, &Rational::one(), &Rational::from(2))?;
    let table = phi
        .into_iter()
        .chain([(Rational::zero(), Rational::zero())]);
    let f = FunctionSpec::tabulated(table).expect("nonnegative table with 0");

    let preserving = check_class_preserving(&f, u)?.preserving;
    let values: Vec<Rational> = g.iter().map(|t| f.eval(t)).collect::<Result<_, _>>()?;
    let decreasing =
        (0..values.len()).any(|i| (i + 1..values.len()).any(|j| values[i] > values[j]));
    if !(preserving && decreasing) {
        return Err(ClassError::SelfCheckFailed);
    }
    Ok(f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassComparison {
    pub same_range: bool,
    pub same_order: bool,
}

pub fn compare_classes(u1: &SpaceClass, u2: &SpaceClass) -> ClassComparison {
    ClassComparison {
        same_range: ran_u(u1) == ran_u(u2),
        same_order: poset_u(u1) == poset_u(u2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{isometry_example_fn, isometry_example_space, isosceles_space};
    use crate::rational::q;

    fn rs(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&v| q(v, 1)).collect()
    }

    fn pairs(xs: &[(i64, i64)]) -> Vec<(Rational, Rational)> {
        xs.iter().map(|&(a, b)| (q(a, 1), q(b, 1))).collect()
    }

    fn ex41() -> SpaceClass {
        SpaceClass::single(isometry_example_space())
    }

    fn two_point(d: i64) -> SpaceClass {
        SpaceClass::single(FiniteUltrametricSpace::two_point(q(d, 1)))
    }

    fn iso(base: i64, leg: i64) -> FiniteUltrametricSpace {
        isosceles_space(q(base, 1), q(leg, 1))
    }

    fn table(entries: &[(i64, i64)]) -> FunctionSpec {
        FunctionSpec::tabulated(entries.iter().map(|&(a, b)| (q(a, 1), q(b, 1)))).unwrap()
    }

    #[test]
    fn ranges() {
        assert_eq!(ran_u(&ex41()), rs(&[0, 1, 2, 3]));
        assert_eq!(ran_u(&two_point(1)), rs(&[0, 1]));
        let u = SpaceClass::new(vec![iso(1, 2), iso(2, 5)]).unwrap();
        assert_eq!(ran_u(&u), rs(&[0, 1, 2, 5]));
        assert_eq!(SpaceClass::new(vec![]), Err(ClassError::EmptyClass));
    }

    #[test]
    fn g_relation_examples() {
        assert_eq!(
            g_relation(&ex41()).pairs(),
            pairs(&[(0, 0), (0, 1), (0, 2), (0, 3), (1, 3), (2, 3)])
        );
        assert_eq!(g_relation(&two_point(1)).pairs(), pairs(&[(0, 0), (0, 1)]));
        assert!(g_relation(&SpaceClass::single(iso(1, 2))).contains(&q(1, 1), &q(2, 1)));
    }

    #[test]
    fn closure_examples() {
        let r = FiniteRelation::new(rs(&[1, 2, 3]), pairs(&[(1, 2), (2, 3)])).unwrap();
        assert_eq!(
            transitive_closure(&r).pairs(),
            pairs(&[(1, 2), (1, 3), (2, 3)])
        );
        let g = g_relation(&ex41());
        assert_eq!(transitive_closure(&g), g);
        let t = transitive_closure(&r);
        assert_eq!(transitive_closure(&t), t);
        assert!(matches!(
            FiniteRelation::new(rs(&[1]), pairs(&[(1, 2)])),
            Err(ClassError::PairOutsideGround(..))
        ));
    }

    #[test]
    fn poset_examples() {
        let p = poset_u(&ex41());
        assert_eq!(
            p.strict_pairs(),
            pairs(&[(0, 1), (0, 2), (0, 3), (1, 3), (2, 3)])
        );
        assert!(!p.comparable(&q(1, 1), &q(2, 1)));
        assert!(!is_totally_ordered(&p));

        assert_eq!(poset_u(&two_point(1)).strict_pairs(), pairs(&[(0, 1)]));
        let chain = poset_u(&SpaceClass::single(iso(1, 2)));
        assert_eq!(chain.strict_pairs(), pairs(&[(0, 1), (0, 2), (1, 2)]));
        assert!(is_totally_ordered(&chain));
        assert!(is_totally_ordered(&poset_u(&SpaceClass::single(
            FiniteUltrametricSpace::single_point()
        ))));
    }

    #[test]
    fn poset_json() {
        let p = poset_u(&ex41());
        let text = serde_json::to_string(&p).unwrap();
        assert_eq!(
            text,
            r#"{"ground":["0","1","2","3"],"pairs":[["0","1"],["0","2"],["0","3"],["1","3"],["2","3"]]}"#
        );
        assert_eq!(serde_json::from_str::<FinitePoset>(&text).unwrap(), p);
        let cyclic = r#"{"ground":["1","2"],"pairs":[["1","2"],["2","1"]]}"#;
        assert!(serde_json::from_str::<FinitePoset>(cyclic).is_err());
    }

    #[test]
    fn extremes_examples() {
        let e = extremes(&ex41()).unwrap();
        assert_eq!((e.t_low, e.t_high), (q(1, 1), q(3, 1)));
        let e = extremes(&two_point(5)).unwrap();
        assert_eq!((e.t_low, e.t_high), (q(5, 1), q(5, 1)));
        let e = extremes(&SpaceClass::new(vec![iso(1, 2), iso(2, 5)]).unwrap()).unwrap();
        assert_eq!((e.t_low, e.t_high), (q(1, 1), q(5, 1)));
        assert_eq!(
            extremes(&SpaceClass::single(FiniteUltrametricSpace::single_point())),
            Err(ClassError::NoPositiveDistances)
        );
    }

    #[test]
    fn class_preservation_examples() {
        let r = check_class_preserving(&isometry_example_fn(), &ex41()).unwrap();
        assert!(r.preserving);
        assert!(
            check_class_preserving(&FunctionSpec::identity(), &ex41())
                .unwrap()
                .preserving
        );

        let bad = table(&[(0, 0), (1, 2), (2, 1), (3, 1)]);
        let r = check_class_preserving(&bad, &ex41()).unwrap();
        assert!(!r.preserving);
        assert_eq!(
            r.order_witness,
            Some(OrderWitness::Order {
                s: q(1, 1),
                t: q(3, 1),
                fs: q(2, 1),
                ft: q(1, 1)
            })
        );
        assert!(r.space_witness.is_some());
    }

    #[test]
    fn extension_examples() {
        let u = SpaceClass::single(iso(1, 2));
        let g = build_extension(&table(&[(0, 0), (1, 5), (2, 5)]), &u).unwrap();
        assert_eq!(g, FunctionSpec::constant_on_positives(q(5, 1)));

        let g = build_extension(&table(&[(0, 0), (1, 1), (2, 2)]), &u).unwrap();
        assert_eq!(
            g,
            FunctionSpec::step(q(1, 1), vec![(q(2, 1), q(2, 1))]).unwrap()
        );
        assert_eq!(g.eval(&q(1, 2)).unwrap(), q(1, 1));
        assert_eq!(g.eval(&q(7, 1)).unwrap(), q(2, 1));

        assert_eq!(
            build_extension(&FunctionSpec::identity(), &ex41()),
            Err(ClassError::NotTotallyOrdered)
        );
        assert!(matches!(
            build_extension(&table(&[(0, 0), (1, 2), (2, 1)]), &u),
            Err(ClassError::NotPreserving(_))
        ));
    }

    #[test]
    fn isotone_examples() {
        let p = poset_u(&ex41()).restrict(Rational::is_positive);
        let phi = isotone_for_incomparables(&p, &q(2, 1), &q(1, 1), &q(1, 1), &q(2, 1)).unwrap();
        assert_eq!(
            phi.into_iter().collect::<Vec<_>>(),
            pairs(&[(1, 2), (2, 1), (3, 2)])
        );
        assert!(matches!(
            isotone_for_incomparables(&p, &q(1, 1), &q(3, 1), &q(1, 1), &q(2, 1)),
            Err(ClassError::Comparable { .. })
        ));
        assert!(matches!(
            isotone_for_incomparables(&p, &q(2, 1), &q(1, 1), &q(2, 1), &q(2, 1)),
            Err(ClassError::BadInterval { .. })
        ));

        let antichain = FinitePoset::new(
            FiniteRelation::new(rs(&[1, 2]), [])
                .unwrap()
                .with_diagonal(),
        )
        .unwrap();
        let phi =
            isotone_for_incomparables(&antichain, &q(1, 1), &q(2, 1), &q(1, 1), &q(2, 1)).unwrap();
        assert_eq!(
            phi.into_iter().collect::<Vec<_>>(),
            pairs(&[(1, 1), (2, 2)])
        );
    }

    #[test]
    fn counterexample_examples() {
        let f = counterexample_fn(&ex41()).unwrap();
        assert_eq!(f, table(&[(0, 0), (1, 2), (2, 1), (3, 2)]));

        let image = validate_ultrametric(
            apply_fn(&isometry_example_space(), &isometry_example_fn()).unwrap(),
        )
        .unwrap();
        let g = counterexample_fn(&SpaceClass::single(image)).unwrap();
        assert!(check_class_preserving(&g, &ex41()).unwrap().preserving);

        assert_eq!(
            counterexample_fn(&SpaceClass::single(iso(1, 2))),
            Err(ClassError::TotallyOrdered)
        );
    }

    #[test]
    fn comparison_examples() {
        let u = ex41();
        assert_eq!(
            compare_classes(&u, &u),
            ClassComparison {
                same_range: true,
                same_order: true
            }
        );
        assert_eq!(
            compare_classes(&two_point(1), &two_point(2)),
            ClassComparison {
                same_range: false,
                same_order: false
            }
        );
        let pool = rs(&[1, 2]);
        let c = compare_classes(&all_small_spaces(&pool, 3), &all_small_spaces(&pool, 4));
        assert_eq!(
            c,
            ClassComparison {
                same_range: true,
                same_order: true
            }
        );
    }

    #[test]
    fn small_space_enumeration() {
        let pool = rs(&[1, 2]);
        // 1 point, 2 two-point spaces, and 3-point spaces with equal largest sides:
        // (1,1,1), (2,2,2), and base 1 with legs 2 in 3 placements.
        assert_eq!(all_small_spaces(&pool, 3).spaces().len(), 1 + 2 + 5);
        let class = all_small_spaces(&pool, 3);
        assert!(is_totally_ordered(&poset_u(&class)));
    }
}
