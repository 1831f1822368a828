//! Triangle-triplet predicates and sampled preservation checks.
//!
//! Every check here is a finite verification: a pass certifies the sample set
//! only, and each verdict carries the sample count and a hash of the set.
//! Witnesses are the lexicographically least violating tuple over the sorted
//! samples.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::{segment_slopes, EvalError, FunctionSpec, Tail};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("negative input {0}")]
    NegativeInput(Rational),
    #[error("sample set must contain 0")]
    MissingZero,
    #[error("internal error: the two procedures of `{0}` disagree")]
    ProcedureDisagreement(&'static str),
}

fn require_nonnegative(values: &[&Rational]) -> Result<(), CheckError> {
    match values.iter().find(|v| v.is_negative()) {
        Some(v) => Err(CheckError::NegativeInput((*v).clone())),
        None => Ok(()),
    }
}

fn triangle(a: &Rational, b: &Rational, c: &Rational) -> bool {
    *a <= b + c && *b <= a + c && *c <= a + b
}

fn strong(a: &Rational, b: &Rational, c: &Rational) -> bool {
    a <= b.max(c) && b <= a.max(c) && c <= a.max(b)
}

/// `(a, b, c)` is a triangle triplet: each entry at most the sum of the others.
pub fn is_triangle_triplet(a: &Rational, b: &Rational, c: &Rational) -> Result<bool, CheckError> {
    require_nonnegative(&[a, b, c])?;
    Ok(triangle(a, b, c))
}

/// `(a, b, c)` is a strong triangle triplet: the two largest entries coincide.
pub fn is_strong_triplet(a: &Rational, b: &Rational, c: &Rational) -> Result<bool, CheckError> {
    require_nonnegative(&[a, b, c])?;
    Ok(strong(a, b, c))
}

/// Sorted, deduplicated nonnegative sample points that include 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleSet(Vec<Rational>);

impl SampleSet {
    pub fn new<I: IntoIterator<Item = Rational>>(points: I) -> Result<Self, CheckError> {
        let set: BTreeSet<Rational> = points.into_iter().collect();
        if let Some(neg) = set.iter().find(|x| x.is_negative()) {
            return Err(CheckError::NegativeInput(neg.clone()));
        }
        if !set.contains(&Rational::zero()) {
            return Err(CheckError::MissingZero);
        }
        Ok(SampleSet(set.into_iter().collect()))
    }

    pub fn points(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn with<I: IntoIterator<Item = Rational>>(&self, extra: I) -> SampleSet {
        SampleSet::new(self.0.iter().cloned().chain(extra)).expect("superset of a valid set")
    }

    /// First 16 hex digits of SHA-256 over the canonical comma-joined points.
    pub fn hash(&self) -> String {
        let joined = self
            .0
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(",");
        Sha256::digest(joined.as_bytes())
            .iter()
            .take(8)
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// What went wrong, re-checkable by evaluating `f` at the listed arguments.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `f(0) != 0`.
    Origin { value: Rational },
    /// `f(x) = 0` for some `x > 0`.
    Vanishing { x: Rational },
    /// `a < b` with a violated pair condition (monotonicity or the band).
    Pair {
        a: Rational,
        b: Rational,
        fa: Rational,
        fb: Rational,
    },
    /// Arguments whose triplet class is not preserved by their images.
    Triple {
        args: [Rational; 3],
        images: [Rational; 3],
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripletVerdict {
    pub passed: bool,
    pub sampled: bool,
    pub samples: usize,
    pub sample_hash: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl TripletVerdict {
    fn new(samples: &SampleSet, witness: Option<Witness>) -> Self {
        TripletVerdict {
            passed: witness.is_none(),
            sampled: true,
            samples: samples.len(),
            sample_hash: samples.hash(),
            witness,
        }
    }
}

fn images(f: &FunctionSpec, samples: &SampleSet) -> Result<Vec<Rational>, CheckError> {
    samples
        .points()
        .iter()
        .map(|x| f.eval(x).map_err(CheckError::from))
        .collect()
}

/// `f(0) = 0` and `f > 0` at every positive sample.
fn amenability_witness(xs: &[Rational], fx: &[Rational]) -> Option<Witness> {
    for (x, y) in xs.iter().zip(fx) {
        if x.is_zero() && !y.is_zero() {
            return Some(Witness::Origin { value: y.clone() });
        }
        if x.is_positive() && !y.is_positive() {
            return Some(Witness::Vanishing { x: x.clone() });
        }
    }
    None
}

/// Least `(i, j, k)` with `pre` on the arguments and not `post` on the images.
fn scan_triples<P, Q>(xs: &[Rational], fx: &[Rational], pre: P, post: Q) -> Option<Witness>
where
    P: Fn(&Rational, &Rational, &Rational) -> bool,
    Q: Fn(&Rational, &Rational, &Rational) -> bool,
{
    let n = xs.len();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if pre(&xs[i], &xs[j], &xs[k]) && !post(&fx[i], &fx[j], &fx[k]) {
                    return Some(Witness::Triple {
                        args: [xs[i].clone(), xs[j].clone(), xs[k].clone()],
                        images: [fx[i].clone(), fx[j].clone(), fx[k].clone()],
                    });
                }
            }
        }
    }
    None
}

/// Least `(a, b)` with `a < b` failing `ok(f(a), f(b))`.
fn scan_pairs<C>(xs: &[Rational], fx: &[Rational], ok: C) -> Option<Witness>
where
    C: Fn(&Rational, &Rational) -> bool,
{
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            if !ok(&fx[i], &fx[j]) {
                return Some(Witness::Pair {
                    a: xs[i].clone(),
                    b: xs[j].clone(),
                    fa: fx[i].clone(),
                    fb: fx[j].clone(),
                });
            }
        }
    }
    None
}

/// Sampled metric preservation: amenable on the samples, and every triangle
/// triplet of samples maps to a triangle triplet.
pub fn check_metric_preserving_sampled(
    f: &FunctionSpec,
    samples: &SampleSet,
) -> Result<TripletVerdict, CheckError> {
    let xs = samples.points();
    let fx = images(f, samples)?;
    let witness =
        amenability_witness(xs, &fx).or_else(|| scan_triples(xs, &fx, triangle, triangle));
    Ok(TripletVerdict::new(samples, witness))
}

/// Exact monotonicity and amenability for the forms that allow it.
fn exact_increasing_amenable(f: &FunctionSpec) -> Option<Option<Witness>> {
    match f {
        FunctionSpec::PiecewiseLinear { points, .. } => {
            let (x0, y0) = &points[0];
            if !y0.is_zero() {
                return Some(Some(Witness::Origin { value: y0.clone() }));
            }
            // Positive breakpoints carry positive values iff f > 0 on (0, inf):
            // the constant tail repeats the last value and a continuation rises.
            if let Some((x, _)) = points.iter().skip(1).find(|(_, y)| !y.is_positive()) {
                return Some(Some(Witness::Vanishing { x: x.clone() }));
            }
            if points.len() == 1 {
                return Some(Some(Witness::Vanishing {
                    x: x0 + Rational::one(),
                }));
            }
            let bad = segment_slopes(points).iter().position(|s| s.is_negative());
            Some(bad.map(|i| Witness::Pair {
                a: points[i].0.clone(),
                b: points[i + 1].0.clone(),
                fa: points[i].1.clone(),
                fb: points[i + 1].1.clone(),
            }))
        }
        FunctionSpec::Step { initial, steps } => {
            let probe = step_probe(steps);
            if !initial.is_positive() {
                return Some(Some(Witness::Vanishing { x: probe }));
            }
            if let Some((x, _)) = steps.iter().find(|(_, y)| !y.is_positive()) {
                return Some(Some(Witness::Vanishing { x: x.clone() }));
            }
            let mut prev = (probe, initial.clone());
            for (x, y) in steps {
                if prev.1 > *y {
                    return Some(Some(Witness::Pair {
                        a: prev.0,
                        b: x.clone(),
                        fa: prev.1,
                        fb: y.clone(),
                    }));
                }
                prev = (x.clone(), y.clone());
            }
            Some(None)
        }
        _ => None,
    }
}

/// A point of `(0, x_1)`, where a step function takes its initial value.
fn step_probe(steps: &[(Rational, Rational)]) -> Rational {
    match steps.first() {
        Some((x, _)) => x / Rational::from(2),
        None => Rational::one(),
    }
}

/// Extra sample points that make a sampled scan see everything the exact
/// inspection of a piecewise-linear or step function sees.
fn structural_points(f: &FunctionSpec) -> Vec<Rational> {
    let mut pts = f.breakpoints();
    match f {
        FunctionSpec::Step { steps, .. } => pts.push(step_probe(steps)),
        FunctionSpec::PiecewiseLinear { points, .. } if points.len() == 1 => {
            pts.push(&points[0].0 + Rational::one())
        }
        _ => {}
    }
    pts
}

/// Ultrametric preservation, by two procedures that must agree:
/// (a) amenable and increasing, decided exactly from the slopes of a
/// piecewise-linear function or the values of a step function, and pairwise
/// on the samples otherwise; (b) amenability on the samples plus a scan that
/// every strong triplet of samples maps to a strong triplet.
///
/// For piecewise-linear and step functions the samples are widened with the
/// breakpoints first, so both procedures look at the same data.
pub fn check_ultrametric_preserving(
    f: &FunctionSpec,
    samples: &SampleSet,
) -> Result<TripletVerdict, CheckError> {
    let samples = samples.with(structural_points(f));
    let xs = samples.points();
    let fx = images(f, &samples)?;

    let procedure_a = match exact_increasing_amenable(f) {
        Some(w) => w,
        None => amenability_witness(xs, &fx).or_else(|| scan_pairs(xs, &fx, |fa, fb| fa <= fb)),
    };
    let procedure_b =
        amenability_witness(xs, &fx).or_else(|| scan_triples(xs, &fx, strong, strong));

    if procedure_a.is_some() != procedure_b.is_some() {
        return Err(CheckError::ProcedureDisagreement("ultrametric"));
    }
    Ok(TripletVerdict::new(&samples, procedure_a))
}

/// Whether `f` sends ultrametrics to metrics, by two procedures that must
/// agree: (a) `f(0) = 0` and `0 < f(a) <= 2 f(b)` for sampled `0 < a < b`;
/// (b) amenability plus a scan that strong triplets map to triangle triplets.
pub fn check_ultra_to_metric(
    f: &FunctionSpec,
    samples: &SampleSet,
) -> Result<TripletVerdict, CheckError> {
    let xs = samples.points();
    let fx = images(f, samples)?;

    let two = Rational::from(2);
    let procedure_a = amenability_witness(xs, &fx).or_else(|| {
        // skip index 0: the band is over positive arguments only
        scan_pairs(&xs[1..], &fx[1..], |fa, fb| *fa <= &two * fb)
    });
    let procedure_b =
        amenability_witness(xs, &fx).or_else(|| scan_triples(xs, &fx, strong, triangle));

    if procedure_a.is_some() != procedure_b.is_some() {
        return Err(CheckError::ProcedureDisagreement("ultra_to_metric"));
    }
    Ok(TripletVerdict::new(samples, procedure_a))
}

/// Sampled test for preserving the Euclidean metric on the line: amenable at
/// every point involved, and `(f(a), f(b), f(a+b))` a triangle triplet for
/// each pair. Pairs are scanned in sorted order.
pub fn check_euclid_preserving_sampled(
    f: &FunctionSpec,
    pairs: &[(Rational, Rational)],
) -> Result<TripletVerdict, CheckError> {
    let mut sorted: Vec<(Rational, Rational)> = pairs.to_vec();
    sorted.sort();
    sorted.dedup();
    for (a, b) in &sorted {
        require_nonnegative(&[a, b])?;
    }
    let points = SampleSet::new(
        std::iter::once(Rational::zero()).chain(
            sorted
                .iter()
                .flat_map(|(a, b)| [a.clone(), b.clone(), a + b]),
        ),
    )?;
    let fx = images(f, &points)?;
    let lookup = |x: &Rational| {
        let i = points.points().binary_search(x).expect("sampled point");
        fx[i].clone()
    };

    let mut witness = amenability_witness(points.points(), &fx);
    if witness.is_none() {
        for (a, b) in &sorted {
            let c = a + b;
            let (fa, fb, fc) = (lookup(a), lookup(b), lookup(&c));
            if !triangle(&fa, &fb, &fc) {
                witness = Some(Witness::Triple {
                    args: [a.clone(), b.clone(), c],
                    images: [fa, fb, fc],
                });
                break;
            }
        }
    }
    Ok(TripletVerdict::new(&points, witness))
}

/// All pairs over `{0, step, 2 step, ..., max}` together with the breakpoints
/// of `f` that lie in `[0, max]`.
pub fn euclid_grid(f: &FunctionSpec, step: &Rational, max: &Rational) -> Vec<(Rational, Rational)> {
    assert!(step.is_positive(), "grid step must be positive");
    let mut values = BTreeSet::new();
    let mut x = Rational::zero();
    while x <= *max {
        values.insert(x.clone());
        x = x + step;
    }
    values.extend(f.breakpoints().into_iter().filter(|b| b <= max));
    let values: Vec<Rational> = values.into_iter().collect();
    let mut pairs = Vec::with_capacity(values.len() * values.len());
    for a in &values {
        for b in &values {
            pairs.push((a.clone(), b.clone()));
        }
    }
    pairs
}

/// Default sample grid. Piecewise-linear and step functions get their
/// breakpoints, midpoints and pairwise sums of breakpoints; everything else a
/// quarter-step grid on `[0, 4]`. Tabulated functions use their table keys.
pub fn default_samples(f: &FunctionSpec) -> SampleSet {
    let mut pts: BTreeSet<Rational> = BTreeSet::new();
    pts.insert(Rational::zero());
    match f {
        FunctionSpec::Tabulated { table } => pts.extend(table.keys().cloned()),
        FunctionSpec::PiecewiseLinear { .. } | FunctionSpec::Step { .. } => {
            let bps = structural_points(f);
            let bound = bps.iter().max().cloned().unwrap_or_else(Rational::one) * Rational::from(2);
            for (i, a) in bps.iter().enumerate() {
                pts.insert(a.clone());
                if let Some(b) = bps.get(i + 1) {
                    pts.insert((a + b) / Rational::from(2));
                }
                for b in &bps[i..] {
                    let s = a + b;
                    if s <= bound {
                        pts.insert(s);
                    }
                }
            }
            pts.insert(bound + Rational::one());
        }
        _ => pts.extend((1..=16).map(|k| Rational::frac(k, 4))),
    }
    SampleSet::new(pts).expect("contains 0 and is nonnegative")
}

/// Classical sufficient conditions for metric preservation, on the samples.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SufficiencyReport {
    /// Some `a > 0` has `a <= f(x) <= 2a` at every positive sample.
    pub band: bool,
    pub concave: bool,
    /// True when `concave` came from exact slope inspection rather than secants.
    pub concave_exact: bool,
    /// `f(a + b) <= f(a) + f(b)` for sample pairs whose sum is also a sample.
    pub subadditive_on_samples: bool,
    pub samples: usize,
    pub sample_hash: String,
}

pub fn sufficient_conditions(
    f: &FunctionSpec,
    samples: &SampleSet,
) -> Result<SufficiencyReport, CheckError> {
    let xs = samples.points();
    let fx = images(f, samples)?;

    let positive: Vec<&Rational> = xs
        .iter()
        .zip(&fx)
        .filter(|(x, _)| x.is_positive())
        .map(|(_, y)| y)
        .collect();
    let band = match (positive.iter().min(), positive.iter().max()) {
        (Some(lo), Some(hi)) => lo.is_positive() && **hi <= Rational::from(2) * *lo,
        _ => false,
    };

    let (concave, concave_exact) = match f {
        FunctionSpec::PiecewiseLinear { points, tail } => {
            let mut slopes = segment_slopes(points);
            if let Tail::Constant(_) = tail {
                slopes.push(Rational::zero());
            }
            (slopes.windows(2).all(|w| w[0] >= w[1]), true)
        }
        _ => {
            let secants: Vec<Rational> = xs
                .windows(2)
                .zip(fx.windows(2))
                .map(|(x, y)| (&y[1] - &y[0]) / (&x[1] - &x[0]))
                .collect();
            (secants.windows(2).all(|w| w[0] >= w[1]), false)
        }
    };

    let mut subadditive = true;
    'outer: for (i, a) in xs.iter().enumerate() {
        for (j, b) in xs.iter().enumerate().skip(i) {
            if let Ok(k) = xs.binary_search(&(a + b)) {
                if fx[k] > &fx[i] + &fx[j] {
                    subadditive = false;
                    break 'outer;
                }
            }
        }
    }

    Ok(SufficiencyReport {
        band,
        concave,
        concave_exact,
        subadditive_on_samples: subadditive,
        samples: samples.len(),
        sample_hash: samples.hash(),
    })
}
