//! Exactly evaluable functions `f: R+ -> R+` and the triplet-based checks on them.

mod checks;

pub use checks::{
    check_euclid_preserving_sampled, check_metric_preserving_sampled, check_ultra_to_metric,
    check_ultrametric_preserving, default_samples, euclid_grid, is_strong_triplet,
    is_triangle_triplet, sufficient_conditions, CheckError, SampleSet, SufficiencyReport,
    TripletVerdict, Witness,
};

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::padic::{prime_power, Prime};
use crate::rational::Rational;

pub const DEFAULT_SHIFT_BOUND: u64 = 1_000_000;

fn default_shift_bound() -> u64 {
    DEFAULT_SHIFT_BOUND
}

/// Behaviour of a piecewise-linear function past its last breakpoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tail {
    /// Constant at the last ordinate; the stored value must equal it.
    Constant(Rational),
    /// Keep the slope of the last segment.
    LinearContinuation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionSpec {
    /// Finite table; evaluation off the table is an error.
    Tabulated { table: BTreeMap<Rational, Rational> },
    /// Linear interpolation through `points`, which start at `x = 0`.
    PiecewiseLinear {
        points: Vec<(Rational, Rational)>,
        tail: Tail,
    },
    /// `0 -> 0`, `x -> 1/x`.
    Reciprocal,
    /// `x -> x / (1 + x)`.
    Canonical,
    /// `p^n -> q^n`, linear between consecutive powers of `p`.
    PowerMap { p: Prime, q: Prime },
    /// `p_k^n -> p_{k+1}^n` over all primes, linear between consecutive prime
    /// powers. Brackets are searched among integers up to `bound`.
    PrimeShift {
        #[serde(default = "default_shift_bound")]
        bound: u64,
    },
    /// Right-continuous step function: `0 -> 0`, `initial` on `(0, x_1)`,
    /// `y_i` on `[x_i, x_{i+1})`, and the last `y` from the last `x` onward.
    Step {
        initial: Rational,
        steps: Vec<(Rational, Rational)>,
    },
    /// `0 -> 0`, and `inner(p^m)` on `[p^m, p^{m+1})`.
    StepPsi { inner: Box<FunctionSpec>, p: Prime },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("tabulated function has no entry for 0")]
    TableMissingZero,
    #[error("negative abscissa {0}")]
    NegativeAbscissa(Rational),
    #[error("negative value {0}")]
    NegativeValue(Rational),
    #[error("piecewise-linear function has no points")]
    NoPoints,
    #[error("piecewise-linear function must start at x = 0, got {0}")]
    FirstPointNotAtZero(Rational),
    #[error("abscissae must be strictly increasing ({0} then {1})")]
    NotIncreasing(Rational, Rational),
    #[error("constant tail {tail} differs from last ordinate {last}")]
    TailMismatch { tail: Rational, last: Rational },
    #[error("linear continuation needs at least two points")]
    ContinuationTooShort,
    #[error("linear continuation with negative slope {0} leaves R+")]
    NegativeContinuation(Rational),
    #[error("step positions must be positive, got {0}")]
    NonPositiveStep(Rational),
    #[error("prime shift bound {0} is too small")]
    BoundTooSmall(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("negative argument {0}")]
    NegativeInput(Rational),
    #[error("{0} is not in the table")]
    DomainMiss(Rational),
    #[error("{x} is below the evaluation floor {floor}")]
    BelowFloor { x: Rational, floor: Rational },
    #[error("{x} is above the evaluation ceiling {ceiling}")]
    AboveCeiling { x: Rational, ceiling: Rational },
    #[error("invalid function: {0}")]
    Invalid(#[from] SpecError),
}

impl FunctionSpec {
    pub fn tabulated<I>(entries: I) -> Result<Self, SpecError>
    where
        I: IntoIterator<Item = (Rational, Rational)>,
    {
        let spec = FunctionSpec::Tabulated {
            table: entries.into_iter().collect(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn piecewise_linear(
        points: Vec<(Rational, Rational)>,
        tail: Tail,
    ) -> Result<Self, SpecError> {
        let spec = FunctionSpec::PiecewiseLinear { points, tail };
        spec.validate()?;
        Ok(spec)
    }

    pub fn step(initial: Rational, steps: Vec<(Rational, Rational)>) -> Result<Self, SpecError> {
        let spec = FunctionSpec::Step { initial, steps };
        spec.validate()?;
        Ok(spec)
    }

    pub fn identity() -> Self {
        FunctionSpec::PiecewiseLinear {
            points: vec![
                (Rational::zero(), Rational::zero()),
                (Rational::one(), Rational::one()),
            ],
            tail: Tail::LinearContinuation,
        }
    }

    /// `0 -> 0`, `c` everywhere else.
    pub fn constant_on_positives(c: Rational) -> Self {
        FunctionSpec::Step {
            initial: c,
            steps: Vec::new(),
        }
    }

    pub fn power_map(p: Prime, q: Prime) -> Self {
        FunctionSpec::PowerMap { p, q }
    }

    pub fn prime_shift() -> Self {
        FunctionSpec::PrimeShift {
            bound: DEFAULT_SHIFT_BOUND,
        }
    }

    pub fn psi(inner: FunctionSpec, p: Prime) -> Self {
        FunctionSpec::StepPsi {
            inner: Box::new(inner),
            p,
        }
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        match self {
            FunctionSpec::Tabulated { table } => {
                if !table.contains_key(&Rational::zero()) {
                    return Err(SpecError::TableMissingZero);
                }
                for (x, y) in table {
                    nonnegative_point(x, y)?;
                }
                Ok(())
            }
            FunctionSpec::PiecewiseLinear { points, tail } => {
                let (first, _) = points.first().ok_or(SpecError::NoPoints)?;
                if !first.is_zero() {
                    return Err(SpecError::FirstPointNotAtZero(first.clone()));
                }
                for (x, y) in points {
                    nonnegative_point(x, y)?;
                }
                strictly_increasing(points)?;
                let (_, last) = points.last().expect("nonempty");
                match tail {
                    Tail::Constant(c) if c != last => Err(SpecError::TailMismatch {
                        tail: c.clone(),
                        last: last.clone(),
                    }),
                    Tail::Constant(_) => Ok(()),
                    Tail::LinearContinuation => {
                        let slope = last_slope(points).ok_or(SpecError::ContinuationTooShort)?;
                        if slope.is_negative() {
                            Err(SpecError::NegativeContinuation(slope))
                        } else {
                            Ok(())
                        }
                    }
                }
            }
            FunctionSpec::Step { initial, steps } => {
                if initial.is_negative() {
                    return Err(SpecError::NegativeValue(initial.clone()));
                }
                for (x, y) in steps {
                    if !x.is_positive() {
                        return Err(SpecError::NonPositiveStep(x.clone()));
                    }
                    nonnegative_point(x, y)?;
                }
                strictly_increasing(steps)
            }
            FunctionSpec::PrimeShift { bound } => {
                if *bound < 3 {
                    Err(SpecError::BoundTooSmall(*bound))
                } else {
                    Ok(())
                }
            }
            FunctionSpec::StepPsi { inner, .. } => inner.validate(),
            FunctionSpec::Reciprocal | FunctionSpec::Canonical | FunctionSpec::PowerMap { .. } => {
                Ok(())
            }
        }
    }

    /// Exact value `f(x)` for `x >= 0`.
    pub fn eval(&self, x: &Rational) -> Result<Rational, EvalError> {
        if x.is_negative() {
            return Err(EvalError::NegativeInput(x.clone()));
        }
        match self {
            FunctionSpec::Tabulated { table } => table
                .get(x)
                .cloned()
                .ok_or_else(|| EvalError::DomainMiss(x.clone())),
            FunctionSpec::PiecewiseLinear { points, tail } => eval_piecewise(points, tail, x),
            FunctionSpec::Reciprocal => Ok(x.recip().unwrap_or_else(Rational::zero)),
            FunctionSpec::Canonical => Ok(x / (Rational::one() + x)),
            FunctionSpec::PowerMap { p, q } => Ok(eval_power_map(*p, *q, x)),
            FunctionSpec::PrimeShift { bound } => eval_prime_shift(*bound, x),
            FunctionSpec::Step { initial, steps } => Ok(eval_step(initial, steps, x)),
            FunctionSpec::StepPsi { inner, p } => {
                if x.is_zero() {
                    Ok(Rational::zero())
                } else {
                    inner.eval(&p.pow(floor_log(x, *p)))
                }
            }
        }
    }

    /// Abscissae where the function changes behaviour: PL breakpoints and
    /// step positions. Empty for the other forms.
    pub fn breakpoints(&self) -> Vec<Rational> {
        match self {
            FunctionSpec::PiecewiseLinear { points, .. } => {
                points.iter().map(|(x, _)| x.clone()).collect()
            }
            FunctionSpec::Step { steps, .. } => steps.iter().map(|(x, _)| x.clone()).collect(),
            _ => Vec::new(),
        }
    }
}

fn nonnegative_point(x: &Rational, y: &Rational) -> Result<(), SpecError> {
    if x.is_negative() {
        return Err(SpecError::NegativeAbscissa(x.clone()));
    }
    if y.is_negative() {
        return Err(SpecError::NegativeValue(y.clone()));
    }
    Ok(())
}

fn strictly_increasing(points: &[(Rational, Rational)]) -> Result<(), SpecError> {
    for w in points.windows(2) {
        if w[0].0 >= w[1].0 {
            return Err(SpecError::NotIncreasing(w[0].0.clone(), w[1].0.clone()));
        }
    }
    Ok(())
}

fn last_slope(points: &[(Rational, Rational)]) -> Option<Rational> {
    match points {
        [.., (x0, y0), (x1, y1)] => Some((y1 - y0) / (x1 - x0)),
        _ => None,
    }
}

/// Slopes of consecutive PL segments, in order.
pub(crate) fn segment_slopes(points: &[(Rational, Rational)]) -> Vec<Rational> {
    points
        .windows(2)
        .map(|w| (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0))
        .collect()
}

fn interpolate(
    x0: &Rational,
    y0: &Rational,
    x1: &Rational,
    y1: &Rational,
    x: &Rational,
) -> Rational {
    y0 + (x - x0) * (y1 - y0) / (x1 - x0)
}

fn eval_piecewise(
    points: &[(Rational, Rational)],
    tail: &Tail,
    x: &Rational,
) -> Result<Rational, EvalError> {
    let (last_x, last_y) = points.last().ok_or(SpecError::NoPoints)?;
    if x >= last_x {
        return match tail {
            Tail::Constant(c) => Ok(c.clone()),
            Tail::LinearContinuation => {
                let slope = last_slope(points).ok_or(SpecError::ContinuationTooShort)?;
                Ok(last_y + (x - last_x) * slope)
            }
        };
    }
    match points.binary_search_by(|(px, _)| px.cmp(x)) {
        Ok(i) => Ok(points[i].1.clone()),
        // x is below the first point only if points[0].0 > 0, which validation forbids
        Err(0) => Err(SpecError::FirstPointNotAtZero(points[0].0.clone()).into()),
        Err(i) => {
            let (x0, y0) = &points[i - 1];
            let (x1, y1) = &points[i];
            Ok(interpolate(x0, y0, x1, y1, x))
        }
    }
}

fn eval_step(initial: &Rational, steps: &[(Rational, Rational)], x: &Rational) -> Rational {
    if x.is_zero() {
        return Rational::zero();
    }
    let idx = steps.partition_point(|(sx, _)| sx <= x);
    if idx == 0 {
        initial.clone()
    } else {
        steps[idx - 1].1.clone()
    }
}

fn bit_log2(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        n.to_f64().unwrap_or(f64::MAX).abs().log2()
    } else {
        // drop low bits so the float conversion stays finite
        let shifted: BigInt = n.abs() >> (bits - 64);
        shifted.to_f64().unwrap().log2() + (bits - 64) as f64
    }
}

/// The integer `m` with `p^m <= x < p^(m+1)`, for `x > 0`.
pub fn floor_log(x: &Rational, p: Prime) -> i64 {
    assert!(x.is_positive(), "floor_log of non-positive value");
    let estimate = (bit_log2(x.numer()) - bit_log2(x.denom())) / (p.get() as f64).log2();
    let mut m = estimate.floor() as i64;
    while p.pow(m) > *x {
        m -= 1;
    }
    while p.pow(m + 1) <= *x {
        m += 1;
    }
    m
}

fn eval_power_map(p: Prime, q: Prime, x: &Rational) -> Rational {
    if x.is_zero() {
        return Rational::zero();
    }
    let m = floor_log(x, p);
    let lo = p.pow(m);
    if lo == *x {
        return q.pow(m);
    }
    interpolate(&lo, &q.pow(m), &p.pow(m + 1), &q.pow(m + 1), x)
}

/// Image of a defined point `m = 1` or `m = p^k` under the prime shift.
fn shift_integer_point(m: u64) -> Rational {
    match prime_power(m) {
        None => Rational::one(),
        Some((p, k)) => p.next().pow(k as i64),
    }
}

fn is_defined_point(m: u64) -> bool {
    m == 1 || prime_power(m).is_some()
}

/// Largest prime power not exceeding `bound`; evaluation below `1/that` fails.
pub fn prime_shift_floor(bound: u64) -> Rational {
    let top = (2..=bound)
        .rev()
        .find(|&m| prime_power(m).is_some())
        .unwrap_or(1);
    Rational::frac(1, top as i64)
}

/// Consecutive defined integer points `lo <= y <= hi` around `y >= 1`, or
/// `None` if `hi` would exceed `bound`.
fn bracket_integer_points(y: &Rational, bound: u64) -> Option<(u64, u64)> {
    let floor = y.floor().to_u64()?;
    if floor > bound {
        return None;
    }
    let lo = (1..=floor).rev().find(|&m| is_defined_point(m))?;
    if Rational::from(lo) == *y {
        return Some((lo, lo));
    }
    let hi = (floor + 1..=bound).find(|&m| is_defined_point(m))?;
    Some((lo, hi))
}

fn eval_prime_shift(bound: u64, x: &Rational) -> Result<Rational, EvalError> {
    if x.is_zero() {
        return Ok(Rational::zero());
    }
    let one = Rational::one();
    if *x >= one {
        let (lo, hi) = bracket_integer_points(x, bound).ok_or_else(|| EvalError::AboveCeiling {
            x: x.clone(),
            ceiling: Rational::from(bound),
        })?;
        if lo == hi {
            return Ok(shift_integer_point(lo));
        }
        return Ok(interpolate(
            &Rational::from(lo),
            &shift_integer_point(lo),
            &Rational::from(hi),
            &shift_integer_point(hi),
            x,
        ));
    }
    // Below 1 the defined points are 1/m and F(1/m) = 1/F(m).
    let y = x.recip().expect("x > 0");
    let (lo, hi) = bracket_integer_points(&y, bound).ok_or_else(|| EvalError::BelowFloor {
        x: x.clone(),
        floor: prime_shift_floor(bound),
    })?;
    let image = |m: u64| shift_integer_point(m).recip().expect("nonzero");
    if lo == hi {
        return Ok(image(lo));
    }
    Ok(interpolate(
        &Rational::frac(1, hi as i64),
        &image(hi),
        &Rational::frac(1, lo as i64),
        &image(lo),
        x,
    ))
}
