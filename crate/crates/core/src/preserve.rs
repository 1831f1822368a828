//! p-adic metric and ultrametric preservation over finite exponent windows.
//!
//! A function preserves the p-adic metric iff `f(0) = 0` and
//! `0 < f(p^m) <= 2 f(p^n)` for all `m < n`; it preserves the p-adic
//! ultrametric iff `f(0) = 0` and `0 < f(p^n) <= f(p^{n+1})` for all `n`.
//! Both quantifiers range over all integers, so checks here scan an
//! [`ExponentWindow`] and stamp the verdict with it.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::funspec::{EvalError, FunctionSpec};
use crate::padic::{dp, PadicError, Prime};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PreserveError {
    #[error("window needs lo <= hi, got {lo}:{hi}")]
    EmptyWindow { lo: i64, hi: i64 },
    #[error("window must look like lo:hi, got `{0}`")]
    BadWindow(String),
    #[error("witness triple needs n < m, got m = {m}, n = {n}")]
    BadOrder { m: i64, n: i64 },
    #[error("internal error: witness triple for p = {p}, m = {m}, n = {n} does not verify")]
    SelfCheckFailed { p: u64, m: i64, n: i64 },
    #[error("function is not p-adic ultrametric preserving on the window")]
    NotPreserving(Box<PreservationWitness>),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Padic(#[from] PadicError),
}

/// Inclusive exponent range `lo..=hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawWindow")]
pub struct ExponentWindow {
    lo: i64,
    hi: i64,
}

#[derive(Deserialize)]
struct RawWindow {
    lo: i64,
    hi: i64,
}

impl TryFrom<RawWindow> for ExponentWindow {
    type Error = PreserveError;
    fn try_from(w: RawWindow) -> Result<Self, PreserveError> {
        ExponentWindow::new(w.lo, w.hi)
    }
}

impl Default for ExponentWindow {
    fn default() -> Self {
        ExponentWindow { lo: -16, hi: 16 }
    }
}

impl ExponentWindow {
    pub fn new(lo: i64, hi: i64) -> Result<Self, PreserveError> {
        if lo > hi {
            return Err(PreserveError::EmptyWindow { lo, hi });
        }
        Ok(ExponentWindow { lo, hi })
    }

    pub fn lo(self) -> i64 {
        self.lo
    }

    pub fn hi(self) -> i64 {
        self.hi
    }

    pub fn exponents(self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }

    /// Pairs `m < n`, nearest the origin first: by `|m| + |n|`, then `m`, then `n`.
    pub fn ordered_pairs(self) -> Vec<(i64, i64)> {
        let mut pairs: Vec<(i64, i64)> = self
            .exponents()
            .flat_map(|m| (m + 1..=self.hi).map(move |n| (m, n)))
            .collect();
        pairs.sort_by_key(|&(m, n)| (m.unsigned_abs() + n.unsigned_abs(), m, n));
        pairs
    }

    /// Exponents nearest the origin first: by `|n|`, then `n`.
    fn ordered_exponents(self) -> Vec<i64> {
        let mut ns: Vec<i64> = self.exponents().collect();
        ns.sort_by_key(|&n| (n.unsigned_abs(), n));
        ns
    }
}

impl fmt::Display for ExponentWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.lo, self.hi)
    }
}

impl FromStr for ExponentWindow {
    type Err = PreserveError;
    fn from_str(s: &str) -> Result<Self, PreserveError> {
        let bad = || PreserveError::BadWindow(s.to_string());
        // Split at the first ':' not in leading position so "-3:-1" works.
        let cut = s
            .char_indices()
            .skip(1)
            .find(|&(_, c)| c == ':')
            .map(|(i, _)| i)
            .ok_or_else(bad)?;
        let lo = s[..cut].trim().parse().map_err(|_| bad())?;
        let hi = s[cut + 1..].trim().parse().map_err(|_| bad())?;
        ExponentWindow::new(lo, hi)
    }
}

/// Rationals `(x, y, z)` with `dp(x,z) = dp(z,y) = p^m` and `dp(x,y) = p^n`.
pub fn witness_triple(p: Prime, m: i64, n: i64) -> Result<[Rational; 3], PreserveError> {
    if n >= m {
        return Err(PreserveError::BadOrder { m, n });
    }
    let k = m - n;
    let (x, y, z) = if p.get() >= 3 {
        let pk = p.pow(k);
        (pk.clone(), -pk, Rational::one())
    } else if k >= 2 {
        let half = p.pow(k - 1);
        (half.clone(), -half, Rational::one())
    } else {
        (Rational::one(), Rational::from(-1), Rational::zero())
    };
    let scale = p.pow(-m);
    let triple = [&x * &scale, &y * &scale, &z * &scale];
    let [x, y, z] = &triple;
    let (leg, base) = (p.pow(m), p.pow(n));
    if dp(x, z, p) != leg || dp(z, y, p) != leg || dp(x, y, p) != base {
        return Err(PreserveError::SelfCheckFailed { p: p.get(), m, n });
    }
    Ok(triple)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PadicProperty {
    Metric,
    Ultrametric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessReason {
    /// `f(0) != 0`.
    Origin,
    /// `f(p^m) = 0`.
    Vanishing,
    /// `f(p^m) > 2 f(p^n)` with `m < n`.
    Band,
    /// `f(p^m) > f(p^n)` with `n = m + 1`.
    Decrease,
}

/// A failure of the window conditions, with a concrete triple when the failure
/// is about pairs: `triple = (x, y, z)` translated so `z = 0`, and
/// `images = (f(dp(x,z)), f(dp(z,y)), f(dp(x,y)))`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreservationWitness {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<i64>,
    pub values: Vec<Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub triple: Option<[Rational; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub images: Option<[Rational; 3]>,
    pub reason: WitnessReason,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreservationVerdict {
    pub passed: bool,
    pub property: PadicProperty,
    pub p: Prime,
    pub window: ExponentWindow,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<PreservationWitness>,
}

fn legs_and_base(
    p: Prime,
    big: i64,
    small: i64,
    f: &FunctionSpec,
) -> Result<([Rational; 3], [Rational; 3]), PreserveError> {
    let [x, y, z] = witness_triple(p, big, small)?;
    let triple = [&x - &z, &y - &z, Rational::zero()];
    let [x, y, z] = &triple;
    let images = [
        f.eval(&dp(x, z, p))?,
        f.eval(&dp(z, y, p))?,
        f.eval(&dp(x, y, p))?,
    ];
    Ok((triple, images))
}

fn amenability_witness(
    f: &FunctionSpec,
    p: Prime,
    w: ExponentWindow,
) -> Result<Option<PreservationWitness>, PreserveError> {
    let at_zero = f.eval(&Rational::zero())?;
    if !at_zero.is_zero() {
        return Ok(Some(PreservationWitness {
            m: None,
            n: None,
            values: vec![at_zero],
            triple: None,
            images: None,
            reason: WitnessReason::Origin,
        }));
    }
    for m in w.ordered_exponents() {
        let v = f.eval(&p.pow(m))?;
        if !v.is_positive() {
            return Ok(Some(PreservationWitness {
                m: Some(m),
                n: None,
                values: vec![v],
                triple: None,
                images: None,
                reason: WitnessReason::Vanishing,
            }));
        }
    }
    Ok(None)
}

fn values_on_window(
    f: &FunctionSpec,
    p: Prime,
    w: ExponentWindow,
) -> Result<Vec<Rational>, PreserveError> {
    w.exponents().map(|k| Ok(f.eval(&p.pow(k))?)).collect()
}

/// `f(0) = 0` and `0 < f(p^m) <= 2 f(p^n)` for all `lo <= m < n <= hi`.
pub fn check_p_metric_preserving(
    f: &FunctionSpec,
    p: Prime,
    w: ExponentWindow,
) -> Result<PreservationVerdict, PreserveError> {
    let mut witness = amenability_witness(f, p, w)?;
    if witness.is_none() {
        let vals = values_on_window(f, p, w)?;
        let at = |k: i64| &vals[(k - w.lo) as usize];
        let two = Rational::from(2);
        if let Some((m, n)) = w
            .ordered_pairs()
            .into_iter()
            .find(|&(m, n)| *at(m) > &two * at(n))
        {
            let (triple, images) = legs_and_base(p, n, m, f)?;
            witness = Some(PreservationWitness {
                m: Some(m),
                n: Some(n),
                values: vec![at(m).clone(), at(n).clone()],
                triple: Some(triple),
                images: Some(images),
                reason: WitnessReason::Band,
            });
        }
    }
    Ok(PreservationVerdict {
        passed: witness.is_none(),
        property: PadicProperty::Metric,
        p,
        window: w,
        witness,
    })
}

/// `f(0) = 0` and `0 < f(p^n) <= f(p^{n+1})` for all `lo <= n < hi`.
pub fn check_p_ultrametric_preserving(
    f: &FunctionSpec,
    p: Prime,
    w: ExponentWindow,
) -> Result<PreservationVerdict, PreserveError> {
    let mut witness = amenability_witness(f, p, w)?;
    if witness.is_none() {
        let vals = values_on_window(f, p, w)?;
        let at = |k: i64| &vals[(k - w.lo) as usize];
        let drop = w
            .ordered_exponents()
            .into_iter()
            .filter(|&n| n < w.hi)
            .find(|&n| at(n) > at(n + 1));
        if let Some(n) = drop {
            let (triple, images) = legs_and_base(p, n + 1, n, f)?;
            witness = Some(PreservationWitness {
                m: Some(n),
                n: Some(n + 1),
                values: vec![at(n).clone(), at(n + 1).clone()],
                triple: Some(triple),
                images: Some(images),
                reason: WitnessReason::Decrease,
            });
        }
    }
    Ok(PreservationVerdict {
        passed: witness.is_none(),
        property: PadicProperty::Ultrametric,
        p,
        window: w,
        witness,
    })
}

impl PreservationVerdict {
    /// Re-derives the witness from `f` by direct evaluation.
    pub fn reverify(&self, f: &FunctionSpec) -> Result<bool, PreserveError> {
        let Some(w) = &self.witness else {
            return Ok(self.passed);
        };
        if self.passed {
            return Ok(false);
        }
        let p = self.p;
        Ok(match w.reason {
            WitnessReason::Origin => f.eval(&Rational::zero())? != Rational::zero(),
            WitnessReason::Vanishing => match w.m {
                Some(m) => f.eval(&p.pow(m))?.is_zero(),
                None => false,
            },
            WitnessReason::Band | WitnessReason::Decrease => {
                let (Some([x, y, z]), Some(images)) = (&w.triple, &w.images) else {
                    return Ok(false);
                };
                let fresh = [
                    f.eval(&dp(x, z, p))?,
                    f.eval(&dp(z, y, p))?,
                    f.eval(&dp(x, y, p))?,
                ];
                let [a, b, c] = &fresh;
                let broken = match self.property {
                    PadicProperty::Metric => c > &(a + b),
                    PadicProperty::Ultrametric => c > a.max(b),
                };
                &fresh == images && broken
            }
        })
    }
}

/// The weaker adjacent condition `f(p^{n-1}) <= 2 f(p^n)` over the window.
pub fn adjacent_band_holds(
    f: &FunctionSpec,
    p: Prime,
    w: ExponentWindow,
) -> Result<bool, PreserveError> {
    let vals = values_on_window(f, p, w)?;
    let two = Rational::from(2);
    Ok(vals.windows(2).all(|v| v[0] <= &two * &v[1]))
}

/// `Ψ_p`: `0 -> 0` and `f(p^m)` on `[p^m, p^{m+1})`.
pub fn psi_step(f: FunctionSpec, p: Prime) -> FunctionSpec {
    FunctionSpec::psi(f, p)
}

/// Increasing amenable step function agreeing with `f` at `p^n` on the window,
/// constant `f(p^lo)` below `p^lo` and `f(p^hi)` from `p^hi` on.
pub fn extend_to_ultrametric_preserving(
    f: &FunctionSpec,
    p: Prime,
    w: ExponentWindow,
) -> Result<FunctionSpec, PreserveError> {
    let verdict = check_p_ultrametric_preserving(f, p, w)?;
    if let Some(witness) = verdict.witness {
        return Err(PreserveError::NotPreserving(Box::new(witness)));
    }
    let initial = f.eval(&p.pow(w.lo))?;
    let steps = (w.lo + 1..=w.hi)
        .map(|n| {
            let x = p.pow(n);
            let y = f.eval(&x)?;
            Ok((x, y))
        })
        .collect::<Result<Vec<_>, PreserveError>>()?;
    Ok(FunctionSpec::step(initial, steps).expect("positive increasing steps"))
}

/// `p^n -> q^n`, linear in between.
pub fn prime_swap(p: u64, q: u64) -> Result<FunctionSpec, PreserveError> {
    Ok(FunctionSpec::power_map(Prime::new(p)?, Prime::new(q)?))
}

/// `p_k^n -> p_{k+1}^n`, linear in between.
pub fn prime_shift() -> FunctionSpec {
    FunctionSpec::prime_shift()
}
