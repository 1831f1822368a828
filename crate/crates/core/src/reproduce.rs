//! Published worked examples, each re-derived from scratch.

use serde::Serialize;

use crate::classposet::{check_class_preserving, poset_u, ran_u, SpaceClass};
use crate::finspace::{
    apply_fn, embed_min_dimension, is_isometry, isometry_search, range, validate_ultrametric,
};
use crate::fixtures::{euclid_example_fn, isometry_example_fn, isometry_example_space};
use crate::funspec::{
    check_euclid_preserving_sampled, check_ultrametric_preserving, euclid_grid, is_strong_triplet,
    is_triangle_triplet, FunctionSpec, SampleSet, Witness,
};
use crate::padic::{cauchy_profile, digits, dp, ord, padic_abs, Prime};
use crate::preserve::{
    check_p_metric_preserving, check_p_ultrametric_preserving, extend_to_ultrametric_preserving,
    prime_shift, prime_swap, witness_triple, ExponentWindow, PreserveError,
};
use crate::rational::{q, Rational};

type Check = fn() -> Result<(), String>;

pub struct Fixture {
    pub name: &'static str,
    pub claim: &'static str,
    check: Check,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FixtureOutcome {
    pub name: &'static str,
    pub claim: &'static str,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Fixture {
    pub fn run(&self) -> FixtureOutcome {
        let result = (self.check)();
        FixtureOutcome {
            name: self.name,
            claim: self.claim,
            passed: result.is_ok(),
            detail: result.err(),
        }
    }
}

fn prime(p: u64) -> Prime {
    Prime::new(p).expect("fixture primes are prime")
}

fn expect_eq<T: PartialEq + std::fmt::Debug>(what: &str, got: T, want: T) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: got {got:?}, expected {want:?}"))
    }
}

fn text<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn abs_of_25_18() -> Result<(), String> {
    let x = q(25, 18);
    for (p, want) in [(2, q(2, 1)), (3, q(9, 1)), (5, q(1, 25)), (7, q(1, 1))] {
        expect_eq(
            &format!("|25/18|_{p}"),
            padic_abs(&x, prime(p)).to_rational(),
            want,
        )?;
    }
    expect_eq("ord_3(25/18)", ord(&x, prime(3)).map_err(text)?, -2)?;
    expect_eq("ord_7(25/18)", ord(&x, prime(7)).map_err(text)?, 0)
}

fn three_adic_distances() -> Result<(), String> {
    expect_eq("d_3(1/2, 1/3)", dp(&q(1, 2), &q(1, 3), prime(3)), q(3, 1))?;
    expect_eq("d_3(1/2, 1/4)", dp(&q(1, 2), &q(1, 4), prime(3)), q(1, 1))
}

fn digit_expansions() -> Result<(), String> {
    let p = prime(3);
    let seventeen = digits(&q(17, 1), p, 4).map_err(text)?;
    expect_eq(
        "digits of 17",
        seventeen.digits.clone(),
        vec![2, 2, 1, 0, 0],
    )?;
    expect_eq(
        "17 in base 3",
        seventeen.positional(),
        Some("122".to_string()),
    )?;
    expect_eq(
        "digits of -1",
        digits(&q(-1, 1), p, 6).map_err(text)?.digits,
        vec![2; 7],
    )?;
    let half = digits(&q(1, 2), p, 6).map_err(text)?;
    expect_eq(
        "1/2 in base 3",
        half.positional(),
        Some("1111112".to_string()),
    )
}

fn geometric_series_limit() -> Result<(), String> {
    for p in [2, 3, 5, 7] {
        let p = prime(p);
        let limit = (Rational::one() - p.as_rational())
            .recip()
            .expect("1 - p is nonzero");
        let mut partial = Rational::zero();
        for n in 1..=50 {
            partial = partial + p.pow(n);
            let got = dp(&partial, &limit, p);
            if got != p.pow(-(n + 1)) {
                let shifted = dp(&(&partial + &Rational::one()), &limit, p);
                return Err(format!(
                    "d_{p}(sum p^k for k = 1..{n}, 1/(1-{p})) = {got}, expected {}; the sum over k = 0..{n} gives {shifted}",
                    p.pow(-(n + 1))
                ));
            }
        }
    }
    Ok(())
}

fn decimal_tails_stay_far_apart() -> Result<(), String> {
    let seq: Vec<Rational> = (1..=5).map(|n| q(1, 10).pow(n)).collect();
    let profile = cauchy_profile(&seq, prime(7)).map_err(text)?;
    match profile.iter().find(|d| **d < q(1, 9)) {
        Some(d) => Err(format!("consecutive 7-adic distance {d} < 1/9")),
        None => Ok(()),
    }
}

fn euclid_example_at_three() -> Result<(), String> {
    let d = dp(&q(1, 2), &q(1, 3), prime(3));
    expect_eq(
        "f(|1/2 - 1/3|_3)",
        euclid_example_fn().eval(&d).map_err(text)?,
        q(1, 8),
    )
}

fn triplet_examples() -> Result<(), String> {
    expect_eq(
        "(1,1,4) in Δ",
        is_triangle_triplet(&q(1, 1), &q(1, 1), &q(4, 1)).map_err(text)?,
        false,
    )?;
    expect_eq(
        "(1/8,1/8,1) in Δ",
        is_triangle_triplet(&q(1, 8), &q(1, 8), &q(1, 1)).map_err(text)?,
        false,
    )?;
    expect_eq(
        "(1,3,3) in Δ∞",
        is_strong_triplet(&q(1, 1), &q(3, 1), &q(3, 1)).map_err(text)?,
        true,
    )
}

fn isometry_example_fn_decreases() -> Result<(), String> {
    let samples = SampleSet::new([0, 1, 2, 3].map(|v| q(v, 1))).map_err(text)?;
    let v = check_ultrametric_preserving(&isometry_example_fn(), &samples).map_err(text)?;
    expect_eq(
        "witness",
        v.witness,
        Some(Witness::Pair {
            a: q(1, 1),
            b: q(2, 1),
            fa: q(2, 1),
            fb: q(1, 1),
        }),
    )
}

fn euclid_example_preserves_euclidean() -> Result<(), String> {
    let f = euclid_example_fn();
    let pairs = euclid_grid(&f, &q(1, 8), &q(8, 1));
    let v = check_euclid_preserving_sampled(&f, &pairs).map_err(text)?;
    match v.witness {
        None => Ok(()),
        Some(Witness::Triple { args, images }) => Err(format!(
            "(f(a), f(b), f(a+b)) = ({}, {}, {}) at (a, b) = ({}, {}) is not a triangle triplet",
            images[0], images[1], images[2], args[0], args[1]
        )),
        Some(w) => Err(format!("not amenable: {w:?}")),
    }
}

fn two_adic_base_triple() -> Result<(), String> {
    let t = witness_triple(prime(2), 0, -1).map_err(text)?;
    expect_eq("triple", t.to_vec(), vec![q(1, 1), q(-1, 1), q(0, 1)])
}

fn reciprocal_not_two_adic() -> Result<(), String> {
    let w = ExponentWindow::new(-5, 5).map_err(text)?;
    let v = check_p_metric_preserving(&FunctionSpec::Reciprocal, prime(2), w).map_err(text)?;
    let images = v.witness.and_then(|w| w.images).map(|i| i.to_vec());
    expect_eq("images", images, Some(vec![q(1, 1), q(1, 1), q(4, 1)]))
}

fn euclid_example_not_three_adic() -> Result<(), String> {
    let w = ExponentWindow::new(-2, 2).map_err(text)?;
    let v = check_p_ultrametric_preserving(&euclid_example_fn(), prime(3), w).map_err(text)?;
    let pair = v.witness.map(|w| (w.m, w.n, w.values));
    expect_eq(
        "decrease",
        pair,
        Some((Some(0), Some(1), vec![q(1, 1), q(1, 8)])),
    )?;
    let m = check_p_metric_preserving(&euclid_example_fn(), prime(3), w).map_err(text)?;
    let images = m.witness.and_then(|w| w.images).map(|i| i.to_vec());
    expect_eq("images", images, Some(vec![q(1, 8), q(1, 8), q(1, 1)]))
}

fn euclid_example_has_no_extension() -> Result<(), String> {
    let w = ExponentWindow::new(-2, 2).map_err(text)?;
    match extend_to_ultrametric_preserving(&euclid_example_fn(), prime(3), w) {
        Err(PreserveError::NotPreserving(_)) => Ok(()),
        other => Err(format!("expected NotPreserving, got {other:?}")),
    }
}

fn prime_swap_on_powers() -> Result<(), String> {
    let f = prime_swap(2, 3).map_err(text)?;
    expect_eq("F*(4)", f.eval(&q(4, 1)).map_err(text)?, q(9, 1))
}

fn prime_shift_on_powers() -> Result<(), String> {
    let f = prime_shift();
    expect_eq("F(4)", f.eval(&q(4, 1)).map_err(text)?, q(9, 1))?;
    expect_eq("F(5)", f.eval(&q(5, 1)).map_err(text)?, q(7, 1))
}

fn four_point_space_valid() -> Result<(), String> {
    validate_ultrametric(isometry_example_space().as_candidate().clone())
        .map(|_| ())
        .map_err(text)
}

fn four_point_image_valid() -> Result<(), String> {
    let image = apply_fn(&isometry_example_space(), &isometry_example_fn()).map_err(text)?;
    let image = validate_ultrametric(image).map_err(text)?;
    expect_eq(
        "image range",
        range(&image),
        [0, 1, 2, 3].map(|v| q(v, 1)).to_vec(),
    )
}

fn four_point_range() -> Result<(), String> {
    expect_eq(
        "range",
        range(&isometry_example_space()),
        [0, 1, 2, 3].map(|v| q(v, 1)).to_vec(),
    )?;
    let u = SpaceClass::single(isometry_example_space());
    expect_eq(
        "class range",
        ran_u(&u),
        [0, 1, 2, 3].map(|v| q(v, 1)).to_vec(),
    )
}

fn four_point_cyclic_isometry() -> Result<(), String> {
    let s = isometry_example_space();
    let image =
        validate_ultrametric(apply_fn(&s, &isometry_example_fn()).map_err(text)?).map_err(text)?;
    if !is_isometry(&s, &image, &[1, 2, 3, 0]) {
        return Err("the cyclic shift is not distance-preserving".into());
    }
    match isometry_search(&s, &image).map_err(text)? {
        Some(_) => Ok(()),
        None => Err("no isometry found".into()),
    }
}

fn four_point_needs_three_dimensions() -> Result<(), String> {
    expect_eq(
        "dimension",
        embed_min_dimension(&isometry_example_space()).map_err(text)?,
        3,
    )
}

fn four_point_order() -> Result<(), String> {
    let p = poset_u(&SpaceClass::single(isometry_example_space()));
    let want: Vec<(Rational, Rational)> = [(0, 1), (0, 2), (0, 3), (1, 3), (2, 3)]
        .iter()
        .map(|&(a, b)| (q(a, 1), q(b, 1)))
        .collect();
    expect_eq("strict order", p.strict_pairs(), want)?;
    expect_eq("1, 2 comparable", p.comparable(&q(1, 1), &q(2, 1)), false)
}

fn four_point_fn_preserves_on_space() -> Result<(), String> {
    let u = SpaceClass::single(isometry_example_space());
    let r = check_class_preserving(&isometry_example_fn(), &u).map_err(text)?;
    expect_eq("preserving", r.preserving, true)
}

pub fn fixtures() -> Vec<Fixture> {
    macro_rules! fx {
        ($name:literal, $claim:literal, $check:expr) => {
            Fixture {
                name: $name,
                claim: $claim,
                check: $check,
            }
        };
    }
    vec![
        fx!(
            "abs_25_18",
            "|25/18|_p is 2, 9, 1/25, 1 for p = 2, 3, 5, 7",
            abs_of_25_18
        ),
        fx!(
            "three_adic_distances",
            "d_3(1/2,1/3) = 3 and d_3(1/2,1/4) = 1",
            three_adic_distances
        ),
        fx!(
            "digit_expansions",
            "17 = 122, -1 = ...222, 1/2 = ...1112 in base 3",
            digit_expansions
        ),
        fx!(
            "geometric_series",
            "d_p(sum p^k for k = 1..n, 1/(1-p)) = p^-(n+1)",
            geometric_series_limit
        ),
        fx!(
            "decimal_tails",
            "1/10^n is not 7-adically Cauchy",
            decimal_tails_stay_far_apart
        ),
        fx!(
            "euclid_example_value",
            "f(|1/2 - 1/3|_3) = 1/8",
            euclid_example_at_three
        ),
        fx!(
            "triplets",
            "(1,1,4), (1/8,1/8,1) not in Δ; (1,3,3) in Δ∞",
            triplet_examples
        ),
        fx!(
            "four_point_fn_decreases",
            "f(2) = 1 < f(1) = 2",
            isometry_example_fn_decreases
        ),
        fx!(
            "euclid_example_euclidean",
            "the piecewise function preserves the Euclidean metric",
            euclid_example_preserves_euclidean
        ),
        fx!(
            "two_adic_base_triple",
            "z = 0, x = 1, y = -1 realizes k = 1 at p = 2",
            two_adic_base_triple
        ),
        fx!(
            "reciprocal_not_two_adic",
            "1/x is not 2-adic metric preserving, images (1,1,4)",
            reciprocal_not_two_adic
        ),
        fx!(
            "euclid_example_not_three_adic",
            "the piecewise function fails 3-adically",
            euclid_example_not_three_adic
        ),
        fx!(
            "euclid_example_no_extension",
            "no ultrametric-preserving extension at p = 3",
            euclid_example_has_no_extension
        ),
        fx!("prime_swap", "F*(2^n) = 3^n", prime_swap_on_powers),
        fx!("prime_shift", "F(p_k^n) = p_{k+1}^n", prime_shift_on_powers),
        fx!(
            "four_point_valid",
            "the four-point space is ultrametric",
            four_point_space_valid
        ),
        fx!(
            "four_point_image",
            "f ∘ d is an ultrametric",
            four_point_image_valid
        ),
        fx!(
            "four_point_range",
            "distances are {0,1,2,3}",
            four_point_range
        ),
        fx!(
            "four_point_isometry",
            "x_i -> x_{i+1} is an isometry onto f ∘ d",
            four_point_cyclic_isometry
        ),
        fx!(
            "four_point_dimension",
            "no isometric copy in the plane",
            four_point_needs_three_dimensions
        ),
        fx!(
            "four_point_order",
            "0 < g(1) <= g(3) and 0 < g(2) <= g(3)",
            four_point_order
        ),
        fx!(
            "four_point_preserving",
            "f preserves the ultrametric of the four-point space",
            four_point_fn_preserves_on_space
        ),
    ]
}

pub fn reproduce_all() -> Vec<FixtureOutcome> {
    fixtures().iter().map(Fixture::run).collect()
}
