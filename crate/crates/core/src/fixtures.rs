//! Worked examples used by the test suites and `mpres examples reproduce`.

use crate::finspace::{validate_ultrametric, DistanceMatrixCandidate, FiniteUltrametricSpace};
use crate::funspec::{FunctionSpec, Tail};
use crate::rational::{q, Rational};

/// `x` on `[0,1]`, `2-x` on `[1,3/2]`, `3x/4 - 5/8` on `[3/2,2]`,
/// `-3x/4 + 19/8` on `[2,3]`, `3x/4 - 17/8` on `[3,7/2]`, `1/2` after.
///
/// Not 3-adic metric preserving. Also not Euclidean metric preserving:
/// `(f(1), f(3), f(4)) = (1, 1/8, 1/2)` is not a triangle triplet.
pub fn euclid_example_fn() -> FunctionSpec {
    FunctionSpec::piecewise_linear(
        vec![
            (q(0, 1), q(0, 1)),
            (q(1, 1), q(1, 1)),
            (q(3, 2), q(1, 2)),
            (q(2, 1), q(7, 8)),
            (q(3, 1), q(1, 8)),
            (q(7, 2), q(1, 2)),
        ],
        Tail::Constant(q(1, 2)),
    )
    .expect("valid piecewise-linear function")
}

/// `2t` on `[0,1]`, `3-t` on `[1,2]`, `4t/3 - 1` on `[2,3]`, `3` after.
pub fn isometry_example_fn() -> FunctionSpec {
    FunctionSpec::piecewise_linear(
        vec![
            (q(0, 1), q(0, 1)),
            (q(1, 1), q(2, 1)),
            (q(2, 1), q(1, 1)),
            (q(3, 1), q(3, 1)),
        ],
        Tail::Constant(q(3, 1)),
    )
    .expect("valid piecewise-linear function")
}

fn labeled(prefix: &str, rows: [[i64; 4]; 4]) -> FiniteUltrametricSpace {
    let labels = (1..=4).map(|i| format!("{prefix}{i}")).collect();
    let dist = rows
        .iter()
        .map(|r| r.iter().map(|&v| Rational::from(v)).collect())
        .collect();
    validate_ultrametric(DistanceMatrixCandidate::new(labels, dist).expect("symmetric"))
        .expect("ultrametric fixture")
}

/// Four points: `d(x1,x3) = 1`, `d(x2,x4) = 2`, every other pair at 3.
pub fn isometry_example_space() -> FiniteUltrametricSpace {
    labeled(
        "x",
        [[0, 3, 1, 3], [3, 0, 3, 2], [1, 3, 0, 3], [3, 2, 3, 0]],
    )
}

/// A four-point configuration realizable in 3-space: `d(y1,y2) = 2`,
/// `d(y3,y4) = 1`, all other pairs at 3.
pub fn euclidean_config_space() -> FiniteUltrametricSpace {
    labeled(
        "y",
        [[0, 2, 3, 3], [2, 0, 3, 3], [3, 3, 0, 1], [3, 3, 1, 0]],
    )
}

/// Three points with sides `(base, leg, leg)`, `0 < base <= leg`.
pub fn isosceles_space(base: Rational, leg: Rational) -> FiniteUltrametricSpace {
    let z = Rational::zero();
    let m = vec![
        vec![z.clone(), base.clone(), leg.clone()],
        vec![base, z.clone(), leg.clone()],
        vec![leg.clone(), leg, z],
    ];
    validate_ultrametric(DistanceMatrixCandidate::unlabeled(m).expect("symmetric"))
        .expect("isosceles")
}
