//! One line per acceptance criterion; exits nonzero if any fails.

mod common;

use std::process::ExitCode;

use common::{
    gram_matrix, isotone_on_order, pool6, preserves_each_space, random_class, random_space,
    random_table, rational_rank, table,
};
use metric_preserve::classposet::{
    all_small_spaces, build_extension, check_class_preserving, counterexample_fn,
    is_totally_ordered, poset_u, ran_u, SpaceClass,
};
use metric_preserve::finspace::{
    all_isometries, apply_fn, embed_min_dimension, gram_rank, is_isometry, isometry_search,
    validate_ultrametric,
};
use metric_preserve::fixtures::{euclid_example_fn, isometry_example_fn, isometry_example_space};
use metric_preserve::funspec::{
    check_euclid_preserving_sampled, check_metric_preserving_sampled, euclid_grid,
    is_triangle_triplet, FunctionSpec, SampleSet, Witness,
};
use metric_preserve::padic::{digits, dp, padic_abs, Prime};
use metric_preserve::preserve::{
    adjacent_band_holds, check_p_metric_preserving, check_p_ultrametric_preserving, prime_swap,
    witness_triple, ExponentWindow,
};
use metric_preserve::rational::{q, Rational};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn prime(p: u64) -> Prime {
    Prime::new(p).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn eq<T: PartialEq + std::fmt::Debug>(what: &str, got: T, want: T) -> Result<(), String> {
    ensure(got == want, || {
        format!("{what}: got {got:?}, expected {want:?}")
    })
}

fn err<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

fn c1_abs_of_25_18() -> Outcome {
    let x = q(25, 18);
    for (p, want) in [(2, q(2, 1)), (3, q(9, 1)), (5, q(1, 25)), (7, q(1, 1))] {
        eq(
            &format!("|25/18|_{p}"),
            padic_abs(&x, prime(p)).to_rational(),
            want,
        )?;
    }
    Ok("2, 9, 1/25, 1".into())
}

fn c2_digits() -> Outcome {
    let p = prime(3);
    eq(
        "17",
        digits(&q(17, 1), p, 2).map_err(err)?.positional(),
        Some("122".into()),
    )?;
    eq(
        "-1",
        digits(&q(-1, 1), p, 11).map_err(err)?.digits,
        vec![2; 12],
    )?;
    let half = digits(&q(1, 2), p, 11).map_err(err)?;
    eq("1/2 d0", half.digit(0), Some(2))?;
    for k in 1..=11 {
        eq(&format!("1/2 d{k}"), half.digit(k), Some(1))?;
    }
    Ok("17 = 122, -1 = ...2222, 1/2 = ...1112".into())
}

fn c3_geometric_series() -> Outcome {
    for p in [2, 3, 5, 7] {
        let p = prime(p);
        let limit = (Rational::one() - p.as_rational()).recip().unwrap();
        let mut partial = Rational::zero();
        for n in 1..=50 {
            partial = partial + p.pow(n);
            let got = dp(&partial, &limit, p);
            if got != p.pow(-(n + 1)) {
                let from_zero = dp(&(&partial + &Rational::one()), &limit, p);
                return Err(format!(
                    "d_{p}(sum_(k=1..{n}) {p}^k, 1/(1-{p})) = {got}, expected {}; the sum from k = 0 gives {from_zero}",
                    p.pow(-(n + 1))
                ));
            }
        }
    }
    Ok("p in {2,3,5,7}, n = 1..50".into())
}

fn c4_euclid_example() -> Outcome {
    let f = euclid_example_fn();
    let grid = euclid_grid(&f, &q(1, 8), &q(8, 1));
    let verdict = check_euclid_preserving_sampled(&f, &grid).map_err(err)?;
    let euclid = match &verdict.witness {
        None => Ok(()),
        Some(Witness::Triple { args, images }) => Err(format!(
            "Euclidean check fails on the grid: (f(a), f(b), f(a+b)) = ({}, {}, {}) at (a, b) = ({}, {})",
            images[0], images[1], images[2], args[0], args[1]
        )),
        Some(w) => Err(format!("Euclidean check fails: {w:?}")),
    };

    let p = prime(3);
    let [a, b, c] = [q(1, 2), q(1, 3), q(1, 4)];
    let images = [dp(&a, &b, p), dp(&b, &c, p), dp(&a, &c, p)].map(|d| f.eval(&d).unwrap());
    eq(
        "images of (1/2, 1/3, 1/4)",
        images.to_vec(),
        vec![q(1, 8), q(1, 8), q(1, 1)],
    )?;
    ensure(
        !is_triangle_triplet(&images[0], &images[1], &images[2]).map_err(err)?,
        || "(1/8, 1/8, 1) is a triangle triplet".into(),
    )?;
    let w = ExponentWindow::new(-2, 2).map_err(err)?;
    let v = check_p_metric_preserving(&f, p, w).map_err(err)?;
    ensure(!v.passed, || "3-adic check passed".into())?;
    let found = v.witness.and_then(|w| w.images).map(|i| i.to_vec());
    eq(
        "3-adic witness images",
        found,
        Some(vec![q(1, 8), q(1, 8), q(1, 1)]),
    )?;
    euclid?;
    Ok("grid passes; 3-adic images (1/8, 1/8, 1)".into())
}

fn c5_reciprocal() -> Outcome {
    let f = FunctionSpec::Reciprocal;
    let two = prime(2);
    let w = ExponentWindow::new(-16, 16).map_err(err)?;
    for n in -16..=16 {
        let (lo, hi) = (
            f.eval(&two.pow(n - 1)).map_err(err)?,
            f.eval(&two.pow(n)).map_err(err)?,
        );
        ensure(lo <= q(2, 1) * hi, || {
            format!("f(2^{}) > 2 f(2^{n})", n - 1)
        })?;
    }
    ensure(adjacent_band_holds(&f, two, w).map_err(err)?, || {
        "library band check disagrees".into()
    })?;
    let v = check_p_metric_preserving(&f, two, w).map_err(err)?;
    ensure(!v.passed, || "2-adic check passed".into())?;
    let wit = v.witness.ok_or("no witness")?;
    let [x, y, z] = wit.triple.clone().ok_or("no triple")?;
    let images = [dp(&x, &z, two), dp(&z, &y, two), dp(&x, &y, two)].map(|d| f.eval(&d).unwrap());
    eq(
        "recomputed images",
        images.to_vec(),
        vec![q(1, 1), q(1, 1), q(4, 1)],
    )?;
    eq(
        "reported images",
        wit.images.map(|i| i.to_vec()),
        Some(images.to_vec()),
    )?;
    Ok(format!("band holds; witness ({x}, {y}, {z}) -> (1, 1, 4)"))
}

fn c6_witness_triples() -> Outcome {
    let mut count = 0;
    for p in [2, 3, 5, 7, 11] {
        let p = prime(p);
        for n in -5..=5 {
            for m in n + 1..=5 {
                let [x, y, z] = witness_triple(p, m, n).map_err(err)?;
                let got = [dp(&x, &z, p), dp(&z, &y, p), dp(&x, &y, p)];
                eq(
                    &format!("p = {p}, m = {m}, n = {n}"),
                    got.to_vec(),
                    vec![p.pow(m), p.pow(m), p.pow(n)],
                )?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} triples"))
}

fn c7_four_point_space() -> Outcome {
    let s = validate_ultrametric(isometry_example_space().as_candidate().clone()).map_err(err)?;
    let image =
        validate_ultrametric(apply_fn(&s, &isometry_example_fn()).map_err(err)?).map_err(err)?;
    let cyclic = [1, 2, 3, 0];
    ensure(is_isometry(&s, &image, &cyclic), || {
        "cyclic shift is not an isometry".into()
    })?;
    ensure(isometry_search(&s, &image).map_err(err)?.is_some(), || {
        "search found nothing".into()
    })?;
    ensure(
        all_isometries(&s, &image)
            .map_err(err)?
            .contains(&cyclic.to_vec()),
        || "search misses the cyclic shift".into(),
    )?;

    let u = SpaceClass::single(s.clone());
    let p = poset_u(&u);
    let want: Vec<(Rational, Rational)> = [(0, 1), (0, 2), (0, 3), (1, 3), (2, 3)]
        .iter()
        .map(|&(a, b)| (q(a, 1), q(b, 1)))
        .collect();
    eq("strict order", p.strict_pairs(), want)?;
    let mut diagonal = 0;
    for t in p.ground() {
        ensure(p.leq(t, t), || format!("{t} not reflexive"))?;
        diagonal += 1;
    }
    eq("order size", p.order().pairs().len(), diagonal + 5)?;
    ensure(!is_totally_ordered(&p), || "order is total".into())?;

    let g = counterexample_fn(&u).map_err(err)?;
    ensure(preserves_each_space(&g, &u), || {
        "counterexample does not preserve".into()
    })?;
    ensure(
        check_class_preserving(&g, &u).map_err(err)?.preserving,
        || "library rejects counterexample".into(),
    )?;
    let (g1, g2) = (
        g.eval(&q(1, 1)).map_err(err)?,
        g.eval(&q(2, 1)).map_err(err)?,
    );
    ensure(g1 > g2, || "counterexample is increasing on {1, 2}".into())?;

    eq(
        "embedding dimension",
        embed_min_dimension(&s).map_err(err)?,
        3,
    )?;
    eq("gram rank", gram_rank(&s), 3)?;
    eq("gram rank oracle", rational_rank(gram_matrix(&s)), 3)?;
    Ok("isometry, order, counterexample, dimension 3".into())
}

fn c8_class_preservation() -> Outcome {
    let mut rng = StdRng::seed_from_u64(8);
    let values = [q(0, 1), q(1, 2), q(1, 1), q(2, 1), q(3, 1)];
    let (mut total, mut yes) = (0, 0);
    for i in 0..1200 {
        let u = random_class(&mut rng, 3, 5, &pool6());
        let f = random_table(&mut rng, &ran_u(&u), &values);
        let lhs = preserves_each_space(&f, &u);
        let rhs = isotone_on_order(&f, &u);
        let lib = check_class_preserving(&f, &u).map_err(err)?.preserving;
        ensure(lhs == rhs && rhs == lib, || {
            format!("instance {i}: lhs {lhs}, rhs {rhs}, library {lib}")
        })?;
        total += 1;
        yes += lhs as usize;
    }
    Ok(format!("{total} instances agree ({yes} preserving)"))
}

fn c9_small_spaces() -> Outcome {
    let pool = [q(1, 2), q(1, 1), q(3, 2), q(2, 1), q(3, 1)];
    let u = all_small_spaces(&pool, 3);
    let mut count = 0;
    for values in [vec![q(1, 1), q(2, 1)], vec![q(0, 1), q(1, 1), q(2, 1)]] {
        let k = values.len();
        for code in 0..k.pow(pool.len() as u32) {
            let mut c = code;
            let ys: Vec<Rational> = (0..pool.len())
                .map(|_| {
                    let y = values[c % k].clone();
                    c /= k;
                    y
                })
                .collect();
            let f = table(
                pool.iter()
                    .cloned()
                    .zip(ys.iter().cloned())
                    .chain([(Rational::zero(), Rational::zero())]),
            );
            let expected =
                ys.iter().all(Rational::is_positive) && ys.windows(2).all(|w| w[0] <= w[1]);
            let got = check_class_preserving(&f, &u).map_err(err)?.preserving;
            ensure(got == expected, || {
                format!("values {ys:?}: library {got}, expected {expected}")
            })?;
            count += 1;
        }
    }
    Ok(format!("{} spaces, {count} functions", u.spaces().len()))
}

fn c10_gram_rank() -> Outcome {
    let mut rng = StdRng::seed_from_u64(10);
    for i in 0..200 {
        let n = rng.gen_range(2..=6);
        let s = random_space(&mut rng, n, &pool6());
        eq(&format!("space {i} rank"), gram_rank(&s), n - 1)?;
        eq(
            &format!("space {i} oracle rank"),
            rational_rank(gram_matrix(&s)),
            n - 1,
        )?;
    }
    Ok("200 spaces".into())
}

fn c11_extensions() -> Outcome {
    let mut rng = StdRng::seed_from_u64(11);
    let mut built = 0;
    while built < 200 {
        let u = random_class(&mut rng, 3, 4, &pool6());
        let ran = ran_u(&u);
        if ran.len() < 2 || !is_totally_ordered(&poset_u(&u)) {
            continue;
        }
        let mut level = Rational::zero();
        let f = table(ran.iter().map(|t| {
            if t.is_positive() {
                level = &level + &q(rng.gen_range(0..3), 2);
                if level.is_zero() {
                    level = q(1, 2);
                }
            }
            (t.clone(), level.clone())
        }));
        ensure(
            check_class_preserving(&f, &u).map_err(err)?.preserving,
            || "input not preserving".into(),
        )?;
        let g = build_extension(&f, &u).map_err(err)?;
        let FunctionSpec::Step { initial, steps } = &g else {
            return Err(format!("extension is not a step function: {g:?}"));
        };
        ensure(initial.is_positive(), || "extension is not amenable".into())?;
        ensure(g.eval(&Rational::zero()).map_err(err)?.is_zero(), || {
            "g(0) != 0".into()
        })?;
        let mut prev = initial.clone();
        for (x, v) in steps {
            ensure(*v >= prev, || format!("extension decreases at {x}"))?;
            prev = v.clone();
        }
        for t in &ran {
            eq(
                &format!("g({t})"),
                g.eval(t).map_err(err)?,
                f.eval(t).map_err(err)?,
            )?;
        }
        ensure(
            check_class_preserving(&g, &u).map_err(err)?.preserving,
            || "extension not preserving".into(),
        )?;
        built += 1;
    }
    Ok(format!("{built} classes"))
}

fn c12_prime_swap() -> Outcome {
    let f = prime_swap(2, 3).map_err(err)?;
    let two = prime(2);
    let w = ExponentWindow::new(-16, 16).map_err(err)?;
    ensure(
        check_p_ultrametric_preserving(&f, two, w)
            .map_err(err)?
            .passed,
        || "2-ultrametric check fails".into(),
    )?;
    let samples = SampleSet::new([q(0, 1), q(1, 4), q(1, 2)]).map_err(err)?;
    let v = check_metric_preserving_sampled(&f, &samples).map_err(err)?;
    ensure(!v.passed, || "metric check passed".into())?;
    match v.witness {
        Some(Witness::Triple { images, .. }) => {
            eq("images", images.to_vec(), vec![q(1, 9), q(1, 9), q(1, 3)])?
        }
        other => return Err(format!("unexpected witness {other:?}")),
    }
    Ok("ultrametric on [-16, 16]; images (1/9, 1/9, 1/3)".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("1 |25/18|_p", c1_abs_of_25_18),
        ("2 digit expansions", c2_digits),
        ("3 geometric series limit", c3_geometric_series),
        (
            "4 piecewise example: Euclidean yes, 3-adic no",
            c4_euclid_example,
        ),
        ("5 reciprocal at p = 2", c5_reciprocal),
        ("6 witness triples", c6_witness_triples),
        ("7 four-point space end to end", c7_four_point_space),
        (
            "8 class preservation equals isotone order",
            c8_class_preservation,
        ),
        ("9 small spaces force increasing", c9_small_spaces),
        ("10 gram rank n - 1", c10_gram_rank),
        ("11 extensions of total orders", c11_extensions),
        ("12 prime swap 2 -> 3", c12_prime_swap),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {name}: {detail}");
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
