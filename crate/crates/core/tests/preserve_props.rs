use metric_preserve::fixtures::euclid_example_fn;
use metric_preserve::funspec::{
    check_metric_preserving_sampled, is_triangle_triplet, FunctionSpec, SampleSet, Witness,
};
use metric_preserve::padic::{dp, Prime};
use metric_preserve::preserve::{
    adjacent_band_holds, check_p_metric_preserving, check_p_ultrametric_preserving, prime_swap,
    psi_step, witness_triple, ExponentWindow,
};
use metric_preserve::rational::{q, Rational};
use proptest::prelude::*;

fn prime() -> impl Strategy<Value = Prime> {
    prop::sample::select(vec![2u64, 3, 5, 7, 11]).prop_map(|p| Prime::new(p).unwrap())
}

fn window() -> impl Strategy<Value = ExponentWindow> {
    (-6i64..=3, 0i64..=6).prop_map(|(lo, len)| ExponentWindow::new(lo, lo + len).unwrap())
}

fn nonzero() -> impl Strategy<Value = Rational> {
    (-5000i64..=5000, 1i64..=5000).prop_filter_map("nonzero", |(n, d)| (n != 0).then(|| q(n, d)))
}

fn evaluable() -> impl Strategy<Value = FunctionSpec> {
    prop_oneof![
        Just(FunctionSpec::Canonical),
        Just(FunctionSpec::Reciprocal),
        Just(FunctionSpec::identity()),
        Just(euclid_example_fn()),
        Just(FunctionSpec::power_map(
            Prime::new(3).unwrap(),
            Prime::new(5).unwrap()
        )),
    ]
}

/// Values at `0` and at `p^k` over the window, from a small pool.
fn table_on_window() -> impl Strategy<Value = (Prime, ExponentWindow, FunctionSpec)> {
    (prime(), window()).prop_flat_map(|(p, w)| {
        let n = (w.hi() - w.lo() + 1) as usize;
        let values = prop::collection::vec(prop::sample::select(vec![0i64, 1, 2, 3, 4, 5, 8]), n);
        (Just(p), Just(w), values).prop_map(|(p, w, values)| {
            let entries = w
                .exponents()
                .zip(values)
                .map(|(k, v)| (p.pow(k), q(v, 1)))
                .chain([(Rational::zero(), Rational::zero())]);
            (p, w, FunctionSpec::tabulated(entries).unwrap())
        })
    })
}

proptest! {
    #[test]
    fn psi_agrees_on_distances(f in evaluable(), p in prime(), x in nonzero(), y in nonzero()) {
        let d = dp(&x, &y, p);
        prop_assert_eq!(psi_step(f.clone(), p).eval(&d).unwrap(), f.eval(&d).unwrap());
    }

    #[test]
    fn band_iff_no_bad_witness_triple((p, w, f) in table_on_window()) {
        let amenable = w.exponents().all(|k| f.eval(&p.pow(k)).unwrap().is_positive());
        let mut triples_ok = true;
        for m in w.exponents() {
            for n in m + 1..=w.hi() {
                let [x, y, z] = witness_triple(p, n, m).unwrap();
                let images = [dp(&x, &z, p), dp(&z, &y, p), dp(&x, &y, p)].map(|d| f.eval(&d).unwrap());
                if !is_triangle_triplet(&images[0], &images[1], &images[2]).unwrap() {
                    triples_ok = false;
                }
            }
        }
        let verdict = check_p_metric_preserving(&f, p, w).unwrap();
        prop_assert_eq!(verdict.passed, amenable && triples_ok);
        prop_assert!(verdict.reverify(&f).unwrap());
    }

    #[test]
    fn ultrametric_verdicts_reverify((p, w, f) in table_on_window()) {
        let verdict = check_p_ultrametric_preserving(&f, p, w).unwrap();
        prop_assert!(verdict.reverify(&f).unwrap());
        let monotone = w.exponents().zip(w.exponents().skip(1)).all(|(a, b)| {
            let (fa, fb) = (f.eval(&p.pow(a)).unwrap(), f.eval(&p.pow(b)).unwrap());
            fa.is_positive() && fa <= fb
        });
        prop_assert_eq!(verdict.passed, monotone && f.eval(&p.pow(w.hi())).unwrap().is_positive());
    }

    #[test]
    fn prime_swap_is_ultrametric_preserving(p in prime(), q_ in prime(), w in window()) {
        let f = prime_swap(p.get(), q_.get()).unwrap();
        prop_assert!(check_p_ultrametric_preserving(&f, p, w).unwrap().passed);
    }
}

#[test]
fn witness_triples_verify() {
    for p in [2u64, 3, 5, 7, 11, 13] {
        let p = Prime::new(p).unwrap();
        for n in -6..=6 {
            for m in n + 1..=6 {
                let [x, y, z] = witness_triple(p, m, n).unwrap();
                assert_eq!(dp(&x, &z, p), p.pow(m));
                assert_eq!(dp(&z, &y, p), p.pow(m));
                assert_eq!(dp(&x, &y, p), p.pow(n));
            }
        }
    }
}

#[test]
fn prime_swap_from_two_breaks_triangles() {
    for q_ in [3u64, 5, 7] {
        let f = prime_swap(2, q_).unwrap();
        let qp = Prime::new(q_).unwrap();
        for n in 0..5 {
            let (small, big) = (q(1, 2).pow(n + 1), q(1, 2).pow(n));
            let samples = SampleSet::new([Rational::zero(), small.clone(), big.clone()]).unwrap();
            let v = check_metric_preserving_sampled(&f, &samples).unwrap();
            assert_eq!(
                v.witness,
                Some(Witness::Triple {
                    args: [small.clone(), small, big],
                    images: [qp.pow(-(n + 1)), qp.pow(-(n + 1)), qp.pow(-n)],
                })
            );
        }
    }
}

#[test]
fn reciprocal_adjacent_band_is_not_enough() {
    let two = Prime::new(2).unwrap();
    let w = ExponentWindow::default();
    assert!(adjacent_band_holds(&FunctionSpec::Reciprocal, two, w).unwrap());
    assert!(
        !check_p_metric_preserving(&FunctionSpec::Reciprocal, two, w)
            .unwrap()
            .passed
    );
}
