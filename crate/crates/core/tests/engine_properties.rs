use num_traits::{One, Zero};
use proptest::prelude::*;
use qcfa::engine::{
    closed_form, evolve_exact, evolve_weighted, geometric_closure, run_monte_carlo, RoundStats,
};
use qcfa::model::{rational, AnyMachine, BigRational, Machine, Scalar, Weight};
use qcfa::oracles::brute_force_accept_prob;
use qcfa::zoo::{self, build_hairpin, HairpinParams, NUCLEOTIDES};

fn words(alphabet: &[char], max: usize) -> Vec<String> {
    let mut all = vec![String::new()];
    let mut layer = vec![String::new()];
    for _ in 0..max {
        layer = layer
            .iter()
            .flat_map(|w| alphabet.iter().map(move |c| format!("{w}{c}")))
            .collect();
        all.extend(layer.iter().cloned());
    }
    all
}

fn agreement<S: Scalar>(m: &Machine<S>, w: &str) {
    let c = closed_form(m, w, 1_000_000).unwrap();
    let e = evolve_exact(m, w, 1e-6, 20_000_000).unwrap();
    assert!(!e.cutoff, "{} {w:?}", m.name());
    let (acc, rej) = (c.accept.to_f64(), c.reject.to_f64());
    let slack = e.residual + 1e-12;
    assert!(
        acc >= e.accepted - 1e-12 && acc <= e.accepted + slack,
        "{} {w:?}: {acc} vs {e:?}",
        m.name()
    );
    assert!(
        rej >= e.rejected - 1e-12 && rej <= e.rejected + slack,
        "{} {w:?}: {rej} vs {e:?}",
        m.name()
    );
}

#[test]
fn closed_form_agrees_with_evolution_on_every_zoo_machine() {
    for name in ["hairpin", "pseudoknot", "dumbbell", "l1", "l2", "leq"] {
        let m = zoo::build_fixed(name, 2).unwrap();
        for w in words(m.alphabet(), 4) {
            match &m {
                AnyMachine::Rational(m) => agreement(m, &w),
                AnyMachine::Float(m) => agreement(m, &w),
            }
        }
    }
}

#[test]
fn exact_evolution_conserves_mass() {
    let m = build_hairpin(HairpinParams::with_k(1));
    for w in ["", "a", "ag", "aug", "agga"] {
        let e = evolve_weighted::<_, BigRational>(&m, w, f64::MIN_POSITIVE, 120).unwrap();
        assert_eq!(e.max_conservation_error, 0.0);
        assert!((e.accepted + e.rejected + e.residual).is_one());
    }
}

#[test]
fn series_matches_closure_on_grid() {
    let grid = [0.001, 0.01, 0.1, 0.5, 0.9];
    for &a in &grid {
        for &r in &grid {
            let (acc, rej) = geometric_closure(&RoundStats::new(a, r)).unwrap();
            let (sa, sr) = brute_force_accept_prob(a, r).unwrap();
            assert!(
                (acc - sa).abs() <= 1e-12 && (rej - sr).abs() <= 1e-12,
                "({a}, {r})"
            );
        }
    }
}

#[test]
fn monte_carlo_within_four_sigma() {
    let m = build_hairpin(HairpinParams::with_k(3));
    for w in ["ag", "agga", "gc"] {
        let exact = closed_form(&m, w, 100_000).unwrap().accept.to_f64();
        let runs = 20_000;
        let mc = run_monte_carlo(&m, w, runs, 7, 1_000_000).unwrap();
        let sigma = (exact * (1.0 - exact) / runs as f64).sqrt().max(1e-12);
        assert!(
            (mc.accept_frequency() - exact).abs() <= 4.0 * sigma,
            "{w}: {} vs {exact}",
            mc.accept_frequency()
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn closure_edges(p in 1i64..=1000) {
        let p = rational(p, 1000);
        let (a, r) = geometric_closure(&RoundStats::new(p.clone(), BigRational::zero())).unwrap();
        prop_assert!(a.is_one() && r.is_zero());
        let (a, r) = geometric_closure(&RoundStats::new(BigRational::zero(), p)).unwrap();
        prop_assert!(a.is_zero() && r.is_one());
    }

    #[test]
    fn closure_outputs_sum_to_one(a in 1i64..=1000, r in 0i64..=1000) {
        let (acc, rej) = geometric_closure(&RoundStats::new(rational(a, 1000), rational(r, 1000))).unwrap();
        prop_assert!((acc + rej).is_one());
    }

    #[test]
    fn monte_carlo_is_reproducible(seed in any::<u64>(), runs in 1u64..40, idx in 0usize..4) {
        let m = build_hairpin(HairpinParams::with_k(2));
        let w = ["ag", "aa", "gcu", ""][idx];
        let first = run_monte_carlo(&m, w, runs, seed, 100_000).unwrap();
        let second = run_monte_carlo(&m, w, runs, seed, 100_000).unwrap();
        prop_assert_eq!(&first, &second);
        prop_assert!(first.runs.windows(2).all(|p| p[0].run_index < p[1].run_index));
        prop_assert_eq!(first.accepts + first.rejects + first.cutoffs, runs);
    }

    #[test]
    fn float_and_rational_backends_agree(w in proptest::collection::vec(proptest::sample::select(NUCLEOTIDES.to_vec()), 0..5)) {
        let w: String = w.into_iter().collect();
        let m = build_hairpin(HairpinParams::with_k(2));
        let exact = closed_form(&m, &w, 100_000).unwrap();
        let float = closed_form(&m.map_scalar(|x| qcfa::model::Complex64::new(x.to_f64(), 0.0)), &w, 100_000).unwrap();
        prop_assert!((exact.accept.to_f64() - float.accept).abs() <= 1e-9);
    }
}
