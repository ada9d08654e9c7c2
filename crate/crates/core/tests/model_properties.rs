use num_traits::{One, Zero};
use proptest::prelude::*;
use qcfa::engine::branch_sets;
use qcfa::model::{
    apply_unitary, rational, step, validate_machine, AnyMachine, BigRational, Machine, Scalar,
    StateVector, Tape, UnitaryOp, Weight,
};
use qcfa::zoo::{
    self, build_hairpin, letter_unitary, u_a, u_g, HairpinParams, LetterEncoding, NUCLEOTIDES,
};

fn word(max: usize) -> impl Strategy<Value = String> {
    proptest::collection::vec(proptest::sample::select(NUCLEOTIDES.to_vec()), 0..=max)
        .prop_map(|cs| cs.into_iter().collect())
}

fn all_words(max: usize) -> Vec<String> {
    let mut all = vec![String::new()];
    let mut layer = vec![String::new()];
    for _ in 0..max {
        layer = layer
            .iter()
            .flat_map(|w| NUCLEOTIDES.iter().map(move |c| format!("{w}{c}")))
            .collect();
        all.extend(layer.iter().cloned());
    }
    all
}

fn catalog_machines() -> Vec<AnyMachine> {
    ["hairpin", "pseudoknot", "dumbbell", "l1", "l2"]
        .iter()
        .map(|n| zoo::build_fixed(n, 1).unwrap())
        .collect()
}

/// Sums successor probabilities over every live branch reached within
/// `steps` steps and returns the worst deviation from one.
fn successor_sum_error<S: Scalar>(m: &Machine<S>, w: &str, steps: u64) -> f64
where
    S::Prob: qcfa::model::IntoWeight<f64>,
{
    let tape = Tape::new(w);
    let mut worst: f64 = 0.0;
    for set in branch_sets::<S, f64>(m, w, steps).unwrap() {
        for b in &set.live {
            let succ = step(m, b.classical, b.head, &b.quantum, &tape).unwrap();
            let total = succ.iter().fold(<S::Prob as Zero>::zero(), |acc, s| {
                acc + s.probability.clone()
            });
            if <S::Prob as Weight>::EXACT {
                assert!(total.is_one(), "{w:?}: successor mass {total:?}");
            }
            worst = worst.max((total.to_f64() - 1.0).abs());
        }
    }
    worst
}

#[test]
fn zoo_machines_are_well_formed() {
    for m in catalog_machines() {
        let violations = match &m {
            AnyMachine::Rational(m) => validate_machine(m),
            AnyMachine::Float(m) => validate_machine(m),
        };
        assert!(violations.is_empty(), "{}: {violations:?}", m.name());
    }
}

#[test]
fn letter_unitaries_are_exactly_orthogonal() {
    for enc in [LetterEncoding::Distinct, LetterEncoding::Paired] {
        for c in NUCLEOTIDES {
            let u = letter_unitary(c, enc).unwrap();
            assert!(u.is_unitary());
            assert_eq!(u.inverse().matrix(), &u.matrix().transpose(), "{c}");
        }
    }
    assert_eq!(u_a().inverse().matrix(), &u_a().matrix().transpose());
    assert_eq!(u_g().inverse().matrix(), &u_g().matrix().transpose());
}

#[test]
fn head_stays_on_tape_for_all_short_words() {
    for m in catalog_machines() {
        let fm = m.to_float();
        for w in all_words(6)
            .into_iter()
            .filter(|w| w.chars().all(|c| m.alphabet().contains(&c)))
        {
            let last = w.chars().count() + 1;
            for set in branch_sets::<_, f64>(&fm, &w, 60).unwrap() {
                assert!(
                    set.live.iter().all(|b| b.head <= last),
                    "{} {w:?}",
                    m.name()
                );
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unitaries_preserve_norm_exactly(
        amps in proptest::collection::vec((-9i64..=9, 1i64..=9), 3),
        letters in proptest::collection::vec(proptest::sample::select(NUCLEOTIDES.to_vec()), 1..8),
    ) {
        let v = StateVector::new(amps.iter().map(|&(p, q)| rational(p, q)).collect()).unwrap();
        let mut u = v.clone();
        for c in letters {
            u = apply_unitary(&letter_unitary(c, LetterEncoding::Distinct).unwrap(), &u).unwrap();
        }
        prop_assert_eq!(u.norm_sqr(), v.norm_sqr());
    }

    #[test]
    fn products_invert_by_transpose(letters in proptest::collection::vec(proptest::sample::select(NUCLEOTIDES.to_vec()), 1..10)) {
        let product = letters.iter().fold(UnitaryOp::<BigRational>::identity(3), |acc, &c| {
            acc.compose(&letter_unitary(c, LetterEncoding::Distinct).unwrap()).unwrap()
        });
        let back = product.matrix().transpose().matmul(product.matrix()).unwrap();
        prop_assert!(back.is_identity(0.0));
    }

    #[test]
    fn successor_probabilities_sum_to_one(w in word(5), k in 1u32..4) {
        let hairpin = build_hairpin(HairpinParams::with_k(k));
        successor_sum_error(&hairpin, &w, 40);
        for name in ["pseudoknot", "dumbbell"] {
            if let AnyMachine::Float(m) = zoo::build_fixed(name, k).unwrap() {
                prop_assert!(successor_sum_error(&m, &w, 40) <= 1e-12);
            }
        }
    }
}
