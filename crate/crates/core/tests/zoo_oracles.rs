use num_traits::{One, Zero};
use proptest::prelude::*;
use qcfa::engine::{closed_form, round_stats};
use qcfa::model::{AnyMachine, BigRational, UnitaryOp, Weight};
use qcfa::oracles::{decide, hairpin_reject_prob, Language};
use qcfa::zoo::{self, build_hairpin, letter_unitary, HairpinParams, LetterEncoding, NUCLEOTIDES};

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

fn member(l: Language, w: &str) -> bool {
    decide(l, w).unwrap().member
}

fn blocks(letters: &str, counts: &[usize]) -> String {
    letters
        .chars()
        .zip(counts)
        .flat_map(|(c, &n)| std::iter::repeat_n(c, n))
        .collect()
}

#[test]
fn hairpin_oracle_matches_reject_probability() {
    for w in all_words(6) {
        assert_eq!(
            member(Language::Hairpin, &w),
            hairpin_reject_prob(&w).is_zero(),
            "{w:?}"
        );
    }
}

#[test]
fn hairpin_round_rejection_on_short_words() {
    let m = build_hairpin(HairpinParams::default());
    for w in all_words(4) {
        let p = round_stats(&m, &w, m.s_init()).unwrap().p_rej;
        if member(Language::Hairpin, &w) {
            assert!(p.is_zero(), "{w:?}");
        } else {
            assert!(p > BigRational::zero(), "{w:?}");
        }
    }
}

#[test]
fn paper_examples() {
    assert!(member(Language::Hairpin, "agga"));
    assert!(member(Language::Pseudoknot, "aguc"));
    assert!(!member(Language::Pseudoknot, "aagu"));
    assert!(member(Language::Dumbbell, "augc"));
    assert!(!member(Language::Dumbbell, "aguc"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn pseudoknot_is_the_intersection(w in "[agcu]{0,14}") {
        let both = member(Language::AuCount, &w) && member(Language::GcCount, &w);
        prop_assert_eq!(member(Language::Pseudoknot, &w), both);
    }

    #[test]
    fn pseudoknot_is_the_intersection_on_block_words(c in proptest::collection::vec(0usize..4, 4)) {
        let w = blocks("aguc", &c);
        let both = member(Language::AuCount, &w) && member(Language::GcCount, &w);
        prop_assert_eq!(member(Language::Pseudoknot, &w), both);
    }

    #[test]
    fn palindromes_compose_to_identity(half in proptest::collection::vec(proptest::sample::select(NUCLEOTIDES.to_vec()), 0..6), middle in proptest::option::of(proptest::sample::select(NUCLEOTIDES.to_vec()))) {
        let mut w: Vec<char> = half.clone();
        w.extend(middle);
        w.extend(half.iter().rev());
        let forward = w.iter().fold(UnitaryOp::<BigRational>::identity(3), |acc, &c| {
            acc.compose(&letter_unitary(c, LetterEncoding::Distinct).unwrap()).unwrap()
        });
        let inverse = w.iter().fold(UnitaryOp::<BigRational>::identity(3), |acc, &c| {
            acc.compose(&letter_unitary(c, LetterEncoding::Distinct).unwrap().inverse()).unwrap()
        });
        prop_assert!(forward.compose(&inverse).unwrap().matrix().is_identity(0.0));
    }

    #[test]
    fn composed_machines_accept_members_surely(n in 1usize..4, m in 1usize..4, k in 1u32..4) {
        let pk = blocks("aguc", &[n, m, n, m]);
        let db = blocks("augc", &[n, n, m, m]);
        for (name, w) in [("pseudoknot", pk), ("dumbbell", db)] {
            let AnyMachine::Float(machine) = zoo::build_fixed(name, k).unwrap() else { unreachable!() };
            let c = closed_form(&machine, &w, 1_000_000).unwrap();
            prop_assert!((c.accept - 1.0).abs() <= 1e-12, "{} {} {}", name, w, c.accept);
        }
    }

    #[test]
    fn hairpin_accepts_palindromes_surely(half in "[agcu]{0,3}", k in 1u32..4) {
        let w: String = half.chars().chain(half.chars().rev()).collect();
        let m = build_hairpin(HairpinParams::with_k(k));
        prop_assert!(closed_form(&m, &w, 1_000_000).unwrap().accept.is_one());
    }

    #[test]
    fn pseudoknot_rejects_unbalanced_words(n in 1usize..4, m in 1usize..4, d in 1usize..3) {
        let w = blocks("aguc", &[n, m, n + d, m]);
        let AnyMachine::Float(machine) = zoo::build(Language::Pseudoknot.name(), w.len(), 0.19).unwrap() else { unreachable!() };
        let c = closed_form(&machine, &w, 1_000_000).unwrap();
        prop_assert!(c.reject.to_f64() >= 0.81);
    }
}
