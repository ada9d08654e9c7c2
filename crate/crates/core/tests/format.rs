use proptest::prelude::*;
use qcfa::engine::closed_form;
use qcfa::model::{validate_machine, AnyMachine, Weight};
use qcfa::zoo;

const GOLDEN: &str = include_str!("golden/hairpin_k2.toml");

#[test]
fn golden_hairpin_file() {
    assert_eq!(zoo::build_fixed("hairpin", 2).unwrap().to_toml(), GOLDEN);
    let loaded = AnyMachine::from_toml(GOLDEN).unwrap();
    let AnyMachine::Rational(m) = loaded else {
        panic!("expected a rational machine")
    };
    let c = closed_form(&m, "agga", 100_000).unwrap();
    assert!(c.accept.to_f64() == 1.0);
}

#[test]
fn invalid_files_fail_to_load_or_validate() {
    assert!(AnyMachine::from_toml("name = 3").is_err());
    let broken = GOLDEN.replacen(
        "rows = [[\"1\", \"0\", \"0\"]",
        "rows = [[\"2\", \"0\", \"0\"]",
        1,
    );
    let AnyMachine::Rational(m) = AnyMachine::from_toml(&broken).unwrap() else {
        panic!("expected a rational machine")
    };
    assert!(!validate_machine(&m).is_empty());
    assert!(closed_form(&m, "agga", 100_000).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn catalog_machines_roundtrip(idx in 0usize..6, k in 1u32..6) {
        let name = zoo::CATALOG[idx].name;
        let m = zoo::build_fixed(name, k).unwrap();
        let text = m.to_toml();
        let back = AnyMachine::from_toml(&text).unwrap();
        prop_assert_eq!(back.to_toml(), text);
        let w: String = m.alphabet().iter().take(2).collect();
        let (a, b) = match (&m, &back) {
            (AnyMachine::Rational(x), AnyMachine::Rational(y)) => {
                (closed_form(x, &w, 100_000).unwrap().accept.to_f64(), closed_form(y, &w, 100_000).unwrap().accept.to_f64())
            }
            (AnyMachine::Float(x), AnyMachine::Float(y)) => {
                (closed_form(x, &w, 100_000).unwrap().accept, closed_form(y, &w, 100_000).unwrap().accept)
            }
            _ => return Err(TestCaseError::fail("backend changed")),
        };
        prop_assert_eq!(a, b);
    }
}
