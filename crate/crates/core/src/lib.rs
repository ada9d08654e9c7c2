//! Simulation of two-way quantum finite automata with classical states.
//!
//! * [`model`]: machines, register states, operators, single steps, a TOML
//!   file format and well-formedness checks;
//! * [`engine`]: exact stepwise evolution, per-round statistics with the
//!   geometric closure, seeded Monte Carlo, and one-sided classification;
//! * [`zoo`]: machines for palindromes (hairpin loops), pseudoknots and
//!   dumbbells over `{a, u, g, c}`;
//! * [`oracles`]: classical ground truth for all of the above.
//!
//! ```
//! use qcfa::engine::{closed_form, round_stats};
//! use qcfa::model::rational;
//! use qcfa::zoo::{build_hairpin, HairpinParams};
//!
//! let m = build_hairpin(HairpinParams::with_k(2));
//! let round = round_stats(&m, "agga", m.s_init()).unwrap();
//! assert_eq!(round.p_acc, rational(1, 20));
//! assert_eq!(closed_form(&m, "agga", 100_000).unwrap().accept, rational(1, 1));
//! ```

pub mod engine;
pub mod model;
pub mod oracles;
pub mod zoo;
