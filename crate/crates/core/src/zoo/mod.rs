//! The RNA-structure machines and their building blocks.
//!
//! * [`build_hairpin`]: palindromes over `{a, u, g, c}`, rational backend;
//! * [`build_leq`], [`build_l1`], [`build_l2`]: count-equality machines on
//!   one qubit, float backend;
//! * [`intersect`] and [`build_pseudoknot`]: sequential composition;
//! * [`build_dumbbell`]: two equality phases on adjacent segments.
//!
//! Every round-structured machine declares its round markers, so
//! [`crate::engine::closed_form`] can evaluate it exactly.

mod catalog;
mod dumbbell;
mod hairpin;
mod intersect;
mod leq;
mod parts;
mod shape;

pub use catalog::{
    build, build_fixed, coins, entry, hairpin_k, min_rotation_reject, rotation_k, sub_epsilon,
    CatalogEntry, CatalogError, CATALOG, CATALOG_VERSION, MIN_COINS,
};
pub use dumbbell::{build_dumbbell, DUMBBELL_SHAPE};
pub use hairpin::{
    build_hairpin, letter_unitary, u_a, u_c, u_g, u_u, HairpinParams, LetterEncoding, NUCLEOTIDES,
};
pub use intersect::{
    build_pseudoknot, combined_error, intersect, prepend_guard, IntersectionSpec, PSEUDOKNOT_SHAPE,
};
pub use leq::{build_equal, build_l1, build_l2, build_leq, RotationParams, DEFAULT_ANGLE};
pub use shape::{BlockShape, Repeat, ShapeError};
