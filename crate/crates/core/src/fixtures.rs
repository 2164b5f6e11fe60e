//! Built-in presentations.
//!
//! `gamma1` is the four-generator, six-relator presentation shipped in
//! `fixtures/gamma1.fp`. In the tower reports it is level 0; its 3-descent
//! kernel at level 1 is `gamma2`, which is never stored and is always
//! recomputed from `gamma1`. That level-1 kernel is the group whose mod-3
//! quotient must be `(Z/3)^3` for the Betti-zero conclusion to apply.

use std::sync::OnceLock;

use crate::fpres::{parse_presentation, Presentation};
use crate::tower::{descend_once, Caps};

pub const GAMMA1_TEXT: &str = include_str!("../fixtures/gamma1.fp");

pub const FIXTURE_NAMES: [&str; 2] = ["gamma1", "gamma2"];

pub fn gamma1() -> Presentation {
    parse_presentation(GAMMA1_TEXT).expect("gamma1 fixture parses")
}

/// Tietze-simplified kernel of `gamma1` onto its maximal elementary
/// abelian 3-quotient.
pub fn gamma2() -> Presentation {
    static CELL: OnceLock<Presentation> = OnceLock::new();
    CELL.get_or_init(|| {
        descend_once(&gamma1(), 3, &Caps::default())
            .expect("gamma1 descends within default caps")
            .kernel
    })
    .clone()
}

pub fn fixture(name: &str) -> Option<Presentation> {
    match name {
        "gamma1" => Some(gamma1()),
        "gamma2" => Some(gamma2()),
        _ => None,
    }
}
