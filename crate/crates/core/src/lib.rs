//! Finitely presented groups and p-descent towers.
//!
//! The pipeline: parse a presentation ([`fpres`]), map it onto its maximal
//! elementary abelian p-quotient ([`abelian`]), build the coset table of the
//! kernel ([`cosets`]), rewrite a presentation of the kernel ([`rewrite`]),
//! and certify homological facts about it with exact linear algebra
//! ([`exactlinalg`], [`baerq`]). [`tower`] iterates this.

pub mod abelian;
pub mod baerq;
pub mod cosets;
pub mod exactlinalg;
pub mod fixtures;
pub mod fpres;
pub mod rewrite;
pub mod tower;
pub mod word;

pub use abelian::{abelian_invariants, elementary_abelian_quotient, relation_matrix, AbelianInvariants, PHom};
pub use fpres::{parse_presentation, print_presentation, Presentation};
pub use word::{Letter, Word};
