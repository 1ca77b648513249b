//! Finite order theory at desk scale.
//!
//! The crate builds the hierarchy of hereditary nontrivial antichains over a
//! finite base, treats finite preorders as Alexandrov spaces (opens are
//! downsets), enumerates open maps between them, and checks the finite
//! dualities between preorders and Heyting algebras of downsets and between
//! Kripke frames and their complex algebras. Every construction comes with an
//! exhaustive verifier so that claims about small instances can be checked by
//! brute force.
//!
//! Module map:
//!
//! * [`hsets`]: interned hereditary sets and their transitive-closure order.
//! * [`hierarchy`]: the finite stages `S_0(M) ⊆ S_1(M) ⊆ …` and their checks.
//! * [`order`]: finite preorders, downsets, isomorphism, enumeration.
//! * [`maps`]: open maps, the two Sierpiński test maps and the product
//!   obstruction search.
//! * [`heyting`]: Heyting algebras of downsets and join-irreducibles.
//! * [`kripke`]: Kripke frames, p-morphisms, the preorder coreflector and
//!   complex algebras.
//! * [`suites`]: the exhaustive verification suites driven by the CLI.

pub mod error;
pub mod heyting;
pub mod hierarchy;
pub mod hsets;
pub mod kripke;
pub mod maps;
pub mod order;
pub mod suites;

pub use error::{Error, Result};
pub use hierarchy::Hierarchy;
pub use hsets::{BasePoset, Id, Universe};
pub use order::{FinitePreorder, Stage, Subset};
