//! Term rewriting restricted by forbidden patterns.
//!
//! The crate covers plain many-sorted rewriting, rewriting under forbidden
//! patterns, the simple/canonical pattern classes, a transformation of a
//! restricted system into an ordinary rewrite system whose ground
//! termination coincides with that of the restricted relation, and bounded
//! checking utilities.

pub mod analysis;
pub mod error;
pub mod patterns;
pub mod rewriting;
pub mod syntax;
pub mod term;
pub mod transform;
pub mod unify;

pub use error::Error;
pub use patterns::{ForbiddenPattern, Mode, PatternSystem};
pub use rewriting::{Rule, Trs};
pub use syntax::{parse_rule, parse_system, parse_term};
pub use term::{FunSym, Position, Signature, Sort, Substitution, Term, Variable};
