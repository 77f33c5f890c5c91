//! Computable pieces of the theory of rearrangement-invariant spaces on [0,1].
//!
//! The crate is organized bottom-up:
//!
//! * [`dyadic`]: exact step functions on dyadic grids, Rademacher functions and sign matrices.
//! * [`rearrangement`]: distribution functions, decreasing rearrangements, equimeasurability.
//! * [`spaces`]: norms of L_p, Orlicz, Exp L^p, Lorentz and Marcinkiewicz spaces, duality,
//!   dilation indices and the log^{1/2} membership tests.
//! * [`weighted`]: weighted spaces X(w) and admissibility.
//! * [`rademacher`]: Rademacher coefficients and projections, Khintchine checks, ℓ₂-equivalence
//!   constants, multiplicator-norm brackets and the theorem-level predicate report.
//! * [`counterexample`]: the two-tier construction of f ∈ M(L₁) with an equimeasurable g ∉ M(L₁).
//!
//! Data-parallel batch work (Monte Carlo trials, multi-start searches, exhaustive enumerations)
//! goes through [`par`], which uses rayon when the `parallel` feature is on and runs
//! sequentially otherwise. Results are identical either way.

pub mod counterexample;
pub mod dyadic;
pub mod error;
pub mod exact;
pub mod par;
pub mod quad;
pub mod rademacher;
pub mod rearrangement;
pub mod spaces;
pub mod weighted;

mod serde_util;

pub use dyadic::{CoeffSeq, Rational, SignMatrix, StepFunction};
pub use error::{Error, Result};
pub use spaces::{OrliczFn, PhiFn, SpaceSpec};
pub use weighted::Weight;
