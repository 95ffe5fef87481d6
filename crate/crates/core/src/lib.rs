//! Fixed-point iteration for pairs of nonself mappings `T₁, T₂: K → E`
//! under a nonexpansive retraction `P: E → K`.
//!
//! The crate is organised bottom-up:
//!
//! - [`space`]: vectors, norms, convex domains and metric projection.
//! - [`mapexpr`]: the expression language used to declare mappings in
//!   configuration files.
//! - [`mappings`]: mappings, retractions, the builtin registry and `(PT)ⁿ`.
//! - [`iterate`]: the two-mapping scheme plus Mann and Ishikawa baselines.
//! - [`certify`]: sampled checks of the mapping-class inequalities.
//! - [`diagnostics`]: checks on finished traces (recursive bounds, residual
//!   decay, Cauchy tails, rate fits).
//! - [`cli`]: configuration files, CSV/SVG output and the `retract-iter`
//!   command set.
//!
//! ```
//! use retract_iter::iterate::{run_scheme, RunConfig, Scheme, StepSequence, Terminal};
//! use retract_iter::mappings::MappingPair;
//! use retract_iter::space::Vector;
//!
//! let pair = MappingPair::paper_example();
//! let cfg = RunConfig::new(
//!     Scheme::PaperB,
//!     StepSequence::Constant(0.5),
//!     StepSequence::Constant(0.5),
//!     Vector::scalar(1.0).unwrap(),
//! );
//! let trace = run_scheme(&cfg, &pair, None).unwrap();
//! assert_eq!(trace.terminal, Terminal::TolReached);
//! ```

pub mod certify;
pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod iterate;
pub mod mapexpr;
pub mod mappings;
pub mod space;

pub use error::{Error, Result};
