//! Dedekind eta function toolkit.
//!
//! * [`qseries`]: exact truncated series for the pentagonal, triple-product
//!   and character-series identities.
//! * [`dedekind`]: exact Dedekind sums, reciprocity and the multiplier ω.
//! * [`modgroup`]: PSL(2, ℤ), its action on ℍ, generator words and
//!   fundamental-domain reduction.
//! * [`eval`]: floating-point η evaluators with truncation bounds, and the
//!   theta and Poisson residuals.
//! * [`campaign`]: randomized and exhaustive verification runs built on the
//!   above.

pub mod campaign;
pub mod character;
pub mod dedekind;
pub mod eval;
pub mod modgroup;
pub mod par;
pub mod qseries;

pub use dedekind::{dedekind_sum_fast, dedekind_sum_naive, omega, DedekindError};
pub use eval::{EvalError, EvalResult, TransformContext};
pub use modgroup::{GeneratorWord, ModGroupError, ModularMatrix, UpperHalfPoint};
pub use num_bigint::BigInt;
pub use num_complex::Complex64;
pub use num_rational::BigRational;
pub use qseries::{BiSeries, QSeries};
