//! Exact ψ-operator engine for truncated Laurent series over Z_p, together
//! with exact evaluation and certification of the Fleck/Weisman family of
//! binomial-sum congruences.

pub mod congruences;
pub mod error;
pub mod expr;
pub mod padic;
pub mod psi;
pub mod report;
pub mod series;

pub use error::{Error, Result};
pub use padic::{PadicContext, Residue, Valuation};
pub use psi::{psi, psi_iterate, psi_reference, PsiResult};
pub use series::{Agreement, LaurentSeries, PrecisionProfile};
