//! Exact symbolic toolkit for semigroup compactifications of the affine
//! line in characteristic p and their infinitesimal symmetries.
//!
//! The crate provides exact arithmetic in triangular quotient rings over
//! F_p and F_p(t_1,…,t_m) (`exactalg`), the skew polynomial ring R[F;σ]
//! (`skewpoly`), the unipotent group schemes U_n and the iterated
//! semidirect product with the additive and multiplicative groups
//! (`ugroup`), a numerical semigroup toolkit (`numsemigroup`), the
//! semigroup curves with their extension criteria and invariants
//! (`curvemodel`), twisted forms of the additive group in Russell form
//! (`twistforms`), and verification suites with machine-readable reports
//! (`report`, `suites`).
//!
//! With the default `parallel` feature, grid verification and
//! per-generator checks run on rayon; without it everything runs
//! sequentially with no rayon dependency.

pub mod curvemodel;
pub mod error;
pub mod exactalg;
pub mod numsemigroup;
pub mod par;
pub mod report;
pub mod skewpoly;
pub mod suites;
pub mod twistforms;
pub mod ugroup;

pub use error::{Error, Result};
