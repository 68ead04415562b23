//! Action-filtered Chekanov-Eliashberg algebras of two-part Legendrians, their GF(2)
//! persistence barcodes, the barcode invariants `l_min,s` and bondedness, and the
//! closed-form chord time-length bounds derived from them.
//!
//! All filtration values are exact rationals.

pub mod bounds;
pub mod ce_dga;
pub mod constructions;
pub mod filtered_lch;
pub mod oracle;
pub mod persistence;
pub mod rational;
pub mod z2_linalg;

pub use ce_dga::{Chord, DgaSpec, Endpoint, Polynomial, Word};
pub use filtered_lch::{lch_barcode, LchResult};
pub use persistence::{Bar, Barcode, Death};
pub use rational::{Action, Extended, Rational};
