//! Numerical side: Hamiltonian flows on `R^2n`, chord search by shooting, the Maupertuis
//! oracle and conformal factors of lifted contact flows.
//!
//! Everything here is floating point. Rational bounds coming from `lchpm_core` are rounded up
//! before they are compared with measured times.

pub mod chord;
pub mod conformal;
pub mod flow;
pub mod hamiltonian;
pub mod maupertuis;
pub mod phase;
pub mod regions;

pub use chord::{find_chord, recheck_chord, verify_bound, BoundCheck, ChordResult, ShootingGrid};
pub use conformal::conformal_factor_track;
pub use flow::{integrate, Trajectory};
pub use hamiltonian::{Bump, ContactHamiltonian, Hamiltonian, HamiltonianDef, Potential};
pub use maupertuis::{maupertuis_chord, MaupertuisOptions};
pub use phase::PhasePoint;
pub use regions::{delta_separation, RegionDef, SourceSampling};
