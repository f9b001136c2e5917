//! Computational toolkit for the Jouanolou foliation of the complex projective plane.
//!
//! The crate is organised by task:
//!
//! - [`field`]: sparse homogeneous polynomial vector fields on C³, the Jouanolou
//!   family, symbolic divergence and the divergence-free normalisation.
//! - [`flow`]: the real field `W = Re(ρX)`, the mixed curve `B`, the sink test
//!   on `B`, singularity analysis and trajectory integration with Fatou/Julia
//!   classification.
//! - [`exact`]: the exhaustive exact-integer check of the lattice condition
//!   `C_N` that certifies the transversality property for `J_2`.
//! - [`pnorm`]: the ℓᵖ generalisation of the transversality ratio and the
//!   sampled sweep over `p`.
//! - [`render`]: escape-time images of the Julia set on a sphere around a
//!   singularity.
//! - [`symmetry`]: the order-21 automorphism group of `J_2`, invariance checks
//!   and the invariant quartic.

mod clock;
pub mod complex3;
pub mod exact;
pub mod field;
pub mod flow;
pub mod par;
pub mod pnorm;
pub mod render;
pub mod symmetry;

pub use complex3::{hermitian_dot, Complex3, C64};
pub use field::{jouanolou_field, HomogeneousField};
pub use flow::ProjPoint;
