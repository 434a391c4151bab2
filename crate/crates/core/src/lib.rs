//! Certified decisions for the Farkas alternative.
//!
//! For `A ∈ ℝ^{m×n}` and `b ∈ ℝ^m`, exactly one of the following holds:
//! `b = Ax` for some `x ≥ 0`, or some `y` has `Aᵀy ≥ 0` and `⟨b, y⟩ < 0`.
//! [`cone::farkas_decide`] returns whichever side applies together with a
//! certificate that [`cone::verify_result`] checks independently of how it
//! was found. The argument runs through the projection onto
//! `K = {Ax : x ≥ 0}`, conic (Carathéodory) decomposition with independent
//! supports, and closedness of `K`; each step is exposed here.
//!
//! Numerics are generic over [`scalar::Real`] (`f64`, `f32`). The aliases at
//! the crate root fix `f64`; [`f32`] holds the single-precision ones. The
//! [`oracle`] module decides small instances over exact rationals and shares
//! no code with the floating-point path.

pub mod closedness;
pub mod cone;
pub mod decomposition;
pub mod instances;
pub mod linalg;
pub mod oracle;
pub mod rng;
pub mod scalar;

pub use cone::{farkas_decide, project_onto_cone, verify_result, Branch, Verdict};
pub use linalg::{LinalgError, Support};
pub use scalar::Real;

pub type Matrix = linalg::Matrix<f64>;
pub type Vector = linalg::Vector<f64>;
pub type ConeInstance = cone::ConeInstance<f64>;
pub type ProjectionResult = cone::ProjectionResult<f64>;
pub type FarkasResult = cone::FarkasResult<f64>;
pub type Certificate = cone::Certificate<f64>;
pub type MembershipCertificate = cone::MembershipCertificate<f64>;
pub type SeparationCertificate = cone::SeparationCertificate<f64>;
pub type ConicDecomposition = decomposition::ConicDecomposition<f64>;
pub type SupportWitness = decomposition::SupportWitness<f64>;
pub type ClosednessReport = closedness::ClosednessReport<f64>;

/// Single-precision aliases.
pub mod f32 {
    use crate::{closedness, cone, decomposition, linalg};

    pub type Matrix = linalg::Matrix<f32>;
    pub type Vector = linalg::Vector<f32>;
    pub type ConeInstance = cone::ConeInstance<f32>;
    pub type ProjectionResult = cone::ProjectionResult<f32>;
    pub type FarkasResult = cone::FarkasResult<f32>;
    pub type Certificate = cone::Certificate<f32>;
    pub type MembershipCertificate = cone::MembershipCertificate<f32>;
    pub type SeparationCertificate = cone::SeparationCertificate<f32>;
    pub type ConicDecomposition = decomposition::ConicDecomposition<f32>;
    pub type SupportWitness = decomposition::SupportWitness<f32>;
    pub type ClosednessReport = closedness::ClosednessReport<f32>;
}
