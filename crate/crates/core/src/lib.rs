//! Numerical workbench for eigenstates of the single-mode two-photon algebra.
//!
//! The algebra is spanned by `{N, a², a†², a, a†, 1}`. A general element
//! `β₁N + β₂a² + β₃a†² + β₄a + β₅a†` acts in the Bargmann space of entire
//! functions `f(α) = Σ cₙ αⁿ/√n!` as the differential operator
//! `β₂ d²/dα² + (β₁α + β₄) d/dα + (β₃α² + β₅α)`, so its eigenstates are the
//! solutions of a second-order linear ODE. This crate classifies and solves
//! that eigenvalue problem in closed form ([`solver`]), provides the special
//! functions the closed forms need ([`complexfn`]), cross-checks everything
//! against brute-force truncated Fock-space linear algebra ([`oracle`]),
//! wires up the named state families — coherent, displaced/squeezed Fock,
//! Schrödinger cats, SU(1,1) intelligent states ([`zoo`]) — and computes
//! uncertainty and photon-statistics reports from Fock coefficients
//! ([`moments`]).
//!
//! Everything is pure `f64`/`Complex64` computation with no shared state;
//! all types are `Send + Sync` and safe to use from multiple threads.

pub mod complexfn;
mod linalg;
pub mod moments;
pub mod oracle;
pub mod solver;
pub mod zoo;

/// Complex scalar used everywhere in this crate.
pub type C64 = num_complex::Complex64;

pub use moments::{HusimiField, HusimiGrid, IntelligenceKind, MomentReport, PhotonStats};
pub use oracle::{OperatorMatrix, Residual};
pub use solver::{AlgebraSpec, AnalyticState, CaseTag, DeltaBranch, DerivedParams, FockVector};
pub use zoo::{BuildConfig, CatParam, DisplacedSqueezedFrame, FamilySpec, ISParam, SqueezeParam, StateBundle};
