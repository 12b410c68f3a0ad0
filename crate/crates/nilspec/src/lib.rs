//! Isospectral deformation machinery for two-step nilpotent metric Lie
//! algebras and their compact quotients.
//!
//! A skew-symmetric pencil `j(z) = Σ zᵢ Jᵢ` determines a two-step nilpotent
//! metric Lie algebra `v ⊕ z`, a simply connected group with a left-invariant
//! metric, and — after quotienting the center by a lattice — a boundary
//! manifold diffeomorphic to a sphere times a torus. This crate builds all of
//! that at desk scale and verifies the computable claims about it:
//!
//! - [`linalg`]: dense symmetric eigensolver (cyclic Jacobi), characteristic
//!   polynomials (Faddeev–LeVerrier, with an exact rational mode), nullspaces.
//! - [`nilalg`]: bracket, group law, Levi-Civita connection (closed form and
//!   an independent Koszul route), curvature tensor, Ricci form, ambient
//!   scalar curvature.
//! - [`family`]: an explicit one-parameter deformation family of pencils with
//!   a closed-form Ricci block, plus the quadratic dimension bound for large
//!   families.
//! - [`isospec`]: certified isospectrality of pencils via characteristic
//!   polynomial sampling, with an exact rational mode, and the closed-form
//!   matching criterion for the deformation family.
//! - [`equiv`]: lattice automorphism groups, conjugacy invariants, a seeded
//!   orthogonal conjugacy search, and a tri-state lattice-equivalence verdict.
//! - [`boundary`]: scalar curvature of the boundary manifold by two
//!   independent routes, curvature extremes, horizontal geodesic lifts and
//!   their torus holonomy, and fiber geometry checks.
//!
//! All operations are pure functions over immutable values; everything is
//! deterministic given an explicit seed.

pub mod boundary;
pub mod equiv;
pub mod family;
pub mod isospec;
pub mod linalg;
pub mod nilalg;

pub use boundary::{BoundaryFrame, BoundaryPoint, FiberReport, ScalExtremes, ScalReport};
pub use equiv::{
    Certificate, ConjugacyOutcome, EquivalenceVerdict, InvariantWitness, LatticeBasis,
    SearchStats, VerdictState,
};
pub use family::{DeformationInterval, FamilyParams};
pub use isospec::{IsospecReport, IsospecVerdict, SpectraMode};
pub use linalg::{Matrix, PolyCoeffs, RationalMatrix, Tolerances};
pub use nilalg::{
    ConnectionTable, CurvatureTensor, GroupPoint, RationalPencil, RicciForm, SkewPencil,
};

/// Error type shared by the whole crate.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// Input has the wrong shape or dimension.
    #[error("shape error: {0}")]
    Shape(String),
    /// Input fails a structural precondition (symmetry, orthogonality,
    /// ordering, degeneracy, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// An iterative kernel failed to converge.
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// A parameter lies outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// Malformed JSON input.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
