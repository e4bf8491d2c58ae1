//! Numerical toolkit for rotation-congruent projections of convex bodies.
//!
//! Two convex bodies `K, L ⊂ R³` with the origin inside are compared
//! through their projections onto planes through the origin. For every
//! direction ξ the crate decides which planar rotations carry `K_{|ξ⊥}` onto
//! `L_{|ξ⊥}`, and assembles the whole-sphere picture: the sets of directions
//! with equal projections (F₀), half-turn related projections (F₁), constant
//! width projections (Σ), and circles of constant dual-section size (Λ).
//!
//! Module map:
//! - [`geom`]: unit vectors, Rodrigues rotations, great-circle frames, grids
//! - [`body`]: support-function bodies, widths, polar-dual radial function
//! - [`congruence`]: circular profiles and rotation matching
//! - [`sphere`]: sphere decomposition, verdicts, irrational orbits
//! - [`radon`]: spherical Radon (Funk) transform and dual-section areas
//! - [`algebra`]: the width/τ system and its quartic
//! - [`report`]: JSON and CSV serialization
//! - [`cli`]: command-line front end

pub mod algebra;
pub mod body;
pub mod cli;
pub mod congruence;
pub mod error;
pub mod fixtures;
pub mod geom;
pub mod harmonics;
pub mod radon;
pub mod report;
pub mod sphere;

pub use body::{BodySpec, ConvexBody, Polygon2, SupportSeries};
pub use congruence::{CircularProfile, DirectionClass, DirectionTag, MatchParams, RotationMatch};
pub use error::{Error, Result};
pub use geom::{AxisRotation, GreatCircleFrame, SphereGrid, UnitVector3, Vec3};
pub use sphere::{AnalysisParams, DecompositionReport, OrbitReport, Verdict};
