//! Sub-Riemannian perimeter calculus in the first Heisenberg group.
//!
//! Surfaces are level sets of scalar fields evaluated with exact second-order
//! jets. On top of the horizontal frame the crate provides H-mean curvature,
//! H-perimeter integration, first and second variation functionals,
//! intrinsic graphs, and instability certificates for the entire H-minimal
//! graphs `x = y (alpha t + beta)`.

pub mod checks;
pub mod error;
pub mod graph_family;
pub mod heisenberg;
pub mod instability;
pub mod intrinsic;
pub mod jet;
pub mod quadrature;
pub mod summation;
pub mod surface;
pub mod variation;

pub use error::{Error, Result};
pub use graph_family::{AlphaBetaGraph, MirroredGraph, VerticalPlane};
pub use heisenberg::{dilation, frame_derivative, frame_second, group_mul, FrameDir, PlaneField, Point, ScalarField};
pub use instability::{certify_instability, CutoffFamily, Direction, InstabilityCertificate};
pub use intrinsic::IntrinsicGraph;
pub use jet::{Dual, Jet};
pub use quadrature::{Estimate, QuadratureSpec, Rect, Window};
pub use surface::{LevelSurface, SurfaceFrame, SurfacePatch, Transversal};
pub use variation::{DeformationField, Form, Route, VariationResult};

/// Crate version recorded in run records.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
