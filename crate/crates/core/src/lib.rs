//! Scaled mean curvature flow `V = g(c)·H`, `g = G - G'·c`, coupled to
//! diffusion of a conserved concentration on the moving surface.
//!
//! Plane curves and axisymmetric surfaces are supported. The radial
//! reduction gives closed-form oracles for both.

pub mod density;
pub mod diagnostics;
pub mod flows;
pub mod linalg;
pub mod meshgeom;
pub mod radial;

pub use density::{DensityError, DensityKind, EnergyDensity, ParabolicityReport, ValidRange};
pub use flows::{run, Event, EventKind, FlowError, FlowState, Geometry, Monitor, Observer, RunOptions, RunReport};
