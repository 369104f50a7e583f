//! Paths in finite-dimensional normed spaces and the geometry of their unit balls.
mod convexity;
mod polyline;
mod stieltjes;
mod surd;

pub use convexity::{
    averaged_convexity_check, l2_modulus, strict_convexity_witness, uniform_convexity_modulus,
    AveragedConvexityReport, ModulusRow, StrictWitness, MAX_GRID_2D, MAX_GRID_3D,
};
pub use polyline::{
    path_length, path_measure, pos_neg_variation, Interp, Interval, PathMeasure, Polyline,
    Variation,
};
pub use stieltjes::{riemann_stieltjes, Piecewise, Poly, StieltjesSum};
pub use surd::{Length, SurdSum};
