//! First-passage percolation toolkit core.
//!
//! Everything here is deterministic given a seed: edge weights are produced
//! by a counter-based generator keyed on edge coordinates, so a weight
//! environment can be queried in any order, from any region, by any number
//! of threads, and always answers the same.
//!
//! The crate is `no_std` (with `alloc`); IO, file formats and the CLI live
//! in the companion `fpp-lab` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod engine;
pub mod error;
pub mod fit;
pub mod fluct;
pub mod lattice;
pub mod oriented;
pub mod rng;
pub mod shape;
pub mod weights;

pub use engine::{
    clip_region, continuum_lift, geodesic, optimal_vertex_set, passage_times,
    point_to_line_time, Geodesic, OptimalVertexSet, PassageTimeMap,
};
pub use error::{Error, Result};
pub use fit::ExponentFit;
pub use fluct::{
    estimate_chi, estimate_xi, fluctuation_tasks, reduce_variances, sample_fluctuations,
    transversal_fluctuation, variance_scan, variance_tasks, Direction, FluctTask,
    FluctuationSample, RadialTimesTask, VariancePoint,
};
pub use lattice::{Axis, EdgeId, Region, Vertex};
pub use oriented::{
    break_points, estimate_alpha, simulate_right_edge, theta_endpoints, AlphaEstimate,
    BreakPoint, BreakPointSequence, InitialSet, OrientedField, RightEdgeTrace, ThetaEndpoints,
};
pub use shape::{
    curvature_exponent, estimate_mu, estimate_shape_boundary, flat_segment_detect, support_lines,
    BoundarySample, CurvatureEstimate, FlatSegment, MuEstimate, ShapeBoundary, Side, SupportLine,
};
pub use weights::{DistributionSpec, EdgeWeights, TickDomain, WeightField};
