//! Poisson sprinklings of Minkowski space, their longest chains and the
//! discrete causal distance they induce.
//!
//! Geometry, sampling and the Noldus machinery are generic over the
//! coordinate type ([`num::Scalar`], implemented for `f32` and `f64`). The
//! `f64` instantiations are available under short names at the crate root.

pub mod causet;
pub mod chainstats;
pub mod error;
pub mod geometry;
pub mod noldus;
pub mod num;
pub mod pointset;
pub mod sampling;
pub mod stats;

#[cfg(test)]
mod props;

pub use causet::{
    chain_depths, discrete_distance, height, height_dag, height_lightcone, heights_from, heights_to,
    interval_height, interval_height_in, interval_height_matrix, interval_members, normalization, HeightResult,
};
pub use chainstats::{
    check_mean_convergence, deviation_bound, estimate_heights, mean_convergence_check, tail_experiment,
    BoundParams, HeightEnsemble, HeightOptions,
};
pub use error::{Error, Result};
pub use geometry::{
    boost_to_diamond, causal_distance, causally_precedes, diamond_constant, interval_contains, interval_volume,
};
pub use noldus::{
    bracket_points, build_lattice, distortion, estimate_dn_upper, noldus_exact, theorem_bound, BoundParse,
    MapPair,
};
pub use num::Scalar;
pub use sampling::{boost_sample, sample_box, sample_interval, RngSpec};

pub type Point = geometry::Point<f64>;
pub type Interval = geometry::IntervalSpec<f64>;
pub type Boost = geometry::Boost<f64>;
pub type Points = pointset::PointSet<f64>;
pub type Region = sampling::Region<f64>;
pub type BoxRegion = sampling::BoxRegion<f64>;
pub type Sample = sampling::CausetSample<f64>;
pub type CausalSpace = noldus::FiniteCausalSpace<f64>;
pub type Lattice = noldus::LatticeSpec<f64>;

pub type Point32 = geometry::Point<f32>;
pub type Interval32 = geometry::IntervalSpec<f32>;
pub type Boost32 = geometry::Boost<f32>;
pub type Points32 = pointset::PointSet<f32>;
pub type Sample32 = sampling::CausetSample<f32>;
pub type CausalSpace32 = noldus::FiniteCausalSpace<f32>;
