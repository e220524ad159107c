//! Cox point processes, SINR / Gilbert / k-NN graphs over them, and
//! Monte Carlo percolation estimators.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod config;
pub mod disks;
pub mod environment;
pub mod dsu;
pub mod error;
pub mod estimators;
pub mod geometry;
pub mod graphs;
pub mod grid;
pub mod io;
pub mod manifest;
pub mod par;
pub mod pathloss;
pub mod percolation;
pub mod render;
pub mod seed;
pub mod support;
pub mod tessellation;

pub use error::{Error, Result};
pub use geometry::{Aabb, Boundary, Point, Window};
pub use seed::SeedPath;
