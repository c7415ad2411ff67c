//! Exact interval exchange transformations, Rauzy–Veech induction and
//! shrinking-target experiments.

pub mod error;
pub mod experiment;
pub mod iet;
pub mod interval_set;
pub mod numerics;
pub mod rauzy;
pub mod rigidity;
pub mod rotations;
pub mod sample;
pub mod targets;

pub use error::{Error, Result};
pub use iet::{Iet, Metric, Orbit, Permutation, ScaledIet};
pub use interval_set::{Interval, IntervalSet};
pub use numerics::{ExactNumber, Enclosure};
