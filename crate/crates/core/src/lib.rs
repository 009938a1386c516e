//! Margin-based learning of convex polytopes.
//!
//! A geometry kernel for halfspace-intersection classifiers, the learning
//! pipeline that recovers them from labeled samples (random projection,
//! direction nets, perceptron mirrors, greedy cover), envelope geometry and
//! Hausdorff-speed estimation, closed-form VC/sample-size calculators, and
//! graph/LP reductions with brute-force oracles.

pub mod bounds;
pub mod envelope;
pub mod error;
pub mod geometry;
pub mod hardness;
pub mod harness;
pub mod io;
pub mod jl;
pub mod learner;
pub mod lp;
pub mod net;
pub mod perceptron;
pub mod sampling;

pub use error::{Error, Result};
pub use geometry::{EnvelopeRegion, Hyperplane, LabeledPoint, MarginRegion, Polytope};
pub use sampling::RngSeed;
