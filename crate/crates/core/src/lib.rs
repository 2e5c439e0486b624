//! Evaluation of multi-agent trajectory forecasts with marginal (ADE/FDE)
//! and joint (JADE/JFDE, collision rate) metrics, the matching
//! reconstruction losses with subgradients, interaction labelling, and a
//! small synthetic lab showing why the joint objective matters.
//!
//! ```
//! use trajeval::{metrics, Position, PredictionSet, Sequence, Units};
//!
//! // two agents, one timestep, two samples that each get one agent right
//! let gt = Sequence::new(
//!     "demo:0", "demo", 2.5, Units::Meters, vec![0, 1],
//!     1, vec![Position::new(0.0, 0.0), Position::new(10.0, 0.0)],
//!     1, vec![Position::new(0.0, 0.0), Position::new(10.0, 0.0)],
//! ).unwrap();
//! let pred = PredictionSet::new("demo:0", 2, 2, 1, vec![
//!     Position::new(0.0, 0.0), Position::new(11.0, 0.0),
//!     Position::new(1.0, 0.0), Position::new(10.0, 0.0),
//! ]).unwrap();
//! assert_eq!(metrics::ade(&pred, &gt).unwrap(), 0.0);
//! assert_eq!(metrics::jade(&pred, &gt).unwrap().0, 0.5);
//! ```

// `!(x > 0.0)` style guards are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arrays;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod ingest;
pub mod interactions;
pub mod losses;
pub mod metrics;
pub mod toylab;
pub mod trajdata;

pub use error::{Error, Result};
pub use trajdata::{Position, PredictionSet, Sequence, Units, WindowConfig};
