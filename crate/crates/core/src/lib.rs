//! Clustering and community-detection similarity toolkit.
//!
//! The crate is organised bottom-up:
//!
//! * [`partition`] canonical labelings, contingency tables and pair statistics;
//! * [`measures`] NMI, AMI, RI/ARI, RMI and resampled mutual information (ResMI);
//! * [`synthgen`] seeded generators for the synthetic perturbation experiments;
//! * [`community`] graph ingestion, SBM sampling, k-means and SCORE+;
//! * [`experiment`] run aggregation, CSV records and SVG line plots.

pub mod community;
mod error;
pub mod experiment;
pub mod measures;
pub mod partition;
pub mod rng;
pub mod synthgen;

pub use error::{Error, Result};
pub use partition::{ContingencyTable, Labeling, PairStats};
