//! Predicting how far sample-covariance eigenvectors stray from their
//! population counterparts, from the spectrum alone.
//!
//! The crate covers the whole pipeline: random k-regular graph Laplacians as
//! population covariances ([`graph`], [`ensemble`]), spectral statistics
//! ([`spectral`]), Wishart sampling ([`wishart`]), per-eigenvector error
//! predictors and their bootstrap check ([`estimators`]), and the ensemble
//! law of the predictor ([`hdensity`]).

pub mod ensemble;
pub mod error;
pub mod estimators;
pub mod fmt;
pub mod graph;
pub mod hdensity;
pub mod quad;
pub mod rng;
pub mod spectral;
pub mod stats;
pub mod wishart;

pub use error::{Error, Result};
