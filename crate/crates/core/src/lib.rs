//! Continuous-variable (displacement, squeezing) and IQP quantum data
//! encodings simulated in truncated Fock space, together with the tabular
//! preprocessing, classifiers and benchmark harness used to measure how the
//! encodings change downstream classification.

pub mod data;
pub mod encoders;
pub mod fock;
pub mod harness;
pub mod learners;
pub mod linalg;
pub mod pipeline;

pub use data::{DataError, FeatureMatrix};
