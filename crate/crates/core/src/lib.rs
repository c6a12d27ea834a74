//! Exact combinatorics of resolution graphs of normal surface singularities
//! with rational-homology-sphere link.

pub mod conditions;
pub mod corpus;
pub mod cycle;
pub mod error;
pub mod export;
pub mod graph;
pub mod group;
pub mod nws;
pub mod poly;
pub mod splice;
pub mod linalg;

pub use error::{Error, Result};
