//! One-class collaborative filtering with sampled hidden random graphs:
//! a variational Bayesian matrix-factorization engine, popularity-aware
//! negative sampling, BPR baselines and evaluation pipelines.

pub mod bpr;
pub mod cli;
pub mod engine;
pub mod error;
pub mod eval;
pub mod gen;
pub mod graph;
pub mod model;
pub mod predict;
pub mod sampling;
pub mod tree;

pub use error::{Error, Result};
