//! Dynamic dispatch waves.
//!
//! Requests arrive at discrete decision epochs; at every epoch an operator
//! decides which known requests to dispatch right away and routes them, while
//! the rest wait for later epochs. This crate contains:
//!
//! * [`model`]: instances, requests, routes and the segment statistics used to
//!   evaluate routes with time windows and dispatch windows in constant time.
//! * [`solver`]: a hybrid genetic search for the static routing problem with
//!   dispatch windows.
//! * [`env`]: the epoch-based episode engine.
//! * [`instgen`]: benchmark topologies and dynamic instance sampling.
//! * [`policies`]: iterative conditional dispatch and its baselines.
//! * [`bench`]: experiment matrices, hindsight gaps and paired t-tests.

pub mod bench;
pub mod env;
pub mod error;
pub mod instgen;
pub mod model;
pub mod policies;
pub mod rng;
pub mod solver;

pub use error::{Error, Result};
