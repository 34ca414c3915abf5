//! Deterministic benchmark of cross-silo federated learning on the
//! four-hospital UCI heart-disease data.
//!
//! The crate is organised as a pipeline:
//!
//! * [`dataset`] — parsing the four `processed.*.data` files, missing-value
//!   row dropping, label binarisation, seeded train/test splitting and
//!   z-score standardisation;
//! * [`models`] — seven from-scratch binary classifiers behind one
//!   train/predict/evaluate interface;
//! * [`federation`] — a four-client round loop with FedAvg, FedAdam,
//!   FedYogi and SCAFFOLD server aggregation;
//! * [`interpret`] — exact Shapley values by subset enumeration and a
//!   Kernel SHAP solver, plus mean-absolute-attribution rankings;
//! * [`bench`] — the experiment harness behind the `bench` binary.
//!
//! Every public entry point is a pure function of its inputs and a `u64`
//! seed; re-running any experiment with the same configuration yields
//! bit-identical results.

pub mod bench;
pub mod dataset;
pub mod error;
pub mod federation;
pub mod interpret;
pub mod models;
pub mod rng;

pub use error::{Error, Result};
