//! Exact horizontal-holonomy engine for bracket-generating distributions.

pub mod commands;
pub mod connection;
pub mod decide;
pub mod distribution;
pub mod error;
pub mod forms;
pub mod frame;
pub mod holonomy;
pub mod liegroups;
pub mod linalg;
pub mod model_file;
pub mod models;
pub mod pipeline;
pub mod poly;
pub mod report;
pub mod selector;

pub use error::{Error, Result};
