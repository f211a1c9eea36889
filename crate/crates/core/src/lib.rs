//! Static detection of dark patterns in mobile UI screenshots.
//!
//! The pipeline extracts element properties (boxes and types, text, icon
//! semantics, widget status, colors, groups) and checks them against a
//! declarative rule registry. See [`pipeline::Engine`] for the entry point.

pub mod checker;
pub mod config;
pub mod error;
pub mod evaluation;
pub mod extract;
pub mod fusion;
pub mod geometry;
pub mod grouping;
pub mod model;
pub mod pipeline;
pub mod report;
pub mod schema;
#[cfg(feature = "testkit")]
pub mod testkit;
pub mod visual;

pub use error::Error;
