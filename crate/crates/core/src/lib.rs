//! GDPR compliance self-assessment engine.
//!
//! Organisations answer a versioned checklist each month. Answers are scored
//! per section and overall, non-compliant answers become findings, monthly
//! reports form a trend, and the score series can be exported as an RDF Data
//! Cube in Turtle.
//!
//! All durable state lives in a [`store::Store`] directory.

pub mod assessment;
pub mod checklist;
pub mod cube;
mod error;
mod json;
pub mod period;
pub mod scoring;
pub mod store;
pub mod trend;
pub mod validation;

pub use error::{Error, Result};
