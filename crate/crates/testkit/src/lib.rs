//! Shared test material: the published-table fixtures, random input
//! generators, naive reference oracles and the property bodies run by both
//! the engine's own tests and the acceptance suite.

pub mod fixtures;
pub mod gen;
pub mod oracle;
pub mod props;
pub mod rdf;
