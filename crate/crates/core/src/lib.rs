//! Measurement toolkit for long-run ML progress: aggregate benchmark indices,
//! computational-capital and labor inputs, Cobb-Douglas fits over several
//! output proxies, and ML scaling-law fits.

pub mod factors;
pub mod index;
pub mod ingest;
pub mod manifest;
pub mod production;
pub mod report;
pub mod scaling;
pub mod series;
pub mod svg;
