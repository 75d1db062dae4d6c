//! Virtual gap analysis: paired adjustment / price programs per decision-making
//! unit, normalized so that scores are comparable across units.

pub mod analysis;
pub mod dataset;
pub mod dea;
pub mod models;
pub mod procedure;
pub mod simplex;
