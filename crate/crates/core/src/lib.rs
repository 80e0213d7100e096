//! Feasibility engine and synthetic instance generator for the
//! patient-to-room assignment problem with gender-separated rooms.

pub mod distributions;
pub mod feasibility;
pub mod generator;
pub mod model;
