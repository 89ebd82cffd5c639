//! Cellular-to-WLAN traffic offloading: closed-form metrics from integral
//! geometry, a Monte Carlo simulator to check them, and spatial statistics
//! for access-point location data.

pub mod exec;
pub mod formulas;
pub mod geometry;
pub mod pointprocess;
pub mod simulator;
pub mod spatialstats;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Geometry(#[from] geometry::GeometryError),
    #[error(transparent)]
    Model(#[from] formulas::ModelError),
    #[error(transparent)]
    Intensity(#[from] pointprocess::IntensityError),
    #[error(transparent)]
    Sim(#[from] simulator::SimError),
    #[error(transparent)]
    Stats(#[from] spatialstats::StatsError),
}
