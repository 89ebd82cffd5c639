use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("data: {0}")]
    Data(String),
    #[error("invariant violated: {0}")]
    Internal(String),
}

impl CliError {
    /// 0 success, 1 usage or config, 2 data, 3 internal invariant.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 1,
            CliError::Data(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl From<wlan_offload::Error> for CliError {
    fn from(e: wlan_offload::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<wlan_offload::formulas::ModelError> for CliError {
    fn from(e: wlan_offload::formulas::ModelError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<wlan_offload::pointprocess::IntensityError> for CliError {
    fn from(e: wlan_offload::pointprocess::IntensityError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<wlan_offload::simulator::SimError> for CliError {
    fn from(e: wlan_offload::simulator::SimError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<wlan_offload::geometry::GeometryError> for CliError {
    fn from(e: wlan_offload::geometry::GeometryError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<wlan_offload::spatialstats::StatsError> for CliError {
    fn from(e: wlan_offload::spatialstats::StatsError) -> Self {
        CliError::Data(e.to_string())
    }
}
