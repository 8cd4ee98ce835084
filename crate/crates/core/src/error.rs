//! Error type shared by all transport modules.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransportError {
    #[error("mesh dimension {0} not supported (expected 1, 2 or 3)")]
    UnsupportedDimension(usize),

    #[error("mesh arguments disagree on dimension: {0}")]
    DimensionMismatch(String),

    #[error("direction {dir}: cell count must be at least 1, got {count}")]
    BadCellCount { dir: usize, count: usize },

    #[error("direction {dir}: facet coordinates must be strictly increasing near index {index}")]
    NonMonotoneFacets { dir: usize, index: usize },

    #[error("direction {dir}: explicit facet list must have count+1 entries matching the extents")]
    BadExplicitSpacing { dir: usize },

    #[error("rigid boundary requested in a horizontal direction {dir}; only the vertical direction may be rigid")]
    RigidHorizontal { dir: usize },

    #[error("field shape {found:?} does not match mesh cells {expected:?}")]
    ShapeMismatch {
        expected: [usize; 3],
        found: [usize; 3],
    },

    #[error("direction {dir}: metric is not strictly positive at cell {index} ({value})")]
    NonPositiveMetric {
        dir: usize,
        index: usize,
        value: f64,
    },

    #[error("direction {dir}: departure sweep from facet {facet} exceeds one period of the domain")]
    CourantExceedsPeriod { dir: usize, facet: usize },

    #[error("direction {dir}: departure sweep from facet {facet} runs past a rigid wall")]
    SweepPastWall { dir: usize, facet: usize },

    #[error("direction {dir}: velocity at a rigid wall facet must be zero, got {value}")]
    WallVelocityNonzero { dir: usize, value: f64 },

    #[error("{stage}: transported unity is not strictly positive (min {min}); time step too large for this flow")]
    NonPositiveSigma { stage: &'static str, min: f64 },

    #[error("{stage}: intermediate density is not strictly positive (min {min})")]
    NonPositiveDensity { stage: &'static str, min: f64 },

    #[error("vertically shifted mesh requires a rigid vertical boundary")]
    ShiftedNeedsRigidVertical,

    #[error("vertically shifted mesh requires at least {required} layers, got {found}")]
    TooFewLayers { required: usize, found: usize },

    #[error("reference field has zero norm; relative error undefined")]
    ZeroReferenceNorm,

    #[error("convergence fit needs at least two resolutions, got {0}")]
    TooFewResolutions(usize),

    #[error("end time {end_time} is not an integer multiple of dt {dt}")]
    NonIntegerStepCount { end_time: f64, dt: f64 },

    #[error("unsupported configuration: {0}")]
    UnsupportedConfig(String),

    #[error("step {step}: {source}")]
    StepFailed {
        step: usize,
        #[source]
        source: Box<TransportError>,
    },
}

pub type Result<T> = core::result::Result<T, TransportError>;
