use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown vertex id `{0}`")]
    UnknownVertex(String),
    #[error("invalid graph of groups: {0}")]
    InvalidGraph(String),
    #[error("branching cap must be positive")]
    ZeroBranchingCap,
    #[error("cylinder partition inconsistent with tree: {0}")]
    InconsistentPartition(String),
    #[error("non-elementary edge tag on edge `{0}`")]
    NonElementaryEdge(String),
    #[error("inconsistent whole-group flags: {0}")]
    InconsistentFlags(String),

    #[error("invalid circle-tree spec: {0}")]
    InvalidSpec(String),
    #[error("resolution {resolution} too coarse for level {level} (needs <= {max})")]
    ResolutionTooCoarse {
        resolution: f64,
        level: u32,
        max: f64,
    },
    #[error("cover scale a^-{n} below resolution floor (needs >= 4 x resolution {resolution})")]
    ScaleBelowResolution { n: i32, resolution: f64 },
    #[error("degenerate space: {0}")]
    DegenerateSpace(String),
    #[error("empty point set")]
    EmptyPointSet,

    #[error("weight references set {set} outside cover of {len} sets")]
    ForeignCoverSet { set: usize, len: usize },
    #[error("exponent p = {0} out of range (need {1})")]
    BadExponent(f64, &'static str),
    #[error("tolerance {0} out of range (need (0, 0.1])")]
    BadTolerance(f64),
    #[error("instance too large for dense solve: {0} curve-set incidences")]
    InstanceTooLarge(usize),
    #[error("need at least {0} scale values for a decay fit")]
    TooFewScales(usize),

    #[error("invalid weight parameters: {0}")]
    BadWeightParams(String),
    #[error("cover/space mismatch: {0}")]
    CoverSpaceMismatch(String),
}

pub type Result<T> = core::result::Result<T, Error>;
