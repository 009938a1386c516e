use thiserror::Error;

/// Errors and expected failure modes across the crate.
///
/// Several variants are "failures as data" rather than bugs: a perceptron
/// exhausting its update budget or the greedy cover making no progress are
/// legitimate outcomes that callers are expected to match on.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("hyperplane normal has zero (or near-zero) norm")]
    ZeroNormal,

    #[error("point norm {norm} exceeds the unit ball bound")]
    OutsideUnitBall { norm: f64 },

    #[error("label must be +1 or -1, got {0}")]
    BadLabel(i8),

    #[error(
        "net sample budget {required} exceeds the hard cap {cap}; raise delta or lower the dimension"
    )]
    NetBudgetExceeded { required: u128, cap: usize },

    #[error("direction net is empty")]
    EmptyNet,

    #[error("perceptron exhausted its update budget after {updates} updates")]
    PerceptronExhausted { updates: usize },

    #[error("perceptron produced a degenerate (zero-normal) hyperplane")]
    DegenerateSeparator,

    #[error("enumeration space C({candidates}, {t}) exceeds the cap {cap}")]
    EnumerationCapExceeded {
        candidates: usize,
        t: usize,
        cap: u128,
    },

    #[error("no consistent {t}-subset of the candidate mirrors exists")]
    EnumerationExhausted { t: usize },

    #[error("greedy cover made no progress with {remaining} negative points left")]
    GreedyNoProgress { remaining: usize },

    #[error("greedy cover hit its iteration cap of {cap}")]
    GreedyIterationCap { cap: usize },

    #[error("projection failed to converge within {sweeps} sweeps (best distance {best_distance})")]
    ProjectionDiverged { sweeps: usize, best_distance: f64 },

    #[error("no witness point with clearance {gamma} found inside the unit ball")]
    WitnessNotFound { gamma: f64 },

    #[error("no interior point of the polytope found")]
    NoInteriorPoint,

    #[error("every sampled ray escaped to infinity; polytope is unbounded in all sampled directions")]
    UnboundedPolytope,

    #[error("graph error: {0}")]
    Graph(String),

    #[error("vertex set is not independent: edge ({0}, {1}) inside it")]
    NotIndependent(usize, usize),

    #[error("coloring is not proper: edge ({0}, {1}) is monochromatic")]
    ImproperColoring(usize, usize),

    #[error("degenerate equality row {row}: all pivot candidates below tolerance")]
    DegenerateRow { row: usize },

    #[error("instance generation produced an empty point set after {attempts} attempts")]
    EmptyInstance { attempts: usize },

    #[error("heuristic made no progress with {remaining} negative points left")]
    HeuristicNoProgress { remaining: usize },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
