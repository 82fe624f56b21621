use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid weight specification: {0}")]
    InvalidSpec(String),
    #[error("ratios m_p do not diverge on the stored range: m_{p_max} = {last:.4e} <= 2 m_1 = {twice_first:.4e}")]
    DivergenceFail { p_max: usize, last: f64, twice_first: f64 },
    #[error("(M.2) constants could not be certified up to p = {p_max}: {detail}")]
    CertificationFail { p_max: usize, detail: String },
    #[error("sup not attained inside the stored range (limit {limit}); raise the range (value so far {value})")]
    Truncation { value: f64, limit: usize },
    #[error("coefficient magnitude overflow: {0}")]
    Overflow(String),
    #[error("net generator failed at index {index}: {message}")]
    GeneratorFail { index: usize, message: String },
    #[error("hypothesis not established: {0}")]
    HypothesisFail(String),
    #[error("no witness: the net is negligible at lambda = {lambda}")]
    NoWitness { lambda: f64 },
    #[error("ultrapolynomial coefficient bound fails: {0}")]
    ClassFail(String),
    #[error("series did not converge by p = {p_max} at x = {x}")]
    NoConverge { x: f64, p_max: usize },
    #[error("coefficient growth sweep diverges: {0}")]
    GrowthFail(String),
    #[error("weight relation fails: {0}")]
    RelationFail(String),
    #[error("mollifier clause '{clause}' violated at k = {k}, n = {n}")]
    MollifierFail { clause: String, k: i64, n: usize },
    #[error("coefficients do not decay at the declared class: {0}")]
    DecayFail(String),
    #[error("malformed input: {0}")]
    Parse(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
