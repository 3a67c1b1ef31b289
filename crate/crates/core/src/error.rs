use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input is empty")]
    EmptyInput,
    #[error("FASTA input contains more than one record")]
    MultiRecordFasta,
    #[error("FASTA input has no header line")]
    MissingFastaHeader,
    #[error("alphabet has {0} distinct symbols, at most 255 are supported")]
    AlphabetTooLarge(usize),
    #[error("code {code} is outside the alphabet 1..={sigma}")]
    InvalidCode { code: u8, sigma: usize },

    #[error("{what} argument {value} out of range (limit {limit})")]
    OutOfRange {
        what: &'static str,
        value: usize,
        limit: usize,
    },
    #[error("empty or inverted range [{start}, {end})")]
    EmptyRange { start: usize, end: usize },

    #[error("model assigns probability 0 to symbol {0:?} which occurs in the text")]
    ZeroProbability(String),
    #[error("model probabilities sum to {0}, expected 1")]
    ProbabilitySum(f64),
    #[error("model file, line {line}: {msg}")]
    ModelParse { line: usize, msg: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("internal stack desynchronization: {0}")]
    Desync(String),
    #[error("observer aborted traversal: {0}")]
    Observer(String),

    #[error("oracle limited to texts of length <= {limit}, got {n}")]
    OracleCap { n: usize, limit: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
