use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ring context mismatch: {0} vs {1}")]
    RingMismatch(String, String),

    #[error("unknown indeterminate `{0}`")]
    UnknownIndeterminate(String),

    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("exponent overflow at byte {0}")]
    ExponentOverflow(usize),

    #[error("generator count mismatch: expected {expected}, got {got}")]
    GeneratorCount { expected: usize, got: usize },

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("element is not homogeneous")]
    NotHomogeneous,

    #[error("unknown catalog key `{0}`")]
    UnknownKey(String),

    #[error("parameter schema mismatch: {0}")]
    Schema(String),

    #[error("parameter `{0}` is flagged nonzero but was given the value 0")]
    ZeroParameter(String),

    #[error("parity closure violated at [{g1} _ {g2}] -> {g3}")]
    ParityClosure { g1: String, g2: String, g3: String },

    #[error("format error in {path} line {line}: {msg}")]
    Format {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("symbolic parameter `{0}` present; the solver requires rational parameter values")]
    SymbolicParameter(String),

    #[error("linear system has no unknowns")]
    EmptySystem,

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
