use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid specs do not match: {0}")]
    SpecMismatch(String),

    #[error("invalid scale ladder: {0}")]
    InvalidLadder(String),

    #[error("invalid scale: {0}")]
    InvalidScale(String),

    #[error("invalid quadrature rule: {0}")]
    InvalidRule(String),

    #[error("exponent out of domain: {0}")]
    ExponentDomain(String),

    #[error("value does not fit the expected layout: {0}")]
    Shape(String),

    #[error("the sphere (plus averaging balls) does not fit inside the dual box: {0}")]
    DualBoxTooSmall(String),

    #[error("kernel grid too small: {0}")]
    KernelBoxTooSmall(String),

    #[error("function does not decay at the box edge (shell max {shell_max_rel:.3e} of peak)")]
    NoDecay { shell_max_rel: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("unknown family `{0}`")]
    UnknownFamily(String),

    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
