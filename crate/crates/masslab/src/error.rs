use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("decode error: {0}")]
    Decode(String),
    #[error("assembly error at line {line}: {msg}")]
    Assemble { line: usize, msg: String },
    #[error("construction error: {0}")]
    Construction(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("witness does not match kind: {0}")]
    WitnessKind(String),
    #[error("syntax error at {line}:{col}: {msg}; expected one of {expected:?}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
        expected: Vec<String>,
    },
    #[error("elaboration error: {0}")]
    Elaborate(String),
    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
