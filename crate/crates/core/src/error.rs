use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite {what} at ({x}, {y})")]
    NonFinite { what: &'static str, x: f64, y: f64 },

    #[error("non-finite loss {0}")]
    NonFiniteLoss(f64),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("medium error: {0}")]
    Medium(String),

    #[error("input error: {0}")]
    Input(String),

    #[error("no closed form: {0}")]
    NoClosedForm(String),

    #[error("numerical error: {message} (residual {residual:e})")]
    Numerical { message: String, residual: f64 },

    #[error("non-finite gradient in loss term `{term}`")]
    NonFiniteGradient { term: String },

    #[error("training diverged at epoch {epoch}: loss {loss:e} exceeds {factor}x the initial loss {initial:e}")]
    Diverged {
        epoch: usize,
        loss: f64,
        initial: f64,
        factor: f64,
    },

    #[error("parse error at `{key}`: {message}")]
    Parse { key: String, message: String },

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn parse(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            key: key.into(),
            message: message.into(),
        }
    }

    /// Tags an error with the pipeline stage it came from.
    pub fn in_stage(self, stage: impl Into<String>) -> Self {
        Error::Stage {
            stage: stage.into(),
            source: Box::new(self),
        }
    }
}
