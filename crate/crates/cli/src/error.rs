use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration or input; nothing has been written.
    #[error("{0}")]
    Schema(String),

    #[error("numerical failure in {module}: {source}")]
    Numerical {
        module: &'static str,
        #[source]
        source: spinwave::Error,
    },

    #[error("numerical failure: {0}")]
    Degenerate(String),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn schema(msg: impl Into<String>) -> Self {
        CliError::Schema(msg.into())
    }

    /// Process exit status: 2 for schema errors, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema(_) => 2,
            CliError::Numerical { .. } | CliError::Degenerate(_) => 3,
            CliError::Io(_) | CliError::Json(_) | CliError::Csv(_) => 1,
        }
    }
}

/// Tags library errors with the module that raised them.
pub trait Context<T> {
    fn in_module(self, module: &'static str) -> Result<T>;
}

impl<T> Context<T> for spinwave::Result<T> {
    fn in_module(self, module: &'static str) -> Result<T> {
        self.map_err(|source| CliError::Numerical { module, source })
    }
}
