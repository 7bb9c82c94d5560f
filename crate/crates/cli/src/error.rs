use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] thetadelay::Error),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    /// Downstream reader closed early, as with `| head`.
    pub fn is_broken_pipe(&self) -> bool {
        use std::io::ErrorKind::BrokenPipe;
        match self {
            CliError::Io(e) => e.kind() == BrokenPipe,
            CliError::Csv(e) => matches!(e.kind(), csv::ErrorKind::Io(e) if e.kind() == BrokenPipe),
            CliError::Json(e) => e.io_error_kind() == Some(BrokenPipe),
            _ => false,
        }
    }

    /// 2 usage, 3 no solution, 4 numerical failure, 1 anything else.
    pub fn exit_code(&self) -> ExitCode {
        use thetadelay::Error as E;
        let code = match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) => match e {
                E::InvalidParameter(_) | E::Domain(_) => 2,
                E::NoSolution(_) | E::NoPulsation { .. } | E::NoFold { .. } | E::NotPeriodic(_) => {
                    3
                }
                E::Inconsistent { .. } | E::Stalled { .. } | E::Numerical(_) => 4,
            },
            CliError::Io(_) | CliError::Csv(_) | CliError::Json(_) => 1,
        };
        ExitCode::from(code)
    }
}
