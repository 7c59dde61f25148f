use std::fmt;
use std::io;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const IO: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const UNDECIDED: i32 = 3;
    pub const RESOURCE: i32 = 4;
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(bifurc_core::Error),
    Io(io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use bifurc_core::Error as E;
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Io(_) => exit::IO,
            CliError::Core(E::InvalidArgument(_)) => exit::USAGE,
            CliError::Core(E::ResourceLimit(_)) => exit::RESOURCE,
            CliError::Core(_) => exit::UNDECIDED,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "io: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<bifurc_core::Error> for CliError {
    fn from(e: bifurc_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}
