use std::fmt;

/// Process exit codes.
pub mod code {
    pub const VALIDATION: u8 = 2;
    pub const IO: u8 = 3;
    pub const TOPOLOGY: u8 = 4;
    pub const TRACE_PARSE: u8 = 5;
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        CliError { code, message: message.into() }
    }

    pub fn validation(message: impl Into<String>) -> Self {
        Self::new(code::VALIDATION, message)
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self::new(code::IO, message)
    }

    pub fn topology(message: impl Into<String>) -> Self {
        Self::new(code::TOPOLOGY, message)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Default mapping; callers that read traces remap parse errors themselves.
impl From<multilat::Error> for CliError {
    fn from(err: multilat::Error) -> Self {
        use multilat::Error as E;
        let code = match &err {
            E::Io(_) => code::IO,
            E::TooFewAnchors(_) => code::TOPOLOGY,
            E::Parse { .. } | E::Json(_) | E::InvalidParameter(_) | E::InvalidDistance(_) => {
                code::VALIDATION
            }
            E::EmptyCluster => code::VALIDATION,
        };
        CliError::new(code, err.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::io(err.to_string())
    }
}
