use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),
    #[error(transparent)]
    Core(#[from] conidx_core::Error),
    #[error("{}: {source}", .path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("cache entry {} is unreadable: {reason}", .path.display())]
    Cache { path: PathBuf, reason: String },
}

impl CliError {
    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

/// Process exit status: every verdict passed.
pub const EXIT_PASS: u8 = 0;
/// At least one verdict failed.
pub const EXIT_FAIL: u8 = 1;
/// The run never started: bad flags, bad config, or an unusable path.
pub const EXIT_USAGE: u8 = 2;
