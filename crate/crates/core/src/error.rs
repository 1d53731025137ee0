use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A binary stream does not follow its declared layout.
    #[error("format error at byte {offset}: {message}")]
    Format { offset: usize, message: String },

    /// A stream parsed correctly but carries values outside their domain.
    #[error("data error: {0}")]
    Data(String),

    /// A caller-supplied argument violates an operation's precondition.
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("manifest line {line}: {message}")]
    Manifest { line: usize, message: String },

    #[error("image {image_id}: {source}")]
    Image {
        image_id: String,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl Error {
    pub(crate) fn format(offset: usize, message: impl Into<String>) -> Self {
        Error::Format {
            offset,
            message: message.into(),
        }
    }

    pub(crate) fn argument(message: impl Into<String>) -> Self {
        Error::Argument(message.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn for_image(self, image_id: &str) -> Self {
        Error::Image {
            image_id: image_id.to_string(),
            source: Box::new(self),
        }
    }

    /// True when the failure stems from caller arguments rather than from
    /// the contents of files.
    pub fn is_argument(&self) -> bool {
        matches!(self, Error::Argument(_))
    }
}
