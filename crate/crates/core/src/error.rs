use alloc::string::String;
use core::fmt;

/// Errors shared by all library modules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Tensor or sequence dimensions do not line up.
    Shape(String),
    /// A softmax target index is outside `0..T`.
    TargetOutOfRange { target: usize, num_tags: usize },
    /// A gradient contained a NaN or infinity; the tensor is named.
    NonFiniteGradient(String),
    /// Training produced a non-finite loss and was aborted.
    NonFiniteLoss(String),
    /// Two annotations claim overlapping tokens in the same channel.
    OverlappingEntities {
        channel: String,
        first: String,
        second: String,
    },
    /// An annotation span does not fall inside the report text.
    SpanOutOfBounds { entity_id: String },
    /// An annotation crosses a sentence boundary.
    SentenceStraddle { entity_id: String },
    /// A training or build corpus was empty where content is required.
    EmptyInput(String),
    /// A queried word is not in the vocabulary.
    OutOfVocabulary(String),
    /// An ontology violates the tree invariants (cycle or double parent).
    InvalidOntology(String),
    /// A configuration value violates its documented range.
    InvalidConfig(String),
    /// Parallel token streams (e.g. a dependency parse) disagree in length.
    LengthMismatch {
        context: String,
        expected: usize,
        got: usize,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Shape(msg) => write!(f, "shape mismatch: {msg}"),
            Error::TargetOutOfRange { target, num_tags } => {
                write!(f, "target tag {target} out of range for {num_tags} tags")
            }
            Error::NonFiniteGradient(name) => {
                write!(f, "non-finite gradient in tensor `{name}`")
            }
            Error::NonFiniteLoss(ctx) => write!(f, "non-finite loss during {ctx}"),
            Error::OverlappingEntities {
                channel,
                first,
                second,
            } => write!(
                f,
                "entities `{first}` and `{second}` overlap in channel {channel}"
            ),
            Error::SpanOutOfBounds { entity_id } => {
                write!(f, "annotation `{entity_id}` lies outside the report text")
            }
            Error::SentenceStraddle { entity_id } => {
                write!(f, "annotation `{entity_id}` crosses a sentence boundary")
            }
            Error::EmptyInput(what) => write!(f, "empty input: {what}"),
            Error::OutOfVocabulary(word) => write!(f, "word `{word}` not in vocabulary"),
            Error::InvalidOntology(msg) => write!(f, "invalid ontology: {msg}"),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::LengthMismatch {
                context,
                expected,
                got,
            } => write!(f, "{context}: expected length {expected}, got {got}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
