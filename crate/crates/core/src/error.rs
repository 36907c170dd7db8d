use alloc::string::String;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// A parameter or object lies outside the range an operation accepts.
    #[error("{0}")]
    Range(String),
    #[error("label {0} is not in the declared universe")]
    LabelOutsideUniverse(String),
    #[error("ground set mismatch: expected [{expected}], found [{found}]")]
    GroundSetMismatch { expected: usize, found: usize },
    #[error("malformed {kind}: {text:?}")]
    Parse { kind: &'static str, text: String },
    #[error("not a tree: {0}")]
    NotATree(String),
    #[error("vertex {vertex} has valence {valence} < 3")]
    Unstable { vertex: u32, valence: usize },
}
