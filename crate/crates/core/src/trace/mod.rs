//! Concrete execution of programs: access traces with timestamp vectors,
//! the constraint-built timestamp space, and memory layouts.

mod dump;
mod interp;
mod layout;
mod space;

pub use dump::{dump_text, write_csv};
pub use interp::{
    block_sequence, generate_trace, interpret, AccessTrace, Bindings, DataBlockId, TraceRecord, TraceSink,
};
pub use layout::{
    array_extents, is_prime, linearize, next_prime, pad_innermost, pad_layout, unpadded_layout, ArrayLayout,
    PaddedLayout,
};
pub use space::{negate, timestamp_regions, timestamp_space, DimRule, Region};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("parameter `{0}` has no binding")]
    UnboundSymbol(String),
    #[error("block size must be at least 1, got {0}")]
    InvalidBlockSize(i64),
    #[error("array `{array}` has non-positive extent {extent}")]
    NonPositiveExtent { array: String, extent: i64 },
    #[error("no array with id {0}")]
    UnknownArray(usize),
    #[error("index {indices:?} is outside array `{array}`")]
    OutOfBounds { array: String, indices: Vec<i64> },
}

/// Builds bindings from `(name, value)` pairs.
pub fn bind<'a>(pairs: impl IntoIterator<Item = (&'a str, i64)>) -> Bindings {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}
