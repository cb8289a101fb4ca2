//! On-disk formats and in-memory containers shared by every stage.

mod array;
mod cxa;
mod records;

pub use array::{ComplexArray, CxaArray, MaskArray, RealArray};
pub use cxa::{decode_cxa, encode_cxa, read_cxa, write_cxa, CxaRead, MAGIC};
pub use records::{
    parse_metrics_jsonl, read_metrics_jsonl, write_metrics_jsonl, CaseMetrics, FailureReason,
};
