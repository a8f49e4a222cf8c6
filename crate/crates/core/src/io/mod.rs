//! Instance ingestion (MPS, canonical JSON) and trace serialization.

mod canonical;
mod mps;
mod trace;

use std::path::Path;

pub use canonical::{
    from_canonical_json, read_canonical, read_canonical_file, to_canonical_json, write_canonical,
    write_canonical_file, CanonicalInstanceDoc, CANONICAL_SCHEMA,
};
pub use mps::{read_mps, read_mps_file, read_mps_str, write_mps};
pub use trace::{format_g17, read_trace, trace_to_string, write_trace, TRACE_HEADER};

use crate::error::Result;
use crate::ilp::IlpInstance;

/// Loads an instance, choosing the reader by extension (`.mps` or JSON).
pub fn load_instance(path: &Path) -> Result<IlpInstance> {
    let is_mps = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("mps"));
    if is_mps {
        read_mps_file(path)
    } else {
        read_canonical_file(path)
    }
}
