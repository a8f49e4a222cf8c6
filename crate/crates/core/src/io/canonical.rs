use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ilp::IlpInstance;

pub const CANONICAL_SCHEMA: &str = "ilp-canonical/1";

/// JSON document for a canonical instance; the matrix is stored as
/// row-major coordinate triplets in parallel arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalInstanceDoc {
    pub schema: String,
    pub name: String,
    pub n: usize,
    pub m: usize,
    pub c: Vec<f64>,
    pub b: Vec<f64>,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

pub fn write_canonical(inst: &IlpInstance) -> CanonicalInstanceDoc {
    let trip = inst.triplets();
    CanonicalInstanceDoc {
        schema: CANONICAL_SCHEMA.to_string(),
        name: inst.name().to_string(),
        n: inst.n(),
        m: inst.m(),
        c: inst.objective_coeffs().to_vec(),
        b: inst.rhs().to_vec(),
        rows: trip.iter().map(|t| t.0).collect(),
        cols: trip.iter().map(|t| t.1).collect(),
        vals: trip.iter().map(|t| t.2).collect(),
        metadata: inst.metadata().clone(),
    }
}

pub fn read_canonical(doc: &CanonicalInstanceDoc) -> Result<IlpInstance> {
    if doc.schema != CANONICAL_SCHEMA {
        return Err(Error::SchemaVersionMismatch {
            found: doc.schema.clone(),
            expected: CANONICAL_SCHEMA,
        });
    }
    if doc.rows.len() != doc.vals.len() || doc.cols.len() != doc.vals.len() {
        return Err(Error::Validation(format!(
            "triplet arrays differ in length (rows {}, cols {}, vals {})",
            doc.rows.len(),
            doc.cols.len(),
            doc.vals.len()
        )));
    }
    let trip: Vec<(usize, usize, f64)> = doc
        .rows
        .iter()
        .zip(&doc.cols)
        .zip(&doc.vals)
        .map(|((&r, &k), &v)| (r, k, v))
        .collect();
    let inst = IlpInstance::new(doc.name.clone(), doc.n, doc.m, doc.c.clone(), &trip, doc.b.clone())
        .map_err(|e| Error::Validation(e.to_string()))?;
    Ok(doc
        .metadata
        .iter()
        .fold(inst, |inst, (k, v)| inst.with_metadata(k.clone(), v.clone())))
}

pub fn to_canonical_json(inst: &IlpInstance) -> String {
    serde_json::to_string(&write_canonical(inst)).expect("canonical document serializes")
}

pub fn from_canonical_json(text: &str) -> Result<IlpInstance> {
    let doc: CanonicalInstanceDoc = serde_json::from_str(text)?;
    read_canonical(&doc)
}

pub fn write_canonical_file(inst: &IlpInstance, path: &Path) -> Result<()> {
    std::fs::write(path, to_canonical_json(inst)).map_err(|e| Error::io(path, e))
}

pub fn read_canonical_file(path: &Path) -> Result<IlpInstance> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    from_canonical_json(&text)
}
