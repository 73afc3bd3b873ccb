use std::io::Read;

use ndarray::Array2;

use super::gemb::{GembData, GembKind};
use crate::error::{Error, Result};
use crate::model::{EmbeddingSet, ProbabilitySet};

/// Reads a numeric CSV matrix into an embedding or probability set.
///
/// Every row must have the same number of fields. With `has_header` the
/// first line is skipped. Errors carry 1-based line numbers.
pub fn import_csv(
    source: impl Read,
    kind: GembKind,
    backbone_id: &str,
    source_label: &str,
    has_header: bool,
) -> Result<GembData> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source);
    let mut values = Vec::new();
    let mut width = None;
    let mut rows = 0usize;
    for record in reader.records() {
        let record = record.map_err(|e| Error::invalid(format!("CSV: {e}")))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        match width {
            None => width = Some(record.len()),
            Some(w) if w != record.len() => {
                return Err(Error::invalid(format!(
                    "line {line}: expected {w} fields, found {}",
                    record.len()
                )))
            }
            Some(_) => {}
        }
        for (col, cell) in record.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| {
                Error::invalid(format!(
                    "line {line}, column {}: {cell:?} is not a number",
                    col + 1
                ))
            })?;
            values.push(v);
        }
        rows += 1;
    }
    let cols = width.unwrap_or(0);
    let matrix = Array2::from_shape_vec((rows, cols), values).expect("uniform rows");
    Ok(match kind {
        GembKind::Embeddings => EmbeddingSet::new(matrix, backbone_id, source_label)?.into(),
        GembKind::Probabilities => ProbabilitySet::new(matrix, backbone_id, source_label)?.into(),
    })
}
