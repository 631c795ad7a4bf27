//! MatrixFile serialization.
//!
//! A matrix file is a JSON document `{"rows": R, "cols": C, "entries":
//! [[re, im], ...]}` with entries in row-major order. Every numeric is
//! written with 17 significant digits, which round-trips doubles
//! bit-exactly; complex values are `[re, im]` pairs so no notation or
//! locale questions arise.

use std::fmt::Write as _;
use std::path::Path;

use blockabs::{ComplexMatrix, C64};
use serde::Deserialize;

#[derive(Deserialize)]
struct RawMatrixFile {
    rows: usize,
    cols: usize,
    entries: Vec<[f64; 2]>,
}

/// 17 significant digits, scientific notation. Valid as a JSON number.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn parse_matrix(text: &str) -> Result<ComplexMatrix, String> {
    let raw: RawMatrixFile =
        serde_json::from_str(text).map_err(|e| format!("invalid matrix file: {e}"))?;
    if raw.entries.len() != raw.rows * raw.cols {
        return Err(format!(
            "invalid matrix file: {} entries for a {}x{} matrix",
            raw.entries.len(),
            raw.rows,
            raw.cols
        ));
    }
    if let Some((i, _)) = raw
        .entries
        .iter()
        .enumerate()
        .find(|(_, e)| !e[0].is_finite() || !e[1].is_finite())
    {
        return Err(format!("invalid matrix file: entry {i} is not finite"));
    }
    let entries: Vec<C64> = raw.entries.iter().map(|e| C64::new(e[0], e[1])).collect();
    ComplexMatrix::new(raw.rows, raw.cols, entries)
        .map_err(|e| format!("invalid matrix file: {e}"))
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix, String> {
    let text =
        std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_matrix(&text).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn matrix_document(m: &ComplexMatrix) -> String {
    let mut s = String::new();
    s.push_str("{\n");
    let _ = writeln!(s, "  \"rows\": {},", m.rows());
    let _ = writeln!(s, "  \"cols\": {},", m.cols());
    s.push_str("  \"entries\": [");
    let entries = m.entries_row_major();
    for (i, z) in entries.iter().enumerate() {
        let sep = if i + 1 == entries.len() { "" } else { "," };
        let _ = write!(
            s,
            "\n    [{}, {}]{}",
            format_f64(z.re),
            format_f64(z.im),
            sep
        );
    }
    if entries.is_empty() {
        s.push(']');
    } else {
        s.push_str("\n  ]");
    }
    s.push_str("\n}\n");
    s
}

/// Two labeled matrices in one document, used by `jdecompose`. Each
/// value is itself a complete MatrixFile object.
pub fn pair_document(q: &ComplexMatrix, r: &ComplexMatrix) -> String {
    format!(
        "{{\n\"q\": {},\n\"r\": {}\n}}\n",
        matrix_document(q).trim_end(),
        matrix_document(r).trim_end()
    )
}
