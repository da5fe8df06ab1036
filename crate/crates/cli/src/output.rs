use std::io::Write;
use std::path::Path;

use crate::CliError;

/// 17 significant digits, enough to round-trip any f64.
pub(crate) fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Formats a CSV table with LF line endings.
pub(crate) fn render_csv(header: &[String], rows: &[Vec<String>]) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).expect("writing to memory");
    for r in rows {
        debug_assert_eq!(r.len(), header.len());
        w.write_record(r).expect("writing to memory");
    }
    w.into_inner().expect("flushing to memory")
}

/// Writes the table to `path`, or to `fallback` when no path is configured.
pub(crate) fn emit_csv(
    path: Option<&Path>,
    fallback: &mut dyn Write,
    header: &[String],
    rows: &[Vec<String>],
) -> Result<(), CliError> {
    let bytes = render_csv(header, rows);
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => fallback.write_all(&bytes).map_err(|source| CliError::Io {
            path: "<stdout>".into(),
            source,
        }),
    }
}
