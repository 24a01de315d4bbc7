use std::fs;
use std::path::Path;

use super::{RunConfig, RunError, VERSION};

pub const RESOLVED_CONFIG_FILE: &str = "resolved_config.txt";

/// Seventeen significant digits in scientific notation; independent of locale.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Header-first CSV, comma separated, LF terminated. Rows must all have the
/// header's width.
pub fn write_csv<I>(path: &Path, header: &[String], rows: I) -> Result<(), RunError>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let to_err = |e: csv::Error| {
        let source = match e.into_kind() {
            csv::ErrorKind::Io(io) => io,
            other => std::io::Error::other(format!("{other:?}")),
        };
        RunError::io(path, source)
    };
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(to_err)?;
    w.write_record(header).map_err(to_err)?;
    for row in rows {
        w.write_record(&row).map_err(to_err)?;
    }
    w.flush().map_err(|e| RunError::io(path, e))
}

/// `# <version>` followed by the echoed config.
pub fn write_resolved_config(dir: &Path, config: &RunConfig) -> Result<(), RunError> {
    let path = dir.join(RESOLVED_CONFIG_FILE);
    fs::write(&path, format!("# {VERSION}\n{}", config.echo())).map_err(|e| RunError::io(&path, e))
}
