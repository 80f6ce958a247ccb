//! Deterministic artifact output: atomic writes and stdout-or-file routing.

use std::io::Write;
use std::path::{Path, PathBuf};

use imts_core::{Error, Result};

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Read a whole file, mapping failures to the IO error family.
pub fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(io_error(path))
}

/// Write a file atomically: the content lands under a temporary name in the
/// target directory and is renamed into place, so readers never observe a
/// half-written artifact.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let parent = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&parent).map_err(io_error(path))?;
    let mut tmp = tempfile::Builder::new()
        .prefix(".tmp-")
        .tempfile_in(&parent)
        .map_err(io_error(path))?;
    tmp.write_all(contents.as_bytes()).map_err(io_error(path))?;
    tmp.flush().map_err(io_error(path))?;
    tmp.persist(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e.error,
    })?;
    Ok(())
}

/// Print to stdout when no path is given, write atomically otherwise.
pub fn print_or_write(out: Option<&Path>, contents: &str) -> Result<()> {
    match out {
        None => {
            print!("{contents}");
            Ok(())
        }
        Some(path) => write_atomic(path, contents),
    }
}

/// Make a string safe for use inside a file name.
pub fn sanitize(name: &str) -> String {
    let cleaned: String = name
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') {
                c
            } else {
                '_'
            }
        })
        .collect();
    if cleaned.is_empty() {
        "_".to_string()
    } else {
        cleaned
    }
}
