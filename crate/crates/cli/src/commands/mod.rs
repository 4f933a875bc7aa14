pub mod estimate;
pub mod generate;
pub mod sweep;
pub mod verify;

use std::path::Path;
use superres_core::Error;

/// Writes a file, mapping failures to I/O errors (exit code 2).
pub fn write_file(path: &Path, contents: &[u8]) -> Result<(), Error> {
    std::fs::write(path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}
