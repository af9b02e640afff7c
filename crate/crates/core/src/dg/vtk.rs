//! ASCII legacy VTK output of cell-averaged DG fields on a structured grid.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::mesh::MeshLevel;

/// Renders `STRUCTURED_POINTS` with one `CELL_DATA` scalar array per field.
///
/// Every field must hold one value per cell of `mesh`.
pub fn render(mesh: &MeshLevel, title: &str, fields: &[(&str, &[f64])]) -> Result<String> {
    let n = mesh.n();
    let h = mesh.cell_size();
    let mut out = String::new();
    out.push_str("# vtk DataFile Version 3.0\n");
    // the title line must not contain a newline
    out.push_str(&title.replace('\n', " "));
    out.push('\n');
    out.push_str("ASCII\nDATASET STRUCTURED_POINTS\n");
    let _ = writeln!(out, "DIMENSIONS {} {} 1", n + 1, n + 1);
    out.push_str("ORIGIN 0 0 0\n");
    let _ = writeln!(out, "SPACING {h:e} {h:e} 1");
    let _ = writeln!(out, "CELL_DATA {}", n * n);
    for (name, values) in fields {
        if values.len() != n * n {
            return Err(Error::Dimension {
                expected: n * n,
                got: values.len(),
            });
        }
        let _ = writeln!(out, "SCALARS {} double 1", name.replace(char::is_whitespace, "_"));
        out.push_str("LOOKUP_TABLE default\n");
        for row in values.chunks(n) {
            let line: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
    }
    Ok(out)
}

pub fn write(path: impl AsRef<Path>, mesh: &MeshLevel, title: &str, fields: &[(&str, &[f64])]) -> Result<()> {
    let path = path.as_ref();
    let text = render(mesh, title, fields)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout() {
        let m = MeshLevel::new(2).unwrap();
        let s = render(&m, "t", &[("u", &[1.0, 2.0, 3.0, 4.0])]).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "# vtk DataFile Version 3.0");
        assert_eq!(lines[2], "ASCII");
        assert_eq!(lines[3], "DATASET STRUCTURED_POINTS");
        assert_eq!(lines[4], "DIMENSIONS 3 3 1");
        assert_eq!(lines[6], "SPACING 5e-1 5e-1 1");
        assert_eq!(lines[7], "CELL_DATA 4");
        assert_eq!(lines[8], "SCALARS u double 1");
        assert_eq!(lines[10], "1e0 2e0");
        assert_eq!(lines[11], "3e0 4e0");
        assert!(render(&m, "t", &[("u", &[1.0])]).is_err());
    }
}
