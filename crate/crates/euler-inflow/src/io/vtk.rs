//! Legacy VTK writers: structured points for fields, poly data for point clouds.

use std::io::Write;

use crate::error::IoError;
use crate::fields::{Grid3, ScalarField, VectorField};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VtkFormat {
    Ascii,
    Binary,
}

/// A named field attached to the grid nodes.
pub enum PointData<'a> {
    Scalar(&'a str, &'a ScalarField),
    Vector(&'a str, &'a VectorField),
}

fn write_values(out: &mut impl Write, format: VtkFormat, values: impl Iterator<Item = f64>) -> Result<(), IoError> {
    match format {
        VtkFormat::Ascii => {
            for (n, v) in values.enumerate() {
                if n > 0 {
                    out.write_all(if n % 9 == 0 { b"\n" } else { b" " })?;
                }
                write!(out, "{v:.17e}")?;
            }
            out.write_all(b"\n")?;
        }
        VtkFormat::Binary => {
            for v in values {
                out.write_all(&v.to_be_bytes())?;
            }
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

/// Structured-points file over the channel nodes (the z spacing is uniform except
/// for the rounding of the top node).
pub fn write_structured(out: &mut impl Write, title: &str, grid: &Grid3, format: VtkFormat, data: &[PointData]) -> Result<(), IoError> {
    writeln!(out, "# vtk DataFile Version 3.0")?;
    writeln!(out, "{}", title.lines().next().unwrap_or(""))?;
    writeln!(out, "{}", if format == VtkFormat::Ascii { "ASCII" } else { "BINARY" })?;
    writeln!(out, "DATASET STRUCTURED_POINTS")?;
    writeln!(out, "DIMENSIONS {} {} {}", grid.n1, grid.n2, grid.n3)?;
    writeln!(out, "ORIGIN 0 0 0")?;
    writeln!(out, "SPACING {:.17e} {:.17e} {:.17e}", grid.h1(), grid.h2(), grid.h3())?;
    writeln!(out, "POINT_DATA {}", grid.len())?;
    for d in data {
        match d {
            PointData::Scalar(name, f) => {
                writeln!(out, "SCALARS {name} double 1")?;
                writeln!(out, "LOOKUP_TABLE default")?;
                write_values(out, format, f.data.iter().copied())?;
            }
            PointData::Vector(name, v) => {
                writeln!(out, "VECTORS {name} double")?;
                write_values(out, format, (0..grid.len()).flat_map(|p| v.at(p)))?;
            }
        }
    }
    Ok(())
}

/// Point cloud with one scalar per point (the time coordinate for S).
pub fn write_points(out: &mut impl Write, title: &str, points: &[[f64; 4]], format: VtkFormat) -> Result<(), IoError> {
    writeln!(out, "# vtk DataFile Version 3.0")?;
    writeln!(out, "{title}")?;
    writeln!(out, "{}", if format == VtkFormat::Ascii { "ASCII" } else { "BINARY" })?;
    writeln!(out, "DATASET POLYDATA")?;
    writeln!(out, "POINTS {} double", points.len())?;
    write_values(out, format, points.iter().flat_map(|p| [p[1], p[2], p[3]]))?;
    writeln!(out, "VERTICES {} {}", points.len(), 2 * points.len())?;
    match format {
        VtkFormat::Ascii => {
            for n in 0..points.len() {
                writeln!(out, "1 {n}")?;
            }
        }
        VtkFormat::Binary => {
            for n in 0..points.len() as i32 {
                out.write_all(&1i32.to_be_bytes())?;
                out.write_all(&n.to_be_bytes())?;
            }
            out.write_all(b"\n")?;
        }
    }
    writeln!(out, "POINT_DATA {}", points.len())?;
    writeln!(out, "SCALARS t double 1")?;
    writeln!(out, "LOOKUP_TABLE default")?;
    write_values(out, format, points.iter().map(|p| p[0]))?;
    Ok(())
}
