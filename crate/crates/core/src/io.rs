//! Point-cloud CSV files: header `x,y,value`, one row per point.

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::{Point2, Real};

/// Writes `values` at `points` in index order with 17 significant digits, so
/// the text parses back to the same numbers.
pub fn export_field<T: Real>(points: &[Point2<T>], values: &[T], path: impl AsRef<Path>) -> Result<()> {
    if points.len() != values.len() {
        return Err(Error::Input(format!(
            "{} points but {} values",
            points.len(),
            values.len()
        )));
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        let p = points[i];
        return Err(Error::NonFinite {
            what: "field value",
            x: p[0].to_f64_lossy(),
            y: p[1].to_f64_lossy(),
        });
    }
    let mut out = BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "x,y,value")?;
    for (p, v) in points.iter().zip(values) {
        writeln!(out, "{:.16e},{:.16e},{:.16e}", p[0], p[1], v)?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a file written by [`export_field`].
pub fn read_field<T: Real>(path: impl AsRef<Path>) -> Result<(Vec<Point2<T>>, Vec<T>)> {
    let path = path.as_ref();
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut lines = reader.lines();
    let header = lines.next().transpose()?.unwrap_or_default();
    if header != "x,y,value" {
        return Err(Error::parse(path.display().to_string(), format!("unexpected header `{header}`")));
    }
    let (mut points, mut values) = (Vec::new(), Vec::new());
    for (row, line) in lines.enumerate() {
        let line = line?;
        let key = || format!("{}:{}", path.display(), row + 2);
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 3 {
            return Err(Error::parse(key(), "expected three columns"));
        }
        let num = |s: &str| s.parse::<T>().map_err(|_| Error::parse(key(), format!("`{s}` is not a number")));
        let (x, y, v) = (num(cols[0])?, num(cols[1])?, num(cols[2])?);
        points.push([x, y]);
        values.push(v);
    }
    Ok((points, values))
}
