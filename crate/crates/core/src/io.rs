//! Plain-text formats: tabulated profiles, curve CSV files and provenance headers.
//!
//! CSV files start with `#`-prefixed comment lines, then one line of column
//! names, then data rows written with 12 significant digits.

use std::io::Write;

use crate::error::{Error, Result};
use crate::geometry::{grid_angle, RoughnessProfile, StarCurve};
use crate::scalar::Real;

/// Formats a value with 12 significant digits.
pub fn fmt<T: Real>(v: T) -> String {
    format!("{:.11e}", v)
}

/// Writes `# key = value` lines.
pub fn write_header<W: Write>(out: &mut W, entries: &[(String, String)]) -> Result<()> {
    for (k, v) in entries {
        writeln!(out, "# {k} = {v}")?;
    }
    Ok(())
}

/// Writes a headed CSV table.
pub fn write_csv<T: Real, W: Write>(
    out: &mut W,
    header: &[(String, String)],
    columns: &[&str],
    rows: impl IntoIterator<Item = Vec<T>>,
) -> Result<()> {
    write_header(out, header)?;
    writeln!(out, "{}", columns.join(","))?;
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(fmt).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

/// Curve as `theta,radius` rows.
pub fn write_curve_csv<T: Real, W: Write>(
    out: &mut W,
    header: &[(String, String)],
    curve: &StarCurve<T>,
) -> Result<()> {
    let rows = (0..curve.len()).map(|i| vec![curve.angle(i), curve.radii()[i]]);
    write_csv(out, header, &["theta", "radius"], rows)
}

/// Closed polyline as `x,y` rows; the first vertex is repeated at the end.
pub fn write_polyline_csv<T: Real, W: Write>(
    out: &mut W,
    header: &[(String, String)],
    curve: &StarCurve<T>,
) -> Result<()> {
    let mut pts = curve.points();
    if let Some(&first) = pts.first() {
        pts.push(first);
    }
    write_csv(
        out,
        header,
        &["x", "y"],
        pts.into_iter().map(|p| p.to_vec()),
    )
}

/// Numeric rows of a text table; comments, blank lines and a non-numeric
/// column-name line are skipped. Fields may be separated by commas or blanks.
pub fn parse_rows(text: &str) -> Result<Vec<(usize, Vec<f64>)>> {
    let mut rows = Vec::new();
    let mut seen_names = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .collect();
        let parsed: std::result::Result<Vec<f64>, _> =
            fields.iter().map(|f| f.parse::<f64>()).collect();
        match parsed {
            Ok(v) => rows.push((idx + 1, v)),
            Err(_) if !seen_names && rows.is_empty() => seen_names = true,
            Err(e) => {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("{e} in `{line}`"),
                })
            }
        }
    }
    Ok(rows)
}

fn two_columns(rows: Vec<(usize, Vec<f64>)>) -> Result<Vec<(usize, f64, f64)>> {
    rows.into_iter()
        .map(|(line, v)| match v.as_slice() {
            [a, b] => Ok((line, *a, *b)),
            _ => Err(Error::Parse {
                line,
                message: format!("expected 2 columns, found {}", v.len()),
            }),
        })
        .collect()
}

/// Tabulated roughness profile from `Θ value` lines.
pub fn parse_profile<T: Real>(text: &str) -> Result<RoughnessProfile<T>> {
    let rows = two_columns(parse_rows(text)?)?;
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "profile table is empty".into(),
        });
    }
    let samples: Vec<(T, T)> = rows
        .iter()
        .map(|&(_, a, b)| (T::lit(a), T::lit(b)))
        .collect();
    RoughnessProfile::tabulated(&samples)
}

/// Star curve from `theta,radius` rows on a uniform angular grid.
pub fn parse_curve<T: Real>(text: &str) -> Result<StarCurve<T>> {
    let rows = two_columns(parse_rows(text)?)?;
    let n = rows.len();
    if n < 3 {
        return Err(Error::Parse {
            line: rows.last().map_or(0, |r| r.0),
            message: format!("a curve needs at least 3 samples, found {n}"),
        });
    }
    for (i, &(line, theta, _)) in rows.iter().enumerate() {
        let expect: f64 = grid_angle(i, n);
        if (theta - expect).abs() > 1e-8 {
            return Err(Error::Parse {
                line,
                message: format!("angle {theta} is off the uniform grid (expected {expect})"),
            });
        }
    }
    StarCurve::new(rows.iter().map(|r| T::lit(r.2)).collect()).map_err(|e| Error::Parse {
        line: 0,
        message: e.to_string(),
    })
}
