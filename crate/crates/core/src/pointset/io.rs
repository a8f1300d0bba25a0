//! Plain-text point lists: one point per line, coordinates separated by
//! whitespace. Blank lines and lines starting with `#` are skipped.

use std::io::{BufRead, Write};

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::geometry::Point;

pub fn read_points<R: BufRead>(reader: R) -> Result<Vec<Point>> {
    let mut points = Vec::new();
    let mut dim = None;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let coords = trimmed
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>().map_err(|e| Error::Parse {
                    line: line_no,
                    message: format!("bad coordinate `{tok}`: {e}"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        match dim {
            None => dim = Some(coords.len()),
            Some(d) if d != coords.len() => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected {d} coordinates, found {}", coords.len()),
                })
            }
            _ => {}
        }
        points.push(DVector::from_vec(coords));
    }
    Ok(points)
}

pub fn write_points<W: Write>(mut out: W, points: &[Point]) -> Result<()> {
    for p in points {
        let line: Vec<String> = p.iter().map(|x| format!("{x:?}")).collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}
