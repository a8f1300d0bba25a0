use std::io::{BufRead, Write};

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{lex_cmp, Point};
use crate::pointset::{io, PointSource, Region};

/// Points closer than this are treated as one.
pub const DUPLICATE_TOL: f64 = 1e-12;

/// A closed subset of R^d known inside the closed ball of radius `window`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWindowed", into = "RawWindowed")]
pub struct WindowedSet {
    dim: usize,
    points: Vec<Point>,
    window: f64,
}

#[derive(Serialize, Deserialize)]
struct RawWindowed {
    dim: usize,
    window: f64,
    points: Vec<Vec<f64>>,
}

impl TryFrom<RawWindowed> for WindowedSet {
    type Error = Error;

    fn try_from(raw: RawWindowed) -> Result<Self> {
        let points = raw.points.into_iter().map(DVector::from_vec).collect();
        WindowedSet::new(raw.dim, points, raw.window)
    }
}

impl From<WindowedSet> for RawWindowed {
    fn from(w: WindowedSet) -> Self {
        RawWindowed {
            dim: w.dim,
            window: w.window,
            points: w.points.iter().map(|p| p.iter().cloned().collect()).collect(),
        }
    }
}

impl WindowedSet {
    /// Clips to the closed ball of radius `window`, sorts lexicographically
    /// and merges points closer than [`DUPLICATE_TOL`].
    pub fn new(dim: usize, mut points: Vec<Point>, window: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Dimension { min: 1, got: 0 });
        }
        if !(window > 0.0) || window.is_nan() {
            return Err(invalid("window", format!("must be positive, got {window}")));
        }
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: p.len(),
            });
        }
        points.retain(|p| p.norm() <= window);
        points.sort_by(lex_cmp);
        let mut kept: Vec<Point> = Vec::with_capacity(points.len());
        for p in points {
            // Sorted by first coordinate, so any duplicate of `p` sits in the
            // trailing run whose first coordinate is within the tolerance.
            let dup = kept
                .iter()
                .rev()
                .take_while(|q| p[0] - q[0] <= DUPLICATE_TOL)
                .any(|q| (q - &p).norm() < DUPLICATE_TOL);
            if !dup {
                kept.push(p);
            }
        }
        Ok(Self {
            dim,
            points: kept,
            window,
        })
    }

    pub fn empty(dim: usize, window: f64) -> Result<Self> {
        Self::new(dim, Vec::new(), window)
    }

    /// The points of `source` inside the window.
    pub fn sample<S: PointSource>(source: &S, window: f64) -> Result<Self> {
        let ball = crate::geometry::Ellipsoid::centered_ball(source.dim(), window)?;
        Self::new(source.dim(), source.points_in(&ball)?, window)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn window(&self) -> f64 {
        self.window
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Writes the point-list format preceded by `# window R` and `# dim d`.
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# window {:?}", self.window)?;
        writeln!(out, "# dim {}", self.dim)?;
        io::write_points(out, &self.points)
    }

    pub fn read_from<R: BufRead>(mut reader: R) -> Result<Self> {
        let mut text = String::new();
        reader.read_to_string(&mut text)?;
        let mut window = None;
        let mut dim = None;
        for (idx, line) in text.lines().enumerate() {
            let Some(rest) = line.trim().strip_prefix('#') else {
                continue;
            };
            let mut words = rest.split_whitespace();
            let (key, value) = (words.next(), words.next());
            let parse_err = |what: &str| Error::Parse {
                line: idx + 1,
                message: format!("bad {what} header"),
            };
            match (key, value) {
                (Some("window"), Some(v)) => {
                    window = Some(v.parse::<f64>().map_err(|_| parse_err("window"))?)
                }
                (Some("dim"), Some(v)) => {
                    dim = Some(v.parse::<usize>().map_err(|_| parse_err("dim"))?)
                }
                _ => {}
            }
        }
        let window = window.ok_or(Error::Parse {
            line: 1,
            message: "missing `# window R` header".into(),
        })?;
        let points = io::read_points(text.as_bytes())?;
        let dim = match (dim, points.first()) {
            (Some(d), _) => d,
            (None, Some(p)) => p.len(),
            (None, None) => {
                return Err(Error::Parse {
                    line: 1,
                    message: "empty set needs a `# dim d` header".into(),
                })
            }
        };
        Self::new(dim, points, window)
    }
}

impl PointSource for WindowedSet {
    fn dim(&self) -> usize {
        self.dim
    }

    fn for_each_in(&self, region: Region<'_>, visit: &mut dyn FnMut(Point)) -> Result<()> {
        if region.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: region.dim(),
            });
        }
        let reach = region.reach();
        if reach > self.window {
            return Err(Error::OutOfWindow {
                required: reach,
                window: self.window,
            });
        }
        for p in &self.points {
            if region.contains(p) {
                visit(p.clone());
            }
        }
        Ok(())
    }

    fn contains_point(&self, p: &Point) -> bool {
        self.points.iter().any(|q| (q - p).norm() < DUPLICATE_TOL)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(v: &[f64]) -> Point {
        DVector::from_vec(v.to_vec())
    }

    #[test]
    fn clips_and_dedups() {
        let w = WindowedSet::new(
            2,
            vec![pt(&[0.0, 0.0]), pt(&[3.0, 0.0]), pt(&[0.0, 5e-13]), pt(&[1.0, 1.0])],
            2.0,
        )
        .unwrap();
        assert_eq!(w.len(), 2);
    }

    #[test]
    fn text_round_trip() {
        let w = WindowedSet::new(2, vec![pt(&[0.1, -0.2]), pt(&[1.0 / 3.0, 0.5])], 4.5).unwrap();
        let mut buf = Vec::new();
        w.write_to(&mut buf).unwrap();
        assert_eq!(WindowedSet::read_from(buf.as_slice()).unwrap(), w);
        let e = WindowedSet::empty(3, 1.0).unwrap();
        let mut buf = Vec::new();
        e.write_to(&mut buf).unwrap();
        assert_eq!(WindowedSet::read_from(buf.as_slice()).unwrap(), e);
        assert!(WindowedSet::read_from("1 2\n".as_bytes()).is_err());
    }
}
