use std::path::PathBuf;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use super::enumerate::{CellWalk, DEFAULT_CELL_BUDGET};
use super::jitter::cell_uniforms;
use super::{io, PointSource, Region};
use crate::error::{invalid, Error, Result};
use crate::geometry::{unit_ball_volume, Point};

/// Tolerance for recognizing a point as a member of a lattice or grid.
const MEMBER_TOL: f64 = 1e-9;

/// Serializable description of a net. `basis` lists basis vectors (columns of
/// the basis matrix).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NetSpec {
    Lattice {
        basis: Vec<Vec<f64>>,
        #[serde(default)]
        offset: Option<Vec<f64>>,
        #[serde(default)]
        window: Option<f64>,
    },
    JitteredGrid {
        dim: usize,
        spacing: f64,
        jitter: f64,
        seed: u64,
        #[serde(default)]
        window: Option<f64>,
    },
    Poisson {
        dim: usize,
        intensity: f64,
        window: f64,
        seed: u64,
    },
    RingLattice {
        #[serde(default = "one")]
        scale: f64,
        #[serde(default)]
        window: Option<f64>,
    },
    ExplicitList {
        #[serde(default)]
        path: Option<PathBuf>,
        #[serde(default)]
        points: Option<Vec<Vec<f64>>>,
        #[serde(default)]
        dim: Option<usize>,
        #[serde(default)]
        window: Option<f64>,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug)]
pub enum NetKind {
    Lattice {
        basis: DMatrix<f64>,
        basis_inv: DMatrix<f64>,
        offset: DVector<f64>,
    },
    JitteredGrid {
        dim: usize,
        spacing: f64,
        jitter: f64,
        seed: u64,
    },
    /// Finite stored sets (Poisson samples and explicit lists), sorted
    /// lexicographically.
    Finite { dim: usize, points: Vec<Point> },
}

/// A point set with an optional declared window (a centered ball outside of
/// which it must not be queried).
#[derive(Clone, Debug)]
pub struct NetOracle {
    kind: NetKind,
    window: Option<f64>,
    cell_budget: u64,
}

impl NetOracle {
    /// `{basis·z + offset : z ∈ Z^d}`.
    pub fn lattice(basis: DMatrix<f64>, offset: DVector<f64>) -> Result<Self> {
        let d = basis.nrows();
        if d == 0 || basis.ncols() != d {
            return Err(invalid("basis", "must be a non-empty square matrix"));
        }
        if offset.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: offset.len(),
            });
        }
        let det = basis.determinant();
        if det == 0.0 || !det.is_finite() {
            return Err(Error::Singular("lattice basis"));
        }
        let basis_inv = basis
            .clone()
            .try_inverse()
            .ok_or(Error::Singular("lattice basis"))?;
        Ok(Self::from_kind(NetKind::Lattice {
            basis,
            basis_inv,
            offset,
        }))
    }

    pub fn integer_lattice(d: usize) -> Self {
        Self::lattice(DMatrix::identity(d, d), DVector::zeros(d)).expect("identity basis")
    }

    /// The embedded ring of integers of Q(√2): `{(a + b√2, a − b√2)}`.
    pub fn ring_lattice_z_sqrt2() -> Self {
        Self::ring_lattice_z_sqrt2_scaled(1.0).expect("unit scale")
    }

    /// `scale·{(a + b√2, a − b√2)}`.
    pub fn ring_lattice_z_sqrt2_scaled(scale: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(invalid("scale", format!("must be positive, got {scale}")));
        }
        let s2 = std::f64::consts::SQRT_2;
        let basis = DMatrix::from_column_slice(2, 2, &[1.0, 1.0, s2, -s2]) * scale;
        Self::lattice(basis, DVector::zeros(2))
    }

    /// One point per cell `spacing·[z, z+1)`, displaced from the cell center
    /// by at most `jitter·spacing` per coordinate (see [`super::jitter`]).
    pub fn jittered_grid(dim: usize, spacing: f64, jitter: f64, seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Dimension { min: 1, got: 0 });
        }
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(invalid("spacing", format!("must be positive, got {spacing}")));
        }
        if !(0.0..=0.5).contains(&jitter) {
            return Err(invalid("jitter", format!("must lie in [0, 1/2], got {jitter}")));
        }
        Ok(Self::from_kind(NetKind::JitteredGrid {
            dim,
            spacing,
            jitter,
            seed,
        }))
    }

    /// Poisson process of the given intensity in the ball of radius `window`.
    pub fn poisson(dim: usize, intensity: f64, window: f64, seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Dimension { min: 1, got: 0 });
        }
        if !(intensity > 0.0) || !(window > 0.0) {
            return Err(invalid("poisson", "intensity and window must be positive"));
        }
        let mean = intensity * unit_ball_volume(dim)? * window.powi(dim as i32);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let count = Poisson::new(mean)
            .map_err(|e| invalid("intensity", e.to_string()))?
            .sample(&mut rng) as usize;
        let points = (0..count)
            .map(|_| {
                let g = DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
                let radius = window * rng.random::<f64>().powf(1.0 / dim as f64);
                g.normalize() * radius
            })
            .collect();
        Ok(Self::finite(dim, points)?.with_window(Some(window)))
    }

    pub fn explicit(dim: usize, points: Vec<Point>) -> Result<Self> {
        Self::finite(dim, points)
    }

    fn finite(dim: usize, mut points: Vec<Point>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Dimension { min: 1, got: 0 });
        }
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: p.len(),
            });
        }
        points.sort_by(crate::geometry::lex_cmp);
        points.dedup();
        Ok(Self::from_kind(NetKind::Finite { dim, points }))
    }

    fn from_kind(kind: NetKind) -> Self {
        Self {
            kind,
            window: None,
            cell_budget: DEFAULT_CELL_BUDGET,
        }
    }

    pub fn with_window(mut self, window: Option<f64>) -> Self {
        self.window = window;
        self
    }

    pub fn with_cell_budget(mut self, budget: u64) -> Self {
        self.cell_budget = budget;
        self
    }

    pub fn window(&self) -> Option<f64> {
        self.window
    }

    pub fn kind(&self) -> &NetKind {
        &self.kind
    }

    pub fn from_spec(spec: &NetSpec) -> Result<Self> {
        match spec {
            NetSpec::Lattice {
                basis,
                offset,
                window,
            } => {
                let d = basis.len();
                if d == 0 || basis.iter().any(|v| v.len() != d) {
                    return Err(invalid("basis", "needs d vectors of length d"));
                }
                let flat: Vec<f64> = basis.iter().flatten().cloned().collect();
                let offset = match offset {
                    Some(o) => DVector::from_vec(o.clone()),
                    None => DVector::zeros(d),
                };
                Ok(Self::lattice(DMatrix::from_column_slice(d, d, &flat), offset)?
                    .with_window(*window))
            }
            NetSpec::JitteredGrid {
                dim,
                spacing,
                jitter,
                seed,
                window,
            } => Ok(Self::jittered_grid(*dim, *spacing, *jitter, *seed)?.with_window(*window)),
            NetSpec::Poisson {
                dim,
                intensity,
                window,
                seed,
            } => Self::poisson(*dim, *intensity, *window, *seed),
            NetSpec::RingLattice { scale, window } => {
                Ok(Self::ring_lattice_z_sqrt2_scaled(*scale)?.with_window(*window))
            }
            NetSpec::ExplicitList {
                path,
                points,
                dim,
                window,
            } => {
                let pts: Vec<Point> = match (path, points) {
                    (Some(path), None) => {
                        let file = std::fs::File::open(path)?;
                        io::read_points(std::io::BufReader::new(file))?
                    }
                    (None, Some(points)) => points
                        .iter()
                        .map(|p| DVector::from_vec(p.clone()))
                        .collect(),
                    (None, None) => Vec::new(),
                    (Some(_), Some(_)) => {
                        return Err(invalid("explicit_list", "give either `path` or `points`"))
                    }
                };
                let d = match (dim, pts.first()) {
                    (Some(d), _) => *d,
                    (None, Some(p)) => p.len(),
                    (None, None) => {
                        return Err(invalid("dim", "an empty list needs an explicit `dim`"))
                    }
                };
                Ok(Self::finite(d, pts)?.with_window(*window))
            }
        }
    }

    fn check_window(&self, region: &Region<'_>) -> Result<()> {
        if region.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: region.dim(),
            });
        }
        if let Some(w) = self.window {
            let reach = region.reach();
            if reach > w {
                return Err(Error::OutOfWindow {
                    required: reach,
                    window: w,
                });
            }
        }
        Ok(())
    }

    /// The point of the jittered grid in a given cell.
    fn grid_point(dim: usize, spacing: f64, jitter: f64, seed: u64, cell: &[i64]) -> Point {
        let _ = dim;
        DVector::from_iterator(
            cell.len(),
            cell.iter()
                .zip(cell_uniforms(seed, cell))
                .map(|(z, u)| spacing * (*z as f64 + 0.5 + jitter * (2.0 * u - 1.0))),
        )
    }
}

impl PointSource for NetOracle {
    fn dim(&self) -> usize {
        match &self.kind {
            NetKind::Lattice { basis, .. } => basis.nrows(),
            NetKind::JitteredGrid { dim, .. } => *dim,
            NetKind::Finite { dim, .. } => *dim,
        }
    }

    fn for_each_in(&self, region: Region<'_>, visit: &mut dyn FnMut(Point)) -> Result<()> {
        self.check_window(&region)?;
        match &self.kind {
            NetKind::Lattice {
                basis,
                basis_inv,
                offset,
            } => {
                // x = Bz + o ∈ E  ⟺  ‖A⁻¹B (z − B⁻¹(c − o))‖ ≤ 1.
                let e = region.enclosing_ellipsoid();
                let m = e.inverse_shape() * basis;
                let center = basis_inv * (e.center() - offset);
                let walk = CellWalk::new(&m, &center, (0.0, 0.0), self.cell_budget)?;
                walk.run(&mut |z| {
                    let zf = DVector::from_iterator(z.len(), z.iter().map(|v| *v as f64));
                    let p = basis * zf + offset;
                    if region.contains(&p) {
                        visit(p);
                    }
                })
            }
            NetKind::JitteredGrid {
                dim,
                spacing,
                jitter,
                seed,
            } => {
                // x = s·w with w = z + δ, δ ∈ [1/2 − j, 1/2 + j]^d.
                let e = region.enclosing_ellipsoid();
                let m = e.inverse_shape() * *spacing;
                let center = e.center() / *spacing;
                let walk =
                    CellWalk::new(&m, &center, (0.5 - jitter, 0.5 + jitter), self.cell_budget)?;
                walk.run(&mut |z| {
                    let p = Self::grid_point(*dim, *spacing, *jitter, *seed, z);
                    if region.contains(&p) {
                        visit(p);
                    }
                })
            }
            NetKind::Finite { points, .. } => {
                for p in points {
                    if region.contains(p) {
                        visit(p.clone());
                    }
                }
                Ok(())
            }
        }
    }

    fn contains_point(&self, p: &Point) -> bool {
        if p.len() != self.dim() {
            return false;
        }
        match &self.kind {
            NetKind::Lattice {
                basis_inv, offset, ..
            } => {
                let z = basis_inv * (p - offset);
                z.iter().all(|v| (v - v.round()).abs() <= MEMBER_TOL)
            }
            NetKind::JitteredGrid {
                dim,
                spacing,
                jitter,
                seed,
            } => {
                let base: Vec<i64> = p.iter().map(|x| (x / spacing).floor() as i64).collect();
                let tol = MEMBER_TOL * spacing.max(p.amax());
                // The point sits in its own closed cell; check neighbours for
                // coordinates that land exactly on a cell boundary.
                let d = *dim;
                let mut cell = base.clone();
                for code in 0..3usize.pow(d as u32) {
                    let mut c = code;
                    for i in 0..d {
                        cell[i] = base[i] + (c % 3) as i64 - 1;
                        c /= 3;
                    }
                    let q = Self::grid_point(d, *spacing, *jitter, *seed, &cell);
                    if (q - p).amax() <= tol {
                        return true;
                    }
                }
                false
            }
            NetKind::Finite { points, .. } => points.iter().any(|q| (q - p).amax() <= 1e-12),
        }
    }
}
