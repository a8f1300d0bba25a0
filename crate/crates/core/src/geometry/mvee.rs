//! Minimum-volume enclosing ellipsoid by Khachiyan's barycentric
//! coordinate ascent, with the Todd–Yildirim away steps so that the
//! iteration count stays practical at tight tolerances.

use nalgebra::{DMatrix, DVector};

use super::{Ellipsoid, Point};
use crate::error::{invalid, Error, Result};

pub const DEFAULT_MVEE_TOL: f64 = 1e-7;
pub const DEFAULT_MVEE_MAX_ITER: usize = 100_000;

#[derive(Clone, Copy, Debug)]
pub struct MveeOptions {
    /// Relative tolerance: every input point lies in the result scaled by
    /// `1 + tol` about its center.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for MveeOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_MVEE_TOL,
            max_iter: DEFAULT_MVEE_MAX_ITER,
        }
    }
}

/// Minimum-volume enclosing ellipsoid of `points`.
pub fn mvee(points: &[Point], opts: MveeOptions) -> Result<Ellipsoid> {
    if !(opts.tol > 0.0) {
        return Err(invalid("tol", "must be positive"));
    }
    let n = points.len();
    let d = points.first().map(|p| p.len()).unwrap_or(0);
    if d == 0 {
        return Err(Error::Degenerate { rank: 0, needed: 1 });
    }
    if let Some(p) = points.iter().find(|p| p.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: p.len(),
        });
    }
    if n < d + 1 {
        return Err(Error::Degenerate { rank: n, needed: d + 1 });
    }

    // Lifted points q_i = (p_i, 1) as columns.
    let mut q = DMatrix::from_element(d + 1, n, 1.0);
    for (j, p) in points.iter().enumerate() {
        q.view_mut((0, j), (d, 1)).copy_from(p);
    }
    let sv = q.clone().svd(false, false).singular_values;
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let rank = sv.iter().filter(|s| **s > smax * 1e-12).count();
    if rank < d + 1 {
        return Err(Error::Degenerate { rank, needed: d + 1 });
    }

    // Containment in the (1+tol)-scaled ellipsoid needs the quadratic form to
    // be at most (1+tol)^2; max_i M_i <= (1+δ)(d+1) gives 1 + δ(d+1)/d.
    let dd = (d + 1) as f64;
    let delta = opts.tol * d as f64 / dd;
    let mut u = DVector::from_element(n, 1.0 / n as f64);
    let mut iterations = 0usize;
    loop {
        let x = weighted_gram(&q, &u);
        let x_inv = x
            .try_inverse()
            .ok_or(Error::Singular("lifted moment matrix"))?;
        let m: Vec<f64> = (0..n)
            .map(|j| {
                let c = q.column(j);
                (c.transpose() * &x_inv * c)[(0, 0)]
            })
            .collect();
        let (j_up, m_up) = m
            .iter()
            .cloned()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("n > 0");
        let (j_down, m_down) = m
            .iter()
            .cloned()
            .enumerate()
            .filter(|(j, _)| u[*j] > 0.0)
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("some weight is positive");
        let eps_up = m_up / dd - 1.0;
        let eps_down = 1.0 - m_down / dd;
        let residual = eps_up.max(eps_down);
        if eps_up <= delta && eps_down <= delta {
            break;
        }
        if iterations >= opts.max_iter {
            return Err(Error::NonConvergence {
                iterations,
                residual,
            });
        }
        iterations += 1;
        if eps_up >= eps_down {
            let tau = (m_up - dd) / (dd * (m_up - 1.0));
            u *= 1.0 - tau;
            u[j_up] += tau;
        } else {
            let uj = u[j_down];
            let tau = ((m_down - dd) / (dd * (m_down - 1.0))).max(-uj / (1.0 - uj));
            u *= 1.0 - tau;
            u[j_down] += tau;
            if u[j_down] < 1e-300 {
                u[j_down] = 0.0;
            }
        }
    }

    let pts = q.rows(0, d).into_owned();
    let center: DVector<f64> = &pts * &u;
    let mut sigma = DMatrix::zeros(d, d);
    for (j, w) in u.iter().enumerate() {
        if *w > 0.0 {
            let c = pts.column(j) - &center;
            sigma += (&c * c.transpose()) * *w;
        }
    }
    // E = {x : (x-c)ᵀ (dΣ)⁻¹ (x-c) ≤ 1}, shape = (dΣ)^{1/2}.
    sigma *= d as f64;
    let eig = sigma.symmetric_eigen();
    if eig.eigenvalues.iter().any(|l| !(*l > 0.0)) {
        return Err(Error::Degenerate { rank: d - 1, needed: d });
    }
    let root = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
    let shape = &eig.eigenvectors * root * eig.eigenvectors.transpose();
    Ellipsoid::new(center, shape)
}

fn weighted_gram(q: &DMatrix<f64>, u: &DVector<f64>) -> DMatrix<f64> {
    let k = q.nrows();
    let mut x = DMatrix::zeros(k, k);
    for (j, w) in u.iter().enumerate() {
        if *w > 0.0 {
            let c = q.column(j);
            x += (c * c.transpose()) * *w;
        }
    }
    x
}
