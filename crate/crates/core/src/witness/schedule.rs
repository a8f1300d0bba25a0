use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::unit_ball_volume;

/// Largest admissible `(d/(d-1))^{n-1}`; for `d = 2` this allows `n ≤ 40`.
pub const MAX_SCHEDULE_EXPONENT: f64 = 549_755_813_888.0; // 2^39

/// The ε-schedule of the witness iteration.
///
/// `ε_k = 4^{-(d/(d-1))^{n-k}}`, so `ε_n = 1/4` and `ε_k = ε_{k-1}^{1-1/d}`.
/// Entries of `eps` underflow to zero for long schedules; `log_eps` is exact.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub d: usize,
    pub n: usize,
    pub eps: Vec<f64>,
    pub log_eps: Vec<f64>,
    /// `m_k = Σ_{i≤k} (1-1/d)^{i-1} = d(1 - (1-1/d)^k)`.
    pub m: Vec<f64>,
}

impl Schedule {
    /// `ε_k` for `k` in `1..=n`.
    pub fn eps(&self, k: usize) -> f64 {
        self.eps[k - 1]
    }

    pub fn log_eps(&self, k: usize) -> f64 {
        self.log_eps[k - 1]
    }

    pub fn m(&self, k: usize) -> f64 {
        self.m[k - 1]
    }

    /// `ln(ε_1^{-m_k})`, the log of the bound on `‖h_1^{-1}⋯h_k^{-1}‖`.
    pub fn log_norm_bound(&self, k: usize) -> f64 {
        -self.m(k) * self.log_eps[0]
    }
}

fn check_range(d: usize, n: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::Dimension { min: 2, got: d });
    }
    if n == 0 {
        return Err(crate::error::invalid("n", "must be at least 1"));
    }
    let ratio = d as f64 / (d as f64 - 1.0);
    let top = ratio.powi(n as i32 - 1);
    if !(top <= MAX_SCHEDULE_EXPONENT) {
        return Err(Error::ScheduleRange(format!(
            "(d/(d-1))^(n-1) = {top:e} exceeds 2^39 for d = {d}, n = {n}"
        )));
    }
    Ok(ratio)
}

pub fn make_schedule(d: usize, n: usize) -> Result<Schedule> {
    let ratio = check_range(d, n)?;
    let q = 1.0 - 1.0 / d as f64;
    let mut eps = Vec::with_capacity(n);
    let mut log_eps = Vec::with_capacity(n);
    let mut m = Vec::with_capacity(n);
    for k in 1..=n {
        let e = ratio.powi((n - k) as i32);
        eps.push(0.25f64.powf(e));
        log_eps.push(-(4.0f64.ln()) * e);
        m.push(d as f64 * (1.0 - q.powi(k as i32)));
    }
    Ok(Schedule {
        d,
        n,
        eps,
        log_eps,
        m,
    })
}

/// `ln diam` bound: `ln C_{d,s} + (d^n/(d-1)^{n-1})·ln 4` with
/// `C_{d,s} = 2(s/β_d)^{1/d}`.
pub fn diameter_bound_ln(d: usize, s: f64, n: usize) -> Result<f64> {
    let ratio = check_range(d, n)?;
    if !(s > 0.0) || !s.is_finite() {
        return Err(crate::error::invalid("s", format!("must be positive, got {s}")));
    }
    let beta = unit_ball_volume(d)?;
    let log_c = 2f64.ln() + (s / beta).ln() / d as f64;
    let exponent = d as f64 * ratio.powi(n as i32 - 1);
    Ok(log_c + exponent * 4f64.ln())
}

/// `C_{d,s}·4^{d^n/(d-1)^{n-1}}`; `+∞` when it overflows (use
/// [`diameter_bound_ln`] there).
pub fn diameter_bound(d: usize, s: f64, n: usize) -> Result<f64> {
    Ok(diameter_bound_ln(d, s, n)?.exp())
}

/// `α_{d,n} = 2β_d^{-1/d}·4^{d^n/(d-1)^{n-1}}`, the bound for `s = 1`.
pub fn alpha(d: usize, n: usize) -> Result<f64> {
    diameter_bound(d, 1.0, n)
}

pub fn alpha_ln(d: usize, n: usize) -> Result<f64> {
    diameter_bound_ln(d, 1.0, n)
}

/// Largest `n` with `α_{d,n} ≤ ε^{-1/d}/2`, or 0 when even `α_{d,1}` is too
/// large.
pub fn select_n(d: usize, eps: f64) -> Result<usize> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(crate::error::invalid("eps", format!("must lie in (0, 1), got {eps}")));
    }
    let target = -eps.ln() / d as f64 - 2f64.ln();
    let mut n = 0;
    loop {
        match alpha_ln(d, n + 1) {
            Ok(a) if a <= target => n += 1,
            Ok(_) | Err(Error::ScheduleRange(_)) => return Ok(n),
            Err(e) => return Err(e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn small_schedule() {
        let s = make_schedule(2, 3).unwrap();
        assert_eq!(s.eps, vec![1.0 / 256.0, 1.0 / 16.0, 0.25]);
        assert_relative_eq!(s.m(1), 1.0);
        assert_relative_eq!(s.m(2), 1.5);
        assert_relative_eq!(s.m(3), 1.75);
    }

    #[test]
    fn last_entry_is_a_quarter() {
        for d in 2..=6 {
            for n in 1..=12 {
                let s = make_schedule(d, n).unwrap();
                assert_eq!(*s.eps.last().unwrap(), 0.25);
            }
        }
    }

    #[test]
    fn m_tends_to_d() {
        let s = make_schedule(2, 40).unwrap();
        assert!((s.m(40) - 2.0).abs() < 1e-11);
        assert!(make_schedule(2, 41).is_err());
        assert!(make_schedule(1, 3).is_err());
        assert!(make_schedule(2, 0).is_err());
    }

    #[test]
    fn bounds() {
        assert_relative_eq!(diameter_bound(2, PI / 16.0, 1).unwrap(), 8.0, epsilon = 1e-12);
        assert_relative_eq!(
            diameter_bound(2, PI / 16.0, 3).unwrap(),
            0.5 * 4f64.powi(8),
            max_relative = 1e-12
        );
        assert_relative_eq!(
            alpha(2, 1).unwrap(),
            2.0 / PI.sqrt() * 16.0,
            max_relative = 1e-12
        );
        for d in 2..=5 {
            let beta = unit_ball_volume(d).unwrap();
            let c = diameter_bound(d, 1.0, 1).unwrap() / 4f64.powi(d as i32);
            assert_relative_eq!(c, 2.0 * beta.powf(-1.0 / d as f64), max_relative = 1e-12);
        }
    }

    #[test]
    fn n_selection() {
        assert_eq!(select_n(2, 1e-2).unwrap(), 0);
        assert_eq!(select_n(2, 1e-4).unwrap(), 1);
        assert_eq!(select_n(2, 1e-8).unwrap(), 2);
        assert_eq!(select_n(2, 1e-16).unwrap(), 3);
        assert!(select_n(2, 0.0).is_err());
    }
}
