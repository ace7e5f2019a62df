//! Budgeted linear programs on the nonnegative orthant:
//!
//! ```text
//! f(x) = sup{γ·t | t ≥ 0, α·t ≤ 1, β·t ≤ x}
//! g(x) = sup{γ·t | t ≥ 0, α·t + β·t/x ≤ 1}
//! ```
//!
//! related by `g = F[f]` and `f = G[g]`.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::function::{HalfLineGrid, SampledFunction};
use crate::transforms::{transform_f, transform_g};

#[derive(Debug, Clone, PartialEq)]
pub struct ConeProgram {
    alpha: Vec<f64>,
    beta: Vec<f64>,
    gamma: Vec<f64>,
}

impl ConeProgram {
    pub fn new(alpha: Vec<f64>, beta: Vec<f64>, gamma: Vec<f64>) -> Result<Self> {
        let n = alpha.len();
        if n == 0 || beta.len() != n || gamma.len() != n {
            return Err(Error::InvalidCone(format!(
                "alpha, beta, gamma must have equal nonzero length, got {}, {}, {}",
                n,
                beta.len(),
                gamma.len()
            )));
        }
        let all = alpha.iter().chain(&beta).chain(&gamma);
        if all.clone().any(|v| !v.is_finite()) {
            return Err(Error::InvalidCone("non-finite coefficient".into()));
        }
        if alpha.iter().any(|&a| a <= 0.0) {
            return Err(Error::InvalidCone("alpha entries must be > 0".into()));
        }
        if beta.iter().chain(&gamma).any(|&v| v < 0.0) {
            return Err(Error::InvalidCone("beta and gamma entries must be >= 0".into()));
        }
        Ok(Self { alpha, beta, gamma })
    }

    /// From the keys `alpha`, `beta`, `gamma` (comma-separated) and an
    /// optional `n` that must match their length.
    pub fn from_config(cfg: &BTreeMap<String, String>) -> Result<Self> {
        let list = |key: &str| -> Result<Vec<f64>> {
            let raw = cfg
                .get(key)
                .ok_or_else(|| Error::Config(format!("missing key `{key}`")))?;
            raw.split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Config(format!("bad number `{s}` in `{key}`")))
                })
                .collect()
        };
        let cp = Self::new(list("alpha")?, list("beta")?, list("gamma")?)?;
        if let Some(n) = cfg.get("n") {
            let n: usize = n
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad dimension `{n}`")))?;
            if n != cp.dim() {
                return Err(Error::InvalidCone(format!(
                    "n = {n} but coefficients have length {}",
                    cp.dim()
                )));
            }
        }
        Ok(cp)
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    /// Budgets `β_i/α_i` where `f` changes slope, sorted and deduplicated.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self
            .alpha
            .iter()
            .zip(&self.beta)
            .filter(|(_, &b)| b > 0.0)
            .map(|(a, b)| b / a)
            .collect();
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    /// `max_i γ_i/α_i`, the value of both programs as `x → ∞`.
    pub fn limit(&self) -> f64 {
        self.gamma
            .iter()
            .zip(&self.alpha)
            .map(|(g, a)| g / a)
            .fold(0.0, f64::max)
    }

    /// `max{γ_i/α_i | β_i = 0}`, the value of both programs as `x → 0⁺`.
    pub fn head_value(&self) -> f64 {
        (0..self.dim())
            .filter(|&i| self.beta[i] == 0.0)
            .map(|i| self.gamma[i] / self.alpha[i])
            .fold(0.0, f64::max)
    }

    /// The maximising point of the `f` program.
    pub fn f_argmax(&self, x: f64) -> Vec<f64> {
        let n = self.dim();
        let (a, b, c) = (&self.alpha, &self.beta, &self.gamma);
        let mut best = (0.0, vec![0.0; n]);
        let mut consider = |t: Vec<f64>| {
            let v: f64 = t.iter().zip(c).map(|(t, c)| t * c).sum();
            if v > best.0 {
                best = (v, t);
            }
        };
        for i in 0..n {
            let ti = if b[i] > 0.0 {
                (1.0 / a[i]).min(x / b[i])
            } else {
                1.0 / a[i]
            };
            let mut t = vec![0.0; n];
            t[i] = ti;
            consider(t);
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let det = a[i] * b[j] - a[j] * b[i];
                if det == 0.0 {
                    continue;
                }
                let ti = (b[j] - a[j] * x) / det;
                let tj = (a[i] * x - b[i]) / det;
                if ti >= 0.0 && tj >= 0.0 {
                    let mut t = vec![0.0; n];
                    t[i] = ti;
                    t[j] = tj;
                    consider(t);
                }
            }
        }
        best.1
    }

    /// `f(x)`: the optimum sits at a vertex with at most two positive
    /// coordinates, so singletons and 2×2 solves are enumerated.
    pub fn f_value(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::BadAbscissa(x));
        }
        let t = self.f_argmax(x);
        Ok(t.iter().zip(&self.gamma).map(|(t, c)| t * c).sum())
    }

    /// `g(x) = max_i γ_i/(α_i + β_i/x)`.
    pub fn g_value(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::BadAbscissa(x));
        }
        Ok(self.g_unchecked(x))
    }

    fn g_unchecked(&self, x: f64) -> f64 {
        (0..self.dim())
            .map(|i| self.gamma[i] / (self.alpha[i] + self.beta[i] / x))
            .fold(0.0, f64::max)
    }

    /// `f` as an exact piecewise-linear function: knots at 0, at every
    /// breakpoint and at `points`, constant past the last breakpoint.
    pub fn sampled_f(&self, points: &[f64]) -> Result<SampledFunction> {
        let bps = self.breakpoints();
        let far = 2.0 * bps.last().copied().unwrap_or(1.0);
        let grid = HalfLineGrid::new(vec![0.0, far])?
            .with_points(&bps)
            .with_points(points);
        let mut values = Vec::with_capacity(grid.len());
        values.push(self.head_value());
        for &x in grid.positive() {
            values.push(self.f_value(x)?);
        }
        let head_slope = (values[0] == 0.0).then(|| {
            let (z, v) = (grid.points()[1], values[1]);
            v / z
        });
        Ok(SampledFunction::new(grid, values, 0.0)?
            .with_head_slope(head_slope)
            .with_bounded_limit(Some(self.limit())))
    }

    /// Abscissae where two terms of `g` cross.
    fn g_crossings(&self) -> Vec<f64> {
        let (a, b, c) = (&self.alpha, &self.beta, &self.gamma);
        let n = self.dim();
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let den = c[i] * a[j] - c[j] * a[i];
                if den != 0.0 {
                    let z = (c[j] * b[i] - c[i] * b[j]) / den;
                    if z > 0.0 && z.is_finite() {
                        out.push(z);
                    }
                }
            }
        }
        out
    }

    /// `g` sampled on `points` plus its kinks, with exact head and tail
    /// metadata. `g` is a maximum of arcs `c·x/(x + d)`, so these knots make
    /// `G[g]` exact.
    pub fn sampled_g(&self, points: &[f64]) -> Result<SampledFunction> {
        let far = points.iter().copied().fold(1.0, f64::max) * 2.0;
        let grid = HalfLineGrid::new(vec![0.0, far])?
            .with_points(&self.g_crossings())
            .with_points(&self.breakpoints())
            .with_points(points);
        let mut values = Vec::with_capacity(grid.len());
        values.push(self.head_value());
        values.extend(grid.positive().iter().map(|&x| self.g_unchecked(x)));
        let head_slope = (values[0] == 0.0).then(|| {
            (0..self.dim())
                .filter(|&i| self.beta[i] > 0.0)
                .map(|i| self.gamma[i] / self.beta[i])
                .fold(0.0, f64::max)
        });
        Ok(SampledFunction::new(grid, values, 0.0)?
            .with_head_slope(head_slope)
            .with_bounded_limit(Some(self.limit())))
    }

    /// `sup_{r ∈ (0,1]} r·f(x(1-r)/r)` over `r_grid` and the values of `r`
    /// that map onto breakpoints of `f`.
    pub fn g_by_rescaling(&self, x: f64, r_grid: &[f64]) -> Result<f64> {
        let extra = self.breakpoints().into_iter().map(|z| x / (x + z));
        let mut best = self.head_value();
        for r in r_grid.iter().copied().chain(extra) {
            if !(r > 0.0 && r <= 1.0) {
                continue;
            }
            let z = x * (1.0 - r) / r;
            let v = if z > 0.0 { self.f_value(z)? } else { self.head_value() };
            best = best.max(r * v);
        }
        Ok(best)
    }
}

/// `count` points in `(lo, 1)`, uniform in `logit(r)`, then `r = 1`.
pub fn rescaling_grid(count: usize, lo: f64) -> Vec<f64> {
    let logit = |r: f64| (r / (1.0 - r)).ln();
    let (a, b) = (logit(lo), logit(1.0 - lo));
    let mut r: Vec<f64> = (0..count)
        .map(|k| {
            let u = a + (b - a) * k as f64 / (count - 1) as f64;
            1.0 / (1.0 + (-u).exp())
        })
        .collect();
    r.push(1.0);
    r
}

pub const RESCALING_POINTS: usize = 2048;
pub const RESCALING_LO: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeDualityRow {
    pub x: f64,
    pub f: f64,
    pub g: f64,
    /// `F[f](x)`
    pub f_transformed: f64,
    /// `G[g](x)`
    pub g_transformed: f64,
    /// `sup_r r·f(x(1-r)/r)`
    pub rescaled: f64,
}

impl ConeDualityRow {
    fn deviations(&self) -> [f64; 3] {
        let rel = |a: f64, b: f64| (a - b).abs() / (1.0 + a.abs().max(b.abs()));
        [
            rel(self.g, self.f_transformed),
            rel(self.f, self.g_transformed),
            rel(self.g, self.rescaled),
        ]
    }
}

#[derive(Debug, Clone)]
pub struct ConeDualityReport {
    pub rows: Vec<ConeDualityRow>,
    /// Largest `|a - b|/(1 + |a|)` for `g = F[f]`, `f = G[g]` and the
    /// rescaling formula, in that order.
    pub max_deviation: [f64; 3],
    pub tol: f64,
}

impl ConeDualityReport {
    pub fn holds(&self) -> bool {
        self.max_deviation.iter().all(|&d| d <= self.tol)
    }

    /// Rows breaching `tol` in any identity.
    pub fn violations(&self) -> impl Iterator<Item = &ConeDualityRow> {
        self.rows
            .iter()
            .filter(|r| r.deviations().iter().any(|&d| d > self.tol))
    }
}

/// Check `g = F[f]`, `f = G[g]` and the rescaling formula on `x_grid`.
pub fn verify_prop1(cp: &ConeProgram, x_grid: &[f64], tol: f64) -> Result<ConeDualityReport> {
    if let Some(&x) = x_grid.iter().find(|&&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::BadAbscissa(x));
    }
    let f = cp.sampled_f(x_grid)?;
    let g = cp.sampled_g(x_grid)?;
    let Some(&x0) = x_grid.first() else {
        return Err(Error::InvalidGrid("empty x grid".into()));
    };
    let grid = HalfLineGrid::new(vec![0.0, x0])?.with_points(x_grid);
    let ff = transform_f(&f, &grid)?;
    let gg = transform_g(&g, &grid)?;
    let r_grid = rescaling_grid(RESCALING_POINTS, RESCALING_LO);

    let rows: Vec<ConeDualityRow> = x_grid
        .par_iter()
        .map(|&x| -> Result<ConeDualityRow> {
            Ok(ConeDualityRow {
                x,
                f: cp.f_value(x)?,
                g: cp.g_value(x)?,
                f_transformed: ff.evaluate(x)?,
                g_transformed: gg.evaluate(x)?,
                rescaled: cp.g_by_rescaling(x, &r_grid)?,
            })
        })
        .collect::<Result<_>>()?;
    let mut max_deviation = [0.0; 3];
    for r in &rows {
        for (m, d) in max_deviation.iter_mut().zip(r.deviations()) {
            *m = f64::max(*m, d);
        }
    }
    Ok(ConeDualityReport {
        rows,
        max_deviation,
        tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> ConeProgram {
        ConeProgram::new(vec![1.0, 1.0], vec![0.0, 1.0], vec![1.0, 2.0]).unwrap()
    }

    #[test]
    fn validation() {
        assert!(ConeProgram::new(vec![0.0], vec![0.0], vec![1.0]).is_err());
        assert!(ConeProgram::new(vec![1.0], vec![-1.0], vec![1.0]).is_err());
        assert!(ConeProgram::new(vec![1.0, 1.0], vec![0.0], vec![1.0]).is_err());
    }

    #[test]
    fn f_examples() {
        let cp = example();
        assert_eq!(cp.f_value(0.5).unwrap(), 1.5);
        assert_eq!(cp.f_value(1.0).unwrap(), 2.0);
        assert_eq!(cp.f_value(4.0).unwrap(), 2.0);
        let zero = ConeProgram::new(vec![1.0, 2.0], vec![0.0, 1.0], vec![0.0, 0.0]).unwrap();
        assert_eq!(zero.f_value(0.7).unwrap(), 0.0);
        assert_eq!(zero.g_value(0.7).unwrap(), 0.0);
    }

    #[test]
    fn g_examples() {
        let cp = example();
        assert_eq!(cp.g_value(1.0).unwrap(), 1.0);
        assert_eq!(cp.g_value(3.0).unwrap(), 1.5);
    }

    #[test]
    fn single_coordinate_programs() {
        let c = ConeProgram::new(vec![1.0], vec![0.0], vec![2.5]).unwrap();
        for x in [0.1, 1.0, 10.0] {
            assert_eq!(c.f_value(x).unwrap(), 2.5);
            assert_eq!(c.g_value(x).unwrap(), 2.5);
        }
        let m = ConeProgram::new(vec![1.0], vec![1.0], vec![1.0]).unwrap();
        for x in [0.1, 1.0, 10.0] {
            assert_eq!(m.f_value(x).unwrap(), x.min(1.0));
            assert!((m.g_value(x).unwrap() - x / (x + 1.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn duality_on_example() {
        let xs: Vec<f64> = (0..40).map(|k| 10f64.powf(-2.0 + k as f64 / 10.0)).collect();
        let r = verify_prop1(&example(), &xs, 1e-9).unwrap();
        assert!(r.holds(), "{:?}", r.max_deviation);
    }

    #[test]
    fn config_keys() {
        let mut cfg = BTreeMap::new();
        cfg.insert("n".to_string(), "2".to_string());
        cfg.insert("alpha".to_string(), "1, 1".to_string());
        cfg.insert("beta".to_string(), "0,1".to_string());
        cfg.insert("gamma".to_string(), "1,2".to_string());
        assert_eq!(ConeProgram::from_config(&cfg).unwrap(), example());
        cfg.insert("n".to_string(), "3".to_string());
        assert!(ConeProgram::from_config(&cfg).is_err());
    }

    #[test]
    fn rescaling_grid_shape() {
        let r = rescaling_grid(2048, 1e-6);
        assert_eq!(r.len(), 2049);
        assert!((r[0] - 1e-6).abs() < 1e-15 && *r.last().unwrap() == 1.0);
        assert!(r.windows(2).all(|w| w[0] < w[1]));
    }
}
