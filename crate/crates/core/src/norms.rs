//! Energy-constrained norms of a real matrix `A` with respect to a positive
//! semidefinite energy operator `G` with `λ_min(G) = 0`:
//!
//! ```text
//! f_A(E) = sup{Tr(AᵀA X) | X ⪰ 0, Tr X ≤ 1, Tr GX ≤ E}
//!        = min_{μ ≥ 0} [λ_max(AᵀA - μG)]₊ + μE
//! g_A(E) = λ_max(S^{-1/2} AᵀA S^{-1/2}),  S = I + G/E
//! ```
//!
//! with `g_A = F[f_A]` and `f_A = G[g_A]`. At `E = 0` both curves take their
//! `E → 0⁺` limit, `λ_max` of `AᵀA` compressed to the kernel of `G`.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::function::{make_log_grid, HalfLineGrid, SampledFunction};
use crate::linalg::{dot, eigendecompose_symmetric, golden_section, Eigen, Matrix, SymmetricMatrix};
use crate::transforms::{transform_f, transform_g};

/// Label for the `E = 0` convention in reports.
pub const E_ZERO_CONVENTION: &str = "E->0+ limit: lambda_max of A^T A on ker G";

/// A positive semidefinite operator with smallest eigenvalue 0.
#[derive(Debug, Clone)]
pub struct EnergyOperator {
    matrix: SymmetricMatrix,
    eigen: Eigen,
    scale: f64,
}

impl EnergyOperator {
    pub fn new(matrix: SymmetricMatrix) -> Result<Self> {
        let eigen = eigendecompose_symmetric(&matrix);
        let scale = eigen.values.iter().map(|v| v.abs()).fold(1.0, f64::max);
        let lo = eigen.min();
        if lo < -1e-10 * scale {
            return Err(Error::InvalidMatrix(format!(
                "energy operator is not positive semidefinite (smallest eigenvalue {lo:e})"
            )));
        }
        if lo > 1e-8 * scale {
            return Err(Error::InvalidMatrix(format!(
                "energy operator has smallest eigenvalue {lo:e} > 0; use G - {lo:e}·I"
            )));
        }
        Ok(Self { matrix, eigen, scale })
    }

    pub fn matrix(&self) -> &SymmetricMatrix {
        &self.matrix
    }

    pub fn eigen(&self) -> &Eigen {
        &self.eigen
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Eigenvalues at or below this count as kernel.
    pub fn kernel_tol(&self) -> f64 {
        1e-8 * self.scale
    }

    /// `λ_max(G)`
    pub fn norm(&self) -> f64 {
        self.eigen.max().max(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    F,
    G,
}

impl fmt::Display for CurveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CurveKind::F => "f_curve",
            CurveKind::G => "g_curve",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormCurve {
    pub energies: Vec<f64>,
    pub values: Vec<f64>,
    pub kind: CurveKind,
}

/// `A`, `M = AᵀA` and `G` with their spectral data computed once.
#[derive(Debug, Clone)]
pub struct NormProblem {
    a: Matrix,
    m: SymmetricMatrix,
    m_max: f64,
    g: EnergyOperator,
    /// `M` in the eigenbasis of `G`
    m_in_g_basis: SymmetricMatrix,
    head: f64,
}

impl NormProblem {
    pub fn new(a: Matrix, g: EnergyOperator) -> Result<Self> {
        if a.dim() != g.dim() {
            return Err(Error::DimensionMismatch(format!(
                "A is {n}×{n} but G is {k}×{k}",
                n = a.dim(),
                k = g.dim()
            )));
        }
        let m = a.gram();
        let m_max = eigendecompose_symmetric(&m).max();
        let m_in_g_basis = m.congruence(&g.eigen.vectors);
        let kernel: Vec<usize> = (0..g.dim())
            .filter(|&i| g.eigen.values[i] <= g.kernel_tol())
            .collect();
        let head = compressed_max(&m_in_g_basis, &kernel).max(0.0);
        Ok(Self {
            a,
            m,
            m_max,
            g,
            m_in_g_basis,
            head,
        })
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn gram(&self) -> &SymmetricMatrix {
        &self.m
    }

    pub fn energy(&self) -> &EnergyOperator {
        &self.g
    }

    /// `λ_max(AᵀA)`, the limit of both curves as `E → ∞`.
    pub fn lambda_max(&self) -> f64 {
        self.m_max
    }

    /// Common `E → 0⁺` limit of both curves.
    pub fn head_value(&self) -> f64 {
        self.head
    }

    fn shifted(&self, mu: f64) -> Eigen {
        eigendecompose_symmetric(&self.m.add_scaled(self.g.matrix(), -mu))
    }

    fn dual(&self, mu: f64, e: f64) -> f64 {
        self.shifted(mu).max().max(0.0) + mu * e
    }

    /// `f_A(E)` and the minimising multiplier.
    pub fn f_with_multiplier(&self, e: f64) -> Result<(f64, f64)> {
        check_energy(e)?;
        if e == 0.0 {
            return Ok((self.head, f64::INFINITY));
        }
        let hi = self.m_max / e + 1.0;
        let (mu, v) = golden_section(|mu| self.dual(mu, e), 0.0, hi, 1e-13);
        Ok((v, mu))
    }

    pub fn f_at(&self, e: f64) -> Result<f64> {
        Ok(self.f_with_multiplier(e)?.0)
    }

    pub fn g_at(&self, e: f64) -> Result<f64> {
        check_energy(e)?;
        if e == 0.0 {
            return Ok(self.head);
        }
        Ok(self.g_eigen(e).max().max(0.0))
    }

    /// Spectrum of `D·M̃·D` with `D = diag(1/sqrt(1 + λ_i(G)/E))`.
    fn g_eigen(&self, e: f64) -> Eigen {
        let d: Vec<f64> = self
            .g
            .eigen
            .values
            .iter()
            .map(|&l| 1.0 / (1.0 + l.max(0.0) / e).sqrt())
            .collect();
        eigendecompose_symmetric(&self.m_in_g_basis.congruence(&Matrix::diag(&d)))
    }

    /// Exact point `(E, f_A(E))` of the curve touched by multiplier `mu`,
    /// with the top eigenvector of `M - μG`.
    fn touching_point(&self, mu: f64) -> (f64, f64, Vec<f64>) {
        let eig = self.shifted(mu);
        let v = eig.vector(eig.values.len() - 1);
        let e = self.g.matrix().matrix().quad(&v).max(0.0);
        (e, eig.max().max(0.0) + mu * e, v)
    }
}

fn check_energy(e: f64) -> Result<()> {
    if e >= 0.0 && e.is_finite() {
        Ok(())
    } else {
        Err(Error::BadAbscissa(e))
    }
}

fn compressed_max(m: &SymmetricMatrix, idx: &[usize]) -> f64 {
    if idx.is_empty() {
        return 0.0;
    }
    let rows: Vec<Vec<f64>> = idx
        .iter()
        .map(|&i| idx.iter().map(|&j| m.matrix().get(i, j)).collect())
        .collect();
    let sub = Matrix::from_rows(&rows).expect("square finite block");
    eigendecompose_symmetric(&SymmetricMatrix::new(sub).expect("symmetric block")).max()
}

pub fn f_curve(p: &NormProblem, energies: &[f64]) -> Result<NormCurve> {
    let values = energies
        .par_iter()
        .map(|&e| p.f_at(e))
        .collect::<Result<_>>()?;
    Ok(NormCurve {
        energies: energies.to_vec(),
        values,
        kind: CurveKind::F,
    })
}

pub fn g_curve(p: &NormProblem, energies: &[f64]) -> Result<NormCurve> {
    let values = energies
        .par_iter()
        .map(|&e| p.g_at(e))
        .collect::<Result<_>>()?;
    Ok(NormCurve {
        energies: energies.to_vec(),
        values,
        kind: CurveKind::G,
    })
}

// ------------------------------------------------------------ oracle -----

const ORACLE_MU_POINTS: usize = 10_000;
const ORACLE_ANGLES: usize = 2048;
pub const ORACLE_GAP: f64 = 1e-6;

/// Dual value from a dense multiplier scan and a primal value from rank-one
/// candidates; both bound `f_A(E)`, from above and below.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleCertificate {
    pub energy: f64,
    pub dual: f64,
    pub primal: f64,
    pub multiplier: f64,
}

impl OracleCertificate {
    pub fn gap(&self) -> f64 {
        self.dual - self.primal
    }

    pub fn certified(&self) -> bool {
        self.gap().abs() <= ORACLE_GAP * (1.0 + self.dual.abs())
    }
}

/// Best `c·⟨w,Mw⟩` over unit `w` in `span{u1, u2}` with the largest `c ≤ 1`
/// keeping `c·⟨w,Gw⟩ ≤ E`.
fn best_in_plane(p: &NormProblem, u1: &[f64], u2: &[f64], e: f64) -> f64 {
    // Gram-Schmidt
    let n1 = dot(u1, u1).sqrt();
    let b1: Vec<f64> = u1.iter().map(|x| x / n1).collect();
    let proj = dot(u2, &b1);
    let mut b2: Vec<f64> = u2.iter().zip(&b1).map(|(x, y)| x - proj * y).collect();
    let n2 = dot(&b2, &b2).sqrt();
    let planar = n2 > 1e-8;
    if planar {
        b2.iter_mut().for_each(|x| *x /= n2);
    }
    let m = p.m.matrix();
    let g = p.g.matrix().matrix();
    let form = |q: &Matrix| {
        if planar {
            (q.quad(&b1), dot(&b1, &q.matvec(&b2)), q.quad(&b2))
        } else {
            (q.quad(&b1), 0.0, 0.0)
        }
    };
    let (m11, m12, m22) = form(m);
    let (g11, g12, g22) = form(g);
    let value = |th: f64| {
        let (c, s) = (th.cos(), th.sin());
        let mv = m11 * c * c + 2.0 * m12 * c * s + m22 * s * s;
        let gv = g11 * c * c + 2.0 * g12 * c * s + g22 * s * s;
        let scale = if gv > e { e / gv } else { 1.0 };
        scale * mv
    };
    if !planar {
        return value(0.0);
    }
    let pi = std::f64::consts::PI;
    let step = pi / ORACLE_ANGLES as f64;
    let (mut k_best, mut best) = (0, value(0.0));
    for k in 1..ORACLE_ANGLES {
        let v = value(k as f64 * step);
        if v > best {
            best = v;
            k_best = k;
        }
    }
    let th = k_best as f64 * step;
    let (_, neg) = golden_section(|t| -value(t), th - step, th + step, 1e-15);
    best = best.max(-neg);
    // directions where the energy constraint is exactly active
    let (qa, qb, qc) = (g22 - e, 2.0 * g12, g11 - e);
    let mut roots = vec![pi / 2.0];
    if qa.abs() > 1e-300 {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc >= 0.0 {
            let r = disc.sqrt();
            roots.push(((-qb + r) / (2.0 * qa)).atan());
            roots.push(((-qb - r) / (2.0 * qa)).atan());
        }
    } else if qb != 0.0 {
        roots.push((-qc / qb).atan());
    }
    roots.into_iter().map(value).fold(best, f64::max)
}

/// Independent estimate of `f_A(E)` for small dimensions.
pub fn f_curve_oracle(p: &NormProblem, e: f64) -> Result<OracleCertificate> {
    if !(e > 0.0) || !e.is_finite() {
        return Err(Error::BadAbscissa(e));
    }
    let hi = p.m_max / e + 1.0;
    let lo = hi * 1e-12;
    let mut mus = vec![0.0];
    let ratio = (hi / lo).ln() / (ORACLE_MU_POINTS - 1) as f64;
    mus.extend((0..ORACLE_MU_POINTS).map(|k| lo * (ratio * k as f64).exp()));
    let phis: Vec<f64> = mus.iter().map(|&mu| p.dual(mu, e)).collect();
    let k = (0..mus.len())
        .min_by(|&i, &j| phis[i].total_cmp(&phis[j]))
        .expect("non-empty scan");
    let (mut best_mu, mut dual) = (mus[k], phis[k]);

    // bisection on the sign of the subgradient E - ⟨v,Gv⟩
    let (mut a, mut b) = (mus[k.saturating_sub(1)], mus[(k + 1).min(mus.len() - 1)]);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let (en, val, _) = p.touching_point(mid);
        let phi = val - mid * en + mid * e;
        if phi < dual {
            dual = phi;
            best_mu = mid;
        }
        if e - en < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }

    let top2 = |mu: f64| {
        let eig = p.shifted(mu);
        let n = eig.values.len();
        let v1 = eig.vector(n - 1);
        let v2 = if n > 1 { eig.vector(n - 2) } else { v1.clone() };
        (v1, v2)
    };
    let delta = 1e-7 * best_mu.max(1.0);
    let (v1, v2) = top2(best_mu);
    let below = p.touching_point((best_mu - delta).max(0.0)).2;
    let above = p.touching_point(best_mu + delta).2;
    let primal = [
        best_in_plane(p, &v1, &v2, e),
        best_in_plane(p, &below, &above, e),
        best_in_plane(p, &v1, &above, e),
        best_in_plane(p, &below, &v1, e),
    ]
    .into_iter()
    .fold(0.0, f64::max);

    Ok(OracleCertificate {
        energy: e,
        dual,
        primal,
        multiplier: best_mu,
    })
}

// ------------------------------------------------------- relation (3) ---

const MU_KNOTS: usize = 4096;
const MU_DECADES: f64 = 10.0;
const G_KNOTS: usize = 4096;
const WIDEN: f64 = 1e4;
/// Top eigenvectors with overlap below this are treated as a switch.
const SWITCH_OVERLAP: f64 = 0.9;

/// Bisect `[lo, hi]` for the parameter where `top(t)` jumps, returning the
/// last parameters on either side.
fn bisect_switch(lo: f64, hi: f64, top: impl Fn(f64) -> Vec<f64>) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let va = top(a);
    for _ in 0..60 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if dot(&va, &top(mid)).abs() >= SWITCH_OVERLAP {
            a = mid;
        } else {
            b = mid;
        }
    }
    (a, b)
}

/// Largest relative gap between neighbouring energies of the `f_A` samples.
const ENERGY_GAP: f64 = 5e-3;

/// Bisect the multiplier between two touching points until neighbouring
/// energies are within `ENERGY_GAP`. A jump in `E(μ)` (a linear stretch of
/// `f_A`) ends up with points on both sides of it.
fn fill_energy_gap(p: &NormProblem, a: (f64, (f64, f64)), b: (f64, (f64, f64))) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut stack = vec![(a, b, 0usize)];
    while let Some(((ma, pa), (mb, pb), depth)) = stack.pop() {
        let (ea, eb) = (pa.0, pb.0);
        let gap = (ea - eb).abs();
        let wide = gap > ENERGY_GAP * ea.abs().max(eb.abs()) && gap > 1e-12 * p.g.norm();
        let mid = 0.5 * (ma + mb);
        if !wide || depth >= 48 || mid <= ma.min(mb) || mid >= ma.max(mb) {
            continue;
        }
        let (e, v, _) = p.touching_point(mid);
        out.push((e, v));
        stack.push(((ma, pa), (mid, (e, v)), depth + 1));
        stack.push(((mid, (e, v)), (mb, pb), depth + 1));
    }
    out
}

/// `f_A` as a sampled function: exact points `(⟨v,Gv⟩, f_A)` from a
/// multiplier scan refined until neighbouring energies are close, and
/// `energies`.
pub fn sampled_f(p: &NormProblem, energies: &[f64]) -> Result<SampledFunction> {
    let lam = p.m_max;
    let gn = p.g.norm();
    let mut pts: Vec<(f64, f64)> = Vec::new();
    if gn > 0.0 && lam > 0.0 {
        let centre = (lam / gn).ln();
        let span = MU_DECADES * std::f64::consts::LN_10;
        let mus: Vec<f64> = std::iter::once(0.0)
            .chain((0..MU_KNOTS).map(|k| {
                (centre - span + 2.0 * span * k as f64 / (MU_KNOTS - 1) as f64).exp()
            }))
            .collect();
        let touch: Vec<(f64, f64)> = mus
            .par_iter()
            .map(|&mu| {
                let (e, v, _) = p.touching_point(mu);
                (e, v)
            })
            .collect();
        pts.extend(touch.iter().copied());
        let fill: Vec<(f64, f64)> = (1..mus.len())
            .into_par_iter()
            .flat_map_iter(|k| fill_energy_gap(p, (mus[k - 1], touch[k - 1]), (mus[k], touch[k])))
            .collect();
        pts.extend(fill);
        let e_sat = touch[0].0;
        pts.push((2.0 * e_sat.max(1e-300), lam));
    }
    let curve = f_curve(p, energies)?;
    pts.extend(curve.energies.iter().copied().zip(curve.values));
    build_curve(p, pts)
}

/// `g_A` sampled on a widened log grid, `energies`, and its kinks.
pub fn sampled_g(p: &NormProblem, energies: &[f64]) -> Result<SampledFunction> {
    let (lo, hi) = energy_range(energies)?;
    let base = make_log_grid(lo / WIDEN, hi * WIDEN, G_KNOTS)?.with_points(energies);
    let xs = base.positive().to_vec();
    let tops: Vec<(f64, Vec<f64>)> = xs
        .par_iter()
        .map(|&e| {
            let eig = p.g_eigen(e);
            (eig.max().max(0.0), eig.vector(eig.values.len() - 1))
        })
        .collect();
    let mut pts: Vec<(f64, f64)> = xs.iter().zip(&tops).map(|(&e, (v, _))| (e, *v)).collect();
    let top = |e: f64| {
        let eig = p.g_eigen(e);
        eig.vector(eig.values.len() - 1)
    };
    let kinks: Vec<(f64, f64)> = (1..xs.len())
        .into_par_iter()
        .filter(|&k| dot(&tops[k - 1].1, &tops[k].1).abs() < SWITCH_OVERLAP)
        .map(|k| {
            let (a, b) = bisect_switch(xs[k - 1], xs[k], top);
            let e = 0.5 * (a + b);
            (e, p.g_eigen(e).max().max(0.0))
        })
        .collect();
    pts.extend(kinks);
    build_curve(p, pts)
}

fn energy_range(energies: &[f64]) -> Result<(f64, f64)> {
    if energies.is_empty() {
        return Err(Error::InvalidGrid("empty energy grid".into()));
    }
    if let Some(&e) = energies.iter().find(|&&e| !(e > 0.0) || !e.is_finite()) {
        return Err(Error::BadAbscissa(e));
    }
    let lo = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = energies.iter().copied().fold(0.0, f64::max);
    Ok((lo, hi))
}

fn build_curve(p: &NormProblem, mut pts: Vec<(f64, f64)>) -> Result<SampledFunction> {
    pts.retain(|(e, v)| *e > 0.0 && e.is_finite() && v.is_finite());
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.dedup_by(|a, b| a.0 == b.0);
    let mut grid = vec![0.0];
    let mut values = vec![p.head];
    for (e, v) in pts {
        grid.push(e);
        values.push(v);
    }
    Ok(SampledFunction::new(HalfLineGrid::new(grid)?, values, 0.0)?
        .with_bounded_limit(Some(p.m_max)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormRelationRow {
    pub energy: f64,
    pub f: f64,
    pub g: f64,
    /// `F[f_A](E)`
    pub f_transformed: f64,
    /// `G[g_A](E)`
    pub g_transformed: f64,
}

#[derive(Debug, Clone)]
pub struct NormRelationReport {
    pub rows: Vec<NormRelationRow>,
    /// Largest `|a - b|/(1 + |a|)` for `g_A = F[f_A]` and `f_A = G[g_A]`.
    pub max_deviation: [f64; 2],
    pub tol: f64,
    /// Value used for both curves at `E = 0`; see [`E_ZERO_CONVENTION`].
    pub head_value: f64,
}

impl NormRelationReport {
    pub fn holds(&self) -> bool {
        self.max_deviation.iter().all(|&d| d <= self.tol)
    }
}

/// Check `g_A = F[f_A]` and `f_A = G[g_A]` on `energies`.
pub fn verify_u_rel(p: &NormProblem, energies: &[f64], tol: f64) -> Result<NormRelationReport> {
    let (lo, _) = energy_range(energies)?;
    let f = sampled_f(p, energies)?;
    let g = sampled_g(p, energies)?;
    let grid = HalfLineGrid::new(vec![0.0, lo])?.with_points(energies);
    let ff = transform_f(&f, &grid)?;
    let gg = transform_g(&g, &grid)?;
    let fc = f_curve(p, energies)?;
    let gc = g_curve(p, energies)?;
    let rel = |a: f64, b: f64| (a - b).abs() / (1.0 + a.abs());
    let mut max_deviation = [0.0f64; 2];
    let mut rows = Vec::with_capacity(energies.len());
    for (k, &e) in energies.iter().enumerate() {
        let row = NormRelationRow {
            energy: e,
            f: fc.values[k],
            g: gc.values[k],
            f_transformed: ff.evaluate(e)?,
            g_transformed: gg.evaluate(e)?,
        };
        max_deviation[0] = max_deviation[0].max(rel(row.g, row.f_transformed));
        max_deviation[1] = max_deviation[1].max(rel(row.f, row.g_transformed));
        rows.push(row);
    }
    Ok(NormRelationReport {
        rows,
        max_deviation,
        tol,
        head_value: p.head,
    })
}
