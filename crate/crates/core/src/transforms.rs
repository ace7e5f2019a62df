//! The half-line transforms
//!
//! ```text
//! F[f](x) = sup_{t>0} f(xt)/(t+1)      = sup_{z>0} x·f(z)/(x+z)
//! G[f](x) = inf_{t>0} f(xt)·(1 + 1/t)  = inf_{z>0} f(z)·(x+z)/z
//! ```
//!
//! and their compositions. Both are taken over the sample abscissae plus the
//! two limit terms `z → 0⁺` and `z → ∞`, so `G[f]` is the lower envelope of
//! the lines through `(-z, 0)` and `(0, f(z))` over the knots. For a
//! piecewise-linear `f` the form in `F` is monotone on every piece, so `F` is
//! exact for the interpolant as well.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::function::{check_linear_growth, make_log_grid, HalfLineGrid, Line, SampledFunction};

/// Which candidate realises a sup/inf at a given `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Term {
    /// `z → 0⁺`
    Head,
    /// `z → ∞`
    Tail,
    /// grid knot with this index (≥ 1)
    Knot(usize),
}

/// Value of `G[f](x)`; `-∞` is kept distinct from finite values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GValue {
    Finite(f64),
    UnboundedBelow,
}

impl GValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            GValue::Finite(v) => Some(v),
            GValue::UnboundedBelow => None,
        }
    }
}

/// Asymptotic metadata attached to a transform's output.
#[derive(Debug, Clone, Copy)]
struct Meta {
    tail_slope: f64,
    head_slope: Option<f64>,
    bounded_limit: Option<f64>,
}

// ---------------------------------------------------------------- F ------

fn f_point(f: &SampledFunction, x: f64) -> (f64, Term) {
    let mut best = (f.head_value(), Term::Head);
    let tail = x * f.tail_slope();
    if tail > best.0 {
        best = (tail, Term::Tail);
    }
    for (i, (z, v)) in f.knots().enumerate().skip(1) {
        let c = x * v / (x + z);
        if c > best.0 {
            best = (c, Term::Knot(i));
        }
    }
    best
}

fn f_term(f: &SampledFunction, term: Term, x: f64) -> f64 {
    match term {
        Term::Head => f.head_value(),
        Term::Tail => x * f.tail_slope(),
        Term::Knot(i) => {
            let z = f.grid().points()[i];
            x * f.values()[i] / (x + z)
        }
    }
}

fn f_at(f: &SampledFunction, x: f64) -> f64 {
    if x == 0.0 {
        f.head_value().max(0.0)
    } else {
        f_point(f, x).0
    }
}

fn f_meta(f: &SampledFunction) -> Meta {
    let s = f.tail_slope();
    let v0 = f.head_value();
    let max_knot = f.values().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let bounded_limit = if s > 0.0 {
        None
    } else if s == 0.0 {
        Some(max_knot.max(f.flat_limit()).max(0.0))
    } else {
        Some(max_knot)
    };
    let head_slope = if v0 > 0.0 {
        None
    } else {
        let mut h = s;
        for (z, v) in f.knots().skip(1) {
            h = h.max(v / z);
        }
        if v0 == 0.0 {
            h = h.max(f.head_slope());
        }
        Some(h)
    };
    Meta {
        tail_slope: s.max(0.0),
        head_slope,
        bounded_limit,
    }
}

/// `F[f]` sampled on `x_grid`.
pub fn transform_f(f: &SampledFunction, x_grid: &HalfLineGrid) -> Result<SampledFunction> {
    check_linear_growth(f)?;
    let values: Vec<f64> = x_grid.points().par_iter().map(|&x| f_at(f, x)).collect();
    build(x_grid.clone(), values, f_meta(f))
}

/// `F[f](x)` at a single point.
pub fn f_value(f: &SampledFunction, x: f64) -> Result<f64> {
    check_linear_growth(f)?;
    if !x.is_finite() || x < 0.0 {
        return Err(Error::BadAbscissa(x));
    }
    Ok(f_at(f, x))
}

// ---------------------------------------------------------------- G ------

/// Whether `G[f]` is `-∞` for every `x > 0`. The head limit (`f(0) < 0`) and
/// the tail limit (negative tail slope) do not depend on `x`.
fn g_unbounded(f: &SampledFunction) -> bool {
    f.head_value() < 0.0 || f.tail_slope() < 0.0 || f.head_slope() == f64::NEG_INFINITY
}

fn g_point(f: &SampledFunction, x: f64) -> (f64, Term) {
    let v0 = f.head_value();
    let s = f.tail_slope();
    let mut best = (f64::INFINITY, Term::Tail);
    if v0 == 0.0 {
        let hs = f.head_slope();
        if hs.is_finite() {
            best = (hs * x, Term::Head);
        }
    }
    if s == 0.0 {
        let l = f.flat_limit();
        if l < best.0 {
            best = (l, Term::Tail);
        }
    }
    for (i, (z, v)) in f.knots().enumerate().skip(1) {
        let c = v * (x + z) / z;
        if c < best.0 {
            best = (c, Term::Knot(i));
        }
    }
    best
}

fn g_term(f: &SampledFunction, term: Term, x: f64) -> f64 {
    match term {
        Term::Head => f.head_slope() * x,
        Term::Tail => f.flat_limit(),
        Term::Knot(i) => {
            let z = f.grid().points()[i];
            f.values()[i] * (x + z) / z
        }
    }
}

/// Limit of `G[f](x)` as `x → 0⁺`: `inf_z f(z)`.
fn g_at_zero(f: &SampledFunction) -> f64 {
    let mut m = f.values().iter().copied().fold(f64::INFINITY, f64::min);
    if f.tail_slope() == 0.0 {
        m = m.min(f.flat_limit());
    }
    m
}

fn g_at(f: &SampledFunction, x: f64) -> f64 {
    if x == 0.0 {
        g_at_zero(f)
    } else {
        g_point(f, x).0
    }
}

fn g_meta(f: &SampledFunction) -> Meta {
    let v0 = f.head_value();
    let s = f.tail_slope();
    let mut slope = s;
    let mut zero_ratio_values: Vec<f64> = Vec::new();
    if s == 0.0 {
        zero_ratio_values.push(f.flat_limit());
    }
    if v0 == 0.0 {
        let hs = f.head_slope();
        slope = slope.min(hs);
        if hs == 0.0 {
            zero_ratio_values.push(0.0);
        }
    }
    for (z, v) in f.knots().skip(1) {
        slope = slope.min(v / z);
        if v == 0.0 {
            zero_ratio_values.push(0.0);
        }
    }
    let bounded_limit = if slope == 0.0 {
        zero_ratio_values.into_iter().reduce(f64::min)
    } else {
        None
    };
    Meta {
        tail_slope: slope,
        head_slope: None,
        bounded_limit,
    }
}

/// `G[f]` sampled on `x_grid`. Fails with [`Error::UnboundedBelow`] when
/// `G[f] = -∞`, which happens on all of `x > 0` at once.
pub fn transform_g(f: &SampledFunction, x_grid: &HalfLineGrid) -> Result<SampledFunction> {
    if g_unbounded(f) {
        return Err(Error::UnboundedBelow {
            x: x_grid.first_positive(),
        });
    }
    let values: Vec<f64> = x_grid.points().par_iter().map(|&x| g_at(f, x)).collect();
    build(x_grid.clone(), values, g_meta(f))
}

/// `G[f](x)` at a single point, `-∞` reported as [`GValue::UnboundedBelow`].
pub fn g_value(f: &SampledFunction, x: f64) -> Result<GValue> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::BadAbscissa(x));
    }
    if g_unbounded(f) && x > 0.0 {
        return Ok(GValue::UnboundedBelow);
    }
    if x == 0.0 && (f.head_value() < 0.0 || f.tail_slope() < 0.0) {
        return Ok(GValue::UnboundedBelow);
    }
    Ok(GValue::Finite(g_at(f, x)))
}

fn build(grid: HalfLineGrid, values: Vec<f64>, meta: Meta) -> Result<SampledFunction> {
    if let Some((x, v)) = grid
        .points()
        .iter()
        .zip(&values)
        .find(|(_, v)| !v.is_finite())
    {
        return Err(Error::NonFinite(format!("transform value {v} at x = {x}")));
    }
    if !meta.tail_slope.is_finite() {
        return Err(Error::NonFinite(format!(
            "transform tail slope {}",
            meta.tail_slope
        )));
    }
    Ok(SampledFunction::new(grid, values, meta.tail_slope)?
        .with_head_slope(meta.head_slope)
        .with_bounded_limit(meta.bounded_limit))
}

// -------------------------------------------------------- compositions ---

/// Points per decade of the geometric tail extension of inner grids.
const TAIL_POINTS_PER_DECADE: f64 = 32.0;
/// Inner grids are extended at both ends until the inner function (or its
/// slope, at the head) is within this relative distance of its limit, or by
/// at most `TAIL_MAX_DECADES`.
const TAIL_CONVERGED: f64 = 1e-12;
const TAIL_MAX_DECADES: f64 = 12.0;
const KINK_DEPTH: usize = 4;

/// Grid on which the inner transform of a composition is sampled: 4× the
/// outer density over `[x_min/10, 10·x_max]`, merged with the outer points.
pub fn composition_inner_grid(x_grid: &HalfLineGrid) -> Result<HalfLineGrid> {
    let lo = x_grid.first_positive() / 10.0;
    let hi = x_grid.last() * 10.0;
    let n = (4 * (x_grid.len() - 1)).max(2);
    Ok(make_log_grid(lo, hi, n)?.with_points(x_grid.positive()))
}

/// Geometric points from `from` (exclusive), upwards for `dir = 1` or
/// downwards for `dir = -1`, until `value(z)` settles at `limit`.
fn extension(from: f64, dir: f64, limit: f64, value: impl Fn(f64) -> f64) -> Vec<f64> {
    let mut out = Vec::new();
    let steps = (TAIL_MAX_DECADES * TAIL_POINTS_PER_DECADE) as usize;
    for k in 1..=steps {
        let z = from * 10f64.powf(dir * k as f64 / TAIL_POINTS_PER_DECADE);
        out.push(z);
        if (value(z) - limit).abs() <= TAIL_CONVERGED * (1.0 + limit.abs()) {
            break;
        }
    }
    out
}

/// Insert the crossing points of the active candidates between neighbouring
/// grid points, so kinks of the sampled sup/inf land on knots.
fn refine_kinks<P, T>(points: &[f64], point: P, term: T) -> Vec<f64>
where
    P: Fn(f64) -> (f64, Term) + Sync,
    T: Fn(Term, f64) -> f64 + Sync,
{
    let evals: Vec<(f64, Term)> = points
        .par_iter()
        .map(|&x| if x > 0.0 { point(x) } else { (0.0, Term::Head) })
        .collect();
    let extra: Vec<f64> = (1..points.len().saturating_sub(1))
        .into_par_iter()
        .flat_map_iter(|i| {
            let mut found = Vec::new();
            crossings(
                &point,
                &term,
                (points[i], evals[i].1),
                (points[i + 1], evals[i + 1].1),
                KINK_DEPTH,
                &mut found,
            );
            found
        })
        .collect();
    let mut all = points.to_vec();
    all.extend(extra);
    all.sort_by(f64::total_cmp);
    all.dedup();
    all
}

fn crossings<P, T>(
    point: &P,
    term: &T,
    left: (f64, Term),
    right: (f64, Term),
    depth: usize,
    out: &mut Vec<f64>,
) where
    P: Fn(f64) -> (f64, Term),
    T: Fn(Term, f64) -> f64,
{
    if depth == 0 || left.1 == right.1 {
        return;
    }
    let diff = |x: f64| term(left.1, x) - term(right.1, x);
    let (mut lo, mut hi) = (left.0, right.0);
    let d_lo = diff(lo);
    if !d_lo.is_finite() || !diff(hi).is_finite() || d_lo.signum() == diff(hi).signum() {
        return;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if diff(mid).signum() == d_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let xc = 0.5 * (lo + hi);
    if xc <= left.0 || xc >= right.0 {
        return;
    }
    out.push(xc);
    let mid_term = point(xc).1;
    crossings(point, term, left, (xc, mid_term), depth - 1, out);
    crossings(point, term, (xc, mid_term), right, depth - 1, out);
}

/// `F[f]` on the refined inner grid used by compositions.
fn inner_f(f: &SampledFunction, x_grid: &HalfLineGrid) -> Result<SampledFunction> {
    check_linear_growth(f)?;
    let meta = f_meta(f);
    let base = composition_inner_grid(x_grid)?;
    let mut pts = base.points().to_vec();
    if meta.tail_slope == 0.0 {
        if let Some(l) = meta.bounded_limit {
            pts.extend(extension(base.last(), 1.0, l, |z| f_at(f, z)));
        }
    }
    // Where F[f](0) = 0 the infimum in G[F[f]](x) sits near z ~ x², far
    // below the requested range.
    if let (Some(hs), true) = (meta.head_slope, f_at(f, 0.0) == 0.0) {
        pts.extend(extension(base.first_positive(), -1.0, hs, |z| f_at(f, z) / z));
    }
    let pts = refine_kinks(&pts, |x| f_point(f, x), |t, x| f_term(f, t, x));
    let grid = HalfLineGrid::new(pts)?;
    let values = grid.points().par_iter().map(|&x| f_at(f, x)).collect();
    build(grid, values, meta)
}

/// `G[f]` on the refined inner grid used by compositions.
fn inner_g(f: &SampledFunction, x_grid: &HalfLineGrid) -> Result<SampledFunction> {
    let base = composition_inner_grid(x_grid)?;
    if g_unbounded(f) {
        return Err(Error::UnboundedBelow {
            x: base.first_positive(),
        });
    }
    let meta = g_meta(f);
    let mut pts = base.points().to_vec();
    if meta.tail_slope == 0.0 {
        if let Some(l) = meta.bounded_limit {
            pts.extend(extension(base.last(), 1.0, l, |z| g_at(f, z)));
        }
    }
    let pts = refine_kinks(&pts, |x| g_point(f, x), |t, x| g_term(f, t, x));
    let grid = HalfLineGrid::new(pts)?;
    let values = grid.points().par_iter().map(|&x| g_at(f, x)).collect();
    build(grid, values, meta)
}

/// `GF[f] = G[F[f]]` on `x_grid`.
pub fn compose_gf(f: &SampledFunction, x_grid: &HalfLineGrid) -> Result<SampledFunction> {
    let inner = inner_f(f, x_grid)?;
    transform_g(&inner, x_grid)
}

/// `FG[f] = F[G[f]]` on `x_grid`. Undefined (an `UnboundedBelow` error) when
/// `G[f] = -∞`.
pub fn compose_fg(f: &SampledFunction, x_grid: &HalfLineGrid) -> Result<SampledFunction> {
    let inner = inner_g(f, x_grid)?;
    transform_f(&inner, x_grid)
}

// ------------------------------------------------------- support lines ---

/// The line through `(-x, 0)` and `(0, F[f](x))`: a minimal-slope line from
/// `(-x, 0)` lying above the graph of `f`. At a touching knot rounding can
/// leave the line an ulp below `f`; the intercept is then raised by ulps
/// until it majorizes every knot in floating point.
pub fn left_support_line(f: &SampledFunction, x: f64) -> Result<Line> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::BadAbscissa(x));
    }
    let mut fx = f_value(f, x)?;
    let below = |fx: f64| {
        let line = Line { slope: fx / x, intercept: fx };
        f.knots().any(|(z, v)| v > line.at(z))
    };
    for _ in 0..64 {
        if !below(fx) {
            break;
        }
        fx = fx.next_up();
    }
    Line::new(fx / x, fx)
}

/// `inf_z (F[f](x) - x·f(z)/(x+z))` over `probes` and both limits; zero when
/// the slope of the left supporting line cannot be reduced.
pub fn left_support_gap(f: &SampledFunction, x: f64, probes: &[f64]) -> Result<f64> {
    let fx = f_value(f, x)?;
    let mut gap = (fx - f.head_value()).min(fx - x * f.tail_slope());
    for &z in probes.iter().filter(|&&z| z > 0.0) {
        gap = gap.min(fx - x * f.evaluate(z)? / (x + z));
    }
    Ok(gap)
}
