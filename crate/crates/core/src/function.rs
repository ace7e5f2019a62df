//! Functions on the half-line `[0, ∞)` represented by samples on a grid plus
//! exact asymptotic metadata.
//!
//! Between grid points a [`SampledFunction`] is the piecewise-linear
//! interpolant of its samples; beyond the last grid point it continues with
//! slope `tail_slope`. The limits that the half-line transforms need at
//! `z → 0` and `z → ∞` come from the metadata (`head_slope`, `tail_slope`,
//! `bounded_limit`) rather than from the samples.

use crate::error::{Error, Result};

/// Strictly increasing abscissae starting at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfLineGrid {
    points: Vec<f64>,
}

impl HalfLineGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 points, got {}",
                points.len()
            )));
        }
        if points[0] != 0.0 {
            return Err(Error::InvalidGrid(format!(
                "first point must be 0, got {}",
                points[0]
            )));
        }
        if let Some(p) = points.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidGrid(format!("non-finite point {p}")));
        }
        if let Some(w) = points.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidGrid(format!(
                "points not strictly increasing at {} >= {}",
                w[0], w[1]
            )));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Grid points strictly greater than zero.
    pub fn positive(&self) -> &[f64] {
        &self.points[1..]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn last(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    /// Smallest positive grid point.
    pub fn first_positive(&self) -> f64 {
        self.points[1]
    }

    /// Merge extra abscissae into the grid. Non-positive, non-finite and
    /// duplicate values are dropped.
    pub fn with_points(&self, extra: &[f64]) -> HalfLineGrid {
        let mut pts = self.points.clone();
        pts.extend(extra.iter().copied().filter(|p| p.is_finite() && *p > 0.0));
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        HalfLineGrid { points: pts }
    }

    /// Split every interval into `parts` equal sub-intervals.
    pub fn subdivided(&self, parts: usize) -> HalfLineGrid {
        let parts = parts.max(1);
        let mut pts = Vec::with_capacity((self.points.len() - 1) * parts + 1);
        for w in self.points.windows(2) {
            for k in 0..parts {
                let p = w[0] + (w[1] - w[0]) * k as f64 / parts as f64;
                if pts.last().map_or(true, |&q| p > q) {
                    pts.push(p);
                }
            }
        }
        pts.push(self.last());
        HalfLineGrid { points: pts }
    }
}

/// `{0}` followed by `n` log-spaced points covering `[z_min, z_max]`.
pub fn make_log_grid(z_min: f64, z_max: f64, n: usize) -> Result<HalfLineGrid> {
    if !z_min.is_finite() || !z_max.is_finite() {
        return Err(Error::InvalidGrid("bounds must be finite".into()));
    }
    if z_min <= 0.0 || z_min >= z_max {
        return Err(Error::InvalidGrid(format!(
            "need 0 < z_min < z_max, got [{z_min}, {z_max}]"
        )));
    }
    if n < 2 {
        return Err(Error::InvalidGrid(format!("need n >= 2, got {n}")));
    }
    let (lo, hi) = (z_min.log10(), z_max.log10());
    let step = (hi - lo) / (n - 1) as f64;
    let mut pts = Vec::with_capacity(n + 1);
    pts.push(0.0);
    pts.push(z_min);
    for i in 1..n - 1 {
        pts.push(10f64.powf(lo + step * i as f64));
    }
    pts.push(z_max);
    HalfLineGrid::new(pts)
}

/// An affine function `z ↦ slope·z + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub slope: f64,
    pub intercept: f64,
}

impl Line {
    pub fn new(slope: f64, intercept: f64) -> Result<Self> {
        if !slope.is_finite() || !intercept.is_finite() {
            return Err(Error::NonFinite(format!(
                "line slope {slope}, intercept {intercept}"
            )));
        }
        Ok(Self { slope, intercept })
    }

    pub fn at(&self, z: f64) -> f64 {
        self.intercept + self.slope * z
    }
}

/// Closed-form functions known to the library.
///
/// Names and parameters:
/// - `const [c]`: `c`
/// - `identity []`: `z`
/// - `affine [a, b]`: `a·z + b`
/// - `min [c]`: `min(z, c)`
/// - `neg_recip_minus_t []`: `-1/(z+1) - z`
/// - `recip []`: `1/(z+1)`
/// - `saturating [a, b]`: `a·z/(z+b)`
/// - `clipped_parabola [h, w]`: `h·(1 - (1 - z/w)²)` up to `w`, then `h`
/// - `spike [at, h]`: `h` at the grid point `at`, 0 at every other grid point
/// - `square []`: `z²` (superlinear; rejected by the transforms)
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Builtin {
    Const(f64),
    Identity,
    Affine(f64, f64),
    Min(f64),
    NegRecipMinusT,
    Recip,
    Saturating(f64, f64),
    ClippedParabola(f64, f64),
    Spike(f64, f64),
    Square,
}

impl Builtin {
    pub fn parse(name: &str, params: &[f64]) -> Result<Self> {
        let want = |n: usize| -> Result<()> {
            if params.len() == n {
                Ok(())
            } else {
                Err(Error::InvalidSpec(format!(
                    "builtin `{name}` takes {n} parameter(s), got {}",
                    params.len()
                )))
            }
        };
        let b = match name {
            "const" => {
                want(1)?;
                Builtin::Const(params[0])
            }
            "identity" => {
                want(0)?;
                Builtin::Identity
            }
            "affine" => {
                want(2)?;
                Builtin::Affine(params[0], params[1])
            }
            "min" => {
                want(1)?;
                Builtin::Min(params[0])
            }
            "neg_recip_minus_t" => {
                want(0)?;
                Builtin::NegRecipMinusT
            }
            "recip" => {
                want(0)?;
                Builtin::Recip
            }
            "saturating" => {
                want(2)?;
                if params[0] <= 0.0 || params[1] <= 0.0 {
                    return Err(Error::InvalidSpec("saturating needs a, b > 0".into()));
                }
                Builtin::Saturating(params[0], params[1])
            }
            "clipped_parabola" => {
                want(2)?;
                if params[1] <= 0.0 {
                    return Err(Error::InvalidSpec("clipped_parabola needs w > 0".into()));
                }
                Builtin::ClippedParabola(params[0], params[1])
            }
            "spike" => {
                want(2)?;
                if params[0] <= 0.0 {
                    return Err(Error::InvalidSpec("spike location must be > 0".into()));
                }
                Builtin::Spike(params[0], params[1])
            }
            "square" => {
                want(0)?;
                Builtin::Square
            }
            other => return Err(Error::UnknownBuiltin(other.to_string())),
        };
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidSpec(format!("non-finite parameter for `{name}`")));
        }
        Ok(b)
    }

    pub fn eval(&self, z: f64) -> f64 {
        match *self {
            Builtin::Const(c) => c,
            Builtin::Identity => z,
            Builtin::Affine(a, b) => a * z + b,
            Builtin::Min(c) => z.min(c),
            Builtin::NegRecipMinusT => -1.0 / (z + 1.0) - z,
            Builtin::Recip => 1.0 / (z + 1.0),
            Builtin::Saturating(a, b) => a * z / (z + b),
            Builtin::ClippedParabola(h, w) => {
                if z >= w {
                    h
                } else {
                    let u = 1.0 - z / w;
                    h * (1.0 - u * u)
                }
            }
            Builtin::Spike(at, h) => {
                if z == at {
                    h
                } else {
                    0.0
                }
            }
            Builtin::Square => z * z,
        }
    }

    /// `lim f(z)/z` as `z → ∞`; `+∞` for superlinear functions.
    pub fn tail_slope(&self) -> f64 {
        match *self {
            Builtin::Identity => 1.0,
            Builtin::Affine(a, _) => a,
            Builtin::NegRecipMinusT => -1.0,
            Builtin::Square => f64::INFINITY,
            _ => 0.0,
        }
    }

    /// `lim f(z)` as `z → ∞` when it is finite.
    pub fn bounded_limit(&self) -> Option<f64> {
        match *self {
            Builtin::Const(c) => Some(c),
            Builtin::Affine(a, b) if a == 0.0 => Some(b),
            Builtin::Min(c) => Some(c),
            Builtin::Recip => Some(0.0),
            Builtin::Saturating(a, _) => Some(a),
            Builtin::ClippedParabola(h, _) => Some(h),
            Builtin::Spike(..) => Some(0.0),
            _ => None,
        }
    }

    /// `lim f(z)/z` as `z → 0⁺`, declared only where `f(0) = 0`.
    pub fn head_slope(&self) -> Option<f64> {
        match *self {
            Builtin::Const(c) if c == 0.0 => Some(0.0),
            Builtin::Identity => Some(1.0),
            Builtin::Affine(a, b) if b == 0.0 => Some(a),
            Builtin::Min(c) if c > 0.0 => Some(1.0),
            Builtin::Saturating(a, b) => Some(a / b),
            Builtin::ClippedParabola(h, w) => Some(2.0 * h / w),
            Builtin::Spike(..) => None,
            Builtin::Square => Some(0.0),
            _ => None,
        }
    }

    /// Abscissae where the function has a kink or a point mass; grids should
    /// contain these to make the piecewise-linear model exact there.
    pub fn breakpoints(&self) -> Vec<f64> {
        match *self {
            Builtin::Min(c) if c > 0.0 => vec![c],
            Builtin::ClippedParabola(_, w) => vec![w],
            Builtin::Spike(at, _) => vec![at],
            _ => vec![],
        }
    }
}

/// Source description of a function before sampling.
#[derive(Debug, Clone, PartialEq)]
pub enum SpecKind {
    Builtin { name: String, params: Vec<f64> },
    PiecewiseLinear(Vec<(f64, f64)>),
    Samples { grid: HalfLineGrid, values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionSpec {
    pub kind: SpecKind,
    /// `lim f(z)/z`; overrides any inferred value.
    pub tail_slope: Option<f64>,
    /// Overrides the first sample.
    pub value_at_zero: Option<f64>,
}

impl FunctionSpec {
    pub fn builtin(name: &str, params: &[f64]) -> Self {
        Self {
            kind: SpecKind::Builtin {
                name: name.to_string(),
                params: params.to_vec(),
            },
            tail_slope: None,
            value_at_zero: None,
        }
    }

    pub fn piecewise(knots: Vec<(f64, f64)>) -> Self {
        Self {
            kind: SpecKind::PiecewiseLinear(knots),
            tail_slope: None,
            value_at_zero: None,
        }
    }

    pub fn samples(grid: HalfLineGrid, values: Vec<f64>) -> Self {
        Self {
            kind: SpecKind::Samples { grid, values },
            tail_slope: None,
            value_at_zero: None,
        }
    }

    pub fn with_tail_slope(mut self, s: f64) -> Self {
        self.tail_slope = Some(s);
        self
    }

    pub fn with_value_at_zero(mut self, v: f64) -> Self {
        self.value_at_zero = Some(v);
        self
    }

    /// Kinks of the described function, to be merged into sampling grids.
    pub fn breakpoints(&self) -> Result<Vec<f64>> {
        Ok(match &self.kind {
            SpecKind::Builtin { name, params } => Builtin::parse(name, params)?.breakpoints(),
            SpecKind::PiecewiseLinear(knots) => knots.iter().map(|k| k.0).collect(),
            SpecKind::Samples { grid, .. } => grid.points().to_vec(),
        })
    }
}

/// A function on `[0, ∞)`: grid samples plus tail and head metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: HalfLineGrid,
    values: Vec<f64>,
    tail_slope: f64,
    head_slope: Option<f64>,
    bounded_limit: Option<f64>,
    tail_estimated: bool,
}

impl SampledFunction {
    pub fn new(grid: HalfLineGrid, values: Vec<f64>, tail_slope: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                grid: grid.len(),
                values: values.len(),
            });
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("sample value {v}")));
        }
        if tail_slope.is_nan() || tail_slope == f64::NEG_INFINITY {
            return Err(Error::InvalidSpec(format!("tail slope {tail_slope}")));
        }
        Ok(Self {
            grid,
            values,
            tail_slope,
            head_slope: None,
            bounded_limit: None,
            tail_estimated: false,
        })
    }

    /// Declare `lim f(z)/z` at `z → 0⁺` (meaningful when `f(0) = 0`).
    /// `+∞` is allowed.
    pub fn with_head_slope(mut self, s: Option<f64>) -> Self {
        self.head_slope = s.filter(|s| !s.is_nan());
        self
    }

    /// Declare the finite limit at infinity. Ignored unless the tail slope is 0.
    pub fn with_bounded_limit(mut self, l: Option<f64>) -> Self {
        self.bounded_limit = l.filter(|l| l.is_finite());
        self
    }

    pub fn with_tail_estimated(mut self, flag: bool) -> Self {
        self.tail_estimated = flag;
        self
    }

    pub fn grid(&self) -> &HalfLineGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tail_slope(&self) -> f64 {
        self.tail_slope
    }

    pub fn head_value(&self) -> f64 {
        self.values[0]
    }

    /// Declared head slope, if any.
    pub fn declared_head_slope(&self) -> Option<f64> {
        self.head_slope
    }

    /// Declared head slope, falling back to the slope of the first piece.
    pub fn head_slope(&self) -> f64 {
        self.head_slope.unwrap_or_else(|| {
            let p = self.grid.points();
            (self.values[1] - self.values[0]) / (p[1] - p[0])
        })
    }

    /// Finite limit at infinity when the tail slope is zero.
    pub fn bounded_limit(&self) -> Option<f64> {
        if self.tail_slope == 0.0 {
            self.bounded_limit
        } else {
            None
        }
    }

    /// Limit at infinity for a zero tail slope: the declared limit, else the
    /// value of the flat extension.
    pub fn flat_limit(&self) -> f64 {
        self.bounded_limit().unwrap_or(self.last_value())
    }

    pub fn tail_estimated(&self) -> bool {
        self.tail_estimated
    }

    pub fn last_value(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// `(z, f(z))` pairs over the grid.
    pub fn knots(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.grid.points().iter().copied().zip(self.values.iter().copied())
    }

    /// Piecewise-linear interpolation, linear extrapolation by `tail_slope`.
    pub fn evaluate(&self, z: f64) -> Result<f64> {
        if !z.is_finite() || z < 0.0 {
            return Err(Error::BadAbscissa(z));
        }
        Ok(self.eval_unchecked(z))
    }

    pub(crate) fn eval_unchecked(&self, z: f64) -> f64 {
        let p = self.grid.points();
        let n = p.len();
        if z >= p[n - 1] {
            if z == p[n - 1] {
                return self.values[n - 1];
            }
            return self.values[n - 1] + self.tail_slope * (z - p[n - 1]);
        }
        match p.binary_search_by(|q| q.total_cmp(&z)) {
            Ok(i) => self.values[i],
            Err(i) => {
                let (z0, z1) = (p[i - 1], p[i]);
                let (v0, v1) = (self.values[i - 1], self.values[i]);
                v0 + (v1 - v0) * (z - z0) / (z1 - z0)
            }
        }
    }

    /// Largest absolute slope among the interpolating pieces and the tail.
    pub fn lipschitz(&self) -> f64 {
        let p = self.grid.points();
        let inner = p
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(z, v)| ((v[1] - v[0]) / (z[1] - z[0])).abs())
            .fold(0.0, f64::max);
        inner.max(self.tail_slope.abs())
    }

    /// `λ·f` with the metadata scaled alongside.
    pub fn scaled(&self, lambda: f64) -> SampledFunction {
        SampledFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * lambda).collect(),
            tail_slope: self.tail_slope * lambda,
            head_slope: self.head_slope.map(|s| s * lambda),
            bounded_limit: self.bounded_limit.map(|l| l * lambda),
            tail_estimated: self.tail_estimated,
        }
    }

    /// Re-sample onto another grid by interpolation, keeping the metadata.
    pub fn resampled(&self, grid: &HalfLineGrid) -> SampledFunction {
        SampledFunction {
            values: grid.points().iter().map(|&z| self.eval_unchecked(z)).collect(),
            grid: grid.clone(),
            ..self.clone()
        }
    }
}

/// Evaluate a spec on a grid.
pub fn sample(spec: &FunctionSpec, grid: &HalfLineGrid) -> Result<SampledFunction> {
    let (mut values, tail, head_slope, limit, estimated) = match &spec.kind {
        SpecKind::Builtin { name, params } => {
            let b = Builtin::parse(name, params)?;
            let values: Vec<f64> = grid.points().iter().map(|&z| b.eval(z)).collect();
            let tail = spec.tail_slope.unwrap_or(b.tail_slope());
            (values, tail, b.head_slope(), b.bounded_limit(), false)
        }
        SpecKind::PiecewiseLinear(knots) => {
            if knots.len() < 2 {
                return Err(Error::InvalidSpec("need at least two knots".into()));
            }
            let zs: Vec<f64> = knots.iter().map(|k| k.0).collect();
            let kg = HalfLineGrid::new(zs).map_err(|e| Error::InvalidSpec(e.to_string()))?;
            let vs: Vec<f64> = knots.iter().map(|k| k.1).collect();
            from_samples(kg, vs, spec.tail_slope, grid)?
        }
        SpecKind::Samples { grid: sg, values } => {
            if values.len() != sg.len() {
                return Err(Error::LengthMismatch {
                    grid: sg.len(),
                    values: values.len(),
                });
            }
            from_samples(sg.clone(), values.clone(), spec.tail_slope, grid)?
        }
    };
    if let Some(v0) = spec.value_at_zero {
        values[0] = v0;
    }
    let f = SampledFunction::new(grid.clone(), values, tail)?
        .with_head_slope(head_slope)
        .with_bounded_limit(limit)
        .with_tail_estimated(estimated);
    Ok(f)
}

type SampleParts = (Vec<f64>, f64, Option<f64>, Option<f64>, bool);

fn from_samples(
    kg: HalfLineGrid,
    vs: Vec<f64>,
    tail: Option<f64>,
    grid: &HalfLineGrid,
) -> Result<SampleParts> {
    let (tail, estimated) = match tail {
        Some(s) => (s, false),
        None => {
            let p = kg.points();
            let n = p.len();
            ((vs[n - 1] - vs[n - 2]) / (p[n - 1] - p[n - 2]), true)
        }
    };
    let last = vs[vs.len() - 1];
    let src = SampledFunction::new(kg, vs, tail)?;
    let values = grid.points().iter().map(|&z| src.eval_unchecked(z)).collect();
    let limit = (tail == 0.0).then_some(last);
    Ok((values, tail, None, limit, estimated))
}

/// Growth bound `C` with `f(z) <= C (z + 1)` on the samples and
/// `C >= tail_slope`.
pub fn check_linear_growth(f: &SampledFunction) -> Result<f64> {
    let s = f.tail_slope();
    if !s.is_finite() {
        return Err(Error::GrowthViolation(format!(
            "tail slope {s} is not finite"
        )));
    }
    let c = f
        .knots()
        .map(|(z, v)| v / (z + 1.0))
        .fold(f64::NEG_INFINITY, f64::max)
        .max(s);
    if !c.is_finite() {
        return Err(Error::GrowthViolation(format!("growth bound {c}")));
    }
    Ok(c)
}
