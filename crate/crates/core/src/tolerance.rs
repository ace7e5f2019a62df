//! Comparison tolerances shared by the verification routines.

/// Absolute plus scale-relative tolerance: `|a - b| <= atol + rtol * scale`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub atol: f64,
    pub rtol: f64,
}

impl Tolerance {
    pub const fn new(atol: f64, rtol: f64) -> Self {
        Self { atol, rtol }
    }

    /// Default for single transforms.
    pub const DIRECT: Tolerance = Tolerance::new(1e-9, 1e-9);

    /// Default for compositions (GF, FG).
    pub const COMPOSITION: Tolerance = Tolerance::new(1e-9, 1e-6);

    pub fn bound(&self, scale: f64) -> f64 {
        self.atol + self.rtol * scale.abs()
    }

    pub fn close(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.bound(a.abs().max(b.abs()))
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::DIRECT
    }
}

/// Largest absolute deviation between two equally long slices.
pub fn max_abs_deviation(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub(crate) fn sup_abs(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).fold(0.0, f64::max)
}
