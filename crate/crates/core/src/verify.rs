//! `GF[f]` against the geometric class hull, point by point.

use crate::envelope::{class_hull, Breakpoint, HullClass};
use crate::error::{Error, Result};
use crate::function::SampledFunction;
use crate::tolerance::sup_abs;
use crate::transforms::compose_gf;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HullCheckRow {
    pub x: f64,
    pub gf: f64,
    pub hull: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone)]
pub struct HullCheckReport {
    pub class: HullClass,
    pub first: Breakpoint,
    pub second: Breakpoint,
    pub rows: Vec<HullCheckRow>,
    pub max_deviation: f64,
    /// `rel_tol·(1 + sup|hull|)`
    pub bound: f64,
}

impl HullCheckReport {
    pub fn holds(&self) -> bool {
        self.max_deviation <= self.bound
    }
}

/// Compute `GF[f]` on the knots of `f` and compare with the class hull.
///
/// A sample-estimated tail slope makes the comparison meaningless far out,
/// so it is refused unless `allow_estimated_tail` is set.
pub fn verify_theorem(
    f: &SampledFunction,
    rel_tol: f64,
    allow_estimated_tail: bool,
) -> Result<HullCheckReport> {
    if f.tail_estimated() && !allow_estimated_tail {
        return Err(Error::EstimatedTail);
    }
    let dec = class_hull(f)?;
    if dec.class == HullClass::B && dec.second == Breakpoint::AtInfinity && f.values()[0] < 0.0 {
        log::warn!("B-class input whose ray slope is only approached in the limit: hull taken as GF, which lifts the asymptote to 0");
    }
    let gf = compose_gf(f, f.grid())?;
    let rows: Vec<HullCheckRow> = gf
        .knots()
        .zip(dec.hull.values())
        .map(|((x, g), &h)| HullCheckRow { x, gf: g, hull: h, deviation: (g - h).abs() })
        .collect();
    let max_deviation = rows.iter().map(|r| r.deviation).fold(0.0, f64::max);
    let bound = rel_tol * (1.0 + sup_abs(dec.hull.values()));
    Ok(HullCheckReport {
        class: dec.class,
        first: dec.first,
        second: dec.second,
        rows,
        max_deviation,
        bound,
    })
}
