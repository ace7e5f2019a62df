//! When does `FG[f] = f` hold?
//!
//! `G[f](x)` is the lower envelope of the lines `ℓ_z` through `(-z, 0)` and
//! `(0, f(z))`. For nonnegative `f` with `G[f] ≢ 0`, `FG[f] = f` holds when
//! every arc `a·t/(t+b)` (`a, b > 0`) through two points of the graph stays
//! above the graph between them. Pairs no arc connects count as failures,
//! so constants and rays fail the check though they are fixed by `FG`.
//! [`chord_condition`] tests arcs on knot pairs, [`check_fg_identity`]
//! computes `FG[f]` directly.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::function::{HalfLineGrid, Line, SampledFunction};
use crate::tolerance::{max_abs_deviation, sup_abs};
use crate::transforms::{compose_fg, transform_g};

/// Arc `a·t/(t+b)` with `a, b > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HArc {
    pub a: f64,
    pub b: f64,
}

impl HArc {
    pub fn new(a: f64, b: f64) -> Option<Self> {
        (a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()).then_some(Self { a, b })
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.a * t / (t + self.b)
    }
}

/// The line through `(-z, 0)` and `(0, f(z))`.
pub fn ell_z_line(f: &SampledFunction, z: f64) -> Result<Line> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::BadAbscissa(z));
    }
    let v = f.evaluate(z)?;
    Line::new(v / z, v)
}

/// The arc through `(x1, y1)` and `(x2, y2)`, if one exists.
pub fn h_arc_through(p1: (f64, f64), p2: (f64, f64)) -> Result<HArc> {
    let ((x1, y1), (x2, y2)) = (p1, p2);
    let no_arc = Error::NoValidArc { x1, y1, x2, y2 };
    let den = y2 * x1 - y1 * x2;
    if !(x1 > 0.0 && x1 < x2) || den == 0.0 {
        return Err(no_arc);
    }
    let b = x1 * x2 * (y1 - y2) / den;
    let a = y1 * (x1 + b) / x1;
    HArc::new(a, b).ok_or(no_arc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChordVerdict {
    Holds,
    Fails,
    /// `f` takes negative values or `G[f] ≡ 0`.
    NotApplicable,
}

/// A knot pair whose arc dips below `f`. `arc` is `None` when no arc
/// connects two positive points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Counterexample {
    pub p1: (f64, f64),
    pub p2: (f64, f64),
    pub arc: Option<HArc>,
    /// worst knot between the pair: `(z, arc(z), f(z))`
    pub worst: Option<(f64, f64, f64)>,
}

impl Counterexample {
    pub const CSV_HEADER: [&'static str; 9] =
        ["x1", "y1", "x2", "y2", "a", "b", "z", "arc_value", "f_value"];

    pub fn record(&self) -> [f64; 9] {
        let (a, b) = self.arc.map_or((f64::NAN, f64::NAN), |h| (h.a, h.b));
        let (z, av, fv) = self.worst.unwrap_or((f64::NAN, f64::NAN, f64::NAN));
        [self.p1.0, self.p1.1, self.p2.0, self.p2.1, a, b, z, av, fv]
    }

    /// `f - arc` at the worst knot; infinite for a missing arc.
    pub fn violation(&self) -> f64 {
        self.worst.map_or(f64::INFINITY, |(_, a, v)| v - a)
    }
}

#[derive(Debug, Clone)]
pub struct ChordReport {
    pub verdict: ChordVerdict,
    pub pairs_checked: usize,
    pub worst: Option<Counterexample>,
    pub counterexamples: Vec<Counterexample>,
}

impl ChordReport {
    pub fn holds(&self) -> bool {
        self.verdict == ChordVerdict::Holds
    }

    pub fn worst_violation(&self) -> f64 {
        self.worst.map_or(0.0, |c| c.violation())
    }
}

/// Absolute slack for "arc above f" at a knot.
const ARC_SLACK: f64 = 1e-9;
/// `G[f]` is treated as identically zero below this.
const ZERO_ATOL: f64 = 1e-9;
const MAX_COUNTEREXAMPLES: usize = 1000;

/// Knot indices (positive abscissae only) whose pairs are checked: all of
/// them when the pair count fits `pair_budget`, otherwise an evenly strided
/// subset that keeps both ends.
fn pair_indices(n_knots: usize, pair_budget: usize) -> Vec<usize> {
    let all: Vec<usize> = (1..n_knots).collect();
    let m = all.len();
    if m * m.saturating_sub(1) / 2 <= pair_budget {
        return all;
    }
    let mut k = 2;
    while (k + 1) * k / 2 <= pair_budget {
        k += 1;
    }
    let mut out: Vec<usize> = (0..k)
        .map(|i| all[((i * (m - 1)) as f64 / (k - 1) as f64).round() as usize])
        .collect();
    out.dedup();
    out
}

fn check_pair(f: &SampledFunction, i: usize, j: usize) -> Option<Counterexample> {
    let zs = f.grid().points();
    let vs = f.values();
    let p1 = (zs[i], vs[i]);
    let p2 = (zs[j], vs[j]);
    let arc = match h_arc_through(p1, p2) {
        Ok(arc) => arc,
        Err(_) if vs[i] > 0.0 && vs[j] > 0.0 => {
            return Some(Counterexample { p1, p2, arc: None, worst: None });
        }
        Err(_) => return None,
    };
    let mut worst: Option<(f64, f64, f64)> = None;
    for k in (i + 1)..j {
        let a = arc.eval(zs[k]);
        let excess = vs[k] - a;
        if excess > ARC_SLACK * (1.0 + vs[k].abs())
            && worst.map_or(true, |(_, wa, wv)| excess > wv - wa)
        {
            worst = Some((zs[k], a, vs[k]));
        }
    }
    worst.map(|w| Counterexample { p1, p2, arc: Some(arc), worst: Some(w) })
}

/// Check the arc condition on up to `pair_budget` knot pairs.
pub fn chord_condition(f: &SampledFunction, pair_budget: usize) -> ChordReport {
    let not_applicable = ChordReport {
        verdict: ChordVerdict::NotApplicable,
        pairs_checked: 0,
        worst: None,
        counterexamples: Vec::new(),
    };
    if f.values().iter().any(|&v| v < 0.0) || f.tail_slope() < 0.0 {
        return not_applicable;
    }
    match transform_g(f, f.grid()) {
        Ok(g) if sup_abs(g.values()) > ZERO_ATOL => {}
        _ => return not_applicable,
    }

    let idx = pair_indices(f.grid().len(), pair_budget);
    let pairs: Vec<(usize, usize)> = idx
        .iter()
        .enumerate()
        .flat_map(|(p, &i)| idx[p + 1..].iter().map(move |&j| (i, j)))
        .collect();
    let found: Vec<Counterexample> = pairs
        .par_iter()
        .filter_map(|&(i, j)| check_pair(f, i, j))
        .collect();
    let worst = found
        .iter()
        .copied()
        .reduce(|w, c| if c.violation() > w.violation() { c } else { w });
    ChordReport {
        verdict: if found.is_empty() { ChordVerdict::Holds } else { ChordVerdict::Fails },
        pairs_checked: pairs.len(),
        worst,
        counterexamples: found.into_iter().take(MAX_COUNTEREXAMPLES).collect(),
    }
}

#[derive(Debug, Clone)]
pub struct FgIdentityReport {
    pub max_abs_deviation: f64,
    pub identity_holds: bool,
    /// `FG[f]` on the requested grid.
    pub fg: SampledFunction,
}

/// Compare `FG[f]` with `f` on `x_grid`; holds iff the deviation is at most
/// `tol·(1 + sup|f|)`.
pub fn check_fg_identity(
    f: &SampledFunction,
    x_grid: &HalfLineGrid,
    tol: f64,
) -> Result<FgIdentityReport> {
    let fg = compose_fg(f, x_grid)?;
    let direct: Vec<f64> = x_grid
        .points()
        .iter()
        .map(|&x| f.evaluate(x))
        .collect::<Result<_>>()?;
    let dev = max_abs_deviation(fg.values(), &direct);
    Ok(FgIdentityReport {
        max_abs_deviation: dev,
        identity_holds: dev <= tol * (1.0 + sup_abs(&direct)),
        fg,
    })
}
