//! Concave envelopes built geometrically from the knot set: the smallest
//! concave majorant, and the smallest majorants within the class of
//! nonnegative nondecreasing concave functions (A-class) and of nonpositive
//! nonincreasing concave functions whose asymptote passes through the origin
//! (B-class).

use std::fmt;

use crate::error::{Error, Result};
use crate::function::{check_linear_growth, SampledFunction};

const CLASS_ATOL: f64 = 1e-9;
/// Relative tolerance when comparing ratios `hull(z)/z` for tie-breaking.
const RATIO_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HullClass {
    A,
    B,
}

impl HullClass {
    pub fn name(self) -> &'static str {
        match self {
            HullClass::A => "A",
            HullClass::B => "B",
        }
    }
}

impl fmt::Display for HullClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A hull breakpoint abscissa, possibly at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Breakpoint {
    At(f64),
    AtInfinity,
}

impl Breakpoint {
    fn le(self, other: Breakpoint) -> bool {
        match (self, other) {
            (_, Breakpoint::AtInfinity) => true,
            (Breakpoint::AtInfinity, Breakpoint::At(_)) => false,
            (Breakpoint::At(a), Breakpoint::At(b)) => a <= b,
        }
    }
}

impl fmt::Display for Breakpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Breakpoint::At(z) => write!(f, "{z:.16e}"),
            Breakpoint::AtInfinity => f.write_str("inf"),
        }
    }
}

/// A class hull with its two breakpoints. For the A-class these are
/// `A₁` (end of the segment through the origin) and `A₂` (start of the
/// horizontal ray); for the B-class `B₁` (end of the horizontal segment) and
/// `B₂` (start of the ray through the origin).
#[derive(Debug, Clone, PartialEq)]
pub struct HullDecomposition {
    pub hull: SampledFunction,
    pub class: HullClass,
    pub first: Breakpoint,
    pub second: Breakpoint,
}

/// Vertices of the upper hull of the knot points, left to right. Collinear
/// middle points are kept so concave input is reproduced exactly.
fn upper_chain(zs: &[f64], vs: &[f64]) -> Vec<usize> {
    let mut chain: Vec<usize> = Vec::with_capacity(zs.len());
    for i in 0..zs.len() {
        while chain.len() >= 2 {
            let a = chain[chain.len() - 2];
            let b = chain[chain.len() - 1];
            // b lies strictly below the chord a -> i (beyond rounding)
            let l = (zs[b] - zs[a]) * (vs[i] - vs[a]);
            let r = (vs[b] - vs[a]) * (zs[i] - zs[a]);
            let slack = 4.0
                * f64::EPSILON
                * ((zs[b] - zs[a]) * (vs[i].abs() + vs[a].abs())
                    + (zs[i] - zs[a]) * (vs[b].abs() + vs[a].abs()));
            if l - r > slack {
                chain.pop();
            } else {
                break;
            }
        }
        chain.push(i);
    }
    chain
}

/// Smallest concave majorant of `f` (knots plus the tail ray).
pub fn concave_majorant(f: &SampledFunction) -> Result<SampledFunction> {
    check_linear_growth(f)?;
    let zs = f.grid().points();
    let vs = f.values();
    let s = f.tail_slope();
    let mut chain = upper_chain(zs, vs);
    // The terminal ray has slope `s`; cut the chain at the vertex supporting
    // direction (1, s), i.e. the last maximiser of v - s·z up to rounding.
    let support = |i: usize| vs[i] - s * zs[i];
    let best = chain.iter().map(|&i| support(i)).fold(f64::NEG_INFINITY, f64::max);
    let cut = chain
        .iter()
        .rposition(|&i| support(i) >= best - 8.0 * f64::EPSILON * (vs[i].abs() + (s * zs[i]).abs()))
        .expect("chain is never empty");
    chain.truncate(cut + 1);
    let last = *chain.last().expect("chain is never empty");

    let mut values = Vec::with_capacity(zs.len());
    let mut seg = 0;
    for (j, &z) in zs.iter().enumerate() {
        if j >= last {
            values.push(if j == last { vs[j] } else { vs[last] + s * (z - zs[last]) });
            continue;
        }
        while chain[seg + 1] < j {
            seg += 1;
        }
        let (a, b) = (chain[seg], chain[seg + 1]);
        values.push(if j == a {
            vs[a]
        } else if j == b {
            vs[b]
        } else {
            vs[a] + (vs[b] - vs[a]) * (z - zs[a]) / (zs[b] - zs[a])
        });
    }
    let limit = (s == 0.0).then(|| values.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    let head_slope = f
        .declared_head_slope()
        .filter(|_| chain.len() > 1 && chain[1] == 1 && vs[0] == values[0]);
    Ok(SampledFunction::new(f.grid().clone(), values, s)?
        .with_head_slope(head_slope)
        .with_bounded_limit(limit))
}

/// A-case iff `f` takes a positive value somewhere.
pub fn classify(f: &SampledFunction) -> HullClass {
    if f.values().iter().any(|&v| v > 0.0) || f.tail_slope() > 0.0 {
        HullClass::A
    } else {
        HullClass::B
    }
}

fn ratio_le(a: f64, b: f64) -> bool {
    a <= b + RATIO_RTOL * (1.0 + a.abs().max(b.abs()))
}

/// Smallest A-class majorant.
pub fn a_hull(f: &SampledFunction) -> Result<HullDecomposition> {
    if classify(f) != HullClass::A {
        return Err(Error::WrongClass {
            expected: "A",
            actual: "B",
        });
    }
    let maj = concave_majorant(f)?;
    let zs = maj.grid().points();
    let hs = maj.values();
    let s = maj.tail_slope();
    let n = zs.len();

    // A1: rightmost contact of the supporting line through the origin.
    let first = if hs[0] > 0.0 {
        Breakpoint::At(0.0)
    } else {
        let ratio = |i: usize| if i == 0 { maj.head_slope() } else { hs[i] / zs[i] };
        let start = if hs[0] == 0.0 { 0 } else { 1 };
        let mut best = start;
        for i in start..n {
            if ratio_le(ratio(best), ratio(i)) {
                best = i;
            }
        }
        if ratio_le(ratio(best), s) {
            Breakpoint::AtInfinity
        } else {
            Breakpoint::At(zs[best])
        }
    };

    // A2: leftmost maximiser of the majorant.
    let max = hs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let argmax = hs.iter().position(|&v| v == max).unwrap_or(0);
    let limit_above = f.bounded_limit().is_some_and(|l| l > max + CLASS_ATOL);
    let second = if s > 0.0 || limit_above {
        Breakpoint::AtInfinity
    } else {
        Breakpoint::At(zs[argmax])
    };

    let (origin_slope, a1_idx) = match first {
        Breakpoint::At(z) if z > 0.0 => {
            let i = zs.iter().position(|&q| q == z).unwrap();
            (Some(hs[i] / z), Some(i))
        }
        Breakpoint::At(_) => (None, None),
        Breakpoint::AtInfinity => (Some(s), None),
    };

    let mut values = Vec::with_capacity(n);
    for (j, &z) in zs.iter().enumerate() {
        let v = match (first, second) {
            (Breakpoint::AtInfinity, _) => s * z,
            _ if a1_idx.is_some_and(|i| j < i) => origin_slope.unwrap() * z,
            (_, Breakpoint::At(_)) if j >= argmax => max,
            _ => hs[j],
        };
        values.push(v);
    }
    let (tail, limit) = match second {
        Breakpoint::AtInfinity => (s, if s == 0.0 { f.bounded_limit() } else { None }),
        Breakpoint::At(_) => (0.0, Some(max)),
    };
    debug_assert!(first.le(second));
    let hull = SampledFunction::new(maj.grid().clone(), values, tail)?
        .with_head_slope(origin_slope.or(maj.declared_head_slope()))
        .with_bounded_limit(limit);
    Ok(HullDecomposition {
        hull,
        class: HullClass::A,
        first,
        second,
    })
}

/// Smallest B-class majorant, following the value of the transforms where
/// the class boundary is degenerate: with a zero tail slope the only
/// admissible majorant is the zero function.
pub fn b_hull(f: &SampledFunction) -> Result<HullDecomposition> {
    if classify(f) != HullClass::B {
        return Err(Error::WrongClass {
            expected: "B",
            actual: "A",
        });
    }
    let maj = concave_majorant(f)?;
    let zs = maj.grid().points();
    let hs = maj.values();
    let s = maj.tail_slope();
    let n = zs.len();

    if s >= 0.0 {
        log::warn!(
            "B-hull with zero tail slope degenerates to the zero function \
             (input approaches a nonzero constant or is sublinear)"
        );
        let hull = SampledFunction::new(maj.grid().clone(), vec![0.0; n], 0.0)?
            .with_head_slope(Some(0.0))
            .with_bounded_limit(Some(0.0));
        return Ok(HullDecomposition {
            hull,
            class: HullClass::B,
            first: Breakpoint::AtInfinity,
            second: Breakpoint::AtInfinity,
        });
    }

    // B1: rightmost maximiser of the majorant.
    let max = hs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let b1 = hs.iter().rposition(|&v| v == max).unwrap_or(0);

    // B2: leftmost contact of the steepest admissible ray through the origin,
    // i.e. the largest ratio hull(z)/z, with the tail slope as the limit.
    let ratio = |i: usize| {
        if i == 0 {
            if hs[0] == 0.0 {
                maj.head_slope()
            } else {
                f64::NEG_INFINITY
            }
        } else {
            hs[i] / zs[i]
        }
    };
    let mut best = 0;
    for i in 1..n {
        if ratio(i) > ratio(best) && !ratio_le(ratio(i), ratio(best)) {
            best = i;
        }
    }
    let (k, second) = if ratio_le(ratio(best), s) {
        (s, Breakpoint::AtInfinity)
    } else {
        (ratio(best), Breakpoint::At(zs[best]))
    };

    let values: Vec<f64> = zs
        .iter()
        .enumerate()
        .map(|(j, &z)| match second {
            _ if j <= b1 => max,
            Breakpoint::At(b2) if z >= b2 => k * z,
            _ => hs[j],
        })
        .collect();
    let hull = SampledFunction::new(maj.grid().clone(), values, k)?;
    Ok(HullDecomposition {
        hull,
        class: HullClass::B,
        first: Breakpoint::At(zs[b1]),
        second,
    })
}

/// `a_hull` or `b_hull` according to [`classify`].
pub fn class_hull(f: &SampledFunction) -> Result<HullDecomposition> {
    match classify(f) {
        HullClass::A => a_hull(f),
        HullClass::B => b_hull(f),
    }
}

fn slopes_nonincreasing(f: &SampledFunction) -> bool {
    let zs = f.grid().points();
    let vs = f.values();
    let slopes: Vec<f64> = zs
        .windows(2)
        .zip(vs.windows(2))
        .map(|(z, v)| (v[1] - v[0]) / (z[1] - z[0]))
        .collect();
    let chords_ok = slopes
        .windows(2)
        .zip(zs.windows(3))
        .all(|(s, z)| (s[1] - s[0]) * (z[2] - z[0]) <= CLASS_ATOL * (1.0 + (z[2] - z[0])));
    let last = slopes.last().copied().unwrap_or(0.0);
    chords_ok && f.tail_slope() <= last + CLASS_ATOL
}

/// Discrete check of membership in the A-class on the knots.
pub fn is_in_class_a(f: &SampledFunction) -> bool {
    let vs = f.values();
    vs.iter().all(|&v| v >= -CLASS_ATOL)
        && vs.windows(2).all(|w| w[1] >= w[0] - CLASS_ATOL)
        && f.tail_slope() >= 0.0
        && slopes_nonincreasing(f)
}

/// Discrete check of membership in the B-class on the knots.
pub fn is_in_class_b(f: &SampledFunction) -> bool {
    let vs = f.values();
    let zs = f.grid().points();
    let s = f.tail_slope();
    let basic = vs.iter().all(|&v| v <= CLASS_ATOL)
        && vs.windows(2).all(|w| w[1] <= w[0] + CLASS_ATOL)
        && s <= 0.0
        && slopes_nonincreasing(f);
    if !basic {
        return false;
    }
    if s < 0.0 {
        // The terminal ray's extension must pass through the origin.
        let n = zs.len();
        let intercept = vs[n - 1] - s * zs[n - 1];
        return intercept.abs() <= 1e-5 * (1.0 + vs[n - 1].abs());
    }
    true
}
