//! Worked examples checked against brute force computed here, independent
//! of the library's knot-based formulas.

mod common;

use halfline::cone::ConeProgram;
use halfline::norms::{f_curve_oracle, EnergyOperator, NormProblem};
use halfline::linalg::{Matrix, SymmetricMatrix};
use halfline::transforms::{f_value, g_value};
use halfline::{
    a_hull, b_hull, classify, compose_fg, compose_gf, concave_majorant, left_support_line,
    make_log_grid, Breakpoint, GValue, HullClass,
};

use common::*;

/// Dense log grid of z over `[1e-8, 1e8]`.
fn dense_z() -> Vec<f64> {
    log_points(1e-8, 1e8, 200_001)
}

fn brute_f(f: impl Fn(f64) -> f64, x: f64, zs: &[f64]) -> f64 {
    zs.iter().map(|&z| x * f(z) / (x + z)).fold(f64::NEG_INFINITY, f64::max)
}

fn brute_g(f: impl Fn(f64) -> f64, x: f64, zs: &[f64]) -> f64 {
    zs.iter().map(|&z| f(z) * (x + z) / z).fold(f64::INFINITY, f64::min)
}

fn probes() -> Vec<f64> {
    log_points(1e-2, 1e2, 17)
}

fn finite(g: GValue) -> f64 {
    g.finite().expect("G is finite here")
}

#[test]
fn f_of_min_is_saturating() {
    let grid = make_log_grid(1e-3, 1e3, 401).unwrap();
    let f = builtin("min", &[1.0], &grid);
    let zs = dense_z();
    for x in probes() {
        let want = x / (x + 1.0);
        assert!((f_value(&f, x).unwrap() - want).abs() < 1e-12);
        assert!((brute_f(|z| z.min(1.0), x, &zs) - want).abs() < 1e-6);
    }
}

#[test]
fn f_of_shifted_identity_is_identity() {
    let grid = make_log_grid(1e-3, 1e3, 401).unwrap();
    let f = builtin("affine", &[1.0, -1.0], &grid);
    let ts = log_points(1e-3, 1e8, 100_000);
    for x in probes() {
        let brute = ts.iter().map(|&t| (x * t - 1.0) / (t + 1.0)).fold(f64::NEG_INFINITY, f64::max);
        assert!((brute - x).abs() < 1e-6 * (1.0 + x));
        assert!((f_value(&f, x).unwrap() - x).abs() < 1e-12 * (1.0 + x));
    }
}

#[test]
fn f_of_negative_constant_is_zero() {
    let grid = make_log_grid(1e-3, 1e3, 101).unwrap();
    let f = builtin("const", &[-1.0], &grid);
    let zs = dense_z();
    for x in probes() {
        assert_eq!(f_value(&f, x).unwrap(), 0.0);
        assert!(brute_f(|_| -1.0, x, &zs).abs() < 1e-6);
    }
}

#[test]
fn g_of_saturating_is_min() {
    let grid = make_log_grid(1e-3, 1e3, 401).unwrap();
    let f = builtin("saturating", &[1.0, 1.0], &grid);
    let zs = dense_z();
    for x in probes() {
        let want = x.min(1.0);
        assert!((finite(g_value(&f, x).unwrap()) - want).abs() < 1e-12);
        assert!((brute_g(|z| z / (z + 1.0), x, &zs) - want).abs() < 1e-6);
    }
}

#[test]
fn compositions_match_double_brute_force() {
    let grid = make_log_grid(1e-3, 1e3, 401).unwrap().with_points(&probes());
    let zs = log_points(1e-6, 1e6, 4001);
    let xs = probes();
    // brute GF: F by brute force on zs, then G by brute force over zs
    let brute_gf = |f: &dyn Fn(f64) -> f64, x: f64| {
        let inner: Vec<f64> = zs.iter().map(|&z| brute_f(f, z, &zs)).collect();
        zs.iter()
            .zip(&inner)
            .map(|(&z, &v)| v * (x + z) / z)
            .fold(f64::INFINITY, f64::min)
    };
    let min1 = |z: f64| z.min(1.0);
    let m = builtin("min", &[1.0], &grid);
    let gf = compose_gf(&m, &grid).unwrap();
    for &x in &xs {
        assert!((gf.evaluate(x).unwrap() - x.min(1.0)).abs() < 1e-9);
        assert!((brute_gf(&min1, x) - x.min(1.0)).abs() < 1e-2);
    }
    let shifted = builtin("affine", &[1.0, -1.0], &grid);
    let gf = compose_gf(&shifted, &grid).unwrap();
    for &x in &xs {
        assert!((gf.evaluate(x).unwrap() - x).abs() < 1e-9 * (1.0 + x));
    }
    let sat = builtin("saturating", &[1.0, 1.0], &grid);
    let fg = compose_fg(&sat, &grid).unwrap();
    let fgm = compose_fg(&m, &grid).unwrap();
    for &x in &xs {
        assert!((fg.evaluate(x).unwrap() - x / (x + 1.0)).abs() < 1e-9);
        assert!((fgm.evaluate(x).unwrap() - x / (x + 1.0)).abs() < 1e-9);
    }
}

#[test]
fn spike_hull_is_min() {
    let grid = make_log_grid(1e-3, 1e3, 401).unwrap();
    let f = builtin("spike", &[1.0, 1.0], &grid);
    let maj = concave_majorant(&f).unwrap();
    let dec = a_hull(&f).unwrap();
    assert_eq!((dec.first, dec.second), (Breakpoint::At(1.0), Breakpoint::At(1.0)));
    let gf = compose_gf(&f, &grid).unwrap();
    for (k, (z, _)) in f.knots().enumerate() {
        assert!((maj.values()[k] - z.min(1.0)).abs() < 1e-12);
        assert!((dec.hull.values()[k] - z.min(1.0)).abs() < 1e-12);
        assert!((gf.values()[k] - z.min(1.0)).abs() < 1e-9);
    }
    // brute force: majorant dominates and midpoint-concave on all knot triples
    let v = maj.values();
    let z = f.grid().points();
    for i in 0..z.len() {
        assert!(v[i] >= f.values()[i]);
        for j in i + 2..z.len() {
            for k in [i + 1, (i + j) / 2, j - 1] {
                let w = (z[k] - z[i]) / (z[j] - z[i]);
                assert!(v[k] >= (1.0 - w) * v[i] + w * v[j] - 1e-12);
            }
        }
    }
}

#[test]
fn class_hull_examples() {
    let grid = make_log_grid(1e-3, 1e3, 201).unwrap();
    let shifted = builtin("affine", &[1.0, -1.0], &grid);
    assert_eq!(classify(&shifted), HullClass::A);
    let d = a_hull(&shifted).unwrap();
    assert_eq!(d.second, Breakpoint::AtInfinity);
    for (z, v) in d.hull.knots() {
        assert!((v - z).abs() < 1e-9 * (1.0 + z));
    }
    let one = builtin("const", &[1.0], &grid);
    let d = a_hull(&one).unwrap();
    assert_eq!((d.first, d.second), (Breakpoint::At(0.0), Breakpoint::At(0.0)));

    let phi = builtin("neg_recip_minus_t", &[], &grid);
    let d = b_hull(&phi).unwrap();
    assert_eq!((d.first, d.second), (Breakpoint::At(0.0), Breakpoint::AtInfinity));
    assert!(sup_abs_diff(d.hull.values(), phi.values()) < 1e-12);

    let minus_one = builtin("const", &[-1.0], &grid);
    assert_eq!(classify(&minus_one), HullClass::B);
    let d = b_hull(&minus_one).unwrap();
    assert!(d.hull.values()[1..].iter().all(|&v| v == 0.0));

    let neg = builtin("affine", &[-1.0, 0.0], &grid);
    let d = b_hull(&neg).unwrap();
    assert!(sup_abs_diff(d.hull.values(), neg.values()) < 1e-12);
}

#[test]
fn support_line_examples() {
    let grid = make_log_grid(1e-3, 1e3, 201).unwrap();
    let zs = dense_z();
    let cases = [("const", vec![1.0], 1.0, (1.0, 1.0)), ("identity", vec![], 2.0, (1.0, 2.0)), ("min", vec![1.0], 1.0, (0.5, 0.5))];
    for (name, p, x, (slope, icpt)) in cases {
        let f = builtin(name, &p, &grid);
        let l = left_support_line(&f, x).unwrap();
        assert!((l.slope - slope).abs() < 1e-12 && (l.intercept - icpt).abs() < 1e-12, "{name}");
        // brute force: the line dominates f on a dense grid
        let b = halfline::Builtin::parse(name, &p).unwrap();
        assert!(zs.iter().all(|&z| l.at(z) >= b.eval(z) - 1e-12 * (1.0 + z)));
    }
}

/// Dense grid over the feasible set `{t ≥ 0, α·t ≤ 1, β·t ≤ x}` for n = 2.
fn grid_lp(cp: &ConeProgram, x: f64) -> f64 {
    let (a, b, c) = (cp.alpha(), cp.beta(), cp.gamma());
    let steps = 2000;
    let mut best: f64 = 0.0;
    for i in 0..=steps {
        let t0 = i as f64 / steps as f64 / a[0];
        for j in 0..=steps {
            let t1 = j as f64 / steps as f64 / a[1];
            if a[0] * t0 + a[1] * t1 <= 1.0 + 1e-15 && b[0] * t0 + b[1] * t1 <= x + 1e-15 {
                best = best.max(c[0] * t0 + c[1] * t1);
            }
        }
    }
    best
}

#[test]
fn cone_examples() {
    let cp = ConeProgram::new(vec![1.0, 1.0], vec![0.0, 1.0], vec![1.0, 2.0]).unwrap();
    assert!((cp.f_value(0.5).unwrap() - 1.5).abs() < 1e-15);
    assert!((grid_lp(&cp, 0.5) - 1.5).abs() < 1e-3);
    for x in [1.0, 2.0, 10.0] {
        assert_eq!(cp.f_value(x).unwrap(), 2.0);
        assert!((grid_lp(&cp, x) - 2.0).abs() < 1e-3);
    }
    assert_eq!(cp.g_value(1.0).unwrap(), 1.0);
    assert!((cp.g_value(3.0).unwrap() - 1.5).abs() < 1e-15);
    let f = cp.sampled_f(&probes()).unwrap();
    for x in probes() {
        assert!((f_value(&f, x).unwrap() - (2.0 * x / (x + 1.0)).max(1.0)).abs() < 1e-12);
    }

    let zero = ConeProgram::new(vec![1.0, 2.0], vec![1.0, 0.0], vec![0.0, 0.0]).unwrap();
    assert_eq!(zero.f_value(3.0).unwrap(), 0.0);
    assert_eq!(zero.g_value(3.0).unwrap(), 0.0);

    let flat = ConeProgram::new(vec![1.0], vec![0.0], vec![2.5]).unwrap();
    let single = ConeProgram::new(vec![1.0], vec![1.0], vec![1.0]).unwrap();
    for x in probes() {
        assert_eq!((flat.f_value(x).unwrap(), flat.g_value(x).unwrap()), (2.5, 2.5));
        assert!((single.f_value(x).unwrap() - x.min(1.0)).abs() < 1e-15);
        assert!((single.g_value(x).unwrap() - x / (x + 1.0)).abs() < 1e-15);
    }
}

#[test]
fn norm_oracle_examples() {
    let p = diag_problem();
    for (e, want) in [(1.0, 2.0), (3.0, 4.0), (10.0, 4.0), (100.0, 4.0)] {
        let c = f_curve_oracle(&p, e).unwrap();
        assert!(c.certified());
        assert!((c.dual - want).abs() < 1e-9 && (c.primal - want).abs() < 1e-9, "E={e}");
    }
    let g = EnergyOperator::new(SymmetricMatrix::new(Matrix::diag(&[0.0, 1.0, 5.0])).unwrap()).unwrap();
    let id = NormProblem::new(Matrix::identity(3), g).unwrap();
    for e in probes() {
        assert!((id.f_at(e).unwrap() - 1.0).abs() < 1e-12);
        assert!((f_curve_oracle(&id, e).unwrap().primal - 1.0).abs() < 1e-9);
    }
}
