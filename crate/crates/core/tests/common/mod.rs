#![allow(dead_code)]

use halfline::cone::ConeProgram;
use halfline::linalg::{eigendecompose_symmetric, Matrix, SymmetricMatrix};
use halfline::norms::{EnergyOperator, NormProblem};
use halfline::{make_log_grid, sample, FunctionSpec, HalfLineGrid, SampledFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Knots `(0, v0), ...` with random abscissae in `(0, 20)` and values in
/// `[lo, hi]`; flat beyond the last knot.
pub fn random_knots(rng: &mut ChaCha8Rng, count: usize, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let mut zs: Vec<f64> = (0..count - 1).map(|_| rng.gen_range(0.01..20.0)).collect();
    zs.sort_by(f64::total_cmp);
    zs.dedup();
    std::iter::once(0.0)
        .chain(zs)
        .map(|z| (z, rng.gen_range(lo..hi)))
        .collect()
}

pub fn piecewise(knots: Vec<(f64, f64)>, grid: &HalfLineGrid) -> SampledFunction {
    let zs: Vec<f64> = knots.iter().map(|k| k.0).collect();
    let spec = FunctionSpec::piecewise(knots).with_tail_slope(0.0);
    sample(&spec, &grid.with_points(&zs)).unwrap()
}

pub fn builtin(name: &str, params: &[f64], grid: &HalfLineGrid) -> SampledFunction {
    let spec = FunctionSpec::builtin(name, params);
    sample(&spec, &grid.with_points(&spec.breakpoints().unwrap())).unwrap()
}

/// The twelve-function test corpus on a log grid over `[1e-3, 1e3]` with
/// `n` points (plus breakpoints and knots).
pub fn corpus(n: usize) -> Vec<(String, SampledFunction)> {
    let grid = make_log_grid(1e-3, 1e3, n).unwrap();
    let named: [(&str, &[f64]); 10] = [
        ("const", &[1.0]),
        ("const", &[-1.0]),
        ("neg_recip_minus_t", &[]),
        ("min", &[1.0]),
        ("identity", &[]),
        ("affine", &[1.0, -1.0]),
        ("spike", &[1.0, 1.0]),
        ("recip", &[]),
        ("saturating", &[1.0, 1.0]),
        ("clipped_parabola", &[1.0, 2.0]),
    ];
    let mut out: Vec<(String, SampledFunction)> = named
        .iter()
        .map(|(name, p)| (format!("{name}{p:?}"), builtin(name, p, &grid)))
        .collect();
    for seed in [11u64, 12] {
        let mut r = rng(seed);
        let knots = random_knots(&mut r, 12, -1.0, 3.0);
        out.push((format!("random_pl[{seed}]"), piecewise(knots, &grid)));
    }
    out
}

/// Random program with `n ≤ 4`, one budget-free coordinate in about a
/// third of the draws.
pub fn random_cone(rng: &mut ChaCha8Rng) -> ConeProgram {
    let n = rng.gen_range(1..=4);
    let alpha: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..2.0)).collect();
    let beta: Vec<f64> = (0..n)
        .map(|_| if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.1..3.0) })
        .collect();
    let gamma: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..2.0)).collect();
    ConeProgram::new(alpha, beta, gamma).unwrap()
}

/// Random symmetric `A` and random PSD `G = BᵀB - λ_min·I`.
pub fn random_norm_problem(rng: &mut ChaCha8Rng, n: usize) -> NormProblem {
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let v: f64 = rng.gen_range(-1.0..1.0);
            a[i][j] = v;
            a[j][i] = v;
        }
    }
    let b: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let g0 = Matrix::from_rows(&b).unwrap().gram();
    let lmin = eigendecompose_symmetric(&g0).min();
    let g = g0.add_scaled(&SymmetricMatrix::new(Matrix::identity(n)).unwrap(), -lmin);
    NormProblem::new(Matrix::from_rows(&a).unwrap(), EnergyOperator::new(g).unwrap()).unwrap()
}

pub fn diag_problem() -> NormProblem {
    let g = EnergyOperator::new(SymmetricMatrix::new(Matrix::diag(&[0.0, 3.0])).unwrap()).unwrap();
    NormProblem::new(Matrix::diag(&[1.0, 2.0]), g).unwrap()
}

/// `count` log-spaced points over `[lo, hi]`.
pub fn log_points(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.log10(), hi.log10());
    (0..count)
        .map(|k| 10f64.powf(a + (b - a) * k as f64 / (count - 1) as f64))
        .collect()
}

pub fn sup_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
