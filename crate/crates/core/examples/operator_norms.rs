//! Energy-constrained norm curves of A = diag(1, 2) with G = diag(0, 3),
//! checked against the closed forms and against each other through F and G.

use halfline::linalg::{Matrix, SymmetricMatrix};
use halfline::norms::{f_curve, f_curve_oracle, g_curve, verify_u_rel, EnergyOperator, NormProblem};

fn main() -> halfline::Result<()> {
    let g = EnergyOperator::new(SymmetricMatrix::new(Matrix::diag(&[0.0, 3.0]))?)?;
    let p = NormProblem::new(Matrix::diag(&[1.0, 2.0]), g)?;
    let es = [0.1, 1.0, 3.0, 10.0, 100.0];

    let f = f_curve(&p, &es)?;
    let gc = g_curve(&p, &es)?;
    for (k, &e) in es.iter().enumerate() {
        let oracle = f_curve_oracle(&p, e)?;
        println!(
            "E={e:<6} f_A={:.9} (closed {:.9}, primal {:.9})  g_A={:.9} (closed {:.9})",
            f.values[k],
            1.0 + 3.0 * (e / 3.0).min(1.0),
            oracle.primal,
            gc.values[k],
            (4.0 * e / (e + 3.0)).max(1.0)
        );
    }

    let grid: Vec<f64> = (0..64).map(|k| 1e-2 * 10f64.powf(5.0 * k as f64 / 63.0)).collect();
    let r = verify_u_rel(&p, &grid, 1e-5)?;
    println!("g = F[f], f = G[g]: deviations {:?}, holds: {}", r.max_deviation, r.holds());
    Ok(())
}
