//! Budgeted linear programs on the nonnegative orthant: `g = F[f]`,
//! `f = G[g]`, and `g` by rescaling.

use halfline::cone::{verify_prop1, ConeProgram};

fn main() -> halfline::Result<()> {
    let cp = ConeProgram::new(vec![1.0, 2.0, 0.5], vec![0.0, 1.0, 3.0], vec![1.0, 3.0, 2.0])?;
    let xs: Vec<f64> = (-8..=12).map(|k| 10f64.powf(k as f64 / 4.0)).collect();
    let r = verify_prop1(&cp, &xs, 1e-6)?;
    println!("{:>10} {:>10} {:>10} {:>10} {:>10}", "x", "f", "g", "F[f]", "G[g]");
    for row in r.rows.iter().step_by(4) {
        println!(
            "{:>10.4} {:>10.6} {:>10.6} {:>10.6} {:>10.6}",
            row.x, row.f, row.g, row.f_transformed, row.g_transformed
        );
    }
    println!("max deviations {:?}, holds: {}", r.max_deviation, r.holds());
    Ok(())
}
