//! When is FG[f] = f? Arc condition versus direct computation.
//!
//! The arc test is sufficient only: a constant is fixed by FG, but no arc
//! with b > 0 joins two of its points, so it is reported as failing.

use halfline::fg::{check_fg_identity, chord_condition, h_arc_through};
use halfline::{make_log_grid, sample, FunctionSpec};

fn main() -> halfline::Result<()> {
    let grid = make_log_grid(1e-2, 1e2, 161)?.with_points(&[1.0]);
    for (name, params) in [("saturating", vec![1.0, 1.0]), ("min", vec![1.0]), ("const", vec![2.0])] {
        let f = sample(&FunctionSpec::builtin(name, &params), &grid)?;
        let chord = chord_condition(&f, 10_000);
        let id = check_fg_identity(&f, &grid, 1e-6)?;
        println!(
            "{name:<11} chord {:?} over {} pairs, FG = f: {} (max dev {:.2e})",
            chord.verdict, chord.pairs_checked, id.identity_holds, id.max_abs_deviation
        );
        if let Some(c) = chord.worst {
            println!("            worst pair {:?} -> {:?}", c.p1, c.p2);
        }
    }

    let arc = h_arc_through((1.0, 0.5), (3.0, 0.75))?;
    println!("arc through (1, 0.5), (3, 0.75): {} t/(t + {})", arc.a, arc.b);
    Ok(())
}
