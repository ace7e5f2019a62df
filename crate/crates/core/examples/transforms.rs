//! F, G and their compositions for a few builtins.
//!
//! ```text
//! cargo run --example transforms
//! ```

use halfline::transforms::{f_value, g_value};
use halfline::{compose_fg, compose_gf, make_log_grid, sample, FunctionSpec, GValue};

fn main() -> halfline::Result<()> {
    let grid = make_log_grid(1e-3, 1e3, 241)?.with_points(&[1.0]);
    let probes = [0.1, 1.0, 10.0];

    for (name, params) in [("saturating", vec![1.0, 1.0]), ("min", vec![1.0]), ("spike", vec![1.0, 1.0])] {
        let f = sample(&FunctionSpec::builtin(name, &params), &grid)?;
        let gf = compose_gf(&f, &grid)?;
        let fg = compose_fg(&f, &grid)?;
        println!("{name}{params:?}");
        for x in probes {
            let g = match g_value(&f, x)? {
                GValue::Finite(v) => v,
                GValue::UnboundedBelow => f64::NEG_INFINITY,
            };
            println!(
                "  x={x:<5} f={:.6} F={:.6} G={:.6} GF={:.6} FG={:.6}",
                f.evaluate(x)?,
                f_value(&f, x)?,
                g,
                gf.evaluate(x)?,
                fg.evaluate(x)?
            );
        }
    }

    // f(0) < 0 sends G to -inf
    let shifted = sample(&FunctionSpec::builtin("affine", &[1.0, -1.0]), &grid)?;
    println!("z - 1: G(1) = {:?}", g_value(&shifted, 1.0)?);
    Ok(())
}
