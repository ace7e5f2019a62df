//! Smallest concave majorant and the class hulls, built from the knots.

use halfline::{class_hull, concave_majorant, make_log_grid, sample, FunctionSpec, HalfLineGrid};

fn main() -> halfline::Result<()> {
    let knots = vec![(0.0, 0.0), (0.5, 2.0), (1.0, 0.5), (4.0, 3.0), (10.0, 3.0)];
    let zs: Vec<f64> = knots.iter().map(|k| k.0).collect();
    let grid = HalfLineGrid::new(zs)?;
    let f = sample(&FunctionSpec::piecewise(knots).with_tail_slope(0.0), &grid)?;

    let maj = concave_majorant(&f)?;
    let dec = class_hull(&f)?;
    println!("class {}  first={}  second={}", dec.class, dec.first, dec.second);
    println!("{:>6} {:>8} {:>8} {:>8}", "z", "f", "maj", "hull");
    for (k, (z, v)) in f.knots().enumerate() {
        println!("{z:>6} {v:>8.4} {:>8.4} {:>8.4}", maj.values()[k], dec.hull.values()[k]);
    }

    let phi_grid = make_log_grid(1e-2, 1e2, 9)?;
    let phi = sample(&FunctionSpec::builtin("neg_recip_minus_t", &[]), &phi_grid)?;
    let b = class_hull(&phi)?;
    println!("-1/(t+1) - t: class {} first={} second={}", b.class, b.first, b.second);
    Ok(())
}
