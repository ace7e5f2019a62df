//! GF[f] against the class hull over a small corpus.

use halfline::verify::verify_theorem;
use halfline::{make_log_grid, sample, FunctionSpec};

fn main() -> halfline::Result<()> {
    let corpus: [(&str, &[f64]); 7] = [
        ("const", &[1.0]),
        ("min", &[1.0]),
        ("identity", &[]),
        ("affine", &[1.0, -1.0]),
        ("spike", &[1.0, 1.0]),
        ("recip", &[]),
        ("neg_recip_minus_t", &[]),
    ];
    let base = make_log_grid(1e-3, 1e3, 1025)?;
    for (name, params) in corpus {
        let spec = FunctionSpec::builtin(name, params);
        let f = sample(&spec, &base.with_points(&spec.breakpoints()?))?;
        let r = verify_theorem(&f, 1e-4, false)?;
        println!(
            "{name:<18} class {}  max|GF - hull| = {:.2e}  {}",
            r.class,
            r.max_deviation,
            if r.holds() { "ok" } else { "FAIL" }
        );
    }
    Ok(())
}
