//! Gagliardo seminorm of f(x, y) = x on the unit square, against the closed
//! form ½·[4 ln(1+√2) − (4/3)(√2 − 1)] for s = 1/2, p = 2.

use std::time::Instant;

use hardy_lab::approx::{frac_seminorm, FracOptions};
use hardy_lab::dyadic::whitney_cover;
use hardy_lab::geometry::make_polygon_domain;
use hardy_lab::Point;

fn main() -> hardy_lab::Result<()> {
    let square = make_polygon_domain(&[
        Point::new(0.0, 0.0),
        Point::new(1.0, 0.0),
        Point::new(1.0, 1.0),
        Point::new(0.0, 1.0),
    ])?;
    let exact = 0.5 * (4.0 * (1.0 + 2f64.sqrt()).ln() - 4.0 / 3.0 * (2f64.sqrt() - 1.0));
    println!("exact = {exact:.6}");
    for j_max in [4, 5, 6, 7] {
        let cover = whitney_cover(&square, j_max)?;
        let t = Instant::now();
        let r = frac_seminorm(&|p| p.x, &square, &cover, 0.5, 2.0, FracOptions::default())?;
        println!(
            "j_max {j_max}: leaves {:5} (collar {:4})  integral {:.6}  rel.err {:+.2e}  core tail {:.2e}  [{:.2?}]",
            r.leaves,
            r.collar_leaves,
            r.integral,
            r.integral / exact - 1.0,
            r.core_tail,
            t.elapsed()
        );
    }
    Ok(())
}
