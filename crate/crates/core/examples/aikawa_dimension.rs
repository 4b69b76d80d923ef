//! Aikawa dimension of a point, the Koch snowflake boundary and Cantor dust.

use std::time::Instant;

use hardy_lab::geometry::{make_cantor_dust_complement, make_koch_snowflake, BoundarySet, Primitive};
use hardy_lab::inequality::{aikawa_integral, boundary_probes, estimate_aikawa_dimension, DimensionOptions};
use hardy_lab::Point;

fn main() -> hardy_lab::Result<()> {
    let origin = BoundarySet::new(vec![Primitive::Point(Point::new(0.0, 0.0))]);
    for s in [0.5, 1.0, 1.5] {
        let v = aikawa_integral(&origin, Point::new(0.0, 0.0), 1.0, s)?.value;
        println!("point  s={s:.1}  I={v:.6}  2πr^s/s={:.6}", 2.0 * std::f64::consts::PI / s);
    }

    let grid: Vec<f64> = (1..=40).map(|i| i as f64 * 0.05).collect();
    let radii = [0.5, 0.35, 0.25];

    let koch = make_koch_snowflake(5)?;
    let t = Instant::now();
    let rep = estimate_aikawa_dimension(&koch, "koch-5", &boundary_probes(koch.boundary(), 12), &radii, &grid, &DimensionOptions::default())?;
    println!("koch-5  estimate {:.4}  (log4/log3 = 1.2619)  {:.1?}", rep.dim_estimate, t.elapsed());

    let dust = make_cantor_dust_complement(1.0 / 3.0, 5)?;
    let opts = DimensionOptions { box_scales: (2..=5).map(|k| 3f64.powi(-k)).collect(), ..Default::default() };
    let t = Instant::now();
    let rep = estimate_aikawa_dimension(dust.boundary(), "dust-5", &boundary_probes(dust.boundary(), 12), &radii, &grid, &opts)?;
    println!("dust-5  estimate {:.4}  box-counting {:.4}  {:.1?}", rep.dim_estimate, rep.box_counting.unwrap_or(f64::NAN), t.elapsed());
    for (s, g) in rep.s_grid.iter().zip(&rep.growth).step_by(4) {
        println!("   s={s:.2} growth {g:+.3}");
    }
    Ok(())
}
