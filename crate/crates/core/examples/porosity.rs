//! Porosity constants: the smallest κ on a fixed grid such that every sampled
//! cube Q(x, r) contains a hole of side r/κ.

use hardy_lab::geometry::{make_cantor_dust_complement, make_koch_snowflake, BoundarySet, Primitive};
use hardy_lab::inequality::{porosity_constant, required_kappa};
use hardy_lab::Point;

fn main() -> hardy_lab::Result<()> {
    let scales = [0.25, 0.125, 0.0625, 0.03125];
    let koch = make_koch_snowflake(5)?;
    let dust = make_cantor_dust_complement(1.0 / 3.0, 6)?;
    let line = BoundarySet::new(vec![Primitive::Segment(Point::new(0.0, 0.0), Point::new(1.0, 0.0))]);
    println!("koch-5  κ = {:?}  (needed {:.2})", porosity_constant(koch.boundary(), &scales, 64), required_kappa(koch.boundary(), &scales, 64, 1));
    println!("dust-6  κ = {:?}  (needed {:.2})", porosity_constant(dust.boundary(), &scales, 64), required_kappa(dust.boundary(), &scales, 64, 1));
    println!("segment κ = {:?}", porosity_constant(&line, &scales, 64));
    let n = 200;
    let net: Vec<Primitive> = (0..n * n).map(|i| Primitive::Point(Point::new((i % n) as f64 / n as f64, (i / n) as f64 / n as f64))).collect();
    println!("dense net κ = {:?} (not porous at these scales)", porosity_constant(&BoundarySet::new(net), &scales, 16));
    Ok(())
}
