//! Reverse Hölder constant of near-boundary cube families on a Koch snowflake.

use std::time::Instant;

use hardy_lab::dyadic::{near_boundary_cubes, Frame};
use hardy_lab::geometry::make_koch_snowflake;
use hardy_lab::inequality::reverse_holder_constant;

fn main() -> hardy_lab::Result<()> {
    let g = make_koch_snowflake(4)?;
    let frame = Frame::for_domain(&g);
    let gamma = 7.0 * 2f64.sqrt();
    for j in [6, 7, 8] {
        let t = Instant::now();
        let family = near_boundary_cubes(g.boundary(), frame, gamma, j);
        let ratios = reverse_holder_constant(&family, 50, 2.0, 2.0, 9)?;
        let c = ratios.iter().copied().fold(0.0, f64::max);
        let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        println!("j = {j}: {} cubes, C = {c:.4} (min {lo:.4}), {:.1?}", family.len(), t.elapsed());
    }
    Ok(())
}
