//! Scaling of the discrete TL norm under dilation of a bump.

use hardy_lab::approx::{NormParams, ScalarField};
use hardy_lab::inequality::homogeneity_slope;
use hardy_lab::Point;

fn main() -> hardy_lab::Result<()> {
    let bump = ScalarField::bump(Point::new(0.0, 0.0), 1.0);
    let radii = [1.0, 0.5, 0.25, 0.125];
    for s in [0.5, 0.3] {
        let params = NormParams::new(s, 2.0, 2.0)?;
        let rep = homogeneity_slope(&bump, &params, &radii)?;
        println!("s = {s}: slope {:.4}, expected {:.4}", rep.slope, rep.expected);
        for (r, v) in rep.radii.iter().zip(&rep.norms) {
            println!("   r = {r:<6} ‖φ(·/r)‖ = {v:.5}");
        }
    }
    Ok(())
}
