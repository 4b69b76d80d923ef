//! Normalized best approximation errors on [0,1]² against their closed forms.

use hardy_lab::approx::local_approx_error;
use hardy_lab::quadrature::TensorRule;
use hardy_lab::{Aabb, Point};

fn main() -> hardy_lab::Result<()> {
    let unit = Aabb::new(Point::new(0.0, 0.0), Point::new(1.0, 1.0));
    let rule = TensorRule::new(6, 0);
    let e1 = local_approx_error(|p| p.x, &unit, 1, 2.0, &rule)?;
    let e2 = local_approx_error(|p| p.x * p.x, &unit, 2, 2.0, &rule)?;
    println!("E_1(x)   = {e1:.12}  1/√12    = {:.12}", 1.0 / 12f64.sqrt());
    println!("E_2(x²)  = {e2:.12}  1/(6√5)  = {:.12}", 1.0 / (6.0 * 5f64.sqrt()));
    for k in 1..=3 {
        let e = local_approx_error(|p| (3.0 * p.x).sin() * p.y, &unit, k, 2.0, &rule)?;
        println!("E_{k}(sin 3x · y) = {e:.6}");
    }
    Ok(())
}
