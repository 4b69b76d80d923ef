//! Discrete Triebel–Lizorkin norm of a bump under refinement, and the
//! effect of restricting to a domain.

use hardy_lab::approx::{default_j_min, tl_norm, NormParams, ScalarField, TlRegion};
use hardy_lab::geometry::make_koch_snowflake;
use hardy_lab::{Aabb, Point};

fn main() -> hardy_lab::Result<()> {
    let bump = ScalarField::bump(Point::new(0.5, 0.3), 0.4);
    let f = |x: Point| bump.eval(x);
    let window = Aabb::centered(Point::new(0.5, 0.3), 0.6);
    let region = TlRegion::Box(window);
    let j_min = default_j_min(&region.frame());
    for q in [2.0, 4.0, f64::INFINITY] {
        let params = NormParams::new(0.5, 2.0, q)?;
        let vals: Vec<String> = (5..=8)
            .map(|j| tl_norm(&f, &params, &region, j_min, j).map(|t| format!("{:.5}", t.value)))
            .collect::<hardy_lab::Result<_>>()?;
        println!("q = {q:>3}: {}", vals.join("  "));
    }
    let g = make_koch_snowflake(4)?;
    let params = NormParams::new(0.3, 2.0, 2.0)?;
    let full = tl_norm(&f, &params, &region, j_min, 8)?;
    let cut = tl_norm(&f, &params, &TlRegion::Domain { domain: &g, window }, j_min, 8)?;
    println!("s = 0.3: ‖f‖ = {:.5}, ‖χ_G f‖ = {:.5}", full.value, cut.value);
    Ok(())
}
