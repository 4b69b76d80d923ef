//! The multiplier χ_G on bumps straddling the Cantor dust.

use hardy_lab::approx::NormParams;
use hardy_lab::geometry::make_cantor_dust_complement;
use hardy_lab::inequality::{multiplier_ratio, porosity_constant, straddling_corpus};

fn main() -> hardy_lab::Result<()> {
    let g = make_cantor_dust_complement(1.0 / 3.0, 6)?;
    let kappa = porosity_constant(g.boundary(), &[0.25, 0.125, 0.0625], 64);
    let params = NormParams::new(0.3, 2.0, 2.0)?;
    let corpus = straddling_corpus(&g, 10, 3);
    for j in [6, 7, 8] {
        let mut sup = 0.0f64;
        for f in &corpus {
            sup = sup.max(multiplier_ratio(f, &g, &params, j, kappa)?.ratio);
        }
        println!("j = {j}: sup ‖χ_G f‖/‖f‖ = {sup:.4}");
    }
    Ok(())
}
