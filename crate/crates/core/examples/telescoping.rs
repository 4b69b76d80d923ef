//! Telescoping of local projections along dyadic ancestor chains on the
//! complement of Cantor dust.

use std::time::Instant;

use hardy_lab::chains::{build_dyadic_chains, telescoping_constant};
use hardy_lab::dyadic::whitney_cover;
use hardy_lab::geometry::make_cantor_dust_complement;

fn main() -> hardy_lab::Result<()> {
    let g = make_cantor_dust_complement(1.0 / 3.0, 6)?;
    for j in [6, 7, 8] {
        let t = Instant::now();
        let cover = whitney_cover(&g, j)?;
        let chains = build_dyadic_chains(&g, &cover)?;
        let rep = telescoping_constant(&chains, 100, 1.0, 1, 5)?;
        let zero = rep.pairs.iter().filter(|p| p.4 == 0.0).count();
        println!("j = {j}: {} targets, C = {:.4}, {zero} pairs with rhs = 0, {:.1?}", chains.targets.len(), rep.constant, t.elapsed());
    }
    Ok(())
}
