//! Sizes of the near-boundary cube families per level: about 2^{j·d} cubes
//! at level j for a boundary of dimension d.

use hardy_lab::dyadic::{near_boundary_cubes, Frame};
use hardy_lab::geometry::{make_cantor_dust_complement, make_koch_snowflake};

fn main() -> hardy_lab::Result<()> {
    let koch = make_koch_snowflake(5)?;
    let dust = make_cantor_dust_complement(1.0 / 3.0, 6)?;
    for (name, g) in [("koch-5", &koch), ("dust-6", &dust)] {
        let fam = near_boundary_cubes(g.boundary(), Frame::for_domain(g), 1.0, 8);
        let counts: Vec<usize> = (0..=8).map(|j| fam.level(j).count()).collect();
        let growth = (counts[8] as f64 / counts[5] as f64).log2() / 3.0;
        println!("{name}: {counts:?}  growth exponent {growth:.3}");
    }
    Ok(())
}
