//! John and dyadic-ancestor chain decompositions with their measured
//! constants, on the Koch snowflake and the Cantor dust complement.

use std::time::Instant;

use hardy_lab::chains::{build_dyadic_chains, build_john_chains, verify_chain_conditions};
use hardy_lab::dyadic::whitney_cover;
use hardy_lab::geometry::{make_cantor_dust_complement, make_koch_snowflake};

fn main() -> hardy_lab::Result<()> {
    let koch = make_koch_snowflake(4)?;
    let dim = koch.known_aikawa_dim();
    for j_max in [7, 8] {
        let cover = whitney_cover(&koch, j_max)?;
        let t = Instant::now();
        let john = build_john_chains(&cover, None)?;
        let r = verify_chain_conditions(&john, &koch, 0.3, 2.0, dim)?;
        println!(
            "koch john   j_max {j_max}: {} chains, max len {}, tau {}, per-level {}, sigma {:.3}, overlap {:.3}, radius C {:.2}, beta {:.2} [{:.2?}]",
            r.chains,
            r.max_length,
            r.tau,
            r.per_level_max,
            r.sigma,
            r.overlap_constant.unwrap(),
            r.shadow_radius_constant,
            r.beta_proxy,
            t.elapsed()
        );
    }
    for j_max in [7, 8, 9] {
        let cover = whitney_cover(&koch, j_max)?;
        let dy = build_dyadic_chains(&koch, &cover)?;
        let r = verify_chain_conditions(&dy, &koch, 0.3, 2.0, dim)?;
        println!(
            "koch dyadic j_max {j_max}: tau {}, per-level {}, sigma {:.3}, radius C {:.2}, in C(7√2) {:?}, eps margin {:.3}",
            r.tau,
            r.per_level_max,
            r.sigma,
            r.shadow_radius_constant,
            r.near_boundary_membership,
            r.eps_margin.unwrap()
        );
    }
    let dust = make_cantor_dust_complement(1.0 / 3.0, 7)?;
    for j_max in [6, 7, 8, 9] {
        let cover = whitney_cover(&dust, j_max)?;
        let dy = build_dyadic_chains(&dust, &cover)?;
        let a = verify_chain_conditions(&dy, &dust, 0.3, 2.0, None)?.sigma;
        let b = verify_chain_conditions(&dy, &dust, 0.45, 2.0, None)?.sigma;
        println!("dust dyadic j_max {j_max}: sigma(0.3) {a:.3}, sigma(0.45) {b:.3}, ratio {:.3}", b / a);
    }
    Ok(())
}
