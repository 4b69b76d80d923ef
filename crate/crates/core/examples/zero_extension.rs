//! Zero extension of bumps on a Koch snowflake: the exterior tail against
//! 2π dist^{−sp}/(sp) and the full seminorm against its Hardy-type bound.

use std::time::Instant;

use hardy_lab::geometry::make_koch_snowflake;
use hardy_lab::inequality::{extension_corpus, ExtensionContext, ExtensionOptions};

fn main() -> hardy_lab::Result<()> {
    let g = make_koch_snowflake(4)?;
    let (s, p) = (0.3, 2.0);
    let t0 = Instant::now();
    let ctx = ExtensionContext::new(&g, s, p, ExtensionOptions::default())?;
    println!("{} nodes, worst T/bound {:.4}, {:.1}s", ctx.tail.len(), ctx.worst_tail_ratio, t0.elapsed().as_secs_f64());
    println!("{:>3} {:>11} {:>11} {:>11} {:>11} {:>7}", "id", "|E0f|^p", "interior", "hardy", "bound", "ratio");
    for (i, f) in extension_corpus(&g, 20, 11).iter().enumerate() {
        let z = ctx.check(f)?;
        let bound = z.hardy_bound(s, p);
        println!(
            "{i:>3} {:>11.5} {:>11.5} {:>11.5} {:>11.5} {:>7.4}",
            z.ext_seminorm_p, z.interior_seminorm_p, z.hardy_term_p, bound, z.ext_seminorm_p / bound
        );
    }
    println!("total {:.1}s", t0.elapsed().as_secs_f64());
    Ok(())
}
