//! Whitney cover of a Koch snowflake, verified on random points of each
//! dilated cube, and exported as CSV.

use std::time::Instant;

use hardy_lab::dyadic::{verify_whitney, whitney_cover};
use hardy_lab::geometry::make_koch_snowflake;

fn main() -> hardy_lab::Result<()> {
    let g = make_koch_snowflake(5)?;
    let t = Instant::now();
    let cover = whitney_cover(&g, 9)?;
    let built = t.elapsed();
    let rep = verify_whitney(&cover, &g, 5, 10_000, 1);
    println!("{} cubes, collar {} cells ({:.2e} area), built in {built:.2?}", cover.cubes.len(), cover.collar.len(), cover.collar_measure);
    println!(
        "dist/diam on Q* in [{:.3}, {:.3}], violations {}, max overlap {}, disjoint {}",
        rep.min_ratio, rep.max_ratio, rep.violations, rep.max_overlap, rep.disjoint
    );
    let path = std::env::temp_dir().join("koch5_whitney.csv");
    cover.write_csv(std::fs::File::create(&path).expect("temp file")).expect("csv");
    println!("cubes written to {}", path.display());
    Ok(())
}
