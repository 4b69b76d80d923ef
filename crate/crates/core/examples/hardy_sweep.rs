//! Hardy ratio sweep on the complement of the Cantor dust: the trend flips
//! from stable to divergent as s crosses (2 − dim)/p.

use std::time::Instant;

use hardy_lab::geometry::make_cantor_dust_complement;
use hardy_lab::inequality::{hardy_corpus, hardy_ratio_sweep, SweepOptions, SweepPoint};

fn main() -> hardy_lab::Result<()> {
    let dust = make_cantor_dust_complement(1.0 / 3.0, 7)?;
    let corpus = hardy_corpus(&dust, 7);
    let grid: Vec<SweepPoint> =
        [0.30, 0.32, 0.34, 0.36, 0.38, 0.40, 0.42, 0.45].iter().map(|&s| SweepPoint { s, p: 2.0, q: 2.0 }).collect();
    let t = Instant::now();
    let report = hardy_ratio_sweep(&dust, &corpus, &grid, &[6, 7, 8, 9], &SweepOptions::default())?;
    println!("corpus of {} functions, rhs at level {}, {:.1?}", corpus.len(), report.rhs_level, t.elapsed());
    println!("   s    sup ratio (j = 6..9)              growth  exponent  verdict");
    for tr in &report.trends {
        let sups: Vec<String> = tr.sup_ratio.iter().map(|v| format!("{v:.3}")).collect();
        println!(
            "{:.2}  {}   {:.3}   {:+.3}   {}",
            tr.point.s,
            sups.join(" "),
            tr.total_growth,
            tr.increment_exponent,
            if tr.divergent { "divergent" } else { "stable" }
        );
    }
    if let Some((lo, hi)) = report.transition(2.0) {
        println!("transition bracketed in [{lo:.2}, {hi:.2}]; (2 − log4/log3)/2 = 0.369");
    }
    Ok(())
}
