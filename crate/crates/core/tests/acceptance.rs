//! One test per acceptance criterion. Each writes a single PASS/FAIL line
//! straight to stdout (bypassing capture) and then asserts.

use std::f64::consts::{PI, SQRT_2};
use std::io::Write;
use std::time::Instant;

use hardy_lab::approx::{local_approx_error, NormParams, ScalarField};
use hardy_lab::chains::{build_dyadic_chains, build_john_chains, telescoping_constant, verify_chain_conditions};
use hardy_lab::dyadic::{near_boundary_cubes, verify_whitney, whitney_cover, DyadicCube, Frame};
use hardy_lab::geometry::{make_cantor_dust_complement, make_koch_snowflake, BoundarySet, Primitive};
use hardy_lab::inequality::{
    aikawa_integral, boundary_probes, estimate_aikawa_dimension, extension_corpus, hardy_corpus, hardy_ratio_sweep,
    homogeneity_slope, reverse_holder_constant, reverse_holder_cubes, DimensionOptions, ExtensionContext,
    ExtensionOptions, SweepOptions, SweepPoint,
};
use hardy_lab::quadrature::TensorRule;
use hardy_lab::{Aabb, Point};

const KOCH_DIM: f64 = 1.2618595071429148;

fn report(id: u32, name: &str, pass: bool, detail: String) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "criterion {id:>2} [{name}]: {verdict} ({detail})");
    let _ = out.flush();
}

fn spread(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max) / v.iter().copied().fold(f64::INFINITY, f64::min)
}

#[test]
fn criterion_01_whitney_validity() {
    let g = make_koch_snowflake(5).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let t = Instant::now();
    let rep = pool.install(|| {
        let cover = whitney_cover(&g, 9).unwrap();
        verify_whitney(&cover, &g, 5, 10_000, 1)
    });
    let secs = t.elapsed().as_secs_f64();
    let pass = rep.violations == 0 && rep.max_overlap <= 12 && secs < 30.0;
    report(
        1,
        "Whitney validity",
        pass,
        format!("{} cubes, {} violations, max overlap {}, {secs:.1}s single-core", rep.cubes, rep.violations, rep.max_overlap),
    );
    assert!(pass);
}

#[test]
fn criterion_02_point_aikawa_closed_form() {
    let e = BoundarySet::new(vec![Primitive::Point(Point::new(0.0, 0.0))]);
    let mut worst = 0.0f64;
    for s in [0.5, 1.0, 1.5] {
        for r in [0.25f64, 1.0] {
            let exact = 2.0 * PI * r.powf(s) / s;
            let v = aikawa_integral(&e, Point::new(0.0, 0.0), r, s).unwrap().value;
            worst = worst.max((v - exact).abs() / exact);
        }
    }
    let pass = worst <= 0.01;
    report(2, "point Aikawa integral", pass, format!("worst relative error {worst:.2e}"));
    assert!(pass);
}

#[test]
fn criterion_03_dimension_recovery() {
    let grid: Vec<f64> = (1..=40).map(|i| i as f64 * 0.05).collect();
    let radii = [0.5, 0.35, 0.25];

    let koch = make_koch_snowflake(5).unwrap();
    let t = Instant::now();
    let k = estimate_aikawa_dimension(&koch, "koch-5", &boundary_probes(koch.boundary(), 12), &radii, &grid, &DimensionOptions::default())
        .unwrap();
    let tk = t.elapsed().as_secs_f64();

    let dust = make_cantor_dust_complement(1.0 / 3.0, 5).unwrap();
    let t = Instant::now();
    let d = estimate_aikawa_dimension(dust.boundary(), "dust-5", &boundary_probes(dust.boundary(), 12), &radii, &grid, &DimensionOptions::default())
        .unwrap();
    let td = t.elapsed().as_secs_f64();

    let point = BoundarySet::new(vec![Primitive::Point(Point::new(0.0, 0.0))]);
    let t = Instant::now();
    let p = estimate_aikawa_dimension(&point, "point", &[Point::new(0.0, 0.0)], &radii, &grid, &DimensionOptions::default()).unwrap();
    let tp = t.elapsed().as_secs_f64();

    let pass = (1.20..=1.32).contains(&k.dim_estimate)
        && (d.dim_estimate - KOCH_DIM).abs() <= 0.07
        && p.dim_estimate <= 0.1
        && tk.max(td).max(tp) < 120.0;
    report(
        3,
        "dimension recovery",
        pass,
        format!(
            "koch-5 {:.4} ({tk:.0}s), dust-5 {:.4} ({td:.0}s), point {:.4} ({tp:.1}s)",
            k.dim_estimate, d.dim_estimate, p.dim_estimate
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_04_local_approximation_closed_forms() {
    let unit = Aabb::new(Point::new(0.0, 0.0), Point::new(1.0, 1.0));
    let rule = TensorRule::new(3, 0);
    let e1 = local_approx_error(|p| p.x, &unit, 1, 2.0, &rule).unwrap();
    let e2 = local_approx_error(|p| p.x * p.x, &unit, 2, 2.0, &rule).unwrap();
    let err1 = (e1 - 1.0 / 12f64.sqrt()).abs();
    let err2 = (e2 - 1.0 / (6.0 * 5f64.sqrt())).abs();
    let pass = err1 <= 1e-6 && err2 <= 1e-6;
    report(4, "local approximation closed forms", pass, format!("|ΔE₁| = {err1:.1e}, |ΔE₂| = {err2:.1e} at Gauss order 3"));
    assert!(pass);
}

#[test]
fn criterion_05_chain_conditions() {
    let g = make_koch_snowflake(4).unwrap();
    let mut exact = true;
    let mut sigma = [[0.0; 2]; 2];
    for (i, j) in [7u32, 9].into_iter().enumerate() {
        let cover = whitney_cover(&g, j).unwrap();
        let decomps = [build_dyadic_chains(&g, &cover).unwrap(), build_john_chains(&cover, None).unwrap()];
        for (kind, d) in decomps.iter().enumerate() {
            let r = verify_chain_conditions(d, &g, 0.3, 2.0, Some(KOCH_DIM)).unwrap();
            exact &= r.shadow_duality && r.distinct;
            sigma[kind][i] = r.sigma;
        }
    }
    let growth: Vec<f64> = sigma.iter().map(|s| spread(s)).collect();
    let finite = sigma.iter().flatten().all(|s| s.is_finite());
    let pass = exact && finite && growth.iter().all(|&r| r <= 2.0);
    report(
        5,
        "chain conditions",
        pass,
        format!(
            "duality+distinct {exact}; σ dyadic {:.1}→{:.1} (×{:.3}), John {:.1}→{:.1} (×{:.3}) for j_max 7→9",
            sigma[0][0], sigma[0][1], growth[0], sigma[1][0], sigma[1][1], growth[1]
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_06_homogeneity() {
    let bump = ScalarField::bump(Point::new(0.0, 0.0), 1.0);
    let params = NormParams::new(0.5, 2.0, 2.0).unwrap();
    let rep = homogeneity_slope(&bump, &params, &[1.0, 0.5, 0.25, 0.125]).unwrap();
    let rel = (rep.slope - rep.expected).abs() / rep.expected.abs();
    let pass = rel <= 0.10;
    report(6, "homogeneity", pass, format!("slope {:.4} vs {:.4} (relative error {:.1}%)", rep.slope, rep.expected, 100.0 * rel));
    assert!(pass);
}

#[test]
fn criterion_07_hardy_dichotomy() {
    let t = Instant::now();
    let g = make_cantor_dust_complement(1.0 / 3.0, 7).unwrap();
    let corpus = hardy_corpus(&g, 7);
    let grid: Vec<SweepPoint> =
        [0.30, 0.32, 0.34, 0.36, 0.38, 0.40, 0.42, 0.45].iter().map(|&s| SweepPoint { s, p: 2.0, q: 2.0 }).collect();
    let rep = hardy_ratio_sweep(&g, &corpus, &grid, &[6, 7, 8, 9], &SweepOptions::default()).unwrap();
    let secs = t.elapsed().as_secs_f64();
    let low = rep.trend(0.30, 2.0).unwrap();
    let high = rep.trend(0.45, 2.0).unwrap();
    let bracket = rep.transition(2.0);
    let bracketed = bracket.is_some_and(|(a, b)| a < b && a >= 0.32 && b <= 0.42);
    let pass = low.total_growth <= 2.0 && !low.divergent && high.total_growth >= 2.0 && high.divergent && bracketed && secs < 600.0;
    report(
        7,
        "Hardy dichotomy",
        pass,
        format!(
            "s=0.30 growth ×{:.3} (exponent {:+.3}); s=0.45 growth ×{:.3} (exponent {:+.3}); bracket {bracket:?}; {secs:.0}s",
            low.total_growth, low.increment_exponent, high.total_growth, high.increment_exponent
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_08_zero_extension() {
    let g = make_koch_snowflake(4).unwrap();
    let (s, p) = (0.3, 2.0);
    let ctx = ExtensionContext::new(&g, s, p, ExtensionOptions::default()).unwrap();
    let mut worst = 0.0f64;
    for f in extension_corpus(&g, 20, 11) {
        let z = ctx.check(&f).unwrap();
        worst = worst.max(z.ext_seminorm_p / z.hardy_bound(s, p));
    }
    let pass = worst <= 1.05 && ctx.tail_bound_ok();
    report(
        8,
        "zero extension",
        pass,
        format!("worst |E₀f|^p / bound {worst:.4}; worst T/(2π d^(-sp)/sp) {:.4} over {} nodes", ctx.worst_tail_ratio, ctx.tail.len()),
    );
    assert!(pass);
}

#[test]
fn criterion_09_reverse_holder() {
    let g = make_koch_snowflake(4).unwrap();
    let frame = Frame::for_domain(&g);
    let gamma = 7.0 * SQRT_2;
    let constants: Vec<f64> = [6, 7, 8]
        .iter()
        .map(|&j| {
            let fam = near_boundary_cubes(g.boundary(), frame, gamma, j);
            reverse_holder_constant(&fam, 50, 2.0, 2.0, 9).unwrap().into_iter().fold(0.0, f64::max)
        })
        .collect();

    let unit = Frame::new(Point::new(0.0, 0.0), 1.0);
    let mut pixel_err = 0.0f64;
    for m in 1..=6u32 {
        let tower: Vec<(DyadicCube, f64)> = (0..=m).map(|j| (DyadicCube::new(j, 0, 0), 1.0)).collect();
        let (l, r) = reverse_holder_cubes(&unit, &tower, 2.0, 2.0).unwrap();
        let n = 1i64 << (m + 2);
        let h = 1.0 / n as f64;
        let (mut pl, mut pr) = (0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                let x = Point::new((i as f64 + 0.5) * h, (j as f64 + 0.5) * h);
                let k = (0..=m).filter(|&lv| unit.cube_box(&DyadicCube::new(lv, 0, 0)).contains(x)).count() as f64;
                pl += h * h * k * k;
                pr += h * h * k;
            }
        }
        pixel_err = pixel_err.max((l - pl.sqrt()).abs() / l).max((r - pr.sqrt()).abs() / r);
    }
    let pass = spread(&constants) <= 2.0 && pixel_err <= 1e-3;
    report(
        9,
        "reverse Hölder",
        pass,
        format!("C over j_max 6,7,8 = {:.4}, {:.4}, {:.4} (×{:.3}); tower vs pixels {pixel_err:.1e}", constants[0], constants[1], constants[2], spread(&constants)),
    );
    assert!(pass);
}

#[test]
fn criterion_10_telescoping() {
    let g = make_cantor_dust_complement(1.0 / 3.0, 6).unwrap();
    let constants: Vec<f64> = [6, 7, 8]
        .iter()
        .map(|&j| {
            let cover = whitney_cover(&g, j).unwrap();
            let chains = build_dyadic_chains(&g, &cover).unwrap();
            telescoping_constant(&chains, 100, 1.0, 1, 5).unwrap().constant
        })
        .collect();
    let pass = constants.iter().all(|c| c.is_finite() && *c > 0.0) && spread(&constants) <= 1.5;
    report(
        10,
        "telescoping",
        pass,
        format!("C over j_max 6,7,8 = {:.4}, {:.4}, {:.4} (×{:.3})", constants[0], constants[1], constants[2], spread(&constants)),
    );
    assert!(pass);
}
