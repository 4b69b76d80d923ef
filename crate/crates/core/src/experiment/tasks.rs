use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use super::{ExperimentConfig, ExperimentError, ExperimentResult, Task, TaskOutput};
use crate::approx::{NormParams, ScalarField};
use crate::chains::{build_dyadic_chains, build_john_chains, verify_chain_conditions, ChainKind};
use crate::dyadic::{verify_whitney, whitney_cover};
use crate::geometry::{Domain, Point};
use crate::inequality::{
    boundary_probes, extension_corpus, hardy_corpus, hardy_ratio_sweep, homogeneity_slope_with, multiplier_ratio,
    porosity_constant_seeded, required_kappa, straddling_corpus, estimate_aikawa_dimension, DimensionOptions,
    ExtensionContext, ExtensionOptions, HomogeneityOptions, SweepOptions, SweepPoint,
};

/// Relative slack allowed on the zero-extension bound.
const EXTENSION_SLACK: f64 = 0.05;

pub(crate) fn run(task: Task, cfg: &ExperimentConfig, csv: &Path) -> ExperimentResult<TaskOutput> {
    let domain = cfg.domain.build()?;
    match task {
        Task::Whitney => whitney(cfg, &domain, csv),
        Task::Dimension => dimension(cfg, &domain, csv),
        Task::Porosity => porosity(cfg, &domain, csv),
        Task::Chains => chains(cfg, &domain, csv),
        Task::HardySweep => hardy_sweep(cfg, &domain, csv),
        Task::Extension => extension(cfg, &domain, csv),
        Task::Multiplier => multiplier(cfg, &domain, csv),
        Task::Homogeneity => homogeneity(cfg, csv),
    }
}

fn q_json(q: f64) -> Value {
    if q.is_finite() {
        json!(q)
    } else {
        json!("inf")
    }
}

fn or<T: Clone>(v: &[T], default: &[T]) -> Vec<T> {
    if v.is_empty() {
        default.to_vec()
    } else {
        v.to_vec()
    }
}

fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> ExperimentResult<()> {
    let io = |e: csv::Error| ExperimentError::Config(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    for r in rows {
        w.serialize(r).map_err(io)?;
    }
    w.flush().map_err(|e| ExperimentError::Config(format!("{}: {e}", path.display())))
}

/// (s, p, q) grid in row-major order; q defaults to p.
fn grid(cfg: &ExperimentConfig, default_s: &[f64]) -> ExperimentResult<Vec<SweepPoint>> {
    let s_list = or(&cfg.s, default_s);
    if cfg.p.is_empty() {
        return Err(ExperimentError::Config("p grid is empty".into()));
    }
    let mut out = Vec::new();
    for &s in &s_list {
        for &p in &cfg.p {
            if !(s > 0.0 && p >= 1.0 && s * p < 2.0) {
                return Err(ExperimentError::Config(format!("(s, p) = ({s}, {p}) violates 0 < s < n/p")));
            }
            if cfg.q.is_empty() {
                out.push(SweepPoint { s, p, q: p });
            } else {
                out.extend(cfg.q.iter().map(|&q| SweepPoint { s, p, q }));
            }
        }
    }
    Ok(out)
}

fn whitney(cfg: &ExperimentConfig, domain: &Domain, csv: &Path) -> ExperimentResult<TaskOutput> {
    let levels = or(&cfg.j_max, &[6]);
    let mut reports = Vec::new();
    let mut violation = None;
    let mut finest = None;
    for &j in &levels {
        let cover = whitney_cover(domain, j)?;
        let rep = verify_whitney(&cover, domain, 5, 10_000, cfg.seed);
        if !rep.passes() && violation.is_none() {
            violation = Some(format!("Whitney cover at j_max = {j}: {} cubes violate the distance bound", rep.violations));
        }
        reports.push(json!({ "j_max": j, "report": rep }));
        if finest.as_ref().is_none_or(|c: &crate::dyadic::WhitneyCover| c.j_max < j) {
            finest = Some(cover);
        }
    }
    let cover = finest.expect("nonempty level list");
    let file = std::fs::File::create(csv).map_err(|e| ExperimentError::Config(format!("{}: {e}", csv.display())))?;
    cover.write_csv(file).map_err(|e| ExperimentError::Config(e.to_string()))?;
    Ok(TaskOutput { results: json!({ "exported_j_max": cover.j_max, "covers": reports }), violation })
}

fn dimension(cfg: &ExperimentConfig, domain: &Domain, csv: &Path) -> ExperimentResult<TaskOutput> {
    let s_grid = or(&cfg.s, &(1..=40).map(|i| i as f64 * 0.05).collect::<Vec<_>>());
    let radii = or(&cfg.radii, &[0.5, 0.35, 0.25]);
    let probes = boundary_probes(domain.boundary(), cfg.probes.unwrap_or(12));
    let opts = DimensionOptions { box_scales: cfg.scales.clone(), ..Default::default() };
    let rep = estimate_aikawa_dimension(domain.boundary(), &domain.name, &probes, &radii, &s_grid, &opts)?;
    rep.write_csv(csv)?;
    Ok(TaskOutput {
        results: json!({
            "set_id": rep.set_id,
            "dim_estimate": rep.dim_estimate,
            "box_counting": rep.box_counting,
            "known_dimension": domain.known_aikawa_dim(),
            "ratio_threshold": rep.ratio_threshold,
            "note": "admissibility uses an operational ratio threshold in place of an existential constant",
            "probes": probes.len(),
            "radii": radii,
        }),
        violation: None,
    })
}

#[derive(Serialize)]
struct PorosityRow {
    scale: f64,
    kappa_needed: f64,
}

fn porosity(cfg: &ExperimentConfig, domain: &Domain, csv: &Path) -> ExperimentResult<TaskOutput> {
    let scales = or(&cfg.scales, &[0.25, 0.125, 0.0625, 0.03125]);
    let samples = cfg.samples.unwrap_or(64);
    let set = domain.boundary();
    let rows: Vec<PorosityRow> =
        scales.iter().map(|&r| PorosityRow { scale: r, kappa_needed: required_kappa(set, &[r], samples, cfg.seed) }).collect();
    write_rows(csv, &rows)?;
    let kappa = porosity_constant_seeded(set, &scales, samples, cfg.seed);
    Ok(TaskOutput { results: json!({ "porosity_constant": kappa, "porous": kappa.is_some(), "samples": samples }), violation: None })
}

#[derive(Serialize)]
struct ChainRow {
    kind: ChainKind,
    j_max: u32,
    s: f64,
    p: f64,
    chains: usize,
    max_length: usize,
    tau: u32,
    per_level_max: usize,
    sigma: f64,
    shadow_radius_constant: f64,
    beta_proxy: f64,
    distinct: bool,
    shadow_duality: bool,
}

fn chains(cfg: &ExperimentConfig, domain: &Domain, csv: &Path) -> ExperimentResult<TaskOutput> {
    let pts = grid(cfg, &[0.3])?;
    let mut rows = Vec::new();
    let mut violation = None;
    for &j in &or(&cfg.j_max, &[7]) {
        let cover = whitney_cover(domain, j)?;
        let mut decomps = vec![build_dyadic_chains(domain, &cover)?];
        if domain.is_bounded() {
            decomps.push(build_john_chains(&cover, None)?);
        }
        for d in &decomps {
            for g in &pts {
                let r = verify_chain_conditions(d, domain, g.s, g.p, domain.known_aikawa_dim())?;
                if !(r.distinct && r.shadow_duality) && violation.is_none() {
                    violation = Some(format!("{:?} chains at j_max = {j}: distinctness or shadow duality fails", r.kind));
                }
                rows.push(ChainRow {
                    kind: r.kind,
                    j_max: j,
                    s: g.s,
                    p: g.p,
                    chains: r.chains,
                    max_length: r.max_length,
                    tau: r.tau,
                    per_level_max: r.per_level_max,
                    sigma: r.sigma,
                    shadow_radius_constant: r.shadow_radius_constant,
                    beta_proxy: r.beta_proxy,
                    distinct: r.distinct,
                    shadow_duality: r.shadow_duality,
                });
            }
        }
    }
    write_rows(csv, &rows)?;
    let max_sigma = rows.iter().map(|r| r.sigma).fold(0.0, f64::max);
    Ok(TaskOutput { results: json!({ "rows": rows.len(), "max_sigma": max_sigma }), violation })
}

fn hardy_sweep(cfg: &ExperimentConfig, domain: &Domain, csv: &Path) -> ExperimentResult<TaskOutput> {
    let pts = grid(cfg, &[0.3, 0.45])?;
    let corpus = hardy_corpus(domain, cfg.seed);
    let rep = hardy_ratio_sweep(domain, &corpus, &pts, &or(&cfg.j_max, &[6, 7, 8, 9]), &SweepOptions::default())?;
    rep.write_csv(csv)?;
    let mut ps: Vec<f64> = pts.iter().map(|g| g.p).collect();
    ps.dedup();
    let transitions: Vec<Value> = ps
        .iter()
        .map(|&p| match rep.transition(p) {
            Some((a, b)) => json!({ "p": p, "stable_max": a, "divergent_min": b }),
            None => json!({ "p": p, "stable_max": null, "divergent_min": null }),
        })
        .collect();
    Ok(TaskOutput {
        results: json!({
            "corpus_size": corpus.len(),
            "j_max": rep.j_max,
            "rhs_level": rep.rhs_level,
            "trends": rep.trends,
            "transitions": transitions,
        }),
        violation: None,
    })
}

#[derive(Serialize)]
struct ExtensionRow {
    s: f64,
    p: f64,
    corpus_id: usize,
    ext_seminorm_p: f64,
    interior_seminorm_p: f64,
    hardy_term_p: f64,
    bound: f64,
    ratio: f64,
}

fn extension(cfg: &ExperimentConfig, domain: &Domain, csv: &Path) -> ExperimentResult<TaskOutput> {
    let pts = grid(cfg, &[0.3])?;
    let j_max = or(&cfg.j_max, &[6])[0];
    let corpus = extension_corpus(domain, cfg.corpus_size.unwrap_or(20), cfg.seed);
    let mut rows = Vec::new();
    let mut per_point = Vec::new();
    let mut violation = None;
    for g in &pts {
        if g.s >= 1.0 {
            return Err(ExperimentError::Config(format!("zero extension needs s < 1, got {}", g.s)));
        }
        let ctx = ExtensionContext::new(domain, g.s, g.p, ExtensionOptions { j_max, ..Default::default() })?;
        let mut worst = 0.0f64;
        for (id, f) in corpus.iter().enumerate() {
            let z = ctx.check(f)?;
            let bound = z.hardy_bound(g.s, g.p);
            let ratio = if bound > 0.0 { z.ext_seminorm_p / bound } else { 0.0 };
            worst = worst.max(ratio);
            rows.push(ExtensionRow {
                s: g.s,
                p: g.p,
                corpus_id: id,
                ext_seminorm_p: z.ext_seminorm_p,
                interior_seminorm_p: z.interior_seminorm_p,
                hardy_term_p: z.hardy_term_p,
                bound,
                ratio,
            });
        }
        if violation.is_none() {
            if !ctx.tail_bound_ok() {
                violation = Some(format!("tail bound fails at s = {}, p = {} (ratio {:.4})", g.s, g.p, ctx.worst_tail_ratio));
            } else if worst > 1.0 + EXTENSION_SLACK {
                violation = Some(format!("extension bound exceeded at s = {}, p = {} (ratio {worst:.4})", g.s, g.p));
            }
        }
        per_point.push(json!({ "s": g.s, "p": g.p, "worst_ratio": worst, "worst_tail_ratio": ctx.worst_tail_ratio, "nodes": ctx.tail.len() }));
    }
    write_rows(csv, &rows)?;
    Ok(TaskOutput { results: json!({ "j_max": j_max, "slack": EXTENSION_SLACK, "points": per_point }), violation })
}

#[derive(Serialize)]
struct MultiplierRow {
    s: f64,
    p: f64,
    q: f64,
    j_max: u32,
    corpus_id: usize,
    ratio: f64,
    tl_f: f64,
    tl_chi_f: f64,
    lp_norm: f64,
    hardy_term: f64,
}

fn multiplier(cfg: &ExperimentConfig, domain: &Domain, csv: &Path) -> ExperimentResult<TaskOutput> {
    let pts = grid(cfg, &[0.3])?;
    let levels = or(&cfg.j_max, &[6, 7, 8]);
    let corpus = straddling_corpus(domain, cfg.corpus_size.unwrap_or(10), cfg.seed);
    let mut rows = Vec::new();
    let mut per_point = Vec::new();
    let porosity = cfg.porosity.or_else(|| {
        porosity_constant_seeded(domain.boundary(), &or(&cfg.scales, &[0.25, 0.125, 0.0625, 0.03125]), cfg.samples.unwrap_or(64), cfg.seed)
    });
    let mut warning = None;
    for g in &pts {
        let params = NormParams::new(g.s, g.p, g.q)?;
        let mut sup = Vec::new();
        for &j in &levels {
            let mut m = 0.0f64;
            for (id, f) in corpus.iter().enumerate() {
                let r = multiplier_ratio(f, domain, &params, j, porosity)?;
                warning = warning.or(r.warning.clone());
                m = m.max(r.ratio);
                rows.push(MultiplierRow {
                    s: g.s,
                    p: g.p,
                    q: g.q,
                    j_max: j,
                    corpus_id: id,
                    ratio: r.ratio,
                    tl_f: r.tl_f,
                    tl_chi_f: r.tl_chi_f,
                    lp_norm: r.lp_norm,
                    hardy_term: r.hardy_term,
                });
            }
            sup.push(m);
        }
        let spread = sup.iter().copied().fold(0.0, f64::max) / sup.iter().copied().fold(f64::INFINITY, f64::min);
        per_point.push(json!({ "s": g.s, "p": g.p, "q": q_json(g.q), "sup_ratio": sup, "spread": spread }));
    }
    write_rows(csv, &rows)?;
    Ok(TaskOutput { results: json!({ "j_max": levels, "porosity_constant": porosity, "points": per_point, "warning": warning }), violation: None })
}

#[derive(Serialize)]
struct HomogeneityRow {
    s: f64,
    p: f64,
    q: f64,
    r: f64,
    norm: f64,
}

fn homogeneity(cfg: &ExperimentConfig, csv: &Path) -> ExperimentResult<TaskOutput> {
    let pts = grid(cfg, &[0.5])?;
    let radii = or(&cfg.radii, &[1.0, 0.5, 0.25, 0.125]);
    let opts = HomogeneityOptions { j_max: or(&cfg.j_max, &[9])[0], ..Default::default() };
    let bump = ScalarField::bump(Point::new(0.0, 0.0), 1.0);
    let mut rows = Vec::new();
    let mut per_point = Vec::new();
    for g in &pts {
        let rep = homogeneity_slope_with(&bump, &NormParams::new(g.s, g.p, g.q)?, &radii, &opts)?;
        rows.extend(rep.radii.iter().zip(&rep.norms).map(|(&r, &norm)| HomogeneityRow { s: g.s, p: g.p, q: g.q, r, norm }));
        per_point.push(json!({
            "s": g.s,
            "p": g.p,
            "q": q_json(g.q),
            "slope": rep.slope,
            "seminorm_slope": rep.seminorm_slope,
            "expected": rep.expected,
            "relative_error": (rep.slope - rep.expected).abs() / rep.expected.abs(),
        }));
    }
    write_rows(csv, &rows)?;
    Ok(TaskOutput { results: json!({ "j_max": opts.j_max, "points": per_point }), violation: None })
}
