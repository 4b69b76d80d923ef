//! Chain decompositions of Whitney covers, their shadows, and the checks of
//! the chain conditions (1)–(3).

mod ancestry;
mod john;
mod telescope;

pub use ancestry::build_dyadic_chains;
pub use john::build_john_chains;
pub use telescope::{telescoping_constant, telescoping_gap, ProjectionCache, TelescopeConstant, TelescopeStep};

use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use serde::Serialize;

use crate::dyadic::{is_near, DyadicCube, Frame};
use crate::error::{Error, Result};
use crate::geometry::{Domain, SetOracle};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainKind {
    John,
    Dyadic,
}

/// Chains C(Q) = (Q₀, …, Q) for every target cube Q, with the inverse
/// shadow index S(R) = {Q : R ∈ C(Q)}.
#[derive(Clone, Debug)]
pub struct ChainDecomposition {
    pub kind: ChainKind,
    pub frame: Frame,
    pub root: DyadicCube,
    /// Target cubes, sorted.
    pub targets: Vec<DyadicCube>,
    /// `chains[i]` runs from the root to `targets[i]`.
    pub chains: Vec<Vec<DyadicCube>>,
    /// R ↦ indices of targets whose chain contains R.
    pub shadows: BTreeMap<DyadicCube, Vec<usize>>,
    /// Minimal |Q_j* ∩ Q_{j−1}*| / max(|Q_j*|, |Q_{j−1}*|) over consecutive pairs (John chains).
    pub overlap_constant: Option<f64>,
    index: HashMap<DyadicCube, usize>,
}

impl ChainDecomposition {
    pub(crate) fn new(
        kind: ChainKind,
        frame: Frame,
        root: DyadicCube,
        targets: Vec<DyadicCube>,
        chains: Vec<Vec<DyadicCube>>,
        overlap_constant: Option<f64>,
    ) -> Self {
        let mut shadows: BTreeMap<DyadicCube, Vec<usize>> = BTreeMap::new();
        for (i, ch) in chains.iter().enumerate() {
            for r in ch {
                shadows.entry(*r).or_default().push(i);
            }
        }
        let index = targets.iter().enumerate().map(|(i, c)| (*c, i)).collect();
        Self { kind, frame, root, targets, chains, shadows, overlap_constant, index }
    }

    pub fn chain(&self, q: &DyadicCube) -> Result<&[DyadicCube]> {
        self.index
            .get(q)
            .map(|&i| self.chains[i].as_slice())
            .ok_or_else(|| Error::Lookup(format!("cube {q:?} is not a target of the decomposition")))
    }

    pub fn shadow(&self, r: &DyadicCube) -> Vec<DyadicCube> {
        self.shadows.get(r).map_or_else(Vec::new, |v| v.iter().map(|&i| self.targets[i]).collect())
    }

    /// Pairwise distinctness of the cubes within every chain.
    pub fn chains_are_distinct(&self) -> bool {
        self.chains.iter().all(|ch| {
            let mut v = ch.clone();
            v.sort();
            v.windows(2).all(|w| w[0] != w[1])
        })
    }

    /// R ∈ C(Q) ⟺ Q ∈ S(R), checked in both directions.
    pub fn shadow_duality_holds(&self) -> bool {
        let forward = self
            .chains
            .iter()
            .enumerate()
            .all(|(i, ch)| ch.iter().all(|r| self.shadows.get(r).is_some_and(|s| s.binary_search(&i).is_ok())));
        let backward = self
            .shadows
            .iter()
            .all(|(r, s)| s.iter().all(|&i| self.chains[i].contains(r)));
        forward && backward
    }

    /// CSV with columns `chain_id,ordinal,level,index_x,index_y`.
    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["chain_id", "ordinal", "level", "index_x", "index_y"])?;
        for (id, ch) in self.chains.iter().enumerate() {
            for (k, c) in ch.iter().enumerate() {
                wr.write_record(&[
                    id.to_string(),
                    k.to_string(),
                    c.level.to_string(),
                    c.ix.to_string(),
                    c.iy.to_string(),
                ])?;
            }
        }
        wr.flush()?;
        Ok(())
    }
}

/// Measured chain constants.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainReport {
    pub kind: ChainKind,
    pub chains: usize,
    pub max_length: usize,
    /// Condition (1): ℓ(Q) ≤ 2^τ ℓ(R).
    pub tau: u32,
    /// Condition (2): max cubes of one level within a chain.
    pub per_level_max: usize,
    /// Condition (3) supremum for the given (s, p).
    pub sigma: f64,
    /// n − sp − dimension estimate, when an estimate is supplied.
    pub eps_margin: Option<f64>,
    /// Smallest C with ∪S(R) ⊂ B(y_R, C·ℓ(R)) for all R.
    pub shadow_radius_constant: f64,
    pub overlap_constant: Option<f64>,
    /// max over chains and R ∈ C(Q) of (centre path length from x_R to x_Q) / dist(x_R, ∂G).
    pub beta_proxy: f64,
    pub distinct: bool,
    pub shadow_duality: bool,
    /// Dyadic chains: every chain cube satisfies dist(x_R, ∂G) ≤ 7√2·ℓ(R).
    pub near_boundary_membership: Option<bool>,
}

/// Evaluate conditions (1)–(3) and the auxiliary constants.
pub fn verify_chain_conditions(
    decomp: &ChainDecomposition,
    domain: &Domain,
    s: f64,
    p: f64,
    dim_estimate: Option<f64>,
) -> Result<ChainReport> {
    let n = domain.dimension() as f64;
    if !(s > 0.0 && p > 1.0 && s * p < n) {
        return Err(Error::Parameter(format!("need s > 0, p > 1 and sp < n; got s = {s}, p = {p}")));
    }
    let frame = decomp.frame;
    let mut tau = 0i64;
    let mut per_level_max = 0usize;
    let mut beta = 0.0f64;
    for (i, ch) in decomp.chains.iter().enumerate() {
        let q = decomp.targets[i];
        let mut counts: HashMap<u32, usize> = HashMap::new();
        for r in ch {
            tau = tau.max(r.level as i64 - q.level as i64);
            let c = counts.entry(r.level).or_default();
            *c += 1;
            per_level_max = per_level_max.max(*c);
        }
        // suffix path lengths through the cube centres
        let mut len = 0.0;
        for w in (1..ch.len()).rev() {
            len += frame.center(&ch[w]).dist(frame.center(&ch[w - 1]));
            let d = domain.boundary_distance(frame.center(&ch[w - 1])).0;
            if d > 0.0 {
                beta = beta.max(len / d);
            }
        }
    }
    let tau = tau.max(0) as u32;

    let exponent = n - s * p;
    let mut sigma = 0.0f64;
    let mut radius = 0.0f64;
    for (r, members) in &decomp.shadows {
        let j = r.level as i64;
        let mut acc = 0.0;
        let xr = frame.center(r);
        let yr = domain.boundary().nearest(xr);
        let lr = frame.side_at(r.level);
        for &qi in members {
            let q = decomp.targets[qi];
            let k = q.level as i64;
            let m = (tau as i64 + 1 + k - j) as f64;
            acc += 2f64.powf(-((k - j) as f64) * exponent) * m.max(0.0).powf(p);
            radius = radius.max(frame.cube_box(&q).max_dist_to_point(yr) / lr);
        }
        sigma = sigma.max(acc);
    }
    let near_boundary_membership = (decomp.kind == ChainKind::Dyadic).then(|| {
        let gamma = 7.0 * n.sqrt();
        decomp.shadows.keys().all(|r| is_near(domain.boundary(), &frame, gamma, r))
    });
    Ok(ChainReport {
        kind: decomp.kind,
        chains: decomp.chains.len(),
        max_length: decomp.chains.iter().map(Vec::len).max().unwrap_or(0),
        tau,
        per_level_max,
        sigma,
        eps_margin: dim_estimate.map(|d| exponent - d),
        shadow_radius_constant: radius,
        overlap_constant: decomp.overlap_constant,
        beta_proxy: beta,
        distinct: decomp.chains_are_distinct(),
        shadow_duality: decomp.shadow_duality_holds(),
        near_boundary_membership,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::whitney_cover;
    use crate::geometry::{make_koch_snowflake, make_polygon_domain, Point};

    fn unit_square() -> Domain {
        make_polygon_domain(&[Point::new(0., 0.), Point::new(1., 0.), Point::new(1., 1.), Point::new(0., 1.)]).unwrap()
    }

    #[test]
    fn john_root_chain_is_trivial() {
        let d = unit_square();
        let cover = whitney_cover(&d, 6).unwrap();
        let john = build_john_chains(&cover, None).unwrap();
        assert_eq!(john.chain(&john.root).unwrap(), &[john.root]);
        assert!(john.chains_are_distinct());
        assert!(john.shadow_duality_holds());
        assert!(john.overlap_constant.unwrap() > 0.0);
        let centred = build_john_chains(&cover, Some(Point::new(0.5, 0.5))).unwrap();
        assert!(cover.frame.cube_box(&centred.root).contains(Point::new(0.5, 0.5)));
    }

    #[test]
    fn dyadic_chains_follow_parents() {
        let d = make_koch_snowflake(3).unwrap();
        let cover = whitney_cover(&d, 7).unwrap();
        let dy = build_dyadic_chains(&d, &cover).unwrap();
        let diam = d.boundary_diameter();
        for q in &cover.cubes {
            let small = cover.side(&q.cube) <= diam;
            assert_eq!(dy.chain(&q.cube).is_ok(), small);
        }
        for (i, ch) in dy.chains.iter().enumerate() {
            assert_eq!(ch.len(), dy.targets[i].level as usize + 1);
            for w in ch.windows(2) {
                assert_eq!(w[1].parent(), Some(w[0]));
            }
        }
        for (r, members) in &dy.shadows {
            assert!(members.iter().all(|&i| r.contains(&dy.targets[i])));
        }
        let rep = verify_chain_conditions(&dy, &d, 0.3, 2.0, None).unwrap();
        assert_eq!(rep.per_level_max, 1);
        assert_eq!(rep.tau, 0);
        assert_eq!(rep.near_boundary_membership, Some(true));
        assert!(rep.distinct && rep.shadow_duality);
    }

    #[test]
    fn sigma_grows_with_sp_on_dyadic_chains() {
        let d = make_koch_snowflake(3).unwrap();
        let cover = whitney_cover(&d, 7).unwrap();
        let dy = build_dyadic_chains(&d, &cover).unwrap();
        let mut prev = 0.0;
        for s in [0.1, 0.2, 0.3, 0.35] {
            let sigma = verify_chain_conditions(&dy, &d, s, 2.0, None).unwrap().sigma;
            assert!(sigma >= prev);
            prev = sigma;
        }
        assert!(verify_chain_conditions(&dy, &d, 1.0, 2.0, None).is_err());
    }

    #[test]
    fn disconnected_cover_is_a_resolution_error() {
        // two squares joined by a neck much thinner than the finest cube
        let v = [
            (0.0, 0.0),
            (1.0, 0.0),
            (1.0, 0.4995),
            (1.2, 0.4995),
            (1.2, 0.0),
            (2.2, 0.0),
            (2.2, 1.0),
            (1.2, 1.0),
            (1.2, 0.5005),
            (1.0, 0.5005),
            (1.0, 1.0),
            (0.0, 1.0),
        ];
        let d = make_polygon_domain(&v.map(|(x, y)| Point::new(x, y))).unwrap();
        let cover = whitney_cover(&d, 5).unwrap();
        assert!(matches!(build_john_chains(&cover, None), Err(Error::Resolution(_))));
    }

    #[test]
    fn telescoping_vanishes_on_polynomials() {
        let d = unit_square();
        let cover = whitney_cover(&d, 5).unwrap();
        let dy = build_dyadic_chains(&d, &cover).unwrap();
        let q = *dy.targets.last().unwrap();
        let (lhs, rhs) = telescoping_gap(&|p: Point| 2.0 * p.x - p.y, &dy, &q, 2).unwrap();
        assert!(lhs < 1e-12 && rhs < 1e-12, "{lhs} {rhs}");
        let (lhs, rhs) = telescoping_gap(&|p: Point| (3.0 * p.x).sin(), &dy, &q, 1).unwrap();
        assert!(lhs > 0.0 && rhs > 0.0 && lhs <= 10.0 * rhs);
        assert!(matches!(
            telescoping_gap(&|p: Point| p.x, &dy, &DyadicCube::new(30, 0, 0), 1),
            Err(Error::Lookup(_))
        ));
    }

    #[test]
    fn csv_has_one_row_per_chain_cube() {
        let d = unit_square();
        let cover = whitney_cover(&d, 4).unwrap();
        let john = build_john_chains(&cover, None).unwrap();
        let mut buf = Vec::new();
        john.write_csv(&mut buf).unwrap();
        let rows = String::from_utf8(buf).unwrap().lines().count();
        assert_eq!(rows, 1 + john.chains.iter().map(Vec::len).sum::<usize>());
    }
}
