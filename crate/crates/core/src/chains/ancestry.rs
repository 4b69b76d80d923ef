use super::{ChainDecomposition, ChainKind};
use crate::dyadic::{DyadicCube, WhitneyCover};
use crate::error::{Error, Result};
use crate::geometry::Domain;

/// Ancestor chains from the root cube of the frame down to every small
/// Whitney cube (ℓ(Q) ≤ diam ∂G).
///
/// The frame root must contain ∂G.
pub fn build_dyadic_chains(domain: &Domain, cover: &WhitneyCover) -> Result<ChainDecomposition> {
    let frame = cover.frame;
    let bb = domain.bounding_box();
    let root = frame.root_box();
    if !root.contains_box(&bb) {
        return Err(Error::Precondition("∂G does not lie in the root cube of the frame".into()));
    }
    let diam = domain.boundary_diameter();
    let targets: Vec<DyadicCube> = cover
        .cubes
        .iter()
        .map(|c| c.cube)
        .filter(|c| frame.side_at(c.level) <= diam * (1.0 + 1e-12))
        .collect();
    if targets.is_empty() {
        return Err(Error::Resolution("no small Whitney cubes".into()));
    }
    let chains = targets
        .iter()
        .map(|q| (0..=q.level).map(|l| q.ancestor(l)).collect())
        .collect();
    Ok(ChainDecomposition::new(ChainKind::Dyadic, frame, DyadicCube::ROOT, targets, chains, None))
}
