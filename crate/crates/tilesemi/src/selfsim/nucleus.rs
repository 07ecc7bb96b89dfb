//! Contraction of restrictions and the star-patch semi-nucleus.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use super::{SelfSimError, SelfSimilarity};
use crate::arith::{FieldElement, Rational};
use crate::geometry::{edges, Patch, Point, Tile};
use crate::semigroup::Pointed;
use crate::substitution::SubstitutionSystem;

/// Largest vertex star enumerated exhaustively.
const MAX_STAR: usize = 14;

fn re(z: &Point) -> FieldElement {
    (z + &z.conj()).scale(&Rational::new(1, 2))
}

fn norm_sq(z: &Point) -> FieldElement {
    z * &z.conj()
}

fn min_real(a: FieldElement, b: FieldElement) -> FieldElement {
    if b.real_cmp(&a).is_lt() {
        b
    } else {
        a
    }
}

/// Squared distance from `p` to the segment `uv`.
fn point_segment_sq(p: &Point, u: &Point, v: &Point) -> FieldElement {
    let d = v - u;
    let t = re(&(&d.conj() * &(p - u)));
    let len = norm_sq(&d);
    if t.sign(crate::arith::Part::Real) <= 0 {
        norm_sq(&(p - u))
    } else if t.real_cmp(&len).is_ge() {
        norm_sq(&(p - v))
    } else {
        &norm_sq(&(p - u)) - &(&(&t * &t) * &len.inv().expect("nondegenerate edge"))
    }
}

/// Exact squared distance between the supports of two tiles.
pub fn tile_distance_sq(sys: &SubstitutionSystem, a: &Tile, b: &Tile) -> FieldElement {
    let ts = sys.tileset();
    if ts.touch(a, b) {
        return ts.zero();
    }
    let (va, vb) = (ts.vertices(a), ts.vertices(b));
    if ts.dimension() == 1 {
        let gap = if va[1].real_cmp(&vb[0]).is_le() { &vb[0] - &va[1] } else { &va[0] - &vb[1] };
        return &gap * &gap;
    }
    let mut best: Option<FieldElement> = None;
    for (x, ys) in [(&va, &vb), (&vb, &va)] {
        for p in x.iter() {
            for (u, v) in edges(ys) {
                let d = point_segment_sq(p, u, v);
                best = Some(match best {
                    None => d,
                    Some(b) => min_real(b, d),
                });
            }
        }
    }
    best.expect("polygons have vertices")
}

/// r² for an element: the squared distance between its marked tiles.
pub fn separation_sq(sys: &SubstitutionSystem, g: &Pointed) -> FieldElement {
    tile_distance_sq(sys, g.in_tile(), g.out_tile())
}

#[derive(Clone, Debug, Serialize)]
pub struct ContractionReport {
    /// Least k after which every restriction branch has touching marked tiles.
    pub k: usize,
    /// Distinct elements visited.
    pub visited: usize,
    /// r_i ≤ λ⁻¹ r_{i−1} on every edge of the restriction graph.
    pub monotone: bool,
    pub violations: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct SemiNucleus {
    pub members: Vec<Pointed>,
    /// Member, determining prefix and a restriction that is not a member.
    pub failures: Vec<(Pointed, Vec<usize>, Pointed)>,
}

impl SemiNucleus {
    pub fn closed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl SelfSimilarity {
    pub fn contraction_index(&self, g: &Pointed) -> Result<ContractionReport, SelfSimError> {
        let sys = self.system().clone();
        let lambda_sq = sys.lambda() * sys.lambda();
        let mut memo: HashMap<Pointed, usize> = HashMap::new();
        let mut violations = Vec::new();
        let k = self.contraction_rec(&sys, &lambda_sq, g, &mut memo, &mut violations, 0)?;
        Ok(ContractionReport { k, visited: memo.len(), monotone: violations.is_empty(), violations })
    }

    fn contraction_rec(
        &self,
        sys: &SubstitutionSystem,
        lambda_sq: &FieldElement,
        g: &Pointed,
        memo: &mut HashMap<Pointed, usize>,
        violations: &mut Vec<String>,
        depth: usize,
    ) -> Result<usize, SelfSimError> {
        if let Some(&k) = memo.get(g) {
            return Ok(k);
        }
        let r = separation_sq(sys, g);
        if r.is_zero() {
            memo.insert(g.clone(), 0);
            return Ok(0);
        }
        if depth > 64 {
            return Err(SelfSimError::ReadAheadCap(64));
        }
        let tree = self.rule_tree(g)?;
        let mut k = 0;
        for (word, leaf) in &tree.leaves {
            let Some((_, h)) = leaf else { continue };
            let rh = separation_sq(sys, h);
            if (&rh * lambda_sq).real_cmp(&r).is_gt() {
                violations.push(format!("{} after {}", crate::semigroup::format_element(sys, h), crate::paths::format_letters(sys, word)));
            }
            k = k.max(1 + self.contraction_rec(sys, lambda_sq, h, memo, violations, depth + 1)?);
        }
        memo.insert(g.clone(), k);
        Ok(k)
    }

    /// Every doubly pointed patch whose tiles share a common point and form a
    /// connected legal patch, checked for closure under one-step restriction.
    pub fn semi_nucleus(&self) -> Result<SemiNucleus, SelfSimError> {
        let sys = self.system().clone();
        let ts = sys.tileset();
        let atlas = sys.atlas(1)?;
        let mut members: BTreeSet<Pointed> = BTreeSet::new();
        for nb in atlas.by_proto.iter().flatten() {
            let tiles = nb.patch.tiles();
            let centre = nb.center_tile();
            let supp = ts.support(centre);
            let mut points: Vec<Point> = tiles.iter().flat_map(|t| ts.vertices(t)).filter(|v| supp.contains(v)).collect();
            points.sort();
            points.dedup();
            for x in points {
                let others: Vec<&Tile> =
                    tiles.iter().enumerate().filter(|&(i, t)| i != nb.center && ts.support(t).contains(&x)).map(|(_, t)| t).collect();
                if others.len() + 1 > MAX_STAR {
                    return Err(SelfSimError::ReadAheadCap(MAX_STAR));
                }
                for mask in 0u32..(1 << others.len()) {
                    let mut pick = vec![centre.clone()];
                    pick.extend((0..others.len()).filter(|i| mask >> i & 1 == 1).map(|i| others[i].clone()));
                    let patch = Patch::new(pick.clone(), sys.convention());
                    if !patch.is_connected(ts) {
                        continue;
                    }
                    let a = patch.index_of(centre).unwrap();
                    for b in 0..patch.len() {
                        members.insert(Pointed::new(patch.clone(), a, b));
                    }
                }
            }
        }
        let mut failures = Vec::new();
        for m in &members {
            for (word, leaf) in &self.rule_tree(m)?.leaves {
                if let Some((_, h)) = leaf {
                    if !members.contains(h) {
                        failures.push((m.clone(), word.clone(), h.clone()));
                    }
                }
            }
        }
        Ok(SemiNucleus { members: members.into_iter().collect(), failures })
    }
}
