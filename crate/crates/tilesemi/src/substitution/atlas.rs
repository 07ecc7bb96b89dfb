//! Legal patches: two-tile classes, h-neighbourhoods and border forcing.

use std::collections::{HashSet, VecDeque};
use std::sync::Arc;

use super::{SubstitutionError, SubstitutionSystem};
use crate::arith::FieldElement;
use crate::geometry::{adjacency_with, convex_touch, Convention, Patch, Point, Shape, Tile, Tileset};

const MAX_LEVEL: usize = 16;
const LEVEL_TILE_CAP: usize = 6000;
const ATLAS_CAP: usize = 200_000;

/// Tiles within `radius` touching hops of a centre tile whose offset is zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Neighborhood {
    pub patch: Patch,
    pub center: usize,
}

impl Neighborhood {
    pub fn center_tile(&self) -> &Tile {
        &self.patch.tiles()[self.center]
    }
}

#[derive(Debug)]
pub struct Atlas {
    pub radius: usize,
    /// Legal neighbourhoods grouped by the centre's prototile, sorted.
    pub by_proto: Vec<Vec<Neighborhood>>,
    /// Supertile level at which seeding stopped.
    pub levels: usize,
}

impl Atlas {
    pub fn len(&self) -> usize {
        self.by_proto.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn bfs(adj: &[Vec<usize>], sources: &[usize], limit: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; adj.len()];
    let mut queue = VecDeque::new();
    for &s in sources {
        dist[s] = Some(0);
        queue.push_back(s);
    }
    while let Some(u) = queue.pop_front() {
        let du = dist[u].unwrap();
        if du == limit {
            continue;
        }
        for &v in &adj[u] {
            if dist[v].is_none() {
                dist[v] = Some(du + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

fn ball(tiles: &[Tile], adj: &[Vec<usize>], center: usize, radius: usize) -> Neighborhood {
    let dist = bfs(adj, &[center], radius);
    let shift = -tiles[center].offset.clone();
    let picked: Vec<Tile> = tiles.iter().zip(&dist).filter(|(_, d)| d.is_some()).map(|(t, _)| t.translate(&shift)).collect();
    let patch = Patch::new(picked, Convention::Adjacent);
    let c = Tile::new(tiles[center].proto, FieldElement::zero(shift.spec()));
    let center = patch.index_of(&c).expect("centre present");
    Neighborhood { patch, center }
}

/// Closed support of `t` meets the closed region.
pub(crate) fn touches_region(ts: &Tileset, t: &Tile, region: &Shape, region_pieces: &[Vec<Point>]) -> bool {
    let b = ts.bbox(t);
    let r = region.bbox();
    let s = 1e-7 * (1.0 + r[2].abs().max(r[3].abs()).max(r[0].abs()).max(r[1].abs()));
    if b[2] + s < r[0] || r[2] + s < b[0] || b[3] + s < r[1] || r[3] + s < b[1] {
        return false;
    }
    match region {
        Shape::Interval { lo, hi } => {
            let v = ts.vertices(t);
            v[0].real_cmp(hi).is_le() && lo.real_cmp(&v[1]).is_le()
        }
        Shape::Polygon { .. } => ts.proto(t.proto).pieces().iter().any(|piece| {
            let moved: Vec<_> = piece.iter().map(|v| v + &t.offset).collect();
            region_pieces.iter().any(|rp| convex_touch(&moved, rp))
        }),
    }
}

impl SubstitutionSystem {
    /// Translation classes of meeting two-tile patches that occur in some
    /// supertile, under the system's convention.
    ///
    /// Exact closure: siblings inside φ(p) seed the set, and a meeting pair
    /// contributes every meeting pair of children across it.
    pub fn legal_pair_patches(&self, cap: usize) -> Result<Arc<Vec<Patch>>, SubstitutionError> {
        self.legal_pairs_with(self.convention, cap)
    }

    pub fn legal_pairs_with(&self, convention: Convention, cap: usize) -> Result<Arc<Vec<Patch>>, SubstitutionError> {
        if let Some(hit) = self.cache.legal_pairs.lock().unwrap().get(&convention) {
            return Ok(hit.clone());
        }
        let ts = &self.tileset;
        let mut seen: HashSet<Patch> = HashSet::new();
        let mut queue: Vec<Patch> = Vec::new();
        let add = |a: &Tile, b: &Tile, seen: &mut HashSet<Patch>, queue: &mut Vec<Patch>| -> Result<(), SubstitutionError> {
            if ts.tiles_meet(a, b, convention)? {
                let (p, _) = Patch::new(vec![a.clone(), b.clone()], convention).canonical(ts);
                if seen.insert(p.clone()) {
                    if seen.len() > cap {
                        return Err(SubstitutionError::FlcCapExceeded(cap));
                    }
                    queue.push(p);
                }
            }
            Ok(())
        };
        for p in 0..self.num_prototiles() {
            let kids: Vec<Tile> = self.children(&Tile::new(p, ts.zero())).collect();
            for i in 0..kids.len() {
                for j in i + 1..kids.len() {
                    add(&kids[i], &kids[j], &mut seen, &mut queue)?;
                }
            }
        }
        while let Some(pair) = queue.pop() {
            let a: Vec<Tile> = self.children(&pair.tiles()[0]).collect();
            let b: Vec<Tile> = self.children(&pair.tiles()[1]).collect();
            for x in &a {
                for y in &b {
                    add(x, y, &mut seen, &mut queue)?;
                }
            }
        }
        let mut out: Vec<Patch> = seen.into_iter().collect();
        out.sort();
        let out = Arc::new(out);
        self.cache.legal_pairs.lock().unwrap().insert(convention, out.clone());
        Ok(out)
    }

    /// All legal h-neighbourhoods (touching hops), centred on each prototile.
    ///
    /// Seeds come from tiles deep inside φⁿ(p); the set is then closed under
    /// "substitute and recentre on a child". Seeding stops after a level that
    /// adds nothing.
    pub fn atlas(&self, radius: usize) -> Result<Arc<Atlas>, SubstitutionError> {
        if let Some(hit) = self.cache.atlas.lock().unwrap().get(&radius) {
            return Ok(hit.clone());
        }
        let atlas = Arc::new(self.compute_atlas(radius)?);
        self.cache.atlas.lock().unwrap().insert(radius, atlas.clone());
        Ok(atlas)
    }

    fn compute_atlas(&self, radius: usize) -> Result<Atlas, SubstitutionError> {
        let ts = &self.tileset;
        let mut seen: HashSet<Neighborhood> = HashSet::new();
        let mut queue: Vec<Neighborhood> = Vec::new();
        let mut levels = 0;
        let mut grown = vec![true; self.num_prototiles()];
        for n in 1..=MAX_LEVEL {
            levels = n;
            let before = seen.len();
            for (p, more) in grown.iter_mut().enumerate() {
                if !*more {
                    continue;
                }
                let st = self.supertile(p, n);
                let tiles = st.tiles();
                if tiles.len() > LEVEL_TILE_CAP {
                    *more = false;
                    continue;
                }
                let region = self.inflated_support(p, n);
                let boundary: Vec<usize> = (0..tiles.len()).filter(|&i| ts.touches_boundary_of(&tiles[i], &region)).collect();
                let adj = adjacency_with(ts, tiles, Convention::Adjacent);
                let dist = bfs(&adj, &boundary, radius.saturating_sub(1));
                for i in 0..tiles.len() {
                    if dist[i].is_none() {
                        let nb = ball(tiles, &adj, i, radius);
                        if seen.insert(nb.clone()) {
                            queue.push(nb);
                        }
                    }
                }
            }
            while let Some(nb) = queue.pop() {
                for child in self.child_neighborhoods(&nb, radius) {
                    if seen.insert(child.clone()) {
                        queue.push(child);
                    }
                }
                if seen.len() > ATLAS_CAP {
                    return Err(SubstitutionError::FlcCapExceeded(ATLAS_CAP));
                }
            }
            if seen.len() == before && before > 0 {
                break;
            }
            if grown.iter().all(|g| !g) {
                if seen.is_empty() {
                    return Err(SubstitutionError::NoSaturation(n));
                }
                break;
            }
        }
        let mut by_proto = vec![Vec::new(); self.num_prototiles()];
        for nb in seen {
            by_proto[nb.center_tile().proto].push(nb);
        }
        for v in &mut by_proto {
            v.sort();
        }
        Ok(Atlas { radius, by_proto, levels })
    }

    /// φ(nb) as a tile list, with the indices of the centre's children in rule order.
    fn substitute_neighborhood(&self, nb: &Neighborhood) -> (Vec<Tile>, Vec<usize>) {
        let mut tiles = Vec::new();
        let mut centre_kids = Vec::new();
        for (i, t) in nb.patch.tiles().iter().enumerate() {
            for c in self.children(t) {
                if i == nb.center {
                    centre_kids.push(tiles.len());
                }
                tiles.push(c);
            }
        }
        (tiles, centre_kids)
    }

    /// Neighbourhoods of the children of the centre inside φ(nb).
    fn child_neighborhoods(&self, nb: &Neighborhood, radius: usize) -> Vec<Neighborhood> {
        let (tiles, centre_kids) = self.substitute_neighborhood(nb);
        let adj = adjacency_with(&self.tileset, &tiles, Convention::Adjacent);
        centre_kids.into_iter().map(|c| ball(&tiles, &adj, c, radius)).collect()
    }

    /// The neighbourhood, inside φ(nb), of the centre's child at `position`.
    pub fn child_neighborhood(&self, nb: &Neighborhood, position: usize, radius: usize) -> Neighborhood {
        let (tiles, centre_kids) = self.substitute_neighborhood(nb);
        let adj = adjacency_with(&self.tileset, &tiles, Convention::Adjacent);
        ball(&tiles, &adj, centre_kids[position], radius)
    }

    /// Tiles outside φᵏ(centre) that touch λᵏ·supp(p), for one corona of p.
    fn outer_ring(&self, corona: &Neighborhood, k: usize) -> Patch {
        let p = corona.center_tile().proto;
        let mut ring: Vec<Tile> =
            corona.patch.tiles().iter().enumerate().filter(|(i, _)| *i != corona.center).map(|(_, t)| t.clone()).collect();
        for j in 1..=k {
            let region = self.inflated_support(p, j);
            let pieces = region.convex_pieces();
            ring = ring
                .iter()
                .flat_map(|t| self.children(t).collect::<Vec<_>>())
                .filter(|t| touches_region(&self.tileset, t, &region, &pieces))
                .collect();
        }
        Patch::new(ring, self.convention)
    }

    /// Least k ≤ k_max at which every φᵏ(p) has a unique 1-corona.
    pub fn border_forcing_index(&self, k_max: usize) -> Result<Option<usize>, SubstitutionError> {
        if let Some(&(checked, found)) = self.cache.forcing.lock().unwrap().as_ref() {
            if found.is_some() || checked >= k_max {
                return Ok(found.filter(|&k| k <= k_max));
            }
        }
        let atlas = self.atlas(1)?;
        let mut found = None;
        for k in 0..=k_max {
            let forced = atlas.by_proto.iter().all(|coronas| {
                let mut rings = coronas.iter().map(|c| self.outer_ring(c, k));
                match rings.next() {
                    Some(first) => rings.all(|r| r == first),
                    None => true,
                }
            });
            if forced {
                found = Some(k);
                break;
            }
        }
        *self.cache.forcing.lock().unwrap() = Some((k_max, found));
        Ok(found)
    }

    /// φᵏ(p) (p at the origin) with its unique surrounding tiles.
    pub fn forced_corona(&self, p: usize, k: usize) -> Result<Patch, SubstitutionError> {
        self.tileset.check(&Tile::new(p, self.tileset.zero()))?;
        match self.border_forcing_index(k.max(super::DEFAULT_FORCING_KMAX))? {
            Some(idx) if idx <= k => {}
            _ => return Err(SubstitutionError::NotForced { level: k }),
        }
        let atlas = self.atlas(1)?;
        let corona = atlas.by_proto[p].first().ok_or(SubstitutionError::NotForced { level: k })?;
        let mut tiles = self.supertile(p, k).tiles().to_vec();
        tiles.extend(self.outer_ring(corona, k).tiles().iter().cloned());
        Ok(Patch::new(tiles, self.convention))
    }
}
