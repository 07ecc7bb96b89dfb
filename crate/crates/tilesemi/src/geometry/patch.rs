use std::collections::{HashMap, VecDeque};

use super::{Convention, GeometryError, Point, Tile, Tileset};

/// A finite set of tiles in a canonical (translation-invariant) order.
///
/// Tiles are kept sorted by their coordinate vectors; that order is preserved
/// by translations, so translating a sorted patch keeps it sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Patch {
    tiles: Vec<Tile>,
    convention: Convention,
}

impl Patch {
    pub fn new(mut tiles: Vec<Tile>, convention: Convention) -> Self {
        tiles.sort();
        tiles.dedup();
        Patch { tiles, convention }
    }

    pub fn single(tile: Tile, convention: Convention) -> Self {
        Patch { tiles: vec![tile], convention }
    }

    pub fn tiles(&self) -> &[Tile] {
        &self.tiles
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn with_convention(mut self, convention: Convention) -> Self {
        self.convention = convention;
        self
    }

    pub fn index_of(&self, t: &Tile) -> Option<usize> {
        self.tiles.binary_search(t).ok()
    }

    pub fn contains(&self, t: &Tile) -> bool {
        self.index_of(t).is_some()
    }

    pub fn translate(&self, v: &Point) -> Patch {
        Patch { tiles: self.tiles.iter().map(|t| t.translate(v)).collect(), convention: self.convention }
    }

    /// Index of the tile with the lexicographically least puncture.
    pub fn anchor(&self, ts: &Tileset) -> usize {
        let mut best = 0;
        let mut best_p = ts.puncture(&self.tiles[0]);
        for (i, t) in self.tiles.iter().enumerate().skip(1) {
            let p = ts.puncture(t);
            if p.lex_cmp(&best_p).is_lt() {
                best = i;
                best_p = p;
            }
        }
        best
    }

    /// The translate with its anchor puncture at the origin, and the shift applied.
    pub fn canonical(&self, ts: &Tileset) -> (Patch, Point) {
        let a = self.anchor(ts);
        let shift = -ts.puncture(&self.tiles[a]);
        (self.translate(&shift), shift)
    }

    /// Meeting graph under the patch's convention.
    pub fn adjacency(&self, ts: &Tileset) -> Vec<Vec<usize>> {
        adjacency_with(ts, &self.tiles, self.convention)
    }

    pub fn is_connected(&self, ts: &Tileset) -> bool {
        if self.tiles.is_empty() {
            return false;
        }
        let adj = self.adjacency(ts);
        bfs_distances(&adj, 0).iter().all(Option::is_some)
    }

    /// Pairwise disjoint interiors, known prototiles, connected.
    pub fn validate(&self, ts: &Tileset) -> Result<(), GeometryError> {
        if self.tiles.is_empty() {
            return Err(GeometryError::Empty);
        }
        for t in &self.tiles {
            ts.check(t)?;
        }
        let index = SpatialIndex::new(ts, &self.tiles);
        for (i, t) in self.tiles.iter().enumerate() {
            for j in index.candidates(&ts.bbox(t)) {
                if j > i && ts.interiors_overlap(t, &self.tiles[j]) {
                    return Err(GeometryError::InteriorsOverlap);
                }
            }
        }
        if !self.is_connected(ts) {
            return Err(GeometryError::Disconnected);
        }
        Ok(())
    }

    /// Union in a common frame, or `None` when tiles clash or the result is
    /// disconnected.
    pub fn union(&self, other: &Patch, ts: &Tileset) -> Option<Patch> {
        let index = SpatialIndex::new(ts, &self.tiles);
        let mut tiles = self.tiles.clone();
        for t in &other.tiles {
            if self.contains(t) {
                continue;
            }
            let clash = index.candidates(&ts.bbox(t)).into_iter().any(|j| ts.interiors_overlap(t, &self.tiles[j]));
            if clash {
                return None;
            }
            tiles.push(t.clone());
        }
        let p = Patch::new(tiles, self.convention);
        if p.is_connected(ts) {
            Some(p)
        } else {
            None
        }
    }

    /// Union of supports: does `self` contain every tile of `other`?
    pub fn contains_patch(&self, other: &Patch) -> bool {
        other.tiles.iter().all(|t| self.contains(t))
    }
}

pub fn adjacency_with(ts: &Tileset, tiles: &[Tile], convention: Convention) -> Vec<Vec<usize>> {
    let index = SpatialIndex::new(ts, tiles);
    let mut adj = vec![Vec::new(); tiles.len()];
    for (i, t) in tiles.iter().enumerate() {
        for j in index.candidates(&ts.bbox(t)) {
            if j > i && ts.meets(t, &tiles[j], convention) {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    for row in &mut adj {
        row.sort_unstable();
    }
    adj
}

pub fn bfs_distances(adj: &[Vec<usize>], start: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; adj.len()];
    dist[start] = Some(0);
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].unwrap();
        for &v in &adj[u] {
            if dist[v].is_none() {
                dist[v] = Some(du + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Uniform grid over f64 bounding boxes, for candidate pruning only.
pub struct SpatialIndex {
    cell: f64,
    grid: HashMap<(i64, i64), Vec<usize>>,
}

impl SpatialIndex {
    pub fn new(ts: &Tileset, tiles: &[Tile]) -> Self {
        let mut size: f64 = 0.0;
        for p in ts.prototiles() {
            let b = p.bbox();
            size = size.max(b[2] - b[0]).max(b[3] - b[1]);
        }
        let cell = size.max(1e-6) * 1.01;
        let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, t) in tiles.iter().enumerate() {
            for key in Self::keys(cell, &ts.bbox(t)) {
                grid.entry(key).or_default().push(i);
            }
        }
        SpatialIndex { cell, grid }
    }

    fn keys(cell: f64, b: &[f64; 4]) -> Vec<(i64, i64)> {
        let pad = 1e-6 * cell;
        let x0 = ((b[0] - pad) / cell).floor() as i64;
        let x1 = ((b[2] + pad) / cell).floor() as i64;
        let y0 = ((b[1] - pad) / cell).floor() as i64;
        let y1 = ((b[3] + pad) / cell).floor() as i64;
        let mut out = Vec::with_capacity(4);
        for x in x0..=x1 {
            for y in y0..=y1 {
                out.push((x, y));
            }
        }
        out
    }

    /// Indices whose boxes may touch `b`, ascending and without repeats.
    pub fn candidates(&self, b: &[f64; 4]) -> Vec<usize> {
        let mut out = Vec::new();
        for key in Self::keys(self.cell, b) {
            if let Some(v) = self.grid.get(&key) {
                out.extend_from_slice(v);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}
