//! Exact geometry of tiles and patches over a cyclotomic coordinate field.

mod patch;
mod shape;
mod svg;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::arith::{FieldElement, FieldSpec};

pub use patch::{adjacency_with, bfs_distances, Patch, SpatialIndex};
pub use svg::{default_digits, patch_svg, SvgOptions, DEFAULT_DIGITS, DIGITS_ENV};
pub use shape::{
    clip_left, convex_interiors_overlap, convex_overlap_measure, convex_touch, dot_sign, edges, on_segment, orient, segments_intersect,
    segments_overlap, Point, Shape,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeometryError {
    #[error("tile interiors overlap")]
    InteriorsOverlap,
    #[error("degenerate shape")]
    Degenerate,
    #[error("polygon is not simple")]
    NotSimple,
    #[error("polygon is not counter-clockwise")]
    NotCounterClockwise,
    #[error("1D coordinates must be real")]
    NotReal,
    #[error("unknown prototile id {0}")]
    UnknownPrototile(usize),
    #[error("patch is not connected")]
    Disconnected,
    #[error("empty patch")]
    Empty,
}

/// How tiles are considered to meet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// Supports intersect.
    Adjacent,
    /// Boundaries share a piece of positive (d−1)-measure.
    Codim1Face,
}

#[derive(Clone, Debug)]
pub struct Prototile {
    pub label: String,
    pub shape: Shape,
    pub puncture: Point,
    /// One label per polygon edge `v_i → v_{i+1}`; empty when unlabelled.
    pub edge_labels: Vec<String>,
    pieces: Vec<Vec<Point>>,
    bbox: [f64; 4],
}

impl Prototile {
    pub fn new(label: impl Into<String>, shape: Shape, puncture: Point, edge_labels: Vec<String>) -> Self {
        let pieces = shape.convex_pieces();
        let bbox = shape.bbox();
        Prototile { label: label.into(), shape, puncture, edge_labels, pieces, bbox }
    }

    pub fn pieces(&self) -> &[Vec<Point>] {
        &self.pieces
    }

    pub fn bbox(&self) -> [f64; 4] {
        self.bbox
    }
}

/// A translate of a prototile.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tile {
    pub proto: usize,
    pub offset: Point,
}

impl Tile {
    pub fn new(proto: usize, offset: Point) -> Self {
        Tile { proto, offset }
    }

    pub fn translate(&self, v: &Point) -> Tile {
        Tile { proto: self.proto, offset: &self.offset + v }
    }
}

const BBOX_SLACK: f64 = 1e-7;

/// The prototile list with everything needed for tile predicates.
#[derive(Clone, Debug)]
pub struct Tileset {
    field: Arc<FieldSpec>,
    dimension: usize,
    prototiles: Vec<Prototile>,
}

impl Tileset {
    pub fn new(field: Arc<FieldSpec>, prototiles: Vec<Prototile>) -> Result<Self, GeometryError> {
        let dimension = prototiles.first().map(|p| p.shape.dimension()).ok_or(GeometryError::Empty)?;
        for p in &prototiles {
            if p.shape.dimension() != dimension {
                return Err(GeometryError::Degenerate);
            }
            p.shape.validate()?;
        }
        Ok(Tileset { field, dimension, prototiles })
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.prototiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prototiles.is_empty()
    }

    pub fn prototiles(&self) -> &[Prototile] {
        &self.prototiles
    }

    pub fn proto(&self, id: usize) -> &Prototile {
        &self.prototiles[id]
    }

    pub fn label(&self, id: usize) -> &str {
        &self.prototiles[id].label
    }

    pub fn id_of(&self, label: &str) -> Option<usize> {
        self.prototiles.iter().position(|p| p.label == label)
    }

    pub fn zero(&self) -> Point {
        FieldElement::zero(&self.field)
    }

    pub fn check(&self, t: &Tile) -> Result<(), GeometryError> {
        if t.proto < self.prototiles.len() {
            Ok(())
        } else {
            Err(GeometryError::UnknownPrototile(t.proto))
        }
    }

    pub fn puncture(&self, t: &Tile) -> Point {
        &self.prototiles[t.proto].puncture + &t.offset
    }

    pub fn support(&self, t: &Tile) -> Shape {
        self.prototiles[t.proto].shape.translate(&t.offset)
    }

    pub fn vertices(&self, t: &Tile) -> Vec<Point> {
        self.prototiles[t.proto].shape.vertices().iter().map(|v| v + &t.offset).collect()
    }

    pub fn bbox(&self, t: &Tile) -> [f64; 4] {
        let (x, y) = t.offset.to_f64();
        let b = self.prototiles[t.proto].bbox;
        [b[0] + x, b[1] + y, b[2] + x, b[3] + y]
    }

    fn bbox_disjoint(&self, a: &Tile, b: &Tile) -> bool {
        let p = self.bbox(a);
        let q = self.bbox(b);
        let s = BBOX_SLACK * (1.0 + p[2].abs().max(p[3].abs()).max(q[2].abs()).max(q[3].abs()));
        p[2] + s < q[0] || q[2] + s < p[0] || p[3] + s < q[1] || q[3] + s < p[1]
    }

    fn pieces(&self, t: &Tile) -> Vec<Vec<Point>> {
        self.prototiles[t.proto]
            .pieces
            .iter()
            .map(|piece| piece.iter().map(|v| v + &t.offset).collect())
            .collect()
    }

    /// Interiors of the supports intersect.
    pub fn interiors_overlap(&self, a: &Tile, b: &Tile) -> bool {
        if self.bbox_disjoint(a, b) {
            return false;
        }
        if self.dimension == 1 {
            let (alo, ahi) = self.interval(a);
            let (blo, bhi) = self.interval(b);
            let lo = if alo.real_cmp(&blo).is_ge() { alo } else { blo };
            let hi = if ahi.real_cmp(&bhi).is_le() { ahi } else { bhi };
            return lo.real_cmp(&hi).is_lt();
        }
        if a == b {
            return true;
        }
        let pa = self.pieces(a);
        let pb = self.pieces(b);
        pa.iter().any(|x| pb.iter().any(|y| convex_interiors_overlap(x, y)))
    }

    /// Closed supports intersect.
    pub fn touch(&self, a: &Tile, b: &Tile) -> bool {
        if self.bbox_disjoint(a, b) {
            return false;
        }
        if self.dimension == 1 {
            let (alo, ahi) = self.interval(a);
            let (blo, bhi) = self.interval(b);
            return alo.real_cmp(&bhi).is_le() && blo.real_cmp(&ahi).is_le();
        }
        let pa = self.pieces(a);
        let pb = self.pieces(b);
        pa.iter().any(|x| pb.iter().any(|y| convex_touch(x, y)))
    }

    /// Boundaries share a piece of positive (d−1)-measure.
    pub fn share_face(&self, a: &Tile, b: &Tile) -> bool {
        if self.bbox_disjoint(a, b) {
            return false;
        }
        if self.dimension == 1 {
            let (alo, ahi) = self.interval(a);
            let (blo, bhi) = self.interval(b);
            return ahi == blo || bhi == alo;
        }
        let va = self.vertices(a);
        let vb = self.vertices(b);
        let shared = edges(&va).any(|(p, q)| edges(&vb).any(|(r, s)| segments_overlap(p, q, r, s)));
        shared
    }

    fn interval(&self, t: &Tile) -> (Point, Point) {
        match &self.prototiles[t.proto].shape {
            Shape::Interval { lo, hi } => (lo + &t.offset, hi + &t.offset),
            Shape::Polygon { .. } => unreachable!("interval query on a polygon"),
        }
    }

    /// Meeting test for tiles already known to have disjoint interiors.
    pub fn meets(&self, a: &Tile, b: &Tile, convention: Convention) -> bool {
        match convention {
            Convention::Adjacent => self.touch(a, b),
            Convention::Codim1Face => self.share_face(a, b),
        }
    }

    /// Meeting test that rejects overlapping interiors.
    pub fn tiles_meet(&self, a: &Tile, b: &Tile, convention: Convention) -> Result<bool, GeometryError> {
        self.check(a)?;
        self.check(b)?;
        if self.interiors_overlap(a, b) {
            return Err(GeometryError::InteriorsOverlap);
        }
        Ok(self.meets(a, b, convention))
    }

    /// Labels of the edges of `a` along which `b` shares a positive-length segment.
    pub fn shared_edge_labels(&self, a: &Tile, b: &Tile) -> Vec<String> {
        let proto = &self.prototiles[a.proto];
        if self.dimension == 1 {
            let (alo, ahi) = self.interval(a);
            let (blo, bhi) = self.interval(b);
            let mut out = Vec::new();
            if bhi == alo {
                out.push(proto.edge_labels.first().cloned().unwrap_or_else(|| "L".into()));
            }
            if blo == ahi {
                out.push(proto.edge_labels.get(1).cloned().unwrap_or_else(|| "R".into()));
            }
            return out;
        }
        let va = self.vertices(a);
        let vb = self.vertices(b);
        let mut out = Vec::new();
        for (i, (p, q)) in edges(&va).enumerate() {
            if edges(&vb).any(|(r, s)| segments_overlap(p, q, r, s)) {
                out.push(proto.edge_labels.get(i).cloned().unwrap_or_else(|| format!("e{i}")));
            }
        }
        out
    }

    /// Whether the closed support of `t` meets the boundary of `region`.
    pub fn touches_boundary_of(&self, t: &Tile, region: &Shape) -> bool {
        match region {
            Shape::Interval { lo, hi } => {
                let (a, b) = self.interval(t);
                &a == lo || &b == hi || &a == hi || &b == lo
            }
            Shape::Polygon { vertices } => {
                let vt = self.vertices(t);
                let hit = edges(vertices).any(|(p, q)| edges(&vt).any(|(r, s)| segments_intersect(p, q, r, s)));
                hit
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::field_make;

    fn fib_tileset() -> Tileset {
        let k = field_make(10);
        let g = &FieldElement::zeta(&k, 1) + &FieldElement::zeta(&k, 9);
        let one = FieldElement::one(&k);
        let half = crate::arith::Rational::new(1, 2);
        let mk = |label: &str, len: &FieldElement| {
            Prototile::new(
                label,
                Shape::Interval { lo: FieldElement::zero(&k), hi: len.clone() },
                len.scale(&half),
                vec![],
            )
        };
        Tileset::new(k.clone(), vec![mk("a", &g), mk("b", &g), mk("c", &g), mk("d", &one)]).unwrap()
    }

    #[test]
    fn fibonacci_contacts() {
        let ts = fib_tileset();
        let k = ts.field().clone();
        let g = &FieldElement::zeta(&k, 1) + &FieldElement::zeta(&k, 9);
        let c = Tile::new(2, ts.zero());
        let d = Tile::new(3, g.clone());
        assert_eq!(ts.tiles_meet(&c, &d, Convention::Adjacent), Ok(true));
        assert_eq!(ts.tiles_meet(&c, &d, Convention::Codim1Face), Ok(true));
        assert_eq!(ts.tiles_meet(&c, &c, Convention::Adjacent), Err(GeometryError::InteriorsOverlap));
        let far = Tile::new(3, &g + &FieldElement::one(&k));
        assert_eq!(ts.tiles_meet(&c, &far, Convention::Adjacent), Ok(false));
        assert_eq!(ts.shared_edge_labels(&c, &d), vec!["R".to_string()]);
        assert_eq!(ts.tiles_meet(&c, &Tile::new(9, ts.zero()), Convention::Adjacent), Err(GeometryError::UnknownPrototile(9)));
    }
}
