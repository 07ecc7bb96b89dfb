//! The tiling semigroup: doubly pointed patches `[b, P, a]` with the
//! union-or-zero product.

mod literal;

use serde::{Deserialize, Serialize};

use crate::geometry::{adjacency_with, bfs_distances, Convention, Patch, Tile};
use crate::substitution::config::{format_coords, parse_coords};
use crate::substitution::{SubstitutionError, SubstitutionSystem};

pub use literal::{format_element, parse_element, LiteralError};

/// A nonzero element: a patch with an in-tile `a` and an out-tile `b`.
///
/// The patch is translated so that the in-tile has offset zero, which makes
/// structural equality the same as equality of translation classes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pointed {
    patch: Patch,
    a: usize,
    b: usize,
}

impl Pointed {
    pub fn new(patch: Patch, a: usize, b: usize) -> Self {
        assert!(a < patch.len() && b < patch.len(), "marked tiles must lie in the patch");
        let shift = -patch.tiles()[a].offset.clone();
        Pointed { patch: patch.translate(&shift), a, b }
    }

    /// `[p, {p}, p]`.
    pub fn idempotent(sys: &SubstitutionSystem, proto: usize) -> Self {
        Pointed::new(Patch::single(Tile::new(proto, sys.tileset().zero()), sys.convention()), 0, 0)
    }

    pub fn patch(&self) -> &Patch {
        &self.patch
    }

    pub fn in_index(&self) -> usize {
        self.a
    }

    pub fn out_index(&self) -> usize {
        self.b
    }

    pub fn in_tile(&self) -> &Tile {
        &self.patch.tiles()[self.a]
    }

    pub fn out_tile(&self) -> &Tile {
        &self.patch.tiles()[self.b]
    }

    pub fn is_idempotent(&self) -> bool {
        self.a == self.b
    }

    /// The identity on the cylinder of one prototile.
    pub fn is_single_tile(&self) -> bool {
        self.patch.len() == 1
    }

    pub fn inverse(&self) -> Pointed {
        Pointed::new(self.patch.clone(), self.b, self.a)
    }

    /// Largest number of touching hops from the in-tile to any tile.
    pub fn eccentricity(&self, sys: &SubstitutionSystem) -> usize {
        let adj = adjacency_with(sys.tileset(), self.patch.tiles(), Convention::Adjacent);
        bfs_distances(&adj, self.a).into_iter().map(|d| d.unwrap_or(usize::MAX)).max().unwrap_or(0)
    }

    /// Occurs in some tiling of the hull.
    pub fn is_legal(&self, sys: &SubstitutionSystem) -> Result<bool, SubstitutionError> {
        if !self.patch.is_connected(sys.tileset()) {
            return Ok(false);
        }
        if self.patch.len() == 1 {
            return Ok(true);
        }
        let atlas = sys.atlas(self.eccentricity(sys).max(1))?;
        Ok(atlas.by_proto[self.in_tile().proto].iter().any(|k| k.patch.contains_patch(&self.patch)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DoublyPointedPatch {
    Zero,
    Element(Pointed),
}

use DoublyPointedPatch::{Element, Zero};

impl From<Pointed> for DoublyPointedPatch {
    fn from(p: Pointed) -> Self {
        Element(p)
    }
}

impl DoublyPointedPatch {
    pub fn is_zero(&self) -> bool {
        matches!(self, Zero)
    }

    pub fn as_pointed(&self) -> Option<&Pointed> {
        match self {
            Zero => None,
            Element(p) => Some(p),
        }
    }

    pub fn inverse(&self) -> DoublyPointedPatch {
        match self {
            Zero => Zero,
            Element(p) => Element(p.inverse()),
        }
    }

    pub fn is_idempotent(&self) -> bool {
        match self {
            Zero => true,
            Element(p) => p.is_idempotent(),
        }
    }
}

/// `[d,Q,c] · [b,P,a] = [d, P ∪ Q, a]` with `c` laid over `b`, or zero when
/// the tiles disagree, the union clashes or the union is not a legal patch.
pub fn product(sys: &SubstitutionSystem, g2: &DoublyPointedPatch, g1: &DoublyPointedPatch) -> Result<DoublyPointedPatch, SubstitutionError> {
    let (Element(q), Element(p)) = (g2, g1) else { return Ok(Zero) };
    if q.in_tile().proto != p.out_tile().proto {
        return Ok(Zero);
    }
    let moved = q.patch.translate(&p.out_tile().offset);
    let Some(union) = p.patch.union(&moved, sys.tileset()) else { return Ok(Zero) };
    let a = union.index_of(p.in_tile()).expect("P ⊂ P ∪ Q");
    let d = union.index_of(&moved.tiles()[q.b]).expect("Q ⊂ P ∪ Q");
    let g = Pointed::new(union, a, d);
    if g.is_legal(sys)? {
        Ok(Element(g))
    } else {
        Ok(Zero)
    }
}

/// The natural order: `g ⪯ h` when h's pointed patch sits inside g's.
pub fn leq(g: &DoublyPointedPatch, h: &DoublyPointedPatch) -> bool {
    match (g, h) {
        (Zero, _) => true,
        (_, Zero) => false,
        (Element(g), Element(h)) => {
            g.in_tile() == h.in_tile() && g.out_tile() == h.out_tile() && g.patch.contains_patch(&h.patch)
        }
    }
}

/// Single-tile idempotents and both pointings of every legal two-tile patch.
pub fn generators(sys: &SubstitutionSystem) -> Result<Vec<Pointed>, SubstitutionError> {
    let mut out: Vec<Pointed> = (0..sys.num_prototiles()).map(|p| Pointed::idempotent(sys, p)).collect();
    for pair in sys.legal_pair_patches(crate::substitution::DEFAULT_PAIR_CAP)?.iter() {
        out.push(Pointed::new(pair.clone(), 0, 1));
        out.push(Pointed::new(pair.clone(), 1, 0));
    }
    out.sort();
    out.dedup();
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TileJson {
    pub tile: String,
    pub offset: Vec<String>,
}

/// Serialized element: full patch geometry plus the marked indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementJson {
    pub tiles: Vec<TileJson>,
    #[serde(rename = "in")]
    pub in_tile: usize,
    #[serde(rename = "out")]
    pub out_tile: usize,
}

impl ElementJson {
    pub fn from_pointed(sys: &SubstitutionSystem, g: &Pointed) -> Self {
        ElementJson {
            tiles: g.patch.tiles().iter().map(|t| TileJson { tile: sys.label(t.proto).to_string(), offset: format_coords(&t.offset) }).collect(),
            in_tile: g.a,
            out_tile: g.b,
        }
    }

    pub fn to_pointed(&self, sys: &SubstitutionSystem) -> Result<Pointed, LiteralError> {
        let mut tiles = Vec::new();
        for t in &self.tiles {
            let proto = sys.tileset().id_of(&t.tile).ok_or_else(|| LiteralError::UnknownLabel(t.tile.clone()))?;
            let offset = parse_coords(sys.tileset().field(), &t.offset).map_err(|e| LiteralError::Syntax(e.to_string()))?;
            tiles.push(Tile::new(proto, offset));
        }
        let pick = |i: usize| tiles.get(i).cloned().ok_or(LiteralError::Syntax(format!("tile index {i} out of range")));
        let (a, b) = (pick(self.in_tile)?, pick(self.out_tile)?);
        let patch = Patch::new(tiles, sys.convention());
        patch.validate(sys.tileset()).map_err(|e| LiteralError::Syntax(e.to_string()))?;
        Ok(Pointed::new(patch.clone(), patch.index_of(&a).unwrap(), patch.index_of(&b).unwrap()))
    }
}
