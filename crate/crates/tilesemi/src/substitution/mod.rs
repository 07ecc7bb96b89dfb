//! Substitution systems (stone inflations), their supertiles and the
//! supertile-extension graph.

mod atlas;
pub mod config;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::Serialize;

use crate::arith::{FieldElement, Part};
use crate::geometry::{convex_overlap_measure, Convention, GeometryError, Patch, Point, Prototile, Shape, Tile, Tileset};

pub use atlas::{Atlas, Neighborhood};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SubstitutionError {
    #[error("unknown prototile {0:?}")]
    UnknownPrototile(String),
    #[error("puncture of {0} is not interior to its support")]
    PunctureNotInterior(String),
    #[error("inflation factor must be real and greater than 1")]
    BadLambda,
    #[error("rule for {0} is empty")]
    EmptyRule(String),
    #[error("stone inflation fails for {label}: {reason}")]
    StoneInflation { label: String, reason: String },
    #[error("more than {0} legal patches; finite local complexity not certified")]
    FlcCapExceeded(usize),
    #[error("level {level} is below the border forcing index")]
    NotForced { level: usize },
    #[error("neighbourhood saturation did not stabilise by level {0}")]
    NoSaturation(usize),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// One tile of φ(p), in the frame where p sits at the origin.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Child {
    pub proto: usize,
    pub offset: Point,
}

/// A child position inside a substituted parent: an edge of the graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupertileExtension {
    pub parent: usize,
    /// Index into the parent's rule.
    pub position: usize,
    pub child: usize,
    /// Offset of the child inside φ(parent) with the parent at the origin.
    pub offset: Point,
}

impl SupertileExtension {
    /// Range: the child's prototile.
    pub fn r(&self) -> usize {
        self.child
    }

    /// Source: the parent's prototile.
    pub fn s(&self) -> usize {
        self.parent
    }
}

#[derive(Clone, Debug)]
pub struct SubstitutionGraph {
    pub vertices: usize,
    pub edges: Vec<SupertileExtension>,
}

#[derive(Default, Debug)]
struct Cache {
    legal_pairs: Mutex<HashMap<Convention, Arc<Vec<Patch>>>>,
    atlas: Mutex<HashMap<usize, Arc<Atlas>>>,
    /// (largest k_max checked, index found).
    forcing: Mutex<Option<(usize, Option<usize>)>>,
}

#[derive(Debug)]
pub struct SubstitutionSystem {
    name: String,
    tileset: Tileset,
    lambda: Point,
    rules: Vec<Vec<Child>>,
    convention: Convention,
    recognisable: bool,
    edges: Vec<SupertileExtension>,
    /// Edge ids grouped by parent, in rule order.
    by_parent: Vec<Vec<usize>>,
    /// Edge ids grouped by child prototile.
    into: Vec<Vec<usize>>,
    cache: Cache,
}

impl Clone for SubstitutionSystem {
    fn clone(&self) -> Self {
        SubstitutionSystem::new(
            self.name.clone(),
            self.tileset.clone(),
            self.lambda.clone(),
            self.rules.clone(),
            self.convention,
            self.recognisable,
        )
        .expect("already validated")
    }
}

impl SubstitutionSystem {
    /// Structural validation only; see [`SubstitutionSystem::validate`] for the
    /// full battery.
    pub fn new(
        name: impl Into<String>,
        tileset: Tileset,
        lambda: Point,
        rules: Vec<Vec<Child>>,
        convention: Convention,
        recognisable: bool,
    ) -> Result<Self, SubstitutionError> {
        if lambda.sign(Part::Imaginary) != 0
            || (&lambda - &FieldElement::one(tileset.field())).sign(Part::Real) <= 0
        {
            return Err(SubstitutionError::BadLambda);
        }
        if rules.len() != tileset.len() {
            return Err(SubstitutionError::UnknownPrototile(format!("{} rules for {} prototiles", rules.len(), tileset.len())));
        }
        for (p, proto) in tileset.prototiles().iter().enumerate() {
            if !proto.shape.contains_interior(&proto.puncture) {
                return Err(SubstitutionError::PunctureNotInterior(proto.label.clone()));
            }
            if rules[p].is_empty() {
                return Err(SubstitutionError::EmptyRule(proto.label.clone()));
            }
            for c in &rules[p] {
                if c.proto >= tileset.len() {
                    return Err(SubstitutionError::UnknownPrototile(format!("#{}", c.proto)));
                }
            }
        }
        let mut edges = Vec::new();
        let mut by_parent = vec![Vec::new(); tileset.len()];
        let mut into = vec![Vec::new(); tileset.len()];
        for (p, rule) in rules.iter().enumerate() {
            for (pos, c) in rule.iter().enumerate() {
                by_parent[p].push(edges.len());
                into[c.proto].push(edges.len());
                edges.push(SupertileExtension { parent: p, position: pos, child: c.proto, offset: c.offset.clone() });
            }
        }
        Ok(SubstitutionSystem {
            name: name.into(),
            tileset,
            lambda,
            rules,
            convention,
            recognisable,
            edges,
            by_parent,
            into,
            cache: Cache::default(),
        })
    }

    /// The same system under another meeting convention.
    pub fn with_convention(&self, convention: Convention) -> Self {
        let mut s = self.clone();
        s.convention = convention;
        s
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn tileset(&self) -> &Tileset {
        &self.tileset
    }

    pub fn lambda(&self) -> &Point {
        &self.lambda
    }

    pub fn rules(&self) -> &[Vec<Child>] {
        &self.rules
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn recognisable(&self) -> bool {
        self.recognisable
    }

    pub fn num_prototiles(&self) -> usize {
        self.tileset.len()
    }

    pub fn label(&self, p: usize) -> &str {
        self.tileset.label(p)
    }

    pub fn edges(&self) -> &[SupertileExtension] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &SupertileExtension {
        &self.edges[e]
    }

    /// Edges out of φ(p), in rule order.
    pub fn edges_from_parent(&self, p: usize) -> &[usize] {
        &self.by_parent[p]
    }

    /// Edges whose child is p.
    pub fn edges_into(&self, p: usize) -> &[usize] {
        &self.into[p]
    }

    /// Edge id of `position` inside φ(parent).
    pub fn edge_at(&self, parent: usize, position: usize) -> Option<usize> {
        self.by_parent.get(parent).and_then(|v| v.get(position)).copied()
    }

    /// "(child,parent)" with "@k" (1-based position) when the child label
    /// repeats within the parent's rule.
    pub fn edge_label(&self, e: usize) -> String {
        let edge = &self.edges[e];
        let dup = self.rules[edge.parent].iter().filter(|c| c.proto == edge.child).count() > 1;
        if dup {
            format!("({}@{},{})", self.label(edge.child), edge.position + 1, self.label(edge.parent))
        } else {
            format!("({},{})", self.label(edge.child), self.label(edge.parent))
        }
    }

    pub fn build_graph(&self) -> SubstitutionGraph {
        SubstitutionGraph { vertices: self.num_prototiles(), edges: self.edges.clone() }
    }

    /// The substitution graph in DOT, one arrow parent → child per edge.
    pub fn graph_dot(&self) -> String {
        let mut s = format!("digraph \"{}\" {{\n", self.name);
        for p in 0..self.num_prototiles() {
            s.push_str(&format!("  \"{}\";\n", self.label(p)));
        }
        for (e, edge) in self.edges.iter().enumerate() {
            s.push_str(&format!("  \"{}\" -> \"{}\" [label=\"{}\"];\n", self.label(edge.parent), self.label(edge.child), self.edge_label(e)));
        }
        s.push_str("}\n");
        s
    }

    pub fn graph_json(&self) -> GraphJson {
        GraphJson {
            system: self.name.clone(),
            vertices: (0..self.num_prototiles()).map(|p| self.label(p).to_string()).collect(),
            edges: self
                .edges
                .iter()
                .enumerate()
                .map(|(e, edge)| GraphEdgeJson {
                    label: self.edge_label(e),
                    parent: self.label(edge.parent).to_string(),
                    position: edge.position,
                    child: self.label(edge.child).to_string(),
                    offset: config::format_coords(&edge.offset),
                })
                .collect(),
        }
    }

    pub fn substitute_tile(&self, t: &Tile) -> Result<Vec<Tile>, SubstitutionError> {
        self.tileset.check(t)?;
        let base = &self.lambda * &t.offset;
        Ok(self.rules[t.proto].iter().map(|c| Tile::new(c.proto, &base + &c.offset)).collect())
    }

    /// Children of a tile without the id check.
    pub(crate) fn children(&self, t: &Tile) -> impl Iterator<Item = Tile> + '_ {
        let base = &self.lambda * &t.offset;
        self.rules[t.proto].iter().map(move |c| Tile::new(c.proto, &base + &c.offset))
    }

    pub fn substitute_patch(&self, p: &Patch) -> Result<Patch, SubstitutionError> {
        let mut tiles = Vec::new();
        for t in p.tiles() {
            tiles.extend(self.substitute_tile(t)?);
        }
        Ok(Patch::new(tiles, p.convention()))
    }

    /// φⁿ(p) with p at the origin.
    pub fn supertile(&self, p: usize, n: usize) -> Patch {
        let mut tiles = vec![Tile::new(p, self.tileset.zero())];
        for _ in 0..n {
            tiles = tiles.iter().flat_map(|t| self.children(t).collect::<Vec<_>>()).collect();
        }
        Patch::new(tiles, self.convention)
    }

    /// φⁿ(p) with, for every tile, its address word e₀…e_{n−1} (finest first).
    pub fn supertile_words(&self, p: usize, n: usize) -> Vec<(Tile, Vec<usize>)> {
        let mut level = vec![(Tile::new(p, self.tileset.zero()), Vec::new())];
        for _ in 0..n {
            let mut next = Vec::new();
            for (t, word) in &level {
                let base = &self.lambda * &t.offset;
                for &e in &self.by_parent[t.proto] {
                    let edge = &self.edges[e];
                    let mut w = Vec::with_capacity(word.len() + 1);
                    w.push(e);
                    w.extend_from_slice(word);
                    next.push((Tile::new(edge.child, &base + &edge.offset), w));
                }
            }
            level = next;
        }
        level
    }

    /// λⁿ · supp(p).
    pub fn inflated_support(&self, p: usize, n: usize) -> Shape {
        self.tileset.proto(p).shape.scale(&self.lambda.pow(n as u32))
    }

    /// Substitution matrix M[p][q] = number of q tiles in φ(p).
    pub fn substitution_matrix(&self) -> Vec<Vec<u64>> {
        let n = self.num_prototiles();
        let mut m = vec![vec![0u64; n]; n];
        for (p, rule) in self.rules.iter().enumerate() {
            for c in rule {
                m[p][c.proto] += 1;
            }
        }
        m
    }

    /// Least k ≤ k_max with every entry of Mᵏ positive.
    pub fn check_primitive(&self, k_max: usize) -> (bool, Option<usize>) {
        let n = self.num_prototiles();
        let m: Vec<Vec<bool>> = self.substitution_matrix().iter().map(|r| r.iter().map(|&x| x > 0).collect()).collect();
        let mut pow = m.clone();
        for k in 1..=k_max {
            if pow.iter().all(|r| r.iter().all(|&x| x)) {
                return (true, Some(k));
            }
            let mut next = vec![vec![false; n]; n];
            for i in 0..n {
                for j in 0..n {
                    if pow[i][j] {
                        for l in 0..n {
                            next[i][l] |= m[j][l];
                        }
                    }
                }
            }
            pow = next;
        }
        (false, None)
    }

    /// Stone inflation: the children tile λ·supp(p) exactly.
    pub fn check_stone_inflation(&self) -> Vec<SubstitutionError> {
        let mut failures = Vec::new();
        let lambda_sq = &self.lambda * &self.lambda;
        for (p, proto) in self.tileset.prototiles().iter().enumerate() {
            let fail = |reason: &str| SubstitutionError::StoneInflation { label: proto.label.clone(), reason: reason.into() };
            let region = self.inflated_support(p, 1);
            let kids: Vec<Tile> = self.children(&Tile::new(p, self.tileset.zero())).collect();
            // Measures: Σ children = λ^d · parent.
            let mut total = FieldElement::zero(self.tileset.field());
            for t in &kids {
                total = &total + &self.tileset.support(t).measure_form();
            }
            let target = match self.tileset.dimension() {
                1 => &self.lambda * &proto.shape.measure_form(),
                _ => &lambda_sq * &proto.shape.measure_form(),
            };
            let part = if self.tileset.dimension() == 1 { Part::Real } else { Part::Imaginary };
            if (&total - &target).sign(part) != 0 {
                failures.push(fail("children do not have the inflated measure"));
                continue;
            }
            let region_pieces = region.convex_pieces();
            let contained = kids.iter().all(|t| match &region {
                Shape::Polygon { .. } => {
                    // Exact: area of child ∩ region equals area of child.
                    let mut inside = FieldElement::zero(self.tileset.field());
                    for piece in self.tileset.proto(t.proto).pieces() {
                        let moved: Vec<Point> = piece.iter().map(|v| v + &t.offset).collect();
                        for rp in &region_pieces {
                            inside = &inside + &convex_overlap_measure(&moved, rp);
                        }
                    }
                    (&inside - &self.tileset.support(t).measure_form()).sign(Part::Imaginary) == 0
                }
                Shape::Interval { .. } => self.tileset.vertices(t).iter().all(|v| region.contains(v)),
            });
            if !contained {
                failures.push(fail("a child leaves the inflated support"));
                continue;
            }
            let disjoint = (0..kids.len())
                .all(|i| (i + 1..kids.len()).all(|j| !self.tileset.interiors_overlap(&kids[i], &kids[j])));
            if !disjoint {
                failures.push(fail("children overlap"));
            }
        }
        failures
    }

    /// Vacuous for finite patches but kept as a cheap structural guard: no
    /// φⁿ(p), n ≤ 4, coincides with a nontrivial translate of itself.
    pub fn recognisability_sanity(&self) -> bool {
        for p in 0..self.num_prototiles() {
            for n in 1..=4 {
                let st = self.supertile(p, n);
                let first = &st.tiles()[0];
                for t in st.tiles().iter().skip(1).filter(|t| t.proto == first.proto) {
                    let v = &t.offset - &first.offset;
                    if st.translate(&v) == st {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Full validation battery.
    pub fn validate(&self) -> ValidationReport {
        let stone: Vec<String> = self.check_stone_inflation().iter().map(|e| e.to_string()).collect();
        let (primitive, primitivity_index) = self.check_primitive(DEFAULT_PRIMITIVE_KMAX);
        let legal = self.legal_pair_patches(DEFAULT_PAIR_CAP);
        let legal_pairs = legal.as_ref().ok().map(|v| v.len());
        let mut errors = stone.clone();
        if !primitive {
            errors.push("not primitive".into());
        }
        if let Err(e) = &legal {
            errors.push(e.to_string());
        }
        let border_forcing_index = if stone.is_empty() && legal.is_ok() {
            match self.border_forcing_index(DEFAULT_FORCING_KMAX) {
                Ok(k) => k,
                Err(e) => {
                    errors.push(e.to_string());
                    None
                }
            }
        } else {
            None
        };
        if border_forcing_index.is_none() {
            errors.push("border forcing not certified up to level 8".into());
        }
        let recognisability_sanity = self.recognisability_sanity();
        if !recognisability_sanity {
            errors.push("a supertile equals a translate of itself".into());
        }
        ValidationReport {
            name: self.name.clone(),
            prototiles: self.num_prototiles(),
            edges: self.edges.len(),
            convention: self.convention,
            stone_inflation: stone.is_empty(),
            primitive,
            primitivity_index,
            legal_pairs,
            border_forcing_index,
            recognisable_declared: self.recognisable,
            recognisability_sanity,
            passed: errors.is_empty(),
            errors,
        }
    }
}

pub const DEFAULT_PAIR_CAP: usize = 100_000;
pub const DEFAULT_FORCING_KMAX: usize = 8;
pub const DEFAULT_PRIMITIVE_KMAX: usize = 12;

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct GraphEdgeJson {
    pub label: String,
    pub parent: String,
    pub position: usize,
    pub child: String,
    pub offset: Vec<String>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct GraphJson {
    pub system: String,
    pub vertices: Vec<String>,
    pub edges: Vec<GraphEdgeJson>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct ValidationReport {
    pub name: String,
    pub prototiles: usize,
    pub edges: usize,
    pub convention: Convention,
    pub stone_inflation: bool,
    pub primitive: bool,
    pub primitivity_index: Option<usize>,
    pub legal_pairs: Option<usize>,
    pub border_forcing_index: Option<usize>,
    pub recognisable_declared: bool,
    pub recognisability_sanity: bool,
    pub passed: bool,
    pub errors: Vec<String>,
}

/// Build a prototile list entry; convenience for hand-built systems.
pub fn prototile(label: &str, shape: Shape, puncture: Point, edge_labels: &[&str]) -> Prototile {
    Prototile::new(label, shape, puncture, edge_labels.iter().map(|s| s.to_string()).collect())
}
