//! The Anderson–Putnam complex: prototile supports glued along every legal
//! meeting, and the cellular map induced by substitution.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::Serialize;

use super::LimitError;
use crate::geometry::{dot_sign, edges, on_segment, Convention, Point, Shape, Tile};
use crate::substitution::config::format_coords;
use crate::substitution::{SubstitutionSystem, DEFAULT_PAIR_CAP};

const MAX_SUBDIVISION_ROUNDS: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexCell {
    pub proto: usize,
    pub point: Point,
    pub name: String,
}

/// A boundary segment of one prototile, oriented counter-clockwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeCell {
    pub proto: usize,
    /// Index of the polygon side it subdivides.
    pub side: usize,
    pub from: Point,
    pub to: Point,
    pub name: String,
}

/// Where a point of the disjoint union of supports lands in the complex.
/// Edge points are expressed in the frame of their class representative.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Location {
    Face { proto: usize, point: Point },
    Edge { class: usize, point: Point },
    Vertex { class: usize },
}

#[derive(Clone, Debug)]
pub struct ApComplex {
    pub dimension: usize,
    pub faces: Vec<usize>,
    pub vertices: Vec<VertexCell>,
    pub edges: Vec<EdgeCell>,
    pub vertex_class: Vec<usize>,
    pub edge_class: Vec<usize>,
    /// Translation taking each edge cell onto its class representative.
    pub edge_shift: Vec<Point>,
    /// Gluings that disagree with earlier ones.
    pub conflicts: Vec<String>,
}

struct UnionFind {
    parent: Vec<usize>,
    shift: Vec<Point>,
}

impl UnionFind {
    fn new(n: usize, zero: &Point) -> Self {
        UnionFind { parent: (0..n).collect(), shift: vec![zero.clone(); n] }
    }

    /// Root and the translation from `i`'s frame to the root's.
    fn find(&mut self, i: usize) -> (usize, Point) {
        if self.parent[i] == i {
            return (i, self.shift[i].clone());
        }
        let p = self.parent[i];
        let (root, d) = self.find(p);
        let total = &self.shift[i] + &d;
        self.parent[i] = root;
        self.shift[i] = total.clone();
        (root, total)
    }

    /// Glue `i` to `j` where x in `i`'s frame is x + d in `j`'s. False on a
    /// disagreement with an existing gluing.
    fn union(&mut self, i: usize, j: usize, d: &Point) -> bool {
        let (ri, di) = self.find(i);
        let (rj, dj) = self.find(j);
        if ri == rj {
            return di == d + &dj;
        }
        self.parent[ri] = rj;
        self.shift[ri] = &(d + &dj) - &di;
        true
    }
}

fn class_ids(uf: &mut UnionFind, n: usize) -> Vec<usize> {
    let mut ids: HashMap<usize, usize> = HashMap::new();
    (0..n)
        .map(|i| {
            let root = uf.find(i).0;
            let next = ids.len();
            *ids.entry(root).or_insert(next)
        })
        .collect()
}

fn sides(shape: &Shape) -> Vec<(Point, Point)> {
    match shape {
        Shape::Interval { .. } => Vec::new(),
        Shape::Polygon { vertices } => edges(vertices).map(|(u, v)| (u.clone(), v.clone())).collect(),
    }
}

/// Break every side at each boundary point of a touching tile, repeated until
/// breakpoints agree across all meetings.
fn subdivide(sys: &SubstitutionSystem, contacts: &[(Tile, Tile)]) -> Vec<Vec<Vec<Point>>> {
    let ts = sys.tileset();
    let side_list: Vec<Vec<(Point, Point)>> = ts.prototiles().iter().map(|p| sides(&p.shape)).collect();
    let mut bps: Vec<Vec<Vec<Point>>> = side_list.iter().map(|ss| ss.iter().map(|(u, v)| vec![u.clone(), v.clone()]).collect()).collect();
    for _ in 0..MAX_SUBDIVISION_ROUNDS {
        let mut changed = false;
        for (p, q) in contacts {
            let incoming: Vec<Point> = bps[p.proto].iter().flatten().map(|z| z + &p.offset).collect();
            for (j, (u, v)) in side_list[q.proto].iter().enumerate() {
                let (u, v) = (u + &q.offset, v + &q.offset);
                for w in &incoming {
                    if on_segment(&u, &v, w) {
                        let local = w - &q.offset;
                        if !bps[q.proto][j].contains(&local) {
                            bps[q.proto][j].push(local);
                            changed = true;
                        }
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    for (p, ss) in bps.iter_mut().enumerate() {
        for (j, pts) in ss.iter_mut().enumerate() {
            let (u, v) = &side_list[p][j];
            let d = v - u;
            pts.sort_by(|a, b| dot_sign(&d, a, b).cmp(&0));
        }
    }
    bps
}

pub fn build_ap_complex(sys: &SubstitutionSystem) -> Result<ApComplex, LimitError> {
    let ts = sys.tileset();
    let zero = ts.zero();
    let pairs = sys.legal_pairs_with(Convention::Adjacent, DEFAULT_PAIR_CAP)?;
    let contacts: Vec<(Tile, Tile)> =
        pairs.iter().flat_map(|pair| [(pair.tiles()[0].clone(), pair.tiles()[1].clone()), (pair.tiles()[1].clone(), pair.tiles()[0].clone())]).collect();

    let mut vertices = Vec::new();
    let mut edge_cells = Vec::new();
    if ts.dimension() == 1 {
        for (p, proto) in ts.prototiles().iter().enumerate() {
            let vs = proto.shape.vertices();
            vertices.push(VertexCell { proto: p, point: vs[0].clone(), name: format!("{}L", proto.label) });
            vertices.push(VertexCell { proto: p, point: vs[1].clone(), name: format!("{}R", proto.label) });
        }
    } else {
        let bps = subdivide(sys, &contacts);
        for (p, proto) in ts.prototiles().iter().enumerate() {
            let mut k = 0;
            for (side, pts) in bps[p].iter().enumerate() {
                let base = proto.edge_labels.get(side).cloned().unwrap_or_else(|| format!("e{side}"));
                for (i, w) in pts.windows(2).enumerate() {
                    vertices.push(VertexCell { proto: p, point: w[0].clone(), name: format!("{}.v{k}", proto.label) });
                    k += 1;
                    let name = if pts.len() == 2 { format!("{}.{base}", proto.label) } else { format!("{}.{base}{i}", proto.label) };
                    edge_cells.push(EdgeCell { proto: p, side, from: w[0].clone(), to: w[1].clone(), name });
                }
            }
        }
    }

    let vertex_index: HashMap<(usize, &Point), usize> = vertices.iter().enumerate().map(|(i, v)| ((v.proto, &v.point), i)).collect();
    let edge_index: HashMap<(usize, &Point, &Point), usize> =
        edge_cells.iter().enumerate().map(|(i, e)| ((e.proto, &e.from, &e.to), i)).collect();
    let mut vuf = UnionFind::new(vertices.len(), &zero);
    let mut euf = UnionFind::new(edge_cells.len(), &zero);
    let mut conflicts = Vec::new();
    for (p, q) in &contacts {
        let q_shape = ts.support(q);
        let d = &p.offset - &q.offset;
        for (i, v) in vertices.iter().enumerate().filter(|(_, v)| v.proto == p.proto) {
            if !q_shape.on_boundary(&(&v.point + &p.offset)) {
                continue;
            }
            let local = &v.point + &d;
            match vertex_index.get(&(q.proto, &local)) {
                Some(&j) => {
                    vuf.union(i, j, &zero);
                }
                None => conflicts.push(format!("{} meets {} away from its cells", v.name, sys.label(q.proto))),
            }
        }
        for (i, e) in edge_cells.iter().enumerate().filter(|(_, e)| e.proto == p.proto) {
            let (from, to) = (&e.from + &d, &e.to + &d);
            if let Some(&j) = edge_index.get(&(q.proto, &to, &from)) {
                if !euf.union(i, j, &d) {
                    conflicts.push(format!("{} and {} glued by two different translations", e.name, edge_cells[j].name));
                }
            }
        }
    }
    let vertex_class = class_ids(&mut vuf, vertices.len());
    let edge_class = class_ids(&mut euf, edge_cells.len());
    let edge_shift = (0..edge_cells.len()).map(|i| euf.find(i).1).collect();
    conflicts.sort();
    conflicts.dedup();
    Ok(ApComplex {
        dimension: ts.dimension(),
        faces: (0..ts.len()).collect(),
        vertices,
        edges: edge_cells,
        vertex_class,
        edge_class,
        edge_shift,
        conflicts,
    })
}

impl ApComplex {
    pub fn num_vertex_classes(&self) -> usize {
        self.vertex_class.iter().max().map_or(0, |m| m + 1)
    }

    pub fn num_edge_classes(&self) -> usize {
        self.edge_class.iter().max().map_or(0, |m| m + 1)
    }

    /// Number of cells in each dimension; in 1D the faces are the edges.
    pub fn cell_counts(&self) -> Vec<usize> {
        match self.dimension {
            1 => vec![self.num_vertex_classes(), self.faces.len()],
            _ => vec![self.num_vertex_classes(), self.num_edge_classes(), self.faces.len()],
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.cell_counts().iter().enumerate().map(|(i, &c)| if i % 2 == 0 { c as i64 } else { -(c as i64) }).sum()
    }

    /// Names of the vertex cells in each class.
    pub fn vertex_classes(&self) -> Vec<Vec<String>> {
        let mut out = vec![Vec::new(); self.num_vertex_classes()];
        for (v, &c) in self.vertices.iter().zip(&self.vertex_class) {
            out[c].push(v.name.clone());
        }
        out
    }

    pub fn edge_classes(&self) -> Vec<Vec<String>> {
        let mut out = vec![Vec::new(); self.num_edge_classes()];
        for (e, &c) in self.edges.iter().zip(&self.edge_class) {
            out[c].push(e.name.clone());
        }
        out
    }

    pub fn is_consistent(&self) -> bool {
        self.conflicts.is_empty()
    }

    fn vertex_at(&self, proto: usize, x: &Point) -> Option<usize> {
        self.vertices.iter().position(|v| v.proto == proto && &v.point == x)
    }

    /// The cell holding point `x` of prototile `proto`, or `None` outside its support.
    pub fn locate(&self, sys: &SubstitutionSystem, proto: usize, x: &Point) -> Option<Location> {
        let shape = &sys.tileset().proto(proto).shape;
        if !shape.contains(x) {
            return None;
        }
        if shape.contains_interior(x) {
            return Some(Location::Face { proto, point: x.clone() });
        }
        if let Some(i) = self.vertex_at(proto, x) {
            return Some(Location::Vertex { class: self.vertex_class[i] });
        }
        self.edges
            .iter()
            .enumerate()
            .find(|(_, e)| e.proto == proto && on_segment(&e.from, &e.to, x))
            .map(|(i, _)| Location::Edge { class: self.edge_class[i], point: x + &self.edge_shift[i] })
    }

    /// Vertex class and edge label for every 1-cell class.
    fn skeleton(&self, sys: &SubstitutionSystem) -> Vec<(usize, usize, String)> {
        let class_of = |proto: usize, x: &Point| self.vertex_at(proto, x).map(|i| self.vertex_class[i]).unwrap_or(0);
        if self.dimension == 1 {
            self.faces
                .iter()
                .map(|&p| {
                    let vs = sys.tileset().proto(p).shape.vertices();
                    (class_of(p, &vs[0]), class_of(p, &vs[1]), sys.label(p).to_string())
                })
                .collect()
        } else {
            self.edge_classes()
                .iter()
                .enumerate()
                .map(|(c, names)| {
                    let e = &self.edges[self.edge_class.iter().position(|&k| k == c).expect("class has a member")];
                    (class_of(e.proto, &e.from), class_of(e.proto, &e.to), names.join(" "))
                })
                .collect()
        }
    }

    /// The 1-skeleton: vertex classes joined by edge classes (by faces in 1D).
    pub fn to_dot(&self, sys: &SubstitutionSystem) -> String {
        let mut s = String::from("graph ap {\n");
        for (c, names) in self.vertex_classes().iter().enumerate() {
            let _ = writeln!(s, "  v{c} [label=\"{}\"];", names.join(" "));
        }
        for (a, b, label) in self.skeleton(sys) {
            let _ = writeln!(s, "  v{a} -- v{b} [label=\"{label}\"];");
        }
        s.push_str("}\n");
        s
    }

    /// Schematic drawing of the 1-skeleton with vertex classes on a circle.
    pub fn skeleton_svg(&self, sys: &SubstitutionSystem) -> String {
        let n = self.num_vertex_classes().max(1);
        let pos: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let t = std::f64::consts::TAU * i as f64 / n as f64;
                (100.0 * t.cos(), -100.0 * t.sin())
            })
            .collect();
        let mut s = String::from("<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-160 -160 320 320\">\n");
        s.push_str("<g fill=\"none\" stroke=\"#333\" stroke-width=\"1.5\">\n");
        let mut seen: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut labels = Vec::new();
        for (a, b, label) in self.skeleton(sys) {
            let k = seen.entry((a.min(b), a.max(b))).or_insert(0);
            let bend = 25.0 * (*k as f64 + 1.0) * if k.is_multiple_of(2) { 1.0 } else { -1.0 };
            *k += 1;
            let ((x0, y0), (x1, y1)) = (pos[a], pos[b]);
            let (cx, cy) = if a == b {
                let r = (x0.hypot(y0)).max(1.0);
                (x0 * (1.0 + bend.abs() / r * 2.0), y0 * (1.0 + bend.abs() / r * 2.0))
            } else {
                let (mx, my) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
                let (dx, dy) = (x1 - x0, y1 - y0);
                let len = dx.hypot(dy).max(1e-9);
                (mx - dy / len * bend * 2.0, my + dx / len * bend * 2.0)
            };
            if a == b {
                let _ = writeln!(s, "<path d=\"M {x0:.3} {y0:.3} C {:.3} {:.3} {:.3} {:.3} {x1:.3} {y1:.3}\"/>", cx - 20.0, cy, cx + 20.0, cy);
            } else {
                let _ = writeln!(s, "<path d=\"M {x0:.3} {y0:.3} Q {cx:.3} {cy:.3} {x1:.3} {y1:.3}\"/>");
            }
            labels.push((0.25 * x0 + 0.5 * cx + 0.25 * x1, 0.25 * y0 + 0.5 * cy + 0.25 * y1, label));
        }
        s.push_str("</g>\n<g font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">\n");
        for (x, y, label) in labels {
            let _ = writeln!(s, "<text x=\"{x:.3}\" y=\"{y:.3}\">{label}</text>");
        }
        for (c, names) in self.vertex_classes().iter().enumerate() {
            let (x, y) = pos[c];
            let _ = writeln!(s, "<circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"4\"/><text x=\"{x:.3}\" y=\"{:.3}\">{}</text>", y - 8.0, names.join(" "));
        }
        s.push_str("</g>\n</svg>\n");
        s
    }

    pub fn to_json(&self, sys: &SubstitutionSystem) -> ApComplexJson {
        ApComplexJson {
            system: sys.name().to_string(),
            dimension: self.dimension,
            faces: self.faces.iter().map(|&p| sys.label(p).to_string()).collect(),
            vertices: self
                .vertices
                .iter()
                .zip(&self.vertex_class)
                .map(|(v, &c)| VertexJson { name: v.name.clone(), tile: sys.label(v.proto).to_string(), point: format_coords(&v.point), class: c })
                .collect(),
            edges: self
                .edges
                .iter()
                .zip(&self.edge_class)
                .map(|(e, &c)| EdgeJson {
                    name: e.name.clone(),
                    tile: sys.label(e.proto).to_string(),
                    from: format_coords(&e.from),
                    to: format_coords(&e.to),
                    class: c,
                })
                .collect(),
            vertex_classes: self.vertex_classes(),
            edge_classes: self.edge_classes(),
            cell_counts: self.cell_counts(),
            euler_characteristic: self.euler_characteristic(),
            conflicts: self.conflicts.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VertexJson {
    pub name: String,
    pub tile: String,
    pub point: Vec<String>,
    pub class: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct EdgeJson {
    pub name: String,
    pub tile: String,
    pub from: Vec<String>,
    pub to: Vec<String>,
    pub class: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ApComplexJson {
    pub system: String,
    pub dimension: usize,
    pub faces: Vec<String>,
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<EdgeJson>,
    pub vertex_classes: Vec<Vec<String>>,
    pub edge_classes: Vec<Vec<String>>,
    pub cell_counts: Vec<usize>,
    pub euler_characteristic: i64,
    pub conflicts: Vec<String>,
}

/// The image of one face: the children of φ(p), each placed by x ↦ λx − offset.
#[derive(Clone, Debug)]
pub struct FaceImage {
    pub proto: usize,
    pub children: Vec<(usize, Point)>,
}

#[derive(Clone, Debug)]
pub struct ApMap {
    pub faces: Vec<FaceImage>,
    /// Image of each vertex cell.
    pub vertices: Vec<Location>,
    /// Image of each edge cell: the located midpoints of its pieces in order.
    pub edges: Vec<Vec<Location>>,
    pub problems: Vec<String>,
}

impl ApMap {
    pub fn is_well_defined(&self) -> bool {
        self.problems.is_empty()
    }

    /// Face image as the sequence of child labels.
    pub fn face_chain(&self, sys: &SubstitutionSystem, proto: usize) -> Vec<String> {
        self.faces[proto].children.iter().map(|(c, _)| sys.label(*c).to_string()).collect()
    }
}

/// σ(x) for x in supp(proto): λx located in a child of φ(proto). Every child
/// holding the point must agree.
pub fn image_location(sys: &SubstitutionSystem, cx: &ApComplex, proto: usize, x: &Point) -> Result<Location, String> {
    let y = sys.lambda() * x;
    let mut found: Option<Location> = None;
    for child in &sys.rules()[proto] {
        let local = &y - &child.offset;
        if let Some(loc) = cx.locate(sys, child.proto, &local) {
            match &found {
                None => found = Some(loc),
                Some(f) if f != &loc => return Err(format!("image of a point of {} lands in two cells", sys.label(proto))),
                Some(_) => {}
            }
        }
    }
    found.ok_or_else(|| format!("image of a point of {} leaves φ({})", sys.label(proto), sys.label(proto)))
}

fn edge_image(sys: &SubstitutionSystem, cx: &ApComplex, e: &EdgeCell) -> Result<Vec<Location>, String> {
    let (a, b) = (sys.lambda() * &e.from, sys.lambda() * &e.to);
    let mut cuts = vec![a.clone(), b.clone()];
    for child in &sys.rules()[e.proto] {
        for v in cx.vertices.iter().filter(|v| v.proto == child.proto) {
            let w = &v.point + &child.offset;
            if on_segment(&a, &b, &w) && !cuts.contains(&w) {
                cuts.push(w);
            }
        }
    }
    let d = &b - &a;
    cuts.sort_by(|x, y| dot_sign(&d, x, y).cmp(&0));
    let half = crate::arith::Rational::new(1, 2);
    let inv = sys.lambda().inv().expect("λ ≠ 0");
    cuts.windows(2).map(|w| image_location(sys, cx, e.proto, &(&(&w[0] + &w[1]).scale(&half) * &inv))).collect()
}

/// The cellular self-map induced by φ, checked to respect identifications.
pub fn ap_substitution_map(sys: &SubstitutionSystem, cx: &ApComplex) -> ApMap {
    let ts = sys.tileset();
    let mut problems = Vec::new();
    let faces = (0..ts.len())
        .map(|p| {
            let mut children: Vec<(usize, Point)> = sys.rules()[p].iter().map(|c| (c.proto, c.offset.clone())).collect();
            if ts.dimension() == 1 {
                children.sort_by(|x, y| x.1.real_cmp(&y.1));
            }
            FaceImage { proto: p, children }
        })
        .collect();
    let mut vertices = Vec::new();
    for v in &cx.vertices {
        match image_location(sys, cx, v.proto, &v.point) {
            Ok(loc) => vertices.push(loc),
            Err(why) => {
                problems.push(format!("{}: {why}", v.name));
                vertices.push(Location::Face { proto: v.proto, point: v.point.clone() });
            }
        }
    }
    let mut edges = Vec::new();
    for e in &cx.edges {
        match edge_image(sys, cx, e) {
            Ok(locs) => edges.push(locs),
            Err(why) => {
                problems.push(format!("{}: {why}", e.name));
                edges.push(Vec::new());
            }
        }
    }
    let mut by_class: BTreeMap<usize, &Location> = BTreeMap::new();
    for (i, loc) in vertices.iter().enumerate() {
        let c = cx.vertex_class[i];
        match by_class.get(&c) {
            None => {
                by_class.insert(c, loc);
            }
            Some(first) if *first != loc => problems.push(format!("vertex class v{c} has two images ({})", cx.vertices[i].name)),
            Some(_) => {}
        }
    }
    let mut edge_images: BTreeMap<usize, Vec<Location>> = BTreeMap::new();
    for (i, locs) in edges.iter().enumerate() {
        let mut sorted = locs.clone();
        sorted.sort();
        let c = cx.edge_class[i];
        match edge_images.get(&c) {
            None => {
                edge_images.insert(c, sorted);
            }
            Some(first) if *first != sorted => problems.push(format!("edge class {c} has two images ({})", cx.edges[i].name)),
            Some(_) => {}
        }
    }
    ApMap { faces, vertices, edges, problems }
}

#[derive(Clone, Debug, Serialize)]
pub struct LocationJson {
    pub cell: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<String>>,
}

impl LocationJson {
    pub fn new(sys: &SubstitutionSystem, loc: &Location) -> Self {
        match loc {
            Location::Face { proto, point } => LocationJson { cell: format!("face {}", sys.label(*proto)), point: Some(format_coords(point)) },
            Location::Edge { class, point } => LocationJson { cell: format!("edge class {class}"), point: Some(format_coords(point)) },
            Location::Vertex { class } => LocationJson { cell: format!("vertex class v{class}"), point: None },
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FaceImageJson {
    pub face: String,
    pub chain: Vec<String>,
    pub offsets: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ApMapJson {
    pub system: String,
    pub faces: Vec<FaceImageJson>,
    pub vertices: BTreeMap<String, LocationJson>,
    pub edges: BTreeMap<String, Vec<LocationJson>>,
    pub well_defined: bool,
    pub problems: Vec<String>,
}

impl ApMap {
    pub fn to_json(&self, sys: &SubstitutionSystem, cx: &ApComplex) -> ApMapJson {
        ApMapJson {
            system: sys.name().to_string(),
            faces: self
                .faces
                .iter()
                .map(|f| FaceImageJson {
                    face: sys.label(f.proto).to_string(),
                    chain: f.children.iter().map(|(c, _)| sys.label(*c).to_string()).collect(),
                    offsets: f.children.iter().map(|(_, o)| format_coords(o)).collect(),
                })
                .collect(),
            vertices: cx.vertices.iter().zip(&self.vertices).map(|(v, l)| (v.name.clone(), LocationJson::new(sys, l))).collect(),
            edges: cx.edges.iter().zip(&self.edges).map(|(e, ls)| (e.name.clone(), ls.iter().map(|l| LocationJson::new(sys, l)).collect())).collect(),
            well_defined: self.is_well_defined(),
            problems: self.problems.clone(),
        }
    }
}
