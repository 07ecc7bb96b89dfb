//! Points of the limit space: addresses α of left-infinite words, their
//! identification, the Anderson–Putnam complex and the β map.

mod complex;

use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;

use crate::arith::{FieldElement, Rational};
use crate::geometry::{Convention, Point, Shape, Tile};
use crate::paths::{inward_sum, lambda_pow, tau, LeftWord, MarkedPatch, PathError, RightWord};
use crate::substitution::{SubstitutionError, SubstitutionSystem, DEFAULT_PAIR_CAP};

pub use complex::{
    ap_substitution_map, build_ap_complex, image_location, ApComplex, ApComplexJson, ApMap, ApMapJson, EdgeCell, FaceImage, Location, LocationJson,
    VertexCell,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LimitError {
    #[error("address is not eventually periodic; use an enclosure")]
    NotPeriodic,
    #[error("left word ends in {left} but the right word starts in {right}")]
    Junction { left: String, right: String },
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Substitution(#[from] SubstitutionError),
}

/// A point of the disjoint union of prototile supports.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AddressPoint {
    pub proto: usize,
    pub point: Point,
}

impl AddressPoint {
    pub fn is_interior(&self, sys: &SubstitutionSystem) -> bool {
        sys.tileset().proto(self.proto).shape.contains_interior(&self.point)
    }
}

/// α(e) for an eventually periodic e: x = A + λ⁻ᵏ·B / (1 − λ⁻ᵐ) with A the
/// tail sum, B one period's sum, k the tail length and m the period length.
pub fn alpha(sys: &SubstitutionSystem, e: &LeftWord) -> Result<AddressPoint, LimitError> {
    if !e.is_periodic() {
        return Err(LimitError::NotPeriodic);
    }
    let (k, m) = (e.tail.len(), e.period.len());
    let letters = e.inward(k + m);
    let a = inward_sum(sys, &letters[..k]);
    let b = inward_sum(sys, &letters[k..]);
    let one = FieldElement::one(sys.tileset().field());
    let inv_k = lambda_pow(sys, k).inv().expect("λ ≠ 0");
    let inv_m = lambda_pow(sys, m).inv().expect("λ ≠ 0");
    let denom = (&one - &inv_m).inv().expect("|λ| > 1");
    let point = &a + &(&(&inv_k * &b) * &denom);
    Ok(AddressPoint { proto: e.outer_proto(sys), point })
}

/// The nested cell S₋ₙ = Σλ⁻ⁱo(e₋ᵢ) + λ⁻ⁿ·supp(r(e₋ₙ)) for the first n
/// letters going inwards (the finite part, or n letters of a periodic word).
pub fn alpha_enclosure(sys: &SubstitutionSystem, e: &LeftWord, n: usize) -> Result<(usize, Shape), LimitError> {
    let n = if e.is_periodic() { n } else { n.min(e.tail.len()) };
    if n == 0 {
        return Err(LimitError::Path(PathError::Empty));
    }
    let letters = e.inward(n);
    let inner = sys.edge(letters[n - 1]).r();
    let scale = lambda_pow(sys, n).inv().expect("λ ≠ 0");
    let cell = sys.tileset().proto(inner).shape.scale(&scale).translate(&inward_sum(sys, &letters));
    Ok((e.outer_proto(sys), cell))
}

/// Every address point identified with `x` through a chain of touching tiles.
pub fn identified_points(sys: &SubstitutionSystem, x: &AddressPoint) -> Result<BTreeSet<AddressPoint>, LimitError> {
    let ts = sys.tileset();
    let pairs = sys.legal_pairs_with(Convention::Adjacent, DEFAULT_PAIR_CAP)?;
    let mut seen = BTreeSet::from([x.clone()]);
    let mut queue = VecDeque::from([x.clone()]);
    while let Some(y) = queue.pop_front() {
        if !ts.proto(y.proto).shape.on_boundary(&y.point) {
            continue;
        }
        for pair in pairs.iter() {
            for (i, j) in [(0, 1), (1, 0)] {
                let (p, q) = (&pair.tiles()[i], &pair.tiles()[j]);
                if p.proto != y.proto {
                    continue;
                }
                let w = &y.point + &p.offset;
                if ts.support(q).contains(&w) {
                    let z = AddressPoint { proto: q.proto, point: &w - &q.offset };
                    if seen.insert(z.clone()) {
                        queue.push_back(z);
                    }
                }
            }
        }
    }
    Ok(seen)
}

/// e ∼ f: α(e) and α(f) are the same point of the limit space.
pub fn asymptotically_equivalent(sys: &SubstitutionSystem, e: &LeftWord, f: &LeftWord) -> Result<bool, LimitError> {
    let (x, y) = (alpha(sys, e)?, alpha(sys, f)?);
    if x == y {
        return Ok(true);
    }
    Ok(identified_points(sys, &x)?.contains(&y))
}

#[derive(Clone, Debug)]
pub struct Beta {
    /// τ(right) translated so the origin sits over the address point.
    pub patch: MarkedPatch,
    /// The address point in the marked tile's prototile frame.
    pub point: Point,
    /// Squared radius of the enclosing cell; zero when the point is exact.
    pub radius_sq: FieldElement,
}

fn centroid(shape: &Shape) -> Point {
    let vs = shape.vertices();
    let mut sum = FieldElement::zero(vs[0].spec());
    for v in &vs {
        sum = &sum + v;
    }
    sum.scale(&Rational::new(1, vs.len() as i64))
}

fn max_dist_sq(shape: &Shape, c: &Point) -> FieldElement {
    let mut best = FieldElement::zero(c.spec());
    for v in shape.vertices() {
        let d = &v - c;
        let n = &d * &d.conj();
        if n.real_cmp(&best).is_gt() {
            best = n;
        }
    }
    best
}

/// β(left · right): τ(right) with the origin moved over α(left). A periodic
/// left word gives the exact point, a finite one the centre of its cell and
/// no left word the puncture.
pub fn beta(sys: &SubstitutionSystem, left: Option<&LeftWord>, right: &RightWord) -> Result<Beta, LimitError> {
    let ts = sys.tileset();
    let start = right.start(sys).ok_or(PathError::Empty)?;
    let (point, radius_sq) = match left {
        None => (ts.proto(start).puncture.clone(), ts.zero()),
        Some(l) => {
            let outer = l.outer_proto(sys);
            if outer != start {
                return Err(LimitError::Junction { left: sys.label(outer).into(), right: sys.label(start).into() });
            }
            if l.is_periodic() {
                (alpha(sys, l)?.point, ts.zero())
            } else {
                let (_, cell) = alpha_enclosure(sys, l, l.tail.len())?;
                let c = centroid(&cell);
                let r = max_dist_sq(&cell, &c);
                (c, r)
            }
        }
    };
    let marked = tau(sys, right)?;
    let tile: &Tile = marked.marked_tile();
    let shift = -(&tile.offset + &point);
    Ok(Beta { patch: MarkedPatch { patch: marked.patch.translate(&shift), marked: marked.marked }, point, radius_sq })
}

#[derive(Clone, Debug, Serialize)]
pub struct AddressJson {
    pub tile: String,
    pub point: Vec<String>,
    pub interior: bool,
}

impl AddressJson {
    pub fn new(sys: &SubstitutionSystem, x: &AddressPoint) -> Self {
        AddressJson {
            tile: sys.label(x.proto).to_string(),
            point: crate::substitution::config::format_coords(&x.point),
            interior: x.is_interior(sys),
        }
    }
}
