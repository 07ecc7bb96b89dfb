use std::cmp::Ordering;

use crate::arith::{FieldElement, Part};

use super::GeometryError;

pub type Point = FieldElement;

/// sign of Im(conj(q − p)·(r − p)): +1 when r lies left of p→q.
pub fn orient(p: &Point, q: &Point, r: &Point) -> i32 {
    let d = q - p;
    let w = r - p;
    (&d.conj() * &w).sign(Part::Imaginary)
}

/// sign of the projection of (a − b) on direction d.
pub fn dot_sign(d: &Point, a: &Point, b: &Point) -> i32 {
    (&d.conj() * &(a - b)).sign(Part::Real)
}

/// Point on the closed segment [u, v].
pub fn on_segment(u: &Point, v: &Point, x: &Point) -> bool {
    if orient(u, v, x) != 0 {
        return false;
    }
    let d = v - u;
    dot_sign(&d, x, u) >= 0 && dot_sign(&d, v, x) >= 0
}

/// Segments [a, b] and [c, d] are collinear and share a piece of positive length.
pub fn segments_overlap(a: &Point, b: &Point, c: &Point, d: &Point) -> bool {
    if orient(a, b, c) != 0 || orient(a, b, d) != 0 {
        return false;
    }
    let dir = b - a;
    // Parameterize along dir; [a,b] has a < b.
    let (lo, hi) = if dot_sign(&dir, c, d) <= 0 { (c, d) } else { (d, c) };
    let max_lo = if dot_sign(&dir, lo, a) >= 0 { lo } else { a };
    let min_hi = if dot_sign(&dir, hi, b) <= 0 { hi } else { b };
    dot_sign(&dir, min_hi, max_lo) > 0
}

/// Shape of a prototile support, in prototile coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Shape {
    Interval { lo: Point, hi: Point },
    /// Counter-clockwise simple polygon.
    Polygon { vertices: Vec<Point> },
}

impl Shape {
    pub fn dimension(&self) -> usize {
        match self {
            Shape::Interval { .. } => 1,
            Shape::Polygon { .. } => 2,
        }
    }

    /// Boundary vertices (interval endpoints in 1D).
    pub fn vertices(&self) -> Vec<Point> {
        match self {
            Shape::Interval { lo, hi } => vec![lo.clone(), hi.clone()],
            Shape::Polygon { vertices } => vertices.clone(),
        }
    }

    pub fn translate(&self, v: &Point) -> Shape {
        match self {
            Shape::Interval { lo, hi } => Shape::Interval { lo: lo + v, hi: hi + v },
            Shape::Polygon { vertices } => Shape::Polygon { vertices: vertices.iter().map(|p| p + v).collect() },
        }
    }

    pub fn scale(&self, s: &Point) -> Shape {
        match self {
            Shape::Interval { lo, hi } => Shape::Interval { lo: lo * s, hi: hi * s },
            Shape::Polygon { vertices } => Shape::Polygon { vertices: vertices.iter().map(|p| p * s).collect() },
        }
    }

    /// Twice the signed area as a field element whose imaginary part is the
    /// doubled area (2D), or the length (1D, real).
    pub fn measure_form(&self) -> Point {
        match self {
            Shape::Interval { lo, hi } => hi - lo,
            Shape::Polygon { vertices } => {
                let n = vertices.len();
                let mut acc = FieldElement::zero(vertices[0].spec());
                for i in 0..n {
                    acc = &acc + &(&vertices[i].conj() * &vertices[(i + 1) % n]);
                }
                acc
            }
        }
    }

    /// Structural checks: real endpoints in order, or a simple CCW polygon.
    pub fn validate(&self) -> Result<(), GeometryError> {
        match self {
            Shape::Interval { lo, hi } => {
                if !lo.is_real() || !hi.is_real() {
                    return Err(GeometryError::NotReal);
                }
                if lo.real_cmp(hi) != Ordering::Less {
                    return Err(GeometryError::Degenerate);
                }
                Ok(())
            }
            Shape::Polygon { vertices } => {
                let n = vertices.len();
                if n < 3 {
                    return Err(GeometryError::Degenerate);
                }
                if self.measure_form().sign(Part::Imaginary) <= 0 {
                    return Err(GeometryError::NotCounterClockwise);
                }
                for i in 0..n {
                    let (a, b) = (&vertices[i], &vertices[(i + 1) % n]);
                    if a == b {
                        return Err(GeometryError::Degenerate);
                    }
                    for j in i + 1..n {
                        let (c, d) = (&vertices[j], &vertices[(j + 1) % n]);
                        let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                        if adjacent {
                            // Consecutive edges may only share their common vertex.
                            let shared = if j == i + 1 { b } else { a };
                            let (other_a, other_b) = if j == i + 1 { (a, d) } else { (b, c) };
                            if orient(other_a, shared, other_b) == 0
                                && dot_sign(&(shared - other_a), other_b, shared) < 0
                            {
                                return Err(GeometryError::NotSimple);
                            }
                        } else if segments_intersect(a, b, c, d) {
                            return Err(GeometryError::NotSimple);
                        }
                    }
                }
                Ok(())
            }
        }
    }

    pub fn is_convex(&self) -> bool {
        match self {
            Shape::Interval { .. } => true,
            Shape::Polygon { vertices } => {
                let n = vertices.len();
                (0..n).all(|i| orient(&vertices[i], &vertices[(i + 1) % n], &vertices[(i + 2) % n]) >= 0)
            }
        }
    }

    /// Convex pieces covering the polygon: itself if convex, else an ear-clipped
    /// triangulation.
    pub fn convex_pieces(&self) -> Vec<Vec<Point>> {
        match self {
            Shape::Interval { lo, hi } => vec![vec![lo.clone(), hi.clone()]],
            Shape::Polygon { vertices } if self.is_convex() => vec![vertices.clone()],
            Shape::Polygon { vertices } => ear_clip(vertices),
        }
    }

    /// Closed containment of a point.
    pub fn contains(&self, x: &Point) -> bool {
        match self {
            Shape::Interval { lo, hi } => {
                x.is_real() && lo.real_cmp(x) != Ordering::Greater && x.real_cmp(hi) != Ordering::Greater
            }
            Shape::Polygon { .. } => self
                .convex_pieces()
                .iter()
                .any(|piece| edges(piece).all(|(u, v)| orient(u, v, x) >= 0)),
        }
    }

    pub fn on_boundary(&self, x: &Point) -> bool {
        match self {
            Shape::Interval { lo, hi } => x == lo || x == hi,
            Shape::Polygon { vertices } => edges(vertices).any(|(u, v)| on_segment(u, v, x)),
        }
    }

    pub fn contains_interior(&self, x: &Point) -> bool {
        self.contains(x) && !self.on_boundary(x)
    }

    /// f64 bounding box `[xmin, ymin, xmax, ymax]`.
    pub fn bbox(&self) -> [f64; 4] {
        let mut b = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
        for v in self.vertices() {
            let (x, y) = v.to_f64();
            b[0] = b[0].min(x);
            b[1] = b[1].min(y);
            b[2] = b[2].max(x);
            b[3] = b[3].max(y);
        }
        b
    }
}

pub fn edges<'a>(vs: &'a [Point]) -> impl Iterator<Item = (&'a Point, &'a Point)> + 'a {
    let n = vs.len();
    (0..n).map(move |i| (&vs[i], &vs[(i + 1) % n]))
}

/// Closed segments intersect.
pub fn segments_intersect(a: &Point, b: &Point, c: &Point, d: &Point) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    (o1 == 0 && on_segment(a, b, c))
        || (o2 == 0 && on_segment(a, b, d))
        || (o3 == 0 && on_segment(c, d, a))
        || (o4 == 0 && on_segment(c, d, b))
}

fn ear_clip(vertices: &[Point]) -> Vec<Vec<Point>> {
    let mut idx: Vec<usize> = (0..vertices.len()).collect();
    let mut out = Vec::new();
    while idx.len() > 3 {
        let m = idx.len();
        let mut clipped = false;
        for k in 0..m {
            let (i0, i1, i2) = (idx[(k + m - 1) % m], idx[k], idx[(k + 1) % m]);
            let (a, b, c) = (&vertices[i0], &vertices[i1], &vertices[i2]);
            if orient(a, b, c) <= 0 {
                continue;
            }
            let blocked = idx.iter().any(|&j| {
                j != i0 && j != i1 && j != i2 && {
                    let p = &vertices[j];
                    orient(a, b, p) >= 0 && orient(b, c, p) >= 0 && orient(c, a, p) >= 0
                }
            });
            if !blocked {
                out.push(vec![a.clone(), b.clone(), c.clone()]);
                idx.remove(k);
                clipped = true;
                break;
            }
        }
        if !clipped {
            // Collinear remainder; drop a flat vertex.
            idx.remove(0);
        }
    }
    if idx.len() == 3 && orient(&vertices[idx[0]], &vertices[idx[1]], &vertices[idx[2]]) > 0 {
        out.push(idx.iter().map(|&j| vertices[j].clone()).collect());
    }
    out
}

/// Interiors of two convex pieces intersect (separating axis over edge normals).
pub fn convex_interiors_overlap(a: &[Point], b: &[Point]) -> bool {
    !separated(a, b, 0) && !separated(b, a, 0)
}

/// Closed convex pieces intersect.
pub fn convex_touch(a: &[Point], b: &[Point]) -> bool {
    !separated(a, b, -1) && !separated(b, a, -1)
}

/// Part of a convex polygon on the closed left side of the line u→v.
pub fn clip_left(poly: &[Point], u: &Point, v: &Point) -> Vec<Point> {
    let dc = (v - u).conj();
    // 2i·Im(conj(d)(w − u)): purely imaginary, so ratios of two are real.
    let side = |w: &Point| {
        let z = &dc * &(w - u);
        &z - &z.conj()
    };
    let mut out = Vec::new();
    for (p, q) in edges(poly) {
        let sp = side(p);
        let sq = side(q);
        let a = sp.sign(Part::Imaginary);
        let b = sq.sign(Part::Imaginary);
        if a >= 0 {
            out.push(p.clone());
        }
        if a * b < 0 {
            let t = &sp * &(&sp - &sq).inv().expect("distinct sides");
            out.push(p + &(&t * &(q - p)));
        }
    }
    out.dedup();
    if out.len() > 1 && out.first() == out.last() {
        out.pop();
    }
    out
}

/// Twice the area of the intersection of two convex polygons, as an
/// element whose imaginary part carries the value (see `measure_form`).
pub fn convex_overlap_measure(a: &[Point], b: &[Point]) -> Point {
    let mut poly = a.to_vec();
    for (u, v) in edges(b) {
        if poly.len() < 3 {
            break;
        }
        poly = clip_left(&poly, u, v);
    }
    if poly.len() < 3 {
        return FieldElement::zero(a[0].spec());
    }
    Shape::Polygon { vertices: poly }.measure_form()
}

/// Some edge of `a` has every vertex of `b` with orientation ≤ `bound`.
fn separated(a: &[Point], b: &[Point], bound: i32) -> bool {
    edges(a).any(|(u, v)| {
        let d = v - u;
        let dc = d.conj();
        b.iter().all(|w| (&dc * &(w - u)).sign(Part::Imaginary) <= bound)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::field_make;

    fn pt(x: i64, y: i64) -> Point {
        // Gaussian integers in Q(ζ₄).
        let k = field_make(4);
        &FieldElement::from_int(&k, x) + &(&FieldElement::zeta(&k, 1) * &FieldElement::from_int(&k, y))
    }

    fn square(x: i64, y: i64) -> Vec<Point> {
        vec![pt(x, y), pt(x + 1, y), pt(x + 1, y + 1), pt(x, y + 1)]
    }

    #[test]
    fn orientation_basics() {
        assert_eq!(orient(&pt(0, 0), &pt(1, 0), &pt(0, 1)), 1);
        assert_eq!(orient(&pt(0, 0), &pt(1, 0), &pt(0, -1)), -1);
        assert_eq!(orient(&pt(0, 0), &pt(1, 0), &pt(5, 0)), 0);
    }

    #[test]
    fn square_contacts() {
        let a = square(0, 0);
        assert!(convex_touch(&a, &square(1, 0)));
        assert!(!convex_interiors_overlap(&a, &square(1, 0)));
        assert!(convex_touch(&a, &square(1, 1)));
        assert!(!convex_touch(&a, &square(2, 0)));
        assert!(convex_interiors_overlap(&a, &a));
    }

    #[test]
    fn overlap_of_collinear_segments() {
        assert!(segments_overlap(&pt(0, 0), &pt(2, 0), &pt(1, 0), &pt(3, 0)));
        assert!(!segments_overlap(&pt(0, 0), &pt(1, 0), &pt(1, 0), &pt(2, 0)));
        assert!(segments_overlap(&pt(0, 0), &pt(2, 0), &pt(2, 0), &pt(0, 0)));
        assert!(!segments_overlap(&pt(0, 0), &pt(2, 0), &pt(0, 1), &pt(2, 1)));
    }

    #[test]
    fn nonconvex_polygon_is_triangulated() {
        // An L-shaped hexagon.
        let l = Shape::Polygon { vertices: vec![pt(0, 0), pt(2, 0), pt(2, 1), pt(1, 1), pt(1, 2), pt(0, 2)] };
        l.validate().unwrap();
        assert!(!l.is_convex());
        let pieces = l.convex_pieces();
        assert_eq!(pieces.len(), 4);
        assert!(l.contains(&pt(1, 1)));
        assert!(!l.contains(&pt(2, 2)));
        assert!(l.on_boundary(&pt(1, 1)));
        assert_eq!(l.measure_form().sign(Part::Imaginary), 1);
    }

    #[test]
    fn clockwise_and_bowtie_are_rejected() {
        let cw = Shape::Polygon { vertices: square(0, 0).into_iter().rev().collect() };
        assert_eq!(cw.validate(), Err(GeometryError::NotCounterClockwise));
        let bow = Shape::Polygon { vertices: vec![pt(0, 0), pt(2, 2), pt(2, 0), pt(0, 2), pt(-1, 1)] };
        assert!(bow.validate().is_err());
    }

    #[test]
    fn clipped_overlap_area() {
        let big = |x: i64, y: i64| vec![pt(x, y), pt(x + 2, y), pt(x + 2, y + 2), pt(x, y + 2)];
        let m = convex_overlap_measure(&big(0, 0), &big(1, 1));
        assert_eq!((&m - &m.conj()), &FieldElement::from_int(m.spec(), 4) * &FieldElement::zeta(m.spec(), 1));
        let none = convex_overlap_measure(&big(0, 0), &big(2, 0));
        assert_eq!(none.sign(Part::Imaginary), 0);
        let whole = convex_overlap_measure(&square(0, 0), &big(0, 0));
        assert_eq!(whole.sign(Part::Imaginary), 1);
    }
}
