mod common;

use std::time::Instant;

use common::{id, left, sys};
use tilesemi::arith::FieldElement;
use tilesemi::geometry::Shape;
use tilesemi::limit::{alpha, alpha_enclosure, ap_substitution_map, asymptotically_equivalent, beta, build_ap_complex, identified_points, image_location, AddressPoint, LimitError};
use tilesemi::paths::{enumerate_words, LeftWord, RightWord};
use tilesemi::substitution::SubstitutionSystem;

fn strs(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

/// Every eventually periodic left word with period ≤ `m` and tail ≤ `k`.
fn periodic_words(s: &SubstitutionSystem, m: usize, k: usize) -> Vec<LeftWord> {
    let mut out = Vec::new();
    for len in 1..=m {
        for p in enumerate_words(s, len, None).unwrap() {
            if p.end(s) != p.start(s) {
                continue;
            }
            out.push(LeftWord::new(s, p.0.clone(), Vec::new()).unwrap());
            for t in 1..=k {
                for tail in enumerate_words(s, t, p.end(s)).unwrap() {
                    out.push(LeftWord::new(s, p.0.clone(), tail.0).unwrap());
                }
            }
        }
    }
    out
}

/// σ on left words: forget the coarsest letter.
fn drop_outer(e: &LeftWord) -> LeftWord {
    let mut e = e.clone();
    if e.tail.pop().is_none() {
        let last = e.period.pop().unwrap();
        e.period.insert(0, last);
    }
    e
}

#[test]
fn fibonacci_fixed_points() {
    let s = sys("fibonacci");
    let k = s.tileset().field();
    let x = alpha(&s, &left(&s, "...[(c,a)(a,c)]")).unwrap();
    assert_eq!(x, AddressPoint { proto: id(&s, "c"), point: FieldElement::zero(k) });
    let y = alpha(&s, &left(&s, "...[(d,b)(b,d)]")).unwrap();
    assert_eq!(y, AddressPoint { proto: id(&s, "d"), point: FieldElement::one(k) });
    // Independent: x = γ⁻¹(γ⁻¹(γ + x)) has the solution γ/(γ² − 1).
    let g = s.lambda();
    let sol = &(g * &(&(g * g) - &FieldElement::one(k)).inv().unwrap());
    assert_eq!(&y.point, sol);
    assert!(asymptotically_equivalent(&s, &left(&s, "...[(c,a)(a,c)]"), &left(&s, "...[(d,b)(b,d)]")).unwrap());
    assert!(asymptotically_equivalent(&s, &left(&s, "...[(c,a)(a,c)]"), &left(&s, "...[(a,c)(c,a)](a,c)")).unwrap());
    assert!(!asymptotically_equivalent(&s, &left(&s, "...[(c,a)(a,c)]"), &left(&s, "...[(a,b)(b,d)(d,a)]")).unwrap());
    assert_eq!(alpha(&s, &left(&s, "(a,c)")), Err(LimitError::NotPeriodic));
}

#[test]
fn enclosures_nest_and_shrink() {
    let s = sys("fibonacci");
    let k = s.tileset().field();
    let (p, cell) = alpha_enclosure(&s, &left(&s, "(c,a)(a,c)"), 2).unwrap();
    assert_eq!(p, id(&s, "c"));
    let g_inv = s.lambda().inv().unwrap();
    assert_eq!(cell, Shape::Interval { lo: FieldElement::zero(k), hi: g_inv.clone() });
    for e in periodic_words(&s, 3, 1) {
        let x = alpha(&s, &e).unwrap();
        let mut prev: Option<Shape> = None;
        for n in 1..=8 {
            let (_, c) = alpha_enclosure(&s, &e, n).unwrap();
            assert!(c.contains(&x.point), "{}", e.format(&s));
            if let Some(p) = &prev {
                assert!(c.vertices().iter().all(|v| p.contains(v)));
            }
            prev = Some(c);
        }
    }
}

#[test]
fn halfhex_enclosures_hold_their_points() {
    let s = sys("halfhex");
    for e in periodic_words(&s, 2, 1) {
        let x = alpha(&s, &e).unwrap();
        assert!(s.tileset().proto(x.proto).shape.contains(&x.point));
        let (_, c) = alpha_enclosure(&s, &e, 4).unwrap();
        assert!(c.contains(&x.point));
    }
}

#[test]
fn fibonacci_complex() {
    let s = sys("fibonacci");
    let started = Instant::now();
    let cx = build_ap_complex(&s).unwrap();
    assert_eq!(cx.cell_counts(), vec![3, 4]);
    assert_eq!(cx.euler_characteristic(), -1);
    let mut classes: Vec<Vec<String>> = cx.vertex_classes().into_iter().map(|mut c| {
        c.sort();
        c
    }).collect();
    classes.sort();
    assert_eq!(classes, vec![strs(&["aL", "bR"]), strs(&["aR", "cR", "dL"]), strs(&["bL", "cL", "dR"])]);
    let map = ap_substitution_map(&s, &cx);
    assert!(map.is_well_defined(), "{:?}", map.problems);
    assert_eq!(map.face_chain(&s, id(&s, "a")), strs(&["c", "d"]));
    assert_eq!(map.face_chain(&s, id(&s, "d")), strs(&["b"]));
    assert!(started.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn two_dimensional_complexes() {
    for (name, faces) in [("halfhex", 6), ("penrose", 40)] {
        let s = sys(name);
        let cx = build_ap_complex(&s).unwrap();
        assert_eq!(cx.faces.len(), faces);
        assert!(cx.is_consistent(), "{name}: {:?}", cx.conflicts);
        assert!(ap_substitution_map(&s, &cx).is_well_defined());
    }
}

#[test]
fn equivalence_matches_cell_location() {
    for (name, m, k, stride) in [("fibonacci", 4, 2, 1), ("halfhex", 2, 1, 3)] {
        let s = sys(name);
        let cx = build_ap_complex(&s).unwrap();
        let words = periodic_words(&s, m, k);
        let points: Vec<(&LeftWord, AddressPoint)> = words.iter().map(|e| (e, alpha(&s, e).unwrap())).collect();
        let mut pairs = 0;
        let mut glued = 0;
        for (i, (e, x)) in points.iter().enumerate() {
            for (f, y) in points.iter().skip(i).step_by(stride) {
                let same = asymptotically_equivalent(&s, e, f).unwrap();
                let lx = cx.locate(&s, x.proto, &x.point).unwrap();
                let ly = cx.locate(&s, y.proto, &y.point).unwrap();
                assert_eq!(same, lx == ly, "{name}: {} vs {}", e.format(&s), f.format(&s));
                if x.is_interior(&s) || y.is_interior(&s) {
                    assert_eq!(same, x == y);
                }
                pairs += 1;
                glued += (same && x != y) as usize;
            }
        }
        assert!(pairs >= 200 && glued > 0, "{name}: {pairs} {glued}");
    }
}

#[test]
fn identification_is_an_equivalence() {
    let s = sys("halfhex");
    for e in periodic_words(&s, 2, 0) {
        let x = alpha(&s, &e).unwrap();
        let class = identified_points(&s, &x).unwrap();
        for y in &class {
            assert_eq!(&identified_points(&s, y).unwrap(), &class);
        }
    }
}

#[test]
fn shift_commutes_with_substitution() {
    for name in ["fibonacci", "halfhex"] {
        let s = sys(name);
        let cx = build_ap_complex(&s).unwrap();
        for e in periodic_words(&s, 3, 1) {
            let x = alpha(&s, &e).unwrap();
            let inner = drop_outer(&e);
            let y = alpha(&s, &inner).unwrap();
            assert_eq!(y.proto, s.edge(e.outer()).r());
            let image = image_location(&s, &cx, x.proto, &x.point).unwrap();
            assert_eq!(Some(image), cx.locate(&s, y.proto, &y.point), "{name}: {}", e.format(&s));
        }
    }
}

#[test]
fn beta_places_the_origin() {
    let s = sys("fibonacci");
    let ts = s.tileset();
    let right = RightWord::parse(&s, "(d,b)(b,d)").unwrap();
    let b = beta(&s, Some(&left(&s, "...[(d,b)(b,d)]")), &right).unwrap();
    assert_eq!(b.point, FieldElement::one(ts.field()));
    assert!(b.radius_sq.is_zero());
    // The origin is the right end of the marked d tile.
    let d = b.patch.marked_tile();
    assert_eq!(ts.vertices(d)[1], ts.zero());

    let b = beta(&s, None, &right).unwrap();
    assert_eq!(ts.puncture(b.patch.marked_tile()), ts.zero());

    let b = beta(&s, Some(&left(&s, "(b,d)(d,b)(b,d)")), &right).unwrap();
    assert!(!b.radius_sq.is_zero());
    let (_, cell) = alpha_enclosure(&s, &left(&s, "(b,d)(d,b)(b,d)"), 3).unwrap();
    assert!(cell.contains(&b.point));
    let r = b.radius_sq.to_f64().0.sqrt();
    assert!(r < 0.5 && r > 0.0);

    assert!(matches!(beta(&s, Some(&left(&s, "...[(c,a)(a,c)]")), &right), Err(LimitError::Junction { .. })));
}

#[test]
fn beta_is_equivariant() {
    let s = sys("fibonacci");
    let l = left(&s, "...[(c,a)(a,c)]");
    for w in enumerate_words(&s, 3, Some(id(&s, "c"))).unwrap() {
        let b = beta(&s, Some(&l), &w).unwrap();
        let plain = beta(&s, None, &w).unwrap();
        let shift = &b.patch.marked_tile().offset - &plain.patch.marked_tile().offset;
        assert_eq!(plain.patch.patch.translate(&shift), b.patch.patch);
    }
}

#[test]
fn exports() {
    let s = sys("fibonacci");
    let cx = build_ap_complex(&s).unwrap();
    assert_eq!(cx.to_dot(&s).matches("--").count(), 4);
    let json = serde_json::to_value(cx.to_json(&s)).unwrap();
    assert_eq!(json["vertex_classes"].as_array().unwrap().len(), 3);
    assert!(cx.skeleton_svg(&s).starts_with("<svg"));
}
