mod common;

use common::{id, sys};
use proptest::prelude::*;
use tilesemi::arith::{FieldElement, Rational};
use tilesemi::geometry::{adjacency_with, bfs_distances, patch_svg, Convention, GeometryError, Patch, Point, SvgOptions, Tile};
use tilesemi::substitution::SubstitutionSystem;
use tilesemi::substitution::DEFAULT_PAIR_CAP;

fn golden(s: &SubstitutionSystem) -> Point {
    s.lambda().clone()
}

#[test]
fn fibonacci_contacts() {
    let s = sys("fibonacci");
    let ts = s.tileset();
    let c = Tile::new(id(&s, "c"), ts.zero());
    let d = Tile::new(id(&s, "d"), golden(&s));
    for conv in [Convention::Adjacent, Convention::Codim1Face] {
        assert!(ts.tiles_meet(&c, &d, conv).unwrap());
    }
    assert_eq!(ts.tiles_meet(&c, &c, Convention::Adjacent), Err(GeometryError::InteriorsOverlap));
    let far = Tile::new(id(&s, "d"), &golden(&s) + &FieldElement::one(ts.field()));
    assert!(!ts.tiles_meet(&c, &far, Convention::Adjacent).unwrap());
}

#[test]
fn canonical_forms_are_translation_invariant() {
    let s = sys("fibonacci");
    let ts = s.tileset();
    let (c, d) = (id(&s, "c"), id(&s, "d"));
    let cd = Patch::new(vec![Tile::new(c, ts.zero()), Tile::new(d, golden(&s))], s.convention());
    let v = &golden(&s) * &FieldElement::from_rational(ts.field(), Rational::new(-7, 3));
    let (p, _) = cd.canonical(ts);
    let (q, shift) = cd.translate(&v).canonical(ts);
    assert_eq!(p, q);
    assert_eq!(p.canonical(ts).0, p);
    // φ(a) is the patch cd at the origin.
    let phi_a = s.substitute_tile(&Tile::new(id(&s, "a"), v.clone())).unwrap();
    assert_eq!(Patch::new(phi_a, s.convention()).canonical(ts).0, p);
    let single = Patch::single(Tile::new(c, v.clone()), s.convention());
    let (canon, shift1) = single.canonical(ts);
    assert_eq!(canon.tiles()[0].offset, &v + &shift1);
    assert!(shift != ts.zero());
}

#[test]
fn union_of_overlapping_fibonacci_patches() {
    let s = sys("fibonacci");
    let ts = s.tileset();
    let (a, b, d) = (id(&s, "a"), id(&s, "b"), id(&s, "d"));
    let one = FieldElement::one(ts.field());
    let ad = Patch::new(vec![Tile::new(a, ts.zero()), Tile::new(d, golden(&s))], s.convention());
    let db = Patch::new(vec![Tile::new(d, golden(&s)), Tile::new(b, &golden(&s) + &one)], s.convention());
    let adb = ad.union(&db, ts).unwrap();
    assert_eq!(adb.len(), 3);
    assert_eq!(ad.union(&ad, ts).unwrap(), ad);
    let clash = Patch::single(Tile::new(b, Point::from_rational(ts.field(), Rational::new(1, 2))), s.convention());
    assert!(ad.union(&clash, ts).is_none());
    // adb occurs in φ²(a).
    assert!(s.supertile(a, 2).contains_patch(&adb));
}

#[test]
fn vertex_contacts_exist_only_under_the_adjacent_convention() {
    let s = sys("halfhex");
    let ts = s.tileset();
    let pairs = s.legal_pairs_with(Convention::Adjacent, DEFAULT_PAIR_CAP).unwrap();
    let mut vertex_only = 0;
    for p in pairs.iter() {
        let (x, y) = (&p.tiles()[0], &p.tiles()[1]);
        let face = ts.meets(x, y, Convention::Codim1Face);
        assert!(ts.meets(x, y, Convention::Adjacent));
        if !face {
            vertex_only += 1;
        }
    }
    assert!(vertex_only > 0);
}

/// Balls of radius 1 or 2 around three mutually touching tiles of a large supertile.
fn overlapping_triple(s: &SubstitutionSystem, seed: usize, r: [usize; 3]) -> [Patch; 3] {
    let ts = s.tileset();
    let big = s.supertile(seed % s.num_prototiles(), if ts.dimension() == 1 { 6 } else { 3 });
    let tiles = big.tiles();
    let adj = adjacency_with(ts, tiles, Convention::Adjacent);
    let centre = seed % tiles.len();
    let mut around: Vec<usize> = adj[centre].clone();
    around.push(centre);
    let pick = |k: usize| around[(seed / 7 + k) % around.len()];
    let ball = |c: usize, radius: usize| {
        let d = bfs_distances(&adj, c);
        Patch::new(tiles.iter().zip(&d).filter(|(_, d)| d.is_some_and(|d| d <= radius)).map(|(t, _)| t.clone()).collect(), s.convention())
    };
    [ball(centre, r[0]), ball(pick(0), r[1]), ball(pick(1), r[2])]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn union_is_associative_and_commutative(seed in 0usize..10_000, r in prop::array::uniform3(1usize..=2), two_d in any::<bool>()) {
        let s = sys(if two_d { "halfhex" } else { "fibonacci" });
        let ts = s.tileset();
        let [p, q, w] = overlapping_triple(&s, seed, r);
        let left = p.union(&q, ts).and_then(|pq| pq.union(&w, ts)).expect("overlapping balls");
        let right = q.union(&w, ts).and_then(|qw| p.union(&qw, ts)).expect("overlapping balls");
        prop_assert_eq!(left.canonical(ts).0, right.canonical(ts).0);
        prop_assert_eq!(p.union(&q, ts), q.union(&p, ts));
    }

    #[test]
    fn canonical_is_idempotent(seed in 0usize..10_000, shift in -50i64..50) {
        let s = sys("halfhex");
        let ts = s.tileset();
        let [p, _, _] = overlapping_triple(&s, seed, [2, 1, 1]);
        let v = &FieldElement::zeta(ts.field(), 1) * &FieldElement::from_int(ts.field(), shift);
        let (c, _) = p.translate(&v).canonical(ts);
        prop_assert_eq!(c.canonical(ts).0, c.clone());
        prop_assert_eq!(c, p.canonical(ts).0);
    }
}

#[test]
fn svg_uses_requested_precision() {
    let s = sys("fibonacci");
    let tiles = s.supertile(0, 2).tiles().to_vec();
    let svg = patch_svg(s.tileset(), &tiles, &SvgOptions { digits: 12, ..SvgOptions::default() });
    assert_eq!(svg.matches("class=\"tile\"").count(), tiles.len());
    assert!(svg.contains("1.618033988750"));
    assert_eq!(svg, patch_svg(s.tileset(), &tiles, &SvgOptions { digits: 12, ..SvgOptions::default() }));
}
