mod common;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::time::Instant;

use common::{id, left, sys, word};
use proptest::prelude::*;
use tilesemi::geometry::Tile;
use tilesemi::paths::{enumerate_words, tau, tau_plus, LeftWord, MarkedPatch, PathError, RightWord};

#[test]
fn words_round_trip_through_text() {
    for name in ["fibonacci", "abb", "halfhex"] {
        let s = sys(name);
        for w in enumerate_words(&s, 3, None).unwrap() {
            assert_eq!(RightWord::parse(&s, &w.format(&s)).unwrap(), w);
        }
    }
    let s = sys("fibonacci");
    for text in ["...[(c,a)(a,c)]", "...[(d,b)(b,d)](d,c)", "(a,b)(b,d)"] {
        assert_eq!(left(&s, text).format(&s), text);
    }
}

#[test]
fn malformed_words_are_rejected() {
    let s = sys("fibonacci");
    assert_eq!(RightWord::parse(&s, "(a,b)(a,c)"), Err(PathError::Broken { index: 0 }));
    assert!(matches!(RightWord::parse(&s, "(a,z)"), Err(PathError::UnknownLetter(_))));
    assert!(matches!(RightWord::parse(&s, "(a,b"), Err(PathError::Syntax { .. })));
    assert!(matches!(RightWord::parse(&sys("abb"), "(b,a)"), Err(PathError::Ambiguous(_))));
    assert_eq!(LeftWord::parse(&s, "...[(a,b)]"), Err(PathError::BadPeriod));
}

#[test]
fn fibonacci_words() {
    let s = sys("fibonacci");
    assert_eq!(enumerate_words(&s, 1, None).unwrap().len(), 7);
    let from_a: BTreeSet<String> = enumerate_words(&s, 2, Some(id(&s, "a"))).unwrap().iter().map(|w| w.format(&s)).collect();
    assert_eq!(from_a, ["(a,b)(b,d)", "(a,c)(c,a)"].iter().map(|x| x.to_string()).collect());
    assert_eq!(enumerate_words(&s, 0, None), Err(PathError::Empty));
    let w = RightWord::parse(&s, "(a,b)(b,d)(d,c)").unwrap();
    assert_eq!((w.start(&s), w.end(&s)), (Some(id(&s, "a")), Some(id(&s, "c"))));
    assert_eq!(w.shift().format(&s), "(b,d)(d,c)");
}

#[test]
fn tau_of_fibonacci_words() {
    let s = sys("fibonacci");
    let ts = s.tileset();
    let w = RightWord::parse(&s, "(a,b)(b,d)").unwrap();
    let m = tau(&s, &w).unwrap();
    // φ²(d) = ad with the marked a at the left.
    assert_eq!(m.patch.len(), 2);
    assert_eq!(m.marked_tile().proto, id(&s, "a"));
    assert_eq!(ts.puncture(m.marked_tile()), ts.zero());
    let w = RightWord::parse(&s, "(d,c)(c,a)").unwrap();
    let m = tau(&s, &w).unwrap();
    assert_eq!(m.patch.len(), 3);
    let mut tiles = m.patch.tiles().to_vec();
    tiles.sort_by(|x, y| x.offset.real_cmp(&y.offset));
    // φ²(a) = adb and the marked d is the middle tile.
    assert_eq!(tiles[1], *m.marked_tile());
}

#[test]
fn tau_is_injective() {
    for (name, top) in [("fibonacci", 5), ("abb", 5), ("halfhex", 5), ("penrose", 3)] {
        let s = sys(name);
        let started = Instant::now();
        for n in 1..=top {
            let words = enumerate_words(&s, n, None).unwrap();
            let mut seen = HashSet::with_capacity(words.len());
            let mut bare: HashMap<MarkedPatch, &RightWord> = HashMap::new();
            for w in &words {
                let m = tau(&s, w).unwrap();
                let (first, outer) = (w.start(&s).unwrap(), w.end(&s).unwrap());
                assert_eq!(m.patch.len(), s.supertile(outer, n).len());
                assert_eq!(m.marked_tile(), &Tile::new(first, -s.tileset().proto(first).puncture.clone()));
                assert!(seen.insert((outer, m.clone())), "{name}: {} collides", w.format(&s));
                // Equal bare patches only come from outer prototiles with equal rules.
                if let Some(other) = bare.insert(m, w) {
                    let o = other.end(&s).unwrap();
                    assert_eq!(s.rules()[o], s.rules()[outer], "{name}: {} and {}", w.format(&s), other.format(&s));
                    assert_eq!(&w.0[..n - 1], &other.0[..n - 1]);
                }
            }
        }
        eprintln!("{name}: {:?}", started.elapsed());
    }
}

#[test]
fn tau_plus_extends_tau() {
    for name in ["fibonacci", "halfhex"] {
        let s = sys(name);
        for w in enumerate_words(&s, 2, None).unwrap() {
            let inner = tau(&s, &w).unwrap();
            let outer = tau_plus(&s, &w).unwrap();
            assert!(outer.patch.contains_patch(&inner.patch));
            assert_eq!(outer.marked_tile(), inner.marked_tile());
        }
    }
    let s = sys("fibonacci-uncollared");
    let w = enumerate_words(&s, 2, None).unwrap().remove(0);
    assert!(tau_plus(&s, &w).is_err());
}

#[test]
fn left_words_read_inwards() {
    let s = sys("fibonacci");
    let l = left(&s, "...[(d,b)(b,d)](d,c)");
    assert_eq!(l.outer_proto(&s), id(&s, "c"));
    let got: Vec<usize> = l.inward(4);
    assert_eq!(got, word(&s, "(d,c)(b,d)(d,b)(b,d)"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// τ(σw) sits inside τ(w) once both are anchored at the same tile.
    #[test]
    fn shifted_word_is_a_coarser_marking(name in prop::sample::select(vec!["fibonacci", "abb", "halfhex"]), n in 2usize..5, pick in any::<prop::sample::Index>()) {
        let s = sys(name);
        let words = enumerate_words(&s, n, None).unwrap();
        let w = &words[pick.index(words.len())];
        let fine = tau(&s, w).unwrap();
        let coarse = tau(&s, &w.shift()).unwrap();
        let inflated = s.substitute_patch(&coarse.patch).unwrap();
        // φ(τ(σw)) and τ(w) are the same supertile up to translation.
        let shift = &fine.patch.tiles()[0].offset - &inflated.tiles()[0].offset;
        prop_assert_eq!(inflated.translate(&shift), fine.patch);
    }
}
