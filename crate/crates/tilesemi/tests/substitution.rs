mod common;

use std::collections::BTreeSet;

use common::{id, sys};
use proptest::prelude::*;
use tilesemi::arith::FieldElement;
use tilesemi::geometry::{Convention, Patch, Tile};
use tilesemi::substitution::config::{builtin_config, builtin_names, SystemConfig};
use tilesemi::substitution::{SubstitutionSystem, DEFAULT_PAIR_CAP};

fn labels(s: &SubstitutionSystem) -> Vec<String> {
    (0..s.edges().len()).map(|e| s.edge_label(e)).collect()
}

fn names(s: &SubstitutionSystem, p: &Patch) -> String {
    let mut tiles = p.tiles().to_vec();
    tiles.sort_by(|x, y| x.offset.real_cmp(&y.offset));
    tiles.iter().map(|t| s.label(t.proto)).collect()
}

#[test]
fn fibonacci_graph() {
    let s = sys("fibonacci");
    assert_eq!(s.num_prototiles(), 4);
    let got: BTreeSet<String> = labels(&s).into_iter().collect();
    let want: BTreeSet<String> = ["(c,a)", "(d,a)", "(a,b)", "(d,b)", "(a,c)", "(d,c)", "(b,d)"].iter().map(|x| x.to_string()).collect();
    assert_eq!(got, want);
    for e in s.edges() {
        assert!(s.edges_from_parent(e.s()).len() + s.edges_into(e.r()).len() >= 2);
    }
}

#[test]
fn abb_graph_keeps_repeated_children_apart() {
    let s = sys("abb");
    let l = labels(&s);
    assert_eq!(l.len(), 5);
    assert!(l.contains(&"(b@2,a)".to_string()) && l.contains(&"(b@3,a)".to_string()));
}

#[test]
fn halfhex_graph() {
    let s = sys("halfhex");
    assert_eq!(s.num_prototiles(), 6);
    let got: BTreeSet<String> = labels(&s).into_iter().collect();
    let mut want = BTreeSet::new();
    for i in 0..6 {
        for k in [0, 2, 3, 4] {
            want.insert(format!("(p{},p{i})", (i + k) % 6));
        }
    }
    assert_eq!(got, want);
}

#[test]
fn penrose_graph() {
    let s = sys("penrose");
    assert_eq!((s.num_prototiles(), s.edges().len()), (40, 100));
}

#[test]
fn graph_has_one_edge_per_child() {
    for name in builtin_names() {
        let s = sys(name);
        assert_eq!(s.edges().len(), s.rules().iter().map(Vec::len).sum::<usize>(), "{name}");
        for (e, edge) in s.edges().iter().enumerate() {
            assert_eq!(s.edge_at(edge.parent, edge.position), Some(e));
            assert_eq!(s.rules()[edge.parent][edge.position].proto, edge.child);
        }
    }
}

#[test]
fn fibonacci_supertiles() {
    let s = sys("fibonacci");
    let a = id(&s, "a");
    assert_eq!(names(&s, &s.supertile(a, 1)), "cd");
    assert_eq!(names(&s, &s.supertile(a, 2)), "adb");
    assert_eq!(names(&s, &s.supertile(a, 5)).len(), 13);
}

#[test]
fn builtins_are_stone_inflations() {
    for name in builtin_names() {
        let s = sys(name);
        assert!(s.check_stone_inflation().is_empty(), "{name}");
        assert!(s.check_primitive(12).0, "{name}");
        let level = if s.tileset().dimension() == 1 { 6 } else { 2 };
        for p in 0..s.num_prototiles() {
            let st = s.supertile(p, level);
            st.validate(s.tileset()).unwrap();
            assert!(st.is_connected(s.tileset()));
        }
    }
}

#[test]
fn broken_inflation_is_reported() {
    let mut cfg = builtin_config("fibonacci").unwrap();
    cfg.rules[0].children[1].offset = vec!["1".into()];
    let s = cfg.build().unwrap();
    assert_eq!(s.check_stone_inflation().len(), 1);
    assert!(!s.validate().passed);
}

const SPLIT: &str = r#"{
  "name": "split", "conductor": 4, "lambda": ["2"],
  "prototiles": [{"label": "a", "vertices": [["0"], ["1"]]}, {"label": "b", "vertices": [["0"], ["1"]]}],
  "rules": [
    {"parent": "a", "children": [{"tile": "a", "offset": ["0"]}, {"tile": "a", "offset": ["1"]}]},
    {"parent": "b", "children": [{"tile": "b", "offset": ["0"]}, {"tile": "b", "offset": ["1"]}]}
  ]
}"#;

#[test]
fn reducible_substitution_is_not_primitive() {
    let s = SystemConfig::from_json(SPLIT).unwrap().build().unwrap();
    assert!(s.check_stone_inflation().is_empty());
    assert_eq!(s.check_primitive(12), (false, None));
    let fib = sys("fibonacci");
    assert_eq!(fib.check_primitive(12), (true, Some(5)));
}

#[test]
fn fibonacci_legal_pairs() {
    let s = sys("fibonacci");
    let pairs = s.legal_pair_patches(DEFAULT_PAIR_CAP).unwrap();
    let got: BTreeSet<String> = pairs.iter().map(|p| names(&s, p)).collect();
    let want: BTreeSet<String> = ["ad", "ba", "cd", "db", "dc"].iter().map(|x| x.to_string()).collect();
    assert_eq!(got, want);
}

#[test]
fn legal_pairs_cover_every_pair_in_small_supertiles() {
    for name in ["fibonacci", "abb", "halfhex"] {
        let s = sys(name);
        let ts = s.tileset();
        let known: BTreeSet<Patch> = s.legal_pair_patches(DEFAULT_PAIR_CAP).unwrap().iter().map(|p| p.canonical(ts).0).collect();
        let top = if ts.dimension() == 1 { 6 } else { 3 };
        for p in 0..s.num_prototiles() {
            for n in 0..=top {
                let tiles = s.supertile(p, n).tiles().to_vec();
                for i in 0..tiles.len() {
                    for j in i + 1..tiles.len() {
                        if ts.meets(&tiles[i], &tiles[j], s.convention()) {
                            let pair = Patch::new(vec![tiles[i].clone(), tiles[j].clone()], s.convention()).canonical(ts).0;
                            assert!(known.contains(&pair), "{name}: pair missing at level {n}");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn codim1_pairs_are_a_subset() {
    let s = sys("halfhex");
    let ts = s.tileset();
    let key = |p: &Patch| p.canonical(ts).0.tiles().to_vec();
    let adj: BTreeSet<Vec<Tile>> = s.legal_pairs_with(Convention::Adjacent, DEFAULT_PAIR_CAP).unwrap().iter().map(key).collect();
    let face = s.legal_pairs_with(Convention::Codim1Face, DEFAULT_PAIR_CAP).unwrap();
    assert!(face.len() < adj.len());
    assert!(face.iter().all(|p| adj.contains(&key(p))));
}

#[test]
fn border_forcing() {
    assert_eq!(sys("fibonacci").border_forcing_index(8).unwrap(), Some(1));
    assert_eq!(sys("abb").border_forcing_index(8).unwrap(), Some(1));
    assert_eq!(sys("halfhex").border_forcing_index(8).unwrap(), Some(1));
    assert_eq!(sys("fibonacci-uncollared").border_forcing_index(8).unwrap(), None);
    assert!(sys("fibonacci-uncollared").forced_corona(0, 3).is_err());
}

#[test]
fn forced_corona_surrounds_the_supertile() {
    for name in ["fibonacci", "halfhex"] {
        let s = sys(name);
        for p in 0..s.num_prototiles() {
            for k in 1..=2 {
                let st = s.supertile(p, k);
                let corona = s.forced_corona(p, k).unwrap();
                assert!(corona.contains_patch(&st));
                assert!(corona.len() > st.len());
                corona.validate(s.tileset()).unwrap();
            }
        }
    }
}

#[test]
fn graph_exports() {
    let s = sys("fibonacci");
    let dot = s.graph_dot();
    assert_eq!(dot.matches("->").count(), 7);
    let json = s.graph_json();
    assert_eq!((json.vertices.len(), json.edges.len()), (4, 7));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn substitution_commutes_with_translation(name in prop::sample::select(vec!["fibonacci", "halfhex", "penrose"]), p in 0usize..40, k in -20i64..20, j in 0i64..10) {
        let s = sys(name);
        let ts = s.tileset();
        let p = p % s.num_prototiles();
        let v = &FieldElement::zeta(ts.field(), j) * &FieldElement::from_int(ts.field(), k);
        let moved = s.substitute_tile(&Tile::new(p, v.clone())).unwrap();
        let lv = s.lambda() * &v;
        let base: Vec<Tile> = s.substitute_tile(&Tile::new(p, ts.zero())).unwrap().into_iter().map(|t| Tile::new(t.proto, &t.offset + &lv)).collect();
        prop_assert_eq!(moved, base);
    }
}
