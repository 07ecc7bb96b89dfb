#![allow(dead_code)]

use std::sync::Arc;

use tilesemi::paths::{parse_letters, LeftWord};
use tilesemi::semigroup::{parse_element, Pointed};
use tilesemi::selfsim::SelfSimilarity;
use tilesemi::substitution::config::builtin;
use tilesemi::substitution::SubstitutionSystem;

pub fn sys(name: &str) -> Arc<SubstitutionSystem> {
    builtin(name).unwrap()
}

pub fn engine(name: &str) -> SelfSimilarity {
    SelfSimilarity::new(sys(name))
}

pub fn el(sys: &SubstitutionSystem, s: &str) -> Pointed {
    parse_element(sys, s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

pub fn word(sys: &SubstitutionSystem, s: &str) -> Vec<usize> {
    parse_letters(sys, s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

pub fn left(sys: &SubstitutionSystem, s: &str) -> LeftWord {
    LeftWord::parse(sys, s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

pub fn id(sys: &SubstitutionSystem, label: &str) -> usize {
    sys.tileset().id_of(label).unwrap()
}
