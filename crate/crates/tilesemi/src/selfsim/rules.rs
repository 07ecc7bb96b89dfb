//! Rule tables over the generators and comparison against hand-written lists.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{SelfSimError, SelfSimilarity};
use crate::paths::{format_letters, parse_letters, PathError};
use crate::semigroup::{format_element, generators, leq, parse_element, DoublyPointedPatch, LiteralError, Pointed};
use crate::substitution::SubstitutionSystem;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleEntry {
    pub element: Pointed,
    /// Determining prefix; its first letter is the one consumed.
    pub word: Vec<usize>,
    pub emitted: usize,
    /// Acts on the input after its first letter.
    pub restriction: Pointed,
}

#[derive(Clone, Debug, Default)]
pub struct RuleTable {
    pub entries: Vec<RuleEntry>,
}

/// Serialized rule. A missing restriction means the identity on s(emitted).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GoldenRule {
    pub element: String,
    pub word: String,
    pub emitted: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restriction: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Golden {
    pub system: String,
    /// When set, derived rules for listed elements must all appear in the list.
    #[serde(default)]
    pub complete: bool,
    pub rules: Vec<GoldenRule>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RuleDiff {
    /// Listed rules with no matching derived rule, with the reason.
    pub missing: Vec<(GoldenRule, String)>,
    /// Derived rules for listed elements that the list lacks.
    pub unexpected: Vec<GoldenRule>,
}

impl RuleDiff {
    pub fn is_empty(&self) -> bool {
        self.missing.is_empty() && self.unexpected.is_empty()
    }
}

impl SelfSimilarity {
    /// Every determining prefix in the domain of every generator.
    pub fn derive_rule_table(&self) -> Result<RuleTable, SelfSimError> {
        self.rule_table_for(&generators(self.system())?)
    }

    pub fn rule_table_for(&self, elements: &[Pointed]) -> Result<RuleTable, SelfSimError> {
        let mut entries = Vec::new();
        for g in elements {
            let tree = self.rule_tree(g)?;
            for (word, leaf) in &tree.leaves {
                if let Some((y, h)) = leaf {
                    entries.push(RuleEntry { element: g.clone(), word: word.clone(), emitted: *y, restriction: h.clone() });
                }
            }
        }
        Ok(RuleTable { entries })
    }
}

impl RuleEntry {
    pub fn to_golden(&self, sys: &SubstitutionSystem) -> GoldenRule {
        GoldenRule {
            element: format_element(sys, &self.element),
            word: format_letters(sys, &self.word),
            emitted: sys.edge_label(self.emitted),
            restriction: Some(format_element(sys, &self.restriction)),
        }
    }
}

impl RuleTable {
    pub fn to_golden(&self, sys: &SubstitutionSystem) -> Golden {
        let mut rules: Vec<GoldenRule> = self.entries.iter().map(|e| e.to_golden(sys)).collect();
        rules.sort();
        Golden { system: sys.name().to_string(), complete: false, rules }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum GoldenError {
    #[error("{rule}: {source}")]
    Element { rule: String, source: LiteralError },
    #[error("{rule}: {source}")]
    Word { rule: String, source: PathError },
}

struct Parsed {
    element: Pointed,
    word: Vec<usize>,
    emitted: usize,
    restriction: Pointed,
}

fn parse_rule(sys: &SubstitutionSystem, r: &GoldenRule) -> Result<Parsed, GoldenError> {
    let el = |s: &str| parse_element(sys, s).map_err(|source| GoldenError::Element { rule: r.element.clone(), source });
    let word = |s: &str| parse_letters(sys, s).map_err(|source| GoldenError::Word { rule: r.element.clone(), source });
    let element = el(&r.element)?;
    let w = word(&r.word)?;
    let emitted = match word(&r.emitted)?.as_slice() {
        [y] => *y,
        _ => return Err(GoldenError::Word { rule: r.element.clone(), source: PathError::Syntax { at: 0, reason: "one emitted letter".into() } }),
    };
    let restriction = match &r.restriction {
        Some(s) => el(s)?,
        None => Pointed::idempotent(sys, sys.edge(emitted).s()),
    };
    Ok(Parsed { element, word: w, emitted, restriction })
}

/// Match listed rules against a derived table: determining words must agree,
/// emitted letters must be equal and restrictions ⪯-comparable.
pub fn compare_rules(sys: &SubstitutionSystem, table: &RuleTable, golden: &Golden) -> Result<RuleDiff, GoldenError> {
    let mut derived: BTreeMap<(&Pointed, &[usize]), &RuleEntry> = BTreeMap::new();
    for e in &table.entries {
        derived.insert((&e.element, e.word.as_slice()), e);
    }
    let mut diff = RuleDiff::default();
    let mut listed: BTreeSet<(Pointed, Vec<usize>)> = BTreeSet::new();
    let mut elements: BTreeSet<Pointed> = BTreeSet::new();
    for r in &golden.rules {
        let p = parse_rule(sys, r)?;
        let found = derived.get(&(&p.element, p.word.as_slice()));
        let reason = match found {
            None => Some("no derived rule with this determining word".to_string()),
            Some(e) if e.emitted != p.emitted => Some(format!("derived emits {}", sys.edge_label(e.emitted))),
            Some(e) => {
                let (d, g) = (DoublyPointedPatch::from(e.restriction.clone()), DoublyPointedPatch::from(p.restriction.clone()));
                if leq(&d, &g) || leq(&g, &d) {
                    None
                } else {
                    Some(format!("derived restriction {}", format_element(sys, &e.restriction)))
                }
            }
        };
        if let Some(why) = reason {
            diff.missing.push((r.clone(), why));
        }
        elements.insert(p.element.clone());
        listed.insert((p.element, p.word));
    }
    if golden.complete {
        for e in &table.entries {
            if elements.contains(&e.element) && !listed.contains(&(e.element.clone(), e.word.clone())) {
                diff.unexpected.push(e.to_golden(sys));
            }
        }
    }
    Ok(diff)
}
