//! The self-similar action `g · x w = y (h · w)` of the tiling semigroup on
//! right addresses.
//!
//! For an element `g = [b, P, a]` and a prefix `s` of the address of the
//! marked tile, the engine enumerates every legal neighbourhood the parent
//! of the marked tile can have given `s`. The prefix decides the step when
//! membership of `P`, the emitted letter and the restriction agree across all
//! of them. Determining prefixes therefore have variable length.

mod nucleus;
mod rules;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use crate::geometry::{adjacency_with, bfs_distances, Convention, Patch, Point, Tile};
use crate::paths::{check_chain, PathError};
use crate::semigroup::Pointed;
use crate::substitution::{Neighborhood, SubstitutionError, SubstitutionSystem};

pub use nucleus::{separation_sq, ContractionReport, SemiNucleus};
pub use rules::{compare_rules, Golden, GoldenRule, RuleDiff, RuleEntry, RuleTable};

/// Longest determining prefix searched before giving up.
pub const MAX_READ_AHEAD: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SelfSimError {
    #[error("no determining prefix of length ≤ {0}")]
    ReadAheadCap(usize),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Substitution(#[from] SubstitutionError),
}

/// One consumed letter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionStep {
    pub consumed: usize,
    pub emitted: usize,
    pub restriction: Pointed,
    /// Length of the prefix that decided this step.
    pub read: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    Applied(ActionStep),
    NeedMoreInput,
    OutsideDomain,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ActOutcome {
    /// The residual is a single-tile idempotent; the unread input was copied.
    Evaluated { emitted: Vec<usize>, residual: Pointed },
    /// Input ran out before the residual became trivial.
    NeedMoreInput { emitted: Vec<usize>, residual: Pointed, pending: Vec<usize> },
    OutsideDomain { emitted: Vec<usize>, residual: Pointed, at: usize },
}

/// Minimal determining prefixes of one element. `None` marks a prefix whose
/// cylinder misses the domain.
#[derive(Clone, Debug)]
pub struct RuleTree {
    pub element: Pointed,
    pub radius: usize,
    pub leaves: BTreeMap<Vec<usize>, Option<(usize, Pointed)>>,
}

impl RuleTree {
    pub fn depth(&self) -> usize {
        self.leaves.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn lookup(&self, s: &[usize]) -> Step {
        for n in 1..=s.len().min(self.depth()) {
            if let Some(leaf) = self.leaves.get(&s[..n]) {
                return match leaf {
                    Some((y, h)) => Step::Applied(ActionStep { consumed: s[0], emitted: *y, restriction: h.clone(), read: n }),
                    None => Step::OutsideDomain,
                };
            }
        }
        if self.leaves.keys().any(|k| k.starts_with(s)) {
            Step::NeedMoreInput
        } else {
            Step::OutsideDomain
        }
    }
}

type Context = Arc<Vec<(Neighborhood, Neighborhood)>>;

enum Decision {
    Open,
    Closed(Option<(usize, Pointed)>),
}

pub struct SelfSimilarity {
    sys: Arc<SubstitutionSystem>,
    /// (radius, prefix) ↦ pairs (parent neighbourhood, marked-tile neighbourhood).
    contexts: Mutex<HashMap<(usize, Vec<usize>), Context>>,
    trees: Mutex<HashMap<Pointed, Arc<RuleTree>>>,
}

impl SelfSimilarity {
    pub fn new(sys: Arc<SubstitutionSystem>) -> Self {
        SelfSimilarity { sys, contexts: Mutex::default(), trees: Mutex::default() }
    }

    pub fn system(&self) -> &Arc<SubstitutionSystem> {
        &self.sys
    }

    fn context(&self, radius: usize, word: &[usize]) -> Result<Context, SelfSimError> {
        let key = (radius, word.to_vec());
        if let Some(hit) = self.contexts.lock().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let edge = self.sys.edge(word[0]);
        let parents: Vec<Neighborhood> = if word.len() == 1 {
            self.sys.atlas(radius)?.by_proto[edge.s()].clone()
        } else {
            let up = self.context(radius, &word[1..])?;
            let set: BTreeSet<&Neighborhood> = up.iter().map(|(_, n)| n).collect();
            set.into_iter().cloned().collect()
        };
        let pairs: Vec<_> = parents
            .into_iter()
            .map(|k| {
                let n = self.sys.child_neighborhood(&k, edge.position, radius);
                (k, n)
            })
            .collect();
        let pairs = Arc::new(pairs);
        self.contexts.lock().unwrap().insert(key, pairs.clone());
        Ok(pairs)
    }

    fn decide(&self, g: &Pointed, radius: usize, word: &[usize]) -> Result<Decision, SelfSimError> {
        let sys = &*self.sys;
        let shift = &sys.edge(word[0]).offset;
        let out = g.out_tile().translate(shift);
        let mut seen: Option<Option<(usize, Pointed)>> = None;
        for (k, n0) in self.context(radius, word)?.iter() {
            let d = if n0.patch.contains_patch(g.patch()) {
                let (i, pos) = k
                    .patch
                    .tiles()
                    .iter()
                    .enumerate()
                    .find_map(|(i, u)| sys.children(u).position(|c| c == out).map(|p| (i, p)))
                    .expect("the out-tile's parent lies in the neighbourhood");
                let y = sys.edge_at(k.patch.tiles()[i].proto, pos).expect("edge exists");
                Some((y, canonical_in(sys, &k.patch, k.center, i)))
            } else {
                None
            };
            match &seen {
                None => seen = Some(d),
                Some(prev) if *prev == d => {}
                Some(_) => return Ok(Decision::Open),
            }
        }
        Ok(Decision::Closed(seen.unwrap_or(None)))
    }

    /// Minimal determining prefixes for `g`, memoised.
    pub fn rule_tree(&self, g: &Pointed) -> Result<Arc<RuleTree>, SelfSimError> {
        if let Some(hit) = self.trees.lock().unwrap().get(g) {
            return Ok(hit.clone());
        }
        let radius = g.eccentricity(&self.sys).max(1);
        let mut leaves = BTreeMap::new();
        let mut frontier: Vec<Vec<usize>> = self.sys.edges_into(g.in_tile().proto).iter().map(|&e| vec![e]).collect();
        while let Some(word) = frontier.pop() {
            match self.decide(g, radius, &word)? {
                Decision::Closed(d) => {
                    leaves.insert(word, d);
                }
                Decision::Open if word.len() >= MAX_READ_AHEAD => return Err(SelfSimError::ReadAheadCap(MAX_READ_AHEAD)),
                Decision::Open => {
                    let top = self.sys.edge(*word.last().unwrap()).s();
                    for &e in self.sys.edges_into(top) {
                        let mut w = word.clone();
                        w.push(e);
                        frontier.push(w);
                    }
                }
            }
        }
        let tree = Arc::new(RuleTree { element: g.clone(), radius, leaves });
        self.trees.lock().unwrap().insert(g.clone(), tree.clone());
        Ok(tree)
    }

    /// N(g): the longest determining prefix.
    pub fn read_ahead(&self, g: &Pointed) -> Result<usize, SelfSimError> {
        Ok(self.rule_tree(g)?.depth())
    }

    pub fn act_step(&self, g: &Pointed, s: &[usize]) -> Result<Step, SelfSimError> {
        check_chain(&self.sys, s)?;
        match s.first() {
            None => Ok(Step::NeedMoreInput),
            Some(&e) if self.sys.edge(e).r() != g.in_tile().proto => Ok(Step::OutsideDomain),
            Some(_) => Ok(self.rule_tree(g)?.lookup(s)),
        }
    }

    /// Run `g` along `w` one letter at a time.
    pub fn act(&self, g: &Pointed, w: &[usize]) -> Result<ActOutcome, SelfSimError> {
        check_chain(&self.sys, w)?;
        let mut emitted = Vec::new();
        let mut g = g.clone();
        let mut i = 0;
        loop {
            if g.is_single_tile() {
                if let Some(&e) = w.get(i) {
                    if self.sys.edge(e).r() != g.in_tile().proto {
                        return Ok(ActOutcome::OutsideDomain { emitted, residual: g, at: i });
                    }
                }
                emitted.extend_from_slice(&w[i..]);
                return Ok(ActOutcome::Evaluated { emitted, residual: g });
            }
            match self.act_step(&g, &w[i..])? {
                Step::Applied(step) => {
                    emitted.push(step.emitted);
                    g = step.restriction;
                    i += 1;
                }
                Step::NeedMoreInput => return Ok(ActOutcome::NeedMoreInput { emitted, residual: g, pending: w[i..].to_vec() }),
                Step::OutsideDomain => return Ok(ActOutcome::OutsideDomain { emitted, residual: g, at: i }),
            }
        }
    }
}

/// Lexicographically least shortest chain from `a` to `b` through `allowed`.
fn chain(sys: &SubstitutionSystem, tiles: &[Tile], a: usize, b: usize, convention: Convention) -> Option<Vec<usize>> {
    let adj = adjacency_with(sys.tileset(), tiles, convention);
    let dist = bfs_distances(&adj, b);
    let mut cur = a;
    let mut out = vec![a];
    let mut d = dist[a]?;
    while d > 0 {
        cur = adj[cur].iter().copied().filter(|&v| dist[v] == Some(d - 1)).min_by(|&x, &y| tiles[x].cmp(&tiles[y]))?;
        out.push(cur);
        d -= 1;
    }
    Some(out)
}

/// A common point of two touching tiles, least in (re, im) order.
fn common_point(sys: &SubstitutionSystem, a: &Tile, b: &Tile) -> Option<Point> {
    let ts = sys.tileset();
    let (sa, sb) = (ts.support(a), ts.support(b));
    let mut pts: Vec<Point> = ts.vertices(a).into_iter().filter(|v| sb.contains(v)).collect();
    pts.extend(ts.vertices(b).into_iter().filter(|v| sa.contains(v)));
    pts.into_iter().min_by(|x, y| x.lex_cmp(y))
}

/// The minimal connected pointed patch spanning tiles `a` and `b` of `patch`.
pub(crate) fn canonical_in(sys: &SubstitutionSystem, patch: &Patch, a: usize, b: usize) -> Pointed {
    let ts = sys.tileset();
    let conv = sys.convention();
    let tiles = patch.tiles();
    let (ta, tb) = (&tiles[a], &tiles[b]);
    let picked: Vec<Tile> = if a == b {
        vec![ta.clone()]
    } else if ts.meets(ta, tb, conv) {
        vec![ta.clone(), tb.clone()]
    } else {
        let via_star = common_point(sys, ta, tb).and_then(|x| {
            let star: Vec<usize> = (0..tiles.len()).filter(|&i| ts.support(&tiles[i]).contains(&x)).collect();
            let sub: Vec<Tile> = star.iter().map(|&i| tiles[i].clone()).collect();
            let (sa, sb) = (star.iter().position(|&i| i == a)?, star.iter().position(|&i| i == b)?);
            chain(sys, &sub, sa, sb, conv).map(|c| c.into_iter().map(|i| sub[i].clone()).collect::<Vec<_>>())
        });
        via_star
            .or_else(|| chain(sys, tiles, a, b, conv).map(|c| c.into_iter().map(|i| tiles[i].clone()).collect()))
            .or_else(|| chain(sys, tiles, a, b, Convention::Adjacent).map(|c| c.into_iter().map(|i| tiles[i].clone()).collect()))
            .expect("patch is connected")
    };
    let p = Patch::new(picked, conv);
    let (ia, ib) = (p.index_of(ta).unwrap(), p.index_of(tb).unwrap());
    Pointed::new(p, ia, ib)
}

/// The ⪯-maximal connected element above `g` with the same marked tiles.
pub fn canonicalize_restriction(sys: &SubstitutionSystem, g: &Pointed) -> Pointed {
    canonical_in(sys, g.patch(), g.in_index(), g.out_index())
}
