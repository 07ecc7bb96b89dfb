//! Element literals.
//!
//! * `[b,P_xyz,a]`: a 1D patch read left to right, one character per label;
//!   `P(x0,x1)` for longer labels and `b@2` to pick the second tile.
//! * `[q,X,p]`: the two-tile patch where q lies across edge `X` of p.
//! * anything else: the JSON form of [`super::ElementJson`].

use crate::geometry::{Patch, Tile};
use crate::substitution::{SubstitutionError, SubstitutionSystem};

use super::{ElementJson, Pointed};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LiteralError {
    #[error("cannot parse element: {0}")]
    Syntax(String),
    #[error("unknown prototile {0:?}")]
    UnknownLabel(String),
    #[error("{0} names more than one element")]
    Ambiguous(String),
    #[error("{0} names no legal element")]
    NotFound(String),
    #[error(transparent)]
    Substitution(#[from] SubstitutionError),
}

fn split_top(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(s[start..].trim());
    parts
}

/// `label` or `label@k`.
fn marker(s: &str) -> (&str, Option<usize>) {
    match s.split_once('@') {
        Some((l, k)) => (l.trim(), k.trim().parse().ok()),
        None => (s.trim(), None),
    }
}

fn patch_labels(mid: &str) -> Option<Vec<String>> {
    if let Some(rest) = mid.strip_prefix("P_") {
        return Some(rest.chars().map(String::from).collect());
    }
    let inner = mid.strip_prefix("P(")?.strip_suffix(')')?;
    Some(inner.split(',').map(|s| s.trim().to_string()).collect())
}

fn resolve(sys: &SubstitutionSystem, text: &str, labels: &[String], mark: &str) -> Result<usize, LiteralError> {
    let (label, k) = marker(mark);
    sys.tileset().id_of(label).ok_or_else(|| LiteralError::UnknownLabel(label.to_string()))?;
    match k {
        Some(k) if k >= 1 && k <= labels.len() && labels[k - 1] == label => Ok(k - 1),
        Some(_) => Err(LiteralError::NotFound(text.to_string())),
        None => {
            let hits: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == label).collect();
            match hits.as_slice() {
                [i] => Ok(*i),
                [] => Err(LiteralError::NotFound(text.to_string())),
                _ => Err(LiteralError::Ambiguous(text.to_string())),
            }
        }
    }
}

fn from_sequence(sys: &SubstitutionSystem, text: &str, labels: &[String], out: &str, inn: &str) -> Result<Pointed, LiteralError> {
    let ts = sys.tileset();
    let mut ids = Vec::new();
    for l in labels {
        ids.push(ts.id_of(l).ok_or_else(|| LiteralError::UnknownLabel(l.clone()))?);
    }
    if ids.is_empty() {
        return Err(LiteralError::Syntax(text.to_string()));
    }
    if ids.len() > 1 && ts.dimension() != 1 {
        return Err(LiteralError::Syntax(format!("{text}: multi-tile P_ literals are one-dimensional only")));
    }
    let mut tiles = Vec::new();
    let mut cursor = ts.zero();
    for &p in &ids {
        let v = ts.proto(p).shape.vertices();
        let offset = &cursor - &v[0];
        cursor = &offset + &v[v.len() - 1];
        tiles.push(Tile::new(p, offset));
    }
    let a = resolve(sys, text, labels, inn)?;
    let b = resolve(sys, text, labels, out)?;
    let patch = Patch::new(tiles.clone(), sys.convention());
    let g = Pointed::new(patch.clone(), patch.index_of(&tiles[a]).unwrap(), patch.index_of(&tiles[b]).unwrap());
    if !g.is_legal(sys)? {
        return Err(LiteralError::NotFound(text.to_string()));
    }
    Ok(g)
}

fn across_edge(sys: &SubstitutionSystem, text: &str, out: &str, edge: &str, inn: &str) -> Result<Pointed, LiteralError> {
    let ts = sys.tileset();
    let q = ts.id_of(out).ok_or_else(|| LiteralError::UnknownLabel(out.to_string()))?;
    let p = ts.id_of(inn).ok_or_else(|| LiteralError::UnknownLabel(inn.to_string()))?;
    let mut found: Vec<Pointed> = Vec::new();
    for pair in sys.legal_pair_patches(crate::substitution::DEFAULT_PAIR_CAP)?.iter() {
        for (i, j) in [(0, 1), (1, 0)] {
            let (ti, tj) = (&pair.tiles()[i], &pair.tiles()[j]);
            if ti.proto == p && tj.proto == q && ts.shared_edge_labels(ti, tj).iter().any(|x| x == edge) {
                found.push(Pointed::new(pair.clone(), i, j));
            }
        }
    }
    found.sort();
    found.dedup();
    match found.len() {
        1 => Ok(found.pop().unwrap()),
        0 => Err(LiteralError::NotFound(text.to_string())),
        _ => Err(LiteralError::Ambiguous(text.to_string())),
    }
}

pub fn parse_element(sys: &SubstitutionSystem, text: &str) -> Result<Pointed, LiteralError> {
    let t = text.trim();
    if t.starts_with('{') {
        let j: ElementJson = serde_json::from_str(t).map_err(|e| LiteralError::Syntax(e.to_string()))?;
        return j.to_pointed(sys);
    }
    let inner = t
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| LiteralError::Syntax(format!("{t}: expected [out, patch, in]")))?;
    let parts = split_top(inner);
    let [out, mid, inn] = parts.as_slice() else {
        return Err(LiteralError::Syntax(format!("{t}: expected three fields")));
    };
    match patch_labels(mid) {
        Some(labels) => from_sequence(sys, t, &labels, out, inn),
        None => across_edge(sys, t, out, mid, inn),
    }
}

fn mark_label(labels: &[&str], i: usize) -> String {
    if labels.iter().filter(|&&l| l == labels[i]).count() > 1 {
        format!("{}@{}", labels[i], i + 1)
    } else {
        labels[i].to_string()
    }
}

/// Shortest literal that parses back to `g`.
pub fn format_element(sys: &SubstitutionSystem, g: &Pointed) -> String {
    let ts = sys.tileset();
    let tiles = g.patch().tiles();
    if ts.dimension() == 1 || tiles.len() == 1 {
        let mut order: Vec<usize> = (0..tiles.len()).collect();
        order.sort_by(|&i, &j| tiles[i].offset.real_cmp(&tiles[j].offset));
        let labels: Vec<&str> = order.iter().map(|&i| sys.label(tiles[i].proto)).collect();
        let mid = if labels.iter().all(|l| l.chars().count() == 1) {
            format!("P_{}", labels.concat())
        } else {
            format!("P({})", labels.join(","))
        };
        let pos = |k: usize| order.iter().position(|&i| i == k).unwrap();
        let s = format!("[{},{},{}]", mark_label(&labels, pos(g.out_index())), mid, mark_label(&labels, pos(g.in_index())));
        if parse_element(sys, &s).ok().as_ref() == Some(g) {
            return s;
        }
    } else if tiles.len() == 2 && !g.is_idempotent() {
        for x in ts.shared_edge_labels(g.in_tile(), g.out_tile()) {
            let s = format!("[{},{},{}]", sys.label(g.out_tile().proto), x, sys.label(g.in_tile().proto));
            if parse_element(sys, &s).ok().as_ref() == Some(g) {
                return s;
            }
        }
    }
    serde_json::to_string(&ElementJson::from_pointed(sys, g)).expect("serializable")
}
