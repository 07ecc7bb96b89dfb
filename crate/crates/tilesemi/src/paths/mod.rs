//! Words in the supertile-extension graph and the marked patches they name.
//!
//! A right word `e₀e₁…` is read from the finest tile outwards: `s(eᵢ) =
//! r(eᵢ₊₁)`. A left word `⋯e₋₂e₋₁` is written coarse letter last and obeys the
//! same chaining rule when read left to right.

use serde::{Deserialize, Serialize};

use crate::arith::FieldElement;
use crate::geometry::{Patch, Point, Tile};
use crate::substitution::{SubstitutionError, SubstitutionSystem};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PathError {
    #[error("empty word")]
    Empty,
    #[error("cannot parse word at byte {at}: {reason}")]
    Syntax { at: usize, reason: String },
    #[error("no supertile extension {0}")]
    UnknownLetter(String),
    #[error("letter {0} is ambiguous; add a position such as (x@2,y)")]
    Ambiguous(String),
    #[error("letters {index} and {next} do not chain", next = index + 1)]
    Broken { index: usize },
    #[error("period does not close up into a cycle")]
    BadPeriod,
    #[error("word starts at {found}, expected {expected}")]
    WrongStart { expected: String, found: String },
    #[error(transparent)]
    Substitution(#[from] SubstitutionError),
}

/// Parse `(c,p)(c@2,p)…` into edge ids, in the order written.
pub fn parse_letters(sys: &SubstitutionSystem, text: &str) -> Result<Vec<usize>, PathError> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i].is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if bytes[i] != b'(' {
            return Err(PathError::Syntax { at: i, reason: "expected '('".into() });
        }
        let close = text[i..].find(')').ok_or(PathError::Syntax { at: i, reason: "unclosed '('".into() })? + i;
        out.push(parse_letter(sys, &text[i + 1..close])?);
        i = close + 1;
    }
    Ok(out)
}

fn parse_letter(sys: &SubstitutionSystem, body: &str) -> Result<usize, PathError> {
    let shown = format!("({body})");
    let (child, parent) = body.split_once(',').ok_or_else(|| PathError::UnknownLetter(shown.clone()))?;
    let parent = sys.tileset().id_of(parent.trim()).ok_or_else(|| PathError::UnknownLetter(shown.clone()))?;
    let (child, pos) = match child.trim().split_once('@') {
        Some((c, k)) => (c.trim(), Some(k.trim().parse::<usize>().map_err(|_| PathError::UnknownLetter(shown.clone()))?)),
        None => (child.trim(), None),
    };
    let child = sys.tileset().id_of(child).ok_or_else(|| PathError::UnknownLetter(shown.clone()))?;
    let matches: Vec<usize> = sys.edges_from_parent(parent).iter().copied().filter(|&e| sys.edge(e).child == child).collect();
    match pos {
        Some(k) => matches.into_iter().find(|&e| sys.edge(e).position + 1 == k).ok_or(PathError::UnknownLetter(shown)),
        None => match matches.as_slice() {
            [e] => Ok(*e),
            [] => Err(PathError::UnknownLetter(shown)),
            _ => Err(PathError::Ambiguous(shown)),
        },
    }
}

pub fn format_letters(sys: &SubstitutionSystem, letters: &[usize]) -> String {
    letters.iter().map(|&e| sys.edge_label(e)).collect()
}

/// Checks `s(eᵢ) = r(eᵢ₊₁)` along the sequence as written.
pub fn check_chain(sys: &SubstitutionSystem, letters: &[usize]) -> Result<(), PathError> {
    for (i, w) in letters.windows(2).enumerate() {
        if sys.edge(w[0]).s() != sys.edge(w[1]).r() {
            return Err(PathError::Broken { index: i });
        }
    }
    Ok(())
}

/// A finite prefix of a right-infinite address.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RightWord(pub Vec<usize>);

impl RightWord {
    pub fn new(sys: &SubstitutionSystem, letters: Vec<usize>) -> Result<Self, PathError> {
        check_chain(sys, &letters)?;
        Ok(RightWord(letters))
    }

    pub fn parse(sys: &SubstitutionSystem, text: &str) -> Result<Self, PathError> {
        RightWord::new(sys, parse_letters(sys, text)?)
    }

    pub fn format(&self, sys: &SubstitutionSystem) -> String {
        format_letters(sys, &self.0)
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The shift σ, dropping the finest letter.
    pub fn shift(&self) -> RightWord {
        RightWord(self.0.get(1..).unwrap_or_default().to_vec())
    }

    /// Prototile of the marked tile, r(e₀).
    pub fn start(&self, sys: &SubstitutionSystem) -> Option<usize> {
        self.0.first().map(|&e| sys.edge(e).r())
    }

    /// Prototile of the outermost supertile, s(e_{n−1}).
    pub fn end(&self, sys: &SubstitutionSystem) -> Option<usize> {
        self.0.last().map(|&e| sys.edge(e).s())
    }
}

/// A left-infinite address `⋯[period][period] tail`, or a finite left word
/// when the period is empty.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LeftWord {
    pub period: Vec<usize>,
    /// Letters between the periodic part and the coarse end; the last one is e₋₁.
    pub tail: Vec<usize>,
}

impl LeftWord {
    pub fn new(sys: &SubstitutionSystem, period: Vec<usize>, tail: Vec<usize>) -> Result<Self, PathError> {
        check_chain(sys, &period)?;
        check_chain(sys, &tail)?;
        if let (Some(&last), Some(&first)) = (period.last(), period.first()) {
            if sys.edge(last).s() != sys.edge(first).r() {
                return Err(PathError::BadPeriod);
            }
            if let Some(&t) = tail.first() {
                if sys.edge(last).s() != sys.edge(t).r() {
                    return Err(PathError::Broken { index: period.len() - 1 });
                }
            }
        }
        if period.is_empty() && tail.is_empty() {
            return Err(PathError::Empty);
        }
        Ok(LeftWord { period, tail })
    }

    /// `...[(x,y)(y,x)](x,z)` or a plain finite word.
    pub fn parse(sys: &SubstitutionSystem, text: &str) -> Result<Self, PathError> {
        let t = text.trim();
        match t.strip_prefix("...") {
            Some(rest) => {
                let rest = rest.trim_start();
                let body = rest.strip_prefix('[').ok_or(PathError::Syntax { at: 3, reason: "expected '[' after '...'".into() })?;
                let close = body.find(']').ok_or(PathError::Syntax { at: 4, reason: "unclosed '['".into() })?;
                let period = parse_letters(sys, &body[..close])?;
                if period.is_empty() {
                    return Err(PathError::BadPeriod);
                }
                LeftWord::new(sys, period, parse_letters(sys, &body[close + 1..])?)
            }
            None => LeftWord::new(sys, Vec::new(), parse_letters(sys, t)?),
        }
    }

    pub fn format(&self, sys: &SubstitutionSystem) -> String {
        if self.period.is_empty() {
            format_letters(sys, &self.tail)
        } else {
            format!("...[{}]{}", format_letters(sys, &self.period), format_letters(sys, &self.tail))
        }
    }

    pub fn is_periodic(&self) -> bool {
        !self.period.is_empty()
    }

    /// e₋₁, the coarsest letter.
    pub fn outer(&self) -> usize {
        *self.tail.last().or(self.period.last()).expect("nonempty")
    }

    /// The prototile whose support holds the address, s(e₋₁).
    pub fn outer_proto(&self, sys: &SubstitutionSystem) -> usize {
        sys.edge(self.outer()).s()
    }

    /// e₋₁, e₋₂, … for the first `n` letters going inwards.
    pub fn inward(&self, n: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.tail.iter().rev().take(n).copied().collect();
        if !self.period.is_empty() {
            let mut cycle = self.period.iter().rev().cycle();
            while out.len() < n {
                out.push(*cycle.next().unwrap());
            }
        }
        out
    }
}

/// A patch with one distinguished tile whose puncture sits at the origin.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MarkedPatch {
    pub patch: Patch,
    pub marked: usize,
}

impl MarkedPatch {
    pub fn marked_tile(&self) -> &Tile {
        &self.patch.tiles()[self.marked]
    }
}

/// x₀ = Σ λⁱ o(eᵢ): the marked tile's offset with the outer supertile at the origin.
fn marked_offset(sys: &SubstitutionSystem, letters: &[usize]) -> Point {
    let mut x = sys.tileset().zero();
    for &e in letters.iter().rev() {
        x = &(sys.lambda() * &x) + &sys.edge(e).offset;
    }
    x
}

fn mark(sys: &SubstitutionSystem, w: &RightWord, patch: Patch) -> MarkedPatch {
    let start = w.start(sys).expect("nonempty");
    let shift = -(&marked_offset(sys, &w.0) + &sys.tileset().proto(start).puncture);
    let patch = patch.translate(&shift);
    let t0 = Tile::new(start, -sys.tileset().proto(start).puncture.clone());
    let marked = patch.index_of(&t0).expect("marked tile lies in its supertile");
    MarkedPatch { patch, marked }
}

/// τ(w): the supertile φⁿ(s(e_{n−1})) with t₀'s puncture at the origin.
pub fn tau(sys: &SubstitutionSystem, w: &RightWord) -> Result<MarkedPatch, PathError> {
    let outer = w.end(sys).ok_or(PathError::Empty)?;
    check_chain(sys, &w.0)?;
    Ok(mark(sys, w, sys.supertile(outer, w.len())))
}

/// τ(w) together with the tiles forced around the outer supertile.
pub fn tau_plus(sys: &SubstitutionSystem, w: &RightWord) -> Result<MarkedPatch, PathError> {
    let outer = w.end(sys).ok_or(PathError::Empty)?;
    check_chain(sys, &w.0)?;
    Ok(mark(sys, w, sys.forced_corona(outer, w.len())?))
}

/// All legal right words of length `n`, optionally with r(e₀) fixed, in
/// lexicographic order of edge ids.
pub fn enumerate_words(sys: &SubstitutionSystem, n: usize, start: Option<usize>) -> Result<Vec<RightWord>, PathError> {
    if n == 0 {
        return Err(PathError::Empty);
    }
    let mut level: Vec<Vec<usize>> = match start {
        Some(p) => sys.edges_into(p).iter().map(|&e| vec![e]).collect(),
        None => (0..sys.edges().len()).map(|e| vec![e]).collect(),
    };
    level.sort();
    for _ in 1..n {
        let mut next = Vec::new();
        for w in &level {
            let top = sys.edge(*w.last().unwrap()).s();
            let mut ext: Vec<usize> = sys.edges_into(top).to_vec();
            ext.sort();
            for e in ext {
                let mut v = w.clone();
                v.push(e);
                next.push(v);
            }
        }
        level = next;
    }
    Ok(level.into_iter().map(RightWord).collect())
}

/// Σ_{n≥1} λ⁻ⁿ o(e₋ₙ) over the given inward letters.
pub(crate) fn inward_sum(sys: &SubstitutionSystem, inward: &[usize]) -> Point {
    let inv = sys.lambda().inv().expect("λ ≠ 0");
    let mut x = sys.tileset().zero();
    for &e in inward.iter().rev() {
        x = &(&x + &sys.edge(e).offset) * &inv;
    }
    x
}

/// The power λᵏ as a field element.
pub(crate) fn lambda_pow(sys: &SubstitutionSystem, k: usize) -> FieldElement {
    sys.lambda().pow(k as u32)
}
