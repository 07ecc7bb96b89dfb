//! JSON configuration files for substitution systems.
//!
//! Field elements are written as coefficient arrays of a polynomial in ζ,
//! where ζ = exp(2πi/conductor); arrays may be longer than the field degree.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use super::{Child, SubstitutionError, SubstitutionSystem};
use crate::arith::{field_make, FieldElement, FieldSpec, Rational};
use crate::geometry::{Convention, Point, Prototile, Shape, Tileset};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad number {0:?}")]
    Number(String),
    #[error("unknown label {0:?}")]
    Label(String),
    #[error("prototile {0} needs 2 (interval) or at least 3 (polygon) vertices")]
    Vertices(String),
    #[error("no rule for {0}")]
    MissingRule(String),
    #[error("cannot read {0}")]
    Io(String),
    #[error("unknown built-in system {0:?}")]
    UnknownBuiltin(String),
    #[error(transparent)]
    Geometry(#[from] crate::geometry::GeometryError),
    #[error(transparent)]
    Substitution(#[from] SubstitutionError),
}

pub type Coords = Vec<String>;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SystemConfig {
    pub name: String,
    pub conductor: u32,
    #[serde(default = "default_convention")]
    pub convention: Convention,
    #[serde(default = "yes")]
    pub recognisable: bool,
    pub lambda: Coords,
    pub prototiles: Vec<ProtoConfig>,
    pub rules: Vec<RuleConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetry: Option<SymmetryConfig>,
}

fn default_convention() -> Convention {
    Convention::Adjacent
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProtoConfig {
    pub label: String,
    /// Interval endpoints, or polygon vertices counter-clockwise.
    pub vertices: Vec<Coords>,
    /// Defaults to the vertex average.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub puncture: Option<Coords>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub edges: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RuleConfig {
    pub parent: String,
    pub children: Vec<ChildConfig>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChildConfig {
    pub tile: String,
    pub offset: Coords,
}

/// Rigid motions used to compactify a file. Base prototile `x` expands to
/// `x0 … x{m−1}` (rotations by ζ^step) and, with reflection, `rx0 …`
/// (reflect z ↦ −z̄ first, then rotate).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SymmetryConfig {
    pub rotations: u32,
    #[serde(default = "one")]
    pub step: i64,
    #[serde(default)]
    pub reflection: bool,
    /// Edge relabelling under reflection, e.g. L ↔ R.
    #[serde(default)]
    pub edge_reflection: BTreeMap<String, String>,
}

fn one() -> i64 {
    1
}

pub fn parse_coords(k: &Arc<FieldSpec>, c: &[String]) -> Result<Point, ConfigError> {
    let coeffs: Vec<Rational> =
        c.iter().map(|s| s.trim().parse().map_err(|_| ConfigError::Number(s.clone()))).collect::<Result<_, _>>()?;
    Ok(FieldElement::from_poly(k, &coeffs))
}

pub fn format_coords(x: &Point) -> Coords {
    x.coeffs().iter().map(|r| r.to_string()).collect()
}

struct Motion {
    reflect: bool,
    rotate: FieldElement,
}

impl Motion {
    fn apply(&self, z: &Point) -> Point {
        let z = if self.reflect { -z.conj() } else { z.clone() };
        &self.rotate * &z
    }
}

struct Expander {
    bases: Vec<String>,
    m: i64,
    reflection: bool,
}

impl Expander {
    fn label(reflect: bool, base: &str, idx: i64) -> String {
        format!("{}{}{}", if reflect { "r" } else { "" }, base, idx)
    }

    fn parse(&self, label: &str) -> Result<(bool, usize, i64), ConfigError> {
        let mut order: Vec<usize> = (0..self.bases.len()).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(self.bases[i].len()));
        for reflect in [false, true] {
            if reflect && !self.reflection {
                continue;
            }
            let rest = if reflect { label.strip_prefix('r') } else { Some(label) };
            let Some(rest) = rest else { continue };
            for &b in &order {
                if let Some(digits) = rest.strip_prefix(self.bases[b].as_str()) {
                    if let Ok(i) = digits.parse::<i64>() {
                        if (0..self.m).contains(&i) {
                            return Ok((reflect, b, i));
                        }
                    }
                }
            }
        }
        Err(ConfigError::Label(label.into()))
    }
}

impl SystemConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// The same configuration with symmetry expanded.
    pub fn expanded(&self) -> Result<SystemConfig, ConfigError> {
        let Some(sym) = &self.symmetry else { return Ok(self.clone()) };
        let k = field_make(self.conductor);
        let m = sym.rotations as i64;
        let ex = Expander { bases: self.prototiles.iter().map(|p| p.label.clone()).collect(), m, reflection: sym.reflection };
        let rot = FieldElement::zeta(&k, sym.step);
        let mut prototiles = Vec::new();
        let mut rules = Vec::new();
        for reflect in [false, true] {
            if reflect && !sym.reflection {
                continue;
            }
            for base in &self.prototiles {
                let rule = self
                    .rules
                    .iter()
                    .find(|r| r.parent == base.label || r.parent == Expander::label(false, &base.label, 0))
                    .ok_or_else(|| ConfigError::MissingRule(base.label.clone()))?;
                for i in 0..m {
                    let motion = Motion { reflect, rotate: rot.pow(i as u32) };
                    let mut verts: Vec<Point> =
                        base.vertices.iter().map(|v| parse_coords(&k, v).map(|z| motion.apply(&z))).collect::<Result<_, _>>()?;
                    let mut edges = base.edges.clone();
                    if reflect && verts.len() == 2 {
                        verts.swap(0, 1);
                    }
                    if reflect && verts.len() >= 3 {
                        verts[1..].reverse();
                        let n = edges.len();
                        edges = (0..n)
                            .map(|j| {
                                let old = &base.edges[n - 1 - j];
                                sym.edge_reflection.get(old).cloned().unwrap_or_else(|| old.clone())
                            })
                            .collect();
                    }
                    let puncture = match &base.puncture {
                        Some(p) => Some(format_coords(&motion.apply(&parse_coords(&k, p)?))),
                        None => None,
                    };
                    let label = Expander::label(reflect, &base.label, i);
                    prototiles.push(ProtoConfig {
                        label: label.clone(),
                        vertices: verts.iter().map(format_coords).collect(),
                        puncture,
                        edges,
                    });
                    let mut children = Vec::new();
                    for c in &rule.children {
                        let (cr, cb, cj) = ex.parse(&c.tile)?;
                        let (cr, cj) = if reflect { (!cr, (-cj).rem_euclid(m)) } else { (cr, cj) };
                        let cj = (cj + i).rem_euclid(m);
                        let off = motion.apply(&parse_coords(&k, &c.offset)?);
                        children.push(ChildConfig { tile: Expander::label(cr, &ex.bases[cb], cj), offset: format_coords(&off) });
                    }
                    rules.push(RuleConfig { parent: label, children });
                }
            }
        }
        Ok(SystemConfig {
            name: self.name.clone(),
            conductor: self.conductor,
            convention: self.convention,
            recognisable: self.recognisable,
            lambda: self.lambda.clone(),
            prototiles,
            rules,
            symmetry: None,
        })
    }

    pub fn build(&self) -> Result<SubstitutionSystem, ConfigError> {
        let cfg = self.expanded()?;
        let k = field_make(cfg.conductor);
        let mut protos = Vec::new();
        for p in &cfg.prototiles {
            let verts: Vec<Point> = p.vertices.iter().map(|v| parse_coords(&k, v)).collect::<Result<_, _>>()?;
            let shape = match verts.len() {
                2 => Shape::Interval { lo: verts[0].clone(), hi: verts[1].clone() },
                n if n >= 3 => Shape::Polygon { vertices: verts.clone() },
                _ => return Err(ConfigError::Vertices(p.label.clone())),
            };
            let puncture = match &p.puncture {
                Some(c) => parse_coords(&k, c)?,
                None => {
                    let mut acc = FieldElement::zero(&k);
                    for v in &verts {
                        acc = &acc + v;
                    }
                    acc.scale(&Rational::new(1, verts.len() as i64))
                }
            };
            protos.push(Prototile::new(p.label.clone(), shape, puncture, p.edges.clone()));
        }
        let tileset = Tileset::new(k.clone(), protos)?;
        let mut rules = Vec::with_capacity(tileset.len());
        for p in tileset.prototiles() {
            let rule = cfg.rules.iter().find(|r| r.parent == p.label).ok_or_else(|| ConfigError::MissingRule(p.label.clone()))?;
            let mut children = Vec::new();
            for c in &rule.children {
                let proto = tileset.id_of(&c.tile).ok_or_else(|| ConfigError::Label(c.tile.clone()))?;
                children.push(Child { proto, offset: parse_coords(&k, &c.offset)? });
            }
            rules.push(children);
        }
        let lambda = parse_coords(&k, &cfg.lambda)?;
        Ok(SubstitutionSystem::new(cfg.name, tileset, lambda, rules, cfg.convention, cfg.recognisable)?)
    }
}

impl SubstitutionSystem {
    /// Fully expanded configuration describing this system.
    pub fn to_config(&self) -> SystemConfig {
        let ts = self.tileset();
        SystemConfig {
            name: self.name().into(),
            conductor: ts.field().conductor(),
            convention: self.convention(),
            recognisable: self.recognisable(),
            lambda: format_coords(self.lambda()),
            prototiles: ts
                .prototiles()
                .iter()
                .map(|p| ProtoConfig {
                    label: p.label.clone(),
                    vertices: p.shape.vertices().iter().map(format_coords).collect(),
                    puncture: Some(format_coords(&p.puncture)),
                    edges: p.edge_labels.clone(),
                })
                .collect(),
            rules: self
                .rules()
                .iter()
                .enumerate()
                .map(|(p, rule)| RuleConfig {
                    parent: ts.label(p).into(),
                    children: rule
                        .iter()
                        .map(|c| ChildConfig { tile: ts.label(c.proto).into(), offset: format_coords(&c.offset) })
                        .collect(),
                })
                .collect(),
            symmetry: None,
        }
    }
}

const BUILTINS: &[(&str, &str)] = &[
    ("fibonacci", include_str!("../../systems/fibonacci.json")),
    ("fibonacci-uncollared", include_str!("../../systems/fibonacci-uncollared.json")),
    ("abb", include_str!("../../systems/abb.json")),
    ("halfhex", include_str!("../../systems/halfhex.json")),
    ("penrose", include_str!("../../systems/penrose.json")),
];

pub fn builtin_names() -> Vec<&'static str> {
    BUILTINS.iter().map(|(n, _)| *n).collect()
}

/// The shipped JSON text of a built-in system.
pub fn builtin_text(name: &str) -> Option<&'static str> {
    BUILTINS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn builtin_config(name: &str) -> Result<SystemConfig, ConfigError> {
    let (_, text) = BUILTINS.iter().find(|(n, _)| *n == name).ok_or_else(|| ConfigError::UnknownBuiltin(name.into()))?;
    SystemConfig::from_json(text)
}

/// Shared instance of a built-in system; its caches persist for the process.
pub fn builtin(name: &str) -> Result<Arc<SubstitutionSystem>, ConfigError> {
    static LOADED: OnceLock<std::sync::Mutex<HashMap<String, Arc<SubstitutionSystem>>>> = OnceLock::new();
    let map = LOADED.get_or_init(Default::default);
    if let Some(s) = map.lock().unwrap().get(name) {
        return Ok(s.clone());
    }
    let sys = Arc::new(builtin_config(name)?.build()?);
    map.lock().unwrap().insert(name.into(), sys.clone());
    Ok(sys)
}

/// A built-in name or a path to a JSON file.
pub fn load(spec: &str) -> Result<Arc<SubstitutionSystem>, ConfigError> {
    if builtin_names().contains(&spec) {
        return builtin(spec);
    }
    let text = std::fs::read_to_string(spec).map_err(|e| ConfigError::Io(format!("{spec}: {e}")))?;
    Ok(Arc::new(SystemConfig::from_json(&text)?.build()?))
}
