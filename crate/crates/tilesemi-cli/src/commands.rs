use std::path::PathBuf;
use std::sync::Arc;

use serde::Serialize;
use tilesemi::arith::Part;
use tilesemi::geometry::{patch_svg, Point, SvgOptions, Tile};
use tilesemi::limit::{self, AddressJson, LimitError};
use tilesemi::paths::{format_letters, parse_letters, tau_plus, LeftWord, PathError, RightWord};
use tilesemi::semigroup::{format_element, generators, parse_element, LiteralError, Pointed, TileJson};
use tilesemi::selfsim::{compare_rules, ActOutcome, Golden, SelfSimError, SelfSimilarity};
use tilesemi::substitution::config::{format_coords, load, ConfigError};
use tilesemi::substitution::{SubstitutionError, SubstitutionSystem};

use crate::{Cli, Command, What};

pub const EXIT_LOAD: u8 = 3;
pub const EXIT_INPUT: u8 = 4;
pub const EXIT_INVALID: u8 = 5;
pub const EXIT_RULES: u8 = 6;
pub const EXIT_NUCLEUS: u8 = 7;
pub const EXIT_COMPLEX: u8 = 8;
pub const EXIT_IO: u8 = 9;
pub const EXIT_CAP: u8 = 10;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

fn fail(code: u8, message: impl ToString) -> Failure {
    Failure { code, message: message.to_string() }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        fail(EXIT_LOAD, e)
    }
}

impl From<LiteralError> for Failure {
    fn from(e: LiteralError) -> Self {
        match e {
            LiteralError::Substitution(s) => s.into(),
            e => fail(EXIT_INPUT, e),
        }
    }
}

impl From<PathError> for Failure {
    fn from(e: PathError) -> Self {
        match e {
            PathError::Substitution(s) => s.into(),
            e => fail(EXIT_INPUT, e),
        }
    }
}

impl From<SubstitutionError> for Failure {
    fn from(e: SubstitutionError) -> Self {
        fail(EXIT_CAP, e)
    }
}

impl From<SelfSimError> for Failure {
    fn from(e: SelfSimError) -> Self {
        match e {
            SelfSimError::Path(p) => p.into(),
            e => fail(EXIT_CAP, e),
        }
    }
}

impl From<LimitError> for Failure {
    fn from(e: LimitError) -> Self {
        match e {
            LimitError::Substitution(s) => s.into(),
            LimitError::Path(p) => p.into(),
            e => fail(EXIT_INPUT, e),
        }
    }
}

pub struct Output {
    pub text: String,
    pub code: u8,
    /// Files written besides the main output.
    pub files: Vec<PathBuf>,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, code: 0, files: Vec::new() }
    }

    fn check(text: String, passed: bool, code: u8) -> Self {
        Output { text, code: if passed { 0 } else { code }, files: Vec::new() }
    }
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn canonical_json<T: Serialize>(v: &T) -> String {
    let value = serde_json::to_value(v).expect("serializable");
    let mut s = serde_json::to_string_pretty(&value).expect("serializable");
    s.push('\n');
    s
}

fn decimal(x: &Point) -> String {
    let (re, im) = (x.to_decimal(Part::Real, 20), x.to_decimal(Part::Imaginary, 20));
    if x.is_real() {
        re
    } else {
        format!("{re} + {im}i")
    }
}

pub fn run(cli: &Cli) -> Result<Output, Failure> {
    let sys = load(cli.command.system())?;
    match &cli.command {
        Command::Validate { .. } => {
            let report = sys.validate();
            Ok(Output::check(canonical_json(&report), report.passed, EXIT_INVALID))
        }
        Command::Graph { dot, .. } => Ok(Output::ok(if *dot { sys.graph_dot() } else { canonical_json(&sys.graph_json()) })),
        Command::Render { what, level, word, element, digits, .. } => render(&sys, *what, *level, word.as_deref(), element.as_deref(), *digits),
        Command::Act { element, word, .. } => act(&sys, element, word),
        Command::Rules { compare, regenerate, .. } => rules(&sys, compare.as_ref(), regenerate.as_ref()),
        Command::Nucleus { .. } => nucleus(&sys),
        Command::Contraction { element, .. } => contraction(&sys, element.as_deref()),
        Command::ApComplex { dot, .. } => {
            let cx = limit::build_ap_complex(&sys)?;
            let text = if *dot { cx.to_dot(&sys) } else { canonical_json(&cx.to_json(&sys)) };
            Ok(Output::check(text, cx.is_consistent(), EXIT_COMPLEX))
        }
        Command::ApMap { .. } => {
            let cx = limit::build_ap_complex(&sys)?;
            let map = limit::ap_substitution_map(&sys, &cx);
            Ok(Output::check(canonical_json(&map.to_json(&sys, &cx)), map.is_well_defined() && cx.is_consistent(), EXIT_COMPLEX))
        }
        Command::Alpha { word, depth, .. } => alpha(&sys, word, *depth),
        Command::Aeq { first, second, .. } => aeq(&sys, first, second),
        Command::Beta { left, right, .. } => beta(&sys, left, right),
    }
}

fn render(sys: &SubstitutionSystem, what: What, level: usize, word: Option<&str>, element: Option<&str>, digits: Option<usize>) -> Result<Output, Failure> {
    let ts = sys.tileset();
    let mut opts = SvgOptions::default();
    if let Some(d) = digits {
        opts.digits = d;
    }
    let tiles: Vec<Tile> = match what {
        What::Ap => return Ok(Output::ok(limit::build_ap_complex(sys)?.skeleton_svg(sys))),
        What::Supertile => {
            let mut tiles = Vec::new();
            let mut cursor = 0i64;
            for p in 0..sys.num_prototiles() {
                let shape = sys.inflated_support(p, level);
                let b = shape.bbox();
                let shift = Point::from_int(ts.field(), cursor - b[0].floor() as i64);
                cursor += (b[2] - b[0]).ceil() as i64 + 1;
                opts.outlines.push(shape.translate(&shift));
                tiles.extend(sys.supertile(p, level).translate(&shift).tiles().iter().cloned());
            }
            tiles
        }
        What::Patch => match (word, element) {
            (Some(w), _) => tau_plus(sys, &RightWord::parse(sys, w)?)?.patch.tiles().to_vec(),
            (None, Some(e)) => parse_element(sys, e)?.patch().tiles().to_vec(),
            (None, None) => return Err(fail(EXIT_INPUT, "--what patch needs --word or --element")),
        },
    };
    Ok(Output::ok(patch_svg(ts, &tiles, &opts)))
}

#[derive(Serialize)]
struct ActJson {
    element: String,
    input: String,
    outcome: &'static str,
    emitted: String,
    residual: String,
    /// Emitted letters followed by the untouched rest of the input.
    output: Option<String>,
    /// Letters consumed but not yet decided.
    pending: Option<String>,
    /// Index of the first letter outside the domain.
    at: Option<usize>,
}

fn act(sys: &Arc<SubstitutionSystem>, element: &str, word: &str) -> Result<Output, Failure> {
    let g = parse_element(sys, element)?;
    let w = parse_letters(sys, word)?;
    let ss = SelfSimilarity::new(sys.clone());
    let outcome = ss.act(&g, &w)?;
    let mut j = ActJson {
        element: format_element(sys, &g),
        input: format_letters(sys, &w),
        outcome: "",
        emitted: String::new(),
        residual: String::new(),
        output: None,
        pending: None,
        at: None,
    };
    match outcome {
        ActOutcome::Evaluated { emitted, residual } => {
            let mut out = emitted.clone();
            out.extend_from_slice(&w[emitted.len()..]);
            j.outcome = "evaluated";
            j.emitted = format_letters(sys, &emitted);
            j.residual = format_element(sys, &residual);
            j.output = Some(format_letters(sys, &out));
        }
        ActOutcome::NeedMoreInput { emitted, residual, pending } => {
            j.outcome = "need-more-input";
            j.emitted = format_letters(sys, &emitted);
            j.residual = format_element(sys, &residual);
            j.pending = Some(format_letters(sys, &pending));
        }
        ActOutcome::OutsideDomain { emitted, residual, at } => {
            j.outcome = "outside-domain";
            j.emitted = format_letters(sys, &emitted);
            j.residual = format_element(sys, &residual);
            j.at = Some(at);
        }
    }
    Ok(Output::ok(canonical_json(&j)))
}

#[derive(Serialize)]
struct RulesJson {
    table: Golden,
    #[serde(skip_serializing_if = "Option::is_none")]
    diff: Option<tilesemi::selfsim::RuleDiff>,
}

fn rules(sys: &Arc<SubstitutionSystem>, compare: Option<&PathBuf>, regenerate: Option<&PathBuf>) -> Result<Output, Failure> {
    let ss = SelfSimilarity::new(sys.clone());
    let table = ss.derive_rule_table()?;
    let golden = table.to_golden(sys);
    let mut files = Vec::new();
    if let Some(path) = regenerate {
        std::fs::write(path, canonical_json(&golden)).map_err(|e| fail(EXIT_IO, format!("{}: {e}", path.display())))?;
        files.push(path.clone());
    }
    let diff = match compare {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", path.display())))?;
            let g: Golden = serde_json::from_str(&text).map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", path.display())))?;
            Some(compare_rules(sys, &table, &g).map_err(|e| fail(EXIT_INPUT, e))?)
        }
        None => None,
    };
    let passed = diff.as_ref().is_none_or(|d| d.is_empty());
    let mut out = Output::check(canonical_json(&RulesJson { table: golden, diff }), passed, EXIT_RULES);
    out.files = files;
    Ok(out)
}

#[derive(Serialize)]
struct NucleusFailureJson {
    member: String,
    word: String,
    restriction: String,
}

#[derive(Serialize)]
struct NucleusJson {
    system: String,
    size: usize,
    closed: bool,
    members: Vec<String>,
    failures: Vec<NucleusFailureJson>,
}

fn nucleus(sys: &Arc<SubstitutionSystem>) -> Result<Output, Failure> {
    let ss = SelfSimilarity::new(sys.clone());
    let n = ss.semi_nucleus()?;
    let j = NucleusJson {
        system: sys.name().to_string(),
        size: n.members.len(),
        closed: n.closed(),
        members: n.members.iter().map(|g| format_element(sys, g)).collect(),
        failures: n
            .failures
            .iter()
            .map(|(m, w, h)| NucleusFailureJson { member: format_element(sys, m), word: format_letters(sys, w), restriction: format_element(sys, h) })
            .collect(),
    };
    Ok(Output::check(canonical_json(&j), n.closed(), EXIT_NUCLEUS))
}

#[derive(Serialize)]
struct ContractionJson {
    element: String,
    separation_sq: String,
    report: tilesemi::selfsim::ContractionReport,
}

fn contraction(sys: &Arc<SubstitutionSystem>, element: Option<&str>) -> Result<Output, Failure> {
    let ss = SelfSimilarity::new(sys.clone());
    let elements: Vec<Pointed> = match element {
        Some(e) => vec![parse_element(sys, e)?],
        None => generators(sys)?,
    };
    let mut out = Vec::new();
    for g in &elements {
        let report = ss.contraction_index(g)?;
        out.push(ContractionJson {
            element: format_element(sys, g),
            separation_sq: decimal(&tilesemi::selfsim::separation_sq(sys, g)),
            report,
        });
    }
    let passed = out.iter().all(|c| c.report.monotone);
    Ok(Output::check(canonical_json(&out), passed, EXIT_NUCLEUS))
}

#[derive(Serialize)]
struct AlphaJson {
    word: String,
    exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    address: Option<AddressJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    decimal: Option<String>,
    /// Enclosing cell of a finite word, as vertex coordinates.
    #[serde(skip_serializing_if = "Option::is_none")]
    cell: Option<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tile: Option<String>,
}

fn alpha(sys: &SubstitutionSystem, word: &str, depth: usize) -> Result<Output, Failure> {
    let e = LeftWord::parse(sys, word)?;
    let j = if e.is_periodic() {
        let x = limit::alpha(sys, &e)?;
        AlphaJson { word: e.format(sys), exact: true, decimal: Some(decimal(&x.point)), address: Some(AddressJson::new(sys, &x)), cell: None, tile: None }
    } else {
        let (p, cell) = limit::alpha_enclosure(sys, &e, depth)?;
        AlphaJson {
            word: e.format(sys),
            exact: false,
            address: None,
            decimal: None,
            cell: Some(cell.vertices().iter().map(format_coords).collect()),
            tile: Some(sys.label(p).to_string()),
        }
    };
    Ok(Output::ok(canonical_json(&j)))
}

#[derive(Serialize)]
struct AeqJson {
    first: AddressJson,
    second: AddressJson,
    equivalent: bool,
}

fn aeq(sys: &SubstitutionSystem, first: &str, second: &str) -> Result<Output, Failure> {
    let (e, f) = (LeftWord::parse(sys, first)?, LeftWord::parse(sys, second)?);
    let j = AeqJson {
        first: AddressJson::new(sys, &limit::alpha(sys, &e)?),
        second: AddressJson::new(sys, &limit::alpha(sys, &f)?),
        equivalent: limit::asymptotically_equivalent(sys, &e, &f)?,
    };
    Ok(Output::ok(canonical_json(&j)))
}

#[derive(Serialize)]
struct BetaJson {
    point: Vec<String>,
    decimal: String,
    radius_sq: String,
    marked: usize,
    patch: ElementTiles,
}

#[derive(Serialize)]
struct ElementTiles {
    tiles: Vec<TileJson>,
}

fn beta(sys: &SubstitutionSystem, left: &str, right: &str) -> Result<Output, Failure> {
    let l = match left.trim() {
        "-" | "" => None,
        t => Some(LeftWord::parse(sys, t)?),
    };
    let r = RightWord::parse(sys, right)?;
    let b = limit::beta(sys, l.as_ref(), &r)?;
    let tiles = b
        .patch
        .patch
        .tiles()
        .iter()
        .map(|t| TileJson { tile: sys.label(t.proto).to_string(), offset: format_coords(&t.offset) })
        .collect();
    let j = BetaJson { point: format_coords(&b.point), decimal: decimal(&b.point), radius_sq: decimal(&b.radius_sq), marked: b.patch.marked, patch: ElementTiles { tiles } };
    Ok(Output::ok(canonical_json(&j)))
}
