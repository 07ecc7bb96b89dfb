//! Browser bindings: draw supertiles, run the self-similar action and show
//! the Anderson–Putnam complex of a built-in system.

use std::sync::Arc;

use serde_json::json;
use tilesemi::geometry::{patch_svg, SvgOptions};
use tilesemi::limit::{ap_substitution_map, build_ap_complex};
use tilesemi::paths::{format_letters, parse_letters};
use tilesemi::semigroup::{format_element, parse_element};
use tilesemi::selfsim::{ActOutcome, SelfSimilarity};
use tilesemi::substitution::config::{builtin, builtin_names};
use tilesemi::substitution::SubstitutionSystem;
use wasm_bindgen::prelude::*;

/// Browser drawings do not need the 40 digits of the CLI.
const WEB_DIGITS: usize = 8;

fn system(name: &str) -> Result<Arc<SubstitutionSystem>, String> {
    builtin(name).map_err(|e| e.to_string())
}

pub fn list_systems() -> String {
    let systems: Vec<_> = builtin_names()
        .into_iter()
        .filter_map(|n| builtin(n).ok().map(|s| json!({ "name": n, "prototiles": (0..s.num_prototiles()).map(|p| s.label(p)).collect::<Vec<_>>() })))
        .collect();
    serde_json::Value::Array(systems).to_string()
}

pub fn supertile_svg(name: &str, proto: &str, level: usize) -> Result<String, String> {
    let sys = system(name)?;
    let p = sys.tileset().id_of(proto).ok_or_else(|| format!("no prototile {proto:?} in {name}"))?;
    let level = level.min(6);
    let opts = SvgOptions { digits: WEB_DIGITS, labels: level <= 3, punctures: level <= 3, outlines: vec![sys.inflated_support(p, level)] };
    Ok(patch_svg(sys.tileset(), sys.supertile(p, level).tiles(), &opts))
}

pub fn act_json(name: &str, element: &str, word: &str) -> Result<String, String> {
    let sys = system(name)?;
    let g = parse_element(&sys, element).map_err(|e| e.to_string())?;
    let w = parse_letters(&sys, word).map_err(|e| e.to_string())?;
    let outcome = SelfSimilarity::new(sys.clone()).act(&g, &w).map_err(|e| e.to_string())?;
    let v = match outcome {
        ActOutcome::Evaluated { emitted, residual } => {
            let mut out = emitted.clone();
            out.extend_from_slice(&w[emitted.len()..]);
            json!({ "outcome": "evaluated", "output": format_letters(&sys, &out), "residual": format_element(&sys, &residual) })
        }
        ActOutcome::NeedMoreInput { emitted, residual, pending } => json!({
            "outcome": "need more input",
            "emitted": format_letters(&sys, &emitted),
            "pending": format_letters(&sys, &pending),
            "residual": format_element(&sys, &residual),
        }),
        ActOutcome::OutsideDomain { emitted, residual, at } => json!({
            "outcome": "outside the domain",
            "emitted": format_letters(&sys, &emitted),
            "at": at,
            "residual": format_element(&sys, &residual),
        }),
    };
    Ok(v.to_string())
}

pub fn ap_complex_json(name: &str) -> Result<String, String> {
    let sys = system(name)?;
    let cx = build_ap_complex(&sys).map_err(|e| e.to_string())?;
    let map = ap_substitution_map(&sys, &cx);
    Ok(json!({
        "svg": cx.skeleton_svg(&sys),
        "cells": cx.cell_counts(),
        "euler": cx.euler_characteristic(),
        "vertex_classes": cx.vertex_classes(),
        "faces": (0..sys.num_prototiles()).map(|p| json!([sys.label(p), map.face_chain(&sys, p)])).collect::<Vec<_>>(),
        "well_defined": map.is_well_defined() && cx.is_consistent(),
    })
    .to_string())
}

#[wasm_bindgen]
pub fn systems() -> String {
    list_systems()
}

#[wasm_bindgen]
pub fn supertile(name: &str, proto: &str, level: usize) -> Result<String, JsError> {
    supertile_svg(name, proto, level).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn act(name: &str, element: &str, word: &str) -> Result<String, JsError> {
    act_json(name, element, word).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn ap_complex(name: &str) -> Result<String, JsError> {
    ap_complex_json(name).map_err(|e| JsError::new(&e))
}
