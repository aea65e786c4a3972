#![allow(dead_code)]

use std::path::PathBuf;

use forbidden_patterns::{parse_system, parse_term, PatternSystem, Term};

pub fn system_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("systems")
        .join(format!("{name}.trs"))
}

pub fn load(name: &str) -> PatternSystem {
    let text = std::fs::read_to_string(system_path(name)).unwrap();
    parse_system(&text).unwrap()
}

pub fn term(sys: &PatternSystem, text: &str) -> Term {
    parse_term(sys, text).unwrap()
}

pub const ALL_SYSTEMS: &[&str] = &["ex2nd", "app", "faa", "inst", "top", "ground", "parout"];
