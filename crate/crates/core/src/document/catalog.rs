//! The built-in example catalog. Entries are the `.germ` files under `catalog/`.

use crate::document::GermDocument;
use crate::error::{Error, Result};

macro_rules! entries {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../../catalog/", $name, ".germ")))),*]
    };
}

/// `(name, source text)` in a fixed order.
pub const ENTRIES: &[(&str, &str)] = entries![
    "fold",
    "e",
    "E0",
    "phi-n2",
    "phi-n3",
    "phik-2",
    "phik-3",
    "whitney-psi2",
    "whitney-psi3",
    "multistable",
    "ex35-a",
    "cusp-pair",
    "ex35-c",
    "ex36-plus",
    "ex36-minus",
    "rrw-4to5",
    "s66",
    "s67-k1",
    "s67-k2",
    "umbrella-k1",
    "umbrella-k2",
    "s68-k1-plus",
    "s68-k1-minus",
    "s68-k2-plus",
    "s68-k2-minus",
    "s69",
    "suspended-69",
];

pub fn names() -> impl Iterator<Item = &'static str> {
    ENTRIES.iter().map(|(n, _)| *n)
}

pub fn source(name: &str) -> Option<&'static str> {
    ENTRIES.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn load(name: &str) -> Result<GermDocument> {
    let text = source(name).ok_or_else(|| Error::Semantic(format!("no catalog entry `{name}`")))?;
    GermDocument::parse(text)
}

pub fn all() -> Result<Vec<GermDocument>> {
    names().map(load).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_parses_under_its_own_name() {
        for (name, _) in ENTRIES {
            let d = load(name).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(d.name, *name);
        }
    }

    #[test]
    fn every_entry_round_trips() {
        for d in all().unwrap() {
            assert_eq!(GermDocument::parse(&d.render()).unwrap(), d, "{}", d.name);
        }
    }
}
