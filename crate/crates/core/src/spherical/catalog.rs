//! Shipped example spaces. Each entry is a descriptor file embedded at build
//! time and parsed on demand.

use super::{parse_descriptor_str, SphericalDescriptor};
use crate::error::{Error, Result};

const ENTRIES: &[(&str, &str)] = &[
    ("sl2_gk", include_str!("../../data/sl2_gk.toml")),
    ("sl3_gk", include_str!("../../data/sl3_gk.toml")),
    ("dS2", include_str!("../../data/dS2.toml")),
    ("group_sl2", include_str!("../../data/group_sl2.toml")),
    ("triple_sl2", include_str!("../../data/triple_sl2.toml")),
    ("so8c_g2", include_str!("../../data/so8c_g2.toml")),
];

const ALIASES: &[(&str, &str)] = &[("pair_sl2", "group_sl2")];

fn resolve(name: &str) -> Option<&'static str> {
    let canonical = ALIASES.iter().find(|(a, _)| *a == name).map_or(name, |(_, c)| c);
    ENTRIES.iter().find(|(n, _)| *n == canonical).map(|(_, src)| *src)
}

pub fn catalog_names() -> Vec<&'static str> {
    ENTRIES.iter().map(|(n, _)| *n).collect()
}

/// Descriptor file text of a catalog entry.
pub fn catalog_source(name: &str) -> Result<&'static str> {
    resolve(name).ok_or_else(|| Error::UnknownEntry {
        name: name.to_string(),
        available: ENTRIES.iter().map(|(n, _)| n.to_string()).chain(ALIASES.iter().map(|(a, _)| a.to_string())).collect(),
    })
}

pub fn catalog(name: &str) -> Result<SphericalDescriptor> {
    parse_descriptor_str(catalog_source(name)?)
}
