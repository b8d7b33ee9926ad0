//! Named subshifts shipped with the crate.

use crate::error::{invalid, Result};
use crate::subshift::{parse_subshift, Subshift};

const FILES: &[(&str, &str)] = &[
    ("full-2", include_str!("../corpus/full-2.shift")),
    ("full-3", include_str!("../corpus/full-3.shift")),
    ("golden-mean", include_str!("../corpus/golden-mean.shift")),
    ("even", include_str!("../corpus/even.shift")),
    ("odd", include_str!("../corpus/odd.shift")),
    ("rll-1-3", include_str!("../corpus/rll-1-3.shift")),
    ("no-111", include_str!("../corpus/no-111.shift")),
    ("alternating", include_str!("../corpus/alternating.shift")),
    ("zero", include_str!("../corpus/zero.shift")),
    ("sep-12", include_str!("../corpus/sep-12.shift")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    FILES.iter().map(|(n, _)| *n)
}

/// The source text of a corpus entry.
pub fn source(name: &str) -> Option<&'static str> {
    FILES.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn get(name: &str) -> Result<Subshift> {
    let text = source(name).ok_or_else(|| invalid(format!("no corpus subshift named `{name}`")))?;
    parse_subshift(text)
}

pub fn all() -> Vec<Subshift> {
    names().map(|n| get(n).expect("corpus entries parse")).collect()
}
