//! Bounded semi-decision searches for codes in any dimension.
//!
//! A witness found here is exact (within the domain's pattern test);
//! failing to find one says nothing about the code.

use std::collections::HashSet;

use serde::Serialize;

use super::{BlockCode, ErasablePair};
use crate::error::{EdenError, Result};
use crate::lattice::{Pattern, Symbol, Window};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundedSearch<W> {
    pub witness: Option<W>,
    /// Largest box side searched completely.
    pub sides_completed: usize,
    pub stopped_by_capacity: bool,
}

fn cube(d: usize, side: usize) -> Window {
    let hi = vec![side as i64 - 1; d];
    Window::rect(d, &vec![0; d], &hi).expect("valid box")
}

/// Runs `step` for box sides `1..=max_side` until it yields a witness;
/// a capacity error ends the search early.
fn sweep<W>(max_side: usize, mut step: impl FnMut(usize) -> Result<Option<W>>) -> Result<BoundedSearch<W>> {
    let mut done = 0;
    for side in 1..=max_side {
        match step(side) {
            Ok(Some(w)) => return Ok(BoundedSearch { witness: Some(w), sides_completed: done, stopped_by_capacity: false }),
            Ok(None) => done = side,
            Err(EdenError::Capacity(_)) => {
                return Ok(BoundedSearch { witness: None, sides_completed: done, stopped_by_capacity: true })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(BoundedSearch { witness: None, sides_completed: done, stopped_by_capacity: false })
}

/// Looks for a codomain pattern on a box of side `≤ max_side` with no
/// preimage pattern on the box dilated by the neighborhood.
pub fn bounded_goe_search(code: &BlockCode, max_side: usize) -> Result<BoundedSearch<Pattern>> {
    let d = code.domain().dim();
    sweep(max_side, |side| {
        let k = cube(d, side);
        let dilated = k.sum(code.neighborhood())?;
        let mut image: HashSet<Vec<Symbol>> = HashSet::new();
        for p in code.domain().language(&dilated)? {
            image.insert(code.apply_pattern(&p)?.restrict(&k)?.symbols().to_vec());
        }
        Ok(code.codomain().language(&k)?.into_iter().find(|q| !image.contains(q.symbols())))
    })
}

/// Looks for two patterns on a box of side `≤ max_side` whose images agree
/// in every admissible surrounding that fixes everything they can influence.
pub fn bounded_erasable_search(code: &BlockCode, max_side: usize) -> Result<BoundedSearch<ErasablePair>> {
    let d = code.domain().dim();
    let alphabet = code.domain().alphabet_size();
    let n = code.neighborhood();
    sweep(max_side, |side| {
        let k = cube(d, side);
        let reach = k.sum(&n.reflect())?.sum(n)?;
        let ring = reach.difference(&k);
        let words = code.domain().language(&k)?;
        let contexts = alphabet
            .checked_pow(ring.len() as u32)
            .and_then(|c| c.checked_mul(words.len()))
            .filter(|&c| c <= crate::capacity::limit())
            .ok_or_else(|| crate::error::capacity("too many surroundings for the erasable-pair search"))?;
        let contexts = contexts / words.len().max(1);
        let mut alive: Vec<(usize, usize, usize)> =
            (0..words.len()).flat_map(|i| (i + 1..words.len()).map(move |j| (i, j, 0))).collect();
        let ring_cells: Vec<usize> = ring.cells().map(|c| reach.index_of(c).expect("ring inside reach")).collect();
        let core_cells: Vec<usize> = k.cells().map(|c| reach.index_of(c).expect("box inside reach")).collect();
        let mut buf = vec![0 as Symbol; reach.len()];
        for mut ctx in 0..contexts {
            if alive.is_empty() {
                break;
            }
            for &i in &ring_cells {
                buf[i] = (ctx % alphabet) as Symbol;
                ctx /= alphabet;
            }
            let images = words
                .iter()
                .map(|w| {
                    for (&i, &s) in core_cells.iter().zip(w.symbols()) {
                        buf[i] = s;
                    }
                    let p = Pattern::new(reach.clone(), buf.clone())?;
                    if code.domain().allows(&p)? {
                        Ok(Some(code.apply_pattern(&p)?.symbols().to_vec()))
                    } else {
                        Ok(None)
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            alive.retain_mut(|(i, j, seen)| match (&images[*i], &images[*j]) {
                (Some(a), Some(b)) => {
                    *seen += 1;
                    a == b
                }
                _ => true,
            });
        }
        Ok(alive.into_iter().find(|t| t.2 > 0).map(|(i, j, seen)| ErasablePair {
            window: k.clone(),
            first: words[i].clone(),
            second: words[j].clone(),
            contexts_checked: seen,
        }))
    })
}
