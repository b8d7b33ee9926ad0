//! Enumeration of endomorphisms and theorem surveys over them.

use std::collections::VecDeque;
use std::sync::Arc;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use super::decide::{classify, Classification, Flag, Skeleton, Verdict};
use super::{table_id, BlockCode, PatternIndex};
use crate::error::{capacity as cap_err, Result};
use crate::lattice::{Pattern, Symbol, Window};
use crate::subshift::{Dfa, Subshift};

/// Depth-first search over tables in lexicographic order. A branch is cut
/// as soon as some path of the label graph using only assigned entries
/// reads a word outside the codomain language; every finite path of the
/// (essential) label graph extends to a point, so the cut is exact.
struct TableSearch<'a> {
    sk: &'a Skeleton,
    lang: &'a Dfa,
    k: usize,
    npat: usize,
}

impl TableSearch<'_> {
    fn escapes(&self, table: &[Symbol]) -> bool {
        let Some(init) = self.lang.init() else {
            return self.sk.nv > 0 && !table.is_empty();
        };
        let nc = self.lang.n;
        let mut seen = vec![false; self.sk.nv * nc];
        let mut queue = VecDeque::new();
        for h in 0..self.sk.nv {
            seen[h * nc + init] = true;
            queue.push_back((h, init));
        }
        while let Some((h, c)) = queue.pop_front() {
            for e in self.sk.out(h) {
                let Some(&out) = table.get(e.pat as usize) else { continue };
                match self.lang.step(c, out) {
                    None => return true,
                    Some(c2) => {
                        let j = e.dst as usize * nc + c2;
                        if !seen[j] {
                            seen[j] = true;
                            queue.push_back((e.dst as usize, c2));
                        }
                    }
                }
            }
        }
        false
    }

    /// Every consistent completion of `prefix`, in lexicographic order;
    /// `budget` counts visited nodes.
    fn complete(&self, prefix: &mut Vec<Symbol>, out: &mut Vec<Vec<Symbol>>, budget: &mut usize) -> Result<()> {
        if *budget == 0 {
            return Err(cap_err("endomorphism enumeration exceeds the capacity limit"));
        }
        *budget -= 1;
        if self.escapes(prefix) {
            return Ok(());
        }
        if prefix.len() == self.npat {
            out.push(prefix.clone());
            return Ok(());
        }
        for a in 0..self.k as Symbol {
            prefix.push(a);
            self.complete(prefix, out, budget)?;
            prefix.pop();
        }
        Ok(())
    }
}

/// Allowed `N`-pattern index and every consistent endomorphism table.
fn endomorphism_tables(x: &Subshift, n: &Window) -> Result<(Arc<PatternIndex>, Vec<Vec<Symbol>>)> {
    x.require_dim1("enumerating endomorphisms")?;
    let probe = BlockCode::check_shape(x, x, n)?;
    let index = Arc::new(probe);
    let k = x.alphabet_size();
    let npat = index.patterns.len();
    let pres = x.presentation()?;
    let sk = Arc::new(super::decide::build_skeleton(x, n, &index)?);
    let _ = index.skeleton.set(Ok(sk.clone()));
    let search = TableSearch { sk: &sk, lang: &pres.lang, k, npat };
    // Split on a short prefix so batches can run independently.
    let mut depth = 0;
    while depth < npat && k.pow(depth as u32) < 64 {
        depth += 1;
    }
    let prefixes: Vec<Vec<Symbol>> = (0..k.pow(depth as u32))
        .map(|mut i| {
            let mut p = vec![0; depth];
            for slot in p.iter_mut().rev() {
                *slot = (i % k) as Symbol;
                i /= k;
            }
            p
        })
        .collect();
    let share = crate::capacity::limit() / prefixes.len().max(1) + 1;
    let batches: Vec<Result<Vec<Vec<Symbol>>>> = prefixes
        .into_par_iter()
        .map(|mut p| {
            let mut out = Vec::new();
            let mut budget = share;
            search.complete(&mut p, &mut out, &mut budget)?;
            Ok(out)
        })
        .collect();
    let mut tables = Vec::new();
    for b in batches {
        tables.extend(b?);
    }
    tables.sort_by_cached_key(|t| table_id(t, k));
    Ok((index, tables))
}

/// Every endomorphism of `x` with neighborhood `n`, ordered by rule id.
pub fn enumerate_endomorphisms(x: &Subshift, n: &Window) -> Result<Vec<BlockCode>> {
    let (index, tables) = endomorphism_tables(x, n)?;
    Ok(tables
        .into_iter()
        .map(|t| BlockCode::assemble(x.clone(), x.clone(), n.clone(), index.clone(), t))
        .collect())
}

fn id_string<S: Serializer>(id: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&id.to_string())
}

#[derive(Clone, Debug, Serialize)]
pub struct SurveyRow {
    #[serde(serialize_with = "id_string")]
    pub rule_id: BigUint,
    pub table: Vec<Symbol>,
    #[serde(flatten)]
    pub classification: Classification,
}

impl SurveyRow {
    /// `rule-id, surjective, pre_injective, injective, flags, witness`.
    pub fn tsv(&self) -> String {
        let c = &self.classification;
        let flags = if c.flags.is_empty() {
            "-".to_string()
        } else {
            c.flags.iter().map(Flag::to_string).collect::<Vec<_>>().join(",")
        };
        let mut witness = Vec::new();
        if let Some(g) = &c.goe {
            witness.push(format!("goe={}", compact(g)));
        }
        if let Some(e) = &c.erasable {
            witness.push(format!("erasable={}|{}", compact(&e.first), compact(&e.second)));
        }
        let witness = if witness.is_empty() { "-".to_string() } else { witness.join(";") };
        format!("{}\t{}\t{}\t{}\t{}\t{}", self.rule_id, c.surjective, c.pre_injective, c.injective, flags, witness)
    }
}

/// One-dimensional witnesses always start at 0, so the symbols suffice.
fn compact(p: &Pattern) -> String {
    match p.as_word() {
        Some((_, w)) => super::word_string(w),
        None => p.to_string(),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SurveySummary {
    pub codes: usize,
    pub surjective: usize,
    pub pre_injective: usize,
    pub injective: usize,
    pub moore_violations: usize,
    pub myhill_violations: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Survey {
    pub shift: String,
    pub neighborhood: Window,
    pub rows: Vec<SurveyRow>,
    pub summary: SurveySummary,
}

impl Survey {
    pub const TSV_HEADER: &'static str = "rule-id\tsurjective\tpre_injective\tinjective\tflags\twitness";

    pub fn to_tsv(&self) -> String {
        let mut s = String::from(Self::TSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.tsv());
            s.push('\n');
        }
        s
    }
}

/// Classifies every endomorphism of `x` with neighborhood `n`.
pub fn survey(x: &Subshift, n: &Window) -> Result<Survey> {
    let codes = enumerate_endomorphisms(x, n)?;
    let rows = codes
        .par_iter()
        .map(|code| {
            Ok(SurveyRow { rule_id: code.rule_id(), table: code.table().to_vec(), classification: classify(code)? })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut summary = SurveySummary { codes: rows.len(), ..Default::default() };
    for r in &rows {
        let c = &r.classification;
        summary.surjective += (c.surjective == Verdict::Yes) as usize;
        summary.pre_injective += (c.pre_injective == Verdict::Yes) as usize;
        summary.injective += (c.injective == Verdict::Yes) as usize;
        summary.moore_violations += c.flags.contains(&Flag::MooreViolation) as usize;
        summary.myhill_violations += c.flags.contains(&Flag::MyhillViolation) as usize;
    }
    Ok(Survey { shift: x.label(), neighborhood: n.clone(), rows, summary })
}
