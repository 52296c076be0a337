//! Extraction of a `g`-computable path through `V_P` from a reduction of `P` to
//! `(Q⌢P) ⊗ {g}`: the trees `E^g_i`, their images `D^g_i` and a path through `⋃_i D^g_i`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::Transcript;
use crate::error::{Error, Result};
use crate::kernel::{Machine, Nat};
use crate::learners::output_prefix;
use crate::trees::{ext_approx, members_upto, ClosedClass, DEFAULT_CAP};
use crate::word::{fmt_word, interleave, llex, Sym, Word};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractRound {
    pub i: usize,
    /// Strings `σ` with `σ ⊕ g↾|σ| ∈ E^g_i` inside the horizon.
    pub e_words: usize,
    /// Nodes of `D^g_i`.
    pub d_words: usize,
    /// Nodes of `D^g_i` found not extendible in `V_P` at the tested depth.
    pub ext_failures: Vec<Word>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extraction {
    pub rounds: Vec<ExtractRound>,
    /// `⋃_i D^g_i`, length-lex sorted.
    pub tree: Vec<Word>,
    pub path: Word,
    pub transcript: Transcript,
}

/// `Φ(σ ⊕ g↾|σ|)` with the `|σ ⊕ g↾|σ||`-step convention.
fn image(m: &Machine, phi: &Nat, sigma: &[Sym], g: &[Sym]) -> Result<Word> {
    let w = interleave(sigma, &g[..sigma.len()])?;
    Ok(output_prefix(m, phi, &w, w.len() as u64, w.len()))
}

/// The rounds of the construction below a fixed prefix `ρ`, with `σ = ρ⌢x` and `x` ranging
/// over `V_Q ∪ ⋃_{λ ∈ L_Q} λ⌢D_{i−1}`. Returns the rounds and `⋃_i D_i`.
pub(crate) fn extract_with_prefix(
    m: &Machine,
    phi: &Nat,
    vp: &ClosedClass,
    vq: &ClosedClass,
    rho: &[Sym],
    g: &[Sym],
    rounds: usize,
    ext_depth: usize,
) -> Result<(Vec<ExtractRound>, BTreeSet<Word>)> {
    if rho.len() > g.len() {
        return Err(Error::Shape(format!("prefix of length {} exceeds the oracle of length {}", rho.len(), g.len())));
    }
    let room = g.len() - rho.len();
    let base = members_upto(vq, room, DEFAULT_CAP)?;
    let leaves: Vec<&Word> = base.iter().filter(|x| vq.is_leaf(x)).collect();
    let mut d: BTreeSet<Word> = BTreeSet::new();
    let mut union: BTreeSet<Word> = BTreeSet::new();
    let mut out = Vec::new();
    for i in 0..=rounds {
        let mut xs: BTreeSet<Word> = base.iter().cloned().collect();
        if i > 0 {
            for lam in &leaves {
                for tau in d.iter().filter(|t| lam.len() + t.len() <= room) {
                    let mut x = (*lam).clone();
                    x.extend(tau);
                    xs.insert(x);
                }
            }
        }
        let mut next: BTreeSet<Word> = BTreeSet::new();
        for x in &xs {
            let mut sigma = rho.to_vec();
            sigma.extend(x);
            let o = image(m, phi, &sigma, g)?;
            if !vp.contains(&o) {
                return Err(Error::Hypothesis(format!(
                    "the image {} of {} leaves {}",
                    fmt_word(&o),
                    fmt_word(&sigma),
                    vp.label()
                )));
            }
            next.extend((0..=o.len()).map(|n| o[..n].to_vec()));
        }
        let ext_failures = next
            .iter()
            .filter(|t| !ext_approx(vp, t, t.len().max(ext_depth)).unwrap_or(false))
            .cloned()
            .collect();
        out.push(ExtractRound { i, e_words: xs.len(), d_words: next.len(), ext_failures });
        union.extend(next.iter().cloned());
        d = next;
    }
    Ok((out, union))
}

/// The length-lex least among the longest nodes of a finite tree.
pub(crate) fn longest_path(tree: &BTreeSet<Word>) -> Word {
    let top = tree.iter().map(Vec::len).max().unwrap_or(0);
    tree.iter().filter(|w| w.len() == top).min_by(|a, b| llex(a, b)).cloned().unwrap_or_default()
}

/// Runs `rounds + 1` rounds on the oracle prefix `g` and returns a path of length `depth`
/// through `⋃_i D^g_i`. Extendibility is tested to depth `depth + 2`.
pub fn noncup_extract(
    m: &Machine,
    phi: &Nat,
    vp: &ClosedClass,
    vq: &ClosedClass,
    g: &[Sym],
    rounds: usize,
    depth: usize,
) -> Result<Extraction> {
    let (rs, union) = extract_with_prefix(m, phi, vp, vq, &[], g, rounds, depth + 2)?;
    let mut transcript = Transcript::new("noncup");
    for r in &rs {
        transcript.push(
            r.i,
            "extractor",
            "round",
            json!({ "E": r.e_words, "D": r.d_words, "ext_failures": r.ext_failures }),
        );
    }
    let full = longest_path(&union);
    if full.len() < depth {
        return Err(Error::Resource(format!(
            "the extracted tree reaches depth {} below the requested {depth}; lengthen g",
            full.len()
        )));
    }
    let path = full[..depth].to_vec();
    transcript.push(rs.len(), "extractor", "path", json!({ "path": path }));
    let mut tree: Vec<Word> = union.into_iter().collect();
    tree.sort_by(|a, b| llex(a, b));
    Ok(Extraction { rounds: rs, tree, path, transcript })
}
