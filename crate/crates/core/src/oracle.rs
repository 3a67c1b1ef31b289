//! Brute-force references built from direct scanning of the text. Nothing
//! here touches the BWT or the border recursions.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::text::{Text, TERMINATOR};

/// Largest text (terminator included) the oracle accepts.
pub const ORACLE_CAP: usize = 5000;

/// Class sets of the terminated text, every string given as codes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NaiveTable {
    /// Right-maximal substrings, `ε` included.
    pub right_maximal: BTreeSet<Vec<u8>>,
    /// Maximal repeats, `ε` excluded.
    pub maximal_repeats: BTreeSet<Vec<u8>>,
    /// Occurring minimal rare words of length at least 2, with their counts.
    pub minimal_rare: BTreeMap<Vec<u8>, usize>,
    pub minimal_absent: BTreeSet<Vec<u8>>,
}

#[derive(Default)]
struct Context {
    first: usize,
    count: usize,
    left: BTreeMap<u8, usize>,
    right: BTreeMap<u8, usize>,
    pairs: HashMap<(u8, u8), usize>,
}

/// Enumerates the class sets by refining equal-substring classes one length
/// at a time. Occurrences are circular in `T#`, so the character before the
/// first position is the terminator.
pub fn naive_classes(text: &Text) -> Result<NaiveTable> {
    let n = text.len();
    if n > ORACLE_CAP {
        return Err(Error::OracleCap { n, limit: ORACLE_CAP });
    }
    let t = text.symbols();
    let body = text.body();
    let big_n = body.len();
    let at = |i: isize| t[i.rem_euclid(n as isize) as usize];

    let mut table = NaiveTable::default();
    // class id of the substring of length `len` starting at each position
    let mut ids: Vec<u32> = vec![0; big_n + 1];
    let mut len = 0usize;
    loop {
        let starts = big_n + 1 - len;
        let mut classes: Vec<Context> = Vec::new();
        let mut seen: HashMap<u32, usize> = HashMap::new();
        for (i, &id) in ids.iter().enumerate().take(starts) {
            let slot = *seen.entry(id).or_insert_with(|| {
                classes.push(Context {
                    first: i,
                    ..Context::default()
                });
                classes.len() - 1
            });
            let ctx = &mut classes[slot];
            let a = at(i as isize - 1);
            let b = t[i + len];
            ctx.count += 1;
            *ctx.left.entry(a).or_default() += 1;
            *ctx.right.entry(b).or_default() += 1;
            *ctx.pairs.entry((a, b)).or_default() += 1;
        }

        let mut any_repeat = false;
        for ctx in &classes {
            if ctx.count < 2 {
                continue;
            }
            any_repeat = true;
            let spelled = &body[ctx.first..ctx.first + len];
            if ctx.right.len() >= 2 {
                table.right_maximal.insert(spelled.to_vec());
                if ctx.left.len() >= 2 && len > 0 {
                    table.maximal_repeats.insert(spelled.to_vec());
                }
            }
            let wrap = |a: u8, b: u8| {
                let mut s = Vec::with_capacity(len + 2);
                s.push(a);
                s.extend_from_slice(spelled);
                s.push(b);
                s
            };
            for (&a, &lc) in ctx.left.iter().filter(|(&a, _)| a != TERMINATOR) {
                for (&b, &rc) in ctx.right.iter().filter(|(&b, _)| b != TERMINATOR) {
                    match ctx.pairs.get(&(a, b)).copied().unwrap_or(0) {
                        0 => {
                            table.minimal_absent.insert(wrap(a, b));
                        }
                        pc if pc < lc && pc < rc => {
                            table.minimal_rare.insert(wrap(a, b), pc);
                        }
                        _ => {}
                    }
                }
            }
        }
        if !any_repeat || len == big_n {
            break;
        }

        // refine: (class at len, next char) -> class at len + 1
        len += 1;
        let mut refine: HashMap<(u32, u8), u32> = HashMap::new();
        for i in 0..=big_n - len {
            let key = (ids[i], t[i + len - 1]);
            let next = refine.len() as u32;
            ids[i] = *refine.entry(key).or_insert(next);
        }
        ids.truncate(big_n - len + 1);
    }
    Ok(table)
}

/// Linear occurrence count of `pattern` in `haystack`; the empty pattern
/// occurs at every position including the end.
pub fn count_occurrences(haystack: &[u8], pattern: &[u8]) -> usize {
    if pattern.is_empty() {
        return haystack.len() + 1;
    }
    haystack.windows(pattern.len()).filter(|w| *w == pattern).count()
}

/// Classical border array: entry `i` is the longest proper border of `s[..=i]`.
pub fn failure_function(s: &[u8]) -> Vec<usize> {
    let mut fail = vec![0usize; s.len()];
    let mut k = 0;
    for i in 1..s.len() {
        while k > 0 && s[i] != s[k] {
            k = fail[k - 1];
        }
        if s[i] == s[k] {
            k += 1;
        }
        fail[i] = k;
    }
    fail
}

/// All border lengths of `s`, longest first.
pub fn borders(s: &[u8]) -> Vec<usize> {
    let fail = failure_function(s);
    let mut out = Vec::new();
    let mut b = fail.last().copied().unwrap_or(0);
    while b > 0 {
        out.push(b);
        b = fail[b - 1];
    }
    out
}

pub fn longest_border(s: &[u8]) -> usize {
    failure_function(s).last().copied().unwrap_or(0)
}

/// `π(s)`: product of the character probabilities.
pub fn probability(s: &[u8], probs: &[f64]) -> f64 {
    s.iter().map(|&c| probs[c as usize]).product()
}

/// `tails[b] = π(s[b..])` for `b` in `0..=|s|`.
fn tail_probabilities(s: &[u8], probs: &[f64]) -> Vec<f64> {
    let mut tails = vec![1.0; s.len() + 1];
    for b in (0..s.len()).rev() {
        tails[b] = tails[b + 1] * probs[s[b] as usize];
    }
    tails
}

/// `(φ, γ)` as sums over the border set: `Σ (N − 2m + b + 1)·π(s[b..])` and
/// `Σ π(s[b..])`, plus the sum of absolute `φ` terms as a scale for comparisons.
pub fn definitional_phi_gamma(s: &[u8], probs: &[f64], scoring_len: usize) -> (f64, f64, f64) {
    let m = s.len() as f64;
    let nn = scoring_len as f64;
    let tails = tail_probabilities(s, probs);
    borders(s).into_iter().fold((0.0, 0.0, 0.0), |(phi, gamma, scale), b| {
        let term = (nn - 2.0 * m + b as f64 + 1.0) * tails[b];
        (phi + term, gamma + tails[b], scale + term.abs())
    })
}

/// Expectation and variance of the linear occurrence count of `s` in an IID
/// text of length `scoring_len`, summing covariances of the indicator
/// variables over all position pairs (grouped by shift).
pub fn exact_moments(s: &[u8], probs: &[f64], scoring_len: usize) -> (f64, f64) {
    let m = s.len();
    assert!(m >= 1 && m <= scoring_len);
    let positions = scoring_len - m + 1;
    let tails = tail_probabilities(s, probs);
    let p = tails[0];
    let e = positions as f64 * p;
    let mut is_border = vec![false; m];
    for b in borders(s) {
        is_border[b] = true;
    }
    let mut v = positions as f64 * p * (1.0 - p);
    for d in 1..m.min(positions) {
        let joint = if is_border[m - d] { p * tails[m - d] } else { 0.0 };
        v += 2.0 * (positions - d) as f64 * (joint - p * p);
    }
    (e, v)
}

/// Occurrence counts by binary search over naively sorted suffixes.
pub struct NaiveCounter<'t> {
    text: &'t [u8],
    suffixes: Vec<usize>,
}

impl<'t> NaiveCounter<'t> {
    pub fn new(text: &'t [u8]) -> Self {
        let mut suffixes: Vec<usize> = (0..text.len()).collect();
        suffixes.sort_by(|&a, &b| text[a..].cmp(&text[b..]));
        Self { text, suffixes }
    }

    /// Linear occurrences of `pattern`; the empty pattern counts `len + 1`.
    pub fn count(&self, pattern: &[u8]) -> usize {
        if pattern.is_empty() {
            return self.text.len() + 1;
        }
        let prefix = |i: usize| {
            let s = &self.text[i..];
            &s[..s.len().min(pattern.len())]
        };
        let lo = self.suffixes.partition_point(|&i| prefix(i) < pattern);
        let hi = self.suffixes.partition_point(|&i| prefix(i) <= pattern);
        hi - lo
    }
}
