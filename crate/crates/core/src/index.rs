//! BWT of the terminated text with the `C` array and a wavelet tree for
//! `rank` and `range_distinct`.
//!
//! Positions are 0-based and ranges half-open throughout: `rank(c, i)` counts
//! occurrences of `c` in `bwt[0..i]`, so `rank(c, 0) == 0`, and the interval
//! of `cW` below an interval `[s, e)` of `W` is `[C[c] + rank(c, s), C[c] + rank(c, e))`.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::text::Text;
use crate::wavelet::WaveletTree;

/// One tuple of a `range_distinct` answer: `lo = rank(code, start)`,
/// `hi = rank(code, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DistinctCode {
    pub code: u8,
    pub lo: usize,
    pub hi: usize,
}

impl DistinctCode {
    pub fn count(&self) -> usize {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone)]
pub struct BwtIndex {
    bwt: Vec<u8>,
    c: Vec<usize>,
    wt: WaveletTree,
    sigma: usize,
}

/// Above this many bits the traversal stack bound `sigma^2 log^2 n` stops
/// being small next to the index.
const STACK_WARN_BITS: f64 = (1u64 << 26) as f64;

impl BwtIndex {
    pub fn build(text: &Text) -> Self {
        let t = text.symbols();
        let n = t.len();
        let sigma = text.sigma();
        let sa = suffix_array(t);
        let bwt: Vec<u8> = sa
            .iter()
            .map(|&p| if p == 0 { t[n - 1] } else { t[p - 1] })
            .collect();
        Self::from_bwt(bwt, sigma)
    }

    /// Wraps an existing BWT over codes `0..=sigma` (terminator code 0 exactly once).
    pub fn from_bwt(bwt: Vec<u8>, sigma: usize) -> Self {
        let n = bwt.len();
        let mut c = vec![0usize; sigma + 2];
        for &x in &bwt {
            c[x as usize + 1] += 1;
        }
        for i in 1..c.len() {
            c[i] += c[i - 1];
        }
        let log_n = (n.max(2) as f64).log2();
        let stack_bits = (sigma * sigma) as f64 * log_n * log_n;
        if stack_bits > STACK_WARN_BITS {
            log::warn!(
                "alphabet of {sigma} symbols: traversal stack bound sigma^2 log^2 n = {stack_bits:.3e} bits dominates"
            );
        }
        let wt = WaveletTree::new(&bwt, sigma as u8);
        Self { bwt, c, wt, sigma }
    }

    pub fn len(&self) -> usize {
        self.bwt.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bwt.is_empty()
    }

    pub fn sigma(&self) -> usize {
        self.sigma
    }

    pub fn bwt(&self) -> &[u8] {
        &self.bwt
    }

    /// `C[c]` = number of positions holding a code smaller than `c`; `sigma + 2` entries.
    pub fn c_array(&self) -> &[usize] {
        &self.c
    }

    #[inline]
    pub fn c(&self, code: u8) -> usize {
        self.c[code as usize]
    }

    /// Interval of the single-character string `code`.
    pub fn char_interval(&self, code: u8) -> Range<usize> {
        self.c[code as usize]..self.c[code as usize + 1]
    }

    /// Occurrences of `code` in `bwt[0..i]`.
    pub fn rank(&self, code: u8, i: usize) -> Result<usize> {
        if code as usize > self.sigma {
            return Err(Error::OutOfRange {
                what: "code",
                value: code as usize,
                limit: self.sigma,
            });
        }
        if i > self.len() {
            return Err(Error::OutOfRange {
                what: "position",
                value: i,
                limit: self.len(),
            });
        }
        Ok(self.wt.rank(code, i))
    }

    /// Distinct codes of `bwt[start..end]` with their rank bounds, in code order.
    pub fn range_distinct(&self, start: usize, end: usize) -> Result<Vec<DistinctCode>> {
        if start >= end || end > self.len() {
            return Err(Error::EmptyRange { start, end });
        }
        let mut raw = Vec::new();
        self.wt.range_distinct(start, end, &mut raw);
        Ok(raw
            .into_iter()
            .map(|(code, lo, hi)| DistinctCode { code, lo, hi })
            .collect())
    }

    #[inline]
    pub(crate) fn range_distinct_into(&self, start: usize, end: usize, out: &mut Vec<(u8, usize, usize)>) {
        self.wt.range_distinct(start, end, out);
    }

    /// Lexicographic interval of `pattern` among the sorted suffixes, or `None` if absent.
    /// The empty pattern matches the whole range.
    pub fn backward_search(&self, pattern: &[u8]) -> Option<Range<usize>> {
        let (mut s, mut e) = (0, self.len());
        for &c in pattern.iter().rev() {
            if c as usize > self.sigma {
                return None;
            }
            s = self.c(c) + self.wt.rank(c, s);
            e = self.c(c) + self.wt.rank(c, e);
            if s >= e {
                return None;
            }
        }
        Some(s..e)
    }

    /// Approximate heap footprint of the index.
    pub fn size_in_bytes(&self) -> usize {
        self.bwt.len() + self.c.len() * 8 + self.wt.size_in_bytes()
    }
}

/// Suffix array of a text whose last symbol is a unique minimum.
pub(crate) fn suffix_array(t: &[u8]) -> Vec<usize> {
    let mut sa = vec![0i32; t.len()];
    divsufsort::sort_in_place(t, &mut sa);
    sa.into_iter().map(|p| p as usize).collect()
}
