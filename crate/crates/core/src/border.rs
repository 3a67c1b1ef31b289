//! Border bookkeeping synchronized with the traversal path.
//!
//! The path of the suffix-link tree from `ε` to a node `W` visits every
//! suffix of `W`, one per depth, so all per-suffix data lives in stacks
//! indexed by depth:
//!
//! * one [`PathEntry`] per depth `j` for the suffix of length `j`: its first
//!   character, `π`, `φ`, `γ`, longest border, and the set `B^r` of pairs
//!   `(a, a|V)` (longest border preceded by `a`);
//! * one char stack per code `b`, whose entry at depth `j` holds
//!   `V|b` (longest border followed by `b`), `φ(Vb)` and `γ(Vb)` for the suffix
//!   `V` of length `j`. An entry exists whenever `Vb` occurs, so live depths
//!   always form a prefix `0..L_b`.
//!
//! Longest borders of left extensions come from a per-node buffer loaded
//! with `B^r(W)` and cleared by replaying the same pairs.
//!
//! Borders of right extensions use `X|b = bord(X)` when the longest border
//! of `X` is itself followed by `b` inside `X`, and the char stack entry at
//! depth `bord(X)` otherwise. Reading the char stack unconditionally would miss
//! the first case.

use crate::error::{Error, Result};
use crate::traversal::bits_for;

/// Per-suffix data kept on the path stack.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathEntry {
    /// First character of this suffix, i.e. the character prepended to reach this depth.
    pub lead: u8,
    pub pi: f64,
    /// `NaN` when not retained (restricted storage).
    pub phi: f64,
    pub gamma: f64,
    pub bord: u32,
    /// Whether this suffix is a maximal repeat.
    pub maximal: bool,
    br_start: u32,
    pushed_start: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct CharEntry {
    wb: u32,
    f: f64,
    g: f64,
}

const ABSENT: u32 = u32::MAX;

impl CharEntry {
    const BASE: Self = Self {
        wb: 0,
        f: 0.0,
        g: 0.0,
    };
    const PLACEHOLDER: Self = Self {
        wb: ABSENT,
        f: f64::NAN,
        g: f64::NAN,
    };

    fn is_placeholder(&self) -> bool {
        self.wb == ABSENT
    }
}

/// Border and variance data for a right extension `Xb`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtBorder {
    /// `X|b`.
    pub wb: u32,
    /// `bord(Xb)`.
    pub bord: u32,
    pub phi: f64,
    pub gamma: f64,
    /// `π(Xb)`.
    pub pi: f64,
}

/// Border data of a node, carried from the parent to the child frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeSeed {
    pub bord: u32,
    pub pi: f64,
    pub phi: f64,
    pub gamma: f64,
}

impl Default for NodeSeed {
    fn default() -> Self {
        Self {
            bord: 0,
            pi: 1.0,
            phi: 0.0,
            gamma: 0.0,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct BorderCounters {
    /// `|B^r(W)|` summed over every node entered.
    pub return_arcs: u64,
    /// Char stack entries pushed, root entries included.
    pub char_entries: u64,
    /// Placeholders pushed instead of entries under restricted storage.
    pub placeholders: u64,
    pub max_path_depth: usize,
}

#[derive(Debug, Clone)]
pub struct BorderEngine {
    probs: Vec<f64>,
    scoring_len: f64,
    path: Vec<PathEntry>,
    br_arena: Vec<(u8, u32)>,
    pushed: Vec<u8>,
    stacks: Vec<Vec<CharEntry>>,
    buffer: Vec<u32>,
    buffer_loaded: bool,
    /// Read requests per depth, over path and char stacks.
    reads: Vec<u64>,
    counters: BorderCounters,
    live_bits: u64,
    char_bits: u64,
    pos_bits: u64,
}

impl BorderEngine {
    /// `probs[c]` is the probability of code `c` (index 0, the terminator, unused);
    /// `scoring_len` is the text length used in the variance terms.
    pub fn new(probs: Vec<f64>, scoring_len: usize) -> Self {
        let sigma = probs.len() - 1;
        Self {
            stacks: vec![Vec::new(); sigma + 1],
            buffer: vec![0; sigma + 1],
            buffer_loaded: false,
            probs,
            scoring_len: scoring_len as f64,
            path: Vec::new(),
            br_arena: Vec::new(),
            pushed: Vec::new(),
            reads: Vec::new(),
            counters: BorderCounters::default(),
            live_bits: 0,
            char_bits: bits_for(sigma),
            pos_bits: bits_for(scoring_len + 1),
        }
    }

    /// Depth of the current path top, `None` before the root is entered.
    pub fn depth(&self) -> Option<usize> {
        self.path.len().checked_sub(1)
    }

    pub fn entry(&self, depth: usize) -> &PathEntry {
        &self.path[depth]
    }

    /// `B^r` of the suffix at `depth`, ascending by character.
    pub fn br_set(&self, depth: usize) -> &[(u8, u32)] {
        let start = self.path[depth].br_start as usize;
        let end = self
            .path
            .get(depth + 1)
            .map_or(self.br_arena.len(), |e| e.br_start as usize);
        &self.br_arena[start..end]
    }

    /// Depth of the top entry of char stack `b`, if any.
    pub fn char_stack_top(&self, b: u8) -> Option<usize> {
        self.stacks[b as usize].len().checked_sub(1)
    }

    pub fn counters(&self) -> &BorderCounters {
        &self.counters
    }

    pub fn read_histogram(&self) -> &[u64] {
        &self.reads
    }

    pub fn live_bits(&self) -> u64 {
        self.live_bits
    }

    pub fn buffer_is_clear(&self) -> bool {
        self.buffer.iter().all(|&v| v == 0)
    }

    #[inline]
    pub fn prob(&self, code: u8) -> f64 {
        self.probs[code as usize]
    }

    /// The current node spelled left to right.
    pub fn spell(&self) -> impl DoubleEndedIterator<Item = u8> + ExactSizeIterator + '_ {
        self.path[1..].iter().rev().map(|e| e.lead)
    }

    #[inline]
    fn note_read(&mut self, depth: usize) {
        if self.reads.len() <= depth {
            self.reads.resize(depth + 1, 0);
        }
        self.reads[depth] += 1;
    }

    #[inline]
    fn path_pi(&mut self, depth: usize) -> f64 {
        self.note_read(depth);
        self.path[depth].pi
    }

    fn char_entry(&mut self, b: u8, depth: usize) -> Result<CharEntry> {
        self.note_read(depth);
        match self.stacks[b as usize].get(depth) {
            Some(e) if !e.is_placeholder() => Ok(*e),
            Some(_) => Err(Error::Desync(format!(
                "char stack {b} read at depth {depth} hit a dropped entry"
            ))),
            None => Err(Error::Desync(format!(
                "char stack {b} has no entry at depth {depth}"
            ))),
        }
    }

    /// Character at offset `p` of `X = a · (path suffix of length x_len - 1)`.
    #[inline]
    fn char_at(&self, a: u8, x_len: usize, p: usize) -> u8 {
        if p == 0 {
            a
        } else {
            self.path[x_len - p].lead
        }
    }

    /// `(φ, γ)` of a string of length `m` whose longest border has length
    /// `bord`, the string being the path top or a left extension of it.
    pub fn node_phi_gamma(&mut self, bord: u32, m: usize) -> Result<(f64, f64)> {
        if bord == 0 {
            return Ok((0.0, 0.0));
        }
        let b = bord as usize;
        self.note_read(b);
        let border = self.path[b];
        if border.phi.is_nan() {
            return Err(Error::Desync(format!(
                "variance data of the border at depth {b} was not retained"
            )));
        }
        let delta = self.path_pi(m - b);
        let phi = delta
            * (border.phi - 2.0 * (m - b) as f64 * border.gamma + self.scoring_len - 2.0 * m as f64
                + b as f64
                + 1.0);
        let gamma = delta * (1.0 + border.gamma);
        Ok((phi, gamma))
    }

    /// Enters the root `ε`, seeding char stacks for its right extensions.
    pub fn enter_root(&mut self, right_chars: &[u8]) -> Result<()> {
        if !self.path.is_empty() {
            return Err(Error::Desync("root entered twice".into()));
        }
        self.path.push(PathEntry {
            lead: 0,
            pi: 1.0,
            phi: 0.0,
            gamma: 0.0,
            bord: 0,
            maximal: true,
            br_start: 0,
            pushed_start: 0,
        });
        self.live_bits += self.entry_bits(0, true);
        for &b in right_chars.iter().filter(|&&b| b != 0) {
            self.push_char(b, 0, CharEntry::BASE)?;
        }
        Ok(())
    }

    /// Enters node `X = lead · (current top)` of length `len`. `seed` carries
    /// `bord(X)`, `π(X)` and, unless they are still to be computed,
    /// `φ(X)`/`γ(X)`. Char stack entries are computed for every nonzero
    /// `b` in `right_chars`; with `retain == false` only placeholders are pushed.
    pub fn enter(
        &mut self,
        lead: u8,
        len: usize,
        seed: NodeSeed,
        maximal: bool,
        right_chars: &[u8],
        retain: bool,
    ) -> Result<()> {
        if self.path.len() != len {
            return Err(Error::Desync(format!(
                "entering length {len} with path depth {:?}",
                self.depth()
            )));
        }
        let bord = seed.bord as usize;
        if bord >= len {
            return Err(Error::Desync(format!("border {bord} of a length-{len} node")));
        }

        // B^r(X) = B^r(V) with (d, bord) upserted, V the longest border.
        let br_start = self.br_arena.len();
        if bord > 0 {
            self.note_read(bord);
            let src = self.br_set(bord).to_vec();
            let d = self.char_at(lead, len, len - bord - 1);
            let mut inserted = false;
            for (c, v) in src {
                if !inserted && c >= d {
                    self.br_arena.push((d, bord as u32));
                    inserted = true;
                    if c == d {
                        continue;
                    }
                }
                self.br_arena.push((c, v));
            }
            if !inserted {
                self.br_arena.push((d, bord as u32));
            }
        }
        let br_len = self.br_arena.len() - br_start;
        self.counters.return_arcs += br_len as u64;

        self.path.push(PathEntry {
            lead,
            pi: seed.pi,
            phi: seed.phi,
            gamma: seed.gamma,
            bord: seed.bord,
            maximal,
            br_start: br_start as u32,
            pushed_start: self.pushed.len() as u32,
        });
        self.live_bits += self.entry_bits(br_len, !seed.phi.is_nan());
        self.counters.max_path_depth = self.counters.max_path_depth.max(len);

        for &b in right_chars.iter().filter(|&&b| b != 0) {
            let entry = if retain {
                let ext = self.extension(lead, len, seed.bord, seed.pi, b)?;
                CharEntry {
                    wb: ext.wb,
                    f: ext.phi,
                    g: ext.gamma,
                }
            } else {
                CharEntry::PLACEHOLDER
            };
            self.push_char(b, len, entry)?;
        }
        Ok(())
    }

    fn push_char(&mut self, b: u8, depth: usize, entry: CharEntry) -> Result<()> {
        let stack = &mut self.stacks[b as usize];
        if stack.len() != depth {
            return Err(Error::Desync(format!(
                "char stack {b} holds {} entries, pushing depth {depth}",
                stack.len()
            )));
        }
        stack.push(entry);
        self.pushed.push(b);
        if entry.is_placeholder() {
            self.counters.placeholders += 1;
            self.live_bits += 1;
        } else {
            self.counters.char_entries += 1;
            self.live_bits += self.pos_bits + 128;
        }
        Ok(())
    }

    fn entry_bits(&self, br_len: usize, with_scores: bool) -> u64 {
        self.char_bits
            + 64
            + self.pos_bits
            + if with_scores { 128 } else { 0 }
            + br_len as u64 * (self.char_bits + self.pos_bits)
    }

    /// Leaves the node at `depth`, which must be the path top.
    pub fn exit(&mut self, depth: usize) -> Result<()> {
        if self.depth() != Some(depth) {
            return Err(Error::Desync(format!(
                "exit from depth {depth} with path depth {:?}",
                self.depth()
            )));
        }
        let entry = self.path.pop().expect("nonempty path");
        let br_len = self.br_arena.len() - entry.br_start as usize;
        self.live_bits -= self.entry_bits(br_len, !entry.phi.is_nan());
        self.br_arena.truncate(entry.br_start as usize);
        for b in self.pushed.drain(entry.pushed_start as usize..) {
            let e = self.stacks[b as usize].pop();
            match e {
                Some(e) if e.is_placeholder() => self.live_bits -= 1,
                Some(_) => self.live_bits -= self.pos_bits + 128,
                None => return Err(Error::Desync(format!("char stack {b} underflow"))),
            }
        }
        Ok(())
    }

    /// Writes `B^r` of the path top into the buffer.
    pub fn load_buffer(&mut self) {
        debug_assert!(!self.buffer_loaded);
        let top = self.path.len() - 1;
        let start = self.path[top].br_start as usize;
        for &(c, v) in &self.br_arena[start..] {
            self.buffer[c as usize] = v;
        }
        self.buffer_loaded = true;
    }

    /// Clears the buffer by replaying `B^r` of the path top.
    pub fn reset_buffer(&mut self) {
        let top = self.path.len() - 1;
        let start = self.path[top].br_start as usize;
        for &(c, _) in &self.br_arena[start..] {
            self.buffer[c as usize] = 0;
        }
        self.buffer_loaded = false;
    }

    /// `bord(aW)` for the path top `W`; the buffer must be loaded.
    pub fn left_border(&self, a: u8) -> u32 {
        debug_assert!(self.buffer_loaded);
        let v = self.buffer[a as usize];
        if v > 0 {
            v + 1
        } else if self.path.len() > 1 && self.path[1].lead == a {
            1
        } else {
            0
        }
    }

    /// Border data of `Xb`, where `X = a · (path suffix of length x_len - 1)`
    /// has longest border `x_bord` and probability `x_pi`. `X` is either the
    /// path top (`x_len` = depth) or a left extension of it (`x_len` = depth + 1);
    /// char stack `b` must reach depth `x_bord`.
    pub fn extension(&mut self, a: u8, x_len: usize, x_bord: u32, x_pi: f64, b: u8) -> Result<ExtBorder> {
        let pi = x_pi * self.prob(b);
        if x_len == 0 {
            return Ok(ExtBorder {
                wb: 0,
                bord: 0,
                phi: 0.0,
                gamma: 0.0,
                pi,
            });
        }
        let beta = x_bord as usize;
        let wb = if beta == 0 {
            0
        } else if self.char_at(a, x_len, beta) == b {
            x_bord
        } else {
            self.char_entry(b, beta)?.wb
        };
        let bord = if wb > 0 {
            wb + 1
        } else if a == b {
            1
        } else {
            0
        };
        let (phi, gamma) = if bord == 0 {
            (0.0, 0.0)
        } else {
            let w = bord as usize - 1;
            let inner = self.char_entry(b, w)?;
            let m = (x_len + 1) as f64;
            let bl = bord as f64;
            let delta = self.path_pi(x_len - w - 1) * self.prob(b);
            (
                delta * (inner.f - 2.0 * (m - bl) * inner.g + self.scoring_len - 2.0 * m + bl + 1.0),
                delta * (1.0 + inner.g),
            )
        };
        Ok(ExtBorder {
            wb,
            bord,
            phi,
            gamma,
            pi,
        })
    }

    /// Border data of `Wb` for the path top `W`, read from the entry pushed on enter.
    pub fn top_extension(&mut self, b: u8) -> Result<ExtBorder> {
        let top = self.path.len() - 1;
        let e = self.char_entry(b, top)?;
        let lead = self.path[top].lead;
        let bord = if e.wb > 0 {
            e.wb + 1
        } else if top > 0 && lead == b {
            1
        } else {
            0
        };
        Ok(ExtBorder {
            wb: e.wb,
            bord,
            phi: e.f,
            gamma: e.g,
            pi: self.path[top].pi * self.prob(b),
        })
    }

    /// All border lengths of the path suffix at `depth`, longest first,
    /// paired with `π` of the suffix that follows each border.
    pub fn node_borders(&mut self, depth: usize) -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        let mut l = self.path[depth].bord as usize;
        while l > 0 {
            let pi = self.path_pi(depth - l);
            out.push((l, pi));
            l = self.path[l].bord as usize;
        }
        out
    }

    /// All border lengths of `Xb` given `bord(Xb)` (as returned by
    /// [`extension`](Self::extension)), longest first, paired with `π` of the
    /// suffix of `Xb` that follows each border.
    pub fn extension_borders(&mut self, x_len: usize, first: u32, b: u8) -> Result<Vec<(usize, f64)>> {
        let mut out = Vec::new();
        let mut l = first as usize;
        let pb = self.prob(b);
        while l > 0 {
            let pi = self.path_pi(x_len - l) * pb;
            out.push((l, pi));
            // the border is (path suffix of length l - 1) · b
            let w = l - 1;
            if w == 0 {
                break;
            }
            let v = self.char_entry(b, w)?.wb;
            l = if v > 0 {
                v as usize + 1
            } else if self.path[w].lead == b {
                1
            } else {
                0
            };
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn engine(sigma: usize) -> BorderEngine {
        BorderEngine::new(
            std::iter::once(0.0)
                .chain(std::iter::repeat_n(1.0 / sigma as f64, sigma))
                .collect(),
            10,
        )
    }

    fn seed(bord: u32) -> NodeSeed {
        NodeSeed {
            bord,
            ..NodeSeed::default()
        }
    }

    #[test]
    fn exit_restores_stacks() {
        let mut e = engine(2);
        e.enter_root(&[0, 1, 2]).unwrap();
        e.enter(1, 1, seed(0), true, &[0, 1, 2], true).unwrap();
        e.enter(2, 2, seed(0), false, &[1, 2], true).unwrap();
        assert_eq!(e.char_stack_top(1), Some(2));
        e.exit(2).unwrap();
        assert_eq!(e.char_stack_top(1), Some(1));
        assert_eq!(e.char_stack_top(2), Some(1));
        e.enter(1, 2, seed(1), false, &[2], true).unwrap();
        assert_eq!(e.char_stack_top(1), Some(1));
        assert_eq!(e.char_stack_top(2), Some(2));
        e.exit(2).unwrap();
        e.exit(1).unwrap();
        assert_eq!(e.char_stack_top(1), Some(0));
        e.exit(0).unwrap();
        assert_eq!(e.depth(), None);
        assert_eq!(e.live_bits(), 0);
        assert!(e.exit(0).is_err());
    }

    #[test]
    fn desync_detected() {
        let mut e = engine(2);
        e.enter_root(&[1, 2]).unwrap();
        assert!(matches!(e.enter(1, 2, seed(0), true, &[1], true), Err(Error::Desync(_))));
        assert!(matches!(e.exit(3), Err(Error::Desync(_))));
    }

    #[test]
    fn buffer_round_trip() {
        let mut e = engine(3);
        e.enter_root(&[1, 2, 3]).unwrap();
        // node "a" then "aa" with border 1
        e.enter(1, 1, seed(0), true, &[1, 2], true).unwrap();
        e.enter(1, 2, seed(1), true, &[2], true).unwrap();
        assert_eq!(e.br_set(2), &[(1, 1)]);
        e.load_buffer();
        assert_eq!(e.left_border(1), 2);
        assert_eq!(e.left_border(2), 1 - 1);
        e.reset_buffer();
        assert!(e.buffer_is_clear());
    }
}
