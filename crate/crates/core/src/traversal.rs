//! Depth-first traversal of the suffix-link tree driven by the BWT.
//!
//! A substring `W` is represented by the intervals of its right extensions
//! ([`Repr`]). [`extend_left`] turns `repr(W)` into `repr(aW)` for every left
//! extension `a`; right-maximal extensions become new frames on an explicit
//! stack. Children are pushed largest interval first so the smallest is
//! explored next, which keeps the number of live frames logarithmic.
//!
//! The visitor sees properly nested `enter`/`exit` events: exits are
//! synthesized from frame lengths, so visitor-side stacks indexed by depth
//! always mirror the current path of suffixes.

use std::ops::Range;

use serde::Serialize;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::index::BwtIndex;

/// Right extensions of a substring `W`: `chars` ascending, and the interval
/// of `W chars[i]` is `first[i]..first[i + 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Repr {
    chars: SmallVec<[u8; 8]>,
    first: SmallVec<[usize; 9]>,
}

impl Repr {
    /// Builds a repr from parts, validating the shape.
    pub fn new(chars: &[u8], first: &[usize]) -> Result<Self> {
        let ok = !chars.is_empty()
            && first.len() == chars.len() + 1
            && chars.windows(2).all(|w| w[0] < w[1])
            && first.windows(2).all(|w| w[0] < w[1]);
        if !ok {
            return Err(Error::Config(format!(
                "malformed repr: chars {chars:?}, first {first:?}"
            )));
        }
        Ok(Self {
            chars: chars.into(),
            first: first.into(),
        })
    }

    /// `repr(ε)`: one entry per code occurring in the text.
    pub fn root(index: &BwtIndex) -> Self {
        let c = index.c_array();
        let mut repr = Self::default();
        for code in 0..=index.sigma() {
            if c[code + 1] > c[code] {
                repr.chars.push(code as u8);
                repr.first.push(c[code]);
            }
        }
        repr.first.push(index.len());
        repr
    }

    pub fn chars(&self) -> &[u8] {
        &self.chars
    }

    pub fn first(&self) -> &[usize] {
        &self.first
    }

    /// Number of distinct right extensions.
    pub fn k(&self) -> usize {
        self.chars.len()
    }

    pub fn is_right_maximal(&self) -> bool {
        self.chars.len() > 1
    }

    pub fn interval(&self) -> Range<usize> {
        self.first[0]..self.first[self.chars.len()]
    }

    /// Number of occurrences of the represented string.
    pub fn width(&self) -> usize {
        self.first[self.chars.len()] - self.first[0]
    }

    pub fn child_interval(&self, i: usize) -> Range<usize> {
        self.first[i]..self.first[i + 1]
    }

    /// Interval of `W b`, if `b` is a right extension.
    pub fn extension(&self, b: u8) -> Option<Range<usize>> {
        self.chars
            .binary_search(&b)
            .ok()
            .map(|i| self.child_interval(i))
    }

    pub fn count_of(&self, b: u8) -> usize {
        self.extension(b).map_or(0, |r| r.len())
    }

    pub fn contains(&self, b: u8) -> bool {
        self.chars.binary_search(&b).is_ok()
    }

    /// Iterates `(b, count of W b)` in ascending `b`.
    pub fn counts(&self) -> impl Iterator<Item = (u8, usize)> + '_ {
        self.chars
            .iter()
            .enumerate()
            .map(|(i, &b)| (b, self.first[i + 1] - self.first[i]))
    }

    /// Stack footprint of this repr with the given field widths.
    pub fn bits(&self, char_bits: u64, pos_bits: u64) -> u64 {
        self.chars.len() as u64 * char_bits + self.first.len() as u64 * pos_bits
    }
}

/// A left extension `aW` of the current node together with `repr(aW)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeftExtension {
    pub code: u8,
    pub repr: Repr,
}

/// Reusable buffers for [`extend_left`].
#[derive(Debug, Clone)]
pub struct ExtendScratch {
    slot: Vec<u32>,
    hits: Vec<(u8, usize, usize)>,
}

const NO_SLOT: u32 = u32::MAX;

impl ExtendScratch {
    pub fn new(sigma: usize) -> Self {
        Self {
            slot: vec![NO_SLOT; sigma + 1],
            hits: Vec::with_capacity(sigma + 1),
        }
    }
}

/// Computes every left extension `aW` of the string represented by `repr`,
/// appending `(a, repr(aW))` to `out` in no particular order.
///
/// Each right-extension interval is queried separately with
/// `range_distinct`; the answers are bucketed per left character through
/// `scratch.slot`, which is restored to all-empty before returning.
pub fn extend_left(
    index: &BwtIndex,
    repr: &Repr,
    scratch: &mut ExtendScratch,
    out: &mut Vec<LeftExtension>,
) {
    let base = out.len();
    // upper end of the last interval appended for each extension
    let mut ends: SmallVec<[usize; 16]> = SmallVec::new();
    for (i, &b) in repr.chars.iter().enumerate() {
        scratch.hits.clear();
        index.range_distinct_into(repr.first[i], repr.first[i + 1], &mut scratch.hits);
        for &(a, lo, hi) in &scratch.hits {
            let offset = index.c(a);
            let slot = &mut scratch.slot[a as usize];
            if *slot == NO_SLOT {
                *slot = (out.len() - base) as u32;
                let mut ext = Repr::default();
                ext.chars.push(b);
                ext.first.push(offset + lo);
                out.push(LeftExtension { code: a, repr: ext });
                ends.push(offset + hi);
            } else {
                let j = *slot as usize;
                let ext = &mut out[base + j].repr;
                ext.chars.push(b);
                ext.first.push(offset + lo);
                ends[j] = offset + hi;
            }
        }
    }
    for (j, ext) in out[base..].iter_mut().enumerate() {
        ext.repr.first.push(ends[j]);
        scratch.slot[ext.code as usize] = NO_SLOT;
    }
}

/// Payload of an `enter` event.
#[derive(Debug)]
pub struct NodeEvent<'a, S> {
    pub repr: &'a Repr,
    /// `|W|`; the root `ε` has length 0.
    pub length: usize,
    /// The character `a` with which this node was reached from its parent `W'` (`W = aW'`).
    pub lead: Option<u8>,
    pub seed: &'a S,
    pub extensions: &'a [LeftExtension],
}

impl<S> NodeEvent<'_, S> {
    pub fn is_root(&self) -> bool {
        self.length == 0
    }

    /// Distinct left extensions, counting the terminator.
    pub fn left_degree(&self) -> usize {
        self.extensions.len()
    }
}

/// Receives traversal events. `enter` may attach one seed per left extension
/// (same order as `node.extensions`); the seed travels with the child frame
/// and is handed back when that child is entered.
pub trait Visitor {
    type Seed: Default;

    /// Stack footprint in bits of one seed, for telemetry.
    const SEED_BITS: u64 = 0;

    fn enter(&mut self, node: &NodeEvent<'_, Self::Seed>, child_seeds: &mut Vec<Self::Seed>) -> Result<()>;

    /// The node at `depth` is left; every deeper node was already exited.
    fn exit(&mut self, depth: usize) -> Result<()>;

    /// Live auxiliary stack bits held by the visitor.
    fn aux_bits(&self) -> u64 {
        0
    }
}

/// Seedless observer, for callers that only watch the traversal.
pub trait Observer {
    fn enter(&mut self, node: &NodeEvent<'_, ()>) -> Result<()>;
    fn exit(&mut self, depth: usize) -> Result<()>;
}

/// Fans events out to several observers in registration order.
pub struct Observers<'a>(pub Vec<&'a mut dyn Observer>);

impl Visitor for Observers<'_> {
    type Seed = ();

    fn enter(&mut self, node: &NodeEvent<'_, ()>, _: &mut Vec<()>) -> Result<()> {
        self.0.iter_mut().try_for_each(|o| o.enter(node))
    }

    fn exit(&mut self, depth: usize) -> Result<()> {
        self.0.iter_mut().try_for_each(|o| o.exit(depth))
    }
}

/// A pending node on the traversal stack.
#[derive(Debug, Clone)]
pub struct Frame<S> {
    pub repr: Repr,
    pub length: usize,
    pub lead: Option<u8>,
    pub seed: S,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct TraversalConfig {
    /// Nodes longer than this are not entered.
    pub max_depth: Option<usize>,
    /// Record a stack-size sample every this many nodes (0 = never).
    pub sample_every: u64,
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq, Eq)]
pub struct StackSample {
    pub node: u64,
    pub depth: usize,
    pub frames: usize,
    pub frame_bits: u64,
    pub aux_bits: u64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct TraversalStats {
    /// Right-maximal nodes entered, root included.
    pub nodes: u64,
    pub max_frames: usize,
    /// Peak of frame bits plus visitor bits.
    pub max_stack_bits: u64,
    /// Sum over nodes of the live stack bits, for averaging.
    pub total_stack_bits: u128,
    /// Left extensions returned over all nodes (explicit and implicit Weiner links).
    pub left_extensions: u64,
    /// Entered nodes per depth.
    pub depth_histogram: Vec<u64>,
    pub max_depth: usize,
    pub samples: Vec<StackSample>,
}

impl TraversalStats {
    pub fn average_stack_bits(&self) -> f64 {
        if self.nodes == 0 {
            0.0
        } else {
            self.total_stack_bits as f64 / self.nodes as f64
        }
    }
}

pub(crate) fn bits_for(max_value: usize) -> u64 {
    u64::from(usize::BITS - max_value.leading_zeros()).max(1)
}

/// Runs the traversal from `repr(ε)` and drives `visitor`.
pub fn traverse<V: Visitor>(index: &BwtIndex, visitor: &mut V, config: TraversalConfig) -> Result<TraversalStats> {
    let char_bits = bits_for(index.sigma());
    let pos_bits = bits_for(index.len());
    let frame_bits = |f: &Frame<V::Seed>| f.repr.bits(char_bits, pos_bits) + pos_bits + char_bits + V::SEED_BITS;

    let mut stats = TraversalStats::default();
    let mut scratch = ExtendScratch::new(index.sigma());
    let mut extensions: Vec<LeftExtension> = Vec::new();
    let mut seeds: Vec<V::Seed> = Vec::new();
    let mut order: Vec<usize> = Vec::new();

    let root = Frame {
        repr: Repr::root(index),
        length: 0,
        lead: None,
        seed: V::Seed::default(),
    };
    let mut live_frame_bits = frame_bits(&root);
    let mut stack = vec![root];
    stats.max_frames = 1;
    let mut depth: Option<usize> = None;

    while let Some(frame) = stack.pop() {
        live_frame_bits -= frame_bits(&frame);
        if let Some(d) = depth {
            if frame.length == 0 || frame.length > d + 1 {
                return Err(Error::Desync(format!(
                    "frame of length {} popped at depth {d}",
                    frame.length
                )));
            }
            for x in (frame.length..=d).rev() {
                visitor.exit(x)?;
            }
        }
        depth = Some(frame.length);

        extensions.clear();
        extend_left(index, &frame.repr, &mut scratch, &mut extensions);
        seeds.clear();
        let event = NodeEvent {
            repr: &frame.repr,
            length: frame.length,
            lead: frame.lead,
            seed: &frame.seed,
            extensions: &extensions,
        };
        visitor.enter(&event, &mut seeds)?;

        stats.nodes += 1;
        stats.left_extensions += extensions.len() as u64;
        if stats.depth_histogram.len() <= frame.length {
            stats.depth_histogram.resize(frame.length + 1, 0);
        }
        stats.depth_histogram[frame.length] += 1;
        stats.max_depth = stats.max_depth.max(frame.length);

        let child_len = frame.length + 1;
        if config.max_depth.is_none_or(|m| child_len <= m) {
            order.clear();
            order.extend((0..extensions.len()).filter(|&i| extensions[i].repr.is_right_maximal()));
            order.sort_by_key(|&i| std::cmp::Reverse(extensions[i].repr.width()));
            let seeded = seeds.len() == extensions.len();
            for &i in &order {
                let seed = if seeded {
                    std::mem::take(&mut seeds[i])
                } else {
                    V::Seed::default()
                };
                let child = Frame {
                    repr: std::mem::take(&mut extensions[i].repr),
                    length: child_len,
                    lead: Some(extensions[i].code),
                    seed,
                };
                live_frame_bits += frame_bits(&child);
                stack.push(child);
            }
        }
        stats.max_frames = stats.max_frames.max(stack.len());

        let live = live_frame_bits + visitor.aux_bits();
        stats.max_stack_bits = stats.max_stack_bits.max(live);
        stats.total_stack_bits += u128::from(live);
        if config.sample_every > 0 && (stats.nodes - 1) % config.sample_every == 0 {
            stats.samples.push(StackSample {
                node: stats.nodes,
                depth: frame.length,
                frames: stack.len(),
                frame_bits: live_frame_bits,
                aux_bits: visitor.aux_bits(),
            });
        }
    }

    if let Some(d) = depth {
        for x in (0..=d).rev() {
            visitor.exit(x)?;
        }
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::{ingest, Format, Text};

    fn build(s: &[u8]) -> (Text, BwtIndex) {
        let t = ingest(s, Format::Plain).unwrap();
        let idx = BwtIndex::build(&t);
        (t, idx)
    }

    /// Records spelled node strings by tracking lead characters per depth.
    #[derive(Default)]
    struct Spell {
        path: Vec<u8>,
        nodes: Vec<(Vec<u8>, usize)>,
        events: Vec<(bool, usize)>,
    }

    impl Observer for Spell {
        fn enter(&mut self, node: &NodeEvent<'_, ()>) -> Result<()> {
            if let Some(a) = node.lead {
                assert_eq!(self.path.len() + 1, node.length);
                self.path.push(a);
            }
            let spelled: Vec<u8> = self.path.iter().rev().copied().collect();
            assert_eq!(spelled.len(), node.length);
            self.nodes.push((spelled, node.repr.width()));
            self.events.push((true, node.length));
            Ok(())
        }

        fn exit(&mut self, depth: usize) -> Result<()> {
            assert_eq!(self.path.len(), depth);
            self.path.pop();
            self.events.push((false, depth));
            Ok(())
        }
    }

    fn right_maximal(s: &[u8]) -> Vec<String> {
        let (t, idx) = build(s);
        let mut spell = Spell::default();
        traverse(&idx, &mut Observers(vec![&mut spell]), TraversalConfig::default()).unwrap();
        let mut out: Vec<String> = spell.nodes.iter().map(|(w, _)| t.render(w)).collect();
        out.sort();
        out
    }

    #[test]
    fn banana_nodes() {
        assert_eq!(right_maximal(b"banana"), vec!["", "a", "ana", "na"]);
    }

    #[test]
    fn run_nodes() {
        assert_eq!(right_maximal(b"aaaa"), vec!["", "a", "aa", "aaa"]);
    }

    #[test]
    fn distinct_chars_only_root() {
        assert_eq!(right_maximal(b"abcdefg"), vec![""]);
    }

    #[test]
    fn extend_left_ana() {
        let (t, idx) = build(b"banana");
        let ana = t.encode(b"ana").unwrap();
        let iv = idx.backward_search(&ana).unwrap();
        // "ana" continues with # and n
        let anan = idx.backward_search(&t.encode(b"anan").unwrap()).unwrap();
        let repr = Repr::new(&[0, 3], &[iv.start, anan.start, iv.end]).unwrap();
        let mut scratch = ExtendScratch::new(idx.sigma());
        let mut out = Vec::new();
        extend_left(&idx, &repr, &mut scratch, &mut out);
        let mut codes: Vec<u8> = out.iter().map(|e| e.code).collect();
        codes.sort();
        assert_eq!(codes, vec![t.code_of(b'b').unwrap(), t.code_of(b'n').unwrap()]);
        for e in &out {
            assert_eq!(e.repr.k(), 1);
            assert_eq!(e.repr.width(), 1);
        }
        assert!(scratch.slot.iter().all(|&s| s == NO_SLOT));
    }

    #[test]
    fn extend_left_root_gives_all_codes() {
        let (_, idx) = build(b"banana");
        let mut scratch = ExtendScratch::new(idx.sigma());
        let mut out = Vec::new();
        extend_left(&idx, &Repr::root(&idx), &mut scratch, &mut out);
        let mut codes: Vec<u8> = out.iter().map(|e| e.code).collect();
        codes.sort();
        assert_eq!(codes, vec![0, 1, 2, 3]);
        let total: usize = out.iter().map(|e| e.repr.width()).sum();
        assert_eq!(total, 7);
    }

    #[test]
    fn extend_left_single_predecessor() {
        // "ab" occurs twice, both times preceded by 'x'
        let (t, idx) = build(b"xabyxabz");
        let ab = t.encode(b"ab").unwrap();
        let iv = idx.backward_search(&ab).unwrap();
        assert_eq!(iv.len(), 2);
        let b = t.code_of(b'b').unwrap();
        let repr = Repr::new(&[b], &[iv.start, iv.end]).unwrap();
        let mut out = Vec::new();
        extend_left(&idx, &repr, &mut ExtendScratch::new(idx.sigma()), &mut out);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].code, t.code_of(b'x').unwrap());
    }

    #[test]
    fn events_nest() {
        let (_, idx) = build(b"abracadabra");
        let mut spell = Spell::default();
        traverse(&idx, &mut Observers(vec![&mut spell]), TraversalConfig::default()).unwrap();
        let mut depth: isize = -1;
        for &(enter, len) in &spell.events {
            if enter {
                assert_eq!(len as isize, depth + 1);
                depth += 1;
            } else {
                assert_eq!(len as isize, depth);
                depth -= 1;
            }
        }
        assert_eq!(depth, -1);
    }

    #[test]
    fn max_depth_prunes() {
        let (_, idx) = build(b"aaaaaaaa");
        let mut spell = Spell::default();
        let cfg = TraversalConfig {
            max_depth: Some(3),
            ..Default::default()
        };
        let stats = traverse(&idx, &mut Observers(vec![&mut spell]), cfg).unwrap();
        assert_eq!(stats.nodes, 4);
        assert_eq!(stats.max_depth, 3);
    }

    struct Failing;
    impl Observer for Failing {
        fn enter(&mut self, node: &NodeEvent<'_, ()>) -> Result<()> {
            if node.length == 1 {
                return Err(Error::Observer("boom".into()));
            }
            Ok(())
        }
        fn exit(&mut self, _: usize) -> Result<()> {
            Ok(())
        }
    }

    #[test]
    fn observer_failure_aborts() {
        let (_, idx) = build(b"banana");
        let r = traverse(&idx, &mut Observers(vec![&mut Failing]), TraversalConfig::default());
        assert!(matches!(r, Err(Error::Observer(_))));
    }
}
