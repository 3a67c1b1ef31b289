//! Balanced wavelet tree over a small integer alphabet.
//!
//! Each internal node splits its code range `[lo, hi]` at `mid = (lo + hi) / 2`
//! and stores one bit per symbol of its subsequence (1 = right half). Leaves
//! are implicit. `range_distinct` walks only the subtrees whose mapped range
//! is nonempty, so its cost is proportional to the output size times the
//! tree height.

use crate::bitvec::RankBitVec;

#[derive(Debug, Clone)]
struct Node {
    bits: RankBitVec,
    lo: u8,
    mid: u8,
    hi: u8,
    left: Option<u32>,
    right: Option<u32>,
}

#[derive(Debug, Clone)]
pub struct WaveletTree {
    nodes: Vec<Node>,
    len: usize,
    max_code: u8,
}

impl WaveletTree {
    /// Builds the tree over `seq`, whose codes must lie in `0..=max_code`.
    pub fn new(seq: &[u8], max_code: u8) -> Self {
        debug_assert!(seq.iter().all(|&c| c <= max_code));
        let mut tree = Self {
            nodes: Vec::new(),
            len: seq.len(),
            max_code,
        };
        if max_code > 0 {
            tree.build(seq.to_vec(), 0, max_code);
        }
        tree
    }

    fn build(&mut self, seq: Vec<u8>, lo: u8, hi: u8) -> u32 {
        let mid = ((lo as u16 + hi as u16) / 2) as u8;
        let bits = RankBitVec::from_bits(seq.iter().map(|&c| c > mid));
        let id = self.nodes.len() as u32;
        self.nodes.push(Node {
            bits,
            lo,
            mid,
            hi,
            left: None,
            right: None,
        });
        let (left_seq, right_seq): (Vec<u8>, Vec<u8>) = if lo < mid || mid + 1 < hi {
            seq.iter().partition(|&&c| c <= mid)
        } else {
            (Vec::new(), Vec::new())
        };
        drop(seq);
        if lo < mid {
            let child = self.build(left_seq, lo, mid);
            self.nodes[id as usize].left = Some(child);
        }
        if mid + 1 < hi {
            let child = self.build(right_seq, mid + 1, hi);
            self.nodes[id as usize].right = Some(child);
        }
        id
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn height(&self) -> usize {
        fn depth(nodes: &[Node], id: Option<u32>) -> usize {
            match id {
                None => 0,
                Some(i) => {
                    let n = &nodes[i as usize];
                    1 + depth(nodes, n.left).max(depth(nodes, n.right))
                }
            }
        }
        depth(&self.nodes, (!self.nodes.is_empty()).then_some(0))
    }

    /// Occurrences of `code` in positions `0..i`.
    #[inline]
    pub fn rank(&self, code: u8, mut i: usize) -> usize {
        if self.nodes.is_empty() {
            return if code == 0 { i } else { 0 };
        }
        let mut id = 0u32;
        loop {
            let node = &self.nodes[id as usize];
            let next = if code <= node.mid {
                i = node.bits.rank0(i);
                node.left
            } else {
                i = node.bits.rank1(i);
                node.right
            };
            match next {
                Some(child) => id = child,
                None => return i,
            }
        }
    }

    pub fn access(&self, mut i: usize) -> u8 {
        if self.nodes.is_empty() {
            return 0;
        }
        let mut id = 0u32;
        loop {
            let node = &self.nodes[id as usize];
            let (next, leaf) = if node.bits.get(i) {
                i = node.bits.rank1(i);
                (node.right, node.mid + 1)
            } else {
                i = node.bits.rank0(i);
                (node.left, node.lo)
            };
            match next {
                Some(child) => id = child,
                None => return leaf,
            }
        }
    }

    /// Appends `(code, rank(code, start), rank(code, end))` for every code
    /// occurring in `start..end`, in increasing code order.
    pub fn range_distinct(&self, start: usize, end: usize, out: &mut Vec<(u8, usize, usize)>) {
        if start >= end {
            return;
        }
        if self.nodes.is_empty() {
            out.push((0, start, end));
            return;
        }
        self.descend(0, start, end, out);
    }

    fn descend(&self, id: u32, s: usize, e: usize, out: &mut Vec<(u8, usize, usize)>) {
        let node = &self.nodes[id as usize];
        let s1 = node.bits.rank1(s);
        let e1 = node.bits.rank1(e);
        let (s0, e0) = (s - s1, e - e1);
        if s0 < e0 {
            match node.left {
                Some(child) => self.descend(child, s0, e0, out),
                None => out.push((node.lo, s0, e0)),
            }
        }
        if s1 < e1 {
            match node.right {
                Some(child) => self.descend(child, s1, e1, out),
                None => out.push((node.hi, s1, e1)),
            }
        }
    }

    pub fn max_code(&self) -> u8 {
        self.max_code
    }

    pub fn size_in_bytes(&self) -> usize {
        self.nodes.iter().map(|n| n.bits.size_in_bytes() + 16).sum()
    }

    #[cfg(test)]
    fn check_ranges(&self) -> bool {
        self.nodes.iter().all(|n| n.lo <= n.mid && n.mid < n.hi)
    }
}
