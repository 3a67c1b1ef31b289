//! Classification of traversal nodes and of the strings `aWb` around a maximal repeat `W`.

use serde::Serialize;

use crate::text::TERMINATOR;
use crate::traversal::NodeEvent;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Class {
    RightMaximal,
    MaximalRepeat,
    MinimalRare,
    MinimalAbsent,
    RightExtension,
}

impl Class {
    /// Report label; occurring minimal rare words seen once are tagged unique.
    pub fn label(self, count: u64) -> &'static str {
        match self {
            Self::RightMaximal => "right_maximal",
            Self::MaximalRepeat => "maximal_repeat",
            Self::MinimalRare if count == 1 => "minimal_unique",
            Self::MinimalRare => "minimal_rare",
            Self::MinimalAbsent => "minimal_absent",
            Self::RightExtension => "right_extension",
        }
    }

    pub fn is_under(self) -> bool {
        matches!(self, Self::MinimalRare | Self::MinimalAbsent)
    }
}

/// A minimal rare or minimal absent word `aWb` around the node `W`;
/// `ext` indexes `a` in the node's left extensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Candidate {
    pub class: Class,
    pub ext: usize,
    pub a: u8,
    pub b: u8,
    pub count: usize,
}

/// Left-maximal on top of right-maximal, read off the left extensions
/// already in the event.
pub fn is_maximal_repeat<S>(node: &NodeEvent<'_, S>) -> bool {
    node.left_degree() >= 2
}

/// Appends every terminator-free `aWb` that is an occurring minimal rare word
/// or a minimal absent word, for a maximal repeat `W`. `freq` has `σ + 1`
/// zeroed slots and is zeroed again on return.
pub fn rare_and_absent<S>(node: &NodeEvent<'_, S>, freq: &mut [usize], out: &mut Vec<Candidate>) {
    for (b, count) in node.repr.counts() {
        freq[b as usize] = count;
    }
    for (ext, left) in node.extensions.iter().enumerate() {
        if left.code == TERMINATOR {
            continue;
        }
        let right_maximal = left.repr.is_right_maximal();
        for &b in node.repr.chars().iter().filter(|&&b| b != TERMINATOR) {
            let count = left.repr.count_of(b);
            let class = if count == 0 {
                Class::MinimalAbsent
            } else if right_maximal && count < freq[b as usize] {
                Class::MinimalRare
            } else {
                continue;
            };
            out.push(Candidate {
                class,
                ext,
                a: left.code,
                b,
                count,
            });
        }
    }
    for &b in node.repr.chars() {
        freq[b as usize] = 0;
    }
}

/// Occurring minimal rare words `aWb` of the maximal repeat `W`.
pub fn minimal_rare_occurring<S>(node: &NodeEvent<'_, S>, freq: &mut [usize]) -> Vec<Candidate> {
    let mut out = Vec::new();
    rare_and_absent(node, freq, &mut out);
    out.retain(|c| c.class == Class::MinimalRare);
    out
}

/// Minimal absent words `aWb` of the maximal repeat `W`.
pub fn minimal_absent<S>(node: &NodeEvent<'_, S>, freq: &mut [usize]) -> Vec<Candidate> {
    let mut out = Vec::new();
    rare_and_absent(node, freq, &mut out);
    out.retain(|c| c.class == Class::MinimalAbsent);
    out
}
