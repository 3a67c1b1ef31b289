#![allow(dead_code)]

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wordsurprise::{ingest, BwtIndex, Format, Text};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform text over the first `sigma` lowercase letters.
pub fn uniform_text(rng: &mut impl Rng, n: usize, sigma: u8) -> Vec<u8> {
    (0..n).map(|_| b'a' + rng.gen_range(0..sigma)).collect()
}

/// Text with extra structure: skewed letters, periodic stretches and copied blocks.
pub fn structured_text(rng: &mut impl Rng, n: usize, sigma: u8) -> Vec<u8> {
    let weights: Vec<u32> = (0..sigma).map(|i| 1 + u32::from(i) * u32::from(i)).collect();
    let dist = WeightedIndex::new(&weights).unwrap();
    let mut out: Vec<u8> = Vec::with_capacity(n);
    while out.len() < n {
        match rng.gen_range(0..4) {
            0 if out.len() > 8 => {
                let start = rng.gen_range(0..out.len() - 4);
                let len = rng.gen_range(2..=(out.len() - start).min(60));
                for i in 0..len {
                    out.push(out[start + i]);
                }
            }
            1 => {
                let period = rng.gen_range(1..=4);
                let unit: Vec<u8> = (0..period).map(|_| b'a' + dist.sample(rng) as u8).collect();
                for i in 0..rng.gen_range(2..30) {
                    out.push(unit[i % period]);
                }
            }
            _ => {
                for _ in 0..rng.gen_range(1..20) {
                    out.push(b'a' + dist.sample(rng) as u8);
                }
            }
        }
    }
    out.truncate(n);
    out
}

/// The test corpus: `count` texts with `n` in `10..=max_n` and `sigma` in `1..=8`,
/// alternating uniform and structured generation.
pub fn corpus(seed: u64, count: usize, max_n: usize) -> Vec<Vec<u8>> {
    let mut rng = rng(seed);
    (0..count)
        .map(|i| {
            let n = rng.gen_range(10..=max_n);
            let sigma = rng.gen_range(1..=8u8);
            if i % 2 == 0 {
                uniform_text(&mut rng, n, sigma)
            } else {
                structured_text(&mut rng, n, sigma)
            }
        })
        .collect()
}

/// DNA-like sequence: skewed base composition and mutated copies of earlier blocks.
pub fn dna_like(rng: &mut impl Rng, n: usize) -> Vec<u8> {
    const BASES: &[u8; 4] = b"ACGT";
    let dist = WeightedIndex::new([30, 20, 20, 30]).unwrap();
    let mut out: Vec<u8> = Vec::with_capacity(n);
    while out.len() < n {
        if out.len() > 10_000 && rng.gen_bool(0.05) {
            let len = rng.gen_range(50..500);
            let start = rng.gen_range(0..out.len() - len);
            for i in 0..len {
                let c = if rng.gen_bool(0.01) {
                    BASES[dist.sample(rng)]
                } else {
                    out[start + i]
                };
                out.push(c);
            }
        } else {
            for _ in 0..rng.gen_range(100..1000) {
                out.push(BASES[dist.sample(rng)]);
            }
        }
    }
    out.truncate(n);
    out
}

pub fn build(bytes: &[u8]) -> (Text, BwtIndex) {
    let text = ingest(bytes, Format::Plain).unwrap();
    let index = BwtIndex::build(&text);
    (text, index)
}
