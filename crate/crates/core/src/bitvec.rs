/// Plain bitvector with constant-time rank through per-word cumulative counts.
#[derive(Debug, Clone, Default)]
pub struct RankBitVec {
    words: Vec<u64>,
    // ones strictly before word i; one extra entry so that rank(len) needs no branch
    cum: Vec<u64>,
    len: usize,
}

impl RankBitVec {
    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut words = Vec::new();
        let mut len = 0usize;
        let mut cur = 0u64;
        for bit in bits {
            if bit {
                cur |= 1 << (len % 64);
            }
            len += 1;
            if len.is_multiple_of(64) {
                words.push(cur);
                cur = 0;
            }
        }
        if !len.is_multiple_of(64) {
            words.push(cur);
        }
        let mut cum = Vec::with_capacity(words.len() + 1);
        let mut acc = 0u64;
        for w in &words {
            cum.push(acc);
            acc += u64::from(w.count_ones());
        }
        cum.push(acc);
        Self { words, cum, len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    /// Number of set bits in positions `0..i`.
    #[inline]
    pub fn rank1(&self, i: usize) -> usize {
        debug_assert!(i <= self.len);
        let w = i / 64;
        let r = i % 64;
        let mut count = self.cum[w];
        if r != 0 {
            count += u64::from((self.words[w] & ((1u64 << r) - 1)).count_ones());
        }
        count as usize
    }

    #[inline]
    pub fn rank0(&self, i: usize) -> usize {
        i - self.rank1(i)
    }

    pub fn size_in_bytes(&self) -> usize {
        (self.words.len() + self.cum.len()) * 8
    }
}
