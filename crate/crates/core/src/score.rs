//! Zero-order model, occurrence-count moments and surprise scores.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::text::Text;

const SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelSource {
    Empirical,
    Uniform,
    File,
}

impl fmt::Display for ModelSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Empirical => "empirical",
            Self::Uniform => "uniform",
            Self::File => "file",
        })
    }
}

/// IID character source: `probs[c]` for codes `1..=σ` (index 0 unused) and
/// the scoring length `N` (text length without terminator).
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovModel {
    probs: Vec<f64>,
    scoring_len: usize,
    source: ModelSource,
}

impl MarkovModel {
    pub fn empirical(text: &Text) -> Self {
        let mut probs = vec![0.0; text.sigma() + 1];
        for &c in text.body() {
            probs[c as usize] += 1.0;
        }
        let n = text.body().len() as f64;
        for p in &mut probs[1..] {
            *p /= n;
        }
        Self {
            probs,
            scoring_len: text.body().len(),
            source: ModelSource::Empirical,
        }
    }

    pub fn uniform(text: &Text) -> Self {
        let sigma = text.sigma();
        let mut probs = vec![1.0 / sigma as f64; sigma + 1];
        probs[0] = 0.0;
        Self {
            probs,
            scoring_len: text.body().len(),
            source: ModelSource::Uniform,
        }
    }

    /// Parses one `<symbol> <probability>` pair per line, separated by
    /// whitespace; blank lines and lines starting with `#` are skipped. The
    /// symbol is a single byte, or `\t`, `\n`, `\r`, `\\`, `\s` (space), `\xHH`.
    /// Symbols absent from the text may be listed; every text symbol must get
    /// a positive probability, and all listed probabilities must sum to 1.
    pub fn parse(text: &Text, spec: &str) -> Result<Self> {
        let mut probs = vec![f64::NAN; text.sigma() + 1];
        probs[0] = 0.0;
        let mut total = 0.0;
        let mut seen = [false; 256];
        for (lineno, line) in spec.lines().enumerate() {
            let line_no = lineno + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let err = |msg: String| Error::ModelParse { line: line_no, msg };
            let mut parts = trimmed.split_whitespace();
            let (sym, val) = match (parts.next(), parts.next(), parts.next()) {
                (Some(s), Some(v), None) => (s, v),
                _ => return Err(err("expected `<symbol> <probability>`".into())),
            };
            let byte = parse_symbol(sym).ok_or_else(|| err(format!("bad symbol `{sym}`")))?;
            let p: f64 = val
                .parse()
                .map_err(|_| err(format!("bad probability `{val}`")))?;
            if !(0.0..=1.0).contains(&p) {
                return Err(err(format!("probability {p} outside [0, 1]")));
            }
            if std::mem::replace(&mut seen[byte as usize], true) {
                return Err(err(format!("symbol `{sym}` listed twice")));
            }
            total += p;
            if let Some(code) = text.code_of(byte) {
                probs[code as usize] = p;
            }
        }
        for (code, &p) in probs.iter().enumerate().skip(1) {
            if p.is_nan() || p == 0.0 {
                let mut sym = String::new();
                crate::text::push_escaped(&mut sym, text.byte_of(code as u8));
                return Err(Error::ZeroProbability(sym));
            }
        }
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::ProbabilitySum(total));
        }
        Ok(Self {
            probs,
            scoring_len: text.body().len(),
            source: ModelSource::File,
        })
    }

    /// Probability table indexed by code, entry 0 (terminator) is zero.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    #[inline]
    pub fn prob(&self, code: u8) -> f64 {
        self.probs[code as usize]
    }

    pub fn scoring_len(&self) -> usize {
        self.scoring_len
    }

    pub fn source(&self) -> ModelSource {
        self.source
    }
}

fn parse_symbol(s: &str) -> Option<u8> {
    match s.as_bytes() {
        [b] => Some(*b),
        b"\\t" => Some(b'\t'),
        b"\\n" => Some(b'\n'),
        b"\\r" => Some(b'\r'),
        b"\\s" => Some(b' '),
        b"\\\\" => Some(b'\\'),
        [b'\\', b'x', h @ ..] if h.len() == 2 => u8::from_str_radix(std::str::from_utf8(h).ok()?, 16).ok(),
        _ => None,
    }
}

/// Expectation and variance of the occurrence count of a string of length
/// `m` with probability `p` and variance term `phi`, over `scoring_len`
/// positions. When `2m - 1 > N` the result must be adjusted with
/// [`overlap_correction`].
pub fn moments(m: usize, p: f64, phi: f64, scoring_len: usize) -> (f64, f64) {
    let (mf, nf) = (m as f64, scoring_len as f64);
    let e = (nf - mf + 1.0) * p;
    let v = e * (1.0 - p) + 2.0 * p * phi - p * p * (mf - 1.0) * (2.0 * nf - 3.0 * mf + 2.0);
    (e, v)
}

/// Whether self-overlapping pairs at some shift `d < m` would fall outside
/// the text, which the closed variance formula counts with negative weight.
pub fn needs_correction(m: usize, scoring_len: usize) -> bool {
    2 * m > scoring_len + 1
}

/// Term to add to the closed-form variance when [`needs_correction`] holds.
/// `borders` lists every border length `b` with `π` of the string's suffix
/// starting at `b`.
pub fn overlap_correction(m: usize, p: f64, scoring_len: usize, borders: &[(usize, f64)]) -> f64 {
    let positions = scoring_len as i64 - m as i64 + 1;
    let excess = m as i64 - positions;
    if excess <= 0 {
        return 0.0;
    }
    let mut corr = -p * p * ((excess - 1) * excess) as f64;
    for &(b, tail) in borders {
        let weight = scoring_len as i64 - 2 * m as i64 + b as i64 + 1;
        if weight <= 0 {
            corr -= 2.0 * p * weight as f64 * tail;
        }
    }
    corr
}

/// Largest possible occurrence count of a string of length `m` with longest
/// border `bord` in a text of length `scoring_len`.
pub fn f_star(m: usize, bord: usize, scoring_len: usize) -> u64 {
    debug_assert!(m >= 1 && bord < m && m <= scoring_len);
    let positions = (scoring_len - m + 1) as u64;
    positions.div_ceil((m - bord) as u64)
}

/// Surprise measure over observed count `f`, expectation, variance, length and `f*`.
pub trait ScoreFn: Send + Sync {
    fn score(&self, f: f64, e: f64, v: f64, m: usize, f_star: u64) -> f64;
}

/// `(f - E) / max(sqrt(V), eps)`.
#[derive(Debug, Clone, Copy)]
pub struct ZScore {
    pub eps: f64,
}

impl Default for ZScore {
    fn default() -> Self {
        Self { eps: 1e-12 }
    }
}

impl ScoreFn for ZScore {
    fn score(&self, f: f64, e: f64, v: f64, _: usize, _: u64) -> f64 {
        (f - e) / v.max(0.0).sqrt().max(self.eps)
    }
}

/// Formats like C's `%.{digits}g`.
pub fn format_g(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let mantissa = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
