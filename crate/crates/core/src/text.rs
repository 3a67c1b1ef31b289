//! Input ingestion: raw bytes or single-record FASTA mapped onto a dense
//! integer alphabet `1..=sigma`, with the terminator code `0` appended.

use std::fmt;

use crate::error::{Error, Result};

/// Code reserved for the end-of-text terminator.
pub const TERMINATOR: u8 = 0;

/// Input format accepted by [`ingest`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    /// Raw bytes; one trailing newline is stripped.
    Plain,
    /// Exactly one FASTA record; the header and all whitespace are dropped.
    Fasta,
}

/// A terminated text over codes `1..=sigma`.
#[derive(Clone, PartialEq, Eq)]
pub struct Text {
    symbols: Vec<u8>,
    sigma: usize,
    char_map: Vec<u8>,
}

impl Text {
    /// Builds a text from bytes without any format-specific stripping.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut present = [false; 256];
        for &b in bytes {
            present[b as usize] = true;
        }
        let distinct = present.iter().filter(|&&p| p).count();
        if distinct > 255 {
            return Err(Error::AlphabetTooLarge(distinct));
        }
        // Code 0 renders as '#' but is never produced by the mapping.
        let mut char_map = vec![b'#'];
        let mut code_of = [0u8; 256];
        for b in 0..256usize {
            if present[b] {
                code_of[b] = char_map.len() as u8;
                char_map.push(b as u8);
            }
        }
        let mut symbols = Vec::with_capacity(bytes.len() + 1);
        symbols.extend(bytes.iter().map(|&b| code_of[b as usize]));
        symbols.push(TERMINATOR);
        Ok(Self {
            symbols,
            sigma: distinct,
            char_map,
        })
    }

    /// Builds a text directly from codes in `1..=sigma`. Every code in that
    /// range gets a synthetic byte rendering (`a`, `b`, ... for small alphabets).
    pub fn from_codes(codes: &[u8], sigma: usize) -> Result<Self> {
        if codes.is_empty() {
            return Err(Error::EmptyInput);
        }
        if sigma == 0 || sigma > 255 {
            return Err(Error::AlphabetTooLarge(sigma));
        }
        if let Some(&bad) = codes.iter().find(|&&c| c == 0 || c as usize > sigma) {
            return Err(Error::InvalidCode { code: bad, sigma });
        }
        let mut char_map = vec![b'#'];
        for c in 1..=sigma {
            let byte = if sigma <= 26 {
                b'a' + (c as u8 - 1)
            } else {
                c as u8
            };
            char_map.push(byte);
        }
        let mut symbols = codes.to_vec();
        symbols.push(TERMINATOR);
        Ok(Self {
            symbols,
            sigma,
            char_map,
        })
    }

    /// All codes including the trailing terminator.
    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    /// Codes without the terminator.
    pub fn body(&self) -> &[u8] {
        &self.symbols[..self.symbols.len() - 1]
    }

    pub fn sigma(&self) -> usize {
        self.sigma
    }

    /// Length including the terminator.
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Original byte for a code; code 0 maps to `#`.
    pub fn byte_of(&self, code: u8) -> u8 {
        self.char_map[code as usize]
    }

    /// Code for an original byte, if the byte occurs in the text.
    pub fn code_of(&self, byte: u8) -> Option<u8> {
        self.char_map[1..]
            .iter()
            .position(|&b| b == byte)
            .map(|i| (i + 1) as u8)
    }

    pub fn char_map(&self) -> &[u8] {
        &self.char_map
    }

    /// Translates a byte pattern to codes; `None` if some byte is absent from the text.
    pub fn encode(&self, pattern: &[u8]) -> Option<Vec<u8>> {
        pattern.iter().map(|&b| self.code_of(b)).collect()
    }

    /// Renders codes through the character map, escaping bytes that would
    /// break a tab-separated line.
    pub fn render(&self, codes: &[u8]) -> String {
        let mut out = String::with_capacity(codes.len());
        for &c in codes {
            push_escaped(&mut out, self.byte_of(c));
        }
        out
    }
}

pub(crate) fn push_escaped(out: &mut String, b: u8) {
    match b {
        b'\t' => out.push_str("\\t"),
        b'\n' => out.push_str("\\n"),
        b'\r' => out.push_str("\\r"),
        b'\\' => out.push_str("\\\\"),
        0x20..=0x7e => out.push(b as char),
        _ => {
            use fmt::Write;
            let _ = write!(out, "\\x{b:02x}");
        }
    }
}

impl fmt::Debug for Text {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Text")
            .field("n", &self.len())
            .field("sigma", &self.sigma)
            .field("text", &self.render(self.body()))
            .finish()
    }
}

/// Parses input bytes according to `format` and maps them onto codes.
pub fn ingest(bytes: &[u8], format: Format) -> Result<Text> {
    match format {
        Format::Plain => {
            let mut body = bytes;
            if let Some(rest) = body.strip_suffix(b"\n") {
                body = rest.strip_suffix(b"\r").unwrap_or(rest);
            }
            Text::from_bytes(body)
        }
        Format::Fasta => Text::from_bytes(&fasta_sequence(bytes)?),
    }
}

/// Guesses the format from the first non-whitespace byte.
pub fn sniff_format(bytes: &[u8]) -> Format {
    match bytes.iter().find(|b| !b.is_ascii_whitespace()) {
        Some(b'>') => Format::Fasta,
        _ => Format::Plain,
    }
}

fn fasta_sequence(bytes: &[u8]) -> Result<Vec<u8>> {
    let mut records = 0usize;
    let mut seq = Vec::with_capacity(bytes.len());
    for line in bytes.split(|&b| b == b'\n') {
        if line.first() == Some(&b'>') {
            records += 1;
            if records > 1 {
                return Err(Error::MultiRecordFasta);
            }
            continue;
        }
        if line.first() == Some(&b';') {
            continue;
        }
        if records == 0 {
            if line.iter().all(u8::is_ascii_whitespace) {
                continue;
            }
            return Err(Error::MissingFastaHeader);
        }
        seq.extend(line.iter().copied().filter(|b| !b.is_ascii_whitespace()));
    }
    if records == 0 {
        return Err(Error::MissingFastaHeader);
    }
    Ok(seq)
}
