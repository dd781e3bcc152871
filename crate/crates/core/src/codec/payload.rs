//! Byte-level packet contents and hex export.
//!
//! A file is cut into `C(n, t)` equal chunks (zero-padded at the end), and
//! each chunk is read as a big-endian bit string of `q`-bit symbols, the last
//! symbol zero-padded.

use std::fmt::Write as _;

use super::field::{FieldElement, GaloisField};
use super::{Codeword, SymbolMap};
use crate::error::{Error, Result};
use crate::model::CachePlacement;

/// Bytes per chunk when `len` bytes are split into `chunks` equal parts.
pub fn chunk_len(len: usize, chunks: usize) -> usize {
    len.div_ceil(chunks.max(1))
}

pub fn bytes_to_symbols(bytes: &[u8], field: &GaloisField) -> Vec<FieldElement> {
    let q = field.degree() as usize;
    let bits = bytes.len() * 8;
    (0..bits.div_ceil(q))
        .map(|s| {
            let mut value = 0u16;
            for b in s * q..s * q + q {
                let bit = if b < bits { bytes[b / 8] >> (7 - b % 8) & 1 } else { 0 };
                value = value << 1 | bit as u16;
            }
            FieldElement(value)
        })
        .collect()
}

/// Inverse of [`bytes_to_symbols`] for a known byte length.
pub fn symbols_to_bytes(symbols: &[FieldElement], field: &GaloisField, len: usize) -> Vec<u8> {
    let q = field.degree() as usize;
    let mut out = vec![0u8; len];
    for b in 0..len * 8 {
        let (s, offset) = (b / q, b % q);
        let bit = symbols.get(s).map_or(0, |x| x.0 >> (q - 1 - offset) & 1) as u8;
        out[b / 8] |= bit << (7 - b % 8);
    }
    out
}

/// Symbol map for the packets of `file` under `placement`.
pub fn split_file(placement: &CachePlacement, file: usize, bytes: &[u8], field: &GaloisField) -> SymbolMap {
    let chunks = placement.packets_per_file();
    let size = chunk_len(bytes.len(), chunks);
    placement
        .packets_of(file)
        .enumerate()
        .map(|(i, label)| {
            let mut chunk: Vec<u8> = bytes.iter().skip(i * size).take(size).copied().collect();
            chunk.resize(size, 0);
            (label, bytes_to_symbols(&chunk, field))
        })
        .collect()
}

/// Concatenates the packets of `file` in label order and trims to `len`.
pub fn join_file(
    placement: &CachePlacement,
    file: usize,
    packets: &SymbolMap,
    field: &GaloisField,
    len: usize,
) -> Result<Vec<u8>> {
    let size = chunk_len(len, placement.packets_per_file());
    let mut out = Vec::with_capacity(size * placement.packets_per_file());
    for label in placement.packets_of(file) {
        let symbols = packets
            .get(&label)
            .ok_or_else(|| Error::MissingSymbol(label.to_string()))?;
        out.extend(symbols_to_bytes(symbols, field, size));
    }
    out.truncate(len);
    Ok(out)
}

/// One coded packet per line, symbols as fixed-width hex separated by spaces.
pub fn codeword_to_hex(codeword: &Codeword, field: &GaloisField) -> String {
    let digits = (field.degree() as usize).div_ceil(4);
    let mut out = String::new();
    for row in codeword.rows() {
        let line: Vec<String> = row.iter().map(|x| format!("{:0digits$x}", x.0)).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    out
}

pub fn codeword_from_hex(text: &str, field: &GaloisField) -> Result<Codeword> {
    let mut rows = Vec::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let row = line
            .split_whitespace()
            .map(|tok| {
                u32::from_str_radix(tok, 16)
                    .map_err(|_| Error::Parse(format!("bad hex symbol {tok:?}")))
                    .and_then(|v| field.element(v))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    let width = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != width) {
        return Err(Error::Parse("ragged codeword rows".into()));
    }
    Ok(Codeword::new(rows, width))
}
