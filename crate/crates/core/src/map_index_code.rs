//! Shortened Reed-Solomon MAP-index codebooks.
//!
//! The codebook is the set of all length-`n` codewords of an `(n, k)`
//! shortened RS code over GF(2^m), with each field element read as the MAP
//! index it labels. Encoding is systematic: the message occupies the first
//! `k` positions and the `n - k` parity symbols follow, highest-degree
//! coefficient first. The generator polynomial is
//! `g(x) = (x - alpha)(x - alpha^2)...(x - alpha^(n-k))`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gf2m::Field;

/// Every codeword of a shortened RS code, in message order.
#[derive(Debug, Clone)]
pub struct MapIndexCodebook {
    field: Field,
    n: usize,
    k: usize,
    /// Generator coefficients, highest degree first (monic).
    generator: Vec<u8>,
    /// Codewords stored back to back, `n` symbols each.
    codewords: Vec<u8>,
}

/// Build the `(n, k)` shortened RS codebook over `field`.
///
/// The parent code is RS(N', K') with N' = 2^m - 1 and K' = k + N' - n.
/// Each message is prefixed with N' - n zeros, encoded with the parent code,
/// and the prefix is dropped again.
pub fn build_shortened_rs(field: &Field, n: usize, k: usize) -> Result<MapIndexCodebook> {
    let parent_n = field.order();
    if k == 0 || k >= n {
        return Err(Error::CodeParams(format!("need 1 <= k < n, got n={n} k={k}")));
    }
    if n > parent_n {
        return Err(Error::CodeParams(format!(
            "n={n} exceeds the RS length 2^m - 1 = {parent_n}"
        )));
    }
    let q = field.size();
    let count = q
        .checked_pow(k as u32)
        .filter(|&c| c <= 1 << 24)
        .ok_or_else(|| Error::CodeParams(format!("{q}^{k} codewords is too many to enumerate")))?;

    let mut generator = vec![1u8];
    for i in 1..=(n - k) {
        let root = field.alpha_pow(i);
        let mut next = vec![0u8; generator.len() + 1];
        for (j, &c) in generator.iter().enumerate() {
            next[j] ^= c;
            next[j + 1] ^= field.mul(c, root);
        }
        generator = next;
    }

    let mut book = MapIndexCodebook {
        field: field.clone(),
        n,
        k,
        generator,
        codewords: Vec::with_capacity(count * n),
    };
    let mut msg = vec![0u8; k];
    for idx in 0..count {
        let mut rest = idx;
        for slot in msg.iter_mut().rev() {
            *slot = (rest % q) as u8;
            rest /= q;
        }
        let cw = book.encode_unchecked(&msg);
        book.codewords.extend_from_slice(&cw);
    }
    Ok(book)
}

impl MapIndexCodebook {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Minimum Hamming distance guaranteed by the MDS property.
    pub fn design_distance(&self) -> usize {
        self.n - self.k + 1
    }

    /// `(N', K')` of the unshortened parent code.
    pub fn parent_params(&self) -> (usize, usize) {
        let parent_n = self.field.order();
        (parent_n, self.k + parent_n - self.n)
    }

    pub fn generator(&self) -> &[u8] {
        &self.generator
    }

    pub fn len(&self) -> usize {
        self.codewords.len() / self.n
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    pub fn codeword(&self, idx: usize) -> &[u8] {
        &self.codewords[idx * self.n..(idx + 1) * self.n]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u8]> {
        self.codewords.chunks_exact(self.n)
    }

    /// Encode a message of `k` MAP indices.
    pub fn encode(&self, message: &[u32]) -> Result<Vec<u8>> {
        if message.len() != self.k {
            return Err(Error::Dimension(format!(
                "message has {} symbols, code expects {}",
                message.len(),
                self.k
            )));
        }
        let q = self.field.size() as u32;
        let msg = message
            .iter()
            .enumerate()
            .map(|(position, &symbol)| {
                if symbol < q {
                    Ok(symbol as u8)
                } else {
                    Err(Error::SymbolOutOfRange {
                        symbol,
                        position,
                        alphabet: q,
                    })
                }
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(self.encode_unchecked(&msg))
    }

    fn encode_unchecked(&self, msg: &[u8]) -> Vec<u8> {
        let (parent_n, parent_k) = self.parent_params();
        let pad = parent_n - self.n;
        let parity_len = parent_n - parent_k;

        // m(x) x^(n-k) mod g(x) by long division over the padded message.
        let mut work = vec![0u8; parent_n];
        work[pad..pad + self.k].copy_from_slice(msg);
        for i in 0..parent_k {
            let coef = work[i];
            if coef == 0 {
                continue;
            }
            for (j, &g) in self.generator.iter().enumerate().skip(1) {
                work[i + j] ^= self.field.mul(g, coef);
            }
        }
        let mut cw = Vec::with_capacity(parent_n);
        cw.extend_from_slice(msg);
        cw.extend_from_slice(&work[parent_k..parent_k + parity_len]);
        debug_assert_eq!(cw.len(), self.n);
        cw
    }

    /// Index of the codeword for a message given as its natural-binary integer.
    pub fn message_index(&self, message: &[u8]) -> usize {
        message
            .iter()
            .fold(0usize, |acc, &s| acc * self.field.size() + s as usize)
    }

    /// Unordered-pair counts by Hamming distance.
    pub fn hamming_spectrum(&self) -> BTreeMap<usize, u64> {
        let count = self.len();
        let partials: Vec<Vec<u64>> = (0..count)
            .into_par_iter()
            .fold(
                || vec![0u64; self.n + 1],
                |mut hist, i| {
                    let a = self.codeword(i);
                    for j in (i + 1)..count {
                        let b = self.codeword(j);
                        let d = a.iter().zip(b).filter(|(x, y)| x != y).count();
                        hist[d] += 1;
                    }
                    hist
                },
            )
            .collect();
        let mut out = BTreeMap::new();
        for hist in partials {
            for (d, c) in hist.into_iter().enumerate() {
                if c > 0 {
                    *out.entry(d).or_insert(0) += c;
                }
            }
        }
        out
    }

    /// Text dump: a header line, then one codeword per line.
    pub fn dump(&self) -> String {
        let mut out = format!(
            "# rs n={} k={} m={} poly={:#x}\n",
            self.n,
            self.k,
            self.field.m(),
            self.field.poly()
        );
        for cw in self.iter() {
            let line: Vec<String> = cw.iter().map(|s| s.to_string()).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }
}

/// State of one RF mirror.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MirrorState {
    On,
    Off,
}

/// ON/OFF pattern of `m` mirrors for a MAP index; mirror 1 is the most
/// significant bit and a 0 bit means ON.
pub fn map_index_to_mirrors(index: u32, m: u32) -> Result<Vec<MirrorState>> {
    if m == 0 || m > 8 || index >> m != 0 {
        return Err(Error::Argument(format!(
            "MAP index {index} does not fit in {m} mirrors"
        )));
    }
    Ok((0..m)
        .rev()
        .map(|bit| {
            if index >> bit & 1 == 0 {
                MirrorState::On
            } else {
                MirrorState::Off
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use MirrorState::{Off, On};

    #[test]
    fn gf8_codebook_matches_displayed_codewords() {
        let f = Field::new(3).unwrap();
        let cb = build_shortened_rs(&f, 4, 2).unwrap();
        assert_eq!(cb.len(), 64);
        assert_eq!(cb.parent_params(), (7, 5));
        assert_eq!(cb.codeword(0), &[0, 0, 0, 0]);
        assert_eq!(cb.codeword(1), &[0, 1, 6, 3]);
        assert_eq!(cb.codeword(2), &[0, 2, 7, 6]);
        assert_eq!(cb.codeword(3), &[0, 3, 1, 5]);
        assert_eq!(cb.codeword(4), &[0, 4, 5, 7]);
        assert_eq!(cb.codeword(63), &[7, 7, 3, 5]);
    }

    #[test]
    fn gf16_parent_and_distance() {
        let f = Field::new(4).unwrap();
        let cb = build_shortened_rs(&f, 4, 2).unwrap();
        assert_eq!(cb.parent_params(), (15, 13));
        assert_eq!(cb.len(), 256);
        let spec = cb.hamming_spectrum();
        assert_eq!(spec.keys().next(), Some(&3));
    }

    #[test]
    fn single_parity_code_over_gf4() {
        let f = Field::new(2).unwrap();
        let cb = build_shortened_rs(&f, 3, 2).unwrap();
        assert_eq!(*cb.hamming_spectrum().keys().next().unwrap(), 2);
    }

    #[test]
    fn repetition_like_code_has_full_distance() {
        let f = Field::new(3).unwrap();
        let cb = build_shortened_rs(&f, 4, 1).unwrap();
        let spec = cb.hamming_spectrum();
        assert_eq!(spec.len(), 1);
        assert_eq!(spec[&4], 8 * 7 / 2);
    }

    #[test]
    fn encode_validates_input() {
        let f = Field::new(3).unwrap();
        let cb = build_shortened_rs(&f, 4, 2).unwrap();
        assert_eq!(cb.encode(&[0, 0]).unwrap(), vec![0, 0, 0, 0]);
        assert_eq!(cb.encode(&[7, 7]).unwrap(), vec![7, 7, 3, 5]);
        assert!(matches!(
            cb.encode(&[8, 0]),
            Err(Error::SymbolOutOfRange { symbol: 8, position: 0, .. })
        ));
        assert!(cb.encode(&[1]).is_err());
    }

    #[test]
    fn bad_parameters() {
        let f = Field::new(3).unwrap();
        assert!(build_shortened_rs(&f, 8, 2).is_err());
        assert!(build_shortened_rs(&f, 4, 4).is_err());
        assert!(build_shortened_rs(&f, 4, 0).is_err());
        assert!(build_shortened_rs(&f, 7, 5).is_ok());
    }

    #[test]
    fn mirror_patterns() {
        assert_eq!(map_index_to_mirrors(0, 2).unwrap(), vec![On, On]);
        assert_eq!(map_index_to_mirrors(3, 2).unwrap(), vec![Off, Off]);
        assert_eq!(map_index_to_mirrors(5, 3).unwrap(), vec![Off, On, Off]);
        assert_eq!(map_index_to_mirrors(7, 3).unwrap(), vec![Off, Off, Off]);
        assert_eq!(map_index_to_mirrors(1, 3).unwrap(), vec![On, On, Off]);
        assert!(map_index_to_mirrors(8, 3).is_err());
    }

    #[test]
    fn dump_format() {
        let f = Field::new(3).unwrap();
        let cb = build_shortened_rs(&f, 4, 2).unwrap();
        let text = cb.dump();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# rs n=4 k=2 m=3 poly=0xb"));
        assert_eq!(lines.next(), Some("0 0 0 0"));
        assert_eq!(lines.next(), Some("0 1 6 3"));
        assert_eq!(text.lines().count(), 65);
    }
}
