//! MBM block signal sets.
//!
//! A block spans `N` channel uses. In use `i` exactly one of the `N_m` MAP
//! positions carries a non-zero symbol `s_i`, at MAP index `l_i`. Blocks are
//! held in sparse form (`l`, `s`); the dense `N * N_m` vector puts `s_i` at
//! flat position `i * N_m + l_i` (0-based).
//!
//! Block index and bit label coincide: block `b` carries the `κ`-bit
//! natural-binary label of `b`, MSB first. For the coded set this means the
//! `K * m_rf` message bits come first (one `m_rf`-bit group per GF symbol),
//! followed by the constellation-index bits. For the conventional set the MAP
//! bits come first, then the symbol bits.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::map_index_code::MapIndexCodebook;
use crate::squaring::SymbolConstellation;

pub type Symbol = Complex<i64>;

/// Default ceiling on `|S|` for full pair sweeps.
pub const DEFAULT_PAIR_CAP: usize = 1 << 14;

/// One transmitted block in sparse form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MbmBlock {
    pub map_indices: Vec<u8>,
    pub symbols: Vec<Symbol>,
}

impl MbmBlock {
    /// The `N * N_m` dense vector `x = vec(X)`.
    pub fn dense(&self, nm: usize) -> Vec<Symbol> {
        let mut x = vec![Symbol::new(0, 0); nm * self.symbols.len()];
        for (i, (&l, &s)) in self.map_indices.iter().zip(&self.symbols).enumerate() {
            x[i * nm + l as usize] = s;
        }
        x
    }

    /// The `N_m × N` matrix `X`, row-major.
    pub fn matrix(&self, nm: usize) -> Vec<Vec<Symbol>> {
        let n = self.symbols.len();
        let mut m = vec![vec![Symbol::new(0, 0); n]; nm];
        for (i, (&l, &s)) in self.map_indices.iter().zip(&self.symbols).enumerate() {
            m[l as usize][i] = s;
        }
        m
    }

    /// `‖x‖²`.
    pub fn energy(&self) -> u64 {
        self.symbols.iter().map(|s| s.norm_sqr() as u64).sum()
    }
}

/// What a signal set was built from.
#[derive(Debug, Clone, PartialEq)]
pub enum SetKind {
    Conventional {
        m_rf: u32,
        alphabet: Vec<Symbol>,
    },
    Coded {
        n: usize,
        k: usize,
        m_rf: u32,
        pam_order: usize,
        levels: usize,
    },
}

/// A complete block constellation with its bit labeling.
#[derive(Debug, Clone)]
pub struct MbmSignalSet {
    kind: SetKind,
    n: usize,
    nm: usize,
    bit_width: u32,
    blocks: Vec<MbmBlock>,
}

/// Conventional MBM: one channel use, `N_m * |alphabet|` one-sparse vectors.
pub fn conventional_set(m_rf: u32, alphabet: &[Symbol]) -> Result<MbmSignalSet> {
    if !(1..=8).contains(&m_rf) {
        return Err(Error::Argument(format!("m_rf={m_rf} outside 1..=8")));
    }
    if alphabet.is_empty() || !alphabet.len().is_power_of_two() {
        return Err(Error::NotPowerOfTwo("modulation alphabet size"));
    }
    if alphabet.iter().any(|s| *s == Symbol::new(0, 0)) {
        return Err(Error::Argument("alphabet must not contain zero".into()));
    }
    let nm = 1usize << m_rf;
    let blocks: Vec<MbmBlock> = (0..nm)
        .flat_map(|l| {
            alphabet.iter().map(move |&s| MbmBlock {
                map_indices: vec![l as u8],
                symbols: vec![s],
            })
        })
        .collect();
    let set = MbmSignalSet {
        kind: SetKind::Conventional {
            m_rf,
            alphabet: alphabet.to_vec(),
        },
        n: 1,
        nm,
        bit_width: blocks.len().trailing_zeros(),
        blocks,
    };
    set.check_distinct()?;
    Ok(set)
}

/// The coded set: every codeword combined with every constellation vector,
/// codeword-major.
pub fn proposed_set(
    codebook: &MapIndexCodebook,
    constellation: &SymbolConstellation,
) -> Result<MbmSignalSet> {
    if codebook.n() != constellation.dim() {
        return Err(Error::Dimension(format!(
            "codeword length {} vs constellation dimension {}",
            codebook.n(),
            constellation.dim()
        )));
    }
    let size = codebook.len() * constellation.len();
    if !size.is_power_of_two() {
        return Err(Error::NotPowerOfTwo("signal set size"));
    }
    let blocks: Vec<MbmBlock> = codebook
        .iter()
        .flat_map(|cw| {
            constellation.vectors().iter().map(move |s| MbmBlock {
                map_indices: cw.to_vec(),
                symbols: s.clone(),
            })
        })
        .collect();
    let m_rf = codebook.field().m();
    Ok(MbmSignalSet {
        kind: SetKind::Coded {
            n: codebook.n(),
            k: codebook.k(),
            m_rf,
            pam_order: constellation.pam_order(),
            levels: constellation.levels(),
        },
        n: codebook.n(),
        nm: codebook.field().size(),
        bit_width: size.trailing_zeros(),
        blocks,
    })
}

/// Closed-form rate of the coded set in bits per channel use.
pub fn coded_rate_formula(n: usize, k: usize, m_rf: u32, pam_order: usize) -> f64 {
    let p = (pam_order as f64).log2();
    let n_f = n as f64;
    let payload = k as f64 * m_rf as f64;
    if pam_order == 2 {
        (payload + 1.0) / n_f
    } else {
        (payload + 2.0 * n_f * (p - 2.0) + (2.0 * n_f).log2() + 2.0) / n_f
    }
}

impl MbmSignalSet {
    pub fn kind(&self) -> &SetKind {
        &self.kind
    }

    /// Channel uses per block.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of MAPs, `2^m_rf`.
    pub fn nm(&self) -> usize {
        self.nm
    }

    /// `κ = log2 |S|`.
    pub fn bit_width(&self) -> u32 {
        self.bit_width
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn blocks(&self) -> &[MbmBlock] {
        &self.blocks
    }

    pub fn block(&self, idx: usize) -> Result<&MbmBlock> {
        self.blocks.get(idx).ok_or(Error::IndexOutOfRange {
            index: idx,
            len: self.blocks.len(),
        })
    }

    /// Bits per channel use, `κ / N`.
    pub fn rate(&self) -> f64 {
        self.bit_width as f64 / self.n as f64
    }

    /// Average energy per channel use over the set.
    pub fn mean_energy_per_use(&self) -> f64 {
        let total: u64 = self.blocks.iter().map(MbmBlock::energy).sum();
        total as f64 / (self.blocks.len() * self.n) as f64
    }

    /// Bit label of a block, MSB first.
    pub fn label_bits(&self, idx: usize) -> Vec<bool> {
        (0..self.bit_width)
            .rev()
            .map(|b| idx >> b & 1 == 1)
            .collect()
    }

    /// Block index for a label.
    pub fn index_of_bits(&self, bits: &[bool]) -> Result<usize> {
        if bits.len() != self.bit_width as usize {
            return Err(Error::Dimension(format!(
                "{} bits for a {}-bit label",
                bits.len(),
                self.bit_width
            )));
        }
        Ok(bits.iter().fold(0, |acc, &b| acc << 1 | b as usize))
    }

    /// Hamming distance between the labels of two blocks.
    pub fn bit_distance(&self, i: usize, j: usize) -> u32 {
        (i ^ j).count_ones()
    }

    /// Distinct non-zero symbol values used anywhere in the set.
    pub fn symbol_alphabet(&self) -> Vec<Symbol> {
        let mut out: Vec<Symbol> = Vec::new();
        for b in &self.blocks {
            for s in &b.symbols {
                if !out.contains(s) {
                    out.push(*s);
                }
            }
        }
        out
    }

    fn check_distinct(&self) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for b in &self.blocks {
            if !seen.insert((&b.map_indices, &b.symbols)) {
                return Err(Error::PointSet("signal set has repeated blocks".into()));
            }
        }
        Ok(())
    }

    /// `‖x_i − x_j‖²` from the sparse form: per channel use, `|s|² + |s'|²`
    /// when the MAP indices differ and `|s − s'|²` when they agree.
    pub fn pair_distance(&self, i: usize, j: usize) -> u64 {
        sparse_distance(&self.blocks[i], &self.blocks[j])
    }

    /// Exact squared-distance histogram over all unordered pairs.
    pub fn distance_spectrum(&self) -> Result<DistanceSpectrum> {
        self.distance_spectrum_capped(DEFAULT_PAIR_CAP)
    }

    pub fn distance_spectrum_capped(&self, cap: usize) -> Result<DistanceSpectrum> {
        if self.len() > cap {
            return Err(Error::CapExceeded {
                size: self.len(),
                cap,
            });
        }
        let size = self.len();
        let histogram = (0..size)
            .into_par_iter()
            .fold(BTreeMap::new, |mut hist: BTreeMap<u64, u64>, i| {
                let a = &self.blocks[i];
                // runs of equal distances are common; batch them
                let mut last = u64::MAX;
                let mut run = 0u64;
                for b in &self.blocks[i + 1..] {
                    let d = sparse_distance(a, b);
                    if d == last {
                        run += 1;
                    } else {
                        if run > 0 {
                            *hist.entry(last).or_insert(0) += run;
                        }
                        last = d;
                        run = 1;
                    }
                }
                if run > 0 {
                    *hist.entry(last).or_insert(0) += run;
                }
                hist
            })
            .reduce(BTreeMap::new, |mut a, b| {
                for (k, v) in b {
                    *a.entry(k).or_insert(0) += v;
                }
                a
            });
        Ok(DistanceSpectrum {
            histogram,
            total_pairs: (size as u64) * (size as u64).saturating_sub(1) / 2,
        })
    }

    /// Minimum squared distance over all pairs, `None` for a single block.
    pub fn min_distance(&self) -> Result<Option<u64>> {
        Ok(self.distance_spectrum()?.min_dist())
    }

    /// Text dump: `<bits-hex> | l_1 … l_N | s_1 … s_N`, one block per line.
    pub fn dump(&self) -> String {
        let hex_width = (self.bit_width as usize).div_ceil(4).max(1);
        let mut out = String::new();
        for (idx, b) in self.blocks.iter().enumerate() {
            let l: Vec<String> = b.map_indices.iter().map(|x| x.to_string()).collect();
            let s: Vec<String> = b.symbols.iter().map(|c| format!("{}:{}", c.re, c.im)).collect();
            let _ = writeln!(
                out,
                "{:0width$x} | {} | {}",
                idx,
                l.join(" "),
                s.join(" "),
                width = hex_width
            );
        }
        out
    }
}

#[inline]
pub(crate) fn sparse_distance(a: &MbmBlock, b: &MbmBlock) -> u64 {
    let mut d = 0i64;
    for u in 0..a.symbols.len() {
        let (s, t) = (a.symbols[u], b.symbols[u]);
        d += if a.map_indices[u] == b.map_indices[u] {
            (s - t).norm_sqr()
        } else {
            s.norm_sqr() + t.norm_sqr()
        };
    }
    d as u64
}

/// Squared-distance histogram over unordered pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceSpectrum {
    pub histogram: BTreeMap<u64, u64>,
    pub total_pairs: u64,
}

impl DistanceSpectrum {
    pub fn min_dist(&self) -> Option<u64> {
        self.histogram.keys().next().copied()
    }

    /// `distance,count,percent` with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("distance,count,percent\n");
        for (d, c) in &self.histogram {
            let pct = 100.0 * *c as f64 / self.total_pairs as f64;
            let _ = writeln!(out, "{d},{c},{pct:.4}");
        }
        out
    }
}

/// Common modulation alphabets with integer coordinates, in label order.
pub fn named_alphabet(order: usize) -> Result<Vec<Symbol>> {
    match order {
        2 => Ok(vec![Symbol::new(-1, 0), Symbol::new(1, 0)]),
        4 => Ok(vec![
            Symbol::new(-1, -1),
            Symbol::new(-1, 1),
            Symbol::new(1, -1),
            Symbol::new(1, 1),
        ]),
        16 => Ok((0..16)
            .map(|i| Symbol::new(2 * (i / 4) - 3, 2 * (i % 4) - 3))
            .collect()),
        _ => Err(Error::Argument(format!(
            "no integer-grid alphabet of order {order} (use 2, 4 or 16)"
        ))),
    }
}
