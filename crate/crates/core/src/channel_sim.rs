//! Monte-Carlo simulation of the block-fading MBM link with ML detection.
//!
//! Model per block: `Y = H (c X) + W`, with `H` an `n_r × N_m` matrix of
//! i.i.d. CN(0, 1) entries held fixed over the `N` channel uses of a block
//! and redrawn for every block, `W` i.i.d. CN(0, σ²), and `c` the scale that
//! makes the set's mean energy per channel use equal to one. The SNR per
//! receive branch is then `ρ = 1/σ²`.
//!
//! Work is cut into fixed-size chunks; chunk `k` of point `p` draws from its
//! own ChaCha stream `(seed, p << 32 | k)`. Chunks are evaluated in parallel
//! rounds but merged in chunk order and the stopping rule is applied chunk by
//! chunk, so results depend only on the seed, never on the worker count.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::link_analysis::db_to_linear;
use crate::signal_set::MbmSignalSet;

/// When to stop simulating one point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StoppingRule {
    pub min_bit_errors: u64,
    pub max_blocks: u64,
}

impl Default for StoppingRule {
    fn default() -> Self {
        Self {
            min_bit_errors: 100,
            max_blocks: 10_000_000,
        }
    }
}

/// Parameters shared by every point of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub n_r: usize,
    pub snr_db: Vec<f64>,
    pub stopping: StoppingRule,
    pub seed: u64,
    /// Blocks per RNG chunk.
    pub chunk_blocks: u64,
}

impl SimConfig {
    pub fn new(n_r: usize, snr_db: Vec<f64>, seed: u64) -> Self {
        Self {
            n_r,
            snr_db,
            stopping: StoppingRule::default(),
            seed,
            chunk_blocks: 2048,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_r == 0 {
            return Err(Error::Argument("n_r must be at least 1".into()));
        }
        if self.snr_db.iter().any(|s| !s.is_finite()) {
            return Err(Error::Argument("SNR points must be finite".into()));
        }
        if self.chunk_blocks == 0 || self.stopping.max_blocks == 0 {
            return Err(Error::Argument("block counts must be positive".into()));
        }
        Ok(())
    }
}

/// One simulated point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerPoint {
    pub snr_db: f64,
    pub ber: f64,
    pub bit_errors: u64,
    pub bits_simulated: u64,
    pub blocks: u64,
}

/// Draw a circularly-symmetric complex Gaussian with the given variance.
#[inline]
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * s, im * s)
}

/// `n_r × N_m` channel, row-major, entries CN(0, 1).
pub fn draw_channel<R: Rng + ?Sized>(n_r: usize, nm: usize, rng: &mut R) -> Vec<Complex64> {
    (0..n_r * nm).map(|_| complex_gaussian(rng, 1.0)).collect()
}

/// Exhaustive ML detector over a signal set.
///
/// Every block is a choice of one (MAP, symbol) pair per channel use, so the
/// metric `‖Y − cHX‖²` splits into per-use terms
/// `‖y_u − c s h_l‖²`. Those terms are tabulated once per received block for
/// every (use, MAP, symbol value), and each candidate costs `N` lookups.
#[derive(Debug, Clone)]
pub struct MlDetector {
    n: usize,
    nm: usize,
    /// Scaled symbol values, `c · s`.
    symbols: Vec<Complex64>,
    /// Per candidate and use: offset into the metric table.
    offsets: Vec<u32>,
    scale: f64,
}

/// Per-thread scratch space for [`MlDetector`].
#[derive(Debug, Clone, Default)]
pub struct Workspace {
    table: Vec<f64>,
    corr: Vec<Complex64>,
    col_energy: Vec<f64>,
    rx: Vec<Complex64>,
}

impl MlDetector {
    pub fn new(set: &MbmSignalSet) -> Self {
        let alphabet = set.symbol_alphabet();
        let scale = 1.0 / set.mean_energy_per_use().sqrt();
        let symbols: Vec<Complex64> = alphabet
            .iter()
            .map(|s| Complex64::new(s.re as f64, s.im as f64) * scale)
            .collect();
        let q = alphabet.len();
        let nm = set.nm();
        let mut offsets = Vec::with_capacity(set.len() * set.n());
        for b in set.blocks() {
            for (u, (&l, s)) in b.map_indices.iter().zip(&b.symbols).enumerate() {
                let si = alphabet.iter().position(|x| x == s).unwrap();
                offsets.push(((u * nm + l as usize) * q + si) as u32);
            }
        }
        Self {
            n: set.n(),
            nm,
            symbols,
            offsets,
            scale,
        }
    }

    /// Transmit scale `c`.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn candidates(&self) -> usize {
        self.offsets.len() / self.n
    }

    /// Received matrix (`n_r × N`, row-major) for block `idx` without noise.
    pub fn transmit(&self, idx: usize, h: &[Complex64], n_r: usize) -> Vec<Complex64> {
        let q = self.symbols.len();
        let mut y = vec![Complex64::new(0.0, 0.0); n_r * self.n];
        for u in 0..self.n {
            let off = self.offsets[idx * self.n + u] as usize;
            let si = off % q;
            let l = (off / q) % self.nm;
            for r in 0..n_r {
                y[r * self.n + u] = h[r * self.nm + l] * self.symbols[si];
            }
        }
        y
    }

    /// ML decision for received `y` (`n_r × N`, row-major) under channel `h`.
    /// Ties go to the lowest block index.
    pub fn detect(&self, y: &[Complex64], h: &[Complex64], n_r: usize, ws: &mut Workspace) -> usize {
        let (n, nm, q) = (self.n, self.nm, self.symbols.len());
        ws.corr.clear();
        ws.corr.resize(n * nm, Complex64::new(0.0, 0.0));
        ws.col_energy.clear();
        ws.col_energy.resize(nm, 0.0);
        for r in 0..n_r {
            let hrow = &h[r * nm..(r + 1) * nm];
            for (l, hv) in hrow.iter().enumerate() {
                ws.col_energy[l] += hv.norm_sqr();
            }
            for u in 0..n {
                let yv = y[r * n + u];
                for (l, hv) in hrow.iter().enumerate() {
                    ws.corr[u * nm + l] += hv.conj() * yv;
                }
            }
        }
        // ‖y_u − s h_l‖² − ‖y_u‖² = |s|²‖h_l‖² − 2 Re(conj(s) <h_l, y_u>)
        ws.table.clear();
        ws.table.resize(n * nm * q, 0.0);
        for u in 0..n {
            for l in 0..nm {
                let c = ws.corr[u * nm + l];
                let e = ws.col_energy[l];
                let base = (u * nm + l) * q;
                for (si, s) in self.symbols.iter().enumerate() {
                    ws.table[base + si] = s.norm_sqr() * e - 2.0 * (s.conj() * c).re;
                }
            }
        }
        let table = &ws.table;
        let mut best = f64::INFINITY;
        let mut best_idx = 0;
        for (idx, offs) in self.offsets.chunks_exact(n).enumerate() {
            let mut m = 0.0;
            for &o in offs {
                m += table[o as usize];
            }
            if m < best {
                best = m;
                best_idx = idx;
            }
        }
        best_idx
    }

    /// Transmit block `tx` over `h` with noise variance `noise_var` and
    /// return the ML decision.
    pub fn simulate_block<R: Rng + ?Sized>(
        &self,
        tx: usize,
        h: &[Complex64],
        n_r: usize,
        noise_var: f64,
        rng: &mut R,
        ws: &mut Workspace,
    ) -> usize {
        let mut rx = std::mem::take(&mut ws.rx);
        rx.clear();
        rx.extend(self.transmit(tx, h, n_r));
        if noise_var > 0.0 {
            for v in rx.iter_mut() {
                *v += complex_gaussian(rng, noise_var);
            }
        }
        let out = self.detect(&rx, h, n_r, ws);
        ws.rx = rx;
        out
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    errors: u64,
    blocks: u64,
}

fn chunk_rng(seed: u64, point: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(point << 32 | chunk);
    rng
}

fn run_chunk(
    set_size: usize,
    detector: &MlDetector,
    n_r: usize,
    noise_var: f64,
    rng: &mut ChaCha8Rng,
    blocks: u64,
) -> Tally {
    let mut ws = Workspace::default();
    let mut tally = Tally::default();
    for _ in 0..blocks {
        let tx = rng.gen_range(0..set_size);
        let h = draw_channel(n_r, detector.nm, rng);
        let rx = detector.simulate_block(tx, &h, n_r, noise_var, rng, &mut ws);
        tally.errors += (tx ^ rx).count_ones() as u64;
        tally.blocks += 1;
    }
    tally
}

/// Simulate a single (n_r, SNR) point. `point_id` selects the RNG streams.
#[allow(clippy::too_many_arguments)]
pub fn simulate_point(
    set: &MbmSignalSet,
    detector: &MlDetector,
    n_r: usize,
    snr_db: f64,
    stopping: StoppingRule,
    seed: u64,
    point_id: u64,
    chunk_blocks: u64,
) -> BerPoint {
    let noise_var = 1.0 / db_to_linear(snr_db);
    let workers = rayon::current_num_threads().max(1) as u64;
    let mut total = Tally::default();
    let mut next_chunk = 0u64;
    'rounds: while total.blocks < stopping.max_blocks {
        let remaining = stopping.max_blocks - total.blocks;
        let sizes: Vec<u64> = (0..workers)
            .scan(remaining, |left, _| {
                if *left == 0 {
                    return None;
                }
                let s = chunk_blocks.min(*left);
                *left -= s;
                Some(s)
            })
            .collect();
        let first = next_chunk;
        let tallies: Vec<Tally> = sizes
            .par_iter()
            .enumerate()
            .map(|(k, &size)| {
                let mut rng = chunk_rng(seed, point_id, first + k as u64);
                run_chunk(set.len(), detector, n_r, noise_var, &mut rng, size)
            })
            .collect();
        next_chunk += sizes.len() as u64;
        for t in tallies {
            total.errors += t.errors;
            total.blocks += t.blocks;
            if total.errors >= stopping.min_bit_errors {
                break 'rounds;
            }
        }
    }
    let bits = total.blocks * set.bit_width() as u64;
    BerPoint {
        snr_db,
        ber: if bits == 0 { 0.0 } else { total.errors as f64 / bits as f64 },
        bit_errors: total.errors,
        bits_simulated: bits,
        blocks: total.blocks,
    }
}

/// BER against SNR for every point of `config.snr_db`.
pub fn ber_curve(set: &MbmSignalSet, config: &SimConfig) -> Result<Vec<BerPoint>> {
    config.validate()?;
    let detector = MlDetector::new(set);
    Ok(config
        .snr_db
        .iter()
        .enumerate()
        .map(|(p, &snr)| {
            simulate_point(
                set,
                &detector,
                config.n_r,
                snr,
                config.stopping,
                config.seed,
                p as u64,
                config.chunk_blocks,
            )
        })
        .collect())
}

/// BER against the number of receive antennas at a fixed SNR.
pub fn ber_vs_nr(
    set: &MbmSignalSet,
    nr_list: &[usize],
    snr_db: f64,
    stopping: StoppingRule,
    seed: u64,
    chunk_blocks: u64,
) -> Result<Vec<(usize, BerPoint)>> {
    if nr_list.contains(&0) {
        return Err(Error::Argument("n_r must be at least 1".into()));
    }
    if !snr_db.is_finite() {
        return Err(Error::Argument("SNR must be finite".into()));
    }
    let detector = MlDetector::new(set);
    Ok(nr_list
        .iter()
        .map(|&nr| {
            let p = simulate_point(
                set,
                &detector,
                nr,
                snr_db,
                stopping,
                seed,
                nr as u64,
                chunk_blocks,
            );
            (nr, p)
        })
        .collect())
}

/// `E_b/N_0` in dB for an SNR in dB at rate `eta` bits per channel use.
pub fn ebn0_from_snr(snr_db: f64, eta: f64) -> Result<f64> {
    if eta.is_nan() || eta <= 0.0 {
        return Err(Error::Argument(format!("rate must be positive, got {eta}")));
    }
    Ok(snr_db - 10.0 * eta.log10())
}

/// SNR (dB) at which a curve crosses `target`, by linear interpolation of
/// `log10 BER` between the bracketing points. Points with no errors are
/// skipped.
pub fn crossing(points: &[(f64, f64)], target: f64) -> Option<f64> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|&(_, b)| b > 0.0)
        .collect();
    let lt = target.log10();
    for w in usable.windows(2) {
        let (x0, b0) = w[0];
        let (x1, b1) = w[1];
        let (l0, l1) = (b0.log10(), b1.log10());
        if (l0 - lt) * (l1 - lt) <= 0.0 && l0 != l1 {
            return Some(x0 + (lt - l0) * (x1 - x0) / (l1 - l0));
        }
    }
    None
}

/// `snr_db,ber,bit_errors,bits,blocks,seed`.
pub fn ber_csv(points: &[BerPoint], seed: u64) -> String {
    let mut out = String::from("snr_db,ber,bit_errors,bits,blocks,seed\n");
    for p in points {
        let _ = writeln!(
            out,
            "{},{:.6e},{},{},{},{}",
            p.snr_db, p.ber, p.bit_errors, p.bits_simulated, p.blocks, seed
        );
    }
    out
}

/// `n_r,ber,bit_errors,bits,blocks,seed`.
pub fn ber_nr_csv(points: &[(usize, BerPoint)], seed: u64) -> String {
    let mut out = String::from("n_r,ber,bit_errors,bits,blocks,seed\n");
    for (nr, p) in points {
        let _ = writeln!(
            out,
            "{},{:.6e},{},{},{},{}",
            nr, p.ber, p.bit_errors, p.bits_simulated, p.blocks, seed
        );
    }
    out
}
