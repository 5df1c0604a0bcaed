//! Pairwise geometry of difference matrices, the determinant-form PEP bound,
//! the union bound on BER, and rank diagnostics.
//!
//! For a pair of blocks the difference matrix `Δ = X_i − X_j` is `N_m × N`
//! with at most two non-zeros per column. Its squared singular values are the
//! eigenvalues of the `N × N` Gram matrix `ΔᴴΔ`, which is built directly from
//! the sparse form in exact Gaussian-integer arithmetic. Because the Gram
//! matrix is exact, a full pair sweep only needs one eigen-decomposition per
//! distinct Gram matrix; pairs are then aggregated into classes keyed by
//! (Gram class, label Hamming distance).

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use num_complex::{Complex, Complex64};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::hermitian_eigenvalues;
use crate::signal_set::{MbmSignalSet, DEFAULT_PAIR_CAP};

/// Default relative rank threshold on `σ² / σ²_max`.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

/// `Δ = X_i − X_j` as a dense `N_m × N` row-major matrix.
pub fn diff_matrix(set: &MbmSignalSet, i: usize, j: usize) -> Result<Vec<Vec<Complex<i64>>>> {
    let a = set.block(i)?;
    let b = set.block(j)?;
    let mut m = a.matrix(set.nm());
    for (col, (&l, &s)) in b.map_indices.iter().zip(&b.symbols).enumerate() {
        m[l as usize][col] -= s;
    }
    Ok(m)
}

/// Exact `ΔᴴΔ` (row-major `N × N`) from the sparse block forms.
pub fn gram_matrix(set: &MbmSignalSet, i: usize, j: usize) -> Vec<Complex<i64>> {
    let a = &set.blocks()[i];
    let b = &set.blocks()[j];
    gram_of(&a.map_indices, &a.symbols, &b.map_indices, &b.symbols)
}

/// Column `u` of Δ as up to two (row, value) entries.
#[inline]
fn column(
    la: &[u8],
    sa: &[Complex<i64>],
    lb: &[u8],
    sb: &[Complex<i64>],
    u: usize,
) -> [(u8, Complex<i64>); 2] {
    if la[u] == lb[u] {
        [(la[u], sa[u] - sb[u]), (u8::MAX, Complex::new(0, 0))]
    } else {
        [(la[u], sa[u]), (lb[u], -sb[u])]
    }
}

fn gram_of(
    la: &[u8],
    sa: &[Complex<i64>],
    lb: &[u8],
    sb: &[Complex<i64>],
) -> Vec<Complex<i64>> {
    let n = la.len();
    let cols: Vec<[(u8, Complex<i64>); 2]> = (0..n).map(|u| column(la, sa, lb, sb, u)).collect();
    let mut g = vec![Complex::new(0, 0); n * n];
    for r in 0..n {
        for c in r..n {
            let mut acc = Complex::new(0, 0);
            for &(row_r, v_r) in &cols[r] {
                if row_r == u8::MAX {
                    continue;
                }
                for &(row_c, v_c) in &cols[c] {
                    if row_c == row_r {
                        acc += v_r.conj() * v_c;
                    }
                }
            }
            g[r * n + c] = acc;
            g[c * n + r] = acc.conj();
        }
    }
    g
}

fn eigen_of_gram(g: &[Complex<i64>], n: usize) -> Vec<f64> {
    let h: Vec<Complex64> = g
        .iter()
        .map(|z| Complex64::new(z.re as f64, z.im as f64))
        .collect();
    hermitian_eigenvalues(&h, n)
        .into_iter()
        .map(|x| x.max(0.0))
        .collect()
}

fn rank_of(sigma_sq: &[f64], tol: f64) -> usize {
    let max = sigma_sq.first().copied().unwrap_or(0.0);
    if max <= 0.0 {
        return 0;
    }
    sigma_sq.iter().filter(|&&s| s > tol * max).count()
}

/// Singular-value geometry of one pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PairGeometry {
    pub pair: (usize, usize),
    /// Eigenvalues of `ΔᴴΔ` for the unnormalized integer blocks, descending.
    pub squared_singular_values: Vec<f64>,
    pub rank: usize,
    pub bit_distance: u32,
    /// `c²`, the transmit power scale that brings the set to unit mean
    /// energy per channel use.
    pub energy_scale: f64,
}

impl PairGeometry {
    /// Only the non-negligible squared singular values.
    pub fn nonzero_sigma_sq(&self) -> &[f64] {
        &self.squared_singular_values[..self.rank]
    }
}

pub fn pair_geometry(set: &MbmSignalSet, i: usize, j: usize, tol: f64) -> Result<PairGeometry> {
    if i == j {
        return Err(Error::Argument("pair geometry needs two distinct blocks".into()));
    }
    if tol <= 0.0 {
        return Err(Error::Argument("rank tolerance must be positive".into()));
    }
    set.block(i)?;
    set.block(j)?;
    let g = gram_matrix(set, i, j);
    let sigma_sq = eigen_of_gram(&g, set.n());
    Ok(PairGeometry {
        pair: (i, j),
        rank: rank_of(&sigma_sq, tol),
        squared_singular_values: sigma_sq,
        bit_distance: set.bit_distance(i, j),
        energy_scale: 1.0 / set.mean_energy_per_use(),
    })
}

/// `(1/2) [∏_r (1 + σ²_r ρ/4)]^(−n_r)` over the non-zero `σ²`.
pub fn pep_bound_sigma(sigma_sq: &[f64], rho: f64, n_r: u32) -> f64 {
    let log_det: f64 = sigma_sq.iter().map(|s| (s * rho / 4.0).ln_1p()).sum();
    0.5 * (-(n_r as f64) * log_det).exp()
}

/// PEP bound for the pair as transmitted, i.e. with `c²` folded into `ρ`.
pub fn pep_bound(geometry: &PairGeometry, rho: f64, n_r: u32) -> f64 {
    pep_bound_sigma(geometry.nonzero_sigma_sq(), rho * geometry.energy_scale, n_r)
}

/// Pair counts grouped by identical Gram spectrum and label distance.
#[derive(Debug, Clone)]
pub struct GeometryHistogram {
    pub set_size: usize,
    pub bit_width: u32,
    /// Distinct spectra, each descending.
    pub spectra: Vec<Vec<f64>>,
    /// `(spectrum index, bit distance) -> unordered pair count`.
    pub classes: BTreeMap<(usize, u32), u64>,
    /// `c²`; the spectra are of the unnormalized blocks.
    pub energy_scale: f64,
}

/// Sweep every unordered pair once.
pub fn geometry_histogram(set: &MbmSignalSet) -> Result<GeometryHistogram> {
    geometry_histogram_capped(set, DEFAULT_PAIR_CAP)
}

pub fn geometry_histogram_capped(set: &MbmSignalSet, cap: usize) -> Result<GeometryHistogram> {
    if set.len() > cap {
        return Err(Error::CapExceeded {
            size: set.len(),
            cap,
        });
    }
    let size = set.len();
    let blocks = set.blocks();

    type Local = HashMap<(Vec<Complex<i64>>, u32), u64>;
    let merged: Local = (0..size)
        .into_par_iter()
        .fold(Local::new, |mut acc, i| {
            let a = &blocks[i];
            for (j, b) in blocks.iter().enumerate().skip(i + 1) {
                let g = gram_of(&a.map_indices, &a.symbols, &b.map_indices, &b.symbols);
                *acc.entry((g, (i ^ j).count_ones())).or_insert(0) += 1;
            }
            acc
        })
        .reduce(Local::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        });

    // Deterministic order: sort the distinct Gram matrices.
    let mut keys: Vec<(Vec<Complex<i64>>, u32)> = merged.keys().cloned().collect();
    keys.sort_by(|x, y| {
        let kx: Vec<(i64, i64)> = x.0.iter().map(|z| (z.re, z.im)).collect();
        let ky: Vec<(i64, i64)> = y.0.iter().map(|z| (z.re, z.im)).collect();
        kx.cmp(&ky).then(x.1.cmp(&y.1))
    });
    let mut gram_ids: HashMap<Vec<Complex<i64>>, usize> = HashMap::new();
    let mut spectra = Vec::new();
    let mut classes = BTreeMap::new();
    for key in keys {
        let count = merged[&key];
        let id = *gram_ids.entry(key.0.clone()).or_insert_with(|| {
            spectra.push(eigen_of_gram(&key.0, set.n()));
            spectra.len() - 1
        });
        *classes.entry((id, key.1)).or_insert(0) += count;
    }
    Ok(GeometryHistogram {
        set_size: size,
        bit_width: set.bit_width(),
        spectra,
        classes,
        energy_scale: 1.0 / set.mean_energy_per_use(),
    })
}

impl GeometryHistogram {
    pub fn total_pairs(&self) -> u64 {
        self.classes.values().sum()
    }

    /// Union-bound BER at linear SNR `rho`, as the ordered double sum over
    /// `j != i` (twice the unordered sum, since both PEP and label distance
    /// are symmetric).
    pub fn union_bound(&self, rho: f64, n_r: u32, tol: f64) -> f64 {
        let rho = rho * self.energy_scale;
        let mut sum = 0.0;
        let mut comp = 0.0;
        for (&(id, bits), &count) in &self.classes {
            let sigma = &self.spectra[id];
            let r = rank_of(sigma, tol);
            let term = 2.0 * count as f64 * pep_bound_sigma(&sigma[..r], rho, n_r) * bits as f64;
            // Kahan summation: terms span many decades
            let y = term - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        sum / (self.set_size as f64 * self.bit_width as f64)
    }

    /// Union bound contributed only by pairs of the given rank.
    pub fn union_bound_rank(&self, rho: f64, n_r: u32, tol: f64, rank: usize) -> f64 {
        let rho = rho * self.energy_scale;
        let mut sum = 0.0;
        for (&(id, bits), &count) in &self.classes {
            let sigma = &self.spectra[id];
            let r = rank_of(sigma, tol);
            if r == rank {
                sum += 2.0 * count as f64 * pep_bound_sigma(&sigma[..r], rho, n_r) * bits as f64;
            }
        }
        sum / (self.set_size as f64 * self.bit_width as f64)
    }

    pub fn rank_profile(&self, tol: f64) -> RankProfile {
        let mut histogram = BTreeMap::new();
        for (&(id, _), &count) in &self.classes {
            *histogram.entry(rank_of(&self.spectra[id], tol)).or_insert(0) += count;
        }
        RankProfile::from_histogram(histogram)
    }
}

/// Rank distribution of all difference matrices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankProfile {
    pub histogram: BTreeMap<usize, u64>,
    pub min_rank: usize,
    pub rank_one_pairs: u64,
    pub total_pairs: u64,
}

impl RankProfile {
    fn from_histogram(histogram: BTreeMap<usize, u64>) -> Self {
        Self {
            min_rank: histogram.keys().next().copied().unwrap_or(0),
            rank_one_pairs: histogram.get(&1).copied().unwrap_or(0),
            total_pairs: histogram.values().sum(),
            histogram,
        }
    }

    /// Asymptotic diversity order `n_r · min rank`.
    pub fn diversity_order(&self, n_r: u32) -> u32 {
        n_r * self.min_rank as u32
    }

    /// `rank,count` with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("rank,count\n");
        for (r, c) in &self.histogram {
            let _ = writeln!(out, "{r},{c}");
        }
        out
    }

    pub fn summary(&self) -> String {
        format!(
            "min_rank={} rank_one_pairs={} total_pairs={}",
            self.min_rank, self.rank_one_pairs, self.total_pairs
        )
    }
}

/// Rank profile by full sweep; above the cap, `Err(CapExceeded)`.
pub fn rank_profile(set: &MbmSignalSet, tol: f64) -> Result<RankProfile> {
    Ok(geometry_histogram(set)?.rank_profile(tol))
}

/// Whether `Δ` has rank one, decided from the sparse structure alone: every
/// non-zero column must be a multiple of one common column.
pub fn is_rank_one_structural(set: &MbmSignalSet, i: usize, j: usize) -> bool {
    let a = &set.blocks()[i];
    let b = &set.blocks()[j];
    let mut reference: Option<[(u8, Complex<i64>); 2]> = None;
    for u in 0..set.n() {
        let mut col = column(&a.map_indices, &a.symbols, &b.map_indices, &b.symbols, u);
        // drop zero entries and order by row
        for e in col.iter_mut() {
            if e.1 == Complex::new(0, 0) {
                e.0 = u8::MAX;
            }
        }
        col.sort_by_key(|e| e.0);
        if col[0].0 == u8::MAX {
            continue;
        }
        match &reference {
            None => reference = Some(col),
            Some(r) => {
                if r[0].0 != col[0].0 || r[1].0 != col[1].0 {
                    return false;
                }
                // proportional: r0 * c1 == r1 * c0 (two-entry case)
                if col[1].0 != u8::MAX && r[0].1 * col[1].1 != r[1].1 * col[0].1 {
                    return false;
                }
            }
        }
    }
    reference.is_some()
}

/// Count rank-one pairs from the structural test; no size cap.
pub fn count_rank_one_structural(set: &MbmSignalSet) -> u64 {
    let size = set.len();
    (0..size)
        .into_par_iter()
        .map(|i| {
            ((i + 1)..size)
                .filter(|&j| is_rank_one_structural(set, i, j))
                .count() as u64
        })
        .sum()
}

/// Union-bound curve over an SNR grid in dB.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCurve {
    pub snr_db: Vec<f64>,
    pub ber_bound: Vec<f64>,
}

impl BoundCurve {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("snr_db,ber_bound\n");
        for (s, b) in self.snr_db.iter().zip(&self.ber_bound) {
            let _ = writeln!(out, "{s},{b:.6e}");
        }
        out
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Union bound over `snr_db` for `n_r` receive antennas.
pub fn union_bound(set: &MbmSignalSet, snr_db: &[f64], n_r: u32) -> Result<BoundCurve> {
    let hist = geometry_histogram(set)?;
    Ok(bound_curve(&hist, snr_db, n_r))
}

pub fn bound_curve(hist: &GeometryHistogram, snr_db: &[f64], n_r: u32) -> BoundCurve {
    BoundCurve {
        snr_db: snr_db.to_vec(),
        ber_bound: snr_db
            .iter()
            .map(|&s| hist.union_bound(db_to_linear(s), n_r, DEFAULT_RANK_TOL))
            .collect(),
    }
}
