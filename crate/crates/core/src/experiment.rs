//! Experiment configuration and the runners behind each CLI subcommand.
//!
//! Config files are UTF-8 `key = value` lines; `#` starts a comment. Every
//! runner returns the full text of its output (header comment plus body), so
//! the CLI only writes strings to disk.

use std::fmt::{self, Write as _};

use crate::channel_sim::{
    ber_csv, ber_curve, ber_nr_csv, ber_vs_nr, crossing, ebn0_from_snr, simulate_point,
    MlDetector, SimConfig, StoppingRule,
};
use crate::error::{Error, Result};
use crate::gf2m::Field;
use crate::link_analysis::{
    bound_curve, geometry_histogram, BoundCurve, DEFAULT_RANK_TOL,
};
use crate::map_index_code::build_shortened_rs;
use crate::signal_set::{conventional_set, named_alphabet, proposed_set, MbmSignalSet};
use crate::squaring::{build_constellation, levels_for_dimension};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Conventional,
    MicSq,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Conventional => "conventional",
            Scheme::MicSq => "mic-sq",
        })
    }
}

/// One experiment.
///
/// For `mic-sq`, `m` is the PAM order of the squaring seed; for
/// `conventional` it is the modulation order (2 = BPSK, 4 = QPSK, 16 = 16-QAM)
/// and `n`/`k` are unused. `levels`, when set, selects the standalone
/// constellation dump of `build`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scheme: Scheme,
    pub n: usize,
    pub k: usize,
    pub m_rf: u32,
    pub m: usize,
    pub levels: Option<usize>,
    pub n_r: usize,
    pub snr_start: f64,
    pub snr_stop: f64,
    pub snr_step: f64,
    pub seed: u64,
    pub min_bit_errors: u64,
    pub max_blocks: u64,
    pub chunk_blocks: u64,
    pub output: Option<String>,
}

/// Keys accepted in a config file, with defaults, for `--help`.
pub const CONFIG_KEYS: &[(&str, &str)] = &[
    ("scheme", "conventional | mic-sq (required)"),
    ("N", "block length in channel uses (mic-sq, required; power of two)"),
    ("K", "RS message length (mic-sq, required)"),
    ("m_rf", "number of RF mirrors (required)"),
    ("M", "PAM order (mic-sq) or modulation order (conventional) (required)"),
    ("L", "squaring stages for a standalone constellation dump (optional)"),
    ("n_r", "receive antennas (default 4)"),
    ("snr_start", "first SNR in dB (default 0)"),
    ("snr_stop", "last SNR in dB (default 20)"),
    ("snr_step", "SNR step in dB (default 2)"),
    ("seed", "master RNG seed (default 1)"),
    ("min_bit_errors", "stop a point after this many bit errors (default 100)"),
    ("max_blocks", "stop a point after this many blocks (default 10000000)"),
    ("chunk_blocks", "blocks per RNG stream chunk (default 2048)"),
    ("output", "output file path (optional)"),
];

impl ExperimentConfig {
    fn defaults(scheme: Scheme) -> Self {
        Self {
            scheme,
            n: 1,
            k: 0,
            m_rf: 1,
            m: 2,
            levels: None,
            n_r: 4,
            snr_start: 0.0,
            snr_stop: 20.0,
            snr_step: 2.0,
            seed: 1,
            min_bit_errors: 100,
            max_blocks: 10_000_000,
            chunk_blocks: 2048,
            output: None,
        }
    }

    /// A coded-set config with default simulation settings.
    pub fn mic_sq(n: usize, k: usize, m_rf: u32, m: usize, n_r: usize) -> Self {
        Self {
            n,
            k,
            m_rf,
            m,
            n_r,
            ..Self::defaults(Scheme::MicSq)
        }
    }

    /// A conventional-set config with default simulation settings.
    pub fn conventional(m_rf: u32, m: usize, n_r: usize) -> Self {
        Self {
            m_rf,
            m,
            n_r,
            ..Self::defaults(Scheme::Conventional)
        }
    }

    pub fn snr_grid(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut i = 0;
        loop {
            let s = self.snr_start + i as f64 * self.snr_step;
            if s > self.snr_stop + 1e-9 {
                break;
            }
            out.push((s * 1e9).round() / 1e9);
            i += 1;
        }
        out
    }

    pub fn stopping(&self) -> StoppingRule {
        StoppingRule {
            min_bit_errors: self.min_bit_errors,
            max_blocks: self.max_blocks,
        }
    }

    pub fn sim_config(&self) -> SimConfig {
        SimConfig {
            n_r: self.n_r,
            snr_db: self.snr_grid(),
            stopping: self.stopping(),
            seed: self.seed,
            chunk_blocks: self.chunk_blocks,
        }
    }

    /// Check every parameter against the preconditions of the modules it
    /// will be handed to.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Argument(m));
        if !(1..=8).contains(&self.m_rf) {
            return bad(format!("m_rf must be in 1..=8, got {}", self.m_rf));
        }
        if self.m < 2 || !self.m.is_power_of_two() {
            return bad(format!("M must be a power of two, got {}", self.m));
        }
        if self.n_r == 0 {
            return bad("n_r must be at least 1".into());
        }
        if self.snr_step.is_nan() || self.snr_step <= 0.0 || !self.snr_start.is_finite() || !self.snr_stop.is_finite() {
            return bad("SNR range needs finite bounds and a positive step".into());
        }
        if self.snr_stop < self.snr_start {
            return bad("snr_stop must not be below snr_start".into());
        }
        if self.max_blocks == 0 || self.chunk_blocks == 0 {
            return bad("max_blocks and chunk_blocks must be positive".into());
        }
        if let Some(l) = self.levels {
            if l == 0 || l > 6 {
                return bad(format!("L must be in 1..=6, got {l}"));
            }
        }
        match self.scheme {
            Scheme::Conventional => {
                named_alphabet(self.m)?;
            }
            Scheme::MicSq => {
                if self.levels.is_none() {
                    levels_for_dimension(self.n).map_err(|_| {
                        Error::Argument(format!("N must be a power of two, got {}", self.n))
                    })?;
                    let max_n = (1usize << self.m_rf) - 1;
                    if self.k == 0 || self.k >= self.n || self.n > max_n {
                        return bad(format!(
                            "need 1 <= K < N <= 2^m_rf - 1 = {max_n}, got N={} K={}",
                            self.n, self.k
                        ));
                    }
                    if self.k as u32 * self.m_rf > 20 {
                        return bad("codebook with more than 2^20 codewords".into());
                    }
                }
            }
        }
        Ok(())
    }

    /// `key = value` lines that [`parse_config`] reads back to an equal config.
    pub fn echo(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "scheme = {}", self.scheme);
        if self.scheme == Scheme::MicSq {
            let _ = writeln!(out, "N = {}", self.n);
            let _ = writeln!(out, "K = {}", self.k);
        }
        let _ = writeln!(out, "m_rf = {}", self.m_rf);
        let _ = writeln!(out, "M = {}", self.m);
        if let Some(l) = self.levels {
            let _ = writeln!(out, "L = {l}");
        }
        let _ = writeln!(out, "n_r = {}", self.n_r);
        let _ = writeln!(out, "snr_start = {:?}", self.snr_start);
        let _ = writeln!(out, "snr_stop = {:?}", self.snr_stop);
        let _ = writeln!(out, "snr_step = {:?}", self.snr_step);
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "min_bit_errors = {}", self.min_bit_errors);
        let _ = writeln!(out, "max_blocks = {}", self.max_blocks);
        let _ = writeln!(out, "chunk_blocks = {}", self.chunk_blocks);
        if let Some(o) = &self.output {
            let _ = writeln!(out, "output = {o}");
        }
        out
    }

    /// Signal set described by this config.
    pub fn signal_set(&self) -> Result<MbmSignalSet> {
        self.validate()?;
        match self.scheme {
            Scheme::Conventional => conventional_set(self.m_rf, &named_alphabet(self.m)?),
            Scheme::MicSq => {
                let field = Field::new(self.m_rf)?;
                let codebook = build_shortened_rs(&field, self.n, self.k)?;
                let constellation = build_constellation(self.m, levels_for_dimension(self.n)?)?;
                proposed_set(&codebook, &constellation)
            }
        }
    }
}

fn config_err(line: usize, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        message: message.into(),
    }
}

/// Parse a `key = value` config. Unknown or repeated keys are rejected.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut pairs: Vec<(usize, String, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| config_err(line_no, format!("expected `key = value`, got `{line}`")))?;
        let key = key.trim().to_string();
        if !CONFIG_KEYS.iter().any(|(k, _)| *k == key) {
            return Err(config_err(line_no, format!("unknown key `{key}`")));
        }
        if pairs.iter().any(|(_, k, _)| *k == key) {
            return Err(config_err(line_no, format!("duplicate key `{key}`")));
        }
        pairs.push((line_no, key, value.trim().to_string()));
    }

    let find = |key: &str| pairs.iter().find(|(_, k, _)| k == key);
    let (scheme_line, _, scheme) =
        find("scheme").ok_or_else(|| config_err(0, "missing required key `scheme`"))?;
    let scheme = match scheme.as_str() {
        "conventional" => Scheme::Conventional,
        "mic-sq" => Scheme::MicSq,
        other => return Err(config_err(*scheme_line, format!("unknown scheme `{other}`"))),
    };
    let mut cfg = ExperimentConfig::defaults(scheme);

    fn num<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T> {
        v.parse()
            .map_err(|_| config_err(line, format!("`{key}` has invalid value `{v}`")))
    }

    let mut seen_required = Vec::new();
    for (line, key, value) in &pairs {
        let line = *line;
        match key.as_str() {
            "scheme" => {}
            "N" => cfg.n = num(line, key, value)?,
            "K" => cfg.k = num(line, key, value)?,
            "m_rf" => cfg.m_rf = num(line, key, value)?,
            "M" => {
                cfg.m = num(line, key, value)?;
                if cfg.m < 2 || !cfg.m.is_power_of_two() {
                    return Err(config_err(line, "M must be a power of two"));
                }
            }
            "L" => cfg.levels = Some(num(line, key, value)?),
            "n_r" => cfg.n_r = num(line, key, value)?,
            "snr_start" => cfg.snr_start = num(line, key, value)?,
            "snr_stop" => cfg.snr_stop = num(line, key, value)?,
            "snr_step" => cfg.snr_step = num(line, key, value)?,
            "seed" => cfg.seed = num(line, key, value)?,
            "min_bit_errors" => cfg.min_bit_errors = num(line, key, value)?,
            "max_blocks" => cfg.max_blocks = num(line, key, value)?,
            "chunk_blocks" => cfg.chunk_blocks = num(line, key, value)?,
            "output" => cfg.output = Some(value.clone()),
            _ => unreachable!("keys are checked above"),
        }
        seen_required.push(key.as_str());
    }
    let mut required = vec!["m_rf", "M"];
    if scheme == Scheme::MicSq && cfg.levels.is_none() {
        required.extend(["N", "K"]);
    }
    for key in required {
        if !seen_required.contains(&key) {
            return Err(config_err(0, format!("missing required key `{key}`")));
        }
    }
    cfg.validate().map_err(|e| match e {
        Error::Argument(m) => config_err(0, m),
        other => other,
    })?;
    Ok(cfg)
}

/// Comment header carried by every output file. The worker count is that of
/// the rayon pool the call runs in.
pub fn header(command: &str, cfg: &ExperimentConfig) -> String {
    let mut out = format!(
        "# mbm {VERSION}\n# command = {command}\n# workers = {}\n",
        rayon::current_num_threads()
    );
    for line in cfg.echo().lines() {
        let _ = writeln!(out, "# {line}");
    }
    out
}

/// `build`: codebook, constellation and signal-set dumps; with `L` set, the
/// constellation for (M, L) alone.
pub fn run_build(cfg: &ExperimentConfig) -> Result<String> {
    cfg.validate()?;
    let mut out = header("build", cfg);
    if let Some(levels) = cfg.levels {
        out.push_str(&build_constellation(cfg.m, levels)?.dump());
        return Ok(out);
    }
    if cfg.scheme == Scheme::MicSq {
        let field = Field::new(cfg.m_rf)?;
        out.push_str(&build_shortened_rs(&field, cfg.n, cfg.k)?.dump());
        out.push_str(&build_constellation(cfg.m, levels_for_dimension(cfg.n)?)?.dump());
    }
    let set = cfg.signal_set()?;
    let _ = writeln!(
        out,
        "# set size={} bits={} rate={}",
        set.len(),
        set.bit_width(),
        set.rate()
    );
    out.push_str(&set.dump());
    Ok(out)
}

pub fn run_spectrum(cfg: &ExperimentConfig) -> Result<String> {
    let set = cfg.signal_set()?;
    let spectrum = set.distance_spectrum()?;
    Ok(header("spectrum", cfg) + &spectrum.to_csv())
}

pub fn run_bound(cfg: &ExperimentConfig) -> Result<String> {
    let set = cfg.signal_set()?;
    let hist = geometry_histogram(&set)?;
    let curve = bound_curve(&hist, &cfg.snr_grid(), cfg.n_r as u32);
    Ok(header("bound", cfg) + &curve.to_csv())
}

pub fn run_ranks(cfg: &ExperimentConfig) -> Result<String> {
    let set = cfg.signal_set()?;
    let profile = geometry_histogram(&set)?.rank_profile(DEFAULT_RANK_TOL);
    Ok(format!(
        "{}# {}\n{}",
        header("ranks", cfg),
        profile.summary(),
        profile.to_csv()
    ))
}

pub fn run_simulate(cfg: &ExperimentConfig) -> Result<String> {
    let set = cfg.signal_set()?;
    let points = ber_curve(&set, &cfg.sim_config())?;
    Ok(header("simulate", cfg) + &ber_csv(&points, cfg.seed))
}

/// A named output of a canned figure run.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureOutput {
    pub name: String,
    pub contents: String,
}

fn with_grid(mut cfg: ExperimentConfig, start: f64, stop: f64, step: f64, seed: u64) -> ExperimentConfig {
    cfg.snr_start = start;
    cfg.snr_stop = stop;
    cfg.snr_step = step;
    cfg.seed = seed;
    cfg
}

fn sim_and_bound(fig: u32, tag: &str, cfg: &ExperimentConfig) -> Result<Vec<FigureOutput>> {
    let set = cfg.signal_set()?;
    let hist = geometry_histogram(&set)?;
    let bound = bound_curve(&hist, &cfg.snr_grid(), cfg.n_r as u32);
    let points = ber_curve(&set, &cfg.sim_config())?;
    let cmd = format!("figure {fig}");
    Ok(vec![
        FigureOutput {
            name: format!("fig{fig}_{tag}_sim.csv"),
            contents: header(&cmd, cfg) + &ber_csv(&points, cfg.seed),
        },
        FigureOutput {
            name: format!("fig{fig}_{tag}_bound.csv"),
            contents: header(&cmd, cfg) + &bound.to_csv(),
        },
    ])
}

fn deep_bound(fig: u32, tag: &str, cfg: &ExperimentConfig) -> Result<FigureOutput> {
    let set = cfg.signal_set()?;
    let hist = geometry_histogram(&set)?;
    let curve: BoundCurve = bound_curve(&hist, &cfg.snr_grid(), cfg.n_r as u32);
    Ok(FigureOutput {
        name: format!("fig{fig}_{tag}_bound.csv"),
        contents: header(&format!("figure {fig}"), cfg) + &curve.to_csv(),
    })
}

/// Canned desk-scale reproduction of one result figure.
///
/// * 3: 2.25 bpcu coded set vs 2 bpcu conventional, n_r = 4, simulation + bound
/// * 4: 3.25 bpcu coded set vs 3 bpcu conventional, n_r = 4, simulation + bound
/// * 5: BER against n_r at 0 and 2 dB for the 3.25 / 3 bpcu sets
/// * 6: SNR needed for BER 1e-3 against n_r for the same sets
/// * 7, 8: union bounds of the figure-3 / figure-4 sets, 0 to 70 dB (below 1e-20)
/// * 9: BER against Eb/N0 with four mirrors: 2.25 bpcu coded vs 5 bpcu BPSK
pub fn run_figure(fig: u32, seed: u64) -> Result<Vec<FigureOutput>> {
    let coded_225 = ExperimentConfig::mic_sq(4, 2, 4, 2, 4);
    // the 8192-block set costs ~10x more per block; cap it so the low-BER
    // tail is traded for runtime
    let coded_325 = ExperimentConfig {
        max_blocks: 1_000_000,
        ..ExperimentConfig::mic_sq(4, 2, 6, 2, 4)
    };
    let conv_2 = ExperimentConfig::conventional(1, 2, 4);
    let conv_3 = ExperimentConfig::conventional(2, 2, 4);
    match fig {
        3 => {
            let mut out = sim_and_bound(3, "mic-sq", &with_grid(coded_225, 0.0, 9.0, 1.0, seed))?;
            out.extend(sim_and_bound(3, "conventional", &with_grid(conv_2, 0.0, 16.0, 2.0, seed))?);
            Ok(out)
        }
        4 => {
            let mut out = sim_and_bound(4, "mic-sq", &with_grid(coded_325.clone(), 0.0, 7.0, 1.0, seed))?;
            out.extend(sim_and_bound(4, "conventional", &with_grid(conv_3.clone(), 0.0, 16.0, 2.0, seed))?);
            Ok(out)
        }
        5 => {
            let mut out = Vec::new();
            for (tag, cfg, nrs) in [
                ("mic-sq", coded_325, (1..=10).collect::<Vec<usize>>()),
                ("conventional", conv_3, (1..=18).collect()),
            ] {
                let set = cfg.signal_set()?;
                for snr in [0.0, 2.0] {
                    let pts = ber_vs_nr(&set, &nrs, snr, cfg.stopping(), seed, cfg.chunk_blocks)?;
                    let mut c = cfg.clone();
                    c.snr_start = snr;
                    c.snr_stop = snr;
                    c.seed = seed;
                    out.push(FigureOutput {
                        name: format!("fig5_{tag}_snr{snr}.csv"),
                        contents: header("figure 5", &c) + &ber_nr_csv(&pts, seed),
                    });
                }
            }
            Ok(out)
        }
        6 => {
            let mut out = Vec::new();
            for (tag, cfg, grid) in [
                ("mic-sq", coded_325, (-6.0, 30.0)),
                ("conventional", conv_3, (-6.0, 40.0)),
            ] {
                let set = cfg.signal_set()?;
                let detector = MlDetector::new(&set);
                let mut body = String::from("n_r,snr_db_required\n");
                for nr in [1usize, 2, 4, 8] {
                    let c = with_grid(cfg.clone(), grid.0, grid.1, 1.0, seed);
                    let stopping = StoppingRule {
                        max_blocks: 200_000,
                        ..c.stopping()
                    };
                    // sweep upward until the curve is a decade past the target
                    let mut xy = Vec::new();
                    for (k, snr) in c.snr_grid().into_iter().enumerate() {
                        let p = simulate_point(
                            &set, &detector, nr, snr, stopping, seed, k as u64, c.chunk_blocks,
                        );
                        xy.push((snr, p.ber));
                        if p.ber < 1e-4 {
                            break;
                        }
                    }
                    match crossing(&xy, 1e-3) {
                        Some(s) => {
                            let _ = writeln!(body, "{nr},{s:.3}");
                        }
                        None => {
                            let _ = writeln!(body, "{nr},nan");
                        }
                    }
                }
                let mut c = cfg.clone();
                c.seed = seed;
                out.push(FigureOutput {
                    name: format!("fig6_{tag}.csv"),
                    contents: header("figure 6", &c) + &body,
                });
            }
            Ok(out)
        }
        7 => Ok(vec![
            deep_bound(7, "mic-sq", &with_grid(coded_225, 0.0, 70.0, 1.0, seed))?,
            deep_bound(7, "conventional", &with_grid(conv_2, 0.0, 70.0, 1.0, seed))?,
        ]),
        8 => Ok(vec![
            deep_bound(8, "mic-sq", &with_grid(coded_325, 0.0, 70.0, 1.0, seed))?,
            deep_bound(8, "conventional", &with_grid(conv_3, 0.0, 70.0, 1.0, seed))?,
        ]),
        9 => {
            let mut out = Vec::new();
            for (tag, cfg) in [
                ("mic-sq", with_grid(coded_225, 0.0, 9.0, 1.0, seed)),
                ("conventional", with_grid(ExperimentConfig::conventional(4, 2, 4), 6.0, 22.0, 2.0, seed)),
            ] {
                let set = cfg.signal_set()?;
                let eta = set.rate();
                let points = ber_curve(&set, &cfg.sim_config())?;
                let mut body = String::from("snr_db,ebn0_db,ber,bit_errors,bits,blocks,seed\n");
                for p in &points {
                    let _ = writeln!(
                        body,
                        "{},{:.4},{:.6e},{},{},{},{}",
                        p.snr_db,
                        ebn0_from_snr(p.snr_db, eta)?,
                        p.ber,
                        p.bit_errors,
                        p.bits_simulated,
                        p.blocks,
                        seed
                    );
                }
                out.push(FigureOutput {
                    name: format!("fig9_{tag}.csv"),
                    contents: header("figure 9", &cfg) + &body,
                });
            }
            Ok(out)
        }
        other => Err(Error::Argument(format!(
            "no canned run for figure {other} (choose 3-9)"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "scheme = mic-sq\nN = 4\nK = 2\nm_rf = 4\nM = 2\nn_r = 4\n";

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg, ExperimentConfig::mic_sq(4, 2, 4, 2, 4));
        assert_eq!(cfg.seed, 1);
        assert_eq!(cfg.min_bit_errors, 100);
        assert_eq!(cfg.max_blocks, 10_000_000);
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# experiment\n\nscheme = conventional   # BPSK\nm_rf = 1\nM = 2\n";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.scheme, Scheme::Conventional);
        assert_eq!(cfg.m_rf, 1);
    }

    #[test]
    fn rejects_non_power_of_two_order() {
        let err = parse_config("scheme = mic-sq\nN = 4\nK = 2\nm_rf = 4\nM = 3\n").unwrap_err();
        assert_eq!(
            err,
            Error::Config {
                line: 5,
                message: "M must be a power of two".into()
            }
        );
        assert!(err.to_string().contains("M must be a power of two"));
    }

    #[test]
    fn rejects_unknown_and_duplicate_keys() {
        let err = parse_config("scheme = mic-sq\nfoo = 1\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: 2, .. }));
        let err = parse_config("scheme = mic-sq\nN = 4\nN = 4\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: 3, .. }));
        let err = parse_config("scheme = mic-sq\nN 4\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: 2, .. }));
        let err = parse_config("scheme = qam\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: 1, .. }));
    }

    #[test]
    fn rejects_invalid_combinations() {
        // N larger than the RS length over GF(4)
        assert!(parse_config("scheme = mic-sq\nN = 4\nK = 2\nm_rf = 2\nM = 2\n").is_err());
        assert!(parse_config("scheme = mic-sq\nN = 3\nK = 2\nm_rf = 4\nM = 2\n").is_err());
        assert!(parse_config("scheme = mic-sq\nN = 4\nK = 2\nm_rf = 4\nM = 2\nn_r = 0\n").is_err());
        assert!(parse_config("scheme = conventional\nm_rf = 1\nM = 8\n").is_err());
        assert!(parse_config("scheme = mic-sq\nN = 4\nm_rf = 4\nM = 2\n").is_err());
    }

    #[test]
    fn echo_round_trips() {
        let mut cfg = parse_config(MINIMAL).unwrap();
        cfg.snr_step = 0.5;
        cfg.output = Some("out/x.csv".into());
        cfg.levels = None;
        assert_eq!(parse_config(&cfg.echo()).unwrap(), cfg);
        let conv = ExperimentConfig::conventional(2, 4, 8);
        assert_eq!(parse_config(&conv.echo()).unwrap(), conv);
        let mut standalone = ExperimentConfig::mic_sq(4, 2, 4, 4, 4);
        standalone.levels = Some(2);
        assert_eq!(parse_config(&standalone.echo()).unwrap(), standalone);
    }

    #[test]
    fn snr_grid_inclusive() {
        let mut cfg = ExperimentConfig::conventional(1, 2, 1);
        cfg.snr_start = -2.0;
        cfg.snr_stop = 1.0;
        cfg.snr_step = 0.5;
        assert_eq!(cfg.snr_grid(), vec![-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0]);
    }

    #[test]
    fn unknown_figure() {
        assert!(run_figure(10, 1).is_err());
    }

    #[test]
    fn ranks_summary_line() {
        let out = run_ranks(&ExperimentConfig::mic_sq(4, 2, 4, 2, 4)).unwrap();
        assert!(out.contains("# min_rank=1 rank_one_pairs=1 total_pairs=130816\n"));
    }
}
