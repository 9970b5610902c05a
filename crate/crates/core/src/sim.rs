//! Frame error rate campaigns and the averaged-unreliability bounds.
//!
//! Every frame draws its randomness from a stream keyed by
//! `(seed, grid point, frame index)`, and per-frame results are reduced in
//! frame order, so results do not depend on the thread count.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dcf::{DecoderCapability, DecoderKind};
use crate::error::{Error, Result};
use crate::gf::FieldElement;
use crate::gmd::{gmd_decode, GmdConfig};
use crate::modem::{awgn, sigma_from_ebn0, Constellation, UnreliabilityMethod};
use crate::rs_codec::{CodeParams, DecodeOutcome, ReceivedWord, RsCodec};
use crate::stats::wilson_interval;
use crate::strategy::{self, StrategyKind, UnreliabilityVector};

/// Frames simulated per parallel batch.
const BATCH: u64 = 2048;

/// Confidence level of the reported intervals.
pub const CI_LEVEL: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DecoderMode {
    ErrorsOnly,
    FixedTau(usize),
    Adaptive,
    Gmd,
    SemiSimulative,
}

impl fmt::Display for DecoderMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecoderMode::ErrorsOnly => write!(f, "errors_only"),
            DecoderMode::FixedTau(t) => write!(f, "fixed_tau({t})"),
            DecoderMode::Adaptive => write!(f, "adaptive"),
            DecoderMode::Gmd => write!(f, "gmd"),
            DecoderMode::SemiSimulative => write!(f, "semi_simulative"),
        }
    }
}

impl std::str::FromStr for DecoderMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "errors_only" => return Ok(DecoderMode::ErrorsOnly),
            "adaptive" => return Ok(DecoderMode::Adaptive),
            "gmd" => return Ok(DecoderMode::Gmd),
            "semi_simulative" => return Ok(DecoderMode::SemiSimulative),
            _ => {}
        }
        let inner = s
            .strip_prefix("fixed_tau(")
            .and_then(|r| r.strip_suffix(')'))
            .or_else(|| s.strip_prefix("fixed_tau:"))
            .ok_or_else(|| Error::Config(format!("unknown decoder mode '{s}'")))?;
        inner
            .trim()
            .parse()
            .map(DecoderMode::FixedTau)
            .map_err(|_| Error::Config(format!("bad erasure count in '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignConfig {
    pub code: CodeParams,
    pub decoder: DecoderKind,
    pub constellation_size: usize,
    pub ebn0_grid: Vec<f64>,
    pub strategy: StrategyKind,
    pub modes: Vec<DecoderMode>,
    pub max_frames: u64,
    pub max_errors: u64,
    pub seed: u64,
    pub unreliability: UnreliabilityMethod,
    /// Vectors averaged for the semi-simulative erasure count.
    pub avg_samples: usize,
    /// Count frames where the decoder outcome disagrees with
    /// `errors > eps0(tau)` (fixed-tau style modes only).
    pub verify_indicator: bool,
}

impl CampaignConfig {
    pub fn new(code: CodeParams) -> Self {
        CampaignConfig {
            code,
            decoder: DecoderKind::Bmd,
            constellation_size: code.field.size(),
            ebn0_grid: vec![],
            strategy: StrategyKind::Exact,
            modes: vec![DecoderMode::ErrorsOnly],
            max_frames: 10_000,
            max_errors: 100,
            seed: 0,
            unreliability: UnreliabilityMethod::NearestNeighbor,
            avg_samples: 10_000,
            verify_indicator: false,
        }
    }

    pub fn capability(&self) -> DecoderCapability {
        DecoderCapability { kind: self.decoder, code: self.code }
    }

    pub fn validate(&self) -> Result<()> {
        self.code.validate()?;
        if self.ebn0_grid.is_empty() {
            return Err(Error::Config("missing `ebn0` grid".into()));
        }
        if let Some(v) = self.ebn0_grid.iter().find(|v| !v.is_finite()) {
            return Err(Error::Config(format!("Eb/N0 value {v} is not finite")));
        }
        if self.max_frames == 0 {
            return Err(Error::Config("max_frames must be at least 1".into()));
        }
        if self.max_errors == 0 {
            return Err(Error::Config("max_errors must be at least 1".into()));
        }
        if self.modes.is_empty() {
            return Err(Error::Config("no decoder modes selected".into()));
        }
        if self.constellation_size != self.code.field.size() {
            return Err(Error::Config(format!(
                "{}-QAM does not carry one GF({}) symbol per point",
                self.constellation_size,
                self.code.field.size()
            )));
        }
        Constellation::new(self.constellation_size)?;
        if self.decoder != DecoderKind::Bmd {
            return Err(Error::Config(format!(
                "Monte-Carlo modes need the BMD decoder; use `predict` for {} curves",
                self.decoder
            )));
        }
        for m in &self.modes {
            if let DecoderMode::FixedTau(t) = m {
                if *t >= self.code.d_min() {
                    return Err(Error::Config(format!("fixed_tau({t}) exceeds d_min - 1 = {}", self.code.d_min() - 1)));
                }
            }
        }
        if self.modes.contains(&DecoderMode::SemiSimulative) && self.avg_samples == 0 {
            return Err(Error::Config("avg_samples must be at least 1".into()));
        }
        Ok(())
    }
}

/// One row of campaign output.
#[derive(Debug, Clone, PartialEq)]
pub struct FerPoint {
    pub ebn0_db: f64,
    pub mode: DecoderMode,
    pub strategy: Option<StrategyKind>,
    /// Erasure count used for every frame, when it is fixed.
    pub tau: Option<usize>,
    pub frames: u64,
    pub frame_errors: u64,
    pub fer: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Mean over frames of the analytic failure probability, where defined.
    pub predicted_p: Option<f64>,
    pub indicator_mismatches: u64,
}

pub const CSV_HEADER: &str = "ebn0_db,mode,strategy,tau,frames,frame_errors,fer,ci_low,ci_high,predicted_p";

/// `%g`-style formatting with 10 significant digits.
pub fn fmt_sig(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..10).contains(&exp) {
        let decimals = (9 - exp).max(0) as usize;
        let s = format!("{v:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let s = format!("{v:.9e}");
        let (mant, e) = s.split_once('e').expect("scientific format");
        let mant = if mant.contains('.') { mant.trim_end_matches('0').trim_end_matches('.') } else { mant };
        format!("{mant}e{e}")
    }
}

impl FerPoint {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            fmt_sig(self.ebn0_db),
            self.mode,
            self.strategy.map(|s| s.to_string()).unwrap_or_default(),
            self.tau.map(|t| t.to_string()).unwrap_or_default(),
            self.frames,
            self.frame_errors,
            fmt_sig(self.fer),
            fmt_sig(self.ci_low),
            fmt_sig(self.ci_high),
            self.predicted_p.map(fmt_sig).unwrap_or_default(),
        )
    }
}

/// SplitMix64 finalizer, used to derive independent stream seeds.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Random stream for item `index` of a labelled purpose at one grid point.
pub fn stream(seed: u64, domain: u64, point: u64, index: u64) -> ChaCha8Rng {
    let key = mix(mix(mix(seed ^ mix(domain)) ^ point) ^ index);
    ChaCha8Rng::seed_from_u64(key)
}

const DOMAIN_FRAME: u64 = 1;
const DOMAIN_AVERAGE: u64 = 2;

/// Transmits `n` uniform random symbols and returns the sorted
/// unreliabilities of the received points.
pub fn sample_unreliability_vector<R: Rng + ?Sized>(
    sigma: f64,
    constellation: &Constellation,
    method: UnreliabilityMethod,
    n: usize,
    rng: &mut R,
) -> UnreliabilityVector {
    let m = constellation.size() as u16;
    let symbols: Vec<u16> = (0..n).map(|_| rng.random_range(0..m)).collect();
    let rx = awgn(&constellation.modulate(&symbols), sigma, rng);
    let h: Vec<f64> = rx.iter().map(|&y| method.evaluate(constellation, y, sigma)).collect();
    UnreliabilityVector::from_unsorted(h).expect("unreliabilities lie in [0, 1)").0
}

#[derive(Debug, Clone, PartialEq)]
pub struct AverageUnreliability {
    pub h_bar: UnreliabilityVector,
    pub samples: usize,
}

/// Component-wise mean of sorted vectors.
pub fn mean_of_sorted(vectors: &[UnreliabilityVector]) -> Result<AverageUnreliability> {
    let first = vectors.first().ok_or_else(|| Error::Domain("no vectors to average".into()))?;
    let n = first.len();
    let mut acc = vec![0.0; n];
    for v in vectors {
        if v.len() != n {
            return Err(Error::Domain("vectors of different lengths".into()));
        }
        for (a, x) in acc.iter_mut().zip(v.as_slice()) {
            *a += x;
        }
    }
    let count = vectors.len() as f64;
    let mut mean: Vec<f64> = acc.into_iter().map(|a| a / count).collect();
    // Means of sorted vectors are sorted; rounding may still leave ties
    // out of order by an ulp.
    for i in 1..mean.len() {
        if mean[i] > mean[i - 1] {
            mean[i] = mean[i - 1];
        }
    }
    Ok(AverageUnreliability { h_bar: UnreliabilityVector::new(mean)?, samples: vectors.len() })
}

/// Draws `samples` unreliability vectors on independent streams.
pub fn sample_vectors(
    sigma: f64,
    constellation: &Constellation,
    method: UnreliabilityMethod,
    n: usize,
    samples: usize,
    seed: u64,
    point: u64,
) -> Vec<UnreliabilityVector> {
    (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, DOMAIN_AVERAGE, point, i);
            sample_unreliability_vector(sigma, constellation, method, n, &mut rng)
        })
        .collect()
}

pub fn average_unreliability(
    sigma: f64,
    constellation: &Constellation,
    method: UnreliabilityMethod,
    n: usize,
    samples: usize,
    seed: u64,
    point: u64,
) -> Result<AverageUnreliability> {
    if samples == 0 {
        return Err(Error::Domain("need at least one sample".into()));
    }
    mean_of_sorted(&sample_vectors(sigma, constellation, method, n, samples, seed, point))
}

/// Erasure count used for every frame at one Eb/N0: the chosen strategy
/// applied to the averaged unreliabilities.
pub fn tau_bar(h_bar: &UnreliabilityVector, cap: &DecoderCapability, kind: StrategyKind) -> Result<usize> {
    Ok(strategy::choose_tau(kind, h_bar, cap)?.tau_chosen)
}

/// Analytic failure probability of errors-only decoding, `P(0)`.
pub fn predict_errors_only(h: &UnreliabilityVector, cap: &DecoderCapability) -> f64 {
    strategy::exact_p(h, cap, 0)
}

/// What happened to one frame under one mode.
#[derive(Debug, Clone, Copy)]
struct ModeOutcome {
    error: bool,
    predicted: Option<f64>,
    mismatch: bool,
}

struct PointContext<'a> {
    codec: &'a RsCodec,
    constellation: &'a Constellation,
    cap: DecoderCapability,
    sigma: f64,
    cfg: &'a CampaignConfig,
    gmd: GmdConfig,
    semi_tau: Option<usize>,
}

impl PointContext<'_> {
    fn frame(&self, point: u64, index: u64) -> Result<Vec<ModeOutcome>> {
        let mut rng = stream(self.cfg.seed, DOMAIN_FRAME, point, index);
        let q = self.codec.field().size() as u16;
        let info: Vec<FieldElement> = (0..self.codec.params().k).map(|_| FieldElement(rng.random_range(0..q))).collect();
        let cw = self.codec.encode(&info)?;
        let symbols: Vec<u16> = cw.iter().map(|s| s.value()).collect();
        let rx = awgn(&self.constellation.modulate(&symbols), self.sigma, &mut rng);
        let mut positions = Vec::with_capacity(rx.len());
        let mut h = Vec::with_capacity(rx.len());
        for &y in &rx {
            positions.push(Some(FieldElement(self.constellation.hard_decision(y) as u16)));
            h.push(self.cfg.unreliability.evaluate(self.constellation, y, self.sigma));
        }
        let word = ReceivedWord::new(positions, h.clone())?;
        let (sorted, _) = UnreliabilityVector::from_unsorted(h)?;

        let fixed = |tau: usize| -> Result<ModeOutcome> {
            let trial = word.erase_most_unreliable(tau);
            let out = self.codec.decode_ee(&trial)?;
            let error = out.codeword() != Some(&cw[..]);
            let mut mismatch = false;
            if self.cfg.verify_indicator {
                let residual = (0..cw.len()).filter(|&i| trial.positions[i].is_some_and(|s| s != cw[i])).count();
                let predicted_fail = self.cap.epsilon0(tau).is_none_or(|e| residual > e);
                mismatch = predicted_fail != error;
            }
            Ok(ModeOutcome { error, predicted: Some(strategy::exact_p(&sorted, &self.cap, tau)), mismatch })
        };

        self.cfg
            .modes
            .iter()
            .map(|mode| match mode {
                DecoderMode::ErrorsOnly => fixed(0),
                DecoderMode::FixedTau(t) => fixed(*t),
                DecoderMode::SemiSimulative => fixed(self.semi_tau.expect("computed before frames")),
                DecoderMode::Adaptive => {
                    let choice = strategy::choose_tau(self.cfg.strategy, &sorted, &self.cap)?;
                    fixed(choice.tau_chosen)
                }
                DecoderMode::Gmd => {
                    let out = gmd_decode(self.codec, &word, &self.gmd)?;
                    Ok(ModeOutcome { error: !matches!(out, DecodeOutcome::Decoded(ref c) if *c == cw), predicted: None, mismatch: false })
                }
            })
            .collect()
    }
}

#[derive(Debug, Default, Clone)]
struct Tally {
    frames: u64,
    errors: u64,
    predicted_sum: f64,
    has_prediction: bool,
    mismatches: u64,
    done: bool,
}

/// Runs the campaign on the current rayon pool.
pub fn run_campaign(cfg: &CampaignConfig) -> Result<Vec<FerPoint>> {
    cfg.validate()?;
    let codec = RsCodec::new(cfg.code)?;
    let constellation = Constellation::new(cfg.constellation_size)?;
    let cap = cfg.capability();
    let mut rows = Vec::new();
    for (pi, &ebn0) in cfg.ebn0_grid.iter().enumerate() {
        let point = pi as u64;
        let sigma = sigma_from_ebn0(ebn0, cfg.constellation_size, cfg.code.n, cfg.code.k);
        let semi_tau = if cfg.modes.contains(&DecoderMode::SemiSimulative) {
            let avg = average_unreliability(sigma, &constellation, cfg.unreliability, cfg.code.n, cfg.avg_samples, cfg.seed, point)?;
            Some(tau_bar(&avg.h_bar, &cap, cfg.strategy)?)
        } else {
            None
        };
        let ctx = PointContext {
            codec: &codec,
            constellation: &constellation,
            cap,
            sigma,
            cfg,
            gmd: GmdConfig::forney(&cfg.code),
            semi_tau,
        };
        let mut tallies = vec![Tally::default(); cfg.modes.len()];
        let mut next = 0u64;
        while next < cfg.max_frames && tallies.iter().any(|t| !t.done) {
            let end = (next + BATCH).min(cfg.max_frames);
            let batch: Vec<Vec<ModeOutcome>> =
                (next..end).into_par_iter().map(|i| ctx.frame(point, i)).collect::<Result<_>>()?;
            for outcomes in batch {
                for (t, o) in tallies.iter_mut().zip(outcomes) {
                    if t.done {
                        continue;
                    }
                    t.frames += 1;
                    t.errors += o.error as u64;
                    t.mismatches += o.mismatch as u64;
                    if let Some(p) = o.predicted {
                        t.predicted_sum += p;
                        t.has_prediction = true;
                    }
                    if t.errors >= cfg.max_errors || t.frames >= cfg.max_frames {
                        t.done = true;
                    }
                }
            }
            next = end;
        }
        for (mode, t) in cfg.modes.iter().zip(tallies) {
            let fer = t.errors as f64 / t.frames as f64;
            let (ci_low, ci_high) = wilson_interval(t.errors, t.frames, CI_LEVEL);
            let tau = match mode {
                DecoderMode::ErrorsOnly => Some(0),
                DecoderMode::FixedTau(x) => Some(*x),
                DecoderMode::SemiSimulative => semi_tau,
                _ => None,
            };
            let strategy = match mode {
                DecoderMode::Adaptive | DecoderMode::SemiSimulative => Some(cfg.strategy),
                _ => None,
            };
            rows.push(FerPoint {
                ebn0_db: ebn0,
                mode: *mode,
                strategy,
                tau,
                frames: t.frames,
                frame_errors: t.errors,
                fer,
                ci_low,
                ci_high,
                predicted_p: t.has_prediction.then(|| t.predicted_sum / t.frames as f64),
                indicator_mismatches: t.mismatches,
            });
        }
    }
    Ok(rows)
}

/// Runs the campaign on a dedicated pool of `threads` workers.
pub fn run_campaign_with_threads(cfg: &CampaignConfig, threads: usize) -> Result<Vec<FerPoint>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start thread pool: {e}")))?;
    pool.install(|| run_campaign(cfg))
}

/// Analytic curves from sampled unreliability vectors at one Eb/N0.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticPoint {
    pub ebn0_db: f64,
    pub sigma: f64,
    pub decoder: DecoderKind,
    pub samples: usize,
    /// `E_h[P(tau)]` for every `tau` in `0..d_min`.
    pub mean_profile: Vec<f64>,
    /// `(strategy, tau_bar, E_h[P(tau_bar)])`.
    pub strategies: Vec<(StrategyKind, usize, f64)>,
}

impl AnalyticPoint {
    pub fn errors_only(&self) -> f64 {
        self.mean_profile[0]
    }

    pub fn adaptive(&self, kind: StrategyKind) -> Option<(usize, f64)> {
        self.strategies.iter().find(|s| s.0 == kind).map(|s| (s.1, s.2))
    }
}

/// Samples `samples` vectors at each grid point, fixes `tau_bar` per strategy
/// from their mean and averages the exact `P(tau)` over the same vectors.
pub fn analytic_curves(
    code: CodeParams,
    decoders: &[DecoderKind],
    strategies: &[StrategyKind],
    method: UnreliabilityMethod,
    ebn0_grid: &[f64],
    samples: usize,
    seed: u64,
) -> Result<Vec<AnalyticPoint>> {
    code.validate()?;
    if samples == 0 {
        return Err(Error::Config("need at least one sample".into()));
    }
    let constellation = Constellation::new(code.field.size())?;
    let mut out = Vec::new();
    for (pi, &ebn0) in ebn0_grid.iter().enumerate() {
        let sigma = sigma_from_ebn0(ebn0, constellation.size(), code.n, code.k);
        let vectors = sample_vectors(sigma, &constellation, method, code.n, samples, seed, pi as u64);
        let avg = mean_of_sorted(&vectors)?;
        for &kind in decoders {
            let cap = DecoderCapability::new(kind, code)?;
            let profiles: Vec<Vec<f64>> =
                vectors.par_iter().map(|h| strategy::exact_profile(h, &cap)).collect::<Result<_>>()?;
            let mut mean_profile = vec![0.0; code.d_min()];
            for p in &profiles {
                for (m, v) in mean_profile.iter_mut().zip(p) {
                    *m += v;
                }
            }
            for m in mean_profile.iter_mut() {
                *m /= samples as f64;
            }
            let strategies = strategies
                .iter()
                .map(|&s| {
                    let t = tau_bar(&avg.h_bar, &cap, s)?;
                    Ok((s, t, mean_profile[t]))
                })
                .collect::<Result<_>>()?;
            out.push(AnalyticPoint { ebn0_db: ebn0, sigma, decoder: kind, samples, mean_profile, strategies });
        }
    }
    Ok(out)
}

/// CSV rows for analytic curves, in the campaign layout: `frames` holds the
/// number of sampled vectors and the Monte-Carlo columns stay empty.
pub fn analytic_csv(points: &[AnalyticPoint]) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for p in points {
        let db = fmt_sig(p.ebn0_db);
        out.push_str(&format!("{db},errors_only,,0,{},,,,,{}\n", p.samples, fmt_sig(p.errors_only())));
        for (kind, tau, prob) in &p.strategies {
            out.push_str(&format!("{db},semi_simulative,{kind},{tau},{},,,,,{}\n", p.samples, fmt_sig(*prob)));
        }
    }
    out
}

/// Eb/N0 at which a decreasing curve crosses `target`, interpolating
/// `log10(P)` linearly between grid points.
pub fn crossing_db(points: &[(f64, f64)], target: f64) -> Option<f64> {
    let lt = target.log10();
    points.windows(2).find_map(|w| {
        let (x0, p0) = w[0];
        let (x1, p1) = w[1];
        if p0 >= target && p1 < target && p1 > 0.0 {
            let (l0, l1) = (p0.log10(), p1.log10());
            Some(x0 + (lt - l0) * (x1 - x0) / (l1 - l0))
        } else {
            None
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_parsing() {
        assert_eq!("errors_only".parse::<DecoderMode>().unwrap(), DecoderMode::ErrorsOnly);
        assert_eq!("fixed_tau(4)".parse::<DecoderMode>().unwrap(), DecoderMode::FixedTau(4));
        assert_eq!("FIXED_TAU:2".parse::<DecoderMode>().unwrap(), DecoderMode::FixedTau(2));
        assert!("fixed_tau(x)".parse::<DecoderMode>().is_err());
        assert!("ml".parse::<DecoderMode>().is_err());
        for m in [DecoderMode::Gmd, DecoderMode::Adaptive, DecoderMode::SemiSimulative, DecoderMode::FixedTau(7)] {
            assert_eq!(m.to_string().parse::<DecoderMode>().unwrap(), m);
        }
    }

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(fmt_sig(15.0), "15");
        assert_eq!(fmt_sig(16.25), "16.25");
        assert_eq!(fmt_sig(0.0123456789012), "0.0123456789");
        assert_eq!(fmt_sig(0.01234567891234), "0.01234567891");
        assert_eq!(fmt_sig(1.0 / 3.0), "0.3333333333");
        assert_eq!(fmt_sig(1.5e-7), "1.5e-7");
        assert_eq!(fmt_sig(0.0), "0");
    }

    #[test]
    fn sampled_vectors_sorted_and_vanish_without_noise() {
        let c = Constellation::new(16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        let v = sample_unreliability_vector(0.2, &c, UnreliabilityMethod::NearestNeighbor, 15, &mut rng);
        assert!(v.as_slice().windows(2).all(|w| w[0] >= w[1]));
        let v = sample_unreliability_vector(1e-4, &c, UnreliabilityMethod::NearestNeighbor, 15, &mut rng);
        assert!(v.as_slice().iter().all(|&h| h < 1e-100));
    }

    #[test]
    fn averaging_basics() {
        let a = UnreliabilityVector::new(vec![0.5, 0.2, 0.1]).unwrap();
        let one = mean_of_sorted(std::slice::from_ref(&a)).unwrap();
        assert_eq!(one.h_bar, a);
        let two = mean_of_sorted(&[a.clone(), a.clone()]).unwrap();
        assert_eq!(two.h_bar, a);
        assert_eq!(two.samples, 2);
        assert!(mean_of_sorted(&[]).is_err());
        let c = Constellation::new(256).unwrap();
        let sigma = sigma_from_ebn0(16.0, 256, 255, 144);
        let avg = average_unreliability(sigma, &c, UnreliabilityMethod::NearestNeighbor, 255, 200, 1, 0).unwrap();
        let h = avg.h_bar.as_slice();
        assert!(h[0] > h[254]);
        assert!(h.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn tau_bar_range_and_zero() {
        let cap = DecoderCapability::bmd(CodeParams::rs15_7());
        assert_eq!(tau_bar(&UnreliabilityVector::zeros(15), &cap, StrategyKind::Exact).unwrap(), 0);
        let h = UnreliabilityVector::new(vec![0.6; 15]).unwrap();
        for kind in StrategyKind::ALL {
            assert!(tau_bar(&h, &cap, kind).unwrap() <= 8);
        }
    }

    #[test]
    fn errors_only_prediction_is_binomial_tail() {
        let cap = DecoderCapability::bmd(CodeParams::rs15_7());
        assert_eq!(predict_errors_only(&UnreliabilityVector::zeros(15), &cap), 0.0);
        let p: f64 = 0.12;
        let h = UnreliabilityVector::new(vec![p; 15]).unwrap();
        let binom = |n: u64, k: u64| (0..k).fold(1.0, |a, i| a * (n - i) as f64 / (i + 1) as f64);
        let cdf: f64 = (0..=4).map(|e| binom(15, e) * p.powi(e as i32) * (1.0 - p).powi(15 - e as i32)).sum();
        assert!((predict_errors_only(&h, &cap) - (1.0 - cdf)).abs() < 1e-13);
    }

    #[test]
    fn crossing_interpolation() {
        let pts = [(15.0, 1e-2), (16.0, 1e-4), (17.0, 1e-6)];
        assert!((crossing_db(&pts, 1e-3).unwrap() - 15.5).abs() < 1e-12);
        assert!((crossing_db(&pts, 1e-5).unwrap() - 16.5).abs() < 1e-12);
        assert!(crossing_db(&pts, 1e-8).is_none());
    }

    #[test]
    fn config_validation() {
        let mut cfg = CampaignConfig::new(CodeParams::rs15_7());
        assert!(cfg.validate().is_err());
        cfg.ebn0_grid = vec![10.0];
        cfg.validate().unwrap();
        cfg.modes = vec![DecoderMode::FixedTau(9)];
        assert!(cfg.validate().is_err());
        cfg.modes = vec![DecoderMode::Gmd];
        cfg.decoder = DecoderKind::Gs;
        assert!(cfg.validate().is_err());
        cfg.decoder = DecoderKind::Bmd;
        cfg.constellation_size = 256;
        assert!(cfg.validate().is_err());
        cfg.constellation_size = 16;
        cfg.max_frames = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn very_high_snr_has_no_errors() {
        let mut cfg = CampaignConfig::new(CodeParams::rs15_7());
        cfg.ebn0_grid = vec![60.0];
        cfg.max_frames = 500;
        cfg.modes = vec![DecoderMode::ErrorsOnly, DecoderMode::Adaptive, DecoderMode::Gmd, DecoderMode::SemiSimulative];
        cfg.avg_samples = 50;
        let rows = run_campaign(&cfg).unwrap();
        assert_eq!(rows.len(), 4);
        for r in rows {
            assert_eq!(r.frames, 500);
            assert_eq!(r.frame_errors, 0);
            assert!(r.ci_low <= r.fer && r.fer <= r.ci_high);
        }
    }

    #[test]
    fn stopping_at_max_errors() {
        let mut cfg = CampaignConfig::new(CodeParams::rs15_7());
        cfg.ebn0_grid = vec![2.0];
        cfg.max_frames = 100_000;
        cfg.max_errors = 25;
        let rows = run_campaign(&cfg).unwrap();
        assert_eq!(rows[0].frame_errors, 25);
        assert!(rows[0].frames < 100_000);
    }

    #[test]
    fn indicator_matches_decoder_on_every_frame() {
        let mut cfg = CampaignConfig::new(CodeParams::rs15_7());
        cfg.ebn0_grid = vec![6.0, 8.0];
        cfg.max_frames = 4000;
        cfg.max_errors = u64::MAX;
        cfg.modes = vec![DecoderMode::ErrorsOnly, DecoderMode::FixedTau(2), DecoderMode::FixedTau(5), DecoderMode::Adaptive];
        cfg.verify_indicator = true;
        let rows = run_campaign(&cfg).unwrap();
        assert!(rows.iter().any(|r| r.frame_errors > 0));
        for r in rows {
            assert_eq!(r.indicator_mismatches, 0, "{r:?}");
        }
    }
}
