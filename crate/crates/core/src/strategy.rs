//! Choosing how many of the least reliable symbols to erase before a single
//! error/erasure decoding attempt.
//!
//! With unreliabilities sorted so that `h[0] >= h[1] >= ...`, erasing the
//! first `tau` positions leaves `Y_tau = sum_{i >= tau} X_i` errors, where the
//! `X_i` are independent Bernoulli(`h[i]`). The law of `Y_tau` is the
//! coefficient sequence of `prod_{i >= tau} (1 - h[i] + rho h[i])`, and a
//! decoder with radius `eps0(tau)` fails with probability
//! `P(tau) = Pr(Y_tau > eps0(tau))`.
//!
//! Three choosers are provided:
//! - [`tau_star_exact`] minimizes `P(tau)` over `0..d_min`.
//! - [`tau_star_hoeffding`] only accumulates `Pr(Y_tau = eps)` inside a
//!   window of half-width `ceil(sqrt(-ln(0.005) 2n))` around the mean.
//! - [`tau_star_eps0`] scores each `tau` by one coefficient next to the
//!   radius, walking `tau` upwards by polynomial deflation.

use std::fmt;

use crate::dcf::DecoderCapability;
use crate::error::{Error, Result};

/// Below this unreliability, [`deflate`] refuses and the caller recomputes.
pub const DEFLATION_THRESHOLD: f64 = 1e-3;

/// Tail probability that the Hoeffding window leaves out.
pub const HOEFFDING_TAIL: f64 = 0.005;

/// Symbol unreliabilities sorted non-increasing, each in `[0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnreliabilityVector(Vec<f64>);

impl UnreliabilityVector {
    /// Accepts an already sorted vector.
    pub fn new(h: Vec<f64>) -> Result<Self> {
        check_range(&h)?;
        if h.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Domain("unreliabilities are not sorted non-increasing".into()));
        }
        Ok(UnreliabilityVector(h))
    }

    /// Sorts non-increasing. The returned flag tells whether sorting changed
    /// the order.
    pub fn from_unsorted(mut h: Vec<f64>) -> Result<(Self, bool)> {
        check_range(&h)?;
        let was_sorted = h.windows(2).all(|w| w[0] >= w[1]);
        h.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
        Ok((UnreliabilityVector(h), !was_sorted))
    }

    pub fn zeros(n: usize) -> Self {
        UnreliabilityVector(vec![0.0; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

fn check_range(h: &[f64]) -> Result<()> {
    match h.iter().find(|v| !(v.is_finite() && (0.0..1.0).contains(*v))) {
        Some(v) => Err(Error::Domain(format!("unreliability {v} outside [0, 1)"))),
        None => Ok(()),
    }
}

/// `coeffs[eps] = Pr(Y_tau = eps)` for `eps = 0..=n-tau`.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorCountDistribution {
    pub tau: usize,
    pub coeffs: Vec<f64>,
}

impl ErrorCountDistribution {
    pub fn pmf(&self, eps: usize) -> f64 {
        self.coeffs.get(eps).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.coeffs.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.coeffs.iter().enumerate().map(|(e, p)| e as f64 * p).sum()
    }

    /// Largest number of errors with nonzero support.
    pub fn max_errors(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Index of the largest coefficient (first one on ties).
    pub fn mode(&self) -> usize {
        let mut best = 0;
        for (e, &p) in self.coeffs.iter().enumerate() {
            if p > self.coeffs[best] {
                best = e;
            }
        }
        best
    }
}

fn clamp_coeff(c: f64) -> f64 {
    if c < 0.0 {
        0.0
    } else {
        c
    }
}

/// Multiplies `dist` in place by `(1 - h) + rho h`.
fn multiply_factor(coeffs: &mut Vec<f64>, h: f64) {
    let g = 1.0 - h;
    coeffs.push(0.0);
    for e in (1..coeffs.len()).rev() {
        coeffs[e] = coeffs[e] * g + coeffs[e - 1] * h;
    }
    coeffs[0] *= g;
}

/// Law of the error count among the positions `tau..n`.
pub fn pgf_distribution(h: &UnreliabilityVector, tau: usize) -> ErrorCountDistribution {
    let h = h.as_slice();
    let tau = tau.min(h.len());
    let mut coeffs = Vec::with_capacity(h.len() - tau + 1);
    coeffs.push(1.0);
    for &p in h[tau..].iter().rev() {
        multiply_factor(&mut coeffs, p);
    }
    ErrorCountDistribution { tau, coeffs }
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum DeflateError {
    #[error("unreliability {0} is below the deflation threshold; recompute instead")]
    Recompute(f64),
    #[error("cannot remove a factor from a degree-zero distribution")]
    Empty,
}

/// Removes the factor `(1 - h_tau) + rho h_tau` of the next erased symbol,
/// turning the law for `tau` into the law for `tau + 1`.
///
/// Composite division: low coefficients come from the bottom-up recurrence,
/// high ones from the top-down recurrence, spliced at the index whose
/// defining equation is matched best. One step is accurate to rounding, but
/// errors compound over a chain of deflations, so sweeps over many `tau`
/// should multiply factors instead.
pub fn deflate(dist: &ErrorCountDistribution, h_tau: f64) -> std::result::Result<ErrorCountDistribution, DeflateError> {
    if dist.coeffs.len() < 2 {
        return Err(DeflateError::Empty);
    }
    if h_tau.is_nan() || h_tau < DEFLATION_THRESHOLD {
        return Err(DeflateError::Recompute(h_tau));
    }
    let p = &dist.coeffs;
    let deg = p.len() - 1;
    let g = 1.0 - h_tau;
    let mut up = vec![0.0; deg];
    up[0] = p[0] / g;
    for j in 1..deg {
        up[j] = (p[j] - h_tau * up[j - 1]) / g;
    }
    let mut down = vec![0.0; deg];
    down[deg - 1] = p[deg] / h_tau;
    for j in (1..deg).rev() {
        down[j - 1] = (p[j] - g * down[j]) / h_tau;
    }
    let residual = |m: usize| {
        let hi = if m < deg { down[m] } else { 0.0 };
        let lo = if m > 0 { up[m - 1] } else { 0.0 };
        (p[m] - g * hi - h_tau * lo).abs()
    };
    let split = (0..=deg).min_by(|&a, &b| residual(a).total_cmp(&residual(b))).unwrap_or(0);
    let q = up[..split].iter().chain(&down[split..]).map(|&c| clamp_coeff(c)).collect();
    Ok(ErrorCountDistribution { tau: dist.tau + 1, coeffs: q })
}

/// `E{Y_tau} = sum_{i >= tau} h[i]`, summed in ascending index order.
pub fn expectation(h: &UnreliabilityVector, tau: usize) -> f64 {
    h.as_slice().iter().skip(tau).sum()
}

/// `P(tau) = 1 - sum_{eps <= eps0} Pr(Y_tau = eps)`; `eps0 = None` means the
/// decoder has no correction capability and always fails.
///
/// Whichever of head and tail is smaller is summed directly so that small
/// failure probabilities keep their relative precision.
pub fn residual_error_prob(dist: &ErrorCountDistribution, eps0: Option<usize>) -> f64 {
    let Some(eps0) = eps0 else { return 1.0 };
    if eps0 >= dist.max_errors() {
        return 0.0;
    }
    let head: f64 = dist.coeffs[..=eps0].iter().sum();
    let p = if head > 0.5 {
        dist.coeffs[eps0 + 1..].iter().sum()
    } else {
        1.0 - head
    };
    p.clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum StrategyKind {
    #[default]
    Exact,
    Hoeffding,
    Eps0Approx,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 3] = [StrategyKind::Exact, StrategyKind::Hoeffding, StrategyKind::Eps0Approx];
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StrategyKind::Exact => "exact",
            StrategyKind::Hoeffding => "hoeffding",
            StrategyKind::Eps0Approx => "eps0",
        })
    }
}

impl std::str::FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" => Ok(StrategyKind::Exact),
            "hoeffding" => Ok(StrategyKind::Hoeffding),
            "eps0" | "eps0approx" | "eps0_approx" => Ok(StrategyKind::Eps0Approx),
            other => Err(Error::Config(format!("unknown strategy '{other}' (exact, hoeffding, eps0)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategyResult {
    pub tau_chosen: usize,
    /// `P(tau_chosen)` as the strategy itself estimates it.
    pub predicted_p: f64,
    pub strategy_kind: StrategyKind,
}

fn check_len(h: &UnreliabilityVector, cap: &DecoderCapability) -> Result<()> {
    if h.len() != cap.code.n {
        return Err(Error::Domain(format!(
            "unreliability vector has length {}, code length is {}",
            h.len(),
            cap.code.n
        )));
    }
    Ok(())
}

/// Largest admissible erasure count.
fn tau_max(cap: &DecoderCapability) -> usize {
    cap.d_min() - 1
}

/// Position of the minimum, first one on ties.
fn argmin(values: &[f64]) -> (usize, f64) {
    let mut best = (0, values[0]);
    for (t, &v) in values.iter().enumerate().skip(1) {
        if v < best.1 {
            best = (t, v);
        }
    }
    best
}

/// Exact `P(tau)` for every `tau` in `0..d_min`.
///
/// Suffix products are grown from the least unreliable symbol upwards, so all
/// laws come out of one `O(n^2)` sweep.
pub fn exact_profile(h: &UnreliabilityVector, cap: &DecoderCapability) -> Result<Vec<f64>> {
    check_len(h, cap)?;
    let hs = h.as_slice();
    let n = hs.len();
    let tmax = tau_max(cap);
    let mut profile = vec![0.0; tmax + 1];
    let mut dist = ErrorCountDistribution { tau: n, coeffs: vec![1.0] };
    for i in (0..n).rev() {
        multiply_factor(&mut dist.coeffs, hs[i]);
        dist.tau = i;
        if i <= tmax {
            profile[i] = residual_error_prob(&dist, cap.epsilon0(i));
        }
    }
    Ok(profile)
}

/// The erasure count minimizing the exact residual error probability.
pub fn tau_star_exact(h: &UnreliabilityVector, cap: &DecoderCapability) -> Result<StrategyResult> {
    let profile = exact_profile(h, cap)?;
    let (tau, p) = argmin(&profile);
    Ok(StrategyResult { tau_chosen: tau, predicted_p: p, strategy_kind: StrategyKind::Exact })
}

/// `ceil(s)` with `s = sqrt(-ln(0.005) 2n)`.
pub fn hoeffding_half_width(n: usize) -> usize {
    hoeffding_s(n).ceil() as usize
}

pub fn hoeffding_s(n: usize) -> f64 {
    (-(HOEFFDING_TAIL.ln()) * 2.0 * n as f64).sqrt()
}

/// Integer window `[E - w, E + w]` clipped to the support `0..=len`.
pub fn hoeffding_window(mean: f64, w: usize, support: usize) -> (usize, usize) {
    let lo = (mean - w as f64).ceil().max(0.0) as usize;
    let hi = ((mean + w as f64).floor().max(0.0) as usize).min(support);
    (lo.min(support), hi)
}

/// Error-count law restricted to a moving band around the running mean.
///
/// Factors are multiplied in one at a time; after each step only the
/// coefficients within `w` of the partial mean are kept. Returns the index of
/// the first kept coefficient and the band itself.
fn banded_distribution(h: &[f64], w: usize) -> (usize, Vec<f64>) {
    let mut offset = 0usize;
    let mut band = vec![1.0];
    let mut mean = 0.0;
    for (count, &p) in h.iter().rev().enumerate() {
        multiply_factor(&mut band, p);
        mean += p;
        let (lo, hi) = hoeffding_window(mean, w, count + 1);
        let end = offset + band.len() - 1;
        let lo = lo.max(offset);
        let hi = hi.min(end);
        if lo > hi {
            // Window slid past the kept band; nothing meaningful remains.
            band = vec![0.0];
            offset = lo.min(count + 1);
            continue;
        }
        band = band[lo - offset..=hi - offset].to_vec();
        offset = lo;
    }
    (offset, band)
}

/// Hoeffding-window approximation of `P(tau)` for every `tau` in `0..d_min`.
pub fn hoeffding_profile(h: &UnreliabilityVector, cap: &DecoderCapability) -> Result<Vec<f64>> {
    check_len(h, cap)?;
    let hs = h.as_slice();
    let n = hs.len();
    let w = hoeffding_half_width(n);
    let profile = (0..=tau_max(cap))
        .map(|tau| {
            let Some(eps0) = cap.epsilon0(tau) else { return 1.0 };
            let mean = expectation(h, tau);
            let (lo, hi) = hoeffding_window(mean, w, n - tau);
            let top = hi.min(eps0);
            if top < lo {
                return 1.0;
            }
            let (offset, band) = banded_distribution(&hs[tau..], w);
            let mass: f64 = (lo..=top)
                .filter(|&e| e >= offset && e - offset < band.len())
                .map(|e| band[e - offset])
                .sum();
            (1.0 - mass).clamp(0.0, 1.0)
        })
        .collect();
    Ok(profile)
}

pub fn tau_star_hoeffding(h: &UnreliabilityVector, cap: &DecoderCapability) -> Result<StrategyResult> {
    let profile = hoeffding_profile(h, cap)?;
    let (tau, p) = argmin(&profile);
    Ok(StrategyResult { tau_chosen: tau, predicted_p: p, strategy_kind: StrategyKind::Hoeffding })
}

/// Single-coefficient surrogate for `P(tau)`: `1 - Pr(Y = eps0)` when the
/// mean exceeds the radius, `Pr(Y = eps0 + 1)` otherwise.
pub fn eps0_surrogate(dist: &ErrorCountDistribution, mean: f64, eps0: Option<usize>) -> f64 {
    let Some(eps0) = eps0 else { return 1.0 };
    if mean > eps0 as f64 {
        (1.0 - dist.pmf(eps0)).clamp(0.0, 1.0)
    } else {
        dist.pmf(eps0 + 1)
    }
}

/// Surrogate scores for every `tau` in `0..d_min`, from the same suffix
/// sweep as [`exact_profile`].
pub fn eps0_profile(h: &UnreliabilityVector, cap: &DecoderCapability) -> Result<Vec<f64>> {
    check_len(h, cap)?;
    let hs = h.as_slice();
    let n = hs.len();
    let tmax = tau_max(cap);
    let mut profile = vec![0.0; tmax + 1];
    let mut dist = ErrorCountDistribution { tau: n, coeffs: vec![1.0] };
    for i in (0..n).rev() {
        multiply_factor(&mut dist.coeffs, hs[i]);
        dist.tau = i;
        if i <= tmax {
            profile[i] = eps0_surrogate(&dist, expectation(h, i), cap.epsilon0(i));
        }
    }
    Ok(profile)
}

pub fn tau_star_eps0(h: &UnreliabilityVector, cap: &DecoderCapability) -> Result<StrategyResult> {
    let profile = eps0_profile(h, cap)?;
    let (tau, p) = argmin(&profile);
    Ok(StrategyResult { tau_chosen: tau, predicted_p: p, strategy_kind: StrategyKind::Eps0Approx })
}

pub fn choose_tau(kind: StrategyKind, h: &UnreliabilityVector, cap: &DecoderCapability) -> Result<StrategyResult> {
    match kind {
        StrategyKind::Exact => tau_star_exact(h, cap),
        StrategyKind::Hoeffding => tau_star_hoeffding(h, cap),
        StrategyKind::Eps0Approx => tau_star_eps0(h, cap),
    }
}

/// The strategy's own per-`tau` scores.
pub fn profile(kind: StrategyKind, h: &UnreliabilityVector, cap: &DecoderCapability) -> Result<Vec<f64>> {
    match kind {
        StrategyKind::Exact => exact_profile(h, cap),
        StrategyKind::Hoeffding => hoeffding_profile(h, cap),
        StrategyKind::Eps0Approx => eps0_profile(h, cap),
    }
}

/// Exact `P(tau)` for a single erasure count.
pub fn exact_p(h: &UnreliabilityVector, cap: &DecoderCapability, tau: usize) -> f64 {
    residual_error_prob(&pgf_distribution(h, tau), cap.epsilon0(tau))
}

/// Shape of one error-count law, for checking that it has a single peak
/// near its mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnimodalityReport {
    pub local_maxima: usize,
    pub mode: usize,
    pub mean: f64,
}

impl UnimodalityReport {
    pub fn holds(&self) -> bool {
        self.local_maxima == 1 && (self.mode as f64 - self.mean.floor()).abs() <= 1.0
    }
}

pub fn unimodality(dist: &ErrorCountDistribution) -> UnimodalityReport {
    let mut maxima = 0;
    let mut rising = true;
    for w in dist.coeffs.windows(2) {
        if w[1] > w[0] {
            rising = true;
        } else if w[1] < w[0] {
            if rising {
                maxima += 1;
            }
            rising = false;
        }
    }
    if rising {
        maxima += 1;
    }
    UnimodalityReport { local_maxima: maxima, mode: dist.mode(), mean: dist.mean() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rs_codec::CodeParams;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Pr(Y = eps) by summing over all 2^m error patterns.
    fn enumerate(h: &[f64]) -> Vec<f64> {
        let m = h.len();
        let mut out = vec![0.0; m + 1];
        for mask in 0u32..(1 << m) {
            let mut p = 1.0;
            for (i, &hi) in h.iter().enumerate() {
                p *= if mask >> i & 1 == 1 { hi } else { 1.0 - hi };
            }
            out[mask.count_ones() as usize] += p;
        }
        out
    }

    fn binom(n: usize, k: usize) -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }

    fn random_h(rng: &mut impl Rng, n: usize, scale: f64) -> UnreliabilityVector {
        let h: Vec<f64> = (0..n).map(|_| rng.random::<f64>().powi(3) * scale).collect();
        UnreliabilityVector::from_unsorted(h).unwrap().0
    }

    #[test]
    fn two_symbol_example() {
        let h = UnreliabilityVector::new(vec![0.3, 0.2]).unwrap();
        let d = pgf_distribution(&h, 0);
        let expect = [0.56, 0.38, 0.06];
        for (a, b) in d.coeffs.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!((residual_error_prob(&d, Some(1)) - 0.06).abs() < 1e-15);
        assert!((expectation(&h, 0) - 0.5).abs() < 1e-15);
        assert_eq!(expectation(&h, 2), 0.0);
    }

    #[test]
    fn zero_and_constant_vectors() {
        let z = UnreliabilityVector::zeros(10);
        let d = pgf_distribution(&z, 3);
        assert_eq!(d.coeffs, {
            let mut v = vec![0.0; 8];
            v[0] = 1.0;
            v
        });
        let p = 0.37;
        let h = UnreliabilityVector::new(vec![p; 20]).unwrap();
        for tau in [0, 5, 19, 20] {
            let d = pgf_distribution(&h, tau);
            let m = 20 - tau;
            for e in 0..=m {
                let b = binom(m, e) * p.powi(e as i32) * (1.0 - p).powi((m - e) as i32);
                assert!((d.coeffs[e] - b).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn matches_subset_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..200 {
            let n = rng.random_range(1..=12);
            let h = random_h(&mut rng, n, 0.99);
            let tau = rng.random_range(0..=n);
            let d = pgf_distribution(&h, tau);
            let brute = enumerate(&h.as_slice()[tau..]);
            assert_eq!(d.coeffs.len(), brute.len());
            for (a, b) in d.coeffs.iter().zip(&brute) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn deflation_matches_recompute() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..100 {
            let h = random_h(&mut rng, 64, 0.9);
            for tau in 0..64 {
                let ht = h.as_slice()[tau];
                let fresh = pgf_distribution(&h, tau + 1);
                match deflate(&pgf_distribution(&h, tau), ht) {
                    Ok(next) => {
                        assert_eq!(next.coeffs.len(), fresh.coeffs.len());
                        for (a, b) in next.coeffs.iter().zip(&fresh.coeffs) {
                            assert!((a - b).abs() < 1e-9, "tau={tau}");
                        }
                    }
                    Err(DeflateError::Recompute(_)) => assert!(ht < DEFLATION_THRESHOLD),
                    Err(DeflateError::Empty) => unreachable!(),
                }
            }
        }
    }

    #[test]
    fn deflation_small_cases() {
        let d = ErrorCountDistribution { tau: 0, coeffs: vec![0.25, 0.5, 0.25] };
        let q = deflate(&d, 0.5).unwrap();
        assert_eq!(q.coeffs, vec![0.5, 0.5]);
        assert_eq!(q.tau, 1);
        let h = UnreliabilityVector::new(vec![0.9, 0.6, 0.3, 0.1, 0.01]).unwrap();
        let mut dist = pgf_distribution(&h, 0);
        for &p in h.as_slice() {
            dist = deflate(&dist, p).unwrap();
        }
        assert_eq!(dist.coeffs.len(), 1);
        assert!((dist.coeffs[0] - 1.0).abs() < 1e-12);
        assert_eq!(deflate(&dist, 0.5), Err(DeflateError::Empty));
        let small = pgf_distribution(&UnreliabilityVector::new(vec![1e-4]).unwrap(), 0);
        assert_eq!(deflate(&small, 1e-4), Err(DeflateError::Recompute(1e-4)));
    }

    #[test]
    fn residual_edge_cases() {
        let h = UnreliabilityVector::new(vec![0.5, 0.4, 0.1]).unwrap();
        let d = pgf_distribution(&h, 0);
        assert_eq!(residual_error_prob(&d, Some(3)), 0.0);
        assert_eq!(residual_error_prob(&d, Some(10)), 0.0);
        assert_eq!(residual_error_prob(&d, None), 1.0);
    }

    #[test]
    fn all_zero_vector_strategies() {
        let c = CodeParams::rs255_144();
        for cap in [DecoderCapability::bmd(c), DecoderCapability::gs(c)] {
            let z = UnreliabilityVector::zeros(255);
            for kind in StrategyKind::ALL {
                let r = choose_tau(kind, &z, &cap).unwrap();
                assert_eq!(r.tau_chosen, 0);
                assert_eq!(r.predicted_p, 0.0);
            }
        }
    }

    #[test]
    fn exact_strategy_is_optimal_and_beats_errors_only() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let c = CodeParams::rs15_7();
        let cap = DecoderCapability::bmd(c);
        for _ in 0..200 {
            let h = random_h(&mut rng, 15, 0.8);
            let r = tau_star_exact(&h, &cap).unwrap();
            for tau in 0..c.d_min() {
                assert!(r.predicted_p <= exact_p(&h, &cap, tau) + 1e-15);
            }
            assert!(r.predicted_p <= exact_p(&h, &cap, 0) + 1e-15);
            assert!((r.predicted_p - exact_p(&h, &cap, r.tau_chosen)).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_profile_matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let cap = DecoderCapability::bmd(CodeParams::rs15_7());
        for _ in 0..100 {
            let h = random_h(&mut rng, 15, 0.9);
            let prof = exact_profile(&h, &cap).unwrap();
            for (tau, &p) in prof.iter().enumerate() {
                let brute = enumerate(&h.as_slice()[tau..]);
                let eps0 = cap.epsilon0(tau).unwrap();
                let tail: f64 = brute[eps0 + 1..].iter().sum();
                assert!((p - tail).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn hoeffding_half_width_for_255() {
        let s = hoeffding_s(255);
        assert!((s - 51.99).abs() < 0.01, "{s}");
        assert_eq!(hoeffding_half_width(255), 52);
    }

    #[test]
    fn hoeffding_equals_exact_when_window_covers_support() {
        // n = 15 gives w = 13; the window covers nearly all of the support.
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let cap = DecoderCapability::bmd(CodeParams::rs15_7());
        for _ in 0..100 {
            let h = random_h(&mut rng, 15, 0.5);
            let hp = hoeffding_profile(&h, &cap).unwrap();
            let ep = exact_profile(&h, &cap).unwrap();
            for (a, b) in hp.iter().zip(&ep) {
                assert!((a - b).abs() < 1e-9, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn eps0_surrogate_constant_half() {
        // h = 0.5 everywhere: the surrogate is a binomial pmf term.
        let cap = DecoderCapability::bmd(CodeParams::rs15_7());
        let h = UnreliabilityVector::new(vec![0.5; 15]).unwrap();
        let prof = eps0_profile(&h, &cap).unwrap();
        let mut expect = Vec::new();
        for tau in 0..9usize {
            let m = 15 - tau;
            let eps0 = (8 - tau) / 2;
            let mean = m as f64 * 0.5;
            let pmf = |e: usize| if e > m { 0.0 } else { binom(m, e) * 0.5f64.powi(m as i32) };
            let v = if mean > eps0 as f64 { 1.0 - pmf(eps0) } else { pmf(eps0 + 1) };
            expect.push(v);
        }
        for (a, b) in prof.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
        // Every mean 7.5 - tau/2 exceeds eps0, so each score is 1 - pmf(eps0).
        // pmf(eps0) peaks at tau = 0 with C(15,4)/2^15.
        assert!(expect[0] < expect[1..].iter().cloned().fold(1.0, f64::min));
        assert_eq!(tau_star_eps0(&h, &cap).unwrap().tau_chosen, 0);
    }

    #[test]
    fn wrong_length_is_rejected() {
        let cap = DecoderCapability::bmd(CodeParams::rs15_7());
        assert!(tau_star_exact(&UnreliabilityVector::zeros(14), &cap).is_err());
    }

    #[test]
    fn unsorted_input_is_flagged() {
        assert!(UnreliabilityVector::new(vec![0.1, 0.2]).is_err());
        let (v, changed) = UnreliabilityVector::from_unsorted(vec![0.1, 0.2]).unwrap();
        assert!(changed);
        assert_eq!(v.as_slice(), &[0.2, 0.1]);
        assert!(UnreliabilityVector::from_unsorted(vec![1.0]).is_err());
        assert!(UnreliabilityVector::from_unsorted(vec![f64::NAN]).is_err());
    }

    #[test]
    fn unimodality_report_counts_peaks() {
        let d = ErrorCountDistribution { tau: 0, coeffs: vec![0.1, 0.4, 0.3, 0.2] };
        let r = unimodality(&d);
        assert_eq!(r.local_maxima, 1);
        assert_eq!(r.mode, 1);
        let d = ErrorCountDistribution { tau: 0, coeffs: vec![0.3, 0.1, 0.3, 0.3] };
        assert_eq!(unimodality(&d).local_maxima, 2);
    }

    proptest! {
        #[test]
        fn distribution_is_normalized_with_matching_mean(
            raw in proptest::collection::vec(0.0f64..0.999, 1..120),
            tau_frac in 0.0f64..1.0,
        ) {
            let (h, _) = UnreliabilityVector::from_unsorted(raw).unwrap();
            let tau = (tau_frac * h.len() as f64) as usize;
            let d = pgf_distribution(&h, tau);
            prop_assert!((d.total() - 1.0).abs() < 1e-9);
            prop_assert!(d.coeffs.iter().all(|&c| c >= 0.0));
            prop_assert!((d.mean() - expectation(&h, tau)).abs() < 1e-10 * (1.0 + d.mean()));
        }
    }
}
