//! Multi-trial GMD decoding: error/erasure decoding with a growing number of
//! erased least reliable symbols, then a reliability-weighted pick among the
//! distinct candidates.

use crate::error::{Error, Result};
use crate::rs_codec::{CodeParams, DecodeOutcome, ReceivedWord, RsCodec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GmdConfig {
    erasure_schedule: Vec<usize>,
}

impl GmdConfig {
    pub fn new(erasure_schedule: Vec<usize>, params: &CodeParams) -> Result<Self> {
        if erasure_schedule.is_empty() {
            return Err(Error::Config("GMD schedule is empty".into()));
        }
        if erasure_schedule.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("GMD schedule must be strictly increasing".into()));
        }
        if erasure_schedule.iter().any(|&t| t >= params.d_min()) {
            return Err(Error::Config(format!("GMD schedule entries must be below d_min = {}", params.d_min())));
        }
        Ok(GmdConfig { erasure_schedule })
    }

    /// Erasure counts with the parity of `d_min - 1`, up to `d_min - 1`.
    ///
    /// For BMD, `eps0(tau)` only drops every second step, so the other parity
    /// adds an erasure without buying any radius. This yields about
    /// `d_min / 2` trials.
    pub fn forney(params: &CodeParams) -> Self {
        let top = params.d_min() - 1;
        GmdConfig { erasure_schedule: (top % 2..=top).step_by(2).collect() }
    }

    pub fn schedule(&self) -> &[usize] {
        &self.erasure_schedule
    }

    /// Number of decoding trials.
    pub fn trials(&self) -> usize {
        self.erasure_schedule.len()
    }
}

/// Sum of `1 - h_i` over positions where the candidate agrees with the
/// received hard decision.
pub fn weighted_agreement(candidate: &[crate::gf::FieldElement], word: &ReceivedWord) -> f64 {
    candidate
        .iter()
        .zip(&word.positions)
        .zip(&word.unreliability)
        .filter(|((c, r), _)| r.is_some_and(|r| r == **c))
        .map(|(_, h)| 1.0 - h)
        .sum()
}

/// Runs one trial per scheduled erasure count and keeps the candidate with
/// the largest weighted agreement; ties go to the earlier trial.
pub fn gmd_decode(codec: &RsCodec, word: &ReceivedWord, cfg: &GmdConfig) -> Result<DecodeOutcome> {
    if word.erasure_count() != 0 {
        return Err(Error::Usage("GMD expects a word without erasures".into()));
    }
    let mut best: Option<(f64, Vec<crate::gf::FieldElement>)> = None;
    for &tau in cfg.schedule() {
        let trial = word.erase_most_unreliable(tau);
        if let DecodeOutcome::Decoded(c) = codec.decode_ee(&trial)? {
            if best.as_ref().is_some_and(|(_, b)| *b == c) {
                continue;
            }
            let score = weighted_agreement(&c, word);
            if best.as_ref().is_none_or(|(s, _)| score > *s) {
                best = Some((score, c));
            }
        }
    }
    Ok(match best {
        Some((_, c)) => DecodeOutcome::Decoded(c),
        None => DecodeOutcome::Failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldElement;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn codeword(rng: &mut impl Rng, codec: &RsCodec) -> Vec<FieldElement> {
        let info: Vec<FieldElement> = (0..codec.params().k).map(|_| FieldElement(rng.random_range(0..16))).collect();
        codec.encode(&info).unwrap()
    }

    #[test]
    fn forney_schedules() {
        assert_eq!(GmdConfig::forney(&CodeParams::rs15_7()).schedule(), &[0, 2, 4, 6, 8]);
        let big = GmdConfig::forney(&CodeParams::rs255_144());
        assert_eq!(big.trials(), 56);
        assert_eq!(big.schedule()[0], 1);
        assert_eq!(*big.schedule().last().unwrap(), 111);
    }

    #[test]
    fn config_validation() {
        let p = CodeParams::rs15_7();
        assert!(GmdConfig::new(vec![], &p).is_err());
        assert!(GmdConfig::new(vec![2, 2], &p).is_err());
        assert!(GmdConfig::new(vec![0, 9], &p).is_err());
        assert!(GmdConfig::new(vec![0, 3, 8], &p).is_ok());
    }

    #[test]
    fn error_free_word() {
        let codec = RsCodec::new(CodeParams::rs15_7()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let cw = codeword(&mut rng, &codec);
        let word = ReceivedWord::new(cw.iter().copied().map(Some).collect(), (0..15).map(|i| i as f64 / 20.0).collect()).unwrap();
        let out = gmd_decode(&codec, &word, &GmdConfig::forney(codec.params())).unwrap();
        assert_eq!(out, DecodeOutcome::Decoded(cw));
    }

    #[test]
    fn corrects_errors_flagged_as_unreliable() {
        // 6 errors exceed the errors-only radius of 4, but they sit on the
        // six least reliable positions, so the tau = 6 trial recovers them.
        let codec = RsCodec::new(CodeParams::rs15_7()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..200 {
            let cw = codeword(&mut rng, &codec);
            let mut h: Vec<f64> = (0..15).map(|_| rng.random_range(0.0..0.1)).collect();
            let mut positions: Vec<Option<FieldElement>> = cw.iter().copied().map(Some).collect();
            let bad = rand::seq::index::sample(&mut rng, 15, 6).into_vec();
            for &i in &bad {
                positions[i] = Some(cw[i] + FieldElement(rng.random_range(1..16)));
                h[i] = rng.random_range(0.5..0.9);
            }
            let word = ReceivedWord::new(positions, h).unwrap();
            assert!(codec.decode_ee(&word).unwrap() != DecodeOutcome::Decoded(cw.clone()));
            let out = gmd_decode(&codec, &word, &GmdConfig::forney(codec.params())).unwrap();
            assert_eq!(out, DecodeOutcome::Decoded(cw));
        }
    }

    #[test]
    fn deterministic_and_valid() {
        let codec = RsCodec::new(CodeParams::rs15_7()).unwrap();
        let cfg = GmdConfig::forney(codec.params());
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..300 {
            let cw = codeword(&mut rng, &codec);
            let positions = cw
                .iter()
                .map(|&c| Some(if rng.random_bool(0.4) { c + FieldElement(rng.random_range(1..16)) } else { c }))
                .collect();
            let h = (0..15).map(|_| rng.random_range(0.0..0.9)).collect();
            let word = ReceivedWord::new(positions, h).unwrap();
            let a = gmd_decode(&codec, &word, &cfg).unwrap();
            let b = gmd_decode(&codec, &word, &cfg).unwrap();
            assert_eq!(a, b);
            if let Some(c) = a.codeword() {
                assert!(codec.is_codeword(c));
            }
        }
    }
}
