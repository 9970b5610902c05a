//! Decoder capability functions.
//!
//! A decoder corrects `eps` errors together with `tau` erasures exactly when
//! `f(n, eps, tau) > k - 1`. The largest such `eps` for a given `tau` is the
//! decoding radius `eps0(tau)`.

use std::fmt;

use crate::error::{Error, Result};
use crate::rs_codec::CodeParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecoderKind {
    /// Bounded minimum distance: `n - tau - 2 eps`.
    Bmd,
    /// IRS-based decoding of l-punctured codes: `n - tau - (l+1)/l eps`.
    Irs { ell: usize },
    /// Guruswami-Sudan in the limit of infinite multiplicity:
    /// `(n - tau - eps)^2 / (n - tau)`.
    Gs,
}

impl fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecoderKind::Bmd => write!(f, "bmd"),
            DecoderKind::Irs { ell } => write!(f, "irs{ell}"),
            DecoderKind::Gs => write!(f, "gs"),
        }
    }
}

impl std::str::FromStr for DecoderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "bmd" => Ok(DecoderKind::Bmd),
            "gs" => Ok(DecoderKind::Gs),
            other => {
                let ell = other
                    .strip_prefix("irs")
                    .map(|r| r.trim_start_matches([':', '-', '_', '=']))
                    .and_then(|r| r.parse::<usize>().ok())
                    .ok_or_else(|| Error::Config(format!("unknown decoder '{s}' (bmd, gs, irs<l>)")))?;
                if ell == 0 {
                    return Err(Error::Config("IRS parameter l must be at least 1".into()));
                }
                Ok(DecoderKind::Irs { ell })
            }
        }
    }
}

/// A decoder model bound to a concrete code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecoderCapability {
    pub kind: DecoderKind,
    pub code: CodeParams,
}

impl DecoderCapability {
    pub fn new(kind: DecoderKind, code: CodeParams) -> Result<Self> {
        if let DecoderKind::Irs { ell: 0 } = kind {
            return Err(Error::Domain("IRS parameter l must be at least 1".into()));
        }
        Ok(DecoderCapability { kind, code })
    }

    pub fn bmd(code: CodeParams) -> Self {
        DecoderCapability { kind: DecoderKind::Bmd, code }
    }

    pub fn gs(code: CodeParams) -> Self {
        DecoderCapability { kind: DecoderKind::Gs, code }
    }

    /// `f(n, eps, tau)` from the capability table.
    pub fn dcf_value(&self, eps: usize, tau: usize) -> Result<f64> {
        let n = self.code.n;
        if tau > n || eps > n - tau {
            return Err(Error::Domain(format!("need tau <= n and eps <= n - tau (eps={eps}, tau={tau})")));
        }
        let rest = (n - tau) as f64;
        let eps_f = eps as f64;
        Ok(match self.kind {
            DecoderKind::Bmd => rest - 2.0 * eps_f,
            DecoderKind::Irs { ell } => {
                let ell = ell as f64;
                (ell * rest - (ell + 1.0) * eps_f) / ell
            }
            DecoderKind::Gs => {
                if tau == n {
                    return Err(Error::Domain("GS capability undefined for tau = n".into()));
                }
                let d = rest - eps_f;
                d * d / rest
            }
        })
    }

    /// Exact integer form of `f(n, eps, tau) > k - 1`.
    pub fn corrects(&self, eps: usize, tau: usize) -> bool {
        let n = self.code.n as i128;
        let k = self.code.k as i128;
        let (eps, tau) = (eps as i128, tau as i128);
        if tau > n || eps > n - tau {
            return false;
        }
        let rest = n - tau;
        match self.kind {
            DecoderKind::Bmd => rest - 2 * eps > k - 1,
            DecoderKind::Irs { ell } => {
                let ell = ell as i128;
                ell * rest - (ell + 1) * eps > ell * (k - 1)
            }
            DecoderKind::Gs => rest > 0 && (rest - eps) * (rest - eps) > rest * (k - 1),
        }
    }

    /// Closed-form radius `eps0(tau)`, possibly negative.
    pub fn epsilon0_raw(&self, tau: usize) -> i64 {
        let n = self.code.n as i64;
        let k = self.code.k as i64;
        let tau = tau as i64;
        let span = n - k + 1 - tau;
        match self.kind {
            DecoderKind::Bmd => ceil_div(span, 2) - 1,
            DecoderKind::Irs { ell } => {
                let ell = ell as i64;
                ceil_div(ell * span, ell + 1) - 1
            }
            DecoderKind::Gs => {
                let rest = n - tau;
                if rest <= 0 {
                    return -1;
                }
                let prod = rest * (k - 1);
                let approx = (rest as f64 - ((prod) as f64).sqrt()).ceil() as i64 - 1;
                // Snap to the exact boundary: eps0 is the largest eps with
                // (rest - eps)^2 > rest (k - 1) and rest - eps > 0.
                let ok = |e: i64| e < rest && (rest - e) * (rest - e) > prod;
                let mut e = approx;
                while ok(e + 1) {
                    e += 1;
                }
                while e >= 0 && !ok(e) {
                    e -= 1;
                }
                e.max(-1)
            }
        }
    }

    /// Decoding radius for `tau` erasures; `None` when the decoder cannot
    /// correct even error-free words with that many erasures.
    pub fn epsilon0(&self, tau: usize) -> Option<usize> {
        let e = self.epsilon0_raw(tau);
        (e >= 0).then_some(e as usize)
    }

    pub fn d_min(&self) -> usize {
        self.code.d_min()
    }
}

fn ceil_div(a: i64, b: i64) -> i64 {
    -((-a).div_euclid(b))
}
