//! Systematic Reed-Solomon encoding and bounded-minimum-distance
//! error/erasure decoding.
//!
//! Codeword position `i` carries the coefficient of `x^(n-1-i)`, so the
//! information symbols occupy positions `0..k` and the parity the tail. The
//! generator has roots `alpha^1 ..= alpha^(n-k)`.
//!
//! Decoding follows the errata form of Berlekamp-Massey: the erasure locator
//! seeds the iteration, the resulting errata locator is searched with Chien
//! and magnitudes come from Forney's formula.

use crate::error::{Error, Result};
use crate::gf::{Field, FieldElement, FieldSpec};

/// Parameters of an RS(q; n, k, d_min) code. The code is MDS, so
/// `d_min = n - k + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodeParams {
    pub field: FieldSpec,
    pub n: usize,
    pub k: usize,
}

impl CodeParams {
    pub fn new(field: FieldSpec, n: usize, k: usize) -> Result<Self> {
        let p = CodeParams { field, n, k };
        p.validate()?;
        Ok(p)
    }

    /// RS(16; 15, 7, 9) over GF(16).
    pub fn rs15_7() -> Self {
        CodeParams { field: FieldSpec::gf16(), n: 15, k: 7 }
    }

    /// RS(256; 255, 144, 112) over GF(256).
    pub fn rs255_144() -> Self {
        CodeParams { field: FieldSpec::gf256(), n: 255, k: 144 }
    }

    pub fn validate(&self) -> Result<()> {
        let max_n = self.field.size() - 1;
        if self.k < 1 || self.k >= self.n || self.n > max_n {
            return Err(Error::Code(format!(
                "need 1 <= k < n <= {max_n}, got n={} k={}",
                self.n, self.k
            )));
        }
        Ok(())
    }

    pub fn d_min(&self) -> usize {
        self.n - self.k + 1
    }

    /// Number of parity symbols, `n - k`.
    pub fn redundancy(&self) -> usize {
        self.n - self.k
    }

    /// Errors correctable by BMD decoding alongside `tau` erasures, or `None`
    /// if `tau` exhausts the redundancy.
    pub fn bmd_radius(&self, tau: usize) -> Option<usize> {
        let r = self.redundancy();
        (tau <= r).then(|| (r - tau) / 2)
    }
}

/// Received word as seen by the decoder: a symbol or an erasure per position,
/// with the channel unreliability of the hard decision alongside.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedWord {
    pub positions: Vec<Option<FieldElement>>,
    pub unreliability: Vec<f64>,
}

impl ReceivedWord {
    pub fn new(positions: Vec<Option<FieldElement>>, unreliability: Vec<f64>) -> Result<Self> {
        if positions.len() != unreliability.len() {
            return Err(Error::Usage(format!(
                "{} symbols but {} unreliabilities",
                positions.len(),
                unreliability.len()
            )));
        }
        if let Some(h) = unreliability.iter().find(|h| !(h.is_finite() && (0.0..1.0).contains(*h))) {
            return Err(Error::Usage(format!("unreliability {h} outside [0, 1)")));
        }
        Ok(ReceivedWord { positions, unreliability })
    }

    /// Hard decisions with zero unreliability everywhere.
    pub fn hard(symbols: &[FieldElement]) -> Self {
        ReceivedWord {
            positions: symbols.iter().copied().map(Some).collect(),
            unreliability: vec![0.0; symbols.len()],
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn erasure_count(&self) -> usize {
        self.positions.iter().filter(|p| p.is_none()).count()
    }

    /// Position indices ordered from most to least unreliable; equal
    /// unreliabilities keep index order.
    pub fn reliability_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| {
            self.unreliability[b]
                .partial_cmp(&self.unreliability[a])
                .expect("finite unreliabilities")
                .then(a.cmp(&b))
        });
        order
    }

    /// Copy of this word with the `tau` most unreliable positions erased.
    pub fn erase_most_unreliable(&self, tau: usize) -> ReceivedWord {
        let mut out = self.clone();
        for &i in self.reliability_order().iter().take(tau) {
            out.positions[i] = None;
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecodeOutcome {
    Decoded(Vec<FieldElement>),
    Failure,
}

impl DecodeOutcome {
    pub fn codeword(&self) -> Option<&[FieldElement]> {
        match self {
            DecodeOutcome::Decoded(c) => Some(c),
            DecodeOutcome::Failure => None,
        }
    }

    pub fn is_failure(&self) -> bool {
        matches!(self, DecodeOutcome::Failure)
    }
}

/// Polynomials are stored lowest degree first.
type Poly = Vec<FieldElement>;

fn trim(p: &mut Poly) {
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn degree(p: &[FieldElement]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

/// Encoder/decoder for one code.
#[derive(Debug, Clone)]
pub struct RsCodec {
    field: Field,
    params: CodeParams,
    /// Monic generator, highest degree first.
    generator: Vec<FieldElement>,
}

impl RsCodec {
    pub fn new(params: CodeParams) -> Result<Self> {
        params.validate()?;
        let field = Field::new(params.field)?;
        // g(x) = prod_{i=1}^{n-k} (x + alpha^i), built lowest degree first.
        let mut g: Poly = vec![FieldElement::ONE];
        for i in 1..=params.redundancy() {
            let root = field.alpha_pow(i as i64);
            let mut next = vec![FieldElement::ZERO; g.len() + 1];
            for (j, &c) in g.iter().enumerate() {
                next[j + 1] += c;
                next[j] += field.mul(c, root);
            }
            g = next;
        }
        g.reverse();
        Ok(RsCodec { field, params, generator: g })
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Generator coefficients, highest degree first.
    pub fn generator(&self) -> &[FieldElement] {
        &self.generator
    }

    pub fn encode(&self, info: &[FieldElement]) -> Result<Vec<FieldElement>> {
        let CodeParams { n, k, .. } = self.params;
        if info.len() != k {
            return Err(Error::Usage(format!("expected {k} information symbols, got {}", info.len())));
        }
        if let Some(bad) = info.iter().find(|s| s.0 as usize >= self.field.size()) {
            return Err(Error::Usage(format!("symbol {bad} outside the field")));
        }
        let mut buf = info.to_vec();
        buf.resize(n, FieldElement::ZERO);
        for i in 0..k {
            let coef = buf[i];
            if coef.is_zero() {
                continue;
            }
            for (j, &g) in self.generator.iter().enumerate().skip(1) {
                buf[i + j] += self.field.mul(g, coef);
            }
        }
        let mut out = info.to_vec();
        out.extend_from_slice(&buf[k..]);
        Ok(out)
    }

    /// Locator `X_i = alpha^(n-1-i)` of position `i`.
    fn locator(&self, i: usize) -> FieldElement {
        self.field.alpha_pow((self.params.n - 1 - i) as i64)
    }

    /// `S_j = r(alpha^j)` for `j = 1..=n-k`, returned as `S_1` first.
    pub fn syndromes(&self, word: &[FieldElement]) -> Vec<FieldElement> {
        (1..=self.params.redundancy())
            .map(|j| {
                let a = self.field.alpha_pow(j as i64);
                word.iter().fold(FieldElement::ZERO, |s, &c| self.field.mul(s, a) + c)
            })
            .collect()
    }

    pub fn is_codeword(&self, word: &[FieldElement]) -> bool {
        word.len() == self.params.n && self.syndromes(word).iter().all(|s| s.is_zero())
    }

    fn eval(&self, p: &[FieldElement], x: FieldElement) -> FieldElement {
        p.iter().rev().fold(FieldElement::ZERO, |acc, &c| self.field.mul(acc, x) + c)
    }

    /// Bounded-minimum-distance error/erasure decoding.
    ///
    /// Succeeds with the unique codeword when `2e + tau <= d_min - 1`. Beyond
    /// that it either reports failure or returns some other codeword within
    /// `(d_min - 1 - tau) / 2` of the unerased positions.
    pub fn decode_ee(&self, word: &ReceivedWord) -> Result<DecodeOutcome> {
        let CodeParams { n, .. } = self.params;
        if word.len() != n {
            return Err(Error::Usage(format!("expected {n} positions, got {}", word.len())));
        }
        let f = &self.field;
        let two_t = self.params.redundancy();
        let erased: Vec<usize> = (0..n).filter(|&i| word.positions[i].is_none()).collect();
        let tau = erased.len();
        if tau > two_t {
            return Ok(DecodeOutcome::Failure);
        }
        let r: Vec<FieldElement> = word.positions.iter().map(|p| p.unwrap_or(FieldElement::ZERO)).collect();
        let syn = self.syndromes(&r);
        if syn.iter().all(|s| s.is_zero()) {
            return Ok(DecodeOutcome::Decoded(r));
        }

        // Erasure locator Gamma(x) = prod (1 + X_i x).
        let mut gamma: Poly = vec![FieldElement::ONE];
        for &i in &erased {
            let x = self.locator(i);
            let mut next = vec![FieldElement::ZERO; gamma.len() + 1];
            for (j, &c) in gamma.iter().enumerate() {
                next[j] += c;
                next[j + 1] += f.mul(c, x);
            }
            gamma = next;
        }

        // Errata Berlekamp-Massey seeded with the erasure locator.
        let mut lambda = gamma.clone();
        let mut b = gamma;
        let mut l = tau;
        for step in (tau + 1)..=two_t {
            let mut delta = FieldElement::ZERO;
            for (j, &c) in lambda.iter().enumerate() {
                if j < step {
                    delta += f.mul(c, syn[step - j - 1]);
                }
            }
            if delta.is_zero() {
                b.insert(0, FieldElement::ZERO);
                continue;
            }
            let mut next = lambda.clone();
            next.resize(next.len().max(b.len() + 1), FieldElement::ZERO);
            for (j, &c) in b.iter().enumerate() {
                next[j + 1] += f.mul(delta, c);
            }
            if 2 * l < step + tau {
                let dinv = f.inv(delta)?;
                b = lambda.iter().map(|&c| f.mul(dinv, c)).collect();
                l = step + tau - l;
            } else {
                b.insert(0, FieldElement::ZERO);
            }
            trim(&mut next);
            lambda = next;
        }
        trim(&mut lambda);

        if degree(&lambda) != Some(l) || l < tau || 2 * (l - tau) + tau > two_t {
            return Ok(DecodeOutcome::Failure);
        }

        // Chien search restricted to the n valid positions.
        let roots: Vec<usize> = (0..n)
            .filter(|&i| {
                let xinv = f.inv(self.locator(i)).expect("locators are nonzero");
                self.eval(&lambda, xinv).is_zero()
            })
            .collect();
        if roots.len() != l {
            return Ok(DecodeOutcome::Failure);
        }

        // Omega(x) = S(x) Lambda(x) mod x^(n-k), with S(x) = sum S_j x^(j-1).
        let mut omega = vec![FieldElement::ZERO; two_t];
        for (i, &a) in lambda.iter().enumerate() {
            for (j, &s) in syn.iter().enumerate() {
                if i + j < two_t {
                    omega[i + j] += f.mul(a, s);
                }
            }
        }
        // Formal derivative: only odd-power terms survive in characteristic 2.
        let deriv: Poly = (1..lambda.len())
            .map(|i| if i % 2 == 1 { lambda[i] } else { FieldElement::ZERO })
            .collect();

        let mut corrected = r;
        for &i in &roots {
            let xinv = f.inv(self.locator(i))?;
            let den = self.eval(&deriv, xinv);
            if den.is_zero() {
                return Ok(DecodeOutcome::Failure);
            }
            corrected[i] += f.div(self.eval(&omega, xinv), den)?;
        }

        if !self.is_codeword(&corrected) {
            return Ok(DecodeOutcome::Failure);
        }
        let changed = (0..n)
            .filter(|&i| word.positions[i].is_some_and(|s| s != corrected[i]))
            .count();
        if 2 * changed + tau > two_t {
            return Ok(DecodeOutcome::Failure);
        }
        Ok(DecodeOutcome::Decoded(corrected))
    }
}
