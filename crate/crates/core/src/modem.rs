//! Square QAM with per-axis Gray labels, the AWGN channel, hard decisions and
//! symbol unreliabilities.
//!
//! The unreliability of a hard decision `x~` for a received point `y` is
//! `1 - P(y|x~) / sum_x P(y|x)` with Gaussian likelihoods. It is evaluated
//! as `s / (1 + s)` where `s` sums the likelihood ratios `P(y|x) / P(y|x~)`
//! of the competing points; every ratio is at most one, so nothing over- or
//! underflows into NaN at high SNR.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// A point in the I/Q plane.
pub type Point = [f64; 2];

fn dist2(a: Point, b: Point) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    dx * dx + dy * dy
}

fn gray(j: usize) -> usize {
    j ^ (j >> 1)
}

/// AWGN standard deviation per dimension for a given `Eb/N0` in dB.
///
/// `sigma = sqrt( 1/log2(M) * n/k * 10^(-EbN0/10) / 2 )`, assuming unit
/// average symbol energy.
pub fn sigma_from_ebn0(ebn0_db: f64, alphabet_size: usize, n: usize, k: usize) -> f64 {
    let bits = (alphabet_size as f64).log2();
    let rate_inv = n as f64 / k as f64;
    (rate_inv / bits * 10f64.powf(-ebn0_db / 10.0) / 2.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub ebn0_db: f64,
    pub sigma: f64,
}

impl ChannelParams {
    pub fn new(ebn0_db: f64, alphabet_size: usize, n: usize, k: usize) -> Result<Self> {
        if alphabet_size < 2 || !alphabet_size.is_power_of_two() {
            return Err(Error::Domain(format!("alphabet size {alphabet_size} is not a power of two")));
        }
        if k == 0 || k > n {
            return Err(Error::Domain(format!("need 1 <= k <= n, got n={n} k={k}")));
        }
        Ok(ChannelParams { ebn0_db, sigma: sigma_from_ebn0(ebn0_db, alphabet_size, n, k) })
    }

    /// Checks the stored sigma against the formula.
    pub fn is_consistent(&self, alphabet_size: usize, n: usize, k: usize) -> bool {
        let expect = sigma_from_ebn0(self.ebn0_db, alphabet_size, n, k);
        (self.sigma - expect).abs() <= 1e-12 * expect
    }
}

/// Square M-QAM, `M = 4^b`, with unit average energy.
///
/// Points are indexed by their label: the Gray code of the I level in the
/// high `b` bits and the Gray code of the Q level in the low `b` bits.
#[derive(Debug, Clone)]
pub struct Constellation {
    bits_per_axis: u32,
    levels: usize,
    half_spacing: f64,
    points: Vec<Point>,
    /// Grid coordinates (I level, Q level) of each label.
    grid: Vec<(usize, usize)>,
    /// Label at each grid coordinate, `label_at[i * levels + q]`.
    label_at: Vec<usize>,
}

impl Constellation {
    pub fn new(size: usize) -> Result<Self> {
        let bits = size.trailing_zeros();
        if size < 4 || !size.is_power_of_two() || !bits.is_multiple_of(2) {
            return Err(Error::Domain(format!("{size}-QAM is not a square constellation")));
        }
        let b = bits / 2;
        let levels = 1usize << b;
        let half_spacing = (3.0 / (2.0 * (levels * levels - 1) as f64)).sqrt();
        let mut points = vec![[0.0; 2]; size];
        let mut grid = vec![(0, 0); size];
        let mut label_at = vec![0; size];
        for i in 0..levels {
            for q in 0..levels {
                let label = (gray(i) << b) | gray(q);
                points[label] = [
                    (2.0 * i as f64 - (levels - 1) as f64) * half_spacing,
                    (2.0 * q as f64 - (levels - 1) as f64) * half_spacing,
                ];
                grid[label] = (i, q);
                label_at[i * levels + q] = label;
            }
        }
        Ok(Constellation { bits_per_axis: b, levels, half_spacing, points, grid, label_at })
    }

    pub fn size(&self) -> usize {
        self.points.len()
    }

    /// Amplitude levels per axis, `sqrt(M)`.
    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn bits_per_axis(&self) -> u32 {
        self.bits_per_axis
    }

    /// Half the minimum distance between points.
    pub fn half_spacing(&self) -> f64 {
        self.half_spacing
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, label: usize) -> Point {
        self.points[label]
    }

    pub fn grid_position(&self, label: usize) -> (usize, usize) {
        self.grid[label]
    }

    pub fn label_at(&self, i: usize, q: usize) -> usize {
        self.label_at[i * self.levels + q]
    }

    pub fn modulate(&self, symbols: &[u16]) -> Vec<Point> {
        symbols.iter().map(|&s| self.points[s as usize]).collect()
    }

    /// Nearest level on one axis; exact midpoints go to the smaller Gray code,
    /// which is the lower point label.
    fn slice_axis(&self, v: f64) -> usize {
        let t = (v / self.half_spacing + (self.levels - 1) as f64) / 2.0;
        let max = (self.levels - 1) as f64;
        if t <= 0.0 {
            return 0;
        }
        if t >= max {
            return self.levels - 1;
        }
        let lo = t.floor();
        let frac = t - lo;
        let lo = lo as usize;
        if frac < 0.5 {
            lo
        } else if frac > 0.5 {
            lo + 1
        } else if gray(lo) < gray(lo + 1) {
            lo
        } else {
            lo + 1
        }
    }

    /// Label of the closest constellation point.
    pub fn hard_decision(&self, y: Point) -> usize {
        self.label_at(self.slice_axis(y[0]), self.slice_axis(y[1]))
    }

    /// Axis-adjacent grid neighbours of a point: 2 at corners, 3 on edges,
    /// 4 inside.
    pub fn neighbors(&self, label: usize) -> Vec<usize> {
        let (i, q) = self.grid[label];
        let mut out = Vec::with_capacity(4);
        if i > 0 {
            out.push(self.label_at(i - 1, q));
        }
        if i + 1 < self.levels {
            out.push(self.label_at(i + 1, q));
        }
        if q > 0 {
            out.push(self.label_at(i, q - 1));
        }
        if q + 1 < self.levels {
            out.push(self.label_at(i, q + 1));
        }
        out
    }

    /// Likelihood-ratio form of the unreliability over a competitor set.
    fn unreliability_over(&self, y: Point, decided: usize, competitors: impl Iterator<Item = usize>, sigma: f64) -> f64 {
        let d0 = dist2(y, self.points[decided]);
        let scale = 1.0 / (2.0 * sigma * sigma);
        let s: f64 = competitors
            .filter(|&x| x != decided)
            .map(|x| ((d0 - dist2(y, self.points[x])) * scale).exp())
            .sum();
        s / (1.0 + s)
    }

    /// Unreliability of the hard decision using the full alphabet.
    pub fn unreliability_exact(&self, y: Point, sigma: f64) -> f64 {
        let decided = self.hard_decision(y);
        self.unreliability_over(y, decided, 0..self.size(), sigma)
    }

    /// Unreliability using only the axis-adjacent neighbours of the hard
    /// decision.
    pub fn unreliability_nn(&self, y: Point, sigma: f64) -> f64 {
        let decided = self.hard_decision(y);
        self.unreliability_over(y, decided, self.neighbors(decided).into_iter(), sigma)
    }
}

/// Adds independent zero-mean Gaussian noise with standard deviation `sigma`
/// to each coordinate.
pub fn awgn<R: Rng + ?Sized>(points: &[Point], sigma: f64, rng: &mut R) -> Vec<Point> {
    points
        .iter()
        .map(|p| {
            let nx: f64 = rng.sample(StandardNormal);
            let ny: f64 = rng.sample(StandardNormal);
            [p[0] + sigma * nx, p[1] + sigma * ny]
        })
        .collect()
}

/// How unreliabilities are computed from received points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UnreliabilityMethod {
    Exact,
    #[default]
    NearestNeighbor,
}

impl UnreliabilityMethod {
    pub fn evaluate(&self, constellation: &Constellation, y: Point, sigma: f64) -> f64 {
        match self {
            UnreliabilityMethod::Exact => constellation.unreliability_exact(y, sigma),
            UnreliabilityMethod::NearestNeighbor => constellation.unreliability_nn(y, sigma),
        }
    }
}

impl fmt::Display for UnreliabilityMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UnreliabilityMethod::Exact => "exact",
            UnreliabilityMethod::NearestNeighbor => "nn",
        })
    }
}

impl std::str::FromStr for UnreliabilityMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" => Ok(UnreliabilityMethod::Exact),
            "nn" | "nearest" | "nearest_neighbor" => Ok(UnreliabilityMethod::NearestNeighbor),
            other => Err(Error::Config(format!("unknown unreliability method '{other}' (exact, nn)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RegionClass {
    Interior,
    Edge,
    Corner,
}

impl RegionClass {
    pub fn name(&self) -> &'static str {
        match self {
            RegionClass::Interior => "interior",
            RegionClass::Edge => "edge",
            RegionClass::Corner => "corner",
        }
    }
}

impl std::str::FromStr for RegionClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "interior" => Ok(RegionClass::Interior),
            "edge" => Ok(RegionClass::Edge),
            "corner" => Ok(RegionClass::Corner),
            other => Err(Error::Lut(format!("unknown region class '{other}'"))),
        }
    }
}

pub type LutKey = (RegionClass, u32, u32);

/// Quantized nearest-neighbour unreliabilities, reduced by the symmetries of
/// the decision regions.
///
/// Each axis is split into `2^bits` equal cells, every decision region
/// getting the same number; the outer regions are clipped to the width of
/// the inner ones. Within a region the unreliability depends only on the
/// region's class and the cell offset from the modulation point, so interior
/// regions fold over both axes, edge regions over the axis parallel to their
/// border and corner regions over their diagonal.
#[derive(Debug, Clone)]
pub struct UnreliabilityLut {
    size: usize,
    bits_per_axis: u32,
    sigma: f64,
    levels: usize,
    cells_per_region: usize,
    min: f64,
    step: f64,
    entries: BTreeMap<LutKey, f64>,
}

impl UnreliabilityLut {
    pub fn build(constellation: &Constellation, sigma: f64, bits_per_axis: u32) -> Result<Self> {
        let mut lut = Self::empty(constellation, sigma, bits_per_axis)?;
        let cells = 1usize << bits_per_axis;
        for gx in 0..cells {
            for gy in 0..cells {
                let key = lut.key_of_cell(gx, gy);
                if !lut.entries.contains_key(&key) {
                    let h = constellation.unreliability_nn(lut.cell_center(gx, gy), sigma);
                    lut.entries.insert(key, h);
                }
            }
        }
        Ok(lut)
    }

    fn empty(constellation: &Constellation, sigma: f64, bits_per_axis: u32) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Lut(format!("sigma must be positive, got {sigma}")));
        }
        if !(2..=14).contains(&bits_per_axis) {
            return Err(Error::Lut(format!("bits per axis must be in 2..=14, got {bits_per_axis}")));
        }
        if bits_per_axis < constellation.bits_per_axis() {
            return Err(Error::Lut(format!(
                "{bits_per_axis} bits cannot resolve {} decision regions per axis",
                constellation.levels()
            )));
        }
        let levels = constellation.levels();
        let cells_per_region = (1usize << bits_per_axis) / levels;
        let a = constellation.half_spacing();
        Ok(UnreliabilityLut {
            size: constellation.size(),
            bits_per_axis,
            sigma,
            levels,
            cells_per_region,
            min: -(levels as f64) * a,
            step: 2.0 * a / cells_per_region as f64,
            entries: BTreeMap::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn alphabet_size(&self) -> usize {
        self.size
    }

    pub fn bits_per_axis(&self) -> u32 {
        self.bits_per_axis
    }

    pub fn cells_per_axis(&self) -> usize {
        1 << self.bits_per_axis
    }

    pub fn entries(&self) -> &BTreeMap<LutKey, f64> {
        &self.entries
    }

    pub fn count_by_class(&self, class: RegionClass) -> usize {
        self.entries.keys().filter(|k| k.0 == class).count()
    }

    pub fn cell_center(&self, gx: usize, gy: usize) -> Point {
        [
            self.min + (gx as f64 + 0.5) * self.step,
            self.min + (gy as f64 + 0.5) * self.step,
        ]
    }

    /// Cell containing `v` on one axis, clamped to the quantizer range.
    fn cell_of(&self, v: f64) -> usize {
        let c = ((v - self.min) / self.step).floor();
        if c <= 0.0 {
            0
        } else {
            (c as usize).min(self.cells_per_axis() - 1)
        }
    }

    pub fn cell_of_point(&self, y: Point) -> (usize, usize) {
        (self.cell_of(y[0]), self.cell_of(y[1]))
    }

    /// Canonical offset along one axis. Boundary axes count cells away from
    /// the single neighbour; interior axes fold about the modulation point.
    fn axis_offset(&self, region: usize, local: usize) -> (bool, u32) {
        let c = self.cells_per_region;
        if self.levels == 2 || region == 0 || region == self.levels - 1 {
            let inward = if region == 0 { c - 1 - local } else { local };
            (true, inward as u32)
        } else {
            (false, local.min(c - 1 - local) as u32)
        }
    }

    pub fn key_of_cell(&self, gx: usize, gy: usize) -> LutKey {
        let c = self.cells_per_region;
        let (bx, ox) = self.axis_offset(gx / c, gx % c);
        let (by, oy) = self.axis_offset(gy / c, gy % c);
        match (bx, by) {
            (false, false) => (RegionClass::Interior, ox, oy),
            (true, false) => (RegionClass::Edge, oy, ox),
            (false, true) => (RegionClass::Edge, ox, oy),
            (true, true) => (RegionClass::Corner, ox.min(oy), ox.max(oy)),
        }
    }

    pub fn lookup(&self, y: Point) -> f64 {
        let (gx, gy) = self.cell_of_point(y);
        self.entries[&self.key_of_cell(gx, gy)]
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "M={} bits={} sigma={:.16e}", self.size, self.bits_per_axis, self.sigma)?;
        for ((class, i, j), h) in &self.entries {
            writeln!(out, "{} {} {} {:.16e}", class.name(), i, j, h)?;
        }
        Ok(())
    }

    /// Reads the format produced by [`write_to`](Self::write_to); lines
    /// starting with `#` are ignored.
    pub fn read_from<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input
            .lines()
            .enumerate()
            .filter(|(_, l)| l.as_ref().map_or(true, |l| !l.trim_start().starts_with('#') && !l.trim().is_empty()));
        let (hline, header) = lines.next().ok_or_else(|| Error::Lut("missing header".into()))?;
        let header = header?;
        let mut size = None;
        let mut bits = None;
        let mut sigma = None;
        for field in header.split_whitespace() {
            let (k, v) = field
                .split_once('=')
                .ok_or_else(|| Error::Lut(format!("line {}: malformed header field '{field}'", hline + 1)))?;
            let bad = || Error::Lut(format!("line {}: bad value for {k}", hline + 1));
            match k {
                "M" => size = Some(v.parse::<usize>().map_err(|_| bad())?),
                "bits" => bits = Some(v.parse::<u32>().map_err(|_| bad())?),
                "sigma" => sigma = Some(v.parse::<f64>().map_err(|_| bad())?),
                _ => return Err(Error::Lut(format!("line {}: unknown header field '{k}'", hline + 1))),
            }
        }
        let (size, bits, sigma) = match (size, bits, sigma) {
            (Some(m), Some(b), Some(s)) => (m, b, s),
            _ => return Err(Error::Lut("header needs M, bits and sigma".into())),
        };
        let constellation = Constellation::new(size)?;
        let mut lut = Self::empty(&constellation, sigma, bits)?;
        for (idx, line) in lines {
            let line = line?;
            let parts: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::Lut(format!("line {}: expected 'class i j h'", idx + 1));
            if parts.len() != 4 {
                return Err(bad());
            }
            let class: RegionClass = parts[0].parse()?;
            let i: u32 = parts[1].parse().map_err(|_| bad())?;
            let j: u32 = parts[2].parse().map_err(|_| bad())?;
            let h: f64 = parts[3].parse().map_err(|_| bad())?;
            if !(0.0..1.0).contains(&h) {
                return Err(Error::Lut(format!("line {}: unreliability {h} outside [0, 1)", idx + 1)));
            }
            lut.entries.insert((class, i, j), h);
        }
        let cells = lut.cells_per_axis();
        for gx in 0..cells {
            for gy in 0..cells {
                if !lut.entries.contains_key(&lut.key_of_cell(gx, gy)) {
                    return Err(Error::Lut(format!("table is missing the entry for cell ({gx}, {gy})")));
                }
            }
        }
        Ok(lut)
    }
}
