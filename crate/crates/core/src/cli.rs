//! Command-line front end.
//!
//! Campaign settings come from a flat TOML file (see the README for the
//! schema); `--seed`, `--frames` and `--max-errors` override it. Every output
//! starts with `#` lines holding the tool version, the arguments and the
//! fully resolved configuration, so stripping the `# ` prefix from the
//! configuration block yields a config file that reproduces the run.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::dcf::DecoderCapability;
use crate::error::{Error, Result};
use crate::gf::{Field, FieldSpec};
use crate::modem::{sigma_from_ebn0, Constellation, RegionClass, UnreliabilityLut};
use crate::rs_codec::CodeParams;
use crate::sim::{self, CampaignConfig, CSV_HEADER};
#[cfg(test)]
use crate::sim::DecoderMode;
use crate::strategy::{self, StrategyKind, UnreliabilityVector};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "erasure-lab", version, about = "Adaptive error/erasure decoding of RS codes over QAM")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalFlags,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone, Default)]
pub struct GlobalFlags {
    /// Flat TOML configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
    /// Maximum frames per grid point.
    #[arg(long, global = true, value_name = "N")]
    pub frames: Option<u64>,
    /// Stop a grid point after this many frame errors.
    #[arg(long, global = true, value_name = "N")]
    pub max_errors: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte-Carlo frame error rates.
    Simulate,
    /// Analytic curves from averaged unreliability vectors.
    Predict {
        /// Unreliability vectors per grid point.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Erasure count chosen by each strategy for one unreliability vector.
    Strategy {
        /// File of unreliabilities separated by whitespace or commas.
        #[arg(long, value_name = "PATH", conflicts_with_all = ["sample", "sample_ebn0"])]
        h_file: Option<PathBuf>,
        /// Sample a vector at this noise standard deviation.
        #[arg(long, value_name = "SIGMA", conflicts_with = "sample_ebn0")]
        sample: Option<f64>,
        /// Sample a vector at this Eb/N0 in dB.
        #[arg(long, value_name = "DB")]
        sample_ebn0: Option<f64>,
        /// bmd, gs or irsL; overrides the config.
        #[arg(long)]
        decoder: Option<String>,
        /// exact, hoeffding, eps0 or all.
        #[arg(long, default_value = "all")]
        strategy: String,
        /// Also print P(tau) for every tau.
        #[arg(long)]
        profile: bool,
    },
    /// Quantized unreliability lookup table.
    Lut {
        /// Constellation size.
        #[arg(long, default_value_t = 256)]
        qam: usize,
        /// Quantizer bits per axis.
        #[arg(long, default_value_t = 8)]
        bits: u32,
        #[arg(long, default_value_t = 18.0)]
        ebn0: f64,
        /// Code length for the rate in the noise level; uncoded when absent.
        #[arg(long, requires = "k")]
        n: Option<usize>,
        #[arg(long, requires = "n")]
        k: Option<usize>,
        /// Noise standard deviation; overrides the Eb/N0.
        #[arg(long)]
        sigma: Option<f64>,
    },
}

/// Configuration file schema. All keys are optional.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub m: Option<u32>,
    pub primitive_poly: Option<u32>,
    pub decoder: Option<String>,
    pub constellation: Option<usize>,
    pub ebn0: Option<Vec<f64>>,
    pub ebn0_start: Option<f64>,
    pub ebn0_stop: Option<f64>,
    pub ebn0_step: Option<f64>,
    pub strategy: Option<String>,
    pub modes: Option<Vec<String>>,
    pub max_frames: Option<u64>,
    pub max_errors: Option<u64>,
    pub seed: Option<u64>,
    pub unreliability: Option<String>,
    pub avg_samples: Option<usize>,
    pub verify_indicator: Option<bool>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    fn code(&self) -> Result<CodeParams> {
        let (n, k) = match (self.n, self.k) {
            (Some(n), Some(k)) => (n, k),
            (None, None) => (15, 7),
            _ => return Err(Error::Config("`n` and `k` must be given together".into())),
        };
        let m = match self.m {
            Some(m) => m,
            None => (2..=16).find(|&m| (1usize << m) > n).ok_or_else(|| Error::Config(format!("no field for n = {n}")))?,
        };
        let poly = match self.primitive_poly {
            Some(p) => p,
            None => FieldSpec::default_for(m)
                .ok_or_else(|| Error::Config(format!("no default primitive polynomial for m = {m}; set `primitive_poly`")))?
                .primitive_poly,
        };
        let spec = FieldSpec::new(m, poly);
        Field::new(spec)?;
        CodeParams::new(spec, n, k)
    }

    fn grid(&self) -> Result<Vec<f64>> {
        let range = (self.ebn0_start, self.ebn0_stop, self.ebn0_step);
        match (&self.ebn0, range) {
            (Some(_), (None, None, None)) => Ok(self.ebn0.clone().unwrap_or_default()),
            (None, (Some(start), Some(stop), Some(step))) => {
                if step.is_nan() || step <= 0.0 || stop < start {
                    return Err(Error::Config("need ebn0_step > 0 and ebn0_stop >= ebn0_start".into()));
                }
                let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
                Ok((0..count).map(|i| start + i as f64 * step).collect())
            }
            (None, (None, None, None)) => Ok(vec![]),
            _ => Err(Error::Config(
                "give either `ebn0` or all of `ebn0_start`, `ebn0_stop`, `ebn0_step`".into(),
            )),
        }
    }

    /// Fills in defaults. Mode/decoder compatibility is checked when a
    /// campaign starts.
    pub fn resolve(&self) -> Result<CampaignConfig> {
        let code = self.code()?;
        let mut cfg = CampaignConfig::new(code);
        if let Some(d) = &self.decoder {
            cfg.decoder = d.parse()?;
        }
        cfg.constellation_size = self.constellation.unwrap_or(code.field.size());
        cfg.ebn0_grid = self.grid()?;
        if let Some(s) = &self.strategy {
            cfg.strategy = s.parse()?;
        }
        if let Some(modes) = &self.modes {
            cfg.modes = modes.iter().map(|m| m.parse()).collect::<Result<_>>()?;
        }
        if let Some(v) = self.max_frames {
            cfg.max_frames = v;
        }
        if let Some(v) = self.max_errors {
            cfg.max_errors = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(u) = &self.unreliability {
            cfg.unreliability = u.parse()?;
        }
        if let Some(v) = self.avg_samples {
            cfg.avg_samples = v;
        }
        if let Some(v) = self.verify_indicator {
            cfg.verify_indicator = v;
        }
        Ok(cfg)
    }
}

/// The resolved configuration as TOML lines accepted by [`ConfigFile`].
pub fn render_config(cfg: &CampaignConfig) -> Vec<String> {
    let grid: Vec<String> = cfg.ebn0_grid.iter().map(|v| format!("{v:?}")).collect();
    let modes: Vec<String> = cfg.modes.iter().map(|m| format!("\"{m}\"")).collect();
    vec![
        format!("n = {}", cfg.code.n),
        format!("k = {}", cfg.code.k),
        format!("m = {}", cfg.code.field.m),
        format!("primitive_poly = {:#x}", cfg.code.field.primitive_poly),
        format!("decoder = \"{}\"", cfg.decoder),
        format!("constellation = {}", cfg.constellation_size),
        format!("ebn0 = [{}]", grid.join(", ")),
        format!("strategy = \"{}\"", cfg.strategy),
        format!("modes = [{}]", modes.join(", ")),
        format!("max_frames = {}", cfg.max_frames),
        format!("max_errors = {}", cfg.max_errors),
        format!("seed = {}", cfg.seed),
        format!("unreliability = \"{}\"", cfg.unreliability),
        format!("avg_samples = {}", cfg.avg_samples),
        format!("verify_indicator = {}", cfg.verify_indicator),
    ]
}

/// Provenance lines written ahead of every output.
#[derive(Debug, Clone)]
pub struct RunManifest {
    pub command: String,
    pub args: Vec<String>,
    pub config_path: Option<PathBuf>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub resolved: Vec<String>,
}

impl RunManifest {
    pub fn lines(&self) -> Vec<String> {
        let mut lines = vec![
            format!("# erasure-lab {VERSION} {}", self.command),
            format!("# args: {}", self.args.join(" ")),
        ];
        if let Some(p) = &self.config_path {
            lines.push(format!("# config file: {}", p.display()));
        }
        if let Some(s) = self.seed {
            lines.push(format!("# seed: {s}"));
        }
        lines.push(format!(
            "# output: {}",
            self.out.as_ref().map(|p| p.display().to_string()).unwrap_or_else(|| "stdout".into())
        ));
        if !self.resolved.is_empty() {
            lines.push("# resolved configuration:".into());
            lines.extend(self.resolved.iter().map(|l| format!("# {l}")));
        }
        lines
    }
}

/// Command-line arguments without the thread count, which never changes
/// results.
fn reproducible_args() -> Vec<String> {
    let mut out = Vec::new();
    let mut args = std::env::args().skip(1);
    while let Some(a) = args.next() {
        if a == "--threads" {
            args.next();
        } else if !a.starts_with("--threads=") {
            out.push(a);
        }
    }
    out
}

fn emit(out: Option<&Path>, manifest: &RunManifest, body: &str) -> Result<()> {
    let mut text = String::new();
    for l in manifest.lines() {
        text.push_str(&l);
        text.push('\n');
    }
    text.push_str(body);
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Error::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn load_config(flags: &GlobalFlags) -> Result<ConfigFile> {
    let mut file = match &flags.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    if flags.seed.is_some() {
        file.seed = flags.seed;
    }
    if flags.frames.is_some() {
        file.max_frames = flags.frames;
    }
    if flags.max_errors.is_some() {
        file.max_errors = flags.max_errors;
    }
    Ok(file)
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match threads {
        None => f(),
        Some(0) => Err(Error::Usage("--threads must be at least 1".into())),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Usage(format!("cannot start thread pool: {e}")))?
            .install(f),
    }
}

fn manifest(command: &str, flags: &GlobalFlags, seed: Option<u64>, resolved: Vec<String>) -> RunManifest {
    RunManifest {
        command: command.into(),
        args: reproducible_args(),
        config_path: flags.config.clone(),
        seed,
        out: flags.out.clone(),
        resolved,
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let flags = &cli.global;
    match &cli.command {
        Command::Simulate => cmd_simulate(flags),
        Command::Predict { samples } => cmd_predict(flags, *samples),
        Command::Strategy { h_file, sample, sample_ebn0, decoder, strategy, profile } => {
            let input = match (h_file, sample, sample_ebn0) {
                (Some(p), _, _) => StrategyInput::File(p.clone()),
                (None, Some(s), _) => StrategyInput::Sigma(*s),
                (None, None, Some(db)) => StrategyInput::EbN0(*db),
                _ => return Err(Error::Usage("give --h-file, --sample or --sample-ebn0".into())),
            };
            cmd_strategy(flags, input, decoder.as_deref(), strategy, *profile)
        }
        Command::Lut { qam, bits, ebn0, n, k, sigma } => cmd_lut(flags, *qam, *bits, *ebn0, n.zip(*k), *sigma),
    }
}

pub fn cmd_simulate(flags: &GlobalFlags) -> Result<()> {
    let cfg = load_config(flags)?.resolve()?;
    cfg.validate()?;
    let rows = with_threads(flags.threads, || sim::run_campaign(&cfg))?;
    let mut body = format!("{CSV_HEADER}\n");
    for r in &rows {
        body.push_str(&r.csv_row());
        body.push('\n');
    }
    emit(flags.out.as_deref(), &manifest("simulate", flags, Some(cfg.seed), render_config(&cfg)), &body)?;
    if cfg.verify_indicator {
        let mismatches: u64 = rows.iter().map(|r| r.indicator_mismatches).sum();
        eprintln!("indicator mismatches: {mismatches}");
        if mismatches > 0 {
            return Err(Error::Domain(format!("{mismatches} frames disagree with the analytic failure indicator")));
        }
    }
    Ok(())
}

pub fn cmd_predict(flags: &GlobalFlags, samples: Option<usize>) -> Result<()> {
    let mut cfg = load_config(flags)?.resolve()?;
    if let Some(s) = samples {
        cfg.avg_samples = s;
    }
    if cfg.ebn0_grid.is_empty() {
        return Err(Error::Config("missing `ebn0` grid".into()));
    }
    let points = with_threads(flags.threads, || {
        sim::analytic_curves(
            cfg.code,
            &[cfg.decoder],
            &StrategyKind::ALL,
            cfg.unreliability,
            &cfg.ebn0_grid,
            cfg.avg_samples,
            cfg.seed,
        )
    })?;
    let body = sim::analytic_csv(&points);
    emit(flags.out.as_deref(), &manifest("predict", flags, Some(cfg.seed), render_config(&cfg)), &body)
}

#[derive(Debug, Clone)]
pub enum StrategyInput {
    File(PathBuf),
    Sigma(f64),
    EbN0(f64),
}

/// Parses unreliabilities separated by whitespace or commas; `#` starts a
/// comment.
pub fn parse_h_values(text: &str) -> Result<Vec<f64>> {
    let mut h = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        for tok in line.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
            let v: f64 = tok
                .parse()
                .map_err(|_| Error::Usage(format!("line {}: '{tok}' is not a number", lineno + 1)))?;
            h.push(v);
        }
    }
    Ok(h)
}

pub fn cmd_strategy(
    flags: &GlobalFlags,
    input: StrategyInput,
    decoder: Option<&str>,
    strategy: &str,
    profile: bool,
) -> Result<()> {
    let mut cfg = load_config(flags)?.resolve()?;
    if let Some(d) = decoder {
        cfg.decoder = d.parse()?;
    }
    let cap = DecoderCapability::new(cfg.decoder, cfg.code)?;
    let kinds: Vec<StrategyKind> =
        if strategy.eq_ignore_ascii_case("all") { StrategyKind::ALL.to_vec() } else { vec![strategy.parse()?] };
    let n = cfg.code.n;

    let mut report = String::new();
    let h = match &input {
        StrategyInput::File(p) => {
            let text = fs::read_to_string(p).map_err(|e| Error::Usage(format!("cannot read {}: {e}", p.display())))?;
            let raw = parse_h_values(&text)?;
            if raw.len() != n {
                return Err(Error::Usage(format!("{} holds {} values, the code length is {n}", p.display(), raw.len())));
            }
            let (h, reordered) = UnreliabilityVector::from_unsorted(raw)?;
            if reordered {
                eprintln!("note: input was not sorted; sorted in non-increasing order");
                report.push_str("note: input sorted in non-increasing order\n");
            }
            writeln!(report, "input: {}", p.display()).ok();
            h
        }
        StrategyInput::Sigma(_) | StrategyInput::EbN0(_) => {
            let c = Constellation::new(cfg.constellation_size)?;
            let sigma = match input {
                StrategyInput::Sigma(s) => s,
                StrategyInput::EbN0(db) => sigma_from_ebn0(db, c.size(), n, cfg.code.k),
                StrategyInput::File(_) => unreachable!(),
            };
            if !sigma.is_finite() || sigma <= 0.0 {
                return Err(Error::Usage(format!("sigma must be positive, got {sigma}")));
            }
            writeln!(report, "input: sampled, {}-QAM, sigma {}, seed {}", c.size(), sim::fmt_sig(sigma), cfg.seed).ok();
            sim::sample_vectors(sigma, &c, cfg.unreliability, n, 1, cfg.seed, 0).remove(0)
        }
    };
    writeln!(report, "code: RS({},{}) d_min {}  decoder: {}", n, cfg.code.k, cfg.code.d_min(), cfg.decoder).ok();
    writeln!(report, "mean errors: {}", sim::fmt_sig(strategy::expectation(&h, 0))).ok();
    writeln!(report, "{:<10} {:>4} {:>17} {:>17}", "strategy", "tau", "predicted_p", "exact_p").ok();
    for &kind in &kinds {
        let r = strategy::choose_tau(kind, &h, &cap)?;
        writeln!(
            report,
            "{:<10} {:>4} {:>17} {:>17}",
            kind.to_string(),
            r.tau_chosen,
            sim::fmt_sig(r.predicted_p),
            sim::fmt_sig(strategy::exact_p(&h, &cap, r.tau_chosen))
        )
        .ok();
    }
    if profile {
        let profiles: Vec<Vec<f64>> = kinds.iter().map(|&k| strategy::profile(k, &h, &cap)).collect::<Result<_>>()?;
        report.push_str("\nprofile\ntau");
        for k in &kinds {
            write!(report, ",{k}").ok();
        }
        report.push('\n');
        for tau in 0..cfg.code.d_min() {
            write!(report, "{tau}").ok();
            for p in &profiles {
                write!(report, ",{}", sim::fmt_sig(p[tau])).ok();
            }
            report.push('\n');
        }
    }
    let mut resolved = render_config(&cfg);
    resolved.retain(|l| !l.starts_with("modes") && !l.starts_with("max_") && !l.starts_with("verify"));
    emit(flags.out.as_deref(), &manifest("strategy", flags, Some(cfg.seed), resolved), &report)
}

pub fn cmd_lut(
    flags: &GlobalFlags,
    qam: usize,
    bits: u32,
    ebn0: f64,
    code: Option<(usize, usize)>,
    sigma: Option<f64>,
) -> Result<()> {
    let c = Constellation::new(qam).map_err(|e| Error::Usage(e.to_string()))?;
    let sigma = match sigma {
        Some(s) => s,
        None => {
            let (n, k) = code.unwrap_or((1, 1));
            if k == 0 || k > n {
                return Err(Error::Usage("need 0 < k <= n".into()));
            }
            sigma_from_ebn0(ebn0, qam, n, k)
        }
    };
    let lut = UnreliabilityLut::build(&c, sigma, bits).map_err(|e| Error::Usage(e.to_string()))?;
    let mut body = Vec::new();
    lut.write_to(&mut body)?;
    let body = String::from_utf8(body).expect("lookup table text is ASCII");
    let mut resolved = vec![format!("qam = {qam}"), format!("bits = {bits}"), format!("ebn0 = {ebn0:?}")];
    if let Some((n, k)) = code {
        resolved.push(format!("code = RS({n},{k})"));
    }
    resolved.push(format!("sigma = {sigma:?}"));
    emit(flags.out.as_deref(), &manifest("lut", flags, None, resolved), &body)?;
    let summary = format!(
        "entries: {} (interior {}, edge {}, corner {})",
        lut.len(),
        lut.count_by_class(RegionClass::Interior),
        lut.count_by_class(RegionClass::Edge),
        lut.count_by_class(RegionClass::Corner)
    );
    if flags.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}
