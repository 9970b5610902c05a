use erasure_lab::modem::{awgn, sigma_from_ebn0};
use erasure_lab::sim::{analytic_curves, run_campaign, sample_unreliability_vector, sample_vectors, CampaignConfig, DecoderMode};
use erasure_lab::strategy::{self, pgf_distribution, unimodality};
use erasure_lab::{CodeParams, Constellation, DecoderCapability, DecoderKind, StrategyKind, UnreliabilityMethod};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn symbol_error_rate(c: &Constellation, sigma: f64, symbols: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<u16> = (0..symbols).map(|_| rng.random_range(0..c.size() as u16)).collect();
    let rx = awgn(&c.modulate(&labels), sigma, &mut rng);
    let wrong = rx.iter().zip(&labels).filter(|(y, &s)| c.hard_decision(**y) != s as usize).count();
    wrong as f64 / symbols as f64
}

#[test]
fn mean_unreliability_matches_symbol_error_rate() {
    let c = Constellation::new(256).unwrap();
    let sigma = sigma_from_ebn0(18.0, 256, 255, 144);
    let ser = symbol_error_rate(&c, sigma, 2_550_000, 7);
    let se = (ser * (1.0 - ser) / 2_550_000.0).sqrt();
    let mean = |method| {
        let v = sample_vectors(sigma, &c, method, 255, 10_000, 8, 0);
        v.iter().flat_map(|h| h.as_slice().iter().copied()).sum::<f64>() / 2_550_000.0
    };
    let exact = mean(UnreliabilityMethod::Exact);
    // The exact posterior is calibrated; the spread of the mean is well below
    // that of the hit count.
    assert!((exact - ser).abs() < 3.0 * se * 2f64.sqrt(), "exact {exact} vs SER {ser}");
    // Dropping the diagonal and farther competitors biases it low by a few
    // percent.
    let nn = mean(UnreliabilityMethod::NearestNeighbor);
    assert!(nn < exact && nn > 0.95 * exact, "nn {nn} vs exact {exact}");
}

#[test]
fn averaged_prediction_matches_errors_only_simulation() {
    let code = CodeParams::rs15_7();
    let db = 9.0;
    let pred = analytic_curves(code, &[DecoderKind::Bmd], &[StrategyKind::Exact], UnreliabilityMethod::Exact, &[db], 10_000, 21)
        .unwrap()
        .remove(0)
        .errors_only();
    let mut cfg = CampaignConfig::new(code);
    cfg.ebn0_grid = vec![db];
    cfg.max_frames = 100_000;
    cfg.max_errors = u64::MAX;
    cfg.seed = 22;
    let row = run_campaign(&cfg).unwrap().remove(0);
    let sigma_mc = (row.fer * (1.0 - row.fer) / row.frames as f64).sqrt();
    assert!((row.fer - pred).abs() < 3.0 * sigma_mc, "simulated {} predicted {pred}", row.fer);
}

#[test]
fn eps0_rule_is_near_optimal_at_16_db() {
    let code = CodeParams::rs255_144();
    let cap = DecoderCapability::bmd(code);
    let c = Constellation::new(256).unwrap();
    let sigma = sigma_from_ebn0(16.0, 256, code.n, code.k);
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut close = 0;
    for _ in 0..1000 {
        let h = sample_unreliability_vector(sigma, &c, UnreliabilityMethod::NearestNeighbor, code.n, &mut rng);
        let best = strategy::tau_star_exact(&h, &cap).unwrap();
        let approx = strategy::tau_star_eps0(&h, &cap).unwrap();
        let p = strategy::exact_p(&h, &cap, approx.tau_chosen);
        if p <= best.predicted_p * 1.05 {
            close += 1;
        }
    }
    assert!(close >= 950, "{close}/1000 within 5%");
}

#[test]
fn gs_prediction_never_exceeds_bmd() {
    let code = CodeParams::rs255_144();
    let c = Constellation::new(256).unwrap();
    let sigma = sigma_from_ebn0(16.5, 256, code.n, code.k);
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for _ in 0..50 {
        let h = sample_unreliability_vector(sigma, &c, UnreliabilityMethod::NearestNeighbor, code.n, &mut rng);
        let b = strategy::tau_star_exact(&h, &DecoderCapability::bmd(code)).unwrap();
        let g = strategy::tau_star_exact(&h, &DecoderCapability::gs(code)).unwrap();
        assert!(g.predicted_p <= b.predicted_p);
    }
}

#[test]
fn adaptive_is_no_worse_than_fixed_tau_bar() {
    let mut cfg = CampaignConfig::new(CodeParams::rs15_7());
    cfg.ebn0_grid = vec![8.0, 10.0];
    cfg.modes = vec![DecoderMode::Adaptive, DecoderMode::SemiSimulative];
    cfg.max_frames = 100_000;
    cfg.max_errors = u64::MAX;
    cfg.avg_samples = 2_000;
    cfg.seed = 25;
    let rows = run_campaign(&cfg).unwrap();
    for pair in rows.chunks(2) {
        let (ad, semi) = (&pair[0], &pair[1]);
        let s = (semi.fer * (1.0 - semi.fer) / semi.frames as f64).sqrt();
        assert!(ad.fer <= semi.fer + 3.0 * s, "{ad:?} {semi:?}");
    }
}

/// The single-peak property is only a probe: violations are printed, not
/// asserted.
#[test]
fn unimodality_probe() {
    let code = CodeParams::rs255_144();
    let c = Constellation::new(256).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(26);
    let (mut checked, mut violations) = (0, 0);
    for _ in 0..1000 {
        let db = rng.random_range(15.0..=18.0);
        let sigma = sigma_from_ebn0(db, 256, code.n, code.k);
        let h = sample_unreliability_vector(sigma, &c, UnreliabilityMethod::NearestNeighbor, code.n, &mut rng);
        for tau in (0..code.d_min()).step_by(10) {
            checked += 1;
            if !unimodality(&pgf_distribution(&h, tau)).holds() {
                violations += 1;
            }
        }
    }
    println!("unimodality probe: {violations} of {checked} distributions violate the single-peak property");
}
