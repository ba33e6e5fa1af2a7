mod common;

use swipt_sic::analytic::{avg_harvested_energy, coverage_sic};
use swipt_sic::model::{NetworkParams, Ordering, SicConfig};
use swipt_sic::simulator::{
    estimate_coverage_profile, estimate_energy, sample_realization, SimConfig, SimEstimate,
    WindowRadius,
};

fn gain(d: f64, alpha: f64) -> f64 {
    1.0 / (1.0 + d.powf(alpha))
}

/// Per-stage success frequencies computed directly from sampled
/// realizations: decoding the k-th nearest interferer against the useful
/// signal and everything farther, and decoding the useful signal once the k
/// nearest are gone.
fn stage_estimates(
    p: &NetworkParams,
    cfg: &SimConfig,
    depth: usize,
) -> (Vec<SimEstimate>, Vec<SimEstimate>) {
    let tau = 1.0 + p.d0().powf(p.alpha());
    let (v, pt) = (p.v(), p.p_t());
    let mut decode = vec![0u64; depth];
    let mut clean = vec![0u64; depth];
    for trial in 0..cfg.trials {
        let real = sample_realization(p, cfg, trial);
        let mut near: Vec<(f64, f64)> = real
            .interferers
            .iter()
            .map(|i| (i.distance, i.fade * gain(i.distance, p.alpha())))
            .collect();
        let total: f64 = near.iter().map(|x| x.1).sum();
        let m = depth.min(near.len());
        if m < near.len() {
            near.select_nth_unstable_by(m, |a, b| a.0.total_cmp(&b.0));
        }
        near[..m].sort_by(|a, b| a.0.total_cmp(&b.0));
        let received: Vec<f64> = near[..m].iter().map(|x| x.1).collect();
        // tail[k]: interference from everything beyond the k nearest
        let mut tail = vec![total; m + 1];
        for k in 0..m {
            tail[k + 1] = tail[k] - received[k];
        }
        let useful = real.useful_fade / tau;
        let sinr = |signal: f64, interference: f64| {
            v * pt * signal / (v * (p.sigma2() + pt * interference) + p.sigma2_c())
        };
        for k in 0..m {
            if sinr(received[k], useful + tail[k + 1]) >= p.theta() {
                decode[k] += 1;
            }
            if sinr(useful, tail[k + 1]) >= p.theta() {
                clean[k] += 1;
            }
        }
    }
    let est = |c: &[u64]| {
        c.iter()
            .map(|&x| SimEstimate::from_count(x, cfg.trials, cfg.master_seed))
            .collect()
    };
    (est(&decode), est(&clean))
}

#[test]
fn stage_probabilities_match_analytic() {
    let p = NetworkParams::default();
    let cfg = SimConfig {
        trials: 40_000,
        window_radius: WindowRadius::Explicit(1000.0),
        master_seed: 3,
        ..SimConfig::default()
    };
    let (decode, clean) = stage_estimates(&p, &cfg, 2);
    let b = coverage_sic(&p, &SicConfig::new(2)).unwrap();
    for k in 0..2 {
        let z = decode[k].z_score(b.pi_d[k]);
        assert!(
            z < 3.0,
            "decode stage {}: {:?} vs {}",
            k + 1,
            decode[k],
            b.pi_d[k]
        );
        let z = clean[k].z_score(b.pi_c[k + 1]);
        assert!(
            z < 3.0,
            "cancel stage {}: {:?} vs {}",
            k + 1,
            clean[k],
            b.pi_c[k + 1]
        );
    }
}

#[test]
fn auto_window_matches_large_window() {
    let p = NetworkParams::builder().theta_db(5.0).build().unwrap();
    let sic = SicConfig::new(1);
    let base = SimConfig {
        trials: 20_000,
        ..SimConfig::default()
    };
    let auto = estimate_coverage_profile(&p, &sic, &base).unwrap();
    let wide = estimate_coverage_profile(
        &p,
        &sic,
        &SimConfig {
            window_radius: WindowRadius::Explicit(3000.0),
            ..base
        },
    )
    .unwrap();
    for n in 0..=1 {
        let (a, w) = (auto.estimates[n], wide.estimates[n]);
        let se = (a.std_error.powi(2) + w.std_error.powi(2)).sqrt();
        assert!((a.mean - w.mean).abs() < 4.0 * se, "n={n}: {a:?} vs {w:?}");
    }
}

#[test]
fn energy_without_interferers() {
    let p = NetworkParams::builder().lambda(0.0).build().unwrap();
    let est = estimate_energy(&p, &SimConfig::default()).unwrap();
    let exact = avg_harvested_energy(&p);
    assert!((exact / common::energy_reference(&p) - 1.0).abs() < 1e-14);
    assert!(est.z_score(exact) < 3.0, "{est:?} vs {exact}");
}

#[test]
fn power_ordering_never_worse_at_depth_one() {
    let p = NetworkParams::default();
    let cfg = SimConfig {
        trials: 20_000,
        ..SimConfig::default()
    };
    let by_distance = estimate_coverage_profile(&p, &SicConfig::new(1), &cfg).unwrap();
    let by_power = estimate_coverage_profile(
        &p,
        &SicConfig::new(1).with_ordering(Ordering::ByInstantaneousPower),
        &cfg,
    )
    .unwrap();
    assert_eq!(by_distance.estimates[0], by_power.estimates[0]);
    assert!(
        by_power.estimates[1].mean
            >= by_distance.estimates[1].mean - 3.0 * by_power.estimates[1].std_error
    );
}
