mod common;

use common::*;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use regar_core::solver::{acs_run, update_coefficients, update_signal, janssen_signal_update};
use regar_core::{
    consistency_distance, hard_clip, levinson_durbin, uniform_quantize, ConsistencySpec,
    ReliabilityMasks, SampleClass, SignalWeight, SolverConfig, Strategy,
};

fn declip_instance(seed: u64, n: usize, order: usize, ratio: f64) -> (Vec<f64>, ConsistencySpec) {
    let mut r = rng(seed);
    let a = random_stable_ar(&mut r, order);
    let x = realization(&mut r, &a, n);
    let peak = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let obs = hard_clip(&x, ratio * peak).unwrap();
    (x, ConsistencySpec::from_clip(&obs))
}

/// Douglas–Rachford with materialized matrices and an inline projection,
/// written independently of the library's prox routines.
fn dense_signal_oracle(
    a: &[f64],
    y: &[f64],
    theta: f64,
    labels: &[SampleClass],
    lambda: f64,
    gamma: f64,
    iters: usize,
) -> Vec<f64> {
    let n = y.len();
    let big_a = regar_core::build_toeplitz(a, n);
    let system = DMatrix::<f64>::identity(n, n) + big_a.transpose() * &big_a * gamma;
    let lu = system.lu();
    let w = gamma * lambda;
    let prox_g = |v: &DVector<f64>| {
        DVector::from_fn(n, |i, _| {
            let p = match labels[i] {
                SampleClass::Reliable => y[i],
                SampleClass::ClippedHigh => v[i].max(theta),
                SampleClass::ClippedLow => v[i].min(-theta),
                SampleClass::Missing => v[i],
            };
            (w * p + v[i]) / (w + 1.0)
        })
    };
    let mut z = DVector::from_column_slice(y);
    for _ in 0..iters {
        let u = prox_g(&z);
        let f = lu.solve(&(&u * 2.0 - &z)).unwrap();
        z += f - u;
    }
    prox_g(&z).as_slice().to_vec()
}

#[test]
fn signal_update_matches_dense_oracle() {
    for seed in 0..4 {
        let (_, spec) = declip_instance(seed, 48, 4, 0.4);
        let ConsistencySpec::Declip { y, theta, masks } = &spec else { unreachable!() };
        let a = levinson_durbin(y, 4).unwrap();
        let mut cfg = SolverConfig::new(4, Strategy::Declip);
        cfg.lambda_s = SignalWeight::Finite(10.0);
        cfg.acceleration.fft = false;
        let got = update_signal(&a, y, &cfg, &spec, 300).unwrap();
        let gamma = 1.0 / a.iter().map(|v| v * v).sum::<f64>();
        let want = dense_signal_oracle(&a, y, *theta, masks.labels(), 10.0, gamma, 300);
        assert!(rel_err(&got, &want) <= 1e-8, "seed {seed}: {}", rel_err(&got, &want));
    }
}

#[test]
fn circulant_and_dense_signal_paths_share_the_minimizer() {
    for seed in 10..14 {
        let (_, spec) = declip_instance(seed, 60, 6, 0.3);
        let y = spec.observed().to_vec();
        let a = levinson_durbin(&y, 6).unwrap();
        let mut cfg = SolverConfig::new(6, Strategy::Declip);
        for weight in [SignalWeight::Indicator, SignalWeight::Finite(5.0)] {
            cfg.lambda_s = weight;
            cfg.acceleration.fft = false;
            let dense = update_signal(&a, &y, &cfg, &spec, 20_000).unwrap();
            cfg.acceleration.fft = true;
            let fast = update_signal(&a, &y, &cfg, &spec, 20_000).unwrap();
            assert!(rel_err(&fast, &dense) <= 1e-6, "seed {seed}: {}", rel_err(&fast, &dense));
        }
    }
}

#[test]
fn circulant_and_dense_coefficient_paths_share_the_minimizer() {
    let mut r = rng(3);
    for _ in 0..4 {
        let x = uniform(&mut r, 50);
        let p = r.random_range(2..9);
        let mut cfg = SolverConfig::new(p, Strategy::Declip);
        cfg.lambda_c = 0.5;
        let start = levinson_durbin(&x, p).unwrap();
        cfg.acceleration.fft = false;
        let dense = update_coefficients(&x, &start, &cfg, 5000).unwrap();
        cfg.acceleration.fft = true;
        let fast = update_coefficients(&x, &start, &cfg, 5000).unwrap();
        assert!(rel_err(&fast, &dense) <= 1e-6);
    }
}

#[test]
fn fully_reliable_observation_is_returned() {
    let y = uniform(&mut rng(4), 32);
    let spec = ConsistencySpec::inpaint(y.clone(), ReliabilityMasks::all_reliable(32)).unwrap();
    let cfg = SolverConfig::new(3, Strategy::Declip);
    let x = update_signal(&[1.0, -0.5, 0.1, 0.0], &y, &cfg, &spec, 10).unwrap();
    assert_eq!(x.as_ref() as &[f64], y.as_slice());
}

#[test]
fn identity_filter_gives_minimum_norm_feasible_signal() {
    let clip = hard_clip(&[0.1, 0.9, -0.3, -1.2, 0.4], 0.5).unwrap();
    let spec = ConsistencySpec::from_clip(&clip);
    let mut cfg = SolverConfig::new(0, Strategy::Declip);
    for fft in [false, true] {
        cfg.acceleration.fft = fft;
        let x = update_signal(&[1.0], &clip.y, &cfg, &spec, 200).unwrap();
        let want = [0.1, 0.5, -0.3, -0.5, 0.4];
        for (g, w) in x.iter().zip(want) {
            assert!((g - w).abs() < 1e-12, "{x:?}");
        }
    }
}

#[test]
fn janssen_fills_a_gap_in_a_noiseless_recursion() {
    let a = ar_from_pole_pairs(&[(0.995, 0.3), (0.99, 1.1)]);
    let n = 512;
    let mut x = vec![0.0; n];
    x[..4].copy_from_slice(&[1.0, -0.5, 0.25, 0.8]);
    for i in 4..n {
        x[i] = -(1..5).map(|k| a[k] * x[i - k]).sum::<f64>();
    }
    let gap = 240..260;
    let reliable: Vec<usize> = (0..n).filter(|i| !gap.contains(i)).collect();
    let mut y = x.clone();
    y[gap.clone()].fill(0.0);
    let rec = janssen_signal_update(&a, &y, &reliable).unwrap();
    assert!(rel_err(&rec[gap.clone()], &x[gap]) <= 1e-6);
}

fn small_config(order: usize, strategy: Strategy, outer: usize, inner: usize) -> SolverConfig {
    SolverConfig::new(order, strategy).with_iterations(outer, inner)
}

#[test]
fn single_inpainting_pass_without_gaps_returns_observation() {
    let y = uniform(&mut rng(6), 64);
    let spec = ConsistencySpec::inpaint(y.clone(), ReliabilityMasks::all_reliable(64)).unwrap();
    let out = acs_run(&spec, &small_config(4, Strategy::Inpaint, 1, 10), None).unwrap();
    assert_eq!(out.signal.as_ref() as &[f64], y.as_slice());
    assert_eq!(out.trace.len(), 1);
}

#[test]
fn consistent_declipping_stays_feasible_and_descends() {
    let (truth, spec) = declip_instance(21, 128, 4, 0.4);
    let cfg = small_config(4, Strategy::Declip, 5, 500);
    let out = acs_run(&spec, &cfg, Some(&truth)).unwrap();
    assert_eq!(consistency_distance(&out.signal, &spec).unwrap(), 0.0);
    let q = out.trace.objectives();
    assert!(out.trace.records.iter().all(|r| r.objective.feasible && r.sdr_db.is_some()));
    for w in q.windows(2) {
        assert!(w[1] <= w[0] + 1e-6 * q[0], "{q:?}");
    }
}

#[test]
fn accelerated_variants_stay_feasible() {
    let (_, spec) = declip_instance(22, 128, 4, 0.4);
    for (sig, coef, ls) in [(true, false, false), (false, true, false), (true, true, false), (false, false, true)] {
        let mut cfg = small_config(4, Strategy::Declip, 4, 200);
        cfg.acceleration.extrapolate_signal = sig;
        cfg.acceleration.extrapolate_coefs = coef;
        cfg.acceleration.line_search = ls;
        let out = acs_run(&spec, &cfg, None).unwrap();
        assert_eq!(consistency_distance(&out.signal, &spec).unwrap(), 0.0);
        assert_eq!(out.coefficients[0], 1.0);
    }
}

#[test]
fn janssen_strategies_respect_their_sets() {
    let (_, spec) = declip_instance(23, 200, 6, 0.5);
    let out = acs_run(&spec, &small_config(6, Strategy::Glp, 3, 200), None).unwrap();
    assert_eq!(consistency_distance(&out.signal, &spec).unwrap(), 0.0);

    let out = acs_run(&spec, &small_config(6, Strategy::Inpaint, 3, 200), None).unwrap();
    for (i, &c) in spec.masks().unwrap().labels().iter().enumerate() {
        if c == SampleClass::Reliable {
            assert_eq!(out.signal[i], spec.observed()[i]);
        }
    }
    assert!(out.trace.records.iter().all(|r| r.objective.feasible));
}

#[test]
fn dequantization_lands_in_the_box() {
    let mut r = rng(24);
    let a = random_stable_ar(&mut r, 4);
    let x = realization(&mut r, &a, 128);
    let peak = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scaled: Vec<f64> = x.iter().map(|v| 0.9 * v / peak).collect();
    let obs = uniform_quantize(&scaled, 4).unwrap();
    let spec = ConsistencySpec::from_quant(&obs);
    let out = acs_run(&spec, &small_config(4, Strategy::Dequant, 3, 300), Some(&scaled)).unwrap();
    assert_eq!(consistency_distance(&out.signal, &spec).unwrap(), 0.0);
}

#[test]
fn mismatched_strategy_aborts_with_empty_trace() {
    let spec = ConsistencySpec::dequant(vec![0.0; 16], 0.25).unwrap();
    let err = acs_run(&spec, &small_config(2, Strategy::Glp, 2, 10), None).unwrap_err();
    assert!(err.trace.is_empty());
    let mut cfg = small_config(2, Strategy::Dequant, 2, 10);
    cfg.acceleration.line_search = true;
    cfg.acceleration.extrapolate_signal = true;
    assert!(acs_run(&spec, &cfg, None).is_err());
}
