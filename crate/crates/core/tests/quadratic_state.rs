mod common;

use common::{random_config, rel, rng, Reference};
use proptest::prelude::*;
use rand::Rng;
use spdc_purity::phasematch::{coord, DeltaEvaluator};
use spdc_purity::quadratic_state::{
    assemble_a, assemble_a_with, assemble_terms, det_pd, evaluate, pump_duration, purity,
    AssemblyOptions, LimitPolicy, QuadraticForm, TracePairing,
};
use spdc_purity::scenarios::{preset, presets};
use spdc_purity::{Error, PumpSpectrum};

fn a_for(cfg: &spdc_purity::Config) -> QuadraticForm {
    let lin = DeltaEvaluator::new(cfg).unwrap().linearize().unwrap();
    assemble_a(cfg, &lin).unwrap()
}

#[test]
fn fig2_matrix_matches_independent_assembly() {
    let cfg = preset("fig2").unwrap();
    let ev = DeltaEvaluator::new(&cfg).unwrap();
    let lin = ev.linearize().unwrap();
    let a = assemble_a(&cfg, &lin).unwrap();
    let t0 = pump_duration(&cfg, &lin).unwrap();
    let reference = Reference::new(&cfg, ev.cut_angle(), ev.walkoff()).matrix_a(t0);
    let scale = (0..6).map(|i| reference[i][i]).fold(0.0, f64::max);
    for i in 0..6 {
        for j in 0..6 {
            assert!(
                (a[(i, j)] - reference[i][j]).abs() <= 1e-8 * scale.max(reference[i][j].abs()),
                "A[{i}][{j}] = {} vs {}",
                a[(i, j)],
                reference[i][j]
            );
        }
    }
}

#[test]
fn composed_form_matches_explicit_expansion_on_random_vectors() {
    let a = a_for(&preset("fig2").unwrap());
    let mut r = rng(3);
    for pairing in [
        TracePairing::frequency(),
        TracePairing::idler(),
        TracePairing::momentum(),
    ] {
        let b = pairing.compose(&a).unwrap();
        for _ in 0..50 {
            let x: Vec<f64> = (0..12).map(|_| r.random_range(-1.0..1.0)).collect();
            let direct = b.quadratic(&x);
            let mut expanded = 0.0;
            for map in pairing.maps() {
                let sel: Vec<f64> = map.iter().map(|&i| x[i]).collect();
                expanded += a.quadratic(&sel);
            }
            assert!(rel(direct, expanded) < 1e-12, "{direct} vs {expanded}");
        }
    }
}

fn cofactor_det(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    if n == 1 {
        return m[0][0];
    }
    (0..n)
        .map(|c| {
            let minor: Vec<Vec<f64>> = m[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|(j, _)| *j != c)
                        .map(|(_, v)| *v)
                        .collect()
                })
                .collect();
            let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
            sign * m[0][c] * cofactor_det(&minor)
        })
        .sum()
}

proptest! {
    #[test]
    fn determinant_matches_cofactor_expansion(entries in prop::collection::vec(-1.0f64..1.0, 36)) {
        // M = G Gᵀ + I is symmetric positive definite
        let mut rows = vec![vec![0.0; 6]; 6];
        for i in 0..6 {
            for j in 0..6 {
                rows[i][j] = (0..6).map(|k| entries[i * 6 + k] * entries[j * 6 + k]).sum::<f64>()
                    + if i == j { 1.0 } else { 0.0 };
            }
        }
        let d = det_pd(&QuadraticForm::from_rows(&rows)).unwrap();
        prop_assert!(d.positive_definite);
        let expect = cofactor_det(&rows);
        prop_assert!(rel(d.det(), expect) <= 1e-10, "{} vs {}", d.det(), expect);
    }

    #[test]
    fn purity_never_exceeds_one(seed in 0u64..10_000) {
        let cfg = random_config(&mut rng(seed));
        let a = a_for(&cfg);
        for pairing in [TracePairing::frequency(), TracePairing::idler()] {
            let p = purity(&a, &pairing).unwrap();
            prop_assert!(p.value > 0.0 && p.value <= 1.0, "{}: {}", pairing.kind, p.value);
        }
    }

    #[test]
    fn purity_is_invariant_under_scaling(seed in 0u64..10_000, factor in 1e-3f64..1e3) {
        let a = a_for(&random_config(&mut rng(seed)));
        for pairing in [TracePairing::frequency(), TracePairing::idler()] {
            let p = purity(&a, &pairing).unwrap().value;
            let q = purity(&a.scaled(factor), &pairing).unwrap().value;
            prop_assert!((p - q).abs() < 1e-12);
        }
    }
}

/// Swap signal and idler blocks and mirror q^y.
fn swap_mirror(a: &QuadraticForm) -> QuadraticForm {
    let perm = [
        coord::QIX,
        coord::QIY,
        coord::WI,
        coord::QSX,
        coord::QSY,
        coord::WS,
    ];
    let sign = [1.0, -1.0, 1.0, 1.0, -1.0, 1.0];
    let p = a.permuted(&perm);
    let mut out = p.clone();
    for i in 0..6 {
        for j in 0..6 {
            out[(i, j)] = sign[i] * sign[j] * p[(i, j)];
        }
    }
    out
}

#[test]
fn exchange_symmetry_of_degenerate_configs() {
    for name in ["fig2", "fig5c", "teich", "altman", "valencia_w30"] {
        let a = a_for(&preset(name).unwrap());
        let s = swap_mirror(&a);
        let scale = a.as_slice().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (x, y) in a.as_slice().iter().zip(s.as_slice()) {
            assert!((x - y).abs() <= 1e-12 * scale, "{name}");
        }
        for pairing in [TracePairing::frequency(), TracePairing::idler()] {
            let p = purity(&a, &pairing).unwrap().value;
            let q = purity(&s, &pairing).unwrap().value;
            assert!((p - q).abs() < 1e-12, "{name} {}", pairing.kind);
        }
    }
}

#[test]
fn frequency_and_momentum_traces_agree() {
    for p in presets() {
        let a = a_for(&p.config);
        let f = purity(&a, &TracePairing::frequency()).unwrap().value;
        let m = purity(&a, &TracePairing::momentum()).unwrap().value;
        assert!((f - m).abs() <= 1e-10, "{}: {f} vs {m}", p.name);
    }
}

#[test]
fn constant_offsets_do_not_enter() {
    let cfg = preset("fig2").unwrap();
    let lin = DeltaEvaluator::new(&cfg).unwrap().linearize().unwrap();
    let mut shifted = lin;
    shifted.d0_const = 0.37;
    shifted.dk_const = -1.2;
    let opts = AssemblyOptions::default();
    let a = assemble_terms(&cfg, &lin, &opts).unwrap().matrix();
    let b = assemble_terms(&cfg, &shifted, &opts).unwrap().matrix();
    assert_eq!(a, b);
    // a detuned cut angle only moves the constants at first order
    let mut detuned = cfg.clone();
    let theta = DeltaEvaluator::new(&cfg).unwrap().cut_angle();
    detuned.cut_angle = spdc_purity::CutAngle::Manual(theta + 1e-4);
    let r0 = evaluate(&cfg).unwrap();
    let r1 = evaluate(&detuned).unwrap();
    assert!(
        DeltaEvaluator::new(&detuned)
            .unwrap()
            .linearize()
            .unwrap()
            .dk_const
            .abs()
            > 1e-5
    );
    assert!((r0.purity_spatial_pair - r1.purity_spatial_pair).abs() < 1e-3);
}

#[test]
fn fig2_values_match_prototype() {
    // numpy implementation with its own Sellmeier evaluation and finite-difference group indices
    let cases = [
        (50.0, 0.77477),
        (100.0, 0.79578),
        (400.0, 0.90332),
        (1000.0, 0.97468),
        (3000.0, 0.99684),
    ];
    for (w, expect) in cases {
        let r = evaluate(&preset("fig2").unwrap().with_collection_width(w)).unwrap();
        assert!(
            (r.purity_spatial_pair - expect).abs() < 1e-5,
            "w = {w}: {}",
            r.purity_spatial_pair
        );
    }
    let r = evaluate(&preset("fig2").unwrap()).unwrap();
    assert!((r.purity_spatial_pair - 0.7957781873620563).abs() < 1e-8);
    assert!((r.purity_signal - 0.2337223296653469).abs() < 1e-8);
    let r = evaluate(&preset("fig5c").unwrap()).unwrap();
    assert!((r.purity_signal - 0.692663053151418).abs() < 1e-8);
}

#[test]
fn narrow_filters_make_the_spatial_state_pure() {
    for w in [50.0, 100.0, 400.0, 1000.0, 3000.0] {
        let r = evaluate(
            &preset("fig2")
                .unwrap()
                .with_filter_width(0.0)
                .with_collection_width(w),
        )
        .unwrap();
        assert!(
            r.purity_spatial_pair >= 0.999,
            "w = {w}: {}",
            r.purity_spatial_pair
        );
        assert!(r.diagnostics.limit_check.unwrap().spatial_change < 1e-4);
    }
}

#[test]
fn spatial_purity_rises_with_collection_width() {
    let p = |w: f64| {
        evaluate(&preset("fig2").unwrap().with_collection_width(w))
            .unwrap()
            .purity_spatial_pair
    };
    assert!(p(3000.0) > p(50.0));
    assert!(p(3000.0) > 0.99);
}

#[test]
fn limits_can_be_refused() {
    let cfg = preset("fig5a").unwrap();
    let lin = DeltaEvaluator::new(&cfg).unwrap().linearize().unwrap();
    let opts = AssemblyOptions {
        limits: LimitPolicy::Reject,
        ..AssemblyOptions::default()
    };
    assert!(matches!(
        assemble_a_with(&cfg, &lin, &opts),
        Err(Error::Limit(_))
    ));
}

#[test]
fn cw_pump_converges_for_the_spatial_pair_only() {
    let r = evaluate(&preset("teich").unwrap()).unwrap();
    let cw = r.diagnostics.cw_check.unwrap();
    assert!(cw.spatial_change < 1e-4);
    assert!(!cw.signal_converged || cw.signal_change < 1e-4);
    let r = evaluate(&preset("altman").unwrap()).unwrap();
    assert!(r.diagnostics.cw_check.unwrap().spatial_change < 1e-4);
}

#[test]
fn measures_follow_from_signal_purity() {
    for p in presets() {
        let r = evaluate(&p.config).unwrap();
        assert!((r.schmidt_k - 1.0 / r.purity_signal).abs() <= 1e-12 * r.schmidt_k);
        assert!((r.i_concurrence - (2.0 * (1.0 - r.purity_signal)).sqrt()).abs() <= 1e-12);
    }
}

#[test]
fn pump_spectrum_conversion() {
    let mut cfg = preset("fig2").unwrap();
    let lin = DeltaEvaluator::new(&cfg).unwrap().linearize().unwrap();
    let t_bw = pump_duration(&cfg, &lin).unwrap();
    cfg.pump_spectrum = PumpSpectrum::Duration(t_bw);
    let direct = evaluate(&cfg).unwrap();
    let via_bw = evaluate(&preset("fig2").unwrap()).unwrap();
    assert_eq!(direct.purity_signal, via_bw.purity_signal);
}
