use std::f64::consts::PI;

use quadinter::archimedean::singular_integral;
use quadinter::count::{convergence_table, enumerate_zeros, enumerate_zeros_split, weighted_count, MainTermConfig};
use quadinter::delta::{calibrate, HKernel};
use quadinter::error::DEFAULT_BUDGET;
use quadinter::model::ModelSystem;
use quadinter::quadform::RaryForm;
use quadinter::repnum::RepEngine;
use quadinter::weight::{WeightKind, WeightSpec};

fn small_cfg() -> MainTermConfig {
    MainTermConfig { samples: 100_000, ..MainTermConfig::default() }
}

#[test]
fn gaussian_model_integral_is_pi_tau() {
    let m = ModelSystem::shipped("toy").unwrap();
    let w = m.weight().unwrap().clone();
    let rep = singular_integral(&m, &w, 0.02, 100_000, 7).unwrap();
    assert!(rep.tau.tau > 0.0);
    assert!((rep.j_identity - PI * rep.tau.tau).abs() < 1e-12 * rep.j_identity, "{rep:?}");
    assert!(rep.agree, "{rep:?}");
}

#[test]
fn count_splits_into_eisenstein_and_cusp_parts() {
    let m = ModelSystem::shipped("quartic").unwrap();
    let w = m.weight().unwrap().clone();
    let cnt = weighted_count(&m, &w, 20.0, DEFAULT_BUDGET).unwrap();
    assert!(cnt.lhs > 0.0);
    let engine = RepEngine::for_discriminant(m.d).unwrap();
    let resummed = cnt.resum(|c| {
        if c == 0 {
            return 1.0;
        }
        let d = engine.decompose(c).unwrap();
        d.eisenstein + d.cuspidal.re
    });
    assert!((resummed - cnt.lhs).abs() < 1e-8, "{resummed} vs {}", cnt.lhs);
}

#[test]
fn split_enumeration_on_quartic_box() {
    let m = ModelSystem::shipped("quartic").unwrap();
    let bx = m.weight().unwrap().integer_box(30.0);
    let solved = enumerate_zeros(&m.q2, &bx, DEFAULT_BUDGET).unwrap();
    let mut split = enumerate_zeros_split(&m.q2, &bx, 2, DEFAULT_BUDGET).unwrap();
    split.sort();
    assert!(!solved.is_empty());
    assert_eq!(solved, split);
}

#[test]
fn single_row_matches_weighted_count() {
    let m = ModelSystem::shipped("ternary").unwrap();
    let w = m.weight().unwrap().clone();
    let rows = convergence_table(&m, &w, &[20.0], &small_cfg(), DEFAULT_BUDGET).unwrap();
    assert_eq!(rows.len(), 1);
    let cnt = weighted_count(&m, &w, 20.0, DEFAULT_BUDGET).unwrap();
    assert_eq!(rows[0].lhs, cnt.lhs);
    assert!((rows[0].main_term - rows[0].s_trunc * rows[0].j * 20.0).abs() < 1e-9 * rows[0].main_term);
}

#[test]
fn obstructed_model_has_no_main_term_and_no_points() {
    let s = (2.0f64 / 3.0).sqrt();
    let n = (2.0 + s * s).sqrt();
    let w = WeightSpec::new(WeightKind::Radial, vec![1.0 / n, 1.0 / n, s / n], 0.1, 0.2).unwrap();
    let m = ModelSystem::new(
        "obstructed",
        -23,
        RaryForm::diagonal(&[1, 1, 1]),
        RaryForm::diagonal(&[1, 1, -3]),
        Some(w.clone()),
    )
    .unwrap();
    let rows = convergence_table(&m, &w, &[15.0], &small_cfg(), DEFAULT_BUDGET).unwrap();
    assert_eq!(rows[0].s_trunc, 0.0);
    assert_eq!(rows[0].main_term, 0.0);
    assert_eq!(rows[0].lhs, 0.0);
}

#[test]
fn calibration_constant_approaches_one() {
    let h = HKernel::new();
    let dev = |q: f64| (calibrate(&h, q).unwrap().c_q - 1.0).abs();
    let (d8, d16) = (dev(8.0), dev(16.0));
    assert!(d16 < d8 / 8.0, "{d8} {d16}");
}
