mod common;

use common::bigfloat::erfc_reference;
use eos_tomo::model::{Crystal, MirPulse, MirState, ProbeFilter, Pump, RefractiveModel, SubBand};
use eos_tomo::numerics::{integrate_real, QuadratureSpec};
use eos_tomo::units::{angular_to_thz, sinc, thz_to_angular, AngularFrequency};
use eos_tomo::Error;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn thz(nu: f64) -> f64 {
    thz_to_angular(nu)
}

fn zinc_telluride() -> Crystal {
    Crystal::zinc_telluride(100.0).unwrap()
}

/// Independent two-branch index in ordinary frequency.
fn index_oracle(nu: f64) -> f64 {
    let nu = nu.abs();
    if nu < 140.0 {
        3.5e-4 * nu + 2.55
    } else {
        2.6e-6 * (nu - 140.0).powi(2) + 2.75
    }
}

#[test]
fn refractive_index_reference_values() {
    let m = RefractiveModel::default();
    assert_eq!(m.index(0.0), 2.55);
    let below = m.index(thz(140.0 * (1.0 - 1e-12)));
    let above = m.index(thz(140.0));
    assert!((below - 2.599).abs() < 1e-9);
    assert!((above - 2.75).abs() < 1e-12);
    assert!((m.index(thz(300.0)) - 2.8166).abs() < 5e-5);
}

#[test]
fn group_index_reference_values() {
    let m = RefractiveModel::default();
    assert_eq!(m.group_index(0.0).unwrap(), 2.55);
    assert!((m.group_index(thz(300.0)).unwrap() - 3.0662).abs() < 5e-5);
    assert!((m.group_index(thz(25.0)).unwrap() - 2.5675).abs() < 1e-12);
    assert!(matches!(
        m.group_index(thz(140.0)),
        Err(Error::RefractiveSeam { .. })
    ));
}

#[test]
fn group_index_matches_finite_difference() {
    let m = RefractiveModel::default();
    for nu in [10.0, 60.0, 200.0, 300.0, 420.0] {
        let h = 1e-4;
        let w = thz(nu);
        let dn = (m.index(thz(nu + h)) - m.index(thz(nu - h))) / (thz(h) * 2.0);
        let want = m.index(w) + w * dn;
        assert!((m.group_index(w).unwrap() - want).abs() < 1e-9, "ν = {nu}");
    }
}

proptest! {
    #[test]
    fn index_is_even_and_matches_oracle(nu in -900.0f64..900.0) {
        let m = RefractiveModel::default();
        prop_assert_eq!(m.index(thz(nu)), m.index(thz(-nu)));
        prop_assert!((m.index(thz(nu)) - index_oracle(nu)).abs() < 1e-12);
    }

    #[test]
    fn group_index_exceeds_index_on_quadratic_branch(nu in 140.001f64..900.0) {
        let m = RefractiveModel::default();
        prop_assert!(m.group_index(thz(nu)).unwrap() >= m.index(thz(nu)));
    }

    #[test]
    fn mismatch_is_antisymmetric(a in -140.0f64..140.0, b in -900.0f64..900.0) {
        let c = zinc_telluride();
        let (big, small) = (thz(a), thz(b));
        let forward = c.phase_mismatch(big, small);
        let backward = c.phase_mismatch(small, big);
        prop_assert!((forward + backward).abs() <= 1e-12 * forward.abs().max(1e-300));
    }

    #[test]
    fn jsa_is_skew_hermitian(a in -139.0f64..139.0, b in 141.0f64..900.0, negative in any::<bool>()) {
        let s = common::setup(35.0);
        let (big, small) = (thz(a), if negative { -thz(b) } else { thz(b) });
        let forward = s.spectral_factors(small, big).jsa.conj();
        let backward = -s.spectral_factors(big, small).jsa;
        let scale = forward.norm().max(backward.norm());
        prop_assert!((forward - backward).norm() <= 1e-12 * scale.max(1e-300));
    }

    #[test]
    fn squeeze_factors_are_hyperbolic(r in 0.0f64..4.0, phi in -PI..PI) {
        let state = MirState::SqueezedVacuum { zeta: Complex64::from_polar(r, phi) };
        let (mu, nu) = state.squeeze_factors();
        prop_assert!((mu * mu - nu.norm_sqr() - 1.0).abs() <= 1e-12 * mu * mu);
    }

    #[test]
    fn unit_conversion_round_trips(nu in -1e4f64..1e4) {
        let back = angular_to_thz(thz_to_angular(nu));
        prop_assert!((back - nu).abs() <= 2.0 * f64::EPSILON * nu.abs());
        prop_assert_eq!(AngularFrequency::from_thz(nu).rad_per_ps(), thz_to_angular(nu));
    }
}

#[test]
fn mismatch_vanishes_on_the_diagonal() {
    let c = zinc_telluride();
    for nu in [-700.0, -25.0, 0.0, 3.0, 139.0, 300.0] {
        assert_eq!(c.phase_mismatch(thz(nu), thz(nu)), 0.0);
    }
}

#[test]
fn mismatch_matches_independent_evaluation() {
    let c = zinc_telluride();
    let (big, small) = (25.0, 300.0);
    // Bracket in ordinary frequency, then ×2π for the angular prefactors.
    let bracket = small * (index_oracle(small) - index_oracle(small - big))
        - big * (index_oracle(big) - index_oracle(big - small));
    let want = 100.0 / (2.0 * 299.792458) * 2.0 * PI * bracket;
    let got = c.phase_mismatch(thz(big), thz(small));
    assert!((got - want).abs() < 1e-12 * want.abs());
    // Low-frequency limit: η ≈ η_c·Ω.
    let eta_c = c.walk_off(thz(300.0)).unwrap();
    let tiny = thz(0.01);
    assert!((c.phase_mismatch(tiny, thz(300.0)) / tiny - eta_c).abs() < 1e-3 * eta_c);
}

#[test]
fn phase_matching_structure() {
    let c = zinc_telluride();
    let d = c.coupling(thz(350.0));
    assert!(d < 0.0);
    assert_eq!(c.phase_matching(0.0, thz(300.0), d).norm(), 0.0);
    // Near Ω = 0 both sinc factors are positive, leaving only sign(ωΩ).
    let plus = c.phase_matching(thz(1.0), thz(300.0), d);
    let minus = c.phase_matching(thz(-1.0), thz(300.0), d);
    assert_eq!(plus.re, 0.0);
    let flip = |z: Complex64| (Complex64::i() * z).re;
    assert!(flip(plus).signum() == -flip(minus).signum());
}

#[test]
fn phase_matching_matches_composition() {
    let c = zinc_telluride();
    let d = c.coupling(thz(350.0));
    let (big, small) = (thz(25.0), thz(300.0));
    let n_big = c.refractive_index(big);
    let n_small = c.refractive_index(small);
    let want = -d * (big * small / (n_big * n_small)).sqrt() * 100.0 / (2.0 * 299.792458)
        * sinc(c.phase_mismatch(big, small));
    let got = c.phase_matching(big, small, d);
    assert!((got.im - want).abs() < 1e-14 * want.abs());
    let d_want = -index_oracle(350.0).powi(4) * 4e-12;
    assert!((d - d_want).abs() < 1e-14 * d_want.abs());
}

#[test]
fn walk_off_reference_value() {
    let eta_c = zinc_telluride().walk_off(thz(300.0)).unwrap();
    assert!((eta_c - 0.0861).abs() < 5e-5);
    let thin = Crystal::zinc_telluride(60.0)
        .unwrap()
        .walk_off(thz(300.0))
        .unwrap();
    assert!((thin / eta_c - 0.6).abs() < 1e-12);
}

fn standard_pump() -> Pump {
    Pump::new(
        Complex64::new(1.0, 0.0),
        AngularFrequency::from_thz(350.0),
        AngularFrequency::from_thz(35.0),
        0.0,
    )
    .unwrap()
}

#[test]
fn pump_normalization_by_quadrature() {
    let p = standard_pump();
    let (wp, sp) = (thz(350.0), thz(35.0));
    let spec = QuadratureSpec::with_tolerances(1e-13, 0.0);
    let (lo, hi) = (wp - 14.0 * sp, wp + 14.0 * sp);
    let (pos, _) = integrate_real(|w| p.envelope(w).norm_sqr(), lo, hi, &spec).unwrap();
    let (neg, _) = integrate_real(|w| p.envelope(w).norm_sqr(), -hi, -lo, &spec).unwrap();
    // The envelope is centered at +ω_p, so the negative-frequency image is nil.
    assert!(((pos - neg) - 1.0).abs() < 1e-9);
}

#[test]
fn pump_normalization_closed_form() {
    let sp = thz(35.0);
    let x = 10.0 / 2f64.sqrt();
    let want = ((PI / 2.0).sqrt() * sp * (erfc_reference(-x) - erfc_reference(x))).powf(-0.5);
    assert!((standard_pump().normalization() - want).abs() < 1e-14 * want);
}

#[test]
fn pump_envelope_peaks_at_center() {
    let p = standard_pump();
    let peak = p.envelope(thz(350.0)).norm();
    for nu in [340.0, 349.9, 350.1, 360.0] {
        assert!(p.envelope(thz(nu)).norm() < peak);
    }
}

/// Grid argmax of `f` over [lo, hi] in THz.
fn argmax(lo: f64, hi: f64, step: f64, f: impl Fn(f64) -> f64) -> f64 {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n)
        .map(|i| lo + i as f64 * step)
        .max_by(|a, b| f(*a).total_cmp(&f(*b)))
        .unwrap()
}

#[test]
fn pump_factor_peaks_shifted_from_difference_frequency() {
    // √(u/n_u)·exp[−(u−ω_p)²/(2σ_p)²] with u = ω − Ω. Without the index
    // factor the maximum solves u² − ω_p·u − σ_p² = 0.
    let s = common::setup(35.0);
    let flat = 0.5 * (350.0 + (350.0f64.powi(2) + 4.0 * 35.0f64.powi(2)).sqrt());
    let u = argmax(300.0, 420.0, 0.001, |u| {
        0.5 * (u / index_oracle(u)).ln() - (u - 350.0).powi(2) / (4.0 * 35.0f64.powi(2))
    });
    assert!((u - flat).abs() < 1.0);
    let want = 300.0 - u;
    let got = argmax(-120.0, 0.0, 0.001, |nu| {
        s.spectral_factors(thz(nu), thz(300.0)).pump.norm()
    });
    assert!(
        (got - want).abs() < 0.01,
        "pump factor peak {got} THz, expected {want}"
    );
    assert!((got + 50.0).abs() > 2.5);
}

#[test]
fn phase_matching_peaks_near_zero_frequency() {
    // √Ω·sinc(η_c·Ω) is maximal at y·cot y = 1/2, with y = η_c·Ω.
    let s = common::setup(35.0);
    let eta_c = s.walk_off().unwrap();
    let mut y: f64 = 1.1;
    for _ in 0..50 {
        let g = y / y.tan() - 0.5;
        let dg = 1.0 / y.tan() - y / y.sin().powi(2);
        y -= g / dg;
    }
    let want = angular_to_thz(y / eta_c);
    let pm = |nu: f64| {
        s.spectral_factors(thz(nu), thz(300.0))
            .phase_matching
            .norm()
    };
    let got = argmax(0.01, 20.0, 0.001, pm);
    assert!(
        (got - want).abs() < 0.15,
        "phase-matching peak {got} THz, expected {want}"
    );
    let mirrored = argmax(-20.0, -0.01, 0.001, pm);
    assert!((mirrored + want).abs() < 0.15);
}

#[test]
fn jsa_rejects_frequency_crossing() {
    let s = common::setup(35.0);
    assert!(matches!(
        s.joint_spectral_amplitude(thz(200.0), thz(300.0)),
        Err(Error::FrequencyDomain(_))
    ));
    assert!(s.joint_spectral_amplitude(thz(25.0), thz(300.0)).is_ok());
}

#[test]
fn sum_frequency_term_is_exponentially_suppressed() {
    let s = common::setup(35.0);
    let small = thz(300.0);
    for nu in [5.0, 25.0, 50.0, 100.0] {
        let big = thz(nu);
        let sum_term = s.pump.field(big - small, &s.crystal).norm();
        let difference_term = s.pump.field(small - big, &s.crystal).norm();
        assert!(
            sum_term < 1e-20 * difference_term,
            "Ω = {nu} THz: {sum_term} vs {difference_term}"
        );
    }
}

#[test]
fn zero_amplitude_pump_gives_zero_jsa() {
    let mut s = common::setup(35.0);
    s.pump.amplitude = Complex64::new(0.0, 0.0);
    for nu in [-60.0, -5.0, 10.0, 50.0] {
        assert_eq!(
            s.joint_spectral_amplitude(thz(nu), thz(300.0))
                .unwrap()
                .norm(),
            0.0
        );
    }
}

#[test]
fn spectral_functions_are_deterministic() {
    let a = common::setup(35.0);
    let b = common::setup(35.0);
    for nu in [-50.0, 2.0, 25.0] {
        let x = a.joint_spectral_amplitude(thz(nu), thz(300.3)).unwrap();
        let y = b.joint_spectral_amplitude(thz(nu), thz(300.3)).unwrap();
        assert_eq!(x.re.to_bits(), y.re.to_bits());
        assert_eq!(x.im.to_bits(), y.im.to_bits());
    }
}

fn band(center: f64, width: f64) -> SubBand {
    SubBand {
        center: AngularFrequency::from_thz(center),
        width: AngularFrequency::from_thz(width),
    }
}

#[test]
fn probe_bands_partition_the_filter() {
    let beta = Complex64::new(3.0, 4.0);
    let probe = ProbeFilter::new(
        AngularFrequency::from_thz(300.0),
        AngularFrequency::from_thz(1.0),
        vec![band(300.25, 0.5), band(299.65, 0.3), band(299.9, 0.2)],
        beta,
    )
    .unwrap();
    let total: f64 = (0..3).map(|i| probe.weight(i).powi(2)).sum();
    assert!((total - 1.0).abs() < 1e-14);
    let power: f64 = (0..3).map(|i| probe.band_amplitude(i).norm_sqr()).sum();
    assert!((power - beta.norm_sqr()).abs() < 1e-12);
    assert!(probe.require_balanced_pair().is_err());
}

#[test]
fn probe_rejects_gaps_and_overlaps() {
    let make = |bands| {
        ProbeFilter::new(
            AngularFrequency::from_thz(300.0),
            AngularFrequency::from_thz(1.0),
            bands,
            Complex64::new(1.0, 0.0),
        )
    };
    assert!(make(vec![band(299.75, 0.5), band(300.3, 0.4)]).is_err());
    assert!(make(vec![band(299.75, 0.6), band(300.25, 0.5)]).is_err());
    assert!(make(vec![band(299.75, 0.5), band(300.25, 0.5)]).is_ok());
}

#[test]
fn balanced_probe_splits_evenly() {
    let probe = ProbeFilter::balanced(
        AngularFrequency::from_thz(300.0),
        AngularFrequency::from_thz(1.0),
        Complex64::new(50.0, 0.0),
    )
    .unwrap();
    probe.require_balanced_pair().unwrap();
    assert!((probe.weight(0).powi(2) - 0.5).abs() < 1e-15);
    assert!((probe.weight(1).powi(2) - 0.5).abs() < 1e-15);
}

#[test]
fn mir_mode_is_normalized() {
    let pulse = MirPulse::gaussian(
        AngularFrequency::from_thz(25.0),
        AngularFrequency::from_thz(5.0),
        0.0,
    )
    .unwrap();
    let (lo, hi) = pulse.support();
    let spec = QuadratureSpec::with_tolerances(1e-13, 0.0);
    let (mass, _) = integrate_real(|w| pulse.mode(w).norm_sqr(), lo, hi, &spec).unwrap();
    assert!((mass - 1.0).abs() < 1e-9);
    assert!(!pulse.spills_to_negative_frequencies());
    let broad = MirPulse::gaussian(
        AngularFrequency::from_thz(10.0),
        AngularFrequency::from_thz(5.0),
        0.0,
    )
    .unwrap();
    assert!(broad.spills_to_negative_frequencies());
    let (lo, hi) = broad.support();
    let (mass, _) = integrate_real(|w| broad.mode(w).norm_sqr(), lo, hi, &spec).unwrap();
    assert!((mass - 1.0).abs() < 1e-9);
}

#[test]
fn cat_normalization_closed_form() {
    let alpha = Complex64::new(1.2, -0.4);
    let n = MirState::cat_normalization(alpha);
    // ⟨cat|cat⟩ = N²·(2 + 2⟨α|−α⟩) with ⟨α|−α⟩ = e^{−2|α|²}.
    let overlap = (-2.0 * alpha.norm_sqr()).exp();
    assert!((n * n * (2.0 + 2.0 * overlap) - 1.0).abs() < 1e-15);
}

#[test]
fn crystal_rejects_invalid_geometry() {
    assert!(Crystal::zinc_telluride(0.0).is_err());
    assert!(Crystal::zinc_telluride(-5.0).is_err());
    assert!(Pump::new(
        Complex64::new(1.0, 0.0),
        AngularFrequency::from_thz(-350.0),
        AngularFrequency::from_thz(35.0),
        0.0
    )
    .is_err());
}
