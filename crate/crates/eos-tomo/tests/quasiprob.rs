mod common;

use common::rel;
use eos_tomo::coefficients::{coefficient_numeric, CoefficientPair, Component};
use eos_tomo::decomposition::{
    decompose, output_mode, Decomposition, ModeModel, DEFAULT_GRID_POINTS,
};
use eos_tomo::model::MirState;
use eos_tomo::quasiprob::lattice::{BINARY_MAGIC, TRUNCATION_LIMIT};
use eos_tomo::quasiprob::{count_lattice, predicted_moments, qpd, GaussianQpd, LatticeExtent};
use eos_tomo::Error;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// ⟨a|D(γ)|b⟩ for coherent states |a⟩, |b⟩.
fn displaced_overlap(a: Complex64, b: Complex64, gamma: Complex64) -> Complex64 {
    let shifted = gamma + b;
    (-0.5 * a.norm_sqr() - 0.5 * shifted.norm_sqr()
        + a.conj() * shifted
        + 0.5 * (gamma * b.conj() - gamma.conj() * b))
        .exp()
}

/// Symmetrically ordered characteristic function tr[D(γ)ρ] of the MIR mode,
/// with the squeezer exp[(ζ̄a² − ζa†²)/2].
fn state_characteristic(state: &MirState, gamma: Complex64) -> Complex64 {
    match *state {
        MirState::Vacuum => c((-0.5 * gamma.norm_sqr()).exp(), 0.0),
        MirState::Coherent { alpha } => displaced_overlap(alpha, alpha, gamma),
        MirState::Cat { alpha } => {
            let n2 = MirState::cat_normalization(alpha).powi(2);
            let mut sum = c(0.0, 0.0);
            for a in [alpha, -alpha] {
                for b in [alpha, -alpha] {
                    sum += displaced_overlap(a, b, gamma);
                }
            }
            n2 * sum
        }
        MirState::SqueezedVacuum { zeta } => {
            let r = zeta.norm();
            let nu = Complex64::from_polar(r.sinh(), zeta.arg());
            let squeezed = r.cosh() * gamma + nu * gamma.conj();
            c((-0.5 * squeezed.norm_sqr()).exp(), 0.0)
        }
    }
}

/// χ_TM(β_SA, β_TH) with a_x = A_x·a_Ω̃ + (orthogonal vacuum): the identity on
/// the MIR mode plus the traced-out vacuum remainder.
fn two_mode_characteristic(
    state: &MirState,
    coeffs: CoefficientPair,
    b_sa: Complex64,
    b_th: Complex64,
) -> Complex64 {
    let gamma = coeffs.sampled.conj() * b_sa + coeffs.thermalized.conj() * b_th;
    let remainder = b_sa.norm_sqr() + b_th.norm_sqr() - gamma.norm_sqr();
    state_characteristic(state, gamma) * (-0.5 * remainder).exp()
}

/// ρ̃(z; s) = π⁻²∫ χ_TM[μ_T(μ_Sβ − ν_Sβ̄), −ν_Tβ̄]·e^{−2i Im(βz̄) + s|β|²/2} d²β
/// by the trapezoid rule, which converges spectrally for this integrand.
fn brute_force_density(
    state: &MirState,
    d: &Decomposition,
    coeffs: CoefficientPair,
    z: Complex64,
    s: f64,
) -> f64 {
    let half = 11.0 / (1.0 - s).sqrt();
    let n = 400;
    let h = 2.0 * half / n as f64;
    let mut sum = 0.0;
    for i in 0..=n {
        let u = -half + i as f64 * h;
        for j in 0..=n {
            let v = -half + j as f64 * h;
            let beta = c(u, v);
            let b_sa = d.mu_t * (d.mu_s * beta - d.nu_s * beta.conj());
            let b_th = -d.nu_t * beta.conj();
            let chi = two_mode_characteristic(state, coeffs, b_sa, b_th);
            let kernel = Complex64::from_polar(
                (0.5 * s * beta.norm_sqr()).exp(),
                -2.0 * (beta * z.conj()).im,
            );
            sum += (chi * kernel).re;
        }
    }
    sum * h * h / (PI * PI)
}

/// A decomposition with strong, generic squeezing parameters; the qpd only
/// consumes the scalar fields.
fn strongly_squeezed(base: &Decomposition) -> Decomposition {
    let mut d = base.clone();
    let (zs, phi, zt) = (0.45, 2.3, 0.6);
    d.zeta_s = Complex64::from_polar(zs, phi);
    d.mu_s = f64::cosh(zs);
    d.nu_s = Complex64::from_polar(f64::sinh(zs), phi);
    d.phi_perp = phi;
    d.zeta_t = zt;
    d.mu_t = f64::cosh(zt);
    d.nu_t = f64::sinh(zt);
    d
}

fn generic_coefficients() -> CoefficientPair {
    CoefficientPair::new(
        Complex64::from_polar(0.6, 0.4),
        Complex64::from_polar(0.3, -1.1),
    )
}

fn states() -> [MirState; 4] {
    [
        MirState::Vacuum,
        MirState::Coherent {
            alpha: c(0.9, -0.5),
        },
        MirState::Cat { alpha: c(0.8, 0.6) },
        MirState::SqueezedVacuum { zeta: c(0.5, 0.7) },
    ]
}

#[test]
fn closed_form_matches_brute_force_characteristic_transform() {
    let d = strongly_squeezed(&common::standard(50.0));
    let coeffs = generic_coefficients();
    for state in states() {
        for s in [0.0, -1.0, -3.0] {
            let closed = GaussianQpd::unrestricted(&state, &d, coeffs, s, s).unwrap();
            let sx = closed.covariance[0][0].sqrt();
            let sy = closed.covariance[1][1].sqrt();
            for (kx, ky) in [(0.0, 0.0), (0.7, -0.3), (-1.2, 0.9), (0.2, 1.6)] {
                let (x0, y0) = closed.centers.first().copied().unwrap_or((0.0, 0.0));
                let z = c(x0 + kx * sx, y0 + ky * sy);
                let want = brute_force_density(&state, &d, coeffs, z, s);
                let got = closed.density(z);
                assert!(
                    (got - want).abs() < 1e-8 * want.abs().max(1e-3),
                    "{} s = {s} z = {z}: {got} vs {want}",
                    state.name()
                );
            }
        }
    }
}

#[test]
fn closed_form_matches_brute_force_for_decomposed_setup() {
    let d = common::standard(50.0);
    let delay = 0.086;
    let pulse = &d.setup().pulse;
    let coeffs = CoefficientPair::new(
        coefficient_numeric(Component::Sampled, pulse, &d, delay).unwrap(),
        coefficient_numeric(Component::Thermalized, pulse, &d, delay).unwrap(),
    );
    for state in [
        MirState::Coherent { alpha: c(1.5, 0.5) },
        MirState::SqueezedVacuum { zeta: c(1.0, 0.0) },
    ] {
        let closed = GaussianQpd::unrestricted(&state, &d, coeffs, -1.0, -1.0).unwrap();
        for z in [c(0.0, 0.0), c(0.4, -0.2), c(-0.3, 0.5)] {
            let want = brute_force_density(&state, &d, coeffs, z, -1.0);
            assert!((closed.density(z) - want).abs() < 1e-8 * want.abs().max(1e-3));
        }
    }
}

/// ∫ρ̃ d²z by the trapezoid rule over ±12 standard deviations.
fn total_mass(q: &GaussianQpd) -> f64 {
    let (x0, x1, y0, y1) = q.bounding_box(12.0);
    let n = 600;
    let (hx, hy) = ((x1 - x0) / n as f64, (y1 - y0) / n as f64);
    let mut sum = 0.0;
    for i in 0..=n {
        for j in 0..=n {
            sum += q.density(c(x0 + i as f64 * hx, y0 + j as f64 * hy));
        }
    }
    sum * hx * hy
}

#[test]
fn distributions_have_unit_mass() {
    let d = strongly_squeezed(&common::standard(35.0));
    for state in states() {
        for s in [-1.0f64, -2.5] {
            let q = GaussianQpd::new(
                &state,
                &d,
                generic_coefficients(),
                s.min(d.s_tilde),
                d.s_tilde,
            )
            .unwrap();
            let mass = total_mass(&q);
            assert!((mass - 1.0).abs() < 1e-8, "{}: mass {mass}", state.name());
        }
    }
}

fn pure_dfg(sp: f64) -> Decomposition {
    let mode = output_mode(
        &common::setup(sp),
        ModeModel::Narrowband,
        DEFAULT_GRID_POINTS,
    )
    .unwrap()
    .without_sfg()
    .unwrap();
    decompose(&mode).unwrap()
}

#[test]
fn unsqueezed_vacuum_is_isotropic() {
    let d = pure_dfg(35.0);
    let coeffs = generic_coefficients();
    for s in [d.s_tilde, d.s_tilde - 3.0] {
        let q = GaussianQpd::new(&MirState::Vacuum, &d, coeffs, s, s).unwrap();
        let want = (1.0 - s) / 4.0;
        assert!((q.covariance[0][0] - want).abs() < 1e-8 * want);
        assert!((q.covariance[1][1] - want).abs() < 1e-8 * want);
        assert!(q.covariance[0][1].abs() < 1e-8 * want);
        assert_eq!(q.centers, vec![(0.0, 0.0)]);
    }
}

#[test]
fn degenerate_cat_is_vacuum_and_vacuum_is_zero_coherent() {
    let d = strongly_squeezed(&common::standard(35.0));
    let coeffs = generic_coefficients();
    let s = d.s_tilde;
    let vacuum = GaussianQpd::new(&MirState::Vacuum, &d, coeffs, s, s).unwrap();
    let cat = GaussianQpd::new(&MirState::Cat { alpha: c(0.0, 0.0) }, &d, coeffs, s, s).unwrap();
    let coherent =
        GaussianQpd::new(&MirState::Coherent { alpha: c(0.0, 0.0) }, &d, coeffs, s, s).unwrap();
    for z in [c(0.0, 0.0), c(3.0, -2.0), c(-10.0, 4.0)] {
        let v = vacuum.density(z);
        assert!((cat.density(z) - v).abs() < 1e-14 * v.max(1e-300));
        assert_eq!(coherent.density(z), v);
    }
}

#[test]
fn vacuum_and_zero_coherent_give_identical_lattices() {
    let d = common::standard(35.0);
    let coeffs = generic_coefficients();
    let extent = LatticeExtent::default();
    let a = count_lattice(&MirState::Vacuum, &d, coeffs, extent).unwrap();
    let b = count_lattice(
        &MirState::Coherent { alpha: c(0.0, 0.0) },
        &d,
        coeffs,
        extent,
    )
    .unwrap();
    assert_eq!(a.probabilities, b.probabilities);
    assert_eq!((a.x, a.y), (b.x, b.y));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rotation_covariance_without_thermalization(
        re in -2.0f64..2.0, im in -2.0f64..2.0, phi in -PI..PI, kind in 0usize..3,
        zx in -3.0f64..3.0, zy in -3.0f64..3.0,
    ) {
        let d = pure_dfg(35.0);
        let coeffs = CoefficientPair::new(Complex64::from_polar(0.7, 0.2), c(0.0, 0.0));
        let alpha = c(re, im);
        let state = match kind {
            0 => MirState::Coherent { alpha },
            1 => MirState::Cat { alpha },
            _ => MirState::SqueezedVacuum { zeta: alpha * 0.4 },
        };
        let s = -1.5;
        let turn = Complex64::from_polar(1.0, phi);
        let base = GaussianQpd::unrestricted(&state, &d, coeffs, s, s).unwrap();
        let rotated = GaussianQpd::unrestricted(&state.rotated(phi), &d, coeffs, s, s).unwrap();
        let z = c(zx, zy);
        let a = base.density(z);
        let b = rotated.density(z * turn);
        prop_assert!((a - b).abs() <= 1e-10 * a.max(b).max(1e-12));
    }

    #[test]
    fn covariance_is_positive_definite_below_s_tilde(
        extra in 0.0f64..50.0, zs in 0.0f64..1.0, zt in 0.0f64..1.0, a in 0.0f64..0.7,
    ) {
        let mut d = common::standard(35.0);
        d.mu_s = zs.cosh();
        d.nu_s = Complex64::from_polar(zs.sinh(), 0.3);
        d.mu_t = zt.cosh();
        d.nu_t = zt.sinh();
        let coeffs = CoefficientPair::new(c(a, 0.1), c(0.2, -0.1));
        for state in states() {
            let q = GaussianQpd::new(&state, &d, coeffs, d.s_tilde - extra, d.s_tilde).unwrap();
            let [[xx, xy], [_, yy]] = q.covariance;
            prop_assert!(xx > 0.0 && yy > 0.0 && xx * yy - xy * xy > 0.0);
        }
    }
}

#[test]
fn smoothing_above_s_tilde_is_rejected() {
    let d = common::standard(35.0);
    let s = d.s_tilde + 1.0;
    assert!(matches!(
        qpd(
            &MirState::Vacuum,
            &d,
            generic_coefficients(),
            c(0.0, 0.0),
            s,
            s
        ),
        Err(Error::NotPositiveDefinite { .. })
    ));
}

fn assert_lattice_matches_prediction(state: &MirState, d: &Decomposition) {
    let coeffs = common::gate_coefficients(d);
    let lattice = count_lattice(state, d, coeffs, LatticeExtent::default()).unwrap();
    let total: f64 = lattice.probabilities.iter().sum();
    assert!((total - 1.0).abs() < 1e-12);
    assert!(lattice.truncated_mass < TRUNCATION_LIMIT);
    assert!(lattice.probabilities.iter().all(|p| *p >= 0.0));
    let m = lattice.moments();
    let p = predicted_moments(state, d, coeffs).unwrap();
    let name = state.name();
    assert!(rel(m.var_x, p.x.count_variance) < 5e-3, "{name}: var_x");
    assert!(rel(m.var_y, p.y.count_variance) < 5e-3, "{name}: var_y");
    let scale_x = p.x.count_variance.sqrt();
    let scale_y = p.y.count_variance.sqrt();
    if p.x.count_mean.abs() > scale_x {
        assert!(rel(m.mean_x, p.x.count_mean) < 5e-3, "{name}: mean_x");
    } else {
        assert!(
            (m.mean_x - p.x.count_mean).abs() < 5e-3 * scale_x,
            "{name}: mean_x"
        );
    }
    if p.y.count_mean.abs() > scale_y {
        assert!(rel(m.mean_y, p.y.count_mean) < 5e-3, "{name}: mean_y");
    } else {
        assert!(
            (m.mean_y - p.y.count_mean).abs() < 5e-3 * scale_y,
            "{name}: mean_y"
        );
    }
}

#[test]
fn vacuum_lattice_matches_predicted_moments() {
    assert_lattice_matches_prediction(&MirState::Vacuum, &common::standard(35.0));
}

#[test]
fn coherent_lattice_matches_predicted_moments() {
    assert_lattice_matches_prediction(
        &MirState::Coherent { alpha: c(2.0, 0.0) },
        &common::standard(35.0),
    );
}

#[test]
fn squeezed_lattice_matches_predicted_moments() {
    let mut setup = common::setup(35.0);
    setup.probe.amplitude = c(10.0 * 2f64.sqrt(), 0.0);
    let d = common::decomposition(&setup);
    assert_lattice_matches_prediction(&MirState::SqueezedVacuum { zeta: c(1.5, 0.0) }, &d);
}

#[test]
fn lattice_is_proportional_to_the_quasiprobability() {
    let d = common::standard(35.0);
    let coeffs = common::gate_coefficients(&d);
    let state = MirState::Coherent { alpha: c(2.0, 0.0) };
    let lattice = count_lattice(&state, &d, coeffs, LatticeExtent::default()).unwrap();
    let q = GaussianQpd::new(&state, &d, coeffs, d.s_tilde, d.s_tilde).unwrap();
    let (cx, cy) = (lattice.x.count / 2, lattice.y.count / 2);
    for (ix, iy) in [(cx, cy), (cx + 7, cy - 3), (cx - 40, cy + 25)] {
        let z = lattice.z(lattice.x.representative(ix), lattice.y.representative(iy));
        let want = lattice.table_scale * lattice.prefactor * q.density(z);
        let got = lattice.probability(ix, iy);
        assert!((got - want).abs() < 1e-12 * want, "cell ({ix}, {iy})");
    }
}

#[test]
fn vacuum_lattice_is_centered_and_unskewed() {
    let d = common::standard(15.0);
    let lattice = count_lattice(
        &MirState::Vacuum,
        &d,
        common::gate_coefficients(&d),
        LatticeExtent::default(),
    )
    .unwrap();
    let m = lattice.moments();
    assert!(m.skew_x.abs() < 0.05 && m.skew_y.abs() < 0.05);
    assert!(m.mean_x.abs() < 1e-6 * m.var_x.sqrt());
    assert!(m.mean_y.abs() < 1e-6 * m.var_y.sqrt());
}

#[test]
fn cat_lattice_is_normalized_without_analytic_moments() {
    let d = common::standard(35.0);
    let coeffs = common::gate_coefficients(&d);
    let state = MirState::Cat { alpha: c(2.0, 0.0) };
    assert!(matches!(
        predicted_moments(&state, &d, coeffs),
        Err(Error::UnsupportedMoments(_))
    ));
    let lattice = count_lattice(&state, &d, coeffs, LatticeExtent::default()).unwrap();
    assert!(lattice.truncated_mass < TRUNCATION_LIMIT);
    assert!((lattice.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-12);
}

#[test]
fn vacuum_moments_follow_closed_form() {
    let d = common::standard(35.0);
    let coeffs = common::gate_coefficients(&d);
    let p = predicted_moments(&MirState::Vacuum, &d, coeffs).unwrap();
    assert_eq!(p.x.count_mean, 0.0);
    assert_eq!(p.y.count_mean, 0.0);
    assert!(p.x.count_variance > 0.0 && p.y.count_variance > 0.0);

    let dfg = pure_dfg(35.0);
    let p = predicted_moments(&MirState::Vacuum, &dfg, common::gate_coefficients(&dfg)).unwrap();
    let beta = dfg.setup().probe.band_amplitude(0).norm();
    let want = 2.0 * dfg.strength.sinh().powi(2) * beta * beta * (0.25 - dfg.s_tilde / 4.0);
    assert!(rel(p.x.count_variance, want) < 1e-12);
    assert!(rel(p.y.count_variance, want) < 1e-12);
}

#[test]
fn coherent_quadrature_variance_is_state_independent() {
    // Displacements shift the mean only: Var X̃ equals the vacuum value.
    let d = common::standard(50.0);
    let coeffs = common::gate_coefficients(&d);
    let vacuum = predicted_moments(&MirState::Vacuum, &d, coeffs).unwrap();
    let coherent =
        predicted_moments(&MirState::Coherent { alpha: c(1.0, 2.0) }, &d, coeffs).unwrap();
    assert!(rel(coherent.x.quadrature_variance, vacuum.x.quadrature_variance) < 1e-12);
    assert!(rel(coherent.y.quadrature_variance, vacuum.y.quadrature_variance) < 1e-12);
    assert!(coherent.x.count_mean != 0.0);
}

#[test]
fn small_extent_reports_truncation() {
    let d = common::standard(35.0);
    let extent = LatticeExtent::Explicit {
        dn_x: (-10, 10),
        dn_y: (-10, 10),
    };
    assert!(matches!(
        count_lattice(&MirState::Vacuum, &d, generic_coefficients(), extent),
        Err(Error::ExtentTooSmall { .. })
    ));
}

#[test]
fn oversized_extent_is_binned() {
    let d = common::standard(35.0);
    let extent = LatticeExtent::Explicit {
        dn_x: (-1500, 1500),
        dn_y: (-1500, 1500),
    };
    let lattice = count_lattice(&MirState::Vacuum, &d, generic_coefficients(), extent).unwrap();
    assert_eq!(lattice.x.bin, 2);
    assert!(lattice.cells() <= eos_tomo::quasiprob::lattice::MAX_CELLS);
    assert!(lattice.x.start <= -1500 && lattice.x.last() >= 1500);
    let fine = count_lattice(
        &MirState::Vacuum,
        &d,
        generic_coefficients(),
        LatticeExtent::default(),
    )
    .unwrap();
    assert!(rel(lattice.moments().var_x, fine.moments().var_x) < 1e-3);
}

#[test]
fn lattice_exports() {
    let d = common::standard(35.0);
    let extent = LatticeExtent::Explicit {
        dn_x: (-400, 400),
        dn_y: (-300, 300),
    };
    let lattice = count_lattice(&MirState::Vacuum, &d, generic_coefficients(), extent).unwrap();
    let mut csv = Vec::new();
    lattice.write_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("dnX,dnY,p"));
    assert_eq!(lines.count(), lattice.cells());
    let mut bin = Vec::new();
    lattice
        .write_binary(&mut bin, &serde_json::json!({"tool": "test"}))
        .unwrap();
    assert_eq!(&bin[..8], BINARY_MAGIC);
    let len = u32::from_le_bytes(bin[8..12].try_into().unwrap()) as usize;
    let header: serde_json::Value = serde_json::from_slice(&bin[12..12 + len]).unwrap();
    assert_eq!(
        header["dimensions"],
        serde_json::json!([lattice.x.count, lattice.y.count])
    );
    assert_eq!(header["provenance"]["tool"], "test");
    let data = &bin[12 + len..];
    assert_eq!(data.len(), 8 * lattice.cells());
    let first = f64::from_le_bytes(data[..8].try_into().unwrap());
    assert_eq!(first, lattice.probability(0, 0));
}
