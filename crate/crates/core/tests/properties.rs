use std::f64::consts::PI;

use cqtraj_core::action::{action_of_orbit, closed_polyline_integral};
use cqtraj_core::closed_form::{closed_form_position, invariant_value};
use cqtraj_core::observables::{expectation, expectation_report, Observable, QuadratureConfig};
use cqtraj_core::{
    detect_period, integrate, IntegratorConfig, ModelSpec, Termination, Units, Wavefunction, C64,
};

fn wf(model: ModelSpec) -> Wavefunction {
    Wavefunction::new(model, Units::default()).unwrap()
}

fn cfg(rtol: f64) -> IntegratorConfig {
    IntegratorConfig::default().with_tolerances(rtol, rtol * 1e-2)
}

#[test]
fn second_excited_nests_and_subnests() {
    let w = wf(ModelSpec::oscillator(2));
    for (x0, winding, period) in [
        (1.8, 0, 0.8 * PI),
        (1.9, 0, 0.8 * PI),
        (2.0, 2, 2.0 * PI),
        (2.1, 2, 2.0 * PI),
    ] {
        let orbit = detect_period(&w, C64::new(x0, 0.0), &cfg(1e-11), 100.0).unwrap();
        assert!(
            (orbit.period - period).abs() < 1e-7,
            "X(0) = {x0}: T = {}",
            orbit.period
        );
        let a = action_of_orbit(&w, &orbit.trajectory, 1e-8).unwrap();
        assert_eq!(a.winding, winding, "X(0) = {x0}");
        assert_eq!(a.enclosed_zero_count as i64, winding);
        assert_eq!(a.is_larger_nest, winding == 2);
        assert!((a.action_over_h - winding as f64).abs() < 1e-6);

        let c0 = invariant_value(&w, C64::new(x0, 0.0)).unwrap().value;
        for p in &orbit.trajectory.points {
            let c = invariant_value(&w, p.x).unwrap().value;
            assert!((c - c0).abs() < 1e-8 * c0);
        }
    }
}

#[test]
fn oscillator_orbits_match_closed_forms() {
    for (n, x0) in [
        (0, C64::new(1.5, -0.4)),
        (1, C64::new(1.3, 0.2)),
        (1, C64::new(0.6, 0.1)),
    ] {
        let w = wf(ModelSpec::oscillator(n));
        let tr = integrate(&w, x0, (0.0, 7.0), &cfg(1e-11)).unwrap();
        assert_eq!(tr.termination, Termination::TimeReached);
        for p in &tr.points {
            let exact = closed_form_position(&w, x0, p.t).unwrap();
            assert!(
                (p.x - exact).norm() < 1e-8,
                "n = {n}, t = {}: {} vs {exact}",
                p.t,
                p.x
            );
        }
    }
}

#[test]
fn time_reversal_returns_to_start() {
    let w = wf(ModelSpec::oscillator(2));
    let x0 = C64::new(2.05, 0.1);
    let fwd = integrate(&w, x0, (0.0, 3.0), &cfg(1e-12)).unwrap();
    let back = integrate(&w, fwd.last().x, (3.0, 0.0), &cfg(1e-12)).unwrap();
    assert_eq!(back.termination, Termination::TimeReached);
    assert!((back.last().x - x0).norm() < 1e-8);
}

#[test]
fn error_shrinks_with_tolerance() {
    let w = wf(ModelSpec::oscillator(1));
    let x0 = C64::new(1.45, 0.0);
    let exact = closed_form_position(&w, x0, 5.0).unwrap();
    let errs: Vec<f64> = [1e-5, 1e-7, 1e-9, 1e-11]
        .iter()
        .map(|&r| (integrate(&w, x0, (0.0, 5.0), &cfg(r)).unwrap().last().x - exact).norm())
        .collect();
    for pair in errs.windows(2) {
        assert!(pair[1] < pair[0], "{errs:?}");
    }
    assert!(errs[3] < 1e-8, "{errs:?}");
}

#[test]
fn action_is_independent_of_sampling() {
    let w = wf(ModelSpec::oscillator(1));
    let coarse = detect_period(&w, C64::new(1.55, 0.0), &cfg(1e-8), 100.0).unwrap();
    let fine = detect_period(&w, C64::new(1.55, 0.0), &cfg(1e-12), 100.0).unwrap();
    let a = action_of_orbit(&w, &coarse.trajectory, 1e-9).unwrap();
    let b = action_of_orbit(&w, &fine.trajectory, 1e-9).unwrap();
    assert!((a.action - b.action).abs() < 1e-7, "{a:?} vs {b:?}");
    assert_eq!(a.winding, b.winding);
}

#[test]
fn gaussian_factor_adds_no_action() {
    // ∮ -α²x dx vanishes on any closed contour; check it on integrated orbits.
    for (n, x0) in [(0, 2.0), (1, 1.55), (1, 0.5), (2, 2.1)] {
        let w = wf(ModelSpec::oscillator(n));
        let orbit = detect_period(&w, C64::new(x0, 0.0), &cfg(1e-11), 100.0).unwrap();
        let mut xs: Vec<C64> = orbit.trajectory.points.iter().map(|p| p.x).collect();
        xs.pop();
        let fs: Vec<C64> = xs.iter().map(|x| -x).collect();
        assert!(closed_polyline_integral(&xs, &fs).norm() < 1e-9);
    }
}

#[test]
fn nested_orbits_have_monotone_action() {
    let w = wf(ModelSpec::oscillator(1));
    let js: Vec<f64> = [0.5, 1.2, 1.35, 1.45, 1.55, 2.0]
        .iter()
        .map(|&x0| {
            let o = detect_period(&w, C64::new(x0, 0.0), &cfg(1e-11), 100.0).unwrap();
            action_of_orbit(&w, &o.trajectory, 1e-8).unwrap().action
        })
        .collect();
    for pair in js.windows(2) {
        assert!(pair[1] >= pair[0] - 1e-7, "{js:?}");
    }
}

#[test]
fn packet_norm_and_energy_conserved() {
    let w = wf(ModelSpec::GaussianPacket {
        sigma: 1.0,
        k_bar: 1.0,
    });
    let q = QuadratureConfig::default();
    let r0 = expectation_report(&w, 0.0, &q).unwrap();
    assert!((r0.norm - 1.0).abs() < 1e-8);
    assert!((r0.mean_e - 0.75).abs() < 1e-8);
    for t in [1.0, 5.0] {
        let r = expectation_report(&w, t, &q).unwrap();
        assert!((r.norm - r0.norm).abs() < 1e-8, "t = {t}: {r:?}");
        assert!((r.mean_e - r0.mean_e).abs() < 1e-8, "t = {t}: {r:?}");
        assert!(r.imag_residual < 1e-8);
    }
    for t in [0.5, 1.0, 2.0] {
        let x = expectation(&w, t, Observable::X, &q).unwrap().value;
        assert!((x - r0.mean_x - t).abs() < 1e-7, "t = {t}: {x}");
    }
}

#[test]
fn quadrature_settings_do_not_move_results() {
    let w = wf(ModelSpec::GaussianPacket {
        sigma: 0.8,
        k_bar: 1.2,
    });
    let base = QuadratureConfig::default();
    for which in [
        Observable::Norm,
        Observable::X,
        Observable::P,
        Observable::E,
    ] {
        let a = expectation(&w, 1.0, which, &base).unwrap();
        let wider = QuadratureConfig {
            truncation_l: Some(2.0 * a.truncation_l),
            ..base
        };
        let tighter = QuadratureConfig {
            rel_tol: 0.5 * base.rel_tol,
            ..base
        };
        let b = expectation(&w, 1.0, which, &wider).unwrap();
        let c = expectation(&w, 1.0, which, &tighter).unwrap();
        let bound = 10.0 * a.error_estimate.max(1e-15);
        assert!(
            (a.value - b.value).abs() <= bound.max(1e-13),
            "{which:?}: {a:?} vs {b:?}"
        );
        assert!(
            (a.value - c.value).abs() <= bound.max(1e-13),
            "{which:?}: {a:?} vs {c:?}"
        );
    }
}
