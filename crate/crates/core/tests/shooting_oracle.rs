//! Shooting construction against the phase-plane time-map oracle, grid
//! refinement order, and the touch analysis across the built-in models.

mod common;

use common::{
    carcinogenesis_profiles, gray_scott_profiles, gray_scott, half_period, restrict_by_two,
};
use rdode_core::grid::Grid;
use rdode_core::profile1d::{
    reduced_h, shoot_orbits, shoot_stationary, touched_constant_states, ShootOpts,
};
use rdode_core::steady::touch_inequality;

/// The cubic reaction `h(V) = -V + V^3` has a center at `V = 1` with
/// `h'(1) = 2`; just above the half-period `π/√2` the domain admits exactly
/// one monotone profile, whose initial value the period integral predicts.
#[test]
fn time_map_oracle_predicts_the_shot_orbit() {
    let h = |v: f64| -v + v * v * v;
    let potential = |v: f64| -v * v / 2.0 + v.powi(4) / 4.0;
    // turning points pair up as s'^2 = 2 - s^2
    let partner = |s: f64| (2.0 - s * s).sqrt();
    let length = 2.4;
    assert!(length > core::f64::consts::PI / 2.0f64.sqrt());

    // oracle: bisect the period integral for the initial value with T(s) = L
    let (mut lo, mut hi) = (0.35, 0.995);
    assert!(half_period(h, potential, lo, partner(lo)) > length);
    assert!(half_period(h, potential, hi, partner(hi)) < length);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if half_period(h, potential, mid, partner(mid)) > length {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s_oracle = 0.5 * (lo + hi);

    let opts = ShootOpts::new((0.2, 0.99));
    let (shots, diag) = shoot_orbits(|v| Ok(h(v)), length, &opts).unwrap();
    assert!(diag.crossings >= 1, "diagnostics: {diag:?}");
    assert!(!shots.is_empty(), "expected a mode-1 orbit");
    let shot = &shots[0];
    assert_eq!(shot.oscillations, 0);
    assert!(
        (shot.v0 - s_oracle).abs() < 1e-5,
        "shot v0 = {} vs oracle {s_oracle}",
        shot.v0
    );
    // range straddles the center and ends near the partner turning point
    assert!(shot.v_min < 1.0 && 1.0 < shot.v_max);
    assert!((shot.v_max - partner(s_oracle)).abs() < 1e-4);
}

#[test]
fn gray_scott_time_map_cross_check() {
    // same oracle on the actual Gray-Scott reduced reaction
    let (model, branch) = gray_scott(0.04);
    let rh = reduced_h(&model, &branch);
    let h = |v: f64| rh.h(v).unwrap();
    // P(V) = -B V^2/2 - (B+k)^2 ln V + B V  (B = k = 0.04)
    let potential = |v: f64| -0.02 * v * v - 0.0064 * v.ln() + 0.04 * v;

    let opts = ShootOpts::new((0.03, 0.78));
    let (shots, _) = shoot_orbits(|v| rh.h(v), 15.0, &opts).unwrap();
    let shot = shots.first().expect("mode-1 orbit at L = 15");
    // partner turning point from the energy equation P(V) = P(v0)
    let e = potential(shot.v0);
    let (mut lo, mut hi) = (0.21, 0.79);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if potential(mid) < e {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let partner = 0.5 * (lo + hi);
    let t = half_period(h, potential, shot.v0, partner);
    assert!(
        (t - 15.0).abs() < 1e-3,
        "period integral through v0 = {} gives {t}, expected 15",
        shot.v0
    );
    assert!((shot.v_max - partner).abs() < 1e-6, "orbit max {} vs partner {partner}", shot.v_max);
}

#[test]
fn every_shot_profile_touches_a_positively_sloped_root() {
    let (model, branch, profiles) = gray_scott_profiles(0.04, 15.0, 200);
    let rh = reduced_h(&model, &branch);
    for p in &profiles {
        let touched = touched_constant_states(p, &rh).unwrap();
        assert!(
            touched.iter().any(|(_, hp)| *hp >= 0.0),
            "profile must touch a root with h' >= 0"
        );
    }
}

#[test]
fn refinement_changes_profiles_at_second_order() {
    let run = |n: usize| {
        let (_, _, profiles) = gray_scott_profiles(0.04, 15.0, n);
        profiles.into_iter().next().expect("mode-1 profile")
    };
    let (p1, p2, p4) = (run(100), run(200), run(400));
    let err = |coarse: &[f64], fine: &[f64]| -> f64 {
        restrict_by_two(fine)
            .iter()
            .zip(coarse)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max)
    };
    let e1 = err(&p1.v, &p2.v);
    let e2 = err(&p2.v, &p4.v);
    let order = (e1 / e2).log2();
    assert!(order >= 1.8, "observed order {order} (changes {e1}, {e2})");
    let e1u = err(&p1.u, &p2.u);
    let e2u = err(&p2.u, &p4.u);
    let order_u = (e1u / e2u).log2();
    assert!(order_u >= 1.8, "observed U order {order_u}");
}

#[test]
fn touch_value_equals_diffusion_scaled_h_prime() {
    let (model, branch, profiles) = gray_scott_profiles(0.04, 15.0, 200);
    let rh = reduced_h(&model, &branch);
    for p in &profiles {
        for (state, hp) in touched_constant_states(p, &rh).unwrap() {
            let touch = touch_inequality(&state.jac).unwrap();
            // det J / f_u = D h'(v̄)
            assert!(
                (touch - model.diffusion() * hp).abs() < 1e-10,
                "touch {touch} vs D h' {}",
                model.diffusion() * hp
            );
        }
    }
}

#[test]
fn carcinogenesis_positive_branch_profiles_exist() {
    let (model, branch, profiles) = carcinogenesis_profiles(2.0, 1.15, 200);
    assert!(!profiles.is_empty(), "expected oscillation about (u_-, w_-)");
    let rh = reduced_h(&model, &branch);
    for p in &profiles {
        assert!(p.residual_max < 1e-9);
        let touched = touched_constant_states(p, &rh).unwrap();
        assert!(touched.iter().any(|(st, _)| st.touch_value.unwrap_or(-1.0) > 0.0));
    }
}

#[test]
fn shot_profiles_respect_the_stationarity_invariants() {
    for n in [150, 300] {
        let (_, _, profiles) = gray_scott_profiles(0.04, 15.0, n);
        for p in &profiles {
            assert!(
                p.residual_max < 10.0 / (n as f64 * n as f64),
                "residual {} exceeds 10/N^2 at N = {n}",
                p.residual_max
            );
            assert!(
                p.g_integral.abs() < 1e-6 * p.grid.length(),
                "integral identity violated: {}",
                p.g_integral
            );
        }
    }
}

/// Mirror orbits (reflections through the domain midpoint) collapse to one
/// representative, and multi-mode profiles appear once the domain is long
/// enough.
#[test]
fn mode_two_profiles_appear_on_longer_domains() {
    let (_, _, profiles) = gray_scott_profiles(0.04, 21.0, 300);
    assert!(profiles.iter().any(|p| p.oscillations == 0), "mode 1 expected");
    assert!(profiles.iter().any(|p| p.oscillations == 1), "mode 2 expected at L = 21");
    // sorted by oscillation count
    for w in profiles.windows(2) {
        assert!(w[0].oscillations <= w[1].oscillations);
    }
}

#[test]
fn gray_scott_branch_interval_limits_the_scan() {
    // scanning outside the branch interval is not an error: those shots are
    // counted as failures and skipped
    let (model, branch) = gray_scott(0.04);
    let grid = Grid::new(100, 15.0).unwrap();
    let mut opts = ShootOpts::new((0.0201, 1.19));
    opts.scan_points = 64;
    let (profiles, diag) = shoot_stationary(&model, &branch, grid, &opts).unwrap();
    assert!(diag.ivp_failures > 0, "orbits above the saddle must blow up");
    assert!(!profiles.is_empty());
}
