use shellgap::foldy::foldy_gap_n0;
use shellgap::lattice::{sigma_y, BlochVector};
use shellgap::mae::*;
use shellgap::rayleigh::{roots_at, RayleighOptions, ZForm};
use shellgap::roots::bisect;
use shellgap::shell::{z0_soft_approx, z_shell_exact};
use shellgap::special::bessel_j;
use shellgap::{ArrayConfig, Error};

fn cfg(a: f64) -> ArrayConfig {
    ArrayConfig::latex_in_air(a, 0.08).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn opts(form: ZForm) -> MaeOptions {
    MaeOptions { z_form: form, ..MaeOptions::default() }
}

fn z0(k: f64, c: &ArrayConfig, form: ZForm) -> f64 {
    match form {
        ZForm::Exact => z_shell_exact(0, k, &c.shell, &c.fluid).unwrap(),
        ZForm::Soft => z0_soft_approx(k, &c.params(), c.shell.a).unwrap(),
    }
}

/// Oracle: the residual is `(kL)^2 J0(kL/2) (sigma_0 Z0 - 1)` with `sigma_0`
/// from the general lattice sum at `beta = 0`.
#[test]
fn residual_is_the_scaled_monopole_condition() {
    let c = ArrayConfig::default();
    let l = c.lattice.l;
    for form in [ZForm::Exact, ZForm::Soft] {
        for kl in [0.7, 1.6, 1.9, 2.6] {
            let k = kl / l;
            let sigma = sigma_y(0, k, BlochVector::new(0.0, 0.0), &c.lattice, 0.5 * l, 8).unwrap().value;
            assert!(sigma.im.abs() < 1e-12 * sigma.norm());
            let expect = kl * kl * bessel_j(0, 0.5 * kl).unwrap() * (sigma.re * z0(k, &c, form) - 1.0);
            let got = mae_matching_residual_with(kl, &c, &opts(form)).unwrap();
            assert!((got - expect).abs() <= 1e-9 * expect.abs().max(1.0), "{form:?} kL={kl}: {got} vs {expect}");
        }
    }
}

#[test]
fn monopole_rayleigh_root_is_the_mae_root() {
    for a in [0.0275, 0.0375] {
        let c = cfg(a);
        let l = c.lattice.l;
        for form in [ZForm::Exact, ZForm::Soft] {
            let o = opts(form);
            let edge = c.hz_to_k(mae_upper_edge_with(&c, &o).unwrap());
            let ro = RayleighOptions { n_trunc: 0, lattice_m: o.lattice_m, z_form: form, grid: 200, ..RayleighOptions::default() };
            let roots = roots_at(BlochVector::new(0.0, 0.0), &c, (0.97 * edge, 1.03 * edge), &ro).unwrap();
            assert_eq!(roots.len(), 1, "a={a} {form:?}: {roots:?}");
            assert!(rel(roots[0], edge) <= 1e-6, "a={a} {form:?}: {} vs {}", roots[0] * l, edge * l);
        }
    }
}

#[test]
fn residual_brackets_a_root_above_the_resonance() {
    let c = ArrayConfig::default();
    let lo = c.params().k0_hat * c.lattice.l;
    let r0 = mae_matching_residual(lo * 1.0001, &c, 8).unwrap();
    let r1 = mae_matching_residual(lo * 1.5, &c, 8).unwrap();
    assert!(r0.signum() != r1.signum());
}

#[test]
fn soft_root_tends_to_foldy_at_low_filling() {
    let c = cfg(0.01);
    assert!((c.filling_fraction() - 0.05).abs() < 2e-3);
    let e = mae_upper_edge_with(&c, &opts(ZForm::Soft)).unwrap();
    assert!(rel(e, foldy_gap_n0(&c).f_upper) <= 0.01);
}

#[test]
#[ignore = "MAE 1.78582 vs Foldy 1.71368 kL at F = 0.37: 4.2%, not within 1%"]
fn edge_near_foldy_at_moderate_filling() {
    let c = ArrayConfig::default();
    assert!(rel(mae_upper_edge_n0(&c, 8).unwrap(), foldy_gap_n0(&c).f_upper) <= 0.01);
}

#[test]
fn window_doubling_moves_the_edge_little() {
    let c = ArrayConfig::default();
    let e8 = mae_upper_edge_n0(&c, 8).unwrap();
    let e16 = mae_upper_edge_n0(&c, 16).unwrap();
    assert!(rel(e8, e16) <= 1e-3, "{}", rel(e8, e16));
}

#[test]
#[ignore = "at M = 8 the root moves 7.6e-4 relative between xi = L/2 and 0.45L (lattice-sum truncation)"]
fn root_independent_of_xi() {
    let c = ArrayConfig::default();
    let l = c.lattice.l;
    let k0 = c.hz_to_k(mae_upper_edge_n0(&c, 8).unwrap());
    let g = |k: f64| {
        let s = sigma_y(0, k, BlochVector::new(0.0, 0.0), &c.lattice, 0.45 * l, 8)?.value.re;
        Ok(s * z_shell_exact(0, k, &c.shell, &c.fluid)? - 1.0)
    };
    let k = bisect(&g, 0.99 * k0, 1.01 * k0, 1e-13).unwrap();
    assert!(rel(k, k0) <= 1e-6, "{}", rel(k, k0));
}

#[test]
fn edge_exceeds_foldy_at_high_filling() {
    for a in [0.03, 0.0325, 0.035, 0.0375, 0.039] {
        let c = cfg(a);
        assert!(c.filling_fraction() >= 0.4);
        assert!(mae_upper_edge_n0(&c, 8).unwrap() >= foldy_gap_n0(&c).f_upper, "a={a}");
    }
}

#[test]
fn gap_starts_at_the_loaded_resonance() {
    let c = ArrayConfig::default();
    let soft = mae_gap_n0(&c, &opts(ZForm::Soft)).unwrap();
    assert!(rel(soft.f_lower, c.k_to_hz(c.params().k0_hat)) < 1e-14);
    let exact = mae_gap_n0(&c, &MaeOptions::default()).unwrap();
    let pole = shellgap::shell::loaded_resonance(0, &c.shell, &c.fluid).unwrap();
    assert!(rel(exact.f_lower, c.k_to_hz(pole)) < 1e-14);
    // The exact denominator vanishes at K0_hat only to leading order.
    assert!(rel(exact.f_lower, soft.f_lower) < 0.05);
}

#[test]
fn gap_stays_ordered_at_low_filling() {
    for a in [0.01, 0.015, 0.0375] {
        for form in [ZForm::Exact, ZForm::Soft] {
            let g = mae_gap_n0(&cfg(a), &opts(form)).unwrap();
            assert!(g.f_upper > g.f_lower, "a={a} {form:?}: {g:?}");
        }
    }
}

#[test]
fn no_root_below_bragg_reported() {
    // Thick, stiff shells: the breathing resonance lies beyond k_o L = pi.
    let c = cfg(0.005);
    assert!(matches!(mae_upper_edge_n0(&c, 8), Err(Error::NoRootFound(_))));
}

#[test]
fn rejects_nonpositive_wavenumber() {
    assert!(mae_matching_residual(0.0, &ArrayConfig::default(), 8).is_err());
}
