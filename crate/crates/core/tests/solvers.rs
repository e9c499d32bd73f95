mod common;

use common::{grid, random_field};
use ndgs_core::acceptance::standard_grid;
use ndgs_core::functionals::{energy, l2_gradient, nonlinear_mass};
use ndgs_core::maxmin::{inner_maximize, outer_minimize, reduced_energy, InnerOptions, OuterInit, OuterOptions};
use ndgs_core::nls::{build_h, solve_up};
use ndgs_core::{Sign, SpectralContext, SpinorField};

fn feasible_w(ctx: &SpectralContext, seed: u64) -> SpinorField {
    let r: SpinorField = random_field(ctx, seed);
    ctx.project(&r, Sign::Plus).normalized()
}

#[test]
fn inner_maximizer_is_feasible_and_bounded() {
    let ctx = SpectralContext::new(grid(16, 6.0, 10.0));
    let g = *ctx.grid();
    let opts = InnerOptions { tol: 1e-10, max_iters: 2000 };
    for seed in 0..4 {
        let w = feasible_w(&ctx, seed);
        let res = inner_maximize(&ctx, &w, None, opts).unwrap();
        let u = &res.u_star;
        assert!((u.norm() - 1.0).abs() <= 1e-10);

        let plus = ctx.project(u, Sign::Plus);
        let mut along = w.clone();
        along.scale_complex(w.inner(&plus));
        assert!(plus.sub(&along).norm() <= 1e-8);

        let minus = ctx.project(u, Sign::Minus);
        assert!(ctx.c_norm_sq(&minus) <= g.tau_zeta() * nonlinear_mass(&w, g.p) + 1e-8);

        let e = reduced_energy(&ctx, &w, 1e-10).unwrap();
        assert!(energy(&ctx, &w).total <= e + 1e-10 * e.abs());
        assert!(e <= ctx.c_norm_sq(&w) + 1e-8);
    }
}

#[test]
fn reduced_energy_without_nonlinearity_is_c_norm() {
    let ctx = SpectralContext::new(grid(16, 6.0, 10.0).with_tau(0.0).unwrap());
    let w = feasible_w(&ctx, 2);
    let e = reduced_energy(&ctx, &w, 1e-10).unwrap();
    assert!((e - ctx.c_norm_sq(&w)).abs() <= 1e-10 * e);
}

#[test]
fn ground_state_at_c_20() {
    let g = standard_grid(32, 20.0, 1.0).unwrap();
    let ctx = SpectralContext::new(g);
    let profile = solve_up(g.p, 1e-12).unwrap();
    let model = build_h(&profile, &ctx).unwrap();
    let rep = outer_minimize(&ctx, OuterInit::FwEmbedded(model.h.clone()), OuterOptions::default()).unwrap();
    let mc2 = g.rest_energy();
    let u = &rep.ground_state;

    assert!((u.norm() - 1.0).abs() <= 1e-10);
    assert!(rep.omega > 0.0 && rep.omega < mc2);
    assert!(rep.energy > 0.0 && rep.energy < mc2);
    assert!(rep.el_residual <= 1e-6 * mc2);
    assert!(rep.pohozaev.abs() <= 1e-4 * mc2);
    assert!(ctx.project(u, Sign::Plus).norm() > ctx.project(u, Sign::Minus).norm());

    let mut station = l2_gradient(&ctx, u);
    station.axpy(-2.0 * rep.omega, u);
    assert!(station.norm() <= 2.0 * rep.el_residual + 1e-9 * mc2);

    let energies: Vec<f64> = rep.history.iter().map(|r| r.energy).collect();
    assert!(energies.windows(2).all(|w| w[1] <= w[0] + 1e-12 * (1.0 + w[0].abs())));

    // e_c − mc² ∈ [−C, e_∞(1) + C/√c] with C = 1
    let c = g.c;
    assert!(rep.energy_shifted >= -1.0);
    assert!(rep.energy_shifted <= model.e_inf + 1.0 / c.sqrt());
}

#[test]
fn gaussian_start_reaches_the_same_state() {
    let g = standard_grid(24, 12.0, 1.0).unwrap();
    let ctx = SpectralContext::new(g);
    let profile = solve_up(g.p, 1e-12).unwrap();
    let model = build_h(&profile, &ctx).unwrap();
    let a = outer_minimize(&ctx, OuterInit::FwEmbedded(model.h), OuterOptions::default()).unwrap();
    let b = outer_minimize(&ctx, OuterInit::FwGaussian { width: 3.0 }, OuterOptions::default()).unwrap();
    assert!((a.omega - b.omega).abs() <= 1e-7 * g.rest_energy());
    let mut ub = b.ground_state.clone();
    ub.align_phase(&a.ground_state);
    assert!(ctx.sobolev_norm(&ub.sub(&a.ground_state), 0.5) <= 1e-4);
}
