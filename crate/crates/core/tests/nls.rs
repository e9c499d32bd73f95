mod common;

use common::rel;
use ndgs_core::acceptance::random_smooth;
use ndgs_core::maxmin::gaussian_pair;
use ndgs_core::nls::{
    build_h, default_half_width, limit_energy, nls_ground_flow, nu_formula, orbit_distance, solve_up, su2_act, up_mass_from_nu,
    FlowOptions, LimitModel, SU2Element,
};
use ndgs_core::{Complex64 as C, GridSpec, PairField, RadialProfile, SpectralContext};
use proptest::prelude::*;
use rand::Rng;
use std::sync::OnceLock;

fn profile(p: f64) -> &'static RadialProfile {
    static P25: OnceLock<RadialProfile> = OnceLock::new();
    static P23: OnceLock<RadialProfile> = OnceLock::new();
    static P28: OnceLock<RadialProfile> = OnceLock::new();
    let cell = match p {
        2.3 => &P23,
        2.8 => &P28,
        _ => &P25,
    };
    cell.get_or_init(|| solve_up(p, 1e-12).unwrap())
}

fn limit_grid(p: f64, n: usize) -> GridSpec {
    let nu = nu_formula(p, 1.0, profile(p).mass_l2).unwrap();
    GridSpec::new(n, default_half_width(nu, 1.0), 1.0, 1.0, p, 1.0).unwrap()
}

fn model_on(n: usize) -> (SpectralContext, LimitModel) {
    let ctx = SpectralContext::new(limit_grid(2.5, n));
    let model = build_h(profile(2.5), &ctx).unwrap();
    (ctx, model)
}

/// U″ + 2U′/r − U + U^{p−1}, with U″ from a five-point difference of the stored slopes.
fn ode_residual(prof: &RadialProfile) -> f64 {
    let (u, du, dr) = (prof.samples(), prof.slopes(), prof.dr);
    let r: Vec<f64> = prof.radii().collect();
    (2..u.len() - 2)
        .map(|i| {
            let d2 = (du[i - 2] - 8.0 * du[i - 1] + 8.0 * du[i + 1] - du[i + 2]) / (12.0 * dr);
            (d2 + 2.0 * du[i] / r[i] - u[i] + u[i].abs().powf(prof.p - 2.0) * u[i]).abs()
        })
        .fold(0.0, f64::max)
}

#[test]
fn radial_profile_satisfies_the_ode() {
    for p in [2.3, 2.5, 2.8] {
        let prof = profile(p);
        assert!(prof.u0() > 1.0);
        assert!(ode_residual(prof) <= 1e-8, "p = {p}: {}", ode_residual(prof));
        let (u, du, dr) = (prof.samples(), prof.slopes(), prof.dr);
        let worst = (1..u.len() - 1)
            .map(|i| ((u[i + 1] - u[i - 1]) / (2.0 * dr) - du[i]).abs())
            .fold(0.0, f64::max);
        assert!(worst <= 1e-5, "p = {p}: slope mismatch {worst}");
        assert!(u.iter().all(|&v| v > 0.0));
    }
}

#[test]
fn profile_csv_has_header_and_all_nodes() {
    let prof = profile(2.5);
    let mut buf = Vec::new();
    prof.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,U"));
    let first: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(first, vec![0.0, prof.u0()]);
    assert_eq!(text.lines().count(), prof.samples().len() + 1);
}

#[test]
fn nu_matches_radial_mass() {
    let prof = profile(2.5);
    let nu = nu_formula(2.5, 1.0, prof.mass_l2).unwrap();
    let direct = (2.0 / prof.mass_l2.powf(4.0 / 3.0)).powf(0.6);
    assert!(rel(nu, direct) < 1e-14);
    assert!(rel(up_mass_from_nu(2.5, 1.0, nu).unwrap(), prof.mass_l2) < 1e-12);
}

#[test]
fn h_is_normalized_and_refines() {
    let defect = |n| (model_on(n).1.h.norm() - 1.0).abs();
    let (d16, d32, d48) = (defect(16), defect(32), defect(48));
    assert!(d48 <= 1e-3);
    assert!(d32 <= 0.5 * d16 || d32 < 1e-9, "{d16} → {d32}");
}

#[test]
fn h_at_origin() {
    let (_, model) = model_on(32);
    let g = *model.grid();
    let c = g.n / 2;
    assert_eq!(g.coord(c), 0.0);
    let h0 = model.h.at(g.index(c, c, c))[0];
    let expected = model.nu.powf(1.0 / (g.p - 2.0)) * profile(2.5).u0();
    assert!(rel(h0.re, expected) < 1e-13);
    assert_eq!(h0.im, 0.0);
    assert!(model.e_inf < 0.0);
    assert_eq!(model.e_inf_at(0.5), 0.25 * model.e_inf);
}

#[test]
fn flow_agrees_with_shooting() {
    for (p, n) in [(2.3, 40), (2.5, 40), (2.8, 40)] {
        let ctx = SpectralContext::new(limit_grid(p, n));
        let init = gaussian_pair(&ctx, 2.0 * ctx.grid().half_width / 12.0).normalized();
        let flow = nls_ground_flow(&ctx, &init, FlowOptions::default()).unwrap();
        assert!(flow.history.windows(2).all(|w| w[1] <= w[0] + 1e-13 * w[0].abs()));
        assert!(flow.energy < 0.0);
        let mass = up_mass_from_nu(p, 1.0, flow.nu).unwrap();
        assert!(rel(mass, profile(p).mass_l2) < 0.01, "p = {p}: {mass} vs {}", profile(p).mass_l2);
        if p == 2.5 {
            let model = build_h(profile(p), &ctx).unwrap();
            let fit = orbit_distance(&ctx, &flow.state, &model).unwrap();
            assert!(fit.dist <= 1e-3, "{fit:?}");
        }
    }
}

#[test]
fn su2_examples() {
    let (_, model) = model_on(16);
    let f = model.h.clone();
    assert_eq!(su2_act(&SU2Element::identity(), &f), f);
    let swap = SU2Element::new(C::new(0.0, 0.0), C::new(1.0, 0.0)).unwrap();
    let mut pair = PairField::zeros(*f.grid());
    pair.component_mut(0).copy_from_slice(f.component(0));
    pair.component_mut(1).iter_mut().for_each(|v| *v = C::new(0.0, 2.0));
    let out = su2_act(&swap, &pair);
    assert!(out.component(0).iter().all(|v| *v == C::new(0.0, -2.0)));
    assert_eq!(out.component(1), pair.component(0));
}

fn random_su2(r: &mut impl Rng) -> SU2Element {
    loop {
        let a = C::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
        let b = C::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
        if let Some(g) = SU2Element::normalizing(a, b) {
            return g;
        }
    }
}

#[test]
fn orbit_distance_of_orbit_members() {
    let (ctx, model) = model_on(32);
    let g = *ctx.grid();
    let id = orbit_distance(&ctx, &model.h, &model).unwrap();
    assert!(id.dist <= 1e-10);
    assert!((id.g_best.alpha() - 1.0).norm() < 1e-12 && id.g_best.beta().norm() < 1e-12);
    assert!(id.shift.iter().all(|s| s.abs() < 1e-12), "{:?}", id.shift);

    let mut r = common::rng(21);
    for _ in 0..3 {
        let gamma = random_su2(&mut r);
        let x0 = [3.0 * g.spacing(), -2.0 * g.spacing(), 5.0 * g.spacing()];
        let member = su2_act(&gamma, &ctx.translate(&model.h, x0));
        let fit = orbit_distance(&ctx, &member, &model).unwrap();
        assert!(fit.dist <= 1e-8, "{fit:?}");
        assert!(!fit.degenerate);
        for k in 0..3 {
            assert!((fit.shift[k] + x0[k]).abs() < 1e-9);
        }
    }
}

#[test]
fn orbit_distance_of_perturbed_member() {
    let (ctx, model) = model_on(32);
    let mut r = common::rng(4);
    for _ in 0..4 {
        let gamma = random_su2(&mut r);
        let noise: PairField = random_smooth(&ctx, &mut r, 0.8);
        let mut f = su2_act(&gamma, &model.h);
        f.axpy(0.01 / ctx.sobolev_norm(&noise, 1.0), &noise);
        let d = orbit_distance(&ctx, &f, &model).unwrap().dist;
        assert!((0.005..=0.03).contains(&d), "{d}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn su2_preserves_h1_norm_and_limit_energy(seed in any::<u64>()) {
        let ctx = SpectralContext::new(limit_grid(2.5, 16));
        let mut r = common::rng(seed);
        let gamma = random_su2(&mut r);
        let f: PairField = random_smooth(&ctx, &mut r, 0.5);
        let gf = su2_act(&gamma, &f);
        prop_assert!(rel(ctx.sobolev_norm(&gf, 1.0), ctx.sobolev_norm(&f, 1.0)) <= 1e-12);
        let (e0, e1) = (limit_energy(&ctx, &f, 1.0), limit_energy(&ctx, &gf, 1.0));
        prop_assert!((e1 - e0).abs() <= 1e-12 * e0.abs());
    }

    #[test]
    fn orbit_distance_is_orbit_invariant(seed in any::<u64>(), sx in -4i32..4, sy in -4i32..4, sz in -4i32..4) {
        static MODEL: OnceLock<(SpectralContext, LimitModel)> = OnceLock::new();
        let (ctx, model) = MODEL.get_or_init(|| model_on(24));
        let mut r = common::rng(seed);
        let noise: PairField = random_smooth(ctx, &mut r, 0.8);
        let mut f = su2_act(&random_su2(&mut r), &model.h);
        f.axpy(0.02 / ctx.sobolev_norm(&noise, 1.0), &noise);
        let h = ctx.grid().spacing();
        let moved = su2_act(&random_su2(&mut r), &ctx.translate(&f, [sx as f64 * h, sy as f64 * h, sz as f64 * h]));
        let (d0, d1) = (orbit_distance(ctx, &f, model).unwrap().dist, orbit_distance(ctx, &moved, model).unwrap().dist);
        prop_assert!((d0 - d1).abs() <= 1e-8, "{} vs {}", d0, d1);
    }
}
