use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::decay::{fit_decay, Component};
use super::HarnessError;
use crate::error::ParamError;
use crate::field::SpinorField;
use crate::grid::GridSpec;
use crate::maxmin::{outer_minimize, OuterInit, OuterOptions, SolveReport};
use crate::nls::{build_h, default_half_width, nu_formula, orbit_distance, solve_up, LimitModel};
use crate::spectral::{project_infinity, Sign, SpectralContext};

/// One row of the limit table. Column order is the field order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub c: f64,
    pub omega_c: f64,
    /// mc² − ω_c
    pub gap: f64,
    pub e_c: f64,
    /// ‖g_c‖_{H^s} for s = 0, 1, 1.5, 2, with g_c the lower pair
    pub g_norm_s0: f64,
    pub g_norm_s1: f64,
    pub g_norm_s1_5: f64,
    pub g_norm_s2: f64,
    /// ‖P_c⁻u_c‖_{L²}
    pub neg_norm_l2: f64,
    /// ‖∇P_c⁻u_c‖_{L²}
    pub neg_grad_l2: f64,
    pub orbit_dist: f64,
    pub pohozaev: f64,
    pub el_residual: f64,
    /// Fitted decay rate of the upper pair, NaN when the tail is too short.
    pub decay_delta_plus: f64,
    /// max|g_c| / max|f_c|
    pub decay_ratio_minus: f64,
    pub h2_norm: f64,
    /// seconds
    pub wall_time: f64,
}

/// How each sweep point is started.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StartMode {
    /// Sequential; each c starts from the previous ground state projected onto E_c⁺.
    Warm,
    /// Concurrent; every c starts from the FW embedding of (h, 0).
    Cold,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub p: f64,
    pub m: f64,
    pub tau: f64,
    pub n: usize,
    /// Defaults to 12/√(2mν).
    pub half_width: Option<f64>,
    pub c_list: Vec<f64>,
    pub solver: OuterOptions,
    pub start: StartMode,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            p: 2.5,
            m: 1.0,
            tau: 1.0,
            n: 48,
            half_width: None,
            c_list: vec![8.0, 16.0, 32.0, 64.0],
            solver: OuterOptions::default(),
            start: StartMode::Warm,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub model: LimitModel,
    pub records: Vec<SweepRecord>,
    /// Ground states, parallel to `records`.
    pub states: Vec<SpinorField>,
    /// (c, error message) of points that failed.
    pub failures: Vec<(f64, String)>,
}

impl SweepResult {
    /// (c, value) pairs for one column.
    pub fn column(&self, f: impl Fn(&SweepRecord) -> f64) -> Vec<(f64, f64)> {
        self.records.iter().map(|r| (r.c, f(r))).collect()
    }
}

/// Limit observables of a converged state.
pub fn observe(ctx: &SpectralContext, report: &SolveReport, model: &LimitModel, wall_time: f64) -> Result<SweepRecord, HarnessError> {
    let u = &report.ground_state;
    let g = project_infinity(u, Sign::Minus);
    let neg = ctx.project(u, Sign::Minus);
    let f = u.upper().with_grid(*model.grid())?;
    let orbit_ctx = SpectralContext::new(*model.grid());
    let orbit = orbit_distance(&orbit_ctx, &f, model)?;
    let decay_delta_plus = match fit_decay(u, Component::Upper) {
        Ok(fit) => fit.delta,
        Err(HarnessError::TailTooShort { .. }) => f64::NAN,
        Err(e) => return Err(e),
    };
    let pair_max = |k: usize| {
        let (a, b) = (u.component(k), u.component(k + 1));
        a.iter().zip(b).map(|(x, y)| (x.norm_sqr() + y.norm_sqr()).sqrt()).fold(0.0, f64::max)
    };
    Ok(SweepRecord {
        c: ctx.grid().c,
        omega_c: report.omega,
        gap: report.gap(),
        e_c: report.energy,
        g_norm_s0: ctx.sobolev_norm(&g, 0.0),
        g_norm_s1: ctx.sobolev_norm(&g, 1.0),
        g_norm_s1_5: ctx.sobolev_norm(&g, 1.5),
        g_norm_s2: ctx.sobolev_norm(&g, 2.0),
        neg_norm_l2: neg.norm(),
        neg_grad_l2: ctx.gradient_norm_sq(&neg).sqrt(),
        orbit_dist: orbit.dist,
        pohozaev: report.pohozaev,
        el_residual: report.el_residual,
        decay_delta_plus,
        decay_ratio_minus: pair_max(2) / pair_max(0),
        h2_norm: ctx.sobolev_norm(u, 2.0),
        wall_time,
    })
}

fn validate(cfg: &SweepConfig) -> Result<(), HarnessError> {
    if cfg.c_list.len() < 3 {
        return Err(HarnessError::BadSweep(format!("need at least 3 values of c, got {}", cfg.c_list.len())));
    }
    if cfg.c_list.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(HarnessError::BadSweep("c values must be strictly increasing".into()));
    }
    if !(cfg.p > 2.0 && cfg.p < 3.0) {
        return Err(ParamError::OutOfRange {
            name: "p",
            value: cfg.p,
            range: "(2, 3)",
        }
        .into());
    }
    Ok(())
}

fn solve_point(grid: GridSpec, init: OuterInit, cfg: &SweepConfig, model: &LimitModel) -> Result<(SweepRecord, SpinorField), HarnessError> {
    let start = Instant::now();
    let ctx = SpectralContext::new(grid);
    let report = outer_minimize(&ctx, init, cfg.solver)?;
    let record = observe(&ctx, &report, model, start.elapsed().as_secs_f64())?;
    Ok((record, report.ground_state))
}

/// Solves for every c on one fixed physical box and collects the limit table.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult, HarnessError> {
    validate(cfg)?;
    let profile = solve_up(cfg.p, 1e-12)?;
    let nu = nu_formula(cfg.p, cfg.m, profile.mass_l2)?;
    let half_width = cfg.half_width.unwrap_or_else(|| default_half_width(nu, cfg.m));
    let base = GridSpec::new(cfg.n, half_width, cfg.m, cfg.c_list[0], cfg.p, cfg.tau)?;
    let model = build_h(&profile, &SpectralContext::new(base))?;
    let h_pair = model.h.clone();

    let outcomes: Vec<Result<(SweepRecord, SpinorField), HarnessError>> = match cfg.start {
        StartMode::Cold => cfg
            .c_list
            .par_iter()
            .map(|&c| solve_point(base.with_c(c)?, OuterInit::FwEmbedded(h_pair.clone()), cfg, &model))
            .collect(),
        StartMode::Warm => {
            let mut out = Vec::with_capacity(cfg.c_list.len());
            let mut prev: Option<SpinorField> = None;
            for &c in &cfg.c_list {
                let grid = base.with_c(c)?;
                let init = match &prev {
                    Some(u) => OuterInit::Field(u.clone().with_grid(grid)?),
                    None => OuterInit::FwEmbedded(h_pair.clone()),
                };
                let res = solve_point(grid, init, cfg, &model);
                if let Ok((_, u)) = &res {
                    prev = Some(u.clone());
                }
                out.push(res);
            }
            out
        }
    };

    let mut records = Vec::new();
    let mut states = Vec::new();
    let mut failures = Vec::new();
    for (&c, res) in cfg.c_list.iter().zip(outcomes) {
        match res {
            Ok((r, u)) => {
                records.push(r);
                states.push(u);
            }
            Err(e) => failures.push((c, e.to_string())),
        }
    }
    if 2 * failures.len() > cfg.c_list.len() {
        return Err(HarnessError::SweepFailed {
            failed: failures.len(),
            total: cfg.c_list.len(),
        });
    }
    Ok(SweepResult {
        model,
        records,
        states,
        failures,
    })
}
