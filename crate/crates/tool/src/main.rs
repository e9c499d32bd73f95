use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use ndgs_core::acceptance::{criterion_5, criterion_7, run_criteria, sweep_fits, AcceptanceOptions, CriterionReport, SweepRun};
use ndgs_core::harness::field_io::{save_field, sha256_file};
use ndgs_core::harness::report::{emit_report, ReportInput};
use ndgs_core::harness::{run_sweep, StartMode, SweepConfig};
use ndgs_core::maxmin::{outer_minimize, OuterInit, OuterOptions};
use ndgs_core::nls::{build_h, default_half_width, interior_max_abs, nse2_residual, nu_formula, solve_up, RadialProfile};
use ndgs_core::{GridSpec, SpectralContext};
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "ndgs", version, about = "Ground states of the nonlinear Dirac equation and their nonrelativistic limit")]
struct Cli {
    /// Plain-text key=value file; its entries override command-line flags.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute one Dirac ground state and save it as a field file.
    Solve(SolveArgs),
    /// Solve the radial limit problem and print the limit constants.
    Nls(NlsArgs),
    /// Run a sweep over c and write sweep.csv, report.json and field files.
    Sweep(SweepArgs),
    /// Run the acceptance suites.
    Check(CheckArgs),
}

#[derive(Args, Debug, Clone, PartialEq)]
struct SolveArgs {
    #[arg(long, default_value_t = 2.5)]
    p: f64,
    #[arg(long, default_value_t = 1.0)]
    m: f64,
    #[arg(long, default_value_t = 20.0)]
    c: f64,
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    #[arg(long, default_value_t = 48)]
    n: usize,
    /// Half-width of the periodic box; defaults to 12/√(2mν).
    #[arg(long = "box")]
    half_width: Option<f64>,
    #[arg(long, default_value = "ndgs-solve")]
    out: PathBuf,
}

#[derive(Args, Debug, Clone, PartialEq)]
struct NlsArgs {
    #[arg(long, default_value_t = 2.5)]
    p: f64,
    #[arg(long, default_value_t = 1.0)]
    m: f64,
    /// Also sample h on an N³ grid and report its residual.
    #[arg(long)]
    n: Option<usize>,
    /// Directory for profile.csv.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, PartialEq)]
struct SweepArgs {
    #[arg(long, default_value_t = 2.5)]
    p: f64,
    #[arg(long, default_value_t = 1.0)]
    m: f64,
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    #[arg(long, value_delimiter = ',', default_value = "8,16,32,64")]
    c: Vec<f64>,
    #[arg(long, default_value_t = 48)]
    n: usize,
    #[arg(long = "box")]
    half_width: Option<f64>,
    /// Start every c from the embedded limit profile, concurrently.
    #[arg(long)]
    cold: bool,
    #[arg(long, default_value = "ndgs-sweep")]
    out: PathBuf,
}

#[derive(Args, Debug, Clone, PartialEq)]
struct CheckArgs {
    /// Run all eight criteria, including the sweep.
    #[arg(long)]
    full: bool,
    /// Comma-separated criterion ids; overrides --full.
    #[arg(long, value_delimiter = ',')]
    only: Vec<u32>,
    /// Replace the residual bounds of the operator algebra suite.
    #[arg(long)]
    tolerance: Option<f64>,
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| anyhow!("config: invalid value {value:?} for {key}"))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value.split(',').map(|v| parse(key, v.trim())).collect()
}

trait Override {
    fn set(&mut self, key: &str, value: &str) -> Result<()>;
}

impl Override for SolveArgs {
    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "p" => self.p = parse(key, value)?,
            "m" => self.m = parse(key, value)?,
            "c" => self.c = parse(key, value)?,
            "tau" => self.tau = parse(key, value)?,
            "n" => self.n = parse(key, value)?,
            "box" => self.half_width = Some(parse(key, value)?),
            "out" => self.out = value.into(),
            _ => bail!("config: unknown key {key:?} for solve"),
        }
        Ok(())
    }
}

impl Override for NlsArgs {
    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "p" => self.p = parse(key, value)?,
            "m" => self.m = parse(key, value)?,
            "n" => self.n = Some(parse(key, value)?),
            "out" => self.out = Some(value.into()),
            _ => bail!("config: unknown key {key:?} for nls"),
        }
        Ok(())
    }
}

impl Override for SweepArgs {
    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "p" => self.p = parse(key, value)?,
            "m" => self.m = parse(key, value)?,
            "tau" => self.tau = parse(key, value)?,
            "c" => self.c = parse_list(key, value)?,
            "n" => self.n = parse(key, value)?,
            "box" => self.half_width = Some(parse(key, value)?),
            "cold" => self.cold = parse(key, value)?,
            "out" => self.out = value.into(),
            _ => bail!("config: unknown key {key:?} for sweep"),
        }
        Ok(())
    }
}

impl Override for CheckArgs {
    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "full" => self.full = parse(key, value)?,
            "only" => self.only = parse_list(key, value)?,
            "tolerance" => self.tolerance = Some(parse(key, value)?),
            _ => bail!("config: unknown key {key:?} for check"),
        }
        Ok(())
    }
}

/// Reads `key = value` lines; `#` starts a comment.
fn read_config(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("config {}:{}: expected key=value", path.display(), i + 1))?;
        pairs.push((k.trim().replace('-', "_").to_lowercase(), v.trim().to_string()));
    }
    Ok(pairs)
}

fn apply_config(args: &mut impl Override, config: Option<&Path>) -> Result<()> {
    if let Some(path) = config {
        for (k, v) in read_config(path)? {
            args.set(&k, &v)?;
        }
    }
    Ok(())
}

fn limit_setup(p: f64, m: f64) -> Result<(RadialProfile, f64)> {
    let profile = solve_up(p, 1e-12)?;
    let nu = nu_formula(p, m, profile.mass_l2)?;
    Ok((profile, nu))
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn solve(args: SolveArgs) -> Result<bool> {
    let start = Instant::now();
    let (profile, nu) = limit_setup(args.p, args.m)?;
    let half_width = args.half_width.unwrap_or_else(|| default_half_width(nu, args.m));
    let g = GridSpec::new(args.n, half_width, args.m, args.c, args.p, args.tau)?;
    let ctx = SpectralContext::new(g);
    let model = build_h(&profile, &ctx)?;
    let rep = outer_minimize(&ctx, OuterInit::FwEmbedded(model.h), OuterOptions::default())?;

    std::fs::create_dir_all(&args.out)?;
    let field = args.out.join("ground_state.ndgs");
    save_field(&rep.ground_state, &field)?;
    let summary = json!({
        "settings": { "p": args.p, "m": args.m, "c": args.c, "tau": args.tau, "n": args.n, "box": half_width },
        "omega": rep.omega,
        "omega_shifted": rep.omega_shifted,
        "gap": rep.gap(),
        "energy": rep.energy,
        "energy_shifted": rep.energy_shifted,
        "el_residual": rep.el_residual,
        "pohozaev": rep.pohozaev,
        "iterations": rep.iters,
        "nu": nu,
        "field": { "path": field.display().to_string(), "sha256": sha256_file(&field)? },
        "wall_time": start.elapsed().as_secs_f64(),
    });
    write_json(&args.out.join("solve.json"), &summary)?;
    let mc2 = g.rest_energy();
    println!("c = {}  N = {}  L = {:.6}", args.c, args.n, half_width);
    println!("ω_c − mc²      = {:.12e}", rep.omega_shifted);
    println!("I(u_c) − mc²   = {:.12e}", rep.energy_shifted);
    println!("(mc² − ω_c)/ν  = {:.9}", rep.gap() / nu);
    println!("EL residual/mc² = {:.3e}", rep.el_residual / mc2);
    println!("Pohozaev/mc²    = {:.3e}", rep.pohozaev / mc2);
    println!("iterations = {}  wall = {:.2}s", rep.iters, start.elapsed().as_secs_f64());
    println!("wrote {}", args.out.display());
    Ok(true)
}

fn nls(args: NlsArgs) -> Result<bool> {
    let (profile, nu) = limit_setup(args.p, args.m)?;
    let kappa = (2.0 * args.m * nu).sqrt();
    println!("U(0)   = {:.15}", profile.u0());
    println!("‖U‖    = {:.15}", profile.mass_l2);
    println!("ν      = {:.15}", nu);
    println!("κ      = {:.15}", kappa);
    println!("L      = {:.6}", default_half_width(nu, args.m));
    if let Some(n) = args.n {
        let g = GridSpec::new(n, default_half_width(nu, args.m), args.m, 1.0, args.p, 1.0)?;
        let ctx = SpectralContext::new(g);
        let model = build_h(&profile, &ctx)?;
        let res = nse2_residual(&ctx, &model.h, model.nu);
        println!("N = {n}: ‖h‖ = {:.12}  e_∞(1) = {:.12}  residual = {:.3e}", model.h.norm(), model.e_inf, interior_max_abs(&res, 0.75));
    }
    if let Some(out) = args.out {
        std::fs::create_dir_all(&out)?;
        let path = out.join("profile.csv");
        profile.save_csv(&path)?;
        println!("wrote {}", path.display());
    }
    Ok(true)
}

fn print_reports(reports: &[CriterionReport]) {
    for r in reports {
        println!("{}", r.summary_line());
        for line in r.detail_lines() {
            println!("{line}");
        }
    }
}

fn sweep(args: SweepArgs) -> Result<bool> {
    let cfg = SweepConfig {
        p: args.p,
        m: args.m,
        tau: args.tau,
        n: args.n,
        half_width: args.half_width,
        c_list: args.c.clone(),
        solver: OuterOptions::default(),
        start: if args.cold { StartMode::Cold } else { StartMode::Warm },
    };
    let start = Instant::now();
    let result = run_sweep(&cfg)?;
    let run = SweepRun {
        result: Ok(result),
        elapsed: start.elapsed(),
    };
    let criteria = vec![criterion_5(&run), criterion_7(&run)];
    let Ok(sweep) = &run.result else { unreachable!() };
    for (c, err) in &sweep.failures {
        eprintln!("c = {c}: {err}");
    }

    std::fs::create_dir_all(&args.out)?;
    let mut files = Vec::new();
    for (rec, state) in sweep.records.iter().zip(&sweep.states) {
        let path = args.out.join(format!("field_c{}.ndgs", rec.c));
        save_field(state, &path)?;
        files.push(path);
    }
    let solver = cfg.solver;
    let input = ReportInput {
        fits: sweep_fits(sweep),
        tolerances: BTreeMap::from([
            ("outer_gradient".to_string(), solver.tol_outer),
            ("inner_gradient".to_string(), solver.tol_inner),
        ]),
        criteria: criteria.iter().map(|c| c.to_record()).collect(),
        settings: json!({
            "p": cfg.p, "m": cfg.m, "tau": cfg.tau, "n": cfg.n, "c": cfg.c_list,
            "box": sweep.model.grid().half_width, "start": format!("{:?}", cfg.start).to_lowercase(),
            "max_iters": solver.max_iters, "inner_max_iters": solver.inner_max_iters,
            "nu": sweep.model.nu,
        }),
        field_files: files,
    };
    let paths = emit_report(&sweep.records, input, &args.out)?;
    for r in &sweep.records {
        println!(
            "c = {:>5}  (mc²−ω)/ν = {:.6}  ‖g‖ = {:.4e}  ‖u⁻‖ = {:.4e}  d_H¹ = {:.3e}  {:.1}s",
            r.c,
            r.gap / sweep.model.nu,
            r.g_norm_s0,
            r.neg_norm_l2,
            r.orbit_dist,
            r.wall_time
        );
    }
    print_reports(&criteria);
    println!("wrote {} and {}", paths.csv.display(), paths.json.display());
    Ok(criteria.iter().all(|c| c.passed()))
}

fn check(args: CheckArgs) -> Result<bool> {
    let ids: Vec<u32> = if !args.only.is_empty() {
        args.only.clone()
    } else if args.full {
        (1..=8).collect()
    } else {
        vec![1, 2, 8]
    };
    if let Some(bad) = ids.iter().find(|&&i| !(1..=8).contains(&i)) {
        bail!("no criterion {bad}");
    }
    let opts = AcceptanceOptions { tolerance: args.tolerance };
    let reports = run_criteria(&ids, &opts);
    print_reports(&reports);
    let failed = reports.iter().filter(|r| !r.passed()).count();
    println!("{} of {} criteria passed", reports.len() - failed, reports.len());
    Ok(failed == 0)
}

fn run(cli: Cli) -> Result<bool> {
    let config = cli.config.as_deref();
    match cli.command {
        Command::Solve(mut a) => {
            apply_config(&mut a, config)?;
            solve(a)
        }
        Command::Nls(mut a) => {
            apply_config(&mut a, config)?;
            nls(a)
        }
        Command::Sweep(mut a) => {
            apply_config(&mut a, config)?;
            sweep(a)
        }
        Command::Check(mut a) => {
            apply_config(&mut a, config)?;
            check(a)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
