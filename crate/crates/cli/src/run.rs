//! Experiment drivers. Each reads its keys, validates, then writes its
//! files into the output directory.

use std::f64::consts::PI;
use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::ValueEnum;
use galton_dirac::diagnostics::{
    asymmetry, asymmetry_about_site, conservation_drift, histogram_pdf, ks_distance, pair_averaged_density,
};
use galton_dirac::experiments::{compare_protocol, dirac_gaussian, log_log_slope, CompareParams};
use galton_dirac::gibbs::{equilibration_index, random_band_field, tune_phase_energy};
use galton_dirac::nlde::{gaussian_initial, DEFAULT_CFL};
use galton_dirac::walk::{delta_initial, perturb_asymmetric};
use galton_dirac::{
    BinScale, ConservedQuantities, GibbsParams, GridSpec, Langevin, Nlde, NldeParams, NoiseGenerator, PhaseCoupling,
    ShiftMethod, SpinorField, WalkParams, WalkState, Walker,
};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::config::Config;
use crate::error::{config, CliError, Result};
use crate::output::{ensure_dir, write_histogram, write_manifest, write_state, Csv, Manifest, R};

/// Upper bound on rows of a default density snapshot file.
const SNAPSHOT_ROWS: u64 = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Experiment {
    Walk,
    Nlde,
    Gibbs,
    Compare,
    Sweep,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Walk => "walk",
            Experiment::Nlde => "nlde",
            Experiment::Gibbs => "gibbs",
            Experiment::Compare => "compare",
            Experiment::Sweep => "sweep",
        }
    }
}

type Summary = Map<String, Value>;

/// Runs one experiment and writes `manifest.json` next to its outputs.
/// Configuration errors are reported before anything is written.
pub fn execute(experiment: Experiment, mut cfg: Config, out: &Path) -> Result<()> {
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let clock = Instant::now();
    check_experiment_key(experiment, &mut cfg)?;
    let mut summary = Summary::new();
    let result = match experiment {
        Experiment::Walk => walk(&mut cfg, Some(out), &mut summary),
        Experiment::Nlde => nlde(&mut cfg, Some(out), &mut summary),
        Experiment::Gibbs => gibbs(&mut cfg, Some(out), &mut summary),
        Experiment::Compare => compare(&mut cfg, Some(out), &mut summary),
        Experiment::Sweep => sweep(&mut cfg, Some(out), &mut summary),
    };
    if let Err(CliError::Config(_)) = result {
        return result;
    }
    let seed = cfg.resolved().get("seed").and_then(|s| s.parse().ok());
    let manifest = Manifest {
        experiment: experiment.name(),
        status: if result.is_ok() { "ok" } else { "failed" },
        version: env!("CARGO_PKG_VERSION"),
        seed,
        started_unix_s: started,
        wall_time_s: clock.elapsed().as_secs_f64(),
        config: cfg.resolved(),
        summary: &summary,
        error: result.as_ref().err().map(ToString::to_string),
    };
    write_manifest(out, &manifest)?;
    result
}

/// Final check before any output. Without an output directory this only
/// validates, and the caller stops.
fn prepare<'a>(cfg: &Config, experiment: &str, out: Option<&'a Path>) -> Result<Option<&'a Path>> {
    cfg.reject_unknown(experiment)?;
    if let Some(dir) = out {
        ensure_dir(dir)?;
    }
    Ok(out)
}

fn grid(cfg: &mut Config, default_n: u64) -> Result<GridSpec> {
    let n = cfg.uint("N", default_n)?;
    GridSpec::new(n as usize).map_err(|e| config(format!("N: {}", message(e))))
}

fn message(e: galton_dirac::Error) -> String {
    match e {
        galton_dirac::Error::Config(msg) => msg,
        other => other.to_string(),
    }
}

fn positive(key: &str, v: f64) -> Result<f64> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(config(format!("{key}: must be positive, got {v}")))
    }
}

fn snapshot_stride(cfg: &mut Config, steps: u64, n: usize) -> Result<u64> {
    let default = (steps.max(1) * n as u64).div_ceil(SNAPSHOT_ROWS).max(1);
    Ok(cfg.uint("snapshot_stride", default)?.max(1))
}

struct HistogramSpec {
    bins: usize,
    scale: BinScale,
}

fn histogram_spec(cfg: &mut Config) -> Result<HistogramSpec> {
    let bins = cfg.uint("hist_bins", 50)? as usize;
    if bins == 0 {
        return Err(config("hist_bins: must be at least 1"));
    }
    let scale = match cfg.choice("hist_scale", &["linear", "log"], "linear")? {
        0 => BinScale::Linear,
        _ => BinScale::Log,
    };
    Ok(HistogramSpec { bins, scale })
}

fn coupling(cfg: &mut Config) -> Result<PhaseCoupling> {
    Ok(match cfg.choice("phase_coupling", &["chiral", "scalar"], "chiral")? {
        0 => PhaseCoupling::Chiral,
        _ => PhaseCoupling::Scalar,
    })
}

fn write_pdf(out: &Path, name: &str, samples: &[f64], spec: &HistogramSpec, summary: &mut Summary) -> Result<()> {
    if samples.is_empty() {
        log::warn!("no samples in the histogram window; {name} not written");
        return Ok(());
    }
    let h = histogram_pdf(samples, spec.bins, spec.scale)?;
    summary.insert(format!("{name}_samples"), json!(samples.len()));
    write_histogram(out, name, &h)
}

/// Writes the last finite state and turns `err` into a runtime error.
fn dump_failure(out: &Path, last_good: &SpinorField, at: String, err: galton_dirac::Error) -> CliError {
    if let Err(e) = write_state(out, "last_good_state.csv", last_good) {
        return e;
    }
    CliError::Runtime(format!("{err}; last good state ({at}) written to last_good_state.csv"))
}

fn walk(cfg: &mut Config, out: Option<&Path>, summary: &mut Summary) -> Result<()> {
    let grid = grid(cfg, 512)?;
    let n = grid.n();
    let g = cfg.real("g", 10.0 * PI)?;
    let steps = cfg.uint("steps", 1000)?;
    let gaussian = cfg.choice("ic", &["delta", "gaussian"], "delta")? == 1;
    let sigma = if gaussian {
        Some(positive("sigma", cfg.real("sigma", 10.0)?)?)
    } else {
        None
    };
    let noise = cfg.real("noise", 0.0)?;
    let seed = cfg.uint("seed", 0)?;
    let shift = match cfg.choice("shift", &["index", "spectral"], "index")? {
        0 => ShiftMethod::Index,
        _ => ShiftMethod::Spectral,
    };
    let stride = snapshot_stride(cfg, steps, n)?;
    let asym_stride = cfg.uint("asymmetry_stride", 1)?.max(1);
    let hist_from = cfg.uint("hist_from", steps / 10)?;
    let hist_stride = cfg.uint("hist_stride", 100)?.max(1);
    let hist = histogram_spec(cfg)?;
    let Some(out) = prepare(cfg, "walk", out)? else {
        return Ok(());
    };

    let dx = grid.dx();
    let mut init = match sigma {
        None => delta_initial(grid),
        Some(s) => {
            let mut f = gaussian_initial(grid, s * dx)?;
            f.scale(C64::from(dx.sqrt()));
            f
        }
    };
    if noise != 0.0 {
        init = perturb_asymmetric(&init, noise, seed);
    }

    let mut walker = Walker::new(WalkParams::new(grid, g).with_shift(shift))?;
    let mut state = WalkState::new(init);
    let pi0 = state.particle_number();
    let mut density = Csv::create(out, "density.csv", "j,m,Pi")?;
    let mut asym = Csv::create(out, "asymmetry.csv", "j,gamma,gamma_site")?;
    let mut samples = Vec::new();
    let mut worst_pi: f64 = 0.0;
    let mut last_good = state.clone();
    loop {
        let j = state.j;
        let d = state.field.density();
        worst_pi = worst_pi.max((d.iter().sum::<f64>() - pi0).abs());
        if j.is_multiple_of(stride) || j == steps {
            for (m, p) in d.iter().enumerate() {
                density.line(format_args!("{j},{m},{}", R(*p)))?;
            }
        }
        if j.is_multiple_of(asym_stride) || j == steps {
            asym.line(format_args!(
                "{j},{},{}",
                R(asymmetry(&d)?),
                R(asymmetry_about_site(&d, 0)?)
            ))?;
        }
        if j >= hist_from && j.is_multiple_of(hist_stride) {
            samples.extend(pair_averaged_density(&d, dx));
        }
        if j == steps {
            break;
        }
        last_good.clone_from(&state);
        if let Err(e) = walker.step(&mut state) {
            return Err(dump_failure(out, &last_good.field, format!("j = {}", last_good.j), e));
        }
        if !state.field.is_finite() {
            let e = galton_dirac::Error::Integration(format!("walk state non-finite at j = {}", state.j));
            return Err(dump_failure(out, &last_good.field, format!("j = {}", last_good.j), e));
        }
    }
    density.finish()?;
    asym.finish()?;
    write_pdf(out, "histogram.csv", &samples, &hist, summary)?;
    write_state(out, "final_state.csv", &state.field)?;
    summary.insert("max_abs_pi_drift".into(), json!(worst_pi));
    Ok(())
}

struct ConservedLog {
    csv: Csv,
    series: Vec<ConservedQuantities>,
}

impl ConservedLog {
    fn create(dir: &Path) -> Result<Self> {
        Ok(Self {
            csv: Csv::create(dir, "conserved.csv", "T,Pi,E,P")?,
            series: Vec::new(),
        })
    }

    fn push(&mut self, t: f64, q: ConservedQuantities) -> Result<()> {
        self.series.push(q);
        self.csv.line(format_args!(
            "{},{},{},{}",
            R(t),
            R(q.particle_number),
            R(q.energy),
            R(q.momentum)
        ))
    }

    fn finish(self) -> Result<Vec<ConservedQuantities>> {
        self.csv.finish()?;
        Ok(self.series)
    }
}

fn record_drift(series: &[ConservedQuantities], summary: &mut Summary, prefix: &str) -> Result<()> {
    if series.len() >= 2 {
        let (de, dp, dpi) = conservation_drift(series)?.max_abs();
        summary.insert(format!("{prefix}max_abs_energy_drift"), json!(de));
        summary.insert(format!("{prefix}max_abs_momentum_drift"), json!(dp));
        summary.insert(format!("{prefix}max_abs_particle_number_drift"), json!(dpi));
    }
    Ok(())
}

struct NldeRun {
    t_final: f64,
    params: NldeParams,
    snapshot_stride: Option<u64>,
    conserved_stride: u64,
    hist_from: f64,
    hist_stride: u64,
}

/// Integrates `field` in place, writing density, conserved and
/// histogram files into `out`. Returns the histogram samples.
fn integrate_nlde(
    run: &NldeRun,
    field: &mut SpinorField,
    out: &Path,
    summary: &mut Summary,
    prefix: &str,
) -> Result<Vec<f64>> {
    let dt = run.params.dt;
    let steps = (run.t_final / dt).round() as u64;
    let mut solver = Nlde::new(run.params)?;
    let mut density = match run.snapshot_stride {
        Some(_) => Some(Csv::create(out, "density.csv", "T,m,Pi")?),
        None => None,
    };
    let mut log = ConservedLog::create(out)?;
    let mut samples = Vec::new();
    let mut last_good = field.clone();
    let mut i = 0;
    loop {
        let t = i as f64 * dt;
        if i % run.conserved_stride == 0 || i == steps {
            log.push(t, solver.conserved(field))?;
        }
        let snap = run.snapshot_stride.is_some_and(|s| i % s == 0 || i == steps);
        let sample = t >= run.hist_from && i % run.hist_stride == 0;
        if snap || sample {
            let d = field.density();
            if let (true, Some(csv)) = (snap, density.as_mut()) {
                for (m, p) in d.iter().enumerate() {
                    csv.line(format_args!("{},{m},{}", R(t), R(*p)))?;
                }
            }
            if sample {
                samples.extend(d);
            }
        }
        if i == steps {
            break;
        }
        last_good.clone_from(field);
        if let Err(e) = solver.step(field) {
            return Err(dump_failure(out, &last_good, format!("T = {t}"), e));
        }
        i += 1;
    }
    if let Some(csv) = density {
        csv.finish()?;
    }
    record_drift(&log.finish()?, summary, prefix)?;
    summary.insert(format!("{prefix}steps"), json!(steps));
    Ok(samples)
}

fn nlde(cfg: &mut Config, out: Option<&Path>, summary: &mut Summary) -> Result<()> {
    let grid = grid(cfg, 64)?;
    let g = cfg.real("g", 10.0 * PI)?;
    let t_final = cfg.real("t_final", 10.0)?;
    if t_final < 0.0 {
        return Err(config("t_final: must be non-negative"));
    }
    let dt = positive("dt", cfg.real("dt", DEFAULT_CFL * grid.dx())?)?;
    let dealias = cfg.flag("dealias", true)?;
    let sigma = positive("sigma", cfg.real("sigma", 10.0)?)?;
    let energy = cfg.opt_real("energy")?;
    let coupling = match energy {
        Some(_) => Some(coupling(cfg)?),
        None => None,
    };
    let steps = (t_final / dt).round() as u64;
    let snapshot = snapshot_stride(cfg, steps, grid.n())?;
    let conserved_stride = cfg.uint("conserved_stride", (steps / 10_000).max(1))?.max(1);
    let hist_from = cfg.real("hist_from", t_final / 10.0)?;
    let hist_stride = cfg.uint("hist_stride", (1.0 / dt).round().max(1.0) as u64)?.max(1);
    let hist = histogram_spec(cfg)?;
    let params = NldeParams::new(grid, g).with_dt(dt).with_dealias(dealias);
    params.validate()?;
    let Some(out) = prepare(cfg, "nlde", out)? else {
        return Ok(());
    };

    let mut field = dirac_gaussian(grid, sigma, dealias)?;
    if let (Some(e), Some(c)) = (energy, coupling) {
        field = tune_phase_energy(&field, e, &params, c)?;
    }
    let run = NldeRun {
        t_final,
        params,
        snapshot_stride: Some(snapshot),
        conserved_stride,
        hist_from,
        hist_stride,
    };
    let samples = integrate_nlde(&run, &mut field, out, summary, "")?;
    write_pdf(out, "histogram.csv", &samples, &hist, summary)?;
    write_state(out, "final_state.csv", &field)?;
    Ok(())
}

fn gibbs(cfg: &mut Config, out: Option<&Path>, summary: &mut Summary) -> Result<()> {
    let grid = grid(cfg, 64)?;
    let g = cfg.real("g", 10.0 * PI)?;
    let eta = cfg.real("eta", 1.0)?;
    let seed = cfg.uint("seed", 0)?;
    let mut p = GibbsParams::new(grid, g, eta, seed);
    p.theta = cfg.real("theta", p.theta)?;
    p.mu = cfg.real("mu", p.mu)?;
    p.pi_target = match cfg.text("pi_target").as_deref() {
        None => p.pi_target,
        Some("none") => None,
        Some(raw) => Some(
            crate::config::parse_real(raw)
                .ok_or_else(|| config(format!("pi_target: expected a real number or 'none', got '{raw}'")))?,
        ),
    };
    p.dt = cfg.real("dt", p.dt)?;
    p.steps = cfg.uint("steps", p.steps)?;
    p.dealias = cfg.flag("dealias", p.dealias)?;
    p.record_stride = cfg.uint("record_stride", p.record_stride)?.max(1);
    let snapshot = cfg.opt_uint("snapshot_stride")?.filter(|&s| s > 0);
    let burn_in = cfg.real("burn_in", 0.2)?;
    if !(0.0..1.0).contains(&burn_in) {
        return Err(config(format!("burn_in: must lie in [0, 1), got {burn_in}")));
    }
    let hist = histogram_spec(cfg)?;
    let nlde_t = cfg.real("nlde_t_final", 0.0)?;
    let follow = if nlde_t > 0.0 {
        let dt = positive("nlde_dt", cfg.real("nlde_dt", 2e-3)?)?;
        let from = cfg.real("nlde_hist_from", nlde_t / 2.0)?;
        let sigma = positive("sigma", cfg.real("sigma", 10.0)?)?;
        let params = NldeParams::new(grid, g).with_dt(dt).with_dealias(p.dealias);
        params.validate()?;
        Some((params, from, sigma, coupling(cfg)?))
    } else {
        None
    };
    p.validate()?;
    let Some(out) = prepare(cfg, "gibbs", out)? else {
        return Ok(());
    };

    // same sequence of draws as `galton_dirac::gibbs::sample_gibbs`
    let mut chain = Langevin::new(p)?;
    let mut rng = NoiseGenerator::new(p.seed);
    let mut field = random_band_field(grid, p.dealias, p.pi_target.unwrap_or(1.0), &mut rng);
    let burn = (p.steps as f64 * burn_in).round() as u64;
    let mut density = match snapshot {
        Some(_) => Some(Csv::create(out, "density.csv", "T,m,Pi")?),
        None => None,
    };
    let mut log = ConservedLog::create(out)?;
    let mut steps_logged = Vec::new();
    let mut samples = Vec::new();
    let mut last_good = field.clone();
    for step in 0..=p.steps {
        if step > 0 {
            last_good.clone_from(&field);
            if let Err(e) = chain.step(&mut field, &mut rng) {
                return Err(dump_failure(out, &last_good, format!("step {}", step - 1), e));
            }
        }
        let t = step as f64 * p.dt;
        if step % p.record_stride == 0 {
            log.push(t, chain.solver().conserved(&field))?;
            steps_logged.push(step);
            if step >= burn {
                samples.extend(field.density());
            }
        }
        if let (Some(s), Some(csv)) = (snapshot, density.as_mut()) {
            if step % s == 0 {
                for (m, v) in field.density().iter().enumerate() {
                    csv.line(format_args!("{},{m},{}", R(t), R(*v)))?;
                }
            }
        }
    }
    if let Some(csv) = density {
        csv.finish()?;
    }
    let series = log.finish()?;
    let energies: Vec<f64> = series.iter().map(|q| q.energy).collect();
    let equilibrated = equilibration_index(&energies).map(|i| steps_logged[i]);
    if equilibrated.is_none() {
        log::warn!("Gibbs chain did not pass the equilibration test");
    }
    let from = equilibrated.unwrap_or(0).max(burn);
    let window: Vec<&ConservedQuantities> = series
        .iter()
        .zip(&steps_logged)
        .filter(|(_, s)| **s >= from)
        .map(|(q, _)| q)
        .collect();
    let mean = |f: fn(&ConservedQuantities) -> f64| window.iter().map(|q| f(q)).sum::<f64>() / window.len() as f64;
    let mean_e = mean(|q| q.energy);
    summary.insert("equilibration_step".into(), json!(equilibrated));
    summary.insert("mean_energy".into(), json!(mean_e));
    summary.insert("mean_momentum".into(), json!(mean(|q| q.momentum)));
    summary.insert("mean_particle_number".into(), json!(mean(|q| q.particle_number)));
    write_pdf(out, "histogram.csv", &samples, &hist, summary)?;
    write_state(out, "final_state.csv", &field)?;

    if let Some((params, from, sigma, coupling)) = follow {
        let dir = out.join("nlde");
        ensure_dir(&dir)?;
        let initial = dirac_gaussian(grid, sigma, params.dealias)?;
        let mut det = tune_phase_energy(&initial, mean_e, &params, coupling)?;
        let run = NldeRun {
            t_final: nlde_t,
            params,
            snapshot_stride: None,
            conserved_stride: (1.0 / params.dt).round().max(1.0) as u64,
            hist_from: from,
            hist_stride: (1.0 / params.dt).round().max(1.0) as u64,
        };
        let nlde_samples = integrate_nlde(&run, &mut det, &dir, summary, "nlde_")?;
        write_pdf(&dir, "histogram.csv", &nlde_samples, &hist, summary)?;
        write_state(&dir, "final_state.csv", &det)?;
        if !nlde_samples.is_empty() && !samples.is_empty() {
            summary.insert("ks_nlde_vs_gibbs".into(), json!(ks_distance(&nlde_samples, &samples)?));
        }
    }
    Ok(())
}

fn compare(cfg: &mut Config, out: Option<&Path>, summary: &mut Summary) -> Result<()> {
    let ns = cfg.uint_list("n_values", &[64, 128, 256, 512])?;
    let g = cfg.real("g", 10.0 * PI)?;
    let j = cfg.uint("j", 400)?;
    if j % 2 != 0 {
        return Err(config(format!("j: must be even, got {j}")));
    }
    let sigma = positive("sigma", cfg.real("sigma", 10.0)?)?;
    let dealias = cfg.flag("dealias", true)?;
    let cfl = positive("cfl", cfg.real("cfl", DEFAULT_CFL)?)?;
    for &n in &ns {
        GridSpec::new(n as usize).map_err(|e| config(format!("n_values: {}", message(e))))?;
    }
    let Some(out) = prepare(cfg, "compare", out)? else {
        return Ok(());
    };

    let results: Vec<_> = ns
        .par_iter()
        .map(|&n| {
            compare_protocol(&CompareParams {
                n: n as usize,
                g,
                j,
                sigma_cells: sigma,
                dealias,
                cfl,
            })
        })
        .collect::<std::result::Result<_, _>>()?;
    let mut delta = Csv::create(out, "delta.csv", "epsilon,delta,N,l2_relative,excluded")?;
    let mut profiles = Csv::create(out, "profiles.csv", "N,m,walk,dirac")?;
    for (n, r) in ns.iter().zip(&results) {
        delta.line(format_args!(
            "{},{},{n},{},{}",
            R(r.epsilon),
            R(r.delta),
            R(r.l2_relative),
            r.excluded
        ))?;
        for (m, (w, d)) in r.walk_density.iter().zip(&r.dirac_density).enumerate() {
            profiles.line(format_args!("{n},{m},{},{}", R(*w), R(*d)))?;
        }
    }
    delta.finish()?;
    profiles.finish()?;
    if results.len() >= 2 {
        let rows: Vec<(f64, f64)> = results.iter().map(|r| (r.epsilon, r.delta)).collect();
        summary.insert("log_log_slope".into(), json!(log_log_slope(&rows)?));
    }
    Ok(())
}

fn sweep(cfg: &mut Config, out: Option<&Path>, summary: &mut Summary) -> Result<()> {
    let base = cfg
        .text("base")
        .ok_or_else(|| config("base: required (walk|nlde|gibbs|compare)"))?;
    let base = match Experiment::from_str(&base, false) {
        Ok(Experiment::Sweep) | Err(_) => {
            return Err(config(format!("base: expected walk|nlde|gibbs|compare, got '{base}'")));
        }
        Ok(e) => e,
    };
    let key = cfg.text("sweep_key").ok_or_else(|| config("sweep_key: required"))?;
    let values: Vec<String> = cfg
        .text("sweep_values")
        .ok_or_else(|| config("sweep_values: required"))?
        .split(',')
        .map(|v| v.trim().to_string())
        .filter(|v| !v.is_empty())
        .collect();
    let mut unique = values.clone();
    unique.sort();
    unique.dedup();
    if values.is_empty() || unique.len() != values.len() {
        return Err(config("sweep_values: expected distinct comma-separated values"));
    }
    let mut template = cfg.entries();
    for k in ["base", "sweep_key", "sweep_values", "experiment"] {
        template.remove(k);
    }
    let runs: Vec<(String, Config)> = values
        .iter()
        .map(|v| {
            let mut c = template.clone();
            c.insert(&key, v);
            (format!("{key}_{}", v.replace(['/', '\\', ' '], "_")), c)
        })
        .collect();
    // fail fast on configuration errors before any run starts
    for (name, c) in &runs {
        if let Err(CliError::Config(msg)) = check(base, c.clone()) {
            return Err(config(format!("{name}: {msg}")));
        }
    }
    let Some(out) = out else {
        return Ok(());
    };
    ensure_dir(out)?;
    let results: Vec<(String, Result<()>)> = runs
        .into_par_iter()
        .map(|(name, c)| {
            let r = execute(base, c, &out.join(&name));
            (name, r)
        })
        .collect();
    summary.insert("runs".into(), json!(results.iter().map(|(n, _)| n).collect::<Vec<_>>()));
    match results.into_iter().find_map(|(n, r)| r.err().map(|e| (n, e))) {
        None => Ok(()),
        Some((name, CliError::Runtime(msg))) => Err(CliError::Runtime(format!("{name}: {msg}"))),
        Some((_, e)) => Err(e),
    }
}

/// Reads and validates a config without running it or writing anything.
pub fn check(experiment: Experiment, mut cfg: Config) -> Result<()> {
    check_experiment_key(experiment, &mut cfg)?;
    let mut summary = Summary::new();
    match experiment {
        Experiment::Walk => walk(&mut cfg, None, &mut summary),
        Experiment::Nlde => nlde(&mut cfg, None, &mut summary),
        Experiment::Gibbs => gibbs(&mut cfg, None, &mut summary),
        Experiment::Compare => compare(&mut cfg, None, &mut summary),
        Experiment::Sweep => sweep(&mut cfg, None, &mut summary),
    }
}

fn check_experiment_key(experiment: Experiment, cfg: &mut Config) -> Result<()> {
    match cfg.text("experiment") {
        Some(named) if named != experiment.name() => Err(config(format!(
            "experiment: config is for '{named}' but '{}' was requested",
            experiment.name()
        ))),
        _ => Ok(()),
    }
}
