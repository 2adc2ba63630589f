//! Langevin sampling of the grand-canonical Gibbs state
//! `f ∝ exp(−(2/η²)(E − θP − μΠ))` of the truncated Dirac system, and
//! energy-matched initial data for the deterministic runs.

use num_complex::Complex64 as C64;

use crate::error::{config, Error, Result};
use crate::field::{Fourier, GridSpec, SpinorField};
use crate::nlde::{ConservedQuantities, Nlde, NldeParams};
use crate::noise::NoiseGenerator;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GibbsParams {
    pub eta: f64,
    pub theta: f64,
    pub mu: f64,
    /// Rescale to this `Π` after every step. Requires `mu == 0`.
    pub pi_target: Option<f64>,
    pub dt: f64,
    pub steps: u64,
    pub seed: u64,
    pub g: f64,
    pub grid: GridSpec,
    pub dealias: bool,
    /// Steps between entries of the recorded `(Π, E, P)` series.
    pub record_stride: u64,
}

impl GibbsParams {
    /// `θ = μ = 0`, `Π` renormalised to 1, `dt = 10⁻³`, `10⁵` steps.
    pub fn new(grid: GridSpec, g: f64, eta: f64, seed: u64) -> Self {
        Self {
            eta,
            theta: 0.0,
            mu: 0.0,
            pi_target: Some(1.0),
            dt: 1e-3,
            steps: 100_000,
            seed,
            g,
            grid,
            dealias: true,
            record_stride: 100,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return Err(config(format!("eta must be finite and >= 0, got {}", self.eta)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(config(format!("dt must be positive, got {}", self.dt)));
        }
        if let Some(pi) = self.pi_target {
            if !(pi > 0.0 && pi.is_finite()) {
                return Err(config(format!("pi_target must be positive, got {pi}")));
            }
            if self.mu != 0.0 {
                return Err(config("mu must be 0 when pi_target is set"));
            }
        }
        if !(self.theta.is_finite() && self.mu.is_finite() && self.g.is_finite()) {
            return Err(config("theta, mu and g must be finite"));
        }
        Ok(())
    }

    pub fn nlde_params(&self) -> NldeParams {
        NldeParams::new(self.grid, self.g)
            .with_dt(self.dt)
            .with_dealias(self.dealias)
    }
}

/// Euler–Maruyama integrator for `dΨ = −∂H/∂Ψ* dT + η dW`.
pub struct Langevin {
    params: GibbsParams,
    nlde: Nlde,
    grad: SpinorField,
}

impl Langevin {
    pub fn new(params: GibbsParams) -> Result<Self> {
        params.validate()?;
        let nlde = Nlde::new(params.nlde_params())?;
        Ok(Self {
            params,
            nlde,
            grad: SpinorField::zeros(params.grid),
        })
    }

    pub fn params(&self) -> &GibbsParams {
        &self.params
    }

    pub fn solver(&mut self) -> &mut Nlde {
        &mut self.nlde
    }

    /// Drift and noise, then the band projection, then the `Π` rescaling.
    pub fn step(&mut self, field: &mut SpinorField, rng: &mut NoiseGenerator) -> Result<()> {
        let p = self.params;
        self.nlde.grad_h_into(field, p.theta, p.mu, &mut self.grad);
        let amp = p.eta * p.dt.sqrt();
        let (ga, gb) = (self.grad.minus(), self.grad.plus());
        let (a, b) = field.components_mut();
        for m in 0..a.len() {
            a[m] += -p.dt * ga[m] + amp * rng.complex();
        }
        for m in 0..b.len() {
            b[m] += -p.dt * gb[m] + amp * rng.complex();
        }
        self.nlde.project(field);
        if let Some(target) = p.pi_target {
            field.normalize_particle_number(target);
        }
        if !field.is_finite() {
            return Err(Error::Integration(format!(
                "Langevin state became non-finite; reduce dt (currently {})",
                p.dt
            )));
        }
        Ok(())
    }
}

pub fn em_step(field: &SpinorField, params: &GibbsParams, rng: &mut NoiseGenerator) -> Result<SpinorField> {
    let mut out = field.clone();
    Langevin::new(*params)?.step(&mut out, rng)?;
    Ok(out)
}

/// Independent complex Gaussian coefficients on every retained mode,
/// rescaled to `Π = pi` in physical space.
pub fn random_band_field(grid: GridSpec, dealias: bool, pi: f64, rng: &mut NoiseGenerator) -> SpinorField {
    let mut fourier = Fourier::new(grid);
    let mut field = SpinorField::zeros(grid);
    let cutoff = if dealias {
        grid.cutoff() as i64
    } else {
        grid.n() as i64 / 2 - 1
    };
    {
        let (a, b) = field.components_mut();
        for buf in [a, b] {
            for (i, z) in buf.iter_mut().enumerate() {
                if grid.wavenumber(i).abs() <= cutoff {
                    *z = rng.complex();
                }
            }
            fourier.inverse(buf);
        }
    }
    field.normalize_particle_number(pi);
    field
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GibbsRecord {
    pub step: u64,
    pub quantities: ConservedQuantities,
}

#[derive(Debug, Clone)]
pub struct GibbsRun {
    pub field: SpinorField,
    pub series: Vec<GibbsRecord>,
    /// First step of the window pair that passed the equilibration test.
    pub equilibration_step: Option<u64>,
}

impl GibbsRun {
    pub fn equilibrated(&self) -> bool {
        self.equilibration_step.is_some()
    }

    /// Mean energy over records at or after `from_step`.
    pub fn mean_energy_after(&self, from_step: u64) -> Option<f64> {
        let e: Vec<f64> = self
            .series
            .iter()
            .filter(|r| r.step >= from_step)
            .map(|r| r.quantities.energy)
            .collect();
        (!e.is_empty()).then(|| e.iter().sum::<f64>() / e.len() as f64)
    }
}

pub fn sample_gibbs(params: &GibbsParams) -> Result<GibbsRun> {
    sample_gibbs_with(params, |_, _| {})
}

/// As [`sample_gibbs`], calling `observe(step, field)` at every recorded step.
pub fn sample_gibbs_with(params: &GibbsParams, mut observe: impl FnMut(u64, &SpinorField)) -> Result<GibbsRun> {
    let mut chain = Langevin::new(*params)?;
    let mut rng = NoiseGenerator::new(params.seed);
    let mut field = random_band_field(params.grid, params.dealias, params.pi_target.unwrap_or(1.0), &mut rng);
    let stride = params.record_stride.max(1);
    let mut series = Vec::with_capacity((params.steps / stride + 1) as usize);
    let mut record = |step: u64, field: &SpinorField, chain: &mut Langevin| {
        series.push(GibbsRecord {
            step,
            quantities: chain.solver().conserved(field),
        });
        observe(step, field);
    };
    record(0, &field, &mut chain);
    for step in 1..=params.steps {
        chain.step(&mut field, &mut rng)?;
        if step % stride == 0 {
            record(step, &field, &mut chain);
        }
    }
    let energies: Vec<f64> = series.iter().map(|r| r.quantities.energy).collect();
    let equilibration_step = equilibration_index(&energies).map(|i| series[i].step);
    if equilibration_step.is_none() {
        log::warn!("Gibbs chain (seed {}) did not pass the equilibration test", params.seed);
    }
    Ok(GibbsRun {
        field,
        series,
        equilibration_step,
    })
}

/// Index of the first window of two consecutive windows (each 10% of the
/// series) whose means differ by less than twice the larger within-window
/// standard error. Standard errors use 10 batch means to allow for
/// autocorrelation.
pub fn equilibration_index(series: &[f64]) -> Option<usize> {
    let w = series.len() / 10;
    if w < 2 {
        return None;
    }
    let mut start = 0;
    while start + 2 * w <= series.len() {
        let (m1, se1) = mean_and_batch_se(&series[start..start + w]);
        let (m2, se2) = mean_and_batch_se(&series[start + w..start + 2 * w]);
        if (m1 - m2).abs() < 2.0 * se1.max(se2) {
            return Some(start);
        }
        start += w;
    }
    None
}

fn mean_and_batch_se(xs: &[f64]) -> (f64, f64) {
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let batches = 10.min(xs.len());
    let size = xs.len() / batches;
    let means: Vec<f64> = (0..batches)
        .map(|b| xs[b * size..(b + 1) * size].iter().sum::<f64>() / size as f64)
        .collect();
    let bm = means.iter().sum::<f64>() / batches as f64;
    let var = means.iter().map(|m| (m - bm).powi(2)).sum::<f64>() / (batches - 1).max(1) as f64;
    (mean, (var / batches as f64).sqrt())
}

/// How the tuning phase `φ(X)` enters the spinor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseCoupling {
    /// `Ψ → e^{iφ} Ψ`.
    Scalar,
    /// `Ψ → e^{iσ₃φ} Ψ`; opposite phases on the two components.
    #[default]
    Chiral,
}

/// Multiplies by the phase `φ(X) = α sin X + kX`. Pointwise density is
/// unchanged.
pub fn apply_phase(field: &SpinorField, alpha: f64, k: i64, coupling: PhaseCoupling) -> SpinorField {
    let grid = field.grid();
    let mut out = field.clone();
    let (a, b) = out.components_mut();
    for m in 0..a.len() {
        let x = grid.position(m);
        let phi = alpha * x.sin() + k as f64 * x;
        a[m] *= C64::cis(phi);
        b[m] *= match coupling {
            PhaseCoupling::Scalar => C64::cis(phi),
            PhaseCoupling::Chiral => C64::cis(-phi),
        };
    }
    out
}

/// Finds `α` (and, failing that, an integer winding `k`) such that the
/// phased field has energy `e_target` to `10⁻⁶·max(1, |e_target|)`.
///
/// With `params.dealias` the phased field is projected onto the band and
/// rescaled to the input's particle number before evaluating `E`, so the
/// returned field is a valid initial state of the truncated dynamics.
pub fn tune_phase_energy(
    field: &SpinorField,
    e_target: f64,
    params: &NldeParams,
    coupling: PhaseCoupling,
) -> Result<SpinorField> {
    let mut solver = Nlde::new(*params)?;
    let pi0 = {
        let mut f = field.clone();
        solver.project(&mut f);
        f.particle_number()
    };
    let tol = 1e-6 * e_target.abs().max(1.0);
    let mut lo_e = f64::INFINITY;
    let mut hi_e = f64::NEG_INFINITY;
    let mut build = |alpha: f64, k: i64, solver: &mut Nlde| {
        let mut f = apply_phase(field, alpha, k, coupling);
        if params.dealias {
            solver.project(&mut f);
            f.normalize_particle_number(pi0);
        }
        let e = solver.conserved(&f).energy;
        lo_e = lo_e.min(e);
        hi_e = hi_e.max(e);
        (f, e - e_target)
    };

    let max_k = (params.grid.cutoff() / 2).max(1) as i64;
    let windings = std::iter::once(0).chain((1..=max_k).flat_map(|k| [k, -k]));
    for k in windings {
        let (f0, r0) = build(0.0, k, &mut solver);
        if r0.abs() <= tol {
            return Ok(f0);
        }
        // march outwards in both directions; stop at the first sign change
        for dir in [1.0, -1.0] {
            let (mut a_prev, mut r_prev) = (0.0, r0);
            let mut h = 0.05;
            while h <= 64.0 {
                let a = dir * h;
                let (f, r) = build(a, k, &mut solver);
                if r.abs() <= tol {
                    return Ok(f);
                }
                if r.signum() != r_prev.signum() {
                    let (mut lo, mut hi, mut r_lo) = (a_prev, a, r_prev);
                    for _ in 0..200 {
                        let mid = 0.5 * (lo + hi);
                        let (f, r) = build(mid, k, &mut solver);
                        if r.abs() <= tol {
                            return Ok(f);
                        }
                        if r.signum() == r_lo.signum() {
                            lo = mid;
                            r_lo = r;
                        } else {
                            hi = mid;
                        }
                    }
                    break;
                }
                a_prev = a;
                r_prev = r;
                h *= 1.5;
            }
        }
    }
    Err(Error::UnreachableTarget {
        target: e_target,
        min: lo_e,
        max: hi_e,
    })
}

/// Stationary `⟨|c_k|²⟩` of the normalised mode `c_k = √N Ψ̂_k` for the
/// quadratic (g = 0, θ = 0) Hamiltonian, `η²/(2a_k)` with
/// `a_k = dx(∓k − μ)` for the upper/lower component.
pub fn quadratic_mode_variance(grid: GridSpec, eta: f64, mu: f64, k: i64, upper: bool) -> Result<f64> {
    let kk = k as f64;
    let a = grid.dx() * if upper { -kk - mu } else { kk - mu };
    if a <= 0.0 {
        return Err(crate::error::domain(format!(
            "mode k = {k} is not confined (a_k = {a}); need mu < -|k|"
        )));
    }
    Ok(eta * eta / (2.0 * a))
}
