//! Composite runs shared by the CLI and the acceptance suite.

use std::f64::consts::SQRT_2;

use num_complex::Complex64 as C64;

use crate::diagnostics::{asymmetry_about_site, least_squares_slope, relative_difference};
use crate::error::{config, Result};
use crate::field::{GridSpec, ShiftMethod, SpinorField};
use crate::nlde::{basis_change, gaussian_initial, BasisDirection, Nlde, NldeParams, DEFAULT_CFL};
use crate::walk::{delta_initial, perturb_asymmetric, run_walk, WalkParams, WalkState};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareParams {
    pub n: usize,
    pub g: f64,
    /// Walk steps; must be even.
    pub j: u64,
    /// Gaussian width in grid cells.
    pub sigma_cells: f64,
    pub dealias: bool,
    /// NLDE time step as a fraction of `dx`.
    pub cfl: f64,
}

impl CompareParams {
    pub fn new(n: usize, g: f64, j: u64) -> Self {
        Self {
            n,
            g,
            j,
            sigma_cells: 10.0,
            dealias: true,
            cfl: DEFAULT_CFL,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareResult {
    pub epsilon: f64,
    pub delta: f64,
    pub excluded: usize,
    /// `sqrt(Σ(Π_QW − Π_D)² / ΣΠ_D²)`, reported alongside `δ`.
    pub l2_relative: f64,
    /// Walk density divided by `dx`.
    pub walk_density: Vec<f64>,
    pub dirac_density: Vec<f64>,
}

/// Walk `j` steps from the Gaussian initial condition and integrate the
/// Dirac equation from the same data to the matching time.
///
/// The walk transports at speed `1/√2` in the continuum limit, so the
/// unit-speed equation is run with coupling `√2 g` to `T' = jε/√2`, which
/// is the same trajectory as speed `1/√2` and coupling `g` at `T = jε`.
pub fn compare_protocol(p: &CompareParams) -> Result<CompareResult> {
    if !p.j.is_multiple_of(2) {
        return Err(config(format!("comparison step j must be even, got {}", p.j)));
    }
    let grid = GridSpec::new(p.n)?;
    let dx = grid.dx();
    let initial = gaussian_initial(grid, p.sigma_cells * dx)?;

    let mut walk_field = initial.clone();
    walk_field.scale(C64::from(dx.sqrt()));
    let walk = run_walk(
        WalkState::new(walk_field),
        &WalkParams::new(grid, p.g),
        p.j,
        p.j.max(1),
        |_| {},
    )?;
    let walk_density: Vec<f64> = walk.field.density().iter().map(|d| d / dx).collect();

    let t_final = p.j as f64 * grid.epsilon() / SQRT_2;
    let steps = (t_final / (p.cfl * dx)).ceil().max(1.0) as u64;
    let params = NldeParams::new(grid, SQRT_2 * p.g)
        .with_dt(t_final / steps as f64)
        .with_dealias(p.dealias);
    let mut dirac = basis_change(&initial, BasisDirection::WalkToDirac);
    Nlde::new(params)?.integrate(&mut dirac, steps, steps, |_, _| {})?;
    let dirac_density = dirac.density();

    let r = relative_difference(&walk_density, &dirac_density)?;
    let num: f64 = walk_density
        .iter()
        .zip(&dirac_density)
        .map(|(w, d)| (w - d).powi(2))
        .sum();
    let den: f64 = dirac_density.iter().map(|d| d * d).sum();
    Ok(CompareResult {
        epsilon: grid.epsilon(),
        delta: r.delta,
        excluded: r.excluded,
        l2_relative: (num / den).sqrt(),
        walk_density,
        dirac_density,
    })
}

/// Slope of `log δ` against `log ε`.
pub fn log_log_slope(rows: &[(f64, f64)]) -> Result<f64> {
    let xs: Vec<f64> = rows.iter().map(|r| r.0.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.1.ln()).collect();
    least_squares_slope(&xs, &ys)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryParams {
    pub n: usize,
    pub g: f64,
    pub steps: u64,
    pub shift: ShiftMethod,
    /// `(amplitude, seed)` of asymmetric noise added to the delta initial
    /// condition.
    pub noise: Option<(f64, u64)>,
}

/// `|Γ_j|` about site 0 for every step of a walk from the delta initial
/// condition, as `(j, |Γ_j|)`.
pub fn symmetry_breaking_series(p: &SymmetryParams) -> Result<Vec<(f64, f64)>> {
    let grid = GridSpec::new(p.n)?;
    let mut init = delta_initial(grid);
    if let Some((amp, seed)) = p.noise {
        init = perturb_asymmetric(&init, amp, seed);
    }
    let mut out = Vec::with_capacity(p.steps as usize + 1);
    let mut err = None;
    run_walk(
        WalkState::new(init),
        &WalkParams::new(grid, p.g).with_shift(p.shift),
        p.steps,
        1,
        |s| match asymmetry_about_site(&s.field.density(), 0) {
            Ok(gamma) => out.push((s.j as f64, gamma.abs())),
            Err(e) => err = Some(e),
        },
    )?;
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Window `[first, last]` of samples with `lo < |Γ| < hi`, taken from the
/// first entry into that band up to the first exit above it.
pub fn growth_window(series: &[(f64, f64)], lo: f64, hi: f64) -> Option<std::ops::Range<usize>> {
    let start = series.iter().position(|&(_, v)| v > lo && v < hi)?;
    let end = series[start..]
        .iter()
        .position(|&(_, v)| v >= hi)
        .map_or(series.len(), |i| start + i);
    let window = start..end;
    (window.len() >= 2 && series[window.clone()].iter().all(|&(_, v)| v > 0.0)).then_some(window)
}

/// Gaussian initial condition rotated to the Dirac basis and projected if
/// `dealias`, renormalised to `Π = 1`.
pub fn dirac_gaussian(grid: GridSpec, sigma_cells: f64, dealias: bool) -> Result<SpinorField> {
    let mut f = basis_change(
        &gaussian_initial(grid, sigma_cells * grid.dx())?,
        BasisDirection::WalkToDirac,
    );
    if dealias {
        crate::field::Fourier::new(grid).project_field(&mut f);
        f.normalize_particle_number(1.0);
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odd_j_is_rejected() {
        assert!(compare_protocol(&CompareParams::new(64, 0.0, 3)).is_err());
    }

    #[test]
    fn linear_comparison_improves_with_resolution() {
        let coarse = compare_protocol(&CompareParams::new(64, 0.0, 100)).unwrap();
        let fine = compare_protocol(&CompareParams::new(128, 0.0, 200)).unwrap();
        assert!(fine.l2_relative < coarse.l2_relative);
        assert!(coarse.l2_relative < 0.2);
    }

    #[test]
    fn index_walk_keeps_exact_symmetry() {
        let s = symmetry_breaking_series(&SymmetryParams {
            n: 64,
            g: 10.0 * std::f64::consts::PI,
            steps: 300,
            shift: ShiftMethod::Index,
            noise: None,
        })
        .unwrap();
        assert!(s.iter().all(|&(_, v)| v == 0.0));
    }

    #[test]
    fn window_selection() {
        let s: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 10f64.powi(i - 8))).collect();
        assert_eq!(growth_window(&s, 5e-8, 5e-3), Some(1..6));
        assert_eq!(growth_window(&s, 1e3, 1e4), None);
    }
}
