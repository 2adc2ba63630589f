//! Periodic spinor fields on the `N`-point circle and their Fourier
//! representation.
//!
//! Collocation points are `X_m = 2πm/N`. The forward transform carries the
//! `1/N` factor,
//!
//! ```text
//! Ψ̂_k = (1/N) Σ_m Ψ(X_m) e^{-ikX_m},    Ψ(X_m) = Σ_k e^{ikX_m} Ψ̂_k,
//! ```
//!
//! with `k = -N/2 … N/2-1`. Spectral coefficients are stored in FFT order
//! internally; the public accessors index them by signed wavenumber.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};

use crate::error::{config, Result};

/// Number of collocation points and the derived grid spacing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    n: usize,
    dx: f64,
}

impl GridSpec {
    /// `n` must be even and at least 4.
    pub fn new(n: usize) -> Result<Self> {
        if n < 4 || !n.is_multiple_of(2) {
            return Err(config(format!("grid size N must be even and >= 4, got {n}")));
        }
        Ok(Self {
            n,
            dx: 2.0 * PI / n as f64,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Continuous-limit parameter `ε = 2π/N`; equal to `dx`.
    pub fn epsilon(&self) -> f64 {
        self.dx
    }

    /// `X_m ∈ [0, 2π)`.
    pub fn position(&self, m: usize) -> f64 {
        2.0 * PI * m as f64 / self.n as f64
    }

    /// `X_m` wrapped into `(-π, π]`.
    pub fn centered_position(&self, m: usize) -> f64 {
        let x = self.position(m);
        if x > PI {
            x - 2.0 * PI
        } else {
            x
        }
    }

    /// Largest retained `|k|` under the 2/3 rule.
    pub fn cutoff(&self) -> usize {
        self.n / 3
    }

    /// Signed wavenumber of FFT-order slot `index`.
    pub fn wavenumber(&self, index: usize) -> i64 {
        let n = self.n as i64;
        let i = index as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// FFT-order slot holding wavenumber `k`, for `k ∈ [-N/2, N/2)`.
    pub fn index_of(&self, k: i64) -> usize {
        let n = self.n as i64;
        assert!(
            (-n / 2..n / 2).contains(&k),
            "wavenumber {k} outside [-{}, {})",
            n / 2,
            n / 2
        );
        k.rem_euclid(n) as usize
    }
}

/// Two complex amplitudes at one site: components on `b₋` and `b₊`
/// (or on the Dirac eigenbasis, depending on context).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Spinor {
    pub minus: C64,
    pub plus: C64,
}

impl Spinor {
    pub fn new(minus: C64, plus: C64) -> Self {
        Self { minus, plus }
    }

    /// `Ψ†Ψ`.
    pub fn density(&self) -> f64 {
        self.minus.norm_sqr() + self.plus.norm_sqr()
    }

    /// `Ψ†σ₂Ψ = 2 Im(ψ₋* ψ₊)`.
    pub fn sigma2(&self) -> f64 {
        2.0 * (self.minus.conj() * self.plus).im
    }

    pub fn is_finite(&self) -> bool {
        self.minus.is_finite() && self.plus.is_finite()
    }
}

impl std::ops::Mul<C64> for Spinor {
    type Output = Spinor;

    fn mul(self, rhs: C64) -> Spinor {
        Spinor::new(self.minus * rhs, self.plus * rhs)
    }
}

/// A spinor value at each of the `N` collocation points.
///
/// Components are kept as two contiguous arrays so that each can be handed
/// to the FFT directly.
#[derive(Clone, PartialEq)]
pub struct SpinorField {
    grid: GridSpec,
    minus: Vec<C64>,
    plus: Vec<C64>,
}

impl fmt::Debug for SpinorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpinorField")
            .field("n", &self.grid.n)
            .field("particle_number", &self.particle_number())
            .finish()
    }
}

impl SpinorField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            minus: vec![C64::default(); grid.n],
            plus: vec![C64::default(); grid.n],
        }
    }

    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(usize) -> Spinor) -> Self {
        let mut field = Self::zeros(grid);
        for m in 0..grid.n {
            field.set(m, f(m));
        }
        field
    }

    pub fn from_components(grid: GridSpec, minus: Vec<C64>, plus: Vec<C64>) -> Result<Self> {
        if minus.len() != grid.n || plus.len() != grid.n {
            return Err(config(format!(
                "component lengths ({}, {}) do not match N = {}",
                minus.len(),
                plus.len(),
                grid.n
            )));
        }
        Ok(Self { grid, minus, plus })
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn len(&self) -> usize {
        self.grid.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, m: usize) -> Spinor {
        Spinor::new(self.minus[m], self.plus[m])
    }

    pub fn set(&mut self, m: usize, value: Spinor) {
        self.minus[m] = value.minus;
        self.plus[m] = value.plus;
    }

    pub fn minus(&self) -> &[C64] {
        &self.minus
    }

    pub fn plus(&self) -> &[C64] {
        &self.plus
    }

    pub fn components_mut(&mut self) -> (&mut [C64], &mut [C64]) {
        (&mut self.minus, &mut self.plus)
    }

    pub fn iter(&self) -> impl Iterator<Item = Spinor> + '_ {
        self.minus.iter().zip(&self.plus).map(|(&a, &b)| Spinor::new(a, b))
    }

    /// Pointwise `Ψ†Ψ`.
    pub fn density(&self) -> Vec<f64> {
        self.iter().map(|s| s.density()).collect()
    }

    /// `Σ_m Ψ_m†Ψ_m`, the walk's particle number.
    pub fn site_sum(&self) -> f64 {
        self.iter().map(|s| s.density()).sum()
    }

    /// Riemann sum `dx Σ_m Ψ_m†Ψ_m`, the continuum particle number.
    pub fn particle_number(&self) -> f64 {
        self.grid.dx * self.site_sum()
    }

    pub fn is_finite(&self) -> bool {
        self.iter().all(|s| s.is_finite())
    }

    pub fn scale(&mut self, factor: C64) {
        for z in self.minus.iter_mut().chain(self.plus.iter_mut()) {
            *z *= factor;
        }
    }

    /// Rescales so that the Riemann-sum particle number equals `target`.
    pub fn normalize_particle_number(&mut self, target: f64) {
        let current = self.particle_number();
        if current > 0.0 {
            self.scale(C64::from((target / current).sqrt()));
        }
    }

    pub fn max_abs_diff(&self, other: &SpinorField) -> f64 {
        self.minus
            .iter()
            .zip(&other.minus)
            .chain(self.plus.iter().zip(&other.plus))
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.minus
            .iter()
            .chain(&self.plus)
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// Fourier coefficients `Ψ̂_k` of both spin components.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    minus: Vec<C64>,
    plus: Vec<C64>,
}

impl SpectralField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            minus: vec![C64::default(); grid.n],
            plus: vec![C64::default(); grid.n],
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn coeff_minus(&self, k: i64) -> C64 {
        self.minus[self.grid.index_of(k)]
    }

    pub fn coeff_plus(&self, k: i64) -> C64 {
        self.plus[self.grid.index_of(k)]
    }

    pub fn set_coeff(&mut self, k: i64, minus: C64, plus: C64) {
        let i = self.grid.index_of(k);
        self.minus[i] = minus;
        self.plus[i] = plus;
    }

    /// All wavenumbers `-N/2 … N/2-1` in increasing order.
    pub fn wavenumbers(&self) -> impl Iterator<Item = i64> {
        let half = self.grid.n as i64 / 2;
        -half..half
    }

    /// `Σ_k |Ψ̂_k|²` over both components.
    pub fn power(&self) -> f64 {
        self.minus.iter().chain(&self.plus).map(|z| z.norm_sqr()).sum()
    }
}

/// Reusable FFT plans plus scratch for one grid size.
///
/// Each simulation owns its engine, so independent runs never share
/// mutable workspace.
#[derive(Clone)]
pub struct Fourier {
    grid: GridSpec,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<C64>,
}

impl Fourier {
    pub fn new(grid: GridSpec) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(grid.n);
        let inverse = planner.plan_fft_inverse(grid.n);
        let len = forward.get_inplace_scratch_len().max(inverse.get_inplace_scratch_len());
        Self {
            grid,
            forward,
            inverse,
            scratch: vec![C64::default(); len],
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    /// In place: physical values to coefficients (FFT order), with `1/N`.
    pub fn forward(&mut self, buf: &mut [C64]) {
        self.forward.process_with_scratch(buf, &mut self.scratch);
        let inv_n = 1.0 / self.grid.n as f64;
        for z in buf.iter_mut() {
            *z *= inv_n;
        }
    }

    /// In place: coefficients (FFT order) to physical values.
    pub fn inverse(&mut self, buf: &mut [C64]) {
        self.inverse.process_with_scratch(buf, &mut self.scratch);
    }

    /// Multiplies FFT-order coefficients by `ik`, with the Nyquist slot zeroed.
    pub fn differentiate_coeffs(&self, buf: &mut [C64]) {
        let nyquist = self.grid.n / 2;
        for (i, z) in buf.iter_mut().enumerate() {
            if i == nyquist {
                *z = C64::default();
            } else {
                *z *= C64::new(0.0, self.grid.wavenumber(i) as f64);
            }
        }
    }

    /// Zeroes FFT-order coefficients with `|k| > N/3`.
    pub fn truncate_coeffs(&self, buf: &mut [C64]) {
        let cutoff = self.grid.cutoff() as i64;
        for (i, z) in buf.iter_mut().enumerate() {
            if self.grid.wavenumber(i).abs() > cutoff {
                *z = C64::default();
            }
        }
    }

    /// Projects a physical-space buffer onto the retained band.
    pub fn project(&mut self, buf: &mut [C64]) {
        self.forward(buf);
        self.truncate_coeffs(buf);
        self.inverse(buf);
    }

    pub fn project_field(&mut self, field: &mut SpinorField) {
        let (a, b) = field.components_mut();
        self.project(a);
        self.project(b);
    }
}

pub fn forward_transform(field: &SpinorField) -> SpectralField {
    let mut fourier = Fourier::new(field.grid);
    let mut minus = field.minus.clone();
    let mut plus = field.plus.clone();
    fourier.forward(&mut minus);
    fourier.forward(&mut plus);
    SpectralField {
        grid: field.grid,
        minus,
        plus,
    }
}

pub fn inverse_transform(spec: &SpectralField) -> SpinorField {
    let mut fourier = Fourier::new(spec.grid);
    let mut minus = spec.minus.clone();
    let mut plus = spec.plus.clone();
    fourier.inverse(&mut minus);
    fourier.inverse(&mut plus);
    SpinorField {
        grid: spec.grid,
        minus,
        plus,
    }
}

/// `∂_X Ψ` by multiplication with `ik` in spectral space.
pub fn spectral_derivative(field: &SpinorField) -> SpinorField {
    let mut fourier = Fourier::new(field.grid);
    let mut out = field.clone();
    let (a, b) = out.components_mut();
    for buf in [a, b] {
        fourier.forward(buf);
        fourier.differentiate_coeffs(buf);
        fourier.inverse(buf);
    }
    out
}

/// How lattice translations are carried out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ShiftMethod {
    /// Exact index rotation.
    #[default]
    Index,
    /// Fourier phase `Ψ̂_k → Ψ̂_k e^{iks·2π/N}`; exact up to FFT round-off.
    Spectral,
}

/// Returns the field whose value at site `m` is the input's value at
/// `(m + offset) mod N`.
pub fn shift(field: &SpinorField, offset: isize, method: ShiftMethod) -> SpinorField {
    let mut out = field.clone();
    match method {
        ShiftMethod::Index => {
            let (a, b) = out.components_mut();
            rotate_by_index(&field.minus, offset, a);
            rotate_by_index(&field.plus, offset, b);
        }
        ShiftMethod::Spectral => {
            let mut fourier = Fourier::new(field.grid);
            let (a, b) = out.components_mut();
            shift_spectral(&mut fourier, a, offset);
            shift_spectral(&mut fourier, b, offset);
        }
    }
    out
}

pub(crate) fn rotate_by_index(src: &[C64], offset: isize, dst: &mut [C64]) {
    let n = src.len() as isize;
    for (m, z) in dst.iter_mut().enumerate() {
        *z = src[(m as isize + offset).rem_euclid(n) as usize];
    }
}

pub(crate) fn shift_spectral(fourier: &mut Fourier, buf: &mut [C64], offset: isize) {
    let grid = fourier.grid();
    fourier.forward(buf);
    let step = 2.0 * PI * offset as f64 / grid.n as f64;
    for (i, z) in buf.iter_mut().enumerate() {
        *z *= C64::from_polar(1.0, grid.wavenumber(i) as f64 * step);
    }
    fourier.inverse(buf);
}

/// 2/3-rule de-aliasing: zero every coefficient with `|k| > ⌊N/3⌋`.
pub fn dealias_23(spec: &SpectralField) -> SpectralField {
    let fourier = Fourier::new(spec.grid);
    let mut out = spec.clone();
    fourier.truncate_coeffs(&mut out.minus);
    fourier.truncate_coeffs(&mut out.plus);
    out
}

/// Physical-space form of [`dealias_23`].
pub fn project_23(field: &SpinorField) -> SpinorField {
    let mut fourier = Fourier::new(field.grid);
    let mut out = field.clone();
    fourier.project_field(&mut out);
    out
}
