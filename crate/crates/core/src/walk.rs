//! The nonlinear optical Galton board: a Hadamard walk on the `N`-site circle
//! with an intensity-dependent phase applied to each coin component.
//!
//! ```text
//! ψ⁻_{j+1,m} = [e^{ig|ψ⁻_{j,m+1}|²}ψ⁻_{j,m+1} + e^{ig|ψ⁺_{j,m+1}|²}ψ⁺_{j,m+1}] / √2
//! ψ⁺_{j+1,m} = [e^{ig|ψ⁻_{j,m-1}|²}ψ⁻_{j,m-1} − e^{ig|ψ⁺_{j,m-1}|²}ψ⁺_{j,m-1}] / √2
//! ```

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;

use crate::error::{config, Error, Result};
use crate::field::{rotate_by_index, shift_spectral, Fourier, GridSpec, ShiftMethod, Spinor, SpinorField};
use crate::noise::NoiseGenerator;

// 1/√2 split into a double plus its rounding residual. Multiplying by the
// rounded constant alone inflates Π by ~1e-16 per step, systematically.
const HADAMARD_HI: f64 = FRAC_1_SQRT_2;
const HADAMARD_LO: f64 = -4.833646656726457e-17;

fn scale_inv_sqrt2(z: C64) -> C64 {
    C64::new(
        z.re.mul_add(HADAMARD_HI, z.re * HADAMARD_LO),
        z.im.mul_add(HADAMARD_HI, z.im * HADAMARD_LO),
    )
}

/// Largest grid the dense oracle will build (a `2N × 2N` matrix).
pub const ORACLE_MAX_N: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkParams {
    pub g: f64,
    pub grid: GridSpec,
    /// How the `m ± 1` accesses are realised. [`ShiftMethod::Index`] keeps
    /// mirror symmetry bit-exact; [`ShiftMethod::Spectral`] injects FFT
    /// round-off, as a pseudo-spectral code does.
    pub shift: ShiftMethod,
}

impl WalkParams {
    pub fn new(grid: GridSpec, g: f64) -> Self {
        Self {
            g,
            grid,
            shift: ShiftMethod::Index,
        }
    }

    pub fn with_shift(mut self, shift: ShiftMethod) -> Self {
        self.shift = shift;
        self
    }

    fn validate(&self) -> Result<()> {
        if !self.g.is_finite() {
            return Err(config(format!("g must be finite, got {}", self.g)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkState {
    pub j: u64,
    pub field: SpinorField,
}

impl WalkState {
    pub fn new(field: SpinorField) -> Self {
        Self { j: 0, field }
    }

    /// `Π_j = Σ_m Ψ†Ψ`.
    pub fn particle_number(&self) -> f64 {
        self.field.site_sum()
    }
}

/// Stateful stepper that reuses its buffers (and FFT plans when the
/// spectral shift is selected) across steps.
pub struct Walker {
    params: WalkParams,
    fourier: Option<Fourier>,
    up: Vec<C64>,
    down: Vec<C64>,
}

impl Walker {
    pub fn new(params: WalkParams) -> Result<Self> {
        params.validate()?;
        let n = params.grid.n();
        let fourier = match params.shift {
            ShiftMethod::Index => None,
            ShiftMethod::Spectral => Some(Fourier::new(params.grid)),
        };
        Ok(Self {
            params,
            fourier,
            up: vec![C64::default(); n],
            down: vec![C64::default(); n],
        })
    }

    pub fn params(&self) -> &WalkParams {
        &self.params
    }

    /// Advances `state` by one step in place.
    pub fn step(&mut self, state: &mut WalkState) -> Result<()> {
        if state.field.grid() != self.params.grid {
            return Err(config("walk state grid does not match parameters"));
        }
        if !state.field.is_finite() {
            return Err(Error::Integration(format!(
                "non-finite amplitude entering walk step {}",
                state.j
            )));
        }
        let g = self.params.g;
        {
            let (minus, plus) = (state.field.minus(), state.field.plus());
            for m in 0..minus.len() {
                let a = minus[m] * C64::cis(g * minus[m].norm_sqr());
                let b = plus[m] * C64::cis(g * plus[m].norm_sqr());
                self.up[m] = scale_inv_sqrt2(a + b);
                self.down[m] = scale_inv_sqrt2(a - b);
            }
        }
        let (minus, plus) = state.field.components_mut();
        match self.fourier.as_mut() {
            None => {
                rotate_by_index(&self.up, 1, minus);
                rotate_by_index(&self.down, -1, plus);
            }
            Some(fourier) => {
                shift_spectral(fourier, &mut self.up, 1);
                shift_spectral(fourier, &mut self.down, -1);
                minus.copy_from_slice(&self.up);
                plus.copy_from_slice(&self.down);
            }
        }
        state.j += 1;
        Ok(())
    }
}

/// One application of the walk map.
pub fn walk_step(state: &WalkState, params: &WalkParams) -> Result<WalkState> {
    let mut next = state.clone();
    Walker::new(*params)?.step(&mut next)?;
    Ok(next)
}

/// Applies `steps` walk steps. `observe` sees the state at every `j` that is a
/// multiple of `stride` (including the initial one) and the final state.
pub fn run_walk(
    initial: WalkState,
    params: &WalkParams,
    steps: u64,
    stride: u64,
    mut observe: impl FnMut(&WalkState),
) -> Result<WalkState> {
    let stride = stride.max(1);
    let mut walker = Walker::new(*params)?;
    let mut state = initial;
    let end = state.j + steps;
    observe(&state);
    while state.j < end {
        walker.step(&mut state)?;
        if state.j.is_multiple_of(stride) || state.j == end {
            observe(&state);
        }
    }
    Ok(state)
}

/// Dense g = 0 one-step matrix, written row by row from the update rule.
/// Layout: slot `2m` holds `ψ⁻_m`, slot `2m+1` holds `ψ⁺_m`.
pub fn hadamard_matrix(grid: GridSpec) -> Result<Vec<Vec<f64>>> {
    let n = grid.n();
    if n > ORACLE_MAX_N {
        return Err(config(format!("dense oracle limited to N <= {ORACLE_MAX_N}, got {n}")));
    }
    let h = FRAC_1_SQRT_2;
    let mut u = vec![vec![0.0; 2 * n]; 2 * n];
    for m in 0..n {
        let right = (m + 1) % n;
        let left = (m + n - 1) % n;
        u[2 * m][2 * right] = h;
        u[2 * m][2 * right + 1] = h;
        u[2 * m + 1][2 * left] = h;
        u[2 * m + 1][2 * left + 1] = -h;
    }
    Ok(u)
}

/// Linear (g = 0) evolution by repeated dense matrix-vector products.
pub fn hadamard_oracle(initial: &WalkState, steps: u64) -> Result<WalkState> {
    let grid = initial.field.grid();
    let u = hadamard_matrix(grid)?;
    let n = grid.n();
    let mut v: Vec<C64> = (0..n)
        .flat_map(|m| {
            let s = initial.field.get(m);
            [s.minus, s.plus]
        })
        .collect();
    let mut w = vec![C64::default(); 2 * n];
    for _ in 0..steps {
        for (row, out) in u.iter().zip(w.iter_mut()) {
            *out = row.iter().zip(&v).map(|(&a, &z)| z * a).sum();
        }
        std::mem::swap(&mut v, &mut w);
    }
    let field = SpinorField::from_fn(grid, |m| Spinor::new(v[2 * m], v[2 * m + 1]));
    Ok(WalkState {
        j: initial.j + steps,
        field,
    })
}

/// `Ψ_{0,m} = δ_{0,m}(b₋ + i b₊)/√2`.
pub fn delta_initial(grid: GridSpec) -> SpinorField {
    let mut field = SpinorField::zeros(grid);
    field.set(
        0,
        Spinor::new(C64::new(FRAC_1_SQRT_2, 0.0), C64::new(0.0, FRAC_1_SQRT_2)),
    );
    field
}

/// Adds independent complex noise of the given amplitude to every component
/// and rescales back to the original site sum. Generic noise has no mirror
/// symmetry, so this seeds symmetry breaking above round-off level.
pub fn perturb_asymmetric(field: &SpinorField, amplitude: f64, seed: u64) -> SpinorField {
    let before = field.site_sum();
    let mut rng = NoiseGenerator::new(seed);
    let mut out = field.clone();
    let (minus, plus) = out.components_mut();
    for z in minus.iter_mut().chain(plus.iter_mut()) {
        let re = rng.normal();
        let im = rng.normal();
        *z += C64::new(re, im) * amplitude;
    }
    let after = out.site_sum();
    if after > 0.0 {
        out.scale(C64::from((before / after).sqrt()));
    }
    out
}
