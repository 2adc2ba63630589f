//! Galerkin-truncated nonlinear Dirac equation on the circle.
//!
//! In the Dirac eigenbasis the dynamics read
//!
//! ```text
//! ∂_T Ψ = σ₃ ∂_X Ψ + (3ig/4) n Ψ − (ig/4) s σ₂ Ψ,    n = Ψ†Ψ,  s = Ψ†σ₂Ψ,
//! ```
//!
//! the Hamiltonian flow `∂_T Ψ_m = −(i/dx) ∂H/∂Ψ*_m` of
//!
//! ```text
//! E = dx Σ_m [ −Im(Ψ†σ₃∂_XΨ) − (g/8)(3n² − s²) ].
//! ```
//!
//! With de-aliasing on, the state, both quadratic densities and the cubic
//! term are projected onto `|k| ≤ ⌊N/3⌋`, which makes `Π`, `E` and `P` exact
//! invariants of the semi-discrete system.

use std::f64::consts::{FRAC_PI_8, PI};

use num_complex::Complex64 as C64;

use crate::error::{config, Error, Result};
use crate::field::{Fourier, GridSpec, Spinor, SpinorField};

/// CFL factor of the default time step.
pub const DEFAULT_CFL: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NldeParams {
    pub g: f64,
    pub grid: GridSpec,
    pub dt: f64,
    pub dealias: bool,
}

impl NldeParams {
    /// De-aliased, `dt = 0.1 dx`.
    pub fn new(grid: GridSpec, g: f64) -> Self {
        Self {
            g,
            grid,
            dt: DEFAULT_CFL * grid.dx(),
            dealias: true,
        }
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn with_dealias(mut self, dealias: bool) -> Self {
        self.dealias = dealias;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.g.is_finite() {
            return Err(config(format!("g must be finite, got {}", self.g)));
        }
        if !(self.dt.is_finite() && self.dt >= 0.0) {
            return Err(config(format!("dt must be finite and >= 0, got {}", self.dt)));
        }
        if self.dt > self.grid.dx() {
            log::warn!(
                "dt = {} exceeds the CFL bound dx = {} for unit transport speed",
                self.dt,
                self.grid.dx()
            );
        }
        Ok(())
    }
}

/// `(Π, E, P)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ConservedQuantities {
    pub particle_number: f64,
    pub energy: f64,
    pub momentum: f64,
}

impl ConservedQuantities {
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.particle_number - other.particle_number)
            .abs()
            .max((self.energy - other.energy).abs())
            .max((self.momentum - other.momentum).abs())
    }
}

/// Solver state for one trajectory: FFT plans and all scratch buffers.
pub struct Nlde {
    params: NldeParams,
    fourier: Fourier,
    fa: Vec<C64>,
    fb: Vec<C64>,
    pa: Vec<C64>,
    pb: Vec<C64>,
    da: Vec<C64>,
    db: Vec<C64>,
    dens: Vec<C64>,
    // RK4 stage input, stage slope and accumulator
    sa: Vec<C64>,
    sb: Vec<C64>,
    ka: Vec<C64>,
    kb: Vec<C64>,
}

impl Nlde {
    pub fn new(params: NldeParams) -> Result<Self> {
        params.validate()?;
        let n = params.grid.n();
        let z = || vec![C64::default(); n];
        Ok(Self {
            params,
            fourier: Fourier::new(params.grid),
            fa: z(),
            fb: z(),
            pa: z(),
            pb: z(),
            da: z(),
            db: z(),
            dens: z(),
            sa: z(),
            sb: z(),
            ka: z(),
            kb: z(),
        })
    }

    pub fn params(&self) -> &NldeParams {
        &self.params
    }

    fn check_grid(&self, field: &SpinorField) -> Result<()> {
        if field.grid() != self.params.grid {
            return Err(config("field grid does not match solver parameters"));
        }
        Ok(())
    }

    /// Projects onto the retained band; no-op without de-aliasing.
    pub fn project(&mut self, field: &mut SpinorField) {
        if self.params.dealias {
            self.fourier.project_field(field);
        }
    }

    /// Right-hand side, assembled in spectral space.
    pub fn rhs(&mut self, field: &SpinorField) -> Result<SpinorField> {
        self.check_grid(field)?;
        if !field.is_finite() {
            return Err(Error::Integration("non-finite field passed to rhs".into()));
        }
        let mut out = SpinorField::zeros(self.params.grid);
        let (ra, rb) = out.components_mut();
        self.rhs_raw(field.minus(), field.plus(), false, ra, rb);
        Ok(out)
    }

    /// `banded` promises that `a, b` already lie in the retained band.
    fn rhs_raw(&mut self, a: &[C64], b: &[C64], banded: bool, ra: &mut [C64], rb: &mut [C64]) {
        let dealias = self.params.dealias;
        let g = self.params.g;
        let Self {
            fourier,
            fa,
            fb,
            pa,
            pb,
            da,
            db,
            dens,
            ..
        } = self;

        fa.copy_from_slice(a);
        fb.copy_from_slice(b);
        fourier.forward(fa);
        fourier.forward(fb);
        let (sa, sb): (&[C64], &[C64]) = if dealias && !banded {
            fourier.truncate_coeffs(fa);
            fourier.truncate_coeffs(fb);
            pa.copy_from_slice(fa);
            pb.copy_from_slice(fb);
            fourier.inverse(pa);
            fourier.inverse(pb);
            (pa, pb)
        } else {
            (a, b)
        };

        densities(sa, sb, dens);
        if dealias {
            fourier.project(dens);
        }
        let c3 = C64::new(0.0, 0.75 * g);
        for m in 0..sa.len() {
            let (n, s) = (dens[m].re, dens[m].im);
            da[m] = c3 * n * sa[m] - 0.25 * g * s * sb[m];
            db[m] = c3 * n * sb[m] + 0.25 * g * s * sa[m];
        }
        fourier.forward(da);
        fourier.forward(db);
        if dealias {
            fourier.truncate_coeffs(da);
            fourier.truncate_coeffs(db);
        }

        let grid = fourier.grid();
        let nyquist = grid.n() / 2;
        for i in 0..grid.n() {
            let ik = if i == nyquist {
                C64::default()
            } else {
                C64::new(0.0, grid.wavenumber(i) as f64)
            };
            ra[i] = ik * fa[i] + da[i];
            rb[i] = -ik * fb[i] + db[i];
        }
        fourier.inverse(ra);
        fourier.inverse(rb);
    }

    /// One classical RK4 step of length `dt`, in place, followed by the band
    /// projection.
    pub fn step(&mut self, field: &mut SpinorField) -> Result<()> {
        self.check_grid(field)?;
        if !field.is_finite() {
            return Err(Error::Integration("non-finite field entering RK4 step".into()));
        }
        let dt = self.params.dt;
        self.project(field);

        let mut sa = std::mem::take(&mut self.sa);
        let mut sb = std::mem::take(&mut self.sb);
        let mut ka = std::mem::take(&mut self.ka);
        let mut kb = std::mem::take(&mut self.kb);
        let (ya, yb) = field.components_mut();
        let mut acc_a = ya.to_vec();
        let mut acc_b = yb.to_vec();

        let stages = [(0.5, 1.0 / 6.0), (0.5, 1.0 / 3.0), (1.0, 1.0 / 3.0), (0.0, 1.0 / 6.0)];
        sa.copy_from_slice(ya);
        sb.copy_from_slice(yb);
        for (next, weight) in stages {
            self.rhs_raw(&sa, &sb, true, &mut ka, &mut kb);
            for m in 0..ya.len() {
                acc_a[m] += dt * weight * ka[m];
                acc_b[m] += dt * weight * kb[m];
                sa[m] = ya[m] + dt * next * ka[m];
                sb[m] = yb[m] + dt * next * kb[m];
            }
        }
        ya.copy_from_slice(&acc_a);
        yb.copy_from_slice(&acc_b);
        self.sa = sa;
        self.sb = sb;
        self.ka = ka;
        self.kb = kb;

        self.project(field);
        if !field.is_finite() {
            return Err(Error::Integration(format!(
                "field became non-finite during RK4 step with dt = {dt}"
            )));
        }
        Ok(())
    }

    /// Runs `steps` RK4 steps. `observe(step, field)` sees step 0, every
    /// multiple of `stride`, and the final step.
    pub fn integrate(
        &mut self,
        field: &mut SpinorField,
        steps: u64,
        stride: u64,
        mut observe: impl FnMut(u64, &SpinorField),
    ) -> Result<()> {
        let stride = stride.max(1);
        observe(0, field);
        for i in 1..=steps {
            self.step(field)?;
            if i % stride == 0 || i == steps {
                observe(i, field);
            }
        }
        Ok(())
    }

    /// Band-limited state, its derivative, and the projected densities,
    /// evaluated in physical space.
    fn physical_terms(&mut self, field: &SpinorField) {
        let dealias = self.params.dealias;
        let Self {
            fourier,
            pa,
            pb,
            da,
            db,
            dens,
            ..
        } = self;
        pa.copy_from_slice(field.minus());
        pb.copy_from_slice(field.plus());
        if dealias {
            fourier.project(pa);
            fourier.project(pb);
        }
        for (src, dst) in [(&*pa, &mut *da), (&*pb, &mut *db)] {
            dst.copy_from_slice(src);
            fourier.forward(dst);
            fourier.differentiate_coeffs(dst);
            fourier.inverse(dst);
        }
        densities(pa, pb, dens);
        if dealias {
            fourier.project(dens);
        }
    }

    pub fn conserved(&mut self, field: &SpinorField) -> ConservedQuantities {
        self.physical_terms(field);
        let dx = self.params.grid.dx();
        let g = self.params.g;
        let (mut pi, mut kin, mut mom, mut nl) = (0.0, 0.0, 0.0, 0.0);
        for m in 0..self.pa.len() {
            let (a, b) = (self.pa[m], self.pb[m]);
            let (da, db) = (self.da[m], self.db[m]);
            let (n, s) = (self.dens[m].re, self.dens[m].im);
            pi += a.norm_sqr() + b.norm_sqr();
            mom += (a.conj() * da + b.conj() * db).im;
            kin -= (a.conj() * da - b.conj() * db).im;
            nl += 3.0 * n * n - s * s;
        }
        ConservedQuantities {
            particle_number: dx * pi,
            energy: dx * (kin - 0.125 * g * nl),
            momentum: dx * mom,
        }
    }

    /// `H_{θμ} = E − θP − μΠ`.
    pub fn hamiltonian(&mut self, field: &SpinorField, theta: f64, mu: f64) -> f64 {
        let q = self.conserved(field);
        q.energy - theta * q.momentum - mu * q.particle_number
    }

    /// `∂H_{θμ}/∂Ψ*_m`, written in physical space.
    pub fn grad_h(&mut self, field: &SpinorField, theta: f64, mu: f64) -> SpinorField {
        let mut out = SpinorField::zeros(self.params.grid);
        self.grad_h_into(field, theta, mu, &mut out);
        out
    }

    pub fn grad_h_into(&mut self, field: &SpinorField, theta: f64, mu: f64, out: &mut SpinorField) {
        self.physical_terms(field);
        let dx = self.params.grid.dx();
        let g = self.params.g;
        let i = C64::i();
        let (ga, gb) = out.components_mut();
        for m in 0..ga.len() {
            let (a, b) = (self.pa[m], self.pb[m]);
            let (da, db) = (self.da[m], self.db[m]);
            let (n, s) = (self.dens[m].re, self.dens[m].im);
            let local = -mu - 0.75 * g * n;
            ga[m] = dx * (i * da + i * theta * da + local * a + 0.25 * g * s * (-i * b));
            gb[m] = dx * (-i * db + i * theta * db + local * b + 0.25 * g * s * (i * a));
        }
        if self.params.dealias {
            self.fourier.project(ga);
            self.fourier.project(gb);
        }
    }
}

fn densities(a: &[C64], b: &[C64], out: &mut [C64]) {
    for m in 0..a.len() {
        let s = Spinor::new(a[m], b[m]);
        out[m] = C64::new(s.density(), s.sigma2());
    }
}

pub fn nlde_rhs(field: &SpinorField, params: &NldeParams) -> Result<SpinorField> {
    Nlde::new(*params)?.rhs(field)
}

pub fn rk4_step(field: &SpinorField, params: &NldeParams) -> Result<SpinorField> {
    let mut out = field.clone();
    Nlde::new(*params)?.step(&mut out)?;
    Ok(out)
}

/// `(Π, E, P)` as Riemann sums. With `params.dealias` these are the
/// invariants of the truncated system.
pub fn conserved_quantities(field: &SpinorField, params: &NldeParams) -> Result<ConservedQuantities> {
    Ok(Nlde::new(*params)?.conserved(field))
}

pub fn grad_h(field: &SpinorField, params: &NldeParams, theta: f64, mu: f64) -> Result<SpinorField> {
    Ok(Nlde::new(*params)?.grad_h(field, theta, mu))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisDirection {
    WalkToDirac,
    DiracToWalk,
}

/// Rotation between the walk basis `(b₋, b₊)` and the eigenbasis
/// `B₋ = cos(π/8) b₋ + sin(π/8) b₊`, `B₊ = sin(π/8) b₋ − cos(π/8) b₊`.
/// The matrix is a reflection, hence its own inverse.
pub fn basis_change(field: &SpinorField, direction: BasisDirection) -> SpinorField {
    let (c, s) = (FRAC_PI_8.cos(), FRAC_PI_8.sin());
    match direction {
        BasisDirection::WalkToDirac | BasisDirection::DiracToWalk => {
            let mut out = field.clone();
            let (a, b) = out.components_mut();
            for m in 0..a.len() {
                let (x, y) = (a[m], b[m]);
                a[m] = c * x + s * y;
                b[m] = s * x - c * y;
            }
            out
        }
    }
}

/// Gaussian bump `f(X) = exp(−X²/√(2σ²)) / (2πσ)` on `(b₋ + i b₊)/√2` with `X`
/// wrapped into `(−π, π]`, normalised so that `dx Σ Ψ†Ψ = 1`. Walk basis.
pub fn gaussian_initial(grid: GridSpec, sigma: f64) -> Result<SpinorField> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(config(format!("sigma must be positive, got {sigma}")));
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut field = SpinorField::from_fn(grid, |m| {
        let x = grid.centered_position(m);
        let f = (-x * x / (2.0 * sigma * sigma).sqrt()).exp() / (2.0 * PI * sigma);
        Spinor::new(C64::new(f * r, 0.0), C64::new(0.0, f * r))
    });
    field.normalize_particle_number(1.0);
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::NoiseGenerator;

    fn grid(n: usize) -> GridSpec {
        GridSpec::new(n).unwrap()
    }

    fn plane(grid: GridSpec, k: i64, upper: bool) -> SpinorField {
        let amp = (2.0 * PI).sqrt().recip();
        SpinorField::from_fn(grid, |m| {
            let w = C64::from_polar(amp, k as f64 * grid.position(m));
            if upper {
                Spinor::new(w, C64::default())
            } else {
                Spinor::new(C64::default(), w)
            }
        })
    }

    fn random_field(grid: GridSpec, seed: u64) -> SpinorField {
        let mut rng = NoiseGenerator::new(seed);
        SpinorField::from_fn(grid, |_| Spinor::new(rng.complex(), rng.complex()))
    }

    #[test]
    fn linear_rhs_is_sigma3_transport() {
        let g = grid(32);
        let p = NldeParams::new(g, 0.0);
        for k in [-3, 1, 4] {
            let up = plane(g, k, true);
            let r = nlde_rhs(&up, &p).unwrap();
            let down = plane(g, k, false);
            let rd = nlde_rhs(&down, &p).unwrap();
            for m in 0..32 {
                let ik = C64::new(0.0, k as f64);
                assert!((r.get(m).minus - ik * up.get(m).minus).norm() < 1e-13);
                assert!(r.get(m).plus.norm() < 1e-13);
                assert!((rd.get(m).plus + ik * down.get(m).plus).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn constant_field_rhs() {
        let g = grid(16);
        let coupling = 2.7;
        let field = SpinorField::from_fn(g, |_| Spinor::new(C64::new(1.0, 0.0), C64::default()));
        let r = nlde_rhs(&field, &NldeParams::new(g, coupling)).unwrap();
        for s in r.iter() {
            assert!((s.minus - C64::new(0.0, 0.75 * coupling)).norm() < 1e-13);
            assert!(s.plus.norm() < 1e-13);
        }
    }

    #[test]
    fn plane_wave_invariants() {
        let g = grid(64);
        let coupling = 10.0 * PI;
        let p = NldeParams::new(g, coupling);
        let constant = plane(g, 0, true);
        let q0 = conserved_quantities(&constant, &p).unwrap();
        assert!((q0.particle_number - 1.0).abs() < 1e-13);
        assert!(q0.momentum.abs() < 1e-13);
        for k in [1, 5] {
            let q = conserved_quantities(&plane(g, k, true), &p).unwrap();
            assert!((q.momentum - k as f64).abs() < 1e-12);
            let expected = -(k as f64) - 3.0 * coupling / 8.0 / (2.0 * PI);
            assert!((q.energy - expected).abs() < 1e-12, "{} vs {expected}", q.energy);
        }
    }

    #[test]
    fn linear_gradient_and_mu_term() {
        let g = grid(16);
        let p = NldeParams::new(g, 0.0);
        let mut field = random_field(g, 5);
        let mut solver = Nlde::new(p).unwrap();
        solver.project(&mut field);
        let grad = solver.grad_h(&field, 0.0, 0.0);
        let rhs = solver.rhs(&field).unwrap();
        for m in 0..16 {
            let back = grad.get(m) * C64::new(0.0, -1.0 / g.dx());
            assert!((back.minus - rhs.get(m).minus).norm() < 1e-12);
            assert!((back.plus - rhs.get(m).plus).norm() < 1e-12);
        }
        let with_mu = solver.grad_h(&field, 0.0, 1.5);
        for m in 0..16 {
            let d = with_mu.get(m).minus - grad.get(m).minus;
            assert!((d + 1.5 * g.dx() * field.get(m).minus).norm() < 1e-13);
        }
    }

    #[test]
    fn rk4_zero_step_is_identity() {
        let g = grid(32);
        let mut field = random_field(g, 2);
        let p = NldeParams::new(g, 10.0 * PI);
        Nlde::new(p).unwrap().project(&mut field);
        let out = rk4_step(&field, &p.with_dt(0.0)).unwrap();
        assert!(out.max_abs_diff(&field) < 1e-14);
    }

    #[test]
    fn rk4_single_mode_matches_exact_transport() {
        let g = grid(32);
        let field = plane(g, 1, true);
        let dt = 1e-2;
        let out = rk4_step(&field, &NldeParams::new(g, 0.0).with_dt(dt)).unwrap();
        for m in 0..32 {
            let exact = C64::from_polar((2.0 * PI).sqrt().recip(), g.position(m) + dt);
            assert!((out.get(m).minus - exact).norm() < 1e-9);
        }
    }

    #[test]
    fn rk4_is_fourth_order() {
        let g = grid(64);
        let init = basis_change(
            &gaussian_initial(g, 10.0 * g.dx()).unwrap(),
            BasisDirection::WalkToDirac,
        );
        let t = 0.5;
        let run = |steps: u64| {
            let p = NldeParams::new(g, 10.0 * PI).with_dt(t / steps as f64);
            let mut f = init.clone();
            Nlde::new(p)
                .unwrap()
                .integrate(&mut f, steps, steps, |_, _| {})
                .unwrap();
            f
        };
        let fields: Vec<_> = [50, 100, 200, 400].iter().map(|&s| run(s)).collect();
        let errs: Vec<f64> = fields.windows(2).map(|w| w[0].max_abs_diff(&w[1])).collect();
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!((order - 4.0).abs() < 0.3, "order {order}, errors {errs:?}");
        }
    }

    #[test]
    fn basis_change_properties() {
        let g = grid(16);
        let field = random_field(g, 9);
        let d = basis_change(&field, BasisDirection::WalkToDirac);
        for m in 0..16 {
            assert!((d.get(m).density() - field.get(m).density()).abs() < 1e-14);
        }
        let back = basis_change(&d, BasisDirection::DiracToWalk);
        assert!(back.max_abs_diff(&field) < 1e-14);

        let b_minus = SpinorField::from_fn(g, |_| {
            Spinor::new(C64::from(FRAC_PI_8.cos()), C64::from(FRAC_PI_8.sin()))
        });
        let coords = basis_change(&b_minus, BasisDirection::WalkToDirac);
        assert!((coords.get(0).minus - 1.0).norm() < 1e-15);
        assert!(coords.get(0).plus.norm() < 1e-15);
    }

    #[test]
    fn gaussian_initial_shape() {
        let g = grid(128);
        let f = gaussian_initial(g, 10.0 * g.dx()).unwrap();
        assert!((f.particle_number() - 1.0).abs() < 1e-12);
        for m in 1..64 {
            assert!((f.get(m).density() - f.get(128 - m).density()).abs() < 1e-14);
        }
        for s in f.iter().filter(|s| s.minus.norm() > 0.0) {
            assert!((s.plus / s.minus - C64::i()).norm() < 1e-12);
        }
        assert!(gaussian_initial(g, 0.0).is_err());
    }

    #[test]
    fn global_phase_covariance() {
        let g = grid(32);
        let p = NldeParams::new(g, 10.0 * PI);
        let field = random_field(g, 11);
        let phase = C64::cis(0.7);
        let mut rotated = field.clone();
        rotated.scale(phase);
        let r0 = nlde_rhs(&field, &p).unwrap();
        let r1 = nlde_rhs(&rotated, &p).unwrap();
        let mut expect = r0.clone();
        expect.scale(phase);
        assert!(r1.max_abs_diff(&expect) < 1e-11 * r0.max_abs());
        let q0 = conserved_quantities(&field, &p).unwrap();
        let q1 = conserved_quantities(&rotated, &p).unwrap();
        assert!(q0.max_abs_diff(&q1) < 1e-13 * q0.energy.abs().max(1.0));
    }

    #[test]
    fn nan_is_an_integration_error() {
        let g = grid(16);
        let mut f = random_field(g, 1);
        f.set(2, Spinor::new(C64::new(f64::INFINITY, 0.0), C64::default()));
        assert!(matches!(
            rk4_step(&f, &NldeParams::new(g, 1.0)),
            Err(Error::Integration(_))
        ));
    }
}
