//! Invariants of the truncated semi-discrete system, separated from the
//! time-stepping error.

use std::f64::consts::PI;

use galton_dirac::diagnostics::conservation_drift;
use galton_dirac::experiments::dirac_gaussian;
use galton_dirac::{GridSpec, Nlde, NldeParams};

fn max_energy_drift(dt: f64, t: f64, dealias: bool) -> (f64, f64, f64) {
    let grid = GridSpec::new(64).unwrap();
    let params = NldeParams::new(grid, 10.0 * PI).with_dt(dt).with_dealias(dealias);
    let mut field = dirac_gaussian(grid, 10.0, dealias).unwrap();
    let mut probe = Nlde::new(params).unwrap();
    let mut series = Vec::new();
    let steps = (t / dt).round() as u64;
    Nlde::new(params)
        .unwrap()
        .integrate(&mut field, steps, steps / 20, |_, f| series.push(probe.conserved(f)))
        .unwrap();
    conservation_drift(&series).unwrap().max_abs()
}

#[test]
fn dealiased_drift_is_pure_time_step_error() {
    // halving dt must shrink every drift by roughly 2⁴ or more
    let coarse = max_energy_drift(1.6e-2, 20.0, true);
    let fine = max_energy_drift(8e-3, 20.0, true);
    for (c, f) in [(coarse.0, fine.0), (coarse.1, fine.1), (coarse.2, fine.2)] {
        assert!(c / f > 12.0, "coarse {c:e}, fine {f:e}");
    }
}

#[test]
fn aliasing_breaks_momentum_conservation() {
    let (_, p_alias, _) = max_energy_drift(4e-3, 20.0, false);
    let (_, p_clean, _) = max_energy_drift(4e-3, 20.0, true);
    assert!(p_alias > 1e3 * p_clean, "aliased {p_alias:e}, dealiased {p_clean:e}");
}
