use std::f64::consts::PI;

use galton_dirac::diagnostics::ks_distance;
use galton_dirac::gibbs::sample_gibbs_with;
use galton_dirac::{GibbsParams, GridSpec};

fn chain(seed: u64, dt: f64, steps: u64) -> (f64, Vec<f64>) {
    let grid = GridSpec::new(32).unwrap();
    let mut p = GibbsParams::new(grid, 10.0 * PI, 1.0, seed);
    p.dt = dt;
    p.steps = steps;
    p.record_stride = steps / 500;
    let burn = steps / 5;
    let mut samples = Vec::new();
    let run = sample_gibbs_with(&p, |step, f| {
        if step >= burn {
            samples.extend(f.density());
        }
    })
    .unwrap();
    (run.mean_energy_after(burn).unwrap(), samples)
}

#[test]
fn independent_seeds_agree() {
    let (_, a) = chain(1, 1e-3, 60_000);
    let (_, b) = chain(2, 1e-3, 60_000);
    let d = ks_distance(&a, &b).unwrap();
    assert!(d < 0.05, "KS {d}");
}

#[test]
fn halving_dt_moves_mean_energy_less_than_seed_scatter() {
    let coarse: Vec<f64> = (10..14).map(|s| chain(s, 1e-3, 40_000).0).collect();
    let fine: Vec<f64> = (20..24).map(|s| chain(s, 5e-4, 80_000).0).collect();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let sd = |v: &[f64]| {
        let m = mean(v);
        (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
    };
    let scatter = sd(&coarse).max(sd(&fine));
    let shift = (mean(&coarse) - mean(&fine)).abs();
    assert!(shift < scatter.max(1e-12) * 2.0, "shift {shift}, scatter {scatter}");
}
