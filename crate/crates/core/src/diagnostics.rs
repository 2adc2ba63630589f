//! Observables: density PDFs, mirror asymmetry, walk/Dirac relative
//! difference, conservation drift, growth-rate fits and KS distances.

use std::ops::Range;

use crate::error::{config, domain, Result};
use crate::nlde::ConservedQuantities;

/// Binned probability density `H(p)`; `Σ H·Δp = 1` over the included values.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub density: Vec<f64>,
    /// Values that fell outside the edges (or were zero on a log scale).
    pub excluded: usize,
}

impl Histogram {
    pub fn integral(&self) -> f64 {
        self.density
            .iter()
            .zip(self.bin_edges.windows(2))
            .map(|(h, e)| h * (e[1] - e[0]))
            .sum()
    }

    pub fn centers(&self) -> Vec<f64> {
        self.bin_edges.windows(2).map(|e| 0.5 * (e[0] + e[1])).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BinScale {
    #[default]
    Linear,
    /// Geometric bins over `[min positive, max]`; zeros are excluded.
    Log,
}

pub const DEFAULT_BINS: usize = 50;

pub fn histogram_pdf(values: &[f64], nbins: usize, scale: BinScale) -> Result<Histogram> {
    if values.is_empty() {
        return Err(domain("histogram of an empty sample"));
    }
    if nbins == 0 {
        return Err(config("nbins must be >= 1"));
    }
    if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(domain("histogram values must be finite and >= 0"));
    }
    let edges = match scale {
        BinScale::Linear => {
            let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let (lo, hi) = widen(lo, hi);
            (0..=nbins)
                .map(|i| lo + (hi - lo) * i as f64 / nbins as f64)
                .collect::<Vec<_>>()
        }
        BinScale::Log => {
            let positive = values.iter().copied().filter(|v| *v > 0.0);
            let lo = positive.clone().fold(f64::INFINITY, f64::min);
            let hi = positive.fold(f64::NEG_INFINITY, f64::max);
            if !lo.is_finite() {
                return Err(domain("log-scale histogram needs at least one positive value"));
            }
            let (lo, hi) = if lo == hi { (lo * 0.5, lo * 2.0) } else { (lo, hi) };
            let ratio = (hi / lo).ln();
            let mut e: Vec<f64> = (0..=nbins)
                .map(|i| lo * (ratio * i as f64 / nbins as f64).exp())
                .collect();
            e[0] = lo;
            e[nbins] = hi;
            e
        }
    };
    histogram_with_edges(values, &edges)
}

fn widen(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        (lo, hi)
    } else {
        let h = 0.5 * lo.abs().max(1e-300).max(f64::EPSILON);
        (lo - h, lo + h)
    }
}

/// Bins are `[e_i, e_{i+1})`, the last one closed. Values outside the edges
/// are excluded and counted.
pub fn histogram_with_edges(values: &[f64], edges: &[f64]) -> Result<Histogram> {
    if edges.len() < 2 || edges.windows(2).any(|e| !(e[1] > e[0])) {
        return Err(config(
            "bin edges must be strictly increasing with at least two entries",
        ));
    }
    let nbins = edges.len() - 1;
    let (lo, hi) = (edges[0], edges[nbins]);
    let mut counts = vec![0usize; nbins];
    let mut included = 0usize;
    for &v in values {
        if !(v >= lo && v <= hi) {
            continue;
        }
        let bin = match edges.partition_point(|e| *e <= v) {
            0 => 0,
            i => (i - 1).min(nbins - 1),
        };
        counts[bin] += 1;
        included += 1;
    }
    if included == 0 {
        return Err(domain("no values inside the histogram range"));
    }
    let density = counts
        .iter()
        .zip(edges.windows(2))
        .map(|(&c, e)| c as f64 / (included as f64 * (e[1] - e[0])))
        .collect();
    Ok(Histogram {
        bin_edges: edges.to_vec(),
        density,
        excluded: values.len() - included,
    })
}

/// `Γ = Σ_{m<N/2} Π_m − Σ_{m≥N/2} Π_m`.
pub fn asymmetry(density: &[f64]) -> Result<f64> {
    let n = density.len();
    if n == 0 || !n.is_multiple_of(2) {
        return Err(config(format!("asymmetry needs an even number of sites, got {n}")));
    }
    let (left, right) = density.split_at(n / 2);
    Ok(left.iter().sum::<f64>() - right.iter().sum::<f64>())
}

/// Mirror asymmetry about site `center`: `Σ_{d=1}^{N/2−1} (Π_{c+d} − Π_{c−d})`.
/// The two sites fixed by the reflection (`c` and `c + N/2`) do not
/// contribute, so a state symmetric about `c` gives exactly zero.
pub fn asymmetry_about_site(density: &[f64], center: usize) -> Result<f64> {
    let n = density.len();
    if n == 0 || !n.is_multiple_of(2) {
        return Err(config(format!("asymmetry needs an even number of sites, got {n}")));
    }
    Ok((1..n / 2)
        .map(|d| density[(center + d) % n] - density[(center + n - d) % n])
        .sum())
}

pub const RELATIVE_DIFFERENCE_FLOOR: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeDifference {
    pub delta: f64,
    /// Sites skipped because `Π_D` fell below the floor.
    pub excluded: usize,
}

/// `δ = sqrt(Σ_m (Π_QW − Π_D)²_m / (Π_D)²_m)`. Not symmetric in its
/// arguments.
pub fn relative_difference(pi_walk: &[f64], pi_dirac: &[f64]) -> Result<RelativeDifference> {
    if pi_walk.len() != pi_dirac.len() {
        return Err(config(format!(
            "length mismatch: {} walk sites vs {} Dirac sites",
            pi_walk.len(),
            pi_dirac.len()
        )));
    }
    let mut sum = 0.0;
    let mut excluded = 0;
    for (&w, &d) in pi_walk.iter().zip(pi_dirac) {
        if d.abs() < RELATIVE_DIFFERENCE_FLOOR {
            excluded += 1;
            continue;
        }
        sum += ((w - d) / d).powi(2);
    }
    if excluded == pi_dirac.len() {
        return Err(domain("every site is below the relative-difference floor"));
    }
    Ok(RelativeDifference {
        delta: sum.sqrt(),
        excluded,
    })
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Drift {
    pub energy: Vec<f64>,
    pub momentum: Vec<f64>,
    pub particle_number: Vec<f64>,
}

impl Drift {
    fn max(v: &[f64]) -> f64 {
        v.iter().copied().fold(0.0, f64::max)
    }

    /// `(max |ΔE|, max |ΔP|, max |ΔΠ|)`.
    pub fn max_abs(&self) -> (f64, f64, f64) {
        (
            Self::max(&self.energy),
            Self::max(&self.momentum),
            Self::max(&self.particle_number),
        )
    }
}

pub fn conservation_drift(series: &[ConservedQuantities]) -> Result<Drift> {
    let first = series
        .first()
        .ok_or_else(|| domain("conservation drift of an empty series"))?;
    Ok(Drift {
        energy: series.iter().map(|q| (q.energy - first.energy).abs()).collect(),
        momentum: series.iter().map(|q| (q.momentum - first.momentum).abs()).collect(),
        particle_number: series
            .iter()
            .map(|q| (q.particle_number - first.particle_number).abs())
            .collect(),
    })
}

/// Ordinary least-squares slope of `ys` against `xs`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(domain("slope fit needs at least two paired points"));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(domain("slope fit needs distinct abscissae"));
    }
    Ok(sxy / sxx)
}

/// Slope of `log|Γ|` against time over `window` of `(time, |Γ|)` samples.
pub fn growth_rate(series: &[(f64, f64)], window: Range<usize>) -> Result<f64> {
    let pts = series
        .get(window.clone())
        .ok_or_else(|| domain(format!("window {window:?} outside series of {}", series.len())))?;
    if pts.iter().any(|&(_, v)| !(v > 0.0)) {
        return Err(domain("growth rate needs positive values throughout the window"));
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    least_squares_slope(&xs, &ys)
}

/// Two-sample Kolmogorov–Smirnov statistic. Inputs need not be sorted.
pub fn ks_distance(h1: &[f64], h2: &[f64]) -> Result<f64> {
    if h1.is_empty() || h2.is_empty() {
        return Err(domain("KS distance of an empty sample"));
    }
    let sorted = |v: &[f64]| {
        let mut s = v.to_vec();
        s.sort_by(f64::total_cmp);
        s
    };
    let (a, b) = (sorted(h1), sorted(h2));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// `(Π_{2p} + Π_{2p+1}) / (2 dx)`: removes the walk's even/odd sublattice
/// oscillation and converts a site-sum density to continuum units.
pub fn pair_averaged_density(site_density: &[f64], dx: f64) -> Vec<f64> {
    site_density
        .chunks_exact(2)
        .map(|p| (p[0] + p[1]) / (2.0 * dx))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_histogram() {
        let h = histogram_pdf(&[0.25; 7], 1, BinScale::Linear).unwrap();
        assert_eq!(h.density.len(), 1);
        assert!((h.integral() - 1.0).abs() < 1e-12);
        let h = histogram_pdf(&[0.0; 3], 4, BinScale::Linear).unwrap();
        assert!((h.integral() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hand_counted_histogram() {
        let h = histogram_with_edges(&[0.1, 0.1, 0.3, 0.5], &[0.0, 0.2, 0.4, 0.6]).unwrap();
        for (got, want) in h.density.iter().zip([2.5, 1.25, 1.25]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn log_histogram() {
        assert!(histogram_pdf(&[0.0, 0.0], 5, BinScale::Log).is_err());
        let h = histogram_pdf(&[0.0, 1e-3, 1e-2, 0.1, 1.0], 3, BinScale::Log).unwrap();
        assert_eq!(h.excluded, 1);
        assert!((h.integral() - 1.0).abs() < 1e-12);
        assert!(histogram_pdf(&[-1.0], 2, BinScale::Linear).is_err());
    }

    #[test]
    fn asymmetry_examples() {
        let sym = [0.1, 0.2, 0.3, 0.3, 0.2, 0.1];
        assert!(asymmetry(&sym).unwrap().abs() < 1e-15);
        let mut one = [0.0; 8];
        one[0] = 1.0;
        assert_eq!(asymmetry(&one).unwrap(), 1.0);
        assert_eq!(asymmetry_about_site(&one, 0).unwrap(), 0.0);
        assert!(asymmetry(&[1.0, 2.0, 3.0]).is_err());
        let site_sym = [0.4, 0.1, 0.05, 0.2, 0.05, 0.1];
        assert_eq!(asymmetry_about_site(&site_sym, 0).unwrap(), 0.0);
    }

    #[test]
    fn relative_difference_examples() {
        let d = [0.1, 0.5, 0.2, 0.7];
        assert_eq!(relative_difference(&d, &d).unwrap().delta, 0.0);
        let twice: Vec<f64> = d.iter().map(|x| 2.0 * x).collect();
        assert!((relative_difference(&twice, &d).unwrap().delta - 2.0).abs() < 1e-14);
        let r = relative_difference(&[1.0, 1.0], &[0.0, 1.0]).unwrap();
        assert_eq!(r.excluded, 1);
        assert!(relative_difference(&[1.0], &[0.0]).is_err());
        assert!(relative_difference(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn drift_of_constant_series() {
        let q = ConservedQuantities {
            particle_number: 1.0,
            energy: -3.0,
            momentum: 0.5,
        };
        let d = conservation_drift(&[q; 4]).unwrap();
        assert_eq!(d.max_abs(), (0.0, 0.0, 0.0));
        assert!(conservation_drift(&[]).is_err());
    }

    #[test]
    fn growth_rate_examples() {
        let s: Vec<(f64, f64)> = (0..50).map(|t| (t as f64, 1e-15 * (0.1 * t as f64).exp())).collect();
        assert!((growth_rate(&s, 0..50).unwrap() - 0.1).abs() < 1e-6);
        let c: Vec<(f64, f64)> = (0..10).map(|t| (t as f64, 3.0)).collect();
        assert!(growth_rate(&c, 0..10).unwrap().abs() < 1e-15);
        let z = [(0.0, 1.0), (1.0, 0.0)];
        assert!(growth_rate(&z, 0..2).is_err());
    }

    #[test]
    fn ks_examples() {
        let a = [0.1, 0.4, 0.2, 0.9];
        assert_eq!(ks_distance(&a, &a).unwrap(), 0.0);
        assert_eq!(ks_distance(&[1.0, 2.0], &[3.0, 4.0]).unwrap(), 1.0);
        assert!(ks_distance(&[], &a).is_err());
        let b = [0.0, 0.5, 0.5];
        assert!((ks_distance(&a, &b).unwrap() - ks_distance(&b, &a).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn pair_average() {
        assert_eq!(pair_averaged_density(&[1.0, 0.0, 0.0, 3.0], 0.5), vec![1.0, 3.0]);
    }
}
