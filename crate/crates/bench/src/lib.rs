//! Fixtures shared by the benchmarks.

use galton_dirac::{GridSpec, NoiseGenerator, Spinor, SpinorField};

/// Seeded complex Gaussian field with `Π = 1`.
pub fn random_field(n: usize, seed: u64) -> SpinorField {
    let grid = GridSpec::new(n).expect("benchmark grid sizes are even");
    let mut rng = NoiseGenerator::new(seed);
    let mut field = SpinorField::from_fn(grid, |_| Spinor::new(rng.complex(), rng.complex()));
    field.normalize_particle_number(1.0);
    field
}
