//! Seeded random field generation for property tests and probes.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{EdgeField, FaceField, Grid, ScalarField};

pub fn random_scalar_field(grid: &Grid, seed: u64) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = ScalarField::zeros(grid);
    for v in &mut s.values.data {
        *v = rng.gen_range(-1.0..1.0);
    }
    s
}

/// Uniform random entries; `no_slip` zeroes the boundary-normal faces.
pub fn random_face_field(grid: &Grid, seed: u64, no_slip: bool) -> FaceField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = FaceField::zeros(grid);
    for c in [&mut f.fx, &mut f.fy, &mut f.fz] {
        for v in &mut c.data {
            *v = rng.gen_range(-1.0..1.0);
        }
    }
    if no_slip {
        f.enforce_no_slip();
    }
    f
}

/// Uniform random entries; `tangential_zero` zeroes the boundary-lying edges.
pub fn random_edge_field(grid: &Grid, seed: u64, tangential_zero: bool) -> EdgeField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut e = EdgeField::zeros(grid);
    for c in [&mut e.ex, &mut e.ey, &mut e.ez] {
        for v in &mut c.data {
            *v = rng.gen_range(-1.0..1.0);
        }
    }
    if tangential_zero {
        e.enforce_tangential_zero();
    }
    e
}
