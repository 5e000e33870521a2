#![allow(dead_code)]

use flipmode::detection::PixelLayout;
use flipmode::linalg::{random_unitary, CVector};
use flipmode::modes::{Grid, ModeBasis, SampledMode};
use flipmode::state::{make_state, GaussianState, SqueezerSpec};
use flipmode::Complex64;
use rand::Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn grid(n: usize) -> Grid {
    Grid::square(n, 8.0).unwrap()
}

/// Normalized Gaussian of waist `w` centred at `(dx, dy)`.
pub fn gaussian(grid: Grid, w: f64, dx: f64, dy: f64) -> SampledMode {
    SampledMode::from_fn(grid, |x, y| {
        let (u, v) = (x - dx, y - dy);
        c((-(u * u + v * v) / (w * w)).exp(), 0.0)
    })
    .unwrap()
    .normalize()
    .unwrap()
}

/// Random squeezers on every mode, mixed by a Haar unitary, with a random
/// coherent amplitude of total photon number `n0`.
pub fn random_state<R: Rng>(dim: usize, n0: f64, rng: &mut R) -> GaussianState {
    let mut squeezers = Vec::new();
    for k in 0..dim {
        if rng.random_bool(0.7) {
            let r = rng.random_range(0.0..1.2);
            let angle = rng.random_range(0.0..std::f64::consts::PI);
            squeezers.push(SqueezerSpec::new(k, r, angle));
        }
    }
    let squeezed = make_state(dim, &[], &squeezers).unwrap();
    let u = random_unitary(dim, rng);
    let mixed = squeezed.basis_change(&u).unwrap();
    let raw: Vec<Complex64> = (0..dim)
        .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mean = CVector::from_iterator(dim, raw.iter().map(|z| z * (n0.sqrt() / norm)));
    mixed.with_mean(mean).unwrap()
}

/// Random rectangular pixel array or random per-cell labelling, random gains.
pub fn random_layout<R: Rng>(grid: Grid, rng: &mut R, gains: impl Fn(&mut R) -> f64) -> PixelLayout {
    if rng.random_bool(0.5) {
        let kx = rng.random_range(1..=6);
        let ky = rng.random_range(1..=6);
        let g = (0..kx * ky).map(|_| gains(rng)).collect();
        PixelLayout::pixel_array(grid, kx, ky, g).unwrap()
    } else {
        let k = rng.random_range(2..=5);
        let labels = (0..grid.len()).map(|_| rng.random_range(0..k)).collect();
        let g = (0..k).map(|_| gains(rng)).collect();
        PixelLayout::new(grid, labels, g).unwrap()
    }
}

pub fn first_modes(basis: &ModeBasis, n: usize) -> ModeBasis {
    ModeBasis::new(basis.modes()[..n].to_vec(), basis.ortho_tol()).unwrap()
}
