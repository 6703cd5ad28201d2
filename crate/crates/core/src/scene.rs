//! Deterministic synthetic ground-truth scenes for simulations and demos.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::image::Image;

/// Smooth random field: uniform lattice values every `cell` pixels, blended
/// with smoothstep weights. Output lies in `[0, 1]`.
fn value_noise(width: usize, height: usize, cell: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let gw = (width as f64 / cell).ceil() as usize + 2;
    let gh = (height as f64 / cell).ceil() as usize + 2;
    let lattice: Vec<f64> = (0..gw * gh).map(|_| rng.random::<f64>()).collect();
    let smooth = |t: f64| t * t * (3.0 - 2.0 * t);
    let mut out = Vec::with_capacity(width * height);
    for r in 0..height {
        let fy = r as f64 / cell;
        let (iy, ty) = (fy.floor() as usize, smooth(fy.fract()));
        for c in 0..width {
            let fx = c as f64 / cell;
            let (ix, tx) = (fx.floor() as usize, smooth(fx.fract()));
            let at = |y: usize, x: usize| lattice[y * gw + x];
            let top = at(iy, ix) * (1.0 - tx) + at(iy, ix + 1) * tx;
            let bottom = at(iy + 1, ix) * (1.0 - tx) + at(iy + 1, ix + 1) * tx;
            out.push(top * (1.0 - ty) + bottom * ty);
        }
    }
    out
}

/// Fractal (1/f-like) texture: octaves of value noise with halving cell size
/// and amplitude, rescaled to `[0, 1]`.
fn fractal_noise(
    width: usize,
    height: usize,
    largest_cell: f64,
    octaves: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let mut acc = vec![0.0; width * height];
    let (mut cell, mut amp) = (largest_cell, 1.0);
    for _ in 0..octaves {
        for (a, v) in acc.iter_mut().zip(value_noise(width, height, cell, rng)) {
            *a += amp * v;
        }
        cell = (cell / 2.0).max(1.0);
        amp *= 0.5;
    }
    let lo = acc.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = acc.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = (hi - lo).max(f64::MIN_POSITIVE);
    acc.iter().map(|v| (v - lo) / span).collect()
}

/// Pure fractal texture scene in `[0.1, 0.9]`.
pub fn fractal(width: usize, height: usize, seed: u64) -> Image {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = fractal_noise(width, height, 64.0, 6, &mut rng);
    Image::new(width, height, f.iter().map(|v| 0.1 + 0.8 * v).collect()).expect("finite")
}

fn soft_step(x: f64, width: f64) -> f64 {
    0.5 * (1.0 + (x / width).tanh())
}

/// Outdoor-looking frame: bright sky with fractal clouds above a hilly
/// horizon, darker fractal-textured ground, a building and a tree. Values stay inside `[0.05, 0.95]`.
pub fn landscape(width: usize, height: usize, seed: u64) -> Image {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clouds = fractal_noise(width, height, 48.0, 5, &mut rng);
    let ground = fractal_noise(width, height, 32.0, 6, &mut rng);
    let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let (w, h) = (width as f64, height as f64);

    let bx0 = 0.62 * w;
    let bx1 = 0.78 * w;
    let btop = 0.30 * h;
    let (tx, ty, tr) = (0.22 * w, 0.55 * h, 0.09 * w.min(h));

    Image::from_fn(width, height, |r, c| {
        let (x, y) = (c as f64, r as f64);
        let i = r * width + c;
        let horizon = h * (0.5 + 0.06 * (x / w * 5.0 + phase).sin() + 0.03 * (x / w * 13.0).cos());
        let sky = 0.78 - 0.25 * y / h + 0.15 * (clouds[i] - 0.5);
        let land = 0.35 + 0.15 * (y - horizon) / h + 0.3 * (ground[i] - 0.5);
        let below = soft_step(y - horizon, 1.5);
        let mut v = sky * (1.0 - below) + land * below;

        let inside_x = soft_step(x - bx0, 0.8) * soft_step(bx1 - x, 0.8);
        let inside_y = soft_step(y - btop, 0.8) * soft_step(horizon + 4.0 - y, 0.8);
        let building = inside_x * inside_y;
        let facade = 0.55 + 0.05 * ((y / 6.0).floor() % 2.0);
        v = v * (1.0 - building) + facade * building;

        let d = ((x - tx).powi(2) + (y - ty).powi(2)).sqrt();
        let tree = soft_step(tr - d, 1.2);
        v = v * (1.0 - tree) + (0.22 + 0.06 * ground[i]) * tree;
        v.clamp(0.05, 0.95)
    })
    .expect("scene values are finite")
}

/// High-frequency texture with little large-scale structure.
pub fn texture(width: usize, height: usize, seed: u64) -> Image {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fine = value_noise(width, height, 2.0, &mut rng);
    let medium = value_noise(width, height, 5.0, &mut rng);
    Image::new(
        width,
        height,
        fine.iter()
            .zip(&medium)
            .map(|(a, b)| (0.15 + 0.45 * a + 0.4 * b).clamp(0.0, 1.0))
            .collect(),
    )
    .expect("texture values are finite")
}
