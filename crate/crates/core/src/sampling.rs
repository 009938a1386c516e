//! Seeded randomness and geometric samplers.
//!
//! All randomness flows through a counter-based generator addressed by a
//! `(seed, stream)` pair, so parallel work items derive their own stream and
//! results are independent of thread scheduling. Gaussians use the
//! Marsaglia polar method (fixed for this release).

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{norm, scale};

/// Address of a reproducible random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngSeed {
    pub seed: u64,
    pub stream: u64,
}

impl RngSeed {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    /// Same seed, different sub-stream; used by parallel work items.
    pub fn with_stream(self, stream: u64) -> Self {
        Self {
            seed: self.seed,
            stream,
        }
    }

    pub fn rng(self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// One standard normal draw via the polar method.
pub fn sample_gaussian<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.gen_range(-1.0..1.0);
        let v: f64 = rng.gen_range(-1.0..1.0);
        let s = u * u + v * v;
        if s > 0.0 && s < 1.0 {
            return u * (-2.0 * s.ln() / s).sqrt();
        }
    }
}

/// Vector of `d` independent standard normal coordinates.
pub fn sample_gaussian_vector<R: Rng>(d: usize, rng: &mut R) -> Result<Vec<f64>> {
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be >= 1".into()));
    }
    let mut out = Vec::with_capacity(d);
    // Polar method yields pairs; keep both halves.
    while out.len() + 2 <= d {
        let (a, b) = gaussian_pair(rng);
        out.push(a);
        out.push(b);
    }
    if out.len() < d {
        out.push(sample_gaussian(rng));
    }
    Ok(out)
}

fn gaussian_pair<R: Rng>(rng: &mut R) -> (f64, f64) {
    loop {
        let u: f64 = rng.gen_range(-1.0..1.0);
        let v: f64 = rng.gen_range(-1.0..1.0);
        let s = u * u + v * v;
        if s > 0.0 && s < 1.0 {
            let f = (-2.0 * s.ln() / s).sqrt();
            return (u * f, v * f);
        }
    }
}

/// Uniform direction on the unit sphere: Gaussian vector, normalized.
pub fn sample_unit_sphere<R: Rng>(d: usize, rng: &mut R) -> Result<Vec<f64>> {
    loop {
        let v = sample_gaussian_vector(d, rng)?;
        let n = norm(&v);
        if n > 1e-12 {
            return Ok(scale(&v, 1.0 / n));
        }
        // degenerate all-zero draw: resample
    }
}

/// Uniform point in the unit ball: sphere direction scaled to radius
/// `u^(1/d)` for `u` uniform on [0, 1].
pub fn sample_unit_ball<R: Rng>(d: usize, rng: &mut R) -> Result<Vec<f64>> {
    let dir = sample_unit_sphere(d, rng)?;
    let u: f64 = rng.gen_range(0.0..1.0);
    Ok(scale(&dir, u.powf(1.0 / d as f64)))
}
