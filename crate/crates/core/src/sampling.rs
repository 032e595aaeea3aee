//! Quasi-random sampling of boxes in R^4.
//!
//! Points come from the additive recurrence `x_n = frac(s + n * alpha)` with
//! `alpha_k = phi^-k`, where `phi` is the positive root of `x^5 = x + 1`.
//! The shift `s` is drawn from a seeded ChaCha stream so that each seed gives
//! a different but reproducible low-discrepancy point set.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An axis-aligned box `[lo_k, hi_k]` in coordinates `q1..q4`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub lo: [f64; 4],
    pub hi: [f64; 4],
}

impl Default for Region {
    fn default() -> Self {
        Region::cube(-2.0, 2.0)
    }
}

impl Region {
    pub fn cube(lo: f64, hi: f64) -> Self {
        Region {
            lo: [lo; 4],
            hi: [hi; 4],
        }
    }

    /// Parses `q1=-2:2,q2=-2:2,...`; unspecified coordinates keep the default `[-2, 2]`.
    pub fn parse(spec: &str) -> Result<Region> {
        let mut region = Region::default();
        let bad = |msg: String| Error::Usage(format!("bad --box '{spec}': {msg}"));
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (name, range) = item
                .split_once('=')
                .ok_or_else(|| bad(format!("'{item}' is not of the form qK=lo:hi")))?;
            let k = match name.trim() {
                "q1" => 0,
                "q2" => 1,
                "q3" => 2,
                "q4" => 3,
                other => return Err(bad(format!("unknown coordinate '{other}'"))),
            };
            let (lo, hi) = range
                .split_once(':')
                .ok_or_else(|| bad(format!("'{range}' is not of the form lo:hi")))?;
            let lo: f64 = lo
                .trim()
                .parse()
                .map_err(|_| bad(format!("'{lo}' is not a number")))?;
            let hi: f64 = hi
                .trim()
                .parse()
                .map_err(|_| bad(format!("'{hi}' is not a number")))?;
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(bad(format!("need finite lo <= hi, got {lo}:{hi}")));
            }
            region.lo[k] = lo;
            region.hi[k] = hi;
        }
        Ok(region)
    }

    /// Maps a point of the unit cube into the box.
    pub fn map_unit(&self, u: [f64; 4]) -> [f64; 4] {
        std::array::from_fn(|k| self.lo[k] + u[k] * (self.hi[k] - self.lo[k]))
    }
}

fn plastic_like_root() -> f64 {
    // Newton on x^5 - x - 1
    let mut x = 1.2f64;
    for _ in 0..50 {
        x -= (x.powi(5) - x - 1.0) / (5.0 * x.powi(4) - 1.0);
    }
    x
}

/// The shifted R4 sequence on the unit cube.
#[derive(Clone, Debug)]
pub struct QuasiRandom {
    alpha: [f64; 4],
    shift: [f64; 4],
    index: u64,
}

impl QuasiRandom {
    pub fn new(seed: u64) -> Self {
        let phi = plastic_like_root();
        let alpha = std::array::from_fn(|k| phi.powi(-(k as i32 + 1)));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shift = std::array::from_fn(|_| rng.gen::<f64>());
        QuasiRandom {
            alpha,
            shift,
            index: 0,
        }
    }
}

impl Iterator for QuasiRandom {
    type Item = [f64; 4];

    fn next(&mut self) -> Option<[f64; 4]> {
        self.index += 1;
        let n = self.index as f64;
        Some(std::array::from_fn(|k| {
            (self.shift[k] + n * self.alpha[k]).fract()
        }))
    }
}

/// Points accepted from a quasi-random stream together with the rejection tally.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub points: Vec<[f64; 4]>,
    pub draws: usize,
}

impl Sample {
    pub fn rejected(&self) -> usize {
        self.draws - self.points.len()
    }
}

/// Draws up to `n` points of `region` that pass `accept`, giving up after `max_draws` draws.
pub fn sample_region(
    region: &Region,
    n: usize,
    seed: u64,
    max_draws: usize,
    accept: impl Fn([f64; 4]) -> bool,
) -> Sample {
    let mut points = Vec::with_capacity(n);
    let mut draws = 0;
    for u in QuasiRandom::new(seed) {
        if points.len() == n || draws == max_draws {
            break;
        }
        draws += 1;
        let p = region.map_unit(u);
        if accept(p) {
            points.push(p);
        }
    }
    Sample { points, draws }
}
