//! Seeded sampling of interior points.
//!
//! Points are drawn with ChaCha8 (`rand_chacha::ChaCha8Rng::seed_from_u64`),
//! one uniform `f64` in `[0, 1)` per coordinate in chart order. Draws that
//! land on the boundary are discarded and redrawn.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned coordinate box `[lo, hi]` per coordinate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct Domain {
    bounds: Vec<[f64; 2]>,
}

impl Domain {
    pub fn new(bounds: Vec<[f64; 2]>) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::EmptyDomain("no coordinates".into()));
        }
        for (i, [lo, hi]) in bounds.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::EmptyDomain(format!("coordinate {i} has bounds [{lo}, {hi}]")));
            }
        }
        Ok(Domain { bounds })
    }

    /// The box `[lo, hi]^dim`.
    pub fn uniform(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Domain::new(vec![[lo, hi]; dim])
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[[f64; 2]] {
        &self.bounds
    }

    pub fn midpoint(&self) -> Vec<f64> {
        self.bounds.iter().map(|[lo, hi]| 0.5 * (lo + hi)).collect()
    }

    pub fn contains_interior(&self, point: &[f64]) -> bool {
        point.len() == self.dim() && point.iter().zip(&self.bounds).all(|(x, [lo, hi])| lo < x && x < hi)
    }
}

impl TryFrom<Vec<[f64; 2]>> for Domain {
    type Error = Error;

    fn try_from(bounds: Vec<[f64; 2]>) -> Result<Self> {
        Domain::new(bounds)
    }
}

impl From<Domain> for Vec<[f64; 2]> {
    fn from(d: Domain) -> Self {
        d.bounds
    }
}

/// `n` deterministic points strictly inside `domain`.
pub fn sample_points(domain: &Domain, n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if n == 0 {
        return Err(Error::InvalidArgument("number of sample points must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..n)
        .map(|_| {
            domain
                .bounds
                .iter()
                .map(|&[lo, hi]| loop {
                    let u: f64 = rng.random();
                    let x = lo + (hi - lo) * u;
                    if lo < x && x < hi {
                        break x;
                    }
                })
                .collect()
        })
        .collect();
    Ok(points)
}
