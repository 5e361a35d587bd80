//! Monte Carlo volume estimates in geodesic polar coordinates.
//!
//! Samples are drawn uniformly from the coordinate box
//! `[0, ρ_max] × [0, π]^{n-2} × [0, 2π]` around the origin of `X^n`; each
//! sample contributes its volume element times the indicator of the region.
//! The estimator is unbiased, and its standard error comes from the sample
//! variance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ambient::{Geometry, GeometryKind};
use crate::error::{invalid, Error, Result};

/// Samples per independently seeded chunk.
pub const CHUNK: u64 = 1 << 16;

/// A bounded region of `X^n` (`n >= 2`) that can answer membership queries.
pub trait MonteCarloRegion: Sync {
    fn geometry(&self) -> Geometry;

    /// Every point of the region lies within this distance of the origin.
    fn radius_bound(&self) -> f64;

    /// Membership of an on-space ambient point.
    fn contains(&self, x: &[f64]) -> bool;
}

/// A verified numerical estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub value: f64,
    /// Standard error (Monte Carlo) or refinement difference (quadrature).
    pub stderr: f64,
    /// Samples drawn, or integrand evaluations.
    pub n: u64,
    /// Generator seed; absent for deterministic quadrature.
    pub seed: Option<u64>,
}

impl OracleReport {
    /// `|value - reference|` in units of the standard error.
    pub fn sigmas_from(&self, reference: f64) -> f64 {
        (self.value - reference).abs() / self.stderr
    }
}

/// Streaming mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
    hits: u64,
}

impl Moments {
    fn push(&mut self, y: f64) {
        self.n += 1;
        let d = y - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (y - self.mean);
    }

    fn merge(self, o: Moments) -> Moments {
        if self.n == 0 {
            return o;
        }
        if o.n == 0 {
            return self;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Moments {
            n,
            mean: self.mean + d * o.n as f64 / n as f64,
            m2: self.m2 + o.m2 + d * d * (self.n as f64) * (o.n as f64) / n as f64,
            hits: self.hits + o.hits,
        }
    }
}

/// Unbiased estimate of the volume of `region` from `samples` draws.
///
/// Chunk `c` draws from ChaCha8 seeded with `seed` on stream `c`, and chunks
/// are merged in index order, so the report is bit-reproducible regardless
/// of thread count.
pub fn estimate_volume(region: &dyn MonteCarloRegion, samples: u64, seed: u64) -> Result<OracleReport> {
    let g = region.geometry();
    let n = g.dim();
    if n < 2 {
        return Err(invalid("Monte Carlo regions need dimension at least 2"));
    }
    if samples < 2 {
        return Err(invalid("at least two samples are needed for an error estimate"));
    }
    let kind = g.kind();
    let mut rho_max = region.radius_bound();
    if kind == GeometryKind::Spherical {
        rho_max = rho_max.min(std::f64::consts::PI);
    }
    if !(rho_max > 0.0 && rho_max.is_finite()) {
        return Err(invalid("region radius bound must be positive and finite"));
    }
    let box_volume =
        rho_max * std::f64::consts::PI.powi(n as i32 - 2) * 2.0 * std::f64::consts::PI;
    let chunks = samples.div_ceil(CHUNK);
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let count = CHUNK.min(samples - c * CHUNK);
            let mut m = Moments::default();
            let mut x = vec![0.0; n + 1];
            let mut theta = vec![0.0; n - 1];
            for _ in 0..count {
                let rho = rng.random::<f64>() * rho_max;
                for (i, t) in theta.iter_mut().enumerate() {
                    let span = if i + 1 == n - 1 { 2.0 * std::f64::consts::PI } else { std::f64::consts::PI };
                    *t = rng.random::<f64>() * span;
                }
                // x = (sin_X ρ u(θ), cos_X ρ), weight = sin_X^{n-1} ρ Π sin^{n-1-i} θ_i
                let s = kind.sinx(rho);
                let mut w = s.powi(n as i32 - 1);
                let mut prod = s;
                for (i, t) in theta.iter().enumerate() {
                    x[i] = prod * t.cos();
                    prod *= t.sin();
                    if i + 1 < n - 1 {
                        w *= t.sin().powi((n - 2 - i) as i32);
                    }
                }
                x[n - 1] = prod;
                x[n] = kind.cosx(rho);
                let y = if region.contains(&x) {
                    m.hits += 1;
                    box_volume * w
                } else {
                    0.0
                };
                m.push(y);
            }
            m
        })
        .collect();
    let total = parts.into_iter().fold(Moments::default(), Moments::merge);
    if total.hits == 0 {
        return Err(Error::ZeroAcceptance);
    }
    let var = total.m2 / (total.n - 1) as f64;
    Ok(OracleReport {
        value: total.mean,
        stderr: (var / total.n as f64).sqrt(),
        n: total.n,
        seed: Some(seed),
    })
}

/// The closed geodesic ball of radius `r` about the origin.
#[derive(Debug, Clone, Copy)]
pub struct BallRegion {
    pub geometry: Geometry,
    pub radius: f64,
}

impl MonteCarloRegion for BallRegion {
    fn geometry(&self) -> Geometry {
        self.geometry
    }

    fn radius_bound(&self) -> f64 {
        self.radius
    }

    fn contains(&self, x: &[f64]) -> bool {
        let n = self.geometry.dim();
        match self.geometry.kind() {
            GeometryKind::Euclidean => x[..n].iter().map(|v| v * v).sum::<f64>() <= self.radius * self.radius,
            GeometryKind::Spherical => x[n] >= self.radius.cos(),
            GeometryKind::Hyperbolic => x[n] <= self.radius.cosh(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifolds::ball_total_mass;

    struct UnitCube;

    impl MonteCarloRegion for UnitCube {
        fn geometry(&self) -> Geometry {
            Geometry::euclidean(3)
        }

        fn radius_bound(&self) -> f64 {
            3f64.sqrt()
        }

        fn contains(&self, x: &[f64]) -> bool {
            x[..3].iter().all(|v| (0.0..=1.0).contains(v))
        }
    }

    #[test]
    fn unit_cube_volume() {
        let r = estimate_volume(&UnitCube, 2_000_000, 1).unwrap();
        assert!(r.sigmas_from(1.0) < 3.0, "{r:?}");
        assert!(r.stderr < 5e-3);
    }

    #[test]
    fn spherical_ball() {
        let g = Geometry::spherical(3);
        let exact = 2.0 * std::f64::consts::PI * (0.7 - 0.7f64.sin() * 0.7f64.cos());
        assert!((ball_total_mass(3, 0.7, g).unwrap() - exact).abs() < 1e-14);
        let r = estimate_volume(&BallRegion { geometry: g, radius: 0.7 }, 1_000_000, 7).unwrap();
        assert!(r.sigmas_from(exact) < 3.0, "{r:?}");
    }

    #[test]
    fn hyperbolic_ball_in_four_dimensions() {
        let g = Geometry::hyperbolic(4);
        let exact = ball_total_mass(4, 0.9, g).unwrap();
        let r = estimate_volume(&BallRegion { geometry: g, radius: 0.9 }, 1_000_000, 3).unwrap();
        assert!(r.sigmas_from(exact) < 3.0, "{r:?}");
    }

    #[test]
    fn reports_are_reproducible() {
        let region = BallRegion { geometry: Geometry::hyperbolic(2), radius: 1.0 };
        let a = estimate_volume(&region, 300_000, 42).unwrap();
        let b = estimate_volume(&region, 300_000, 42).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
        assert_eq!(a.seed, Some(42));
        let c = estimate_volume(&region, 300_000, 43).unwrap();
        assert_ne!(a.value, c.value);
    }

    #[test]
    fn empty_region_is_an_error() {
        struct Nothing;
        impl MonteCarloRegion for Nothing {
            fn geometry(&self) -> Geometry {
                Geometry::euclidean(2)
            }
            fn radius_bound(&self) -> f64 {
                1.0
            }
            fn contains(&self, _: &[f64]) -> bool {
                false
            }
        }
        assert_eq!(estimate_volume(&Nothing, 1000, 0).unwrap_err(), Error::ZeroAcceptance);
    }
}
