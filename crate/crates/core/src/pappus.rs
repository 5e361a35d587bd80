//! Volumes of solids laminated by hyperplanar leaves.
//!
//! The volume of such a solid is the line integral, along the curve traced
//! by the leaf mass centers, of the leaf centered mass times the cosine of
//! the slant angle. For the torus and the cones here the leaves are
//! orthogonal to the curve, so the weight is the centered mass alone.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::ambient::{Geometry, GeometryKind};
use crate::error::{invalid, Error, Result};
use crate::manifolds::{
    ball_centered_mass, ngon_apothem, ngon_centered_area, ngon_circumradius, total_mass_integral,
    unit_ball_volume, unit_sphere_area, ManifoldPatch,
};
use crate::montecarlo::{estimate_volume, MonteCarloRegion};
use crate::quadrature::{integrate_1d, integrate_box_scalar, QuadratureConfig, QuadratureMethod};

pub use crate::montecarlo::OracleReport;

type ProfileFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A curve of leaf mass centers of length `T`, with the leaf centered mass
/// and the slant cosine as functions of arclength.
#[derive(Clone)]
pub struct PappusProfile {
    length: f64,
    leaf_centered_mass: ProfileFn,
    slant_cos: ProfileFn,
}

impl std::fmt::Debug for PappusProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PappusProfile").field("length", &self.length).finish()
    }
}

/// Samples used to validate a profile.
const PROFILE_SAMPLES: usize = 1000;

impl PappusProfile {
    /// Validates on a uniform grid: leaf mass `>= 0`, slant cosine in
    /// `[0, 1]`, and no jump above `1e3 Δt` between neighbouring samples.
    pub fn new<L, S>(length: f64, leaf_centered_mass: L, slant_cos: S) -> Result<Self>
    where
        L: Fn(f64) -> f64 + Send + Sync + 'static,
        S: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(length.is_finite() && length >= 0.0) {
            return Err(invalid(format!("profile length must be finite and non-negative, got {length}")));
        }
        let dt = length / PROFILE_SAMPLES as f64;
        let mut prev: Option<(f64, f64)> = None;
        for i in 0..=PROFILE_SAMPLES {
            let t = i as f64 * dt;
            let (m, c) = (leaf_centered_mass(t), slant_cos(t));
            if !(m >= 0.0 && m.is_finite()) {
                return Err(invalid(format!("leaf centered mass {m} at t = {t} is not a finite non-negative value")));
            }
            if !(0.0..=1.0).contains(&c) {
                return Err(invalid(format!("slant cosine {c} at t = {t} is outside [0, 1]")));
            }
            if let Some((pm, pc)) = prev {
                if (m - pm).abs() > 1e3 * dt || (c - pc).abs() > 1e3 * dt {
                    return Err(invalid(format!("profile jumps near t = {t}")));
                }
            }
            prev = Some((m, c));
        }
        Ok(PappusProfile {
            length,
            leaf_centered_mass: Arc::new(leaf_centered_mass),
            slant_cos: Arc::new(slant_cos),
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn leaf_centered_mass(&self, t: f64) -> f64 {
        (self.leaf_centered_mass)(t)
    }

    pub fn slant_cos(&self, t: f64) -> f64 {
        (self.slant_cos)(t)
    }
}

/// Adaptive 1-D configuration derived from `q` (tensor rules become
/// adaptive Gauss–Legendre with a modest panel order).
fn line_config(q: &QuadratureConfig) -> QuadratureConfig {
    match q.method {
        QuadratureMethod::GaussLegendreTensor => QuadratureConfig {
            method: QuadratureMethod::AdaptiveGaussLegendre,
            points_per_axis: q.points_per_axis.min(20),
            ..*q
        },
        _ => *q,
    }
}

fn line_integral<F: Fn(f64) -> f64>(f: F, length: f64, q: &QuadratureConfig) -> Result<f64> {
    // Seed a split near the start, where cone leaves grow fastest.
    let first = (0.1 * length).min(0.05);
    integrate_1d(f, 0.0, length, &[first], &line_config(q)).map(|r| r.value[0])
}

/// `∫_0^T m_cen(L_t) cos θ_t dt`.
pub fn pappus_total_mass(p: &PappusProfile, q: &QuadratureConfig) -> Result<f64> {
    line_integral(|t| p.leaf_centered_mass(t) * p.slant_cos(t), p.length, q)
}

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(invalid(format!("{name} must be positive and finite, got {v}")));
    }
    Ok(())
}

fn check_torus(big_r: f64, r: f64, kind: GeometryKind) -> Result<()> {
    positive("R", big_r)?;
    positive("r", r)?;
    if r > big_r {
        return Err(invalid(format!("tube radius {r} exceeds core radius {big_r}")));
    }
    if kind == GeometryKind::Spherical && big_r + r >= FRAC_PI_2 {
        return Err(invalid(format!("spherical torus needs R + r < pi/2, got {}", big_r + r)));
    }
    Ok(())
}

fn check_cone(r: f64, h: f64, kind: GeometryKind) -> Result<()> {
    positive("r", r)?;
    positive("h", h)?;
    if kind == GeometryKind::Spherical && (r >= FRAC_PI_2 || h >= FRAC_PI_2) {
        return Err(invalid(format!("spherical cone needs r, h < pi/2, got r = {r}, h = {h}")));
    }
    Ok(())
}

fn check_ngon_cone(n: usize, a: f64, h: f64, g: Geometry) -> Result<()> {
    positive("a", a)?;
    positive("h", h)?;
    if g.kind() == GeometryKind::Spherical && h >= FRAC_PI_2 {
        return Err(invalid(format!("spherical cone needs h < pi/2, got {h}")));
    }
    ngon_apothem(n, a, g).map(|_| ())
}

/// `2π² sin_X R sin_X² r`.
pub fn volume_torus(big_r: f64, r: f64, g: Geometry) -> Result<f64> {
    let kind = g.kind();
    check_torus(big_r, r, kind)?;
    Ok(2.0 * PI * PI * kind.sinx(big_r) * kind.sinx(r).powi(2))
}

/// Radius `α` of the section at distance `t` from the apex of the right
/// circular cone with base radius `r` and height `h`:
/// `tan_X α = tan_X r sin_X t / sin_X h`.
pub fn cone_section_radius(r: f64, h: f64, t: f64, g: Geometry) -> Result<f64> {
    let kind = g.kind();
    check_cone(r, h, kind)?;
    if !(0.0..=h).contains(&t) {
        return Err(invalid(format!("section height {t} outside [0, {h}]")));
    }
    Ok(section_radius(r, h, t, kind))
}

fn section_radius(r: f64, h: f64, t: f64, kind: GeometryKind) -> f64 {
    if t >= h {
        return r;
    }
    kind.atanx(kind.tanx(r) * kind.sinx(t) / kind.sinx(h))
}

/// Volume of the right circular cone with base radius `r` and height `h`.
pub fn volume_right_circular_cone(r: f64, h: f64, g: Geometry) -> Result<f64> {
    let kind = g.kind();
    check_cone(r, h, kind)?;
    Ok(match kind {
        GeometryKind::Euclidean => PI * r * r * h / 3.0,
        GeometryKind::Spherical => {
            let w = (r.tan().powi(2) + h.sin().powi(2)).sqrt();
            PI * (h - h.sin() / w * (w / h.cos()).atan())
        }
        GeometryKind::Hyperbolic => {
            let w = (r.tanh().powi(2) + h.sinh().powi(2)).sqrt();
            PI * (-h + h.sinh() / w * (w / h.cosh()).atanh())
        }
    })
}

/// `sin_X^{n-1} α(t)` for the cone section, written to stay finite as `t → 0`.
fn section_sinx_pow(m: usize, r: f64, h: f64, t: f64, kind: GeometryKind) -> f64 {
    let st = kind.sinx(t);
    match kind {
        GeometryKind::Euclidean => (r * t / h).powi(m as i32),
        GeometryKind::Spherical => {
            // sin²α = sin²t / (a² + sin²t), a = cot r sin h
            let a = h.sin() / r.tan();
            (st * st / (a * a + st * st)).powf(0.5 * m as f64)
        }
        GeometryKind::Hyperbolic => {
            // sinh²α = sinh²t / (a² - sinh²t), a = coth r sinh h
            let a = h.sinh() / r.tanh();
            let den = a * a - st * st;
            assert!(den > 0.0, "hyperbolic cone section beyond the light cone");
            (st * st / den).powf(0.5 * m as f64)
        }
    }
}

/// Volume of the cone in `X^n` over the ball `B^{n-1}(r)` with height `h`:
/// `ω_{n-1} ∫_0^h sin_X^{n-1} α(t) dt`.
pub fn volume_ball_base_cone(n: usize, r: f64, h: f64, g: Geometry, q: &QuadratureConfig) -> Result<f64> {
    if n < 2 {
        return Err(invalid("a ball-base cone needs dimension at least 2"));
    }
    let kind = g.kind();
    check_cone(r, h, kind)?;
    let omega = unit_ball_volume(n - 1);
    if kind == GeometryKind::Euclidean {
        return Ok(omega * r.powi(n as i32 - 1) * h / n as f64);
    }
    Ok(omega * line_integral(|t| section_sinx_pow(n - 1, r, h, t, kind), h, q)?)
}

/// Edge of the section polygon at distance `t` from the apex of the regular
/// `n`-gonal cone: `tan_X(γ/2) = tan(π/n) sin_X α`, where the section apothem
/// `α` follows the same law as the circular section radius.
fn ngon_section_edge(n: usize, b: f64, h: f64, t: f64, kind: GeometryKind) -> f64 {
    let alpha = section_radius(b, h, t, kind);
    2.0 * kind.atanx((PI / n as f64).tan() * kind.sinx(alpha))
}

/// Volume of the cone over the regular `n`-gon with edge `a`, height `h`.
pub fn volume_ngon_cone(n: usize, a: f64, h: f64, g: Geometry, q: &QuadratureConfig) -> Result<f64> {
    check_ngon_cone(n, a, h, g)?;
    let kind = g.kind();
    if kind == GeometryKind::Euclidean {
        return Ok(ngon_centered_area(n, a, g)? * h / 3.0);
    }
    let b = ngon_apothem(n, a, g)?;
    line_integral(
        |t| {
            let gamma = ngon_section_edge(n, b, h, t, kind);
            ngon_centered_area(n, gamma, g).unwrap_or(0.0)
        },
        h,
        q,
    )
}

/// One of the solids with a closed-form or 1-D volume.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Solid {
    /// Tube of radius `r` about a circle of radius `big_r`.
    Torus { big_r: f64, r: f64 },
    /// Cone over a disc of radius `r` at distance `h` from the apex.
    RightCircularCone { r: f64, h: f64 },
    /// Cone in `X^n` over the ball `B^{n-1}(r)`.
    BallBaseCone { n: usize, r: f64, h: f64 },
    /// Cone over the regular `n`-gon with edge `a`.
    NgonCone { n: usize, a: f64, h: f64 },
}

/// A solid placed in a space: torus about the origin in `X^3`, cones with
/// apex at the origin and axis along the last spatial direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolidSpec {
    solid: Solid,
    geometry: Geometry,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolidParams {
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    big_r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    a: Option<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolidSpecRepr {
    solid: String,
    geometry: GeometryRef,
    params: SolidParams,
}

/// Geometry of a solid; the dimension is implied by the solid and optional.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeometryRef {
    kind: GeometryKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
}

impl SolidSpec {
    /// Places `solid` in the space of kind `kind` (dimension 3, or `n` for
    /// the ball-base cone) after validating its parameters.
    pub fn new(solid: Solid, kind: GeometryKind) -> Result<Self> {
        let dim = match solid {
            Solid::BallBaseCone { n, .. } => n,
            Solid::NgonCone { .. } | Solid::Torus { .. } | Solid::RightCircularCone { .. } => 3,
        };
        if dim < 2 {
            return Err(invalid("a ball-base cone needs dimension at least 2"));
        }
        let geometry = Geometry::new(kind, dim)?;
        match solid {
            Solid::Torus { big_r, r } => check_torus(big_r, r, kind)?,
            Solid::RightCircularCone { r, h } | Solid::BallBaseCone { r, h, .. } => check_cone(r, h, kind)?,
            Solid::NgonCone { n, a, h } => check_ngon_cone(n, a, h, Geometry::new(kind, 2)?)?,
        }
        Ok(SolidSpec { solid, geometry })
    }

    pub fn solid(&self) -> Solid {
        self.solid
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn kind(&self) -> GeometryKind {
        self.geometry.kind()
    }

    /// Name used in the JSON form: `torus`, `cone`, `ball-cone`, `ngon-cone`.
    pub fn name(&self) -> &'static str {
        match self.solid {
            Solid::Torus { .. } => "torus",
            Solid::RightCircularCone { .. } => "cone",
            Solid::BallBaseCone { .. } => "ball-cone",
            Solid::NgonCone { .. } => "ngon-cone",
        }
    }

    /// Parses `{"solid": .., "geometry": {"kind": .., "n": ..}, "params": {..}}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let repr: SolidSpecRepr = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        let p = &repr.params;
        let need = |v: Option<f64>, name: &str| v.ok_or_else(|| Error::Malformed(format!("missing parameter '{name}'")));
        let solid = match repr.solid.as_str() {
            "torus" => Solid::Torus { big_r: need(p.big_r, "R")?, r: need(p.r, "r")? },
            "cone" => Solid::RightCircularCone { r: need(p.r, "r")?, h: need(p.h, "h")? },
            "ball-cone" => Solid::BallBaseCone {
                n: p.n.or(repr.geometry.n).ok_or_else(|| Error::Malformed("missing parameter 'n'".into()))?,
                r: need(p.r, "r")?,
                h: need(p.h, "h")?,
            },
            "ngon-cone" => Solid::NgonCone {
                n: p.n.ok_or_else(|| Error::Malformed("missing parameter 'n'".into()))?,
                a: need(p.a, "a")?,
                h: need(p.h, "h")?,
            },
            other => return Err(Error::Malformed(format!("unknown solid '{other}'"))),
        };
        let spec = SolidSpec::new(solid, repr.geometry.kind)?;
        if let Some(n) = repr.geometry.n {
            if n != spec.geometry.dim() {
                return Err(Error::DimensionMismatch { expected: spec.geometry.dim(), found: n });
            }
        }
        Ok(spec)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let mut p = SolidParams { big_r: None, r: None, h: None, n: None, a: None };
        match self.solid {
            Solid::Torus { big_r, r } => (p.big_r, p.r) = (Some(big_r), Some(r)),
            Solid::RightCircularCone { r, h } => (p.r, p.h) = (Some(r), Some(h)),
            Solid::BallBaseCone { n, r, h } => (p.n, p.r, p.h) = (Some(n), Some(r), Some(h)),
            Solid::NgonCone { n, a, h } => (p.n, p.a, p.h) = (Some(n), Some(a), Some(h)),
        }
        serde_json::to_value(SolidSpecRepr {
            solid: self.name().to_string(),
            geometry: GeometryRef { kind: self.kind(), n: Some(self.geometry.dim()) },
            params: p,
        })
        .expect("solid specs always serialize")
    }

    /// Closed-form volume, or the 1-D integral where no closed form exists.
    pub fn volume(&self, q: &QuadratureConfig) -> Result<f64> {
        let g = self.geometry;
        match self.solid {
            Solid::Torus { big_r, r } => volume_torus(big_r, r, g),
            Solid::RightCircularCone { r, h } => volume_right_circular_cone(r, h, g),
            Solid::BallBaseCone { n, r, h } => volume_ball_base_cone(n, r, h, g, q),
            Solid::NgonCone { n, a, h } => volume_ngon_cone(n, a, h, g, q),
        }
    }

    /// The leaf profile along the curve of leaf mass centers.
    pub fn profile(&self) -> Result<PappusProfile> {
        let kind = self.kind();
        let unit = |_: f64| 1.0;
        match self.solid {
            Solid::Torus { big_r, r } => {
                let leaf = ball_centered_mass(2, r, Geometry::new(kind, 2)?)?;
                PappusProfile::new(2.0 * PI * kind.sinx(big_r), move |_| leaf, unit)
            }
            Solid::RightCircularCone { r, h } => {
                let g2 = Geometry::new(kind, 2)?;
                PappusProfile::new(
                    h,
                    move |t| ball_centered_mass(2, section_radius(r, h, t.min(h), kind), g2).unwrap_or(0.0),
                    unit,
                )
            }
            Solid::BallBaseCone { n, r, h } => {
                let gl = Geometry::new(kind, n - 1)?;
                PappusProfile::new(
                    h,
                    move |t| ball_centered_mass(n - 1, section_radius(r, h, t.min(h), kind), gl).unwrap_or(0.0),
                    unit,
                )
            }
            Solid::NgonCone { n, a, h } => {
                let g2 = Geometry::new(kind, 2)?;
                let b = ngon_apothem(n, a, g2)?;
                PappusProfile::new(
                    h,
                    move |t| ngon_centered_area(n, ngon_section_edge(n, b, h, t.min(h), kind), g2).unwrap_or(0.0),
                    unit,
                )
            }
        }
    }

    /// Distance from the origin to the farthest point of the solid.
    fn radius_bound(&self) -> f64 {
        let kind = self.kind();
        // Pythagoras: cos_X c = cos_X a cos_X b (c² = a² + b² in E).
        let hyp = |a: f64, b: f64| match kind {
            GeometryKind::Euclidean => a.hypot(b),
            GeometryKind::Spherical => (a.cos() * b.cos()).clamp(-1.0, 1.0).acos(),
            GeometryKind::Hyperbolic => (a.cosh() * b.cosh()).acosh(),
        };
        let bound = match self.solid {
            Solid::Torus { big_r, r } => big_r + r,
            Solid::RightCircularCone { r, h } | Solid::BallBaseCone { r, h, .. } => hyp(h, r),
            Solid::NgonCone { n, a, h } => {
                let rc = ngon_circumradius(n, a, Geometry::new(kind, 2).expect("valid")).expect("validated");
                hyp(h, rc)
            }
        };
        bound * (1.0 + 1e-9) + 1e-12
    }

    fn apex_half_angle(&self, r: f64, h: f64) -> f64 {
        // cot φ = cot_X r sin_X h
        let kind = self.kind();
        (kind.tanx(r) / kind.sinx(h)).atan()
    }
}

impl MonteCarloRegion for SolidSpec {
    fn geometry(&self) -> Geometry {
        self.geometry
    }

    fn radius_bound(&self) -> f64 {
        SolidSpec::radius_bound(self)
    }

    fn contains(&self, x: &[f64]) -> bool {
        let kind = self.kind();
        let n = self.geometry.dim();
        let (sx, cx) = (|v: f64| kind.sinx(v), |v: f64| kind.cosx(v));
        // On the apex side of the base hyperplane at distance h along the axis.
        let below_base = |h: f64| match kind {
            GeometryKind::Euclidean => x[n - 1] <= h,
            GeometryKind::Spherical => x[n - 1] * h.cos() - x[n] * h.sin() <= 0.0,
            GeometryKind::Hyperbolic => x[n - 1] * h.cosh() - x[n] * h.sinh() <= 0.0,
        };
        match self.solid {
            Solid::Torus { big_r, r } => {
                let rho = x[0].hypot(x[1]);
                match kind {
                    GeometryKind::Euclidean => (rho - big_r).powi(2) + x[2] * x[2] <= r * r,
                    GeometryKind::Spherical => rho * big_r.sin() + x[3] * big_r.cos() >= r.cos(),
                    GeometryKind::Hyperbolic => x[3] * big_r.cosh() - rho * big_r.sinh() <= r.cosh(),
                }
            }
            Solid::RightCircularCone { r, h } | Solid::BallBaseCone { r, h, .. } => {
                let norm = x[..n].iter().map(|v| v * v).sum::<f64>().sqrt();
                let phi = self.apex_half_angle(r, h);
                x[n - 1] >= norm * phi.cos() && below_base(h)
            }
            Solid::NgonCone { n: sides, a, h } => {
                let b = ngon_apothem(sides, a, Geometry::new(kind, 2).expect("valid")).expect("validated");
                let (along, across) = (cx(b) * sx(h), sx(b));
                let faces_ok = (0..sides).all(|k| {
                    let ang = 2.0 * PI * k as f64 / sides as f64;
                    along * (x[0] * ang.cos() + x[1] * ang.sin()) - across * x[2] <= 0.0
                });
                faces_ok && below_base(h)
            }
        }
    }
}

/// Monte Carlo volume of `s` from `samples` seeded draws.
pub fn oracle_volume_mc(s: &SolidSpec, samples: u64, seed: u64) -> Result<OracleReport> {
    estimate_volume(s, samples, seed)
}

/// Point at distance `sigma` from the apex (the origin) in the direction at
/// polar angle `beta` from the axis and azimuth `psi`, in `X^3`.
fn apex_polar(kind: GeometryKind, sigma: f64, beta: f64, psi: f64) -> Vec<f64> {
    let s = kind.sinx(sigma);
    vec![
        s * beta.sin() * psi.cos(),
        s * beta.sin() * psi.sin(),
        s * beta.cos(),
        kind.cosx(sigma),
    ]
}

/// Distance from the apex to the base hyperplane along the ray at polar
/// angle `beta`: `tan_X σ = tan_X h / cos β`.
fn ray_length(kind: GeometryKind, h: f64, beta: f64) -> f64 {
    kind.atanx(kind.tanx(h) / beta.cos())
}

/// Full-dimensional quadrature of the solid's volume over an explicit
/// coordinate chart, refined once for an error estimate.
pub fn oracle_volume_quadrature(s: &SolidSpec, q: &QuadratureConfig) -> Result<OracleReport> {
    let coarse = q.with_points((q.points_per_axis * 3 / 4).max(2));
    let fine_value = solid_quadrature(s, q)?;
    let coarse_value = solid_quadrature(s, &coarse)?;
    let dim = match s.solid {
        Solid::BallBaseCone { n, .. } if n != 3 => 2,
        _ => 3,
    };
    let evals = (q.points_per_axis as u64).pow(dim) + (coarse.points_per_axis as u64).pow(dim);
    Ok(OracleReport {
        value: fine_value,
        stderr: (fine_value - coarse_value).abs(),
        n: evals,
        seed: None,
    })
}

fn solid_quadrature(s: &SolidSpec, q: &QuadratureConfig) -> Result<f64> {
    let kind = s.kind();
    let g = s.geometry;
    match s.solid {
        Solid::Torus { big_r, r } => {
            // Tube coordinates (s, ρ, ψ): cos_X ρ c(s) + sin_X ρ (cos ψ w(s) + sin ψ e3).
            let (sr, cr) = (kind.sinx(big_r), kind.cosx(big_r));
            let patch = ManifoldPatch::new(g, vec![0.0, 0.0, 0.0], vec![2.0 * PI, r, 2.0 * PI], move |u| {
                let (s, rho, psi) = (u[0], u[1], u[2]);
                let (cs, ss) = (s.cos(), s.sin());
                let c = [sr * cs, sr * ss, 0.0, cr];
                let w = match kind {
                    GeometryKind::Euclidean => [cs, ss, 0.0, 0.0],
                    GeometryKind::Spherical => [cr * cs, cr * ss, 0.0, -sr],
                    GeometryKind::Hyperbolic => [cr * cs, cr * ss, 0.0, sr],
                };
                let (a, b) = (kind.cosx(rho), kind.sinx(rho));
                let e3 = [0.0, 0.0, 1.0, 0.0];
                (0..4).map(|i| a * c[i] + b * (psi.cos() * w[i] + psi.sin() * e3[i])).collect()
            })?;
            total_mass_integral(&patch, q)
        }
        Solid::RightCircularCone { r, h } | Solid::BallBaseCone { n: 3, r, h } => {
            let phi = s.apex_half_angle(r, h);
            let patch = ManifoldPatch::new(g, vec![0.0, 0.0, 0.0], vec![1.0, phi, 2.0 * PI], move |u| {
                let beta = u[1];
                apex_polar(kind, u[0] * ray_length(kind, h, beta), beta, u[2])
            })?;
            total_mass_integral(&patch, q)
        }
        Solid::BallBaseCone { n, r, h } => {
            // dV = sin_X^{n-1} σ dσ sin^{n-2} β dβ dΩ_{n-2}, with σ = s σ_max(β).
            let phi = s.apex_half_angle(r, h);
            let shell = unit_sphere_area(n - 2);
            let inner = integrate_box_scalar(
                |u| {
                    let len = ray_length(kind, h, u[1]);
                    kind.sinx(u[0] * len).powi(n as i32 - 1) * u[1].sin().powi(n as i32 - 2) * len
                },
                &[0.0, 0.0],
                &[1.0, phi],
                q,
            )?;
            Ok(shell * inner)
        }
        Solid::NgonCone { n, a, h } => {
            // One of n congruent wedges, |ψ| <= π/n about the first edge normal.
            let b = ngon_apothem(n, a, Geometry::new(kind, 2)?)?;
            let half = PI / n as f64;
            let (tb, sh) = (kind.tanx(b), kind.sinx(h));
            let patch = ManifoldPatch::new(g, vec![0.0, 0.0, -half], vec![1.0, 1.0, half], move |u| {
                let psi = u[2];
                let beta_max = (tb / psi.cos() / sh).atan();
                let beta = u[1] * beta_max;
                apex_polar(kind, u[0] * ray_length(kind, h, beta), beta, psi)
            })?;
            Ok(n as f64 * total_mass_integral(&patch, q)?)
        }
    }
}
