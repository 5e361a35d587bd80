//! Continuous mass centers: `F(M) = ∫ ρ r dV` over a parametrized patch,
//! and closed forms for geodesic balls, geodesic spheres and regular
//! polygons.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use statrs::function::gamma::ln_gamma;

use crate::ambient::{AmbientVector, Geometry, GeometryKind, MaterialVector, ON_SPACE_TOL};
use crate::error::{invalid, Error, Result};
use crate::quadrature::{gauss_legendre_rule, integrate_box, QuadratureConfig};

/// Step of the central-difference Jacobian.
pub const FD_STEP: f64 = 1e-6;

type Chart = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
type Jacobian = Arc<dyn Fn(&[f64]) -> Vec<Vec<f64>> + Send + Sync>;
type Density = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A parametrized `k`-dimensional piece of the space with a mass density.
#[derive(Clone)]
pub struct ManifoldPatch {
    geometry: Geometry,
    lo: Vec<f64>,
    hi: Vec<f64>,
    chart: Chart,
    jacobian: Option<Jacobian>,
    density: Density,
}

impl fmt::Debug for ManifoldPatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ManifoldPatch")
            .field("geometry", &self.geometry)
            .field("lo", &self.lo)
            .field("hi", &self.hi)
            .field("analytic_jacobian", &self.jacobian.is_some())
            .finish()
    }
}

impl ManifoldPatch {
    /// A patch over the box `[lo, hi]` with unit density.
    ///
    /// The chart is sampled on a `3^k` grid and must land on the space.
    pub fn new<F>(geometry: Geometry, lo: Vec<f64>, hi: Vec<f64>, chart: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(invalid("parameter box needs matching, nonempty bounds"));
        }
        if lo.len() > geometry.dim() {
            return Err(invalid("patch dimension exceeds the dimension of the space"));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a.is_finite() && b.is_finite() && a <= b)) {
            return Err(invalid("parameter box bounds must be finite and ordered"));
        }
        let patch = ManifoldPatch {
            geometry,
            lo,
            hi,
            chart: Arc::new(chart),
            jacobian: None,
            density: Arc::new(|_| 1.0),
        };
        for u in patch.sample_grid() {
            let p = (patch.chart)(&u);
            let residual = geometry.constraint_residual(&p)?;
            if residual.is_nan() || residual >= ON_SPACE_TOL {
                return Err(Error::OffSpace { residual });
            }
        }
        Ok(patch)
    }

    /// Replaces the unit density. The density is sampled for non-negativity.
    pub fn with_density<F>(mut self, density: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        self.density = Arc::new(density);
        for u in self.sample_grid() {
            let rho = (self.density)(&u);
            if !(rho >= 0.0 && rho.is_finite()) {
                return Err(invalid(format!("density must be finite and non-negative, got {rho}")));
            }
        }
        Ok(self)
    }

    /// Supplies the partial derivatives `∂r/∂u_i` (one ambient vector per
    /// parameter) instead of finite differences.
    pub fn with_jacobian<F>(mut self, jacobian: F) -> Self
    where
        F: Fn(&[f64]) -> Vec<Vec<f64>> + Send + Sync + 'static,
    {
        self.jacobian = Some(Arc::new(jacobian));
        self
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    /// Intrinsic dimension `k` of the patch.
    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn bounds(&self) -> (&[f64], &[f64]) {
        (&self.lo, &self.hi)
    }

    pub fn point(&self, u: &[f64]) -> Vec<f64> {
        (self.chart)(u)
    }

    pub fn density(&self, u: &[f64]) -> f64 {
        (self.density)(u)
    }

    fn sample_grid(&self) -> Vec<Vec<f64>> {
        let k = self.lo.len();
        let mut out = Vec::with_capacity(3usize.pow(k as u32));
        let mut idx = vec![0usize; k];
        loop {
            out.push(
                (0..k)
                    .map(|i| self.lo[i] + 0.5 * idx[i] as f64 * (self.hi[i] - self.lo[i]))
                    .collect(),
            );
            let mut axis = 0;
            loop {
                if axis == k {
                    return out;
                }
                idx[axis] += 1;
                if idx[axis] < 3 {
                    break;
                }
                idx[axis] = 0;
                axis += 1;
            }
        }
    }

    fn tangents(&self, u: &[f64]) -> Vec<Vec<f64>> {
        if let Some(j) = &self.jacobian {
            return j(u);
        }
        let mut v = u.to_vec();
        (0..u.len())
            .map(|i| {
                v[i] = u[i] + FD_STEP;
                let plus = (self.chart)(&v);
                v[i] = u[i] - FD_STEP;
                let minus = (self.chart)(&v);
                v[i] = u[i];
                plus.iter()
                    .zip(&minus)
                    .map(|(p, m)| (p - m) / (2.0 * FD_STEP))
                    .collect()
            })
            .collect()
    }

    /// `sqrt|det(Dr^T J Dr)|` at parameter `u`.
    pub fn volume_element(&self, u: &[f64]) -> f64 {
        let t = self.tangents(u);
        let k = t.len();
        let gram = DMatrix::from_fn(k, k, |i, j| self.geometry.form_unchecked(&t[i], &t[j]));
        gram.determinant().abs().sqrt()
    }
}

fn patch_integrals(m: &ManifoldPatch, q: &QuadratureConfig) -> Result<(Vec<f64>, f64, f64)> {
    let n1 = m.geometry.ambient_dim();
    // Components: rho r dV (n + 1 entries), rho dV, dV.
    let out = integrate_box(
        |u| {
            let dv = m.volume_element(u);
            let rho = m.density(u);
            let w = rho * dv;
            let mut v: Vec<f64> = m.point(u).iter().map(|x| x * w).collect();
            v.push(w);
            v.push(dv);
            v
        },
        &m.lo,
        &m.hi,
        n1 + 2,
        q,
    )?;
    if out[n1 + 1].is_nan() || out[n1 + 1] <= 0.0 {
        return Err(Error::DegenerateJacobian);
    }
    Ok((out[..n1].to_vec(), out[n1], out[n1 + 1]))
}

/// `F(M) = ∫ ρ r dV` as a material vector; decompose it for the centered
/// mass and the mass center.
pub fn mass_center_integral(m: &ManifoldPatch, q: &QuadratureConfig) -> Result<MaterialVector> {
    let (v, _, _) = patch_integrals(m, q)?;
    Ok(MaterialVector::from_raw(m.geometry, AmbientVector::from(v)))
}

/// `m_tot = ∫ ρ dV`.
pub fn total_mass_integral(m: &ManifoldPatch, q: &QuadratureConfig) -> Result<f64> {
    patch_integrals(m, q).map(|(_, t, _)| t)
}

/// Mass-center vector and total mass of a manifold split into patches.
pub fn integrate_patches(patches: &[ManifoldPatch], q: &QuadratureConfig) -> Result<(MaterialVector, f64)> {
    let first = patches.first().ok_or(Error::EmptyInput)?;
    let g = first.geometry;
    let mut sum = vec![0.0; g.ambient_dim()];
    let mut total = 0.0;
    for p in patches {
        if p.geometry != g {
            return Err(invalid("patches of one manifold must share the space"));
        }
        let (v, t, _) = patch_integrals(p, q)?;
        sum.iter_mut().zip(&v).for_each(|(s, x)| *s += x);
        total += t;
    }
    Ok((MaterialVector::from_raw(g, AmbientVector::from(sum)), total))
}

/// Volume of the Euclidean unit `k`-ball, `π^{k/2} / Γ(k/2 + 1)`.
pub fn unit_ball_volume(k: usize) -> f64 {
    // ω_k = 2π/k ω_{k-2} keeps the small dimensions exact to rounding
    if k <= 64 {
        let mut w = if k.is_multiple_of(2) { 1.0 } else { 2.0 };
        for j in (k % 2 + 2..=k).step_by(2) {
            w *= 2.0 * PI / j as f64;
        }
        return w;
    }
    let h = 0.5 * k as f64;
    (h * PI.ln() - ln_gamma(h + 1.0)).exp()
}

/// Area of the Euclidean unit sphere `S^k ⊂ R^{k+1}`, `(k + 1) ω_{k+1}`.
pub fn unit_sphere_area(k: usize) -> f64 {
    (k + 1) as f64 * unit_ball_volume(k + 1)
}

fn check_radius(r: f64, g: Geometry) -> Result<()> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(invalid(format!("radius must be finite and non-negative, got {r}")));
    }
    if g.kind() == GeometryKind::Spherical && r > PI {
        return Err(invalid(format!("spherical radius {r} exceeds pi")));
    }
    Ok(())
}

/// Nodes of the rule used by [`sinx_power_integral`] below `r = 1`.
const SMALL_RADIUS_NODES: usize = 40;

/// `y - sin y`, accurate near zero.
fn y_minus_sin(y: f64) -> f64 {
    if y.abs() < 0.5 {
        let y2 = y * y;
        let mut t = 0.0;
        for &c in &[
            1.0 / 1_307_674_368_000.0,
            -1.0 / 6_227_020_800.0,
            1.0 / 39_916_800.0,
            -1.0 / 362_880.0,
            1.0 / 5040.0,
            -1.0 / 120.0,
            1.0 / 6.0,
        ] {
            t = t * y2 + c;
        }
        t * y2 * y
    } else {
        y - y.sin()
    }
}

/// `sinh y - y`, accurate near zero.
fn sinh_minus_y(y: f64) -> f64 {
    if y.abs() < 0.5 {
        let y2 = y * y;
        let mut t = 0.0;
        for &c in &[
            1.0 / 1_307_674_368_000.0,
            1.0 / 6_227_020_800.0,
            1.0 / 39_916_800.0,
            1.0 / 362_880.0,
            1.0 / 5040.0,
            1.0 / 120.0,
            1.0 / 6.0,
        ] {
            t = t * y2 + c;
        }
        t * y2 * y
    } else {
        y.sinh() - y
    }
}

/// `∫_0^r sin_X^m(t) dt`.
pub fn sinx_power_integral(m: usize, r: f64, kind: GeometryKind) -> f64 {
    // The reduction formula cancels badly for small r; there the integrand
    // is nearly t^m and a fixed Gauss-Legendre rule is exact to rounding.
    if m > 3 && r < 1.0 && kind != GeometryKind::Euclidean {
        let half = 0.5 * r;
        return gauss_legendre_rule(SMALL_RADIUS_NODES)
            .iter()
            .map(|&(x, w)| w * kind.sinx(half * (x + 1.0)).powi(m as i32))
            .sum::<f64>()
            * half;
    }
    match kind {
        GeometryKind::Euclidean => r.powi(m as i32 + 1) / (m + 1) as f64,
        GeometryKind::Spherical => match m {
            0 => r,
            1 => 2.0 * (0.5 * r).sin().powi(2),
            2 => 0.25 * y_minus_sin(2.0 * r),
            3 => {
                let one_minus_cos = 2.0 * (0.5 * r).sin().powi(2);
                one_minus_cos * one_minus_cos * (2.0 + r.cos()) / 3.0
            }
            _ => {
                let m_f = m as f64;
                -r.sin().powi(m as i32 - 1) * r.cos() / m_f
                    + (m_f - 1.0) / m_f * sinx_power_integral(m - 2, r, kind)
            }
        },
        GeometryKind::Hyperbolic => match m {
            0 => r,
            1 => 2.0 * (0.5 * r).sinh().powi(2),
            2 => 0.25 * sinh_minus_y(2.0 * r),
            3 => {
                let cosh_minus_one = 2.0 * (0.5 * r).sinh().powi(2);
                cosh_minus_one * cosh_minus_one * (r.cosh() + 2.0) / 3.0
            }
            _ => {
                let m_f = m as f64;
                r.sinh().powi(m as i32 - 1) * r.cosh() / m_f
                    - (m_f - 1.0) / m_f * sinx_power_integral(m - 2, r, kind)
            }
        },
    }
}

/// Centered mass of the geodesic ball `B^k(r)`: `ω_k sin_X^k r`.
pub fn ball_centered_mass(k: usize, r: f64, g: Geometry) -> Result<f64> {
    if k == 0 {
        return Err(invalid("ball dimension must be at least 1"));
    }
    check_radius(r, g)?;
    let s = g.sinx(r);
    Ok(unit_ball_volume(k) * if r == PI { 0.0 } else { s.powi(k as i32) })
}

/// Total mass (volume) of `B^k(r)`: `k ω_k ∫_0^r sin_X^{k-1}`.
pub fn ball_total_mass(k: usize, r: f64, g: Geometry) -> Result<f64> {
    if k == 0 {
        return Err(invalid("ball dimension must be at least 1"));
    }
    check_radius(r, g)?;
    Ok(k as f64 * unit_ball_volume(k) * sinx_power_integral(k - 1, r, g.kind()))
}

/// Total mass of the geodesic sphere `S^k(r)`: `|S^k| sin_X^k r`.
pub fn sphere_total_mass(k: usize, r: f64, g: Geometry) -> Result<f64> {
    check_radius(r, g)?;
    Ok(unit_sphere_area(k) * g.sinx(r).powi(k as i32))
}

/// Centered mass of `S^k(r)`: `|S^k| sin_X^k r cos_X r`.
///
/// For the sphere this is negative past `r = π/2`: the vector sum then
/// points to the antipode of the center.
pub fn sphere_centered_mass(k: usize, r: f64, g: Geometry) -> Result<f64> {
    Ok(sphere_total_mass(k, r, g)? * g.cosx(r))
}

fn check_ngon(n: usize, a: f64, g: Geometry) -> Result<()> {
    if n < 3 {
        return Err(invalid("a polygon needs at least 3 sides"));
    }
    if !(a.is_finite() && a >= 0.0) {
        return Err(invalid(format!("edge length must be finite and non-negative, got {a}")));
    }
    if g.kind() == GeometryKind::Spherical && (PI / n as f64).tan() / (0.5 * a).tan() <= 1.0 {
        return Err(Error::Infeasible(format!(
            "no spherical regular {n}-gon with edge {a} inside an open hemisphere"
        )));
    }
    Ok(())
}

/// Centered area of the regular `n`-gon with edge `a`:
/// `(n a / 2) tan_X(a / 2) cot(π / n)`.
pub fn ngon_centered_area(n: usize, a: f64, g: Geometry) -> Result<f64> {
    check_ngon(n, a, g)?;
    let cot = 1.0 / (PI / n as f64).tan();
    Ok(0.5 * n as f64 * a * g.kind().tanx(0.5 * a) * cot)
}

/// Distance `b` from the center of the regular `n`-gon to its edges:
/// `tan_X(a / 2) = tan(π / n) sin_X b`.
pub fn ngon_apothem(n: usize, a: f64, g: Geometry) -> Result<f64> {
    check_ngon(n, a, g)?;
    let kind = g.kind();
    Ok(kind.asinx(kind.tanx(0.5 * a) / (PI / n as f64).tan()))
}

/// Distance from the center of the regular `n`-gon to its vertices:
/// `sin_X R = sin_X(a / 2) / sin(π / n)`.
pub fn ngon_circumradius(n: usize, a: f64, g: Geometry) -> Result<f64> {
    check_ngon(n, a, g)?;
    let kind = g.kind();
    Ok(kind.asinx(kind.sinx(0.5 * a) / (PI / n as f64).sin()))
}

/// Area of the regular `n`-gon from its angle sum.
pub fn ngon_total_area(n: usize, a: f64, g: Geometry) -> Result<f64> {
    check_ngon(n, a, g)?;
    let nf = n as f64;
    let kind = g.kind();
    if kind == GeometryKind::Euclidean {
        return Ok(0.25 * nf * a * a / (PI / nf).tan());
    }
    // Interior angle A from cos(π/n) = cos_X(a/2) sin(A/2).
    let half = ((PI / nf).cos() / kind.cosx(0.5 * a)).clamp(-1.0, 1.0).asin();
    let angle = 2.0 * half;
    Ok(match kind {
        GeometryKind::Spherical => nf * angle - (nf - 2.0) * PI,
        _ => (nf - 2.0) * PI - nf * angle,
    })
}

/// Unit vector of `R^k` in hyperspherical angles `θ_1 .. θ_{k-1}`.
fn sphere_direction(theta: &[f64]) -> Vec<f64> {
    let k = theta.len() + 1;
    let mut u = vec![0.0; k];
    let mut s = 1.0;
    for (i, t) in theta.iter().enumerate() {
        u[i] = s * t.cos();
        s *= t.sin();
    }
    u[k - 1] = s;
    u
}

fn angle_box(m: usize) -> (Vec<f64>, Vec<f64>) {
    // m angles parametrize S^m; the last one runs over a full turn.
    let lo = vec![0.0; m];
    let mut hi = vec![PI; m];
    hi[m - 1] = 2.0 * PI;
    (lo, hi)
}

fn polar_point(g: Geometry, dir: &[f64], rho: f64) -> Vec<f64> {
    let kind = g.kind();
    let mut p = vec![0.0; g.ambient_dim()];
    let s = kind.sinx(rho);
    for (x, d) in p.iter_mut().zip(dir) {
        *x = s * d;
    }
    p[g.dim()] = kind.cosx(rho);
    p
}

/// `B^k(r)` centered at the origin, spanning the first `k` coordinate
/// directions, in geodesic polar coordinates.
pub fn ball_patch(k: usize, r: f64, g: Geometry) -> Result<ManifoldPatch> {
    if k == 0 || k > g.dim() {
        return Err(invalid(format!("ball dimension {k} must lie in 1..={}", g.dim())));
    }
    check_radius(r, g)?;
    if k == 1 {
        return ManifoldPatch::new(g, vec![-r], vec![r], move |u| polar_point(g, &[1.0], u[0]));
    }
    let (alo, ahi) = angle_box(k - 1);
    let mut lo = vec![0.0];
    lo.extend(alo);
    let mut hi = vec![r];
    hi.extend(ahi);
    ManifoldPatch::new(g, lo, hi, move |u| polar_point(g, &sphere_direction(&u[1..]), u[0]))
}

/// The geodesic sphere `S^k(r)` about the origin, in the first `k + 1`
/// coordinate directions.
pub fn sphere_patch(k: usize, r: f64, g: Geometry) -> Result<ManifoldPatch> {
    if k == 0 || k + 1 > g.dim() {
        return Err(invalid(format!(
            "sphere dimension {k} must lie in 1..={}",
            g.dim().saturating_sub(1)
        )));
    }
    check_radius(r, g)?;
    let (lo, hi) = angle_box(k);
    ManifoldPatch::new(g, lo, hi, move |u| polar_point(g, &sphere_direction(u), r))
}

/// The `j`-th of the `n` congruent wedges of the regular `n`-gon with edge
/// `a` about the origin of `X^2`. Parameters are `(s, ψ)` with the polar
/// radius `s ρ_max(ψ)`, where `tan_X ρ_max = tan_X b / cos ψ`.
pub fn ngon_wedge_patch(n: usize, a: f64, j: usize, g: Geometry) -> Result<ManifoldPatch> {
    if g.dim() != 2 {
        return Err(invalid("regular polygons live in two-dimensional spaces"));
    }
    let b = ngon_apothem(n, a, g)?;
    let kind = g.kind();
    let half = PI / n as f64;
    let axis = 2.0 * PI * j as f64 / n as f64;
    let tb = kind.tanx(b);
    ManifoldPatch::new(g, vec![0.0, -half], vec![1.0, half], move |u| {
        let rho_max = kind.atanx(tb / u[1].cos());
        let phi = axis + u[1];
        polar_point(g, &[phi.cos(), phi.sin()], u[0] * rho_max)
    })
}

/// Built-in manifolds by name: `ball` (`size` = radius), `sphere-shell`
/// (`size` = radius) and `ngon` (`order` = sides, `size` = edge).
///
/// Returns the patches whose mass-center vectors sum to that of the
/// manifold. Balls and spheres are placed in a space of their own
/// dimension (`k` and `k + 1`); polygons in `X^2`.
pub fn builtin_patches(name: &str, order: usize, size: f64, kind: GeometryKind) -> Result<Vec<ManifoldPatch>> {
    match name {
        "ball" => ball_patch(order, size, Geometry::new(kind, order.max(1))?).map(|p| vec![p]),
        "sphere-shell" => sphere_patch(order, size, Geometry::new(kind, order + 1)?).map(|p| vec![p]),
        "ngon" => {
            let g = Geometry::new(kind, 2)?;
            (0..order).map(|j| ngon_wedge_patch(order, size, j, g)).collect()
        }
        other => Err(invalid(format!("unknown patch '{other}'; expected ball, sphere-shell or ngon"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn geoms(n: usize) -> [Geometry; 3] {
        [Geometry::euclidean(n), Geometry::spherical(n), Geometry::hyperbolic(n)]
    }

    #[test]
    fn unit_ball_volumes() {
        assert_relative_eq!(unit_ball_volume(1), 2.0, max_relative = 1e-14);
        assert_relative_eq!(unit_ball_volume(2), PI, max_relative = 1e-14);
        assert_relative_eq!(unit_ball_volume(3), 4.0 * PI / 3.0, max_relative = 1e-14);
        assert_relative_eq!(unit_ball_volume(4), PI * PI / 2.0, max_relative = 1e-14);
        assert_relative_eq!(unit_ball_volume(5), 8.0 * PI * PI / 15.0, max_relative = 1e-14);
        assert_relative_eq!(unit_sphere_area(0), 2.0, max_relative = 1e-14);
        assert_relative_eq!(unit_sphere_area(2), 4.0 * PI, max_relative = 1e-14);
        assert_eq!(unit_sphere_area(0), 2.0);
        // both branches agree where they meet
        let h = 32.5f64;
        let via_gamma = (h * PI.ln() - ln_gamma(h + 1.0)).exp();
        assert_relative_eq!(unit_ball_volume(65) / via_gamma, 1.0, max_relative = 1e-12);
        assert_relative_eq!(unit_ball_volume(64) * 2.0 * PI / 66.0, unit_ball_volume(66), max_relative = 1e-12);
    }

    #[test]
    fn table_rows() {
        let (e, s, h) = (Geometry::euclidean(3), Geometry::spherical(3), Geometry::hyperbolic(3));
        let r: f64 = 0.8;
        assert_relative_eq!(ball_centered_mass(1, r, s).unwrap(), 2.0 * r.sin(), max_relative = 1e-14);
        assert_relative_eq!(ball_total_mass(1, r, s).unwrap(), 2.0 * r, max_relative = 1e-14);
        assert_relative_eq!(ball_centered_mass(2, r, s).unwrap(), PI * r.sin().powi(2), max_relative = 1e-14);
        assert_relative_eq!(
            ball_total_mass(2, r, s).unwrap(),
            4.0 * PI * (0.5 * r).sin().powi(2),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            ball_centered_mass(3, r, h).unwrap(),
            4.0 * PI / 3.0 * r.sinh().powi(3),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            ball_total_mass(3, r, h).unwrap(),
            2.0 * PI * (r.sinh() * r.cosh() - r),
            max_relative = 1e-13
        );
        assert_relative_eq!(
            ball_total_mass(3, r, s).unwrap(),
            2.0 * PI * (r - r.sin() * r.cos()),
            max_relative = 1e-13
        );
        assert_relative_eq!(ball_total_mass(3, r, e).unwrap(), 4.0 * PI / 3.0 * r.powi(3), max_relative = 1e-14);
        assert_eq!(ball_centered_mass(2, 0.0, s).unwrap(), 0.0);

        assert_relative_eq!(sphere_centered_mass(0, r, s).unwrap(), 2.0 * r.cos(), max_relative = 1e-14);
        assert_relative_eq!(sphere_total_mass(0, r, s).unwrap(), 2.0, max_relative = 1e-14);
        assert_relative_eq!(
            sphere_centered_mass(1, r, h).unwrap(),
            2.0 * PI * r.sinh() * r.cosh(),
            max_relative = 1e-14
        );
        assert_relative_eq!(sphere_centered_mass(2, r, e).unwrap(), 4.0 * PI * r * r, max_relative = 1e-14);
    }

    #[test]
    fn spherical_ball_of_radius_pi_has_no_center() {
        let s = Geometry::spherical(3);
        assert_eq!(ball_centered_mass(3, PI, s).unwrap(), 0.0);
        assert!(ball_centered_mass(3, PI + 0.1, s).is_err());
    }

    #[test]
    fn power_integrals_match_quadrature() {
        use crate::quadrature::integrate_1d;
        let cfg = QuadratureConfig::adaptive();
        for kind in GeometryKind::ALL {
            for m in 0..7 {
                for r in [1e-3, 0.3, 1.1, 2.5] {
                    let exact = sinx_power_integral(m, r, kind);
                    let q = integrate_1d(|t| kind.sinx(t).powi(m as i32), 0.0, r, &[], &cfg).unwrap();
                    let tol = if m >= 4 && r < 0.01 { 1e-8 } else { 1e-12 };
                    assert!(
                        (exact - q.value[0]).abs() <= tol * q.value[0].abs(),
                        "{kind} m={m} r={r}: {exact} vs {}",
                        q.value[0]
                    );
                }
            }
        }
    }

    #[test]
    fn ngon_formulas() {
        let (e, s, h) = (Geometry::euclidean(2), Geometry::spherical(2), Geometry::hyperbolic(2));
        let (n, a) = (5usize, 0.6f64);
        let cot = 1.0 / (PI / 5.0).tan();
        assert_relative_eq!(ngon_centered_area(n, a, s).unwrap(), 1.5 * (0.3f64).tan() * cot, max_relative = 1e-14);
        assert_relative_eq!(ngon_centered_area(n, a, h).unwrap(), 1.5 * (0.3f64).tanh() * cot, max_relative = 1e-14);
        assert_relative_eq!(ngon_centered_area(n, a, e).unwrap(), 0.25 * 5.0 * 0.36 * cot, max_relative = 1e-14);

        // small edges: spherical / Euclidean -> 1
        let ratio = ngon_centered_area(6, 1e-4, s).unwrap() / ngon_centered_area(6, 1e-4, e).unwrap();
        assert!((ratio - 1.0).abs() < 1e-6);

        assert_relative_eq!(ngon_circumradius(6, 0.5, e).unwrap(), 0.5, max_relative = 1e-14);
        let b = ngon_apothem(n, a, s).unwrap();
        assert_relative_eq!((0.3f64).tan(), (PI / 5.0).tan() * b.sin(), max_relative = 1e-14);
        assert_eq!(ngon_circumradius(4, 0.0, h).unwrap(), 0.0);

        assert!(matches!(ngon_centered_area(3, 2.2, s), Err(Error::Infeasible(_))));
        assert!(ngon_centered_area(2, 0.1, e).is_err());
    }

    #[test]
    fn ngon_total_area_angle_sum() {
        // an octant of S^2 is the regular triangle with right angles
        let s = Geometry::spherical(2);
        assert_relative_eq!(ngon_total_area(3, PI / 2.0, s).unwrap(), PI / 2.0, max_relative = 1e-12);
        for g in geoms(2) {
            for (n, a) in [(3, 0.4), (5, 0.6), (8, 0.2)] {
                let total = ngon_total_area(n, a, g).unwrap();
                let cen = ngon_centered_area(n, a, g).unwrap();
                match g.kind() {
                    GeometryKind::Spherical => assert!(cen < total),
                    GeometryKind::Hyperbolic => assert!(cen > total),
                    GeometryKind::Euclidean => assert_relative_eq!(cen, total, max_relative = 1e-14),
                }
            }
        }
    }

    #[test]
    fn cap_and_arc_integrals() {
        let cfg = QuadratureConfig::default();
        let s = Geometry::spherical(2);
        let r: f64 = 0.9;
        let cap = ball_patch(2, r, s).unwrap();
        let v = mass_center_integral(&cap, &cfg).unwrap();
        let (m, p) = v.decompose().unwrap();
        assert_relative_eq!(m, PI * r.sin().powi(2), max_relative = 1e-9);
        assert!(p.max_abs_diff(&s.origin()) < 1e-9);
        let total = total_mass_integral(&cap, &cfg).unwrap();
        assert_relative_eq!(total, 4.0 * PI * (0.5 * r).sin().powi(2), max_relative = 1e-9);

        let arc = ball_patch(1, r, s).unwrap();
        let v = mass_center_integral(&arc, &cfg).unwrap();
        assert_relative_eq!(v.mass(), 2.0 * r.sin(), max_relative = 1e-9);
    }

    #[test]
    fn zero_density_gives_zero_vector() {
        let p = ball_patch(2, 0.5, Geometry::hyperbolic(2)).unwrap().with_density(|_| 0.0).unwrap();
        let v = mass_center_integral(&p, &QuadratureConfig::fast()).unwrap();
        assert!(v.is_zero());
    }

    #[test]
    fn euclidean_unit_square() {
        let g = Geometry::euclidean(2);
        let p = ManifoldPatch::new(g, vec![0.0, 0.0], vec![1.0, 1.0], |u| vec![u[0], u[1], 1.0]).unwrap();
        let t = total_mass_integral(&p, &QuadratureConfig::fast()).unwrap();
        assert_relative_eq!(t, 1.0, max_relative = 1e-9);
        let c = mass_center_integral(&p, &QuadratureConfig::fast()).unwrap().point().unwrap();
        assert_relative_eq!(c[0], 0.5, max_relative = 1e-9);
    }

    #[test]
    fn analytic_jacobian_agrees_with_differences() {
        let g = Geometry::hyperbolic(2);
        let r = 0.7;
        let fd = ball_patch(2, r, g).unwrap();
        let exact = ball_patch(2, r, g).unwrap().with_jacobian(move |u| {
            let (rho, th) = (u[0], u[1]);
            vec![
                vec![rho.cosh() * th.cos(), rho.cosh() * th.sin(), rho.sinh()],
                vec![-rho.sinh() * th.sin(), rho.sinh() * th.cos(), 0.0],
            ]
        });
        for u in [[0.1, 0.2], [0.5, 3.0], [0.7, 6.0]] {
            assert_relative_eq!(fd.volume_element(&u), exact.volume_element(&u), max_relative = 1e-8);
            assert_relative_eq!(exact.volume_element(&u), u[0].sinh(), max_relative = 1e-14);
        }
    }

    #[test]
    fn invalid_patches() {
        let s = Geometry::spherical(2);
        assert!(matches!(
            ManifoldPatch::new(s, vec![0.0], vec![1.0], |u| vec![u[0], 0.0, 2.0]),
            Err(Error::OffSpace { .. })
        ));
        let p = ball_patch(2, 0.5, s).unwrap();
        assert!(p.with_density(|_| -1.0).is_err());
        let flat = ManifoldPatch::new(s, vec![0.0], vec![1.0], |_| vec![0.0, 0.0, 1.0]).unwrap();
        assert_eq!(
            mass_center_integral(&flat, &QuadratureConfig::fast()).unwrap_err(),
            Error::DegenerateJacobian
        );
        assert!(builtin_patches("torus", 2, 0.5, GeometryKind::Spherical).is_err());
    }

    #[test]
    fn ngon_wedges_sum_to_closed_form() {
        let cfg = QuadratureConfig::default();
        for kind in [GeometryKind::Spherical, GeometryKind::Hyperbolic] {
            let patches = builtin_patches("ngon", 5, 0.6, kind).unwrap();
            let (v, total) = integrate_patches(&patches, &cfg).unwrap();
            let g = Geometry::new(kind, 2).unwrap();
            assert_relative_eq!(v.mass(), ngon_centered_area(5, 0.6, g).unwrap(), max_relative = 1e-9);
            assert_relative_eq!(total, ngon_total_area(5, 0.6, g).unwrap(), max_relative = 1e-9);
            assert!(v.point().unwrap().max_abs_diff(&g.origin()) < 1e-9);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn ball_derivative_is_sphere(k in 1usize..5, r in 0.05f64..2.5, kind in 0usize..3) {
            let g = Geometry::new(GeometryKind::ALL[kind], 4).unwrap();
            let h = 1e-5;
            let fd = (ball_centered_mass(k, r + h, g).unwrap() - ball_centered_mass(k, r - h, g).unwrap()) / (2.0 * h);
            let exact = sphere_centered_mass(k - 1, r, g).unwrap();
            prop_assert!((fd - exact).abs() <= 1e-6 * exact.abs().max(1e-3));
        }

        #[test]
        fn total_mass_derivative_is_sphere_area(k in 1usize..6, r in 0.05f64..2.5, kind in 0usize..3) {
            let g = Geometry::new(GeometryKind::ALL[kind], 5).unwrap();
            let h = 1e-5;
            let fd = (ball_total_mass(k, r + h, g).unwrap() - ball_total_mass(k, r - h, g).unwrap()) / (2.0 * h);
            let exact = sphere_total_mass(k - 1, r, g).unwrap();
            prop_assert!((fd - exact).abs() <= 1e-6 * exact);
        }

        #[test]
        fn centered_mass_orders_like_sine(k in 1usize..5, r in 0.01f64..1.5) {
            let m = |kind| ball_centered_mass(k, r, Geometry::new(kind, 4).unwrap()).unwrap();
            prop_assert!(m(GeometryKind::Spherical) < m(GeometryKind::Euclidean));
            prop_assert!(m(GeometryKind::Euclidean) < m(GeometryKind::Hyperbolic));
        }
    }
}
