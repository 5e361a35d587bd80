//! Finite mass centers: the sum of material vectors, and the two-point
//! relations between distance, centered mass and center location.

use serde::{Deserialize, Serialize};

use crate::ambient::{AmbientVector, Geometry, GeometryKind, MaterialVector};
use crate::error::{invalid, Error, Result};

/// Antipodal pairs closer than this (in distance and in mass) have no center.
pub const ANTIPODAL_TOL: f64 = 1e-8;

/// A nonempty family of material vectors of one space.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    geometry: Geometry,
    vectors: Vec<MaterialVector>,
}

impl PointSet {
    pub fn new(geometry: Geometry, vectors: Vec<MaterialVector>) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some(v) = vectors.iter().find(|v| v.geometry() != geometry) {
            return Err(Error::DimensionMismatch {
                expected: geometry.ambient_dim(),
                found: v.geometry().ambient_dim(),
            });
        }
        Ok(PointSet { geometry, vectors })
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn vectors(&self) -> &[MaterialVector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Sum of the individual masses.
    pub fn total_mass(&self) -> f64 {
        self.vectors.iter().map(MaterialVector::mass).sum()
    }

    /// Parses the JSON point-set format
    /// `{"geometry": {..}, "points": [{"mass": m, "point": [..]} | {"vector": [..]}]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: PointSetFile =
            serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        file.into_point_set()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let file = PointSetFile {
            geometry: self.geometry,
            points: self
                .vectors
                .iter()
                .map(|v| PointEntry::Vector {
                    vector: v.coords().to_vec(),
                })
                .collect(),
        };
        serde_json::to_value(file).expect("point sets always serialize")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSetFile {
    pub geometry: Geometry,
    pub points: Vec<PointEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointEntry {
    Weighted { mass: f64, point: Vec<f64> },
    Vector { vector: Vec<f64> },
}

impl PointSetFile {
    pub fn into_point_set(self) -> Result<PointSet> {
        let g = self.geometry;
        let vectors = self
            .points
            .into_iter()
            .map(|p| match p {
                PointEntry::Weighted { mass, point } => MaterialVector::from_point(g, mass, &point),
                PointEntry::Vector { vector } => MaterialVector::new(g, vector),
            })
            .collect::<Result<Vec<_>>>()?;
        PointSet::new(g, vectors)
    }
}

/// Pairwise (tree) sum of ambient coordinates.
fn tree_sum(vs: &[MaterialVector], out: &mut [f64]) {
    match vs.len() {
        0 => {}
        1 => {
            for (o, x) in out.iter_mut().zip(vs[0].coords().iter()) {
                *o += x;
            }
        }
        n => {
            let mut left = vec![0.0; out.len()];
            let mut right = vec![0.0; out.len()];
            tree_sum(&vs[..n / 2], &mut left);
            tree_sum(&vs[n / 2..], &mut right);
            for ((o, l), r) in out.iter_mut().zip(&left).zip(&right) {
                *o += l + r;
            }
        }
    }
}

/// Mass center vector `a_1 ⊕ .. ⊕ a_N = a_1 + .. + a_N`.
///
/// The result may be the zero vector (no mass center), which callers detect
/// through [`MaterialVector::is_zero`] or a zero mass.
pub fn oplus(s: &PointSet) -> MaterialVector {
    oplus_slice(s.geometry, &s.vectors)
}

pub fn oplus_slice(g: Geometry, vs: &[MaterialVector]) -> MaterialVector {
    let mut out = vec![0.0; g.ambient_dim()];
    tree_sum(vs, &mut out);
    MaterialVector::from_raw(g, AmbientVector::from(out))
}

fn check_two_point(ma: f64, mb: f64, d: f64, g: GeometryKind) -> Result<()> {
    if !(ma.is_finite() && mb.is_finite() && ma > 0.0 && mb > 0.0) {
        return Err(invalid(format!("masses must be positive and finite, got {ma}, {mb}")));
    }
    if !(d.is_finite() && d >= 0.0) {
        return Err(invalid(format!("distance must be non-negative and finite, got {d}")));
    }
    if g == GeometryKind::Spherical && d > std::f64::consts::PI {
        return Err(invalid(format!("spherical distance {d} exceeds pi")));
    }
    Ok(())
}

/// `sqrt(m_a^2 + m_b^2 + 2 m_a m_b cos_X d)`, the mass of `a ⊕ b`.
pub fn centered_mass_two(ma: f64, mb: f64, d: f64, g: Geometry) -> Result<f64> {
    let kind = g.kind();
    check_two_point(ma, mb, d, kind)?;
    // Rewritten around cos_X d = 1 -/+ 2 sin_X^2(d/2) to avoid cancellation.
    Ok(match kind {
        GeometryKind::Euclidean => ma + mb,
        GeometryKind::Spherical => {
            let c = (0.5 * d).cos();
            ((ma - mb).powi(2) + 4.0 * ma * mb * c * c).max(0.0).sqrt()
        }
        GeometryKind::Hyperbolic => {
            let s = (0.5 * d).sinh();
            ((ma + mb).powi(2) + 4.0 * ma * mb * s * s).sqrt()
        }
    })
}

/// `m_cen^2 - m_tot^2 = 2 m_a m_b (cos_X d - 1)`.
pub fn deviation(ma: f64, mb: f64, d: f64, g: Geometry) -> Result<f64> {
    let kind = g.kind();
    check_two_point(ma, mb, d, kind)?;
    Ok(match kind {
        GeometryKind::Euclidean => 0.0,
        GeometryKind::Spherical => -4.0 * ma * mb * (0.5 * d).sin().powi(2),
        GeometryKind::Hyperbolic => 4.0 * ma * mb * (0.5 * d).sinh().powi(2),
    })
}

/// Location of the mass center of two material points on their segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoPointSolution {
    pub geometry: GeometryKind,
    pub ma: f64,
    pub mb: f64,
    pub d: f64,
    /// Distance from the first point to the center.
    pub d1: f64,
    /// Distance from the second point to the center.
    pub d2: f64,
    pub m_cen: f64,
    /// `m_a cos_X d1 + m_b cos_X d2`, an independent evaluation of `m_cen`.
    pub m_cen_projected: f64,
    pub m_tot: f64,
}

impl TwoPointSolution {
    /// `m_a sin_X d1 - m_b sin_X d2`.
    pub fn lever_residual(&self) -> f64 {
        self.ma * self.geometry.sinx(self.d1) - self.mb * self.geometry.sinx(self.d2)
    }
}

/// Solves the lever law `m_a sin_X d1 = m_b sin_X d2` with `d1 + d2 = d`.
pub fn locate_center(ma: f64, mb: f64, d: f64, g: Geometry) -> Result<TwoPointSolution> {
    let kind = g.kind();
    check_two_point(ma, mb, d, kind)?;
    if kind == GeometryKind::Spherical
        && std::f64::consts::PI - d < ANTIPODAL_TOL
        && (ma - mb).abs() < ANTIPODAL_TOL
    {
        return Err(Error::NoMassCenter("equal masses at antipodal points"));
    }
    let d1 = match kind {
        GeometryKind::Euclidean => mb * d / (ma + mb),
        _ => lever_bisect(ma, mb, d, kind),
    };
    let d2 = (d - d1).max(0.0);
    Ok(TwoPointSolution {
        geometry: kind,
        ma,
        mb,
        d,
        d1,
        d2,
        m_cen: centered_mass_two(ma, mb, d, g)?,
        m_cen_projected: ma * kind.cosx(d1) + mb * kind.cosx(d2),
        m_tot: ma + mb,
    })
}

/// Bisection for the zero of `m_a sin_X x - m_b sin_X(d - x)` on `[0, d]`.
///
/// The residual equals `A sin_X x - B cos_X x` with `A = m_a + m_b cos_X d`
/// and `B = m_b sin_X d >= 0`; it is negative below the root and positive
/// above it on `[0, d]` (for the sphere this needs `d <= pi`).
fn lever_bisect(ma: f64, mb: f64, d: f64, kind: GeometryKind) -> f64 {
    let a = ma + mb * kind.cosx(d);
    let b = mb * kind.sinx(d);
    let residual = |x: f64| a * kind.sinx(x) - b * kind.cosx(x);
    let (mut lo, mut hi) = (0.0f64, d);
    if residual(lo) >= 0.0 {
        return lo;
    }
    if residual(hi) <= 0.0 {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if residual(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Midpoint `[p + q]` of two points of the space.
pub fn midpoint(p: &[f64], q: &[f64], g: Geometry) -> Result<AmbientVector> {
    let p = g.project(p)?;
    let q = g.project(q)?;
    if g.kind() == GeometryKind::Spherical
        && std::f64::consts::PI - g.distance_unchecked(&p, &q)? < ANTIPODAL_TOL
    {
        return Err(Error::NoMassCenter("antipodal points have no midpoint"));
    }
    MaterialVector::from_raw(g, &p + &q).point()
}
