//! Ambient-vector model of the three model spaces.
//!
//! Every space of intrinsic dimension `n` lives in `R^{n+1}`:
//!
//! * `E^n` is the affine hyperplane `x_{n+1} = 1`,
//! * `S^n` is the unit sphere `<x, x> = 1`,
//! * `H^n` is the upper sheet of `<x, x> = -1` (hyperboloid model),
//!
//! where `<a, b> = b^T J a` and `J = diag(1, .., 1, delta)` with `delta = -1`
//! only for the hyperbolic space. A material point (point `p` with mass `m`)
//! is represented by the ambient vector `m p`.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Constraint tolerance for accepting a point as lying on the space.
pub const ON_SPACE_TOL: f64 = 1e-9;

/// Entrywise tolerance for `M^T J M = J` (scaled by the largest entry squared).
pub const ISOMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeometryKind {
    Euclidean,
    Spherical,
    Hyperbolic,
}

impl GeometryKind {
    pub const ALL: [GeometryKind; 3] = [
        GeometryKind::Euclidean,
        GeometryKind::Spherical,
        GeometryKind::Hyperbolic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GeometryKind::Euclidean => "euclidean",
            GeometryKind::Spherical => "spherical",
            GeometryKind::Hyperbolic => "hyperbolic",
        }
    }

    /// `sin_X`: `x`, `sin x` or `sinh x`.
    #[inline]
    pub fn sinx(self, x: f64) -> f64 {
        match self {
            GeometryKind::Euclidean => x,
            GeometryKind::Spherical => x.sin(),
            GeometryKind::Hyperbolic => x.sinh(),
        }
    }

    /// `cos_X`: `1`, `cos x` or `cosh x`.
    #[inline]
    pub fn cosx(self, x: f64) -> f64 {
        match self {
            GeometryKind::Euclidean => 1.0,
            GeometryKind::Spherical => x.cos(),
            GeometryKind::Hyperbolic => x.cosh(),
        }
    }

    /// `tan_X = sin_X / cos_X`.
    #[inline]
    pub fn tanx(self, x: f64) -> f64 {
        match self {
            GeometryKind::Euclidean => x,
            GeometryKind::Spherical => x.tan(),
            GeometryKind::Hyperbolic => x.tanh(),
        }
    }

    /// Inverse of [`GeometryKind::tanx`] on its principal branch.
    #[inline]
    pub fn atanx(self, y: f64) -> f64 {
        match self {
            GeometryKind::Euclidean => y,
            GeometryKind::Spherical => y.atan(),
            GeometryKind::Hyperbolic => y.atanh(),
        }
    }

    /// Inverse of [`GeometryKind::sinx`] on its principal branch.
    #[inline]
    pub fn asinx(self, y: f64) -> f64 {
        match self {
            GeometryKind::Euclidean => y,
            GeometryKind::Spherical => y.asin(),
            GeometryKind::Hyperbolic => y.asinh(),
        }
    }

    /// Signature `delta_X` of the last ambient coordinate.
    #[inline]
    pub fn signature(self) -> f64 {
        match self {
            GeometryKind::Hyperbolic => -1.0,
            _ => 1.0,
        }
    }
}

impl fmt::Display for GeometryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for GeometryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "euclidean" | "e" => Ok(GeometryKind::Euclidean),
            "spherical" | "s" => Ok(GeometryKind::Spherical),
            "hyperbolic" | "h" => Ok(GeometryKind::Hyperbolic),
            other => Err(invalid(format!("unknown geometry kind '{other}'"))),
        }
    }
}

/// One of `E^n`, `S^n`, `H^n` with its intrinsic dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GeometryRepr", into = "GeometryRepr")]
pub struct Geometry {
    kind: GeometryKind,
    n: usize,
}

#[derive(Serialize, Deserialize)]
struct GeometryRepr {
    kind: GeometryKind,
    n: usize,
}

impl TryFrom<GeometryRepr> for Geometry {
    type Error = Error;

    fn try_from(r: GeometryRepr) -> Result<Self> {
        Geometry::new(r.kind, r.n)
    }
}

impl From<Geometry> for GeometryRepr {
    fn from(g: Geometry) -> Self {
        GeometryRepr {
            kind: g.kind,
            n: g.n,
        }
    }
}

impl Geometry {
    pub fn new(kind: GeometryKind, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("intrinsic dimension must be at least 1"));
        }
        Ok(Geometry { kind, n })
    }

    /// Panics if `n == 0`.
    pub fn euclidean(n: usize) -> Self {
        Self::new(GeometryKind::Euclidean, n).expect("dimension must be positive")
    }

    /// Panics if `n == 0`.
    pub fn spherical(n: usize) -> Self {
        Self::new(GeometryKind::Spherical, n).expect("dimension must be positive")
    }

    /// Panics if `n == 0`.
    pub fn hyperbolic(n: usize) -> Self {
        Self::new(GeometryKind::Hyperbolic, n).expect("dimension must be positive")
    }

    #[inline]
    pub fn kind(&self) -> GeometryKind {
        self.kind
    }

    /// Intrinsic dimension `n`.
    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Ambient dimension `n + 1`.
    #[inline]
    pub fn ambient_dim(&self) -> usize {
        self.n + 1
    }

    #[inline]
    pub fn signature(&self) -> f64 {
        self.kind.signature()
    }

    #[inline]
    pub fn sinx(&self, x: f64) -> f64 {
        self.kind.sinx(x)
    }

    #[inline]
    pub fn cosx(&self, x: f64) -> f64 {
        self.kind.cosx(x)
    }

    /// The diagonal of `J_{n+1}`.
    pub fn form_diagonal(&self) -> Vec<f64> {
        let mut d = vec![1.0; self.ambient_dim()];
        d[self.n] = self.signature();
        d
    }

    /// `J_{n+1}` as a dense matrix.
    pub fn form_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.form_diagonal()))
    }

    /// The base point `(0, .., 0, 1)`, common to all three spaces.
    pub fn origin(&self) -> AmbientVector {
        let mut v = vec![0.0; self.ambient_dim()];
        v[self.n] = 1.0;
        AmbientVector(v)
    }

    fn check_len(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                found: v.len(),
            });
        }
        Ok(())
    }

    /// `<a, b> = sum_{i<=n} a_i b_i + delta a_{n+1} b_{n+1}`.
    pub fn form(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        self.check_len(a)?;
        self.check_len(b)?;
        Ok(self.form_unchecked(a, b))
    }

    #[inline]
    pub(crate) fn form_unchecked(&self, a: &[f64], b: &[f64]) -> f64 {
        let n = self.n;
        let spatial: f64 = a[..n].iter().zip(&b[..n]).map(|(x, y)| x * y).sum();
        spatial + self.signature() * a[n] * b[n]
    }

    /// Residual of the on-space constraint for `p`.
    pub fn constraint_residual(&self, p: &[f64]) -> Result<f64> {
        self.check_len(p)?;
        Ok(match self.kind {
            GeometryKind::Euclidean => (p[self.n] - 1.0).abs(),
            _ => (self.form_unchecked(p, p) - self.signature()).abs(),
        })
    }

    /// Validates `p` against the on-space constraint and re-projects it onto
    /// the space.
    pub fn project(&self, p: &[f64]) -> Result<AmbientVector> {
        self.check_len(p)?;
        if p.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let residual = self.constraint_residual(p)?;
        if residual >= ON_SPACE_TOL {
            return Err(Error::OffSpace { residual });
        }
        let mut out = p.to_vec();
        match self.kind {
            GeometryKind::Euclidean => out[self.n] = 1.0,
            GeometryKind::Spherical => {
                let s = self.form_unchecked(p, p).sqrt();
                out.iter_mut().for_each(|x| *x /= s);
            }
            GeometryKind::Hyperbolic => {
                if p[self.n] <= 0.0 {
                    return Err(Error::OffSpace { residual: f64::INFINITY });
                }
                let s = (-self.form_unchecked(p, p)).sqrt();
                out.iter_mut().for_each(|x| *x /= s);
            }
        }
        Ok(AmbientVector(out))
    }

    /// Geodesic distance between two points of the space.
    pub fn distance(&self, p: &[f64], q: &[f64]) -> Result<f64> {
        let p = self.project(p)?;
        let q = self.project(q)?;
        self.distance_unchecked(&p, &q)
    }

    /// Distance between points already known to lie on the space.
    pub(crate) fn distance_unchecked(&self, p: &[f64], q: &[f64]) -> Result<f64> {
        let n = self.n;
        match self.kind {
            GeometryKind::Euclidean => Ok(p[..n]
                .iter()
                .zip(&q[..n])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()),
            GeometryKind::Spherical => {
                // Equivalent to arccos of the clamped form, but stable near 0 and pi.
                let diff = p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
                let sum = p.iter().zip(q).map(|(a, b)| (a + b) * (a + b)).sum::<f64>();
                Ok(2.0 * diff.sqrt().atan2(sum.sqrt()))
            }
            GeometryKind::Hyperbolic => {
                let c = -self.form_unchecked(p, q);
                if c < 1.0 - ON_SPACE_TOL {
                    return Err(Error::OffSpace { residual: 1.0 - c });
                }
                if c > 2.0 {
                    Ok(c.acosh())
                } else {
                    // <p - q, p - q> = 4 sinh^2(d / 2)
                    let d: Vec<f64> = p.iter().zip(q).map(|(a, b)| a - b).collect();
                    let s = self.form_unchecked(&d, &d).max(0.0);
                    Ok(2.0 * (0.5 * s.sqrt()).asinh())
                }
            }
        }
    }
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sym = match self.kind {
            GeometryKind::Euclidean => "E",
            GeometryKind::Spherical => "S",
            GeometryKind::Hyperbolic => "H",
        };
        write!(f, "{sym}^{}", self.n)
    }
}

/// `<a, b>` for ambient vectors of `g`.
pub fn bilinear_form(a: &AmbientVector, b: &AmbientVector, g: Geometry) -> Result<f64> {
    g.form(a, b)
}

/// Geodesic distance between two points of `g`.
pub fn distance(p: &AmbientVector, q: &AmbientVector, g: Geometry) -> Result<f64> {
    g.distance(p, q)
}

pub fn sinx(x: f64, g: Geometry) -> f64 {
    g.sinx(x)
}

pub fn cosx(x: f64, g: Geometry) -> f64 {
    g.cosx(x)
}

/// Splits a nonzero material vector into its mass and its point.
pub fn decompose(a: &MaterialVector) -> Result<(f64, AmbientVector)> {
    a.decompose()
}

/// A vector of the ambient space `R^{n+1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AmbientVector(Vec<f64>);

impl AmbientVector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(AmbientVector(coords))
    }

    pub fn zeros(len: usize) -> Self {
        AmbientVector(vec![0.0; len])
    }

    /// The `i`-th standard basis vector of `R^len`.
    pub fn basis(len: usize, i: usize) -> Self {
        let mut v = vec![0.0; len];
        v[i] = 1.0;
        AmbientVector(v)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0.0)
    }

    /// Standard Euclidean norm in `R^{n+1}` (not the form).
    pub fn euclidean_norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        AmbientVector(self.0.iter().map(|x| x * s).collect())
    }

    /// Largest absolute coordinate difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Deref for AmbientVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for AmbientVector {
    fn from(v: Vec<f64>) -> Self {
        AmbientVector(v)
    }
}

impl Index<usize> for AmbientVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for &AmbientVector {
    type Output = AmbientVector;

    fn add(self, rhs: &AmbientVector) -> AmbientVector {
        assert_eq!(self.len(), rhs.len(), "ambient dimension mismatch");
        AmbientVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &AmbientVector {
    type Output = AmbientVector;

    fn sub(self, rhs: &AmbientVector) -> AmbientVector {
        assert_eq!(self.len(), rhs.len(), "ambient dimension mismatch");
        AmbientVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &AmbientVector {
    type Output = AmbientVector;

    fn neg(self) -> AmbientVector {
        AmbientVector(self.0.iter().map(|x| -x).collect())
    }
}

impl Mul<f64> for &AmbientVector {
    type Output = AmbientVector;

    fn mul(self, s: f64) -> AmbientVector {
        self.scale(s)
    }
}

/// A material vector `m p`: a point `p` of the space carrying mass `m >= 0`.
///
/// The zero vector is the (unique) material vector of zero mass.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialVector {
    geometry: Geometry,
    coords: AmbientVector,
}

impl MaterialVector {
    /// Wraps raw ambient coordinates, checking that they lie in the cone over
    /// the space (or are zero).
    pub fn new(geometry: Geometry, coords: impl Into<AmbientVector>) -> Result<Self> {
        let coords = coords.into();
        geometry.check_len(&coords)?;
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let v = MaterialVector { geometry, coords };
        if !v.is_zero() {
            v.check_cone()?;
        }
        Ok(v)
    }

    /// `mass * point`, with `point` validated (and re-projected) on the space.
    pub fn from_point(geometry: Geometry, mass: f64, point: &[f64]) -> Result<Self> {
        if !mass.is_finite() || mass < 0.0 {
            return Err(invalid(format!("mass must be finite and non-negative, got {mass}")));
        }
        let p = geometry.project(point)?;
        Ok(MaterialVector {
            geometry,
            coords: p.scale(mass),
        })
    }

    pub fn zero(geometry: Geometry) -> Self {
        MaterialVector {
            geometry,
            coords: AmbientVector::zeros(geometry.ambient_dim()),
        }
    }

    /// Skips validation; callers guarantee the cone invariant.
    pub(crate) fn from_raw(geometry: Geometry, coords: AmbientVector) -> Self {
        debug_assert_eq!(coords.len(), geometry.ambient_dim());
        MaterialVector { geometry, coords }
    }

    fn check_cone(&self) -> Result<()> {
        let n = self.geometry.dim();
        let a = self.coords.as_slice();
        match self.geometry.kind() {
            GeometryKind::Euclidean => {
                if a[n] <= 0.0 {
                    return Err(Error::OffCone { residual: -a[n] });
                }
            }
            GeometryKind::Spherical => {}
            GeometryKind::Hyperbolic => {
                let q = self.geometry.form_unchecked(a, a);
                if q >= 0.0 || a[n] <= 0.0 {
                    return Err(Error::OffCone { residual: q.max(-a[n]) });
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    #[inline]
    pub fn coords(&self) -> &AmbientVector {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_zero()
    }

    /// The mass `m_a`; zero exactly for the zero vector.
    pub fn mass(&self) -> f64 {
        let n = self.geometry.dim();
        let a = self.coords.as_slice();
        match self.geometry.kind() {
            GeometryKind::Euclidean => a[n].max(0.0),
            GeometryKind::Spherical => self.coords.euclidean_norm(),
            GeometryKind::Hyperbolic => {
                // t^2 - |x|^2 factored to avoid cancellation near the light cone.
                let x = a[..n].iter().map(|v| v * v).sum::<f64>().sqrt();
                let t = a[n];
                ((t - x) * (t + x)).max(0.0).sqrt()
            }
        }
    }

    /// `(m_a, [a])` with `a = m_a [a]`.
    pub fn decompose(&self) -> Result<(f64, AmbientVector)> {
        if self.is_zero() {
            return Err(Error::ZeroMass);
        }
        self.check_cone()?;
        let m = self.mass();
        if m <= 0.0 {
            return Err(Error::OffCone { residual: 0.0 });
        }
        let mut p = self.coords.scale(1.0 / m);
        if self.geometry.kind() == GeometryKind::Euclidean {
            p.0[self.geometry.dim()] = 1.0;
        }
        Ok((m, p))
    }

    /// The bracket `[a]`.
    pub fn point(&self) -> Result<AmbientVector> {
        self.decompose().map(|(_, p)| p)
    }

    /// `r a` for `r >= 0`.
    pub fn scale(&self, r: f64) -> MaterialVector {
        assert!(r >= 0.0, "material vectors scale by non-negative factors only");
        MaterialVector {
            geometry: self.geometry,
            coords: self.coords.scale(r),
        }
    }

    /// Plain ambient sum, which is the mass-center operation.
    pub fn add(&self, other: &MaterialVector) -> Result<MaterialVector> {
        if self.geometry != other.geometry {
            return Err(Error::DimensionMismatch {
                expected: self.geometry.ambient_dim(),
                found: other.geometry.ambient_dim(),
            });
        }
        Ok(MaterialVector {
            geometry: self.geometry,
            coords: &self.coords + &other.coords,
        })
    }
}

/// A linear isometry of the space, acting on the whole ambient space.
#[derive(Debug, Clone, PartialEq)]
pub struct Isometry {
    geometry: Geometry,
    matrix: DMatrix<f64>,
}

impl Isometry {
    pub fn new(geometry: Geometry, matrix: DMatrix<f64>) -> Result<Self> {
        let dim = geometry.ambient_dim();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let iso = Isometry { geometry, matrix };
        let residual = iso.defect();
        let scale = iso.matrix.amax().max(1.0).powi(2);
        if residual > ISOMETRY_TOL * scale {
            return Err(invalid(format!("matrix is not an isometry (defect {residual:e})")));
        }
        let n = geometry.dim();
        if geometry.kind() == GeometryKind::Hyperbolic && iso.matrix[(n, n)] <= 0.0 {
            return Err(invalid("hyperbolic isometry must preserve the upper sheet"));
        }
        Ok(iso)
    }

    pub fn identity(geometry: Geometry) -> Self {
        let d = geometry.ambient_dim();
        Isometry {
            geometry,
            matrix: DMatrix::identity(d, d),
        }
    }

    /// The antipodal map `-I` of the sphere.
    pub fn antipodal(geometry: Geometry) -> Result<Self> {
        if geometry.kind() != GeometryKind::Spherical {
            return Err(invalid("the antipodal map exists only on the sphere"));
        }
        let d = geometry.ambient_dim();
        Ok(Isometry {
            geometry,
            matrix: -DMatrix::identity(d, d),
        })
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Largest entry of `M^T J M - J` (S, H) or of the block-form defect (E).
    pub fn defect(&self) -> f64 {
        let n = self.geometry.dim();
        let m = &self.matrix;
        match self.geometry.kind() {
            GeometryKind::Euclidean => {
                let a = m.view((0, 0), (n, n));
                let ortho = (a.transpose() * a - DMatrix::identity(n, n)).amax();
                let bottom = (0..n).map(|j| m[(n, j)].abs()).fold(0.0, f64::max);
                ortho.max(bottom).max((m[(n, n)] - 1.0).abs())
            }
            _ => {
                let j = self.geometry.form_matrix();
                (m.transpose() * &j * m - j).amax()
            }
        }
    }

    pub fn apply_vector(&self, v: &[f64]) -> Result<AmbientVector> {
        self.geometry.check_len(v)?;
        let d = self.geometry.ambient_dim();
        let out = (0..d)
            .map(|i| (0..d).map(|j| self.matrix[(i, j)] * v[j]).sum())
            .collect();
        Ok(AmbientVector(out))
    }

    pub fn apply(&self, a: &MaterialVector) -> Result<MaterialVector> {
        if a.geometry() != self.geometry {
            return Err(Error::DimensionMismatch {
                expected: self.geometry.ambient_dim(),
                found: a.geometry().ambient_dim(),
            });
        }
        Ok(MaterialVector::from_raw(
            self.geometry,
            self.apply_vector(a.coords())?,
        ))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Isometry) -> Result<Isometry> {
        if self.geometry != other.geometry {
            return Err(invalid("cannot compose isometries of different spaces"));
        }
        Ok(Isometry {
            geometry: self.geometry,
            matrix: &self.matrix * &other.matrix,
        })
    }
}

/// `g(a) = m_a g([a])`, which for linear isometries is just `M a`.
pub fn apply_isometry(iso: &Isometry, a: &MaterialVector) -> Result<MaterialVector> {
    iso.apply(a)
}

/// A seeded pseudo-random isometry of `g`.
///
/// Columns come from Gram–Schmidt, with respect to the form, of a Gaussian
/// matrix; both orientations occur.
pub fn random_isometry(g: Geometry, seed: u64) -> Isometry {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gauss = move || -> f64 { StandardNormal.sample(&mut rng) };
    let n = g.dim();
    let d = g.ambient_dim();
    let matrix = match g.kind() {
        GeometryKind::Euclidean => {
            let block = orthonormal_columns(n, &mut gauss);
            let mut m = DMatrix::zeros(d, d);
            m.view_mut((0, 0), (n, n)).copy_from(&block);
            for i in 0..n {
                m[(i, n)] = gauss();
            }
            m[(n, n)] = 1.0;
            m
        }
        GeometryKind::Spherical => orthonormal_columns(d, &mut gauss),
        GeometryKind::Hyperbolic => {
            let diag = g.form_diagonal();
            let form = |a: &[f64], b: &[f64]| -> f64 {
                a.iter().zip(b).zip(&diag).map(|((x, y), s)| x * y * s).sum()
            };
            // Timelike column on the upper sheet.
            let mut time: Vec<f64> = (0..n).map(|_| gauss()).collect();
            let r2: f64 = time.iter().map(|x| x * x).sum();
            time.push((1.0 + r2).sqrt());
            let mut cols: Vec<Vec<f64>> = Vec::with_capacity(d);
            for _ in 0..n {
                let mut w: Vec<f64> = (0..d).map(|_| gauss()).collect();
                // Two passes of modified Gram–Schmidt for accuracy.
                for _ in 0..2 {
                    let c = form(&w, &time) / form(&time, &time);
                    w.iter_mut().zip(&time).for_each(|(x, t)| *x -= c * t);
                    for e in &cols {
                        let c = form(&w, e);
                        w.iter_mut().zip(e).for_each(|(x, t)| *x -= c * t);
                    }
                }
                let norm = form(&w, &w).sqrt();
                w.iter_mut().for_each(|x| *x /= norm);
                cols.push(w);
            }
            cols.push(time);
            DMatrix::from_fn(d, d, |i, j| cols[j][i])
        }
    };
    Isometry { geometry: g, matrix }
}

fn orthonormal_columns(d: usize, gauss: &mut impl FnMut() -> f64) -> DMatrix<f64> {
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut w: Vec<f64> = (0..d).map(|_| gauss()).collect();
        for _ in 0..2 {
            for e in &cols {
                let c: f64 = w.iter().zip(e).map(|(a, b)| a * b).sum();
                w.iter_mut().zip(e).for_each(|(x, t)| *x -= c * t);
            }
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        w.iter_mut().for_each(|x| *x /= norm);
        cols.push(w);
    }
    DMatrix::from_fn(d, d, |i, j| cols[j][i])
}

/// A pseudo-random point of `g`, at intrinsic distance at most `radius` from
/// the origin (for the sphere, `radius` is capped at `pi`).
pub fn random_point(g: Geometry, radius: f64, rng: &mut impl rand::Rng) -> AmbientVector {
    let n = g.dim();
    let mut dir: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
    let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
    dir.iter_mut().for_each(|x| *x /= norm);
    let r = rng.random::<f64>() * radius;
    point_at(g, &dir, r)
}

/// The point at distance `r` from the origin in unit direction `dir`
/// (`dir` has `n` components).
pub fn point_at(g: Geometry, dir: &[f64], r: f64) -> AmbientVector {
    let k = g.kind();
    let mut v: Vec<f64> = dir.iter().map(|x| x * k.sinx(r)).collect();
    v.push(k.cosx(r));
    AmbientVector(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    fn all_geometries(n: usize) -> [Geometry; 3] {
        [
            Geometry::euclidean(n),
            Geometry::spherical(n),
            Geometry::hyperbolic(n),
        ]
    }

    #[test]
    fn form_examples() {
        let e1 = AmbientVector::basis(3, 0);
        for g in all_geometries(2) {
            assert_eq!(bilinear_form(&e1, &e1, g).unwrap(), 1.0);
        }
        let e3 = AmbientVector::basis(3, 2);
        assert_eq!(bilinear_form(&e3, &e3, Geometry::hyperbolic(2)).unwrap(), -1.0);

        let t: f64 = 0.7;
        let p = AmbientVector::from(vec![t.sinh(), 0.0, t.cosh()]);
        let v = bilinear_form(&e3, &p, Geometry::hyperbolic(2)).unwrap();
        // -cosh(0.7) to 17 digits
        assert_relative_eq!(v, -1.255_169_005_630_943, max_relative = 1e-15);
    }

    #[test]
    fn form_rejects_wrong_length() {
        let g = Geometry::spherical(2);
        let err = g.form(&[1.0, 0.0], &[1.0, 0.0, 0.0]).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 3, found: 2 });
    }

    #[test]
    fn j_squared_is_identity() {
        for g in all_geometries(3) {
            let j = g.form_matrix();
            assert_eq!(&j * &j, DMatrix::identity(4, 4));
        }
    }

    #[test]
    fn decompose_examples() {
        let g = Geometry::spherical(2);
        let a = MaterialVector::new(g, vec![0.0, 0.0, 2.0]).unwrap();
        let (m, p) = a.decompose().unwrap();
        assert_eq!(m, 2.0);
        assert_eq!(p.as_slice(), &[0.0, 0.0, 1.0]);

        let g = Geometry::euclidean(2);
        let a = MaterialVector::new(g, vec![3.0, 4.0, 2.0]).unwrap();
        let (m, p) = a.decompose().unwrap();
        assert_eq!(m, 2.0);
        assert_eq!(p.as_slice(), &[1.5, 2.0, 1.0]);

        let g = Geometry::hyperbolic(2);
        let one: f64 = 1.0;
        let a = MaterialVector::new(g, vec![2.0 * one.sinh(), 0.0, 2.0 * one.cosh()]).unwrap();
        let (m, p) = a.decompose().unwrap();
        assert_relative_eq!(m, 2.0, max_relative = 1e-15);
        assert_relative_eq!(p[0], one.sinh(), max_relative = 1e-15);
        assert_relative_eq!(p[2], one.cosh(), max_relative = 1e-15);
    }

    #[test]
    fn decompose_errors() {
        let g = Geometry::spherical(2);
        assert_eq!(MaterialVector::zero(g).decompose().unwrap_err(), Error::ZeroMass);
        // spacelike vector is not in the cone over H^2
        let h = Geometry::hyperbolic(2);
        assert!(matches!(
            MaterialVector::new(h, vec![2.0, 0.0, 1.0]),
            Err(Error::OffCone { .. })
        ));
        // lower sheet
        assert!(MaterialVector::new(h, vec![0.0, 0.0, -1.0]).is_err());
        // Euclidean needs positive last coordinate
        assert!(MaterialVector::new(Geometry::euclidean(1), vec![1.0, -1.0]).is_err());
    }

    #[test]
    fn distance_examples() {
        let s = Geometry::spherical(2);
        let d = s.distance(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]).unwrap();
        assert_relative_eq!(d, std::f64::consts::FRAC_PI_2, max_relative = 1e-15);
        assert_eq!(s.distance(&[0.0, 0.0, 1.0], &[0.0, 0.0, -1.0]).unwrap(), std::f64::consts::PI);

        let h = Geometry::hyperbolic(2);
        let t: f64 = 1.3;
        let d = h.distance(&[0.0, 0.0, 1.0], &[t.sinh(), 0.0, t.cosh()]).unwrap();
        assert_relative_eq!(d, 1.3, max_relative = 1e-14);

        for g in all_geometries(2) {
            let p = g.origin();
            assert_eq!(g.distance(&p, &p).unwrap(), 0.0);
        }
        let e = Geometry::euclidean(2);
        assert_eq!(e.distance(&[0.0, 0.0, 1.0], &[3.0, 4.0, 1.0]).unwrap(), 5.0);
    }

    #[test]
    fn distance_rejects_off_space_points() {
        let s = Geometry::spherical(2);
        assert!(matches!(
            s.distance(&[1.0, 1.0, 0.0], &[0.0, 0.0, 1.0]),
            Err(Error::OffSpace { .. })
        ));
        let h = Geometry::hyperbolic(1);
        assert!(h.distance(&[0.0, -1.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn slightly_off_points_are_reprojected() {
        let s = Geometry::spherical(2);
        let p = s.project(&[0.0, 0.0, 1.0 + 1e-10]).unwrap();
        assert_eq!(p.as_slice(), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn sinx_cosx() {
        let e = Geometry::euclidean(1);
        let s = Geometry::spherical(1);
        let h = Geometry::hyperbolic(1);
        assert_eq!(sinx(0.5, e), 0.5);
        assert_eq!(cosx(123.0, e), 1.0);
        assert_eq!(sinx(0.5, s), 0.5f64.sin());
        assert_eq!(sinx(0.5, h), 0.5f64.sinh());
        assert_eq!(cosx(0.5, h), 0.5f64.cosh());
    }

    #[test]
    fn cosx_of_distance_matches_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for g in [Geometry::spherical(3), Geometry::hyperbolic(3)] {
            for _ in 0..100 {
                let p = random_point(g, 2.0, &mut rng);
                let q = random_point(g, 2.0, &mut rng);
                let (ma, mb) = (rng.random::<f64>() + 0.1, rng.random::<f64>() + 0.1);
                let a = p.scale(ma);
                let b = q.scale(mb);
                let d = g.distance(&p, &q).unwrap();
                let lhs = ma * mb * g.cosx(d);
                let rhs = g.signature() * g.form(&a, &b).unwrap();
                assert_relative_eq!(lhs, rhs, epsilon = 1e-12, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn random_isometry_invariants() {
        for n in 1..=4 {
            for g in all_geometries(n) {
                for seed in 0..20 {
                    let m = random_isometry(g, seed);
                    assert!(m.defect() < 1e-12, "{g} seed {seed}: {}", m.defect());
                    // re-validation through the public constructor
                    Isometry::new(g, m.matrix().clone()).unwrap();
                    if g.kind() == GeometryKind::Euclidean {
                        for j in 0..n {
                            assert_eq!(m.matrix()[(n, j)], 0.0);
                        }
                        assert_eq!(m.matrix()[(n, n)], 1.0);
                    }
                    if g.kind() == GeometryKind::Spherical {
                        let mtm = m.matrix().transpose() * m.matrix();
                        assert!((mtm - DMatrix::identity(n + 1, n + 1)).amax() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn random_isometry_is_deterministic() {
        let g = Geometry::hyperbolic(3);
        assert_eq!(random_isometry(g, 9), random_isometry(g, 9));
        assert_ne!(random_isometry(g, 9), random_isometry(g, 10));
    }

    #[test]
    fn hyperbolic_isometry_keeps_points_on_sheet() {
        let g = Geometry::hyperbolic(2);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for seed in 0..50 {
            let m = random_isometry(g, seed);
            let p = random_point(g, 3.0, &mut rng);
            let q = m.apply_vector(&p).unwrap();
            assert!((g.form(&q, &q).unwrap() + 1.0).abs() < 1e-10);
            assert!(q[2] > 0.0);
        }
    }

    #[test]
    fn apply_isometry_examples() {
        let g = Geometry::spherical(2);
        let a = MaterialVector::new(g, vec![0.0, 0.0, 3.0]).unwrap();
        assert_eq!(apply_isometry(&Isometry::identity(g), &a).unwrap(), a);
        let flipped = apply_isometry(&Isometry::antipodal(g).unwrap(), &a).unwrap();
        assert_eq!(flipped.coords().as_slice(), &[0.0, 0.0, -3.0]);

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for g in all_geometries(3) {
            for seed in 0..50 {
                let m = random_isometry(g, seed);
                let p = random_point(g, 1.5, &mut rng);
                let a = MaterialVector::from_point(g, 2.5, &p).unwrap();
                let b = apply_isometry(&m, &a).unwrap();
                assert_relative_eq!(b.mass(), a.mass(), max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn invalid_isometries_are_rejected() {
        let g = Geometry::hyperbolic(1);
        // a boost composed with the time reversal leaves the upper sheet
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(Isometry::new(g, m).is_err());
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]);
        assert!(Isometry::new(g, m).is_err());
        assert!(Isometry::antipodal(Geometry::euclidean(2)).is_err());
    }

    #[test]
    fn geometry_json_shape() {
        let g = Geometry::hyperbolic(3);
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"kind":"hyperbolic","n":3}"#);
        let back: Geometry = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
        assert!(serde_json::from_str::<Geometry>(r#"{"kind":"spherical","n":0}"#).is_err());
    }
}
