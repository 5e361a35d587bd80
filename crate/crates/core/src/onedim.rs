//! One-dimensional systems: the `F_k` family of alternative mass-center
//! rules on the line and on `H^1`, and the split-and-merge process on `S^1`.

use serde::{Deserialize, Serialize};

use crate::ambient::{AmbientVector, Geometry, GeometryKind, MaterialVector};
use crate::error::{invalid, Error, Result};
use crate::masscenter::ANTIPODAL_TOL;

/// Largest supported family parameter; beyond it `cosh` overflows for
/// moderate positions.
pub const K_MAX: f64 = 50.0;

/// The mass-center rule `F_k` on `E^1` or `H^1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FkSystem {
    k: f64,
    geometry: Geometry,
}

/// Mass and intrinsic position returned by an `F_k` system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FkCenter {
    pub mass: f64,
    pub position: f64,
}

impl FkSystem {
    pub fn new(k: f64, geometry: Geometry) -> Result<Self> {
        if !(k.is_finite() && (0.0..=K_MAX).contains(&k)) {
            return Err(invalid(format!("k must lie in [0, {K_MAX}], got {k}")));
        }
        if geometry.dim() != 1 || geometry.kind() == GeometryKind::Spherical {
            return Err(invalid("F_k systems live on E^1 or H^1"));
        }
        Ok(FkSystem { k, geometry })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    /// Ambient material vector of a center: `M (X, 1)` or `M (sinh X, cosh X)`.
    pub fn embed(&self, c: FkCenter) -> MaterialVector {
        let coords = match self.geometry.kind() {
            GeometryKind::Hyperbolic => vec![c.mass * c.position.sinh(), c.mass * c.position.cosh()],
            _ => vec![c.mass * c.position, c.mass],
        };
        MaterialVector::from_raw(self.geometry, AmbientVector::from(coords))
    }

    /// Intrinsic position and mass of a nonzero material vector of the line.
    pub fn unembed(&self, v: &MaterialVector) -> Result<FkCenter> {
        let (mass, p) = v.decompose()?;
        let position = match self.geometry.kind() {
            GeometryKind::Hyperbolic => p[0].asinh(),
            _ => p[0],
        };
        Ok(FkCenter { mass, position })
    }
}

fn check_input(masses: &[f64], positions: &[f64]) -> Result<()> {
    if masses.is_empty() {
        return Err(Error::EmptyInput);
    }
    if masses.len() != positions.len() {
        return Err(Error::DimensionMismatch {
            expected: masses.len(),
            found: positions.len(),
        });
    }
    if masses.iter().any(|m| !(m.is_finite() && *m > 0.0)) {
        return Err(invalid("masses must be positive and finite"));
    }
    if positions.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

/// Center of `(m_i, x_i)` under `F_k`:
///
/// `M^2 = sum m_i^2 + 2 sum_{i<j} m_i m_j cosh k(x_i - x_j)` and
/// `X = asinh(sum m_i sinh(k x_i) / M) / k`, with the weighted mean at `k = 0`.
pub fn fk_center(sys: &FkSystem, masses: &[f64], positions: &[f64]) -> Result<FkCenter> {
    check_input(masses, positions)?;
    let k = sys.k;
    if k == 0.0 {
        let mass: f64 = masses.iter().sum();
        let moment: f64 = masses.iter().zip(positions).map(|(m, x)| m * x).sum();
        return Ok(FkCenter {
            mass,
            position: moment / mass,
        });
    }
    let mut m2: f64 = masses.iter().map(|m| m * m).sum();
    for i in 0..masses.len() {
        for j in i + 1..masses.len() {
            m2 += 2.0 * masses[i] * masses[j] * (k * (positions[i] - positions[j])).cosh();
        }
    }
    let mass = m2.sqrt();
    let s: f64 = masses.iter().zip(positions).map(|(m, x)| m * (k * x).sinh()).sum();
    let position = (s / mass).asinh() / k;
    if !(mass.is_finite() && position.is_finite()) {
        return Err(invalid("F_k evaluation overflowed; reduce k or the positions"));
    }
    Ok(FkCenter { mass, position })
}

/// Residual of `F_k(g(input)) = g(F_k(input))` for `g(x) = ±x + shift`.
///
/// The mass part is relative, the position part absolute.
pub fn fk_invariance_check(
    sys: &FkSystem,
    masses: &[f64],
    positions: &[f64],
    shift: f64,
    reflect: bool,
) -> Result<f64> {
    let g = |x: f64| if reflect { -x + shift } else { x + shift };
    let before = fk_center(sys, masses, positions)?;
    let moved: Vec<f64> = positions.iter().map(|&x| g(x)).collect();
    let after = fk_center(sys, masses, &moved)?;
    let mass_res = (after.mass - before.mass).abs() / before.mass;
    let pos_res = (after.position - g(before.position)).abs();
    Ok(mass_res.max(pos_res))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitMergeStep {
    pub a: MaterialVector,
    pub b: MaterialVector,
    /// `d([a], [b])`.
    pub distance: f64,
}

/// Record of the split-and-merge process on `S^1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitMergeTrace {
    pub steps: Vec<SplitMergeStep>,
    /// Set when the two masses became equal and the pair was merged.
    pub terminated_early: bool,
    /// The point the nested segments close in on.
    pub limit_point: AmbientVector,
    /// `a + b` of the initial pair.
    pub initial_sum: AmbientVector,
}

impl SplitMergeTrace {
    /// Largest `|d_{i+1} - d_i / 2|` over the trace.
    pub fn halving_residual(&self) -> f64 {
        self.steps
            .windows(2)
            .map(|w| (w[1].distance - 0.5 * w[0].distance).abs())
            .fold(0.0, f64::max)
    }

    /// Largest relative drift of `a_i + b_i` from the initial sum.
    pub fn conservation_residual(&self) -> f64 {
        let scale = self.initial_sum.euclidean_norm();
        self.steps
            .iter()
            .map(|s| (s.a.coords() + s.b.coords()).max_abs_diff(&self.initial_sum) / scale)
            .fold(0.0, f64::max)
    }

    pub fn final_distance(&self) -> f64 {
        self.steps.last().map_or(0.0, |s| s.distance)
    }
}

/// Runs split-and-merge for up to `max_steps` steps.
///
/// Each step splits the heavier vector `a` into `(1 - k) a + k a` with
/// `k = m_b / m_a`, then merges the equal-mass pair `k a, b` into their
/// midpoint. The distance between the pair halves and `a_i + b_i` is fixed.
pub fn split_merge(a: &MaterialVector, b: &MaterialVector, max_steps: usize) -> Result<SplitMergeTrace> {
    let g = a.geometry();
    if g != Geometry::spherical(1) || b.geometry() != g {
        return Err(invalid("split-and-merge runs on S^1"));
    }
    let pa = a.point()?;
    let pb = b.point()?;
    let d0 = g.distance_unchecked(&pa, &pb)?;
    if std::f64::consts::PI - d0 < ANTIPODAL_TOL {
        return Err(Error::NoMassCenter("antipodal points"));
    }
    let initial_sum = a.coords() + b.coords();
    let mut steps = vec![SplitMergeStep {
        a: a.clone(),
        b: b.clone(),
        distance: d0,
    }];
    let mut terminated_early = false;
    let mut merged = None;
    loop {
        let cur = steps.last().expect("nonempty");
        let (ma, mb) = (cur.a.mass(), cur.b.mass());
        if (ma - mb).abs() <= 1e-14 * ma.max(mb) {
            terminated_early = true;
            merged = Some(cur.a.coords() + cur.b.coords());
            break;
        }
        if steps.len() > max_steps {
            break;
        }
        let (heavy, light) = if ma > mb { (&cur.a, &cur.b) } else { (&cur.b, &cur.a) };
        let k = light.mass() / heavy.mass();
        let part = heavy.coords().scale(k);
        let rest = heavy.coords() - &part;
        let joined = &part + light.coords();
        let na = MaterialVector::from_raw(g, rest);
        let nb = MaterialVector::from_raw(g, joined);
        let distance = g.distance_unchecked(&na.point()?, &nb.point()?)?;
        steps.push(SplitMergeStep {
            a: na,
            b: nb,
            distance,
        });
    }
    let limit_point = match merged {
        Some(v) => MaterialVector::from_raw(g, v).point()?,
        None => {
            let last = steps.last().expect("nonempty");
            let pa = last.a.point()?;
            let pb = last.b.point()?;
            MaterialVector::from_raw(g, &pa + &pb).point()?
        }
    };
    Ok(SplitMergeTrace {
        steps,
        terminated_early,
        limit_point,
        initial_sum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::masscenter::oplus_slice;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn e1() -> Geometry {
        Geometry::euclidean(1)
    }

    fn s1(m: f64, theta: f64) -> MaterialVector {
        MaterialVector::from_point(Geometry::spherical(1), m, &[theta.cos(), theta.sin()]).unwrap()
    }

    #[test]
    fn k_zero_is_weighted_mean() {
        let sys = FkSystem::new(0.0, e1()).unwrap();
        let c = fk_center(&sys, &[1.0, 3.0], &[0.0, 2.0]).unwrap();
        assert_eq!(c, FkCenter { mass: 4.0, position: 1.5 });
    }

    #[test]
    fn single_point_is_fixed() {
        for k in [0.0, 0.5, 3.0] {
            let sys = FkSystem::new(k, e1()).unwrap();
            let c = fk_center(&sys, &[2.5], &[0.7]).unwrap();
            assert_relative_eq!(c.mass, 2.5, max_relative = 1e-15);
            assert_relative_eq!(c.position, 0.7, max_relative = 1e-14);
        }
    }

    #[test]
    fn canonical_two_point_input() {
        let sys = FkSystem::new(1.0, e1()).unwrap();
        let c = fk_center(&sys, &[1.0, 1.0], &[0.0, 1.0]).unwrap();
        let m = (2.0 + 2.0 * 1f64.cosh()).sqrt();
        assert_relative_eq!(c.mass, m, max_relative = 1e-15);
        assert_relative_eq!(c.position, (1f64.sinh() / m).asinh(), max_relative = 1e-15);
        // the pair is symmetric about 1/2, so every k puts the center there
        assert_relative_eq!(c.position, 0.5, max_relative = 1e-14);

        let c2 = fk_center(&FkSystem::new(2.0, e1()).unwrap(), &[1.0, 1.0], &[0.0, 1.0]).unwrap();
        assert!((c.mass - c2.mass).abs() > 1e-6);
    }

    #[test]
    fn distinct_systems_disagree_on_unequal_masses() {
        let f1 = FkSystem::new(1.0, e1()).unwrap();
        let f2 = FkSystem::new(2.0, e1()).unwrap();
        let a = fk_center(&f1, &[1.0, 2.0], &[0.0, 1.0]).unwrap();
        let b = fk_center(&f2, &[1.0, 2.0], &[0.0, 1.0]).unwrap();
        assert!((a.position - b.position).abs() > 1e-6);
    }

    #[test]
    fn overlapping_points_add_masses() {
        let sys = FkSystem::new(5.0, e1()).unwrap();
        let c = fk_center(&sys, &[1.25, 0.5], &[0.3, 0.3]).unwrap();
        assert!((c.mass - 1.75).abs() < 1e-12);
        assert!((c.position - 0.3).abs() < 1e-12);
    }

    #[test]
    fn k_zero_matches_vector_sum_on_the_line() {
        let sys = FkSystem::new(0.0, e1()).unwrap();
        let (ms, xs) = ([0.5, 1.5, 2.0], [-1.0, 0.25, 3.0]);
        let c = sys.embed(fk_center(&sys, &ms, &xs).unwrap());
        let vs: Vec<_> = ms
            .iter()
            .zip(&xs)
            .map(|(&m, &x)| MaterialVector::from_point(e1(), m, &[x, 1.0]).unwrap())
            .collect();
        let sum = oplus_slice(e1(), &vs);
        assert!(c.coords().max_abs_diff(sum.coords()) < 1e-12);
    }

    #[test]
    fn k_one_matches_vector_sum_on_h1() {
        let h1 = Geometry::hyperbolic(1);
        let sys = FkSystem::new(1.0, h1).unwrap();
        let (ms, xs) = ([0.5, 1.5, 2.0], [-1.0, 0.25, 1.5]);
        let c = fk_center(&sys, &ms, &xs).unwrap();
        let vs: Vec<_> = ms
            .iter()
            .zip(&xs)
            .map(|(&m, &x): (&f64, &f64)| MaterialVector::from_point(h1, m, &[x.sinh(), x.cosh()]).unwrap())
            .collect();
        let sum = sys.unembed(&oplus_slice(h1, &vs)).unwrap();
        assert_relative_eq!(c.mass, sum.mass, max_relative = 1e-12);
        assert_relative_eq!(c.position, sum.position, max_relative = 1e-12);
    }

    #[test]
    fn invalid_systems() {
        assert!(FkSystem::new(-1.0, e1()).is_err());
        assert!(FkSystem::new(51.0, e1()).is_err());
        assert!(FkSystem::new(1.0, Geometry::spherical(1)).is_err());
        assert!(FkSystem::new(1.0, Geometry::euclidean(2)).is_err());
        let sys = FkSystem::new(1.0, e1()).unwrap();
        assert_eq!(fk_center(&sys, &[], &[]).unwrap_err(), Error::EmptyInput);
    }

    #[test]
    fn invariance_examples() {
        let sys = FkSystem::new(2.0, e1()).unwrap();
        let (ms, xs) = ([1.0, 2.0, 0.5], [0.1, -0.4, 0.9]);
        assert_eq!(fk_invariance_check(&sys, &ms, &xs, 0.0, false).unwrap(), 0.0);
        let before = fk_center(&sys, &ms, &xs).unwrap();
        let neg: Vec<f64> = xs.iter().map(|x| -x).collect();
        let after = fk_center(&sys, &ms, &neg).unwrap();
        assert_eq!(after.mass, before.mass);
        assert!((after.position + before.position).abs() < 1e-15);
        assert!(fk_invariance_check(&sys, &ms, &xs, 1.37, true).unwrap() < 1e-10);
    }

    #[test]
    fn split_merge_equal_masses_stop_immediately() {
        let t = split_merge(&s1(1.0, 0.0), &s1(1.0, 1.0), 40).unwrap();
        assert!(t.terminated_early);
        assert_eq!(t.steps.len(), 1);
        assert_relative_eq!(t.limit_point[0], 0.5f64.cos(), max_relative = 1e-15);
        assert_relative_eq!(t.limit_point[1], 0.5f64.sin(), max_relative = 1e-15);
    }

    #[test]
    fn split_merge_distance_halves() {
        let t = split_merge(&s1(2.0, 0.0), &s1(1.0, 1.0), 40).unwrap();
        assert!(!t.terminated_early);
        assert_eq!(t.steps.len(), 41);
        for (i, s) in t.steps.iter().enumerate().take(5) {
            assert_relative_eq!(s.distance, 0.5f64.powi(i as i32), max_relative = 1e-12);
        }
        assert!(t.halving_residual() < 1e-10);
        assert!(t.final_distance() < 1e-11);
        let target = MaterialVector::from_raw(Geometry::spherical(1), t.initial_sum.clone())
            .point()
            .unwrap();
        assert!(t.limit_point.max_abs_diff(&target) < 1e-9);
    }

    #[test]
    fn split_merge_rejects_antipodes() {
        assert!(split_merge(&s1(1.0, 0.0), &s1(2.0, std::f64::consts::PI), 10).is_err());
    }

    proptest! {
        #[test]
        fn fk_translation_reflection(k in 0.0f64..5.0, shift in -2.0f64..2.0, reflect: bool,
                                     ms in prop::collection::vec(0.1f64..3.0, 1..6),
                                     seed in -1.0f64..1.0) {
            let xs: Vec<f64> = (0..ms.len()).map(|i| seed * i as f64 * 0.37 - 0.5).collect();
            for g in [Geometry::euclidean(1), Geometry::hyperbolic(1)] {
                let sys = FkSystem::new(k, g).unwrap();
                prop_assert!(fk_invariance_check(&sys, &ms, &xs, shift, reflect).unwrap() < 1e-10);
            }
        }

        #[test]
        fn split_merge_conserves(ma in 0.1f64..5.0, mb in 0.1f64..5.0, ta in -3.0f64..3.0, d in 0.01f64..3.0) {
            let t = split_merge(&s1(ma, ta), &s1(mb, ta + d), 40).unwrap();
            prop_assert!(t.conservation_residual() < 1e-13);
            prop_assert!(t.halving_residual() < 1e-10);
        }
    }
}
