//! Seeded verification suites.
//!
//! Each suite checks one family of identities on seeded random instances
//! and reports the worst residual per check, so the same code drives the
//! `verify` subcommand and the acceptance tests.

use std::f64::consts::PI;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::ambient::{point_at, random_isometry, random_point, AmbientVector, Geometry, GeometryKind, MaterialVector};
use crate::error::{invalid, Result};
use crate::manifolds::{
    ball_centered_mass, ball_patch, ball_total_mass, builtin_patches, integrate_patches, mass_center_integral,
    ngon_centered_area, ngon_total_area, sphere_centered_mass, sphere_patch, sphere_total_mass, total_mass_integral,
};
use crate::masscenter::{centered_mass_two, deviation, locate_center, oplus_slice};
use crate::onedim::{fk_center, fk_invariance_check, split_merge, FkCenter, FkSystem};
use crate::pappus::{oracle_volume_mc, oracle_volume_quadrature, pappus_total_mass, Solid, SolidSpec};
use crate::quadrature::QuadratureConfig;

pub const SUITES: [&str; 7] = ["axioms", "two-point", "tables", "derivative", "pappus", "fk", "split-merge"];

/// Which side of the tolerance a residual must fall on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    /// `residual < tolerance`.
    Below,
    /// `residual > tolerance`.
    Above,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub bound: Bound,
    pub pass: bool,
}

impl Check {
    pub fn below(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Check { name: name.into(), residual, tolerance, bound: Bound::Below, pass: residual < tolerance }
    }

    pub fn above(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Check { name: name.into(), residual, tolerance, bound: Bound::Above, pass: residual > tolerance }
    }

    fn with_tolerance(mut self, tol: f64) -> Self {
        if self.bound == Bound::Below {
            self.tolerance = tol;
            self.pass = self.residual < tol;
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub seconds: f64,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Replaces the tolerance of every upper-bound check.
    pub tolerance: Option<f64>,
    /// Random instances per geometry for the sampled suites.
    pub instances: usize,
    /// Monte Carlo samples per solid in the `pappus` suite.
    pub mc_samples: u64,
    pub quadrature: QuadratureConfig,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 0,
            tolerance: None,
            instances: 1000,
            mc_samples: 10_000_000,
            quadrature: QuadratureConfig::default(),
        }
    }
}

/// Runs the named suite.
pub fn run_suite(name: &str, opts: &VerifyOptions) -> Result<SuiteReport> {
    let start = Instant::now();
    let checks = match name {
        "axioms" => axioms(opts),
        "two-point" => two_point(opts),
        "tables" => tables(opts),
        "derivative" => derivative(),
        "pappus" => pappus(opts),
        "fk" => fk(opts),
        "split-merge" => split_merge_suite(opts),
        other => return Err(invalid(format!("unknown suite '{other}'; expected one of {}", SUITES.join(", ")))),
    }?;
    let checks = match opts.tolerance {
        Some(t) => checks.into_iter().map(|c| c.with_tolerance(t)).collect(),
        None => checks,
    };
    Ok(SuiteReport {
        suite: name.to_string(),
        seed: opts.seed,
        seconds: start.elapsed().as_secs_f64(),
        checks,
    })
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn geometries(dims: &[usize]) -> Vec<Geometry> {
    dims.iter()
        .flat_map(|&n| GeometryKind::ALL.map(|k| Geometry::new(k, n).expect("positive dimension")))
        .collect()
}

/// Sampling radius that keeps random families well inside a hemisphere.
fn sample_radius(kind: GeometryKind) -> f64 {
    match kind {
        GeometryKind::Spherical => 1.2,
        _ => 2.0,
    }
}

fn random_family(g: Geometry, rng: &mut ChaCha8Rng) -> Vec<MaterialVector> {
    let count = rng.random_range(2..=7);
    (0..count)
        .map(|_| {
            let p = random_point(g, sample_radius(g.kind()), rng);
            MaterialVector::from_point(g, rng.random_range(0.1..5.0), &p).expect("on-space sample")
        })
        .collect()
}

/// `|x - y|_∞` relative to `scale`.
fn vec_rel(x: &AmbientVector, y: &AmbientVector, scale: f64) -> f64 {
    x.max_abs_diff(y) / scale
}

fn axioms(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut checks = Vec::new();
    for g in geometries(&[2, 3]) {
        let mut worst = [0.0f64; 5];
        for i in 0..opts.instances {
            let vs = random_family(g, &mut rng);
            // the scale of the summands bounds the rounding in their sum
            let scale: f64 = vs.iter().map(|v| v.coords().iter().fold(0.0f64, |m, x| m.max(x.abs()))).sum();
            let sum = oplus_slice(g, &vs);

            let mut shuffled = vs.clone();
            shuffled.shuffle(&mut rng);
            worst[0] = worst[0].max(vec_rel(oplus_slice(g, &shuffled).coords(), sum.coords(), scale));

            let cut = rng.random_range(1..vs.len());
            let parts = [oplus_slice(g, &vs[..cut]), oplus_slice(g, &vs[cut..])];
            worst[1] = worst[1].max(vec_rel(oplus_slice(g, &parts).coords(), sum.coords(), scale));

            let (r, s) = (rng.random_range(0.0..3.0), rng.random_range(0.0..3.0));
            let a = &vs[0];
            let both = oplus_slice(g, &[a.scale(r), a.scale(s)]);
            worst[2] = worst[2].max(vec_rel(both.coords(), a.scale(r + s).coords(), scale * (r + s).max(1.0)));

            let t = rng.random_range(0.1..4.0);
            let scaled: Vec<_> = vs.iter().map(|v| v.scale(t)).collect();
            worst[3] = worst[3].max(vec_rel(oplus_slice(g, &scaled).coords(), sum.scale(t).coords(), scale * t));

            let iso = random_isometry(g, opts.seed.wrapping_mul(1_000_003).wrapping_add(i as u64));
            let norm = iso.matrix().iter().fold(1.0f64, |m, x| m.max(x.abs()));
            let moved: Vec<_> = vs.iter().map(|v| iso.apply(v)).collect::<Result<_>>()?;
            let lhs = iso.apply(&sum)?;
            worst[4] = worst[4].max(vec_rel(oplus_slice(g, &moved).coords(), lhs.coords(), scale * norm * norm));
        }
        for (name, w) in ["permutation", "partition", "overlapping", "multiplication", "isometry"].iter().zip(worst) {
            checks.push(Check::below(format!("{g} {name}"), w, 1e-10));
        }
    }
    Ok(checks)
}

/// Material vectors at the origin and at distance `d` along the first axis.
fn pair(g: Geometry, ma: f64, mb: f64, d: f64) -> (MaterialVector, MaterialVector) {
    let mut dir = vec![0.0; g.dim()];
    dir[0] = 1.0;
    let a = MaterialVector::from_point(g, ma, &g.origin()).expect("origin");
    let b = MaterialVector::from_point(g, mb, &point_at(g, &dir, d)).expect("on-space");
    (a, b)
}

fn max_distance(kind: GeometryKind) -> f64 {
    match kind {
        GeometryKind::Spherical => 3.0,
        _ => 4.0,
    }
}

fn two_point(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut checks = Vec::new();
    for g in geometries(&[2, 3]) {
        let kind = g.kind();
        let mut worst = [0.0f64; 5];
        let mut violations = 0usize;
        let mut equality = 0.0f64;
        for _ in 0..opts.instances {
            let ma = rng.random_range(0.1..10.0);
            let mb = rng.random_range(0.1..10.0);
            let d = rng.random_range(0.01..max_distance(kind));
            let (a, b) = pair(g, ma, mb, d);
            let sum = a.add(&b)?;
            let direct = sum.mass();
            let sol = locate_center(ma, mb, d, g)?;
            worst[0] = worst[0].max(rel(sol.m_cen, direct));
            worst[1] = worst[1].max(rel(sol.m_cen_projected, sol.m_cen));
            worst[2] = worst[2].max(sol.lever_residual().abs() / (ma + mb));
            let dev = deviation(ma, mb, d, g)?;
            let m_cen = centered_mass_two(ma, mb, d, g)?;
            let lhs = (m_cen - sol.m_tot) * (m_cen + sol.m_tot);
            worst[3] = worst[3].max((lhs - dev).abs() / (sol.m_tot * sol.m_tot));
            let mut dir = vec![0.0; g.dim()];
            dir[0] = 1.0;
            let located = point_at(g, &dir, sol.d1);
            worst[4] = worst[4].max(located.max_abs_diff(&sum.point()?));

            let m_tot = ma + mb;
            match kind {
                GeometryKind::Spherical => violations += usize::from(direct >= m_tot),
                GeometryKind::Hyperbolic => violations += usize::from(direct <= m_tot),
                GeometryKind::Euclidean => equality = equality.max(rel(direct, m_tot)),
            }
        }
        checks.push(Check::below(format!("{g} centered mass vs |a+b|"), worst[0], 1e-10));
        checks.push(Check::below(format!("{g} projected centered mass"), worst[1], 1e-10));
        checks.push(Check::below(format!("{g} lever residual"), worst[2], 1e-10));
        checks.push(Check::below(format!("{g} deviation identity"), worst[3], 1e-9));
        checks.push(Check::below(format!("{g} center on segment"), worst[4], 1e-9));
        match kind {
            GeometryKind::Spherical => {
                checks.push(Check::below(format!("{g} m_cen < m_tot violations"), violations as f64, 0.5))
            }
            GeometryKind::Hyperbolic => {
                checks.push(Check::below(format!("{g} m_cen > m_tot violations"), violations as f64, 0.5))
            }
            GeometryKind::Euclidean => checks.push(Check::below(format!("{g} m_cen = m_tot"), equality, 1e-12)),
        }
    }
    Ok(checks)
}

/// Closed-form ball, sphere and polygon values against quadrature.
pub fn table_checks(q: &QuadratureConfig) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for kind in GeometryKind::ALL {
        for k in 1..=3usize {
            for r in [0.3, 0.7, 1.1] {
                let g = Geometry::new(kind, k)?;
                let patch = ball_patch(k, r, g)?;
                let v = mass_center_integral(&patch, q)?;
                checks.push(Check::below(
                    format!("{kind} B^{k}({r}) centered mass"),
                    rel(v.mass(), ball_centered_mass(k, r, g)?),
                    1e-6,
                ));
                checks.push(Check::below(
                    format!("{kind} B^{k}({r}) total mass"),
                    rel(total_mass_integral(&patch, q)?, ball_total_mass(k, r, g)?),
                    1e-6,
                ));
                let gs = Geometry::new(kind, k + 1)?;
                let patch = sphere_patch(k, r, gs)?;
                let v = mass_center_integral(&patch, q)?;
                checks.push(Check::below(
                    format!("{kind} S^{k}({r}) centered mass"),
                    rel(v.mass(), sphere_centered_mass(k, r, gs)?),
                    1e-6,
                ));
                checks.push(Check::below(
                    format!("{kind} S^{k}({r}) total mass"),
                    rel(total_mass_integral(&patch, q)?, sphere_total_mass(k, r, gs)?),
                    1e-6,
                ));
            }
        }
    }
    for kind in [GeometryKind::Spherical, GeometryKind::Hyperbolic] {
        let g = Geometry::new(kind, 2)?;
        for (n, a) in [(3usize, 0.4), (5, 0.6), (8, 0.2)] {
            let (v, total) = integrate_patches(&builtin_patches("ngon", n, a, kind)?, q)?;
            checks.push(Check::below(
                format!("{kind} {n}-gon({a}) centered area"),
                rel(v.mass(), ngon_centered_area(n, a, g)?),
                1e-6,
            ));
            checks.push(Check::below(
                format!("{kind} {n}-gon({a}) total area"),
                rel(total, ngon_total_area(n, a, g)?),
                1e-6,
            ));
        }
    }
    Ok(checks)
}

/// Scale factor of the closed-form degeneration test.
pub const DEGENERATION_LAMBDA: f64 = 1e-3;

/// Curved closed forms at parameters scaled by `λ`, divided by `λ^dim`,
/// against their Euclidean counterparts.
pub fn degeneration_checks(q: &QuadratureConfig) -> Result<Vec<Check>> {
    let l = DEGENERATION_LAMBDA;
    let mut checks = Vec::new();
    for kind in [GeometryKind::Spherical, GeometryKind::Hyperbolic] {
        let mut push = |name: String, curved: f64, flat: f64| checks.push(Check::below(name, rel(curved, flat), 1e-4));
        for k in 1..=4usize {
            let (g, e) = (Geometry::new(kind, k + 1)?, Geometry::euclidean(k + 1));
            let s = l.powi(k as i32);
            let r = 0.9;
            push(format!("{kind} B^{k} centered mass"), ball_centered_mass(k, l * r, g)? / s, ball_centered_mass(k, r, e)?);
            push(format!("{kind} B^{k} total mass"), ball_total_mass(k, l * r, g)? / s, ball_total_mass(k, r, e)?);
            push(format!("{kind} S^{k} centered mass"), sphere_centered_mass(k, l * r, g)? / s, sphere_centered_mass(k, r, e)?);
            push(format!("{kind} S^{k} total mass"), sphere_total_mass(k, l * r, g)? / s, sphere_total_mass(k, r, e)?);
        }
        let (g2, e2) = (Geometry::new(kind, 2)?, Geometry::euclidean(2));
        for (n, a) in [(3usize, 0.4), (5, 0.6), (8, 0.2)] {
            let s = l * l;
            push(format!("{kind} {n}-gon centered area"), ngon_centered_area(n, l * a, g2)? / s, ngon_centered_area(n, a, e2)?);
            push(format!("{kind} {n}-gon total area"), ngon_total_area(n, l * a, g2)? / s, ngon_total_area(n, a, e2)?);
        }
        let solids = [
            Solid::Torus { big_r: 0.8, r: 0.3 },
            Solid::RightCircularCone { r: 0.4, h: 0.6 },
            Solid::BallBaseCone { n: 4, r: 0.4, h: 0.6 },
            Solid::NgonCone { n: 5, a: 0.6, h: 0.7 },
        ];
        for solid in solids {
            let scaled = match solid {
                Solid::Torus { big_r, r } => Solid::Torus { big_r: l * big_r, r: l * r },
                Solid::RightCircularCone { r, h } => Solid::RightCircularCone { r: l * r, h: l * h },
                Solid::BallBaseCone { n, r, h } => Solid::BallBaseCone { n, r: l * r, h: l * h },
                Solid::NgonCone { n, a, h } => Solid::NgonCone { n, a: l * a, h: l * h },
            };
            let curved = SolidSpec::new(scaled, kind)?;
            let flat = SolidSpec::new(solid, GeometryKind::Euclidean)?;
            let s = l.powi(curved.geometry().dim() as i32);
            push(format!("{kind} {} volume", curved.name()), curved.volume(q)? / s, flat.volume(q)?);
        }
    }
    Ok(checks)
}

fn tables(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let mut checks = table_checks(&opts.quadrature)?;
    checks.extend(degeneration_checks(&opts.quadrature)?);
    Ok(checks)
}

fn derivative() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for kind in GeometryKind::ALL {
        for k in 1..=4usize {
            let g = Geometry::new(kind, k)?;
            let mut worst = 0.0f64;
            for r in [0.1, 0.3, 0.7, 1.1, 1.4] {
                let h = 1e-5;
                let fd = (ball_centered_mass(k, r + h, g)? - ball_centered_mass(k, r - h, g)?) / (2.0 * h);
                worst = worst.max(rel(fd, sphere_centered_mass(k - 1, r, g)?));
            }
            checks.push(Check::below(format!("{kind} d/dr B^{k} = S^{}", k - 1), worst, 1e-6));
        }
    }
    Ok(checks)
}

/// Solids checked by the `pappus` suite.
pub fn pappus_cases() -> Vec<SolidSpec> {
    let mut cases = Vec::new();
    for kind in GeometryKind::ALL {
        cases.push(SolidSpec::new(Solid::Torus { big_r: 0.8, r: 0.3 }, kind).expect("valid torus"));
    }
    cases.push(SolidSpec::new(Solid::Torus { big_r: 1.2, r: 0.5 }, GeometryKind::Hyperbolic).expect("valid torus"));
    for kind in GeometryKind::ALL {
        for (r, h) in [(0.4, 0.6), (0.7, 0.9)] {
            cases.push(SolidSpec::new(Solid::RightCircularCone { r, h }, kind).expect("valid cone"));
        }
    }
    cases
}

fn describe(s: &SolidSpec) -> String {
    match s.solid() {
        Solid::Torus { big_r, r } => format!("{} torus({big_r}, {r})", s.kind()),
        Solid::RightCircularCone { r, h } => format!("{} cone({r}, {h})", s.kind()),
        Solid::BallBaseCone { n, r, h } => format!("{} ball-cone{n}({r}, {h})", s.kind()),
        Solid::NgonCone { n, a, h } => format!("{} ngon-cone{n}({a}, {h})", s.kind()),
    }
}

fn pappus(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let q = &opts.quadrature;
    let precise = QuadratureConfig::precise();
    let mut checks = Vec::new();
    for (i, spec) in pappus_cases().iter().enumerate() {
        let name = describe(spec);
        let line = pappus_total_mass(&spec.profile()?, q)?;
        let closed = spec.volume(q)?;
        let line_precise = pappus_total_mass(&spec.profile()?, &precise)?;
        checks.push(Check::below(format!("{name} closed form vs line integral"), rel(closed, line_precise), 1e-10));
        let quad = oracle_volume_quadrature(spec, q)?;
        checks.push(Check::below(format!("{name} line integral vs quadrature"), rel(line, quad.value), 1e-6));
        let mc = oracle_volume_mc(spec, opts.mc_samples, opts.seed.wrapping_add(i as u64))?;
        checks.push(Check::below(format!("{name} line integral vs Monte Carlo (sigmas)"), mc.sigmas_from(line), 3.0));
    }
    checks.extend(degeneration_checks(q)?);
    Ok(checks)
}

/// Two unit masses at 0 and 1, the input on which `F_1` and `F_2` are compared.
pub const CANONICAL_INPUT: ([f64; 2], [f64; 2]) = ([1.0, 1.0], [0.0, 1.0]);

pub const FK_PARAMETERS: [f64; 5] = [0.0, 0.5, 1.0, 2.0, 5.0];

fn fk(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let e1 = Geometry::euclidean(1);
    let h1 = Geometry::hyperbolic(1);
    let mut checks = Vec::new();
    for k in FK_PARAMETERS {
        let sys = FkSystem::new(k, e1)?;
        let mut worst = 0.0f64;
        for _ in 0..opts.instances {
            let count = rng.random_range(1..=5);
            let masses: Vec<f64> = (0..count).map(|_| rng.random_range(0.1..5.0)).collect();
            let positions: Vec<f64> = (0..count).map(|_| rng.random_range(-1.0..1.0)).collect();
            let shift = rng.random_range(-1.0..1.0);
            let reflect = rng.random_bool(0.5);
            worst = worst.max(fk_invariance_check(&sys, &masses, &positions, shift, reflect)?);
        }
        checks.push(Check::below(format!("F_{k} translation/reflection invariance"), worst, 1e-10));
    }

    // F_0 on E^1 and F_1 on H^1 are the vector-sum systems of those spaces.
    for (k, g) in [(0.0, e1), (1.0, h1)] {
        let sys = FkSystem::new(k, g)?;
        let mut worst = 0.0f64;
        for _ in 0..opts.instances {
            let count = rng.random_range(1..=5);
            let masses: Vec<f64> = (0..count).map(|_| rng.random_range(0.1..5.0)).collect();
            let positions: Vec<f64> = (0..count).map(|_| rng.random_range(-2.0..2.0)).collect();
            let c = sys.embed(fk_center(&sys, &masses, &positions)?);
            let vs: Vec<_> = masses
                .iter()
                .zip(&positions)
                .map(|(&m, &x)| sys.embed(FkCenter { mass: m, position: x }))
                .collect();
            let sum = oplus_slice(g, &vs);
            let scale: f64 = vs.iter().map(|v| v.coords().euclidean_norm()).sum();
            worst = worst.max(c.coords().max_abs_diff(sum.coords()) / scale);
        }
        checks.push(Check::below(format!("F_{k} vs vector sum on {g}"), worst, 1e-12));
    }

    let (masses, positions) = CANONICAL_INPUT;
    let f = |k: f64| -> Result<FkCenter> { fk_center(&FkSystem::new(k, h1)?, &masses, &positions) };
    let (c1, c2) = (f(1.0)?, f(2.0)?);
    let gap = (c1.mass - c2.mass).abs().max((c1.position - c2.position).abs());
    checks.push(Check::above("F_1 vs F_2 centers on the canonical input", gap, 1e-6));
    let unequal = [1.0, 2.0];
    let p1 = fk_center(&FkSystem::new(1.0, h1)?, &unequal, &positions)?.position;
    let p2 = fk_center(&FkSystem::new(2.0, h1)?, &unequal, &positions)?.position;
    checks.push(Check::above("F_1 vs F_2 positions for masses (1, 2)", (p1 - p2).abs(), 1e-6));
    Ok(checks)
}

/// Steps run per split-and-merge instance.
pub const SPLIT_MERGE_STEPS: usize = 40;

fn split_merge_suite(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let g = Geometry::spherical(1);
    let mut worst = [0.0f64; 3];
    let instances = opts.instances.clamp(1, 100);
    for _ in 0..instances {
        let t0 = rng.random_range(0.0..2.0 * PI);
        let t1 = t0 + rng.random_range(0.05..3.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let a = MaterialVector::from_point(g, rng.random_range(0.1..5.0), &[t0.cos(), t0.sin()])?;
        let b = MaterialVector::from_point(g, rng.random_range(0.1..5.0), &[t1.cos(), t1.sin()])?;
        let trace = split_merge(&a, &b, SPLIT_MERGE_STEPS)?;
        worst[0] = worst[0].max(trace.halving_residual());
        worst[1] = worst[1].max(trace.conservation_residual());
        let target = a.add(&b)?.point()?;
        worst[2] = worst[2].max(trace.limit_point.max_abs_diff(&target));
    }
    Ok(vec![
        Check::below("distance halves per step", worst[0], 1e-10),
        Check::below("a_i + b_i conserved (relative)", worst[1], 1e-12),
        Check::below("limit point vs [a + b]", worst[2], 1e-9),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> VerifyOptions {
        VerifyOptions { instances: 50, mc_samples: 200_000, ..VerifyOptions::default() }
    }

    #[test]
    fn fast_suites_pass() {
        for name in ["axioms", "two-point", "derivative", "fk", "split-merge"] {
            let report = run_suite(name, &small()).unwrap();
            for c in &report.checks {
                assert!(c.pass, "{name}: {c:?}");
            }
        }
    }

    #[test]
    fn unknown_suite() {
        assert!(run_suite("everything", &small()).is_err());
    }

    #[test]
    fn tolerance_override_tightens_upper_bounds_only() {
        let opts = VerifyOptions { tolerance: Some(0.0), ..small() };
        let report = run_suite("fk", &opts).unwrap();
        assert!(!report.passed());
        assert!(report.checks.iter().filter(|c| c.bound == Bound::Above).all(|c| c.pass));
    }

    #[test]
    fn reports_serialize() {
        let report = run_suite("split-merge", &small()).unwrap();
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["checks"][0]["bound"], "below");
        assert_eq!(json["seed"], 0);
    }
}
