//! Numerical integration over intervals and axis-aligned boxes.
//!
//! Integrands are vector-valued (`Fn(&[f64]) -> Vec<f64>`) so that all
//! ambient components of a mass-center integral share one pass.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureMethod {
    /// Fixed tensor-product Gauss–Legendre rule.
    GaussLegendreTensor,
    /// Per-axis adaptive Gauss–Legendre, nested over the axes.
    AdaptiveGaussLegendre,
    /// Per-axis adaptive Simpson, nested over the axes.
    AdaptiveSimpson,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub method: QuadratureMethod,
    /// Nodes per axis for the Gauss–Legendre rules.
    pub points_per_axis: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Budget of interval bisections per 1-D adaptive integral.
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            method: QuadratureMethod::GaussLegendreTensor,
            points_per_axis: 64,
            abs_tol: 1e-13,
            rel_tol: 1e-11,
            max_subdivisions: 4096,
        }
    }
}

impl QuadratureConfig {
    pub fn fast() -> Self {
        QuadratureConfig {
            points_per_axis: 24,
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            ..Self::default()
        }
    }

    pub fn precise() -> Self {
        QuadratureConfig {
            points_per_axis: 96,
            abs_tol: 1e-15,
            rel_tol: 1e-13,
            max_subdivisions: 16384,
            ..Self::default()
        }
    }

    pub fn simpson() -> Self {
        QuadratureConfig {
            method: QuadratureMethod::AdaptiveSimpson,
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 1 << 16,
            ..Self::default()
        }
    }

    pub fn adaptive() -> Self {
        QuadratureConfig {
            method: QuadratureMethod::AdaptiveGaussLegendre,
            points_per_axis: 15,
            ..Self::default()
        }
    }

    /// Looks up a named preset: `fast`, `default`, `precise`, `simpson`, `adaptive`.
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "fast" => Ok(Self::fast()),
            "default" => Ok(Self::default()),
            "precise" => Ok(Self::precise()),
            "simpson" => Ok(Self::simpson()),
            "adaptive" => Ok(Self::adaptive()),
            other => Err(invalid(format!("unknown quadrature preset '{other}'"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.points_per_axis < 2 {
            return Err(invalid("points per axis must be at least 2"));
        }
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(invalid("quadrature tolerances must be positive"));
        }
        if self.max_subdivisions == 0 {
            return Err(invalid("subdivision budget must be positive"));
        }
        Ok(())
    }

    /// The same configuration with `points_per_axis` changed.
    pub fn with_points(self, points_per_axis: usize) -> Self {
        QuadratureConfig {
            points_per_axis,
            ..self
        }
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre_rule(points: usize) -> Vec<(f64, f64)> {
    let degree = NonZeroUsize::new(points.max(1)).expect("positive");
    GaussLegendre::new(degree).as_node_weight_pairs().to_vec()
}

fn add_scaled(acc: &mut [f64], v: &[f64], w: f64) {
    for (a, x) in acc.iter_mut().zip(v) {
        *a += w * x;
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Integral of a vector-valued function over the box `[lo, hi]`, with `dim`
/// output components.
pub fn integrate_box<F>(f: F, lo: &[f64], hi: &[f64], dim: usize, cfg: &QuadratureConfig) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Vec<f64> + Sync,
{
    cfg.validate()?;
    if lo.len() != hi.len() || lo.is_empty() {
        return Err(invalid("integration box needs matching, nonempty bounds"));
    }
    if lo.iter().chain(hi).any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    match cfg.method {
        QuadratureMethod::GaussLegendreTensor => Ok(tensor_gl(&f, lo, hi, dim, cfg.points_per_axis)),
        QuadratureMethod::AdaptiveGaussLegendre | QuadratureMethod::AdaptiveSimpson => {
            nested_adaptive(&f, lo, hi, 0, lo, dim, cfg)
        }
    }
}

/// Scalar convenience wrapper around [`integrate_box`].
pub fn integrate_box_scalar<F>(f: F, lo: &[f64], hi: &[f64], cfg: &QuadratureConfig) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    integrate_box(|x| vec![f(x)], lo, hi, 1, cfg).map(|v| v[0])
}

/// Tensor Gauss–Legendre. The outermost axis runs in parallel; partial sums
/// are combined in node order so the result does not depend on scheduling.
fn tensor_gl<F>(f: &F, lo: &[f64], hi: &[f64], dim: usize, points: usize) -> Vec<f64>
where
    F: Fn(&[f64]) -> Vec<f64> + Sync,
{
    let rule = gauss_legendre_rule(points);
    let k = lo.len();
    let half: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (b - a)).collect();
    let mid: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (b + a)).collect();
    let partials: Vec<Vec<f64>> = rule
        .par_iter()
        .map(|&(x0, w0)| {
            let mut acc = vec![0.0; dim];
            let mut point = vec![0.0; k];
            point[0] = mid[0] + half[0] * x0;
            let mut idx = vec![0usize; k];
            if k == 1 {
                add_scaled(&mut acc, &f(&point), 1.0);
            } else {
                loop {
                    let mut w = 1.0;
                    for axis in 1..k {
                        let (x, wi) = rule[idx[axis]];
                        point[axis] = mid[axis] + half[axis] * x;
                        w *= wi;
                    }
                    add_scaled(&mut acc, &f(&point), w);
                    // odometer over axes 1..k
                    let mut axis = k - 1;
                    loop {
                        idx[axis] += 1;
                        if idx[axis] < rule.len() {
                            break;
                        }
                        idx[axis] = 0;
                        if axis == 1 {
                            break;
                        }
                        axis -= 1;
                    }
                    if idx[1..].iter().all(|&i| i == 0) {
                        break;
                    }
                }
            }
            acc.iter_mut().for_each(|a| *a *= w0);
            acc
        })
        .collect();
    let jac: f64 = half.iter().product();
    let mut total = vec![0.0; dim];
    for p in &partials {
        add_scaled(&mut total, p, jac);
    }
    total
}

fn nested_adaptive<F>(
    f: &F,
    lo: &[f64],
    hi: &[f64],
    axis: usize,
    point: &[f64],
    dim: usize,
    cfg: &QuadratureConfig,
) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Vec<f64> + Sync,
{
    let last = axis + 1 == lo.len();
    let prefix = point.to_vec();
    let g = |x: f64| -> Result<Vec<f64>> {
        let mut p = prefix.clone();
        p[axis] = x;
        if last {
            Ok(f(&p))
        } else {
            nested_adaptive(f, lo, hi, axis + 1, &p, dim, cfg)
        }
    };
    let out = adaptive_1d(g, lo[axis], hi[axis], &[], dim, cfg)?;
    Ok(out.value)
}

/// Result of a 1-D adaptive integration.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveResult {
    pub value: Vec<f64>,
    pub error: f64,
    pub evaluations: usize,
}

/// Adaptive integration of `g` over `[a, b]` using the method in `cfg`
/// (tensor Gauss–Legendre is treated as adaptive Gauss–Legendre here).
///
/// `breaks` seeds the initial partition with interior points.
pub fn adaptive_1d<G>(g: G, a: f64, b: f64, breaks: &[f64], dim: usize, cfg: &QuadratureConfig) -> Result<AdaptiveResult>
where
    G: Fn(f64) -> Result<Vec<f64>>,
{
    cfg.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::NonFinite);
    }
    if a == b {
        return Ok(AdaptiveResult {
            value: vec![0.0; dim],
            error: 0.0,
            evaluations: 0,
        });
    }
    let mut cuts = vec![a];
    cuts.extend(breaks.iter().copied().filter(|&x| x > a.min(b) && x < a.max(b)));
    cuts.push(b);
    match cfg.method {
        QuadratureMethod::AdaptiveSimpson => adaptive_simpson(&g, &cuts, dim, cfg),
        _ => adaptive_gl(&g, &cuts, dim, cfg),
    }
}

/// Scalar adaptive integral of `f` over `[a, b]`.
pub fn integrate_1d<F>(f: F, a: f64, b: f64, breaks: &[f64], cfg: &QuadratureConfig) -> Result<AdaptiveResult>
where
    F: Fn(f64) -> f64,
{
    adaptive_1d(|x| Ok(vec![f(x)]), a, b, breaks, 1, cfg)
}

fn gl_panel<G>(g: &G, rule: &[(f64, f64)], a: f64, b: f64, dim: usize) -> Result<Vec<f64>>
where
    G: Fn(f64) -> Result<Vec<f64>>,
{
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    let mut acc = vec![0.0; dim];
    for &(x, w) in rule {
        add_scaled(&mut acc, &g(mid + half * x)?, w * half);
    }
    Ok(acc)
}

fn adaptive_gl<G>(g: &G, cuts: &[f64], dim: usize, cfg: &QuadratureConfig) -> Result<AdaptiveResult>
where
    G: Fn(f64) -> Result<Vec<f64>>,
{
    let rule = gauss_legendre_rule(cfg.points_per_axis);
    let total_len = (cuts[cuts.len() - 1] - cuts[0]).abs();
    let mut evaluations = 0usize;
    let mut subdivisions = 0usize;
    let mut value = vec![0.0; dim];
    let mut error = 0.0;
    // Depth-first stack; left halves are finished first so the summation
    // order is fixed by the partition alone.
    let mut stack: Vec<(f64, f64, Vec<f64>)> = Vec::new();
    for w in cuts.windows(2).rev() {
        let whole = gl_panel(g, &rule, w[0], w[1], dim)?;
        evaluations += rule.len();
        stack.push((w[0], w[1], whole));
    }
    let mut scale = 0.0f64;
    while let Some((a, b, whole)) = stack.pop() {
        let m = 0.5 * (a + b);
        let left = gl_panel(g, &rule, a, m, dim)?;
        let right = gl_panel(g, &rule, m, b, dim)?;
        evaluations += 2 * rule.len();
        let mut refined = left.clone();
        add_scaled(&mut refined, &right, 1.0);
        let err = max_abs_diff(&refined, &whole);
        scale = scale.max(max_abs(&refined));
        let share = (b - a).abs() / total_len;
        let tol = cfg.abs_tol.max(cfg.rel_tol * scale) * share;
        if err <= tol || (b - a).abs() <= 1e-14 * total_len {
            add_scaled(&mut value, &refined, 1.0);
            error += err;
            continue;
        }
        subdivisions += 1;
        if subdivisions > cfg.max_subdivisions {
            return Err(Error::NonConvergence {
                value: value.first().copied().unwrap_or(0.0),
                error: err,
                evaluations,
            });
        }
        stack.push((m, b, right));
        stack.push((a, m, left));
    }
    Ok(AdaptiveResult {
        value,
        error,
        evaluations,
    })
}

fn adaptive_simpson<G>(g: &G, cuts: &[f64], dim: usize, cfg: &QuadratureConfig) -> Result<AdaptiveResult>
where
    G: Fn(f64) -> Result<Vec<f64>>,
{
    struct Panel {
        a: f64,
        b: f64,
        fa: Vec<f64>,
        fm: Vec<f64>,
        fb: Vec<f64>,
        whole: Vec<f64>,
    }
    let simpson = |a: f64, b: f64, fa: &[f64], fm: &[f64], fb: &[f64]| -> Vec<f64> {
        let h = (b - a) / 6.0;
        (0..dim).map(|i| h * (fa[i] + 4.0 * fm[i] + fb[i])).collect()
    };
    let total_len = (cuts[cuts.len() - 1] - cuts[0]).abs();
    let mut evaluations = 0usize;
    let mut stack = Vec::new();
    for w in cuts.windows(2).rev() {
        let (a, b) = (w[0], w[1]);
        // Start from eight panels so narrow features are not skipped outright.
        let n0 = 8;
        for i in (0..n0).rev() {
            let pa = a + (b - a) * i as f64 / n0 as f64;
            let pb = a + (b - a) * (i + 1) as f64 / n0 as f64;
            let fa = g(pa)?;
            let fm = g(0.5 * (pa + pb))?;
            let fb = g(pb)?;
            evaluations += 3;
            let whole = simpson(pa, pb, &fa, &fm, &fb);
            stack.push(Panel { a: pa, b: pb, fa, fm, fb, whole });
        }
    }
    let mut value = vec![0.0; dim];
    let mut error = 0.0;
    let mut subdivisions = 0usize;
    let mut scale = 0.0f64;
    while let Some(p) = stack.pop() {
        let m = 0.5 * (p.a + p.b);
        let flm = g(0.5 * (p.a + m))?;
        let frm = g(0.5 * (m + p.b))?;
        evaluations += 2;
        let left = simpson(p.a, m, &p.fa, &flm, &p.fm);
        let right = simpson(m, p.b, &p.fm, &frm, &p.fb);
        let refined: Vec<f64> = left.iter().zip(&right).map(|(x, y)| x + y).collect();
        let err = max_abs_diff(&refined, &p.whole) / 15.0;
        scale = scale.max(max_abs(&refined));
        let share = (p.b - p.a).abs() / total_len;
        let tol = cfg.abs_tol.max(cfg.rel_tol * scale) * share;
        if err <= tol || (p.b - p.a).abs() <= 1e-14 * total_len {
            // Richardson extrapolation of the two Simpson levels.
            for i in 0..dim {
                value[i] += refined[i] + (refined[i] - p.whole[i]) / 15.0;
            }
            error += err;
            continue;
        }
        subdivisions += 1;
        if subdivisions > cfg.max_subdivisions {
            return Err(Error::NonConvergence {
                value: value.first().copied().unwrap_or(0.0),
                error: err,
                evaluations,
            });
        }
        stack.push(Panel { a: m, b: p.b, fa: p.fm.clone(), fm: frm, fb: p.fb, whole: right });
        stack.push(Panel { a: p.a, b: m, fa: p.fa, fm: flm, fb: p.fm, whole: left });
    }
    Ok(AdaptiveResult {
        value,
        error,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let rule = gauss_legendre_rule(5);
        // exact through degree 9
        let s: f64 = rule.iter().map(|(x, w)| w * x.powi(8)).sum();
        assert_relative_eq!(s, 2.0 / 9.0, max_relative = 1e-14);
        let total: f64 = rule.iter().map(|(_, w)| w).sum();
        assert_relative_eq!(total, 2.0, max_relative = 1e-15);
    }

    #[test]
    fn tensor_unit_square() {
        let cfg = QuadratureConfig::default();
        let v = integrate_box_scalar(|_| 1.0, &[0.0, 0.0], &[1.0, 1.0], &cfg).unwrap();
        assert_relative_eq!(v, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn all_methods_agree_on_smooth_3d_integrand() {
        // integral of sin(x) cos(y) exp(z) over [0, pi] x [0, 1] x [0, 1]
        let exact = 2.0 * 1f64.sin() * (1f64.exp() - 1.0);
        let f = |p: &[f64]| p[0].sin() * p[1].cos() * p[2].exp();
        for cfg in [
            QuadratureConfig::default(),
            QuadratureConfig::adaptive(),
            QuadratureConfig::simpson(),
        ] {
            let v = integrate_box_scalar(f, &[0.0, 0.0, 0.0], &[PI, 1.0, 1.0], &cfg).unwrap();
            assert_relative_eq!(v, exact, max_relative = 1e-9);
        }
    }

    #[test]
    fn adaptive_handles_sqrt_endpoint() {
        let cfg = QuadratureConfig::adaptive();
        let r = integrate_1d(|x| x.sqrt(), 0.0, 1.0, &[], &cfg).unwrap();
        assert_relative_eq!(r.value[0], 2.0 / 3.0, max_relative = 1e-10);
        let cfg = QuadratureConfig::simpson();
        let r = integrate_1d(|x| x.sqrt(), 0.0, 1.0, &[0.1], &cfg).unwrap();
        assert_relative_eq!(r.value[0], 2.0 / 3.0, max_relative = 1e-9);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let cfg = QuadratureConfig {
            max_subdivisions: 2,
            ..QuadratureConfig::adaptive()
        };
        let err = integrate_1d(|x| (1.0 / x).sin(), 1e-6, 1.0, &[], &cfg).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { .. }));
    }

    #[test]
    fn tensor_result_is_reproducible() {
        let cfg = QuadratureConfig::default();
        let f = |p: &[f64]| (p[0] * p[1]).exp();
        let a = integrate_box_scalar(f, &[0.0, 0.0], &[1.0, 2.0], &cfg).unwrap();
        let b = integrate_box_scalar(f, &[0.0, 0.0], &[1.0, 2.0], &cfg).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn presets_validate() {
        for name in ["fast", "default", "precise", "simpson", "adaptive"] {
            QuadratureConfig::preset(name).unwrap().validate().unwrap();
        }
        assert!(QuadratureConfig::preset("nope").is_err());
        assert!(QuadratureConfig::default().with_points(1).validate().is_err());
    }
}
