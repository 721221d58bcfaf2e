//! Riesz potentials, boundary-visibility integrals and empirical checks of
//! the pointwise estimates.

mod trial;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::{BoundaryResolution, BoundarySample, Domain, InteriorSample, Point};
use crate::hajlasz::{lipschitz_quotient_gradient_with, BoundaryTrace};

pub use trial::{default_corpus, parse_trial, vector_corpus, Jet, Mat3, Scalar, TrialFunction};

/// Exact integral of `|z|^{-β}` over the ball with the volume of one cell.
pub fn self_cell_integral(dim: usize, h: f64, beta: f64) -> f64 {
    match dim {
        2 => {
            let r = h / PI.sqrt();
            2.0 * PI * r.powf(2.0 - beta) / (2.0 - beta)
        }
        _ => {
            let r = h * (3.0 / (4.0 * PI)).cbrt();
            4.0 * PI * r.powf(3.0 - beta) / (3.0 - beta)
        }
    }
}

/// `∫ ρ(y) |x − y|^{-β} dy` at each evaluation point.
pub fn riesz_potential(sample: &InteriorSample, density: &[f64], beta: f64, eval: &[Point], exec: Execution) -> Result<Vec<f64>> {
    let dim = sample.dim;
    if density.len() != sample.len() {
        return Err(Error::InvalidInput(format!("{} density values for {} nodes", density.len(), sample.len())));
    }
    if !(0.0..dim as f64).contains(&beta) {
        return Err(Error::InvalidInput(format!("kernel exponent {beta} must lie in [0, {dim})")));
    }
    if let Some((index, &value)) = density.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFinite { index, value });
    }
    let half = 0.5 * sample.h;
    let own = self_cell_integral(dim, sample.h, beta);
    Ok(exec.map(eval, |x| {
        let mut acc = 0.0;
        for ((y, w), rho) in sample.nodes.iter().zip(&sample.weights).zip(density) {
            if *rho == 0.0 {
                continue;
            }
            let mut r2 = 0.0;
            let mut inf: f64 = 0.0;
            for d in 0..dim {
                let t = x[d] - y[d];
                r2 += t * t;
                inf = inf.max(t.abs());
            }
            if inf < half {
                acc += rho * own;
            } else {
                acc += rho * w * r2.powf(-0.5 * beta);
            }
        }
        acc
    }))
}

/// Uniform angles in 2-D, a Fibonacci sphere in 3-D.
pub fn directions(dim: usize, m: usize) -> Vec<Point> {
    if dim == 2 {
        return (0..m)
            .map(|k| {
                let t = 2.0 * PI * (k as f64 + 0.5) / m as f64;
                [t.cos(), t.sin(), 0.0]
            })
            .collect();
    }
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..m)
        .map(|k| {
            let z = 1.0 - 2.0 * (k as f64 + 0.5) / m as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let t = golden * k as f64;
            [r * t.cos(), r * t.sin(), z]
        })
        .collect()
}

fn sphere_area(dim: usize) -> f64 {
    if dim == 2 {
        2.0 * PI
    } else {
        4.0 * PI
    }
}

fn visibility_with(d: &Domain, bs: &BoundarySample, phi: &[f64], x: Point, dirs: &[Point]) -> Result<f64> {
    let mut acc = 0.0;
    for th in dirs {
        if let Some(hit) = d.ray_first_hit(x, *th)? {
            acc += phi[bs.lookup(&hit)].abs();
        }
    }
    Ok(acc * sphere_area(d.dim()) / dirs.len() as f64)
}

fn check_trace(bs: &BoundarySample, phi: &[f64]) -> Result<()> {
    if phi.len() != bs.len() {
        return Err(Error::InvalidInput(format!("{} trace values for {} boundary samples", phi.len(), bs.len())));
    }
    if let Some((index, &value)) = phi.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFinite { index, value });
    }
    Ok(())
}

/// `∫_{S^{n−1}} |φ(ζ(x, θ))| dθ`, rays that miss the boundary counting as 0.
pub fn visibility_integral(d: &Domain, bs: &BoundarySample, phi: &[f64], x: Point, m: usize) -> Result<f64> {
    check_trace(bs, phi)?;
    if m == 0 {
        return Err(Error::InvalidInput("need at least one direction".into()));
    }
    visibility_with(d, bs, phi, x, &directions(d.dim(), m))
}

pub fn visibility_many(d: &Domain, bs: &BoundarySample, phi: &[f64], xs: &[Point], m: usize, exec: Execution) -> Result<Vec<f64>> {
    check_trace(bs, phi)?;
    if m == 0 {
        return Err(Error::InvalidInput("need at least one direction".into()));
    }
    let dirs = directions(d.dim(), m);
    exec.map(xs, |x| visibility_with(d, bs, phi, *x, &dirs)).into_iter().collect()
}

/// Default node × direction budget of [`second_order_mixed`].
pub const MIXED_BUDGET: usize = 50_000_000;

/// `∫_Ω ∫_{S^{n−1}} g(ζ(y, θ)) |x − y|^{1−n} dθ dy` for a 3-D domain, computed
/// as the Riesz potential of the visibility field.
#[allow(clippy::too_many_arguments)]
pub fn second_order_mixed(
    d: &Domain,
    bs: &BoundarySample,
    g: &[f64],
    interior: &InteriorSample,
    eval: &[Point],
    m: usize,
    budget: usize,
    exec: Execution,
) -> Result<Vec<f64>> {
    if d.dim() != 3 {
        return Err(Error::Hypothesis("the mixed second-order term needs n ≥ 3".into()));
    }
    let cost = interior.len().saturating_mul(m);
    if cost > budget {
        return Err(Error::Budget(format!("{} nodes × {m} directions exceeds {budget}", interior.len())));
    }
    let v = visibility_many(d, bs, g, &interior.nodes, m, exec)?;
    riesz_potential(interior, &v, 2.0, eval, exec)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointwiseOrder {
    First,
    SecondU,
    SecondGrad,
    Symmetric,
}

impl FromStr for PointwiseOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "first" => PointwiseOrder::First,
            "second-u" => PointwiseOrder::SecondU,
            "second-grad" => PointwiseOrder::SecondGrad,
            "symmetric" => PointwiseOrder::Symmetric,
            _ => return Err(Error::Parse(format!("unknown order `{s}` (first, second-u, second-grad, symmetric)"))),
        })
    }
}

impl fmt::Display for PointwiseOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PointwiseOrder::First => "first",
            PointwiseOrder::SecondU => "second-u",
            PointwiseOrder::SecondGrad => "second-grad",
            PointwiseOrder::Symmetric => "symmetric",
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct PointwiseConfig {
    /// Interior cell side; boundary samples use the same spacing.
    pub h: f64,
    pub directions: usize,
    /// Evaluation nodes are thinned to at most this many.
    pub max_eval: usize,
    pub mixed_budget: usize,
    pub exec: Execution,
}

impl PointwiseConfig {
    pub fn new(h: f64, directions: usize) -> Self {
        PointwiseConfig { h, directions, max_eval: 48, mixed_budget: MIXED_BUDGET, exec: Execution::default() }
    }

    /// Both resolutions refined by `factor`.
    pub fn refined(&self, factor: usize) -> Self {
        PointwiseConfig { h: self.h / factor as f64, directions: self.directions * factor, ..*self }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PointwiseReport {
    pub order: PointwiseOrder,
    pub function: String,
    /// Largest observed `LHS / RHS`.
    pub c_emp: f64,
    pub argmax: Option<Point>,
    pub lhs_at_max: f64,
    /// Right-hand terms (unit constant) at the maximiser.
    pub rhs_terms_at_max: Vec<f64>,
    pub evaluated: usize,
    pub skipped_near_boundary: usize,
    /// Points where both sides vanish.
    pub degenerate: usize,
    /// Points where `RHS = 0 < LHS`.
    pub violations: usize,
    pub h: f64,
    pub directions: usize,
}

fn eval_points(d: &Domain, sample: &InteriorSample, h: f64, max_eval: usize) -> (Vec<Point>, usize) {
    let keep: Vec<Point> = sample.nodes.iter().copied().filter(|p| d.distance_to_boundary(*p) >= h).collect();
    let skipped = sample.len() - keep.len();
    if keep.len() <= max_eval || max_eval == 0 {
        return (keep, skipped);
    }
    let stride = keep.len().div_ceil(max_eval);
    (keep.into_iter().step_by(stride).collect(), skipped)
}

/// Empirical constant of one pointwise estimate for `u` on `d`.
pub fn check_pointwise(order: PointwiseOrder, u: &TrialFunction, d: &Domain, cfg: &PointwiseConfig) -> Result<PointwiseReport> {
    u.validate()?;
    if cfg.directions == 0 {
        return Err(Error::InvalidInput("need at least one direction".into()));
    }
    let dim = d.dim();
    let n = dim as f64;
    match order {
        PointwiseOrder::SecondU if dim < 3 => return Err(Error::Hypothesis("the second-order estimate for u needs n ≥ 3".into())),
        PointwiseOrder::SecondU | PointwiseOrder::SecondGrad if u.is_vector() => {
            return Err(Error::InvalidInput("second-order checks take a scalar function".into()))
        }
        _ => {}
    }
    let exec = cfg.exec;
    let sample = d.sample_interior(cfg.h)?;
    let bs = d.sample_boundary(BoundaryResolution::Spacing(cfg.h))?;
    let (eval, skipped) = eval_points(d, &sample, cfg.h, cfg.max_eval);
    if eval.is_empty() {
        return Err(Error::InvalidInput(format!("spacing {} leaves no evaluation node one cell away from the boundary", cfg.h)));
    }

    let trace: Vec<f64> = exec.map(&bs.points, |p| u.abs_value(*p, dim));
    let hajlasz = || -> Result<Vec<f64>> {
        let raw: Vec<f64> = exec.map(&bs.points, |p| u.jet(*p).value[0]);
        lipschitz_quotient_gradient_with(&BoundaryTrace::from_sample(&bs, raw)?, exec)
    };
    let (lhs, terms): (Vec<f64>, Vec<Vec<f64>>) = match order {
        PointwiseOrder::First | PointwiseOrder::Symmetric => {
            let density: Vec<f64> = if order == PointwiseOrder::First {
                exec.map(&sample.nodes, |y| u.grad_norm(*y, dim))
            } else {
                exec.map(&sample.nodes, |y| u.sym_grad_norm(*y, dim))
            };
            let lhs = exec.map(&eval, |x| u.abs_value(*x, dim));
            let riesz = riesz_potential(&sample, &density, n - 1.0, &eval, exec)?;
            let vis = visibility_many(d, &bs, &trace, &eval, cfg.directions, exec)?;
            (lhs, vec![riesz, vis])
        }
        PointwiseOrder::SecondU => {
            let density = exec.map(&sample.nodes, |y| u.hess_norm(*y, dim));
            let g = hajlasz()?;
            let lhs = exec.map(&eval, |x| u.abs_value(*x, dim));
            let riesz = riesz_potential(&sample, &density, n - 2.0, &eval, exec)?;
            let mixed = second_order_mixed(d, &bs, &g, &sample, &eval, cfg.directions, cfg.mixed_budget, exec)?;
            let vis = visibility_many(d, &bs, &trace, &eval, cfg.directions, exec)?;
            (lhs, vec![riesz, mixed, vis])
        }
        PointwiseOrder::SecondGrad => {
            let density = exec.map(&sample.nodes, |y| u.hess_norm(*y, dim));
            let g = hajlasz()?;
            let lhs = exec.map(&eval, |x| u.grad_norm(*x, dim));
            let riesz = riesz_potential(&sample, &density, n - 1.0, &eval, exec)?;
            let vis = visibility_many(d, &bs, &g, &eval, cfg.directions, exec)?;
            (lhs, vec![riesz, vis])
        }
    };

    let mut report = PointwiseReport {
        order,
        function: u.to_string(),
        c_emp: 0.0,
        argmax: None,
        lhs_at_max: 0.0,
        rhs_terms_at_max: vec![0.0; terms.len()],
        evaluated: eval.len(),
        skipped_near_boundary: skipped,
        degenerate: 0,
        violations: 0,
        h: cfg.h,
        directions: cfg.directions,
    };
    for (i, x) in eval.iter().enumerate() {
        let rhs: f64 = terms.iter().map(|t| t[i]).sum();
        if rhs <= 0.0 {
            if lhs[i] > 0.0 {
                report.violations += 1;
            } else {
                report.degenerate += 1;
            }
            continue;
        }
        let ratio = lhs[i] / rhs;
        if report.argmax.is_none() || ratio > report.c_emp {
            report.c_emp = ratio;
            report.argmax = Some(*x);
            report.lhs_at_max = lhs[i];
            report.rhs_terms_at_max = terms.iter().map(|t| t[i]).collect();
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{regular_polygon, unit_square, voxel_ball};

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn riesz_disk_center() {
        let d = regular_polygon(512, 1.0).unwrap();
        let s = d.sample_interior(0.01).unwrap();
        let v = riesz_potential(&s, &vec![1.0; s.len()], 1.0, &[[0.0; 3]], Execution::Sequential).unwrap();
        assert!(rel(v[0], 2.0 * PI) < 0.01, "{}", v[0]);
        let z = riesz_potential(&s, &vec![0.0; s.len()], 1.0, &[[0.0; 3]], Execution::Sequential).unwrap();
        assert_eq!(z[0], 0.0);
    }

    #[test]
    fn riesz_ball_center() {
        let d = voxel_ball(24, 1.0).unwrap();
        let s = d.sample_interior(1.0 / 24.0).unwrap();
        let v = riesz_potential(&s, &vec![1.0; s.len()], 2.0, &[[0.0; 3]], Execution::Parallel).unwrap();
        assert!(rel(v[0], 4.0 * PI) < 0.02, "{}", v[0]);
    }

    #[test]
    fn riesz_rejects_bad_exponent() {
        let s = unit_square().sample_interior(0.1).unwrap();
        assert!(riesz_potential(&s, &vec![1.0; s.len()], 2.0, &[[0.5; 3]], Execution::Sequential).is_err());
    }

    #[test]
    fn visibility_examples() {
        let d = unit_square();
        let bs = d.sample_boundary(BoundaryResolution::PerPatch(16)).unwrap();
        let c = vec![3.0; bs.len()];
        let v = visibility_integral(&d, &bs, &c, [0.3, 0.6, 0.0], 256).unwrap();
        assert!((v - 6.0 * PI).abs() < 1e-9);
        let right: Vec<f64> = bs.points.iter().map(|p| if (p[0] - 1.0).abs() < 1e-12 { 1.0 } else { 0.0 }).collect();
        let m = 256;
        let v = visibility_integral(&d, &bs, &right, [0.5, 0.5, 0.0], m).unwrap();
        assert!((v - PI / 2.0).abs() <= 2.0 * PI / m as f64, "{v}");
    }

    #[test]
    fn mixed_term_on_ball() {
        let d = voxel_ball(12, 1.0).unwrap();
        let bs = d.sample_boundary(BoundaryResolution::PerPatch(1)).unwrap();
        let s = d.sample_interior(1.0 / 12.0).unwrap();
        let ones = vec![1.0; bs.len()];
        let got = second_order_mixed(&d, &bs, &ones, &s, &[[0.0; 3]], 64, MIXED_BUDGET, Execution::Parallel).unwrap()[0];
        let riesz = riesz_potential(&s, &vec![4.0 * PI; s.len()], 2.0, &[[0.0; 3]], Execution::Parallel).unwrap()[0];
        assert!(rel(got, riesz) < 1e-9, "{got} {riesz}");
        assert!(rel(got, 16.0 * PI * PI) < 0.05);
        let zero = second_order_mixed(&d, &bs, &vec![0.0; bs.len()], &s, &[[0.0; 3]], 64, MIXED_BUDGET, Execution::Parallel).unwrap();
        assert_eq!(zero[0], 0.0);
        assert!(matches!(second_order_mixed(&d, &bs, &ones, &s, &[[0.0; 3]], 64, 10, Execution::Parallel), Err(Error::Budget(_))));
        let sq = unit_square();
        let sb = sq.sample_boundary(BoundaryResolution::PerPatch(4)).unwrap();
        let ss = sq.sample_interior(0.25).unwrap();
        assert!(second_order_mixed(&sq, &sb, &vec![1.0; sb.len()], &ss, &[[0.5; 3]], 8, MIXED_BUDGET, Execution::Sequential).is_err());
    }

    #[test]
    fn constant_gives_inverse_circumference() {
        let d = unit_square();
        let r = check_pointwise(PointwiseOrder::First, &TrialFunction::constant(2.0), &d, &PointwiseConfig::new(1.0 / 16.0, 64)).unwrap();
        assert!((r.c_emp - 1.0 / (2.0 * PI)).abs() < 1e-9, "{}", r.c_emp);
        let z = check_pointwise(PointwiseOrder::First, &TrialFunction::constant(0.0), &d, &PointwiseConfig::new(1.0 / 16.0, 64)).unwrap();
        assert_eq!(z.degenerate, z.evaluated);
        assert_eq!(z.violations, 0);
    }

    #[test]
    fn skew_field_symmetric_check() {
        let d = unit_square();
        let u = parse_trial("skew:1,2,0.7").unwrap();
        let r = check_pointwise(PointwiseOrder::Symmetric, &u, &d, &PointwiseConfig::new(1.0 / 16.0, 64)).unwrap();
        assert_eq!(r.rhs_terms_at_max[0], 0.0);
        assert!(r.c_emp.is_finite() && r.c_emp > 0.0);
    }

    #[test]
    fn second_u_needs_three_dimensions() {
        let e = check_pointwise(PointwiseOrder::SecondU, &TrialFunction::constant(1.0), &unit_square(), &PointwiseConfig::new(0.1, 16));
        assert!(matches!(e, Err(Error::Hypothesis(_))));
    }

    #[test]
    fn second_order_checks_run() {
        let d = voxel_ball(8, 1.0).unwrap();
        let u = parse_trial("bump:1.5,0.1,0,0").unwrap();
        let r = check_pointwise(PointwiseOrder::SecondU, &u, &d, &PointwiseConfig::new(0.25, 32)).unwrap();
        assert!(r.c_emp.is_finite() && r.c_emp > 0.0 && r.violations == 0);
        let g = check_pointwise(PointwiseOrder::SecondGrad, &u, &unit_square(), &PointwiseConfig::new(1.0 / 16.0, 64)).unwrap();
        assert!(g.c_emp.is_finite() && g.c_emp > 0.0);
    }
}
