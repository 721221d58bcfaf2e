use std::f64::consts::PI;

use serde::Serialize;

use super::{evaluate_on, profile, weighted_norm, Fields, HajlaszMode, InequalitySpec, MeasureChoice, Quantity};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::{regular_polygon, voxel_ball, BoundaryResolution, Domain};
use crate::hajlasz::{minimal_upper_gradient, LpOptions, Objective};
use crate::measure::RearrangementProfile;
use crate::numerics::pairwise_sum;
use crate::potential::{PointwiseOrder, TrialFunction};
use crate::ri_norms::NormSpec;
use statrs::function::gamma::gamma as gamma_fn;

/// `Γ(1 + n/2)^{1/n} / (n √π)`.
pub fn isoperimetric_constant(n: usize) -> f64 {
    let nf = n as f64;
    gamma_fn(1.0 + nf / 2.0).powf(1.0 / nf) / (nf * PI.sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SharpConstantReport {
    pub n: usize,
    pub radius: f64,
    pub mesh: usize,
    pub constant: f64,
    pub lhs: f64,
    pub gradient_term: f64,
    pub boundary_term: f64,
    pub ratio: Option<f64>,
    /// Ratio with the exact volume and surface of the discrete domain.
    pub ratio_exact_measures: Option<f64>,
    pub degenerate: bool,
}

/// `‖u‖_{L^{n′}} / [C_n (‖∇u‖_{L¹} + ‖u‖_{L¹(∂Ω)})]` on a `mesh`-gon (n = 2)
/// or a voxel ball with `mesh` cells per radius (n = 3).
pub fn sharp_constant_check(n: usize, radius: f64, mesh: usize, u: &TrialFunction, exec: Execution) -> Result<SharpConstantReport> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidInput(format!("radius {radius} must be positive")));
    }
    let (d, h) = match n {
        2 => (regular_polygon(mesh, radius)?, 2.0 * PI * radius / mesh as f64),
        3 => (voxel_ball(mesh, radius)?, radius / mesh as f64),
        _ => return Err(Error::InvalidInput(format!("sharp-constant check supports n ∈ {{2, 3}}, got {n}"))),
    };
    let f = Fields { sample: d.sample_interior(h)?, boundary: d.sample_boundary(BoundaryResolution::PerPatch(1))?, mu: Vec::new() };
    let nf = n as f64;
    let lhs = weighted_norm(&f.interior(Quantity::Value, u, n, exec), &f.sample.weights, &NormSpec::Lebesgue { p: nf / (nf - 1.0) })?;
    let grad = weighted_norm(&f.interior(Quantity::Gradient, u, n, exec), &f.sample.weights, &NormSpec::Lebesgue { p: 1.0 })?;
    let bdry = weighted_norm(&f.trace(u, n, exec), &f.boundary.weights, &NormSpec::Lebesgue { p: 1.0 })?;
    let c = isoperimetric_constant(n);
    let rhs = c * (grad + bdry);
    let (vol, surf) = d.measure();
    let exact = if u.abs_value([0.0; 3], n) > 0.0 && grad == 0.0 {
        let k = u.abs_value([0.0; 3], n);
        Some(k * vol.powf((nf - 1.0) / nf) / (c * k * surf))
    } else {
        None
    };
    Ok(SharpConstantReport {
        n,
        radius,
        mesh,
        constant: c,
        lhs,
        gradient_term: grad,
        boundary_term: bdry,
        ratio: (rhs > 0.0).then(|| lhs / rhs),
        ratio_exact_measures: exact,
        degenerate: lhs == 0.0 && rhs == 0.0,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingPoint {
    pub lambda: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingReport {
    pub theorem: String,
    pub points: Vec<ScalingPoint>,
    /// Predicted exponent `δ` in `ratio(λ) = λ^δ ratio(1)`, when known.
    pub predicted_exponent: Option<f64>,
    /// Largest `|ratio(λ) − ratio(λ₀)| / ratio(λ₀)` against the first λ.
    pub spread: f64,
}

/// Ratios for `u(x/λ)` on `λΩ` with the mesh dilated alongside.
pub fn scaling_test(spec: &InequalitySpec, d: &Domain, u: &TrialFunction, lambdas: &[f64], exec: Execution) -> Result<ScalingReport> {
    if spec.measure != MeasureChoice::Lebesgue || spec.alpha.is_some_and(|a| a != spec.n as f64) {
        return Err(Error::Hypothesis("scaling test needs μ = Lebesgue and α = n".into()));
    }
    if lambdas.is_empty() {
        return Err(Error::InvalidInput("need at least one dilation factor".into()));
    }
    let h = spec.h.unwrap_or(d.diameter() / 32.0);
    let bh = spec.boundary_h.unwrap_or(h);
    let mut points = Vec::new();
    let mut exponents = None;
    for &lambda in lambdas {
        let dl = d.dilate(lambda)?;
        let s = InequalitySpec { h: Some(h * lambda), boundary_h: Some(bh * lambda), ..spec.clone() };
        let r = evaluate_on(&s, &dl, &u.dilate(lambda), exec)?;
        exponents = Some(r.exponents);
        points.push(ScalingPoint { lambda, lhs: r.lhs, rhs: r.rhs, ratio: r.ratio });
    }
    let n = spec.n as f64;
    let predicted_exponent = exponents.and_then(|e| Some(n / e.q? - n / e.q_critical?));
    let base = points[0].ratio;
    let spread = points
        .iter()
        .map(|p| match (p.ratio, base) {
            (Some(a), Some(b)) => (a - b).abs() / b,
            (None, None) => 0.0,
            _ => f64::INFINITY,
        })
        .fold(0.0, f64::max);
    Ok(ScalingReport { theorem: spec.theorem.clone(), points, predicted_exponent, spread })
}

/// `∫₀^x f*(ρ) dρ`.
pub(crate) fn primitive(p: &RearrangementProfile, x: f64) -> f64 {
    let b = p.breakpoints();
    let mut parts = Vec::new();
    for (i, (&v, &w)) in p.values().iter().zip(p.widths()).enumerate() {
        if b[i] >= x {
            break;
        }
        parts.push(v * if b[i + 1] <= x { w } else { x - b[i] });
    }
    pairwise_sum(&parts)
}

/// `∫ₓ^∞ ρ^{−κ} f*(ρ) dρ` for `κ < 1`.
pub(crate) fn tail(p: &RearrangementProfile, x: f64, kappa: f64) -> f64 {
    let b = p.breakpoints();
    let e = 1.0 - kappa;
    let mut parts = Vec::new();
    for (i, &v) in p.values().iter().enumerate() {
        if b[i + 1] <= x || v == 0.0 {
            continue;
        }
        let lo = b[i].max(x);
        parts.push(v * (b[i + 1].powf(e) - lo.powf(e)) / e);
    }
    pairwise_sum(&parts)
}

#[derive(Clone, Debug)]
pub struct RearrangementConfig {
    pub measure: MeasureChoice,
    pub alpha: Option<f64>,
    pub h: f64,
    pub boundary_h: f64,
    /// Evaluation points in `(0, μ(Ω))`; empty selects a geometric grid.
    pub t: Vec<f64>,
    pub hajlasz: HajlaszMode,
    pub exec: Execution,
}

impl RearrangementConfig {
    pub fn new(h: f64) -> Self {
        RearrangementConfig {
            measure: MeasureChoice::Lebesgue,
            alpha: None,
            h,
            boundary_h: h,
            t: Vec::new(),
            hajlasz: HajlaszMode::Quotient,
            exec: Execution::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RearrangementPoint {
    pub t: f64,
    pub lhs: f64,
    pub terms: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RearrangementReport {
    pub order: PointwiseOrder,
    /// Smallest `C` making the estimate hold on the grid with `c = 1`.
    pub c_min: f64,
    pub t_at_max: Option<f64>,
    pub points: Vec<RearrangementPoint>,
    /// Points with `RHS = 0 < LHS`, left out of the maximum.
    pub excluded: usize,
    pub degenerate: usize,
    pub warnings: Vec<String>,
}

/// Check the rearrangement estimate of the given order for `u` on `d`.
pub fn rearrangement_estimate_check(
    order: PointwiseOrder,
    u: &TrialFunction,
    d: &Domain,
    cfg: &RearrangementConfig,
) -> Result<RearrangementReport> {
    u.validate()?;
    let dim = d.dim();
    let n = dim as f64;
    let alpha = cfg.alpha.unwrap_or(n);
    if !(alpha > n - 1.0 && alpha <= n) {
        return Err(Error::Hypothesis(format!("α = {alpha} must lie in (n−1, n]")));
    }
    let second = matches!(order, PointwiseOrder::SecondU | PointwiseOrder::SecondGrad);
    if order == PointwiseOrder::SecondU && dim < 3 {
        return Err(Error::Hypothesis("the second-order estimate for u needs n ≥ 3".into()));
    }
    if second && u.is_vector() {
        return Err(Error::InvalidInput("second-order checks take a scalar function".into()));
    }
    let exec = cfg.exec;
    let f = Fields::new(d, &cfg.measure, cfg.h, cfg.boundary_h)?;
    let (lhs_q, dens_q) = match order {
        PointwiseOrder::First => (Quantity::Value, Quantity::Gradient),
        PointwiseOrder::Symmetric => (Quantity::Value, Quantity::SymmetricGradient),
        PointwiseOrder::SecondU => (Quantity::Value, Quantity::Hessian),
        PointwiseOrder::SecondGrad => (Quantity::Gradient, Quantity::Hessian),
    };
    let lhs_p = profile(&f.interior(lhs_q, u, dim, exec), &f.mu)?;
    let dens_p = profile(&f.interior(dens_q, u, dim, exec), &f.sample.weights)?;
    let trace_p = profile(&f.trace(u, dim, exec), &f.boundary.weights)?;
    let g_p = if second {
        let g = match cfg.hajlasz {
            HajlaszMode::Quotient => f.quotient_gradient(u, exec)?,
            HajlaszMode::Lp => {
                minimal_upper_gradient(&f.boundary_trace(u, exec)?, Objective::Integral, &LpOptions { exec, ..LpOptions::default() })?.g
            }
        };
        Some(profile(&g, &f.boundary.weights)?)
    } else {
        None
    };
    let mass = lhs_p.domain_length();
    let grid: Vec<f64> = if cfg.t.is_empty() { (1..=48).map(|k| mass * 2f64.powf(-k as f64 / 4.0)).collect() } else { cfg.t.clone() };
    let mut report =
        RearrangementReport { order, c_min: 0.0, t_at_max: None, points: Vec::new(), excluded: 0, degenerate: 0, warnings: Vec::new() };
    for &t in &grid {
        if !(t > 0.0 && t < mass) {
            return Err(Error::InvalidInput(format!("t = {t} must lie in (0, μ(Ω)) = (0, {mass})")));
        }
        let lhs = lhs_p.eval(t)?;
        let tn = t.powf(n / alpha);
        let tb = t.powf((n - 1.0) / alpha);
        let w1 = t.powf(-(n - 1.0) / alpha);
        let terms = match order {
            PointwiseOrder::SecondU => {
                let g = g_p.as_ref().expect("boundary gradient");
                let w2 = t.powf(-(n - 2.0) / alpha);
                vec![
                    w2 * primitive(&dens_p, tn),
                    tail(&dens_p, tn, (n - 2.0) / n),
                    w2 * primitive(g, tb),
                    tail(g, tb, (n - 2.0) / (n - 1.0)),
                    w1 * primitive(&trace_p, tb),
                ]
            }
            _ => {
                let bdry = if order == PointwiseOrder::SecondGrad { g_p.as_ref().expect("boundary gradient") } else { &trace_p };
                vec![w1 * primitive(&dens_p, tn), tail(&dens_p, tn, (n - 1.0) / n), w1 * primitive(bdry, tb)]
            }
        };
        let rhs = pairwise_sum(&terms);
        if rhs <= 0.0 {
            if lhs > 0.0 {
                report.excluded += 1;
            } else {
                report.degenerate += 1;
            }
        } else if lhs / rhs > report.c_min || report.t_at_max.is_none() {
            report.c_min = lhs / rhs;
            report.t_at_max = Some(t);
        }
        report.points.push(RearrangementPoint { t, lhs, terms });
    }
    if report.excluded > 0 {
        report.warnings.push(format!("{} points with vanishing right-hand side left out", report.excluded));
    }
    Ok(report)
}
