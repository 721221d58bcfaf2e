//! Full inequalities: left-hand sides, coefficient formulas, right-hand
//! terms, and the studies and reports built on them.

mod corpus;
mod studies;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::{load_domain, BoundaryResolution, BoundarySample, Domain, InteriorSample};
use crate::hajlasz::{lipschitz_quotient_gradient_with, seminorm, BoundaryTrace, LpOptions};
use crate::hardy::admissibility::{admissibility, Admissibility, ExponentParams};
use crate::measure::{rearrange, RearrangementProfile, SampledFunction, SampledMeasureSpace};
use crate::potential::TrialFunction;
use crate::ri_norms::{norm_eval, NormSpec};

pub use corpus::{
    corpus_run, default_specs, resolve_domain, write_reports_csv, CaseError, CorpusCase, CorpusConfig, CorpusReport, FunctionSource,
    Summary, DEFAULT_DOMAINS, DEFAULT_SPATIAL_DOMAINS,
};
pub use studies::{
    isoperimetric_constant, rearrangement_estimate_check, scaling_test, sharp_constant_check, RearrangementConfig, RearrangementPoint,
    RearrangementReport, ScalingPoint, ScalingReport, SharpConstantReport,
};

/// Measure `μ` on `Ω` for the left-hand side.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureChoice {
    #[default]
    Lebesgue,
    /// Density `1/δ` on the points within distance `δ` of `∂Ω`.
    BoundaryLayer { delta: f64 },
    /// Density `1/width` on the slab `|x_axis − at| < width/2`.
    Slice { axis: usize, at: f64, width: f64 },
}

impl fmt::Display for MeasureChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureChoice::Lebesgue => write!(f, "lebesgue"),
            MeasureChoice::BoundaryLayer { delta } => write!(f, "boundary-layer(δ={delta})"),
            MeasureChoice::Slice { axis, at, width } => write!(f, "slice(axis={axis}, at={at}, width={width})"),
        }
    }
}

impl MeasureChoice {
    /// Node weights of `μ`.
    pub fn weights(&self, d: &Domain, s: &InteriorSample) -> Result<Vec<f64>> {
        let w: Vec<f64> = match *self {
            MeasureChoice::Lebesgue => s.weights.clone(),
            MeasureChoice::BoundaryLayer { delta } => {
                if !(delta > 0.0 && delta.is_finite()) {
                    return Err(Error::InvalidInput(format!("layer width δ = {delta} must be positive")));
                }
                s.nodes.iter().zip(&s.weights).map(|(p, w)| if d.distance_to_boundary(*p) < delta { w / delta } else { 0.0 }).collect()
            }
            MeasureChoice::Slice { axis, at, width } => {
                if axis >= d.dim() || !(width > 0.0 && width.is_finite()) || !at.is_finite() {
                    return Err(Error::InvalidInput(format!("slice needs axis < {} and positive width", d.dim())));
                }
                s.nodes.iter().zip(&s.weights).map(|(p, w)| if (p[axis] - at).abs() < 0.5 * width { w / width } else { 0.0 }).collect()
            }
        };
        if !w.iter().any(|x| *x > 0.0) {
            return Err(Error::InvalidInput(format!("measure {self} has no mass at this resolution")));
        }
        Ok(w)
    }
}

/// How Hajłasz gradients of boundary traces are produced.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HajlaszMode {
    /// Lipschitz-quotient gradient.
    #[default]
    Quotient,
    /// Linear-programming minimiser, best of the sup and integral objectives.
    Lp,
}

/// One inequality with its parameters, measure and mesh.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InequalitySpec {
    pub theorem: String,
    pub n: usize,
    pub alpha: Option<f64>,
    pub p: Option<f64>,
    /// Overrides the critical `q` on the left-hand side only.
    pub q: Option<f64>,
    pub r: Option<f64>,
    pub s: Option<f64>,
    pub sigma: Option<f64>,
    pub varrho: Option<f64>,
    pub upsilon: Option<f64>,
    pub eta: Option<f64>,
    pub theta: Option<f64>,
    pub varsigma: Option<f64>,
    /// Overrides the critical `γ` on the left-hand side only.
    pub gamma: Option<f64>,
    pub beta: Option<f64>,
    #[serde(default)]
    pub measure: MeasureChoice,
    /// Builtin name (`builtin:square`) or domain file.
    pub domain: Option<String>,
    /// Interior spacing; defaults to `diam/32`.
    pub h: Option<f64>,
    /// Boundary spacing; defaults to `h`.
    pub boundary_h: Option<f64>,
    #[serde(default)]
    pub hajlasz: HajlaszMode,
}

impl InequalitySpec {
    pub fn new(theorem: &str, n: usize) -> Self {
        InequalitySpec {
            theorem: theorem.to_string(),
            n,
            alpha: None,
            p: None,
            q: None,
            r: None,
            s: None,
            sigma: None,
            varrho: None,
            upsilon: None,
            eta: None,
            theta: None,
            varsigma: None,
            gamma: None,
            beta: None,
            measure: MeasureChoice::Lebesgue,
            domain: None,
            h: None,
            boundary_h: None,
            hajlasz: HajlaszMode::Quotient,
        }
    }

    /// Parse TOML text.
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.message().to_string()))
    }

    pub fn params(&self) -> ExponentParams {
        ExponentParams {
            n: self.n,
            alpha: self.alpha,
            p: self.p,
            q: self.q,
            r: self.r,
            s: self.s,
            sigma: self.sigma,
            varrho: self.varrho,
            upsilon: self.upsilon,
            eta: self.eta,
            theta: self.theta,
            varsigma: self.varsigma,
            gamma: self.gamma,
            beta: self.beta,
        }
    }

    pub fn admissibility(&self) -> Result<Admissibility> {
        admissibility(&self.theorem, &self.params())
    }
}

/// What a norm is taken of.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Value,
    Gradient,
    Hessian,
    SymmetricGradient,
    Trace,
    HajlaszGradient,
}

impl Quantity {
    pub fn on_boundary(self) -> bool {
        matches!(self, Quantity::Trace | Quantity::HajlaszGradient)
    }
}

/// Which entry of `max{·, ·}` attains in a coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxBranch {
    /// Plain power, no maximum.
    None,
    Measure,
    Geometric,
    Tie,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Multiplier {
    pub value: f64,
    pub base: f64,
    pub exponent: f64,
    pub attained_by: MaxBranch,
}

impl Multiplier {
    pub fn one() -> Self {
        Multiplier { value: 1.0, base: 1.0, exponent: 0.0, attained_by: MaxBranch::None }
    }

    fn power(base: f64, exponent: f64) -> Self {
        Multiplier { value: base.powf(exponent), base, exponent, attained_by: MaxBranch::None }
    }

    fn max_power(measure: f64, geometric: f64, exponent: f64) -> Self {
        let attained_by = if measure > geometric {
            MaxBranch::Measure
        } else if geometric > measure {
            MaxBranch::Geometric
        } else {
            MaxBranch::Tie
        };
        let base = measure.max(geometric);
        Multiplier { value: base.powf(exponent), base, exponent, attained_by }
    }
}

/// `(volume, surface, μ(Ω))` of a configuration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Masses {
    pub volume: f64,
    pub surface: f64,
    pub mu: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TermPlan {
    pub quantity: Quantity,
    pub norm: NormSpec,
    pub multiplier: Multiplier,
}

/// Exponents actually used on the left-hand side.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct UsedExponents {
    pub q: Option<f64>,
    pub q_critical: Option<f64>,
    pub gamma: Option<f64>,
    pub gamma_critical: Option<f64>,
    pub eta: Option<f64>,
    pub theta: Option<f64>,
}

/// Left-hand side and right-hand terms of one inequality.
#[derive(Clone, Debug, PartialEq)]
pub struct Plan {
    pub lhs: Quantity,
    pub lhs_norm: NormSpec,
    /// `false` when the left-hand norm is `L^∞(Ω)` with Lebesgue measure.
    pub lhs_uses_mu: bool,
    pub terms: Vec<TermPlan>,
    pub exponents: UsedExponents,
    pub notes: Vec<String>,
}

const NOTE_FRIED4: &str = "third term read with a plain `+` (stray `r` in the printed display)";
const NOTE_FRIED8: &str = "boundary coefficient uses max{μ(Ω)^{n/α}, H^{n−1}(∂Ω)} as printed";
const NOTE_BW: &str = "boundary norm L^{∞,ϱ;ς} evaluated over ∂Ω";

fn need(name: &str, v: Option<f64>) -> Result<f64> {
    v.ok_or_else(|| Error::Hypothesis(format!("parameter {name} is required")))
}

fn lorentz(p: f64, sigma: f64) -> NormSpec {
    if p == sigma {
        NormSpec::Lebesgue { p }
    } else {
        NormSpec::Lorentz { p, sigma }
    }
}

/// Assemble the inequality `theorem` for the given masses.
pub fn plan(theorem: &str, pr: &ExponentParams, m: Masses) -> Result<Plan> {
    let adm = admissibility(theorem, pr)?;
    let n = pr.n as f64;
    let a = pr.alpha();
    let vol = |e: f64| Multiplier::max_power(m.mu.powf(n / a), m.volume, e);
    let surf = |e: f64| Multiplier::max_power(m.mu.powf((n - 1.0) / a), m.surface, e);
    let term = |quantity, norm, multiplier| TermPlan { quantity, norm, multiplier };
    let one = Multiplier::one();
    let mut ex = UsedExponents::default();
    let mut notes = Vec::new();
    let q_crit = adm.q.as_ref().map(|c| c.value);
    if let Some(q) = q_crit {
        ex.q_critical = Some(q);
        ex.q = Some(pr.q.unwrap_or(q));
    }
    if let Some(g) = adm.gamma.as_ref().map(|c| c.value) {
        ex.gamma_critical = Some(g);
        ex.gamma = Some(pr.gamma.unwrap_or(g));
    }
    let exp_lhs = || NormSpec::OrliczExp { gamma: ex.gamma.unwrap_or(1.0), mass: Some(m.mu) };
    let exp_bdry = |b: f64| NormSpec::OrliczExp { gamma: b, mass: Some(m.surface) };
    let linf = NormSpec::LInf;

    let (lhs, lhs_norm, lhs_uses_mu, terms) = match theorem {
        "fried1" | "friedsymm.1" | "mainlor" => {
            let q = q_crit.expect("critical q");
            let p = need("p", pr.p)?;
            let r = need("r", pr.r)?;
            let (gnorm, tnorm, lnorm) = if theorem == "mainlor" {
                let eta = pr.eta.or(adm.eta_min).expect("η");
                ex.eta = Some(eta);
                (lorentz(p, need("σ", pr.sigma)?), lorentz(r, need("ϱ", pr.varrho)?), lorentz(ex.q.unwrap(), eta))
            } else {
                (NormSpec::Lebesgue { p }, NormSpec::Lebesgue { p: r }, NormSpec::Lebesgue { p: ex.q.unwrap() })
            };
            let grad = if theorem == "friedsymm.1" { Quantity::SymmetricGradient } else { Quantity::Gradient };
            let terms = vec![
                term(grad, gnorm, vol(a / (q * n) - (n - p) / (p * n))),
                term(Quantity::Trace, tnorm, surf(a / (q * (n - 1.0)) - 1.0 / r)),
            ];
            (Quantity::Value, lnorm, true, terms)
        }
        "fried3" | "friedsymm.3" => {
            let grad = if theorem == "friedsymm.3" { Quantity::SymmetricGradient } else { Quantity::Gradient };
            let terms = vec![term(grad, NormSpec::Lebesgue { p: n }, one), term(Quantity::Trace, exp_bdry(need("β", pr.beta)?), one)];
            (Quantity::Value, exp_lhs(), true, terms)
        }
        "infdisp" | "infsymm" | "inflor" => {
            let p = need("p", pr.p)?;
            let grad = if theorem == "infsymm" { Quantity::SymmetricGradient } else { Quantity::Gradient };
            let gnorm = if theorem == "inflor" { lorentz(p, pr.sigma.unwrap_or(1.0)) } else { NormSpec::Lebesgue { p } };
            let terms = vec![term(grad, gnorm, Multiplier::power(m.volume, 1.0 / n - 1.0 / p)), term(Quantity::Trace, linf, one)];
            (Quantity::Value, linf, false, terms)
        }
        "BWlor" | "BW2" => {
            let eta = pr.eta.or(adm.eta_min).expect("η");
            let theta = pr.theta.or(adm.theta_max).expect("ϑ");
            ex.eta = Some(eta);
            ex.theta = Some(theta);
            notes.push(NOTE_BW.to_string());
            let sigma = need("σ", pr.sigma)?;
            let tnorm = NormSpec::LorentzZygmund {
                p: f64::INFINITY,
                sigma: need("ϱ", pr.varrho)?,
                theta: need("ς", pr.varsigma)?,
                mass: Some(m.surface),
            };
            let mut terms = Vec::new();
            if theorem == "BWlor" {
                terms.push(term(Quantity::Gradient, lorentz(n, sigma), one));
            } else {
                terms.push(term(Quantity::Hessian, lorentz(n / 2.0, sigma), one));
                terms.push(term(Quantity::HajlaszGradient, lorentz(n - 1.0, need("υ", pr.upsilon)?), one));
            }
            terms.push(term(Quantity::Trace, tnorm, one));
            let lnorm = NormSpec::LorentzZygmund { p: f64::INFINITY, sigma: eta, theta, mass: Some(m.mu) };
            (Quantity::Value, lnorm, true, terms)
        }
        "fried4" | "L2" => {
            let q = q_crit.expect("critical q");
            let p = need("p", pr.p)?;
            let s = need("s", pr.s)?;
            let r = need("r", pr.r)?;
            let (hn, gn, tn, ln) = if theorem == "L2" {
                let eta = pr.eta.or(adm.eta_min).expect("η");
                ex.eta = Some(eta);
                (
                    lorentz(p, need("σ", pr.sigma)?),
                    lorentz(s, need("υ", pr.upsilon)?),
                    lorentz(r, need("ϱ", pr.varrho)?),
                    lorentz(ex.q.unwrap(), eta),
                )
            } else {
                notes.push(NOTE_FRIED4.to_string());
                (
                    NormSpec::Lebesgue { p },
                    NormSpec::Lebesgue { p: s },
                    NormSpec::Lebesgue { p: r },
                    NormSpec::Lebesgue { p: ex.q.unwrap() },
                )
            };
            let terms = vec![
                term(Quantity::Hessian, hn, vol(a / (q * n) - (n - 2.0 * p) / (p * n))),
                term(Quantity::HajlaszGradient, gn, surf(a / (q * (n - 1.0)) - (n - 1.0 - s) / (s * (n - 1.0)))),
                term(Quantity::Trace, tn, surf(a / (q * (n - 1.0)) - 1.0 / r)),
            ];
            (Quantity::Value, ln, true, terms)
        }
        "fried5" | "fried6" => {
            let s = if theorem == "fried6" { n - 1.0 } else { need("s", pr.s)? };
            let terms = vec![
                term(Quantity::Hessian, NormSpec::Lebesgue { p: n / 2.0 }, one),
                term(Quantity::HajlaszGradient, NormSpec::Lebesgue { p: s }, one),
                term(Quantity::Trace, exp_bdry(need("β", pr.beta)?), one),
            ];
            (Quantity::Value, exp_lhs(), true, terms)
        }
        "fried7" | "infL2" => {
            let p = need("p", pr.p)?;
            let s = need("s", pr.s)?;
            let (hn, gn) = if theorem == "infL2" {
                (lorentz(p, pr.sigma.unwrap_or(1.0)), lorentz(s, pr.upsilon.unwrap_or(1.0)))
            } else {
                (NormSpec::Lebesgue { p }, NormSpec::Lebesgue { p: s })
            };
            let terms = vec![
                term(Quantity::Hessian, hn, Multiplier::power(m.volume, 2.0 / n - 1.0 / p)),
                term(Quantity::HajlaszGradient, gn, Multiplier::power(m.surface, 1.0 / (n - 1.0) - 1.0 / s)),
                term(Quantity::Trace, linf, one),
            ];
            (Quantity::Value, linf, false, terms)
        }
        "fried8" => {
            let q = q_crit.expect("critical q");
            let p = need("p", pr.p)?;
            let r = need("r", pr.r)?;
            notes.push(NOTE_FRIED8.to_string());
            let terms = vec![
                term(Quantity::Hessian, NormSpec::Lebesgue { p }, vol(a / (q * n) - (n - p) / (p * n))),
                term(
                    Quantity::HajlaszGradient,
                    NormSpec::Lebesgue { p: r },
                    Multiplier::max_power(m.mu.powf(n / a), m.surface, a / (q * (n - 1.0)) - 1.0 / r),
                ),
            ];
            (Quantity::Gradient, NormSpec::Lebesgue { p: ex.q.unwrap() }, true, terms)
        }
        "fried9" => {
            let terms = vec![
                term(Quantity::Hessian, NormSpec::Lebesgue { p: n }, one),
                term(Quantity::HajlaszGradient, exp_bdry(need("β", pr.beta)?), one),
            ];
            (Quantity::Gradient, exp_lhs(), true, terms)
        }
        "inf2" => {
            let p = need("p", pr.p)?;
            let terms = vec![
                term(Quantity::Hessian, NormSpec::Lebesgue { p }, Multiplier::power(m.volume, 1.0 / n - 1.0 / p)),
                term(Quantity::HajlaszGradient, linf, one),
            ];
            (Quantity::Gradient, linf, false, terms)
        }
        other => return Err(Error::InvalidInput(format!("unknown theorem `{other}`"))),
    };
    Ok(Plan { lhs, lhs_norm, lhs_uses_mu, terms, exponents: ex, notes })
}

/// Per-term multipliers of `theorem` with branch flags.
pub fn coefficient(theorem: &str, pr: &ExponentParams, volume: f64, surface: f64, mu_mass: f64) -> Result<Vec<Multiplier>> {
    Ok(plan(theorem, pr, Masses { volume, surface, mu: mu_mass })?.terms.into_iter().map(|t| t.multiplier).collect())
}

/// Short human-readable name of a norm.
pub fn norm_label(spec: &NormSpec) -> String {
    let x = |v: f64| if v.is_infinite() { "∞".to_string() } else { format!("{v}") };
    match *spec {
        NormSpec::Lebesgue { p } => format!("L^{}", x(p)),
        NormSpec::Lorentz { p, sigma } => format!("L^{{{},{}}}", x(p), x(sigma)),
        NormSpec::LorentzZygmund { p, sigma, theta, .. } => format!("L^{{{},{};{}}}", x(p), x(sigma), x(theta)),
        NormSpec::OrliczExp { gamma, .. } => format!("expL^{}", x(gamma)),
        NormSpec::OrliczYoung(_) => "L^A".to_string(),
        NormSpec::LInf => "L^∞".to_string(),
    }
}

/// Norm of sampled values against weights.
pub fn weighted_norm(values: &[f64], weights: &[f64], spec: &NormSpec) -> Result<f64> {
    norm_eval(spec, &profile(values, weights)?)
}

pub(crate) fn profile(values: &[f64], weights: &[f64]) -> Result<RearrangementProfile> {
    let space = SampledMeasureSpace::from_weights(weights)?;
    rearrange(&SampledFunction::new(&space, values.to_vec())?)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TermReport {
    pub quantity: Quantity,
    pub norm: String,
    pub norm_value: f64,
    pub coefficient: Multiplier,
    pub contribution: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeshReport {
    pub h: f64,
    pub boundary_h: f64,
    pub interior_nodes: usize,
    pub boundary_samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub case: String,
    pub theorem: String,
    pub domain: String,
    pub function: String,
    pub measure: String,
    pub lhs_quantity: Quantity,
    pub lhs_norm: String,
    pub lhs: f64,
    pub terms: Vec<TermReport>,
    pub rhs: f64,
    /// `lhs / rhs`; absent when `rhs = 0`.
    pub ratio: Option<f64>,
    /// Both sides vanish.
    pub degenerate: bool,
    pub exponents: UsedExponents,
    pub masses: Masses,
    pub mesh: MeshReport,
    pub notes: Vec<String>,
}

/// Sampled fields of `u` shared by the studies.
pub(crate) struct Fields {
    pub sample: InteriorSample,
    pub boundary: BoundarySample,
    pub mu: Vec<f64>,
}

impl Fields {
    pub fn new(d: &Domain, measure: &MeasureChoice, h: f64, boundary_h: f64) -> Result<Self> {
        let sample = d.sample_interior(h)?;
        let boundary = d.sample_boundary(BoundaryResolution::Spacing(boundary_h))?;
        let mu = measure.weights(d, &sample)?;
        Ok(Fields { sample, boundary, mu })
    }

    pub fn interior(&self, q: Quantity, u: &TrialFunction, dim: usize, exec: Execution) -> Vec<f64> {
        exec.map(&self.sample.nodes, |x| match q {
            Quantity::Value => u.abs_value(*x, dim),
            Quantity::Gradient => u.grad_norm(*x, dim),
            Quantity::Hessian => u.hess_norm(*x, dim),
            Quantity::SymmetricGradient => u.sym_grad_norm(*x, dim),
            Quantity::Trace | Quantity::HajlaszGradient => unreachable!("boundary quantity"),
        })
    }

    pub fn trace(&self, u: &TrialFunction, dim: usize, exec: Execution) -> Vec<f64> {
        exec.map(&self.boundary.points, |x| u.abs_value(*x, dim))
    }

    pub fn boundary_trace(&self, u: &TrialFunction, exec: Execution) -> Result<BoundaryTrace> {
        BoundaryTrace::from_sample(&self.boundary, exec.map(&self.boundary.points, |x| u.jet(*x).value[0]))
    }

    pub fn quotient_gradient(&self, u: &TrialFunction, exec: Execution) -> Result<Vec<f64>> {
        lipschitz_quotient_gradient_with(&self.boundary_trace(u, exec)?, exec)
    }
}

fn mesh_of(spec: &InequalitySpec, d: &Domain) -> Result<(f64, f64)> {
    let h = spec.h.unwrap_or(d.diameter() / 32.0);
    let bh = spec.boundary_h.unwrap_or(h);
    for (k, v) in [("h", h), ("boundary_h", bh)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidInput(format!("{k} = {v} must be positive")));
        }
    }
    Ok((h, bh))
}

/// Evaluate both sides of `spec` for `u` on `d`.
pub fn evaluate_on(spec: &InequalitySpec, d: &Domain, u: &TrialFunction, exec: Execution) -> Result<ExperimentReport> {
    if spec.n != d.dim() {
        return Err(Error::InvalidInput(format!("spec has n = {} but the domain is {}-dimensional", spec.n, d.dim())));
    }
    u.validate()?;
    let (h, bh) = mesh_of(spec, d)?;
    let dim = d.dim();
    let f = Fields::new(d, &spec.measure, h, bh)?;
    let (volume, surface) = d.measure();
    let masses = Masses { volume, surface, mu: crate::numerics::pairwise_sum(&f.mu) };
    let plan = plan(&spec.theorem, &spec.params(), masses)?;
    let second =
        plan.lhs == Quantity::Gradient || plan.terms.iter().any(|t| matches!(t.quantity, Quantity::Hessian | Quantity::HajlaszGradient));
    if second && u.is_vector() {
        return Err(Error::InvalidInput(format!("{} takes a scalar function", spec.theorem)));
    }

    let lhs_vals = f.interior(plan.lhs, u, dim, exec);
    let lhs = if plan.lhs_uses_mu {
        weighted_norm(&lhs_vals, &f.mu, &plan.lhs_norm)?
    } else {
        weighted_norm(&lhs_vals, &f.sample.weights, &plan.lhs_norm)?
    };

    let mut terms = Vec::new();
    for t in &plan.terms {
        let norm_value = match t.quantity {
            Quantity::Trace => weighted_norm(&f.trace(u, dim, exec), &f.boundary.weights, &t.norm)?,
            Quantity::HajlaszGradient => match spec.hajlasz {
                HajlaszMode::Quotient => weighted_norm(&f.quotient_gradient(u, exec)?, &f.boundary.weights, &t.norm)?,
                HajlaszMode::Lp => {
                    let opts = LpOptions { exec, ..LpOptions::default() };
                    seminorm(&f.boundary_trace(u, exec)?, &t.norm, &opts)?.value
                }
            },
            q => weighted_norm(&f.interior(q, u, dim, exec), &f.sample.weights, &t.norm)?,
        };
        let contribution = if norm_value == 0.0 { 0.0 } else { t.multiplier.value * norm_value };
        terms.push(TermReport { quantity: t.quantity, norm: norm_label(&t.norm), norm_value, coefficient: t.multiplier, contribution });
    }
    let contributions: Vec<f64> = terms.iter().map(|t| t.contribution).collect();
    let rhs = crate::numerics::pairwise_sum(&contributions);
    Ok(ExperimentReport {
        case: String::new(),
        theorem: spec.theorem.clone(),
        domain: spec.domain.clone().unwrap_or_default(),
        function: u.to_string(),
        measure: spec.measure.to_string(),
        lhs_quantity: plan.lhs,
        lhs_norm: norm_label(&plan.lhs_norm),
        lhs,
        terms,
        rhs,
        ratio: if rhs > 0.0 { Some(lhs / rhs) } else { None },
        degenerate: lhs == 0.0 && rhs == 0.0,
        exponents: plan.exponents,
        masses,
        mesh: MeshReport { h, boundary_h: bh, interior_nodes: f.sample.len(), boundary_samples: f.boundary.len() },
        notes: plan.notes,
    })
}

/// Evaluate `spec` on its own domain (default: the unit square or cube).
pub fn evaluate_inequality(spec: &InequalitySpec, u: &TrialFunction, exec: Execution) -> Result<ExperimentReport> {
    let name = spec.domain.clone().unwrap_or_else(|| if spec.n == 3 { "builtin:cube".into() } else { "builtin:square".into() });
    let d = load_domain(&name)?;
    let mut r = evaluate_on(spec, &d, u, exec)?;
    r.domain = name;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{unit_square, voxel_cube};
    use crate::potential::parse_trial;

    fn fried1() -> InequalitySpec {
        InequalitySpec { p: Some(1.5), r: Some(2.0), ..InequalitySpec::new("fried1", 2) }
    }

    #[test]
    fn fried1_coefficients() {
        // q = 4: α/(qn) − (n−p)/(pn) = 1/4 − 1/6
        let c = coefficient("fried1", &fried1().params(), 1.0, 4.0, 1.0).unwrap();
        assert!((c[0].exponent - 1.0 / 12.0).abs() < 1e-15);
        assert_eq!(c[0].value, 1.0);
        assert_eq!(c[1].exponent, 0.0);
        let lam: f64 = 3.0;
        let c = coefficient("fried1", &fried1().params(), lam * lam, 4.0 * lam, lam * lam).unwrap();
        assert!((c[0].value - (lam * lam).powf(1.0 / 12.0)).abs() < 1e-14);
        assert_eq!(c[0].attained_by, MaxBranch::Tie);
    }

    #[test]
    fn fried7_exponents() {
        let spec = InequalitySpec { p: Some(2.0), s: Some(3.0), ..InequalitySpec::new("fried7", 3) };
        let c = coefficient("fried7", &spec.params(), 1.0, 6.0, 1.0).unwrap();
        assert!((c[0].exponent - 1.0 / 6.0).abs() < 1e-15);
        assert!((c[1].exponent - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(c[0].value, 1.0);
    }

    #[test]
    fn fried1_on_linear_function() {
        let d = unit_square();
        let spec = InequalitySpec { h: Some(1.0 / 256.0), boundary_h: Some(1.0 / 1024.0), ..fried1() };
        let r = evaluate_on(&spec, &d, &parse_trial("linear:1,0").unwrap(), Execution::Parallel).unwrap();
        let lhs = 5f64.powf(-0.25);
        let trace = (5.0f64 / 3.0).sqrt();
        assert!((r.lhs - lhs).abs() < 1e-4, "{}", r.lhs);
        assert!((r.terms[0].norm_value - 1.0).abs() < 1e-12);
        assert!((r.terms[1].norm_value - trace).abs() < 1e-5);
        assert!((r.terms[1].coefficient.exponent - (0.5 - 0.5)).abs() < 1e-15);
        let expect = lhs / (r.terms[0].coefficient.value + r.terms[1].coefficient.value * trace);
        assert!((r.ratio.unwrap() - expect).abs() < 1e-4);
    }

    #[test]
    fn zero_function_is_degenerate() {
        let r = evaluate_on(&fried1(), &unit_square(), &TrialFunction::constant(0.0), Execution::Sequential).unwrap();
        assert!(r.degenerate && r.ratio.is_none() && r.rhs == 0.0);
    }

    #[test]
    fn skew_field_kills_symmetric_term() {
        let spec = InequalitySpec { p: Some(1.5), r: Some(2.0), ..InequalitySpec::new("friedsymm.1", 2) };
        let r = evaluate_on(&spec, &unit_square(), &parse_trial("skew:1,2,0.7").unwrap(), Execution::Sequential).unwrap();
        assert_eq!(r.terms[0].contribution, 0.0);
        assert!(r.ratio.unwrap().is_finite());
    }

    #[test]
    fn second_order_reports_use_only_boundary_gradients() {
        for (th, extra) in
            [("fried8", (Some(1.5), Some(2.0), None)), ("fried9", (None, None, Some(2.0))), ("inf2", (Some(3.0), None, None))]
        {
            let spec = InequalitySpec { p: extra.0, r: extra.1, beta: extra.2, h: Some(1.0 / 16.0), ..InequalitySpec::new(th, 2) };
            let r = evaluate_on(&spec, &unit_square(), &parse_trial("bump:1,0.5,0.5").unwrap(), Execution::Sequential).unwrap();
            assert_eq!(r.lhs_quantity, Quantity::Gradient);
            assert!(r.terms.iter().all(|t| matches!(t.quantity, Quantity::Hessian | Quantity::HajlaszGradient)), "{th}");
        }
    }

    #[test]
    fn toml_roundtrip() {
        let s =
            InequalitySpec::parse("theorem = \"fried4\"\nn = 3\np = 1.2\ns = 1.5\nr = 2\nmeasure = { boundary-layer = { delta = 0.3 } }\n")
                .unwrap();
        assert_eq!(s.measure, MeasureChoice::BoundaryLayer { delta: 0.3 });
        assert!(InequalitySpec::parse("theorem = \"fried1\"\nn = 2\nbogus = 1\n").is_err());
        let r = evaluate_on(
            &InequalitySpec { h: Some(0.25), ..s },
            &voxel_cube(4).unwrap(),
            &parse_trial("bump:1,0.5,0.5,0.5").unwrap(),
            Execution::Parallel,
        )
        .unwrap();
        assert_eq!(r.terms.len(), 3);
        assert!(r.notes.iter().any(|n| n.contains("plain `+`")));
        assert!(r.ratio.unwrap().is_finite());
    }
}
