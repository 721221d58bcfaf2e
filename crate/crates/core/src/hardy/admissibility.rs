//! Critical exponents and parameter ranges for the inequalities.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponents of an inequality; unset fields are not constrained.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ExponentParams {
    pub n: usize,
    pub alpha: Option<f64>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub r: Option<f64>,
    pub s: Option<f64>,
    pub sigma: Option<f64>,
    pub varrho: Option<f64>,
    pub upsilon: Option<f64>,
    pub eta: Option<f64>,
    pub theta: Option<f64>,
    pub varsigma: Option<f64>,
    pub gamma: Option<f64>,
    pub beta: Option<f64>,
}

impl ExponentParams {
    pub fn new(n: usize) -> Self {
        ExponentParams { n, ..Default::default() }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha.unwrap_or(self.n as f64)
    }

    fn need(&self, name: &str, v: Option<f64>) -> Result<f64> {
        v.ok_or_else(|| Error::Hypothesis(format!("parameter {name} is required")))
    }
}

/// Which term of a min-formula attains the minimum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// The volume (gradient or Hessian) term.
    Interior,
    /// The boundary gradient term `𝒱¹L^s`.
    BoundaryGradient,
    /// The boundary trace term, or `β` in exponential targets.
    Boundary,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Critical {
    pub value: f64,
    pub branch: Branch,
    pub candidates: Vec<(Branch, f64)>,
}

impl Critical {
    fn min_of(candidates: Vec<(Branch, f64)>) -> Self {
        let mut best = candidates[0];
        for &c in &candidates[1..] {
            if c.1 < best.1 {
                best = c;
            }
        }
        Critical { value: best.1, branch: best.0, candidates }
    }

    /// Branches attaining the minimum up to rounding.
    pub fn attaining(&self) -> Vec<Branch> {
        self.candidates.iter().filter(|c| (c.1 - self.value).abs() <= 1e-12 * self.value.abs()).map(|c| c.0).collect()
    }
}

fn hyp(ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Hypothesis(msg()))
    }
}

fn check_alpha(pr: &ExponentParams) -> Result<f64> {
    let n = pr.n as f64;
    let a = pr.alpha();
    hyp(a > n - 1.0 && a <= n, || format!("α = {a} must lie in (n−1, n] = ({}, {n}]", n - 1.0))?;
    Ok(a)
}

/// `q = min{pα/(n−p), rα/(n−1)}` for `1 < p < n`, `r > 1`.
pub fn first_order_q(pr: &ExponentParams) -> Result<Critical> {
    let n = pr.n as f64;
    hyp(pr.n >= 2, || format!("n = {} must be at least 2", pr.n))?;
    let a = check_alpha(pr)?;
    let p = pr.need("p", pr.p)?;
    let r = pr.need("r", pr.r)?;
    hyp(p > 1.0 && p < n, || format!("p = {p} must satisfy 1 < p < n = {n}"))?;
    hyp(r > 1.0, || format!("r = {r} must exceed 1"))?;
    Ok(Critical::min_of(vec![(Branch::Interior, p * a / (n - p)), (Branch::Boundary, r * a / (n - 1.0))]))
}

/// `q = min{pα/(n−2p), sα/(n−1−s), rα/(n−1)}` for `n ≥ 3`, `1 < p < n/2`,
/// `1 < s < n−1`, `r > 1`.
pub fn second_order_q(pr: &ExponentParams) -> Result<Critical> {
    let n = pr.n as f64;
    hyp(pr.n >= 3, || format!("n = {} must be at least 3", pr.n))?;
    let a = check_alpha(pr)?;
    let p = pr.need("p", pr.p)?;
    let s = pr.need("s", pr.s)?;
    let r = pr.need("r", pr.r)?;
    hyp(p > 1.0 && p < n / 2.0, || format!("p = {p} must satisfy 1 < p < n/2 = {}", n / 2.0))?;
    hyp(s > 1.0 && s < n - 1.0, || format!("s = {s} must satisfy 1 < s < n−1 = {}", n - 1.0))?;
    hyp(r > 1.0, || format!("r = {r} must exceed 1"))?;
    Ok(Critical::min_of(vec![
        (Branch::Interior, p * a / (n - 2.0 * p)),
        (Branch::BoundaryGradient, s * a / (n - 1.0 - s)),
        (Branch::Boundary, r * a / (n - 1.0)),
    ]))
}

fn beta(pr: &ExponentParams) -> Result<f64> {
    let b = pr.need("β", pr.beta)?;
    hyp(b > 0.0, || format!("β = {b} must be positive"))?;
    Ok(b)
}

/// `γ = min{n′, β}`, `n′ = n/(n−1)`.
pub fn gamma_first(pr: &ExponentParams) -> Result<Critical> {
    hyp(pr.n >= 2, || format!("n = {} must be at least 2", pr.n))?;
    check_alpha(pr)?;
    let n = pr.n as f64;
    Ok(Critical::min_of(vec![(Branch::Interior, n / (n - 1.0)), (Branch::Boundary, beta(pr)?)]))
}

/// `γ = min{n/(n−2), β}`; requires `s > n−1` when `s` is given.
pub fn gamma_second(pr: &ExponentParams) -> Result<Critical> {
    hyp(pr.n >= 3, || format!("n = {} must be at least 3", pr.n))?;
    check_alpha(pr)?;
    let n = pr.n as f64;
    if let Some(s) = pr.s {
        hyp(s > n - 1.0, || format!("s = {s} must exceed n−1 = {}", n - 1.0))?;
    }
    Ok(Critical::min_of(vec![(Branch::Interior, n / (n - 2.0)), (Branch::Boundary, beta(pr)?)]))
}

/// Doubly borderline `p = n/2`, `s = n−1`: `γ = min{(n−1)/(n−2), β}`.
pub fn gamma_borderline(pr: &ExponentParams) -> Result<Critical> {
    hyp(pr.n >= 3, || format!("n = {} must be at least 3", pr.n))?;
    check_alpha(pr)?;
    let n = pr.n as f64;
    if let Some(p) = pr.p {
        hyp(p == n / 2.0, || format!("the borderline case needs p = n/2, got {p}"))?;
    }
    if let Some(s) = pr.s {
        hyp(s == n - 1.0, || format!("the borderline case needs s = n−1, got {s}"))?;
    }
    Ok(Critical::min_of(vec![(Branch::Interior, (n - 1.0) / (n - 2.0)), (Branch::Boundary, beta(pr)?)]))
}

/// Outcome of [`admissibility`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Admissibility {
    pub theorem: String,
    pub q: Option<Critical>,
    pub gamma: Option<Critical>,
    /// Smallest admissible Lorentz target index `η`.
    pub eta_min: Option<f64>,
    /// Largest admissible logarithmic target exponent `ϑ`.
    pub theta_max: Option<f64>,
}

pub const THEOREMS: [&str; 19] = [
    "fried1",
    "fried3",
    "infdisp",
    "mainlor",
    "BWlor",
    "inflor",
    "fried4",
    "fried5",
    "fried6",
    "fried7",
    "fried8",
    "fried9",
    "inf2",
    "L2",
    "BW2",
    "infL2",
    "friedsymm.1",
    "friedsymm.3",
    "infsymm",
];

fn in_unit_range(name: &str, v: f64) -> Result<()> {
    hyp((1.0..=f64::INFINITY).contains(&v), || format!("{name} = {v} must lie in [1, ∞]"))
}

fn eta_check(pr: &ExponentParams, eta_min: f64) -> Result<()> {
    if let Some(eta) = pr.eta {
        hyp(eta >= eta_min, || format!("η = {eta} must be at least {eta_min}"))?;
    }
    Ok(())
}

fn inv(x: f64) -> f64 {
    1.0 / x
}

pub fn admissibility(theorem: &str, pr: &ExponentParams) -> Result<Admissibility> {
    let n = pr.n as f64;
    let mut out = Admissibility { theorem: theorem.to_string(), q: None, gamma: None, eta_min: None, theta_max: None };
    match theorem {
        "fried1" | "fried8" | "friedsymm.1" => out.q = Some(first_order_q(pr)?),
        "fried3" | "fried9" | "friedsymm.3" => out.gamma = Some(gamma_first(pr)?),
        "infdisp" | "inf2" | "infsymm" => {
            hyp(pr.n >= 2, || format!("n = {} must be at least 2", pr.n))?;
            let p = pr.need("p", pr.p)?;
            hyp(p > n, || format!("p = {p} must exceed n = {n}"))?;
        }
        "mainlor" => {
            let q = first_order_q(pr)?;
            let sigma = pr.need("σ", pr.sigma)?;
            let varrho = pr.need("ϱ", pr.varrho)?;
            in_unit_range("σ", sigma)?;
            in_unit_range("ϱ", varrho)?;
            let eta_min =
                q.attaining().iter().map(|b| if *b == Branch::Interior { sigma } else { varrho }).fold(f64::NEG_INFINITY, f64::max);
            eta_check(pr, eta_min)?;
            out.q = Some(q);
            out.eta_min = Some(eta_min);
        }
        "L2" => {
            let q = second_order_q(pr)?;
            let sigma = pr.need("σ", pr.sigma)?;
            let upsilon = pr.need("υ", pr.upsilon)?;
            let varrho = pr.need("ϱ", pr.varrho)?;
            for (k, v) in [("σ", sigma), ("υ", upsilon), ("ϱ", varrho)] {
                in_unit_range(k, v)?;
            }
            let eta_min = q
                .attaining()
                .iter()
                .map(|b| match b {
                    Branch::Interior => sigma,
                    Branch::BoundaryGradient => upsilon,
                    Branch::Boundary => varrho,
                })
                .fold(f64::NEG_INFINITY, f64::max);
            eta_check(pr, eta_min)?;
            out.q = Some(q);
            out.eta_min = Some(eta_min);
        }
        "BWlor" | "BW2" => {
            let second = theorem == "BW2";
            hyp(pr.n >= if second { 3 } else { 2 }, || format!("n = {} is too small for {theorem}", pr.n))?;
            check_alpha(pr)?;
            let sigma = pr.need("σ", pr.sigma)?;
            let varrho = pr.need("ϱ", pr.varrho)?;
            let varsigma = pr.need("ς", pr.varsigma)?;
            let mut idx = vec![("σ", sigma), ("ϱ", varrho)];
            if second {
                idx.push(("υ", pr.need("υ", pr.upsilon)?));
            }
            for (k, v) in &idx {
                hyp(*v > 1.0, || format!("{k} = {v} must exceed 1"))?;
            }
            hyp(varsigma < -inv(varrho), || format!("ς = {varsigma} must be below −1/ϱ = {}", -inv(varrho)))?;
            let eta_min = idx.iter().map(|x| x.1).fold(f64::NEG_INFINITY, f64::max);
            eta_check(pr, eta_min)?;
            let eta = pr.eta.unwrap_or(eta_min);
            let mut theta_max = (-1.0 + inv(sigma) - inv(eta)).min(varsigma + inv(varrho) - inv(eta));
            if let Some(u) = pr.upsilon.filter(|_| second) {
                theta_max = theta_max.min(-1.0 + inv(u) - inv(eta));
            }
            if let Some(th) = pr.theta {
                hyp(th <= theta_max, || format!("ϑ = {th} must not exceed {theta_max}"))?;
            }
            out.eta_min = Some(eta_min);
            out.theta_max = Some(theta_max);
        }
        "inflor" => {
            hyp(pr.n >= 2, || format!("n = {} must be at least 2", pr.n))?;
            let p = pr.need("p", pr.p)?;
            let sigma = pr.sigma.unwrap_or(1.0);
            in_unit_range("σ", sigma)?;
            hyp((p == n && sigma == 1.0) || p > n, || format!("need p = n with σ = 1, or p > n (p = {p}, σ = {sigma})"))?;
        }
        "fried4" => out.q = Some(second_order_q(pr)?),
        "fried5" => {
            pr.need("s", pr.s)?;
            out.gamma = Some(gamma_second(pr)?)
        }
        "fried6" => out.gamma = Some(gamma_borderline(pr)?),
        "fried7" | "infL2" => {
            hyp(pr.n >= 3, || format!("n = {} must be at least 3", pr.n))?;
            let p = pr.need("p", pr.p)?;
            let s = pr.need("s", pr.s)?;
            if theorem == "fried7" {
                hyp(p > n / 2.0, || format!("p = {p} must exceed n/2 = {}", n / 2.0))?;
                hyp(s > n - 1.0, || format!("s = {s} must exceed n−1 = {}", n - 1.0))?;
            } else {
                let sigma = pr.sigma.unwrap_or(1.0);
                let upsilon = pr.upsilon.unwrap_or(1.0);
                in_unit_range("σ", sigma)?;
                in_unit_range("υ", upsilon)?;
                hyp((p == n / 2.0 && sigma == 1.0) || p > n / 2.0, || {
                    format!("need p = n/2 with σ = 1, or p > n/2 (p = {p}, σ = {sigma})")
                })?;
                hyp((s == n - 1.0 && upsilon == 1.0) || s > n - 1.0, || {
                    format!("need s = n−1 with υ = 1, or s > n−1 (s = {s}, υ = {upsilon})")
                })?;
            }
        }
        other => return Err(Error::InvalidInput(format!("unknown theorem `{other}`"))),
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize) -> ExponentParams {
        ExponentParams::new(n)
    }

    #[test]
    fn first_order_example() {
        let c = first_order_q(&ExponentParams { alpha: Some(2.0), p: Some(1.5), r: Some(2.0), ..params(2) }).unwrap();
        assert_eq!(c.value, 4.0);
        assert_eq!(c.branch, Branch::Boundary);
        assert_eq!(c.candidates[0].1, 6.0);
    }

    #[test]
    fn second_order_example() {
        let c = second_order_q(&ExponentParams { alpha: Some(3.0), p: Some(1.2), s: Some(1.5), r: Some(2.0), ..params(3) }).unwrap();
        assert!((c.value - 3.0).abs() < 1e-15);
        assert_eq!(c.branch, Branch::Boundary);
        assert!((c.candidates[0].1 - 6.0).abs() < 1e-12);
        assert!((c.candidates[1].1 - 9.0).abs() < 1e-12);
    }

    #[test]
    fn gammas() {
        let g = gamma_first(&ExponentParams { beta: Some(5.0), ..params(3) }).unwrap();
        assert_eq!(g.value, 1.5);
        assert_eq!(gamma_second(&ExponentParams { beta: Some(5.0), ..params(3) }).unwrap().value, 3.0);
        assert_eq!(gamma_borderline(&ExponentParams { beta: Some(5.0), ..params(3) }).unwrap().value, 2.0);
        assert_eq!(gamma_first(&ExponentParams { beta: Some(0.5), ..params(2) }).unwrap().branch, Branch::Boundary);
    }

    #[test]
    fn out_of_range() {
        let bad = ExponentParams { p: Some(1.6), s: Some(1.5), r: Some(2.0), ..params(3) };
        assert!(matches!(second_order_q(&bad), Err(Error::Hypothesis(_))));
        assert!(first_order_q(&ExponentParams { alpha: Some(0.5), p: Some(1.5), r: Some(2.0), ..params(2) }).is_err());
        assert!(admissibility("infdisp", &ExponentParams { p: Some(2.0), ..params(2) }).is_err());
        assert!(admissibility("nope", &params(2)).is_err());
    }

    #[test]
    fn lorentz_targets() {
        // q attained at the interior branch ⇒ η ≥ σ
        let pr = ExponentParams { p: Some(1.2), r: Some(4.0), sigma: Some(3.0), varrho: Some(5.0), ..params(2) };
        let a = admissibility("mainlor", &pr).unwrap();
        assert_eq!(a.q.unwrap().branch, Branch::Interior);
        assert_eq!(a.eta_min, Some(3.0));
        let bw = ExponentParams { sigma: Some(2.0), varrho: Some(2.0), varsigma: Some(-1.0), ..params(2) };
        let a = admissibility("BWlor", &bw).unwrap();
        assert_eq!(a.eta_min, Some(2.0));
        assert_eq!(a.theta_max, Some(-1.0));
        assert!(admissibility("BWlor", &ExponentParams { varsigma: Some(-0.2), ..bw }).is_err());
    }

    #[test]
    fn every_listed_theorem_is_known() {
        for t in THEOREMS {
            let r = admissibility(t, &params(3));
            assert!(!matches!(r, Err(Error::InvalidInput(_))), "{t}");
        }
    }
}
