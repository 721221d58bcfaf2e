//! Named kernel problems and the `key = value` problem file format.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::ri_norms::NormSpec;

use super::{Combination, HardyProblem, KernelTerm, LogWeight};

pub const TEMPLATES: [&str; 11] =
    ["red1bis", "red5", "red2.1bis", "red2.3bis", "red2.5", "fried35", "fried37", "fried39", "fried30", "fried32", "fried34"];

fn labelled(mut p: HardyProblem, label: &str) -> HardyProblem {
    p.label = label.to_string();
    p
}

/// `t^{−(n−1)/α} ∫_0^{t^{n/α}} f + ∫_{t^{n/α}}^{ℓ_src} ρ^{−(n−1)/n} f`.
pub fn red1bis(n: f64, alpha: f64, x: NormSpec, y: NormSpec, l_src: f64, l_tgt: f64) -> HardyProblem {
    let terms = vec![KernelTerm::lower(-(n - 1.0) / alpha, n / alpha), KernelTerm::upper(0.0, n / alpha, (n - 1.0) / n)];
    labelled(HardyProblem::new(terms, x, y, l_src, l_tgt), "red1bis")
}

/// `t^{−(n−1)/α} ∫_0^{t^{(n−1)/α}} f`.
pub fn red5(n: f64, alpha: f64, z: NormSpec, y: NormSpec, l_src: f64, l_tgt: f64) -> HardyProblem {
    let terms = vec![KernelTerm::lower(-(n - 1.0) / alpha, (n - 1.0) / alpha)];
    labelled(HardyProblem::new(terms, z, y, l_src, l_tgt), "red5")
}

pub fn red2_1bis(n: f64, alpha: f64, x: NormSpec, y: NormSpec, l_src: f64, l_tgt: f64) -> HardyProblem {
    let terms = vec![KernelTerm::lower(-(n - 2.0) / alpha, n / alpha), KernelTerm::upper(0.0, n / alpha, (n - 2.0) / n)];
    labelled(HardyProblem::new(terms, x, y, l_src, l_tgt), "red2.1bis")
}

pub fn red2_3bis(n: f64, alpha: f64, u: NormSpec, y: NormSpec, l_src: f64, l_tgt: f64) -> HardyProblem {
    let b = (n - 1.0) / alpha;
    let terms = vec![KernelTerm::lower(-(n - 2.0) / alpha, b), KernelTerm::upper(0.0, b, (n - 2.0) / (n - 1.0))];
    labelled(HardyProblem::new(terms, u, y, l_src, l_tgt), "red2.3bis")
}

pub fn red2_5(n: f64, alpha: f64, z: NormSpec, y: NormSpec, l_src: f64, l_tgt: f64) -> HardyProblem {
    let terms = vec![KernelTerm::lower(-(n - 1.0) / alpha, (n - 1.0) / alpha)];
    labelled(HardyProblem::new(terms, z, y, l_src, l_tgt), "red2.5")
}

fn sum_of_norms(terms: Vec<KernelTerm>, x: NormSpec, y: NormSpec, l: f64, label: &str) -> HardyProblem {
    let mut p = HardyProblem::new(terms, x, y, l, l);
    p.combination = Combination::SumOfNorms;
    labelled(p, label)
}

/// `L^p → L^q` on `(0, ℓ₁)`, the volume part of the second-order estimate.
pub fn fried35(n: f64, alpha: f64, p: f64, q: f64, l1: f64) -> HardyProblem {
    let k = (alpha / n - 1.0) / q;
    let terms = vec![KernelTerm::lower(-(n - 2.0) / n + k, 1.0), KernelTerm::upper(k, 1.0, (n - 2.0) / n)];
    sum_of_norms(terms, NormSpec::lebesgue(p), NormSpec::lebesgue(q), l1, "fried35")
}

/// `L^s → L^q` on `(0, ℓ₂)`.
pub fn fried37(n: f64, alpha: f64, s: f64, q: f64, l2: f64) -> HardyProblem {
    let k = (alpha / (n - 1.0) - 1.0) / q;
    let c = (n - 2.0) / (n - 1.0);
    let terms = vec![KernelTerm::lower(-c + k, 1.0), KernelTerm::upper(k, 1.0, c)];
    sum_of_norms(terms, NormSpec::lebesgue(s), NormSpec::lebesgue(q), l2, "fried37")
}

/// `L^r → L^q` on `(0, ℓ₂)`.
pub fn fried39(n: f64, alpha: f64, r: f64, q: f64, l2: f64) -> HardyProblem {
    let k = (alpha / (n - 1.0) - 1.0) / q;
    sum_of_norms(vec![KernelTerm::lower(-1.0 + k, 1.0)], NormSpec::lebesgue(r), NormSpec::lebesgue(q), l2, "fried39")
}

pub fn fried30(n: f64, alpha: f64, gamma: f64, l1: f64) -> HardyProblem {
    let (th, e) = (-1.0 / gamma, alpha / n);
    let c = (n - 2.0) / n;
    let terms = vec![KernelTerm::lower(-c, 1.0).with_log(th, l1, e), KernelTerm::upper(0.0, 1.0, c).with_log(th, l1, e)];
    sum_of_norms(terms, NormSpec::lebesgue(n / 2.0), NormSpec::LInf, l1, "fried30")
}

pub fn fried32(n: f64, alpha: f64, gamma: f64, s: f64, l2: f64) -> HardyProblem {
    let (th, e) = (-1.0 / gamma, alpha / (n - 1.0));
    let c = (n - 2.0) / (n - 1.0);
    let terms = vec![KernelTerm::lower(-c, 1.0).with_log(th, l2, e), KernelTerm::upper(0.0, 1.0, c).with_log(th, l2, e)];
    sum_of_norms(terms, NormSpec::lebesgue(s), NormSpec::LInf, l2, "fried32")
}

pub fn fried34(n: f64, alpha: f64, gamma: f64, l2: f64) -> HardyProblem {
    let w = LogWeight { theta: -1.0 / gamma, scale: l2, e: alpha / (n - 1.0) };
    let mut p =
        sum_of_norms(vec![KernelTerm::lower(-1.0, 1.0).with_log(w.theta, w.scale, w.e)], NormSpec::LInf, NormSpec::LInf, l2, "fried34");
    p.source_weight = Some(w);
    p
}

/// Parameters of a problem file.
#[derive(Clone, Debug, Default)]
pub struct ProblemSpec {
    pub template: String,
    pub values: BTreeMap<String, f64>,
    pub x: Option<NormSpec>,
    pub y: Option<NormSpec>,
}

impl ProblemSpec {
    /// Parse `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut out = ProblemSpec::default();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse(format!("line {}: expected `key = value`", ln + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            match k {
                "template" => out.template = v.to_string(),
                "X" => out.x = Some(v.parse()?),
                "Y" => out.y = Some(v.parse()?),
                _ => {
                    let x: f64 = if v.eq_ignore_ascii_case("inf") {
                        f64::INFINITY
                    } else {
                        v.parse().map_err(|_| Error::Parse(format!("line {}: `{v}` is not a number", ln + 1)))?
                    };
                    out.values.insert(k.to_string(), x);
                }
            }
        }
        if out.template.is_empty() {
            return Err(Error::Parse("problem file names no template".into()));
        }
        Ok(out)
    }

    fn get(&self, k: &str) -> Result<f64> {
        self.values.get(k).copied().ok_or_else(|| Error::InvalidInput(format!("template `{}` needs `{k}`", self.template)))
    }

    fn get_or(&self, k: &str, d: f64) -> f64 {
        self.values.get(k).copied().unwrap_or(d)
    }

    fn norm(&self, which: &str) -> Result<NormSpec> {
        let v = if which == "X" { self.x } else { self.y };
        v.ok_or_else(|| Error::InvalidInput(format!("template `{}` needs `{which}`", self.template)))
    }

    pub fn build(&self) -> Result<HardyProblem> {
        let n = self.get("n")?;
        let alpha = self.get_or("alpha", n);
        let l1 = self.get_or("l1", 1.0);
        let l2 = self.get_or("l2", 1.0);
        let ls = self.get_or("l_src", 1.0);
        let lt = self.get_or("l_tgt", 1.0);
        let p = match self.template.as_str() {
            "red1bis" => red1bis(n, alpha, self.norm("X")?, self.norm("Y")?, ls, lt),
            "red5" => red5(n, alpha, self.norm("X")?, self.norm("Y")?, ls, lt),
            "red2.1bis" => red2_1bis(n, alpha, self.norm("X")?, self.norm("Y")?, ls, lt),
            "red2.3bis" => red2_3bis(n, alpha, self.norm("X")?, self.norm("Y")?, ls, lt),
            "red2.5" => red2_5(n, alpha, self.norm("X")?, self.norm("Y")?, ls, lt),
            "fried35" => fried35(n, alpha, self.get("p")?, self.get("q")?, l1),
            "fried37" => fried37(n, alpha, self.get("s")?, self.get("q")?, l2),
            "fried39" => fried39(n, alpha, self.get("r")?, self.get("q")?, l2),
            "fried30" => fried30(n, alpha, self.get("gamma")?, l1),
            "fried32" => fried32(n, alpha, self.get("gamma")?, self.get("s")?, l2),
            "fried34" => fried34(n, alpha, self.get("gamma")?, l2),
            other => return Err(Error::InvalidInput(format!("unknown template `{other}`; expected one of {}", TEMPLATES.join(", ")))),
        };
        p.validate()?;
        Ok(p)
    }
}

pub fn parse_problem(text: &str) -> Result<HardyProblem> {
    ProblemSpec::parse(text)?.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn problem_file_roundtrip() {
        let p = parse_problem("template = red1bis\nn = 2\nalpha = 2 # comment\nX = Lp(1.5)\nY = Lp(6)\n").unwrap();
        assert_eq!(p.terms.len(), 2);
        assert_eq!(p.source, NormSpec::lebesgue(1.5));
        assert_eq!(p.terms[0].a, -0.5);
    }

    #[test]
    fn errors() {
        assert!(parse_problem("n = 2").is_err());
        assert!(parse_problem("template = red9\nn = 2").is_err());
        assert!(parse_problem("template = fried35\nn = 3\np = 1.2").is_err());
        assert!(parse_problem("template = red5\nn = x").is_err());
    }

    #[test]
    fn fried34_has_weighted_source() {
        let p = fried34(3.0, 3.0, 3.0, 1.0);
        assert!(p.source_weight.is_some());
        assert_eq!(p.terms[0].log.unwrap().e, 1.5);
    }
}
