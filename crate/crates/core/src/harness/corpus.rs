use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::{evaluate_on, ExperimentReport, InequalitySpec};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::{builtin, load_domain, Domain};
use crate::potential::{default_corpus, vector_corpus, TrialFunction};

pub const DEFAULT_DOMAINS: [&str; 4] = ["square", "disk512", "lshape", "comb:4,1,0.05"];
pub const DEFAULT_SPATIAL_DOMAINS: [&str; 1] = ["cube"];

/// Five planar specs plus two spatial ones; each runs on domains of its dimension.
pub fn default_specs() -> Vec<InequalitySpec> {
    let mk = |th: &str, n: usize| InequalitySpec::new(th, n);
    vec![
        InequalitySpec { p: Some(1.5), r: Some(2.0), ..mk("fried1", 2) },
        InequalitySpec { beta: Some(2.0), ..mk("fried3", 2) },
        InequalitySpec { p: Some(3.0), ..mk("infdisp", 2) },
        InequalitySpec { p: Some(1.5), r: Some(2.0), ..mk("fried8", 2) },
        InequalitySpec { p: Some(1.5), r: Some(2.0), ..mk("friedsymm.1", 2) },
        InequalitySpec { p: Some(1.2), s: Some(1.5), r: Some(2.0), ..mk("fried4", 3) },
        InequalitySpec { p: Some(2.0), s: Some(3.0), ..mk("fried7", 3) },
    ]
}

#[derive(Clone, Debug)]
pub enum FunctionSource {
    /// Seeded corpus adapted to each domain; vector fields for symmetric theorems.
    Default,
    Explicit(Vec<(String, TrialFunction)>),
}

#[derive(Clone, Debug)]
pub struct CorpusConfig {
    pub domains: Vec<String>,
    pub specs: Vec<InequalitySpec>,
    pub functions: FunctionSource,
    pub seed: u64,
    /// Interior spacing is `diam / cells`.
    pub cells: usize,
    pub exec: Execution,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            domains: DEFAULT_DOMAINS.iter().chain(&DEFAULT_SPATIAL_DOMAINS).map(|s| s.to_string()).collect(),
            specs: default_specs(),
            functions: FunctionSource::Default,
            seed: 0,
            cells: 32,
            exec: Execution::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseError {
    pub code: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorpusCase {
    pub case: String,
    pub theorem: String,
    pub domain: String,
    pub function: String,
    pub report: Option<ExperimentReport>,
    pub error: Option<CaseError>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Summary {
    pub cases: usize,
    pub failed: usize,
    pub degenerate: usize,
    pub max_ratio_by_theorem: BTreeMap<String, f64>,
    pub max_ratio_by_domain: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorpusReport {
    pub seed: u64,
    pub cells: usize,
    pub cases: Vec<CorpusCase>,
    pub summary: Summary,
}

struct Job {
    case: String,
    spec: InequalitySpec,
    domain: usize,
    label: String,
    u: TrialFunction,
}

/// Builtin names with or without the `builtin:` prefix; anything else is a file.
pub fn resolve_domain(name: &str) -> Result<Domain> {
    match name.strip_prefix("builtin:") {
        Some(b) => builtin(b),
        None if Path::new(name).is_file() => load_domain(name),
        None => builtin(name),
    }
}

fn symmetric(theorem: &str) -> bool {
    matches!(theorem, "friedsymm.1" | "friedsymm.3" | "infsymm")
}

/// Evaluate every spec on every domain of matching dimension for every
/// function. Errors are recorded per case.
pub fn corpus_run(cfg: &CorpusConfig) -> Result<CorpusReport> {
    if cfg.cells == 0 {
        return Err(Error::InvalidInput("need at least one cell per diameter".into()));
    }
    let domains = cfg.domains.iter().map(|n| resolve_domain(n)).collect::<Result<Vec<_>>>()?;
    let mut jobs = Vec::new();
    for (di, (name, d)) in cfg.domains.iter().zip(&domains).enumerate() {
        let scalar;
        let vector;
        let (sf, vf) = match &cfg.functions {
            FunctionSource::Default => {
                scalar = default_corpus(d, cfg.seed);
                vector = vector_corpus(d, cfg.seed);
                (&scalar, &vector)
            }
            FunctionSource::Explicit(list) => (list, list),
        };
        for spec in cfg.specs.iter().filter(|s| s.n == d.dim()) {
            let funcs = if symmetric(&spec.theorem) { vf } else { sf };
            for (label, u) in funcs {
                let h = spec.h.unwrap_or(d.diameter() / cfg.cells as f64);
                jobs.push(Job {
                    case: format!("{name}/{}/{label}", spec.theorem),
                    spec: InequalitySpec { domain: Some(name.clone()), h: Some(h), ..spec.clone() },
                    domain: di,
                    label: label.clone(),
                    u: u.clone(),
                });
            }
        }
    }
    let inner = if cfg.exec.is_parallel() { Execution::Sequential } else { cfg.exec };
    let cases = cfg.exec.map(&jobs, |j| {
        let out = evaluate_on(&j.spec, &domains[j.domain], &j.u, inner);
        let (report, error) = match out {
            Ok(mut r) => {
                r.case = j.case.clone();
                r.domain = cfg.domains[j.domain].clone();
                (Some(r), None)
            }
            Err(e) => (None, Some(CaseError { code: e.code().to_string(), message: e.to_string() })),
        };
        CorpusCase {
            case: j.case.clone(),
            theorem: j.spec.theorem.clone(),
            domain: cfg.domains[j.domain].clone(),
            function: j.label.clone(),
            report,
            error,
        }
    });
    let mut summary = Summary { cases: cases.len(), ..Summary::default() };
    for c in &cases {
        match &c.report {
            None => summary.failed += 1,
            Some(r) => {
                if r.degenerate {
                    summary.degenerate += 1;
                }
                if let Some(x) = r.ratio {
                    for (map, key) in [(&mut summary.max_ratio_by_theorem, &c.theorem), (&mut summary.max_ratio_by_domain, &c.domain)] {
                        let e = map.entry(key.clone()).or_insert(x);
                        *e = e.max(x);
                    }
                }
            }
        }
    }
    Ok(CorpusReport { seed: cfg.seed, cells: cfg.cells, cases, summary })
}

impl CorpusReport {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Internal(e.to_string()))
    }

    /// One row per case: `case, theorem, domain, lhs, rhs1…rhs3, coef1…coef3, ratio`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        write_reports_csv(self.cases.iter().map(|c| (c.case.as_str(), c.theorem.as_str(), c.domain.as_str(), c.report.as_ref())), w)
    }

    /// `case, ratio` for plotting.
    pub fn write_ratios_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["case", "ratio"])?;
        for c in &self.cases {
            let r = c.report.as_ref().and_then(|r| r.ratio).map(|x| x.to_string()).unwrap_or_default();
            out.write_record([c.case.as_str(), r.as_str()])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Rows of the report table; missing reports leave the numeric cells empty.
pub fn write_reports_csv<'a, W: Write>(
    rows: impl IntoIterator<Item = (&'a str, &'a str, &'a str, Option<&'a ExperimentReport>)>,
    w: W,
) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["case", "theorem", "domain", "lhs", "rhs1", "rhs2", "rhs3", "coef1", "coef2", "coef3", "ratio"])?;
    let num = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    for (case, theorem, domain, rep) in rows {
        let mut rec = vec![case.to_string(), theorem.to_string(), domain.to_string(), num(rep.map(|r| r.lhs))];
        for k in 0..3 {
            rec.push(num(rep.and_then(|r| r.terms.get(k)).map(|t| t.norm_value)));
        }
        for k in 0..3 {
            rec.push(num(rep.and_then(|r| r.terms.get(k)).map(|t| t.coefficient.value)));
        }
        rec.push(num(rep.and_then(|r| r.ratio)));
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}
