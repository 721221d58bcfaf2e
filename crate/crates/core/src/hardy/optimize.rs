use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::measure::RearrangementProfile;
use crate::ri_norms::NormSpec;

use super::{geometric_grid, Evaluator, HardyProblem};

#[derive(Clone, Copy, Debug)]
pub struct OptimizeOptions {
    pub restarts: usize,
    pub seed: u64,
    pub sweeps: usize,
    pub exec: Execution,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions { restarts: 8, seed: 0, sweeps: 3, exec: Execution::Parallel }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HardyEstimate {
    pub estimate: f64,
    /// Maximizer found, normalized to unit source norm when finite.
    #[serde(skip)]
    pub argmax: RearrangementProfile,
    pub cells: usize,
    pub evaluations: usize,
}

const BLOCKS: usize = 64;
const SCALES: [f64; 8] = [0.0, 0.5, 0.8, 0.95, 1.05, 1.25, 2.0, 4.0];
const AMPLITUDES: [f64; 3] = [0.1, 1.0, 10.0];

fn values_from_increments(d: &[f64]) -> Vec<f64> {
    let mut v = vec![0.0; d.len()];
    let mut s = 0.0;
    for i in (0..d.len()).rev() {
        s += d[i];
        v[i] = s;
    }
    v
}

fn increments_from_values(v: &[f64]) -> Vec<f64> {
    (0..v.len()).map(|i| (v[i] - v.get(i + 1).copied().unwrap_or(0.0)).max(0.0)).collect()
}

fn decay_exponent(spec: &NormSpec) -> f64 {
    match *spec {
        NormSpec::Lebesgue { p } | NormSpec::Lorentz { p, .. } | NormSpec::LorentzZygmund { p, .. } => 1.0 / p,
        NormSpec::OrliczYoung(crate::ri_norms::YoungFunction::Power { p }) => 1.0 / p,
        _ => 0.0,
    }
}

/// Candidate starting points: indicators `χ_(0,a)` and truncated powers
/// `min(A, t^{−κ})·χ_(0,a)` with `κ` the source decay exponent.
fn seeds(ev: &Evaluator, kappa: f64) -> Vec<Vec<f64>> {
    let n = ev.cells();
    let mut out = Vec::new();
    let pick = |k: usize, of: usize| ((k as f64 + 1.0) / of as f64 * n as f64).ceil() as usize;
    for k in 0..32 {
        let m = pick(k, 32).clamp(1, n);
        out.push((0..n).map(|i| if i < m { 1.0 } else { 0.0 }).collect());
    }
    if kappa > 0.0 {
        for ka in 0..8 {
            let m = pick(ka + 24, 32).clamp(1, n);
            for kc in 0..8 {
                // truncation level at a cell index spread over the support
                let c = (m * (kc + 1) / 9).min(m - 1);
                let tc = ev.grid[c + 1];
                out.push(
                    (0..n)
                        .map(|i| {
                            if i >= m {
                                0.0
                            } else if i <= c {
                                tc.powf(-kappa)
                            } else {
                                ev.grid[i + 1].powf(-kappa)
                            }
                        })
                        .collect(),
                );
            }
        }
    }
    out
}

struct Ascent<'a> {
    ev: &'a Evaluator,
    evaluations: usize,
}

impl Ascent<'_> {
    fn score(&mut self, d: &[f64]) -> f64 {
        self.evaluations += 1;
        let r = self.ev.ratio(&values_from_increments(d));
        if r.is_nan() {
            f64::NEG_INFINITY
        } else {
            r
        }
    }

    fn run(&mut self, mut d: Vec<f64>, sweeps: usize) -> (f64, Vec<f64>) {
        let n = d.len();
        let nb = BLOCKS.min(n);
        let bounds: Vec<usize> = (0..=nb).map(|k| k * n / nb).collect();
        let mut best = self.score(&d);
        if best.is_infinite() && best > 0.0 {
            return (best, d);
        }
        for _ in 0..sweeps {
            for b in 0..nb {
                let (lo, hi) = (bounds[b], bounds[b + 1]);
                let mut cand_best: Option<(f64, Vec<f64>)> = None;
                let consider = |score: f64, trial: Vec<f64>, cand_best: &mut Option<(f64, Vec<f64>)>| {
                    if score > best && cand_best.as_ref().is_none_or(|(s, _)| score > *s) {
                        *cand_best = Some((score, trial));
                    }
                };
                if d[lo..hi].iter().any(|&x| x > 0.0) {
                    for &s in &SCALES {
                        let mut trial = d.clone();
                        for x in &mut trial[lo..hi] {
                            *x *= s;
                        }
                        if trial.iter().all(|&x| x == 0.0) {
                            continue;
                        }
                        let sc = self.score(&trial);
                        consider(sc, trial, &mut cand_best);
                    }
                }
                let v = values_from_increments(&d);
                let base = v[hi - 1].max(1e-3 * v[0]);
                let base = if base > 0.0 { base } else { 1.0 };
                for &amp in &AMPLITUDES {
                    let mut trial = d.clone();
                    trial[hi - 1] += amp * base;
                    let sc = self.score(&trial);
                    consider(sc, trial, &mut cand_best);
                }
                if let Some((s, t)) = cand_best {
                    best = s;
                    d = t;
                    if best.is_infinite() {
                        return (best, d);
                    }
                }
            }
        }
        (best, d)
    }
}

/// Deterministic lower estimate of `sup ‖T f‖_Y / ‖f‖_X` over nonincreasing
/// step functions on a geometric grid with `grid_size` cells.
pub fn best_constant_lower(problem: &HardyProblem, grid_size: usize, restarts: usize, seed: u64) -> Result<HardyEstimate> {
    best_constant_lower_with(problem, grid_size, &OptimizeOptions { restarts, seed, ..Default::default() }, None)
}

pub fn best_constant_lower_with(
    problem: &HardyProblem,
    grid_size: usize,
    opts: &OptimizeOptions,
    warm: Option<&RearrangementProfile>,
) -> Result<HardyEstimate> {
    if grid_size < 8 {
        return Err(Error::InvalidInput(format!("grid size must be at least 8, got {grid_size}")));
    }
    if opts.restarts == 0 {
        return Err(Error::InvalidInput("at least one restart is required".into()));
    }
    let ev = Evaluator::new(problem, geometric_grid(problem.l_src, grid_size))?;
    let n = ev.cells();
    if problem.terms.is_empty() {
        let argmax = RearrangementProfile::new(ev.grid.clone(), vec![0.0; n])?;
        return Ok(HardyEstimate { estimate: 0.0, argmax, cells: n, evaluations: 0 });
    }

    let mut scored: Vec<(f64, Vec<f64>)> = seeds(&ev, decay_exponent(&problem.source))
        .into_iter()
        .map(|v| {
            let r = ev.ratio(&v);
            (if r.is_nan() { f64::NEG_INFINITY } else { r }, increments_from_values(&v))
        })
        .collect();
    let seed_evals = scored.len();
    // stable sort keeps the family order on ties
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    let warm_d = warm.map(|w| increments_from_values(&ev.project(w)));

    let runs = opts.exec.map_range(opts.restarts, |r| {
        let mut start = match (&warm_d, r) {
            (Some(w), 0) if w.iter().any(|&x| x > 0.0) => w.clone(),
            _ => scored[r % scored.len()].1.clone(),
        };
        if r > 0 {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(r as u64));
            for x in &mut start {
                *x *= (rng.gen_range(-0.5..0.5f64)).exp();
            }
        }
        let mut asc = Ascent { ev: &ev, evaluations: 0 };
        let (s, d) = asc.run(start, opts.sweeps);
        (s, d, asc.evaluations)
    });

    let mut best_i = 0;
    for (i, run) in runs.iter().enumerate() {
        if run.0 > runs[best_i].0 {
            best_i = i;
        }
    }
    let evaluations = seed_evals + runs.iter().map(|r| r.2).sum::<usize>();
    let (estimate, d, _) = &runs[best_i];
    let mut v = values_from_increments(d);
    let norm = ev.source_norm(&v);
    if norm.is_finite() && norm > 0.0 {
        for x in &mut v {
            *x /= norm;
        }
    }
    let argmax = RearrangementProfile::new(ev.grid.clone(), v)?;
    let estimate = if *estimate == f64::NEG_INFINITY { 0.0 } else { *estimate };
    Ok(HardyEstimate { estimate, argmax, cells: n, evaluations })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Bounded,
    Diverging,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Classification::Bounded => "bounded",
            Classification::Diverging => "diverging",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RefineLevel {
    pub level: usize,
    pub grid: usize,
    pub estimate: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RefineStudy {
    pub levels: Vec<RefineLevel>,
    pub classification: Classification,
    /// Relative change between the last two levels.
    pub drift: f64,
    pub last_ratio: f64,
}

impl RefineStudy {
    pub fn estimates(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.estimate).collect()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["level", "grid", "estimate"])?;
        for l in &self.levels {
            wr.serialize((l.level, l.grid, l.estimate))?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Estimates on nested grids `base·4^k`, each level warm-started from the
/// previous maximizer; "diverging" iff the last ratio is at least 1.5.
pub fn refine_study(problem: &HardyProblem, levels: usize, base_grid: usize, opts: &OptimizeOptions) -> Result<RefineStudy> {
    if levels < 3 {
        return Err(Error::InvalidInput(format!("a refinement study needs at least 3 levels, got {levels}")));
    }
    let mut out = Vec::with_capacity(levels);
    let mut warm: Option<RearrangementProfile> = None;
    let mut prev = f64::NEG_INFINITY;
    for level in 0..levels {
        let grid = base_grid.max(8) * 4usize.pow(level as u32);
        let est = best_constant_lower_with(problem, grid, opts, warm.as_ref())?;
        // the previous maximizer is representable on the finer grid
        let estimate = est.estimate.max(prev);
        prev = estimate;
        warm = Some(est.argmax);
        out.push(RefineLevel { level, grid, estimate });
    }
    let a = out[levels - 2].estimate;
    let b = out[levels - 1].estimate;
    let last_ratio = if b == 0.0 && a == 0.0 {
        1.0
    } else if b.is_infinite() {
        f64::INFINITY
    } else {
        b / a
    };
    let drift = if a == 0.0 && b == 0.0 { 0.0 } else { (b - a).abs() / a.abs().max(b.abs()) };
    let classification = if last_ratio >= 1.5 { Classification::Diverging } else { Classification::Bounded };
    Ok(RefineStudy { levels: out, classification, drift, last_ratio })
}
