//! One-dimensional Hardy-type kernel operators on nonincreasing functions
//! and lower estimates of their best constants between representation
//! norms.

pub mod admissibility;
mod optimize;
pub mod templates;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::RearrangementProfile;
use crate::numerics::gauss_legendre;
use crate::ri_norms::{norm_eval, norm_eval_sampled, NormSpec, SampledProfile};

pub use optimize::{
    best_constant_lower, best_constant_lower_with, refine_study, Classification, HardyEstimate, OptimizeOptions, RefineStudy,
};

/// `log^θ(1 + M / t^e)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LogWeight {
    pub theta: f64,
    pub scale: f64,
    pub e: f64,
}

impl LogWeight {
    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return if self.theta < 0.0 {
                0.0
            } else if self.theta > 0.0 {
                f64::INFINITY
            } else {
                1.0
            };
        }
        let te = if self.e == 1.0 { t } else { t.powf(self.e) };
        (self.scale / te).ln_1p().powf(self.theta)
    }

    fn validate(&self) -> Result<()> {
        if !(self.scale > 0.0 && self.scale.is_finite() && self.e > 0.0 && self.e.is_finite() && self.theta.is_finite()) {
            return Err(Error::InvalidInput(format!("log weight needs M > 0, e > 0 and finite ϑ, got {self:?}")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum IntegralPart {
    /// `∫_0^{t^b} f(ρ) dρ`
    Lower { b: f64 },
    /// `∫_{t^b}^{L} ρ^{−c} f(ρ) dρ`
    Upper { b: f64, c: f64 },
}

impl IntegralPart {
    fn b(&self) -> f64 {
        match *self {
            IntegralPart::Lower { b } | IntegralPart::Upper { b, .. } => b,
        }
    }
}

/// `t^a · log^ϑ(1 + M/t^e) · (integral part)`, with the inner variable cut
/// off at `L` (the source length when `cutoff` is `None`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KernelTerm {
    pub a: f64,
    pub log: Option<LogWeight>,
    pub part: IntegralPart,
    pub cutoff: Option<f64>,
}

impl KernelTerm {
    pub fn lower(a: f64, b: f64) -> Self {
        KernelTerm { a, log: None, part: IntegralPart::Lower { b }, cutoff: None }
    }

    pub fn upper(a: f64, b: f64, c: f64) -> Self {
        KernelTerm { a, log: None, part: IntegralPart::Upper { b, c }, cutoff: None }
    }

    pub fn with_log(mut self, theta: f64, scale: f64, e: f64) -> Self {
        self.log = Some(LogWeight { theta, scale, e });
        self
    }

    pub fn with_cutoff(mut self, l: f64) -> Self {
        self.cutoff = Some(l);
        self
    }

    fn validate(&self) -> Result<()> {
        let b = self.part.b();
        if !(b > 0.0 && b.is_finite()) || !self.a.is_finite() {
            return Err(Error::InvalidInput(format!("kernel term needs b > 0 and finite a, got {self:?}")));
        }
        if let IntegralPart::Upper { c, .. } = self.part {
            if !(c >= 0.0 && c.is_finite()) {
                return Err(Error::InvalidInput(format!("kernel term needs c ≥ 0, got {c}")));
            }
        }
        if let Some(l) = self.cutoff {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::InvalidInput(format!("kernel cutoff must be positive and finite, got {l}")));
            }
        }
        if let Some(w) = &self.log {
            w.validate()?;
        }
        Ok(())
    }

    fn outer(&self, t: f64) -> f64 {
        let p = if self.a == 0.0 { 1.0 } else { t.powf(self.a) };
        match &self.log {
            Some(w) => p * w.eval(t),
            None => p,
        }
    }
}

/// How several kernel terms enter the target norm.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum Combination {
    /// `‖Σ_k T_k f‖_Y`
    #[default]
    InsideNorm,
    /// `Σ_k ‖T_k f‖_Y`
    SumOfNorms,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HardyProblem {
    pub label: String,
    pub terms: Vec<KernelTerm>,
    pub combination: Combination,
    pub source: NormSpec,
    /// Extra weight inside the source norm, `‖f·w‖_X`; only for Lebesgue
    /// and `L^∞` sources.
    pub source_weight: Option<LogWeight>,
    pub target: NormSpec,
    pub l_src: f64,
    pub l_tgt: f64,
}

impl HardyProblem {
    pub fn new(terms: Vec<KernelTerm>, source: NormSpec, target: NormSpec, l_src: f64, l_tgt: f64) -> Self {
        HardyProblem {
            label: String::new(),
            terms,
            combination: Combination::InsideNorm,
            source,
            source_weight: None,
            target,
            l_src,
            l_tgt,
        }
    }

    /// `T f(t) = t^{−1} ∫_0^t f` with `X = Y = L^p(0, ℓ)`.
    pub fn classical(p: f64, l: f64) -> Self {
        let mut pr = HardyProblem::new(vec![KernelTerm::lower(-1.0, 1.0)], NormSpec::lebesgue(p), NormSpec::lebesgue(p), l, l);
        pr.label = format!("classical(p={p})");
        pr
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.l_src > 0.0 && self.l_src.is_finite() && self.l_tgt > 0.0 && self.l_tgt.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "Hardy problem lengths must be positive and finite (ℓ_src = {}, ℓ_tgt = {})",
                self.l_src, self.l_tgt
            )));
        }
        self.source.validate()?;
        self.target.validate()?;
        for t in &self.terms {
            t.validate()?;
        }
        if let Some(w) = &self.source_weight {
            w.validate()?;
            if !matches!(self.source, NormSpec::Lebesgue { .. } | NormSpec::LInf) {
                return Err(Error::InvalidInput("a weighted source norm must be Lebesgue or L∞".into()));
            }
        }
        Ok(())
    }

    fn target_spec(&self) -> NormSpec {
        match self.target {
            NormSpec::LorentzZygmund { mass: None, .. } | NormSpec::OrliczExp { mass: None, .. } => self.target.with_mass(self.l_tgt),
            t => t,
        }
    }

    fn source_spec(&self) -> NormSpec {
        match self.source {
            NormSpec::LorentzZygmund { mass: None, .. } | NormSpec::OrliczExp { mass: None, .. } => self.source.with_mass(self.l_src),
            s => s,
        }
    }
}

/// `∫_a^b ρ^{−c} dρ`, `0 ≤ a ≤ b`.
pub(crate) fn power_integral(a: f64, b: f64, c: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    if c == 0.0 {
        return b - a;
    }
    if a == 0.0 {
        return if c < 1.0 { b.powf(1.0 - c) / (1.0 - c) } else { f64::INFINITY };
    }
    if c == 1.0 {
        return (b / a).ln();
    }
    let k = 1.0 - c;
    -b.powf(k) * (k * (a / b).ln()).exp_m1() / k
}

/// `∫_0^x f` for a step profile.
fn cumulative(f: &RearrangementProfile, x: f64) -> f64 {
    let bp = f.breakpoints();
    let mut s = 0.0;
    for (i, (&v, &w)) in f.values().iter().zip(f.widths()).enumerate() {
        if bp[i + 1] <= x {
            s += v * w;
        } else {
            if x > bp[i] {
                s += v * (x - bp[i]);
            }
            break;
        }
    }
    s
}

/// `∫_x^L ρ^{−c} f`.
fn upper_integral(f: &RearrangementProfile, x: f64, l: f64, c: f64) -> f64 {
    let bp = f.breakpoints();
    let mut s = 0.0;
    for (i, &v) in f.values().iter().enumerate() {
        let lo = bp[i].max(x);
        let hi = bp[i + 1].min(l);
        if hi > lo && v != 0.0 {
            s += v * power_integral(lo, hi, c);
        }
    }
    s
}

fn term_value(term: &KernelTerm, f: &RearrangementProfile, l_src: f64, t: f64) -> f64 {
    let l = term.cutoff.map_or(l_src, |c| c.min(l_src)).min(f.domain_length());
    let inner = match term.part {
        IntegralPart::Lower { b } => cumulative(f, t.powf(b).min(l)),
        IntegralPart::Upper { b, c } => upper_integral(f, t.powf(b), l, c),
    };
    if inner == 0.0 {
        0.0
    } else {
        term.outer(t) * inner
    }
}

/// `Σ_k T_k f(t)`, evaluated exactly on the steps of `f`.
pub fn apply_kernel(problem: &HardyProblem, f: &RearrangementProfile, t: f64) -> Result<f64> {
    problem.validate()?;
    if !(t > 0.0 && t < problem.l_tgt) {
        return Err(Error::InvalidInput(format!("t = {t} lies outside (0, {})", problem.l_tgt)));
    }
    Ok(problem.terms.iter().map(|term| term_value(term, f, problem.l_src, t)).sum())
}

/// Cells per factor of two in the geometric grid.
const CELLS_PER_OCTAVE: f64 = 4.0;
/// Smallest grid node relative to the grid length.
const DEPTH_FLOOR: f64 = 1e-120;

/// Breakpoints `0, ℓ·2^{−(N−1)/4}, …, ℓ·2^{−1/4}, ℓ`. The depth is capped
/// where nodes would fall below `ℓ·1e−120`, so very large `N` yield fewer
/// cells; grids with the same `ℓ` are nested.
pub fn geometric_grid(l: f64, cells: usize) -> Vec<f64> {
    let max_cells = (-(DEPTH_FLOOR.log2()) * CELLS_PER_OCTAVE).floor() as usize + 1;
    let n = cells.clamp(1, max_cells);
    let mut bp = Vec::with_capacity(n + 1);
    bp.push(0.0);
    for k in (0..n - 1).rev() {
        bp.push(l * (-(k as f64 + 1.0) / CELLS_PER_OCTAVE).exp2());
    }
    bp.push(l);
    bp
}

struct TermCache {
    outer: Vec<f64>,
    /// Cell containing the (cut-off) inner endpoint of each node; `usize::MAX`
    /// past the cutoff for upper integrals.
    cell: Vec<usize>,
    /// Lower: `x − ρ_cell`; upper: `∫_x^{ρ_{cell+1}} ρ^{−c}`.
    frac: Vec<f64>,
    /// Upper integrals: per-cell `∫ ρ^{−c}` and the correction at the cutoff.
    cell_integral: Vec<f64>,
    cut: Option<(usize, f64)>,
    lower: bool,
}

/// Precomputed quadrature for a problem on a fixed source grid.
pub(crate) struct Evaluator {
    pub grid: Vec<f64>,
    pub widths: Vec<f64>,
    nodes_t: Vec<f64>,
    nodes_w: Vec<f64>,
    terms: Vec<TermCache>,
    target: NormSpec,
    source: NormSpec,
    source_weight: Option<(Vec<f64>, Vec<f64>)>,
    combination: Combination,
    l_tgt: f64,
}

fn locate(grid: &[f64], x: f64) -> usize {
    // cell i covers [grid[i], grid[i+1])
    let i = grid.partition_point(|&g| g <= x);
    i.saturating_sub(1).min(grid.len() - 2)
}

impl Evaluator {
    pub fn new(problem: &HardyProblem, grid: Vec<f64>) -> Result<Self> {
        problem.validate()?;
        let n = grid.len() - 1;
        let widths: Vec<f64> = grid.windows(2).map(|w| w[1] - w[0]).collect();
        let l_src = *grid.last().unwrap();

        // target pieces: source breakpoints pulled back through t = ρ^{1/b}
        let mut pts: Vec<f64> = vec![problem.l_tgt];
        for term in &problem.terms {
            let b = term.part.b();
            for &g in &grid[1..] {
                pts.push(g.powf(1.0 / b));
            }
            if let Some(c) = term.cutoff {
                pts.push(c.powf(1.0 / b));
            }
        }
        pts.retain(|&t| t > 0.0 && t <= problem.l_tgt);
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * b.abs());
        let ratio = (1.0 / CELLS_PER_OCTAVE).exp2();
        let mut filled: Vec<f64> = Vec::with_capacity(pts.len() * 2);
        let t_min = pts[0];
        for k in (1..=64).rev() {
            filled.push(t_min * (-(k as f64)).exp2());
        }
        let mut prev = t_min;
        filled.push(t_min);
        for &p in &pts[1..] {
            let mut x = prev * ratio;
            while x < p / ratio.sqrt() {
                filled.push(x);
                x *= ratio;
            }
            filled.push(p);
            prev = p;
        }
        let (gx, gw) = gauss_legendre(3);
        let mut nodes_t = Vec::with_capacity(filled.len() * 4);
        let mut nodes_w = Vec::with_capacity(filled.len() * 4);
        let mut lo = 0.0;
        for &hi in &filled {
            let (c, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
            for (x, w) in gx.iter().zip(&gw) {
                nodes_t.push(c + h * x);
                nodes_w.push(h * w);
            }
            // endpoint sample for suprema
            nodes_t.push(hi);
            nodes_w.push(0.0);
            lo = hi;
        }
        // the top endpoint belongs to no open piece
        if let Some(last) = nodes_t.last_mut() {
            *last = problem.l_tgt * (1.0 - 1e-15);
        }

        let mut terms = Vec::with_capacity(problem.terms.len());
        for term in &problem.terms {
            let l = term.cutoff.map_or(l_src, |c| c.min(l_src));
            let b = term.part.b();
            let mut outer = Vec::with_capacity(nodes_t.len());
            let mut cell = Vec::with_capacity(nodes_t.len());
            let mut frac = Vec::with_capacity(nodes_t.len());
            let (lower, c) = match term.part {
                IntegralPart::Lower { .. } => (true, 0.0),
                IntegralPart::Upper { c, .. } => (false, c),
            };
            for &t in &nodes_t {
                outer.push(term.outer(t));
                let x = if b == 1.0 { t } else { t.powf(b) };
                if lower {
                    let xe = x.min(l);
                    let i = locate(&grid, xe);
                    cell.push(i);
                    frac.push((xe - grid[i]).min(widths[i]));
                } else if x >= l {
                    cell.push(usize::MAX);
                    frac.push(0.0);
                } else {
                    let i = locate(&grid, x);
                    cell.push(i);
                    frac.push(power_integral(x, grid[i + 1], c));
                }
            }
            let cell_integral = if lower { Vec::new() } else { (0..n).map(|i| power_integral(grid[i], grid[i + 1], c)).collect() };
            let cut = if !lower && l < l_src {
                let i = locate(&grid, l);
                Some((i, power_integral(l, grid[i + 1], c)))
            } else {
                None
            };
            terms.push(TermCache { outer, cell, frac, cell_integral, cut, lower });
        }

        let source_weight = problem.source_weight.map(|w| {
            let p = match problem.source {
                NormSpec::Lebesgue { p } => p,
                _ => f64::INFINITY,
            };
            let sup: Vec<f64> = (0..n).map(|i| w.eval(grid[i]).max(w.eval(grid[i + 1]))).collect();
            let integral: Vec<f64> =
                if p.is_finite() { (0..n).map(|i| weighted_cell_integral(&w, p, grid[i], grid[i + 1])).collect() } else { Vec::new() };
            (sup, integral)
        });

        Ok(Evaluator {
            grid,
            widths,
            nodes_t,
            nodes_w,
            terms,
            target: problem.target_spec(),
            source: problem.source_spec(),
            source_weight,
            combination: problem.combination,
            l_tgt: problem.l_tgt,
        })
    }

    pub fn cells(&self) -> usize {
        self.widths.len()
    }

    #[cfg(test)]
    pub fn node_count(&self) -> usize {
        self.nodes_t.len()
    }

    /// Kernel term `k` applied to the step function with cell values `v`.
    pub fn kernel(&self, k: usize, v: &[f64]) -> Vec<f64> {
        let tc = &self.terms[k];
        let n = v.len();
        if tc.lower {
            let mut prefix = Vec::with_capacity(n + 1);
            let mut s = 0.0;
            prefix.push(0.0);
            for i in 0..n {
                s += v[i] * self.widths[i];
                prefix.push(s);
            }
            (0..self.nodes_t.len())
                .map(|j| {
                    let i = tc.cell[j];
                    let inner = prefix[i] + v[i] * tc.frac[j];
                    if inner == 0.0 {
                        0.0
                    } else {
                        tc.outer[j] * inner
                    }
                })
                .collect()
        } else {
            let mut suffix = vec![0.0; n + 1];
            for i in (0..n).rev() {
                let piece = if v[i] == 0.0 { 0.0 } else { v[i] * tc.cell_integral[i] };
                suffix[i] = suffix[i + 1] + piece;
            }
            let tail = tc.cut.map_or(0.0, |(i, part)| if v[i] == 0.0 { 0.0 } else { v[i] * part } + suffix[i + 1]);
            (0..self.nodes_t.len())
                .map(|j| {
                    let i = tc.cell[j];
                    if i == usize::MAX {
                        return 0.0;
                    }
                    let head = if v[i] == 0.0 { 0.0 } else { v[i] * tc.frac[j] };
                    let inner = head + suffix[i + 1] - tail;
                    if inner <= 0.0 {
                        0.0
                    } else {
                        tc.outer[j] * inner
                    }
                })
                .collect()
        }
    }

    fn sampled(&self, y: Vec<f64>) -> SampledProfile {
        SampledProfile { t: self.nodes_t.clone(), w: self.nodes_w.clone(), v: y, length: self.l_tgt }
    }

    pub fn target_norm(&self, ys: &[Vec<f64>]) -> f64 {
        let eval = |y: &[f64]| norm_eval_sampled(&self.target, &self.sampled(y.to_vec())).unwrap_or(f64::INFINITY);
        match self.combination {
            Combination::SumOfNorms => ys.iter().map(|y| eval(y)).sum(),
            Combination::InsideNorm => {
                if ys.len() == 1 {
                    return eval(&ys[0]);
                }
                let sum: Vec<f64> = (0..self.nodes_t.len()).map(|j| ys.iter().map(|y| y[j]).sum()).collect();
                eval(&sum)
            }
        }
    }

    pub fn source_norm(&self, v: &[f64]) -> f64 {
        if let Some((sup, integral)) = &self.source_weight {
            return match self.source {
                NormSpec::Lebesgue { p } if p.is_finite() => {
                    let vmax = v.iter().fold(0.0f64, |m, x| m.max(*x));
                    if vmax == 0.0 {
                        return 0.0;
                    }
                    let s = crate::numerics::pairwise_sum_by(v.len(), |i| (v[i] / vmax).powf(p) * integral[i]);
                    vmax * s.powf(1.0 / p)
                }
                _ => v.iter().zip(sup).fold(0.0f64, |m, (x, w)| if *x == 0.0 { m } else { m.max(x * w) }),
            };
        }
        match RearrangementProfile::new(self.grid.clone(), v.to_vec()) {
            Ok(p) => norm_eval(&self.source, &p).unwrap_or(f64::NAN),
            Err(_) => f64::NAN,
        }
    }

    /// `‖T f‖_Y / ‖f‖_X` with the kernel values already computed.
    pub fn ratio_with(&self, v: &[f64], ys: &[Vec<f64>]) -> f64 {
        let s = self.source_norm(v);
        if !(s > 0.0) {
            return f64::NAN;
        }
        self.target_norm(ys) / s
    }

    pub fn ratio(&self, v: &[f64]) -> f64 {
        let ys: Vec<Vec<f64>> = (0..self.terms.len()).map(|k| self.kernel(k, v)).collect();
        self.ratio_with(v, &ys)
    }

    /// Cell values of `f` sampled at cell midpoints (value at the left end
    /// of the first cell).
    pub fn project(&self, f: &RearrangementProfile) -> Vec<f64> {
        (0..self.cells())
            .map(|i| {
                let t = if i == 0 { 0.0 } else { 0.5 * (self.grid[i] + self.grid[i + 1]) };
                f.eval(t).unwrap_or(0.0)
            })
            .collect()
    }
}

/// `∫_lo^hi w(t)^p dt` by Gauss–Legendre on dyadic pieces in `ln t`.
fn weighted_cell_integral(w: &LogWeight, p: f64, lo: f64, hi: f64) -> f64 {
    let f = |s: f64| {
        let t = s.exp();
        t * w.eval(t).powf(p)
    };
    if lo > 0.0 {
        return crate::numerics::integrate_adaptive(f, lo.ln(), hi.ln(), 1e-10);
    }
    let s1 = hi.ln();
    crate::numerics::integrate_adaptive(f, s1 - 60.0, s1, 1e-10)
}

/// `‖T f‖_Y / ‖f‖_X` for a profile projected onto the geometric grid with
/// `grid_size` cells.
pub fn hardy_ratio(problem: &HardyProblem, f: &RearrangementProfile, grid_size: usize) -> Result<f64> {
    let ev = Evaluator::new(problem, geometric_grid(problem.l_src, grid_size))?;
    let v = ev.project(f);
    Ok(ev.ratio(&v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chi(a: f64) -> RearrangementProfile {
        RearrangementProfile::constant(1.0, a).unwrap()
    }

    #[test]
    fn kernel_examples() {
        let classical = HardyProblem::classical(2.0, 1.0);
        assert_eq!(apply_kernel(&classical, &RearrangementProfile::zero(1.0), 0.3).unwrap(), 0.0);
        assert!((apply_kernel(&classical, &chi(1.0), 0.5).unwrap() - 1.0).abs() < 1e-15);
        let up = HardyProblem::new(vec![KernelTerm::upper(0.0, 1.0, 0.5)], NormSpec::lebesgue(2.0), NormSpec::lebesgue(2.0), 1.0, 1.0);
        assert!((apply_kernel(&up, &chi(1.0), 0.25).unwrap() - 1.0).abs() < 1e-14);
        assert!(apply_kernel(&up, &chi(1.0), 1.5).is_err());
    }

    #[test]
    fn power_integral_cases() {
        assert!((power_integral(0.25, 1.0, 0.5) - 1.0).abs() < 1e-15);
        assert!((power_integral(1.0, std::f64::consts::E, 1.0) - 1.0).abs() < 1e-15);
        assert!(power_integral(0.0, 1.0, 1.5).is_infinite());
        let b = 1.0 + 1e-12;
        assert!(crate::numerics::rel_diff(power_integral(1.0, b, 2.5), b - 1.0) < 1e-10);
    }

    #[test]
    fn grids_are_nested_and_capped() {
        let g32 = geometric_grid(1.0, 32);
        let g128 = geometric_grid(1.0, 128);
        assert_eq!(g32.len(), 33);
        for x in &g32 {
            assert!(g128.contains(x));
        }
        let huge = geometric_grid(1.0, 100_000);
        assert!(huge[1] >= 1e-120 && huge.len() < 2000);
    }

    #[test]
    fn evaluator_matches_exact_kernel() {
        let pr = templates::red1bis(2.0, 2.0, NormSpec::lebesgue(1.5), NormSpec::lebesgue(6.0), 1.0, 1.0);
        let ev = Evaluator::new(&pr, geometric_grid(1.0, 64)).unwrap();
        let v: Vec<f64> = (0..ev.cells()).map(|i| (64 - i) as f64).collect();
        let prof = RearrangementProfile::new(ev.grid.clone(), v.clone()).unwrap();
        let y0 = ev.kernel(0, &v);
        let y1 = ev.kernel(1, &v);
        for j in (0..ev.node_count()).step_by(7) {
            let t = ev.nodes_t[j];
            if t >= 1.0 {
                continue;
            }
            let exact = apply_kernel(&pr, &prof, t).unwrap();
            assert!(crate::numerics::rel_diff(exact, y0[j] + y1[j]) < 1e-11, "t={t}: {exact} vs {}", y0[j] + y1[j]);
        }
    }

    #[test]
    fn quadrature_integrates_target_exactly_for_indicator() {
        // T χ_(0,1) = 1 on (0,1) for the classical kernel: ‖·‖_2 = 1, ‖f‖_2 = 1
        let pr = HardyProblem::classical(2.0, 1.0);
        let ev = Evaluator::new(&pr, geometric_grid(1.0, 32)).unwrap();
        let v = vec![1.0; ev.cells()];
        assert!((ev.ratio(&v) - 1.0).abs() < 1e-12);
    }
}
