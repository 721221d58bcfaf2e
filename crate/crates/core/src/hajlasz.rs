//! Upper gradients of boundary traces in the sense of
//! `|φ(x) − φ(y)| ≤ |x − y| (g(x) + g(y))`, and the seminorm they induce.

use std::io::Read;

use minilp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem, Variable};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::{BoundarySample, Point};
use crate::measure::{rearrange, SampledFunction, SampledMeasureSpace};
use crate::ri_norms::{norm_eval, NormSpec};

const MIN_DISTANCE: f64 = 1e-12;

/// Trace values on weighted boundary points.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryTrace {
    points: Vec<Point>,
    weights: Vec<f64>,
    values: Vec<f64>,
}

fn dist(a: &Point, b: &Point) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

impl BoundaryTrace {
    pub fn new(points: Vec<Point>, weights: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if points.len() != values.len() || points.len() != weights.len() {
            return Err(Error::InvalidInput(format!(
                "trace has {} points, {} weights and {} values",
                points.len(),
                weights.len(),
                values.len()
            )));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index: i, value: *v });
        }
        if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !(**w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidInput(format!("boundary weight {w} at {i} must be positive")));
        }
        Ok(BoundaryTrace { points, weights, values })
    }

    pub fn from_sample(sample: &BoundarySample, values: Vec<f64>) -> Result<Self> {
        BoundaryTrace::new(sample.points.clone(), sample.weights.clone(), values)
    }

    /// Unit weights.
    pub fn unweighted(points: Vec<Point>, values: Vec<f64>) -> Result<Self> {
        let w = vec![1.0; points.len()];
        BoundaryTrace::new(points, w, values)
    }

    /// CSV with a header naming `x`, `y`, optional `z`, `value` and
    /// optional `weight` (default 1) columns, in any order.
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(r);
        let head = rdr.headers()?.clone();
        let col = |name: &str| head.iter().position(|h| h.eq_ignore_ascii_case(name));
        let (x, y, v) = match (col("x"), col("y"), col("value")) {
            (Some(x), Some(y), Some(v)) => (x, y, v),
            _ => return Err(Error::Parse("trace header needs x, y and value columns".into())),
        };
        let (z, w) = (col("z"), col("weight"));
        let (mut points, mut weights, mut values) = (Vec::new(), Vec::new(), Vec::new());
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let num = |k: usize| -> Result<f64> {
                rec.get(k).unwrap_or("").parse::<f64>().map_err(|e| Error::Parse(format!("trace row {}: column {}: {e}", line + 1, k + 1)))
            };
            points.push([num(x)?, num(y)?, z.map(num).transpose()?.unwrap_or(0.0)]);
            values.push(num(v)?);
            weights.push(w.map(num).transpose()?.unwrap_or(1.0));
        }
        BoundaryTrace::new(points, weights, values)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn scaled(&self, c: f64) -> Self {
        BoundaryTrace { values: self.values.iter().map(|v| c * v).collect(), ..self.clone() }
    }

    fn quotient(&self, i: usize, j: usize) -> f64 {
        (self.values[i] - self.values[j]).abs() / dist(&self.points[i], &self.points[j])
    }

    fn check_points(&self) -> Result<()> {
        if self.len() < 2 {
            return Err(Error::InvalidInput("an upper gradient needs at least 2 samples".into()));
        }
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                if dist(&self.points[i], &self.points[j]) <= MIN_DISTANCE {
                    return Err(Error::InvalidInput(format!("samples {i} and {j} coincide")));
                }
            }
        }
        Ok(())
    }
}

/// `g_i = max_j |φ_i − φ_j| / |x_i − x_j|`, always an upper gradient.
pub fn lipschitz_quotient_gradient(tr: &BoundaryTrace) -> Result<Vec<f64>> {
    lipschitz_quotient_gradient_with(tr, Execution::Parallel)
}

pub fn lipschitz_quotient_gradient_with(tr: &BoundaryTrace, exec: Execution) -> Result<Vec<f64>> {
    tr.check_points()?;
    Ok(exec.map_range(tr.len(), |i| (0..tr.len()).filter(|&j| j != i).map(|j| tr.quotient(i, j)).fold(0.0, f64::max)))
}

/// Smallest `|x_i − x_j| (g_i + g_j) − |φ_i − φ_j|` over all pairs.
pub fn min_slack(tr: &BoundaryTrace, g: &[f64]) -> f64 {
    let mut m = f64::INFINITY;
    for i in 0..tr.len() {
        for j in i + 1..tr.len() {
            let s = dist(&tr.points[i], &tr.points[j]) * (g[i] + g[j]) - (tr.values[i] - tr.values[j]).abs();
            m = m.min(s);
        }
    }
    m
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    /// `max_i g_i`
    Sup,
    /// `Σ_i w_i g_i`
    Integral,
}

impl std::str::FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sup" => Ok(Objective::Sup),
            "int" | "integral" => Ok(Objective::Integral),
            _ => Err(Error::Parse(format!("objective `{s}` must be `sup` or `int`"))),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct LpOptions {
    /// Largest accepted sample count.
    pub budget: usize,
    /// Candidate pairs kept per sample in the first solve.
    pub top_k: usize,
    pub exec: Execution,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions { budget: 2000, top_k: 16, exec: Execution::Parallel }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct UpperGradient {
    pub g: Vec<f64>,
    pub objective: Objective,
    pub value: f64,
    pub constraints: usize,
    pub rounds: usize,
    pub min_slack: f64,
}

fn objective_value(obj: Objective, tr: &BoundaryTrace, g: &[f64]) -> f64 {
    match obj {
        Objective::Sup => g.iter().copied().fold(0.0, f64::max),
        Objective::Integral => crate::numerics::pairwise_sum_by(g.len(), |i| tr.weights[i] * g[i]),
    }
}

/// Solves `min ‖g‖` subject to the pairwise constraints by row generation:
/// a pruned pair set first, then every violated pair until none remain.
pub fn minimal_upper_gradient(tr: &BoundaryTrace, objective: Objective, opts: &LpOptions) -> Result<UpperGradient> {
    let n = tr.len();
    if n > opts.budget {
        return Err(Error::Budget(format!("{n} samples exceed the LP budget of {}", opts.budget)));
    }
    let gl = lipschitz_quotient_gradient_with(tr, opts.exec)?;
    let scale = gl.iter().copied().fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(UpperGradient { g: vec![0.0; n], objective, value: 0.0, constraints: 0, rounds: 0, min_slack: 0.0 });
    }
    let q = |i: usize, j: usize| tr.quotient(i, j) / scale;
    let gl: Vec<f64> = gl.iter().map(|g| g / scale).collect();

    // pairs whose quotient-gradient slack is within 10× the binding scale
    let candidates: Vec<Vec<(usize, f64)>> = opts.exec.map_range(n, |i| {
        let mut c: Vec<(usize, f64)> =
            (i + 1..n).map(|j| (j, q(i, j))).filter(|&(j, qij)| qij > 0.0 && gl[i] + gl[j] <= 11.0 * qij).collect();
        c.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        c.truncate(opts.top_k);
        c
    });

    let mut pb = Problem::new(OptimizationDirection::Minimize);
    let t = (objective == Objective::Sup).then(|| pb.add_var(1.0, (0.0, f64::INFINITY)));
    let wmax = tr.weights.iter().copied().fold(0.0, f64::max);
    let vars: Vec<Variable> = (0..n)
        .map(|i| {
            let c = if t.is_none() { tr.weights[i] / wmax } else { 0.0 };
            pb.add_var(c, (0.0, f64::INFINITY))
        })
        .collect();
    if let Some(t) = t {
        for &v in &vars {
            pb.add_constraint([(t, 1.0), (v, -1.0)], ComparisonOp::Ge, 0.0);
        }
    }
    let pair = |i: usize, j: usize| -> LinearExpr {
        let mut e = LinearExpr::empty();
        e.add(vars[i], 1.0);
        e.add(vars[j], 1.0);
        e
    };
    let mut used = 0;
    let mut in_set = std::collections::HashSet::new();
    for (i, c) in candidates.iter().enumerate() {
        for &(j, qij) in c {
            pb.add_constraint(pair(i, j), ComparisonOp::Ge, qij);
            in_set.insert((i, j));
            used += 1;
        }
    }
    let mut sol = pb.solve().map_err(|e| Error::Internal(format!("LP solver failed: {e}")))?;
    let mut rounds = 1;
    loop {
        let g: Vec<f64> = vars.iter().map(|v| sol[*v]).collect();
        let violated: Vec<Vec<(usize, usize, f64)>> = opts.exec.map_range(n, |i| {
            (i + 1..n)
                .filter_map(|j| {
                    let qij = q(i, j);
                    (g[i] + g[j] < qij - 1e-9).then_some((i, j, qij))
                })
                .collect()
        });
        let mut violated: Vec<(usize, usize, f64)> =
            violated.into_iter().flatten().filter(|(i, j, _)| !in_set.contains(&(*i, *j))).collect();
        if violated.is_empty() || rounds > 50 {
            break;
        }
        violated.sort_by(|a, b| b.2.total_cmp(&a.2).then((a.0, a.1).cmp(&(b.0, b.1))));
        violated.truncate(4 * n);
        for (i, j, qij) in violated {
            sol = sol.add_constraint(pair(i, j), ComparisonOp::Ge, qij).map_err(|e| Error::Internal(format!("LP solver failed: {e}")))?;
            in_set.insert((i, j));
            used += 1;
        }
        rounds += 1;
    }
    let mut g: Vec<f64> = vars.iter().map(|v| sol[*v].max(0.0) * scale).collect();
    // restore exact feasibility lost to solver tolerances
    let mut worst = 1.0f64;
    for i in 0..n {
        for j in i + 1..n {
            let need = (tr.values[i] - tr.values[j]).abs();
            let have = dist(&tr.points[i], &tr.points[j]) * (g[i] + g[j]);
            if need > 0.0 && have < need {
                worst = worst.max(if have > 0.0 { need / have } else { f64::INFINITY });
            }
        }
    }
    if worst.is_infinite() {
        return Err(Error::Internal("LP solution leaves a pair uncovered".into()));
    }
    if worst > 1.0 {
        for x in &mut g {
            *x *= worst * (1.0 + 4.0 * f64::EPSILON);
        }
    }
    let value = objective_value(objective, tr, &g);
    let min_slack = min_slack(tr, &g);
    Ok(UpperGradient { g, objective, value, constraints: used, rounds, min_slack })
}

#[derive(Clone, Debug, Serialize)]
pub struct SeminormReport {
    pub value: f64,
    /// Objective whose optimizer gave the reported value.
    pub objective: Objective,
    pub sup_value: f64,
    pub integral_value: f64,
}

fn norm_of(tr: &BoundaryTrace, g: &[f64], spec: &NormSpec) -> Result<f64> {
    let space = SampledMeasureSpace::from_weights(&tr.weights)?;
    let f = SampledFunction::new(&space, g.to_vec())?;
    norm_eval(spec, &rearrange(&f)?)
}

/// Upper bound on `inf ‖g‖_X` over upper gradients: the smaller of `X`
/// evaluated at the sup- and integral-optimal gradients.
pub fn seminorm(tr: &BoundaryTrace, spec: &NormSpec, opts: &LpOptions) -> Result<SeminormReport> {
    spec.validate()?;
    let a = minimal_upper_gradient(tr, Objective::Sup, opts)?;
    let b = minimal_upper_gradient(tr, Objective::Integral, opts)?;
    let va = norm_of(tr, &a.g, spec)?;
    let vb = norm_of(tr, &b.g, spec)?;
    let (value, objective) = if vb < va { (vb, Objective::Integral) } else { (va, Objective::Sup) };
    Ok(SeminormReport { value, objective, sup_value: va, integral_value: vb })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_csv_columns_by_name() {
        let t = BoundaryTrace::read_csv("value,y,x,weight\n1,0,0,0.5\n3,0,2,0.5\n".as_bytes()).unwrap();
        assert_eq!(t.points()[1], [2.0, 0.0, 0.0]);
        assert_eq!(t.values(), &[1.0, 3.0]);
        assert_eq!(t.weights(), &[0.5, 0.5]);
        assert!(BoundaryTrace::read_csv("x,value\n0,1\n".as_bytes()).is_err());
    }

    fn line(n: usize, a: f64) -> BoundaryTrace {
        let pts: Vec<Point> = (0..n).map(|i| [i as f64 / (n - 1) as f64, 0.0, 0.0]).collect();
        let vals = pts.iter().map(|p| a * p[0]).collect();
        BoundaryTrace::new(pts, vec![1.0 / n as f64; n], vals).unwrap()
    }

    #[test]
    fn quotient_examples() {
        let g = lipschitz_quotient_gradient(&line(10, 3.0)).unwrap();
        assert!(g.iter().all(|x| (x - 3.0).abs() < 1e-12));
        let two = BoundaryTrace::unweighted(vec![[0.0; 3], [2.0, 0.0, 0.0]], vec![0.0, 1.0]).unwrap();
        assert_eq!(lipschitz_quotient_gradient(&two).unwrap(), vec![0.5, 0.5]);
        let dup = BoundaryTrace::unweighted(vec![[0.0; 3], [0.0; 3]], vec![0.0, 1.0]).unwrap();
        assert!(lipschitz_quotient_gradient(&dup).is_err());
    }

    #[test]
    fn linear_sup_is_half_slope() {
        let tr = line(64, -2.5);
        let r = minimal_upper_gradient(&tr, Objective::Sup, &LpOptions::default()).unwrap();
        assert!((r.value - 1.25).abs() < 1e-6, "{}", r.value);
        assert!(r.min_slack >= -1e-9);
    }

    #[test]
    fn two_point_integral() {
        let tr = BoundaryTrace::unweighted(vec![[0.0; 3], [0.5, 0.0, 0.0]], vec![0.0, 1.0]).unwrap();
        let r = minimal_upper_gradient(&tr, Objective::Integral, &LpOptions::default()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn constant_trace_is_zero() {
        let tr = BoundaryTrace::unweighted(vec![[0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], vec![4.0; 3]).unwrap();
        assert_eq!(seminorm(&tr, &NormSpec::LInf, &LpOptions::default()).unwrap().value, 0.0);
    }

    #[test]
    fn budget_enforced() {
        let tr = line(20, 1.0);
        let opts = LpOptions { budget: 10, ..Default::default() };
        assert!(matches!(minimal_upper_gradient(&tr, Objective::Sup, &opts), Err(Error::Budget(_))));
    }
}
