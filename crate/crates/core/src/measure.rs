//! Discrete measure spaces, sampled functions and decreasing rearrangements.
//!
//! A [`SampledMeasureSpace`] is a finite collection of weighted atoms that
//! stands in for a non-atomic measure space; refining the atoms is the user's
//! accuracy control. Every rearrangement-invariant norm in the crate is
//! evaluated on the [`RearrangementProfile`] produced by [`rearrange`].

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::Domain;
use crate::numerics::pairwise_sum;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub id: String,
    pub weight: f64,
    pub position: Option<[f64; 3]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledMeasureSpace {
    atoms: Vec<Atom>,
    total_mass: f64,
}

impl SampledMeasureSpace {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        for (i, a) in atoms.iter().enumerate() {
            if !a.weight.is_finite() {
                return Err(Error::NonFinite { index: i, value: a.weight });
            }
            if a.weight < 0.0 {
                return Err(Error::InvalidInput(format!("atom {} has negative weight {}", a.id, a.weight)));
            }
            if let Some(p) = a.position {
                if p.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidInput(format!("atom {} has a non-finite position", a.id)));
                }
            }
        }
        let weights: Vec<f64> = atoms.iter().map(|a| a.weight).collect();
        let total_mass = pairwise_sum(&weights);
        Ok(SampledMeasureSpace { atoms, total_mass })
    }

    /// Atoms with ids `0..n` and the given weights, no positions.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        Self::new(weights.iter().enumerate().map(|(i, &w)| Atom { id: i.to_string(), weight: w, position: None }).collect())
    }

    /// Atoms placed at quadrature nodes.
    pub fn from_nodes(nodes: &[[f64; 3]], weights: &[f64]) -> Result<Self> {
        if nodes.len() != weights.len() {
            return Err(Error::InvalidInput("node and weight counts differ".into()));
        }
        Self::new(
            nodes.iter().zip(weights).enumerate().map(|(i, (p, &w))| Atom { id: i.to_string(), weight: w, position: Some(*p) }).collect(),
        )
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn weights(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.weight).collect()
    }

    /// Parse the text format: one atom per line, `id,weight[,x,y[,z]]`.
    /// Blank lines and `#` comments are ignored.
    pub fn read_text<R: Read>(reader: R) -> Result<Self> {
        let mut rdr =
            csv::ReaderBuilder::new().has_headers(false).flexible(true).comment(Some(b'#')).trim(csv::Trim::All).from_reader(reader);
        let mut atoms = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() == 1 && rec[0].is_empty() {
                continue;
            }
            if !(rec.len() == 2 || rec.len() == 4 || rec.len() == 5) {
                return Err(Error::Parse(format!("line {}: expected id,weight[,x,y[,z]] but found {} fields", line + 1, rec.len())));
            }
            let num = |k: usize| -> Result<f64> {
                rec[k].parse::<f64>().map_err(|e| Error::Parse(format!("line {}: field {}: {e}", line + 1, k + 1)))
            };
            let weight = num(1)?;
            let position = match rec.len() {
                4 => Some([num(2)?, num(3)?, 0.0]),
                5 => Some([num(2)?, num(3)?, num(4)?]),
                _ => None,
            };
            atoms.push(Atom { id: rec[0].to_string(), weight, position });
        }
        Self::new(atoms)
    }
}

/// A real function sampled on the atoms of a space.
#[derive(Clone, Debug)]
pub struct SampledFunction<'a> {
    space: &'a SampledMeasureSpace,
    values: Vec<f64>,
}

impl<'a> SampledFunction<'a> {
    pub fn new(space: &'a SampledMeasureSpace, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::InvalidInput(format!("function has {} values but the space has {} atoms", values.len(), space.len())));
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(SampledFunction { space, values })
    }

    pub fn space(&self) -> &SampledMeasureSpace {
        self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Nonincreasing nonnegative step function on `(0, domain_length)`.
///
/// Step `i` carries `values[i]` on `[breakpoints[i], breakpoints[i+1])`.
/// Widths are stored alongside the breakpoints so that Lebesgue-type norms
/// do not pay the cancellation of differencing cumulative sums.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RearrangementProfile {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    widths: Vec<f64>,
}

impl RearrangementProfile {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.len() != values.len() + 1 {
            return Err(Error::InvalidInput("profile needs exactly one more breakpoint than values".into()));
        }
        if breakpoints[0] != 0.0 {
            return Err(Error::InvalidInput("profile must start at t = 0".into()));
        }
        let widths: Vec<f64> = breakpoints.windows(2).map(|w| w[1] - w[0]).collect();
        Self::check(&breakpoints, &values, &widths)?;
        Ok(RearrangementProfile { breakpoints, values, widths })
    }

    /// Build from step widths (must be positive) and nonincreasing values.
    pub fn from_widths(widths: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if widths.len() != values.len() {
            return Err(Error::InvalidInput("widths and values differ in length".into()));
        }
        let mut breakpoints = Vec::with_capacity(widths.len() + 1);
        let mut acc = 0.0;
        breakpoints.push(0.0);
        for w in &widths {
            acc += w;
            breakpoints.push(acc);
        }
        Self::check(&breakpoints, &values, &widths)?;
        Ok(RearrangementProfile { breakpoints, values, widths })
    }

    fn check(breakpoints: &[f64], values: &[f64], widths: &[f64]) -> Result<()> {
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { index: i, value: v });
            }
            if v < 0.0 {
                return Err(Error::InvalidInput(format!("profile value {v} is negative")));
            }
            if i > 0 && v > values[i - 1] {
                return Err(Error::InvalidInput(format!("profile increases at step {i}")));
            }
        }
        for (i, &w) in widths.iter().enumerate() {
            if !(w > 0.0 && w.is_finite()) || breakpoints[i + 1] <= breakpoints[i] {
                return Err(Error::InvalidInput(format!("breakpoints not strictly increasing at step {i}")));
            }
        }
        Ok(())
    }

    /// Profile of the zero function on `(0, length)`.
    pub fn zero(length: f64) -> Self {
        if length > 0.0 {
            RearrangementProfile { breakpoints: vec![0.0, length], values: vec![0.0], widths: vec![length] }
        } else {
            RearrangementProfile { breakpoints: vec![0.0], values: vec![], widths: vec![] }
        }
    }

    /// `value` on `[0, length)`.
    pub fn constant(value: f64, length: f64) -> Result<Self> {
        Self::new(vec![0.0, length], vec![value])
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    pub fn steps(&self) -> usize {
        self.values.len()
    }

    pub fn domain_length(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    pub fn sup(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.sup() == 0.0
    }

    /// Step value at `t`; zero beyond the domain.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::InvalidInput(format!("profile evaluated at negative t = {t}")));
        }
        // first breakpoint strictly greater than t
        let idx = self.breakpoints.partition_point(|&b| b <= t);
        if idx == 0 || idx > self.values.len() {
            return Ok(0.0);
        }
        Ok(self.values[idx - 1])
    }

    /// Lebesgue measure of `{t : profile(t) > tau}`.
    pub fn distribution(&self, tau: f64) -> f64 {
        let w: Vec<f64> = self.values.iter().zip(&self.widths).filter(|(v, _)| **v > tau).map(|(_, w)| *w).collect();
        pairwise_sum(&w)
    }

    /// `c * profile`, `c >= 0`.
    pub fn scaled(&self, c: f64) -> Self {
        assert!(c >= 0.0 && c.is_finite());
        RearrangementProfile {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
            widths: self.widths.clone(),
        }
    }

    /// The profile viewed as a function on a space whose atoms are its steps.
    pub fn as_space(&self) -> SampledMeasureSpace {
        SampledMeasureSpace::from_weights(&self.widths).expect("profile widths are valid weights")
    }

    /// Write as CSV with header `t_break,value`; each row gives the right
    /// endpoint of a step and the value carried on it.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["t_break", "value"])?;
        for (t, v) in self.breakpoints[1..].iter().zip(&self.values) {
            wtr.write_record([format!("{t:e}"), format!("{v:e}")])?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(r);
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "t_break" || &headers[1] != "value" {
            return Err(Error::Parse("profile CSV must have header `t_break,value`".into()));
        }
        let mut breakpoints = vec![0.0];
        let mut values = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let parse = |k: usize| -> Result<f64> { rec[k].parse::<f64>().map_err(|e| Error::Parse(format!("row {}: {e}", i + 1))) };
            breakpoints.push(parse(0)?);
            values.push(parse(1)?);
        }
        Self::new(breakpoints, values)
    }
}

/// Decreasing rearrangement of `|f|` with respect to the atom weights.
/// Equal values are merged into one step; zero-weight atoms are ignored.
pub fn rearrange(f: &SampledFunction<'_>) -> Result<RearrangementProfile> {
    let atoms = f.space().atoms();
    let mut pairs: Vec<(f64, f64)> =
        f.values().iter().zip(atoms).filter(|(_, a)| a.weight > 0.0).map(|(v, a)| (v.abs(), a.weight)).collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut values = Vec::new();
    let mut widths = Vec::new();
    let mut i = 0;
    while i < pairs.len() {
        let v = pairs[i].0;
        let mut j = i;
        while j < pairs.len() && pairs[j].0 == v {
            j += 1;
        }
        let w: Vec<f64> = pairs[i..j].iter().map(|p| p.1).collect();
        values.push(v);
        widths.push(pairwise_sum(&w));
        i = j;
    }
    let mut profile = RearrangementProfile::from_widths(widths, values)?;
    // pin the domain length to the space's total mass
    let n = profile.breakpoints.len();
    if n >= 2 && f.space().total_mass() > profile.breakpoints[n - 2] {
        profile.breakpoints[n - 1] = f.space().total_mass();
    }
    Ok(profile)
}

/// `m({|f| > tau})`.
pub fn distribution(f: &SampledFunction<'_>, tau: f64) -> Result<f64> {
    if !(tau >= 0.0) {
        return Err(Error::InvalidInput(format!("distribution threshold {tau} must be nonnegative")));
    }
    let w: Vec<f64> = f.values().iter().zip(f.space().atoms()).filter(|(v, _)| v.abs() > tau).map(|(_, a)| a.weight).collect();
    Ok(pairwise_sum(&w))
}

/// Step lookup; convenience wrapper over [`RearrangementProfile::eval`].
pub fn profile_eval(p: &RearrangementProfile, t: f64) -> Result<f64> {
    p.eval(t)
}

/// Sampled lower estimate of the upper Ahlfors constant.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AhlforsEstimate {
    pub constant: f64,
    pub center: Option<[f64; 3]>,
    pub radius: Option<f64>,
    pub centers_used: usize,
    pub radii_used: usize,
}

/// `max μ(B_r(x) ∩ Ω) / r^α` over the sampled centers and radii.
///
/// Centers outside `domain` (when given) are dropped. The estimate only grows
/// as the center and radius sets grow.
pub fn ahlfors_constant(
    mu: &SampledMeasureSpace,
    domain: Option<&Domain>,
    alpha: f64,
    centers: &[[f64; 3]],
    radii: &[f64],
    exec: Execution,
) -> Result<AhlforsEstimate> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidInput(format!("alpha = {alpha} must be positive")));
    }
    if let Some(d) = domain {
        if alpha > d.dim() as f64 {
            return Err(Error::InvalidInput(format!("alpha = {alpha} exceeds the dimension {}", d.dim())));
        }
    }
    if centers.is_empty() || radii.is_empty() {
        return Err(Error::InvalidInput("ahlfors_constant needs nonempty center and radius sets".into()));
    }
    if radii.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::InvalidInput("radii must be positive".into()));
    }
    let mut positions = Vec::with_capacity(mu.len());
    for a in mu.atoms() {
        match a.position {
            Some(p) => positions.push((p, a.weight)),
            None => return Err(Error::InvalidInput(format!("atom {} has no position", a.id))),
        }
    }
    let used: Vec<[f64; 3]> = centers.iter().copied().filter(|c| domain.is_none_or(|d| d.contains(*c))).collect();
    if used.is_empty() {
        return Err(Error::InvalidInput("no center lies inside the domain".into()));
    }
    let per_center = exec.map(&used, |c| {
        let mut best: (f64, f64) = (0.0, radii[0]);
        for &r in radii {
            let r2 = r * r;
            let inside: Vec<f64> = positions
                .iter()
                .filter(|(p, _)| {
                    let d = [p[0] - c[0], p[1] - c[1], p[2] - c[2]];
                    d[0] * d[0] + d[1] * d[1] + d[2] * d[2] <= r2
                })
                .map(|(_, w)| *w)
                .collect();
            let ratio = pairwise_sum(&inside) / r.powf(alpha);
            if ratio > best.0 {
                best = (ratio, r);
            }
        }
        best
    });
    let mut out = AhlforsEstimate { constant: 0.0, center: None, radius: None, centers_used: used.len(), radii_used: radii.len() };
    for (c, (ratio, r)) in used.iter().zip(per_center) {
        if ratio > out.constant {
            out.constant = ratio;
            out.center = Some(*c);
            out.radius = Some(r);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(weights: &[f64]) -> SampledMeasureSpace {
        SampledMeasureSpace::from_weights(weights).unwrap()
    }

    #[test]
    fn constant_function_rearranges_to_one_step() {
        let s = space(&[0.5, 0.5, 1.0]);
        let f = SampledFunction::new(&s, vec![3.0, -3.0, 3.0]).unwrap();
        let p = rearrange(&f).unwrap();
        assert_eq!(p.values(), &[3.0]);
        assert_eq!(p.breakpoints(), &[0.0, 2.0]);
    }

    #[test]
    fn indicator_rearrangement() {
        let s = space(&[0.25, 0.25, 0.5]);
        let f = SampledFunction::new(&s, vec![1.0, 1.0, 0.0]).unwrap();
        let p = rearrange(&f).unwrap();
        assert_eq!(p.values(), &[1.0, 0.0]);
        assert_eq!(p.breakpoints(), &[0.0, 0.5, 1.0]);
    }

    #[test]
    fn three_level_example() {
        let s = space(&[0.5, 0.25, 0.25]);
        let f = SampledFunction::new(&s, vec![1.0, 4.0, 2.0]).unwrap();
        let p = rearrange(&f).unwrap();
        assert_eq!(p.values(), &[4.0, 2.0, 1.0]);
        assert_eq!(p.breakpoints(), &[0.0, 0.25, 0.5, 1.0]);
        assert_eq!(distribution(&f, 1.5).unwrap(), 0.5);
        assert_eq!(p.eval(0.1).unwrap(), 4.0);
        assert_eq!(p.eval(0.75).unwrap(), 1.0);
        assert_eq!(p.eval(5.0).unwrap(), 0.0);
        assert!(p.eval(-1.0).is_err());
    }

    #[test]
    fn distribution_uses_strict_inequality() {
        let s = space(&[1.0, 1.0]);
        let f = SampledFunction::new(&s, vec![3.0, 3.0]).unwrap();
        assert_eq!(distribution(&f, 2.0).unwrap(), 2.0);
        assert_eq!(distribution(&f, 3.0).unwrap(), 0.0);
        assert!(distribution(&f, -1.0).is_err());
    }

    #[test]
    fn non_finite_values_are_rejected() {
        let s = space(&[1.0]);
        assert!(matches!(SampledFunction::new(&s, vec![f64::NAN]), Err(Error::NonFinite { .. })));
        assert!(SampledMeasureSpace::from_weights(&[-1.0]).is_err());
    }

    #[test]
    fn rearrangement_is_idempotent() {
        let s = space(&[0.1, 0.2, 0.3, 0.4, 0.05]);
        let f = SampledFunction::new(&s, vec![2.0, -5.0, 2.0, 0.5, 7.0]).unwrap();
        let p = rearrange(&f).unwrap();
        let ps = p.as_space();
        let again = rearrange(&SampledFunction::new(&ps, p.values().to_vec()).unwrap()).unwrap();
        assert_eq!(p, again);
    }

    #[test]
    fn profile_csv_round_trip() {
        let p = RearrangementProfile::new(vec![0.0, 0.25, 1.0], vec![2.0, 1.0]).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let q = RearrangementProfile::read_csv(buf.as_slice()).unwrap();
        assert_eq!(p.values(), q.values());
        assert_eq!(p.breakpoints(), q.breakpoints());
    }

    #[test]
    fn space_text_format() {
        let text = "# atoms\na,0.5,0,0\nb,0.25,1,0,2\nc,0.25\n";
        let s = SampledMeasureSpace::read_text(text.as_bytes()).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.total_mass(), 1.0);
        assert_eq!(s.atoms()[1].position, Some([1.0, 0.0, 2.0]));
        assert_eq!(s.atoms()[2].position, None);
        assert!(SampledMeasureSpace::read_text("a,1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn zero_measure_has_zero_ahlfors_constant() {
        let s = SampledMeasureSpace::from_nodes(&[[0.5, 0.5, 0.0]], &[0.0]).unwrap();
        let e = ahlfors_constant(&s, None, 2.0, &[[0.5, 0.5, 0.0]], &[0.1], Execution::Sequential).unwrap();
        assert_eq!(e.constant, 0.0);
        assert!(ahlfors_constant(&s, None, 2.0, &[], &[0.1], Execution::Sequential).is_err());
    }

    #[test]
    fn arc_length_has_ahlfors_constant_two() {
        let n = 2000;
        let nodes: Vec<[f64; 3]> = (0..n).map(|i| [(i as f64 + 0.5) / n as f64, 0.5, 0.0]).collect();
        let w = vec![1.0 / n as f64; n];
        let s = SampledMeasureSpace::from_nodes(&nodes, &w).unwrap();
        let centers: Vec<[f64; 3]> = (1..10).map(|i| [i as f64 / 10.0, 0.5, 0.0]).collect();
        let radii = [0.01, 0.02, 0.05, 0.1];
        let e = ahlfors_constant(&s, None, 1.0, &centers, &radii, Execution::Sequential).unwrap();
        assert!((e.constant - 2.0).abs() < 0.02, "{}", e.constant);
    }
}
