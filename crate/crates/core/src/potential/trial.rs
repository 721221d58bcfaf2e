use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{Domain, Point};

pub type Mat3 = [[f64; 3]; 3];

/// Scalar trial families with closed-form derivatives.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    /// `Σ c·(x−x₀)^i (y−y₀)^j (z−z₀)^k`
    Polynomial { terms: Vec<(f64, [u32; 3])>, center: Point },
    /// `A·exp(−s|x−x₀|²)`
    Bump { amp: f64, s: f64, center: Point },
    /// `A·|x−x₀|^β`
    DistancePower { amp: f64, beta: f64, center: Point },
    /// `A·sin(k·x + φ)`
    Oscillatory { amp: f64, k: Point, phase: f64 },
}

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn powu(x: f64, k: u32) -> f64 {
    if k == 0 {
        1.0
    } else {
        x.powi(k as i32)
    }
}

impl Scalar {
    /// Value, gradient and Hessian at `x`.
    pub fn jet(&self, x: Point) -> (f64, Point, Mat3) {
        match self {
            Scalar::Polynomial { terms, center } => {
                let d = sub(x, *center);
                let (mut v, mut g, mut h) = (0.0, [0.0; 3], [[0.0; 3]; 3]);
                for &(c, e) in terms {
                    let mono = |de: [i32; 3]| -> f64 {
                        let mut coef = c;
                        let mut out = 1.0;
                        for a in 0..3 {
                            let k = e[a] as i32;
                            let mut kk = k;
                            for _ in 0..de[a] {
                                coef *= kk as f64;
                                kk -= 1;
                            }
                            if kk < 0 || coef == 0.0 {
                                return 0.0;
                            }
                            out *= powu(d[a], kk as u32);
                        }
                        coef * out
                    };
                    v += mono([0, 0, 0]);
                    for a in 0..3 {
                        let mut de = [0; 3];
                        de[a] = 1;
                        g[a] += mono(de);
                        for b in 0..3 {
                            let mut de2 = de;
                            de2[b] += 1;
                            h[a][b] += mono(de2);
                        }
                    }
                }
                (v, g, h)
            }
            Scalar::Bump { amp, s, center } => {
                let d = sub(x, *center);
                let f = amp * (-s * dot(d, d)).exp();
                let g = [-2.0 * s * d[0] * f, -2.0 * s * d[1] * f, -2.0 * s * d[2] * f];
                let mut h = [[0.0; 3]; 3];
                for a in 0..3 {
                    for b in 0..3 {
                        h[a][b] = f * (4.0 * s * s * d[a] * d[b] - if a == b { 2.0 * s } else { 0.0 });
                    }
                }
                (f, g, h)
            }
            Scalar::DistancePower { amp, beta, center } => {
                let d = sub(x, *center);
                let r2 = dot(d, d);
                if r2 == 0.0 {
                    return (0.0, [0.0; 3], [[0.0; 3]; 3]);
                }
                let r = r2.sqrt();
                let f = amp * r.powf(*beta);
                let c1 = amp * beta * r.powf(beta - 2.0);
                let g = [c1 * d[0], c1 * d[1], c1 * d[2]];
                let mut h = [[0.0; 3]; 3];
                for a in 0..3 {
                    for b in 0..3 {
                        h[a][b] = c1 * ((beta - 2.0) * d[a] * d[b] / r2 + if a == b { 1.0 } else { 0.0 });
                    }
                }
                (f, g, h)
            }
            Scalar::Oscillatory { amp, k, phase } => {
                let (s, c) = (dot(*k, x) + phase).sin_cos();
                let g = [amp * c * k[0], amp * c * k[1], amp * c * k[2]];
                let mut h = [[0.0; 3]; 3];
                for a in 0..3 {
                    for b in 0..3 {
                        h[a][b] = -amp * s * k[a] * k[b];
                    }
                }
                (amp * s, g, h)
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            Scalar::Polynomial { terms, center } => terms.iter().all(|t| t.0.is_finite()) && center.iter().all(|c| c.is_finite()),
            Scalar::Bump { amp, s, center } => amp.is_finite() && *s > 0.0 && s.is_finite() && center.iter().all(|c| c.is_finite()),
            Scalar::DistancePower { amp, beta, center } => amp.is_finite() && beta.is_finite() && center.iter().all(|c| c.is_finite()),
            Scalar::Oscillatory { amp, k, phase } => amp.is_finite() && phase.is_finite() && k.iter().all(|c| c.is_finite()),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("trial function has invalid parameters: {self}")))
        }
    }
}

/// Scalar or vector trial function.
#[derive(Clone, Debug, PartialEq)]
pub enum TrialFunction {
    Scalar(Scalar),
    Vector(Vec<Scalar>),
    /// `b + W x` with `W` skew-symmetric.
    AffineSkew {
        b: Point,
        w: Mat3,
    },
    /// `x ↦ u(x/λ)`
    Dilated {
        inner: Box<TrialFunction>,
        lambda: f64,
    },
}

/// Values and derivatives of every component at one point.
#[derive(Clone, Debug)]
pub struct Jet {
    pub value: Vec<f64>,
    pub grad: Vec<Point>,
    pub hess: Vec<Mat3>,
}

fn frob(m: &Mat3, dim: usize) -> f64 {
    let mut s = 0.0;
    for row in m.iter().take(dim) {
        for x in row.iter().take(dim) {
            s += x * x;
        }
    }
    s.sqrt()
}

impl TrialFunction {
    pub fn constant(c: f64) -> Self {
        TrialFunction::Scalar(Scalar::Polynomial { terms: vec![(c, [0, 0, 0])], center: [0.0; 3] })
    }

    pub fn linear(a: Point) -> Self {
        TrialFunction::Scalar(Scalar::Polynomial { terms: vec![(a[0], [1, 0, 0]), (a[1], [0, 1, 0]), (a[2], [0, 0, 1])], center: [0.0; 3] })
    }

    pub fn is_vector(&self) -> bool {
        match self {
            TrialFunction::Scalar(_) => false,
            TrialFunction::Vector(_) | TrialFunction::AffineSkew { .. } => true,
            TrialFunction::Dilated { inner, .. } => inner.is_vector(),
        }
    }

    pub fn dilate(&self, lambda: f64) -> Self {
        TrialFunction::Dilated { inner: Box::new(self.clone()), lambda }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            TrialFunction::Scalar(s) => s.validate(),
            TrialFunction::Vector(c) => {
                if c.is_empty() {
                    return Err(Error::InvalidInput("vector trial function has no components".into()));
                }
                c.iter().try_for_each(Scalar::validate)
            }
            TrialFunction::AffineSkew { b, w } => {
                for i in 0..3 {
                    for j in 0..3 {
                        if !w[i][j].is_finite() || (w[i][j] + w[j][i]).abs() > 1e-12 * (w[i][j].abs() + w[j][i].abs()).max(1e-300) {
                            return Err(Error::InvalidInput("affine field matrix must be skew-symmetric".into()));
                        }
                    }
                }
                if b.iter().all(|x| x.is_finite()) {
                    Ok(())
                } else {
                    Err(Error::InvalidInput("affine field offset must be finite".into()))
                }
            }
            TrialFunction::Dilated { inner, lambda } => {
                if !(*lambda > 0.0 && lambda.is_finite()) {
                    return Err(Error::InvalidInput(format!("dilation factor {lambda} must be positive")));
                }
                inner.validate()
            }
        }
    }

    pub fn jet(&self, x: Point) -> Jet {
        match self {
            TrialFunction::Scalar(s) => {
                let (v, g, h) = s.jet(x);
                Jet { value: vec![v], grad: vec![g], hess: vec![h] }
            }
            TrialFunction::Vector(cs) => {
                let mut j = Jet { value: Vec::new(), grad: Vec::new(), hess: Vec::new() };
                for c in cs {
                    let (v, g, h) = c.jet(x);
                    j.value.push(v);
                    j.grad.push(g);
                    j.hess.push(h);
                }
                j
            }
            TrialFunction::AffineSkew { b, w } => {
                Jet { value: (0..3).map(|i| b[i] + dot(w[i], x)).collect(), grad: w.to_vec(), hess: vec![[[0.0; 3]; 3]; 3] }
            }
            TrialFunction::Dilated { inner, lambda } => {
                let mut j = inner.jet([x[0] / lambda, x[1] / lambda, x[2] / lambda]);
                for g in &mut j.grad {
                    for a in g.iter_mut() {
                        *a /= lambda;
                    }
                }
                let l2 = lambda * lambda;
                for h in &mut j.hess {
                    for row in h.iter_mut() {
                        for a in row.iter_mut() {
                            *a /= l2;
                        }
                    }
                }
                j
            }
        }
    }

    fn comps(&self, dim: usize, len: usize) -> usize {
        if self.is_vector() {
            len.min(dim)
        } else {
            1
        }
    }

    /// `|u(x)|`, Euclidean over the first `dim` components of a vector field.
    pub fn abs_value(&self, x: Point, dim: usize) -> f64 {
        let j = self.jet(x);
        let k = self.comps(dim, j.value.len());
        j.value[..k].iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Frobenius norm of the `dim`-dimensional gradient (Jacobian).
    pub fn grad_norm(&self, x: Point, dim: usize) -> f64 {
        let j = self.jet(x);
        let k = self.comps(dim, j.value.len());
        j.grad[..k].iter().map(|g| g[..dim].iter().map(|a| a * a).sum::<f64>()).sum::<f64>().sqrt()
    }

    /// Frobenius norm of the Hessian (summed over components).
    pub fn hess_norm(&self, x: Point, dim: usize) -> f64 {
        let j = self.jet(x);
        let k = self.comps(dim, j.value.len());
        j.hess[..k].iter().map(|h| frob(h, dim).powi(2)).sum::<f64>().sqrt()
    }

    /// `½(∇u + ∇uᵀ)`; a scalar `u` is read as the field `u·e₁`.
    pub fn sym_grad(&self, x: Point, dim: usize) -> Mat3 {
        let j = self.jet(x);
        let mut jac = [[0.0; 3]; 3];
        let k = if self.is_vector() { j.value.len().min(dim) } else { 1 };
        jac[..k].copy_from_slice(&j.grad[..k]);
        let mut e = [[0.0; 3]; 3];
        for a in 0..dim {
            for b in 0..dim {
                e[a][b] = 0.5 * (jac[a][b] + jac[b][a]);
            }
        }
        e
    }

    pub fn sym_grad_norm(&self, x: Point, dim: usize) -> f64 {
        frob(&self.sym_grad(x, dim), dim)
    }

    /// Largest relative mismatch between the analytic derivatives and central
    /// differences with step `step`, over `count` seeded points in `[lo, hi]`.
    pub fn check_derivatives(&self, lo: Point, hi: Point, count: usize, step: f64, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..count {
            let x: Point = std::array::from_fn(|d| if hi[d] > lo[d] { rng.gen_range(lo[d]..hi[d]) } else { lo[d] });
            let j = self.jet(x);
            for a in 0..3 {
                let mut xp = x;
                let mut xm = x;
                xp[a] += step;
                xm[a] -= step;
                let (jp, jm) = (self.jet(xp), self.jet(xm));
                for c in 0..j.value.len() {
                    let fd = (jp.value[c] - jm.value[c]) / (2.0 * step);
                    let scale = j.grad[c].iter().fold(1.0f64, |m, v| m.max(v.abs()));
                    worst = worst.max((fd - j.grad[c][a]).abs() / scale);
                    for b in 0..3 {
                        let fd2 = (jp.grad[c][b] - jm.grad[c][b]) / (2.0 * step);
                        let scale = j.hess[c].iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
                        worst = worst.max((fd2 - j.hess[c][a][b]).abs() / scale);
                    }
                }
            }
        }
        worst
    }
}

fn nums(s: &str) -> Result<Vec<f64>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|x| x.trim().parse::<f64>().map_err(|_| Error::Parse(format!("`{x}` is not a number")))).collect()
}

fn point(v: &[f64]) -> Point {
    [v.first().copied().unwrap_or(0.0), v.get(1).copied().unwrap_or(0.0), v.get(2).copied().unwrap_or(0.0)]
}

fn parse_scalar(desc: &str) -> Result<Scalar> {
    let (fam, args) = desc.split_once(':').unwrap_or((desc, ""));
    let v = if fam == "poly" { Vec::new() } else { nums(args)? };
    let need = |k: usize| -> Result<()> {
        if v.len() < k {
            Err(Error::Parse(format!("`{desc}` needs at least {k} parameters")))
        } else {
            Ok(())
        }
    };
    Ok(match fam {
        "const" => {
            need(1)?;
            Scalar::Polynomial { terms: vec![(v[0], [0, 0, 0])], center: [0.0; 3] }
        }
        "linear" => {
            need(2)?;
            Scalar::Polynomial {
                terms: vec![(v[0], [1, 0, 0]), (v[1], [0, 1, 0]), (v.get(2).copied().unwrap_or(0.0), [0, 0, 1])],
                center: [0.0; 3],
            }
        }
        "poly" => {
            // c,i,j,k;c,i,j,k;…
            let mut terms = Vec::new();
            for t in args.split(';') {
                let w = nums(t)?;
                if w.len() != 4 || w[1..].iter().any(|e| *e < 0.0 || e.fract() != 0.0) {
                    return Err(Error::Parse(format!("polynomial term `{t}` must be `c,i,j,k` with integer exponents")));
                }
                terms.push((w[0], [w[1] as u32, w[2] as u32, w[3] as u32]));
            }
            Scalar::Polynomial { terms, center: [0.0; 3] }
        }
        "bump" => {
            need(1)?;
            Scalar::Bump { amp: 1.0, s: v[0], center: point(&v[1..]) }
        }
        "distpow" => {
            need(1)?;
            Scalar::DistancePower { amp: 1.0, beta: v[0], center: point(&v[1..]) }
        }
        "osc" => {
            need(2)?;
            Scalar::Oscillatory { amp: 1.0, k: point(&v), phase: 0.0 }
        }
        _ => return Err(Error::Parse(format!("unknown trial family `{fam}`"))),
    })
}

/// Parse a descriptor such as `bump:2,0.5,0.5`, `vec:linear:1,0|osc:3,1`
/// or `skew:b0,b1,w` (2-D) / `skew:b0,b1,b2,w01,w02,w12` (3-D).
pub fn parse_trial(desc: &str) -> Result<TrialFunction> {
    let desc = desc.trim();
    let u = if let Some(rest) = desc.strip_prefix("vec:") {
        TrialFunction::Vector(rest.split('|').map(parse_scalar).collect::<Result<_>>()?)
    } else if let Some(rest) = desc.strip_prefix("skew:") {
        let v = nums(rest)?;
        let (b, w) = match v.len() {
            3 => ([v[0], v[1], 0.0], [[0.0, v[2], 0.0], [-v[2], 0.0, 0.0], [0.0; 3]]),
            6 => ([v[0], v[1], v[2]], [[0.0, v[3], v[4]], [-v[3], 0.0, v[5]], [-v[4], -v[5], 0.0]]),
            _ => return Err(Error::Parse("`skew:` takes 3 (2-D) or 6 (3-D) parameters".into())),
        };
        TrialFunction::AffineSkew { b, w }
    } else {
        TrialFunction::Scalar(parse_scalar(desc)?)
    };
    u.validate()?;
    Ok(u)
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Polynomial { terms, center } => {
                write!(f, "poly:")?;
                for (i, (c, e)) in terms.iter().enumerate() {
                    if i > 0 {
                        write!(f, ";")?;
                    }
                    write!(f, "{c},{},{},{}", e[0], e[1], e[2])?;
                }
                if center.iter().any(|c| *c != 0.0) {
                    write!(f, "@{},{},{}", center[0], center[1], center[2])?;
                }
                Ok(())
            }
            Scalar::Bump { amp, s, center } => write!(f, "bump:{s},{},{},{}×{amp}", center[0], center[1], center[2]),
            Scalar::DistancePower { amp, beta, center } => write!(f, "distpow:{beta},{},{},{}×{amp}", center[0], center[1], center[2]),
            Scalar::Oscillatory { amp, k, phase } => write!(f, "osc:{},{},{}+{phase}×{amp}", k[0], k[1], k[2]),
        }
    }
}

impl fmt::Display for TrialFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrialFunction::Scalar(s) => write!(f, "{s}"),
            TrialFunction::Vector(c) => {
                write!(f, "vec:")?;
                for (i, s) in c.iter().enumerate() {
                    if i > 0 {
                        write!(f, "|")?;
                    }
                    write!(f, "{s}")?;
                }
                Ok(())
            }
            TrialFunction::AffineSkew { b, w } => {
                write!(f, "skew:{},{},{},{},{},{}", b[0], b[1], b[2], w[0][1], w[0][2], w[1][2])
            }
            TrialFunction::Dilated { inner, lambda } => write!(f, "{inner}/{lambda}"),
        }
    }
}

/// Six smooth functions adapted to the domain's bounding box, with seeded
/// coefficients.
pub fn default_corpus(domain: &Domain, seed: u64) -> Vec<(String, TrialFunction)> {
    let (lo, hi) = domain.bbox();
    let dim = domain.dim();
    let c: Point = std::array::from_fn(|d| if d < dim { 0.5 * (lo[d] + hi[d]) } else { 0.0 });
    let l = domain.diameter();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = |a: f64, b: f64| rng.gen_range(a..b);
    let z = if dim == 3 { 1.0 } else { 0.0 };
    let linear = Scalar::Polynomial {
        terms: vec![(1.0, [0, 0, 0]), (r(0.5, 1.5) / l, [1, 0, 0]), (r(0.5, 1.5) / l, [0, 1, 0]), (z * r(0.5, 1.5) / l, [0, 0, 1])],
        center: c,
    };
    let quad = Scalar::Polynomial {
        terms: vec![
            (1.0, [0, 0, 0]),
            (r(0.5, 1.5) / (l * l), [2, 0, 0]),
            (-r(0.5, 1.5) / (l * l), [0, 2, 0]),
            (r(0.2, 0.8) / (l * l), [1, 1, 0]),
        ],
        center: c,
    };
    let bump = Scalar::Bump { amp: 1.0, s: r(3.0, 5.0) / (l * l), center: c };
    let far = [c[0] + l, c[1] + 0.3 * l, c[2]];
    let dist = Scalar::DistancePower { amp: 1.0 / l.powf(1.5), beta: 1.5, center: far };
    let kk = std::f64::consts::PI / l;
    let osc = Scalar::Oscillatory { amp: 1.0, k: [kk * r(0.8, 1.2), kk * r(0.4, 0.6), z * kk * r(0.3, 0.5)], phase: r(0.2, 0.6) };
    vec![
        ("const".to_string(), TrialFunction::constant(1.0)),
        ("linear".to_string(), TrialFunction::Scalar(linear)),
        ("quadratic".to_string(), TrialFunction::Scalar(quad)),
        ("bump".to_string(), TrialFunction::Scalar(bump)),
        ("distpow".to_string(), TrialFunction::Scalar(dist)),
        ("osc".to_string(), TrialFunction::Scalar(osc)),
    ]
}

/// Vector fields built from consecutive corpus members.
pub fn vector_corpus(domain: &Domain, seed: u64) -> Vec<(String, TrialFunction)> {
    let base = default_corpus(domain, seed);
    let dim = domain.dim();
    let scalar = |u: &TrialFunction| match u {
        TrialFunction::Scalar(s) => s.clone(),
        _ => unreachable!("corpus members are scalar"),
    };
    (0..base.len())
        .map(|i| {
            let comps: Vec<Scalar> = (0..dim).map(|k| scalar(&base[(i + k) % base.len()].1)).collect();
            (format!("vec-{}", base[i].0), TrialFunction::Vector(comps))
        })
        .collect()
}
