//! Domains: planar polygons with holes and 3-D voxel sets.
//!
//! Points are `[f64; 3]` throughout; planar domains ignore the third
//! coordinate and report it as zero.

mod polygon;
mod voxel;

use std::f64::consts::PI;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

pub use polygon::PolygonDomain;
pub use voxel::VoxelDomain;

pub type Point = [f64; 3];

#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    Polygon(PolygonDomain),
    Voxel(VoxelDomain),
}

/// First boundary point met by a ray.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Hit {
    pub point: Point,
    /// Edge index (polygons) or exposed-face index (voxels).
    pub patch: usize,
    pub distance: f64,
}

/// Cell-centred interior quadrature.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct InteriorSample {
    pub nodes: Vec<Point>,
    pub weights: Vec<f64>,
    /// Cell side.
    pub h: f64,
    pub dim: usize,
}

impl InteriorSample {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        crate::numerics::pairwise_sum(&self.weights)
    }
}

/// Boundary quadrature; samples of patch `k` occupy
/// `patch_offsets[k]..patch_offsets[k + 1]`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BoundarySample {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    pub normals: Vec<Point>,
    pub patch: Vec<usize>,
    pub patch_offsets: Vec<usize>,
}

impl BoundarySample {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        crate::numerics::pairwise_sum(&self.weights)
    }

    /// Index of the sample nearest to `hit` among those of the hit patch.
    pub fn lookup(&self, hit: &Hit) -> usize {
        let range = self.patch_offsets[hit.patch]..self.patch_offsets[hit.patch + 1];
        let mut best = (f64::INFINITY, range.start);
        for i in range {
            let p = self.points[i];
            let d = (p[0] - hit.point[0]).powi(2) + (p[1] - hit.point[1]).powi(2) + (p[2] - hit.point[2]).powi(2);
            if d < best.0 {
                best = (d, i);
            }
        }
        best.1
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundaryResolution {
    /// `m` samples per polygon edge, `m × m` per voxel face.
    PerPatch(usize),
    /// Target spacing between samples.
    Spacing(f64),
}

impl Domain {
    pub fn dim(&self) -> usize {
        match self {
            Domain::Polygon(_) => 2,
            Domain::Voxel(_) => 3,
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        match self {
            Domain::Polygon(d) => d.contains(polygon::as2(p)),
            Domain::Voxel(d) => d.contains(p),
        }
    }

    /// `(volume, surface)`: Lebesgue measure and boundary Hausdorff measure.
    pub fn measure(&self) -> (f64, f64) {
        match self {
            Domain::Polygon(d) => (d.area(), d.perimeter()),
            Domain::Voxel(d) => (d.volume(), d.surface()),
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            Domain::Polygon(d) => d.diameter(),
            Domain::Voxel(d) => d.diameter(),
        }
    }

    pub fn bbox(&self) -> (Point, Point) {
        match self {
            Domain::Polygon(d) => {
                let (a, b) = d.bbox();
                ([a[0], a[1], 0.0], [b[0], b[1], 0.0])
            }
            Domain::Voxel(d) => d.bbox(),
        }
    }

    pub fn distance_to_boundary(&self, p: Point) -> f64 {
        match self {
            Domain::Polygon(d) => d.distance_to_boundary(polygon::as2(p)),
            Domain::Voxel(d) => d.distance_to_boundary(p),
        }
    }

    pub fn dilate(&self, lambda: f64) -> Result<Domain> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidInput(format!("dilation factor {lambda} must be positive")));
        }
        Ok(match self {
            Domain::Polygon(d) => Domain::Polygon(d.dilate(lambda)?),
            Domain::Voxel(d) => Domain::Voxel(d.dilate(lambda)?),
        })
    }

    /// `ζ(x, θ)`: the first boundary point on the ray from interior `x` in
    /// direction `θ` (normalised here). `None` only on numerical tangency.
    pub fn ray_first_hit(&self, x: Point, theta: Point) -> Result<Option<Hit>> {
        if !self.contains(x) {
            return Err(Error::NotInterior(x));
        }
        let len = match self {
            Domain::Polygon(_) => theta[0].hypot(theta[1]),
            Domain::Voxel(_) => (theta[0] * theta[0] + theta[1] * theta[1] + theta[2] * theta[2]).sqrt(),
        };
        if !(len > 0.0 && len.is_finite()) {
            return Err(Error::InvalidInput("ray direction must be a nonzero finite vector".into()));
        }
        let th = [theta[0] / len, theta[1] / len, theta[2] / len];
        Ok(match self {
            Domain::Polygon(d) => d.ray_first_hit(polygon::as2(x), [th[0], th[1]]),
            Domain::Voxel(d) => d.ray_first_hit(x, th),
        })
    }

    /// Cell-centre rule with spacing `h` (voxels: each cell split into
    /// `round(cell / h)^3` subcells).
    pub fn sample_interior(&self, h: f64) -> Result<InteriorSample> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidInput(format!("interior spacing {h} must be positive")));
        }
        let s = match self {
            Domain::Polygon(d) => d.sample_interior(h),
            Domain::Voxel(d) => d.sample_interior(h),
        };
        if s.is_empty() {
            return Err(Error::InvalidInput(format!("spacing {h} is too coarse: no quadrature node falls inside the domain")));
        }
        Ok(s)
    }

    pub fn sample_boundary(&self, res: BoundaryResolution) -> Result<BoundarySample> {
        match res {
            BoundaryResolution::PerPatch(0) => return Err(Error::InvalidInput("need at least one sample per patch".into())),
            BoundaryResolution::Spacing(h) if !(h > 0.0 && h.is_finite()) => {
                return Err(Error::InvalidInput(format!("boundary spacing {h} must be positive")))
            }
            _ => {}
        }
        Ok(match self {
            Domain::Polygon(d) => match res {
                BoundaryResolution::PerPatch(m) => d.sample_boundary(|_| m),
                BoundaryResolution::Spacing(h) => d.sample_boundary(|len| ((len / h) * (1.0 - 1e-12)).ceil().max(1.0) as usize),
            },
            Domain::Voxel(d) => match res {
                BoundaryResolution::PerPatch(m) => d.sample_boundary(m),
                BoundaryResolution::Spacing(h) => d.sample_boundary(((d.spacing() / h) * (1.0 - 1e-12)).ceil().max(1.0) as usize),
            },
        })
    }
}

pub fn measure_domain(d: &Domain) -> (f64, f64) {
    d.measure()
}

pub fn ray_first_hit(d: &Domain, x: Point, theta: Point) -> Result<Option<Hit>> {
    d.ray_first_hit(x, theta)
}

pub fn sample_interior(d: &Domain, h: f64) -> Result<InteriorSample> {
    d.sample_interior(h)
}

pub fn sample_boundary(d: &Domain, res: BoundaryResolution) -> Result<BoundarySample> {
    d.sample_boundary(res)
}

pub fn unit_square() -> Domain {
    Domain::Polygon(PolygonDomain::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]], vec![]).expect("valid square"))
}

/// Unit square with the top-right quarter removed.
pub fn lshape() -> Domain {
    let v = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 0.5], [0.5, 0.5], [0.5, 1.0], [0.0, 1.0]];
    Domain::Polygon(PolygonDomain::new(v, vec![]).expect("valid L-shape"))
}

/// Regular `m`-gon inscribed in the circle of radius `r` about the origin.
pub fn regular_polygon(m: usize, r: f64) -> Result<Domain> {
    if m < 3 || !(r > 0.0) {
        return Err(Error::InvalidInput(format!("regular polygon needs m ≥ 3 and r > 0 (got m = {m}, r = {r})")));
    }
    let v = (0..m)
        .map(|k| {
            let a = 2.0 * PI * k as f64 / m as f64;
            [r * a.cos(), r * a.sin()]
        })
        .collect();
    Ok(Domain::Polygon(PolygonDomain::new(v, vec![])?))
}

/// A row of `k` square rooms of side `a` joined by corridors of width `eps`
/// and length `gap`, centred on the rooms' mid-height.
pub fn comb_domain(k: usize, a: f64, eps: f64, gap: f64) -> Result<Domain> {
    if k == 0 || !(a > 0.0) || !(gap > 0.0) || (k > 1 && !(eps > 0.0 && eps < a)) {
        return Err(Error::InvalidInput(format!(
            "comb needs k ≥ 1, a > 0, gap > 0 and 0 < eps < a (got k = {k}, a = {a}, eps = {eps}, gap = {gap})"
        )));
    }
    let x = |i: usize| i as f64 * (a + gap);
    let (yl, yu) = (0.5 * (a - eps), 0.5 * (a + eps));
    let mut v = Vec::new();
    for i in 0..k {
        v.push([x(i), 0.0]);
        v.push([x(i) + a, 0.0]);
        if i + 1 < k {
            v.push([x(i) + a, yl]);
            v.push([x(i + 1), yl]);
        }
    }
    for i in (0..k).rev() {
        if i + 1 < k {
            v.push([x(i + 1), yu]);
            v.push([x(i) + a, yu]);
        }
        v.push([x(i) + a, a]);
        v.push([x(i), a]);
    }
    Ok(Domain::Polygon(PolygonDomain::new(v, vec![])?))
}

/// Unit cube `[0,1]^3` as `m^3` voxels.
pub fn voxel_cube(m: usize) -> Result<Domain> {
    if m == 0 {
        return Err(Error::InvalidInput("cube needs at least one cell per side".into()));
    }
    let m = m as i64;
    let cells = (0..m).flat_map(|i| (0..m).flat_map(move |j| (0..m).map(move |k| [i, j, k])));
    Ok(Domain::Voxel(VoxelDomain::new(1.0 / m as f64, cells)?))
}

/// Voxel ball of radius `r` about the origin: cells whose centre lies in
/// the ball, `m` cells per radius.
pub fn voxel_ball(m: usize, r: f64) -> Result<Domain> {
    if m == 0 || !(r > 0.0) {
        return Err(Error::InvalidInput("ball needs m ≥ 1 and r > 0".into()));
    }
    let h = r / m as f64;
    let m = m as i64;
    let mut cells = Vec::new();
    for i in -m..m {
        for j in -m..m {
            for k in -m..m {
                let c = [(i as f64 + 0.5) * h, (j as f64 + 0.5) * h, (k as f64 + 0.5) * h];
                if c[0] * c[0] + c[1] * c[1] + c[2] * c[2] <= r * r {
                    cells.push([i, j, k]);
                }
            }
        }
    }
    Ok(Domain::Voxel(VoxelDomain::new(h, cells)?))
}

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',').map(|x| x.trim().parse::<f64>().map_err(|e| Error::Parse(format!("bad {what} parameter `{x}`: {e}")))).collect()
}

/// Builtin names: `square`, `lshape`, `disk512`, `disk:m`, `comb:k,a,eps[,gap]`,
/// `cube`, `cube:m`, `ball`, `ball:m[,r]`.
pub fn builtin(name: &str) -> Result<Domain> {
    let (head, args) = match name.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (name, None),
    };
    match (head, args) {
        ("square", None) => Ok(unit_square()),
        ("lshape", None) => Ok(lshape()),
        ("disk512", None) => regular_polygon(512, 1.0),
        ("disk", Some(a)) => {
            let m = a.trim().parse::<usize>().map_err(|e| Error::Parse(format!("bad disk size `{a}`: {e}")))?;
            regular_polygon(m, 1.0)
        }
        ("comb", Some(a)) => {
            let v = parse_list(a, "comb")?;
            if !(v.len() == 3 || v.len() == 4) || v[0].fract() != 0.0 || v[0] < 1.0 {
                return Err(Error::Parse(format!("comb expects k,a,eps[,gap] with integer k ≥ 1, got `{a}`")));
            }
            let gap = v.get(3).copied().unwrap_or(0.5 * v[1]);
            comb_domain(v[0] as usize, v[1], v[2], gap)
        }
        ("cube", None) => voxel_cube(8),
        ("cube", Some(a)) => voxel_cube(a.trim().parse().map_err(|e| Error::Parse(format!("bad cube size `{a}`: {e}")))?),
        ("ball", None) => voxel_ball(10, 1.0),
        ("ball", Some(a)) => {
            let v = parse_list(a, "ball")?;
            if v.is_empty() || v.len() > 2 || v[0].fract() != 0.0 || v[0] < 1.0 {
                return Err(Error::Parse(format!("ball expects m[,r], got `{a}`")));
            }
            voxel_ball(v[0] as usize, v.get(1).copied().unwrap_or(1.0))
        }
        _ => Err(Error::Parse(format!("unknown builtin domain `{name}`"))),
    }
}

/// Parse a polygon file (`x y` per line, rings separated by blank lines,
/// first ring outer) or a voxel file (`h` then `i j k` lines). `#` starts a
/// comment.
pub fn parse_domain_text(text: &str) -> Result<Domain> {
    let lines: Vec<&str> = text.lines().map(|l| l.split('#').next().unwrap_or("").trim()).collect();
    let first = lines.iter().find(|l| !l.is_empty()).ok_or_else(|| Error::Parse("empty domain file".into()))?;
    let tokens = first.split_whitespace().count();
    if tokens == 1 {
        let mut it = lines.iter().filter(|l| !l.is_empty());
        let h: f64 = it.next().unwrap().parse().map_err(|e| Error::Parse(format!("bad voxel spacing: {e}")))?;
        let mut cells = Vec::new();
        for l in it {
            let v: Vec<i64> = l
                .split_whitespace()
                .map(|x| x.parse::<i64>().map_err(|e| Error::Parse(format!("bad voxel index `{x}`: {e}"))))
                .collect::<Result<_>>()?;
            if v.len() != 3 {
                return Err(Error::Parse(format!("voxel line `{l}` needs three indices")));
            }
            cells.push([v[0], v[1], v[2]]);
        }
        return Ok(Domain::Voxel(VoxelDomain::new(h, cells)?));
    }
    let mut rings: Vec<Vec<[f64; 2]>> = vec![Vec::new()];
    for l in &lines {
        if l.is_empty() {
            if !rings.last().unwrap().is_empty() {
                rings.push(Vec::new());
            }
            continue;
        }
        let v: Vec<f64> = l
            .split_whitespace()
            .map(|x| x.parse::<f64>().map_err(|e| Error::Parse(format!("bad coordinate `{x}`: {e}"))))
            .collect::<Result<_>>()?;
        if v.len() != 2 {
            return Err(Error::Parse(format!("polygon line `{l}` needs two coordinates")));
        }
        rings.last_mut().unwrap().push([v[0], v[1]]);
    }
    if rings.last().is_some_and(|r| r.is_empty()) {
        rings.pop();
    }
    let outer = rings.remove(0);
    Ok(Domain::Polygon(PolygonDomain::new(outer, rings)?))
}

/// Resolve `builtin:<name>` or a file path.
pub fn load_domain(source: &str) -> Result<Domain> {
    if let Some(name) = source.strip_prefix("builtin:") {
        return builtin(name);
    }
    let text = std::fs::read_to_string(Path::new(source)).map_err(|e| Error::Io(format!("{source}: {e}")))?;
    parse_domain_text(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn on_boundary(d: &Domain, p: Point) -> bool {
        d.distance_to_boundary(p) <= 1e-9 * d.diameter()
    }

    #[test]
    fn measures_of_builtins() {
        assert_eq!(unit_square().measure(), (1.0, 4.0));
        let (a, p) = lshape().measure();
        assert!((a - 0.75).abs() < 1e-15 && (p - 4.0).abs() < 1e-15);
        let (a, _) = builtin("disk512").unwrap().measure();
        let exact = 256.0 * (2.0 * PI / 512.0).sin();
        assert!((a - exact).abs() < 1e-12 && (a - PI).abs() < 1e-4);
    }

    #[test]
    fn comb_area() {
        let (a, _) = comb_domain(2, 1.0, 0.1, 0.5).unwrap().measure();
        assert!((a - 2.05).abs() < 1e-12);
        let single = comb_domain(1, 1.0, 0.1, 0.5).unwrap();
        assert_eq!(single.measure(), (1.0, 4.0));
        let (a4, _) = builtin("comb:4,1,0.05").unwrap().measure();
        assert!((a4 - (4.0 + 3.0 * 0.05 * 0.5)).abs() < 1e-12);
    }

    #[test]
    fn square_axis_ray() {
        let h = unit_square().ray_first_hit([0.5, 0.5, 0.0], [1.0, 0.0, 0.0]).unwrap().unwrap();
        assert!((h.point[0] - 1.0).abs() < 1e-15 && (h.point[1] - 0.5).abs() < 1e-15);
        assert!(matches!(unit_square().ray_first_hit([2.0, 0.5, 0.0], [1.0, 0.0, 0.0]), Err(Error::NotInterior(_))));
    }

    #[test]
    fn polygon_rays_respect_apothem() {
        let d = regular_polygon(64, 1.0).unwrap();
        for k in 0..360 {
            let a = k as f64 * PI / 180.0 + 0.001;
            let h = d.ray_first_hit([0.0; 3], [a.cos(), a.sin(), 0.0]).unwrap().unwrap();
            let r = h.point[0].hypot(h.point[1]);
            assert!(r >= (PI / 64.0).cos() - 1e-12 && r <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn lshape_ray_hits_notch() {
        let d = lshape();
        // direction from (0.25,0.25) toward the reentrant corner (0.5,0.5), slightly above it
        let h = d.ray_first_hit([0.25, 0.25, 0.0], [1.0, 1.2, 0.0]).unwrap().unwrap();
        assert!((h.point[1] - 0.5).abs() > 1e-12 || h.point[0] <= 0.5 + 1e-12);
        assert!(h.point[0] <= 0.5 + 1e-12 && h.point[1] <= 1.0);
        assert!((h.point[0] - 0.5).abs() < 1e-12, "hit the notch edge x = 0.5, got {:?}", h.point);
    }

    #[test]
    fn convex_rays_always_hit_and_land_on_boundary() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in [unit_square(), builtin("disk512").unwrap(), voxel_cube(4).unwrap()] {
            let (lo, hi) = d.bbox();
            let mut n = 0;
            while n < 10_000 {
                let x = [
                    rng.gen_range(lo[0]..hi[0]),
                    rng.gen_range(lo[1]..hi[1]),
                    if d.dim() == 3 { rng.gen_range(lo[2]..hi[2]) } else { 0.0 },
                ];
                if !d.contains(x) {
                    continue;
                }
                let th = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), if d.dim() == 3 { rng.gen_range(-1.0..1.0) } else { 0.0 }];
                let h = d.ray_first_hit(x, th).unwrap().expect("convex domains have no misses");
                assert!(on_boundary(&d, h.point), "{:?}", h.point);
                n += 1;
            }
        }
    }

    #[test]
    fn dilation_equivariance() {
        let d = lshape();
        let lam = 2.5;
        let dl = d.dilate(lam).unwrap();
        let (a, p) = d.measure();
        let (al, pl) = dl.measure();
        assert!((al - lam * lam * a).abs() < 1e-12 && (pl - lam * p).abs() < 1e-12);
        let x = [0.2, 0.3, 0.0];
        for k in 0..50 {
            let t = k as f64 * 0.37;
            let th = [t.cos(), t.sin(), 0.0];
            let h = d.ray_first_hit(x, th).unwrap().unwrap();
            let hl = dl.ray_first_hit([lam * x[0], lam * x[1], 0.0], th).unwrap().unwrap();
            for c in 0..2 {
                assert!((hl.point[c] - lam * h.point[c]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn interior_sampling_counts() {
        let s = unit_square().sample_interior(0.25).unwrap();
        assert_eq!(s.len(), 16);
        assert!(s.weights.iter().all(|w| *w == 1.0 / 16.0));
        assert_eq!(lshape().sample_interior(0.25).unwrap().len(), 12);
        let disk = builtin("disk512").unwrap().sample_interior(0.01).unwrap();
        assert!((disk.total_weight() - PI).abs() < 0.01 * PI);
        assert!(unit_square().sample_interior(5.0).is_err());
    }

    #[test]
    fn boundary_sampling_totals() {
        let b = unit_square().sample_boundary(BoundaryResolution::PerPatch(4)).unwrap();
        assert_eq!(b.len(), 16);
        assert!(b.weights.iter().all(|w| (*w - 0.25).abs() < 1e-15));
        let disk = builtin("disk512").unwrap().sample_boundary(BoundaryResolution::PerPatch(1)).unwrap();
        assert!((disk.total_weight() - 2.0 * PI).abs() < 1e-4);
        let cube = voxel_cube(2).unwrap();
        let cb = cube.sample_boundary(BoundaryResolution::PerPatch(1)).unwrap();
        assert_eq!(cb.len(), 24);
        assert!((cb.total_weight() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn outward_normals_point_away() {
        let d = lshape();
        let b = d.sample_boundary(BoundaryResolution::PerPatch(3)).unwrap();
        for (p, n) in b.points.iter().zip(&b.normals) {
            let out = [p[0] + 1e-6 * n[0], p[1] + 1e-6 * n[1], 0.0];
            let inn = [p[0] - 1e-6 * n[0], p[1] - 1e-6 * n[1], 0.0];
            assert!(!d.contains(out) && d.contains(inn));
        }
    }

    #[test]
    fn invalid_polygons_rejected() {
        let bow = vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]];
        assert!(matches!(PolygonDomain::new(bow, vec![]), Err(Error::Geometry(_))));
        let line = vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]];
        assert!(PolygonDomain::new(line, vec![]).is_err());
        let sq = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let outside_hole = vec![[2.0, 2.0], [3.0, 2.0], [3.0, 3.0]];
        assert!(PolygonDomain::new(sq, vec![outside_hole]).is_err());
    }

    #[test]
    fn holes_are_excluded() {
        let outer = vec![[0.0, 0.0], [4.0, 0.0], [4.0, 4.0], [0.0, 4.0]];
        let hole = vec![[1.0, 1.0], [1.0, 3.0], [3.0, 3.0], [3.0, 1.0]];
        let d = Domain::Polygon(PolygonDomain::new(outer, vec![hole]).unwrap());
        assert_eq!(d.measure(), (12.0, 24.0));
        assert!(!d.contains([2.0, 2.0, 0.0]));
        let h = d.ray_first_hit([0.5, 2.0, 0.0], [1.0, 0.0, 0.0]).unwrap().unwrap();
        assert!((h.point[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn file_formats() {
        let poly = "# square\n0 0\n1 0\n1 1\n0 1\n\n0.25 0.25\n0.75 0.25\n0.75 0.75\n0.25 0.75\n";
        let d = parse_domain_text(poly).unwrap();
        assert!((d.measure().0 - 0.75).abs() < 1e-12);
        let vox = "0.5\n0 0 0\n1 0 0\n";
        let v = parse_domain_text(vox).unwrap();
        assert_eq!(v.measure(), (0.25, 2.5));
        assert!(parse_domain_text("").is_err());
        assert!(load_domain("builtin:nope").is_err());
    }

    #[test]
    fn voxel_dda_exits_through_faces() {
        let d = voxel_ball(6, 1.0).unwrap();
        let b = d.sample_boundary(BoundaryResolution::PerPatch(1)).unwrap();
        for k in 0..200 {
            let z = 1.0 - 2.0 * (k as f64 + 0.5) / 200.0;
            let phi = k as f64 * 2.399963;
            let r = (1.0 - z * z).sqrt();
            let th = [r * phi.cos(), r * phi.sin(), z];
            let h = d.ray_first_hit([0.01, 0.02, 0.03], th).unwrap().unwrap();
            assert!(on_boundary(&d, h.point));
            let i = b.lookup(&h);
            assert_eq!(b.patch[i], h.patch);
        }
    }
}
