use crate::error::{Error, Result};

use super::{BoundarySample, Hit, InteriorSample, Point};

/// Planar domain bounded by one outer ring and any number of holes.
///
/// Rings are stored with the outer boundary counterclockwise and holes
/// clockwise, so every edge has the domain on its left and the outward
/// normal of edge `a → b` is `(b − a)` rotated by −90°.
#[derive(Clone, Debug, PartialEq)]
pub struct PolygonDomain {
    rings: Vec<Vec<[f64; 2]>>,
    edges: Vec<([f64; 2], [f64; 2])>,
    area: f64,
    perimeter: f64,
    bbox: ([f64; 2], [f64; 2]),
}

fn signed_area(ring: &[[f64; 2]]) -> f64 {
    let n = ring.len();
    let mut s = 0.0;
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        s += a[0] * b[1] - b[0] * a[1];
    }
    0.5 * s
}

fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn sub(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

fn norm(a: [f64; 2]) -> f64 {
    a[0].hypot(a[1])
}

fn segments_intersect(p1: [f64; 2], p2: [f64; 2], q1: [f64; 2], q2: [f64; 2]) -> bool {
    let d1 = cross(sub(q2, q1), sub(p1, q1));
    let d2 = cross(sub(q2, q1), sub(p2, q1));
    let d3 = cross(sub(p2, p1), sub(q1, p1));
    let d4 = cross(sub(p2, p1), sub(q2, p1));
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    let on = |a: [f64; 2], b: [f64; 2], p: [f64; 2], d: f64| {
        d == 0.0 && p[0] >= a[0].min(b[0]) && p[0] <= a[0].max(b[0]) && p[1] >= a[1].min(b[1]) && p[1] <= a[1].max(b[1])
    };
    on(q1, q2, p1, d1) || on(q1, q2, p2, d2) || on(p1, p2, q1, d3) || on(p1, p2, q2, d4)
}

fn point_in_ring(ring: &[[f64; 2]], p: [f64; 2]) -> bool {
    let n = ring.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (ring[i], ring[j]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
            if p[0] < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

impl PolygonDomain {
    /// Build from an outer ring and holes in any orientation; orientation is
    /// normalised, simplicity and nesting are verified.
    pub fn new(outer: Vec<[f64; 2]>, holes: Vec<Vec<[f64; 2]>>) -> Result<Self> {
        let mut rings = Vec::with_capacity(1 + holes.len());
        rings.push(outer);
        rings.extend(holes);
        for (k, ring) in rings.iter_mut().enumerate() {
            if ring.len() >= 2 && ring.first() == ring.last() {
                ring.pop();
            }
            if ring.len() < 3 {
                return Err(Error::Geometry(format!("ring {k} has fewer than 3 vertices")));
            }
            if ring.iter().flatten().any(|c| !c.is_finite()) {
                return Err(Error::Geometry(format!("ring {k} has a non-finite coordinate")));
            }
            let a = signed_area(ring);
            if a == 0.0 {
                return Err(Error::Geometry(format!("ring {k} is degenerate (zero area)")));
            }
            let want_ccw = k == 0;
            if (a > 0.0) != want_ccw {
                ring.reverse();
            }
        }
        let mut edges = Vec::new();
        for ring in &rings {
            for i in 0..ring.len() {
                edges.push((ring[i], ring[(i + 1) % ring.len()]));
            }
        }
        // pairwise simplicity over all rings; neighbours share exactly one vertex
        let mut ring_of = Vec::new();
        let mut idx_in = Vec::new();
        for (k, ring) in rings.iter().enumerate() {
            for i in 0..ring.len() {
                ring_of.push(k);
                idx_in.push(i);
            }
        }
        for i in 0..edges.len() {
            if norm(sub(edges[i].1, edges[i].0)) == 0.0 {
                return Err(Error::Geometry("repeated vertex in ring".into()));
            }
            for j in i + 1..edges.len() {
                if ring_of[i] == ring_of[j] {
                    let len = rings[ring_of[i]].len();
                    let (a, b) = (idx_in[i], idx_in[j]);
                    if b == a + 1 || (a == 0 && b == len - 1) {
                        // adjacent: only overlap beyond the shared vertex is invalid
                        let (p, q) = if b == a + 1 { (edges[i], edges[j]) } else { (edges[j], edges[i]) };
                        let d1 = sub(p.0, p.1);
                        let d2 = sub(q.1, q.0);
                        if cross(d1, d2) == 0.0 && d1[0] * d2[0] + d1[1] * d2[1] > 0.0 {
                            return Err(Error::Geometry("ring folds back on itself".into()));
                        }
                        continue;
                    }
                }
                if segments_intersect(edges[i].0, edges[i].1, edges[j].0, edges[j].1) {
                    return Err(Error::Geometry(format!("rings are not simple: edges {i} and {j} intersect")));
                }
            }
        }
        for (k, hole) in rings.iter().enumerate().skip(1) {
            if !point_in_ring(&rings[0], hole[0]) {
                return Err(Error::Geometry(format!("hole {} is not inside the outer ring", k - 1)));
            }
        }
        let area: f64 = rings.iter().map(|r| signed_area(r)).sum();
        if !(area > 0.0) {
            return Err(Error::Geometry("domain has non-positive area".into()));
        }
        let perimeter = edges.iter().map(|(a, b)| norm(sub(*b, *a))).sum();
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for v in &rings[0] {
            for d in 0..2 {
                lo[d] = lo[d].min(v[d]);
                hi[d] = hi[d].max(v[d]);
            }
        }
        Ok(PolygonDomain { rings, edges, area, perimeter, bbox: (lo, hi) })
    }

    pub fn rings(&self) -> &[Vec<[f64; 2]>] {
        &self.rings
    }

    pub fn edges(&self) -> &[([f64; 2], [f64; 2])] {
        &self.edges
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn perimeter(&self) -> f64 {
        self.perimeter
    }

    pub fn bbox(&self) -> ([f64; 2], [f64; 2]) {
        self.bbox
    }

    pub fn diameter(&self) -> f64 {
        norm(sub(self.bbox.1, self.bbox.0))
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        let mut inside = false;
        for ring in &self.rings {
            if point_in_ring(ring, p) {
                inside = !inside;
            }
        }
        inside
    }

    pub fn distance_to_boundary(&self, p: [f64; 2]) -> f64 {
        self.edges
            .iter()
            .map(|&(a, b)| {
                let e = sub(b, a);
                let t = ((p[0] - a[0]) * e[0] + (p[1] - a[1]) * e[1]) / (e[0] * e[0] + e[1] * e[1]);
                let t = t.clamp(0.0, 1.0);
                norm([a[0] + t * e[0] - p[0], a[1] + t * e[1] - p[1]])
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn dilate(&self, lambda: f64) -> Result<Self> {
        let scale = |r: &Vec<[f64; 2]>| r.iter().map(|v| [v[0] * lambda, v[1] * lambda]).collect::<Vec<_>>();
        let outer = scale(&self.rings[0]);
        let holes = self.rings[1..].iter().map(scale).collect();
        PolygonDomain::new(outer, holes)
    }

    fn cast(&self, x: [f64; 2], dir: [f64; 2]) -> Option<(f64, usize, f64)> {
        let scale = self.diameter().max(f64::MIN_POSITIVE);
        let mut best: Option<(f64, usize, f64)> = None;
        for (k, &(a, b)) in self.edges.iter().enumerate() {
            let e = sub(b, a);
            let denom = cross(dir, e);
            if denom.abs() <= 1e-12 * norm(e) {
                continue;
            }
            let ax = sub(a, x);
            let t = cross(ax, e) / denom;
            let u = cross(ax, dir) / denom;
            if t > 1e-12 * scale && (-1e-12..=1.0 + 1e-12).contains(&u) && best.is_none_or(|(bt, _, _)| t < bt) {
                best = Some((t, k, u));
            }
        }
        best
    }

    pub(super) fn ray_first_hit(&self, x: [f64; 2], theta: [f64; 2]) -> Option<Hit> {
        let mut dir = theta;
        for attempt in 0..2 {
            let hit = self.cast(x, dir)?;
            let (t, k, u) = hit;
            let at_vertex = u.abs() <= 1e-12 || (u - 1.0).abs() <= 1e-12;
            if at_vertex && attempt == 0 {
                let (s, c) = 1e-9f64.sin_cos();
                dir = [c * dir[0] - s * dir[1], s * dir[0] + c * dir[1]];
                continue;
            }
            let (a, b) = self.edges[k];
            let u = u.clamp(0.0, 1.0);
            let p = [a[0] + u * (b[0] - a[0]), a[1] + u * (b[1] - a[1])];
            return Some(Hit { point: [p[0], p[1], 0.0], patch: k, distance: t });
        }
        None
    }

    pub(super) fn sample_interior(&self, h: f64) -> InteriorSample {
        let (lo, hi) = self.bbox;
        let nx = ((hi[0] - lo[0]) / h).ceil() as usize;
        let ny = ((hi[1] - lo[1]) / h).ceil() as usize;
        let mut nodes = Vec::new();
        for j in 0..ny {
            for i in 0..nx {
                let p = [lo[0] + (i as f64 + 0.5) * h, lo[1] + (j as f64 + 0.5) * h];
                if self.contains(p) {
                    nodes.push([p[0], p[1], 0.0]);
                }
            }
        }
        let weights = vec![h * h; nodes.len()];
        InteriorSample { nodes, weights, h, dim: 2 }
    }

    pub(super) fn sample_boundary(&self, per_edge: impl Fn(f64) -> usize) -> BoundarySample {
        let mut out = BoundarySample::default();
        for (k, &(a, b)) in self.edges.iter().enumerate() {
            let e = sub(b, a);
            let len = norm(e);
            let m = per_edge(len).max(1);
            let normal = [e[1] / len, -e[0] / len, 0.0];
            out.patch_offsets.push(out.points.len());
            for i in 0..m {
                let s = (i as f64 + 0.5) / m as f64;
                out.points.push([a[0] + s * e[0], a[1] + s * e[1], 0.0]);
                out.weights.push(len / m as f64);
                out.normals.push(normal);
                out.patch.push(k);
            }
        }
        out.patch_offsets.push(out.points.len());
        out
    }

    /// Distance from `p` to edge `k`.
    pub fn edge_distance(&self, k: usize, p: [f64; 2]) -> f64 {
        let (a, b) = self.edges[k];
        let e = sub(b, a);
        let t = (((p[0] - a[0]) * e[0] + (p[1] - a[1]) * e[1]) / (e[0] * e[0] + e[1] * e[1])).clamp(0.0, 1.0);
        norm([a[0] + t * e[0] - p[0], a[1] + t * e[1] - p[1]])
    }
}

pub(super) fn as2(p: Point) -> [f64; 2] {
    [p[0], p[1]]
}
