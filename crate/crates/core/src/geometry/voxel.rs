use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};

use super::{BoundarySample, Hit, InteriorSample, Point};

/// Union of axis-aligned cubes `[i h, (i+1) h] × [j h, (j+1) h] × [k h, (k+1) h]`.
#[derive(Clone, Debug)]
pub struct VoxelDomain {
    h: f64,
    cells: Vec<[i64; 3]>,
    occupied: HashSet<[i64; 3]>,
    faces: Vec<([i64; 3], usize)>,
    face_index: HashMap<([i64; 3], usize), usize>,
    lo: [i64; 3],
    hi: [i64; 3],
}

impl PartialEq for VoxelDomain {
    fn eq(&self, other: &Self) -> bool {
        self.h == other.h && self.cells == other.cells
    }
}

/// Face directions: −x, +x, −y, +y, −z, +z.
const DIRS: [[i64; 3]; 6] = [[-1, 0, 0], [1, 0, 0], [0, -1, 0], [0, 1, 0], [0, 0, -1], [0, 0, 1]];

fn dir_of(axis: usize, positive: bool) -> usize {
    2 * axis + usize::from(positive)
}

impl VoxelDomain {
    pub fn new(h: f64, cells: impl IntoIterator<Item = [i64; 3]>) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Geometry(format!("voxel spacing {h} must be positive")));
        }
        let occupied: HashSet<[i64; 3]> = cells.into_iter().collect();
        if occupied.is_empty() {
            return Err(Error::Geometry("voxel set is empty".into()));
        }
        let mut cells: Vec<[i64; 3]> = occupied.iter().copied().collect();
        cells.sort_unstable();
        let mut lo = [i64::MAX; 3];
        let mut hi = [i64::MIN; 3];
        let mut faces = Vec::new();
        let mut face_index = HashMap::new();
        for c in &cells {
            for d in 0..3 {
                lo[d] = lo[d].min(c[d]);
                hi[d] = hi[d].max(c[d] + 1);
            }
            for (k, dv) in DIRS.iter().enumerate() {
                let nb = [c[0] + dv[0], c[1] + dv[1], c[2] + dv[2]];
                if !occupied.contains(&nb) {
                    face_index.insert((*c, k), faces.len());
                    faces.push((*c, k));
                }
            }
        }
        Ok(VoxelDomain { h, cells, occupied, faces, face_index, lo, hi })
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn cells(&self) -> &[[i64; 3]] {
        &self.cells
    }

    pub fn volume(&self) -> f64 {
        self.h.powi(3) * self.cells.len() as f64
    }

    pub fn surface(&self) -> f64 {
        self.h * self.h * self.faces.len() as f64
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn bbox(&self) -> ([f64; 3], [f64; 3]) {
        let f = |v: [i64; 3]| [v[0] as f64 * self.h, v[1] as f64 * self.h, v[2] as f64 * self.h];
        (f(self.lo), f(self.hi))
    }

    pub fn diameter(&self) -> f64 {
        let (a, b) = self.bbox();
        ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2) + (b[2] - a[2]).powi(2)).sqrt()
    }

    fn cell_of(&self, p: Point) -> [i64; 3] {
        [(p[0] / self.h).floor() as i64, (p[1] / self.h).floor() as i64, (p[2] / self.h).floor() as i64]
    }

    pub fn contains(&self, p: Point) -> bool {
        p.iter().all(|c| c.is_finite()) && self.occupied.contains(&self.cell_of(p))
    }

    pub fn dilate(&self, lambda: f64) -> Result<Self> {
        VoxelDomain::new(self.h * lambda, self.cells.iter().copied())
    }

    /// Geometry of exposed face `k`: center, outward normal, and the two
    /// in-plane unit axes.
    pub fn face(&self, k: usize) -> (Point, Point, usize, usize) {
        let (c, d) = self.faces[k];
        let axis = d / 2;
        let positive = d % 2 == 1;
        let mut center = [(c[0] as f64 + 0.5) * self.h, (c[1] as f64 + 0.5) * self.h, (c[2] as f64 + 0.5) * self.h];
        center[axis] += if positive { 0.5 * self.h } else { -0.5 * self.h };
        let mut normal = [0.0; 3];
        normal[axis] = if positive { 1.0 } else { -1.0 };
        (center, normal, (axis + 1) % 3, (axis + 2) % 3)
    }

    pub fn distance_to_boundary(&self, p: Point) -> f64 {
        let half = 0.5 * self.h;
        (0..self.faces.len())
            .map(|k| {
                let (c, _, u, v) = self.face(k);
                let axis = 3 - u - v;
                let mut d2 = (p[axis] - c[axis]).powi(2);
                for a in [u, v] {
                    let o = ((p[a] - c[a]).abs() - half).max(0.0);
                    d2 += o * o;
                }
                d2.sqrt()
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Amanatides–Woo traversal from the cell containing `x` to the first
    /// face whose neighbour is unoccupied.
    pub(super) fn ray_first_hit(&self, x: Point, theta: Point) -> Option<Hit> {
        let mut cell = self.cell_of(x);
        let mut step = [0i64; 3];
        let mut t_max = [f64::INFINITY; 3];
        let mut t_delta = [f64::INFINITY; 3];
        for d in 0..3 {
            if theta[d] > 0.0 {
                step[d] = 1;
                t_max[d] = ((cell[d] + 1) as f64 * self.h - x[d]) / theta[d];
                t_delta[d] = self.h / theta[d];
            } else if theta[d] < 0.0 {
                step[d] = -1;
                t_max[d] = (cell[d] as f64 * self.h - x[d]) / theta[d];
                t_delta[d] = -self.h / theta[d];
            }
        }
        let limit = 3 * ((self.hi[0] - self.lo[0]) + (self.hi[1] - self.lo[1]) + (self.hi[2] - self.lo[2])) as usize + 8;
        for _ in 0..limit {
            let axis = if t_max[0] <= t_max[1] && t_max[0] <= t_max[2] {
                0
            } else if t_max[1] <= t_max[2] {
                1
            } else {
                2
            };
            if !t_max[axis].is_finite() {
                return None;
            }
            let mut next = cell;
            next[axis] += step[axis];
            if !self.occupied.contains(&next) {
                let t = t_max[axis];
                let mut p = [x[0] + t * theta[0], x[1] + t * theta[1], x[2] + t * theta[2]];
                // snap onto the face plane
                p[axis] = (cell[axis] + i64::from(step[axis] > 0)) as f64 * self.h;
                let patch = self.face_index[&(cell, dir_of(axis, step[axis] > 0))];
                return Some(Hit { point: p, patch, distance: t });
            }
            cell = next;
            t_max[axis] += t_delta[axis];
        }
        None
    }

    pub(super) fn sample_interior(&self, h: f64) -> InteriorSample {
        let k = ((self.h / h).round() as usize).max(1);
        let hs = self.h / k as f64;
        let mut nodes = Vec::with_capacity(self.cells.len() * k * k * k);
        for c in &self.cells {
            for a in 0..k {
                for b in 0..k {
                    for d in 0..k {
                        nodes.push([
                            c[0] as f64 * self.h + (d as f64 + 0.5) * hs,
                            c[1] as f64 * self.h + (b as f64 + 0.5) * hs,
                            c[2] as f64 * self.h + (a as f64 + 0.5) * hs,
                        ]);
                    }
                }
            }
        }
        let weights = vec![hs * hs * hs; nodes.len()];
        InteriorSample { nodes, weights, h: hs, dim: 3 }
    }

    pub(super) fn sample_boundary(&self, m: usize) -> BoundarySample {
        let m = m.max(1);
        let mut out = BoundarySample::default();
        let w = self.h * self.h / (m * m) as f64;
        for k in 0..self.faces.len() {
            let (c, normal, u, v) = self.face(k);
            out.patch_offsets.push(out.points.len());
            for i in 0..m {
                for j in 0..m {
                    let mut p = c;
                    p[u] += ((i as f64 + 0.5) / m as f64 - 0.5) * self.h;
                    p[v] += ((j as f64 + 0.5) / m as f64 - 0.5) * self.h;
                    out.points.push(p);
                    out.weights.push(w);
                    out.normals.push(normal);
                    out.patch.push(k);
                }
            }
        }
        out.patch_offsets.push(out.points.len());
        out
    }
}
