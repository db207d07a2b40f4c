use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::TriMesh;
use crate::Point;

const NOT_INTERIOR: usize = usize::MAX;
const LOCATE_TOL: f64 = 1e-12;

/// Per-triangle affine data: area and the constant barycentric gradients.
#[derive(Debug, Clone, Copy)]
pub struct TriangleGeometry {
    pub area: f64,
    pub grad_lambda: [[f64; 2]; 3],
    pub origin: Point,
}

impl TriangleGeometry {
    fn new(p: [Point; 3]) -> Self {
        let det = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]);
        let inv = 1.0 / det;
        let grad_lambda = [
            [(p[1][1] - p[2][1]) * inv, (p[2][0] - p[1][0]) * inv],
            [(p[2][1] - p[0][1]) * inv, (p[0][0] - p[2][0]) * inv],
            [(p[0][1] - p[1][1]) * inv, (p[1][0] - p[0][0]) * inv],
        ];
        Self {
            area: 0.5 * det,
            grad_lambda,
            origin: p[0],
        }
    }

    pub fn barycentric(&self, x: Point) -> [f64; 3] {
        let d = [x[0] - self.origin[0], x[1] - self.origin[1]];
        let l1 = self.grad_lambda[1][0] * d[0] + self.grad_lambda[1][1] * d[1];
        let l2 = self.grad_lambda[2][0] * d[0] + self.grad_lambda[2][1] * d[1];
        [1.0 - l1 - l2, l1, l2]
    }
}

/// P2 basis at barycentric coordinates. Order: three vertex functions, then
/// the edge functions for the edges opposite vertex 0, 1, 2.
pub fn basis(l: [f64; 3]) -> [f64; 6] {
    [
        l[0] * (2.0 * l[0] - 1.0),
        l[1] * (2.0 * l[1] - 1.0),
        l[2] * (2.0 * l[2] - 1.0),
        4.0 * l[1] * l[2],
        4.0 * l[2] * l[0],
        4.0 * l[0] * l[1],
    ]
}

pub fn basis_gradients(l: [f64; 3], g: &[[f64; 2]; 3]) -> [[f64; 2]; 6] {
    let mut out = [[0.0; 2]; 6];
    for i in 0..3 {
        let s = 4.0 * l[i] - 1.0;
        out[i] = [s * g[i][0], s * g[i][1]];
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        out[3 + i] = [
            4.0 * (l[j] * g[k][0] + l[k] * g[j][0]),
            4.0 * (l[j] * g[k][1] + l[k] * g[j][1]),
        ];
    }
    out
}

/// Uniform bucket grid over the mesh bounding box.
#[derive(Debug)]
struct Locator {
    min: Point,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<usize>>,
}

impl Locator {
    fn new(mesh: &TriMesh) -> Self {
        let mut min = [f64::INFINITY; 2];
        let mut max = [f64::NEG_INFINITY; 2];
        for p in mesh.vertices() {
            for d in 0..2 {
                min[d] = min[d].min(p[d]);
                max[d] = max[d].max(p[d]);
            }
        }
        let cell = mesh.h().max(1e-300);
        let nx = (((max[0] - min[0]) / cell).ceil() as usize).max(1);
        let ny = (((max[1] - min[1]) / cell).ceil() as usize).max(1);
        let mut buckets = vec![Vec::new(); nx * ny];
        for t in 0..mesh.triangles().len() {
            let pts = mesh.triangle_points(t);
            let lo = [0, 1].map(|d| pts.iter().map(|p| p[d]).fold(f64::INFINITY, f64::min));
            let hi = [0, 1].map(|d| pts.iter().map(|p| p[d]).fold(f64::NEG_INFINITY, f64::max));
            let (i0, j0) = Self::cell_of(min, cell, nx, ny, lo);
            let (i1, j1) = Self::cell_of(min, cell, nx, ny, hi);
            for j in j0..=j1 {
                for i in i0..=i1 {
                    buckets[j * nx + i].push(t);
                }
            }
        }
        Self {
            min,
            cell,
            nx,
            ny,
            buckets,
        }
    }

    fn cell_of(min: Point, cell: f64, nx: usize, ny: usize, p: Point) -> (usize, usize) {
        let i = ((p[0] - min[0]) / cell).floor().max(0.0) as usize;
        let j = ((p[1] - min[1]) / cell).floor().max(0.0) as usize;
        (i.min(nx - 1), j.min(ny - 1))
    }

    fn candidates(&self, p: Point) -> Option<&[usize]> {
        let eps = 1e-9 * self.cell;
        if p[0] < self.min[0] - eps
            || p[1] < self.min[1] - eps
            || p[0] > self.min[0] + self.nx as f64 * self.cell + eps
            || p[1] > self.min[1] + self.ny as f64 * self.cell + eps
        {
            return None;
        }
        let (i, j) = Self::cell_of(self.min, self.cell, self.nx, self.ny, p);
        Some(&self.buckets[j * self.nx + i])
    }
}

/// The space `V_h` (and its unconstrained parent) on a fixed mesh.
#[derive(Debug)]
pub struct P2Space {
    mesh: Arc<TriMesh>,
    dof_coords: Vec<Point>,
    triangle_dofs: Vec<[usize; 6]>,
    boundary_dof: Vec<bool>,
    interior: Vec<usize>,
    interior_index: Vec<usize>,
    geometry: Vec<TriangleGeometry>,
    locator: Locator,
    checksum: u64,
}

impl P2Space {
    pub fn new(mesh: Arc<TriMesh>) -> Arc<Self> {
        let nv = mesh.vertices().len();
        let mut dof_coords: Vec<Point> = mesh.vertices().to_vec();
        let mut boundary_dof: Vec<bool> = mesh.boundary_flags().to_vec();
        for (e, [a, b]) in mesh.edges().iter().enumerate() {
            let (pa, pb) = (mesh.vertices()[*a], mesh.vertices()[*b]);
            dof_coords.push([0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]);
            boundary_dof.push(mesh.is_boundary_edge(e));
        }
        let triangle_dofs = mesh
            .triangles()
            .iter()
            .zip(mesh.triangle_edges())
            .map(|(t, e)| [t[0], t[1], t[2], nv + e[0], nv + e[1], nv + e[2]])
            .collect();
        let mut interior = Vec::new();
        let mut interior_index = vec![NOT_INTERIOR; dof_coords.len()];
        for (d, &b) in boundary_dof.iter().enumerate() {
            if !b {
                interior_index[d] = interior.len();
                interior.push(d);
            }
        }
        let geometry = (0..mesh.triangles().len())
            .map(|t| TriangleGeometry::new(mesh.triangle_points(t)))
            .collect();
        let locator = Locator::new(&mesh);
        let checksum = mesh_checksum(&mesh);
        Arc::new(Self {
            mesh,
            dof_coords,
            triangle_dofs,
            boundary_dof,
            interior,
            interior_index,
            geometry,
            locator,
            checksum,
        })
    }

    pub fn mesh(&self) -> &Arc<TriMesh> {
        &self.mesh
    }

    pub fn n_dofs(&self) -> usize {
        self.dof_coords.len()
    }

    pub fn n_interior(&self) -> usize {
        self.interior.len()
    }

    /// The node set: vertices followed by edge midpoints.
    pub fn dof_coordinates(&self) -> &[Point] {
        &self.dof_coords
    }

    pub fn is_boundary_dof(&self, d: usize) -> bool {
        self.boundary_dof[d]
    }

    pub fn interior_dofs(&self) -> &[usize] {
        &self.interior
    }

    pub fn boundary_dofs(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_dofs()).filter(|&d| self.boundary_dof[d])
    }

    /// Position of dof `d` among the interior unknowns.
    pub fn interior_index(&self, d: usize) -> Option<usize> {
        let i = self.interior_index[d];
        (i != NOT_INTERIOR).then_some(i)
    }

    pub fn n_triangles(&self) -> usize {
        self.triangle_dofs.len()
    }

    pub fn triangle_dofs(&self, t: usize) -> &[usize; 6] {
        &self.triangle_dofs[t]
    }

    pub fn geometry(&self, t: usize) -> &TriangleGeometry {
        &self.geometry[t]
    }

    pub fn point_at(&self, t: usize, l: [f64; 3]) -> Point {
        let [a, b, c] = self.mesh.triangle_points(t);
        [
            l[0] * a[0] + l[1] * b[0] + l[2] * c[0],
            l[0] * a[1] + l[1] * b[1] + l[2] * c[1],
        ]
    }

    /// Triangle containing `p` and its barycentric coordinates.
    pub fn locate(&self, p: Point) -> Result<(usize, [f64; 3])> {
        let cands = self.locator.candidates(p).ok_or(Error::PointOutside(p[0], p[1]))?;
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        for &t in cands {
            let l = self.geometry[t].barycentric(p);
            let m = l[0].min(l[1]).min(l[2]);
            if m >= -LOCATE_TOL && best.is_none_or(|b| m > b.2) {
                best = Some((t, l, m));
            }
        }
        best.map(|(t, l, _)| (t, l)).ok_or(Error::PointOutside(p[0], p[1]))
    }

    /// Like [`locate`](Self::locate), but falls back to the triangle that
    /// is least violated, for points slightly outside `Omega^h`.
    pub fn locate_nearest(&self, p: Point) -> (usize, [f64; 3]) {
        if let Ok(found) = self.locate(p) {
            return found;
        }
        let mut best = (0, [1.0, 0.0, 0.0], f64::NEG_INFINITY);
        for (t, g) in self.geometry.iter().enumerate() {
            let l = g.barycentric(p);
            let m = l[0].min(l[1]).min(l[2]);
            if m > best.2 {
                best = (t, l, m);
            }
        }
        (best.0, best.1)
    }

    /// FNV-1a hash of the vertex coordinates and connectivity.
    pub fn mesh_checksum(&self) -> u64 {
        self.checksum
    }
}

fn mesh_checksum(mesh: &TriMesh) -> u64 {
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut feed = |x: u64| {
        for byte in x.to_le_bytes() {
            h ^= u64::from(byte);
            h = h.wrapping_mul(PRIME);
        }
    };
    for p in mesh.vertices() {
        feed(p[0].to_bits());
        feed(p[1].to_bits());
    }
    for t in mesh.triangles() {
        for &v in t {
            feed(v as u64);
        }
    }
    h
}
