use std::collections::HashMap;
use std::f64::consts::PI;

use super::domain::{DomainGeometry, DomainKind};
use crate::error::{Error, Result};
use crate::Point;

/// Default lower bound on interior angles of generated meshes.
pub const DEFAULT_MIN_ANGLE_DEG: f64 = 20.0;

const NO_TRIANGLE: usize = usize::MAX;
const SMOOTHING_SWEEPS: usize = 50;
const SANDWICH_SAMPLES_PER_EDGE: usize = 64;
/// Boundary vertices must satisfy `|d| <= BOUNDARY_TOL * diameter`.
const BOUNDARY_TOL: f64 = 1e-10;

/// Conforming triangulation of the discrete domain `Omega^h`.
///
/// Immutable after construction; the edge table is built once and shared
/// with the finite element space.
#[derive(Debug, Clone)]
pub struct TriMesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    boundary: Vec<bool>,
    h: f64,
    domain: DomainGeometry,
    edges: Vec<[usize; 2]>,
    edge_triangles: Vec<[usize; 2]>,
    triangle_edges: Vec<[usize; 3]>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshQuality {
    pub min_angle_deg: f64,
    pub max_edge: f64,
    pub min_edge: f64,
    pub boundary_edges: usize,
}

impl TriMesh {
    /// Assembles a mesh from raw parts and checks conformity and
    /// orientation. Boundary flags must agree with the boundary edges.
    pub fn from_parts(
        vertices: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        boundary: Vec<bool>,
        domain: DomainGeometry,
    ) -> Result<Self> {
        if boundary.len() != vertices.len() {
            return Err(Error::Mesh(format!(
                "{} boundary flags for {} vertices",
                boundary.len(),
                vertices.len()
            )));
        }
        if triangles.is_empty() {
            return Err(Error::Mesh("no triangles".into()));
        }
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= vertices.len()) {
                return Err(Error::Mesh(format!("triangle {t} references a missing vertex")));
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::Mesh(format!("triangle {t} is degenerate")));
            }
            if signed_area(&vertices, tri) <= 0.0 {
                return Err(Error::Mesh(format!("triangle {t} is not positively oriented")));
            }
        }

        let mut edge_index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges = Vec::new();
        let mut edge_triangles: Vec<[usize; 2]> = Vec::new();
        // Orientation in which the first triangle traverses each edge.
        let mut edge_dir: Vec<bool> = Vec::new();
        let mut triangle_edges = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            let mut te = [0; 3];
            for i in 0..3 {
                let a = tri[(i + 1) % 3];
                let b = tri[(i + 2) % 3];
                let key = (a.min(b), a.max(b));
                let forward = a < b;
                let e = match edge_index.get(&key) {
                    Some(&e) => {
                        if edge_triangles[e][1] != NO_TRIANGLE {
                            return Err(Error::Mesh(format!(
                                "edge ({}, {}) is shared by more than two triangles",
                                key.0, key.1
                            )));
                        }
                        if edge_dir[e] == forward {
                            return Err(Error::Mesh(format!(
                                "edge ({}, {}) has inconsistent orientation",
                                key.0, key.1
                            )));
                        }
                        edge_triangles[e][1] = t;
                        e
                    }
                    None => {
                        let e = edges.len();
                        edge_index.insert(key, e);
                        edges.push([key.0, key.1]);
                        edge_triangles.push([t, NO_TRIANGLE]);
                        edge_dir.push(forward);
                        e
                    }
                };
                te[i] = e;
            }
            triangle_edges.push(te);
        }

        let mut on_boundary_edge = vec![false; vertices.len()];
        for (e, et) in edges.iter().zip(&edge_triangles) {
            if et[1] == NO_TRIANGLE {
                on_boundary_edge[e[0]] = true;
                on_boundary_edge[e[1]] = true;
            }
        }
        if let Some(v) = (0..vertices.len()).find(|&v| on_boundary_edge[v] != boundary[v]) {
            return Err(Error::Mesh(format!(
                "boundary flag of vertex {v} disagrees with the boundary edges"
            )));
        }

        let h = edges
            .iter()
            .map(|e| dist(vertices[e[0]], vertices[e[1]]))
            .fold(0.0, f64::max);
        Ok(Self {
            vertices,
            triangles,
            boundary,
            h,
            domain,
            edges,
            edge_triangles,
            triangle_edges,
        })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary_flags(&self) -> &[bool] {
        &self.boundary
    }

    pub fn domain(&self) -> &DomainGeometry {
        &self.domain
    }

    /// Mesh size: the longest edge.
    pub fn h(&self) -> f64 {
        self.h
    }

    /// Unique edges as sorted vertex pairs.
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    /// For triangle `t`, the edge opposite local vertex `i`.
    pub fn triangle_edges(&self) -> &[[usize; 3]] {
        &self.triangle_edges
    }

    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.edge_triangles[e][1] == NO_TRIANGLE
    }

    /// Triangles adjacent to edge `e` (one for boundary edges).
    pub fn edge_triangles(&self, e: usize) -> impl Iterator<Item = usize> + '_ {
        self.edge_triangles[e].iter().copied().filter(|&t| t != NO_TRIANGLE)
    }

    pub fn boundary_edges(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.edges.len()).filter(|&e| self.is_boundary_edge(e))
    }

    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        let tri = self.triangles[t];
        [self.vertices[tri[0]], self.vertices[tri[1]], self.vertices[tri[2]]]
    }

    pub fn area(&self) -> f64 {
        self.triangles.iter().map(|tri| signed_area(&self.vertices, tri)).sum()
    }

    pub fn quality(&self) -> MeshQuality {
        let mut min_angle = f64::INFINITY;
        for tri in &self.triangles {
            min_angle = min_angle.min(min_triangle_angle(&self.vertices, tri));
        }
        let lengths = self
            .edges
            .iter()
            .map(|e| dist(self.vertices[e[0]], self.vertices[e[1]]));
        let min_edge = lengths.clone().fold(f64::INFINITY, f64::min);
        MeshQuality {
            min_angle_deg: min_angle.to_degrees(),
            max_edge: self.h,
            min_edge,
            boundary_edges: self.boundary_edges().count(),
        }
    }

    /// Checks the geometric invariants that [`build_mesh`] guarantees:
    /// the angle floor and that every boundary triangle has exactly two
    /// vertices on the exact boundary curve.
    pub fn check_invariants(&self, min_angle_deg: f64) -> Result<()> {
        let q = self.quality();
        if q.min_angle_deg < min_angle_deg {
            return Err(Error::Mesh(format!(
                "minimum angle {:.3} deg below floor {min_angle_deg}",
                q.min_angle_deg
            )));
        }
        let tol = BOUNDARY_TOL * self.domain.diameter();
        for e in self.boundary_edges() {
            let t = self.edge_triangles[e][0];
            let on = self.triangles[t]
                .iter()
                .filter(|&&v| self.domain.signed_distance(self.vertices[v]).abs() <= tol)
                .count();
            if on != 2 {
                return Err(Error::Mesh(format!(
                    "boundary triangle {t} has {on} vertices on the boundary curve"
                )));
            }
        }
        Ok(())
    }
}

/// Builds a boundary-fitted structured mesh with `h <= target_h`.
///
/// Disks and ellipses get a polar ring mesh: ring `i` of `N` carries `6 i`
/// vertices, the outer ring lies exactly on the boundary curve. The mesh is
/// invariant under rotation by 60 degrees for the disk.
pub fn build_mesh(domain: &DomainGeometry, target_h: f64) -> Result<TriMesh> {
    if !(target_h > 0.0 && target_h.is_finite()) {
        return Err(Error::Mesh(format!("target_h must be positive, got {target_h}")));
    }
    let (sx, sy) = match domain.kind() {
        DomainKind::Disk { radius } => (*radius, *radius),
        DomainKind::Ellipse { a, b } => (*a, *b),
        DomainKind::Custom(c) => {
            return Err(Error::Mesh(format!(
                "no built-in mesher for custom domain '{}'; import a mesh instead",
                c.name
            )))
        }
    };
    // Boundary triangles must resolve the curvature of the boundary.
    let h0 = domain.min_curvature_radius().unwrap_or(f64::INFINITY);
    if target_h >= h0 {
        return Err(Error::Mesh(format!(
            "target_h = {target_h} does not resolve the boundary (requires h < {h0})"
        )));
    }

    let scale = sx.max(sy);
    let mut rings = ((scale / target_h).ceil() as usize).max(1);
    let mesh = loop {
        let mesh = polar_mesh(domain, sx, sy, rings)?;
        if mesh.h() <= target_h {
            break mesh;
        }
        rings += 1;
    };
    let mesh = if mesh.quality().min_angle_deg < DEFAULT_MIN_ANGLE_DEG {
        smooth(mesh)?
    } else {
        mesh
    };
    mesh.check_invariants(DEFAULT_MIN_ANGLE_DEG)?;
    Ok(mesh)
}

fn polar_mesh(domain: &DomainGeometry, sx: f64, sy: f64, rings: usize) -> Result<TriMesh> {
    let n = rings;
    let ring_start = |i: usize| if i == 0 { 0 } else { 1 + 3 * i * (i - 1) };
    let mut vertices = Vec::with_capacity(ring_start(n + 1));
    let mut boundary = Vec::with_capacity(ring_start(n + 1));
    vertices.push([0.0, 0.0]);
    boundary.push(false);
    for i in 1..=n {
        let count = 6 * i;
        let r = i as f64 / n as f64;
        for theta in ring_angles(sx, sy, count) {
            let (s, c) = theta.sin_cos();
            if i == n {
                vertices.push([sx * c, sy * s]);
            } else {
                vertices.push([sx * r * c, sy * r * s]);
            }
            boundary.push(i == n);
        }
    }

    let mut triangles = Vec::with_capacity(6 * n * n);
    let mut push = |tri: [usize; 3], vertices: &[Point]| {
        if signed_area(vertices, &tri) < 0.0 {
            triangles.push([tri[0], tri[2], tri[1]]);
        } else {
            triangles.push(tri);
        }
    };
    for j in 0..6 {
        push([0, 1 + j, 1 + (j + 1) % 6], &vertices);
    }
    for i in 2..=n {
        let m = 6 * (i - 1);
        let k = 6 * i;
        let inner = |a: usize| ring_start(i - 1) + a % m;
        let outer = |b: usize| ring_start(i) + b % k;
        let (mut a, mut b) = (0, 0);
        while a < m || b < k {
            // Compare angular positions (a+1)/m and (b+1)/k exactly.
            let advance_outer = a == m || (b < k && (b + 1) * m <= (a + 1) * k);
            if advance_outer {
                push([inner(a), outer(b), outer(b + 1)], &vertices);
                b += 1;
            } else {
                push([inner(a), inner(a + 1), outer(b)], &vertices);
                a += 1;
            }
        }
    }
    TriMesh::from_parts(vertices, triangles, boundary, domain.clone())
}

/// Parameter angles of `count` points spaced evenly by arc length on the
/// ellipse `(sx cos t, sy sin t)`; uniform angles for a circle.
fn ring_angles(sx: f64, sy: f64, count: usize) -> Vec<f64> {
    if sx == sy {
        return (0..count).map(|j| 2.0 * PI * j as f64 / count as f64).collect();
    }
    let speed = |t: f64| (sx * t.sin()).hypot(sy * t.cos());
    // cumulative arc length on a fine grid, Simpson's rule per cell
    let cells = 64 * count.max(16);
    let dt = 2.0 * PI / cells as f64;
    let mut cum = Vec::with_capacity(cells + 1);
    cum.push(0.0);
    for c in 0..cells {
        let t0 = c as f64 * dt;
        let ds = dt / 6.0 * (speed(t0) + 4.0 * speed(t0 + 0.5 * dt) + speed(t0 + dt));
        cum.push(cum[c] + ds);
    }
    let total = cum[cells];
    let mut out = Vec::with_capacity(count);
    let mut c = 0;
    for j in 0..count {
        let target = total * j as f64 / count as f64;
        while cum[c + 1] < target {
            c += 1;
        }
        out.push((c as f64 + (target - cum[c]) / (cum[c + 1] - cum[c])) * dt);
    }
    out
}

/// Laplacian smoothing of interior vertices until the angle floor is met;
/// a move is undone when it shrinks the smallest angle around the vertex.
fn smooth(mut mesh: TriMesh) -> Result<TriMesh> {
    let nv = mesh.vertices.len();
    let mut neighbours = vec![Vec::new(); nv];
    for e in &mesh.edges {
        neighbours[e[0]].push(e[1]);
        neighbours[e[1]].push(e[0]);
    }
    let mut incident = vec![Vec::new(); nv];
    for (t, tri) in mesh.triangles.iter().enumerate() {
        for &v in tri {
            incident[v].push(t);
        }
    }
    let local_min = |m: &TriMesh, v: usize| {
        incident[v].iter().fold(f64::INFINITY, |a: f64, &t| {
            let tri = &m.triangles[t];
            if signed_area(&m.vertices, tri) <= 0.0 {
                f64::NEG_INFINITY
            } else {
                a.min(min_triangle_angle(&m.vertices, tri))
            }
        })
    };
    for _ in 0..SMOOTHING_SWEEPS {
        for v in 0..nv {
            if mesh.boundary[v] || neighbours[v].is_empty() {
                continue;
            }
            let inv = 1.0 / neighbours[v].len() as f64;
            let mut c = [0.0, 0.0];
            for &w in &neighbours[v] {
                c[0] += mesh.vertices[w][0] * inv;
                c[1] += mesh.vertices[w][1] * inv;
            }
            let before = local_min(&mesh, v);
            let old = mesh.vertices[v];
            mesh.vertices[v] = c;
            if local_min(&mesh, v) < before {
                mesh.vertices[v] = old;
            }
        }
        if mesh.quality().min_angle_deg >= DEFAULT_MIN_ANGLE_DEG {
            break;
        }
    }
    let q = mesh.quality();
    if q.min_angle_deg < DEFAULT_MIN_ANGLE_DEG {
        return Err(Error::Mesh(format!(
            "minimum angle {:.2} deg after {SMOOTHING_SWEEPS} smoothing sweeps",
            q.min_angle_deg
        )));
    }
    mesh.h = mesh
        .edges
        .iter()
        .map(|e| dist(mesh.vertices[e[0]], mesh.vertices[e[1]]))
        .fold(0.0, f64::max);
    Ok(mesh)
}

/// Measured constant `c` in `dOmega^h within {|d| <= c h^2}`: the largest
/// `|d|` over dense samples of every boundary edge, divided by `h^2`.
pub fn sandwich_constant(mesh: &TriMesh) -> f64 {
    let h2 = mesh.h() * mesh.h();
    max_boundary_deviation(mesh) / h2
}

pub(crate) fn max_boundary_deviation(mesh: &TriMesh) -> f64 {
    let mut worst: f64 = 0.0;
    for e in mesh.boundary_edges() {
        let [a, b] = mesh.edges[e];
        let (pa, pb) = (mesh.vertices[a], mesh.vertices[b]);
        for s in 0..=SANDWICH_SAMPLES_PER_EDGE {
            let t = s as f64 / SANDWICH_SAMPLES_PER_EDGE as f64;
            let p = [pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])];
            worst = worst.max(mesh.domain.signed_distance(p).abs());
        }
    }
    worst
}

pub(crate) fn signed_area(vertices: &[Point], tri: &[usize; 3]) -> f64 {
    let [a, b, c] = [vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]];
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

fn min_triangle_angle(vertices: &[Point], tri: &[usize; 3]) -> f64 {
    let mut min: f64 = PI;
    for i in 0..3 {
        let p = vertices[tri[i]];
        let q = vertices[tri[(i + 1) % 3]];
        let r = vertices[tri[(i + 2) % 3]];
        let u = [q[0] - p[0], q[1] - p[1]];
        let v = [r[0] - p[0], r[1] - p[1]];
        let cross = u[0] * v[1] - u[1] * v[0];
        let dot = u[0] * v[0] + u[1] * v[1];
        min = min.min(cross.abs().atan2(dot));
    }
    min
}

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}
