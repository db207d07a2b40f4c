//! ASCII mesh format:
//!
//! ```text
//! pmcf-mesh v1
//! V <count>
//! <x> <y>
//! T <count>
//! <i> <j> <k>
//! B <count>
//! <vertex index>
//! ```
//!
//! Coordinates are written with the shortest representation that parses
//! back to the same `f64`, so a write/read cycle is bit-exact.

use std::io::{BufRead, Write};

use super::domain::DomainGeometry;
use super::mesh::TriMesh;
use crate::error::{Error, Result};

pub const MESH_HEADER: &str = "pmcf-mesh v1";

pub fn write_mesh<W: Write>(mesh: &TriMesh, mut out: W) -> Result<()> {
    writeln!(out, "{MESH_HEADER}")?;
    writeln!(out, "V {}", mesh.vertices().len())?;
    for p in mesh.vertices() {
        writeln!(out, "{:?} {:?}", p[0], p[1])?;
    }
    writeln!(out, "T {}", mesh.triangles().len())?;
    for t in mesh.triangles() {
        writeln!(out, "{} {} {}", t[0], t[1], t[2])?;
    }
    let boundary: Vec<usize> = mesh
        .boundary_flags()
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| i)
        .collect();
    writeln!(out, "B {}", boundary.len())?;
    for b in boundary {
        writeln!(out, "{b}")?;
    }
    Ok(())
}

struct Lines<R> {
    inner: std::io::Lines<R>,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    fn next_line(&mut self) -> Result<String> {
        loop {
            self.line += 1;
            match self.inner.next() {
                Some(l) => {
                    let l = l?;
                    let t = l.trim();
                    if !t.is_empty() {
                        return Ok(t.to_string());
                    }
                }
                None => return Err(self.err("unexpected end of file")),
            }
        }
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            message: message.into(),
        }
    }

    fn section(&mut self, tag: &str) -> Result<usize> {
        let l = self.next_line()?;
        let mut it = l.split_whitespace();
        if it.next() != Some(tag) {
            return Err(self.err(format!("expected section '{tag}'")));
        }
        let n = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| self.err("bad count"))?;
        Ok(n)
    }

    fn numbers<T: std::str::FromStr>(&mut self, count: usize) -> Result<Vec<T>> {
        let l = self.next_line()?;
        let v: Vec<T> = l
            .split_whitespace()
            .map(|s| s.parse::<T>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| self.err(format!("cannot parse '{l}'")))?;
        if v.len() != count {
            return Err(self.err(format!("expected {count} values, found {}", v.len())));
        }
        Ok(v)
    }
}

/// Reads a mesh and attaches it to `domain`.
pub fn read_mesh<R: BufRead>(input: R, domain: DomainGeometry) -> Result<TriMesh> {
    let mut lines = Lines {
        inner: input.lines(),
        line: 0,
    };
    if lines.next_line()? != MESH_HEADER {
        return Err(lines.err(format!("missing header '{MESH_HEADER}'")));
    }
    let nv = lines.section("V")?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let v = lines.numbers::<f64>(2)?;
        vertices.push([v[0], v[1]]);
    }
    let nt = lines.section("T")?;
    let mut triangles = Vec::with_capacity(nt);
    for _ in 0..nt {
        let t = lines.numbers::<usize>(3)?;
        triangles.push([t[0], t[1], t[2]]);
    }
    let nb = lines.section("B")?;
    let mut boundary = vec![false; nv];
    for _ in 0..nb {
        let b = lines.numbers::<usize>(1)?[0];
        if b >= nv {
            return Err(lines.err(format!("boundary index {b} out of range")));
        }
        boundary[b] = true;
    }
    TriMesh::from_parts(vertices, triangles, boundary, domain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_mesh;

    #[test]
    fn round_trip_is_bit_exact() {
        let d = DomainGeometry::disk(1.0).unwrap();
        let mesh = build_mesh(&d, 0.3).unwrap();
        let mut buf = Vec::new();
        write_mesh(&mesh, &mut buf).unwrap();
        let back = read_mesh(&buf[..], d).unwrap();
        assert_eq!(back.triangles(), mesh.triangles());
        assert_eq!(back.boundary_flags(), mesh.boundary_flags());
        for (a, b) in back.vertices().iter().zip(mesh.vertices()) {
            assert_eq!(a[0].to_bits(), b[0].to_bits());
            assert_eq!(a[1].to_bits(), b[1].to_bits());
        }
        let mut again = Vec::new();
        write_mesh(&back, &mut again).unwrap();
        assert_eq!(buf, again);
    }

    #[test]
    fn malformed_input_reports_line() {
        let d = DomainGeometry::disk(1.0).unwrap();
        let bad = "pmcf-mesh v1\nV 1\n0.0 zero\n";
        match read_mesh(bad.as_bytes(), d.clone()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(read_mesh("nope\n".as_bytes(), d).is_err());
    }
}
