//! ASCII dump of a P2 function: header, mesh checksum, one coefficient per
//! line in dof order.

use std::io::{BufRead, Write};
use std::sync::Arc;

use super::function::FeFunction;
use super::space::P2Space;
use crate::error::{Error, Result};

pub const FUNCTION_HEADER: &str = "pmcf-fun v1";

pub fn write_function<W: Write>(f: &FeFunction, mut out: W) -> Result<()> {
    writeln!(out, "{FUNCTION_HEADER}")?;
    writeln!(out, "checksum {:016x}", f.space().mesh_checksum())?;
    for c in f.coefficients() {
        writeln!(out, "{c:?}")?;
    }
    Ok(())
}

/// Reads a dump; the checksum must match `space`'s mesh.
pub fn read_function<R: BufRead>(input: R, space: &Arc<P2Space>) -> Result<FeFunction> {
    let mut lines = input.lines();
    let mut next = |n: usize| -> Result<String> {
        lines
            .next()
            .ok_or_else(|| Error::Parse {
                line: n,
                message: "unexpected end of file".into(),
            })?
            .map_err(Error::from)
    };
    if next(1)?.trim() != FUNCTION_HEADER {
        return Err(Error::Parse {
            line: 1,
            message: format!("missing header '{FUNCTION_HEADER}'"),
        });
    }
    let ck = next(2)?;
    let expected = format!("checksum {:016x}", space.mesh_checksum());
    if ck.trim() != expected {
        return Err(Error::Parse {
            line: 2,
            message: format!("mesh checksum mismatch: '{}'", ck.trim()),
        });
    }
    let mut coeffs = Vec::with_capacity(space.n_dofs());
    for i in 0..space.n_dofs() {
        let l = next(i + 3)?;
        let v = l.trim().parse::<f64>().map_err(|_| Error::Parse {
            line: i + 3,
            message: format!("bad coefficient '{l}'"),
        })?;
        coeffs.push(v);
    }
    FeFunction::from_coefficients(space, coeffs)
}
