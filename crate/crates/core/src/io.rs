//! Field dumps, key-value reports, and CSV tables.
//!
//! Dump format: one ASCII header line
//! `HALLFIELD v1 kind=<scalar|face|edge> n=<n> order=x-fastest endian=little fp=64`
//! followed by raw little-endian 64-bit floats, components concatenated in
//! x, y, z order.

use crate::error::{Error, Result};
use crate::grid::{EdgeField, FaceField, Field3, Grid, ScalarField};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Scalar,
    Face,
    Edge,
}

impl FieldKind {
    fn name(self) -> &'static str {
        match self {
            FieldKind::Scalar => "scalar",
            FieldKind::Face => "face",
            FieldKind::Edge => "edge",
        }
    }
}

fn header(kind: FieldKind, n: usize) -> String {
    format!(
        "HALLFIELD v1 kind={} n={} order=x-fastest endian=little fp=64\n",
        kind.name(),
        n
    )
}

fn write_components(path: &Path, kind: FieldKind, n: usize, comps: &[&Field3]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(header(kind, n).as_bytes())?;
    for c in comps {
        for v in &c.data {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_scalar(path: &Path, f: &ScalarField) -> Result<()> {
    write_components(path, FieldKind::Scalar, f.grid.n(), &[&f.values])
}

pub fn write_face(path: &Path, f: &FaceField) -> Result<()> {
    write_components(path, FieldKind::Face, f.grid.n(), &[&f.fx, &f.fy, &f.fz])
}

pub fn write_edge(path: &Path, f: &EdgeField) -> Result<()> {
    write_components(path, FieldKind::Edge, f.grid.n(), &[&f.ex, &f.ey, &f.ez])
}

fn read_dump(path: &Path) -> Result<(FieldKind, usize, Vec<f64>)> {
    let mut r = BufReader::new(File::open(path)?);
    let mut line = Vec::new();
    loop {
        let mut byte = [0u8; 1];
        r.read_exact(&mut byte)?;
        if byte[0] == b'\n' {
            break;
        }
        line.push(byte[0]);
        if line.len() > 256 {
            return Err(Error::Config("dump header too long".into()));
        }
    }
    let text =
        String::from_utf8(line).map_err(|_| Error::Config("dump header not UTF-8".into()))?;
    let mut kind = None;
    let mut n = None;
    let mut fields = text.split_whitespace();
    if fields.next() != Some("HALLFIELD") || fields.next() != Some("v1") {
        return Err(Error::Config(format!("bad dump header: {text:?}")));
    }
    for field in fields {
        match field.split_once('=') {
            Some(("kind", v)) => {
                kind = Some(match v {
                    "scalar" => FieldKind::Scalar,
                    "face" => FieldKind::Face,
                    "edge" => FieldKind::Edge,
                    _ => return Err(Error::Config(format!("bad dump kind {v:?}"))),
                })
            }
            Some(("n", v)) => n = Some(v.parse().map_err(|_| Error::Config("bad dump n".into()))?),
            Some(("order", "x-fastest")) | Some(("endian", "little")) | Some(("fp", "64")) => {}
            _ => return Err(Error::Config(format!("bad dump header field {field:?}"))),
        }
    }
    let kind = kind.ok_or_else(|| Error::Config("dump header missing kind".into()))?;
    let n = n.ok_or_else(|| Error::Config("dump header missing n".into()))?;
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() % 8 != 0 {
        return Err(Error::Config("dump payload not 8-byte aligned".into()));
    }
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok((kind, n, values))
}

pub fn read_scalar(path: &Path) -> Result<ScalarField> {
    let (kind, n, values) = read_dump(path)?;
    if kind != FieldKind::Scalar {
        return Err(Error::Config(format!(
            "expected scalar dump, got {}",
            kind.name()
        )));
    }
    let grid = Grid::new(n)?;
    let mut f = ScalarField::zeros(&grid);
    if values.len() != f.values.len() {
        return Err(Error::Config("dump size mismatch".into()));
    }
    f.values.data.copy_from_slice(&values);
    Ok(f)
}

pub fn read_face(path: &Path) -> Result<FaceField> {
    let (kind, n, values) = read_dump(path)?;
    if kind != FieldKind::Face {
        return Err(Error::Config(format!(
            "expected face dump, got {}",
            kind.name()
        )));
    }
    let grid = Grid::new(n)?;
    let mut f = FaceField::zeros(&grid);
    let (a, b, c) = (f.fx.len(), f.fy.len(), f.fz.len());
    if values.len() != a + b + c {
        return Err(Error::Config("dump size mismatch".into()));
    }
    f.fx.data.copy_from_slice(&values[..a]);
    f.fy.data.copy_from_slice(&values[a..a + b]);
    f.fz.data.copy_from_slice(&values[a + b..]);
    Ok(f)
}

pub fn read_edge(path: &Path) -> Result<EdgeField> {
    let (kind, n, values) = read_dump(path)?;
    if kind != FieldKind::Edge {
        return Err(Error::Config(format!(
            "expected edge dump, got {}",
            kind.name()
        )));
    }
    let grid = Grid::new(n)?;
    let mut f = EdgeField::zeros(&grid);
    let (a, b, c) = (f.ex.len(), f.ey.len(), f.ez.len());
    if values.len() != a + b + c {
        return Err(Error::Config("dump size mismatch".into()));
    }
    f.ex.data.copy_from_slice(&values[..a]);
    f.ey.data.copy_from_slice(&values[a..a + b]);
    f.ez.data.copy_from_slice(&values[a + b..]);
    Ok(f)
}

/// key = value report, one pair per line, 17-significant-digit reals.
pub fn write_report(path: &Path, pairs: &[(String, String)]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for (k, v) in pairs {
        writeln!(w, "{k} = {v}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{random_edge_field, random_face_field, random_scalar_field};

    #[test]
    fn dump_round_trip() {
        let dir = std::env::temp_dir().join(format!("hallfield-io-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let grid = Grid::new(6).unwrap();

        let s = random_scalar_field(&grid, 1);
        write_scalar(&dir.join("s.dump"), &s).unwrap();
        assert_eq!(read_scalar(&dir.join("s.dump")).unwrap(), s);

        let f = random_face_field(&grid, 2, false);
        write_face(&dir.join("f.dump"), &f).unwrap();
        assert_eq!(read_face(&dir.join("f.dump")).unwrap(), f);

        let e = random_edge_field(&grid, 3, false);
        write_edge(&dir.join("e.dump"), &e).unwrap();
        assert_eq!(read_edge(&dir.join("e.dump")).unwrap(), e);

        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn header_is_exact() {
        assert_eq!(
            header(FieldKind::Face, 32),
            "HALLFIELD v1 kind=face n=32 order=x-fastest endian=little fp=64\n"
        );
    }

    #[test]
    fn kind_mismatch_is_rejected() {
        let dir = std::env::temp_dir().join(format!("hallfield-io2-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let grid = Grid::new(6).unwrap();
        let s = random_scalar_field(&grid, 1);
        write_scalar(&dir.join("s.dump"), &s).unwrap();
        assert!(read_face(&dir.join("s.dump")).is_err());
        std::fs::remove_dir_all(&dir).ok();
    }
}
