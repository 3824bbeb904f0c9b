//! Text format for lattice fields.
//!
//! ```text
//! dressage-field v1 <D> <N_0> ... <N_{D-1}> <components>
//! <c_0> ... <c_{components-1}>      one row per site, row-major
//! ```
//! Values are written with 17 significant digits, which round-trips `f64`.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::dressing::KernelSidecar;
use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::lattice::Lattice;

const MAGIC: &str = "dressage-field";
const VERSION: &str = "v1";

/// Raw contents of a field file: site-major rows of `components` values.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldData {
    pub lattice: Lattice,
    pub components: usize,
    pub rows: Vec<f64>,
}

impl FieldData {
    pub fn into_scalar(self) -> Result<ScalarField> {
        if self.components != 1 {
            return Err(Error::Format(format!(
                "expected 1 component, file has {}",
                self.components
            )));
        }
        ScalarField::from_vec(self.lattice, self.rows)
    }

    pub fn into_vector(self) -> Result<VectorField> {
        let d = self.lattice.ndim();
        if self.components != d {
            return Err(Error::Format(format!(
                "expected {d} components, file has {}",
                self.components
            )));
        }
        let v = self.lattice.volume();
        let mut data = vec![0.0; d * v];
        for site in 0..v {
            for mu in 0..d {
                data[mu * v + site] = self.rows[site * d + mu];
            }
        }
        VectorField::from_vec(self.lattice, data)
    }
}

fn write_rows<W: Write>(w: &mut W, lat: &Lattice, comps: &[&[f64]]) -> Result<()> {
    let dims: Vec<String> = lat.dims().iter().map(|n| n.to_string()).collect();
    writeln!(
        w,
        "{MAGIC} {VERSION} {} {} {}",
        lat.ndim(),
        dims.join(" "),
        comps.len()
    )?;
    let mut line = String::new();
    for site in 0..lat.volume() {
        line.clear();
        for (i, c) in comps.iter().enumerate() {
            if i > 0 {
                line.push(' ');
            }
            line.push_str(&format!("{:.16e}", c[site]));
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn write_scalar<W: Write>(w: &mut W, s: &ScalarField) -> Result<()> {
    write_rows(w, s.lattice(), &[s.values()])
}

pub fn write_vector<W: Write>(w: &mut W, v: &VectorField) -> Result<()> {
    let comps: Vec<&[f64]> = (0..v.lattice().ndim()).map(|mu| v.component(mu)).collect();
    write_rows(w, v.lattice(), &comps)
}

pub fn parse_field(text: &str) -> Result<FieldData> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("empty field file".into()))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() < 4 || tokens[0] != MAGIC || tokens[1] != VERSION {
        return Err(Error::Format(format!("bad header {header:?}")));
    }
    let numbers: Vec<usize> = tokens[2..]
        .iter()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| Error::Format(format!("bad header token {t:?}")))
        })
        .collect::<Result<_>>()?;
    let d = numbers[0];
    if numbers.len() != d + 2 {
        return Err(Error::Format(format!(
            "header declares {d} dimensions but has {} extents",
            numbers.len().saturating_sub(2)
        )));
    }
    let lattice = Lattice::new(&numbers[1..=d])?;
    let components = numbers[d + 1];
    let mut rows = Vec::with_capacity(lattice.volume() * components);
    let mut count = 0;
    for (i, line) in lines.enumerate() {
        let before = rows.len();
        for t in line.split_whitespace() {
            let v = t
                .parse::<f64>()
                .map_err(|_| Error::Format(format!("row {i}: bad number {t:?}")))?;
            rows.push(v);
        }
        if rows.len() - before != components {
            return Err(Error::Format(format!(
                "row {i}: expected {components} values, got {}",
                rows.len() - before
            )));
        }
        count += 1;
    }
    if count != lattice.volume() {
        return Err(Error::Format(format!(
            "expected {} rows, got {count}",
            lattice.volume()
        )));
    }
    Ok(FieldData {
        lattice,
        components,
        rows,
    })
}

pub fn read_field(path: &Path) -> Result<FieldData> {
    parse_field(&fs::read_to_string(path)?)
}

pub fn save_vector(path: &Path, v: &VectorField) -> Result<()> {
    let mut buf = Vec::new();
    write_vector(&mut buf, v)?;
    fs::write(path, buf)?;
    Ok(())
}

pub fn save_scalar(path: &Path, s: &ScalarField) -> Result<()> {
    let mut buf = Vec::new();
    write_scalar(&mut buf, s)?;
    fs::write(path, buf)?;
    Ok(())
}

/// Sidecar path for a kernel file: `kernel.txt` -> `kernel.txt.json`.
pub fn sidecar_path(field_path: &Path) -> std::path::PathBuf {
    let mut name = field_path.as_os_str().to_owned();
    name.push(".json");
    name.into()
}

pub fn save_sidecar(path: &Path, sidecar: &KernelSidecar) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(sidecar)? + "\n")?;
    Ok(())
}

pub fn read_sidecar(path: &Path) -> Result<KernelSidecar> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}
