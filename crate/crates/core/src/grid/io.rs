//! GridFn files: one JSON header line `{d, L, n, layout}` followed by the
//! samples, either as JSON `[re, im]` pairs or as raw little-endian f64 pairs.

use std::io::{BufRead, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{GridFn, GridSpec};
use crate::error::{Error, Result};

const LAYOUT: &str = "row-major";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridHeader {
    pub d: usize,
    #[serde(rename = "L")]
    pub half_width: f64,
    pub n: usize,
    pub layout: String,
}

impl From<&GridSpec> for GridHeader {
    fn from(s: &GridSpec) -> Self {
        GridHeader {
            d: s.d(),
            half_width: s.half_width(),
            n: s.n(),
            layout: LAYOUT.into(),
        }
    }
}

impl GridHeader {
    pub fn spec(&self) -> Result<GridSpec> {
        if self.layout != LAYOUT {
            return Err(Error::Shape(format!(
                "unsupported layout `{}`",
                self.layout
            )));
        }
        GridSpec::new(self.d, self.half_width, self.n)
    }
}

#[derive(Serialize, Deserialize)]
struct JsonGrid {
    #[serde(flatten)]
    header: GridHeader,
    values: Vec<[f64; 2]>,
}

pub fn to_json(f: &GridFn) -> serde_json::Value {
    let doc = JsonGrid {
        header: f.spec().into(),
        values: f.values().iter().map(|v| [v.re, v.im]).collect(),
    };
    serde_json::to_value(doc).expect("grid serializes")
}

pub fn from_json(v: &serde_json::Value) -> Result<GridFn> {
    let doc: JsonGrid =
        serde_json::from_value(v.clone()).map_err(|e| Error::Shape(e.to_string()))?;
    let spec = doc.header.spec()?;
    GridFn::new(
        spec,
        doc.values
            .into_iter()
            .map(|[re, im]| Complex64::new(re, im))
            .collect(),
    )
}

pub fn write_binary(f: &GridFn, mut w: impl Write) -> Result<()> {
    let header = serde_json::to_string(&GridHeader::from(f.spec())).expect("header serializes");
    writeln!(w, "{header}")?;
    let mut buf = Vec::with_capacity(16 * f.values().len());
    for v in f.values() {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_binary(mut r: impl BufRead) -> Result<GridFn> {
    let mut line = String::new();
    r.read_line(&mut line)?;
    let header: GridHeader =
        serde_json::from_str(line.trim_end()).map_err(|e| Error::Shape(e.to_string()))?;
    let spec = header.spec()?;
    let mut buf = vec![0u8; 16 * spec.len()];
    r.read_exact(&mut buf)?;
    let values = buf
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            Complex64::new(re, im)
        })
        .collect();
    GridFn::new(spec, values)
}
