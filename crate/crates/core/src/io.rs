//! File formats: CSV for sampled functions, JSON for scattering data and
//! reports. Every float is written as a decimal with 17 significant digits,
//! so reading a file back reproduces the values exactly.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::{Error, Result};
use crate::model::{
    BoundState, MarchenkoInput, MomentumGrid, Potential, RadialGrid, ScatteringData, TransformationKernel, UniformGrid,
};

/// `{:.16e}`: 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Pretty JSON with floats in [`fmt_f64`] form.
struct Sig17<'a>(PrettyFormatter<'a>);

impl Formatter for Sig17<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> std::io::Result<()> {
        if value.is_finite() {
            w.write_all(fmt_f64(value).as_bytes())
        } else {
            w.write_all(b"null")
        }
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig17(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_json_string(value)?)?;
    Ok(())
}

/// Writes a CSV with the given header; every row must have as many columns.
pub fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    w.write_record(header)?;
    for row in rows {
        if row.len() != header.len() {
            return Err(Error::LengthMismatch {
                expected: header.len(),
                found: row.len(),
            });
        }
        w.write_record(row.iter().map(|v| fmt_f64(*v)))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads the named columns of a headed CSV.
pub fn read_csv_columns(path: &Path, names: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.clone();
    let idx: Vec<usize> = names
        .iter()
        .map(|n| {
            header
                .iter()
                .position(|h| h.trim() == *n)
                .ok_or_else(|| Error::InvalidInput(format!("{}: missing column '{n}'", path.display())))
        })
        .collect::<Result<_>>()?;
    let mut cols = vec![Vec::new(); names.len()];
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        for (c, &i) in idx.iter().enumerate() {
            let field = rec.get(i).unwrap_or("").trim();
            let v: f64 = field.parse().map_err(|_| {
                Error::InvalidInput(format!("{}: row {}: '{field}' is not a number", path.display(), line + 2))
            })?;
            cols[c].push(v);
        }
    }
    Ok(cols)
}

/// `x,q` on a uniform grid starting at 0.
pub fn write_potential(path: &Path, q: &Potential) -> Result<()> {
    let xs = q.grid().nodes();
    write_csv(path, &["x", "q"], xs.iter().zip(q.values()).map(|(x, v)| vec![*x, *v]))
}

pub fn read_potential(path: &Path) -> Result<Potential> {
    let cols = read_csv_columns(path, &["x", "q"])?;
    let grid = RadialGrid::from_uniform(UniformGrid::from_nodes(&cols[0])?)?;
    Potential::new(grid, cols[1].clone())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct BoundStateRecord {
    kappa: f64,
    s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
struct ScatteringRecord {
    k: Vec<f64>,
    S_re: Vec<f64>,
    S_im: Vec<f64>,
    bound_states: Vec<BoundStateRecord>,
    s_zero_sign: i8,
}

pub fn scattering_to_json(sd: &ScatteringData) -> Result<String> {
    let rec = ScatteringRecord {
        k: sd.kgrid().nodes(),
        S_re: sd.s_values().iter().map(|s| s.re).collect(),
        S_im: sd.s_values().iter().map(|s| s.im).collect(),
        bound_states: sd
            .bound_states()
            .iter()
            .map(|b| BoundStateRecord { kappa: b.kappa, s: b.s })
            .collect(),
        s_zero_sign: sd.s_at_zero_sign(),
    };
    to_json_string(&rec)
}

pub fn scattering_from_json(text: &str) -> Result<ScatteringData> {
    let rec: ScatteringRecord = serde_json::from_str(text)?;
    if rec.S_re.len() != rec.k.len() || rec.S_im.len() != rec.k.len() {
        return Err(Error::LengthMismatch {
            expected: rec.k.len(),
            found: rec.S_re.len().min(rec.S_im.len()),
        });
    }
    let kgrid = MomentumGrid::from_nodes(&rec.k)?;
    let s = rec.S_re.iter().zip(&rec.S_im).map(|(&re, &im)| Complex64::new(re, im)).collect();
    let bound = rec.bound_states.iter().map(|b| BoundState::new(b.kappa, b.s)).collect();
    ScatteringData::new(kgrid, s, bound, rec.s_zero_sign)
}

pub fn write_scattering(path: &Path, sd: &ScatteringData) -> Result<()> {
    std::fs::write(path, scattering_to_json(sd)?)?;
    Ok(())
}

pub fn read_scattering(path: &Path) -> Result<ScatteringData> {
    scattering_from_json(&std::fs::read_to_string(path)?)
}

/// `x,y,A` triples for `y >= x`, every `stride`-th node in each direction.
pub fn write_kernel(path: &Path, a: &TransformationKernel, stride: usize) -> Result<()> {
    let grid = a.grid();
    let n = grid.len();
    let stride = stride.max(1);
    let rows = (0..n).step_by(stride).flat_map(move |i| {
        (i..n)
            .step_by(stride)
            .map(move |j| vec![grid.node(i), grid.node(j), a.get(i, j)])
    });
    write_csv(path, &["x", "y", "A"], rows)
}

/// Reads a full kernel written with stride 1.
pub fn read_kernel(path: &Path) -> Result<TransformationKernel> {
    let cols = read_csv_columns(path, &["x", "y", "A"])?;
    let xs: Vec<f64> = cols[0]
        .iter()
        .zip(&cols[1])
        .filter(|(x, y)| x == y)
        .map(|(x, _)| *x)
        .collect();
    let grid = RadialGrid::from_uniform(UniformGrid::from_nodes(&xs)?)?;
    let n = grid.len();
    if cols[2].len() != n * (n + 1) / 2 {
        return Err(Error::InvalidInput(format!(
            "{}: expected {} kernel entries for {n} nodes, found {}",
            path.display(),
            n * (n + 1) / 2,
            cols[2].len()
        )));
    }
    let mut it = cols[2].iter().copied();
    let rows = (0..n).map(|i| it.by_ref().take(n - i).collect()).collect();
    TransformationKernel::new(grid, rows)
}

/// `x,F` samples.
pub fn write_f_data(path: &Path, f: &MarchenkoInput) -> Result<()> {
    let xs = f.xgrid.nodes();
    write_csv(path, &["x", "F"], xs.iter().zip(&f.f_values).map(|(x, v)| vec![*x, *v]))
}

pub fn read_f_data(path: &Path) -> Result<MarchenkoInput> {
    let cols = read_csv_columns(path, &["x", "F"])?;
    MarchenkoInput::from_total(UniformGrid::from_nodes(&cols[0])?, cols[1].clone())
}
