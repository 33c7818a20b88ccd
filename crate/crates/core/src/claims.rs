//! Raw claims to normalized losses, and CSV input/output.
//!
//! A claim with total loss `Y`, deductible `d` and cover `M` pays
//! `min(max(Y - d, 0), M)`; dividing by `M` gives `z` in `[0, 1]`.

use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClaimRecord {
    pub loss: f64,
    pub deductible: f64,
    pub cover: f64,
}

impl ClaimRecord {
    pub fn new(loss: f64, deductible: f64, cover: f64) -> Result<Self> {
        let r = Self { loss, deductible, cover };
        r.check()?;
        Ok(r)
    }

    fn check(&self) -> Result<()> {
        if !(self.deductible > 0.0 && self.deductible.is_finite()) {
            return Err(Error::Schema(format!("deductible must be positive, got {}", self.deductible)));
        }
        if !(self.cover > 0.0 && self.cover.is_finite()) {
            return Err(Error::Schema(format!("cover must be positive, got {}", self.cover)));
        }
        if !(self.loss >= 0.0 && self.loss.is_finite()) {
            return Err(Error::Schema(format!("loss must be finite and non-negative, got {}", self.loss)));
        }
        Ok(())
    }
}

/// `min(max(Y - d, 0), M) / M`; exactly `1` whenever `Y - d >= M`.
pub fn transform_claim(r: &ClaimRecord) -> Result<f64> {
    r.check()?;
    let excess = r.loss - r.deductible;
    if excess >= r.cover {
        Ok(1.0)
    } else if excess <= 0.0 {
        Ok(0.0)
    } else {
        Ok(excess / r.cover)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schema {
    /// One column `z` of normalized losses.
    Z,
    /// Columns `loss,deductible,cover`.
    Raw,
}

impl FromStr for Schema {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "z" => Ok(Schema::Z),
            "raw" => Ok(Schema::Raw),
            _ => Err(Error::Schema(format!("unknown schema `{s}` (expected z or raw)"))),
        }
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Schema::Z => "z",
            Schema::Raw => "raw",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizedSample {
    /// Values in `(0, 1]`, in file order.
    pub z_values: Vec<f64>,
    /// Records read from the file.
    pub records: usize,
    /// Records with `z = 0`, left out of `z_values`.
    pub dropped_zero: usize,
}

pub fn load_claims(path: impl AsRef<Path>, schema: Schema) -> Result<NormalizedSample> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_claims(file, schema)
}

pub fn read_claims<R: Read>(reader: R, schema: Schema) -> Result<NormalizedSample> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| parse_error(&e))?.clone();
    let column = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Schema(format!("missing column `{name}` for schema {schema}")))
    };
    let cols: Vec<usize> = match schema {
        Schema::Z => vec![column("z")?],
        Schema::Raw => vec![column("loss")?, column("deductible")?, column("cover")?],
    };

    let mut z_values = Vec::new();
    let mut records = 0;
    let mut dropped_zero = 0;
    for row in rdr.records() {
        let row = row.map_err(|e| parse_error(&e))?;
        let line = row.position().map_or(0, |p| p.line());
        let field = |i: usize| -> Result<f64> {
            let s = row.get(i).ok_or_else(|| Error::Parse { line, message: "missing field".into() })?;
            s.parse::<f64>().map_err(|e| Error::Parse { line, message: format!("`{s}`: {e}") })
        };
        records += 1;
        let z = match schema {
            Schema::Z => {
                let z = field(cols[0])?;
                if !(0.0..=1.0).contains(&z) {
                    return Err(Error::Data(format!("line {line}: z = {z} is outside [0, 1]")));
                }
                z
            }
            Schema::Raw => {
                let r = ClaimRecord { loss: field(cols[0])?, deductible: field(cols[1])?, cover: field(cols[2])? };
                transform_claim(&r).map_err(|e| match e {
                    Error::Schema(m) => Error::Schema(format!("line {line}: {m}")),
                    other => other,
                })?
            }
        };
        if z == 0.0 {
            dropped_zero += 1;
        } else {
            z_values.push(z);
        }
    }
    if records == 0 {
        return Err(Error::Data("no records".into()));
    }
    Ok(NormalizedSample { z_values, records, dropped_zero })
}

fn parse_error(e: &csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    Error::Parse { line, message: e.to_string() }
}

/// Writes a `z` column with shortest round-trip formatting, so reading the
/// file back gives bit-identical values.
pub fn write_z_csv<W: Write>(w: W, z: &[f64]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    let io = |e: csv::Error| Error::Io(e.to_string());
    wr.write_record(["z"]).map_err(io)?;
    for v in z {
        wr.write_record([v.to_string()]).map_err(io)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn save_z_csv(path: impl AsRef<Path>, z: &[f64]) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    write_z_csv(std::io::BufWriter::new(file), z)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn claim(y: f64) -> f64 {
        transform_claim(&ClaimRecord::new(y, 2000.0, 5000.0).unwrap()).unwrap()
    }

    #[test]
    fn transform_examples() {
        assert_eq!(claim(7000.0), 1.0);
        assert_eq!(claim(1500.0), 0.0);
        assert_eq!(claim(4000.0), 0.4);
        assert_eq!(claim(8000.0), 1.0);
        assert!(ClaimRecord::new(1.0, 0.0, 5.0).is_err());
        assert!(ClaimRecord::new(1.0, 1.0, -5.0).is_err());
    }

    #[test]
    fn raw_file() {
        let text = "loss,deductible,cover\n7000,2000,5000\n1500,2000,5000\n4000,2000,5000\n";
        let s = read_claims(text.as_bytes(), Schema::Raw).unwrap();
        assert_eq!(s.z_values, vec![1.0, 0.4]);
        assert_eq!(s.dropped_zero, 1);
        assert_eq!(s.records, 3);
    }

    #[test]
    fn z_file_errors() {
        assert!(matches!(read_claims("z\n".as_bytes(), Schema::Z), Err(Error::Data(_))));
        assert!(matches!(read_claims("".as_bytes(), Schema::Z), Err(Error::Schema(_)) | Err(Error::Data(_))));
        assert!(matches!(read_claims("z\n1.0000000000001\n".as_bytes(), Schema::Z), Err(Error::Data(_))));
        match read_claims("z\n0.5\nabc\n".as_bytes(), Schema::Z) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(matches!(read_claims("x\n0.5\n".as_bytes(), Schema::Z), Err(Error::Schema(_))));
        let s = read_claims("z\n0\n0.25\n1\n".as_bytes(), Schema::Z).unwrap();
        assert_eq!((s.z_values, s.dropped_zero), (vec![0.25, 1.0], 1));
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let z = vec![0.1, 1.0 / 3.0, 1e-300, 0.9999999999999999, 1.0];
        let mut buf = Vec::new();
        write_z_csv(&mut buf, &z).unwrap();
        let back = read_claims(buf.as_slice(), Schema::Z).unwrap();
        assert_eq!(back.z_values.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), z.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
    }
}
