//! Chain files.
//!
//! JSON: `{"dims": [..], "pi": [..], "matrices": {"name": [[..], ..], ..}}`,
//! matrices kept in file order.
//!
//! CSV (one matrix per file): a header record `dims=2;2` optionally followed
//! by `name=P`, a record `pi,v1,..,vN`, then `N` matrix rows.
//!
//! Floats are written in shortest round-trip form, so save/load is bit-exact.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::chain::{ChainFamily, Distribution, StochasticMatrix, STATIONARY_TOL, STOCHASTIC_TOL};
use crate::error::{Error, Result};
use crate::space::ProductSpace;

/// A validated chain file.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainFile {
    pub space: ProductSpace,
    pub pi: Distribution,
    pub matrices: Vec<(String, StochasticMatrix)>,
}

impl ChainFile {
    /// The members, in file order, as a family.
    pub fn family(&self) -> Result<ChainFamily> {
        ChainFamily::new(self.pi.clone(), self.matrices.iter().map(|(_, m)| m.clone()).collect())
    }

    pub fn get(&self, name: &str) -> Option<&StochasticMatrix> {
        self.matrices.iter().find(|(n, _)| n == name).map(|(_, m)| m)
    }
}

#[derive(Serialize, Deserialize)]
struct JsonChainFile {
    dims: Vec<usize>,
    pi: Vec<f64>,
    matrices: serde_json::Map<String, serde_json::Value>,
}

fn malformed(path: &Path, message: impl Into<String>) -> Error {
    Error::MalformedFile {
        path: path.display().to_string(),
        message: message.into(),
    }
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

/// Dispatches on the extension (`.json` or `.csv`).
pub fn load_chain_file(path: impl AsRef<Path>) -> Result<ChainFile> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => parse_json(path, &text),
        Some("csv") => parse_csv(path, &text),
        _ => Err(malformed(path, "unknown extension; expected .json or .csv")),
    }
}

fn build(path: &Path, dims: Vec<usize>, pi: Vec<f64>, raw: Vec<(String, Vec<Vec<f64>>)>) -> Result<ChainFile> {
    let space = ProductSpace::new(dims).map_err(|e| malformed(path, e.to_string()))?;
    let n = space.size();
    if pi.len() != n {
        return Err(malformed(path, format!("pi has {} entries, expected {n}", pi.len())));
    }
    let pi = Distribution::new(space.clone(), pi).map_err(|e| malformed(path, e.to_string()))?;
    if raw.is_empty() {
        return Err(malformed(path, "no matrices"));
    }
    let mut matrices = Vec::with_capacity(raw.len());
    for (name, rows) in raw {
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(malformed(path, format!("matrix '{name}' is not {n}x{n}")));
        }
        for (r, row) in rows.iter().enumerate() {
            if row.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(malformed(path, format!("matrix '{name}' row {r} has an invalid entry")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > STOCHASTIC_TOL {
                return Err(Error::FileRowSum { matrix: name, row: r, sum });
            }
        }
        let m = StochasticMatrix::from_rows(space.clone(), &rows)?;
        let residual = m.stationarity_residual(&pi);
        if residual > STATIONARY_TOL {
            return Err(Error::FileStationarity { matrix: name, residual });
        }
        matrices.push((name, m.with_stationary(pi.clone())?));
    }
    Ok(ChainFile { space, pi, matrices })
}

fn parse_json(path: &Path, text: &str) -> Result<ChainFile> {
    let file: JsonChainFile = serde_json::from_str(text).map_err(|e| malformed(path, e.to_string()))?;
    let raw = file
        .matrices
        .into_iter()
        .map(|(name, v)| {
            serde_json::from_value::<Vec<Vec<f64>>>(v)
                .map(|rows| (name.clone(), rows))
                .map_err(|e| malformed(path, format!("matrix '{name}': {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    build(path, file.dims, file.pi, raw)
}

fn parse_csv(path: &Path, text: &str) -> Result<ChainFile> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let records = rdr
        .records()
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| malformed(path, e.to_string()))?;
    let (header, rest) = records.split_first().ok_or_else(|| malformed(path, "empty file"))?;
    let mut dims = None;
    let mut name = "P".to_string();
    for field in header.iter() {
        match field.split_once('=') {
            Some(("dims", v)) => {
                dims = Some(
                    v.split(';')
                        .map(|x| x.trim().parse::<usize>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|_| malformed(path, format!("bad dims '{v}'")))?,
                )
            }
            Some(("name", v)) => name = v.to_string(),
            _ => return Err(malformed(path, format!("unexpected header field '{field}'"))),
        }
    }
    let dims = dims.ok_or_else(|| malformed(path, "header lacks dims="))?;
    let floats = |rec: &csv::StringRecord, skip: usize| -> Result<Vec<f64>> {
        rec.iter()
            .skip(skip)
            .map(|v| v.parse::<f64>().map_err(|_| malformed(path, format!("bad number '{v}'"))))
            .collect()
    };
    let (pi_rec, rows) = rest.split_first().ok_or_else(|| malformed(path, "missing pi record"))?;
    if pi_rec.get(0) != Some("pi") {
        return Err(malformed(path, "second record must start with 'pi'"));
    }
    let pi = floats(pi_rec, 1)?;
    let rows = rows.iter().map(|r| floats(r, 0)).collect::<Result<Vec<_>>>()?;
    build(path, dims, pi, vec![(name, rows)])
}

fn write(path: &Path, contents: String) -> Result<()> {
    fs::write(path, contents).map_err(|e| io_error(path, e))
}

fn rows_of(m: &StochasticMatrix) -> Vec<Vec<f64>> {
    m.rows().map(|r| r.to_vec()).collect()
}

/// Writes every named matrix with the shared law `pi`.
pub fn save_json(path: impl AsRef<Path>, pi: &Distribution, matrices: &[(&str, &StochasticMatrix)]) -> Result<()> {
    let path = path.as_ref();
    let mut map = serde_json::Map::new();
    for (name, m) in matrices {
        map.insert(name.to_string(), serde_json::to_value(rows_of(m)).expect("finite floats"));
    }
    let file = JsonChainFile {
        dims: pi.space().dims().to_vec(),
        pi: pi.values().to_vec(),
        matrices: map,
    };
    let text = serde_json::to_string_pretty(&file).map_err(|e| malformed(path, e.to_string()))?;
    write(path, text)
}

pub fn save_csv(path: impl AsRef<Path>, name: &str, pi: &Distribution, m: &StochasticMatrix) -> Result<()> {
    let path = path.as_ref();
    let dims: Vec<String> = pi.space().dims().iter().map(|d| d.to_string()).collect();
    let mut wtr = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
    let csv_err = |e: csv::Error| malformed(path, e.to_string());
    wtr.write_record([format!("dims={}", dims.join(";")), format!("name={name}")])
        .map_err(csv_err)?;
    let mut pi_rec = vec!["pi".to_string()];
    pi_rec.extend(pi.values().iter().map(|v| v.to_string()));
    wtr.write_record(&pi_rec).map_err(csv_err)?;
    for row in m.rows() {
        wtr.write_record(row.iter().map(|v| v.to_string())).map_err(csv_err)?;
    }
    let bytes = wtr.into_inner().map_err(|e| malformed(path, e.to_string()))?;
    write(path, String::from_utf8(bytes).expect("ascii output"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::tests::fixed_chain;

    #[test]
    fn json_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let p = fixed_chain();
        let p2 = p.power(3).unwrap();
        let pi = p.stationary().unwrap();
        let path = dir.path().join("chain.json");
        save_json(&path, pi, &[("Q", &p2), ("A", &p)]).unwrap();
        let loaded = load_chain_file(&path).unwrap();
        assert_eq!(loaded.matrices[0].0, "Q");
        assert_eq!(loaded.matrices[0].1.entries(), p2.entries());
        assert_eq!(loaded.get("A").unwrap().entries(), p.entries());
        assert_eq!(loaded.pi.values(), pi.values());
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let p = fixed_chain().power(5).unwrap();
        let path = dir.path().join("chain.csv");
        save_csv(&path, "P5", p.stationary().unwrap(), &p).unwrap();
        let loaded = load_chain_file(&path).unwrap();
        assert_eq!(loaded.matrices[0].0, "P5");
        assert_eq!(loaded.matrices[0].1.entries(), p.entries());
    }

    #[test]
    fn distinct_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        fs::write(&path, "dims=2\npi,0.5,0.5\n0.5,0.4\n0.5,0.5\n").unwrap();
        assert!(matches!(load_chain_file(&path), Err(Error::FileRowSum { row: 0, .. })));

        fs::write(&path, "dims=2\npi,0.5,0.5\n0.9,0.1\n0.5,0.5\n").unwrap();
        assert!(matches!(load_chain_file(&path), Err(Error::FileStationarity { .. })));

        fs::write(&path, "dims=2\n0.5,0.5\n").unwrap();
        assert!(matches!(load_chain_file(&path), Err(Error::MalformedFile { .. })));

        let json = dir.path().join("bad.json");
        fs::write(&json, "{\"dims\": [2], \"pi\": [0.5, 0.5]}").unwrap();
        assert!(matches!(load_chain_file(&json), Err(Error::MalformedFile { .. })));

        assert!(matches!(
            load_chain_file(dir.path().join("missing.json")),
            Err(Error::Io { .. })
        ));
    }
}
