//! JSON state and decomposition files.
//!
//! A state file holds `dims: [2, N]` and a `2N × 2N` matrix of `[re, im]`
//! pairs, row-major, with row `a·N + k` for `|a,k⟩`. Numbers are written in
//! the shortest form that parses back to the same double.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use sep2n::{CMatrix, CVector, DensityOperator, ProductVector, SeparableDecomposition, Term, ToleranceConfig, C};

use crate::exit::Failure;

pub type Pair = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dims: Vec<usize>,
    pub matrix: Vec<Vec<Pair>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermEntry {
    pub weight: f64,
    pub e: Vec<Pair>,
    pub f: Vec<Pair>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionFile {
    pub dims: Vec<usize>,
    pub terms: Vec<TermEntry>,
}

fn pair(z: &C<f64>) -> Pair {
    [z.re, z.im]
}

fn vector(entries: &[Pair]) -> CVector<f64> {
    CVector::from_iterator(entries.len(), entries.iter().map(|p| C::new(p[0], p[1])))
}

fn dim_b_of(dims: &[usize], what: &str) -> Result<usize, Failure> {
    match dims {
        [2, n] if *n >= 1 => Ok(*n),
        _ => Err(Failure::usage(format!("{what}: field `dims` must be [2, N] with N ≥ 1, found {dims:?}"))),
    }
}

impl StateFile {
    pub fn from_operator(rho: &DensityOperator<f64>, label: Option<String>, seed: Option<u64>) -> Self {
        let m = rho.matrix();
        let matrix = (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| pair(&m[(r, c)])).collect()).collect();
        Self { dims: vec![2, rho.dim_b()], matrix, label, seed }
    }

    pub fn dim_b(&self) -> Result<usize, Failure> {
        dim_b_of(&self.dims, "state file")
    }

    /// Checks the shape, then builds a validated density operator.
    pub fn to_operator(&self, cfg: &ToleranceConfig<f64>) -> Result<DensityOperator<f64>, Failure> {
        let n = self.dim_b()?;
        let size = 2 * n;
        if self.matrix.len() != size {
            return Err(Failure::usage(format!(
                "state file: field `matrix` has {} rows, dims [2, {n}] require {size}",
                self.matrix.len()
            )));
        }
        for (r, row) in self.matrix.iter().enumerate() {
            if row.len() != size {
                return Err(Failure::usage(format!(
                    "state file: `matrix[{r}]` has {} entries, expected {size}",
                    row.len()
                )));
            }
        }
        let m = CMatrix::from_fn(size, size, |r, c| {
            let p = self.matrix[r][c];
            C::new(p[0], p[1])
        });
        DensityOperator::new(n, m, cfg).map_err(|e| Failure::data(format!("state file: {e}")))
    }
}

impl DecompositionFile {
    pub fn from_decomposition(dec: &SeparableDecomposition<f64>) -> Self {
        let terms = dec
            .terms()
            .iter()
            .map(|t| TermEntry {
                weight: t.weight,
                e: t.pv.e.iter().map(pair).collect(),
                f: t.pv.f.iter().map(pair).collect(),
            })
            .collect();
        Self { dims: vec![2, dec.dim_b()], terms }
    }

    pub fn dim_b(&self) -> Result<usize, Failure> {
        dim_b_of(&self.dims, "decomposition file")
    }

    pub fn to_decomposition(&self) -> Result<SeparableDecomposition<f64>, Failure> {
        let n = self.dim_b()?;
        let mut terms = Vec::with_capacity(self.terms.len());
        for (i, t) in self.terms.iter().enumerate() {
            if t.e.len() != 2 || t.f.len() != n {
                return Err(Failure::usage(format!(
                    "decomposition file: `terms[{i}]` has e of length {} and f of length {}, expected 2 and {n}",
                    t.e.len(),
                    t.f.len()
                )));
            }
            terms.push(Term { weight: t.weight, pv: ProductVector { e: vector(&t.e), f: vector(&t.f) } });
        }
        Ok(SeparableDecomposition::from_terms(n, terms)?)
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

/// Pretty JSON to `path`, or to stdout when `path` is `None`.
pub fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::usage(e.to_string()))?;
    text.push('\n');
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::usage(format!("{}: {e}", p.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::usage(e.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use sep2n::stategen::{random_density, random_separable};

    #[test]
    fn state_round_trip_is_exact() {
        let rho = random_density::<f64>(3, 4, 11u64).unwrap();
        let file = StateFile::from_operator(&rho, Some("x".into()), Some(11));
        let text = serde_json::to_string(&file).unwrap();
        let back: StateFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back, file);
        let op = back.to_operator(&ToleranceConfig::default()).unwrap();
        assert_eq!(op.matrix(), rho.matrix());
    }

    #[test]
    fn decomposition_round_trip_is_exact() {
        let (_, dec) = random_separable::<f64>(2, 3, 5u64).unwrap();
        let file = DecompositionFile::from_decomposition(&dec);
        let back: DecompositionFile = serde_json::from_str(&serde_json::to_string(&file).unwrap()).unwrap();
        assert_eq!(back.to_decomposition().unwrap(), dec);
    }

    #[test]
    fn shape_errors_are_usage_errors() {
        let mut file = StateFile::from_operator(&DensityOperator::maximally_mixed(2), None, None);
        file.matrix[1].pop();
        let err = file.to_operator(&ToleranceConfig::default()).unwrap_err();
        assert_eq!(err.code, crate::exit::USAGE);
        assert!(err.message.contains("matrix[1]"));
        file.dims = vec![3, 2];
        assert_eq!(file.to_operator(&ToleranceConfig::default()).unwrap_err().code, crate::exit::USAGE);
    }

    #[test]
    fn invalid_operator_is_data_error() {
        let mut file = StateFile::from_operator(&DensityOperator::maximally_mixed(1), None, None);
        file.matrix[0][0] = [-1.0, 0.0];
        assert_eq!(file.to_operator(&ToleranceConfig::default()).unwrap_err().code, crate::exit::DATA);
    }
}
