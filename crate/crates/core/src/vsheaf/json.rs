//! JSON cube format with rationals written as `"p/q"` strings.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::CubeDiagram;
use crate::error::{Error, Result};
use crate::poset::construct::{parse_subset_label, subset_label};
use crate::{QMatrix, Rational};

/// `{"n": 2, "dims": {"{}": 1, ...}, "maps": {"{}→{1}": [["1/2"]], ...}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CubeJson {
    pub n: usize,
    pub dims: BTreeMap<String, usize>,
    pub maps: BTreeMap<String, Vec<Vec<String>>>,
}

fn label_bits(label: &str, n: usize) -> Result<u64> {
    let coords =
        parse_subset_label(label).ok_or_else(|| Error::Invalid(format!("bad vertex label `{label}`")))?;
    let mut bits = 0u64;
    for c in coords {
        if c == 0 || c > n {
            return Err(Error::Invalid(format!("coordinate {c} out of range in `{label}`")));
        }
        bits |= 1 << (c - 1);
    }
    Ok(bits)
}

fn bits_label(bits: u64) -> String {
    let coords: Vec<usize> = (0..64).filter(|k| bits >> k & 1 == 1).map(|k| k + 1).collect();
    subset_label(&coords)
}

fn parse_matrix(rows: &[Vec<String>], r: usize, c: usize, key: &str) -> Result<QMatrix> {
    if rows.len() != r || rows.iter().any(|row| row.len() != c) {
        return Err(Error::DimensionMismatch(format!("map `{key}` must be {r}x{c}")));
    }
    let data = rows
        .iter()
        .map(|row| {
            row.iter()
                .map(|s| {
                    Rational::from_str(s.trim())
                        .map_err(|_| Error::Invalid(format!("bad rational `{s}` in map `{key}`")))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    QMatrix::from_rows(data, c)
}

impl CubeJson {
    pub fn to_cube(&self) -> Result<CubeDiagram<Rational>> {
        let n = self.n;
        if n == 0 || n > super::cube::MAX_CUBE_DIM {
            return Err(Error::TooLarge {
                what: "cube dimension",
                size: n,
                bound: super::cube::MAX_CUBE_DIM,
            });
        }
        let mut dims = BTreeMap::new();
        for (label, &d) in &self.dims {
            if dims.insert(label_bits(label, n)?, d).is_some() {
                return Err(Error::Invalid(format!("vertex `{label}` listed twice")));
            }
        }
        let mut edges = BTreeMap::new();
        let mut others = Vec::new();
        for (key, rows) in &self.maps {
            let (a, b) = key
                .split_once('→')
                .or_else(|| key.split_once("->"))
                .ok_or_else(|| Error::Invalid(format!("map key `{key}` needs an arrow")))?;
            let (a, b) = (label_bits(a.trim(), n)?, label_bits(b.trim(), n)?);
            if a & !b != 0 || a == b {
                return Err(Error::Invalid(format!("map key `{key}` is not a proper inclusion")));
            }
            let (r, c) = (
                *dims.get(&b).ok_or_else(|| Error::Invalid(format!("no dimension for target of `{key}`")))?,
                *dims.get(&a).ok_or_else(|| Error::Invalid(format!("no dimension for source of `{key}`")))?,
            );
            let m = parse_matrix(rows, r, c, key)?;
            if (b & !a).count_ones() == 1 {
                edges.insert((a, b), m);
            } else {
                others.push((a, b, m, key.clone()));
            }
        }
        let cube = CubeDiagram::from_edges(n, &dims, &edges)?;
        for (a, b, m, key) in others {
            if cube.map_bits(a, b) != m {
                return Err(Error::NotFunctorial(format!(
                    "map `{key}` differs from the composite of its edges"
                )));
            }
        }
        Ok(cube)
    }

    /// Edge maps only.
    pub fn from_cube(c: &CubeDiagram<Rational>) -> Self {
        let n = c.n();
        let dims = (0..1u64 << n).map(|b| (bits_label(b), c.dim_at(b))).collect();
        let mut maps = BTreeMap::new();
        for a in 0..1u64 << n {
            for k in 0..n {
                if a >> k & 1 == 0 {
                    let b = a | 1 << k;
                    let m = c.map_bits(a, b);
                    let rows = m
                        .to_rows()
                        .into_iter()
                        .map(|row| row.iter().map(|v| v.to_string()).collect())
                        .collect();
                    maps.insert(format!("{}→{}", bits_label(a), bits_label(b)), rows);
                }
            }
        }
        CubeJson { n, dims, maps }
    }
}
