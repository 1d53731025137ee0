//! Vector distances and the region-set distance.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::descriptor::DescriptorMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Norm {
    L1,
    L2,
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Norm::L1 => "l1",
            Norm::L2 => "l2",
        })
    }
}

impl FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(Norm::L1),
            "l2" => Ok(Norm::L2),
            other => Err(Error::argument(format!("unknown norm {other:?}"))),
        }
    }
}

#[inline]
pub(crate) fn l1(a: &[f32], b: &[f32]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x as f64 - y as f64).abs())
        .sum()
}

#[inline]
pub(crate) fn l2(a: &[f32], b: &[f32]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = x as f64 - y as f64;
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

pub fn vector_distance(a: &[f32], b: &[f32], norm: Norm) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::argument(format!(
            "dimension mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(match norm {
        Norm::L1 => l1(a, b),
        Norm::L2 => l2(a, b),
    })
}

/// Mean, over the query's regions, of the L2 distance to the closest
/// archive region.
///
/// The measure is asymmetric: the query set is always the first argument.
/// Adding regions to `archive` can only lower the result.
pub fn region_set_distance(query: &DescriptorMatrix, archive: &DescriptorMatrix) -> Result<f64> {
    if query.is_empty() || archive.is_empty() {
        return Err(Error::argument("region sets must be nonempty"));
    }
    if query.dim() != archive.dim() {
        return Err(Error::argument(format!(
            "region descriptor dimension mismatch: {} vs {}",
            query.dim(),
            archive.dim()
        )));
    }
    let total: f64 = query
        .rows()
        .map(|q| {
            archive
                .rows()
                .map(|r| l2(q, r))
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    Ok(total / query.len() as f64)
}

/// Average of both argument orders.
pub fn symmetric_region_set_distance(a: &DescriptorMatrix, b: &DescriptorMatrix) -> Result<f64> {
    Ok(0.5 * (region_set_distance(a, b)? + region_set_distance(b, a)?))
}
