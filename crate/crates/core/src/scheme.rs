use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::similarity::Norm;

/// A way of describing and comparing images.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scheme {
    /// Region descriptor sets compared with the region-set distance.
    Recnn,
    /// Global max-pooled descriptor.
    RecnnPlus,
    Stats,
    Color,
    Lbp,
    Glcm,
}

impl Scheme {
    pub const ALL: [Scheme; 6] = [
        Scheme::Recnn,
        Scheme::RecnnPlus,
        Scheme::Stats,
        Scheme::Color,
        Scheme::Lbp,
        Scheme::Glcm,
    ];

    /// Hand-crafted schemes computed from the raster image, in the order
    /// they are stored in index files.
    pub const BASELINES: [Scheme; 4] = [Scheme::Stats, Scheme::Color, Scheme::Lbp, Scheme::Glcm];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Recnn => "recnn",
            Scheme::RecnnPlus => "recnn+",
            Scheme::Stats => "stats",
            Scheme::Color => "color",
            Scheme::Lbp => "lbp",
            Scheme::Glcm => "glcm",
        }
    }

    /// Vector norm used to rank under this scheme. `Recnn` compares region
    /// sets, whose inner distance is L2.
    pub fn norm(self) -> Norm {
        match self {
            Scheme::RecnnPlus | Scheme::Color => Norm::L1,
            Scheme::Recnn | Scheme::Stats | Scheme::Lbp | Scheme::Glcm => Norm::L2,
        }
    }

    pub fn is_baseline(self) -> bool {
        Scheme::BASELINES.contains(&self)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| Error::argument(format!("unknown scheme {s:?}")))
    }
}
