//! The model system `Q1(x) = F(u, v)`, `Q2(x) = 0` and its JSON format.
//!
//! ```json
//! {"r": 4, "D": -23,
//!  "Q1": [[0,0,1],[1,1,1],[2,2,1],[3,3,1]],
//!  "Q2": [[0,0,-1],[1,1,1],[2,2,2],[3,3,3]],
//!  "weight": {"kind": "radial", "center": [...], "inner_radius": 0.2, "outer_radius": 0.4}}
//! ```
//! Coefficient triples `[i, j, c]` are 0-based and contribute `c x_i x_j`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::arith::{check_fundamental, rem};
use crate::error::{invalid, Result};
use crate::forms::BinaryQF;
use crate::quadform::{singular_points_mod_p, RaryForm};
use crate::weight::{support_margins, SupportMargins, WeightSpec};

#[derive(Clone, Debug, Serialize, Deserialize)]
struct ModelFile {
    #[serde(default)]
    name: Option<String>,
    r: usize,
    #[serde(rename = "D")]
    d: i64,
    #[serde(rename = "Q1")]
    q1: Vec<(usize, usize, i64)>,
    #[serde(rename = "Q2")]
    q2: Vec<(usize, usize, i64)>,
    #[serde(default)]
    weight: Option<WeightSpec>,
}

#[derive(Clone, Debug)]
pub struct ModelSystem {
    pub name: String,
    pub r: usize,
    pub d: i64,
    pub q1: RaryForm,
    pub q2: RaryForm,
    pub weight: Option<WeightSpec>,
}

const SHIPPED: [(&str, &str); 3] = [
    ("quartic", include_str!("../models/quartic_d23.json")),
    ("ternary", include_str!("../models/ternary_d23.json")),
    ("toy", include_str!("../models/toy_d4.json")),
];

impl ModelSystem {
    pub fn new(name: &str, d: i64, q1: RaryForm, q2: RaryForm, weight: Option<WeightSpec>) -> Result<Self> {
        let m = Self { name: name.to_string(), r: q1.r(), d, q1, q2, weight };
        m.validate()?;
        Ok(m)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let f: ModelFile = serde_json::from_str(s)?;
        let q1 = RaryForm::from_triples(f.r, &f.q1)?;
        let q2 = RaryForm::from_triples(f.r, &f.q2)?;
        Self::new(f.name.as_deref().unwrap_or("model"), f.d, q1, q2, f.weight)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path)?;
        let mut m = Self::from_json_str(&s)?;
        if m.name == "model" {
            if let Some(stem) = path.file_stem() {
                m.name = stem.to_string_lossy().into_owned();
            }
        }
        Ok(m)
    }

    /// A model bundled with the crate: `quartic`, `ternary` or `toy`.
    pub fn shipped(name: &str) -> Result<Self> {
        match SHIPPED.iter().find(|(n, _)| *n == name) {
            Some((_, s)) => Self::from_json_str(s),
            None => invalid(format!(
                "no shipped model '{name}' (available: {})",
                SHIPPED.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(", ")
            )),
        }
    }

    pub fn shipped_names() -> Vec<&'static str> {
        SHIPPED.iter().map(|(n, _)| *n).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        let f = ModelFile {
            name: Some(self.name.clone()),
            r: self.r,
            d: self.d,
            q1: self.q1.triples(),
            q2: self.q2.triples(),
            weight: self.weight.clone(),
        };
        Ok(serde_json::to_string_pretty(&f)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.q2.r() != self.r {
            return invalid("Q1 and Q2 must have the same number of variables");
        }
        if self.d >= 0 {
            return invalid(format!("D = {} must be negative", self.d));
        }
        check_fundamental(self.d)?;
        if !self.q2.is_nondegenerate() {
            return invalid("Q2 is degenerate");
        }
        if let Some(w) = &self.weight {
            w.validate()?;
            if w.dim() != self.r {
                return invalid(format!("weight center has dimension {}, model has r = {}", w.dim(), self.r));
            }
        }
        Ok(())
    }

    /// `n = r + 2`.
    pub fn n(&self) -> usize {
        self.r + 2
    }

    /// The principal form of discriminant `D`.
    pub fn binary_form(&self) -> BinaryQF {
        BinaryQF::principal(self.d).expect("validated discriminant")
    }

    /// `(1 - D)/4` for `D = 1 mod 4`, else `-D/4`.
    pub fn k_form(&self) -> i64 {
        if rem(self.d, 4) == 1 {
            (1 - self.d) / 4
        } else {
            -self.d / 4
        }
    }

    pub fn q2_isotropic_over_reals(&self) -> bool {
        self.q2.is_isotropic_over_reals()
    }

    pub fn weight(&self) -> Result<&WeightSpec> {
        match &self.weight {
            Some(w) => Ok(w),
            None => invalid(format!("model '{}' has no weight", self.name)),
        }
    }

    pub fn margins(&self) -> Result<SupportMargins> {
        Ok(support_margins(&self.q1, &self.q2, self.weight()?))
    }

    /// Singular `F_p`-points of `V(Q1, Q2)` for each prime.
    pub fn smoothness_report(&self, primes: &[i64]) -> Vec<(i64, usize)> {
        primes.iter().map(|&p| (p, singular_points_mod_p(&self.q1, &self.q2, p))).collect()
    }
}
