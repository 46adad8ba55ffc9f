//! Randers scenario files (JSON or TOML).
//!
//! ```toml
//! metric = "euclidean"
//! one_form = "potential:linear(0.5,0)"
//! stencil = 16
//! sources = [[0.5, 0.5]]
//! pairs = [[[0.0, 0.0], [1.0, 0.0]]]
//!
//! [domain]
//! bbox = [0.0, 1.0, 0.0, 1.0]
//! resolution = 101
//!
//! [[triples]]
//! points = [[0.1, 0.1], [0.9, 0.2], [0.5, 0.8]]
//! expected = 0.0
//! tolerance = 1e-12
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::randers::{BoundingBox, GridDomain, Mask, MetricField, OneForm, RandersStructure, Stencil};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Resolution {
    Square(usize),
    Rect([usize; 2]),
}

impl Resolution {
    pub fn dims(&self) -> (usize, usize) {
        match *self {
            Resolution::Square(n) => (n, n),
            Resolution::Rect([nx, ny]) => (nx, ny),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    /// `[x_min, x_max, y_min, y_max]`.
    pub bbox: [f64; 4],
    pub resolution: Resolution,
    #[serde(default = "default_mask")]
    pub mask: Mask,
}

fn default_mask() -> Mask {
    Mask::Full
}

fn default_metric() -> String {
    "euclidean".into()
}

fn default_one_form() -> String {
    "zero".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleConfig {
    pub points: [[f64; 2]; 3],
    /// Asserted when given together with a tolerance.
    #[serde(default)]
    pub expected: Option<f64>,
    #[serde(default)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RayConfig {
    pub point: [f64; 2],
    pub direction: [f64; 2],
    /// Radii in units of the grid spacing.
    #[serde(default)]
    pub radii: Option<Vec<f64>>,
    /// Expected `[F, symmetric part, beta part]`.
    #[serde(default)]
    pub expected: Option<[f64; 3]>,
    /// Relative tolerance for `expected`.
    #[serde(default)]
    pub rel_tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "machine_tol")]
    pub decomposition: f64,
    #[serde(default = "machine_tol")]
    pub weight: f64,
    #[serde(default = "default_positivity_margin")]
    pub positivity_margin: f64,
}

fn machine_tol() -> f64 {
    1e-12
}

fn default_positivity_margin() -> f64 {
    crate::randers::DEFAULT_POSITIVITY_MARGIN
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            decomposition: machine_tol(),
            weight: machine_tol(),
            positivity_margin: default_positivity_margin(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandersScenario {
    pub domain: DomainConfig,
    #[serde(default = "default_metric")]
    pub metric: String,
    #[serde(default = "default_one_form")]
    pub one_form: String,
    #[serde(default)]
    pub stencil: Stencil,
    /// Distance fields are exported for these points.
    #[serde(default)]
    pub sources: Vec<[f64; 2]>,
    /// `(x, y)` pairs for the decomposition and weight checks.
    #[serde(default)]
    pub pairs: Vec<[[f64; 2]; 2]>,
    #[serde(default)]
    pub triples: Vec<TripleConfig>,
    #[serde(default)]
    pub rays: Vec<RayConfig>,
    /// Basepoint for grid weight recovery; defaults to the first pair's start.
    #[serde(default)]
    pub basepoint: Option<[f64; 2]>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl RandersScenario {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let origin = path.display().to_string();
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("toml") => toml::from_str(&text).map_err(|e| {
                let loc = match e.span() {
                    Some(span) => {
                        let line = text[..span.start].matches('\n').count() + 1;
                        format!("{origin}:{line}")
                    }
                    None => origin.clone(),
                };
                Error::parse(loc, e.message().to_string())
            }),
            _ => serde_json::from_str(&text)
                .map_err(|e| Error::parse(format!("{origin}:{}:{}", e.line(), e.column()), e.to_string())),
        }
    }

    pub fn build(&self) -> Result<RandersStructure> {
        let [x0, x1, y0, y1] = self.domain.bbox;
        let (nx, ny) = self.domain.resolution.dims();
        let domain = GridDomain::new(BoundingBox::new(x0, x1, y0, y1), nx, ny, self.domain.mask)?;
        let alpha: MetricField = self.metric.parse()?;
        let beta: OneForm = self.one_form.parse()?;
        RandersStructure::new(domain, alpha, beta)
    }

    /// Resolves a point to the nearest active node.
    pub fn node(rs: &RandersStructure, p: [f64; 2]) -> Result<usize> {
        rs.domain
            .nearest_node(p)
            .ok_or_else(|| Error::Domain(format!("point ({}, {}) is outside the masked domain", p[0], p[1])))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_and_json_agree() {
        let toml_text = r#"
metric = "diag(1,2)"
one_form = "potential:linear(0.5,0)"
stencil = 8
pairs = [[[0.0, 0.0], [1.0, 0.0]]]

[domain]
bbox = [0.0, 1.0, 0.0, 1.0]
resolution = [21, 11]

[[triples]]
points = [[0.1, 0.1], [0.9, 0.2], [0.5, 0.8]]
"#;
        let a: RandersScenario = toml::from_str(toml_text).unwrap();
        assert_eq!(a.stencil, Stencil::Eight);
        assert_eq!(a.domain.resolution.dims(), (21, 11));
        let json = serde_json::to_string(&a).unwrap();
        let b: RandersScenario = serde_json::from_str(&json).unwrap();
        assert_eq!(a, b);
        let rs = a.build().unwrap();
        assert_eq!(rs.domain.active_count(), 231);
    }

    #[test]
    fn annulus_mask_and_bad_stencil() {
        let text = r#"{
            "domain": {"bbox": [-3, 3, -3, 3], "resolution": 61,
                       "mask": {"kind": "annulus", "center": [0, 0], "r_in": 1.5, "r_out": 3}},
            "one_form": "dtheta(0.5)"
        }"#;
        let s: RandersScenario = serde_json::from_str(text).unwrap();
        assert_eq!(s.stencil, Stencil::Sixteen);
        assert!(s.build().is_ok());
        let bad = text.replace("\"one_form\"", "\"stencil\": 12, \"one_form\"");
        assert!(serde_json::from_str::<RandersScenario>(&bad).is_err());
    }
}
