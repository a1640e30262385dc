//! Declarative problem definitions.
//!
//! ```json
//! {
//!   "name": "spring",
//!   "lower": [0.05, 0.25, 2.0],
//!   "upper": [2.0, 1.3, 15.0],
//!   "costs": [1, 4, 8, 14, 3],
//!   "constraints": ["(x1 + x2) / 1.5 - 1", "..."],
//!   "objective": "x1^2 * x2 * (x3 + 2)",
//!   "best_known": { "point": [0.051686, 0.35666, 11.29231], "objective_value": 0.0126652 }
//! }
//! ```
//!
//! `costs` lists the constraints first and the objective last.

use std::path::Path;

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use seqmads_core::problem::{Function, ProblemSpec};
use seqmads_core::BestKnown;

use crate::expr::Expr;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub name: String,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub costs: Vec<u64>,
    pub constraints: Vec<String>,
    pub objective: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub best_known: Option<BestKnown>,
}

impl ProblemFile {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn build(&self) -> anyhow::Result<ProblemSpec> {
        let n = self.lower.len();
        let compile = |label: String, source: &str| -> anyhow::Result<Function> {
            let e = Expr::parse(source).with_context(|| format!("{label}: '{source}'"))?;
            if e.arity() > n {
                bail!("{label} uses x{} but the problem has {n} variables", e.arity());
            }
            Ok(Box::new(move |x: &[f64]| e.eval(x)))
        };
        let constraints = self
            .constraints
            .iter()
            .enumerate()
            .map(|(j, s)| compile(format!("constraint c{}", j + 1), s))
            .collect::<anyhow::Result<Vec<_>>>()?;
        let objective = compile("objective".into(), &self.objective)?;
        let spec = ProblemSpec::new(
            self.name.clone(),
            self.lower.clone(),
            self.upper.clone(),
            self.costs.clone(),
            constraints,
            objective,
        )?;
        Ok(match &self.best_known {
            Some(best) => spec.with_best_known(best.clone())?,
            None => spec,
        })
    }
}
