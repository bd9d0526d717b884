use super::{quadrant_counterexample, AngleKernel, ArcParams, DensityTable, TeethParams};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::str::FromStr;

/// Serializable description of an angle kernel.
///
/// JSON form is `{"type": "circ_arc", "xi": 0.5}` and so on; the short form
/// accepted by [`FromStr`] is `circ_arc:0.5`, `rect_teeth:1`, `specular`,
/// `retro` or `quadrant_cx`. Anything starting with `{` is parsed as JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelSpec {
    Specular,
    Retro,
    RectTeeth { r: TeethParams },
    CircArc { xi: ArcParams },
    QuadrantCx,
    Mixture { weights: Vec<f64>, parts: Vec<KernelSpec> },
    DensityTable { rows: DensityTable },
}

impl KernelSpec {
    pub fn build(&self) -> Result<AngleKernel> {
        Ok(match self {
            KernelSpec::Specular => AngleKernel::Specular,
            KernelSpec::Retro => AngleKernel::Retro,
            KernelSpec::RectTeeth { r } => AngleKernel::RectTeeth(*r),
            KernelSpec::CircArc { xi } => AngleKernel::CircArc(*xi),
            KernelSpec::QuadrantCx => AngleKernel::Pullback(Box::new(quadrant_counterexample())),
            KernelSpec::Mixture { weights, parts } => {
                if weights.len() != parts.len() {
                    return Err(Error::KernelSpec(format!(
                        "mixture has {} weights for {} parts",
                        weights.len(),
                        parts.len()
                    )));
                }
                let parts = parts.iter().map(KernelSpec::build).collect::<Result<Vec<_>>>()?;
                AngleKernel::mixture(weights.iter().copied().zip(parts).collect())?
            }
            KernelSpec::DensityTable { rows } => AngleKernel::DensityTable(rows.clone()),
        })
    }
}

impl FromStr for KernelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            return serde_json::from_str(s).map_err(|e| Error::KernelSpec(e.to_string()));
        }
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a.trim())),
            None => (s, None),
        };
        let number = |what: &str| -> Result<f64> {
            let a = arg.ok_or_else(|| Error::KernelSpec(format!("`{name}` needs a parameter, e.g. {name}:{what}")))?;
            a.parse::<f64>().map_err(|e| Error::KernelSpec(format!("bad number `{a}`: {e}")))
        };
        let no_arg = |k: KernelSpec| match arg {
            None => Ok(k),
            Some(_) => Err(Error::KernelSpec(format!("`{name}` takes no parameter"))),
        };
        match name {
            "specular" => no_arg(KernelSpec::Specular),
            "retro" => no_arg(KernelSpec::Retro),
            "quadrant_cx" => no_arg(KernelSpec::QuadrantCx),
            "rect_teeth" => Ok(KernelSpec::RectTeeth { r: TeethParams::new(number("1")?)? }),
            "circ_arc" => Ok(KernelSpec::CircArc { xi: ArcParams::new(number("0.5")?)? }),
            other => Err(Error::KernelSpec(format!("unknown kernel `{other}`"))),
        }
    }
}
