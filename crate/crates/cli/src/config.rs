//! Run configuration and the textual inputs it refers to: systems, sets,
//! rationals and pseudo-orbit files.

use std::fs;
use std::path::Path;

use clap::Args;
use omegalab::chain::ChainError;
use omegalab::counterexamples::exact_map_h;
use omegalab::pseudo_orbit::{PseudoOrbitDoc, System};
use omegalab::symbolic::{ShiftPresentation, SubsystemSpec};
use omegalab::{Budget, PlMap, Scalar};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Every knob a command may read. Flags win over `--config`; the merged
/// value is echoed into each report so a run can be replayed.
#[derive(Args, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// JSON file, inline JSON, or a built-in name (tent2, tent:p/q, exact_map, goldenmean, full2, bridged_loops).
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<String>,
    /// Points "p/q,p/q,...", H<n>, a shift subsystem name, or a file.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set: Option<String>,
    /// Pseudo-orbit file for `shadow`.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orbit: Option<String>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<String>,
    /// Block length for shifts.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Number of uniform boxes; defaults to the size derived from ε.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<usize>,
    /// Schedule depth K for `realize`.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<String>,
    /// Symbols of a realized stream to print.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<usize>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub exact_hit: bool,
    /// Maximum bit size of rationals in long exact iterations.
    #[arg(long, env = "OMEGALAB_BUDGET_BITS")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget_bits: Option<u64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("config {}: {e}", path.display())))
    }

    /// Fields set here take precedence over `base`.
    pub fn over(self, base: RunConfig) -> RunConfig {
        RunConfig {
            system: self.system.or(base.system),
            set: self.set.or(base.set),
            orbit: self.orbit.or(base.orbit),
            eps: self.eps.or(base.eps),
            k: self.k.or(base.k),
            partition: self.partition.or(base.partition),
            depth: self.depth.or(base.depth),
            precision: self.precision.or(base.precision),
            length: self.length.or(base.length),
            n: self.n.or(base.n),
            trials: self.trials.or(base.trials),
            seed: self.seed.or(base.seed),
            exact_hit: self.exact_hit || base.exact_hit,
            budget_bits: self.budget_bits.or(base.budget_bits),
        }
    }

    pub fn budget(&self) -> Result<Budget, CliError> {
        match self.budget_bits {
            Some(0) => Err(CliError::Input("--budget-bits must be positive".into())),
            Some(b) => Ok(Budget::new(b)),
            None => Ok(Budget::default()),
        }
    }

    pub fn system(&self) -> Result<System, CliError> {
        let spec = self.system.as_deref().ok_or_else(|| CliError::Input("--system is required".into()))?;
        load_system(spec)
    }

    pub fn eps(&self) -> Result<Scalar, CliError> {
        let text = self.eps.as_deref().ok_or_else(|| CliError::Input("--eps is required".into()))?;
        let eps = rational(text)?;
        if !eps.is_positive() {
            return Err(CliError::Input(format!("ε must be positive, got {eps}")));
        }
        self.budget()?.check(&eps)?;
        Ok(eps)
    }

    pub fn k(&self) -> Result<usize, CliError> {
        match self.k {
            Some(0) => Err(CliError::Input("--k must be positive".into())),
            Some(k) => Ok(k),
            None => Err(CliError::Input("--k is required for shifts".into())),
        }
    }
}

pub fn rational(text: &str) -> Result<Scalar, CliError> {
    text.trim().parse::<Scalar>().map_err(|e| CliError::Input(e.to_string()))
}

fn read_json<T: serde::de::DeserializeOwned>(spec: &str, what: &str) -> Result<T, CliError> {
    let text = if spec.trim_start().starts_with('{') || spec.trim_start().starts_with('[') {
        spec.to_string()
    } else {
        fs::read_to_string(spec).map_err(|e| CliError::Io(format!("{what} {spec}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{what} {spec}: {e}")))
}

pub fn load_system(spec: &str) -> Result<System, CliError> {
    let builtin = match spec {
        "tent2" => Some(System::Interval(PlMap::tent2())),
        "exact_map" => Some(System::Interval(PlMap::exact_map())),
        "goldenmean" | "golden_mean" => Some(System::Shift(ShiftPresentation::golden_mean())),
        "full2" => Some(System::Shift(ShiftPresentation::full_shift(&['0', '1']))),
        "bridged_loops" => Some(System::Shift(ShiftPresentation::bridged_loops())),
        _ => None,
    };
    if let Some(s) = builtin {
        return Ok(s);
    }
    if let Some(slope) = spec.strip_prefix("tent:") {
        return Ok(System::Interval(PlMap::tent(rational(slope)?)?));
    }
    read_json(spec, "system")
}

/// The set an analysis is about, resolved against the system.
#[derive(Clone, Debug)]
pub enum SetSpec {
    Points { name: String, points: Vec<Scalar> },
    /// `None` stands for the whole shift.
    Shift { lambda: Option<SubsystemSpec> },
}

#[derive(Deserialize)]
struct BlocksFile {
    blocks: Vec<String>,
}

pub fn load_set(spec: &str, system: &System) -> Result<SetSpec, CliError> {
    match system {
        System::Interval(_) => {
            if let Some(n) = spec.strip_prefix('H') {
                let n: u32 = n.parse().map_err(|_| CliError::Input(format!("bad truncation in {spec}")))?;
                return Ok(SetSpec::Points { name: spec.to_string(), points: exact_map_h(n) });
            }
            let points = if Path::new(spec).is_file() {
                read_json::<Vec<String>>(spec, "set")?.iter().map(|s| rational(s)).collect::<Result<_, _>>()?
            } else {
                spec.split(',').map(rational).collect::<Result<Vec<_>, _>>()?
            };
            if points.is_empty() {
                return Err(CliError::Input("empty point set".into()));
            }
            Ok(SetSpec::Points { name: spec.to_string(), points })
        }
        System::Shift(ambient) => {
            let lambda = match spec {
                "full" => None,
                "fixed0+cycle01" => Some(SubsystemSpec::Presentation(ShiftPresentation::fixed0_cycle01())),
                "unbridged" | "lambda_ab_ac" => Some(SubsystemSpec::Presentation(ShiftPresentation::unbridged_loops())),
                _ if spec.starts_with("blocks:") => Some(SubsystemSpec::Blocks(
                    spec["blocks:".len()..]
                        .split(',')
                        .map(|w| ambient.alphabet().parse_word(w))
                        .collect::<Result<_, _>>()
                        .map_err(|e| CliError::Input(e.to_string()))?,
                )),
                _ => {
                    let value: serde_json::Value = read_json(spec, "set")?;
                    if value.get("blocks").is_some() {
                        let b: BlocksFile = serde_json::from_value(value).map_err(|e| CliError::Input(e.to_string()))?;
                        let words = b.blocks.iter().map(|w| ambient.alphabet().parse_word(w)).collect::<Result<_, _>>();
                        Some(SubsystemSpec::Blocks(words.map_err(|e| CliError::Input(e.to_string()))?))
                    } else {
                        let p: ShiftPresentation =
                            serde_json::from_value(value).map_err(|e| CliError::Input(format!("set {spec}: {e}")))?;
                        Some(SubsystemSpec::Presentation(p))
                    }
                }
            };
            Ok(SetSpec::Shift { lambda })
        }
    }
}

pub fn load_orbit(spec: &str) -> Result<PseudoOrbitDoc, CliError> {
    read_json(spec, "pseudo-orbit")
}

pub fn size_guard(n: usize, max: usize) -> Result<(), CliError> {
    if n > max {
        return Err(ChainError::Size(format!("{n} points exceed the brute-force limit of {max}")).into());
    }
    Ok(())
}
