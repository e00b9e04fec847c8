//! Scenario presets: the parameter sets of the simulation study, plus the
//! jump and varying-fundamental experiments built on them.

use bubble_core::{FundamentalSchedule, ModelParams, NoiseFamily, ResponseSpec};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
#[clap(rename_all = "kebab-case")]
pub enum PresetName {
    /// Big rare bubbles: nu = 5, mu = 4, sigma = 3, cubic d = 0.4.
    Regime1,
    /// Same parameters, horizon long enough to catch serial bubbles.
    Regime1Serial,
    /// Strong randomness: nu = 0.6, mu = 0.2, sigma = 20, quintic d = 90.
    Regime2,
    /// Balanced phase: nu = 0.6, mu = 0.23, sigma = 2, quintic d = 90.
    Regime3A,
    /// Balanced phase, stronger randomness: nu = 0.42, mu = 0.15, sigma = 2, cubic d = 90.
    Regime3B,
    /// Regime-3b with a small fundamental jump (delta_m / 4) mid-run.
    JumpSmall,
    /// Regime-3b with a jump at the guaranteed-ignition threshold.
    JumpLarge,
    /// Regime-3b with a slowly drifting random-walk fundamental.
    VaryingP0,
    /// Regime-1 parameters with sigma = 0: the five deterministic theorem checks.
    DeterministicSuite,
}

impl fmt::Display for PresetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PresetName::Regime1 => "regime1",
            PresetName::Regime1Serial => "regime1-serial",
            PresetName::Regime2 => "regime2",
            PresetName::Regime3A => "regime3-a",
            PresetName::Regime3B => "regime3-b",
            PresetName::JumpSmall => "jump-small",
            PresetName::JumpLarge => "jump-large",
            PresetName::VaryingP0 => "varying-p0",
            PresetName::DeterministicSuite => "deterministic-suite",
        };
        f.write_str(s)
    }
}

impl FromStr for PresetName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "regime1" => Ok(PresetName::Regime1),
            "regime1-serial" => Ok(PresetName::Regime1Serial),
            "regime2" => Ok(PresetName::Regime2),
            "regime3-a" => Ok(PresetName::Regime3A),
            "regime3-b" => Ok(PresetName::Regime3B),
            "jump-small" => Ok(PresetName::JumpSmall),
            "jump-large" => Ok(PresetName::JumpLarge),
            "varying-p0" => Ok(PresetName::VaryingP0),
            "deterministic-suite" => Ok(PresetName::DeterministicSuite),
            other => Err(format!("unknown preset '{other}'")),
        }
    }
}

/// Fundamental-path experiment attached to a preset; jump sizes depend on
/// the computed stability scales, so they resolve at run time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleRule {
    ConstantZero,
    /// Jump of `delta_m / 4` at `t_jump` (stays in the corridor).
    SmallJumpAt { t_jump: f64 },
    /// Jump of `(2 a_b + 3 delta_m) / min(mu, 1)` at `t_jump` (guaranteed
    /// ignition threshold for a fundamental jump).
    LargeJumpAt { t_jump: f64 },
    /// Random walk with drift 0.02 per unit and volatility 0.1 per
    /// sqrt-unit, well below every preset's price volatility.
    SlowRandomWalk,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioPreset {
    pub name: PresetName,
    pub params: ModelParams,
    pub response: ResponseSpec,
    pub schedule_rule: ScheduleRule,
    pub dt: f64,
    pub horizon: f64,
    pub seed: u64,
    pub noise_family: NoiseFamily,
    pub record_stride: usize,
    /// Simulate the nu = 0 reference on the same noise, as in the paired
    /// figures.
    pub paired_ou: bool,
}

impl ScenarioPreset {
    pub fn get(name: PresetName) -> Self {
        let regime1 = (
            ModelParams::new(4.0, 3.0, 5.0).unwrap(),
            ResponseSpec::cubic(0.4).unwrap(),
        );
        let regime3b = (
            ModelParams::new(0.15, 2.0, 0.42).unwrap(),
            ResponseSpec::cubic(90.0).unwrap(),
        );
        match name {
            PresetName::Regime1 => ScenarioPreset {
                name,
                params: regime1.0,
                response: regime1.1,
                schedule_rule: ScheduleRule::ConstantZero,
                dt: bubble_core::DEFAULT_DT,
                horizon: 500.0,
                seed: 1,
                noise_family: NoiseFamily::Gaussian,
                record_stride: 1,
                paired_ou: false,
            },
            PresetName::Regime1Serial => ScenarioPreset {
                horizon: 2000.0,
                ..Self::get(PresetName::Regime1)
            }
            .with_name(name),
            PresetName::Regime2 => ScenarioPreset {
                name,
                params: ModelParams::new(0.2, 20.0, 0.6).unwrap(),
                response: ResponseSpec::quintic(90.0).unwrap(),
                schedule_rule: ScheduleRule::ConstantZero,
                dt: bubble_core::DEFAULT_DT,
                horizon: 200.0,
                seed: 1,
                noise_family: NoiseFamily::Gaussian,
                record_stride: 1,
                paired_ou: true,
            },
            PresetName::Regime3A => ScenarioPreset {
                name,
                params: ModelParams::new(0.23, 2.0, 0.6).unwrap(),
                response: ResponseSpec::quintic(90.0).unwrap(),
                schedule_rule: ScheduleRule::ConstantZero,
                dt: bubble_core::DEFAULT_DT,
                horizon: 200.0,
                seed: 1,
                noise_family: NoiseFamily::Gaussian,
                record_stride: 1,
                paired_ou: true,
            },
            PresetName::Regime3B => ScenarioPreset {
                name,
                params: regime3b.0,
                response: regime3b.1,
                schedule_rule: ScheduleRule::ConstantZero,
                dt: bubble_core::DEFAULT_DT,
                horizon: 200.0,
                seed: 1,
                noise_family: NoiseFamily::Gaussian,
                record_stride: 1,
                paired_ou: true,
            },
            PresetName::JumpSmall => ScenarioPreset {
                schedule_rule: ScheduleRule::SmallJumpAt { t_jump: 100.0 },
                ..Self::get(PresetName::Regime3B)
            }
            .with_name(name),
            PresetName::JumpLarge => ScenarioPreset {
                schedule_rule: ScheduleRule::LargeJumpAt { t_jump: 100.0 },
                ..Self::get(PresetName::Regime3B)
            }
            .with_name(name),
            PresetName::VaryingP0 => ScenarioPreset {
                schedule_rule: ScheduleRule::SlowRandomWalk,
                ..Self::get(PresetName::Regime3B)
            }
            .with_name(name),
            PresetName::DeterministicSuite => ScenarioPreset {
                name,
                params: regime1.0.with_sigma(0.0),
                response: regime1.1,
                schedule_rule: ScheduleRule::ConstantZero,
                dt: bubble_core::DEFAULT_DT,
                horizon: 50.0,
                seed: 1,
                noise_family: NoiseFamily::Gaussian,
                record_stride: 1,
                paired_ou: false,
            },
        }
    }

    fn with_name(mut self, name: PresetName) -> Self {
        self.name = name;
        self
    }

    /// Concrete fundamental schedule once the stability scales are known.
    pub fn resolve_schedule(
        &self,
        scales: &bubble_core::Scales,
        a_b: f64,
        seed: u64,
    ) -> FundamentalSchedule {
        match self.schedule_rule {
            ScheduleRule::ConstantZero => FundamentalSchedule::Constant { p0: 0.0 },
            ScheduleRule::SmallJumpAt { t_jump } => FundamentalSchedule::Jump {
                p_minus: 0.0,
                p_plus: scales.delta_m / 4.0,
                t_jump,
            },
            ScheduleRule::LargeJumpAt { t_jump } => FundamentalSchedule::Jump {
                p_minus: 0.0,
                p_plus: (2.0 * a_b + 3.0 * scales.delta_m) / self.params.mu.min(1.0),
                t_jump,
            },
            ScheduleRule::SlowRandomWalk => FundamentalSchedule::RandomWalk {
                p_start: 0.0,
                drift: 0.02,
                vol: 0.1,
                seed: seed ^ 0x5eed_0f0f_0f0f_0f0f,
            },
        }
    }

    pub fn all() -> [PresetName; 9] {
        [
            PresetName::Regime1,
            PresetName::Regime1Serial,
            PresetName::Regime2,
            PresetName::Regime3A,
            PresetName::Regime3B,
            PresetName::JumpSmall,
            PresetName::JumpLarge,
            PresetName::VaryingP0,
            PresetName::DeterministicSuite,
        ]
    }
}
