//! Self-contained run reports: every input echoed, every derived quantity
//! and output path recorded, so a run can be reproduced from its report
//! alone.

use crate::config::ResolvedScenario;
use bubble_core::analysis::{Analysis, HeuristicRates};
use bubble_core::{BoundReport, FundamentalSchedule, SegmentationReport};
use serde::{Deserialize, Serialize};

/// Per-label window counts plus the event lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentationSummary {
    pub windows_total: usize,
    pub windows_mean_reversion: usize,
    pub windows_bubble: usize,
    pub windows_collapse: usize,
    pub windows_transitory: usize,
    /// Longest run of consecutive bubble windows.
    pub max_bubble_run: usize,
    pub ignition_events: Vec<f64>,
    pub collapse_events: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub asymptotic_slope_estimate: Option<f64>,
    /// Time of the first collapse -> recovery -> re-ignition chain, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub serial_bubble_at: Option<f64>,
}

impl SegmentationSummary {
    pub fn from_report(rep: &SegmentationReport, serial_bubble_at: Option<f64>) -> Self {
        use bubble_core::RegimeLabel::*;
        let count = |l| rep.window_labels.iter().filter(|&&x| x == l).count();
        let mut max_run = 0usize;
        let mut run = 0usize;
        for &l in &rep.window_labels {
            if l == Bubble {
                run += 1;
                max_run = max_run.max(run);
            } else {
                run = 0;
            }
        }
        SegmentationSummary {
            windows_total: rep.window_labels.len(),
            windows_mean_reversion: count(MeanReversion),
            windows_bubble: count(Bubble),
            windows_collapse: count(Collapse),
            windows_transitory: count(Transitory),
            max_bubble_run: max_run,
            ignition_events: rep.ignition_events.clone(),
            collapse_events: rep.collapse_events.clone(),
            asymptotic_slope_estimate: rep.asymptotic_slope_estimate,
            serial_bubble_at,
        }
    }
}

/// Unit-lag return volatility of the bubble path against its OU reference
/// on identical noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OuComparison {
    pub bubble_return_std: f64,
    pub ou_return_std: f64,
}

/// One deterministic theorem predicate and its outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeterministicCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OutputPaths {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ou_csv: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub svg: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub preset: String,
    pub seed: u64,
    /// The fully resolved scenario, sufficient to reproduce the run.
    pub scenario: ResolvedScenario,
    /// The concrete fundamental schedule after jump sizes were resolved.
    pub schedule: FundamentalSchedule,
    pub analysis: Analysis,
    pub heuristic_rates: HeuristicRates,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub segmentation: Option<SegmentationSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ou_comparison: Option<OuComparison>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bounds: Vec<BoundReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub deterministic_checks: Vec<DeterministicCheck>,
    pub saturation_flag: bool,
    pub outputs: OutputPaths,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}
