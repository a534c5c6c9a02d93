use serde::{Deserialize, Serialize};

use super::link::{run_link_with, LinkReport};
use super::scenario::FronthaulScenario;
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::powermodel::LinkKind;

/// Grid of a laser-power sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSpec {
    pub kinds: Vec<LinkKind>,
    pub wdm_counts: Vec<usize>,
    pub laser_start_dbm: f64,
    pub laser_stop_dbm: f64,
    pub laser_step_db: f64,
    pub threshold_percent: f64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            kinds: vec![LinkKind::Arof, LinkKind::Drof],
            wdm_counts: vec![1, 2, 3, 4],
            laser_start_dbm: -4.0,
            laser_stop_dbm: 18.0,
            laser_step_db: 1.0,
            threshold_percent: 3.5,
        }
    }
}

impl SweepSpec {
    /// Inclusive power grid.
    pub fn laser_powers_dbm(&self) -> Result<Vec<f64>> {
        if !(self.laser_step_db > 0.0) || self.laser_stop_dbm < self.laser_start_dbm {
            return Err(Error::invalid(
                "laser sweep",
                format!("{}:{}:{}", self.laser_start_dbm, self.laser_stop_dbm, self.laser_step_db),
            ));
        }
        let count = ((self.laser_stop_dbm - self.laser_start_dbm) / self.laser_step_db + 1e-9).floor() as usize + 1;
        Ok((0..count)
            .map(|i| self.laser_start_dbm + i as f64 * self.laser_step_db)
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub kind: LinkKind,
    pub wdm: usize,
    pub laser_dbm: f64,
    pub report: Option<LinkReport>,
    pub error: Option<String>,
}

impl SweepPoint {
    /// Worst-channel EVM, `None` for failed points.
    pub fn evm_percent(&self) -> Option<f64> {
        self.report.as_ref().map(LinkReport::worst_evm)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DynamicRange {
    pub kind: LinkKind,
    pub wdm: usize,
    pub threshold_percent: f64,
    pub dynamic_range_db: f64,
    /// Lowest and highest power of the span.
    pub span_dbm: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub laser_powers_dbm: Vec<f64>,
    pub wdm_counts: Vec<usize>,
    pub kinds: Vec<LinkKind>,
    /// Grid order: kind, then WDM count, then laser power.
    pub points: Vec<SweepPoint>,
    pub dynamic_ranges: Vec<DynamicRange>,
}

impl SweepResult {
    pub fn failed(&self) -> impl Iterator<Item = &SweepPoint> {
        self.points.iter().filter(|p| p.report.is_none())
    }

    pub fn curve(&self, kind: LinkKind, wdm: usize) -> impl Iterator<Item = &SweepPoint> {
        self.points.iter().filter(move |p| p.kind == kind && p.wdm == wdm)
    }

    pub fn dynamic_range(&self, kind: LinkKind, wdm: usize) -> Option<&DynamicRange> {
        self.dynamic_ranges.iter().find(|d| d.kind == kind && d.wdm == wdm)
    }
}

/// Longest contiguous run of points with EVM at or below `threshold`, as (first, last) power.
/// `curve` must be ordered by power; failed points (`None`) break a run.
pub fn passing_span(curve: &[(f64, Option<f64>)], threshold: f64) -> Option<(f64, f64)> {
    let mut best: Option<(f64, f64)> = None;
    let mut start: Option<f64> = None;
    let close = |s: Option<f64>, end: f64, best: &mut Option<(f64, f64)>| {
        if let Some(s) = s {
            if best.is_none_or(|(a, b)| end - s > b - a) {
                *best = Some((s, end));
            }
        }
    };
    let mut prev = f64::NAN;
    for &(p, evm) in curve {
        if evm.is_some_and(|e| e <= threshold) {
            start.get_or_insert(p);
        } else {
            close(start.take(), prev, &mut best);
        }
        prev = p;
    }
    close(start, prev, &mut best);
    best
}

/// Dynamic range in dB of an ordered curve; 0 when no point qualifies.
pub fn dynamic_range_db(curve: &[(f64, Option<f64>)], threshold: f64) -> f64 {
    passing_span(curve, threshold).map_or(0.0, |(a, b)| b - a)
}

pub fn run_evm_sweep(template: &FronthaulScenario, spec: &SweepSpec) -> Result<SweepResult> {
    run_evm_sweep_with(Execution::default(), template, spec)
}

/// Evaluate the full grid. Point failures are recorded and do not stop the sweep.
pub fn run_evm_sweep_with(exec: Execution, template: &FronthaulScenario, spec: &SweepSpec) -> Result<SweepResult> {
    let powers = spec.laser_powers_dbm()?;
    if spec.kinds.is_empty() || spec.wdm_counts.is_empty() {
        return Err(Error::invalid("sweep", "empty kind or WDM axis"));
    }
    if spec.wdm_counts.contains(&0) {
        return Err(Error::invalid("sweep", "WDM count 0"));
    }
    let mut grid = Vec::new();
    for &kind in &spec.kinds {
        for &wdm in &spec.wdm_counts {
            for &p in &powers {
                grid.push((kind, wdm, p));
            }
        }
    }
    let points = exec::map(exec, &grid, |_, &(kind, wdm, laser_dbm)| {
        let mut s = template.clone();
        s.link_kind = kind;
        s.wdm_channels = wdm;
        s.modulator.laser_power_dbm = laser_dbm;
        let (report, error) = match run_link_with(exec, &s) {
            Ok(r) => (Some(r), None),
            Err(e) => (None, Some(e.to_string())),
        };
        SweepPoint {
            kind,
            wdm,
            laser_dbm,
            report,
            error,
        }
    });
    let mut dynamic_ranges = Vec::new();
    for &kind in &spec.kinds {
        for &wdm in &spec.wdm_counts {
            let curve: Vec<(f64, Option<f64>)> = points
                .iter()
                .filter(|p| p.kind == kind && p.wdm == wdm)
                .map(|p| (p.laser_dbm, p.evm_percent()))
                .collect();
            let span = passing_span(&curve, spec.threshold_percent);
            dynamic_ranges.push(DynamicRange {
                kind,
                wdm,
                threshold_percent: spec.threshold_percent,
                dynamic_range_db: span.map_or(0.0, |(a, b)| b - a),
                span_dbm: span,
            });
        }
    }
    Ok(SweepResult {
        laser_powers_dbm: powers,
        wdm_counts: spec.wdm_counts.clone(),
        kinds: spec.kinds.clone(),
        points,
        dynamic_ranges,
    })
}
