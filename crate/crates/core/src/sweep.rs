//! Packaging parameter sweeps: row-major grids over the degrees of freedom,
//! one-at-a-time trend checks and optimum search.
//!
//! Cells are independent, so a driver can evaluate [`SweepPlan::cell`] in
//! any order or in parallel and hand the results to [`SweepPlan::collect`].

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::em_models::capped_cpw_network;
use crate::geometry::{validate, CpwGeometry, Dof, PackageDoF, SubstrateStack};
use crate::network::{mag_db, FrequencyGrid};
use crate::{Error, Result};

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct SweepAxis {
    pub dof: Dof,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl SweepAxis {
    pub fn new(dof: Dof, min: f64, max: f64, count: usize) -> Self {
        Self { dof, min, max, count }
    }

    pub fn check(&self) -> Result<()> {
        if self.count == 0 || !(self.min <= self.max) || !self.min.is_finite() || !self.max.is_finite() {
            return Err(Error::InvalidInput(format!("bad axis {}: {self:?}", self.dof)));
        }
        Ok(())
    }

    /// Evenly spaced values from `min` to `max` inclusive.
    pub fn values(&self) -> Vec<f64> {
        match self.count {
            0 => Vec::new(),
            1 => alloc::vec![self.min],
            n => {
                let step = (self.max - self.min) / (n - 1) as f64;
                let mut v: Vec<f64> = (0..n).map(|i| self.min + step * i as f64).collect();
                v[n - 1] = self.max;
                v
            }
        }
    }
}

/// Figures of merit at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct Merit {
    pub s21_db: f64,
    pub s11_db: f64,
}

/// What a sweep evaluates at each cell.
pub trait Objective: Sync {
    fn evaluate(
        &self,
        cpw: &CpwGeometry,
        stack: &SubstrateStack,
        dof: &PackageDoF,
        frequency: f64,
    ) -> Result<Merit>;
}

/// `|S21|` and `|S11|` of the capped line.
#[derive(Debug, Clone, Copy, Default)]
pub struct CappedLine;

impl Objective for CappedLine {
    fn evaluate(
        &self,
        cpw: &CpwGeometry,
        stack: &SubstrateStack,
        dof: &PackageDoF,
        frequency: f64,
    ) -> Result<Merit> {
        let n = capped_cpw_network(cpw, stack, dof, &FrequencyGrid::single(frequency)?)?;
        let s = n.s()[0];
        Ok(Merit { s21_db: mag_db(s.s21), s11_db: mag_db(s.s11) })
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub enum CellOutcome {
    Evaluated(Merit),
    /// Failed validation; the codes of the error findings.
    Skipped(String),
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct SweepCell {
    pub coords: Vec<f64>,
    pub outcome: CellOutcome,
}

impl SweepCell {
    pub fn merit(&self) -> Option<Merit> {
        match self.outcome {
            CellOutcome::Evaluated(m) => Some(m),
            CellOutcome::Skipped(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct SweepTable {
    pub axes: Vec<SweepAxis>,
    pub objective_frequency: f64,
    /// Row-major, last axis fastest.
    pub cells: Vec<SweepCell>,
}

/// A grid of cells around a base configuration.
#[derive(Debug, Clone)]
pub struct SweepPlan {
    pub cpw: CpwGeometry,
    pub stack: SubstrateStack,
    pub base: PackageDoF,
    pub axes: Vec<SweepAxis>,
    pub objective_frequency: f64,
    values: Vec<Vec<f64>>,
}

impl SweepPlan {
    pub fn new(
        cpw: &CpwGeometry,
        stack: &SubstrateStack,
        base: &PackageDoF,
        axes: &[SweepAxis],
        objective_frequency: f64,
    ) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidInput("sweep needs at least one axis".into()));
        }
        for (i, a) in axes.iter().enumerate() {
            a.check()?;
            if axes[..i].iter().any(|b| b.dof == a.dof) {
                return Err(Error::InvalidInput(format!("axis {} appears twice", a.dof)));
            }
        }
        if !(objective_frequency > 0.0 && objective_frequency.is_finite()) {
            return Err(Error::InvalidInput(format!("objective frequency {objective_frequency} Hz")));
        }
        Ok(Self {
            cpw: *cpw,
            stack: *stack,
            base: *base,
            axes: axes.to_vec(),
            objective_frequency,
            values: axes.iter().map(SweepAxis::values).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.values.iter().map(Vec::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn coords(&self, index: usize) -> Vec<f64> {
        let mut rest = index;
        let mut out = alloc::vec![0.0; self.values.len()];
        for (slot, vals) in out.iter_mut().zip(&self.values).rev() {
            *slot = vals[rest % vals.len()];
            rest /= vals.len();
        }
        out
    }

    pub fn dof_at(&self, index: usize) -> PackageDoF {
        self.axes
            .iter()
            .zip(self.coords(index))
            .fold(self.base, |d, (a, v)| d.with(a.dof, v))
    }

    /// Evaluate one cell. Validation errors become a skip; model errors
    /// propagate.
    pub fn cell<O: Objective + ?Sized>(&self, index: usize, objective: &O) -> Result<SweepCell> {
        let dof = self.dof_at(index);
        let report = validate(&self.cpw, &self.stack, &dof);
        let outcome = if report.has_errors() {
            let codes: Vec<&str> = report.errors().map(|f| f.code).collect();
            CellOutcome::Skipped(codes.join(";"))
        } else {
            CellOutcome::Evaluated(objective.evaluate(&self.cpw, &self.stack, &dof, self.objective_frequency)?)
        };
        Ok(SweepCell { coords: self.coords(index), outcome })
    }

    /// Assemble cells evaluated in row-major order.
    pub fn collect(&self, cells: Vec<SweepCell>) -> Result<SweepTable> {
        if cells.len() != self.len() {
            return Err(Error::InvalidInput(format!("{} cells for a {}-cell plan", cells.len(), self.len())));
        }
        if cells.iter().all(|c| c.merit().is_none()) {
            return Err(Error::AllCellsInvalid);
        }
        Ok(SweepTable {
            axes: self.axes.clone(),
            objective_frequency: self.objective_frequency,
            cells,
        })
    }

    pub fn run<O: Objective + ?Sized>(&self, objective: &O) -> Result<SweepTable> {
        let cells = (0..self.len()).map(|i| self.cell(i, objective)).collect::<Result<Vec<_>>>()?;
        self.collect(cells)
    }
}

/// Sequential sweep of the capped line.
pub fn grid_sweep(
    cpw: &CpwGeometry,
    stack: &SubstrateStack,
    base: &PackageDoF,
    axes: &[SweepAxis],
    objective_frequency: f64,
) -> Result<SweepTable> {
    SweepPlan::new(cpw, stack, base, axes, objective_frequency)?.run(&CappedLine)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    S21Db,
    S11Db,
}

/// Best evaluated cell; ties go to the first in row-major order.
pub fn argmax(table: &SweepTable, metric: Metric) -> Result<&SweepCell> {
    let key = |m: Merit| match metric {
        Metric::S21Db => m.s21_db,
        Metric::S11Db => m.s11_db,
    };
    let mut best: Option<(&SweepCell, f64)> = None;
    for c in &table.cells {
        if let Some(m) = c.merit() {
            if best.map_or(true, |(_, b)| key(m) > b) {
                best = Some((c, key(m)));
            }
        }
    }
    best.map(|(c, _)| c).ok_or(Error::EmptyTable)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub enum Sign {
    Increasing,
    Decreasing,
    NonMonotone,
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Increasing => "+",
            Sign::Decreasing => "-",
            Sign::NonMonotone => "nonmonotone",
        })
    }
}

/// Sweep range and expected direction of `|S21|` for the trend check.
pub fn trend_range(dof: Dof) -> Option<((f64, f64), Sign)> {
    use Sign::{Decreasing as D, Increasing as I};
    match dof {
        Dof::CapResistivity => Some(((15.0, 4000.0), I)),
        Dof::CapThickness => Some(((200.0, 400.0), D)),
        Dof::RecessDepth => Some(((0.0, 150.0), I)),
        Dof::ViaDiameter => Some(((5.0, 95.0), I)),
        Dof::GsgLateralDistance => Some(((150.0, 350.0), I)),
        Dof::BumpHeight => Some(((5.0, 50.0), I)),
        _ => None,
    }
}

pub const TREND_DOFS: [Dof; 6] = [
    Dof::CapResistivity,
    Dof::CapThickness,
    Dof::RecessDepth,
    Dof::ViaDiameter,
    Dof::GsgLateralDistance,
    Dof::BumpHeight,
];

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct TrendEntry {
    pub dof: Dof,
    pub expected: Sign,
    pub observed: Sign,
    /// `(value, s21_db)` along the axis.
    pub samples: Vec<(f64, f64)>,
}

impl TrendEntry {
    pub fn matches(&self) -> bool {
        self.expected == self.observed
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct TrendReport {
    pub objective_frequency: f64,
    pub entries: Vec<TrendEntry>,
}

impl TrendReport {
    pub fn all_match(&self) -> bool {
        self.entries.iter().all(TrendEntry::matches)
    }
}

pub fn classify(values: &[f64]) -> Sign {
    let pairs = || values.windows(2);
    if pairs().all(|w| w[1] >= w[0]) {
        Sign::Increasing
    } else if pairs().all(|w| w[1] <= w[0]) {
        Sign::Decreasing
    } else {
        Sign::NonMonotone
    }
}

/// One-at-a-time sweeps of `dofs` over their trend ranges.
pub fn trend_signs_with<O: Objective + ?Sized>(
    cpw: &CpwGeometry,
    stack: &SubstrateStack,
    base: &PackageDoF,
    dofs: &[Dof],
    points_per_axis: usize,
    objective_frequency: f64,
    objective: &O,
) -> Result<TrendReport> {
    if points_per_axis < 3 {
        return Err(Error::TooFewPoints(points_per_axis));
    }
    let mut entries = Vec::with_capacity(dofs.len());
    for &dof in dofs {
        let ((lo, hi), expected) = trend_range(dof).ok_or_else(|| Error::UnknownDof(dof.name().into()))?;
        let axis = SweepAxis::new(dof, lo, hi, points_per_axis);
        let table = SweepPlan::new(cpw, stack, base, &[axis], objective_frequency)?.run(objective)?;
        let mut samples = Vec::with_capacity(points_per_axis);
        for c in &table.cells {
            match &c.outcome {
                CellOutcome::Evaluated(m) => samples.push((c.coords[0], m.s21_db)),
                CellOutcome::Skipped(why) => {
                    return Err(Error::InvalidInput(format!("{dof} = {} is invalid: {why}", c.coords[0])))
                }
            }
        }
        let vals: Vec<f64> = samples.iter().map(|s| s.1).collect();
        entries.push(TrendEntry { dof, expected, observed: classify(&vals), samples });
    }
    Ok(TrendReport { objective_frequency, entries })
}

pub fn trend_signs(
    cpw: &CpwGeometry,
    stack: &SubstrateStack,
    base: &PackageDoF,
    dofs: &[Dof],
    points_per_axis: usize,
    objective_frequency: f64,
) -> Result<TrendReport> {
    trend_signs_with(cpw, stack, base, dofs, points_per_axis, objective_frequency, &CappedLine)
}
