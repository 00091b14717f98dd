//! Electrostatic parallel-plate MEMS varactor on meander suspensions.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::consts::EPS0;
use crate::network::{Element, FrequencyGrid, TwoPortNetwork};
use crate::{Error, Result};

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

/// Moving plate over a fixed electrode. SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct PlateSpec {
    pub area: f64,
    /// Initial air gap.
    pub gap: f64,
    pub dielectric_thickness: f64,
    pub dielectric_permittivity: f64,
}

impl PlateSpec {
    pub fn check(&self) -> Result<()> {
        if !(self.area > 0.0 && self.gap > 0.0 && self.dielectric_permittivity >= 1.0) {
            return Err(Error::InvalidInput(format!("plate needs positive area and gap: {self:?}")));
        }
        if !(self.dielectric_thickness > 0.0) || !self.dielectric_thickness.is_finite() {
            return Err(Error::InvalidInput(format!(
                "dielectric_thickness must be positive, got {}",
                self.dielectric_thickness
            )));
        }
        Ok(())
    }

    pub fn up_capacitance(&self) -> f64 {
        EPS0 * self.area / self.gap
    }

    pub fn down_capacitance(&self) -> f64 {
        EPS0 * self.dielectric_permittivity * self.area / self.dielectric_thickness
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct BeamSegment {
    pub length: f64,
    pub width: f64,
    pub thickness: f64,
}

/// Identical meanders acting in parallel, each a chain of beam segments.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct MeanderSpec {
    pub meander_count: u32,
    pub segments: Vec<BeamSegment>,
    pub youngs_modulus: f64,
}

/// Guided-end flexure `E w t^3 / l^3` per segment, segments in series,
/// meanders in parallel.
pub fn meander_stiffness(m: &MeanderSpec) -> Result<f64> {
    if m.meander_count == 0 || m.segments.is_empty() || !(m.youngs_modulus > 0.0) {
        return Err(Error::InvalidInput(format!("meander needs segments and stiffness: {m:?}")));
    }
    let mut compliance = 0.0;
    for s in &m.segments {
        if !(s.length > 0.0 && s.width > 0.0 && s.thickness > 0.0) {
            return Err(Error::InvalidInput(format!("beam segment {s:?}")));
        }
        compliance += s.length.powi(3) / (m.youngs_modulus * s.width * s.thickness.powi(3));
    }
    Ok(m.meander_count as f64 / compliance)
}

pub fn pull_in_voltage(p: &PlateSpec, k: f64) -> Result<f64> {
    p.check()?;
    check_stiffness(k)?;
    Ok((8.0 * k * p.gap.powi(3) / (27.0 * EPS0 * p.area)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct OperatingPoint {
    pub bias: f64,
    pub displacement: f64,
    pub capacitance: f64,
    pub pulled_in: bool,
}

/// Static equilibrium at `bias` volts.
///
/// Below pull-in the stable root lies in `[0, g0/3)` and is found by
/// bisection; at or above pull-in the plate rests on the dielectric.
pub fn equilibrium(p: &PlateSpec, k: f64, bias: f64) -> Result<OperatingPoint> {
    let v_pi = pull_in_voltage(p, k)?;
    let v = bias.abs();
    if !v.is_finite() {
        return Err(Error::InvalidInput(format!("bias {bias} V")));
    }
    if v >= v_pi {
        return Ok(OperatingPoint {
            bias,
            displacement: p.gap,
            capacitance: p.down_capacitance(),
            pulled_in: true,
        });
    }
    let g0 = p.gap;
    let load = 0.5 * EPS0 * p.area * v * v;
    // k x (g0 - x)^2 - load rises monotonically on [0, g0/3]
    let h = |x: f64| k * x * (g0 - x) * (g0 - x) - load;
    let (mut lo, mut hi) = (0.0, g0 / 3.0);
    if load > 0.0 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if h(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * g0 {
                break;
            }
        }
    } else {
        hi = 0.0;
    }
    let x = if load > 0.0 { 0.5 * (lo + hi) } else { hi };
    Ok(OperatingPoint {
        bias,
        displacement: x,
        capacitance: EPS0 * p.area / (g0 - x),
        pulled_in: false,
    })
}

/// Quasi-static C-V curve.
pub fn cv_sweep(p: &PlateSpec, k: f64, biases: &[f64]) -> Result<Vec<OperatingPoint>> {
    biases.iter().map(|&v| equilibrium(p, k, v)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Topology {
    /// Varactor in the signal path.
    #[default]
    Series,
    /// Varactor from signal to ground.
    Shunt,
}

/// Varactor branch `G + jwC` as a two-port.
pub fn varactor_two_port(
    op: &OperatingPoint,
    loss_conductance: f64,
    grid: &FrequencyGrid,
    z_ref: f64,
    topology: Topology,
) -> Result<TwoPortNetwork> {
    if !(loss_conductance >= 0.0) {
        return Err(Error::InvalidInput(format!("loss conductance {loss_conductance} S")));
    }
    TwoPortNetwork::from_abcd(grid.clone(), z_ref, |f| {
        let y = C64::new(loss_conductance, 2.0 * PI * f * op.capacitance);
        Ok(match topology {
            Topology::Series => Element::Series(y.inv()),
            Topology::Shunt => Element::Shunt(y),
        }
        .abcd())
    })
}

fn check_stiffness(k: f64) -> Result<()> {
    if k > 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("stiffness must be positive, got {k}")))
    }
}
