//! Package geometry: coplanar line, substrate stack, packaging degrees of
//! freedom, via placement and design-rule validation.
//!
//! Lengths are in micrometres, resistivities in ohm cm.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::{Error, Result};

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

/// Coplanar waveguide cross-section and length.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct CpwGeometry {
    #[cfg_attr(feature = "serde", serde(alias = "x_line"))]
    pub length: f64,
    pub signal_width: f64,
    pub ground_width: f64,
    pub gap: f64,
    #[cfg_attr(feature = "serde", serde(alias = "z_line"))]
    pub metal_thickness: f64,
}

impl CpwGeometry {
    /// Total lateral footprint `w + 2g + 2Wg`.
    pub fn total_width(&self) -> f64 {
        self.signal_width + 2.0 * self.gap + 2.0 * self.ground_width
    }

    pub fn check(&self) -> Result<()> {
        positive("length", self.length)?;
        positive("signal_width", self.signal_width)?;
        positive("ground_width", self.ground_width)?;
        positive("gap", self.gap)?;
        positive("metal_thickness", self.metal_thickness)
    }
}

/// Device substrate and bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct SubstrateStack {
    pub x_box: f64,
    pub y_box: f64,
    #[cfg_attr(feature = "serde", serde(alias = "z_si"))]
    pub substrate_thickness: f64,
    #[cfg_attr(feature = "serde", serde(alias = "z_ox"))]
    pub oxide_thickness: f64,
    pub relative_permittivity: f64,
    pub resistivity: f64,
}

impl SubstrateStack {
    pub fn check(&self) -> Result<()> {
        positive("x_box", self.x_box)?;
        positive("y_box", self.y_box)?;
        positive("substrate_thickness", self.substrate_thickness)?;
        positive("oxide_thickness", self.oxide_thickness)?;
        positive("resistivity", self.resistivity)?;
        if !(self.relative_permittivity >= 1.0) || !self.relative_permittivity.is_finite() {
            return Err(Error::InvalidInput(format!(
                "relative_permittivity must be >= 1, got {}",
                self.relative_permittivity
            )));
        }
        Ok(())
    }
}

/// The packaging degrees of freedom that are swept.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct PackageDoF {
    pub via_diameter: f64,
    #[cfg_attr(feature = "serde", serde(alias = "y_offset"))]
    pub gsg_lateral_distance: f64,
    #[cfg_attr(feature = "serde", serde(alias = "x_offset"))]
    pub via_edge_inset: f64,
    pub cap_thickness: f64,
    pub recess_depth: f64,
    #[cfg_attr(feature = "serde", serde(alias = "z_bump"))]
    pub bump_height: f64,
    pub via_oxide_thickness: f64,
    /// Cap silicon resistivity, ohm cm.
    pub cap_resistivity: f64,
}

impl PackageDoF {
    /// Via barrel length through the thinned cap.
    pub fn via_length(&self) -> f64 {
        self.cap_thickness - self.recess_depth
    }

    /// Distance from the cap underside to the line metal.
    pub fn clearance(&self) -> f64 {
        self.bump_height + self.recess_depth
    }

    pub fn check(&self) -> Result<()> {
        positive("via_diameter", self.via_diameter)?;
        positive("gsg_lateral_distance", self.gsg_lateral_distance)?;
        positive("via_edge_inset", self.via_edge_inset)?;
        positive("cap_thickness", self.cap_thickness)?;
        non_negative("recess_depth", self.recess_depth)?;
        positive("bump_height", self.bump_height)?;
        positive("via_oxide_thickness", self.via_oxide_thickness)?;
        positive("cap_resistivity", self.cap_resistivity)
    }

    pub fn get(&self, dof: Dof) -> f64 {
        match dof {
            Dof::ViaDiameter => self.via_diameter,
            Dof::GsgLateralDistance => self.gsg_lateral_distance,
            Dof::ViaEdgeInset => self.via_edge_inset,
            Dof::CapThickness => self.cap_thickness,
            Dof::RecessDepth => self.recess_depth,
            Dof::BumpHeight => self.bump_height,
            Dof::ViaOxideThickness => self.via_oxide_thickness,
            Dof::CapResistivity => self.cap_resistivity,
        }
    }

    pub fn with(mut self, dof: Dof, value: f64) -> Self {
        let slot = match dof {
            Dof::ViaDiameter => &mut self.via_diameter,
            Dof::GsgLateralDistance => &mut self.gsg_lateral_distance,
            Dof::ViaEdgeInset => &mut self.via_edge_inset,
            Dof::CapThickness => &mut self.cap_thickness,
            Dof::RecessDepth => &mut self.recess_depth,
            Dof::BumpHeight => &mut self.bump_height,
            Dof::ViaOxideThickness => &mut self.via_oxide_thickness,
            Dof::CapResistivity => &mut self.cap_resistivity,
        };
        *slot = value;
        self
    }
}

/// Names of the [`PackageDoF`] fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "String", into = "String"))]
pub enum Dof {
    ViaDiameter,
    GsgLateralDistance,
    ViaEdgeInset,
    CapThickness,
    RecessDepth,
    BumpHeight,
    ViaOxideThickness,
    CapResistivity,
}

impl Dof {
    pub const ALL: [Dof; 8] = [
        Dof::ViaDiameter,
        Dof::GsgLateralDistance,
        Dof::ViaEdgeInset,
        Dof::CapThickness,
        Dof::RecessDepth,
        Dof::BumpHeight,
        Dof::ViaOxideThickness,
        Dof::CapResistivity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Dof::ViaDiameter => "via_diameter",
            Dof::GsgLateralDistance => "gsg_lateral_distance",
            Dof::ViaEdgeInset => "via_edge_inset",
            Dof::CapThickness => "cap_thickness",
            Dof::RecessDepth => "recess_depth",
            Dof::BumpHeight => "bump_height",
            Dof::ViaOxideThickness => "via_oxide_thickness",
            Dof::CapResistivity => "cap_resistivity",
        }
    }
}

impl fmt::Display for Dof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Dof {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let alias = match s {
            "y_offset" => Some(Dof::GsgLateralDistance),
            "x_offset" => Some(Dof::ViaEdgeInset),
            "z_bump" => Some(Dof::BumpHeight),
            _ => None,
        };
        alias
            .or_else(|| Dof::ALL.iter().copied().find(|d| d.name() == s))
            .ok_or_else(|| Error::UnknownDof(s.into()))
    }
}

impl TryFrom<String> for Dof {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Dof> for String {
    fn from(d: Dof) -> String {
        d.name().into()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Corner {
    TopLeft,
    TopRight,
    BottomLeft,
    BottomRight,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineEnd {
    Left,
    Right,
}

/// Center of the corner ground via.
///
/// The top-right via sits at `(x_box/2 + x_line/2 - x_offset, y_box/2 + y_offset)`
/// on the cap top surface; the other corners are mirror images.
pub fn via_center(
    corner: Corner,
    cpw: &CpwGeometry,
    stack: &SubstrateStack,
    dof: &PackageDoF,
) -> Result<Point3> {
    cpw.check()?;
    stack.check()?;
    dof.check()?;
    let dx = 0.5 * cpw.length - dof.via_edge_inset;
    let dy = dof.gsg_lateral_distance;
    let (sx, sy) = match corner {
        Corner::TopRight => (1.0, 1.0),
        Corner::TopLeft => (-1.0, 1.0),
        Corner::BottomRight => (1.0, -1.0),
        Corner::BottomLeft => (-1.0, -1.0),
    };
    let p = Point3 {
        x: 0.5 * stack.x_box + sx * dx,
        y: 0.5 * stack.y_box + sy * dy,
        z: stack.substrate_thickness + dof.clearance() + dof.via_length(),
    };
    if !(0.0..=stack.x_box).contains(&p.x) || !(0.0..=stack.y_box).contains(&p.y) {
        return Err(Error::InvalidGeometry(format!(
            "{corner:?} via center ({}, {}) lies outside the {} x {} box",
            p.x, p.y, stack.x_box, stack.y_box
        )));
    }
    Ok(p)
}

/// Ground, signal, ground via centers at one end of the line, ordered by
/// increasing `y`.
pub fn gsg_triple(
    end: LineEnd,
    cpw: &CpwGeometry,
    stack: &SubstrateStack,
    dof: &PackageDoF,
) -> Result<[Point3; 3]> {
    let (top, bottom) = match end {
        LineEnd::Left => (Corner::TopLeft, Corner::BottomLeft),
        LineEnd::Right => (Corner::TopRight, Corner::BottomRight),
    };
    let t = via_center(top, cpw, stack, dof)?;
    let b = via_center(bottom, cpw, stack, dof)?;
    let r = 0.5 * dof.via_diameter;
    if t.y + r > stack.y_box || b.y - r < 0.0 {
        return Err(Error::InvalidGeometry(format!(
            "ground vias of diameter {} at y_offset {} overflow y_box {}",
            dof.via_diameter, dof.gsg_lateral_distance, stack.y_box
        )));
    }
    let s = Point3 {
        y: 0.5 * stack.y_box,
        ..t
    };
    Ok([b, s, t])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Warning => "warning",
            Severity::Error => "error",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Finding {
    pub severity: Severity,
    pub code: &'static str,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn has_errors(&self) -> bool {
        self.findings.iter().any(|f| f.severity == Severity::Error)
    }

    pub fn errors(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.severity == Severity::Warning)
    }

    fn push(&mut self, severity: Severity, code: &'static str, message: String) {
        self.findings.push(Finding {
            severity,
            code,
            message,
        });
    }
}

/// Design-guidance bands. Values outside them are legal but draw a warning.
pub mod guidance {
    pub const CAP_THICKNESS: (f64, f64) = (250.0, 300.0);
    pub const MIN_VIA_DIAMETER: f64 = 60.0;
    pub const MIN_GSG_DISTANCE: f64 = 250.0;
    pub const MIN_BUMP_HEIGHT: f64 = 20.0;
    pub const RECESS_DEPTH: (f64, f64) = (75.0, 125.0);
    pub const MIN_CAP_RESISTIVITY: f64 = 1000.0;
}

/// Check a configuration against hard design rules and guidance bands.
pub fn validate(cpw: &CpwGeometry, stack: &SubstrateStack, dof: &PackageDoF) -> ValidationReport {
    use Severity::{Error as E, Warning as W};
    let mut r = ValidationReport::default();

    for res in [cpw.check(), stack.check(), dof.check()] {
        if let Err(e) = res {
            r.push(E, "field-out-of-range", format!("{e}"));
        }
    }
    if r.has_errors() {
        return r;
    }

    if dof.via_diameter > cpw.signal_width {
        r.push(
            E,
            "via-wider-than-signal",
            format!(
                "via_diameter {} exceeds signal_width {}",
                dof.via_diameter, cpw.signal_width
            ),
        );
    }
    if dof.recess_depth >= dof.cap_thickness {
        r.push(
            E,
            "recess-through-cap",
            format!(
                "recess_depth {} must be below cap_thickness {}",
                dof.recess_depth, dof.cap_thickness
            ),
        );
    }
    if dof.via_diameter >= dof.gsg_lateral_distance {
        r.push(
            E,
            "vias-overlap",
            format!(
                "via_diameter {} leaves no gap at gsg_lateral_distance {}",
                dof.via_diameter, dof.gsg_lateral_distance
            ),
        );
    }
    if cpw.total_width() > stack.y_box {
        r.push(
            E,
            "line-wider-than-box",
            format!("line width {} exceeds y_box {}", cpw.total_width(), stack.y_box),
        );
    }
    if cpw.length > stack.x_box {
        r.push(
            E,
            "line-longer-than-box",
            format!("line length {} exceeds x_box {}", cpw.length, stack.x_box),
        );
    }
    if 2.0 * dof.via_edge_inset > cpw.length {
        r.push(
            E,
            "via-inset-past-center",
            format!(
                "via_edge_inset {} is more than half the line length {}",
                dof.via_edge_inset, cpw.length
            ),
        );
    }
    for end in [LineEnd::Left, LineEnd::Right] {
        if let Err(e) = gsg_triple(end, cpw, stack, dof) {
            r.push(E, "via-outside-box", format!("{e}"));
            break;
        }
    }

    let (lo, hi) = guidance::CAP_THICKNESS;
    if dof.cap_thickness < lo || dof.cap_thickness > hi {
        r.push(
            W,
            "cap-thickness",
            format!("cap_thickness {} outside the preferred {lo}-{hi} um", dof.cap_thickness),
        );
    }
    if dof.via_diameter < guidance::MIN_VIA_DIAMETER {
        r.push(
            W,
            "via-diameter",
            format!(
                "via_diameter {} below the preferred minimum of {} um",
                dof.via_diameter,
                guidance::MIN_VIA_DIAMETER
            ),
        );
    }
    if dof.gsg_lateral_distance < guidance::MIN_GSG_DISTANCE {
        r.push(
            W,
            "gsg-distance",
            format!(
                "gsg_lateral_distance {} below the preferred minimum of {} um",
                dof.gsg_lateral_distance,
                guidance::MIN_GSG_DISTANCE
            ),
        );
    }
    if dof.bump_height < guidance::MIN_BUMP_HEIGHT {
        r.push(
            W,
            "bump-height",
            format!(
                "bump_height {} below the preferred minimum of {} um",
                dof.bump_height,
                guidance::MIN_BUMP_HEIGHT
            ),
        );
    }
    let (lo, hi) = guidance::RECESS_DEPTH;
    if dof.recess_depth < lo || dof.recess_depth > hi {
        r.push(
            W,
            "recess-depth",
            format!("recess_depth {} outside the preferred {lo}-{hi} um", dof.recess_depth),
        );
    }
    if dof.cap_resistivity < guidance::MIN_CAP_RESISTIVITY {
        r.push(
            W,
            "cap-resistivity",
            format!(
                "cap_resistivity {} ohm cm is below the high-resistivity range",
                dof.cap_resistivity
            ),
        );
    }
    r
}

/// Named parameter sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Line used to compare against measurement.
    CpwValidation,
    /// Line used for the packaging sweeps.
    CpwSweep,
    /// Short stub and via block feeding a varactor.
    VaractorVia,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::CpwValidation, Preset::CpwSweep, Preset::VaractorVia];

    pub fn name(self) -> &'static str {
        match self {
            Preset::CpwValidation => "cpw_validation",
            Preset::CpwSweep => "cpw_sweep",
            Preset::VaractorVia => "varactor_via",
        }
    }

    pub fn cpw(self) -> CpwGeometry {
        match self {
            Preset::CpwValidation => CpwGeometry {
                length: 1350.0,
                signal_width: 116.0,
                ground_width: 300.0,
                gap: 65.0,
                metal_thickness: 5.0,
            },
            Preset::CpwSweep => CpwGeometry {
                length: 1500.0,
                signal_width: 100.0,
                ground_width: 300.0,
                gap: 50.0,
                metal_thickness: 5.0,
            },
            Preset::VaractorVia => CpwGeometry {
                length: 100.0,
                signal_width: 100.0,
                ground_width: 300.0,
                gap: 50.0,
                metal_thickness: 5.0,
            },
        }
    }

    pub fn stack(self) -> SubstrateStack {
        SubstrateStack {
            x_box: 2000.0,
            y_box: 1000.0,
            substrate_thickness: 525.0,
            oxide_thickness: 1.0,
            relative_permittivity: 11.9,
            resistivity: 4000.0,
        }
    }

    pub fn dof(self) -> PackageDoF {
        let base = PackageDoF {
            via_diameter: 70.0,
            gsg_lateral_distance: 300.0,
            via_edge_inset: 70.0,
            cap_thickness: 280.0,
            recess_depth: 100.0,
            bump_height: 25.0,
            via_oxide_thickness: 1.0,
            cap_resistivity: 2000.0,
        };
        match self {
            Preset::CpwSweep => base,
            Preset::CpwValidation => PackageDoF {
                via_diameter: 50.0,
                via_edge_inset: 50.0,
                ..base
            },
            Preset::VaractorVia => PackageDoF {
                cap_thickness: 350.0,
                via_edge_inset: 35.0,
                ..base
            },
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .iter()
            .copied()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::UnknownPreset(s.into()))
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{name} must be positive and finite, got {v}")))
    }
}

fn non_negative(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{name} must be non-negative and finite, got {v}")))
    }
}
