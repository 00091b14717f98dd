//! Closed-form electromagnetic models: quasi-static coplanar line
//! parameters, lumped through-silicon via parasitics, cap proximity loading,
//! and the assembled capped and bare line networks.

use alloc::format;
use core::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::consts::{conductivity_from_ohm_cm, C0, EPS0, EPS_SI, EPS_SIO2, MU0, RHO_CU, UM};
use crate::elliptic::{complement, ellipk};
use crate::geometry::{CpwGeometry, PackageDoF, SubstrateStack};
use crate::network::{AbcdMatrix, Element, FrequencyGrid, TwoPortNetwork, DEFAULT_Z_REF};
use crate::{Error, Result};

/// Per-unit-length line parameters at one frequency (SI units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineParams {
    pub z0: f64,
    pub eps_eff: f64,
    pub r: f64,
    pub l: f64,
    pub g: f64,
    pub c: f64,
    /// Attenuation, Np/m.
    pub alpha: f64,
}

impl LineParams {
    /// Series impedance and shunt admittance per metre.
    pub fn zy(&self, f: f64) -> (C64, C64) {
        let w = 2.0 * PI * f;
        (C64::new(self.r, w * self.l), C64::new(self.g, w * self.c))
    }
}

pub fn skin_depth(rho: f64, f: f64) -> f64 {
    (rho / (PI * f * MU0)).sqrt()
}

/// Quasi-static coplanar waveguide on a half-space substrate.
pub fn cpw_line_params(cpw: &CpwGeometry, stack: &SubstrateStack, f: f64) -> Result<LineParams> {
    cpw.check().map_err(degenerate)?;
    stack.check()?;
    positive_frequency(f)?;
    let (w, g, wg, t) = (
        cpw.signal_width * UM,
        cpw.gap * UM,
        cpw.ground_width * UM,
        cpw.metal_thickness * UM,
    );
    let k = w / (w + 2.0 * g);
    let (kk, kkp) = (ellipk(k), ellipk(complement(k)));
    let eps_eff = 0.5 * (stack.relative_permittivity + 1.0);
    let se = eps_eff.sqrt();
    let z0 = 30.0 * PI / se * kkp / kk;

    let delta = skin_depth(RHO_CU, f);
    let rs = RHO_CU / (delta * (1.0 - (-t / delta).exp()));
    let r = rs * (1.0 / w + 1.0 / (2.0 * wg));
    let l = z0 * se / C0;
    let c = se / (z0 * C0);
    let gs = conductivity_from_ohm_cm(stack.resistivity) * kk / kkp;

    let p = LineParams { z0, eps_eff, r, l, g: gs, c, alpha: 0.0 };
    let (zs, ys) = p.zy(f);
    Ok(LineParams { alpha: (zs * ys).sqrt().re, ..p })
}

/// Lumped parasitics of one signal via and its two ground returns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViaParasitics {
    /// Signal via resistance, ohm.
    pub series_resistance: f64,
    /// Signal via partial self-inductance, H.
    pub series_inductance: f64,
    /// Signal to both ground vias through liner and cap silicon, F.
    pub coupling_capacitance: f64,
    /// Signal to both ground vias through the cap bulk, S.
    pub substrate_loss_conductance: f64,
}

impl ViaParasitics {
    pub const NULL: ViaParasitics = ViaParasitics {
        series_resistance: 0.0,
        series_inductance: 0.0,
        coupling_capacitance: 0.0,
        substrate_loss_conductance: 0.0,
    };
}

/// Lumped R, L, C, G of a copper via of `via_length` micrometres.
///
/// Zero frequency gives the DC resistance.
pub fn via_lumped(dof: &PackageDoF, via_length: f64, f: f64) -> Result<ViaParasitics> {
    dof.check()?;
    if !(via_length > 0.0 && via_length.is_finite()) {
        return Err(Error::DegenerateGeometry(format!("via length {via_length} um")));
    }
    if !(f >= 0.0 && f.is_finite()) {
        return Err(Error::InvalidInput(format!("frequency {f} Hz")));
    }
    if dof.via_diameter >= dof.gsg_lateral_distance {
        return Err(Error::DegenerateGeometry(format!(
            "vias of diameter {} touch at pitch {}",
            dof.via_diameter, dof.gsg_lateral_distance
        )));
    }
    let d = dof.via_diameter * UM;
    let a = 0.5 * d;
    let l = via_length * UM;
    let s = dof.gsg_lateral_distance * UM;
    let tox = dof.via_oxide_thickness * UM;

    let r_dc = RHO_CU * l / (PI * a * a);
    let skin = if f > 0.0 { (d / (4.0 * skin_depth(RHO_CU, f))).max(1.0) } else { 1.0 };
    let ind = (MU0 * l / (2.0 * PI) * ((4.0 * l / d).ln() - 1.0)).max(0.0);

    let spread = (s / (2.0 * a)).acosh();
    let c_gap = PI * EPS0 * EPS_SI / spread;
    let c_ox = 2.0 * PI * EPS0 * EPS_SIO2 / ((a + tox) / a).ln();
    let c_pair = 1.0 / (1.0 / c_gap + 2.0 / c_ox);
    let sigma = conductivity_from_ohm_cm(dof.cap_resistivity);

    Ok(ViaParasitics {
        series_resistance: r_dc * skin,
        series_inductance: ind,
        coupling_capacitance: 2.0 * c_pair * l,
        substrate_loss_conductance: 2.0 * PI * sigma * l / spread,
    })
}

/// Extra shunt loading per metre from the cap hanging over the line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProximityLoading {
    /// F/m.
    pub capacitance: f64,
    /// S/m.
    pub conductance: f64,
}

impl ProximityLoading {
    pub const NONE: ProximityLoading = ProximityLoading { capacitance: 0.0, conductance: 0.0 };
}

/// Parallel-plate loading over the signal and gaps at the cap clearance.
pub fn proximity_loading(dof: &PackageDoF, cpw: &CpwGeometry) -> Result<ProximityLoading> {
    dof.check()?;
    cpw.check()?;
    let h = dof.clearance() * UM;
    let width = (cpw.signal_width + 2.0 * cpw.gap) * UM;
    let c = EPS0 * width / h;
    let sigma = conductivity_from_ohm_cm(dof.cap_resistivity);
    Ok(ProximityLoading { capacitance: c, conductance: c * sigma / (EPS0 * EPS_SI) })
}

/// Length of the access stub on either side of a via.
pub const VIA_STUB_LENGTH: f64 = 100.0;

/// Multiplier on via R and L: the signal via plus two ground vias in parallel.
pub const GROUND_RETURN_FACTOR: f64 = 1.5;

/// Chain matrix of a CPW section of `length` micrometres with extra loading.
pub fn line_abcd(
    cpw: &CpwGeometry,
    stack: &SubstrateStack,
    length: f64,
    loading: ProximityLoading,
    f: f64,
) -> Result<AbcdMatrix> {
    let p = cpw_line_params(cpw, stack, f)?;
    let (z, y) = p.zy(f);
    let y = y + C64::new(loading.conductance, 2.0 * PI * f * loading.capacitance);
    Ok(Element::Line { z0: (z / y).sqrt(), gamma: (z * y).sqrt(), length: length * UM }.abcd())
}

/// Chain matrix of the vertical via section.
///
/// The via barrel is treated as a short transmission section whose
/// characteristic impedance is held at `z_ref`; the lumped parasitics set
/// its electrical length and loss. A null via is the identity.
pub fn via_section_abcd(v: &ViaParasitics, z_ref: f64, f: f64) -> AbcdMatrix {
    let w = 2.0 * PI * f;
    let z = C64::new(
        GROUND_RETURN_FACTOR * v.series_resistance,
        w * GROUND_RETURN_FACTOR * v.series_inductance,
    );
    let y = C64::new(v.substrate_loss_conductance, w * v.coupling_capacitance);
    Element::Line { z0: C64::new(z_ref, 0.0), gamma: (z * y).sqrt(), length: 1.0 }.abcd()
}

/// Stub, via, stub with caller-supplied via parasitics.
pub fn via_block_with<F>(
    stub: &CpwGeometry,
    stack: &SubstrateStack,
    grid: &FrequencyGrid,
    mut parasitics: F,
) -> Result<TwoPortNetwork>
where
    F: FnMut(f64) -> Result<ViaParasitics>,
{
    TwoPortNetwork::from_abcd(grid.clone(), DEFAULT_Z_REF, |f| {
        let s = line_abcd(stub, stack, stub.length, ProximityLoading::NONE, f)?;
        let v = via_section_abcd(&parasitics(f)?, DEFAULT_Z_REF, f);
        Ok(s.then(&v).then(&s))
    })
}

/// Stub, via, stub at the 50 ohm reference.
pub fn via_block_two_port(
    dof: &PackageDoF,
    stack: &SubstrateStack,
    stub: &CpwGeometry,
    grid: &FrequencyGrid,
) -> Result<TwoPortNetwork> {
    let len = dof.via_length();
    via_block_with(stub, stack, grid, |f| via_lumped(dof, len, f))
}

/// The access stub used by [`capped_cpw_network`]: same cross-section as
/// the line, [`VIA_STUB_LENGTH`] long.
pub fn access_stub(cpw: &CpwGeometry) -> CpwGeometry {
    CpwGeometry { length: VIA_STUB_LENGTH, ..*cpw }
}

/// The bare line with no cap.
pub fn bare_cpw_network(
    cpw: &CpwGeometry,
    stack: &SubstrateStack,
    grid: &FrequencyGrid,
) -> Result<TwoPortNetwork> {
    TwoPortNetwork::from_abcd(grid.clone(), DEFAULT_Z_REF, |f| {
        line_abcd(cpw, stack, cpw.length, ProximityLoading::NONE, f)
    })
}

/// Via block in, cap-loaded line, via block out.
pub fn capped_cpw_network(
    cpw: &CpwGeometry,
    stack: &SubstrateStack,
    dof: &PackageDoF,
    grid: &FrequencyGrid,
) -> Result<TwoPortNetwork> {
    let stub = access_stub(cpw);
    let loading = proximity_loading(dof, cpw)?;
    let len = dof.via_length();
    if !(len > 0.0) {
        return Err(Error::DegenerateGeometry(format!(
            "recess_depth {} leaves no via through cap_thickness {}",
            dof.recess_depth, dof.cap_thickness
        )));
    }
    TwoPortNetwork::from_abcd(grid.clone(), DEFAULT_Z_REF, |f| {
        let s = line_abcd(&stub, stack, stub.length, ProximityLoading::NONE, f)?;
        let v = via_section_abcd(&via_lumped(dof, len, f)?, DEFAULT_Z_REF, f);
        let block = s.then(&v).then(&s);
        let line = line_abcd(cpw, stack, cpw.length, loading, f)?;
        Ok(block.then(&line).then(&block))
    })
}

fn degenerate(e: Error) -> Error {
    match e {
        Error::InvalidInput(m) => Error::DegenerateGeometry(m),
        other => other,
    }
}

fn positive_frequency(f: f64) -> Result<()> {
    if f > 0.0 && f.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("frequency must be positive, got {f}")))
    }
}
