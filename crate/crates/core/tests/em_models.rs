use num_complex::Complex64 as C64;
use proptest::prelude::*;
use wlpkit_core::consts::{C0, EPS0};
use wlpkit_core::em_models::*;
use wlpkit_core::geometry::*;
use wlpkit_core::network::{audit, cascade, FrequencyGrid, SMatrix};

fn sweep() -> (CpwGeometry, SubstrateStack, PackageDoF) {
    let p = Preset::CpwSweep;
    (p.cpw(), p.stack(), p.dof())
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn s_close(x: &SMatrix, y: &SMatrix, tol: f64) -> bool {
    [(x.s11, y.s11), (x.s12, y.s12), (x.s21, y.s21), (x.s22, y.s22)]
        .iter()
        .all(|(a, b)| (a - b).norm() <= tol)
}

#[test]
fn impedance_of_presets() {
    let (c, s, _) = sweep();
    let z = cpw_line_params(&c, &s, 1e9).unwrap().z0;
    assert!(rel(z, 47.47343142099962) < 1e-10, "{z}");
    let v = Preset::CpwValidation;
    let z = cpw_line_params(&v.cpw(), &v.stack(), 1e9).unwrap().z0;
    assert!(rel(z, 49.06071624248165) < 1e-10, "{z}");
}

#[test]
fn line_params_at_5ghz() {
    let (c, s, _) = sweep();
    let p = cpw_line_params(&c, &s, 5e9).unwrap();
    assert!(rel(p.r, 213.39965562004076) < 1e-9);
    assert!(rel(p.l, 4.021700993569261e-07) < 1e-9);
    assert!(rel(p.c, 1.7844670384549427e-10) < 1e-9);
    assert!(rel(p.g, 0.019542524033701398) < 1e-9);
    assert!(rel(p.alpha, 2.7113837654601354) < 1e-9);
}

#[test]
fn air_substrate() {
    let (c, s, _) = sweep();
    let s = SubstrateStack { relative_permittivity: 1.0, ..s };
    let p = cpw_line_params(&c, &s, 2e9).unwrap();
    assert_eq!(p.eps_eff, 1.0);
    assert!(rel(p.z0, 120.56756262031708) < 1e-10);
}

#[test]
fn via_parasitics_at_5ghz() {
    let (_, _, d) = sweep();
    let v = via_lumped(&d, d.via_length(), 5e9).unwrap();
    assert!(rel(v.series_resistance, 0.014905416081794852) < 1e-9);
    assert!(rel(v.series_inductance, 4.7907214918586713e-11) < 1e-9);
    assert!(rel(v.coupling_capacitance, 5.366476748985487e-14) < 1e-9);
    assert!(rel(v.substrate_loss_conductance, 2.649224443690786e-05) < 1e-9);
}

#[test]
fn via_dc_resistance() {
    let d = PackageDoF { via_diameter: 50.0, ..sweep().2 };
    let v = via_lumped(&d, 280.0, 0.0).unwrap();
    assert!((v.series_resistance - 2.40e-3).abs() < 0.01e-3);
}

#[test]
fn short_fat_via_inductance_clamped() {
    let d = PackageDoF { via_diameter: 90.0, ..sweep().2 };
    let v = via_lumped(&d, 30.0, 1e9).unwrap();
    assert_eq!(v.series_inductance, 0.0);
}

#[test]
fn touching_vias_are_degenerate() {
    let d = PackageDoF { via_diameter: 90.0, gsg_lateral_distance: 90.0, ..sweep().2 };
    assert!(via_lumped(&d, 180.0, 1e9).is_err());
}

#[test]
fn proximity_values() {
    let (c, _, d) = sweep();
    let p = proximity_loading(&d, &c).unwrap();
    assert!(rel(p.capacitance, 1.41664e-11) < 1e-12);
    assert!(rel(p.conductance, 0.006722689075630252) < 1e-12);
}

#[test]
fn proximity_scales_with_clearance() {
    let (c, _, d) = sweep();
    let near = proximity_loading(&PackageDoF { recess_depth: 0.0, ..d }, &c).unwrap();
    let far = proximity_loading(&d, &c).unwrap();
    assert!(rel(near.capacitance / far.capacitance, 5.0) < 1e-12);
}

#[test]
fn null_via_is_two_stubs() {
    let (c, s, _) = sweep();
    let stub = access_stub(&c);
    let g = FrequencyGrid::linear(0.5e9, 10e9, 20).unwrap();
    let block = via_block_with(&stub, &s, &g, |_| Ok(ViaParasitics::NULL)).unwrap();
    let one = bare_cpw_network(&stub, &s, &g).unwrap();
    let two = cascade(&one, &one).unwrap();
    for (a, b) in block.s().iter().zip(two.s()) {
        assert!(s_close(a, b, 1e-12));
    }
}

#[test]
fn capped_network_is_passive_and_reciprocal() {
    for p in Preset::ALL {
        let g = FrequencyGrid::linear(0.5e9, 20e9, 40).unwrap();
        let n = capped_cpw_network(&p.cpw(), &p.stack(), &p.dof(), &g).unwrap();
        let a = audit(&n);
        assert!(a.passive && a.reciprocal, "{p}: {a:?}");
    }
}

#[test]
fn bare_line_is_symmetric() {
    let (c, s, _) = sweep();
    let g = FrequencyGrid::linear(1e9, 10e9, 10).unwrap();
    let n = bare_cpw_network(&c, &s, &g).unwrap();
    for m in n.s() {
        assert!((m.s11 - m.s22).norm() < 1e-12);
        assert!((m.s12 - m.s21).norm() < 1e-12);
    }
}

#[test]
fn loaded_line_is_slower() {
    let (c, s, d) = sweep();
    let load = proximity_loading(&d, &c).unwrap();
    let bare = line_abcd(&c, &s, c.length, ProximityLoading::NONE, 5e9).unwrap();
    let loaded = line_abcd(&c, &s, c.length, load, 5e9).unwrap();
    assert!(loaded.c.norm() > bare.c.norm());
}

proptest! {
    #[test]
    fn telegrapher_consistency(w in 10.0f64..300.0, g in 5.0f64..200.0, er in 1.0f64..13.0, f in 1e8f64..4e10) {
        let c = CpwGeometry { length: 1000.0, signal_width: w, ground_width: 300.0, gap: g, metal_thickness: 3.0 };
        let s = SubstrateStack { relative_permittivity: er, ..Preset::CpwSweep.stack() };
        let p = cpw_line_params(&c, &s, f).unwrap();
        prop_assert!((p.l * p.c * C0 * C0 / p.eps_eff - 1.0).abs() < 1e-12);
        prop_assert!((p.l / p.c).sqrt() / p.z0 - 1.0 < 1e-12);
        prop_assert!(p.alpha >= 0.0 && p.r > 0.0 && p.g > 0.0);
    }

    #[test]
    fn impedance_falls_with_width(w in 10.0f64..300.0, g in 5.0f64..200.0) {
        let s = Preset::CpwSweep.stack();
        let c = CpwGeometry { length: 1000.0, signal_width: w, ground_width: 300.0, gap: g, metal_thickness: 3.0 };
        let wider = CpwGeometry { signal_width: w * 1.1, ..c };
        prop_assert!(cpw_line_params(&wider, &s, 1e9).unwrap().z0 < cpw_line_params(&c, &s, 1e9).unwrap().z0);
    }

    #[test]
    fn via_parasitics_non_negative(d in 5.0f64..95.0, y in 100.0f64..400.0, l in 20.0f64..400.0, f in 0.0f64..2e10) {
        let dof = PackageDoF { via_diameter: d, gsg_lateral_distance: y, ..Preset::CpwSweep.dof() };
        let v = via_lumped(&dof, l, f).unwrap();
        prop_assert!(v.series_resistance > 0.0);
        prop_assert!(v.series_inductance >= 0.0);
        prop_assert!(v.coupling_capacitance > 0.0);
        prop_assert!(v.substrate_loss_conductance > 0.0);
        // liner in series caps the coupling below the bare gap capacitance
        let bare = std::f64::consts::PI * EPS0 * 11.9 / (y / d).acosh() * 2.0 * l * 1e-6;
        prop_assert!(v.coupling_capacitance < bare);
    }

    #[test]
    fn via_block_passive(d in 5.0f64..95.0, y in 150.0f64..350.0, rc in 15.0f64..4000.0) {
        let p = Preset::CpwSweep;
        let dof = PackageDoF { via_diameter: d, gsg_lateral_distance: y, cap_resistivity: rc, ..p.dof() };
        let g = FrequencyGrid::linear(1e9, 20e9, 5).unwrap();
        let n = via_block_two_port(&dof, &p.stack(), &access_stub(&p.cpw()), &g).unwrap();
        let a = audit(&n);
        prop_assert!(a.passive && a.reciprocal);
        prop_assert!(n.s().iter().all(|m| m.s21.norm() <= 1.0 && m.s21 != C64::new(0.0, 0.0)));
    }
}
