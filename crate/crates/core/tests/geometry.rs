use proptest::prelude::*;
use wlpkit_core::geometry::*;
use wlpkit_core::Error;

fn sweep() -> (CpwGeometry, SubstrateStack, PackageDoF) {
    let p = Preset::CpwSweep;
    (p.cpw(), p.stack(), p.dof())
}

fn codes(r: &ValidationReport, s: Severity) -> Vec<&'static str> {
    r.findings.iter().filter(|f| f.severity == s).map(|f| f.code).collect()
}

#[test]
fn preset_lookup() {
    assert_eq!("cpw_sweep".parse::<Preset>().unwrap(), Preset::CpwSweep);
    assert_eq!(
        "cpw_sweeep".parse::<Preset>(),
        Err(Error::UnknownPreset("cpw_sweeep".into()))
    );
    let v = Preset::CpwValidation.cpw();
    assert_eq!((v.length, v.signal_width, v.gap), (1350.0, 116.0, 65.0));
    let s = Preset::CpwSweep.cpw();
    assert_eq!((s.length, s.signal_width, s.gap), (1500.0, 100.0, 50.0));
}

#[test]
fn gsg_triple_shares_x() {
    let (c, s, d) = sweep();
    for end in [LineEnd::Left, LineEnd::Right] {
        let t = gsg_triple(end, &c, &s, &d).unwrap();
        assert!(t.iter().all(|p| p.x == t[0].x));
        assert_eq!(t[1].y, 500.0);
        assert_eq!(t[2].y - t[1].y, d.gsg_lateral_distance);
        assert_eq!(t[1].y - t[0].y, d.gsg_lateral_distance);
    }
}

#[test]
fn triple_overflowing_box() {
    let (c, s, d) = sweep();
    let d = PackageDoF { gsg_lateral_distance: 480.0, via_diameter: 50.0, ..d };
    assert!(matches!(gsg_triple(LineEnd::Right, &c, &s, &d), Err(Error::InvalidGeometry(_))));
}

#[test]
fn inset_beyond_box() {
    let (c, s, d) = sweep();
    let s = SubstrateStack { x_box: 1500.0, ..s };
    let d = PackageDoF { via_edge_inset: -10.0, ..d };
    assert!(via_center(Corner::TopRight, &c, &s, &d).is_err());
}

#[test]
fn hard_rules() {
    let (c, s, d) = sweep();
    let cases: [(PackageDoF, &str); 3] = [
        (PackageDoF { via_diameter: 120.0, gsg_lateral_distance: 300.0, ..d }, "via-wider-than-signal"),
        (PackageDoF { recess_depth: 280.0, ..d }, "recess-through-cap"),
        (PackageDoF { via_diameter: 90.0, gsg_lateral_distance: 80.0, ..d }, "vias-overlap"),
    ];
    for (dof, code) in cases {
        let r = validate(&c, &s, &dof);
        assert!(codes(&r, Severity::Error).contains(&code), "{code}: {:?}", r.findings);
    }
    let wide = CpwGeometry { ground_width: 600.0, ..c };
    assert!(codes(&validate(&wide, &s, &d), Severity::Error).contains(&"line-wider-than-box"));
    let neg = PackageDoF { bump_height: -1.0, ..d };
    assert!(codes(&validate(&c, &s, &neg), Severity::Error).contains(&"field-out-of-range"));
}

#[test]
fn guidance_warnings() {
    let (c, s, d) = sweep();
    let d = PackageDoF {
        via_diameter: 20.0,
        gsg_lateral_distance: 200.0,
        bump_height: 5.0,
        recess_depth: 0.0,
        cap_resistivity: 15.0,
        cap_thickness: 400.0,
        ..d
    };
    let r = validate(&c, &s, &d);
    assert!(!r.has_errors(), "{:?}", r.findings);
    let w = codes(&r, Severity::Warning);
    for code in ["cap-thickness", "via-diameter", "gsg-distance", "bump-height", "recess-depth", "cap-resistivity"] {
        assert!(w.contains(&code), "missing {code}");
    }
}

#[test]
fn clean_preset_has_no_findings() {
    let (c, s, d) = sweep();
    assert!(validate(&c, &s, &d).findings.is_empty());
}

proptest! {
    #[test]
    fn corners_mirror(inset in 1.0f64..700.0, y in 60.0f64..400.0) {
        let (c, s, d) = sweep();
        let d = PackageDoF { via_edge_inset: inset, gsg_lateral_distance: y, ..d };
        let tr = via_center(Corner::TopRight, &c, &s, &d).unwrap();
        let tl = via_center(Corner::TopLeft, &c, &s, &d).unwrap();
        let br = via_center(Corner::BottomRight, &c, &s, &d).unwrap();
        let bl = via_center(Corner::BottomLeft, &c, &s, &d).unwrap();
        prop_assert!((tl.x - (s.x_box - tr.x)).abs() < 1e-9);
        prop_assert_eq!(tl.y, tr.y);
        prop_assert!((br.y - (s.y_box - tr.y)).abs() < 1e-9);
        prop_assert_eq!(br.x, tr.x);
        prop_assert_eq!((bl.x, bl.y), (tl.x, br.y));
    }

    #[test]
    fn centers_stay_in_box(inset in 0.1f64..750.0, y in 1.0f64..500.0) {
        let (c, s, d) = sweep();
        let d = PackageDoF { via_edge_inset: inset, gsg_lateral_distance: y, ..d };
        for corner in [Corner::TopLeft, Corner::TopRight, Corner::BottomLeft, Corner::BottomRight] {
            if let Ok(p) = via_center(corner, &c, &s, &d) {
                prop_assert!((0.0..=s.x_box).contains(&p.x) && (0.0..=s.y_box).contains(&p.y));
            }
        }
    }
}
