use wlpkit_core::geometry::*;
use wlpkit_core::sweep::*;
use wlpkit_core::{Error, Result};

fn sweep() -> (CpwGeometry, SubstrateStack, PackageDoF) {
    let p = Preset::CpwSweep;
    (p.cpw(), p.stack(), p.dof())
}

/// Flips the sign of every merit.
struct Inverted;

impl Objective for Inverted {
    fn evaluate(&self, c: &CpwGeometry, s: &SubstrateStack, d: &PackageDoF, f: f64) -> Result<Merit> {
        let m = CappedLine.evaluate(c, s, d, f)?;
        Ok(Merit { s21_db: -m.s21_db, s11_db: -m.s11_db })
    }
}

/// Merit equal to the via diameter, for checking layout.
struct Echo;

impl Objective for Echo {
    fn evaluate(&self, _: &CpwGeometry, _: &SubstrateStack, d: &PackageDoF, _: f64) -> Result<Merit> {
        Ok(Merit { s21_db: d.via_diameter, s11_db: d.gsg_lateral_distance })
    }
}

#[test]
fn row_major_layout() {
    let (c, s, d) = sweep();
    let axes = [
        SweepAxis::new(Dof::GsgLateralDistance, 200.0, 300.0, 3),
        SweepAxis::new(Dof::ViaDiameter, 20.0, 60.0, 5),
    ];
    let t = SweepPlan::new(&c, &s, &d, &axes, 5e9).unwrap().run(&Echo).unwrap();
    assert_eq!(t.cells.len(), 15);
    assert_eq!(t.cells[0].coords, vec![200.0, 20.0]);
    assert_eq!(t.cells[1].coords, vec![200.0, 30.0]);
    assert_eq!(t.cells[5].coords, vec![250.0, 20.0]);
    for cell in &t.cells {
        let m = cell.merit().unwrap();
        assert_eq!(vec![m.s11_db, m.s21_db], cell.coords);
    }
}

#[test]
fn invalid_cells_are_skipped() {
    let (c, s, d) = sweep();
    let axes = [SweepAxis::new(Dof::RecessDepth, 100.0, 300.0, 3)];
    let t = SweepPlan::new(&c, &s, &d, &axes, 5e9).unwrap().run(&Echo).unwrap();
    assert!(t.cells[0].merit().is_some());
    assert!(matches!(&t.cells[2].outcome, CellOutcome::Skipped(code) if code.contains("recess-through-cap")));
    let all_bad = [SweepAxis::new(Dof::RecessDepth, 290.0, 300.0, 2)];
    let r = SweepPlan::new(&c, &s, &d, &all_bad, 5e9).unwrap().run(&Echo);
    assert_eq!(r.unwrap_err(), Error::AllCellsInvalid);
}

#[test]
fn argmax_first_wins_ties() {
    let (c, s, d) = sweep();
    let axes = [SweepAxis::new(Dof::GsgLateralDistance, 200.0, 300.0, 3), SweepAxis::new(Dof::ViaDiameter, 40.0, 40.0, 1)];
    let t = SweepPlan::new(&c, &s, &d, &axes, 5e9).unwrap().run(&Echo).unwrap();
    assert_eq!(argmax(&t, Metric::S21Db).unwrap().coords, vec![200.0, 40.0]);
    assert_eq!(argmax(&t, Metric::S11Db).unwrap().coords, vec![300.0, 40.0]);
}

#[test]
fn sequential_equals_plan() {
    let (c, s, d) = sweep();
    let axes = [SweepAxis::new(Dof::ViaDiameter, 5.0, 95.0, 4)];
    let a = grid_sweep(&c, &s, &d, &axes, 5e9).unwrap();
    let plan = SweepPlan::new(&c, &s, &d, &axes, 5e9).unwrap();
    let cells: Vec<_> = (0..plan.len()).rev().map(|i| plan.cell(i, &CappedLine).unwrap()).rev().collect();
    assert_eq!(plan.collect(cells).unwrap(), a);
}

#[test]
fn trend_directions() {
    let (c, s, d) = sweep();
    let r = trend_signs(&c, &s, &d, &TREND_DOFS, 5, 5e9).unwrap();
    for e in &r.entries {
        assert!(e.matches(), "{}: expected {} observed {}", e.dof, e.expected, e.observed);
    }
}

#[test]
fn inverted_surrogate_fails_trends() {
    let (c, s, d) = sweep();
    let r = trend_signs_with(&c, &s, &d, &TREND_DOFS, 5, 5e9, &Inverted).unwrap();
    assert!(r.entries.iter().all(|e| !e.matches()));
    assert!(!r.all_match());
}

#[test]
fn trend_argument_errors() {
    let (c, s, d) = sweep();
    assert_eq!(trend_signs(&c, &s, &d, &TREND_DOFS, 2, 5e9).unwrap_err(), Error::TooFewPoints(2));
    assert!(matches!(
        trend_signs(&c, &s, &d, &[Dof::ViaOxideThickness], 5, 5e9),
        Err(Error::UnknownDof(_))
    ));
}

#[test]
fn duplicate_axis_rejected() {
    let (c, s, d) = sweep();
    let a = SweepAxis::new(Dof::ViaDiameter, 5.0, 95.0, 3);
    assert!(SweepPlan::new(&c, &s, &d, &[a, a], 5e9).is_err());
    assert!(SweepPlan::new(&c, &s, &d, &[], 5e9).is_err());
}
