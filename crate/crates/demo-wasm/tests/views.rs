use thrift_demo::{depth_table, error_curves, landscape_view, DemoError};

#[test]
fn curves_decrease_with_steps() {
    let set = error_curves(40, 0.125, 4.0, "trotter2,thrift2", 64).unwrap();
    assert_eq!(set.engine, "flo");
    assert_eq!(set.curves.len(), 2);
    for c in &set.curves {
        assert_eq!(c.steps, vec![1, 2, 4, 8, 16, 32, 64]);
        assert!(c.error.last().unwrap() < &c.error[2]);
    }
}

#[test]
fn curve_inputs_validated() {
    assert!(matches!(error_curves(1, 0.1, 1.0, "trotter2", 4), Err(DemoError::Input(_))));
    assert!(matches!(error_curves(8, 0.1, 0.0, "trotter2", 4), Err(DemoError::Input(_))));
    assert!(matches!(error_curves(8, 0.1, 1.0, "trotter9", 4), Err(DemoError::Input(_))));
    assert!(matches!(error_curves(8, 0.1, 1.0, " , ", 4), Err(DemoError::Input(_))));
}

#[test]
fn landscape_has_one_winner_per_cell() {
    let view = landscape_view(4, 31, "trotter1,trotter2,thrift1,thrift2,magnus_thrift2", 3).unwrap();
    assert_eq!(view.cells.len(), 9);
    assert!(view.cells.iter().all(|c| c.best.is_some() && c.error.unwrap() >= 0.0));
    let empty = landscape_view(4, 0, "trotter1", 2).unwrap();
    assert!(empty.cells.iter().all(|c| c.best.is_none()));
    assert!(!empty.warnings.is_empty());
    assert!(landscape_view(12, 31, "trotter1", 3).is_err());
}

#[test]
fn depth_table_for_chain() {
    let rows = depth_table("tfim_1d", 31).unwrap();
    let trotter1 = rows.iter().find(|r| r.formula == "trotter1").unwrap();
    assert_eq!((trotter1.two_qubit.as_str(), trotter1.steps), ("2N", 15));
    assert!(depth_table("ising", 31).is_err());
}
