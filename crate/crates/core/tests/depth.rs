use thrift_core::bench::{depth_tables, table_budget};
use thrift_core::depth::{depth, steps_for_budget, DepthRegistry};
use thrift_core::formulas::FormulaKind;
use thrift_core::models::ModelKind;

const MODELS: [ModelKind; 4] = [ModelKind::Tfim1d, ModelKind::Tfim2d, ModelKind::Heisenberg1d, ModelKind::FermiHubbard1d];

#[test]
fn registered_depths() {
    assert_eq!(depth(ModelKind::Tfim1d, FormulaKind::Trotter4, 3).unwrap().two_qubit, 31);
    assert_eq!(depth(ModelKind::FermiHubbard1d, FormulaKind::Thrift1, 8).unwrap().two_qubit, 56);
    assert_eq!(depth(ModelKind::Heisenberg1d, FormulaKind::Trotter1, 1).unwrap().cnot, 6);
    let d = depth(ModelKind::Tfim1d, FormulaKind::Trotter2, 5).unwrap();
    assert_eq!((d.two_qubit, d.cnot), (11, 22));
    let d = depth(ModelKind::FermiHubbard1d, FormulaKind::Thrift2, 2).unwrap();
    assert_eq!((d.two_qubit, d.cnot), (19, 38));
    let d = depth(ModelKind::Tfim2d, FormulaKind::MagnusThrift2, 1).unwrap();
    assert_eq!((d.two_qubit, d.cnot), (105, 315));
}

#[test]
fn budget_conversion() {
    assert_eq!(steps_for_budget(ModelKind::Tfim1d, FormulaKind::Trotter1, 31).unwrap(), 15);
    assert_eq!(steps_for_budget(ModelKind::FermiHubbard1d, FormulaKind::OmelyanSmallA4, 61).unwrap(), 3);
    assert_eq!(steps_for_budget(ModelKind::FermiHubbard1d, FormulaKind::Thrift8Opt, 61).unwrap(), 0);
    let reg = DepthRegistry::bundled();
    for model in MODELS {
        for formula in reg.formulas_for(model) {
            assert_eq!(reg.steps_for_budget(model, formula, 0).unwrap(), 0);
        }
    }
}

#[test]
fn tables_replay_budgets() {
    let reg = DepthRegistry::bundled();
    let rows = depth_tables(&reg, None).unwrap();
    for model in MODELS {
        let budget = table_budget(model);
        let count = rows.iter().filter(|r| r.model == model).count();
        assert!(count >= 9, "{model:?}: {count} rows");
        for r in rows.iter().filter(|r| r.model == model) {
            let n = r.steps;
            if n > 0 {
                assert!(reg.depth(model, r.formula, n).unwrap().two_qubit <= budget);
            }
            assert!(reg.depth(model, r.formula, n + 1).unwrap().two_qubit > budget);
        }
    }
}

#[test]
fn depth_strictly_increasing() {
    let reg = DepthRegistry::bundled();
    for entry in reg.entries() {
        for n in 1..50 {
            let (a, b) = (reg.depth(entry.model, entry.formula, n).unwrap(), reg.depth(entry.model, entry.formula, n + 1).unwrap());
            assert!(b.two_qubit > a.two_qubit && b.cnot > a.cnot, "{:?} {:?}", entry.model, entry.formula);
        }
    }
}

#[test]
fn registry_errors() {
    assert!(DepthRegistry::parse("model,formula,a,b,c,d\ntfim_1d,trotter1,x,0,2,0\n").is_err());
    let reg = DepthRegistry::parse("model,formula,a,b,c,d\ntfim_1d,trotter1,1,0,2,0\n").unwrap();
    assert!(reg.depth(ModelKind::Tfim1d, FormulaKind::Thrift1, 2).is_err());
    assert!(reg.depth(ModelKind::Tfim1d, FormulaKind::Trotter1, 0).is_err());
}
