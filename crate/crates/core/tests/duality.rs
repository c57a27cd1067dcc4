use cohesive_core::functors::{pairing_defect, pairing_table, pairing_table_torus, twist_by_dualizing};
use cohesive_core::hom::hom_complex;
use cohesive_core::models::{
    lie_dualizing_data, nc_dualizing_data, nc_torus_dga, LieAlgebraData, NcTorusData,
};
use cohesive_core::{CohesiveModule, Flavor};
use num_rational::BigRational;
use std::collections::BTreeMap;
use std::sync::Arc;

#[test]
fn aff1_twisted_cohomology_is_complementary() {
    let l = LieAlgebraData::aff1();
    let d = lie_dualizing_data(&l);
    let o = Arc::new(CohesiveModule::rank_one("O", d.algebra().clone(), 0));
    let od = Arc::new(twist_by_dualizing(&d, &o).unwrap());
    assert_eq!(hom_complex(&o, &o).unwrap().cohomology_dims().unwrap(), BTreeMap::from([(0, 1), (1, 1), (2, 0)]));
    assert_eq!(hom_complex(&o, &od).unwrap().cohomology_dims().unwrap(), BTreeMap::from([(0, 0), (1, 1), (2, 1)]));
}

#[test]
fn ce_pairings_are_perfect() {
    for l in [LieAlgebraData::abelian(1), LieAlgebraData::aff1(), LieAlgebraData::sl2()] {
        let d = lie_dualizing_data(&l);
        let o = Arc::new(CohesiveModule::rank_one("O", d.algebra().clone(), 0));
        let t = pairing_table(&d, &o, &o).unwrap();
        assert!(t.perfect(), "{}: {:?}", l.name, t.blocks);
    }
}

#[test]
fn pairing_compatibility_on_basis() {
    for l in [LieAlgebraData::aff1(), LieAlgebraData::sl2()] {
        let d = lie_dualizing_data(&l);
        let o = Arc::new(CohesiveModule::rank_one("O", d.algebra().clone(), 0));
        let od = Arc::new(twist_by_dualizing(&d, &o).unwrap());
        let pef = hom_complex(&o, &o).unwrap();
        let pfs = hom_complex(&o, &od).unwrap();
        let g = d.dimension as i32;
        for k in pef.complex.degrees() {
            for phi in pef.basis(k) {
                for psi in pfs.basis(g - k - 1) {
                    let v = pairing_defect(&d, &phi, &psi).unwrap();
                    assert!(v.is_zero(), "{} k={k}: {v}", l.name);
                }
            }
        }
    }
}

#[test]
fn torus_pairing_is_perfect() {
    let t = NcTorusData::rank_two(BigRational::new(1.into(), 3.into()), true);
    let a = Arc::new(nc_torus_dga(&t, Flavor::Dolbeault, None).unwrap());
    let d = nc_dualizing_data(&a).unwrap();
    let o = Arc::new(CohesiveModule::rank_one("O", a, 0));
    let tab = pairing_table_torus(&d, &o, &o, 2).unwrap();
    assert!(tab.perfect(), "{:?}", tab.blocks);
}
