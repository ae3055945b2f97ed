use std::sync::Arc;

use proptest::prelude::*;

use sheafmod::genfix::oracle::oracle_is_frame;
use sheafmod::genfix::{
    etale_from_presheaf, map_from_nat_trans, oracle_verify, random_nat_trans, random_poset, random_presheaf,
    random_projection_matrix,
};
use sheafmod::hilbert::{check_axioms, inner_from_support, BasedHilbert};
use sheafmod::homs::{check_dagger_is_direct_image, BLocaleMap, ModuleHom};
use sheafmod::matrix::{canonical_iso, is_projection_matrix, matrix_from_module, module_from_matrix};
use sheafmod::{downset_frame, verify_frame};

fn config() -> ProptestConfig {
    ProptestConfig { cases: 24, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn downset_frames_satisfy_frame_laws(seed in any::<u64>(), n in 0usize..=6) {
        let p = random_poset(seed, n).unwrap();
        let f = downset_frame(&p).unwrap();
        prop_assert!(verify_frame(f.lattice()).passed());
        prop_assert!(oracle_is_frame(f.lattice()));
    }

    #[test]
    fn heyting_implication_is_right_adjoint_to_meet(seed in any::<u64>(), n in 1usize..=5) {
        let f = downset_frame(&random_poset(seed, n).unwrap()).unwrap();
        let l = f.lattice();
        for x in l.elements() {
            for y in l.elements() {
                let h = l.heyting(y, x);
                for z in l.elements() {
                    prop_assert_eq!(l.leq(l.meet(z, y), x), l.leq(z, h));
                }
            }
        }
    }

    #[test]
    fn generators_are_deterministic(seed in any::<u64>(), n in 1usize..=5) {
        let p = random_poset(seed, n).unwrap();
        prop_assert_eq!(&p, &random_poset(seed, n).unwrap());
        let a = random_presheaf(seed, &p, 3);
        let b = random_presheaf(seed, &p, 3);
        prop_assert_eq!(a.fibers(), b.fibers());
        prop_assert!(a.functoriality().passed());
    }

    #[test]
    fn presheaves_give_etale_locales(seed in any::<u64>(), n in 1usize..=4) {
        let p = random_poset(seed, n).unwrap();
        let base = Arc::new(downset_frame(&p).unwrap());
        let f = random_presheaf(seed.rotate_left(7), &p, 2);
        prop_assume!(f.elements_count() <= 8);
        let inst = etale_from_presheaf(base, &f, 8).unwrap();
        prop_assert!(inst.locale.is_open());
        prop_assert!(inst.locale.is_etale().unwrap());
        let sections = inst.locale.local_sections().unwrap();
        for e in 0..inst.elements.len() {
            prop_assert!(sections.contains(&inst.principal(e)));
        }
        prop_assert!(oracle_verify(inst.locale.module()).clean());
        let h = inner_from_support(&inst.locale).unwrap();
        prop_assert!(check_axioms(h.module(), h.inner()).passed());
    }

    #[test]
    fn generated_matrices_are_projections(seed in any::<u64>(), n in 1usize..=3, k in 0usize..=3) {
        let p = random_poset(seed, n).unwrap();
        if let Ok(m) = random_projection_matrix(seed, &p, k, 2, 8) {
            prop_assert!(is_projection_matrix(m.matrix()).passed());
            let again = random_projection_matrix(seed, &p, k, 2, 8).unwrap();
            prop_assert_eq!(m.matrix().entries(), again.matrix().entries());
            prop_assert!(!module_from_matrix(&m).unwrap().is_empty());
        }
    }

    #[test]
    fn gram_matrix_round_trips(seed in any::<u64>(), n in 1usize..=3) {
        let p = random_poset(seed, n).unwrap();
        let base = Arc::new(downset_frame(&p).unwrap());
        let f = random_presheaf(seed ^ 1, &p, 2);
        prop_assume!(f.elements_count() <= 6);
        let inst = etale_from_presheaf(base, &f, 6).unwrap();
        let b = BasedHilbert::from_etale_irreducible(&inst.locale).unwrap();
        let m = matrix_from_module(&b).unwrap();
        let mm = module_from_matrix(&m).unwrap();
        prop_assert_eq!(mm.len(), inst.locale.len());
        prop_assert!(canonical_iso(&b, &mm).unwrap().report.passed());
    }

    #[test]
    fn natural_maps_have_direct_image_adjoint(seed in any::<u64>(), n in 1usize..=3) {
        let p = random_poset(seed, n).unwrap();
        let base = Arc::new(downset_frame(&p).unwrap());
        let (f, g) = (random_presheaf(seed ^ 2, &p, 2), random_presheaf(seed ^ 3, &p, 2));
        prop_assume!(f.elements_count() <= 6 && g.elements_count() <= 6);
        let x = etale_from_presheaf(base.clone(), &f, 6).unwrap();
        let y = etale_from_presheaf(base, &g, 6).unwrap();
        if let Some(eta) = random_nat_trans(seed, &f, &g, 50) {
            let map = map_from_nat_trans(&x, &y, &eta).unwrap();
            prop_assert!(map.over_base().holds);
            prop_assert!(map.adjunction().passed());
            prop_assert!(map.frobenius().holds);
            prop_assert!(check_dagger_is_direct_image(&map).unwrap().passed());
        }
        let id = BLocaleMap::identity(x.locale.clone());
        let hom = ModuleHom::identity(x.locale.module_arc().clone());
        prop_assert_eq!(id.direct_table().to_vec(), hom.table());
    }
}
