//! Named frames and modules used throughout the tests and the CLI.

use std::sync::Arc;

use crate::bmodule::{free_module, module_from_map, BLocale, BModule, FreeModule};
use crate::error::{Error, Result};
use crate::lattice::{downset_frame, m3_lattice, Frame, Lattice, Poset};

pub const FRAME_FIXTURES: [&str; 5] = ["B1", "B2", "C3", "BD", "M3"];
pub const MODULE_FIXTURES: [&str; 5] = ["FREE2", "CHAIN3", "SIERP-PROD", "IDENT", "CORRUPT"];

/// `B1`, `B2`, `C3`, `BD` are frames; `M3` is not.
pub fn frame_fixture(name: &str) -> Result<Lattice> {
    match name {
        "M3" => Ok(m3_lattice()),
        _ => Ok(base_fixture(name)?.into_lattice()),
    }
}

pub fn base_fixture(name: &str) -> Result<Frame> {
    match name {
        "B1" => Ok(Frame::trivial()),
        "B2" => Ok(Frame::two()),
        "C3" => Ok(Frame::chain3()),
        "BD" => Ok(Frame::diamond()),
        "M3" => Frame::new(m3_lattice()),
        _ => Err(Error::UnknownFixture(name.into())),
    }
}

/// `B2^{s,t}`.
pub fn free2() -> FreeModule {
    free_module(Arc::new(Frame::two()), vec!["s".into(), "t".into()]).expect("four elements")
}

/// The 3-chain `0 < u < 1` over `B2` with `p*(1) = 1`: open, not étale.
pub fn chain3() -> BLocale {
    module_from_map(Arc::new(Frame::two()), &Frame::chain3(), &[0, 2]).expect("fixture")
}

/// Product of two Sierpiński locales over the first factor: `B = ↓2`,
/// `X = ↓(2 × 2)`, `p*(U) = U × 2`. Open with `spp(V)` the first projection
/// of `V`, and not étale.
pub fn sierp_prod() -> BLocale {
    let s = Poset::chain(2);
    let base = Arc::new(downset_frame(&s).expect("small"));
    let carrier = downset_frame(&s.product(&s)).expect("small");
    let pstar: Vec<usize> = base
        .elements()
        .map(|b| {
            let u = base.mask(b).expect("down-set frame");
            let m = (0..4).filter(|k| u >> (k / 2) & 1 == 1).fold(0u32, |m, k| m | 1 << k);
            carrier.index_of_mask(m).expect("U × 2 is a down-set")
        })
        .collect();
    module_from_map(base, &carrier, &pstar).expect("fixture")
}

/// `BD` over itself: étale, every element a section.
pub fn ident() -> BLocale {
    let b = Arc::new(Frame::diamond());
    let id: Vec<usize> = b.elements().collect();
    module_from_map(b.clone(), &b, &id).expect("fixture")
}

/// `FREE2` with `0·1` overwritten to `1`.
pub fn corrupt() -> BModule {
    let fm = free2();
    let m = fm.locale.module();
    let mut action = m.action_table();
    let top = m.carrier().top();
    action[0][top] = top;
    BModule::raw(m.base().clone(), m.carrier().clone(), action).expect("shape is intact")
}

pub fn module_fixture(name: &str) -> Result<BModule> {
    match name {
        "CORRUPT" => Ok(corrupt()),
        _ => Ok(locale_fixture(name)?.module().clone()),
    }
}

pub fn locale_fixture(name: &str) -> Result<BLocale> {
    match name {
        "FREE2" => Ok(free2().locale),
        "CHAIN3" => Ok(chain3()),
        "SIERP-PROD" => Ok(sierp_prod()),
        "IDENT" => Ok(ident()),
        "CORRUPT" => BLocale::new(corrupt()),
        _ => Err(Error::UnknownFixture(name.into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::verify_frame;

    #[test]
    fn frame_fixtures() {
        for name in FRAME_FIXTURES {
            let l = frame_fixture(name).unwrap();
            assert_eq!(verify_frame(&l).passed(), name != "M3", "{name}");
        }
        assert!(matches!(base_fixture("M3"), Err(Error::NotAFrame(_))));
        assert!(matches!(frame_fixture("nope"), Err(Error::UnknownFixture(_))));
    }

    #[test]
    fn free2_has_three_sections() {
        let l = locale_fixture("FREE2").unwrap();
        assert!(l.is_etale().unwrap());
        assert_eq!(l.local_sections().unwrap().len(), 3);
    }

    #[test]
    fn chain3_is_open_not_etale() {
        let l = chain3();
        assert!(l.is_open());
        assert!(!l.is_etale().unwrap());
    }

    #[test]
    fn sierp_prod_is_open_not_etale() {
        let l = sierp_prod();
        assert_eq!(l.len(), 6);
        assert!(l.is_open());
        assert!(!l.is_etale().unwrap());
        let s = Poset::chain(2);
        let (base, carrier) = (downset_frame(&s).unwrap(), downset_frame(&s.product(&s)).unwrap());
        let spp = l.support().unwrap();
        for v in carrier.elements() {
            let m = carrier.mask(v).unwrap();
            let image = (0..4).filter(|k| m >> k & 1 == 1).fold(0u32, |acc, k| acc | 1 << (k / 2));
            assert_eq!(base.mask(spp[v]).unwrap(), image);
        }
    }

    #[test]
    fn ident_sections_are_everything() {
        let l = ident();
        assert_eq!(l.local_sections().unwrap(), &[0, 1, 2, 3]);
        assert!(l.is_etale().unwrap());
    }

    #[test]
    fn corrupt_is_rejected() {
        assert!(!corrupt().laws().passed());
        assert!(matches!(locale_fixture("CORRUPT"), Err(Error::ModuleLaw(_))));
    }
}
