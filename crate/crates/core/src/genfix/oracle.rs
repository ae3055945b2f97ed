//! Definition-level brute force over raw tables, diffed against the verdicts
//! computed by the library.

use serde::Serialize;

use crate::bmodule::{BLocale, BModule};
use crate::hilbert::{check_axioms, inner_from_support, is_hilbert_basis};
use crate::lattice::{verify_frame, Lattice};
use crate::report::{LawCheck, LawReport, Witness};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub property: String,
    pub oracle: bool,
    pub library: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleDiff {
    pub verdicts: Vec<Verdict>,
    pub report: LawReport,
}

impl OracleDiff {
    pub fn clean(&self) -> bool {
        self.report.passed()
    }

    pub fn oracle(&self, property: &str) -> Option<bool> {
        self.verdicts.iter().find(|v| v.property == property).map(|v| v.oracle)
    }
}

fn le(l: &Lattice, a: usize, b: usize) -> bool {
    l.join(a, b) == b
}

/// Lattice with least and greatest element, distributive.
pub fn oracle_is_frame(l: &Lattice) -> bool {
    let n = l.len();
    if n == 0 {
        return false;
    }
    let idx = 0..n;
    let bounded = idx.clone().all(|a| le(l, 0, a) && le(l, a, n - 1));
    let lub_glb = idx.clone().all(|a| {
        (0..n).all(|b| {
            (0..n).all(|c| {
                let ub = le(l, a, c) && le(l, b, c);
                let lb = l.meet(c, a) == c && l.meet(c, b) == c;
                ub == le(l, l.join(a, b), c) && lb == (l.meet(c, l.meet(a, b)) == c)
            })
        })
    });
    let distributive = idx.clone().all(|a| {
        (0..n).all(|b| (0..n).all(|c| l.meet(a, l.join(b, c)) == l.join(l.meet(a, b), l.meet(a, c))))
    });
    bounded && lub_glb && distributive
}

fn oracle_module_laws(m: &BModule) -> bool {
    let (b, x) = (&**m.base(), &**m.carrier());
    let (bs, xs) = (b.len(), x.len());
    let zero_x = x.elements().all(|v| m.act(0, v) == 0);
    let unit = x.elements().all(|v| m.act(bs - 1, v) == v);
    let kills_zero = b.elements().all(|a| m.act(a, 0) == 0);
    let mut ok = zero_x && unit && kills_zero;
    for a in 0..bs {
        for c in 0..bs {
            for v in 0..xs {
                ok &= m.act(b.join(a, c), v) == x.join(m.act(a, v), m.act(c, v));
                ok &= m.act(a, m.act(c, v)) == m.act(b.meet(a, c), v);
            }
        }
        for v in 0..xs {
            for w in 0..xs {
                ok &= m.act(a, x.join(v, w)) == x.join(m.act(a, v), m.act(a, w));
            }
        }
    }
    ok
}

/// `⋀{b : x ≤ b1}` found by scanning for the least such `b`.
fn oracle_support(m: &BModule) -> Vec<usize> {
    let (b, x) = (&**m.base(), &**m.carrier());
    let top = x.len() - 1;
    x.elements()
        .map(|v| {
            let ups: Vec<usize> = b.elements().filter(|&c| le(x, v, m.act(c, top))).collect();
            *ups.iter().find(|&&c| ups.iter().all(|&d| le(b, c, d))).expect("finite frames have left adjoints")
        })
        .collect()
}

/// Runs every check on raw tables and compares with the library.
pub fn oracle_verify(m: &BModule) -> OracleDiff {
    let mut verdicts = Vec::new();
    let mut report = LawReport::new("oracle diff");
    let mut record = |property: &str, oracle: bool, library: bool, report: &mut LawReport| {
        report.push(LawCheck::from_bool(format!("agree: {property}"), oracle == library, || {
            Witness::text(format!("oracle says {oracle}, library says {library}"))
        }));
        verdicts.push(Verdict { property: property.into(), oracle, library });
    };
    let (b, x) = (&**m.base(), &**m.carrier());
    let frame = oracle_is_frame(x);
    record("carrier is a frame", frame, verify_frame(x).passed(), &mut report);
    let laws = oracle_module_laws(m);
    record("module laws", laws, m.laws().passed(), &mut report);
    let top = x.len() - 1;
    let stable = b.elements().all(|c| x.elements().all(|v| m.act(c, v) == x.meet(m.act(c, top), v)));
    record("stability", stable, m.stability().holds, &mut report);
    let locale = BLocale::new(m.clone()).ok();
    record("is a B-locale", frame && laws && stable, locale.is_some(), &mut report);
    let Some(loc) = locale.filter(|_| frame && laws && stable) else {
        return OracleDiff { verdicts, report };
    };

    let spp = oracle_support(m);
    let open = b.elements().all(|c| x.elements().all(|v| spp[x.meet(v, m.act(c, top))] == b.meet(c, spp[v])));
    record("open", open, loc.is_open(), &mut report);
    if !open || !loc.is_open() {
        return OracleDiff { verdicts, report };
    }
    record("support table", true, loc.support().ok() == Some(spp.as_slice()), &mut report);
    let sections: Vec<usize> =
        x.elements().filter(|&s| x.elements().filter(|&v| le(x, v, s)).all(|v| m.act(spp[v], s) == v)).collect();
    record("local sections", true, loc.local_sections().ok() == Some(sections.as_slice()), &mut report);
    let cover = sections.iter().fold(0, |acc, &s| x.join(acc, s));
    let etale = cover == top;
    record("étale", etale, loc.is_etale().unwrap_or(false), &mut report);

    let ip = |v: usize, w: usize| spp[x.meet(v, w)];
    let h = inner_from_support(&loc).expect("open");
    let axioms = (0..x.len()).all(|v| {
        (0..x.len()).all(|w| {
            ip(v, w) == ip(w, v)
                && b.elements().all(|c| ip(m.act(c, v), w) == b.meet(c, ip(v, w)))
                && x.elements().all(|u| ip(x.join(v, u), w) == b.join(ip(v, w), ip(u, w)))
        })
    }) && x.elements().all(|w| ip(0, w) == 0);
    record("inner product axioms", axioms, check_axioms(h.module(), h.inner()).passed(), &mut report);
    let nondegenerate = (0..x.len()).all(|v| (v + 1..x.len()).all(|w| x.elements().any(|z| ip(v, z) != ip(w, z))));
    record("non-degenerate", nondegenerate, h.flags().nondegenerate.holds, &mut report);
    let pseudo = |v: usize| {
        let disjoint: Vec<usize> = x.elements().filter(|&z| x.meet(z, v) == 0).collect();
        *disjoint.iter().find(|&&z| disjoint.iter().all(|&d| le(x, d, z))).expect("frames are pseudo-complemented")
    };
    let weak = (0..x.len())
        .all(|v| (v + 1..x.len()).all(|w| x.elements().any(|z| ip(v, z) != ip(w, z)) || pseudo(v) == pseudo(w)));
    record("weakly non-degenerate", weak, h.flags().weakly_nondegenerate.holds, &mut report);
    let supported = x.elements().all(|v| m.act(ip(v, v), v) == v);
    record("supported", supported, h.flags().supported.holds, &mut report);
    if etale {
        let basis = x.elements().all(|v| sections.iter().fold(0, |acc, &s| x.join(acc, m.act(ip(v, s), s))) == v);
        record("sections form a Hilbert basis", basis, is_hilbert_basis(&h, &sections).holds, &mut report);
    }
    OracleDiff { verdicts, report }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genfix::fixtures::{corrupt, locale_fixture, MODULE_FIXTURES};
    use crate::lattice::m3_lattice;

    #[test]
    fn fixtures_diff_clean() {
        for name in MODULE_FIXTURES {
            let m = crate::genfix::fixtures::module_fixture(name).unwrap();
            let d = oracle_verify(&m);
            assert!(d.clean(), "{name}: {}", d.report);
        }
    }

    #[test]
    fn corrupt_flagged_by_both() {
        let d = oracle_verify(&corrupt());
        assert!(d.clean());
        assert_eq!(d.oracle("module laws"), Some(false));
    }

    #[test]
    fn chain3_verdicts() {
        let d = oracle_verify(locale_fixture("CHAIN3").unwrap().module());
        assert_eq!(d.oracle("open"), Some(true));
        assert_eq!(d.oracle("étale"), Some(false));
        assert_eq!(d.oracle("non-degenerate"), Some(false));
        assert_eq!(d.oracle("weakly non-degenerate"), Some(true));
    }

    #[test]
    fn m3_is_not_a_frame() {
        assert!(!oracle_is_frame(&m3_lattice()));
    }
}
