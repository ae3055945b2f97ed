//! Presheaves on finite posets and the étale `B`-locales of their categories of
//! elements.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bmodule::{module_from_map, BLocale};
use crate::error::{Error, Result};
use crate::homs::BLocaleMap;
use crate::lattice::{downset_frame, Frame, Poset};
use crate::report::{LawCheck, LawReport, Witness};

/// Largest poset produced by [`random_poset`].
pub const MAX_RANDOM_POSET: usize = 8;
/// Default bound on the category of elements.
pub const MAX_ELEMENTS_OF: usize = 10;
/// Default bound on the base poset of a presheaf.
pub const MAX_BASE_POSET: usize = 5;
/// Largest fiber drawn by [`random_presheaf`].
pub const MAX_FIBER: usize = 3;

/// `F: P^op → Set` with finite fibers `{0, …, n_p − 1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presheaf {
    poset: Poset,
    fibers: Vec<usize>,
    /// `restrict[q][p]` is `F(q) → F(p)` when `p ≤ q`, empty otherwise.
    restrict: Vec<Vec<Vec<usize>>>,
}

impl Presheaf {
    pub fn new(poset: Poset, fibers: Vec<usize>, restrict: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        let n = poset.len();
        if fibers.len() != n || restrict.len() != n || restrict.iter().any(|r| r.len() != n) {
            return Err(Error::Malformed("presheaf tables do not match the poset".into()));
        }
        for (q, p) in (0..n).flat_map(|q| (0..n).map(move |p| (q, p))) {
            let want = if poset.leq(p, q) { fibers[q] } else { 0 };
            let r = &restrict[q][p];
            if r.len() != want || r.iter().any(|&x| x >= fibers[p]) {
                return Err(Error::Malformed(format!("restriction {q} → {p} malformed")));
            }
        }
        let f = Presheaf { poset, fibers, restrict };
        if let Some(w) = f.functoriality().witness() {
            return Err(Error::Malformed(format!("not a presheaf: {w}")));
        }
        Ok(f)
    }

    /// One point over every element, identity restrictions.
    pub fn terminal(poset: Poset) -> Self {
        let n = poset.len();
        let restrict = (0..n).map(|q| (0..n).map(|p| if poset.leq(p, q) { vec![0] } else { vec![] }).collect()).collect();
        Presheaf { poset, fibers: vec![1; n], restrict }
    }

    pub fn empty(poset: Poset) -> Self {
        let n = poset.len();
        Presheaf { poset, fibers: vec![0; n], restrict: vec![vec![vec![]; n]; n] }
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn fiber(&self, p: usize) -> usize {
        self.fibers[p]
    }

    pub fn fibers(&self) -> &[usize] {
        &self.fibers
    }

    /// The restriction of `x ∈ F(q)` to `p ≤ q`.
    pub fn restrict(&self, q: usize, p: usize, x: usize) -> usize {
        self.restrict[q][p][x]
    }

    pub fn elements_count(&self) -> usize {
        self.fibers.iter().sum()
    }

    pub fn functoriality(&self) -> LawReport {
        let n = self.poset.len();
        let mut r = LawReport::new("presheaf functoriality");
        r.push(LawCheck::over(
            "identity restrictions",
            (0..n).flat_map(|p| (0..self.fibers[p]).map(move |x| (p, x))),
            |&(p, x)| self.restrict[p][p][x] == x,
            |&(p, x)| Witness::new([p, x], "restriction to itself moves a point"),
        ));
        let triples: Vec<(usize, usize, usize)> = (0..n)
            .flat_map(|a| (0..n).flat_map(move |b| (0..n).map(move |c| (a, b, c))))
            .filter(|&(a, b, c)| self.poset.leq(a, b) && self.poset.leq(b, c))
            .collect();
        r.push(LawCheck::over(
            "restrictions compose",
            triples.iter().flat_map(|&(a, b, c)| (0..self.fibers[c]).map(move |x| (a, b, c, x))),
            |&(a, b, c, x)| self.restrict[b][a][self.restrict[c][b][x]] == self.restrict[c][a][x],
            |&(a, b, c, x)| Witness::new([a, b, c, x], "restrictions do not compose"),
        ));
        r
    }
}

/// A random partial order on `n` points: each pair `i < j` of a random
/// permutation is related with probability 1/3, then closed transitively.
pub fn random_poset(seed: u64, n: usize) -> Result<Poset> {
    if n > MAX_RANDOM_POSET {
        return Err(Error::SizeExceeded(format!("random posets have at most {MAX_RANDOM_POSET} points")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen_ratio(1, 3) {
                pairs.push((perm[i], perm[j]));
            }
        }
    }
    Poset::new((0..n).map(|i| format!("p{i}")).collect(), &pairs)
}

/// Fibers are drawn along a linear extension; each new point of `F(q)` is a
/// random compatible family over the lower covers of `q`, so restrictions
/// compose by construction.
pub fn random_presheaf(seed: u64, poset: &Poset, max_fiber: usize) -> Presheaf {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = poset.len();
    let covers = poset.covers();
    let mut fibers = vec![0; n];
    let mut restrict = vec![vec![Vec::new(); n]; n];
    for q in poset.linear_extension() {
        let lower: Vec<usize> = covers.iter().filter(|&&(_, j)| j == q).map(|&(i, _)| i).collect();
        let families = compatible_families(poset, &fibers, &restrict, &lower);
        let size = if families.is_empty() { 0 } else { rng.gen_range(0..=max_fiber) };
        let chosen: Vec<&Vec<usize>> = (0..size).map(|_| &families[rng.gen_range(0..families.len())]).collect();
        fibers[q] = size;
        restrict[q][q] = (0..size).collect();
        for p in 0..n {
            if p == q || !poset.leq(p, q) {
                continue;
            }
            let (ci, &c) = lower.iter().enumerate().find(|&(_, &c)| poset.leq(p, c)).expect("p lies below a lower cover");
            restrict[q][p] = chosen.iter().map(|fam| restrict[c][p][fam[ci]]).collect();
        }
    }
    Presheaf { poset: poset.clone(), fibers, restrict }
}

/// Tuples `(x_c)` over the lower covers `c` that agree on everything below two
/// covers. A minimal element has the single empty family.
fn compatible_families(poset: &Poset, fibers: &[usize], restrict: &[Vec<Vec<usize>>], lower: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for (k, &c) in lower.iter().enumerate() {
        let mut next = Vec::new();
        for fam in &out {
            for x in 0..fibers[c] {
                let ok = (0..k).all(|i| {
                    let d = lower[i];
                    (0..poset.len())
                        .filter(|&p| poset.leq(p, c) && poset.leq(p, d))
                        .all(|p| restrict[c][p][x] == restrict[d][p][fam[i]])
                });
                if ok {
                    let mut f: Vec<usize> = fam.clone();
                    f.push(x);
                    next.push(f);
                }
            }
        }
        out = next;
    }
    out
}

/// The étale `B`-locale of a presheaf, with its category of elements.
#[derive(Clone, Debug)]
pub struct EtaleInstance {
    pub presheaf: Presheaf,
    /// Points `(p, x)` of the category of elements.
    pub elements: Vec<(usize, usize)>,
    pub elements_poset: Poset,
    pub base: Arc<Frame>,
    pub carrier: Frame,
    pub locale: Arc<BLocale>,
    pub report: LawReport,
}

impl EtaleInstance {
    /// Carrier index of the principal down-set of an element.
    pub fn principal(&self, e: usize) -> usize {
        self.carrier.index_of_mask(self.elements_poset.below_mask(e)).expect("principal down-sets are down-sets")
    }
}

/// `E = {(p,x)}` with `(p,x) ≤ (q,y)` iff `p ≤ q` and `y|_p = x`; carrier
/// `↓E`, base `↓P`, and `p*(U) = {(p,x) : p ∈ U}`.
pub fn etale_from_presheaf(base: Arc<Frame>, f: &Presheaf, max_elements: usize) -> Result<EtaleInstance> {
    let poset = f.poset();
    if base.poset() != Some(poset) {
        return Err(Error::Mismatch("base frame is not the down-set frame of the presheaf's poset".into()));
    }
    let limit = max_elements.min(MAX_ELEMENTS_OF);
    if f.elements_count() > limit {
        return Err(Error::SizeExceeded(format!("category of elements has {} points, limit is {limit}", f.elements_count())));
    }
    let elements: Vec<(usize, usize)> = (0..poset.len()).flat_map(|p| (0..f.fiber(p)).map(move |x| (p, x))).collect();
    let names = elements.iter().map(|&(p, x)| format!("{}.{}", poset.name(p), x)).collect();
    let leq = elements
        .iter()
        .map(|&(p, x)| elements.iter().map(|&(q, y)| poset.leq(p, q) && f.restrict(q, p, y) == x).collect())
        .collect();
    let e_poset = Poset::from_relation(names, leq)?;
    let carrier = downset_frame(&e_poset)?;
    let pstar: Vec<usize> = base
        .elements()
        .map(|b| {
            let u = base.mask(b).expect("down-set frame");
            let m = elements.iter().enumerate().filter(|(_, &(p, _))| u >> p & 1 == 1).fold(0u32, |m, (i, _)| m | 1 << i);
            carrier.index_of_mask(m).expect("preimage of a down-set is a down-set")
        })
        .collect();
    let locale = module_from_map(base.clone(), &carrier, &pstar)?;
    let mut report = LawReport::new("étale locale of a presheaf");
    report.push(LawCheck::from_bool("open", locale.is_open(), || Witness::text("projection is not open")));
    report.push(LawCheck::from_bool("étale", locale.is_etale().unwrap_or(false), || Witness::text("sections do not cover")));
    let mut inst = EtaleInstance {
        presheaf: f.clone(),
        elements,
        elements_poset: e_poset,
        base,
        carrier,
        locale: Arc::new(locale),
        report,
    };
    let sections = inst.locale.local_sections().unwrap_or(&[]).to_vec();
    let principal = LawCheck::over(
        "principal down-sets are local sections",
        0..inst.elements.len(),
        |&e| sections.binary_search(&inst.principal(e)).is_ok(),
        |&e| Witness::new([e], format!("↓{} is not a section", inst.elements_poset.name(e))),
    );
    inst.report.push(principal);
    if let Some(w) = inst.report.witness() {
        return Err(Error::Mismatch(format!("presheaf construction is not étale: {w}")));
    }
    Ok(inst)
}

/// A natural transformation `η: F → G`, one table per point of the base.
pub type NatTrans = Vec<Vec<usize>>;

pub fn is_natural(f: &Presheaf, g: &Presheaf, eta: &NatTrans) -> bool {
    let p = f.poset();
    (0..p.len()).all(|q| {
        eta[q].len() == f.fiber(q)
            && (0..p.len())
                .filter(|&a| p.leq(a, q))
                .all(|a| (0..f.fiber(q)).all(|y| eta[a][f.restrict(q, a, y)] == g.restrict(q, a, eta[q][y])))
    })
}

/// Greedy seeded search for a natural transformation, choosing `η_q(y)` along a
/// linear extension among the values consistent with choices already made.
pub fn random_nat_trans(seed: u64, f: &Presheaf, g: &Presheaf, attempts: usize) -> Option<NatTrans> {
    let p = f.poset();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let order = p.linear_extension();
    'attempt: for _ in 0..attempts {
        let mut eta: NatTrans = vec![Vec::new(); p.len()];
        for &q in &order {
            for y in 0..f.fiber(q) {
                let ok: Vec<usize> = (0..g.fiber(q))
                    .filter(|&z| (0..p.len()).filter(|&a| p.lt(a, q)).all(|a| g.restrict(q, a, z) == eta[a][f.restrict(q, a, y)]))
                    .collect();
                if ok.is_empty() {
                    continue 'attempt;
                }
                eta[q].push(ok[rng.gen_range(0..ok.len())]);
            }
        }
        debug_assert!(is_natural(f, g, &eta));
        return Some(eta);
    }
    None
}

/// The map of étale locales induced by `η`: `f*(V) = η⁻¹(V)` on down-sets of
/// the categories of elements.
pub fn map_from_nat_trans(x: &EtaleInstance, y: &EtaleInstance, eta: &NatTrans) -> Result<BLocaleMap> {
    if !is_natural(&x.presheaf, &y.presheaf, eta) {
        return Err(Error::Malformed("not a natural transformation".into()));
    }
    let image: Vec<usize> = x
        .elements
        .iter()
        .map(|&(p, a)| y.elements.iter().position(|&e| e == (p, eta[p][a])).expect("image point exists"))
        .collect();
    let inverse: Vec<usize> = y
        .carrier
        .elements()
        .map(|v| {
            let m = y.carrier.mask(v).expect("down-set frame");
            let pre = image.iter().enumerate().filter(|(_, &j)| m >> j & 1 == 1).fold(0u32, |acc, (i, _)| acc | 1 << i);
            x.carrier.index_of_mask(pre).expect("preimage along a monotone map is a down-set")
        })
        .collect();
    BLocaleMap::new(x.locale.clone(), y.locale.clone(), inverse)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_poset_edges() {
        assert_eq!(random_poset(1, 0).unwrap().len(), 0);
        assert_eq!(random_poset(1, 1).unwrap().len(), 1);
        assert!(matches!(random_poset(1, 9), Err(Error::SizeExceeded(_))));
        assert_eq!(random_poset(42, 3).unwrap(), random_poset(42, 3).unwrap());
    }

    #[test]
    fn seed_42_three_points_is_stable() {
        assert!(random_poset(42, 3).unwrap().strict_pairs().is_empty());
        assert_eq!(random_poset(7, 3).unwrap().strict_pairs(), vec![(1, 2)]);
    }

    #[test]
    fn random_presheaves_are_functorial() {
        for seed in 0..200 {
            let p = random_poset(seed, (seed % 6) as usize).unwrap();
            let f = random_presheaf(seed, &p, 3);
            assert!(f.functoriality().passed(), "seed {seed}");
            assert_eq!(f, random_presheaf(seed, &p, 3));
        }
    }

    #[test]
    fn empty_fibers_give_trivial_carrier() {
        let p = Poset::chain(2);
        let base = Arc::new(downset_frame(&p).unwrap());
        let inst = etale_from_presheaf(base, &Presheaf::empty(p), 10).unwrap();
        assert_eq!(inst.locale.len(), 1);
        assert!(inst.locale.is_etale().unwrap());
    }

    #[test]
    fn two_points_over_a_point_is_free() {
        let p = Poset::chain(1);
        let base = Arc::new(downset_frame(&p).unwrap());
        let f = Presheaf::new(p, vec![2], vec![vec![vec![0, 1]]]).unwrap();
        let inst = etale_from_presheaf(base, &f, 10).unwrap();
        assert_eq!(inst.locale.len(), 4);
        assert_eq!(inst.locale.local_sections().unwrap().len(), 3);
    }

    #[test]
    fn terminal_presheaf_recovers_base() {
        let p = Poset::chain(2);
        let base = Arc::new(downset_frame(&p).unwrap());
        let inst = etale_from_presheaf(base.clone(), &Presheaf::terminal(p), 10).unwrap();
        assert_eq!(inst.locale.len(), base.len());
        assert_eq!(inst.locale.projection().pstar, vec![0, 1, 2]);
    }

    #[test]
    fn maps_to_terminal_exist() {
        for seed in 0..50 {
            let p = random_poset(seed, 3).unwrap();
            let base = Arc::new(downset_frame(&p).unwrap());
            let f = random_presheaf(seed, &p, 2);
            let t = Presheaf::terminal(p);
            let eta = random_nat_trans(seed, &f, &t, 1).unwrap();
            let (x, y) = (etale_from_presheaf(base.clone(), &f, 10).unwrap(), etale_from_presheaf(base, &t, 10).unwrap());
            let m = map_from_nat_trans(&x, &y, &eta).unwrap();
            assert!(m.over_base().holds);
        }
    }
}
