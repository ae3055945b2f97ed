//! Module homomorphisms, adjoints, sheaf homomorphisms and maps of `B`-locales.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use itertools::iproduct;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bmodule::{frame_hom_check, BLocale, BModule};
use crate::error::{Error, Result};
use crate::hilbert::{BasedHilbert, HilbertModule};
use crate::lattice::Lattice;
use crate::report::{LawCheck, LawReport, Witness};

/// Subsets are enumerated exhaustively up to this many elements.
pub const EXHAUSTIVE_SUBSETS: usize = 12;
/// Seeded random subsets drawn above [`EXHAUSTIVE_SUBSETS`].
pub const RANDOM_SUBSETS: usize = 10_000;
/// Cap on partial assignments visited when enumerating homomorphisms.
pub const ENUMERATION_LIMIT: u64 = 1 << 18;

/// At most this many module homs are enumerated when searching for homs that
/// are not sheaf homs.
pub const HOM_SEARCH_LIMIT: usize = 1 << 12;

/// A function between two modules over the same base, stored as a table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleHom {
    source: Arc<BModule>,
    target: Arc<BModule>,
    table: Vec<u16>,
}

impl ModuleHom {
    /// Fails with [`Error::NotAHom`] unless the table is a module homomorphism.
    pub fn new(source: Arc<BModule>, target: Arc<BModule>, table: Vec<usize>) -> Result<Self> {
        let h = Self::unchecked(source, target, table)?;
        if let Some(w) = h.laws().witness() {
            return Err(Error::NotAHom(w));
        }
        Ok(h)
    }

    /// Checks shape and base only.
    pub fn unchecked(source: Arc<BModule>, target: Arc<BModule>, table: Vec<usize>) -> Result<Self> {
        if source.base().id() != target.base().id() {
            return Err(Error::CrossFrame);
        }
        if table.len() != source.len() || table.iter().any(|&v| v >= target.len()) {
            return Err(Error::Malformed(format!(
                "hom table must map {} elements into {}",
                source.len(),
                target.len()
            )));
        }
        Ok(ModuleHom { source, target, table: table.into_iter().map(|v| v as u16).collect() })
    }

    pub fn identity(m: Arc<BModule>) -> Self {
        let table = (0..m.len() as u16).collect();
        ModuleHom { source: m.clone(), target: m, table }
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.table[x] as usize
    }

    pub fn table(&self) -> Vec<usize> {
        self.table.iter().map(|&v| v as usize).collect()
    }

    pub fn source(&self) -> &Arc<BModule> {
        &self.source
    }

    pub fn target(&self) -> &Arc<BModule> {
        &self.target
    }

    pub fn laws(&self) -> LawReport {
        hom_laws(&self.source, &self.target, &self.table())
    }

    pub fn is_hom(&self) -> bool {
        self.laws().passed()
    }

    /// `then ∘ self`.
    pub fn compose(&self, then: &ModuleHom) -> Result<ModuleHom> {
        if !same_module(&self.target, &then.source) {
            return Err(Error::Mismatch("composite of homs with mismatched middle module".into()));
        }
        let table = self.table.iter().map(|&x| then.table[x as usize]).collect();
        Ok(ModuleHom { source: self.source.clone(), target: then.target.clone(), table })
    }
}

pub(crate) fn same_module(a: &Arc<BModule>, b: &Arc<BModule>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// Join preservation (empty and binary) and equivariance of an arbitrary table.
pub fn hom_laws(source: &BModule, target: &BModule, h: &[usize]) -> LawReport {
    let (x_, y_) = (&**source.carrier(), &**target.carrier());
    let b_ = source.base();
    let mut r = LawReport::new("module homomorphism");
    r.push(LawCheck::from_bool("h(0) = 0", h[x_.bottom()] == y_.bottom(), || {
        Witness::new([x_.bottom()], format!("h(0) = {}", y_.label(h[x_.bottom()])))
    }));
    r.push(LawCheck::over(
        "h(x ∨ y) = h(x) ∨ h(y)",
        iproduct!(x_.elements(), x_.elements()),
        |&(a, b)| h[x_.join(a, b)] == y_.join(h[a], h[b]),
        |&(a, b)| Witness::new([a, b], format!("h({} ∨ {}) ≠ h(x) ∨ h(y)", x_.label(a), x_.label(b))),
    ));
    r.push(LawCheck::over(
        "h(bx) = b h(x)",
        iproduct!(b_.elements(), x_.elements()),
        |&(b, x)| h[source.act(b, x)] == target.act(b, h[x]),
        |&(b, x)| Witness::new([b, x], format!("h({}) ≠ {}·h({})", source.bx(b, x), b_.label(b), x_.label(x))),
    ));
    r
}

/// `h†(y) = ⋁_{t∈Σ} ⟨h(t),y⟩ t`, using a Hilbert basis `Σ` of the source.
pub fn dagger_table(h: &[usize], x: &BasedHilbert, y: &HilbertModule) -> Vec<usize> {
    let m = x.module();
    (0..y.len())
        .map(|v| m.carrier().join_set(x.basis.iter().map(|&t| m.act(y.ip(h[t], v), t))))
        .collect()
}

/// The adjoint of a module homomorphism whose source carries a Hilbert basis.
pub fn adjoint(h: &ModuleHom, x: &BasedHilbert, y: &HilbertModule) -> Result<ModuleHom> {
    if !same_module(h.source(), x.hilbert.module_arc()) || !same_module(h.target(), y.module_arc()) {
        return Err(Error::Mismatch("hom does not connect the given Hilbert modules".into()));
    }
    if let Some(w) = h.laws().witness() {
        return Err(Error::NotAHom(w));
    }
    let t = dagger_table(&h.table(), x, y);
    ModuleHom::unchecked(y.module_arc().clone(), x.hilbert.module_arc().clone(), t)
}

/// For each `y`, every `x'` with `⟨x,x'⟩ = ⟨h(x),y⟩` for all `x`.
pub fn adjoint_solutions(h: &[usize], x: &HilbertModule, y: &HilbertModule) -> Vec<Vec<usize>> {
    let mut rows: HashMap<&[u16], Vec<usize>> = HashMap::new();
    for a in 0..x.len() {
        rows.entry(x.inner().row(a)).or_default().push(a);
    }
    (0..y.len())
        .map(|v| {
            let want: Vec<u16> = (0..x.len()).map(|a| y.ip(h[a], v) as u16).collect();
            rows.get(want.as_slice()).cloned().unwrap_or_default()
        })
        .collect()
}

/// `⟨h(x),y⟩ = ⟨x,h†(y)⟩` exhaustively.
pub fn adjoint_identity(h: &[usize], hd: &[usize], x: &HilbertModule, y: &HilbertModule) -> LawCheck {
    LawCheck::over(
        "⟨h(x),y⟩ = ⟨x,h†(y)⟩",
        iproduct!(0..x.len(), 0..y.len()),
        |&(a, v)| y.ip(h[a], v) == x.ip(a, hd[v]),
        |&(a, v)| Witness::new([a, v], "adjoint identity fails"),
    )
}

/// Adjoint identity, uniqueness, hom-ness of `h†` and, when the target is
/// based, `h†† = h`.
pub fn adjoint_report(h: &ModuleHom, x: &BasedHilbert, y: &HilbertModule, y_basis: Option<&[usize]>) -> Result<LawReport> {
    let hd = adjoint(h, x, y)?;
    let (ht, hdt) = (h.table(), hd.table());
    let mut r = LawReport::new("adjoint");
    r.push(adjoint_identity(&ht, &hdt, &x.hilbert, y));
    let sols = adjoint_solutions(&ht, &x.hilbert, y);
    r.push(LawCheck::over(
        "adjoint is unique",
        0..y.len(),
        |&v| sols[v] == [hdt[v]],
        |&v| Witness::new([v], format!("{} solutions at this point", sols[v].len())),
    ));
    r.push(hd.laws().first_failure().cloned().unwrap_or_else(|| LawCheck::pass("h† is a module homomorphism", 1)).renamed("h† is a module homomorphism"));
    if let Some(yb) = y_basis {
        let yb = BasedHilbert::new(y.clone(), yb.to_vec())?;
        let hdd = dagger_table(&hdt, &yb, &x.hilbert);
        r.push(LawCheck::over("h†† = h", 0..x.hilbert.len(), |&a| hdd[a] == ht[a], |&a| {
            Witness::new([a], "h†† differs from h")
        }));
    }
    Ok(r)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdjointabilityVerdict {
    pub is_hom: bool,
    /// Some `h†` satisfies the adjoint identity.
    pub adjointable: bool,
    /// The basis formula produces such an `h†`.
    pub formula_adjoint: bool,
    pub agree: bool,
    pub hom_witness: Option<Witness>,
}

/// Decides hom-ness and adjointability of an arbitrary table independently.
pub fn adjointable_iff_hom(h: &[usize], x: &BasedHilbert, y: &HilbertModule) -> Result<AdjointabilityVerdict> {
    if h.len() != x.hilbert.len() || h.iter().any(|&v| v >= y.len()) {
        return Err(Error::Malformed("function table does not fit the modules".into()));
    }
    let laws = hom_laws(x.module(), y.module(), h);
    let is_hom = laws.passed();
    let adjointable = adjoint_solutions(h, &x.hilbert, y).iter().all(|s| !s.is_empty());
    let cand = dagger_table(h, x, y);
    let formula_adjoint = adjoint_identity(h, &cand, &x.hilbert, y).holds;
    Ok(AdjointabilityVerdict {
        is_hom,
        adjointable,
        formula_adjoint,
        agree: is_hom == adjointable && adjointable == formula_adjoint,
        hom_witness: laws.witness(),
    })
}

/// Both conditions of a sheaf homomorphism, plus agreement between the
/// section form and the all-elements form of the support condition.
pub fn sheaf_hom_report(x: &BLocale, y: &BLocale, h: &ModuleHom) -> Result<LawReport> {
    if !x.is_etale()? || !y.is_etale()? {
        return Err(Error::NotEtale);
    }
    let sx = x.local_sections()?;
    let sy: BTreeSet<usize> = y.local_sections()?.iter().copied().collect();
    let mut r = LawReport::new("sheaf homomorphism");
    r.extend(h.laws());
    r.push(LawCheck::over("h(Σ_X) ⊆ Σ_Y", sx.iter().copied(), |&s| sy.contains(&h.apply(s)), |&s| {
        Witness::new([s], format!("h({}) is not a local section", x.carrier().label(s)))
    }));
    let on_sections =
        LawCheck::over("spp(h(s)) = spp(s) on Σ_X", sx.iter().copied(), |&s| y.spp(h.apply(s)) == x.spp(s), |&s| {
            Witness::new([s], format!("support of {} changes", x.carrier().label(s)))
        });
    let everywhere =
        LawCheck::over("spp(h(x)) = spp(x)", x.carrier().elements(), |&a| y.spp(h.apply(a)) == x.spp(a), |&a| {
            Witness::new([a], format!("support of {} changes", x.carrier().label(a)))
        });
    let agree = on_sections.holds == everywhere.holds;
    r.push(on_sections).push(everywhere);
    r.push(LawCheck::from_bool("support conditions agree", agree, || Witness::text("section and element forms disagree")));
    Ok(r)
}

/// A module homomorphism between étale `B`-locales that preserves local
/// sections and their supports.
#[derive(Clone, Debug)]
pub struct SheafHom {
    source: Arc<BLocale>,
    target: Arc<BLocale>,
    hom: ModuleHom,
}

impl SheafHom {
    pub fn new(source: Arc<BLocale>, target: Arc<BLocale>, table: Vec<usize>) -> Result<Self> {
        let hom = ModuleHom::unchecked(source.module_arc().clone(), target.module_arc().clone(), table)?;
        if let Some(w) = sheaf_hom_report(&source, &target, &hom)?.witness() {
            return Err(Error::NotSheafHom(w));
        }
        Ok(SheafHom { source, target, hom })
    }

    pub fn hom(&self) -> &ModuleHom {
        &self.hom
    }

    pub fn source(&self) -> &Arc<BLocale> {
        &self.source
    }

    pub fn target(&self) -> &Arc<BLocale> {
        &self.target
    }
}

/// A map `f: X → Y` of `B`-locales, given by its inverse image `f*: Y → X`,
/// together with its direct image `f_!: X → Y`.
#[derive(Clone, Debug)]
pub struct BLocaleMap {
    source: Arc<BLocale>,
    target: Arc<BLocale>,
    inverse: ModuleHom,
    direct: Vec<usize>,
}

impl BLocaleMap {
    /// `f*` must be a frame homomorphism and a module homomorphism.
    pub fn new(source: Arc<BLocale>, target: Arc<BLocale>, inverse_image: Vec<usize>) -> Result<Self> {
        let inverse = ModuleHom::unchecked(target.module_arc().clone(), source.module_arc().clone(), inverse_image)?;
        if let Some(w) = frame_hom_check(target.carrier(), source.carrier(), &inverse.table(), "f*").witness() {
            return Err(Error::NotAFrameHom(w));
        }
        if let Some(w) = inverse.laws().witness() {
            return Err(Error::NotAHom(w));
        }
        let direct = direct_image_table(source.carrier(), target.carrier(), &inverse.table());
        Ok(BLocaleMap { source, target, inverse, direct })
    }

    pub fn identity(x: Arc<BLocale>) -> Self {
        let id: Vec<usize> = x.carrier().elements().collect();
        let inverse = ModuleHom::identity(x.module_arc().clone());
        BLocaleMap { source: x.clone(), target: x, inverse, direct: id }
    }

    pub fn source(&self) -> &Arc<BLocale> {
        &self.source
    }

    pub fn target(&self) -> &Arc<BLocale> {
        &self.target
    }

    pub fn inverse_image(&self) -> &ModuleHom {
        &self.inverse
    }

    pub fn pullback(&self, y: usize) -> usize {
        self.inverse.apply(y)
    }

    pub fn push(&self, x: usize) -> usize {
        self.direct[x]
    }

    pub fn direct_table(&self) -> &[usize] {
        &self.direct
    }

    /// `g ∘ self` as a map `X → Z`.
    pub fn then(&self, g: &BLocaleMap) -> Result<BLocaleMap> {
        if !same_module(self.target.module_arc(), g.source.module_arc()) {
            return Err(Error::Mismatch("composite of maps with mismatched middle locale".into()));
        }
        let inv = g.inverse.table().iter().map(|&y| self.inverse.apply(y)).collect();
        BLocaleMap::new(self.source.clone(), g.target.clone(), inv)
    }

    /// Unit `x ≤ f*(f_!(x))` and counit `f_!(f*(y)) ≤ y`.
    pub fn adjunction(&self) -> LawReport {
        let (x_, y_) = (self.source.carrier(), self.target.carrier());
        let mut r = LawReport::new("f_! ⊣ f*");
        r.push(LawCheck::over("x ≤ f*(f_!(x))", x_.elements(), |&x| x_.leq(x, self.pullback(self.push(x))), |&x| {
            Witness::new([x], format!("unit fails at {}", x_.label(x)))
        }));
        r.push(LawCheck::over("f_!(f*(y)) ≤ y", y_.elements(), |&y| y_.leq(self.push(self.pullback(y)), y), |&y| {
            Witness::new([y], format!("counit fails at {}", y_.label(y)))
        }));
        r
    }

    /// `f_!(x ∧ f*(y)) = f_!(x) ∧ y`.
    pub fn frobenius(&self) -> LawCheck {
        let (x_, y_) = (self.source.carrier(), self.target.carrier());
        LawCheck::over(
            "f_!(x ∧ f*(y)) = f_!(x) ∧ y",
            iproduct!(x_.elements(), y_.elements()),
            |&(x, y)| self.push(x_.meet(x, self.pullback(y))) == y_.meet(self.push(x), y),
            |&(x, y)| Witness::new([x, y], format!("Frobenius fails at {}, {}", x_.label(x), y_.label(y))),
        )
    }

    /// Whether the map commutes with the projections: `f*(q*(b)) = p*(b)`.
    pub fn over_base(&self) -> LawCheck {
        let (p, q) = (self.source.projection(), self.target.projection());
        LawCheck::over("f* q* = p*", self.source.base().elements(), |&b| self.pullback(q.pstar[b]) == p.pstar[b], |&b| {
            Witness::new([b], "map does not commute with projections")
        })
    }
}

/// `f_!(x) = ⋀{y : x ≤ f*(y)}`.
pub fn direct_image_table(x_: &Lattice, y_: &Lattice, inverse: &[usize]) -> Vec<usize> {
    x_.elements().map(|x| y_.meet_set(y_.elements().filter(|&y| x_.leq(x, inverse[y])))).collect()
}

/// `f_!` as a module homomorphism candidate `X → Y` (not re-checked).
pub fn direct_image(f: &BLocaleMap) -> ModuleHom {
    ModuleHom::unchecked(f.source.module_arc().clone(), f.target.module_arc().clone(), f.direct.clone())
        .expect("direct image has the right shape")
}

/// `f_! = (f*)†` and `f* = (f_!)†` as table equalities, plus Frobenius and
/// the adjunction, for a map between étale locales.
pub fn check_dagger_is_direct_image(f: &BLocaleMap) -> Result<LawReport> {
    let hx = BasedHilbert::from_etale(&f.source)?;
    let hy = BasedHilbert::from_etale(&f.target)?;
    check_dagger_is_direct_image_with(f, &hx, &hy)
}

pub fn check_dagger_is_direct_image_with(f: &BLocaleMap, hx: &BasedHilbert, hy: &BasedHilbert) -> Result<LawReport> {
    let fstar = f.inverse.table();
    let fshriek = f.direct.clone();
    let dag_fstar = dagger_table(&fstar, hy, &hx.hilbert);
    let dag_fshriek = dagger_table(&fshriek, hx, &hy.hilbert);
    let mut r = LawReport::new("direct image is the adjoint");
    r.extend(f.adjunction());
    r.push(f.frobenius());
    r.push(LawCheck::over("f_! = (f*)†", f.source.carrier().elements(), |&x| dag_fstar[x] == fshriek[x], |&x| {
        Witness::new([x], "f_! and (f*)† differ")
    }));
    r.push(LawCheck::over("f* = (f_!)†", f.target.carrier().elements(), |&y| dag_fshriek[y] == fstar[y], |&y| {
        Witness::new([y], "f* and (f_!)† differ")
    }));
    Ok(r)
}

/// Runs `pred` over subsets of `items`: every subset when there are at most
/// [`EXHAUSTIVE_SUBSETS`] items, otherwise all pairs plus seeded random subsets.
fn over_subsets(
    law: &str,
    items: &[usize],
    nonempty: bool,
    seed: u64,
    mut pred: impl FnMut(&[usize]) -> bool,
) -> LawCheck {
    let mut cases = 0u64;
    let mut test = |s: &[usize], cases: &mut u64| -> Option<LawCheck> {
        if nonempty && s.is_empty() {
            return None;
        }
        *cases += 1;
        (!pred(s)).then(|| LawCheck::fail(law, *cases, Witness::new(s.to_vec(), format!("fails on subset {s:?}"))))
    };
    if items.len() <= EXHAUSTIVE_SUBSETS {
        for mask in 0u32..(1 << items.len()) {
            let s: Vec<usize> = (0..items.len()).filter(|&i| mask >> i & 1 == 1).map(|i| items[i]).collect();
            if let Some(f) = test(&s, &mut cases) {
                return f;
            }
        }
    } else {
        for s in [vec![]].into_iter().chain(items.iter().map(|&a| vec![a])) {
            if let Some(f) = test(&s, &mut cases) {
                return f;
            }
        }
        for (i, &a) in items.iter().enumerate() {
            for &b in &items[i + 1..] {
                if let Some(f) = test(&[a, b], &mut cases) {
                    return f;
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..RANDOM_SUBSETS {
            let s: Vec<usize> = items.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
            if let Some(f) = test(&s, &mut cases) {
                return f;
            }
        }
    }
    LawCheck::pass(law, cases)
}

/// `(⋀_α b_α)s = ⋀_α (b_α s)` for local sections `s` and non-empty families.
pub fn check_scalar_meets_on_sections(x: &BLocale) -> Result<LawCheck> {
    if !x.is_etale()? {
        return Err(Error::NotEtale);
    }
    let (b_, x_) = (x.base(), x.carrier());
    let bs: Vec<usize> = b_.elements().collect();
    let mut all = LawCheck::pass("(⋀b_α)s = ⋀(b_α s)", 0);
    for &s in x.local_sections()? {
        let c = over_subsets("(⋀b_α)s = ⋀(b_α s)", &bs, true, s as u64, |fam| {
            x.act(b_.meet_set(fam.iter().copied()), s) == x_.meet_set(fam.iter().map(|&b| x.act(b, s)))
        });
        all.cases += c.cases;
        if !c.holds {
            let w = c.witness.unwrap();
            return Ok(LawCheck::fail(
                "(⋀b_α)s = ⋀(b_α s)",
                all.cases,
                Witness::new([vec![s], w.indices].concat(), format!("section {}: {}", x_.label(s), w.rendering)),
            ));
        }
    }
    Ok(all)
}

/// `spp(⋀S) = ⋀spp(S)` for non-empty `S ⊆ Σ` with `⋁S ∈ Σ`. Such `S` lie
/// below the section `⋁S`, so it suffices to range over subsets of `↓s` for
/// maximal sections `s`.
pub fn check_support_of_section_meets(x: &BLocale) -> Result<LawCheck> {
    if !x.is_etale()? {
        return Err(Error::NotEtale);
    }
    let (b_, x_) = (x.base(), x.carrier());
    let sections = x.local_sections()?;
    let maximal: Vec<usize> =
        sections.iter().copied().filter(|&s| !sections.iter().any(|&t| x_.lt(s, t))).collect();
    let mut all = LawCheck::pass("spp(⋀S) = ⋀spp(S)", 0);
    for s in maximal {
        let below: Vec<usize> = x_.elements().filter(|&y| x_.leq(y, s)).collect();
        let c = over_subsets("spp(⋀S) = ⋀spp(S)", &below, true, s as u64, |set| {
            x.spp(x_.meet_set(set.iter().copied())) == b_.meet_set(set.iter().map(|&t| x.spp(t)))
        });
        all.cases += c.cases;
        if !c.holds {
            return Ok(LawCheck { cases: all.cases, ..c });
        }
    }
    Ok(all)
}

/// `h†(⋀S) = ⋀h†(S)` over subsets of the target, `h†` a frame and module
/// homomorphism, and the map it defines has direct image `h`. Also runs the two
/// supporting section lemmas on both locales.
pub fn check_meet_preservation(h: &SheafHom, hx: &BasedHilbert, hy: &BasedHilbert) -> Result<LawReport> {
    let (x, y) = (h.source(), h.target());
    let hd = adjoint(h.hom(), hx, &hy.hilbert)?;
    let hdt = hd.table();
    let (x_, y_) = (x.carrier(), y.carrier());
    let mut r = LawReport::new("adjoint of a sheaf homomorphism");
    let ys: Vec<usize> = y_.elements().collect();
    r.push(over_subsets("h†(⋀S) = ⋀h†(S)", &ys, false, 0, |s| {
        hdt[y_.meet_set(s.iter().copied())] == x_.meet_set(s.iter().map(|&v| hdt[v]))
    }));
    r.extend(frame_hom_check(y_, x_, &hdt, "h†"));
    r.extend(hd.laws());
    match BLocaleMap::new(x.clone(), y.clone(), hdt) {
        Ok(f) => {
            r.push(LawCheck::over("f_! = h for f* = h†", x_.elements(), |&a| f.push(a) == h.hom().apply(a), |&a| {
                Witness::new([a], "direct image differs from h")
            }));
        }
        Err(e) => {
            r.push(LawCheck::fail("f_! = h for f* = h†", 0, Witness::text(e.to_string())));
        }
    }
    r.push(check_scalar_meets_on_sections(x)?);
    r.push(check_support_of_section_meets(x)?);
    r.push(check_scalar_meets_on_sections(y)?.renamed("(⋀b_α)s = ⋀(b_α s) on target"));
    r.push(check_support_of_section_meets(y)?.renamed("spp(⋀S) = ⋀spp(S) on target"));
    Ok(r)
}

/// Join-preserving maps `src → tgt` whose value on each join-irreducible `j`
/// satisfies `allowed(j, v)`. The flag is false when the search stopped at
/// [`ENUMERATION_LIMIT`] nodes or `max_maps` results, in which case the list is
/// a prefix of the full one.
/// Both lattices must be distributive: then monotone assignments on
/// join-irreducibles are exactly the restrictions of join-preserving maps.
pub fn enumerate_join_maps(
    src: &Lattice,
    tgt: &Lattice,
    allowed: impl Fn(usize, usize) -> bool,
    max_maps: usize,
) -> (Vec<Vec<usize>>, bool) {
    let ji = src.join_irreducibles();
    let below: Vec<Vec<usize>> = src.elements().map(|x| (0..ji.len()).filter(|&i| src.leq(ji[i], x)).collect()).collect();
    let options: Vec<Vec<usize>> = ji.iter().map(|&j| tgt.elements().filter(|&v| allowed(j, v)).collect()).collect();
    let mut out = Vec::new();
    let mut vals = vec![0usize; ji.len()];
    let mut visited = 0u64;
    #[allow(clippy::too_many_arguments)]
    fn go(
        i: usize,
        ji: &[usize],
        src: &Lattice,
        tgt: &Lattice,
        options: &[Vec<usize>],
        vals: &mut Vec<usize>,
        visited: &mut u64,
        emit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        *visited += 1;
        if *visited > ENUMERATION_LIMIT {
            return false;
        }
        if i == ji.len() {
            return emit(vals);
        }
        for &v in &options[i] {
            // join-irreducibles are sorted by down-count, so predecessors come first
            if (0..i).all(|k| !src.leq(ji[k], ji[i]) || tgt.leq(vals[k], v)) {
                vals[i] = v;
                if !go(i + 1, ji, src, tgt, options, vals, visited, emit) {
                    return false;
                }
            }
        }
        true
    }
    let mut emit = |vals: &[usize]| {
        if out.len() == max_maps {
            return false;
        }
        out.push(below.iter().map(|b| tgt.join_set(b.iter().map(|&i| vals[i]))).collect::<Vec<usize>>());
        true
    };
    let complete = go(0, &ji, src, tgt, &options, &mut vals, &mut visited, &mut emit);
    (out, complete)
}

#[derive(Clone, Debug, Serialize)]
pub struct IsoCheck {
    pub module_homs: usize,
    pub sheaf_homs: usize,
    pub maps: usize,
    /// Module homs that are not sheaf homs and whose adjoint is not a
    /// homomorphism of `B`-locales.
    pub non_sheaf_witnesses: usize,
    /// Maps and sheaf homs were enumerated completely.
    pub exhaustive: bool,
    /// All module homs were enumerated too, not just a prefix.
    pub all_module_homs: bool,
    pub report: LawReport,
}

/// Enumerates all maps `X → Y` of `B`-locales and all sheaf homs `X → Y`, and
/// checks that `f ↦ f_!` is a bijection between them. Module homs that are not
/// sheaf homs are enumerated up to [`HOM_SEARCH_LIMIT`].
///
/// Maps are found through their direct images: `f_!` sends join-irreducibles
/// to join-irreducibles and `spp ∘ f_! = spp`. Sheaf homs send
/// join-irreducibles, which are sections, to sections of the same support.
pub fn functor_s_iso_check(x: &Arc<BLocale>, y: &Arc<BLocale>) -> Result<IsoCheck> {
    let hx = BasedHilbert::from_etale(x)?;
    let hy = BasedHilbert::from_etale(y)?;
    let (x_, y_) = (x.carrier(), y.carrier());
    let sy: BTreeSet<usize> = y.local_sections()?.iter().copied().collect();
    let jy: BTreeSet<usize> = y_.join_irreducibles().into_iter().collect();
    let mut report = LawReport::new("f ↦ f_! is a bijection onto sheaf homs");

    let (candidates, c1) = enumerate_join_maps(x_, y_, |j, v| jy.contains(&v) && y.spp(v) == x.spp(j), usize::MAX);
    let (sheaf_candidates, c2) = enumerate_join_maps(x_, y_, |j, v| sy.contains(&v) && y.spp(v) == x.spp(j), usize::MAX);
    let (homs, all_module_homs) = enumerate_join_maps(x_, y_, |j, v| y.act(x.spp(j), v) == v, HOM_SEARCH_LIMIT);
    let exhaustive = c1 && c2;

    let mut sheaf: BTreeSet<Vec<usize>> = BTreeSet::new();
    for t in sheaf_candidates {
        if !hom_laws(x.module(), y.module(), &t).passed() {
            continue;
        }
        let h = ModuleHom::unchecked(x.module_arc().clone(), y.module_arc().clone(), t.clone())?;
        if sheaf_hom_report(x, y, &h)?.passed() {
            sheaf.insert(t);
        }
    }

    let mut module_homs = 0;
    let mut sheaf_in_homs: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut non_sheaf_ok = true;
    let mut non_sheaf_witnesses = 0;
    for t in homs {
        if !hom_laws(x.module(), y.module(), &t).passed() {
            continue;
        }
        module_homs += 1;
        let h = ModuleHom::unchecked(x.module_arc().clone(), y.module_arc().clone(), t.clone())?;
        if sheaf_hom_report(x, y, &h)?.passed() {
            sheaf_in_homs.insert(t);
        } else {
            let hd = dagger_table(&t, &hx, &hy.hilbert);
            if BLocaleMap::new(x.clone(), y.clone(), hd).is_ok() {
                non_sheaf_ok = false;
            } else {
                non_sheaf_witnesses += 1;
            }
        }
    }

    let mut images: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut maps = 0;
    let mut recovered = true;
    let mut direct_matches = true;
    for cand in candidates {
        // f*(v) = ⋁{u : f_!(u) ≤ v}
        let inv: Vec<usize> = y_.elements().map(|v| x_.join_set(x_.elements().filter(|&u| y_.leq(cand[u], v)))).collect();
        let Ok(f) = BLocaleMap::new(x.clone(), y.clone(), inv) else { continue };
        maps += 1;
        direct_matches &= f.direct == cand;
        *images.entry(f.direct.clone()).or_default() += 1;
        let back = dagger_table(&f.direct, &hx, &hy.hilbert);
        recovered &= back == f.inverse.table();
    }
    let injective = images.values().all(|&c| c == 1);
    let image_set: BTreeSet<Vec<usize>> = images.keys().cloned().collect();
    report.push(LawCheck::from_bool("enumeration complete", exhaustive, || {
        Witness::text(format!("search stopped after {ENUMERATION_LIMIT} nodes"))
    }));
    report.push(LawCheck::from_bool("f_! recovers the enumerated direct image", direct_matches, || {
        Witness::text("a candidate is not the direct image of its right adjoint")
    }));
    report.push(LawCheck::from_bool("f_! is a sheaf hom", image_set.is_subset(&sheaf), || {
        Witness::text("some direct image is not a sheaf hom")
    }));
    report.push(LawCheck::from_bool("f ↦ f_! injective", injective, || Witness::text("two maps share a direct image")));
    report.push(LawCheck::from_bool("f* = (f_!)†", recovered, || Witness::text("inverse image not recovered")));
    report.push(LawCheck::from_bool("every sheaf hom is some f_!", sheaf.is_subset(&image_set), || {
        Witness::text("a sheaf hom is not a direct image")
    }));
    report.push(LawCheck::from_bool("adjoint of a non-sheaf hom is not a map", non_sheaf_ok, || {
        Witness::text("a non-sheaf hom has a map as adjoint")
    }));
    let agree = if all_module_homs { sheaf_in_homs == sheaf } else { sheaf_in_homs.is_subset(&sheaf) };
    report.push(LawCheck::from_bool("sheaf homs among all module homs", agree, || {
        Witness::text("the section-restricted search missed a sheaf hom")
    }));
    Ok(IsoCheck {
        module_homs,
        sheaf_homs: sheaf.len(),
        maps,
        non_sheaf_witnesses,
        exhaustive,
        all_module_homs,
        report,
    })
}

/// The sections presheaf `G_X(b) = {s ∈ Σ : spp(s) = b}` with restrictions `s ↦ as`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SectionsPresheaf {
    pub fibers: Vec<Vec<usize>>,
    pub report: LawReport,
}

impl SectionsPresheaf {
    pub fn fiber(&self, b: usize) -> &[usize] {
        &self.fibers[b]
    }
}

pub fn sections_presheaf(x: &BLocale) -> Result<SectionsPresheaf> {
    if !x.is_etale()? {
        return Err(Error::NotEtale);
    }
    let b_ = x.base();
    let mut fibers = vec![Vec::new(); b_.len()];
    for &s in x.local_sections()? {
        fibers[x.spp(s)].push(s);
    }
    let mut report = LawReport::new("sections presheaf");
    report.push(LawCheck::from_bool("G(0) = {0}", fibers[b_.bottom()] == [x.carrier().bottom()], || {
        Witness::new(fibers[b_.bottom()].clone(), "fiber over 0 is not {0}")
    }));
    let restr: Vec<(usize, usize, usize)> = iproduct!(b_.elements(), b_.elements())
        .filter(|&(a, b)| b_.leq(a, b))
        .flat_map(|(a, b)| fibers[b].iter().map(move |&s| (a, b, s)))
        .collect();
    report.push(LawCheck::over(
        "restriction lands in G(a)",
        restr.iter().copied(),
        |&(a, _, s)| fibers[a].contains(&x.act(a, s)),
        |&(a, b, s)| Witness::new([a, b, s], "restriction leaves the fiber"),
    ));
    report.push(LawCheck::over(
        "restriction along b ≤ b is the identity",
        b_.elements().flat_map(|b| fibers[b].iter().map(move |&s| (b, s))),
        |&(b, s)| x.act(b, s) == s,
        |&(b, s)| Witness::new([b, s], "identity restriction moves a section"),
    ));
    report.push(LawCheck::over(
        "restrictions compose",
        restr.iter().flat_map(|&(a, b, s)| b_.elements().filter(move |&c| b_.leq(c, a)).map(move |c| (c, a, b, s))),
        |&(c, a, _, s)| x.act(c, x.act(a, s)) == x.act(c, s),
        |&(c, a, b, s)| Witness::new([c, a, b, s], "restrictions do not compose"),
    ));
    Ok(SectionsPresheaf { fibers, report })
}

/// Components `G_h(b): s ↦ h(s)` land in the right fibers and are natural.
pub fn presheaf_of_hom(h: &SheafHom) -> Result<(Vec<Vec<(usize, usize)>>, LawReport)> {
    let gx = sections_presheaf(h.source())?;
    let gy = sections_presheaf(h.target())?;
    let b_ = h.source().base();
    let comps: Vec<Vec<(usize, usize)>> =
        gx.fibers.iter().map(|f| f.iter().map(|&s| (s, h.hom().apply(s))).collect()).collect();
    let mut r = LawReport::new("natural transformation of sections presheaves");
    r.push(LawCheck::over(
        "components land in G_Y(b)",
        b_.elements().flat_map(|b| comps[b].iter().map(move |&(s, t)| (b, s, t))),
        |&(b, _, t)| gy.fibers[b].contains(&t),
        |&(b, s, _)| Witness::new([b, s], "component leaves the fiber"),
    ));
    r.push(LawCheck::over(
        "naturality h(as) = a h(s)",
        iproduct!(b_.elements(), b_.elements())
            .filter(|&(a, b)| b_.leq(a, b))
            .flat_map(|(a, b)| gx.fibers[b].iter().map(move |&s| (a, s))),
        |&(a, s)| h.hom().apply(h.source().act(a, s)) == h.target().act(a, h.hom().apply(s)),
        |&(a, s)| Witness::new([a, s], "naturality square fails"),
    ));
    Ok((comps, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bmodule::{free_module, module_from_map, FreeModule};
    use crate::hilbert::inner_from_support;
    use crate::lattice::Frame;

    fn free2() -> FreeModule {
        free_module(Arc::new(Frame::two()), vec!["s".into(), "t".into()]).unwrap()
    }

    fn swap(fm: &FreeModule) -> Vec<usize> {
        (0..fm.locale.len()).map(|f| fm.element_of(&[fm.coord(f, 1), fm.coord(f, 0)]).unwrap()).collect()
    }

    #[test]
    fn identity_is_self_adjoint() {
        let fm = free2();
        let bh = BasedHilbert::from_etale(&fm.locale).unwrap();
        let id = ModuleHom::identity(fm.locale.module_arc().clone());
        let d = adjoint(&id, &bh, &bh.hilbert).unwrap();
        assert_eq!(d.table(), id.table());
        let r = adjoint_report(&id, &bh, &bh.hilbert, Some(&bh.basis)).unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn swap_is_its_own_adjoint() {
        let fm = free2();
        let bh = BasedHilbert::from_etale(&fm.locale).unwrap();
        let m = fm.locale.module_arc().clone();
        let h = ModuleHom::new(m.clone(), m, swap(&fm)).unwrap();
        assert_eq!(adjoint(&h, &bh, &bh.hilbert).unwrap().table(), swap(&fm));
        let s = SheafHom::new(Arc::new(fm.locale.clone()), Arc::new(fm.locale.clone()), swap(&fm));
        assert!(s.is_ok());
    }

    #[test]
    fn phi_dagger_is_psi() {
        let fm = free2();
        let h = inner_from_support(&fm.locale).unwrap();
        let sections = fm.locale.local_sections().unwrap().to_vec();
        let split = crate::hilbert::projectivity_split(&h, &sections).unwrap();
        let free_h = BasedHilbert::new(inner_from_support(&split.free.locale).unwrap(), split.free.unit_vectors()).unwrap();
        let d = adjoint(&split.phi, &free_h, &h).unwrap();
        assert_eq!(d.table(), split.psi.table());
    }

    #[test]
    fn adjointability_examples() {
        let two = module_from_map(Arc::new(Frame::two()), &Frame::two(), &[0, 1]).unwrap();
        let bh = BasedHilbert::from_etale(&two).unwrap();
        let v = adjointable_iff_hom(&[1, 0], &bh, &bh.hilbert).unwrap();
        assert!(!v.is_hom && !v.adjointable && !v.formula_adjoint && v.agree);
        let fm = free2();
        let bh = BasedHilbert::from_etale(&fm.locale).unwrap();
        let top = vec![3usize; 4];
        let v = adjointable_iff_hom(&top, &bh, &bh.hilbert).unwrap();
        assert!(!v.is_hom && !v.adjointable && v.agree);
        let v = adjointable_iff_hom(&[0, 1, 2, 3], &bh, &bh.hilbert).unwrap();
        assert!(v.is_hom && v.adjointable && v.formula_adjoint && v.agree);
    }

    #[test]
    fn zero_map_is_not_a_sheaf_hom() {
        let fm = free2();
        let loc = Arc::new(fm.locale.clone());
        let err = SheafHom::new(loc.clone(), loc.clone(), vec![0; 4]).unwrap_err();
        assert!(matches!(err, Error::NotSheafHom(_)));
        let id = SheafHom::new(loc.clone(), loc, (0..4).collect()).unwrap();
        assert!(presheaf_of_hom(&id).unwrap().1.passed());
    }

    #[test]
    fn identity_map_direct_image() {
        let loc = Arc::new(free2().locale);
        let f = BLocaleMap::identity(loc.clone());
        assert_eq!(direct_image(&f).table(), (0..4).collect::<Vec<_>>());
        let r = check_dagger_is_direct_image(&f).unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn down_segment_inclusion() {
        let fm = free2();
        let loc = Arc::new(fm.locale.clone());
        let s = fm.element_of(&[1, 0]).unwrap();
        let (seg, incl) = loc.down_segment(s).unwrap();
        let seg = Arc::new(seg);
        // f* = (−) ∧ s
        let inv: Vec<usize> =
            loc.carrier().elements().map(|y| incl.iter().position(|&i| i == loc.carrier().meet(y, s)).unwrap()).collect();
        let f = BLocaleMap::new(seg, loc, inv).unwrap();
        assert_eq!(f.direct_table(), incl.as_slice());
        assert!(check_dagger_is_direct_image(&f).unwrap().passed());
    }

    #[test]
    fn presheaf_of_free2() {
        let fm = free2();
        let g = sections_presheaf(&fm.locale).unwrap();
        let e10 = fm.element_of(&[1, 0]).unwrap();
        let e01 = fm.element_of(&[0, 1]).unwrap();
        let mut top = g.fiber(1).to_vec();
        top.sort();
        let mut want = vec![e10, e01];
        want.sort();
        assert_eq!(top, want);
        assert_eq!(g.fiber(0), &[0]);
        assert!(g.report.passed());
    }

    #[test]
    fn section_lemmas_on_free2() {
        let fm = free2();
        assert!(check_scalar_meets_on_sections(&fm.locale).unwrap().holds);
        assert!(check_support_of_section_meets(&fm.locale).unwrap().holds);
    }

    #[test]
    fn iso_check_on_free2() {
        let loc = Arc::new(free2().locale);
        let c = functor_s_iso_check(&loc, &loc).unwrap();
        assert!(c.exhaustive && c.all_module_homs);
        assert!(c.report.passed(), "{}", c.report);
        // all four functions {s, t} → {s, t}
        assert_eq!(c.maps, 4);
        assert_eq!(c.maps, c.sheaf_homs);
        assert!(c.non_sheaf_witnesses > 0);
    }

    #[test]
    fn meet_preservation_identity() {
        let loc = Arc::new(free2().locale);
        let bh = BasedHilbert::from_etale(&loc).unwrap();
        let id = SheafHom::new(loc.clone(), loc, (0..4).collect()).unwrap();
        let r = check_meet_preservation(&id, &bh, &bh).unwrap();
        assert!(r.passed(), "{r}");
    }
}
