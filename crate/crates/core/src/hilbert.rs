//! Inner products, Hilbert `B`-modules and Hilbert bases.

use std::collections::HashMap;
use std::sync::Arc;

use itertools::iproduct;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bmodule::{check_support_characterization, free_module, BLocale, BModule, FreeModule, Projection};
use crate::error::{Error, Result};
use crate::homs::ModuleHom;
use crate::lattice::verify_frame;
use crate::report::{LawCheck, LawReport, Witness};

/// Carriers up to this size are searched exhaustively for inner products with a basis.
pub const SEARCH_CARRIER_LIMIT: usize = 16;
/// Upper bound on candidate inner-product tables visited by the search.
pub const SEARCH_TABLE_LIMIT: u64 = 1 << 16;
/// Samples used to test `φ` when `B^Σ` is too large to materialize.
pub const PHI_SAMPLES: usize = 2000;

/// `B^Σ` is built explicitly for the projectivity clause up to this size.
pub const MATERIALIZE_LIMIT: usize = 256;

/// A `B`-valued form on a module, stored as a full table.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InnerProduct {
    n: usize,
    table: Vec<u16>,
}

impl InnerProduct {
    pub fn from_table(m: &BModule, table: Vec<Vec<usize>>) -> Result<Self> {
        let n = m.len();
        if table.len() != n || table.iter().any(|r| r.len() != n) {
            return Err(Error::Malformed(format!("inner product table must be {n}x{n}")));
        }
        let nb = m.base().len();
        let mut flat = Vec::with_capacity(n * n);
        for v in table.into_iter().flatten() {
            if v >= nb {
                return Err(Error::Malformed(format!("inner product value {v} not in base frame")));
            }
            flat.push(v as u16);
        }
        Ok(InnerProduct { n, table: flat })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> usize) -> Self {
        let table = iproduct!(0..n, 0..n).map(|(x, y)| f(x, y) as u16).collect();
        InnerProduct { n, table }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> usize {
        self.table[x * self.n + y] as usize
    }

    pub fn row(&self, x: usize) -> &[u16] {
        &self.table[x * self.n..(x + 1) * self.n]
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn table(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.n).map(|r| r.iter().map(|&v| v as usize).collect()).collect()
    }
}

/// Equivariance, join-linearity (binary and empty) and symmetry.
pub fn check_axioms(m: &BModule, ip: &InnerProduct) -> LawReport {
    let (b_, x_) = (&**m.base(), &**m.carrier());
    let n = x_.len();
    let mut r = LawReport::new("inner product axioms");
    r.push(LawCheck::over(
        "⟨bx,y⟩ = b ∧ ⟨x,y⟩",
        iproduct!(b_.elements(), 0..n, 0..n),
        |&(b, x, y)| ip.get(m.act(b, x), y) == b_.meet(b, ip.get(x, y)),
        |&(b, x, y)| Witness::new([b, x, y], format!("⟨{},{}⟩ ≠ b ∧ ⟨x,y⟩", m.bx(b, x), x_.label(y))),
    ));
    r.push(LawCheck::over("⟨0,y⟩ = 0", 0..n, |&y| ip.get(x_.bottom(), y) == b_.bottom(), |&y| {
        Witness::new([y], format!("⟨0,{}⟩ ≠ 0", x_.label(y)))
    }));
    r.push(LawCheck::over(
        "⟨x∨x',y⟩ = ⟨x,y⟩ ∨ ⟨x',y⟩",
        iproduct!(0..n, 0..n, 0..n),
        |&(x, z, y)| ip.get(x_.join(x, z), y) == b_.join(ip.get(x, y), ip.get(z, y)),
        |&(x, z, y)| Witness::new([x, z, y], format!("join-linearity fails for {}, {}, {}", x_.label(x), x_.label(z), x_.label(y))),
    ));
    r.push(LawCheck::over(
        "⟨x,y⟩ = ⟨y,x⟩",
        iproduct!(0..n, 0..n),
        |&(x, y)| ip.get(x, y) == ip.get(y, x),
        |&(x, y)| Witness::new([x, y], format!("⟨{0},{1}⟩ ≠ ⟨{1},{0}⟩", x_.label(x), x_.label(y))),
    ));
    r
}

/// `⟨x,−⟩ = ⟨y,−⟩ ⇒ x = y`.
pub fn check_nondegenerate(m: &BModule, ip: &InnerProduct) -> LawCheck {
    let mut seen: HashMap<&[u16], usize> = HashMap::new();
    for x in 0..ip.len() {
        if let Some(&y) = seen.get(ip.row(x)) {
            return LawCheck::fail(
                "non-degenerate",
                x as u64 + 1,
                Witness::new([y, x], format!("rows of {} and {} coincide", m.carrier().label(y), m.carrier().label(x))),
            );
        }
        seen.insert(ip.row(x), x);
    }
    LawCheck::pass("non-degenerate", ip.len() as u64)
}

/// `⟨x,−⟩ = ⟨y,−⟩ ⇒ ¬x = ¬y`, with `¬` the pseudo-complement of the carrier.
pub fn check_weakly_nondegenerate(m: &BModule, ip: &InnerProduct) -> LawCheck {
    let x_ = m.carrier();
    let mut classes: HashMap<&[u16], usize> = HashMap::new();
    for x in 0..ip.len() {
        let neg = x_.neg(x);
        match classes.get(ip.row(x)) {
            Some(&y) if x_.neg(y) != neg => {
                return LawCheck::fail(
                    "weakly non-degenerate",
                    x as u64 + 1,
                    Witness::new([y, x], format!("equal rows but ¬{} ≠ ¬{}", x_.label(y), x_.label(x))),
                );
            }
            Some(_) => {}
            None => {
                classes.insert(ip.row(x), x);
            }
        }
    }
    LawCheck::pass("weakly non-degenerate", ip.len() as u64)
}

/// `⟨x,x⟩ = 0 ⇒ x = 0`.
pub fn check_strict(m: &BModule, ip: &InnerProduct) -> LawCheck {
    let x_ = m.carrier();
    LawCheck::over("strict", x_.elements(), |&x| ip.get(x, x) != m.base().bottom() || x == x_.bottom(), |&x| {
        Witness::new([x], format!("⟨{0},{0}⟩ = 0", x_.label(x)))
    })
}

/// `⟨x,x⟩x = x`.
pub fn check_supported(m: &BModule, ip: &InnerProduct) -> LawCheck {
    let x_ = m.carrier();
    LawCheck::over("supported", x_.elements(), |&x| m.act(ip.get(x, x), x) == x, |&x| {
        Witness::new([x], format!("⟨{0},{0}⟩{0} ≠ {0}", x_.label(x)))
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HilbertFlags {
    pub nondegenerate: LawCheck,
    pub weakly_nondegenerate: LawCheck,
    pub strict: LawCheck,
    pub supported: LawCheck,
}

/// A pre-Hilbert `B`-module with its flags computed eagerly.
#[derive(Clone, Debug)]
pub struct HilbertModule {
    module: Arc<BModule>,
    inner: InnerProduct,
    flags: HilbertFlags,
}

impl HilbertModule {
    /// Fails with [`Error::InnerProductLaw`] unless all axioms hold.
    pub fn new(module: Arc<BModule>, inner: InnerProduct) -> Result<Self> {
        if inner.len() != module.len() {
            return Err(Error::Mismatch("inner product size differs from carrier".into()));
        }
        if let Some(w) = check_axioms(&module, &inner).witness() {
            return Err(Error::InnerProductLaw(w));
        }
        let flags = HilbertFlags {
            nondegenerate: check_nondegenerate(&module, &inner),
            weakly_nondegenerate: check_weakly_nondegenerate(&module, &inner),
            strict: check_strict(&module, &inner),
            supported: check_supported(&module, &inner),
        };
        Ok(HilbertModule { module, inner, flags })
    }

    pub fn module(&self) -> &BModule {
        &self.module
    }

    pub fn module_arc(&self) -> &Arc<BModule> {
        &self.module
    }

    pub fn inner(&self) -> &InnerProduct {
        &self.inner
    }

    #[inline]
    pub fn ip(&self, x: usize, y: usize) -> usize {
        self.inner.get(x, y)
    }

    pub fn flags(&self) -> &HilbertFlags {
        &self.flags
    }

    pub fn is_hilbert(&self) -> bool {
        self.flags.nondegenerate.holds
    }

    pub fn len(&self) -> usize {
        self.module.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Axioms followed by the four flags.
    pub fn report(&self) -> LawReport {
        let mut r = check_axioms(&self.module, &self.inner);
        r.subject = "Hilbert module".into();
        r.push(self.flags.nondegenerate.clone())
            .push(self.flags.weakly_nondegenerate.clone())
            .push(self.flags.strict.clone())
            .push(self.flags.supported.clone());
        r
    }

    /// `⋁_{s∈Σ} ⟨x,s⟩s`.
    pub fn reconstruct(&self, basis: &[usize], x: usize) -> usize {
        let x_ = self.module.carrier();
        x_.join_set(basis.iter().map(|&s| self.module.act(self.ip(x, s), s)))
    }

    /// `ψ(x) = (⟨x,s⟩)_{s∈Σ}`.
    pub fn coordinates(&self, basis: &[usize], x: usize) -> Vec<usize> {
        basis.iter().map(|&s| self.ip(x, s)).collect()
    }
}

/// The inner product `⟨x,y⟩ = spp(x ∧ y)` of an open `B`-locale.
pub fn inner_from_support(x: &BLocale) -> Result<HilbertModule> {
    let spp = x.support()?;
    let c = x.carrier();
    let ip = InnerProduct::from_fn(c.len(), |a, b| spp[c.meet(a, b)]);
    HilbertModule::new(x.module_arc().clone(), ip)
}

/// Whether `x = ⋁_{s∈Σ} ⟨x,s⟩s` for every `x`.
pub fn is_hilbert_basis(h: &HilbertModule, basis: &[usize]) -> LawCheck {
    let x_ = h.module().carrier();
    if basis.iter().any(|&s| s >= x_.len()) {
        return LawCheck::fail("Hilbert basis reconstruction", 0, Witness::text("basis element out of range"));
    }
    LawCheck::over("Hilbert basis reconstruction", x_.elements(), |&x| h.reconstruct(basis, x) == x, |&x| {
        Witness::new([x], format!("⋁⟨x,s⟩s = {} ≠ {}", x_.label(h.reconstruct(basis, x)), x_.label(x)))
    })
}

/// A Hilbert module together with a verified Hilbert basis (an indexed family,
/// repetitions allowed).
#[derive(Clone, Debug)]
pub struct BasedHilbert {
    pub hilbert: HilbertModule,
    pub basis: Vec<usize>,
}

impl BasedHilbert {
    pub fn new(hilbert: HilbertModule, basis: Vec<usize>) -> Result<Self> {
        let c = is_hilbert_basis(&hilbert, &basis);
        if let Some(w) = c.witness {
            return Err(Error::NoBasis(w));
        }
        Ok(BasedHilbert { hilbert, basis })
    }

    /// An étale locale with the support inner product and all local sections.
    pub fn from_etale(x: &BLocale) -> Result<Self> {
        if !x.is_etale()? {
            return Err(Error::NotEtale);
        }
        Self::new(inner_from_support(x)?, x.local_sections()?.to_vec())
    }

    /// As [`BasedHilbert::from_etale`] with only the join-irreducible sections.
    pub fn from_etale_irreducible(x: &BLocale) -> Result<Self> {
        if !x.is_etale()? {
            return Err(Error::NotEtale);
        }
        Self::new(inner_from_support(x)?, x.irreducible_sections()?)
    }

    pub fn module(&self) -> &BModule {
        self.hilbert.module()
    }

    pub fn gram(&self) -> Vec<Vec<usize>> {
        self.basis.iter().map(|&s| self.basis.iter().map(|&t| self.hilbert.ip(s, t)).collect()).collect()
    }
}

/// The retraction `φ: B^Σ → X`, `φ(f) = ⋁ f(s)s`, split by `ψ(x)(s) = ⟨x,s⟩`.
#[derive(Clone, Debug)]
pub struct ProjectivitySplit {
    pub free: FreeModule,
    pub phi: ModuleHom,
    pub psi: ModuleHom,
    pub report: LawReport,
    /// Whether `ψ ∘ φ = id` as well, i.e. the module is genuinely free on `Σ`.
    pub free_on_basis: bool,
}

pub fn projectivity_split(h: &HilbertModule, basis: &[usize]) -> Result<ProjectivitySplit> {
    if let Some(w) = is_hilbert_basis(h, basis).witness {
        return Err(Error::NoBasis(w));
    }
    let m = h.module();
    let names = basis.iter().map(|&s| m.carrier().label(s).to_string()).collect();
    let free = free_module(m.base().clone(), names)?;
    let fl = &free.locale;
    let phi_table: Vec<usize> = fl
        .carrier()
        .elements()
        .map(|f| m.carrier().join_set(basis.iter().enumerate().map(|(i, &s)| m.act(free.coord(f, i), s))))
        .collect();
    let psi_table: Vec<usize> = m
        .carrier()
        .elements()
        .map(|x| free.element_of(&h.coordinates(basis, x)).expect("B^Σ holds every function"))
        .collect();
    let phi = ModuleHom::unchecked(fl.module_arc().clone(), h.module_arc().clone(), phi_table)?;
    let psi = ModuleHom::unchecked(h.module_arc().clone(), fl.module_arc().clone(), psi_table)?;
    let mut report = LawReport::new("projectivity split");
    report.push(phi.laws().first_failure().cloned().unwrap_or_else(|| LawCheck::pass("φ", 1)).renamed("φ is a module homomorphism"));
    report.push(psi.laws().first_failure().cloned().unwrap_or_else(|| LawCheck::pass("ψ", 1)).renamed("ψ is a module homomorphism"));
    report.push(LawCheck::over("φ∘ψ = id", m.carrier().elements(), |&x| phi.apply(psi.apply(x)) == x, |&x| {
        Witness::new([x], format!("φ(ψ({})) differs", m.carrier().label(x)))
    }));
    let free_on_basis = fl.carrier().elements().all(|f| psi.apply(phi.apply(f)) == f);
    Ok(ProjectivitySplit { free, phi, psi, report, free_on_basis })
}

/// Projectivity without materializing `B^Σ`: `φ∘ψ = id` and `ψ` a homomorphism
/// exhaustively, `φ` a homomorphism on seeded random samples.
fn projectivity_symbolic(h: &HilbertModule, basis: &[usize]) -> LawReport {
    let m = h.module();
    let (b_, x_) = (&**m.base(), &**m.carrier());
    let psi: Vec<Vec<usize>> = x_.elements().map(|x| h.coordinates(basis, x)).collect();
    let phi = |f: &[usize]| x_.join_set(basis.iter().zip(f).map(|(&s, &c)| m.act(c, s)));
    let mut r = LawReport::new("projectivity (symbolic)");
    r.push(LawCheck::over("φ∘ψ = id", x_.elements(), |&x| phi(&psi[x]) == x, |&x| Witness::new([x], "φ(ψ(x)) ≠ x")));
    r.push(LawCheck::over(
        "ψ is a module homomorphism",
        iproduct!(x_.elements(), x_.elements(), b_.elements()),
        |&(x, y, b)| {
            let j = x_.join(x, y);
            psi[j].iter().zip(&psi[x]).zip(&psi[y]).all(|((&pj, &px), &py)| pj == b_.join(px, py))
                && psi[m.act(b, x)].iter().zip(&psi[x]).all(|(&pb, &px)| pb == b_.meet(b, px))
        },
        |&(x, y, b)| Witness::new([x, y, b], "ψ fails join preservation or equivariance"),
    ));
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let k = basis.len();
    let samples: Vec<(Vec<usize>, Vec<usize>, usize)> = (0..PHI_SAMPLES)
        .map(|_| {
            let f = (0..k).map(|_| rng.gen_range(0..b_.len())).collect();
            let g = (0..k).map(|_| rng.gen_range(0..b_.len())).collect();
            (f, g, rng.gen_range(0..b_.len()))
        })
        .collect();
    r.push(LawCheck::over(
        "φ is a module homomorphism (sampled)",
        samples,
        |(f, g, b)| {
            let fg: Vec<usize> = f.iter().zip(g).map(|(&a, &c)| b_.join(a, c)).collect();
            let bf: Vec<usize> = f.iter().map(|&a| b_.meet(*b, a)).collect();
            phi(&fg) == x_.join(phi(f), phi(g)) && phi(&bf) == m.act(*b, phi(f))
        },
        |_| Witness::text("φ fails on a sampled pair"),
    ));
    r
}

/// The eight consequences of having a Hilbert basis, clause by clause.
pub fn basis_properties(h: &HilbertModule, basis: &[usize]) -> Result<LawReport> {
    if let Some(w) = is_hilbert_basis(h, basis).witness {
        return Err(Error::NoBasis(w));
    }
    let m = h.module();
    let (b_, x_) = (&**m.base(), &**m.carrier());
    let n = x_.len();
    let mut r = LawReport::new("Hilbert basis properties");

    // (1) projectivity
    let fits = (b_.len() as u128).checked_pow(basis.len() as u32).is_some_and(|s| s <= MATERIALIZE_LIMIT as u128);
    let proj = if fits { projectivity_split(h, basis)?.report } else { projectivity_symbolic(h, basis) };
    r.push(LawCheck::from_bool("(1) projective: retract of B^Σ", proj.passed(), || proj.witness().unwrap()));

    // (2) cover
    let cover = x_.join_set(basis.iter().copied());
    r.push(LawCheck::from_bool("(2) ⋁Σ = 1", cover == x_.top(), || {
        Witness::new([cover], format!("⋁Σ = {}", x_.label(cover)))
    }));

    // (3) rows on Σ separate elements
    let mut seen: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut clash = None;
    for x in x_.elements() {
        if let Some(&y) = seen.get(&h.coordinates(basis, x)) {
            clash = Some((y, x));
            break;
        }
        seen.insert(h.coordinates(basis, x), x);
    }
    r.push(LawCheck::from_bool("(3) ⟨x,s⟩ = ⟨y,s⟩ on Σ ⇒ x = y", clash.is_none(), || {
        let (y, x) = clash.unwrap();
        Witness::new([y, x], "distinct elements with equal coordinates")
    }));

    // (4) ⟨x,y⟩ = ⋁_s ⟨x,s⟩ ∧ ⟨s,y⟩
    r.push(clause4(h, basis).renamed("(4) ⟨x,y⟩ = ⋁ ⟨x,s⟩∧⟨s,y⟩"));

    // (5) supported
    r.push(check_supported(m, h.inner()).renamed("(5) ⟨x,x⟩x = x"));

    // (6)
    r.push(LawCheck::over(
        "(6) ⟨x,y⟩ ≤ ⟨x,x⟩",
        iproduct!(0..n, 0..n),
        |&(x, y)| b_.leq(h.ip(x, y), h.ip(x, x)),
        |&(x, y)| Witness::new([x, y], "⟨x,y⟩ ≰ ⟨x,x⟩"),
    ));

    // (7) x ≤ s ⇔ x = ⟨x,x⟩s ⇔ x = ⟨x,s⟩s
    r.push(LawCheck::over(
        "(7) x ≤ s ⇔ x = ⟨x,x⟩s ⇔ x = ⟨x,s⟩s",
        iproduct!(basis.iter().copied(), 0..n),
        |&(s, x)| {
            let a = x_.leq(x, s);
            let b = m.act(h.ip(x, x), s) == x;
            let c = m.act(h.ip(x, s), s) == x;
            a == b && b == c
        },
        |&(s, x)| Witness::new([s, x], format!("conditions disagree for s={}, x={}", x_.label(s), x_.label(x))),
    ));

    // (8) Gram matrix is a projection matrix
    let k = basis.len();
    let g = |i: usize, j: usize| h.ip(basis[i], basis[j]);
    r.push(LawCheck::over("(8) M = Mᵀ", iproduct!(0..k, 0..k), |&(i, j)| g(i, j) == g(j, i), |&(i, j)| {
        Witness::new([basis[i], basis[j]], "Gram matrix not symmetric")
    }));
    r.push(LawCheck::over(
        "(8) M = M²",
        iproduct!(0..k, 0..k),
        |&(i, j)| b_.join_set((0..k).map(|u| b_.meet(g(i, u), g(u, j)))) == g(i, j),
        |&(i, j)| Witness::new([basis[i], basis[j]], "Gram matrix not idempotent"),
    ));
    Ok(r)
}

fn clause4(h: &HilbertModule, basis: &[usize]) -> LawCheck {
    let b_ = h.module().base();
    let n = h.len();
    let coords: Vec<Vec<usize>> = (0..n).map(|x| h.coordinates(basis, x)).collect();
    LawCheck::over(
        "⟨x,y⟩ = ⋁ ⟨x,s⟩∧⟨s,y⟩",
        iproduct!(0..n, 0..n),
        |&(x, y)| b_.join_set(coords[x].iter().zip(&coords[y]).map(|(&a, &c)| b_.meet(a, c))) == h.ip(x, y),
        |&(x, y)| Witness::new([x, y], "inner product does not factor through Σ"),
    )
}

/// Converse clause: non-degenerate and clause (4) together force a Hilbert basis.
pub fn converse_basis_clause(h: &HilbertModule, basis: &[usize]) -> LawCheck {
    let premises = h.is_hilbert() && clause4(h, basis).holds;
    let basis_ok = is_hilbert_basis(h, basis);
    LawCheck::from_bool("non-degenerate ∧ (4) ⇒ Hilbert basis", !premises || basis_ok.holds, || {
        basis_ok.witness.clone().unwrap()
    })
}

/// Stability holds on every non-degenerate module.
pub fn stability_from_nondegeneracy(h: &HilbertModule) -> LawCheck {
    let st = h.module().stability();
    LawCheck::from_bool("non-degenerate ⇒ bx = b1 ∧ x", !h.is_hilbert() || st.holds, || st.witness.clone().unwrap())
}

/// Reads the support `spp(x) = ⟨x,x⟩` off a supported module whose carrier is a
/// frame, and confirms it makes the module an open `B`-locale.
pub fn support_from_inner(h: &HilbertModule) -> Result<Projection> {
    if let Some(w) = h.flags().supported.witness.clone() {
        return Err(Error::NotSupported(w));
    }
    let m = h.module();
    if let Some(w) = verify_frame(m.carrier()).witness() {
        return Err(Error::NotAFrame(w));
    }
    let spp: Vec<usize> = m.carrier().elements().map(|x| h.ip(x, x)).collect();
    let ch = check_support_characterization(m, &spp);
    if let Some(w) = ch.witness() {
        return Err(Error::NotStable(w));
    }
    let loc = BLocale::new(m.clone())?;
    let p = loc.projection().clone();
    if !p.open || p.support != spp {
        return Err(Error::Mismatch("diagonal of the inner product is not the support".into()));
    }
    Ok(p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Decision {
    Yes,
    No,
    Undecided,
}

impl Decision {
    fn from_bool(b: bool) -> Self {
        if b {
            Decision::Yes
        } else {
            Decision::No
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivalenceVerdict {
    pub pre_hilbert_with_basis: Decision,
    pub hilbert_with_basis: Decision,
    pub etale: Decision,
    /// All decided verdicts coincide.
    pub consistent: bool,
    /// Inner-product tables visited by the search (0 when not needed).
    pub searched: u64,
}

/// Outcome of exhaustively searching a small module for pre-Hilbert structures
/// admitting a Hilbert basis.
#[derive(Clone, Debug)]
pub struct BasisSearch {
    pub pre_hilbert: Option<(InnerProduct, Vec<usize>)>,
    pub hilbert: Option<(InnerProduct, Vec<usize>)>,
    pub exhausted: bool,
    pub visited: u64,
}

/// Every join-linear symmetric form is fixed by its values on pairs of
/// join-irreducibles, so enumerating those covers all pre-Hilbert structures.
/// For a fixed form, a basis exists iff the set of all `s` with `⟨x,s⟩s ≤ x`
/// for every `x` is one: any basis lies inside that set and reconstruction is
/// monotone in `Σ`.
pub fn search_hilbert_structures(m: &BModule) -> BasisSearch {
    let (b_, x_) = (&**m.base(), &**m.carrier());
    let mut out = BasisSearch { pre_hilbert: None, hilbert: None, exhausted: false, visited: 0 };
    if x_.len() > SEARCH_CARRIER_LIMIT {
        return out;
    }
    let ji = x_.join_irreducibles();
    let pairs: Vec<(usize, usize)> = (0..ji.len()).flat_map(|i| (i..ji.len()).map(move |j| (i, j))).collect();
    let total = (b_.len() as u128).checked_pow(pairs.len() as u32);
    if total.is_none_or(|t| t > SEARCH_TABLE_LIMIT as u128) {
        return out;
    }
    let total = total.unwrap() as u64;
    let below: Vec<Vec<usize>> =
        x_.elements().map(|x| (0..ji.len()).filter(|&i| x_.leq(ji[i], x)).collect()).collect();
    let mut g = vec![vec![0usize; ji.len()]; ji.len()];
    for code in 0..total {
        out.visited += 1;
        let mut c = code;
        for &(i, j) in &pairs {
            let v = (c % b_.len() as u64) as usize;
            c /= b_.len() as u64;
            g[i][j] = v;
            g[j][i] = v;
        }
        let ip = InnerProduct::from_fn(x_.len(), |x, y| {
            b_.join_set(iproduct!(&below[x], &below[y]).map(|(&i, &j)| g[i][j]))
        });
        if !check_axioms(m, &ip).passed() {
            continue;
        }
        let cands: Vec<usize> = x_
            .elements()
            .filter(|&s| x_.elements().all(|x| x_.leq(m.act(ip.get(x, s), s), x)))
            .collect();
        let spans = x_
            .elements()
            .all(|x| x_.join_set(cands.iter().map(|&s| m.act(ip.get(x, s), s))) == x);
        if !spans {
            continue;
        }
        let nondeg = check_nondegenerate(m, &ip).holds;
        if out.pre_hilbert.is_none() {
            out.pre_hilbert = Some((ip.clone(), cands.clone()));
        }
        if nondeg {
            out.hilbert = Some((ip, cands));
            break;
        }
    }
    out.exhausted = out.hilbert.is_some() || out.visited == total;
    out
}

/// Decides, for a module, (1) pre-Hilbert structure with a basis, (2) Hilbert
/// structure with a basis, (3) étale `B`-locale, and whether they agree.
pub fn etale_equivalence_check(m: &BModule) -> EquivalenceVerdict {
    let etale = BLocale::new(m.clone()).ok().filter(|l| l.is_etale().unwrap_or(false));
    if let Some(loc) = etale {
        if let Ok(h) = inner_from_support(&loc) {
            let sections = loc.local_sections().expect("open").to_vec();
            let is_basis = is_hilbert_basis(&h, &sections).holds;
            let pre = Decision::from_bool(is_basis);
            let hil = Decision::from_bool(is_basis && h.is_hilbert());
            return EquivalenceVerdict {
                consistent: pre == Decision::Yes && hil == Decision::Yes,
                pre_hilbert_with_basis: pre,
                hilbert_with_basis: hil,
                etale: Decision::Yes,
                searched: 0,
            };
        }
    }
    let search = search_hilbert_structures(m);
    let decide = |found: bool| {
        if found {
            Decision::Yes
        } else if search.exhausted {
            Decision::No
        } else {
            Decision::Undecided
        }
    };
    let pre = decide(search.pre_hilbert.is_some());
    let hil = decide(search.hilbert.is_some());
    let consistent = [pre, hil].iter().all(|&d| d != Decision::Yes);
    EquivalenceVerdict { pre_hilbert_with_basis: pre, hilbert_with_basis: hil, etale: Decision::No, consistent, searched: search.visited }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bmodule::module_from_map;
    use crate::lattice::Frame;

    fn free2() -> FreeModule {
        free_module(Arc::new(Frame::two()), vec!["s".into(), "t".into()]).unwrap()
    }

    fn chain3() -> BLocale {
        module_from_map(Arc::new(Frame::two()), &Frame::chain3(), &[0, 2]).unwrap()
    }

    #[test]
    fn free2_inner_product_values() {
        let fm = free2();
        let h = inner_from_support(&fm.locale).unwrap();
        let e10 = fm.element_of(&[1, 0]).unwrap();
        let e01 = fm.element_of(&[0, 1]).unwrap();
        let e11 = fm.element_of(&[1, 1]).unwrap();
        assert_eq!(h.ip(e10, e01), 0);
        assert_eq!(h.ip(e10, e11), 1);
        for x in 0..4 {
            assert_eq!(h.ip(x, x), fm.locale.spp(x));
        }
        let r = h.report();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn chain3_is_degenerate_but_weakly_nondegenerate() {
        let loc = chain3();
        let h = inner_from_support(&loc).unwrap();
        // ⟨u,1⟩ = 1 = ⟨1,1⟩
        assert_eq!(h.ip(1, 2), 1);
        assert_eq!(h.ip(2, 2), 1);
        assert!(!h.flags().nondegenerate.holds);
        assert_eq!(h.flags().nondegenerate.witness.as_ref().unwrap().indices, vec![1, 2]);
        assert!(h.flags().weakly_nondegenerate.holds);
        assert!(h.flags().supported.holds);
        assert!(check_axioms(h.module(), h.inner()).passed());
    }

    #[test]
    fn trivial_module_passes_everything() {
        let t = module_from_map(Arc::new(Frame::two()), &Frame::trivial(), &[0, 0]).unwrap();
        let h = inner_from_support(&t).unwrap();
        assert!(h.report().passed());
        assert!(is_hilbert_basis(&h, &[0]).holds);
        let split = projectivity_split(&h, &[0]).unwrap();
        assert!(split.report.passed());
        assert_eq!(split.phi.table().len(), 2);
    }

    #[test]
    fn unit_vectors_form_a_basis() {
        let fm = free2();
        let h = inner_from_support(&fm.locale).unwrap();
        let units = fm.unit_vectors();
        assert!(is_hilbert_basis(&h, &units).holds);
        assert!(!is_hilbert_basis(&h, &[]).holds);
        let r = basis_properties(&h, &units).unwrap();
        assert!(r.passed(), "{r}");
        let sections = fm.locale.local_sections().unwrap();
        assert!(is_hilbert_basis(&h, sections).holds);
        assert!(basis_properties(&h, sections).unwrap().passed());
    }

    #[test]
    fn gram_of_unit_vectors_is_identity() {
        let fm = free2();
        let h = inner_from_support(&fm.locale).unwrap();
        let based = BasedHilbert::new(h, fm.unit_vectors()).unwrap();
        assert_eq!(based.gram(), vec![vec![1, 0], vec![0, 1]]);
    }

    #[test]
    fn unit_vector_split_is_free() {
        let fm = free2();
        let h = inner_from_support(&fm.locale).unwrap();
        let split = projectivity_split(&h, &fm.unit_vectors()).unwrap();
        assert!(split.report.passed());
        assert!(split.free_on_basis);
        // all three sections: a retract, not free on them
        let split = projectivity_split(&h, fm.locale.local_sections().unwrap()).unwrap();
        assert!(split.report.passed());
        assert!(!split.free_on_basis);
    }

    #[test]
    fn support_from_inner_round_trip() {
        let fm = free2();
        let h = inner_from_support(&fm.locale).unwrap();
        let p = support_from_inner(&h).unwrap();
        assert_eq!(p.support, fm.locale.support().unwrap());
        let c = chain3();
        let h = inner_from_support(&c).unwrap();
        let p = support_from_inner(&h).unwrap();
        assert_eq!(p.support, vec![0, 1, 1]);
    }

    #[test]
    fn equivalence_verdicts() {
        let v = etale_equivalence_check(free2().locale.module());
        assert_eq!((v.pre_hilbert_with_basis, v.hilbert_with_basis, v.etale), (Decision::Yes, Decision::Yes, Decision::Yes));
        assert!(v.consistent);
        let v = etale_equivalence_check(chain3().module());
        assert_eq!((v.pre_hilbert_with_basis, v.hilbert_with_basis, v.etale), (Decision::No, Decision::No, Decision::No));
        assert!(v.consistent);
        assert!(v.searched > 0);
        let t = module_from_map(Arc::new(Frame::two()), &Frame::trivial(), &[0, 0]).unwrap();
        let v = etale_equivalence_check(t.module());
        assert_eq!(v.etale, Decision::Yes);
        assert!(v.consistent);
    }

    #[test]
    fn search_finds_structures_on_free_module() {
        let s = search_hilbert_structures(free2().locale.module());
        assert!(s.exhausted);
        assert!(s.hilbert.is_some());
    }

    #[test]
    fn converse_and_lemma_hold_on_free2() {
        let fm = free2();
        let h = inner_from_support(&fm.locale).unwrap();
        assert!(converse_basis_clause(&h, &fm.unit_vectors()).holds);
        assert!(converse_basis_clause(&h, &[]).holds);
        assert!(stability_from_nondegeneracy(&h).holds);
    }
}
