//! `B`-modules, `B`-locales, projections, supports, local sections and étale-ness.

use std::sync::Arc;

use itertools::iproduct;

use crate::error::{Error, Result};
use crate::lattice::{verify_frame, Frame, Lattice};
use crate::report::{LawCheck, LawReport, Witness};

/// Largest function module `B^S` that is materialized.
pub const MAX_FREE: usize = 4096;

/// A finite complete lattice `X` with an action `B × X → X` of a frame `B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BModule {
    base: Arc<Frame>,
    carrier: Arc<Lattice>,
    /// Row-major `|B| × |X|`.
    action: Vec<u16>,
}

impl BModule {
    /// Builds a module and rejects it if any module law fails.
    pub fn new(base: Arc<Frame>, carrier: Arc<Lattice>, action: Vec<Vec<usize>>) -> Result<Self> {
        let m = Self::raw(base, carrier, action)?;
        if let Some(w) = m.laws().witness() {
            return Err(Error::ModuleLaw(w));
        }
        Ok(m)
    }

    /// Builds a module checking only the table shape; used for adversarial fixtures.
    pub fn raw(base: Arc<Frame>, carrier: Arc<Lattice>, action: Vec<Vec<usize>>) -> Result<Self> {
        let (nb, nx) = (base.len(), carrier.len());
        if action.len() != nb || action.iter().any(|r| r.len() != nx) {
            return Err(Error::Malformed(format!("action table must be {nb}x{nx}")));
        }
        let mut flat = Vec::with_capacity(nb * nx);
        for v in action.into_iter().flatten() {
            if v >= nx {
                return Err(Error::Malformed(format!("action entry {v} out of range")));
            }
            flat.push(v as u16);
        }
        Ok(BModule { base, carrier, action: flat })
    }

    /// The module structure induced by a map `f: B → X` via `bx = f(b) ∧ x`.
    /// No laws are checked.
    pub fn from_pstar(base: Arc<Frame>, carrier: Arc<Lattice>, pstar: &[usize]) -> Self {
        let nx = carrier.len();
        let mut action = Vec::with_capacity(base.len() * nx);
        for b in base.elements() {
            for x in 0..nx {
                action.push(carrier.meet(pstar[b], x) as u16);
            }
        }
        BModule { base, carrier, action }
    }

    pub fn base(&self) -> &Arc<Frame> {
        &self.base
    }

    pub fn carrier(&self) -> &Arc<Lattice> {
        &self.carrier
    }

    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn act(&self, b: usize, x: usize) -> usize {
        self.action[b * self.carrier.len() + x] as usize
    }

    /// `b ↦ b1`.
    pub fn pstar(&self) -> Vec<usize> {
        self.base.elements().map(|b| self.act(b, self.carrier.top())).collect()
    }

    pub fn action_table(&self) -> Vec<Vec<usize>> {
        self.action.chunks(self.carrier.len()).map(|r| r.iter().map(|&v| v as usize).collect()).collect()
    }

    pub(crate) fn bx(&self, b: usize, x: usize) -> String {
        format!("{}·{}", self.base.label(b), self.carrier.label(x))
    }

    /// Join preservation in each variable (including empty joins), associativity and unit.
    pub fn laws(&self) -> LawReport {
        let (b_, x_) = (&*self.base, &*self.carrier);
        let (nb, nx) = (b_.len(), x_.len());
        let mut r = LawReport::new("module laws");
        r.push(LawCheck::over(
            "action preserves joins in B",
            iproduct!(0..nb, 0..nb, 0..nx),
            |&(b, c, x)| self.act(b_.join(b, c), x) == x_.join(self.act(b, x), self.act(c, x)),
            |&(b, c, x)| Witness::new([b, c, x], format!("(b∨c)x ≠ bx∨cx for b={}, c={}, x={}", b_.label(b), b_.label(c), x_.label(x))),
        ));
        r.push(LawCheck::over("0x = 0", 0..nx, |&x| self.act(b_.bottom(), x) == x_.bottom(), |&x| {
            Witness::new([x], format!("0·{} ≠ 0", x_.label(x)))
        }));
        r.push(LawCheck::over(
            "action preserves joins in X",
            iproduct!(0..nb, 0..nx, 0..nx),
            |&(b, x, y)| self.act(b, x_.join(x, y)) == x_.join(self.act(b, x), self.act(b, y)),
            |&(b, x, y)| Witness::new([b, x, y], format!("b(x∨y) ≠ bx∨by for b={}, x={}, y={}", b_.label(b), x_.label(x), x_.label(y))),
        ));
        r.push(LawCheck::over("b0 = 0", 0..nb, |&b| self.act(b, x_.bottom()) == x_.bottom(), |&b| {
            Witness::new([b], format!("{}·0 ≠ 0", b_.label(b)))
        }));
        r.push(LawCheck::over(
            "associativity a(bx) = (a∧b)x",
            iproduct!(0..nb, 0..nb, 0..nx),
            |&(a, b, x)| self.act(a, self.act(b, x)) == self.act(b_.meet(a, b), x),
            |&(a, b, x)| Witness::new([a, b, x], format!("a(bx) ≠ (a∧b)x for a={}, b={}, x={}", b_.label(a), b_.label(b), x_.label(x))),
        ));
        r.push(LawCheck::over("unit 1x = x", 0..nx, |&x| self.act(b_.top(), x) == x, |&x| {
            Witness::new([x], format!("1·{} ≠ {0}", x_.label(x)))
        }));
        r
    }

    /// `bx = b1 ∧ x` for all `b`, `x`.
    pub fn stability(&self) -> LawCheck {
        let top = self.carrier.top();
        LawCheck::over(
            "stability bx = b1 ∧ x",
            iproduct!(self.base.elements(), self.carrier.elements()),
            |&(b, x)| self.act(b, x) == self.carrier.meet(self.act(b, top), x),
            |&(b, x)| Witness::new([b, x], format!("{} ≠ b1 ∧ x", self.bx(b, x))),
        )
    }
}

/// Module laws followed by stability; passes exactly on `B`-locale actions
/// (given a frame carrier).
pub fn check_stability(m: &BModule) -> LawReport {
    let mut r = m.laws();
    r.subject = "stability".into();
    r.push(m.stability());
    r
}

/// The inverse image `p*: B → X` of the projection and the candidate support.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Projection {
    pub pstar: Vec<usize>,
    /// `spp(x) = ⋀{b : x ≤ b1}`, computed for every module; meaningful when `open`.
    pub support: Vec<usize>,
    pub open: bool,
    pub report: LawReport,
    /// Whether the support happens to preserve finite meets; informational only.
    pub support_preserves_meets: bool,
}

impl Projection {
    pub fn compute(m: &BModule) -> Self {
        let (b_, x_) = (&*m.base, &*m.carrier);
        let pstar = m.pstar();
        let support: Vec<usize> =
            x_.elements().map(|x| b_.meet_set(b_.elements().filter(|&b| x_.leq(x, pstar[b])))).collect();
        let mut report = LawReport::new("support");
        let unit = LawCheck::over("spp(x)x = x", x_.elements(), |&x| m.act(support[x], x) == x, |&x| {
            Witness::new([x], format!("spp({0})·{0} ≠ {0}", x_.label(x)))
        });
        let equiv = LawCheck::over(
            "spp(bx) = b ∧ spp(x)",
            iproduct!(b_.elements(), x_.elements()),
            |&(b, x)| support[m.act(b, x)] == b_.meet(b, support[x]),
            |&(b, x)| Witness::new([b, x], format!("spp({}) ≠ {} ∧ spp({})", m.bx(b, x), b_.label(b), x_.label(x))),
        );
        let open = unit.holds && equiv.holds;
        report.push(unit).push(equiv);
        if open {
            report.push(LawCheck::over(
                "spp monotone",
                iproduct!(x_.elements(), x_.elements()),
                |&(x, y)| !x_.leq(x, y) || b_.leq(support[x], support[y]),
                |&(x, y)| Witness::new([x, y], "x ≤ y but spp(x) ≰ spp(y)"),
            ));
            report.push(LawCheck::over(
                "spp ⊣ p*",
                iproduct!(x_.elements(), b_.elements()),
                |&(x, b)| b_.leq(support[x], b) == x_.leq(x, pstar[b]),
                |&(x, b)| Witness::new([x, b], format!("spp({}) ≤ {} disagrees with x ≤ b1", x_.label(x), b_.label(b))),
            ));
            report.push(LawCheck::over("counit spp(b1) ≤ b", b_.elements(), |&b| b_.leq(support[pstar[b]], b), |&b| {
                Witness::new([b], format!("spp({}1) ≰ {0}", b_.label(b)))
            }));
            report.push(LawCheck::over(
                "spp preserves joins",
                iproduct!(x_.elements(), x_.elements()),
                |&(x, y)| support[x_.join(x, y)] == b_.join(support[x], support[y]),
                |&(x, y)| Witness::new([x, y], "spp(x∨y) ≠ spp(x)∨spp(y)"),
            ));
            report.push(LawCheck::over("spp(0) = 0", [x_.bottom()], |&x| support[x] == b_.bottom(), |_| {
                Witness::text("spp(0) ≠ 0")
            }));
        }
        report.extend(open_conditions(m, &support));
        let support_preserves_meets = support[x_.top()] == b_.top()
            && iproduct!(x_.elements(), x_.elements())
                .all(|(x, y)| support[x_.meet(x, y)] == b_.meet(support[x], support[y]));
        Projection { pstar, support, open, report, support_preserves_meets }
    }
}

/// The three equivalent conditions on a candidate support:
/// `spp(x)1 ≥ x`, `spp(x)x ≥ x`, `spp(x)x = x`.
pub fn open_conditions(m: &BModule, spp: &[usize]) -> LawReport {
    let x_ = &*m.carrier;
    let top = x_.top();
    let mut r = LawReport::new("open-map conditions");
    let c1: Vec<bool> = x_.elements().map(|x| x_.leq(x, m.act(spp[x], top))).collect();
    let c2: Vec<bool> = x_.elements().map(|x| x_.leq(x, m.act(spp[x], x))).collect();
    let c3: Vec<bool> = x_.elements().map(|x| m.act(spp[x], x) == x).collect();
    let all = |v: &[bool]| v.iter().all(|&b| b);
    let first_bad = |v: &[bool]| v.iter().position(|&b| !b).unwrap_or(0);
    r.push(LawCheck::from_bool("spp(x)1 ≥ x", all(&c1), || Witness::new([first_bad(&c1)], "spp(x)1 ≱ x")));
    r.push(LawCheck::from_bool("spp(x)x ≥ x", all(&c2), || Witness::new([first_bad(&c2)], "spp(x)x ≱ x")));
    r.push(LawCheck::from_bool("spp(x)x = x (strong)", all(&c3), || Witness::new([first_bad(&c3)], "spp(x)x ≠ x")));
    let agree = all(&c1) == all(&c2) && all(&c2) == all(&c3);
    r.push(LawCheck::from_bool("open-map conditions agree", agree, || {
        Witness::text(format!("verdicts {} / {} / {}", all(&c1), all(&c2), all(&c3)))
    }));
    r
}

/// A frame with a stable `B`-module structure, with its projection, support,
/// openness verdict and (when open) local sections computed eagerly.
#[derive(Clone, Debug)]
pub struct BLocale {
    module: Arc<BModule>,
    projection: Projection,
    sections: Option<Vec<usize>>,
    etale: bool,
}

impl BLocale {
    /// Validates module laws, frame laws on the carrier and stability.
    pub fn new(module: BModule) -> Result<Self> {
        if let Some(w) = verify_frame(&module.carrier).witness() {
            return Err(Error::NotAFrame(w));
        }
        Self::over_verified_frame(module)
    }

    /// As [`BLocale::new`] when the carrier is known to be a frame.
    pub fn over_frame(base: Arc<Frame>, carrier: Frame, action: Vec<Vec<usize>>) -> Result<Self> {
        let m = BModule::raw(base, Arc::new(carrier.into_lattice()), action)?;
        Self::over_verified_frame(m)
    }

    pub(crate) fn over_verified_frame(module: BModule) -> Result<Self> {
        if let Some(w) = module.laws().witness() {
            return Err(Error::ModuleLaw(w));
        }
        let st = module.stability();
        if let Some(w) = st.witness {
            return Err(Error::NotStable(w));
        }
        Ok(Self::assemble(module))
    }

    fn assemble(module: BModule) -> Self {
        let projection = Projection::compute(&module);
        let sections = projection.open.then(|| compute_sections(&module, &projection.support));
        let etale = sections.as_ref().is_some_and(|s| module.carrier.join_set(s.iter().copied()) == module.carrier.top());
        BLocale { module: Arc::new(module), projection, sections, etale }
    }

    pub fn module(&self) -> &BModule {
        &self.module
    }

    pub fn module_arc(&self) -> &Arc<BModule> {
        &self.module
    }

    pub fn base(&self) -> &Arc<Frame> {
        &self.module.base
    }

    pub fn carrier(&self) -> &Lattice {
        &self.module.carrier
    }

    pub fn len(&self) -> usize {
        self.module.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn act(&self, b: usize, x: usize) -> usize {
        self.module.act(b, x)
    }

    pub fn projection(&self) -> &Projection {
        &self.projection
    }

    pub fn is_open(&self) -> bool {
        self.projection.open
    }

    /// The support `spp = p_!`.
    pub fn support(&self) -> Result<&[usize]> {
        if self.projection.open {
            Ok(&self.projection.support)
        } else {
            Err(Error::NotOpen)
        }
    }

    pub fn spp(&self, x: usize) -> usize {
        self.projection.support[x]
    }

    pub fn local_sections(&self) -> Result<&[usize]> {
        self.sections.as_deref().ok_or(Error::NotOpen)
    }

    pub fn is_etale(&self) -> Result<bool> {
        if self.projection.open {
            Ok(self.etale)
        } else {
            Err(Error::NotOpen)
        }
    }

    /// Local sections that are join-irreducible in the carrier. For an étale
    /// locale these are all join-irreducibles and form a Hilbert basis.
    pub fn irreducible_sections(&self) -> Result<Vec<usize>> {
        let sections = self.local_sections()?;
        let ji = self.carrier().join_irreducibles();
        Ok(sections.iter().copied().filter(|s| ji.binary_search(s).is_ok()).collect())
    }

    /// The open sublocale `↓s` with `B`-action `bx = bs ∧ x`, and the index in
    /// this locale of each of its elements.
    pub fn down_segment(&self, s: usize) -> Result<(BLocale, Vec<usize>)> {
        let x_ = self.carrier();
        let items: Vec<usize> = x_.elements().filter(|&x| x_.leq(x, s)).collect();
        let (lat, items) =
            Lattice::from_family(items, |&a, &b| x_.join(a, b), |&a, &b| x_.meet(a, b), |&a| x_.label(a).to_string())?;
        let sub_of = |v: usize| items.iter().position(|&i| i == v).expect("closed");
        let pstar: Vec<usize> = self.base().elements().map(|b| sub_of(self.act(b, s))).collect();
        let frame = Frame::new(lat)?;
        let loc = module_from_map(self.base().clone(), &frame, &pstar)?;
        Ok((loc, items))
    }
}

fn compute_sections(m: &BModule, spp: &[usize]) -> Vec<usize> {
    let x_ = &*m.carrier;
    x_.elements()
        .filter(|&s| x_.elements().filter(|&x| x_.leq(x, s)).all(|x| m.act(spp[x], s) == x))
        .collect()
}

/// Checks that `f: B → X` preserves `0`, `1`, binary joins and binary meets.
pub fn frame_hom_check(from: &Lattice, to: &Lattice, f: &[usize], name: &str) -> LawReport {
    let mut r = LawReport::new(format!("{name} is a frame homomorphism"));
    r.push(LawCheck::from_bool("preserves 0", f[from.bottom()] == to.bottom(), || {
        Witness::new([from.bottom()], format!("{name}(0) = {}", to.label(f[from.bottom()])))
    }));
    r.push(LawCheck::from_bool("preserves 1", f[from.top()] == to.top(), || {
        Witness::new([from.top()], format!("{name}(1) = {}", to.label(f[from.top()])))
    }));
    r.push(LawCheck::over(
        "preserves joins",
        iproduct!(from.elements(), from.elements()),
        |&(a, b)| f[from.join(a, b)] == to.join(f[a], f[b]),
        |&(a, b)| Witness::new([a, b], format!("{name}({} ∨ {}) ≠ join of images", from.label(a), from.label(b))),
    ));
    r.push(LawCheck::over(
        "preserves meets",
        iproduct!(from.elements(), from.elements()),
        |&(a, b)| f[from.meet(a, b)] == to.meet(f[a], f[b]),
        |&(a, b)| Witness::new([a, b], format!("{name}({} ∧ {}) ≠ meet of images", from.label(a), from.label(b))),
    ));
    r
}

/// Change of base ring along a frame homomorphism `p*: B → X`: `bx = p*(b) ∧ x`.
pub fn module_from_map(base: Arc<Frame>, carrier: &Frame, pstar: &[usize]) -> Result<BLocale> {
    if pstar.len() != base.len() || pstar.iter().any(|&v| v >= carrier.len()) {
        return Err(Error::Malformed(format!("pstar must map {} elements into {}", base.len(), carrier.len())));
    }
    if let Some(w) = frame_hom_check(&base, carrier, pstar, "p*").witness() {
        return Err(Error::NotAFrameHom(w));
    }
    let m = BModule::from_pstar(base, Arc::new(carrier.lattice().clone()), pstar);
    BLocale::over_verified_frame(m)
}

/// The projection `b ↦ b1` of a `B`-locale, re-verified as a frame homomorphism.
pub fn projection_of(x: &BLocale) -> Result<Projection> {
    let p = x.projection().clone();
    if let Some(w) = frame_hom_check(x.base(), x.carrier(), &p.pstar, "p*").witness() {
        return Err(Error::NotAFrameHom(w));
    }
    Ok(p)
}

/// Tests whether a candidate `s: X → B` on a module with frame carrier is
/// monotone, equivariant and satisfies `s(x)x = x`, and whether stability then
/// holds as it must.
pub fn check_support_characterization(m: &BModule, s: &[usize]) -> LawReport {
    let (b_, x_) = (&**m.base(), &**m.carrier());
    let mut r = LawReport::new("support characterization");
    if s.len() != x_.len() || s.iter().any(|&v| v >= b_.len()) {
        r.push(LawCheck::fail("candidate is a map X → B", 0, Witness::text("wrong length or out-of-range entry")));
        return r;
    }
    let frame = verify_frame(x_);
    r.push(LawCheck::from_bool("carrier is a frame", frame.passed(), || frame.witness().unwrap()));
    let module = m.laws();
    r.push(LawCheck::from_bool("module laws", module.passed(), || module.witness().unwrap()));
    r.push(LawCheck::over(
        "monotone",
        iproduct!(x_.elements(), x_.elements()),
        |&(x, y)| !x_.leq(x, y) || b_.leq(s[x], s[y]),
        |&(x, y)| Witness::new([x, y], format!("{} ≤ {} but s-values not ordered", x_.label(x), x_.label(y))),
    ));
    r.push(LawCheck::over(
        "equivariant",
        iproduct!(b_.elements(), x_.elements()),
        |&(b, x)| s[m.act(b, x)] == b_.meet(b, s[x]),
        |&(b, x)| Witness::new([b, x], format!("s({}) ≠ {} ∧ s({})", m.bx(b, x), b_.label(b), x_.label(x))),
    ));
    r.push(LawCheck::over("s(x)x = x", x_.elements(), |&x| m.act(s[x], x) == x, |&x| {
        Witness::new([x], format!("s({0})·{0} ≠ {0}", x_.label(x)))
    }));
    let premises = r.passed();
    let stab = m.stability();
    let forced = !premises || stab.holds;
    let stab_witness = stab.witness.clone();
    r.push(LawCheck::from_bool("premises imply stability", forced, || stab_witness.unwrap()));
    r
}

/// The function module `B^S` with pointwise order and action `(bf)(s) = b ∧ f(s)`.
#[derive(Clone, Debug)]
pub struct FreeModule {
    pub locale: BLocale,
    pub index: Vec<String>,
    coords: Vec<Vec<u16>>,
}

impl FreeModule {
    /// `f(s)` for carrier element `f`.
    pub fn coord(&self, f: usize, s: usize) -> usize {
        self.coords[f][s] as usize
    }

    pub fn function(&self, f: usize) -> Vec<usize> {
        self.coords[f].iter().map(|&v| v as usize).collect()
    }

    pub fn element_of(&self, values: &[usize]) -> Option<usize> {
        self.coords.iter().position(|c| c.len() == values.len() && c.iter().zip(values).all(|(&a, &b)| a as usize == b))
    }

    /// The unit vectors `f⁽ˢ⁾`, in index order.
    pub fn unit_vectors(&self) -> Vec<usize> {
        let b_ = self.locale.base();
        (0..self.index.len())
            .map(|s| {
                let v: Vec<usize> = (0..self.index.len()).map(|t| if t == s { b_.top() } else { b_.bottom() }).collect();
                self.element_of(&v).expect("all functions are present")
            })
            .collect()
    }
}

pub fn free_module(base: Arc<Frame>, index: Vec<String>) -> Result<FreeModule> {
    let nb = base.len();
    let k = index.len();
    let size = (nb as u128).checked_pow(k as u32).filter(|&s| s <= MAX_FREE as u128).ok_or_else(|| {
        Error::SizeExceeded(format!("|B|^|S| = {nb}^{k} exceeds {MAX_FREE}"))
    })? as usize;
    let funcs: Vec<Vec<u16>> = (0..size)
        .map(|mut code| {
            (0..k)
                .map(|_| {
                    let v = code % nb;
                    code /= nb;
                    v as u16
                })
                .collect()
        })
        .collect();
    let pointwise = |op: fn(&Lattice, usize, usize) -> usize| {
        let base = base.clone();
        move |f: &Vec<u16>, g: &Vec<u16>| -> Vec<u16> {
            f.iter().zip(g).map(|(&a, &b)| op(&base, a as usize, b as usize) as u16).collect()
        }
    };
    let b2 = base.clone();
    let (lat, coords) = Lattice::from_family(funcs, pointwise(Lattice::join), pointwise(Lattice::meet), move |f| {
        let parts: Vec<&str> = f.iter().map(|&v| b2.label(v as usize)).collect();
        format!("({})", parts.join(","))
    })?;
    let nx = lat.len();
    let mut action = vec![vec![0usize; nx]; nb];
    let lookup: std::collections::HashMap<&Vec<u16>, usize> = coords.iter().enumerate().map(|(i, c)| (c, i)).collect();
    for b in base.elements() {
        for (x, f) in coords.iter().enumerate() {
            let g: Vec<u16> = f.iter().map(|&v| base.meet(b, v as usize) as u16).collect();
            action[b][x] = lookup[&g];
        }
    }
    // pointwise products of frames are frames
    let carrier = crate::lattice::trusted_frame(lat);
    let locale = BLocale::over_frame(base, carrier, action)?;
    Ok(FreeModule { locale, index, coords })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Frame;

    fn names(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    fn chain3_locale() -> BLocale {
        let b2 = Arc::new(Frame::two());
        module_from_map(b2, &Frame::chain3(), &[0, 2]).unwrap()
    }

    #[test]
    fn identity_pstar_gives_meet_action() {
        let bd = Arc::new(Frame::diamond());
        let loc = module_from_map(bd.clone(), &bd, &[0, 1, 2, 3]).unwrap();
        for b in bd.elements() {
            for c in bd.elements() {
                assert_eq!(loc.act(b, c), bd.meet(b, c));
            }
        }
        assert!(loc.is_open());
        assert_eq!(loc.support().unwrap(), &[0, 1, 2, 3]);
        assert_eq!(loc.local_sections().unwrap(), &[0, 1, 2, 3]);
        assert!(loc.is_etale().unwrap());
    }

    #[test]
    fn chain3_over_b2() {
        let loc = chain3_locale();
        // 1·x = x, 0·x = 0
        for x in 0..3 {
            assert_eq!(loc.act(1, x), x);
            assert_eq!(loc.act(0, x), 0);
        }
        assert_eq!(loc.support().unwrap(), &[0, 1, 1]);
        assert_eq!(loc.local_sections().unwrap(), &[0, 1]);
        assert!(!loc.is_etale().unwrap());
        assert_eq!(projection_of(&loc).unwrap().pstar, vec![0, 2]);
    }

    #[test]
    fn constant_top_pstar_rejected() {
        let b2 = Arc::new(Frame::two());
        let err = module_from_map(b2, &Frame::chain3(), &[2, 2]).unwrap_err();
        assert!(matches!(err, Error::NotAFrameHom(_)));
        let triv = Arc::new(Frame::trivial());
        assert!(module_from_map(triv.clone(), &Frame::trivial(), &[0]).is_ok());
    }

    #[test]
    fn edited_action_fails_with_witness() {
        let b2 = Arc::new(Frame::two());
        let c3 = Arc::new(Frame::chain3().into_lattice());
        // 0·1 = u instead of 0
        let m = BModule::raw(b2, c3, vec![vec![0, 0, 1], vec![0, 1, 2]]).unwrap();
        let r = check_stability(&m);
        assert!(!r.passed());
        let first = r.first_failure().unwrap();
        assert!(first.witness.is_some());
        assert!(matches!(BLocale::new(m), Err(Error::ModuleLaw(_))));
    }

    #[test]
    fn free_module_b2_two_generators() {
        let fm = free_module(Arc::new(Frame::two()), names(&["s", "t"])).unwrap();
        let loc = &fm.locale;
        assert_eq!(loc.len(), 4);
        assert!(check_stability(loc.module()).passed());
        let e10 = fm.element_of(&[1, 0]).unwrap();
        let e01 = fm.element_of(&[0, 1]).unwrap();
        let e11 = fm.element_of(&[1, 1]).unwrap();
        let e00 = fm.element_of(&[0, 0]).unwrap();
        // diagonal projection
        assert_eq!(loc.projection().pstar, vec![e00, e11]);
        // support is the pointwise join
        for f in loc.carrier().elements() {
            let expect = fm.function(f).into_iter().fold(0, |a, v| a.max(v));
            assert_eq!(loc.spp(f), expect);
        }
        assert_eq!(loc.spp(e10), 1);
        let mut secs = loc.local_sections().unwrap().to_vec();
        secs.sort_unstable();
        let mut want = vec![e00, e10, e01];
        want.sort_unstable();
        assert_eq!(secs, want);
        assert!(loc.is_etale().unwrap());
        assert_eq!(fm.unit_vectors(), vec![e10, e01]);
    }

    #[test]
    fn free_module_edges() {
        let empty = free_module(Arc::new(Frame::two()), vec![]).unwrap();
        assert_eq!(empty.locale.len(), 1);
        assert!(empty.locale.is_etale().unwrap());
        let one = free_module(Arc::new(Frame::two()), names(&["s"])).unwrap();
        assert_eq!(one.locale.len(), 2);
        let big = free_module(Arc::new(Frame::diamond()), (0..7).map(|i| i.to_string()).collect());
        assert!(matches!(big, Err(Error::SizeExceeded(_))));
    }

    #[test]
    fn support_characterization_examples() {
        let fm = free_module(Arc::new(Frame::two()), names(&["s", "t"])).unwrap();
        let spp = fm.locale.support().unwrap().to_vec();
        let r = check_support_characterization(fm.locale.module(), &spp);
        assert!(r.passed(), "{r}");

        let b2 = Arc::new(Frame::two());
        let ident = module_from_map(b2.clone(), &b2, &[0, 1]).unwrap();
        let r = check_support_characterization(ident.module(), &[1, 1]);
        assert!(!r.holds("equivariant"));
        assert!(r.holds("premises imply stability"));

        let triv = module_from_map(Arc::new(Frame::trivial()), &Frame::trivial(), &[0]).unwrap();
        assert!(check_support_characterization(triv.module(), &[0]).passed());
    }

    #[test]
    fn trivial_locale_is_etale() {
        let t = module_from_map(Arc::new(Frame::two()), &Frame::trivial(), &[0, 0]).unwrap();
        assert!(t.is_open());
        assert_eq!(t.local_sections().unwrap(), &[0]);
        assert!(t.is_etale().unwrap());
    }

    #[test]
    fn down_segment_of_section() {
        let fm = free_module(Arc::new(Frame::two()), names(&["s", "t"])).unwrap();
        let e10 = fm.element_of(&[1, 0]).unwrap();
        let (seg, incl) = fm.locale.down_segment(e10).unwrap();
        assert_eq!(seg.len(), 2);
        assert!(seg.is_etale().unwrap());
        assert_eq!(incl[1], e10);
    }
}
