//! Finite lattices and frames stored as total join/meet tables.
//!
//! Elements are indices `0..n`, canonically ordered so that index `0` is the
//! bottom and index `n - 1` the top. Down-set lattices of finite posets are the
//! canonical source of frames; explicit tables are accepted too and must pass
//! [`verify_frame`] before being promoted to a [`Frame`].

mod dot;
mod poset;

use std::collections::HashMap;
use std::hash::{DefaultHasher, Hash, Hasher};
use std::ops::Deref;

use itertools::iproduct;

pub use dot::{hasse_dot, poset_dot};
pub use poset::{Poset, MAX_POSET};

use crate::error::{Error, Result};
use crate::report::{LawCheck, LawReport, Witness};

/// Largest carrier for which full tables are built.
pub const MAX_ELEMENTS: usize = 4096;

/// Frames up to this size also get the subset form of distributivity checked directly.
pub const SUBSET_DISTRIBUTIVITY_LIMIT: usize = 12;

/// A finite lattice given by its join and meet tables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lattice {
    labels: Vec<String>,
    join: Vec<u16>,
    meet: Vec<u16>,
}

impl Lattice {
    /// Wraps explicit tables. Only shape is checked here; the lattice laws are
    /// the business of [`verify_frame`].
    pub fn from_tables(labels: Vec<String>, join: Vec<Vec<usize>>, meet: Vec<Vec<usize>>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::Malformed("a lattice needs at least one element".into()));
        }
        if n > MAX_ELEMENTS {
            return Err(Error::SizeExceeded(format!("{n} elements, limit is {MAX_ELEMENTS}")));
        }
        let flatten = |t: Vec<Vec<usize>>, what: &str| -> Result<Vec<u16>> {
            if t.len() != n || t.iter().any(|r| r.len() != n) {
                return Err(Error::Malformed(format!("{what} table must be {n}x{n}")));
            }
            t.into_iter()
                .flatten()
                .map(|v| {
                    if v < n {
                        Ok(v as u16)
                    } else {
                        Err(Error::Malformed(format!("{what} table entry {v} out of range")))
                    }
                })
                .collect()
        };
        Ok(Lattice { join: flatten(join, "join")?, meet: flatten(meet, "meet")?, labels })
    }

    /// Builds the lattice of a finite family closed under the given (commutative)
    /// binary join and meet. The family is re-indexed canonically and returned in
    /// that order alongside the lattice.
    pub fn from_family<T: Clone + Eq + Hash>(
        items: Vec<T>,
        join: impl Fn(&T, &T) -> T,
        meet: impl Fn(&T, &T) -> T,
        label: impl Fn(&T) -> String,
    ) -> Result<(Self, Vec<T>)> {
        let n = items.len();
        if n == 0 {
            return Err(Error::Malformed("a lattice needs at least one element".into()));
        }
        if n > MAX_ELEMENTS {
            return Err(Error::SizeExceeded(format!("{n} elements, limit is {MAX_ELEMENTS}")));
        }
        let mut index = HashMap::with_capacity(n);
        for (i, it) in items.iter().enumerate() {
            if index.insert(it.clone(), i).is_some() {
                return Err(Error::Malformed(format!("duplicate element {}", label(it))));
            }
        }
        let mut raw_join = vec![0u16; n * n];
        let mut raw_meet = vec![0u16; n * n];
        for i in 0..n {
            for j in i..n {
                let jv = join(&items[i], &items[j]);
                let mv = meet(&items[i], &items[j]);
                let ji = *index
                    .get(&jv)
                    .ok_or_else(|| Error::NotClosed(format!("join of {} and {}", label(&items[i]), label(&items[j]))))?;
                let mi = *index
                    .get(&mv)
                    .ok_or_else(|| Error::NotClosed(format!("meet of {} and {}", label(&items[i]), label(&items[j]))))?;
                raw_join[i * n + j] = ji as u16;
                raw_join[j * n + i] = ji as u16;
                raw_meet[i * n + j] = mi as u16;
                raw_meet[j * n + i] = mi as u16;
            }
        }
        // Canonical order: by number of elements below, ties by input position.
        let downs: Vec<usize> = (0..n).map(|i| (0..n).filter(|&j| raw_join[j * n + i] as usize == i).count()).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| (downs[i], i));
        let mut pos = vec![0usize; n];
        for (new, &old) in order.iter().enumerate() {
            pos[old] = new;
        }
        let mut jt = vec![0u16; n * n];
        let mut mt = vec![0u16; n * n];
        for a in 0..n {
            for b in 0..n {
                let (oa, ob) = (order[a], order[b]);
                jt[a * n + b] = pos[raw_join[oa * n + ob] as usize] as u16;
                mt[a * n + b] = pos[raw_meet[oa * n + ob] as usize] as u16;
            }
        }
        let sorted: Vec<T> = order.iter().map(|&i| items[i].clone()).collect();
        let labels = sorted.iter().map(&label).collect();
        Ok((Lattice { labels, join: jt, meet: mt }, sorted))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.len()
    }

    pub fn bottom(&self) -> usize {
        0
    }

    pub fn top(&self) -> usize {
        self.len() - 1
    }

    #[inline]
    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a * self.len() + b] as usize
    }

    #[inline]
    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a * self.len() + b] as usize
    }

    #[inline]
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.join(a, b) == b
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.leq(a, b)
    }

    /// `⋁S`, with `⋁∅ = 0`.
    pub fn join_set(&self, items: impl IntoIterator<Item = usize>) -> usize {
        items.into_iter().fold(self.bottom(), |acc, x| self.join(acc, x))
    }

    /// `⋀S`, with `⋀∅ = 1`.
    pub fn meet_set(&self, items: impl IntoIterator<Item = usize>) -> usize {
        items.into_iter().fold(self.top(), |acc, x| self.meet(acc, x))
    }

    /// Relative pseudo-complement `x → y = ⋁{z : z ∧ x ≤ y}`.
    pub fn heyting(&self, x: usize, y: usize) -> usize {
        self.join_set(self.elements().filter(|&z| self.leq(self.meet(z, x), y)))
    }

    /// Pseudo-complement `¬x = x → 0`.
    pub fn neg(&self, x: usize) -> usize {
        self.heyting(x, self.bottom())
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::Malformed(format!("expected {} labels, got {}", self.len(), labels.len())));
        }
        self.labels = labels;
        Ok(self)
    }

    /// Join-irreducible elements (non-bottom, not a join of strictly smaller ones).
    pub fn join_irreducibles(&self) -> Vec<usize> {
        self.elements()
            .filter(|&x| x != self.bottom())
            .filter(|&x| self.join_set(self.elements().filter(|&y| self.lt(y, x))) != x)
            .collect()
    }

    pub fn join_table(&self) -> Vec<Vec<usize>> {
        self.join.chunks(self.len()).map(|r| r.iter().map(|&v| v as usize).collect()).collect()
    }

    pub fn meet_table(&self) -> Vec<Vec<usize>> {
        self.meet.chunks(self.len()).map(|r| r.iter().map(|&v| v as usize).collect()).collect()
    }

    /// Pairs `(a, b)` with `a < b` and nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for b in self.elements() {
            let below: Vec<usize> = self.elements().filter(|&a| self.lt(a, b)).collect();
            for &a in &below {
                if !below.iter().any(|&c| self.lt(a, c)) {
                    out.push((a, b));
                }
            }
        }
        out.sort_unstable();
        out
    }

    fn render(&self, xs: &[usize]) -> String {
        xs.iter().map(|&x| self.label(x)).collect::<Vec<_>>().join(", ")
    }
}

/// Checks every bounded-lattice law and frame distributivity on the full tables.
///
/// Binary distributivity together with `x ∧ 0 = 0` yields distributivity over
/// every finite join, which for a finite lattice is every join; frames with at
/// most [`SUBSET_DISTRIBUTIVITY_LIMIT`] elements also get the subset form
/// checked literally.
pub fn verify_frame(l: &Lattice) -> LawReport {
    let n = l.len();
    let mut r = LawReport::new(format!("frame laws on {n}-element lattice"));
    let pairs = || iproduct!(0..n, 0..n);
    let triples = || iproduct!(0..n, 0..n, 0..n);
    let w2 = |&(a, b): &(usize, usize), what: &str| Witness::new([a, b], format!("{what} fails for ({})", l.render(&[a, b])));
    let w3 = |&(a, b, c): &(usize, usize, usize), what: &str| {
        Witness::new([a, b, c], format!("{what} fails for ({})", l.render(&[a, b, c])))
    };

    r.push(LawCheck::over("join idempotent", 0..n, |&a| l.join(a, a) == a, |&a| {
        Witness::new([a], format!("{} ∨ {0} ≠ {0}", l.label(a)))
    }));
    r.push(LawCheck::over("meet idempotent", 0..n, |&a| l.meet(a, a) == a, |&a| {
        Witness::new([a], format!("{} ∧ {0} ≠ {0}", l.label(a)))
    }));
    r.push(LawCheck::over("join commutative", pairs(), |&(a, b)| l.join(a, b) == l.join(b, a), |c| w2(c, "a∨b = b∨a")));
    r.push(LawCheck::over("meet commutative", pairs(), |&(a, b)| l.meet(a, b) == l.meet(b, a), |c| w2(c, "a∧b = b∧a")));
    r.push(LawCheck::over(
        "join associative",
        triples(),
        |&(a, b, c)| l.join(l.join(a, b), c) == l.join(a, l.join(b, c)),
        |c| w3(c, "(a∨b)∨c = a∨(b∨c)"),
    ));
    r.push(LawCheck::over(
        "meet associative",
        triples(),
        |&(a, b, c)| l.meet(l.meet(a, b), c) == l.meet(a, l.meet(b, c)),
        |c| w3(c, "(a∧b)∧c = a∧(b∧c)"),
    ));
    r.push(LawCheck::over(
        "absorption",
        pairs(),
        |&(a, b)| l.join(a, l.meet(a, b)) == a && l.meet(a, l.join(a, b)) == a,
        |c| w2(c, "a∨(a∧b) = a = a∧(a∨b)"),
    ));
    r.push(LawCheck::over("bottom is least", 0..n, |&a| l.join(0, a) == a && l.meet(0, a) == 0, |&a| {
        Witness::new([a], format!("index 0 is not below {}", l.label(a)))
    }));
    r.push(LawCheck::over("top is greatest", 0..n, |&a| l.join(n - 1, a) == n - 1 && l.meet(n - 1, a) == a, |&a| {
        Witness::new([a], format!("last index is not above {}", l.label(a)))
    }));
    r.push(LawCheck::over(
        "frame distributivity",
        triples(),
        |&(x, y, z)| l.meet(x, l.join(y, z)) == l.join(l.meet(x, y), l.meet(x, z)),
        |c| w3(c, "x∧(y∨z) = (x∧y)∨(x∧z)"),
    ));
    if n <= SUBSET_DISTRIBUTIVITY_LIMIT {
        let subsets = iproduct!(0..n, 0u32..(1 << n));
        r.push(LawCheck::over(
            "frame distributivity over subsets",
            subsets,
            |&(x, s)| {
                let members = (0..n).filter(|&i| s & (1 << i) != 0);
                l.meet(x, l.join_set(members.clone())) == l.join_set(members.map(|m| l.meet(x, m)))
            },
            |&(x, s)| {
                let members: Vec<usize> = (0..n).filter(|&i| s & (1 << i) != 0).collect();
                Witness::new(
                    std::iter::once(x).chain(members.iter().copied()).collect::<Vec<_>>(),
                    format!("{} ∧ ⋁{{{}}} ≠ ⋁ of meets", l.label(x), l.render(&members)),
                )
            },
        ));
    }
    r
}

/// A lattice that has passed [`verify_frame`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    lattice: Lattice,
    /// Down-set bitmask of each element when the frame came from a poset.
    masks: Option<Vec<u32>>,
    poset: Option<Poset>,
    id: u64,
}

impl Frame {
    pub fn new(lattice: Lattice) -> Result<Self> {
        let report = verify_frame(&lattice);
        if let Some(w) = report.witness() {
            return Err(Error::NotAFrame(w));
        }
        Ok(Self::trusted(lattice, None, None))
    }

    fn trusted(lattice: Lattice, masks: Option<Vec<u32>>, poset: Option<Poset>) -> Self {
        let mut h = DefaultHasher::new();
        lattice.hash(&mut h);
        Frame { id: h.finish(), lattice, masks, poset }
    }

    /// The one-element frame, `0 = 1`.
    pub fn trivial() -> Self {
        downset_frame(&Poset::empty()).expect("empty poset").relabeled(&["0"])
    }

    /// `B2 = {0, 1}`.
    pub fn two() -> Self {
        downset_frame(&Poset::chain(1)).expect("singleton").relabeled(&["0", "1"])
    }

    /// The chain `0 < u < 1`.
    pub fn chain3() -> Self {
        downset_frame(&Poset::chain(2)).expect("2-chain").relabeled(&["0", "u", "1"])
    }

    /// The diamond `{0, a, b, 1}` with `a`, `b` incomparable.
    pub fn diamond() -> Self {
        downset_frame(&Poset::antichain(2)).expect("antichain").relabeled(&["0", "a", "b", "1"])
    }

    /// Replaces labels; panics on a length mismatch, so only for fixtures.
    pub fn relabeled(mut self, labels: &[&str]) -> Self {
        self.lattice = self
            .lattice
            .with_labels(labels.iter().map(|s| s.to_string()).collect())
            .expect("label count matches");
        self
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn into_lattice(self) -> Lattice {
        self.lattice
    }

    pub fn poset(&self) -> Option<&Poset> {
        self.poset.as_ref()
    }

    /// Down-set bitmask of element `x` for poset-backed frames.
    pub fn mask(&self, x: usize) -> Option<u32> {
        self.masks.as_ref().map(|m| m[x])
    }

    pub fn index_of_mask(&self, mask: u32) -> Option<usize> {
        self.masks.as_ref()?.iter().position(|&m| m == mask)
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn element(&self, index: usize) -> Result<FrameElement> {
        if index >= self.len() {
            return Err(Error::Malformed(format!("element {index} out of range for {}-element frame", self.len())));
        }
        Ok(FrameElement { frame: self.id, index })
    }

    fn own(&self, e: FrameElement) -> Result<usize> {
        if e.frame == self.id {
            Ok(e.index)
        } else {
            Err(Error::CrossFrame)
        }
    }

    pub fn join_elements(&self, a: FrameElement, b: FrameElement) -> Result<FrameElement> {
        let v = self.join(self.own(a)?, self.own(b)?);
        self.element(v)
    }

    pub fn meet_elements(&self, a: FrameElement, b: FrameElement) -> Result<FrameElement> {
        let v = self.meet(self.own(a)?, self.own(b)?);
        self.element(v)
    }

    pub fn heyting_elements(&self, a: FrameElement, b: FrameElement) -> Result<FrameElement> {
        let v = self.heyting(self.own(a)?, self.own(b)?);
        self.element(v)
    }
}

impl Deref for Frame {
    type Target = Lattice;

    fn deref(&self) -> &Lattice {
        &self.lattice
    }
}

/// An element tagged with the frame it belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FrameElement {
    frame: u64,
    index: usize,
}

impl FrameElement {
    pub fn index(self) -> usize {
        self.index
    }

    /// Equality that refuses to compare elements of different frames.
    pub fn try_eq(self, other: FrameElement) -> Result<bool> {
        if self.frame != other.frame {
            return Err(Error::CrossFrame);
        }
        Ok(self.index == other.index)
    }
}

/// The frame of down-closed subsets of `p`: join is union, meet is intersection.
pub fn downset_frame(p: &Poset) -> Result<Frame> {
    let masks = p.downsets()?;
    let names = p.names().to_vec();
    let (lattice, masks) = Lattice::from_family(masks, |a, b| a | b, |a, b| a & b, |&m| render_mask(&names, m))?;
    Ok(Frame::trusted(lattice, Some(masks), Some(p.clone())))
}

pub(crate) fn render_mask(names: &[String], mask: u32) -> String {
    if mask == 0 {
        return "∅".into();
    }
    let parts: Vec<&str> = (0..names.len()).filter(|i| mask & (1 << i) != 0).map(|i| names[i].as_str()).collect();
    format!("{{{}}}", parts.join(","))
}

/// Promotes a lattice known by construction to be a frame (products and
/// down-set lattices) without the cubic law check.
pub(crate) fn trusted_frame(lattice: Lattice) -> Frame {
    Frame::trusted(lattice, None, None)
}

/// The five-element modular, non-distributive lattice `M3`.
pub fn m3_lattice() -> Lattice {
    let n = 5;
    let (bot, top) = (0, 4);
    let mut join = vec![vec![0; n]; n];
    let mut meet = vec![vec![0; n]; n];
    for a in 0..n {
        for b in 0..n {
            join[a][b] = if a == b || b == bot {
                a
            } else if a == bot {
                b
            } else {
                top
            };
            meet[a][b] = if a == b || b == top {
                a
            } else if a == top {
                b
            } else {
                bot
            };
        }
    }
    let labels = ["0", "x", "y", "z", "1"].iter().map(|s| s.to_string()).collect();
    Lattice::from_tables(labels, join, meet).expect("M3 tables are well-shaped")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count_downsets_by_subsets(p: &Poset) -> usize {
        // independent: a subset is a down-set iff no pair (i ≤ j) has j in, i out
        let n = p.len();
        (0u32..(1 << n))
            .filter(|&m| {
                (0..n).all(|i| (0..n).all(|j| !(p.leq(i, j) && m & (1 << j) != 0 && m & (1 << i) == 0)))
            })
            .count()
    }

    #[test]
    fn downset_frame_sizes() {
        assert_eq!(downset_frame(&Poset::empty()).unwrap().len(), 1);
        assert_eq!(Frame::two().len(), 2);
        let bd = Frame::diamond();
        assert_eq!(bd.len(), 4);
        assert_eq!(bd.mask(0), Some(0));
        assert_eq!(bd.mask(3), Some(0b11));
        for p in [Poset::chain(4), Poset::antichain(3), Poset::chain(2).product(&Poset::chain(2))] {
            assert_eq!(downset_frame(&p).unwrap().len(), count_downsets_by_subsets(&p));
        }
    }

    #[test]
    fn generated_frames_pass() {
        for f in [Frame::trivial(), Frame::two(), Frame::chain3(), Frame::diamond()] {
            let r = verify_frame(&f);
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn m3_fails_distributivity_with_witness() {
        let r = verify_frame(&m3_lattice());
        let d = r.get("frame distributivity").unwrap();
        assert!(!d.holds);
        let w = d.witness.as_ref().unwrap();
        let (x, y, z) = (w.indices[0], w.indices[1], w.indices[2]);
        let l = m3_lattice();
        assert_ne!(l.meet(x, l.join(y, z)), l.join(l.meet(x, y), l.meet(x, z)));
        assert!(r.holds("join associative"));
        assert!(matches!(Frame::new(m3_lattice()), Err(Error::NotAFrame(_))));
    }

    #[test]
    fn heyting_examples() {
        let c = Frame::chain3();
        let (zero, u, one) = (0, 1, 2);
        assert_eq!(c.neg(u), zero);
        assert_eq!(c.neg(zero), one);
        let bd = Frame::diamond();
        let (a, b) = (bd.index_of("a").unwrap(), bd.index_of("b").unwrap());
        assert_eq!(bd.heyting(a, b), b);
        for x in bd.elements() {
            assert_eq!(bd.heyting(x, bd.top()), bd.top());
        }
    }

    #[test]
    fn join_meet_sets() {
        let bd = Frame::diamond();
        assert_eq!(bd.join_set([]), bd.bottom());
        assert_eq!(bd.meet_set([]), bd.top());
        let (a, b) = (1, 2);
        assert_eq!(bd.join_set([a, b]), bd.top());
        assert_eq!(bd.meet_set([a, b]), bd.bottom());
        assert_eq!(bd.join_set([a]), a);
        assert_eq!(bd.meet_set([a]), a);
    }

    #[test]
    fn cross_frame_comparison_is_an_error() {
        let b2 = Frame::two();
        let bd = Frame::diamond();
        let x = b2.element(1).unwrap();
        let y = bd.element(1).unwrap();
        assert!(matches!(x.try_eq(y), Err(Error::CrossFrame)));
        assert!(matches!(bd.join_elements(x, y), Err(Error::CrossFrame)));
        assert!(x.try_eq(b2.element(1).unwrap()).unwrap());
    }

    #[test]
    fn join_irreducibles_of_downsets_are_principal() {
        let p = Poset::chain(2).product(&Poset::antichain(2));
        let f = downset_frame(&p).unwrap();
        let ji: Vec<u32> = f.join_irreducibles().iter().map(|&x| f.mask(x).unwrap()).collect();
        let mut principal: Vec<u32> = (0..p.len()).map(|i| p.below_mask(i)).collect();
        let mut got = ji.clone();
        principal.sort_unstable();
        got.sort_unstable();
        assert_eq!(got, principal);
    }
}
