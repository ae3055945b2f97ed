//! Matrices over a frame under the `(∨, ∧)` product, projection matrices, the
//! modules `MB^S` and the functors between based Hilbert modules and `Mat_B`.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use itertools::iproduct;

use crate::bmodule::{BLocale, BModule, MAX_FREE};
use crate::error::{Error, Result};
use crate::hilbert::{BasedHilbert, HilbertModule, InnerProduct};
use crate::homs::{adjoint, same_module, ModuleHom};
use crate::lattice::{Frame, Lattice, MAX_ELEMENTS};
use crate::report::{LawCheck, LawReport, Witness};

/// A `rows × cols` matrix with entries in a frame.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    base: Arc<Frame>,
    rows: usize,
    cols: usize,
    entries: Vec<u16>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix{:?}", self.entries())
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<&str> = (0..self.cols).map(|j| self.base.label(self.get(i, j))).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

impl Matrix {
    /// A matrix with no rows is taken to have no columns.
    pub fn new(base: Arc<Frame>, entries: Vec<Vec<usize>>) -> Result<Self> {
        let rows = entries.len();
        let cols = entries.first().map_or(0, Vec::len);
        Self::with_shape(base, rows, cols, entries)
    }

    pub fn with_shape(base: Arc<Frame>, rows: usize, cols: usize, entries: Vec<Vec<usize>>) -> Result<Self> {
        if entries.len() != rows || entries.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch(format!("expected a {rows}x{cols} matrix")));
        }
        let mut flat = Vec::with_capacity(rows * cols);
        for v in entries.into_iter().flatten() {
            if v >= base.len() {
                return Err(Error::Malformed(format!("matrix entry {v} not in base frame")));
            }
            flat.push(v as u16);
        }
        Ok(Matrix { base, rows, cols, entries: flat })
    }

    pub fn from_fn(base: Arc<Frame>, rows: usize, cols: usize, f: impl Fn(usize, usize) -> usize) -> Self {
        let entries = iproduct!(0..rows, 0..cols).map(|(i, j)| f(i, j) as u16).collect();
        Matrix { base, rows, cols, entries }
    }

    pub fn identity(base: Arc<Frame>, n: usize) -> Self {
        let (zero, one) = (base.bottom(), base.top());
        Self::from_fn(base, n, n, |i, j| if i == j { one } else { zero })
    }

    pub fn base(&self) -> &Arc<Frame> {
        &self.base
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> usize {
        self.entries[i * self.cols + j] as usize
    }

    pub fn entries(&self) -> Vec<Vec<usize>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j)).collect()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<usize> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// `(AB)_{su} = ⋁_t a_{st} ∧ b_{tu}`.
    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.base.id() != other.base.id() {
            return Err(Error::CrossFrame);
        }
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let b = &self.base;
        Ok(Matrix::from_fn(self.base.clone(), self.rows, other.cols, |i, k| {
            b.join_set((0..self.cols).map(|j| b.meet(self.get(i, j), other.get(j, k))))
        }))
    }

    /// `(Mf)_s = ⋁_t m_{st} ∧ f_t`.
    pub fn mul_vec(&self, v: &[usize]) -> Result<Vec<usize>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!("vector of length {} for {} columns", v.len(), self.cols)));
        }
        let b = &self.base;
        Ok((0..self.rows).map(|i| b.join_set((0..self.cols).map(|j| b.meet(self.get(i, j), v[j])))).collect())
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.base.clone(), self.cols, self.rows, |i, j| self.get(j, i))
    }
}

/// Symmetry and idempotence.
pub fn is_projection_matrix(m: &Matrix) -> LawReport {
    let mut r = LawReport::new("projection matrix");
    if m.rows != m.cols {
        r.push(LawCheck::fail("square", 1, Witness::text(format!("{}x{} matrix", m.rows, m.cols))));
        return r;
    }
    let n = m.rows;
    r.push(LawCheck::over("M = Mᵀ", iproduct!(0..n, 0..n), |&(i, j)| m.get(i, j) == m.get(j, i), |&(i, j)| {
        Witness::new([i, j], format!("m[{i}][{j}] ≠ m[{j}][{i}]"))
    }));
    let sq = m.matmul(m).expect("square");
    r.push(LawCheck::over("M = M²", iproduct!(0..n, 0..n), |&(i, j)| m.get(i, j) == sq.get(i, j), |&(i, j)| {
        Witness::new([i, j], format!("(M²)[{i}][{j}] ≠ m[{i}][{j}]"))
    }));
    r
}

/// A projection matrix indexed by an ordered list of names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectionMatrix {
    matrix: Matrix,
    index: Vec<String>,
}

impl ProjectionMatrix {
    pub fn new(matrix: Matrix, index: Vec<String>) -> Result<Self> {
        if index.len() != matrix.rows {
            return Err(Error::DimensionMismatch(format!("{} names for {} rows", index.len(), matrix.rows)));
        }
        if let Some(w) = is_projection_matrix(&matrix).witness() {
            return Err(Error::NotProjection(w));
        }
        Ok(ProjectionMatrix { matrix, index })
    }

    /// Indexed by `0, 1, …`.
    pub fn unnamed(matrix: Matrix) -> Result<Self> {
        let index = (0..matrix.rows).map(|i| i.to_string()).collect();
        Self::new(matrix, index)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn index(&self) -> &[String] {
        &self.index
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn base(&self) -> &Arc<Frame> {
        &self.matrix.base
    }
}

/// An arrow `F: M → N` of `Mat_B`: a `T × S` matrix with `FM = F = NF`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatArrow {
    source: ProjectionMatrix,
    target: ProjectionMatrix,
    f: Matrix,
}

impl MatArrow {
    pub fn new(source: ProjectionMatrix, target: ProjectionMatrix, f: Matrix) -> Result<Self> {
        if let Some(w) = arrow_laws(&source, &target, &f)?.witness() {
            return Err(Error::ArrowLawViolation(w));
        }
        Ok(MatArrow { source, target, f })
    }

    /// The identity on `M` is `M` itself.
    pub fn identity(m: &ProjectionMatrix) -> Self {
        MatArrow { source: m.clone(), target: m.clone(), f: m.matrix.clone() }
    }

    pub fn source(&self) -> &ProjectionMatrix {
        &self.source
    }

    pub fn target(&self) -> &ProjectionMatrix {
        &self.target
    }

    pub fn matrix(&self) -> &Matrix {
        &self.f
    }

    /// `then ∘ self`.
    pub fn compose(&self, then: &MatArrow) -> Result<MatArrow> {
        if self.target != then.source {
            return Err(Error::DimensionMismatch("arrows do not compose".into()));
        }
        MatArrow::new(self.source.clone(), then.target.clone(), then.f.matmul(&self.f)?)
    }

    pub fn transpose(&self) -> MatArrow {
        MatArrow { source: self.target.clone(), target: self.source.clone(), f: self.f.transpose() }
    }
}

/// `FM = F` and `NF = F`.
pub fn arrow_laws(source: &ProjectionMatrix, target: &ProjectionMatrix, f: &Matrix) -> Result<LawReport> {
    if f.rows != target.len() || f.cols != source.len() {
        return Err(Error::DimensionMismatch(format!(
            "arrow must be {}x{}, got {}x{}",
            target.len(),
            source.len(),
            f.rows,
            f.cols
        )));
    }
    let fm = f.matmul(&source.matrix)?;
    let nf = target.matrix.matmul(f)?;
    let mut r = LawReport::new("Mat_B arrow");
    let (rows, cols) = (f.rows, f.cols);
    r.push(LawCheck::over("FM = F", iproduct!(0..rows, 0..cols), |&(i, j)| fm.get(i, j) == f.get(i, j), |&(i, j)| {
        Witness::new([i, j], format!("(FM)[{i}][{j}] ≠ F[{i}][{j}]"))
    }));
    r.push(LawCheck::over("NF = F", iproduct!(0..rows, 0..cols), |&(i, j)| nf.get(i, j) == f.get(i, j), |&(i, j)| {
        Witness::new([i, j], format!("(NF)[{i}][{j}] ≠ F[{i}][{j}]"))
    }));
    Ok(r)
}

/// The Hilbert module `MB^S` with its column basis.
#[derive(Clone, Debug)]
pub struct MatrixModule {
    pub matrix: ProjectionMatrix,
    pub based: BasedHilbert,
    /// Element index to vector.
    pub vectors: Vec<Vec<usize>>,
    /// `columns[s]` is the element `s̃` with `s̃_t = m_{ts}`; repeated columns
    /// give repeated entries.
    pub columns: Vec<usize>,
    lookup: HashMap<Vec<usize>, usize>,
    locale: Arc<BLocale>,
}

impl MatrixModule {
    pub fn locale(&self) -> &Arc<BLocale> {
        &self.locale
    }

    pub fn module_arc(&self) -> &Arc<BModule> {
        self.locale.module_arc()
    }

    pub fn element_of(&self, v: &[usize]) -> Option<usize> {
        self.lookup.get(v).copied()
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// `MB^S` as the join-closure of `{b ∧ s̃}`: `Mf = ⋁_t f_t ∧ t̃`.
fn image_by_closure(m: &ProjectionMatrix) -> Result<Vec<Vec<usize>>> {
    let b = m.base();
    let n = m.len();
    let mx = &m.matrix;
    let gens: BTreeSet<Vec<usize>> =
        iproduct!(b.elements(), 0..n).map(|(c, s)| mx.column(s).iter().map(|&v| b.meet(c, v)).collect()).collect();
    let gens: Vec<Vec<usize>> = gens.into_iter().collect();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let zero = vec![b.bottom(); n];
    seen.insert(zero.clone());
    let mut queue = vec![zero];
    let mut all = Vec::new();
    while let Some(v) = queue.pop() {
        for g in &gens {
            let j: Vec<usize> = v.iter().zip(g).map(|(&a, &c)| b.join(a, c)).collect();
            if seen.insert(j.clone()) {
                if seen.len() > MAX_ELEMENTS {
                    return Err(Error::SizeExceeded(format!("MB^S exceeds {MAX_ELEMENTS} elements")));
                }
                queue.push(j);
            }
        }
        all.push(v);
    }
    Ok(all)
}

/// Direct enumeration of `{Mf : f ∈ B^S}`; only for `|B|^|S| ≤ 4096`.
pub fn enumerate_image(m: &ProjectionMatrix) -> Result<BTreeSet<Vec<usize>>> {
    let b = m.base();
    let n = m.len();
    let total = (b.len() as u128).checked_pow(n as u32).filter(|&t| t <= MAX_FREE as u128);
    let Some(total) = total else {
        return Err(Error::SizeExceeded(format!("B^S has more than {MAX_FREE} elements")));
    };
    let mut out = BTreeSet::new();
    for code in 0..total as usize {
        let mut c = code;
        let f: Vec<usize> = (0..n)
            .map(|_| {
                let v = c % b.len();
                c /= b.len();
                v
            })
            .collect();
        out.insert(m.matrix.mul_vec(&f)?);
    }
    Ok(out)
}

pub fn module_from_matrix(m: &ProjectionMatrix) -> Result<MatrixModule> {
    let b = m.base().clone();
    let vectors = image_by_closure(m)?;
    let (lattice, vectors) = Lattice::from_family(
        vectors,
        |u, v| u.iter().zip(v).map(|(&a, &c)| b.join(a, c)).collect(),
        |u, v| u.iter().zip(v).map(|(&a, &c)| b.meet(a, c)).collect(),
        |v| format!("({})", v.iter().map(|&a| b.label(a)).collect::<Vec<_>>().join(",")),
    )?;
    let lookup: HashMap<Vec<usize>, usize> = vectors.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
    let action: Vec<Vec<usize>> = b
        .elements()
        .map(|c| vectors.iter().map(|v| lookup[&v.iter().map(|&a| b.meet(c, a)).collect::<Vec<_>>()]).collect())
        .collect();
    let module = BModule::new(b.clone(), Arc::new(lattice), action)?;
    let locale = Arc::new(BLocale::new(module)?);
    let ip = InnerProduct::from_fn(vectors.len(), |x, y| {
        b.join_set(vectors[x].iter().zip(&vectors[y]).map(|(&p, &q)| b.meet(p, q)))
    });
    let hilbert = HilbertModule::new(locale.module_arc().clone(), ip)?;
    let columns: Vec<usize> = (0..m.len()).map(|s| lookup[&m.matrix.column(s)]).collect();
    let based = BasedHilbert::new(hilbert, columns.clone())?;
    let gram = based.gram();
    if let Some((s, t)) = iproduct!(0..m.len(), 0..m.len()).find(|&(s, t)| gram[s][t] != m.matrix.get(s, t)) {
        return Err(Error::Mismatch(format!("⟨s̃,t̃⟩ differs from m[{s}][{t}]")));
    }
    Ok(MatrixModule { matrix: m.clone(), based, vectors, columns, lookup, locale })
}

/// `m_{st} = ⟨s,t⟩` over an ordered basis.
pub fn matrix_from_module(h: &BasedHilbert) -> Result<ProjectionMatrix> {
    let base = h.module().base().clone();
    let labels = h.basis.iter().map(|&s| h.module().carrier().label(s).to_string()).collect();
    let k = h.basis.len();
    ProjectionMatrix::new(Matrix::from_fn(base, k, k, |s, t| h.hilbert.ip(h.basis[s], h.basis[t])), labels)
}

/// The isomorphism `ψ(x) = (⟨x,s⟩)_s` from a based module onto `MB^Σ` for its
/// Gram matrix, with inverse `φ(f) = ⋁_s f_s s`.
#[derive(Clone, Debug)]
pub struct CanonicalIso {
    pub psi: Vec<usize>,
    pub phi: Vec<usize>,
    pub report: LawReport,
}

pub fn canonical_iso(h: &BasedHilbert, mm: &MatrixModule) -> Result<CanonicalIso> {
    let m = h.module();
    let (b_, x_) = (&**m.base(), &**m.carrier());
    let mut psi = Vec::with_capacity(x_.len());
    for x in x_.elements() {
        let v = h.hilbert.coordinates(&h.basis, x);
        psi.push(mm.element_of(&v).ok_or_else(|| Error::Mismatch(format!("ψ({}) is not in MB^Σ", x_.label(x))))?);
    }
    let phi: Vec<usize> = mm
        .vectors
        .iter()
        .map(|f| x_.join_set(h.basis.iter().zip(f).map(|(&s, &c)| m.act(c, s))))
        .collect();
    let target = mm.module_arc();
    let tx = &**target.carrier();
    let mut r = LawReport::new("canonical isomorphism");
    r.push(LawCheck::over("φ∘ψ = id", x_.elements(), |&x| phi[psi[x]] == x, |&x| Witness::new([x], "φ(ψ(x)) ≠ x")));
    r.push(LawCheck::over("ψ∘φ = id", 0..mm.len(), |&f| psi[phi[f]] == f, |&f| Witness::new([f], "ψ(φ(f)) ≠ f")));
    r.push(LawCheck::over(
        "ψ preserves joins",
        iproduct!(x_.elements(), x_.elements()),
        |&(x, y)| psi[x_.join(x, y)] == tx.join(psi[x], psi[y]),
        |&(x, y)| Witness::new([x, y], "ψ(x ∨ y) ≠ ψ(x) ∨ ψ(y)"),
    ));
    r.push(LawCheck::over(
        "ψ preserves the action",
        iproduct!(b_.elements(), x_.elements()),
        |&(b, x)| psi[m.act(b, x)] == target.act(b, psi[x]),
        |&(b, x)| Witness::new([b, x], "ψ(bx) ≠ bψ(x)"),
    ));
    let mi = &mm.based.hilbert;
    r.push(LawCheck::over(
        "ψ preserves the inner product",
        iproduct!(x_.elements(), x_.elements()),
        |&(x, y)| mi.ip(psi[x], psi[y]) == h.hilbert.ip(x, y),
        |&(x, y)| Witness::new([x, y], "⟨ψx,ψy⟩ ≠ ⟨x,y⟩"),
    ));
    Ok(CanonicalIso { psi, phi, report: r })
}

/// `(M(h))_{ts} = ⟨h(s),t⟩` for `s ∈ Σ_X`, `t ∈ Σ_Y`.
pub fn functor_m(h: &ModuleHom, x: &BasedHilbert, y: &BasedHilbert) -> Result<MatArrow> {
    if !same_module(h.source(), x.hilbert.module_arc()) || !same_module(h.target(), y.hilbert.module_arc()) {
        return Err(Error::Mismatch("hom does not connect the given modules".into()));
    }
    if let Some(w) = h.laws().witness() {
        return Err(Error::NotAHom(w));
    }
    let (mx, my) = (matrix_from_module(x)?, matrix_from_module(y)?);
    let base = mx.base().clone();
    let f = Matrix::from_fn(base, y.basis.len(), x.basis.len(), |t, s| y.hilbert.ip(h.apply(x.basis[s]), y.basis[t]));
    MatArrow::new(mx, my, f)
}

/// `X(F)(f) = Ff` as a hom `MB^S → NB^T`.
pub fn functor_x(f: &MatArrow, src: &MatrixModule, tgt: &MatrixModule) -> Result<ModuleHom> {
    if src.matrix != f.source || tgt.matrix != f.target {
        return Err(Error::Mismatch("arrow endpoints differ from the given modules".into()));
    }
    let mut table = Vec::with_capacity(src.len());
    for v in &src.vectors {
        let w = f.f.mul_vec(v)?;
        let idx = tgt
            .element_of(&w)
            .ok_or_else(|| Error::ArrowLawViolation(Witness::text("Ff leaves the target module")))?;
        table.push(idx);
    }
    let h = ModuleHom::unchecked(src.module_arc().clone(), tgt.module_arc().clone(), table)?;
    if let Some(w) = h.laws().witness() {
        return Err(Error::ArrowLawViolation(w));
    }
    Ok(h)
}

/// For a hom `h: X → Y` of based modules: `M(h)` is an arrow, `M(h†) = M(h)ᵀ`,
/// `X(M(h))` agrees with `h` through the canonical isos, `M(X(M(h))) = M(h)`,
/// and `M`, `X` send identities to identities.
pub fn functor_report(h: &ModuleHom, x: &BasedHilbert, y: &BasedHilbert) -> Result<LawReport> {
    let (mx, my) = (matrix_from_module(x)?, matrix_from_module(y)?);
    functor_report_with(h, x, y, &module_from_matrix(&mx)?, &module_from_matrix(&my)?)
}

/// As [`functor_report`], reusing the matrix modules of `x` and `y`.
pub fn functor_report_with(
    h: &ModuleHom,
    x: &BasedHilbert,
    y: &BasedHilbert,
    mmx: &MatrixModule,
    mmy: &MatrixModule,
) -> Result<LawReport> {
    let mh = functor_m(h, x, y)?;
    if mh.source().matrix() != mmx.matrix.matrix() || mh.target().matrix() != mmy.matrix.matrix() {
        return Err(Error::Mismatch("matrix modules do not belong to the given bases".into()));
    }
    let (mmx, mmy) = (mmx.clone(), mmy.clone());
    let (ix, iy) = (canonical_iso(x, &mmx)?, canonical_iso(y, &mmy)?);
    let xmh = functor_x(&mh, &mmx, &mmy)?;
    let hd = adjoint(h, x, &y.hilbert)?;
    let mhd = functor_m(&hd, y, x)?;
    let mut r = LawReport::new("functors M and X");
    r.push(LawCheck::from_bool("M(h†) = M(h)ᵀ", mhd == mh.transpose(), || Witness::text("transpose mismatch")));
    r.push(LawCheck::over(
        "X(M(h)) ∘ ψ = ψ ∘ h",
        x.module().carrier().elements(),
        |&a| xmh.apply(ix.psi[a]) == iy.psi[h.apply(a)],
        |&a| Witness::new([a], "round trip through matrices changes h"),
    ));
    let back = functor_m(&xmh, &mmx.based, &mmy.based)?;
    r.push(LawCheck::from_bool("M(X(F)) = F", back.f == mh.f, || Witness::text("M(X(F)) differs from F")));
    let idx = ModuleHom::identity(x.hilbert.module_arc().clone());
    r.push(LawCheck::from_bool("M(id) = identity", functor_m(&idx, x, x)? == MatArrow::identity(mh.source()), || {
        Witness::text("M(id) is not the object matrix")
    }));
    let xid = functor_x(&MatArrow::identity(mh.source()), &mmx, &mmx)?;
    r.push(LawCheck::from_bool("X(identity) = id", xid.table() == (0..mmx.len()).collect::<Vec<_>>(), || {
        Witness::text("X(M) is not the identity")
    }));
    r.push(LawCheck::from_bool("transpose is involutive", mh.transpose().transpose() == mh, || {
        Witness::text("Fᵀᵀ ≠ F")
    }));
    Ok(r)
}

/// `M(h∘k) = M(h)∘M(k)`, `X(G∘F) = X(G)∘X(F)` and `(G∘F)ᵀ = Fᵀ∘Gᵀ` for
/// `k: X → Y`, `h: Y → Z`.
pub fn functoriality_report(k: &ModuleHom, h: &ModuleHom, x: &BasedHilbert, y: &BasedHilbert, z: &BasedHilbert) -> Result<LawReport> {
    let hk = k.compose(h)?;
    let (mk, mh, mhk) = (functor_m(k, x, y)?, functor_m(h, y, z)?, functor_m(&hk, x, z)?);
    let comp = mk.compose(&mh)?;
    let (mx, my, mz) = (module_from_matrix(mk.source())?, module_from_matrix(mk.target())?, module_from_matrix(mh.target())?);
    let xk = functor_x(&mk, &mx, &my)?;
    let xh = functor_x(&mh, &my, &mz)?;
    let xc = functor_x(&comp, &mx, &mz)?;
    let mut r = LawReport::new("functoriality");
    r.push(LawCheck::from_bool("M(h∘k) = M(h)∘M(k)", mhk == comp, || Witness::text("M does not preserve composition")));
    r.push(LawCheck::from_bool("X(G∘F) = X(G)∘X(F)", xk.compose(&xh)?.table() == xc.table(), || {
        Witness::text("X does not preserve composition")
    }));
    r.push(LawCheck::from_bool("(G∘F)ᵀ = Fᵀ∘Gᵀ", comp.transpose() == mh.transpose().compose(&mk.transpose())?, || {
        Witness::text("transpose is not contravariant")
    }));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bmodule::free_module;
    use crate::hilbert::{inner_from_support, support_from_inner};

    fn b2() -> Arc<Frame> {
        Arc::new(Frame::two())
    }

    fn bd() -> Arc<Frame> {
        Arc::new(Frame::diamond())
    }

    fn pm(base: Arc<Frame>, e: Vec<Vec<usize>>) -> ProjectionMatrix {
        ProjectionMatrix::unnamed(Matrix::new(base, e).unwrap()).unwrap()
    }

    #[test]
    fn matmul_examples() {
        let all = Matrix::new(b2(), vec![vec![1, 1], vec![1, 1]]).unwrap();
        assert_eq!(all.mul_vec(&[1, 0]).unwrap(), vec![1, 1]);
        let id = Matrix::identity(b2(), 2);
        assert_eq!(id.matmul(&all).unwrap(), all);
        assert_eq!(all.matmul(&id).unwrap(), all);
        assert!(matches!(all.mul_vec(&[1]), Err(Error::DimensionMismatch(_))));
        let wide = Matrix::new(b2(), vec![vec![1, 0, 1]]).unwrap();
        assert!(matches!(wide.matmul(&wide), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn projection_examples() {
        assert!(is_projection_matrix(&Matrix::identity(bd(), 3)).passed());
        for b in 0..4 {
            assert!(is_projection_matrix(&Matrix::new(bd(), vec![vec![b]]).unwrap()).passed());
        }
        // [[1,a],[b,1]]
        let m = Matrix::new(bd(), vec![vec![3, 1], vec![2, 3]]).unwrap();
        let r = is_projection_matrix(&m);
        assert!(!r.holds("M = Mᵀ"));
    }

    #[test]
    fn identity_matrix_gives_free_module() {
        let mm = module_from_matrix(&pm(b2(), vec![vec![1, 0], vec![0, 1]])).unwrap();
        assert_eq!(mm.len(), 4);
        assert!(mm.locale().is_etale().unwrap());
        let fm = free_module(b2(), vec!["0".into(), "1".into()]).unwrap();
        assert_eq!(mm.locale().carrier().len(), fm.locale.len());
    }

    #[test]
    fn all_ones_matrix_gives_b2() {
        let mm = module_from_matrix(&pm(b2(), vec![vec![1, 1], vec![1, 1]])).unwrap();
        assert_eq!(mm.vectors, vec![vec![0, 0], vec![1, 1]]);
        assert_eq!(mm.columns, vec![1, 1]);
        assert_eq!(matrix_from_module(&mm.based).unwrap().matrix().entries(), vec![vec![1, 1], vec![1, 1]]);
    }

    #[test]
    fn single_entry_a_over_diamond() {
        let mm = module_from_matrix(&pm(bd(), vec![vec![1]])).unwrap();
        assert_eq!(mm.vectors, vec![vec![0], vec![1]]);
    }

    #[test]
    fn closure_agrees_with_enumeration() {
        for e in [vec![vec![3, 1], vec![1, 3]], vec![vec![1, 1], vec![1, 1]], vec![vec![3, 0], vec![0, 2]]] {
            let m = pm(bd(), e);
            let mm = module_from_matrix(&m).unwrap();
            let got: BTreeSet<Vec<usize>> = mm.vectors.iter().cloned().collect();
            assert_eq!(got, enumerate_image(&m).unwrap());
        }
    }

    #[test]
    fn free_unit_vectors_give_identity() {
        let fm = free_module(b2(), vec!["s".into(), "t".into()]).unwrap();
        let h = BasedHilbert::new(inner_from_support(&fm.locale).unwrap(), fm.unit_vectors()).unwrap();
        let m = matrix_from_module(&h).unwrap();
        assert_eq!(m.matrix().entries(), vec![vec![1, 0], vec![0, 1]]);
        let mm = module_from_matrix(&m).unwrap();
        assert!(canonical_iso(&h, &mm).unwrap().report.passed());
    }

    #[test]
    fn trivial_module_gives_zero_matrix() {
        let t = crate::bmodule::module_from_map(b2(), &Frame::trivial(), &[0, 0]).unwrap();
        let h = BasedHilbert::new(inner_from_support(&t).unwrap(), vec![0]).unwrap();
        assert_eq!(matrix_from_module(&h).unwrap().matrix().entries(), vec![vec![0]]);
    }

    #[test]
    fn arrow_operations() {
        let m = pm(b2(), vec![vec![1, 0], vec![0, 1]]);
        let swap = MatArrow::new(m.clone(), m.clone(), Matrix::new(b2(), vec![vec![0, 1], vec![1, 0]]).unwrap()).unwrap();
        let id = MatArrow::identity(&m);
        assert_eq!(id.compose(&swap).unwrap(), swap);
        assert_eq!(swap.compose(&id).unwrap(), swap);
        assert_eq!(swap.transpose().transpose(), swap);
        let bad = MatArrow::new(
            pm(b2(), vec![vec![1, 1], vec![1, 1]]),
            m,
            Matrix::new(b2(), vec![vec![1, 0], vec![0, 0]]).unwrap(),
        );
        assert!(matches!(bad, Err(Error::ArrowLawViolation(_))));
    }

    #[test]
    fn swap_hom_gives_permutation_matrix() {
        let fm = free_module(b2(), vec!["s".into(), "t".into()]).unwrap();
        let h = BasedHilbert::new(inner_from_support(&fm.locale).unwrap(), fm.unit_vectors()).unwrap();
        let table: Vec<usize> =
            (0..4).map(|f| fm.element_of(&[fm.coord(f, 1), fm.coord(f, 0)]).unwrap()).collect();
        let m = fm.locale.module_arc().clone();
        let sw = ModuleHom::new(m.clone(), m, table).unwrap();
        let a = functor_m(&sw, &h, &h).unwrap();
        assert_eq!(a.matrix().entries(), vec![vec![0, 1], vec![1, 0]]);
        let r = functor_report(&sw, &h, &h).unwrap();
        assert!(r.passed(), "{r}");
        assert!(functoriality_report(&sw, &sw, &h, &h, &h).unwrap().passed());
    }

    #[test]
    fn matrix_module_support_is_diagonal() {
        let mm = module_from_matrix(&pm(bd(), vec![vec![3, 1], vec![1, 3]])).unwrap();
        let p = support_from_inner(&mm.based.hilbert).unwrap();
        assert!(p.open);
        let diag: Vec<usize> = (0..mm.len()).map(|x| mm.based.hilbert.ip(x, x)).collect();
        assert_eq!(p.support, diag);
    }
}
