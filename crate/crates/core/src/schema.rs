//! JSON input and output formats.
//!
//! Frames, modules and matrices may be given inline or by fixture name. Element
//! references are indices into the canonical element order of the frame they
//! belong to.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bmodule::{BLocale, BModule};
use crate::error::{Error, Result};
use crate::genfix::fixtures::{base_fixture, frame_fixture, module_fixture};
use crate::hilbert::InnerProduct;
use crate::lattice::{downset_frame, Frame, Lattice, Poset};
use crate::matrix::{Matrix, ProjectionMatrix};

/// `{"elements": [names], "leq": [[i, j], ...]}`; pairs mean `i ≤ j` and are
/// closed reflexively and transitively.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PosetSpec {
    pub elements: Vec<String>,
    #[serde(default)]
    pub leq: Vec<[usize; 2]>,
}

impl PosetSpec {
    pub fn to_poset(&self) -> Result<Poset> {
        let pairs: Vec<(usize, usize)> = self.leq.iter().map(|&[i, j]| (i, j)).collect();
        Poset::new(self.elements.clone(), &pairs)
    }
}

/// An explicit lattice: labels plus full join and meet tables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameTable {
    pub labels: Vec<String>,
    pub join: Vec<Vec<usize>>,
    pub meet: Vec<Vec<usize>>,
}

impl FrameTable {
    pub fn of(l: &Lattice) -> Self {
        FrameTable { labels: l.labels().to_vec(), join: l.join_table(), meet: l.meet_table() }
    }

    pub fn to_lattice(&self) -> Result<Lattice> {
        Lattice::from_tables(self.labels.clone(), self.join.clone(), self.meet.clone())
    }
}

/// A frame: a fixture name, a poset (taken to its down-set frame), or a table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FrameRef {
    Fixture(String),
    Poset(PosetSpec),
    Table(FrameTable),
}

impl FrameRef {
    /// The lattice as given, without checking the frame laws.
    pub fn lattice(&self) -> Result<Lattice> {
        match self {
            FrameRef::Fixture(name) => frame_fixture(name),
            FrameRef::Poset(p) => Ok(downset_frame(&p.to_poset()?)?.into_lattice()),
            FrameRef::Table(t) => t.to_lattice(),
        }
    }

    pub fn frame(&self) -> Result<Frame> {
        match self {
            FrameRef::Fixture(name) => base_fixture(name),
            FrameRef::Poset(p) => downset_frame(&p.to_poset()?),
            FrameRef::Table(t) => Frame::new(t.to_lattice()?),
        }
    }
}

/// `{"base", "carrier", "pstar"}` for a module given by a frame map, or
/// `{"base", "carrier", "action"}` with `action[b][x] = bx`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleSpec {
    pub base: FrameRef,
    pub carrier: FrameRef,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pstar: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<Vec<Vec<usize>>>,
}

impl ModuleSpec {
    /// The map-backed description of a module, with both frames inline.
    pub fn of(m: &BModule) -> Self {
        ModuleSpec {
            base: FrameRef::Table(FrameTable::of(m.base())),
            carrier: FrameRef::Table(FrameTable::of(m.carrier())),
            pstar: Some(m.pstar()),
            action: None,
        }
    }

    pub fn module(&self) -> Result<BModule> {
        let base = Arc::new(self.base.frame()?);
        let carrier = Arc::new(self.carrier.lattice()?);
        match (&self.pstar, &self.action) {
            (Some(p), None) => {
                if p.len() != base.len() || p.iter().any(|&v| v >= carrier.len()) {
                    return Err(Error::Malformed(format!(
                        "pstar must list {} carrier elements below {}",
                        base.len(),
                        carrier.len()
                    )));
                }
                Ok(BModule::from_pstar(base, carrier, p))
            }
            (None, Some(a)) => BModule::raw(base, carrier, a.clone()),
            _ => Err(Error::Malformed("a module needs exactly one of `pstar` and `action`".into())),
        }
    }
}

/// A module by fixture name or inline.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModuleRef {
    Fixture(String),
    Spec(ModuleSpec),
}

impl ModuleRef {
    pub fn module(&self) -> Result<BModule> {
        match self {
            ModuleRef::Fixture(name) => module_fixture(name),
            ModuleRef::Spec(s) => s.module(),
        }
    }

    pub fn locale(&self) -> Result<BLocale> {
        BLocale::new(self.module()?)
    }
}

/// A module with an optional explicit inner product; without one the support
/// inner product `⟨x,y⟩ = spp(x ∧ y)` is used.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HilbertSpec {
    pub module: ModuleRef,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner: Option<Vec<Vec<usize>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HilbertRef {
    Explicit(HilbertSpec),
    Module(ModuleRef),
}

impl HilbertRef {
    pub fn module(&self) -> &ModuleRef {
        match self {
            HilbertRef::Explicit(h) => &h.module,
            HilbertRef::Module(m) => m,
        }
    }

    pub fn inner(&self) -> Option<&Vec<Vec<usize>>> {
        match self {
            HilbertRef::Explicit(h) => h.inner.as_ref(),
            HilbertRef::Module(_) => None,
        }
    }
}

/// Row-major inner-product table: `table[x][y]` is the base element `⟨x,y⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InnerProductDump {
    pub table: Vec<Vec<usize>>,
}

impl InnerProductDump {
    pub fn of(ip: &InnerProduct) -> Self {
        InnerProductDump { table: ip.table() }
    }
}

/// `{"base", "index": [names], "entries": [[element indices]]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSpec {
    pub base: FrameRef,
    #[serde(default)]
    pub index: Option<Vec<String>>,
    pub entries: Vec<Vec<usize>>,
}

impl MatrixSpec {
    pub fn of(m: &ProjectionMatrix) -> Self {
        MatrixSpec {
            base: FrameRef::Table(FrameTable::of(m.base())),
            index: Some(m.index().to_vec()),
            entries: m.matrix().entries(),
        }
    }

    pub fn matrix(&self) -> Result<Matrix> {
        let base = Arc::new(self.base.frame()?);
        Matrix::new(base, self.entries.clone())
    }

    pub fn projection(&self) -> Result<ProjectionMatrix> {
        let m = self.matrix()?;
        match &self.index {
            Some(ix) => ProjectionMatrix::new(m, ix.clone()),
            None => ProjectionMatrix::unnamed(m),
        }
    }
}

/// `{"source", "target", "table"}` with `table[x] = h(x)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomSpec {
    pub source: ModuleRef,
    pub target: ModuleRef,
    pub table: Vec<usize>,
}

/// `{"source", "target", "inverse_image"}`: a map `X → Y` given by `f*: Y → X`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub source: ModuleRef,
    pub target: ModuleRef,
    pub inverse_image: Vec<usize>,
}

pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    Ok(serde_json::from_str(text)?)
}
