use std::path::Path;
use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Map, Value};

use sheafmod::bmodule::BLocale;
use sheafmod::genfix::{run_suite, SuiteConfig};
use sheafmod::hilbert::{
    basis_properties, check_axioms, inner_from_support, is_hilbert_basis, BasedHilbert, HilbertModule, InnerProduct,
};
use sheafmod::homs::{
    adjoint, adjoint_report, adjointable_iff_hom, check_dagger_is_direct_image, hom_laws, sections_presheaf,
    sheaf_hom_report, BLocaleMap, ModuleHom,
};
use sheafmod::lattice::{hasse_dot, Lattice};
use sheafmod::matrix::{canonical_iso, is_projection_matrix, matrix_from_module, module_from_matrix, ProjectionMatrix};
use sheafmod::schema::{
    FrameRef, HilbertRef, HomSpec, InnerProductDump, MapSpec, MatrixSpec, ModuleRef, ModuleSpec,
};
use sheafmod::{Error, LawCheck, LawReport, Result, Witness};

use crate::{Format, Global};

/// What a subcommand produced. `reports` decide the exit code; `verdicts` are
/// informational.
#[derive(Debug, Serialize)]
pub struct Outcome {
    pub command: String,
    pub input: String,
    pub passed: bool,
    pub reports: Vec<LawReport>,
    pub verdicts: Vec<LawReport>,
    pub data: Map<String, Value>,
    #[serde(skip)]
    text: Option<String>,
    #[serde(skip)]
    json: Option<Value>,
}

impl Outcome {
    fn new(command: &str, input: &Path) -> Self {
        Outcome {
            command: command.into(),
            input: input.display().to_string(),
            passed: true,
            reports: Vec::new(),
            verdicts: Vec::new(),
            data: Map::new(),
            text: None,
            json: None,
        }
    }

    fn report(&mut self, r: LawReport) -> &mut Self {
        self.passed &= r.passed();
        self.reports.push(r);
        self
    }

    fn verdict(&mut self, r: LawReport) -> &mut Self {
        self.verdicts.push(r);
        self
    }

    fn put(&mut self, key: &str, v: impl Serialize) -> &mut Self {
        self.data.insert(key.into(), serde_json::to_value(v).expect("serializable"));
        self
    }

    pub fn first_failure(&self) -> Option<&LawCheck> {
        self.reports.iter().find_map(|r| r.first_failure())
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let v = self.json.clone().unwrap_or_else(|| serde_json::to_value(self).expect("serializable"));
                let mut s = serde_json::to_string_pretty(&v).expect("serializable");
                s.push('\n');
                s
            }
            Format::Text => {
                if let Some(t) = &self.text {
                    return t.clone();
                }
                let mut s = format!("{} {}\n", self.command, self.input);
                for r in &self.reports {
                    s.push_str(&r.to_string());
                }
                for r in &self.verdicts {
                    let mut r = r.clone();
                    r.subject = format!("{} (verdicts only)", r.subject);
                    s.push_str(&r.to_string());
                }
                for (k, v) in &self.data {
                    s.push_str(&format!("{k}: {v}\n"));
                }
                s.push_str(if self.passed { "PASS\n" } else { "FAIL\n" });
                s
            }
        }
    }
}

/// 1 for law failures, 2 for input that could not be interpreted.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::SizeExceeded(_)
        | Error::Malformed(_)
        | Error::NotAPoset(_)
        | Error::CrossFrame
        | Error::DimensionMismatch(_)
        | Error::UnknownFixture(_)
        | Error::Json(_) => 2,
        _ => 1,
    }
}

/// Reads JSON from `path`, or treats a nonexistent path as a fixture name.
fn load<T: for<'de> serde::Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = if path.exists() {
        std::fs::read_to_string(path).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))?
    } else {
        let name = path.to_string_lossy();
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-') {
            return Err(Error::Malformed(format!("{name}: no such file or fixture")));
        }
        serde_json::to_string(&name).expect("string")
    };
    sheafmod::schema::from_json(&text)
}

fn guard(g: &Global, l: &Lattice) -> Result<()> {
    if l.len() > g.max_size {
        return Err(Error::SizeExceeded(format!("{} elements, --max-size is {}", l.len(), g.max_size)));
    }
    Ok(())
}

fn load_locale(g: &Global, r: &ModuleRef) -> Result<BLocale> {
    let m = r.module()?;
    guard(g, m.base())?;
    guard(g, m.carrier())?;
    BLocale::new(m)
}

fn based(x: &BLocale) -> Result<BasedHilbert> {
    BasedHilbert::from_etale(x)
}

pub fn frame_check(g: &Global, file: &Path) -> Result<Outcome> {
    let r: FrameRef = load(file)?;
    let l = r.lattice()?;
    guard(g, &l)?;
    let mut out = Outcome::new("frame check", file);
    out.report(sheafmod::verify_frame(&l));
    out.put("elements", l.len()).put("labels", l.labels());
    Ok(out)
}

pub fn module_check(g: &Global, file: &Path) -> Result<Outcome> {
    let r: ModuleRef = load(file)?;
    let m = r.module()?;
    guard(g, m.base())?;
    guard(g, m.carrier())?;
    let mut out = Outcome::new("module check", file);
    let mut laws = m.laws();
    laws.push(m.stability());
    let mut frame = sheafmod::verify_frame(m.carrier());
    frame.subject = "carrier frame".into();
    out.report(laws).report(frame);
    out.put("base", m.base().len()).put("carrier", m.len());
    if out.passed {
        let x = BLocale::new(m)?;
        let p = x.projection();
        out.verdict(p.report.clone());
        out.put("open", x.is_open()).put("pstar", &p.pstar);
        out.put("spp_preserves_meets", p.support_preserves_meets);
        if x.is_open() {
            out.put("support", x.support()?).put("sections", x.local_sections()?).put("etale", x.is_etale()?);
        }
    }
    Ok(out)
}

pub fn module_sections(g: &Global, file: &Path) -> Result<Outcome> {
    let x = load_locale(g, &load(file)?)?;
    let mut out = Outcome::new("module sections", file);
    let c = x.carrier();
    let rows: Vec<Value> = x
        .local_sections()?
        .iter()
        .map(|&s| json!({"index": s, "label": c.label(s), "support": x.base().label(x.spp(s))}))
        .collect();
    out.put("sections", rows).put("etale", x.is_etale()?);
    if x.is_etale()? {
        let g = sections_presheaf(&x)?;
        let table: Vec<Value> = x
            .base()
            .elements()
            .map(|b| json!({"over": x.base().label(b), "sections": g.fiber(b)}))
            .collect();
        out.put("presheaf", table);
        out.report(g.report);
    }
    Ok(out)
}

pub fn module_to_matrix(g: &Global, file: &Path) -> Result<Outcome> {
    let x = load_locale(g, &load(file)?)?;
    let h = BasedHilbert::from_etale_irreducible(&x)?;
    let m = matrix_from_module(&h)?;
    let mm = module_from_matrix(&m)?;
    let mut out = Outcome::new("module to-matrix", file);
    let mut r = LawReport::new("round trip");
    r.push(LawCheck::from_bool("matrix(module(M)) = M", matrix_from_module(&mm.based)?.matrix() == m.matrix(), || {
        Witness::text("matrix changed")
    }));
    r.extend(canonical_iso(&h, &mm)?.report);
    out.report(r);
    out.put("matrix", MatrixSpec::of(&m)).put("basis", &h.basis);
    Ok(out)
}

fn hilbert_of(g: &Global, r: &HilbertRef) -> Result<(HilbertModule, LawReport)> {
    let m = r.module().module()?;
    guard(g, m.base())?;
    guard(g, m.carrier())?;
    match r.inner() {
        Some(t) => {
            let ip = InnerProduct::from_table(&m, t.clone())?;
            let axioms = check_axioms(&m, &ip);
            if let Some(w) = axioms.witness() {
                return Err(Error::InnerProductLaw(w));
            }
            Ok((HilbertModule::new(Arc::new(m), ip)?, axioms))
        }
        None => {
            let x = BLocale::new(m)?;
            let h = inner_from_support(&x)?;
            let axioms = check_axioms(h.module(), h.inner());
            Ok((h, axioms))
        }
    }
}

pub fn hilbert_check(g: &Global, file: &Path) -> Result<Outcome> {
    let (h, axioms) = hilbert_of(g, &load(file)?)?;
    let mut out = Outcome::new("hilbert check", file);
    out.report(axioms);
    let f = h.flags();
    let mut flags = LawReport::new("flags");
    flags.push(f.nondegenerate.clone()).push(f.weakly_nondegenerate.clone()).push(f.strict.clone()).push(f.supported.clone());
    out.verdict(flags);
    out.put("inner", InnerProductDump::of(h.inner()));
    Ok(out)
}

/// Comma-separated labels or indices; labels may themselves contain commas.
fn parse_subset(h: &HilbertModule, subset: &str) -> Result<Vec<usize>> {
    let c = h.module().carrier();
    let lookup = |t: &str| c.index_of(t).or_else(|| t.parse().ok().filter(|&i: &usize| i < c.len()));
    let mut out = Vec::new();
    let mut pending = String::new();
    for tok in subset.split(',') {
        if !pending.is_empty() {
            pending.push(',');
        }
        pending.push_str(tok.trim());
        if let Some(i) = lookup(&pending) {
            out.push(i);
            pending.clear();
        }
    }
    if !pending.is_empty() {
        return Err(Error::Malformed(format!("`{pending}` is not an element")));
    }
    Ok(out)
}

pub fn hilbert_basis(g: &Global, file: &Path, subset: &str) -> Result<Outcome> {
    let (h, _) = hilbert_of(g, &load(file)?)?;
    let basis = parse_subset(&h, subset)?;
    let mut out = Outcome::new("hilbert basis", file);
    let mut r = LawReport::new("Hilbert basis");
    r.push(is_hilbert_basis(&h, &basis));
    out.report(r);
    out.report(basis_properties(&h, &basis)?);
    out.put("basis", &basis);
    Ok(out)
}

pub fn matrix_to_module(g: &Global, file: &Path) -> Result<Outcome> {
    let spec: MatrixSpec = load(file)?;
    let m = spec.matrix()?;
    guard(g, m.base())?;
    let mut out = Outcome::new("matrix to-module", file);
    let proj = is_projection_matrix(&m);
    out.report(proj);
    if !out.passed {
        return Ok(out);
    }
    let pm = match &spec.index {
        Some(ix) => ProjectionMatrix::new(m, ix.clone())?,
        None => ProjectionMatrix::unnamed(m)?,
    };
    let mm = module_from_matrix(&pm)?;
    let mut r = LawReport::new("round trip");
    r.push(LawCheck::from_bool("matrix(module(M)) = M", matrix_from_module(&mm.based)?.matrix() == pm.matrix(), || {
        Witness::text("matrix changed")
    }));
    let x = mm.locale();
    let h = BasedHilbert::new(inner_from_support(x)?, mm.columns.clone())?;
    r.extend(canonical_iso(&h, &mm)?.report);
    out.report(r);
    out.put("module", ModuleSpec::of(x.module()));
    out.put("vectors", &mm.vectors).put("columns", &mm.columns).put("etale", x.is_etale()?);
    Ok(out)
}

fn load_hom(g: &Global, file: &Path) -> Result<(Arc<BLocale>, Arc<BLocale>, Vec<usize>)> {
    let spec: HomSpec = load(file)?;
    let x = Arc::new(load_locale(g, &spec.source)?);
    let y = Arc::new(load_locale(g, &spec.target)?);
    if x.base().id() != y.base().id() {
        return Err(Error::CrossFrame);
    }
    if spec.table.len() != x.len() || spec.table.iter().any(|&v| v >= y.len()) {
        return Err(Error::Malformed(format!("table must list {} elements below {}", x.len(), y.len())));
    }
    Ok((x, y, spec.table))
}

pub fn hom_adjoint(g: &Global, file: &Path) -> Result<Outcome> {
    let (x, y, table) = load_hom(g, file)?;
    let (hx, hy) = (based(&x)?, based(&y)?);
    let h = ModuleHom::new(x.module_arc().clone(), y.module_arc().clone(), table)?;
    let hd = adjoint(&h, &hx, &hy.hilbert)?;
    let mut out = Outcome::new("hom adjoint", file);
    out.report(adjoint_report(&h, &hx, &hy.hilbert, Some(&hy.basis))?);
    out.put("adjoint", hd.table());
    Ok(out)
}

pub fn hom_check(g: &Global, file: &Path) -> Result<Outcome> {
    let (x, y, table) = load_hom(g, file)?;
    let mut out = Outcome::new("hom check", file);
    let laws = hom_laws(x.module(), y.module(), &table);
    let is_hom = laws.passed();
    out.report(laws);
    if let (Ok(hx), Ok(hy)) = (based(&x), based(&y)) {
        let v = adjointable_iff_hom(&table, &hx, &hy.hilbert)?;
        let mut r = LawReport::new("adjointability");
        r.push(LawCheck::from_bool("adjointable ⇔ module hom", v.agree, || Witness::text(format!("{v:?}"))));
        out.report(r);
        out.put("adjointable", v.adjointable);
    }
    out.put("module_hom", is_hom);
    if is_hom && x.is_open() && y.is_open() {
        let h = ModuleHom::new(x.module_arc().clone(), y.module_arc().clone(), table)?;
        let sheaf = sheaf_hom_report(&x, &y, &h)?;
        out.put("sheaf_hom", sheaf.passed());
        out.verdict(sheaf);
    }
    Ok(out)
}

pub fn map_dagger_check(g: &Global, file: &Path) -> Result<Outcome> {
    let spec: MapSpec = load(file)?;
    let x = Arc::new(load_locale(g, &spec.source)?);
    let y = Arc::new(load_locale(g, &spec.target)?);
    if x.base().id() != y.base().id() {
        return Err(Error::CrossFrame);
    }
    if spec.inverse_image.len() != y.len() || spec.inverse_image.iter().any(|&v| v >= x.len()) {
        return Err(Error::Malformed(format!("inverse_image must list {} elements below {}", y.len(), x.len())));
    }
    let f = BLocaleMap::new(x, y, spec.inverse_image)?;
    let mut out = Outcome::new("map dagger-check", file);
    out.report(check_dagger_is_direct_image(&f)?);
    out.put("direct_image", f.direct_table());
    Ok(out)
}

pub fn suite_run(g: &Global, count: usize, max_elements: usize, fixtures: bool) -> Result<Outcome> {
    let cfg = SuiteConfig { seed: g.seed, count, max_elements, fixtures, ..SuiteConfig::default() };
    let report = run_suite(&cfg)?;
    let mut out = Outcome::new("suite run", Path::new("-"));
    out.passed = report.passed;
    if !report.passed {
        let mut r = LawReport::new("suite");
        for (inst, c) in report.failures() {
            r.push(c.check.clone().renamed(format!("{}: {}", inst.name, c.check.law)));
        }
        out.reports.push(r);
    }
    out.text = Some(report.to_string());
    out.json = Some(serde_json::to_value(&report)?);
    Ok(out)
}

pub fn export_dot(g: &Global, file: &Path) -> Result<Outcome> {
    let name = file.file_stem().map_or("lattice".into(), |s| s.to_string_lossy().into_owned());
    let text = if file.exists() {
        std::fs::read_to_string(file).map_err(|e| Error::Malformed(format!("{}: {e}", file.display())))?
    } else {
        serde_json::to_string(&file.to_string_lossy())?
    };
    let lattice = match sheafmod::schema::from_json::<FrameRef>(&text).and_then(|r| r.lattice()) {
        Ok(l) => l,
        Err(_) => {
            let m: ModuleRef = sheafmod::schema::from_json(&text)?;
            Lattice::clone(m.module()?.carrier())
        }
    };
    guard(g, &lattice)?;
    let mut out = Outcome::new("export dot", file);
    let dot = hasse_dot(&lattice, &name);
    out.put("dot", &dot);
    out.text = Some(dot);
    Ok(out)
}
