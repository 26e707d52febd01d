//! Commands: each turns a resolved config into stages and output files.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sunada_core::fingerprint::{are_isomorphic, automorphism_group, configuration_graph, ConfigurationGraph};
use sunada_core::groups::{
    gassmann_partition, is_almost_conjugate, normal_core, permutation_characters_agree, transplantation_certificate,
    Subgroup, SUBGROUP_ENUMERATION_BUDGET,
};
use sunada_core::holonomy::{assemble_spine, Precision, SpineGraph};
use sunada_core::spectrum::{
    compare_spectra, direct_cover_spectrum, enumerate_geodesics, limit_consistency_check, separation, snap,
    spectrum_csv, transplant_cover_spectrum, EnumerationParams, EnumerationStats, Enumeration, LengthSpectrum,
    SpectrumDiff, SpectrumEntry,
};
use sunada_core::surfaces::{cayley_surface, double, schreier_surface, validate_surface, GluingGraphSurface};

use crate::config::{ConfigError, Resolved, SurfaceKind};

/// Transplanted and directly enumerated cover spectra must agree this well.
pub const AGREEMENT_TOL: f64 = 1e-7;

/// Automorphism lists longer than this (in node images) are summarized.
const MAX_LISTED_IMAGES: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Command {
    GroupCheck,
    Certificate,
    Build,
    Spectrum,
    Cover,
    Compare,
    Fingerprint,
    Snap,
    Pipeline,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::GroupCheck => "group-check",
            Command::Certificate => "certificate",
            Command::Build => "build",
            Command::Spectrum => "spectrum",
            Command::Cover => "cover",
            Command::Compare => "compare",
            Command::Fingerprint => "fingerprint",
            Command::Snap => "snap",
            Command::Pipeline => "pipeline",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    /// A verified claim held.
    Pass,
    /// A verified claim failed.
    Fail,
    /// A spectrum or search did not reach its completeness certificate.
    Incomplete,
    /// Informational stage.
    Done,
}

impl Status {
    pub fn tag(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Incomplete => "INCOMPLETE",
            Status::Done => "DONE",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

/// Everything a run writes, except timings, which go to stderr only so
/// that output files stay byte-identical between runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub config_hash: String,
    pub status: Status,
    pub stages: Vec<Stage>,
    pub violations: Vec<String>,
    pub files: Vec<String>,
}

#[derive(thiserror::Error, Debug)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Failed(String),
}

fn failed(e: impl std::fmt::Display) -> RunError {
    RunError::Failed(e.to_string())
}

type Result<T, E = RunError> = std::result::Result<T, E>;

pub struct Outcome {
    pub report: RunReport,
    /// Output file name → contents.
    pub files: BTreeMap<String, Vec<u8>>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self.report.status {
            Status::Pass | Status::Done => 0,
            Status::Fail => 1,
            Status::Incomplete => 2,
        }
    }
}

struct Ctx<'a> {
    r: &'a Resolved,
    config_dir: &'a Path,
    hash: String,
    stages: Vec<Stage>,
    violations: Vec<String>,
    files: BTreeMap<String, Vec<u8>>,
}

impl Ctx<'_> {
    fn stage(&mut self, name: &str, status: Status, detail: impl Into<String>) {
        self.stages.push(Stage { name: name.into(), status, detail: detail.into() });
    }

    fn file(&mut self, name: String, contents: impl Into<Vec<u8>>) {
        self.files.insert(name, contents.into());
    }

    fn json(&mut self, name: String, value: &impl Serialize) -> Result<()> {
        let mut s = serde_json::to_string_pretty(value).map_err(failed)?;
        s.push('\n');
        self.file(name, s);
        Ok(())
    }

    fn params(&self) -> EnumerationParams {
        self.r.config.params()
    }

    fn precision(&self) -> Precision {
        self.r.config.spectrum.precision
    }

    fn cutoff(&self) -> f64 {
        self.r.config.spectrum.cutoff
    }

    fn need_subgroups(&self, n: usize) -> Result<()> {
        if self.r.subgroups.len() < n {
            return Err(ConfigError(vec![crate::config::ConfigIssue {
                path: "subgroups".into(),
                reason: format!("this command needs at least {n} subgroups, got {}", self.r.subgroups.len()),
            }])
            .into());
        }
        Ok(())
    }
}

fn timed<T>(label: &str, f: impl FnOnce() -> T) -> T {
    let t = Instant::now();
    let out = f();
    eprintln!("[time] {label}: {:.3} s", t.elapsed().as_secs_f64());
    out
}

pub fn run(command: Command, r: &Resolved, config_dir: &Path) -> Result<Outcome> {
    let mut ctx = Ctx {
        r,
        config_dir,
        hash: r.config.hash(),
        stages: Vec::new(),
        violations: Vec::new(),
        files: BTreeMap::new(),
    };
    match command {
        Command::GroupCheck => group_check(&mut ctx)?,
        Command::Certificate => certificate(&mut ctx)?,
        Command::Build => build(&mut ctx)?,
        Command::Spectrum => spectrum(&mut ctx)?,
        Command::Cover => cover(&mut ctx)?,
        Command::Compare => compare(&mut ctx)?,
        Command::Fingerprint => fingerprint(&mut ctx)?,
        Command::Snap => snap_cmd(&mut ctx)?,
        Command::Pipeline => pipeline(&mut ctx)?,
    }
    let status = overall(&ctx.stages);
    let mut names: Vec<String> = ctx.files.keys().cloned().collect();
    names.push("report.json".into());
    names.push("summary.txt".into());
    names.sort();
    let report = RunReport {
        command: command.name().into(),
        config_hash: ctx.hash.clone(),
        status,
        stages: ctx.stages,
        violations: ctx.violations,
        files: names,
    };
    let mut files = ctx.files;
    let mut json = serde_json::to_string_pretty(&report).map_err(failed)?;
    json.push('\n');
    files.insert("report.json".into(), json.into_bytes());
    files.insert("summary.txt".into(), summary(&report).into_bytes());
    Ok(Outcome { report, files })
}

/// Incomplete results make every verdict provisional, so they dominate.
fn overall(stages: &[Stage]) -> Status {
    if stages.iter().any(|s| s.status == Status::Incomplete) {
        Status::Incomplete
    } else if stages.iter().any(|s| s.status == Status::Fail) {
        Status::Fail
    } else if stages.iter().any(|s| s.status == Status::Pass) {
        Status::Pass
    } else {
        Status::Done
    }
}

pub fn summary(report: &RunReport) -> String {
    let mut s = format!("sunada-lab {}\nconfig hash: {}\n", report.command, report.config_hash);
    for st in &report.stages {
        s += &format!("[{}] {}: {}\n", st.status.tag(), st.name, st.detail);
    }
    for v in &report.violations {
        s += &format!("violation: {v}\n");
    }
    s += &format!("status: {}\nfiles: {}\n", report.status.tag(), report.files.join(", "));
    s
}

// ---------------------------------------------------------------- groups

#[derive(Serialize)]
struct SubgroupInfo {
    name: String,
    order: usize,
    index: usize,
    normal: bool,
    core_order: usize,
    members: Vec<String>,
}

#[derive(Serialize)]
struct PairInfo {
    first: usize,
    second: usize,
    almost_conjugate: bool,
    conjugate: bool,
    shared_core: Option<Vec<String>>,
    /// `(class representative, |C ∩ first|, |C ∩ second|)`.
    class_counts: Vec<(String, usize, usize)>,
}

#[derive(Serialize)]
struct PartitionClass {
    order: usize,
    index: usize,
    core_order: usize,
    subgroups: usize,
}

fn subgroup_info(ctx: &Ctx, i: usize) -> SubgroupInfo {
    let k = &ctx.r.subgroups[i];
    SubgroupInfo {
        name: ctx.r.subgroup_name(i),
        order: k.order(),
        index: k.index(),
        normal: k.is_normal(),
        core_order: normal_core(k).order(),
        members: k.names(),
    }
}

fn pair_info(ctx: &Ctx, i: usize, j: usize) -> Result<PairInfo> {
    let g = &ctx.r.group;
    let rep = is_almost_conjugate(&ctx.r.subgroups[i], &ctx.r.subgroups[j]).map_err(failed)?;
    Ok(PairInfo {
        first: i,
        second: j,
        almost_conjugate: rep.almost_conjugate,
        conjugate: rep.conjugate,
        shared_core: rep.shared_core.map(|c| c.names()),
        class_counts: rep.per_class_counts.iter().map(|&(c, a, b)| (g.name(c), a, b)).collect(),
    })
}

fn group_check(ctx: &mut Ctx) -> Result<()> {
    let g = ctx.r.group.clone();
    ctx.stage("group", Status::Done, format!("{} of order {}", g.label(), g.order()));
    let subgroups: Vec<SubgroupInfo> = (0..ctx.r.subgroups.len()).map(|i| subgroup_info(ctx, i)).collect();
    for s in &subgroups {
        ctx.stage(
            &format!("subgroup {}", s.name),
            Status::Done,
            format!("order {}, index {}, core order {}", s.order, s.index, s.core_order),
        );
    }
    let mut pairs = Vec::new();
    for i in 0..ctx.r.subgroups.len() {
        for j in i + 1..ctx.r.subgroups.len() {
            let p = timed("almost conjugacy", || pair_info(ctx, i, j))?;
            ctx.stage(
                &format!("pair {} / {}", ctx.r.subgroup_name(i), ctx.r.subgroup_name(j)),
                Status::Done,
                format!(
                    "almost conjugate: {}, conjugate: {}, shared core: {}",
                    p.almost_conjugate,
                    p.conjugate,
                    p.shared_core.as_ref().map_or("no".to_string(), |c| format!("order {}", c.len()))
                ),
            );
            pairs.push(p);
        }
    }
    let partition = if g.order() <= SUBGROUP_ENUMERATION_BUDGET {
        match timed("gassmann partition", || gassmann_partition(&g)) {
            Ok(classes) => {
                let nontrivial = classes.iter().filter(|c| c.members.len() > 1).count();
                ctx.stage(
                    "gassmann partition",
                    Status::Pass,
                    format!("{} classes, {nontrivial} with several subgroups; each shares order, index and core", classes.len()),
                );
                Some(
                    classes
                        .iter()
                        .map(|c| PartitionClass {
                            order: c.order,
                            index: c.index,
                            core_order: c.core.order(),
                            subgroups: c.members.len(),
                        })
                        .collect::<Vec<_>>(),
                )
            }
            Err(e) => {
                ctx.stage("gassmann partition", Status::Fail, e.to_string());
                ctx.violations.push(e.to_string());
                None
            }
        }
    } else {
        ctx.stage(
            "gassmann partition",
            Status::Done,
            format!("skipped: order {} exceeds the enumeration budget {SUBGROUP_ENUMERATION_BUDGET}", g.order()),
        );
        None
    };
    #[derive(Serialize)]
    struct Doc {
        group: String,
        order: usize,
        subgroups: Vec<SubgroupInfo>,
        pairs: Vec<PairInfo>,
        partition: Option<Vec<PartitionClass>>,
    }
    let doc = Doc { group: g.label().into(), order: g.order(), subgroups, pairs, partition };
    ctx.json("group_check.json".into(), &doc)
}

#[derive(Serialize)]
struct CertificateInfo {
    first: String,
    second: String,
    holds: bool,
    characters_agree: bool,
    witness: Option<(String, Vec<usize>, Vec<usize>)>,
}

fn certificates(ctx: &mut Ctx) -> Result<Vec<CertificateInfo>> {
    ctx.need_subgroups(2)?;
    let g = ctx.r.group.clone();
    let mut out = Vec::new();
    for j in 1..ctx.r.subgroups.len() {
        let (a, b) = (&ctx.r.subgroups[0], &ctx.r.subgroups[j]);
        let c = transplantation_certificate(a, b).map_err(failed)?;
        let chars = permutation_characters_agree(a, b).map_err(failed)?;
        let info = CertificateInfo {
            first: ctx.r.subgroup_name(0),
            second: ctx.r.subgroup_name(j),
            holds: c.holds,
            characters_agree: chars,
            witness: c.witness.map(|(x, t1, t2)| (g.name(x), t1, t2)),
        };
        let status = if info.holds && chars { Status::Pass } else { Status::Fail };
        let detail = match &info.witness {
            None if chars => format!("cycle types agree for all {} elements; permutation characters agree", g.order()),
            None => "cycle types agree but permutation characters differ".to_string(),
            Some((x, t1, t2)) => format!("element {x} has cycle types {t1:?} and {t2:?}"),
        };
        ctx.stage(&format!("certificate {} / {}", info.first, info.second), status, detail);
        out.push(info);
    }
    Ok(out)
}

fn certificate(ctx: &mut Ctx) -> Result<()> {
    let certs = certificates(ctx)?;
    ctx.json("certificate.json".into(), &certs)
}

// -------------------------------------------------------------- surfaces

fn surface_of(ctx: &Ctx, kind: SurfaceKind, subgroup: usize) -> Result<GluingGraphSurface> {
    let r = ctx.r;
    let s = match kind {
        SurfaceKind::Pants => GluingGraphSurface::pants(r.config.surface.lengths.expect("checked at parse time")),
        SurfaceKind::Cayley => cayley_surface(&r.group, &r.genset, &r.template()?).map_err(failed)?,
        SurfaceKind::Base => schreier_surface(&Subgroup::whole(&r.group), &r.genset, &r.template()?).map_err(failed)?,
        SurfaceKind::Schreier => schreier_surface(&r.subgroups[subgroup], &r.genset, &r.template()?).map_err(failed)?,
    };
    if r.config.surface.double {
        double(&s).map_err(failed)
    } else {
        Ok(s)
    }
}

fn configured_surface(ctx: &Ctx) -> Result<GluingGraphSurface> {
    surface_of(ctx, ctx.r.config.surface.kind, ctx.r.config.surface.subgroup)
}

fn spine_of(ctx: &Ctx, s: &GluingGraphSurface) -> Result<SpineGraph> {
    let group = (ctx.r.config.surface.kind != SurfaceKind::Pants).then(|| ctx.r.group.clone());
    assemble_spine(s, group, ctx.precision()).map_err(failed)
}

/// Validates and records; returns whether the surface is valid.
fn validated(ctx: &mut Ctx, name: &str, s: &GluingGraphSurface) -> bool {
    let rep = validate_surface(s);
    let ok = rep.is_valid();
    let detail = format!(
        "{} pants, {} seams, {} boundary cuffs, genus {}{}",
        s.pants.len(),
        s.seams.len(),
        s.boundary.len(),
        s.genus().map_or("?".into(), |g| g.to_string()),
        if rep.warnings.is_empty() { String::new() } else { format!("; warnings: {}", rep.warnings.join("; ")) }
    );
    ctx.stage(name, if ok { Status::Pass } else { Status::Fail }, detail);
    ctx.violations.extend(rep.violations.iter().map(|v| format!("{name}: {v}")));
    ok
}

fn build(ctx: &mut Ctx) -> Result<()> {
    let s = configured_surface(ctx)?;
    validated(ctx, "surface", &s);
    let rep = validate_surface(&s);
    ctx.file("surface.json".into(), s.to_json().map_err(failed)? + "\n");
    ctx.json("validation.json".into(), &rep)
}

// -------------------------------------------------------------- spectra

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumMetadata {
    pub surface: String,
    pub cutoff: f64,
    pub tolerance: f64,
    pub complete: bool,
    pub params: EnumerationParams,
    pub precision: Precision,
    pub config_hash: String,
    pub stats: EnumerationStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordRow {
    pub length: f64,
    pub multiplicity: usize,
    pub primitive: bool,
    pub word: String,
    pub monodromy_class: String,
}

/// JSON mirror of a spectrum CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumDocument {
    pub metadata: SpectrumMetadata,
    pub entries: Vec<SpectrumEntry>,
    pub records: Vec<RecordRow>,
}

impl SpectrumDocument {
    pub fn spectrum(&self) -> LengthSpectrum {
        LengthSpectrum {
            cutoff: self.metadata.cutoff,
            tolerance: self.metadata.tolerance,
            complete: self.metadata.complete,
            entries: self.entries.clone(),
        }
    }
}

fn emit_spectrum(ctx: &mut Ctx, stem: &str, surface: &str, e: &Enumeration) -> Result<()> {
    let csv = spectrum_csv(&e.records, &e.spectrum).map_err(failed)?;
    ctx.file(format!("{stem}.csv"), csv);
    let doc = SpectrumDocument {
        metadata: SpectrumMetadata {
            surface: surface.into(),
            cutoff: e.spectrum.cutoff,
            tolerance: e.spectrum.tolerance,
            complete: e.spectrum.complete,
            params: ctx.params(),
            precision: ctx.precision(),
            config_hash: ctx.hash.clone(),
            stats: e.stats.clone(),
        },
        entries: e.spectrum.entries.clone(),
        records: e
            .records
            .iter()
            .map(|r| RecordRow {
                length: r.length,
                multiplicity: e.spectrum.multiplicity_of(r.length),
                primitive: r.primitive,
                word: r.word.clone(),
                monodromy_class: r.monodromy_class.clone(),
            })
            .collect(),
    };
    ctx.json(format!("{stem}.json"), &doc)
}

fn spectrum_stage(ctx: &mut Ctx, name: &str, e: &Enumeration) {
    let st = &e.stats;
    let status = if e.spectrum.complete { Status::Done } else { Status::Incomplete };
    ctx.stage(
        name,
        status,
        format!(
            "{} geodesics ({} distinct lengths) up to {}; complete: {} (saturated: {}, budget exhausted: {}, cover radius {:.4})",
            e.spectrum.total(),
            e.spectrum.entries.len(),
            e.spectrum.cutoff,
            e.spectrum.complete,
            st.saturated,
            st.budget_exhausted,
            st.cover_radius
        ),
    );
}

fn spectrum(ctx: &mut Ctx) -> Result<()> {
    let s = configured_surface(ctx)?;
    if !validated(ctx, "surface", &s) {
        return Ok(());
    }
    let sp = spine_of(ctx, &s)?;
    let e = timed("enumeration", || enumerate_geodesics(&sp, ctx.cutoff(), &ctx.params())).map_err(failed)?;
    spectrum_stage(ctx, "spectrum", &e);
    emit_spectrum(ctx, "spectrum", "configured", &e)
}

/// Base spine (one template copy) with its spectrum up to the cutoff.
fn base_spectrum(ctx: &mut Ctx) -> Result<(SpineGraph, Enumeration)> {
    let base = surface_of(ctx, SurfaceKind::Base, 0)?;
    validated(ctx, "base surface", &base);
    let group = ctx.r.group.clone();
    let sp = assemble_spine(&base, Some(group), ctx.precision()).map_err(failed)?;
    let e = timed("base enumeration", || enumerate_geodesics(&sp, ctx.cutoff(), &ctx.params())).map_err(failed)?;
    spectrum_stage(ctx, "base spectrum", &e);
    emit_spectrum(ctx, "base_spectrum", "base", &e)?;
    Ok((sp, e))
}

/// Transplanted cover spectra for every subgroup, cross-checked against
/// direct enumeration when configured.
fn cover_spectra(ctx: &mut Ctx, sp: &SpineGraph, base: &Enumeration) -> Result<Vec<Option<Enumeration>>> {
    let mut out = Vec::new();
    for i in 0..ctx.r.subgroups.len() {
        let name = ctx.r.subgroup_name(i);
        if !base.spectrum.complete {
            ctx.stage(&format!("cover {name}"), Status::Incomplete, "base spectrum is incomplete; no transplantation");
            out.push(None);
            continue;
        }
        let k = ctx.r.subgroups[i].clone();
        let t = transplant_cover_spectrum(base, &k, ctx.cutoff()).map_err(failed)?;
        ctx.stage(
            &format!("cover {name}"),
            Status::Done,
            format!("transplanted: {} geodesics up to {} on {} sheets", t.spectrum.total(), t.spectrum.cutoff, k.index()),
        );
        emit_spectrum(ctx, &format!("cover_{i}"), &format!("cover {name} (transplanted)"), &t)?;
        if ctx.r.config.spectrum.direct {
            let d = timed("direct cover", || direct_cover_spectrum(sp, &k, ctx.cutoff(), &ctx.params())).map_err(failed)?;
            emit_spectrum(ctx, &format!("cover_{i}_direct"), &format!("cover {name} (direct)"), &d)?;
            let diff = compare_spectra(&t.spectrum, &d.spectrum, AGREEMENT_TOL).map_err(failed)?;
            let status = if !d.spectrum.complete {
                Status::Incomplete
            } else if diff.is_empty() {
                Status::Pass
            } else {
                Status::Fail
            };
            ctx.stage(
                &format!("transplant = direct {name}"),
                status,
                format!("{} vs {} geodesics; {}", t.spectrum.total(), d.spectrum.total(), describe_diff(&diff)),
            );
        }
        out.push(Some(t));
    }
    Ok(out)
}

fn describe_diff(d: &SpectrumDiff) -> String {
    if d.is_empty() {
        "spectra agree".into()
    } else {
        format!(
            "{} only in first, {} only in second, {} multiplicity mismatches",
            d.only_in_first.len(),
            d.only_in_second.len(),
            d.multiplicity_mismatches.len()
        )
    }
}

fn cover(ctx: &mut Ctx) -> Result<()> {
    ctx.need_subgroups(1)?;
    let (sp, base) = base_spectrum(ctx)?;
    let covers = cover_spectra(ctx, &sp, &base)?;
    if let Some(Some(first)) = covers.first() {
        for (j, c) in covers.iter().enumerate().skip(1) {
            if let Some(c) = c {
                let diff = compare_spectra(&first.spectrum, &c.spectrum, ctx.r.config.spectrum.tolerance).map_err(failed)?;
                let names = (ctx.r.subgroup_name(0), ctx.r.subgroup_name(j));
                ctx.stage(&format!("compare {} / {}", names.0, names.1), Status::Done, describe_diff(&diff));
            }
        }
    }
    Ok(())
}

fn read_spectrum(ctx: &Ctx, path: &str, field: &str) -> Result<SpectrumDocument> {
    let p = ctx.config_dir.join(path);
    let issue = |reason: String| {
        RunError::Config(ConfigError(vec![crate::config::ConfigIssue { path: format!("compare.{field}"), reason }]))
    };
    let text = std::fs::read_to_string(&p).map_err(|e| issue(format!("cannot read {}: {e}", p.display())))?;
    serde_json::from_str(&text).map_err(|e| issue(format!("{} is not a spectrum document: {e}", p.display())))
}

fn compare(ctx: &mut Ctx) -> Result<()> {
    let (a, b, tol) = if let Some(cmp) = ctx.r.config.compare.clone() {
        let a = read_spectrum(ctx, &cmp.first, "first")?.spectrum();
        let b = read_spectrum(ctx, &cmp.second, "second")?.spectrum();
        let tol = cmp.tolerance.unwrap_or(a.tolerance.max(b.tolerance));
        (a, b, tol)
    } else {
        ctx.need_subgroups(2)?;
        let (_, base) = base_spectrum(ctx)?;
        if !base.spectrum.complete {
            ctx.stage("compare", Status::Incomplete, "base spectrum is incomplete");
            return Ok(());
        }
        let cutoff = ctx.cutoff();
        let a = transplant_cover_spectrum(&base, &ctx.r.subgroups[0], cutoff).map_err(failed)?.spectrum;
        let b = transplant_cover_spectrum(&base, &ctx.r.subgroups[1], cutoff).map_err(failed)?.spectrum;
        let tol = ctx.r.config.spectrum.tolerance;
        (a, b, tol)
    };
    let diff = compare_spectra(&a, &b, tol).map_err(failed)?;
    let status = if !(a.complete && b.complete) {
        Status::Incomplete
    } else if diff.is_empty() {
        Status::Pass
    } else {
        Status::Fail
    };
    ctx.stage("compare", status, format!("{} vs {} geodesics; {}", a.total(), b.total(), describe_diff(&diff)));
    ctx.json("diff.json".into(), &diff)
}

// ----------------------------------------------------------- fingerprints

#[derive(Serialize)]
struct AutomorphismDoc {
    order: usize,
    orbit_sizes: Vec<usize>,
    /// Node images of every automorphism, unless the list is too long.
    permutations: Option<Vec<Vec<usize>>>,
}

fn fingerprint_delta(ctx: &Ctx) -> f64 {
    ctx.r.config.fingerprint.delta.unwrap_or(ctx.r.config.template.delta)
}

fn graph_of(ctx: &Ctx, s: &GluingGraphSurface) -> Result<ConfigurationGraph> {
    configuration_graph(s, fingerprint_delta(ctx)).map_err(failed)
}

fn fingerprint(ctx: &mut Ctx) -> Result<()> {
    let s = configured_surface(ctx)?;
    if !validated(ctx, "surface", &s) {
        return Ok(());
    }
    let g = graph_of(ctx, &s)?;
    let aut = timed("automorphisms", || automorphism_group(&g)).map_err(failed)?;
    let mut orbit_sizes: Vec<usize> = (0..g.len()).map(|v| aut.orbit(v).len()).collect();
    orbit_sizes.sort_unstable();
    let listed = aut.order() * g.len() <= MAX_LISTED_IMAGES;
    ctx.stage(
        "automorphisms",
        Status::Done,
        format!("{} nodes, {} edges; automorphism group of order {}", g.len(), g.edges.len(), aut.order()),
    );
    ctx.json("graph.json".into(), &g)?;
    let doc = AutomorphismDoc {
        order: aut.order(),
        orbit_sizes,
        permutations: listed.then(|| aut.elements.iter().map(|a| a.mapping.clone()).collect()),
    };
    ctx.json("automorphisms.json".into(), &doc)?;
    if ctx.r.subgroups.len() >= 2 {
        let graphs = schreier_graphs(ctx)?;
        isomorphism_stages(ctx, &graphs, false)?;
    }
    Ok(())
}

fn schreier_graphs(ctx: &mut Ctx) -> Result<Vec<ConfigurationGraph>> {
    let mut out = Vec::new();
    for i in 0..ctx.r.subgroups.len() {
        let s = surface_of(ctx, SurfaceKind::Schreier, i)?;
        let g = graph_of(ctx, &s)?;
        ctx.json(format!("graph_{i}.json"), &g)?;
        out.push(g);
    }
    Ok(out)
}

#[derive(Serialize)]
struct IsomorphismInfo {
    first: String,
    second: String,
    isomorphic: bool,
    mapping: Option<Vec<usize>>,
}

/// Pairwise isomorphism tests; with `expect_distinct`, an isomorphism is a failure.
fn isomorphism_stages(ctx: &mut Ctx, graphs: &[ConfigurationGraph], expect_distinct: bool) -> Result<()> {
    let mut infos = Vec::new();
    for i in 0..graphs.len() {
        for j in i + 1..graphs.len() {
            let iso = timed("isomorphism", || are_isomorphic(&graphs[i], &graphs[j])).map_err(failed)?;
            let (a, b) = (ctx.r.subgroup_name(i), ctx.r.subgroup_name(j));
            let status = match (expect_distinct, iso.is_some()) {
                (false, _) => Status::Done,
                (true, false) => Status::Pass,
                (true, true) => Status::Fail,
            };
            let detail = if iso.is_some() {
                "configuration graphs are isomorphic".to_string()
            } else {
                format!("no isomorphism between the {}-node configuration graphs", graphs[i].len())
            };
            ctx.stage(&format!("fingerprint {a} / {b}"), status, detail);
            infos.push(IsomorphismInfo { first: a, second: b, isomorphic: iso.is_some(), mapping: iso.map(|m| m.mapping) });
        }
    }
    ctx.json("isomorphism.json".into(), &infos)
}

// ------------------------------------------------------------------ snap

#[derive(Serialize)]
struct SnapDoc {
    epsilon: f64,
    reference: Vec<f64>,
    /// Snapped value of every term of every sequence.
    snapped: Vec<Vec<Option<f64>>>,
    report: sunada_core::spectrum::LimitReport,
}

fn snap_cmd(ctx: &mut Ctx) -> Result<()> {
    let Some(spec) = ctx.r.config.snap.clone() else {
        return Err(ConfigError(vec![crate::config::ConfigIssue {
            path: "snap".into(),
            reason: "the snap command needs a \"snap\" section".into(),
        }])
        .into());
    };
    let cutoff = ctx.cutoff();
    let reference = match spec.values {
        Some(v) => LengthSpectrum::from_lengths(cutoff, ctx.r.config.spectrum.tolerance, true, v),
        None => {
            let s = configured_surface(ctx)?;
            let sp = spine_of(ctx, &s)?;
            let e = enumerate_geodesics(&sp, cutoff, &ctx.params()).map_err(failed)?;
            spectrum_stage(ctx, "reference spectrum", &e);
            e.spectrum
        }
    };
    let epsilon = separation(&reference, cutoff / 2.0, true).map_err(failed)?;
    let snapped: Vec<Vec<Option<f64>>> =
        spec.measured.iter().map(|seq| seq.iter().map(|&m| snap(m, &reference, epsilon)).collect()).collect();
    let report = limit_consistency_check(std::slice::from_ref(&reference), &reference, &spec.measured);
    let status = if report.consistent { Status::Pass } else { Status::Fail };
    ctx.stage(
        "limit consistency",
        status,
        format!(
            "{} sequences, separation {epsilon}; {} snap to a spectrum value",
            spec.measured.len(),
            report.limits.iter().filter(|l| l.is_some()).count()
        ),
    );
    ctx.json("snap.json".into(), &SnapDoc { epsilon, reference: reference.values(), snapped, report })
}

// -------------------------------------------------------------- pipeline

fn pipeline(ctx: &mut Ctx) -> Result<()> {
    ctx.need_subgroups(2)?;
    let n = ctx.r.subgroups.len();
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let p = timed("almost conjugacy", || pair_info(ctx, i, j))?;
            let ok = p.almost_conjugate && !p.conjugate;
            ctx.stage(
                &format!("gassmann {} / {}", ctx.r.subgroup_name(i), ctx.r.subgroup_name(j)),
                if ok { Status::Pass } else { Status::Fail },
                format!("almost conjugate: {}, conjugate: {}", p.almost_conjugate, p.conjugate),
            );
            pairs.push(p);
        }
    }
    ctx.json("gassmann.json".into(), &pairs)?;
    let certs = certificates(ctx)?;
    ctx.json("certificate.json".into(), &certs)?;

    for i in 0..n {
        let s = surface_of(ctx, SurfaceKind::Schreier, i)?;
        validated(ctx, &format!("surface {}", ctx.r.subgroup_name(i)), &s);
        ctx.file(format!("surface_{i}.json"), s.to_json().map_err(failed)? + "\n");
    }

    let (sp, base) = base_spectrum(ctx)?;
    let covers = cover_spectra(ctx, &sp, &base)?;
    if let Some(Some(first)) = covers.first() {
        for (j, c) in covers.iter().enumerate().skip(1) {
            if let Some(c) = c {
                let diff = compare_spectra(&first.spectrum, &c.spectrum, ctx.r.config.spectrum.tolerance).map_err(failed)?;
                let (a, b) = (ctx.r.subgroup_name(0), ctx.r.subgroup_name(j));
                ctx.stage(
                    &format!("isospectral {a} / {b}"),
                    if diff.is_empty() { Status::Pass } else { Status::Fail },
                    format!("{} geodesics each up to {}; {}", first.spectrum.total(), ctx.cutoff(), describe_diff(&diff)),
                );
            }
        }
    }

    let graphs = schreier_graphs(ctx)?;
    isomorphism_stages(ctx, &graphs, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stage(status: Status) -> Stage {
        Stage { name: "x".into(), status, detail: String::new() }
    }

    #[test]
    fn incomplete_dominates() {
        assert_eq!(overall(&[stage(Status::Pass), stage(Status::Fail), stage(Status::Incomplete)]), Status::Incomplete);
        assert_eq!(overall(&[stage(Status::Pass), stage(Status::Fail)]), Status::Fail);
        assert_eq!(overall(&[stage(Status::Done), stage(Status::Pass)]), Status::Pass);
        assert_eq!(overall(&[stage(Status::Done)]), Status::Done);
    }
}
