//! Experiment configuration: JSON document → validated, resolved setup.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use sunada_core::groups::{k_subgroup, named_subgroups, Elem, FiniteGroup, Subgroup};
use sunada_core::holonomy::Precision;
use sunada_core::spectrum::EnumerationParams;
use sunada_core::surfaces::{build_template, MarkerGroup, VertexTemplate};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigIssue {
    pub path: String,
    pub reason: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", if self.path.is_empty() { "<root>" } else { &self.path }, self.reason)
    }
}

#[derive(thiserror::Error, Debug, Clone, PartialEq)]
#[error("invalid config:\n{}", .0.iter().map(|i| format!("  {i}")).collect::<Vec<_>>().join("\n"))]
pub struct ConfigError(pub Vec<ConfigIssue>);

impl ConfigError {
    fn at(path: &str, reason: impl Into<String>) -> Self {
        ConfigError(vec![ConfigIssue { path: path.into(), reason: reason.into() }])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupSpec {
    HolomorphZ8,
    Cyclic { n: usize },
    Symmetric { n: usize },
    Power { base: Box<GroupSpec>, n: usize },
}

/// A subgroup by name (`"H1"`, `"H2"`, `"K(i)"`, `"whole"`, `"trivial"`)
/// or by its element names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SubgroupSpec {
    Named(String),
    Elements(Vec<String>),
}

/// `"auto"`, `"none"`, or explicit `[first, second]` genset index pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MarkerSpec {
    Mode(String),
    Pairs(Vec<[usize; 2]>),
}

impl Default for MarkerSpec {
    fn default() -> Self {
        MarkerSpec::Mode("auto".into())
    }
}

/// `"full"`, `"exclude_identity"`, or a list of element names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GensetSpec {
    Mode(String),
    Elements(Vec<String>),
}

impl Default for GensetSpec {
    fn default() -> Self {
        GensetSpec::Mode("full".into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TemplateSpec {
    /// Number of generators; must equal the genset size when given.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub delta: f64,
    pub epsilon: f64,
    pub seed: u64,
    pub markers: MarkerSpec,
}

impl Default for TemplateSpec {
    fn default() -> Self {
        TemplateSpec { n: None, delta: 0.5, epsilon: 0.8, seed: 0, markers: MarkerSpec::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceKind {
    /// One template copy per group element.
    #[default]
    Cayley,
    /// One copy per coset of `subgroups[subgroup]`.
    Schreier,
    /// A single copy: the quotient by the whole group.
    Base,
    /// A single pair of pants with the given lengths.
    Pants,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SurfaceSpec {
    pub kind: SurfaceKind,
    pub subgroup: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lengths: Option<[f64; 3]>,
    pub double: bool,
}

impl Default for SurfaceSpec {
    fn default() -> Self {
        SurfaceSpec { kind: SurfaceKind::Cayley, subgroup: 0, lengths: None, double: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumSpec {
    pub cutoff: f64,
    pub tolerance: f64,
    pub slack: f64,
    pub max_depth: usize,
    pub node_budget: usize,
    pub precision: Precision,
    pub primitive_only: bool,
    /// Also enumerate covers directly and check them against transplantation.
    pub direct: bool,
}

impl Default for SpectrumSpec {
    fn default() -> Self {
        let p = EnumerationParams::default();
        SpectrumSpec {
            cutoff: 1.0,
            tolerance: p.tolerance,
            slack: p.slack,
            max_depth: p.max_depth,
            node_budget: p.node_budget,
            precision: Precision::Double,
            primitive_only: false,
            direct: true,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FingerprintSpec {
    /// Short-curve bound; defaults to the template δ.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnapSpec {
    /// Reference spectrum values; computed from the surface when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    /// Measured length sequences, one per curve.
    #[serde(default)]
    pub measured: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareSpec {
    /// Spectrum JSON files, relative to the config file.
    pub first: String,
    pub second: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub group: GroupSpec,
    #[serde(default)]
    pub subgroups: Vec<SubgroupSpec>,
    #[serde(default)]
    pub template: TemplateSpec,
    #[serde(default)]
    pub genset: GensetSpec,
    #[serde(default)]
    pub surface: SurfaceSpec,
    #[serde(default)]
    pub spectrum: SpectrumSpec,
    #[serde(default)]
    pub fingerprint: FingerprintSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snap: Option<SnapSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compare: Option<CompareSpec>,
}

/// Parses and checks a config document. Every problem found is reported
/// with the JSON path it concerns.
pub fn parse_config(document: &str) -> Result<ExperimentConfig, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(document);
    let config: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        ConfigError::at(if path == "." { "" } else { &path }, e.inner().to_string())
    })?;
    let issues = check(&config);
    if issues.is_empty() {
        Ok(config)
    } else {
        Err(ConfigError(issues))
    }
}

fn check(c: &ExperimentConfig) -> Vec<ConfigIssue> {
    let mut out = Vec::new();
    let mut bad = |path: &str, reason: String| out.push(ConfigIssue { path: path.into(), reason });
    let t = &c.template;
    if !(t.delta > 0.0 && t.delta.is_finite()) {
        bad("template.delta", format!("must be positive, got {}", t.delta));
    } else if t.delta >= t.epsilon {
        bad("template.delta", format!("must be below template.epsilon = {}, got {}", t.epsilon, t.delta));
    }
    if !t.epsilon.is_finite() {
        bad("template.epsilon", format!("must be finite, got {}", t.epsilon));
    }
    if let MarkerSpec::Mode(m) = &t.markers {
        if m != "auto" && m != "none" {
            bad("template.markers", format!("unknown mode {m:?}; expected \"auto\", \"none\" or a list of [first, second] pairs"));
        }
    }
    if let GensetSpec::Mode(m) = &c.genset {
        if m != "full" && m != "exclude_identity" {
            bad("genset", format!("unknown mode {m:?}; expected \"full\", \"exclude_identity\" or a list of element names"));
        }
    }
    let s = &c.spectrum;
    if !(s.cutoff > 0.0 && s.cutoff.is_finite()) {
        bad("spectrum.cutoff", format!("must be positive, got {}", s.cutoff));
    }
    if !(s.tolerance > 0.0 && s.tolerance.is_finite()) {
        bad("spectrum.tolerance", format!("must be positive, got {}", s.tolerance));
    }
    if !(s.slack >= 0.0 && s.slack.is_finite()) {
        bad("spectrum.slack", format!("must be non-negative, got {}", s.slack));
    }
    if s.max_depth == 0 {
        bad("spectrum.max_depth", "must be at least 1".into());
    }
    if s.node_budget == 0 {
        bad("spectrum.node_budget", "must be at least 1".into());
    }
    if let Some(d) = c.fingerprint.delta {
        if !(d > 0.0 && d.is_finite()) {
            bad("fingerprint.delta", format!("must be positive, got {d}"));
        }
    }
    match c.surface.kind {
        SurfaceKind::Pants => match c.surface.lengths {
            None => bad("surface.lengths", "required for kind \"pants\"".into()),
            Some(l) if l.iter().any(|&x| !(x > 0.0 && x.is_finite())) => {
                bad("surface.lengths", format!("lengths must be positive, got {l:?}"))
            }
            _ => {}
        },
        SurfaceKind::Schreier if c.surface.subgroup >= c.subgroups.len() => bad(
            "surface.subgroup",
            format!("index {} but only {} subgroups are listed", c.surface.subgroup, c.subgroups.len()),
        ),
        _ => {}
    }
    if let Some(cmp) = &c.compare {
        if let Some(t) = cmp.tolerance {
            if !(t > 0.0 && t.is_finite()) {
                bad("compare.tolerance", format!("must be positive, got {t}"));
            }
        }
    }
    out
}

/// Overrides from the command line.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub precision: Option<Precision>,
}

impl ExperimentConfig {
    pub fn apply(&mut self, o: Overrides) {
        if let Some(seed) = o.seed {
            self.template.seed = seed;
        }
        if let Some(p) = o.precision {
            self.spectrum.precision = p;
        }
    }

    /// SHA-256 of the canonical JSON form (defaults filled in).
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(canonical.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn params(&self) -> EnumerationParams {
        let s = &self.spectrum;
        EnumerationParams {
            slack: s.slack,
            tolerance: s.tolerance,
            max_depth: s.max_depth,
            node_budget: s.node_budget,
            primitive_only: s.primitive_only,
        }
    }
}

/// Config with group-theoretic names resolved.
pub struct Resolved {
    pub config: ExperimentConfig,
    pub group: Arc<FiniteGroup>,
    /// Base group and its `(H1, H2)` when the group is `holomorph_z8` or a
    /// power of it.
    pub holomorph: Option<(Arc<FiniteGroup>, Subgroup, Subgroup)>,
    pub subgroups: Vec<Subgroup>,
    pub genset: Vec<Elem>,
}

fn build_group(spec: &GroupSpec, path: &str) -> Result<FiniteGroup, ConfigError> {
    let g = match spec {
        GroupSpec::HolomorphZ8 => Ok(FiniteGroup::holomorph_z8()),
        GroupSpec::Cyclic { n } => FiniteGroup::cyclic(*n),
        GroupSpec::Symmetric { n } => FiniteGroup::symmetric(*n),
        GroupSpec::Power { base, n } => build_group(base, &format!("{path}.base"))?.direct_power(*n),
    };
    g.map_err(|e| ConfigError::at(path, e.to_string()))
}

fn holomorph_power(spec: &GroupSpec) -> Option<usize> {
    match spec {
        GroupSpec::HolomorphZ8 => Some(1),
        GroupSpec::Power { base, n } => holomorph_power(base).map(|k| k * n),
        _ => None,
    }
}

pub fn resolve(config: ExperimentConfig) -> Result<Resolved, ConfigError> {
    let group = Arc::new(build_group(&config.group, "group")?);
    let power = holomorph_power(&config.group);
    let holomorph = power.map(|_| {
        let h = Arc::new(FiniteGroup::holomorph_z8());
        let (h1, h2) = named_subgroups(&h).expect("H1 and H2 exist");
        (h, h1, h2)
    });
    let mut issues = Vec::new();
    let mut subgroups = Vec::new();
    for (i, spec) in config.subgroups.iter().enumerate() {
        let path = format!("subgroups[{i}]");
        match resolve_subgroup(&group, power, holomorph.as_ref(), spec) {
            Ok(s) => subgroups.push(s),
            Err(reason) => issues.push(ConfigIssue { path, reason }),
        }
    }
    let genset: Vec<Elem> = match &config.genset {
        GensetSpec::Mode(m) if m == "full" => group.elements().collect(),
        GensetSpec::Mode(_) => group.elements().filter(|&g| g != group.identity()).collect(),
        GensetSpec::Elements(names) => names
            .iter()
            .enumerate()
            .filter_map(|(i, n)| match group.element_by_name(n) {
                Ok(e) => Some(e),
                Err(_) => {
                    issues.push(ConfigIssue {
                        path: format!("genset[{i}]"),
                        reason: format!("no element named {n:?} in {}", group.label()),
                    });
                    None
                }
            })
            .collect(),
    };
    if genset.is_empty() && issues.is_empty() {
        issues.push(ConfigIssue { path: "genset".into(), reason: "generating set is empty".into() });
    }
    if let Some(n) = config.template.n {
        if n != genset.len() {
            issues.push(ConfigIssue {
                path: "template.n".into(),
                reason: format!("template has {n} generators but the genset has {}", genset.len()),
            });
        }
    }
    if issues.is_empty() {
        Ok(Resolved { config, group, holomorph, subgroups, genset })
    } else {
        Err(ConfigError(issues))
    }
}

fn resolve_subgroup(
    group: &Arc<FiniteGroup>,
    power: Option<usize>,
    holomorph: Option<&(Arc<FiniteGroup>, Subgroup, Subgroup)>,
    spec: &SubgroupSpec,
) -> Result<Subgroup, String> {
    match spec {
        SubgroupSpec::Elements(names) => Subgroup::from_names(group, names).map_err(|e| e.to_string()),
        SubgroupSpec::Named(name) => {
            let name = name.trim();
            match name {
                "whole" => return Ok(Subgroup::whole(group)),
                "trivial" => return Ok(Subgroup::trivial(group)),
                _ => {}
            }
            if name == "H1" || name == "H2" {
                return match (power, holomorph) {
                    (Some(1), Some((_, h1, h2))) => {
                        let k = if name == "H1" { h1 } else { h2 };
                        Subgroup::from_members(group, k.members().iter().copied()).map_err(|e| e.to_string())
                    }
                    _ => Err(format!("{name} is defined only for holomorph_z8; use \"K(i)\" for its powers")),
                };
            }
            if let Some(i) = name.strip_prefix("K(").and_then(|r| r.strip_suffix(')')) {
                let i: usize = i.trim().parse().map_err(|_| format!("cannot read the index in {name:?}"))?;
                return match (power, holomorph) {
                    (Some(_), Some((_, h1, h2))) => k_subgroup(group, h1, h2, i).map_err(|e| e.to_string()),
                    _ => Err(format!("{name} needs a power of holomorph_z8")),
                };
            }
            Err(format!(
                "unknown subgroup name {name:?}; expected one of \"H1\", \"H2\", \"K(i)\", \"whole\", \"trivial\" or a list of element names"
            ))
        }
    }
}

impl Resolved {
    pub fn markers(&self) -> Result<Vec<MarkerGroup>, ConfigError> {
        match &self.config.template.markers {
            MarkerSpec::Pairs(p) => Ok(p.iter().map(|&[first, second]| MarkerGroup { first, second }).collect()),
            MarkerSpec::Mode(m) if m == "none" => Ok(Vec::new()),
            MarkerSpec::Mode(_) => Ok(self.auto_markers()),
        }
    }

    /// One marker group per factor `i` whose `ι_i(h1)` and `ι_i(h2)` are
    /// both in the genset, with `h1 = (3,0)`, `h2 = (5,0)`.
    fn auto_markers(&self) -> Vec<MarkerGroup> {
        let Some((h, _, _)) = &self.holomorph else { return Vec::new() };
        let (Ok(a), Ok(b)) = (h.element_by_name("(3,0)"), h.element_by_name("(5,0)")) else { return Vec::new() };
        let factors = self.group.factor_count().max(1);
        let find = |x: Elem| self.genset.iter().position(|&g| g == x);
        let mut out = Vec::new();
        for i in 0..factors {
            let embed = |e: Elem| if factors == 1 { Ok(e) } else { self.group.embed(i, e) };
            if let (Ok(x), Ok(y)) = (embed(a), embed(b)) {
                if let (Some(first), Some(second)) = (find(x), find(y)) {
                    out.push(MarkerGroup { first, second });
                }
            }
        }
        out
    }

    pub fn template(&self) -> Result<VertexTemplate, ConfigError> {
        let t = &self.config.template;
        build_template(self.genset.len(), t.delta, t.epsilon, t.seed, &self.markers()?)
            .map_err(|e| ConfigError::at("template", e.to_string()))
    }

    pub fn subgroup_name(&self, i: usize) -> String {
        match &self.config.subgroups[i] {
            SubgroupSpec::Named(n) => n.trim().to_string(),
            SubgroupSpec::Elements(_) => format!("subgroup {i}"),
        }
    }
}
