//! Job configuration, the analysis pipeline, report rendering, and the
//! regression corpus.
//!
//! A job is a TOML document:
//!
//! ```toml
//! p = 3
//! m = 3
//! blocks = [[[1, 2], [3]], [[1]]]   # 1-based subsets, grouped by block
//!
//! [analyses]
//! weights = true
//! griesmer = true
//! distance_optimal = true
//! locality = { delta = 2 }
//! availability = { delta = 2, t = 2 }
//! cm_bound = { r = 2, delta = 2 }
//! singleton = true
//!
//! [limits]
//! max_pm = 10000000
//! max_brute_n = 24
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::bounds::{
    check_griesmer_iff, cm_alphabet_optimal, dimension_optimal, distance_optimal_by_griesmer,
    distance_optimal_sufficient, griesmer_sum, intersecting_pairs_optimality, kopt_upper,
    singleton_like_defect, AlphabetOptimalityCertificate, BoundsError,
    DistanceOptimalityCertificate, GriesmerCertificate, IntersectingPairsOptimality,
};
use crate::code::{build_code_with_limit, CodeError, DefiningCode};
use crate::family::{family_stats, FamilyError, FamilyStats, PropertyIs, SubsetFamily};
use crate::gf::{FieldError, PrimeField};
use crate::locality::{
    brute_force_rdelta, certify_availability, certify_locality, partner_is_admissible,
    restricted_partner, LocalityCertificate, LocalityError, DEFAULT_MAX_BRUTE_N, MAX_BRUTE_SET,
};
use crate::matrix::{equal_up_to_permutation, export_matrix, import_matrix, MatrixError};
use crate::projgeom::{normalize, GeometryError, DEFAULT_MAX_PM};
use crate::subset::MAX_DIMENSION;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeltaSpec {
    pub delta: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AvailabilitySpec {
    pub delta: usize,
    pub t: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RDeltaSpec {
    pub r: usize,
    pub delta: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Analyses {
    #[serde(default)]
    pub weights: bool,
    #[serde(default)]
    pub griesmer: bool,
    #[serde(default)]
    pub distance_optimal: bool,
    /// Sufficient conditions for the two-block intersecting-pairs shape.
    #[serde(default)]
    pub intersecting_pairs: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub locality: Option<DeltaSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub availability: Option<AvailabilitySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cm_bound: Option<RDeltaSpec>,
    /// Uses the `cm_bound` parameters, or `r = 2` with the locality δ.
    #[serde(default)]
    pub singleton: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub brute_force: Option<RDeltaSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Limits {
    #[serde(default = "default_max_pm")]
    pub max_pm: u64,
    #[serde(default = "default_max_brute_n")]
    pub max_brute_n: usize,
}

fn default_max_pm() -> u64 {
    DEFAULT_MAX_PM
}

fn default_max_brute_n() -> usize {
    DEFAULT_MAX_BRUTE_N
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_pm: DEFAULT_MAX_PM,
            max_brute_n: DEFAULT_MAX_BRUTE_N,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub p: u64,
    pub m: usize,
    /// Blocks of 1-based subsets of `[m]`. Empty means the whole space.
    #[serde(default)]
    pub blocks: Vec<Vec<Vec<usize>>>,
    #[serde(default)]
    pub analyses: Analyses,
    #[serde(default)]
    pub limits: Limits,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub field: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JobError {
    #[error("invalid configuration:{}", render_diagnostics(.0))]
    ConfigInvalid(Vec<Diagnostic>),
    #[error("scale limit exceeded in stage `{stage}`: {message}")]
    ScaleLimitExceeded { stage: &'static str, message: String },
    #[error("stage `{stage}` failed: {message}")]
    Stage { stage: &'static str, message: String },
}

fn render_diagnostics(d: &[Diagnostic]) -> String {
    d.iter()
        .map(|d| format!("\n  {}: {}", d.field, d.message))
        .collect()
}

fn diag(field: impl Into<String>, message: impl Into<String>) -> Diagnostic {
    Diagnostic {
        field: field.into(),
        message: message.into(),
    }
}

impl JobConfig {
    pub fn from_toml(text: &str) -> Result<Self, JobError> {
        toml::from_str(text).map_err(|e| {
            let field = e
                .span()
                .map(|s| {
                    let line = text[..s.start.min(text.len())].matches('\n').count() + 1;
                    format!("line {line}")
                })
                .unwrap_or_else(|| "document".into());
            JobError::ConfigInvalid(vec![diag(field, e.message().to_string())])
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks the configuration and builds the field and family.
    pub fn validate(&self) -> Result<(PrimeField, SubsetFamily), JobError> {
        let mut errs = Vec::new();
        let field = PrimeField::new(self.p)
            .map_err(|e| errs.push(diag("p", e.to_string())))
            .ok();
        if self.m == 0 || self.m > MAX_DIMENSION {
            errs.push(diag("m", format!("must be in 1..={MAX_DIMENSION}")));
        }
        for (b, block) in self.blocks.iter().enumerate() {
            for (s, subset) in block.iter().enumerate() {
                for &i in subset {
                    if i == 0 || i > self.m {
                        errs.push(diag(
                            format!("blocks[{b}][{s}]"),
                            format!("index {i} is outside 1..={}", self.m),
                        ));
                    }
                }
            }
        }
        let p = self.p as usize;
        let a = &self.analyses;
        let delta_ok = |d: usize| d >= 2 && d <= p;
        if let Some(l) = &a.locality {
            if !delta_ok(l.delta) {
                errs.push(diag("analyses.locality.delta", format!("must be in 2..={p}")));
            }
        }
        if let Some(av) = &a.availability {
            if av.t == 0 {
                errs.push(diag("analyses.availability.t", "must be at least 1"));
            }
            match &a.locality {
                None => errs.push(diag(
                    "analyses.availability",
                    "requires analyses.locality with the same delta",
                )),
                Some(l) if l.delta != av.delta => errs.push(diag(
                    "analyses.availability.delta",
                    format!("must equal analyses.locality.delta = {}", l.delta),
                )),
                _ => {}
            }
        }
        if let Some(cm) = &a.cm_bound {
            if cm.r == 0 {
                errs.push(diag("analyses.cm_bound.r", "must be at least 1"));
            }
            if cm.delta < 2 {
                errs.push(diag("analyses.cm_bound.delta", "must be at least 2"));
            }
        }
        if a.singleton && a.cm_bound.is_none() && a.locality.is_none() {
            errs.push(diag(
                "analyses.singleton",
                "requires analyses.cm_bound or analyses.locality for (r, delta)",
            ));
        }
        if let Some(bf) = &a.brute_force {
            if bf.r == 0 || bf.delta < 2 {
                errs.push(diag("analyses.brute_force", "need r >= 1 and delta >= 2"));
            } else if bf.r + bf.delta - 1 > MAX_BRUTE_SET {
                errs.push(diag(
                    "analyses.brute_force",
                    format!("r + delta - 1 must be at most {MAX_BRUTE_SET}"),
                ));
            }
        }
        if self.limits.max_pm == 0 {
            errs.push(diag("limits.max_pm", "must be positive"));
        }
        if !errs.is_empty() {
            return Err(JobError::ConfigInvalid(errs));
        }
        let blocks = if self.blocks.is_empty() {
            vec![Vec::new()]
        } else {
            self.blocks.clone()
        };
        let fam = SubsetFamily::from_one_based(self.m, &blocks)
            .map_err(|e| JobError::ConfigInvalid(vec![diag("blocks", e.to_string())]))?;
        Ok((field.expect("checked above"), fam))
    }
}

fn code_err(stage: &'static str, e: CodeError) -> JobError {
    match e {
        CodeError::ScaleLimitExceeded { .. }
        | CodeError::Geometry(GeometryError::ScaleLimitExceeded { .. }) => {
            JobError::ScaleLimitExceeded {
                stage,
                message: e.to_string(),
            }
        }
        other => JobError::Stage {
            stage,
            message: other.to_string(),
        },
    }
}

fn bounds_err(stage: &'static str, e: BoundsError) -> JobError {
    match e {
        BoundsError::Code(c) => code_err(stage, c),
        other => JobError::Stage {
            stage,
            message: other.to_string(),
        },
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub m: usize,
    pub blocks: Vec<Vec<Vec<usize>>>,
    pub property_is: PropertyIs,
    pub hypotheses_hold: bool,
    pub stats: FamilyStats,
    pub log: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParametersReport {
    pub n: usize,
    pub k: usize,
    pub d: Option<usize>,
    /// Closed-form `[n, k, d]` from the family.
    pub predicted: [i128; 3],
    pub complement_sizes: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightsReport {
    pub enumerator: String,
    pub nonzero_weights: Vec<usize>,
    pub distribution: BTreeMap<usize, u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub sufficient: DistanceOptimalityCertificate,
    pub by_griesmer: bool,
    /// `griesmer_sum(p, k, d + 1)`
    pub next_griesmer_sum: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalityReport {
    pub delta: usize,
    pub t: usize,
    pub certified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<LocalityCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CmReport {
    pub r: usize,
    pub delta: usize,
    pub applicable: bool,
    /// Whether this run certified the (r, δ) locality the bound presumes.
    pub locality_backing: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<AlphabetOptimalityCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    /// `k` equals the Griesmer/Plotkin bound on `k_opt(n, d)`.
    pub dimension_optimal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingletonReport {
    pub r: usize,
    pub delta: usize,
    pub defect: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BruteForceReport {
    pub r: usize,
    pub delta: usize,
    pub holds: bool,
    pub failing_coordinate: Option<usize>,
    pub witnesses: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: JobConfig,
    pub family: FamilyReport,
    pub parameters: ParametersReport,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<WeightsReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub griesmer: Option<GriesmerCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance_optimal: Option<DistanceReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intersecting_pairs: Option<IntersectingPairsOptimality>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub locality: Option<LocalityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub availability: Option<LocalityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cm_bound: Option<CmReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub singleton: Option<SingletonReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub brute_force: Option<BruteForceReport>,
    /// Negative results: requested claims that could not be certified.
    pub negative: Vec<String>,
    /// Wall-clock per stage in milliseconds; excluded from comparisons.
    pub timings_ms: BTreeMap<String, f64>,
}

impl Report {
    pub fn is_negative(&self) -> bool {
        !self.negative.is_empty()
    }

    /// Machine-readable form.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Machine-readable form without timings, for byte comparisons.
    pub fn comparable_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Value::Object(map) = &mut v {
            map.remove("timings_ms");
        }
        serde_json::to_string_pretty(&v).expect("value serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let cfg = &self.config;
        let _ = writeln!(s, "code over F_{} with m = {}", cfg.p, cfg.m);
        let _ = writeln!(s, "blocks: {:?}", self.family.blocks);
        let pr = &self.parameters;
        let d = pr.d.map_or("-".to_string(), |d| d.to_string());
        let _ = writeln!(s, "parameters: [{}, {}, {}]", pr.n, pr.k, d);
        let _ = writeln!(
            s,
            "closed form: [{}, {}, {}] (hypotheses {})",
            pr.predicted[0],
            pr.predicted[1],
            pr.predicted[2],
            if self.family.hypotheses_hold { "hold" } else { "fail" }
        );
        for w in &self.warnings {
            let _ = writeln!(s, "warning: {w}");
        }
        if let Some(w) = &self.weights {
            let _ = writeln!(s, "weight enumerator: {}", w.enumerator);
        }
        if let Some(g) = &self.griesmer {
            let _ = writeln!(
                s,
                "griesmer: {} (sum {}, n {}; blocks disjoint {:?}, M = {}{})",
                g.is_griesmer,
                g.griesmer_sum,
                g.n,
                g.blocks_disjoint,
                g.max_multiplicity,
                if g.conditional { ", conditional" } else { "" }
            );
        }
        if let Some(dopt) = &self.distance_optimal {
            let _ = writeln!(
                s,
                "distance-optimal: by griesmer {} (next sum {}), family condition {}",
                dopt.by_griesmer, dopt.next_griesmer_sum, dopt.sufficient.sufficient
            );
        }
        if let Some(ip) = &self.intersecting_pairs {
            let _ = writeln!(
                s,
                "intersecting pairs: conditions {:?}, fired {:?}, cross-check {}{}",
                ip.conditions,
                ip.fired,
                ip.cross_check,
                if ip.disagreement { " (DISAGREEMENT)" } else { "" }
            );
        }
        for (label, rep) in [("locality", &self.locality), ("availability", &self.availability)] {
            if let Some(l) = rep {
                match &l.certificate {
                    Some(c) => {
                        let _ = writeln!(
                            s,
                            "{label}: (2,{})_{} certified for {} coordinates; uniform best delta {}; methods {:?}",
                            l.delta,
                            l.t,
                            c.coordinates.len(),
                            c.uniform_best_delta,
                            c.method_counts
                        );
                    }
                    None => {
                        let _ = writeln!(
                            s,
                            "{label}: (2,{})_{} NOT certified: {}",
                            l.delta,
                            l.t,
                            l.failure.as_deref().unwrap_or("")
                        );
                    }
                }
            }
        }
        if let Some(cm) = &self.cm_bound {
            match &cm.certificate {
                Some(c) => {
                    let _ = writeln!(
                        s,
                        "alphabet bound (r={}, delta={}): bound {}, k {}, optimal {} (locality {})",
                        cm.r, cm.delta, c.bound, c.k, c.optimal, cm.locality_backing
                    );
                }
                None => {
                    let _ = writeln!(
                        s,
                        "alphabet bound (r={}, delta={}): not applicable ({}); dimension-optimal {}",
                        cm.r,
                        cm.delta,
                        cm.reason.as_deref().unwrap_or(""),
                        cm.dimension_optimal
                    );
                }
            }
        }
        if let Some(sg) = &self.singleton {
            let _ = writeln!(
                s,
                "singleton-like defect (r={}, delta={}): {}",
                sg.r, sg.delta, sg.defect
            );
        }
        if let Some(bf) = &self.brute_force {
            let _ = writeln!(
                s,
                "brute force ({},{}): {}",
                bf.r,
                bf.delta,
                if bf.holds { "holds" } else { "fails" }
            );
        }
        for n in &self.negative {
            let _ = writeln!(s, "NEGATIVE: {n}");
        }
        s
    }
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Builds the code only.
pub fn build(cfg: &JobConfig) -> Result<DefiningCode, JobError> {
    let (field, fam) = cfg.validate()?;
    build_code_with_limit(&fam, &field, cfg.limits.max_pm).map_err(|e| code_err("build", e))
}

/// Runs the requested analyses in dependency order. Uncertifiable claims
/// become negative results in the report, not errors.
pub fn run(cfg: &JobConfig) -> Result<Report, JobError> {
    let mut timings = BTreeMap::new();
    let t0 = Instant::now();
    let (field, fam) = cfg.validate()?;
    let p = field.p();
    let dc = build_code_with_limit(&fam, &field, cfg.limits.max_pm).map_err(|e| code_err("build", e))?;
    timings.insert("build".into(), ms(t0));

    let t0 = Instant::now();
    let params = dc.parameters().map_err(|e| code_err("parameters", e))?;
    timings.insert("parameters".into(), ms(t0));
    let predicted = fam
        .predicted_parameters(p)
        .map_err(|e: FamilyError| JobError::Stage {
            stage: "parameters",
            message: e.to_string(),
        })?;
    let a = &cfg.analyses;
    let mut negative = Vec::new();

    let weights = a.weights.then(|| {
        let wd = dc.weight_distribution().expect("computed with parameters");
        WeightsReport {
            enumerator: wd.enumerator(),
            nonzero_weights: wd.nonzero_weights(),
            distribution: wd.counts().clone(),
        }
    });

    let griesmer = if a.griesmer {
        let t0 = Instant::now();
        let g = match check_griesmer_iff(&dc) {
            Ok(g) => Some(g),
            Err(BoundsError::CriterionMismatch { .. }) | Err(BoundsError::ZeroCode) => {
                negative.push("griesmer: combinatorial and numeric criteria disagree".into());
                None
            }
            Err(e) => return Err(bounds_err("griesmer", e)),
        };
        timings.insert("griesmer".into(), ms(t0));
        g
    } else {
        None
    };

    let distance_optimal = match (a.distance_optimal, params.d) {
        (true, Some(d)) => {
            let sufficient = distance_optimal_sufficient(&fam, p).map_err(|e| bounds_err("distance_optimal", e))?;
            Some(DistanceReport {
                sufficient,
                by_griesmer: distance_optimal_by_griesmer(p, params.n as u64, params.k, d as u64),
                next_griesmer_sum: griesmer_sum(p, params.k, d as u64 + 1),
            })
        }
        _ => None,
    };

    let intersecting_pairs = if a.intersecting_pairs {
        let ip = intersecting_pairs_optimality(&dc).map_err(|e| bounds_err("intersecting_pairs", e))?;
        if ip.disagreement {
            negative.push(format!(
                "intersecting pairs: condition {:?} fired but the Griesmer cross-check fails",
                ip.fired
            ));
        }
        Some(ip)
    } else {
        None
    };

    let run_locality = |delta: usize, t: usize, stage: &'static str| -> Result<LocalityReport, JobError> {
        let res = if t == 1 {
            certify_locality(&dc, delta)
        } else {
            certify_availability(&dc, delta, t)
        };
        match res {
            Ok(cert) => Ok(LocalityReport {
                delta,
                t,
                certified: true,
                certificate: Some(cert),
                failure: None,
            }),
            Err(e @ LocalityError::LocalityNotCertifiable { .. })
            | Err(e @ LocalityError::AvailabilityNotCertifiable { .. }) => Ok(LocalityReport {
                delta,
                t,
                certified: false,
                certificate: None,
                failure: Some(e.to_string()),
            }),
            Err(LocalityError::Code(c)) => Err(code_err(stage, c)),
            Err(e) => Err(JobError::Stage {
                stage,
                message: e.to_string(),
            }),
        }
    };

    let locality = match &a.locality {
        Some(l) => {
            let t0 = Instant::now();
            let rep = run_locality(l.delta, 1, "locality")?;
            timings.insert("locality".into(), ms(t0));
            if !rep.certified {
                negative.push(format!("locality (2,{}) not certified", l.delta));
            }
            Some(rep)
        }
        None => None,
    };
    let availability = match &a.availability {
        Some(av) => {
            let t0 = Instant::now();
            let rep = run_locality(av.delta, av.t, "availability")?;
            timings.insert("availability".into(), ms(t0));
            if !rep.certified {
                negative.push(format!("availability (2,{})_{} not certified", av.delta, av.t));
            }
            Some(rep)
        }
        None => None,
    };

    let cm_bound = match (&a.cm_bound, params.d) {
        (Some(cm), Some(d)) => {
            let backing = match &locality {
                Some(l) if cm.r == 2 && l.certified && l.delta >= cm.delta => "certified",
                Some(l) if cm.r == 2 && l.delta >= cm.delta => "not-certified",
                _ => "not-requested",
            };
            let (n, k) = (params.n as u64, params.k);
            let dim_opt = dimension_optimal(p, n, k, d as u64).unwrap_or(false);
            let rep = match cm_alphabet_optimal(p, n, k, d as u64, cm.r, cm.delta) {
                Ok(cert) => {
                    if !cert.optimal {
                        negative.push(format!(
                            "alphabet bound ({},{}) not met: k = {} < bound {}",
                            cm.r, cm.delta, k, cert.bound
                        ));
                    }
                    CmReport {
                        r: cm.r,
                        delta: cm.delta,
                        applicable: true,
                        locality_backing: backing.into(),
                        certificate: Some(cert),
                        reason: None,
                        dimension_optimal: dim_opt,
                    }
                }
                Err(e @ BoundsError::DegenerateRange { .. }) => CmReport {
                    r: cm.r,
                    delta: cm.delta,
                    applicable: false,
                    locality_backing: backing.into(),
                    certificate: None,
                    reason: Some(e.to_string()),
                    dimension_optimal: dim_opt,
                },
                Err(e) => return Err(bounds_err("cm_bound", e)),
            };
            Some(rep)
        }
        _ => None,
    };

    let singleton = match (a.singleton, params.d) {
        (true, Some(d)) => {
            let (r, delta) = match (&a.cm_bound, &a.locality) {
                (Some(cm), _) => (cm.r, cm.delta),
                (None, Some(l)) => (2, l.delta),
                _ => unreachable!("validated"),
            };
            let defect = singleton_like_defect(params.n as u64, params.k, d as u64, r, delta)
                .map_err(|e| bounds_err("singleton", e))?;
            Some(SingletonReport { r, delta, defect })
        }
        _ => None,
    };

    let brute_force = match &a.brute_force {
        Some(bf) => {
            let t0 = Instant::now();
            let res = brute_force_rdelta(dc.code(), bf.r, bf.delta, cfg.limits.max_brute_n)
                .map_err(|e| match e {
                    LocalityError::ScaleLimitExceeded { .. } => JobError::ScaleLimitExceeded {
                        stage: "brute_force",
                        message: e.to_string(),
                    },
                    other => JobError::Stage {
                        stage: "brute_force",
                        message: other.to_string(),
                    },
                })?;
            timings.insert("brute_force".into(), ms(t0));
            Some(BruteForceReport {
                r: bf.r,
                delta: bf.delta,
                holds: res.holds,
                failing_coordinate: res.failing_coordinate,
                witnesses: res.witnesses,
            })
        }
        None => None,
    };

    let hyp = fam.construction_hypotheses(p);
    Ok(Report {
        config: cfg.clone(),
        family: FamilyReport {
            m: fam.m(),
            blocks: fam.to_one_based(),
            property_is: fam.property_is(),
            hypotheses_hold: hyp.holds,
            stats: family_stats(&fam, p),
            log: fam.log().to_vec(),
        },
        parameters: ParametersReport {
            n: params.n,
            k: params.k,
            d: params.d,
            predicted: [predicted.n, predicted.k as i128, predicted.d],
            complement_sizes: dc.complement_sizes().to_vec(),
        },
        warnings: dc.warnings().to_vec(),
        weights,
        griesmer,
        distance_optimal,
        intersecting_pairs,
        locality,
        availability,
        cm_bound,
        singleton,
        brute_force,
        negative,
        timings_ms: timings,
    })
}

/// Bundled regression cases: `(name, TOML)`.
pub const BUNDLED_CORPUS: &[(&str, &str)] = &[
    ("two-block-griesmer-p3", include_str!("../corpus/two-block-griesmer-p3.toml")),
    ("intersecting-pairs-p3", include_str!("../corpus/intersecting-pairs-p3.toml")),
    ("pair-of-lines-p5", include_str!("../corpus/pair-of-lines-p5.toml")),
    ("pair-of-lines-p3", include_str!("../corpus/pair-of-lines-p3.toml")),
    ("pair-of-lines-p7", include_str!("../corpus/pair-of-lines-p7.toml")),
    ("disjoint-griesmer-p3", include_str!("../corpus/disjoint-griesmer-p3.toml")),
    ("simplex-p3-m3", include_str!("../corpus/simplex-p3-m3.toml")),
    ("availability-two-blocks-p5", include_str!("../corpus/availability-two-blocks-p5.toml")),
    ("nested-pairs-p5", include_str!("../corpus/nested-pairs-p5.toml")),
    ("partner-restricted-p5", include_str!("../corpus/partner-restricted-p5.toml")),
    ("partner-unrestricted-p5", include_str!("../corpus/partner-unrestricted-p5.toml")),
    ("partner-two-zeros-p5", include_str!("../corpus/partner-two-zeros-p5.toml")),
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseOutcome {
    pub name: String,
    pub passed: bool,
    /// `field: expected X, got Y` lines for every mismatch.
    pub diffs: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub cases: Vec<CaseOutcome>,
}

impl CorpusSummary {
    pub fn all_passed(&self) -> bool {
        self.cases.iter().all(|c| c.passed)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.cases {
            let _ = writeln!(s, "{} {}", if c.passed { "PASS" } else { "FAIL" }, c.name);
            for d in &c.diffs {
                let _ = writeln!(s, "    {d}");
            }
        }
        let passed = self.cases.iter().filter(|c| c.passed).count();
        let _ = writeln!(s, "{passed}/{} cases passed", self.cases.len());
        s
    }
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum CaseFile {
    Code {
        job: JobConfig,
        expect: toml::Table,
    },
    Partner {
        p: u64,
        g: Vec<u32>,
        #[serde(default)]
        j: Option<usize>,
        expect: toml::Table,
    },
}

fn compare(diffs: &mut Vec<String>, field: &str, expected: &toml::Value, got: Value) {
    let exp = serde_json::to_value(expected).unwrap_or(Value::Null);
    if exp != got {
        diffs.push(format!("{field}: expected {exp}, got {got}"));
    }
}

fn check_code_case(job: &JobConfig, expect: &toml::Table, diffs: &mut Vec<String>) {
    let report = match run(job) {
        Ok(r) => r,
        Err(e) => {
            diffs.push(format!("run failed: {e}"));
            return;
        }
    };
    let j = serde_json::to_value(&report).expect("report serializes");
    let get = |path: &[&str]| -> Value {
        path.iter()
            .try_fold(&j, |v, k| v.get(*k))
            .cloned()
            .unwrap_or(Value::Null)
    };
    for (key, val) in expect {
        let got = match key.as_str() {
            "n" => get(&["parameters", "n"]),
            "k" => get(&["parameters", "k"]),
            "d" => get(&["parameters", "d"]),
            "enumerator" => get(&["weights", "enumerator"]),
            "nonzero_weights" => get(&["weights", "nonzero_weights"]),
            "griesmer" => get(&["griesmer", "is_griesmer"]),
            "griesmer_sum" => get(&["griesmer", "griesmer_sum"]),
            "distance_optimal_by_griesmer" => get(&["distance_optimal", "by_griesmer"]),
            "distance_optimal_sufficient" => get(&["distance_optimal", "sufficient", "sufficient"]),
            "intersecting_pairs_fired" => get(&["intersecting_pairs", "fired"]),
            "locality_certified" => get(&["locality", "certified"]),
            "uniform_best_delta" => get(&["locality", "certificate", "uniform_best_delta"]),
            "availability_certified" => get(&["availability", "certified"]),
            "cm_optimal" => get(&["cm_bound", "certificate", "optimal"]),
            "cm_bound" => get(&["cm_bound", "certificate", "bound"]),
            "singleton_defect" => get(&["singleton", "defect"]),
            "brute_force_holds" => get(&["brute_force", "holds"]),
            "matrix" => {
                let Some(text) = val.as_str() else {
                    diffs.push("matrix: expected a string".into());
                    continue;
                };
                let built = match build(job) {
                    Ok(dc) => dc,
                    Err(e) => {
                        diffs.push(format!("matrix: {e}"));
                        continue;
                    }
                };
                match import_matrix(text) {
                    Ok(expected) if equal_up_to_permutation(&expected, built.code()) => {}
                    Ok(_) => diffs.push(format!(
                        "matrix: expected columns of\n{text}\n    got\n{}",
                        export_matrix(built.code())
                    )),
                    Err(e) => diffs.push(format!("matrix: cannot parse expectation: {e}")),
                }
                continue;
            }
            other => {
                diffs.push(format!("unknown expectation `{other}`"));
                continue;
            }
        };
        compare(diffs, key, val, got);
    }
}

fn check_partner_case(p: u64, g: &[u32], j: Option<usize>, expect: &toml::Table, diffs: &mut Vec<String>) {
    let field = match PrimeField::new(p) {
        Ok(f) => f,
        Err(e) => {
            diffs.push(format!("p: {e}"));
            return;
        }
    };
    let g = match field.vector(g).map_err(|e| e.to_string()).and_then(|v| normalize(&field, &v).map_err(|e| e.to_string())) {
        Ok(g) => g,
        Err(e) => {
            diffs.push(format!("g: {e}"));
            return;
        }
    };
    let excluded = if g.is_restricted() { j.or(Some(p as usize - 2)) } else { None };
    for (key, val) in expect {
        match key.as_str() {
            "h" => {
                let got = match restricted_partner(&field, &g, j) {
                    Ok(h) => serde_json::to_value(h.coords()).expect("serializes"),
                    Err(e) => Value::String(e.to_string()),
                };
                compare(diffs, key, val, got);
            }
            "admissible" => {
                let Some(list) = val.as_array() else {
                    diffs.push("admissible: expected a list of points".into());
                    continue;
                };
                for cand in list {
                    let coords: Option<Vec<u32>> = cand
                        .as_array()
                        .and_then(|a| a.iter().map(|x| x.as_integer().map(|v| v as u32)).collect());
                    let ok = coords
                        .and_then(|c| field.vector(&c).ok())
                        .and_then(|v| normalize(&field, &v).ok())
                        .is_some_and(|h| partner_is_admissible(&field, &g, &h, excluded));
                    if !ok {
                        diffs.push(format!("admissible: {cand} is not an admissible partner"));
                    }
                }
            }
            other => diffs.push(format!("unknown expectation `{other}`")),
        }
    }
}

/// Runs one corpus case given its TOML text.
pub fn run_case(name: &str, text: &str) -> CaseOutcome {
    let mut diffs = Vec::new();
    match toml::from_str::<CaseFile>(text) {
        Ok(CaseFile::Code { job, expect }) => check_code_case(&job, &expect, &mut diffs),
        Ok(CaseFile::Partner { p, g, j, expect }) => check_partner_case(p, &g, j, &expect, &mut diffs),
        Err(e) => diffs.push(format!("cannot parse case: {e}")),
    }
    CaseOutcome {
        name: name.to_string(),
        passed: diffs.is_empty(),
        diffs,
    }
}

/// Runs every case whose name contains `filter`.
pub fn run_corpus<'a, I>(cases: I, filter: Option<&str>) -> CorpusSummary
where
    I: IntoIterator<Item = (&'a str, &'a str)>,
{
    CorpusSummary {
        cases: cases
            .into_iter()
            .filter(|(name, _)| filter.is_none_or(|f| name.contains(f)))
            .map(|(name, text)| run_case(name, text))
            .collect(),
    }
}

/// Error type for the matrix-oriented verbs.
#[derive(Debug, Error)]
pub enum VerbError {
    #[error(transparent)]
    Job(#[from] JobError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Locality(#[from] LocalityError),
}

/// Parameters of an imported code, plus an optional line-scan locality check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImportReport {
    pub p: u32,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub d: Option<usize>,
    pub enumerator: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub locality: Option<LocalityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kopt_upper: Option<usize>,
}

pub fn analyze_matrix(text: &str, max_pm: u64, delta: Option<usize>) -> Result<ImportReport, VerbError> {
    let mut code = import_matrix(text)?;
    code.set_scale_limit(max_pm);
    let params = code.parameters().map_err(|e| JobError::from_code("import", e))?;
    let enumerator = code
        .weight_distribution()
        .map_err(|e| JobError::from_code("import", e))?
        .enumerator();
    let locality = match delta {
        Some(delta) => Some(match crate::locality::certify_locality_code(&code, delta) {
            Ok(cert) => LocalityReport {
                delta,
                t: 1,
                certified: true,
                certificate: Some(cert),
                failure: None,
            },
            Err(e @ LocalityError::LocalityNotCertifiable { .. }) => LocalityReport {
                delta,
                t: 1,
                certified: false,
                certificate: None,
                failure: Some(e.to_string()),
            },
            Err(e) => return Err(e.into()),
        }),
        None => None,
    };
    let kopt = params
        .d
        .and_then(|d| kopt_upper(code.field().p(), params.n as u64, d as u64).ok())
        .map(|b| b.value);
    Ok(ImportReport {
        p: code.field().p(),
        m: code.rows(),
        n: params.n,
        k: params.k,
        d: params.d,
        enumerator,
        locality,
        kopt_upper: kopt,
    })
}

impl JobError {
    pub fn from_code(stage: &'static str, e: CodeError) -> Self {
        code_err(stage, e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EX: &str = r#"
p = 3
m = 3
blocks = [[[1, 2], [3]], [[1]]]

[analyses]
weights = true
griesmer = true
distance_optimal = true
"#;

    #[test]
    fn parse_and_run() {
        let cfg = JobConfig::from_toml(EX).unwrap();
        let rep = run(&cfg).unwrap();
        assert_eq!((rep.parameters.n, rep.parameters.k, rep.parameters.d), (20, 3, Some(13)));
        assert_eq!(
            rep.weights.as_ref().unwrap().enumerator,
            "1 + 12z^13 + 10z^14 + 2z^15 + 2z^17"
        );
        assert!(rep.griesmer.as_ref().unwrap().is_griesmer);
        assert!(!rep.is_negative());
        assert!(rep.to_text().contains("parameters: [20, 3, 13]"));
    }

    #[test]
    fn deterministic_reports() {
        let cfg = JobConfig::from_toml(EX).unwrap();
        assert_eq!(run(&cfg).unwrap().comparable_json(), run(&cfg).unwrap().comparable_json());
    }

    #[test]
    fn field_diagnostics() {
        let cfg = JobConfig::from_toml("p = 4\nm = 3\nblocks = [[[1, 5]]]\n").unwrap();
        let JobError::ConfigInvalid(d) = cfg.validate().unwrap_err() else {
            panic!("expected ConfigInvalid");
        };
        let fields: Vec<&str> = d.iter().map(|d| d.field.as_str()).collect();
        assert_eq!(fields, vec!["p", "blocks[0][0]"]);
        assert!(d[0].message.contains("not prime"));

        let cfg = JobConfig::from_toml(
            "p = 5\nm = 3\n[analyses]\navailability = { delta = 4, t = 2 }\nsingleton = true\n",
        )
        .unwrap();
        let JobError::ConfigInvalid(d) = cfg.validate().unwrap_err() else {
            panic!("expected ConfigInvalid");
        };
        assert_eq!(d.len(), 2);

        assert!(matches!(
            JobConfig::from_toml("p = 3\nm = 3\nbogus = 1\n"),
            Err(JobError::ConfigInvalid(_))
        ));
    }

    #[test]
    fn scale_limit_names_stage() {
        let cfg = JobConfig::from_toml("p = 3\nm = 3\n[limits]\nmax_pm = 10\n").unwrap();
        assert!(matches!(run(&cfg), Err(JobError::ScaleLimitExceeded { stage: "build", .. })));
    }

    #[test]
    fn negative_locality_is_reported() {
        let cfg = JobConfig::from_toml(
            "p = 5\nm = 3\nblocks = [[[1, 2], [2, 3]]]\n[analyses]\nlocality = { delta = 5 }\n",
        )
        .unwrap();
        let rep = run(&cfg).unwrap();
        assert!(!rep.locality.as_ref().unwrap().certified);
        assert!(rep.is_negative());
    }

    #[test]
    fn bundled_corpus_passes() {
        let summary = run_corpus(BUNDLED_CORPUS.iter().copied(), None);
        assert!(summary.all_passed(), "{}", summary.to_text());
        let one = run_corpus(BUNDLED_CORPUS.iter().copied(), Some("intersecting-pairs"));
        assert_eq!(one.cases.len(), 1);
    }
}
