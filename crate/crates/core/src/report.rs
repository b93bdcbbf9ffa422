//! End-to-end runs: parse, build the geometry, check non-degeneracy,
//! assemble the zeta functions, count with the oracle, and render the
//! result as text or JSON.

use std::fmt::Write as _;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{is_prime, Q};
use crate::error::{Error, Result};
use crate::geometry::{diagonal_invariants, Fan, NewtonPolyhedron, RayProvenance};
use crate::nondegen::{check_khovanskii, check_saia, check_strong, NondegeneracyVerdict, DEFAULT_BUDGET};
use crate::oracle::{count_solutions, lambda_estimate, verify_zeta, volume_series, LambdaEstimate};
use crate::poly::{parse_vars, Mapping};
use crate::zeta::{
    assemble, candidate_poles, formula_terms, poincare_series, poles_of, PoleProvenance, Region, ZetaFunction,
};

pub const REPORT_VERSION: &str = "igusa-report/1";

/// An exact rational serialized as `{"num": "...", "den": "..."}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rational(pub Q);

#[derive(Serialize, Deserialize)]
struct RationalRepr {
    num: String,
    den: String,
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RationalRepr { num: self.0.numer().to_string(), den: self.0.denom().to_string() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = RationalRepr::deserialize(d)?;
        let num = r.num.parse().map_err(D::Error::custom)?;
        let den: num_bigint::BigInt = r.den.parse().map_err(D::Error::custom)?;
        if den == 0.into() {
            return Err(D::Error::custom("zero denominator"));
        }
        Ok(Rational(Q::new(num, den)))
    }
}

impl From<&Q> for Rational {
    fn from(q: &Q) -> Self {
        Rational(q.clone())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZetaSelection {
    Global,
    Origin,
    Both,
}

impl ZetaSelection {
    pub fn regions(self) -> Vec<Region> {
        match self {
            ZetaSelection::Global => vec![Region::Global],
            ZetaSelection::Origin => vec![Region::Origin],
            ZetaSelection::Both => vec![Region::Global, Region::Origin],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubdivisionKind {
    Simplicial,
    Simple,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Compute,
    Check,
    Oracle,
    Poles,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunConfig {
    pub command: Command,
    pub mapping: String,
    pub vars: String,
    pub q: u64,
    pub zeta: ZetaSelection,
    pub subdivision: SubdivisionKind,
    /// Oracle depth `J`; 0 skips the oracle.
    pub oracle_depth: usize,
    pub include_extra_rays: bool,
    pub force: bool,
    pub budget: u64,
}

impl RunConfig {
    pub fn new(command: Command, mapping: &str, vars: &str, q: u64) -> Self {
        Self {
            command,
            mapping: mapping.to_string(),
            vars: vars.to_string(),
            q,
            zeta: ZetaSelection::Both,
            subdivision: SubdivisionKind::Simplicial,
            oracle_depth: 0,
            include_extra_rays: false,
            force: false,
            budget: DEFAULT_BUDGET,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FacetSummary {
    pub normal: Vec<i64>,
    pub d: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PolyhedronSummary {
    pub vertices: Vec<Vec<i64>>,
    pub facets: Vec<FacetSummary>,
    pub face_count: usize,
    pub compact_face_count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RaySummary {
    pub vector: Vec<i64>,
    pub sigma: i64,
    pub d: i64,
    pub provenance: RayProvenance,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConeSummary {
    /// Indices into the fan's ray list.
    pub rays: Vec<usize>,
    pub generators: Vec<Vec<i64>>,
    pub sigma: Vec<i64>,
    pub d: Vec<i64>,
    /// Facet indices of the face whose normal cone contains this cone.
    pub face: Vec<usize>,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FanSummary {
    pub kind: String,
    pub rays: Vec<RaySummary>,
    pub cones: Vec<ConeSummary>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FactorSummary {
    pub v: u32,
    #[serde(rename = "N")]
    pub n: u32,
    pub multiplicity: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RationalFunctionSummary {
    pub numerator: Vec<Rational>,
    pub factors: Vec<FactorSummary>,
    pub text: String,
    pub symbolic: String,
}

impl From<&ZetaFunction> for RationalFunctionSummary {
    fn from(z: &ZetaFunction) -> Self {
        Self {
            numerator: z.numerator().iter().map(Rational::from).collect(),
            factors: z.factors().map(|(f, m)| FactorSummary { v: f.v, n: f.n, multiplicity: m }).collect(),
            text: z.render(false),
            symbolic: z.render(true),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PoleSummary {
    pub real_part: Rational,
    pub order: u32,
    pub period: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ZetaSummary {
    pub region: Region,
    /// Computed under `--force` for a mapping that failed the
    /// non-degeneracy check: extrapolated from the formula, unverified.
    pub extrapolated: bool,
    pub function: RationalFunctionSummary,
    pub degree: Option<i64>,
    pub poles: Vec<PoleSummary>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CandidateSummary {
    pub real_part: Rational,
    pub period: u32,
    pub provenance: PoleProvenance,
    pub ray: Option<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DiagonalSummary {
    pub t_f: Rational,
    pub lambda: Rational,
    pub largest_pole_real_part: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleSummary {
    pub region: Region,
    pub p: u64,
    #[serde(rename = "J")]
    pub depth: usize,
    #[serde(rename = "N")]
    pub counts: Vec<u64>,
    pub c: Vec<Rational>,
    /// `None` when no zeta function was computed for this region.
    #[serde(rename = "matchedAgainstFormula")]
    pub matched: Option<bool>,
    #[serde(rename = "firstMismatch")]
    pub first_mismatch: Option<usize>,
    #[serde(rename = "lambdaEstimate")]
    pub lambda: LambdaEstimate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub version: String,
    pub config: RunConfig,
    pub exit_code: i32,
    pub status: String,
    pub polyhedron: PolyhedronSummary,
    pub fan: FanSummary,
    pub nondegeneracy: Vec<NondegeneracyVerdict>,
    pub zeta: Vec<ZetaSummary>,
    pub candidate_poles: Vec<CandidateSummary>,
    pub diagonal: Option<DiagonalSummary>,
    pub poincare: Option<RationalFunctionSummary>,
    pub oracle: Vec<OracleSummary>,
}

/// Process exit code for a failed run.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Degenerate(_) => 2,
        Error::BudgetExceeded { .. } => 3,
        _ => 1,
    }
}

fn polyhedron_summary(poly: &NewtonPolyhedron) -> PolyhedronSummary {
    PolyhedronSummary {
        vertices: poly.vertices().to_vec(),
        facets: poly.facets().iter().map(|f| FacetSummary { normal: f.normal.clone(), d: f.offset }).collect(),
        face_count: poly.faces().len(),
        compact_face_count: poly.compact_faces().len(),
    }
}

fn fan_summary(fan: &Fan) -> FanSummary {
    let rays = fan.rays();
    FanSummary {
        kind: fan.kind().name().to_string(),
        rays: rays
            .iter()
            .map(|r| RaySummary { vector: r.vector.clone(), sigma: r.sigma, d: r.d, provenance: r.provenance })
            .collect(),
        cones: fan
            .cones()
            .iter()
            .map(|c| ConeSummary {
                rays: c.rays.clone(),
                generators: fan.generators(c),
                sigma: c.rays.iter().map(|&r| rays[r].sigma).collect(),
                d: c.rays.iter().map(|&r| rays[r].d).collect(),
                face: c.face.clone(),
                dim: c.dim,
            })
            .collect(),
    }
}

/// Runs the stages requested by `config.command`. Input errors and budget
/// overruns are returned as `Err`; a failed non-degeneracy check yields a
/// report with exit code 2 and later stages skipped unless forced.
pub fn run(config: &RunConfig) -> Result<Report> {
    let vars = parse_vars(&config.vars)?;
    let mapping = Mapping::parse(&config.mapping, &vars)?;
    let q = config.q;
    if !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    let budget = config.budget;
    let poly = NewtonPolyhedron::of_mapping(&mapping)?;
    let normal = Fan::normal(&poly);
    let simplicial = normal.simplicial_subdivision()?;
    let simple = match (config.subdivision, config.include_extra_rays) {
        (SubdivisionKind::Simple, _) | (_, true) => Some(simplicial.simple_subdivision()?),
        _ => None,
    };
    let fan = match config.subdivision {
        SubdivisionKind::Simple => simple.clone().expect("built above"),
        SubdivisionKind::Simplicial => simplicial,
    };
    let regions = config.zeta.regions();

    let mut nondegeneracy = Vec::new();
    for &region in &regions {
        nondegeneracy.push(check_strong(&mapping, &poly, q, region == Region::Origin, budget)?);
    }
    let degenerate = nondegeneracy.iter().any(|v| !v.holds);
    if config.command == Command::Check {
        nondegeneracy.push(check_saia(&mapping, &poly, q, budget)?);
        nondegeneracy.push(check_khovanskii(&mapping, q, budget)?);
    }

    let extra: Vec<_> = simple.as_ref().map(|f| f.extra_rays().collect()).unwrap_or_default();
    let candidates = candidate_poles(&poly, mapping.len(), &extra)
        .into_iter()
        .map(|c| CandidateSummary { real_part: Rational(c.real_part), period: c.period, provenance: c.provenance, ray: c.ray })
        .collect();
    let diagonal = match diagonal_invariants(&poly, mapping.len()) {
        Ok(d) => Some(DiagonalSummary {
            t_f: Rational(d.t_f),
            lambda: Rational(d.lambda),
            largest_pole_real_part: d.largest_pole_real_part.map(Rational),
        }),
        Err(Error::NoPositiveFacet) => None,
        Err(e) => return Err(e),
    };

    let mut report = Report {
        version: REPORT_VERSION.to_string(),
        config: config.clone(),
        exit_code: 0,
        status: "ok".into(),
        polyhedron: polyhedron_summary(&poly),
        fan: fan_summary(&fan),
        nondegeneracy,
        zeta: vec![],
        candidate_poles: candidates,
        diagonal,
        poincare: None,
        oracle: vec![],
    };
    if degenerate && !config.force {
        report.exit_code = 2;
        report.status = "degenerate".into();
        return Ok(report);
    }
    if degenerate {
        report.status = "forced".into();
    }
    if config.command == Command::Check {
        return Ok(report);
    }

    let mut zetas: Vec<(Region, ZetaFunction)> = Vec::new();
    for &region in &regions {
        let z = assemble(&formula_terms(&mapping, &poly, &fan, q, region, budget)?, q)?;
        report.zeta.push(ZetaSummary {
            region,
            extrapolated: degenerate,
            function: (&z).into(),
            degree: z.degree(),
            poles: poles_of(&z)
                .into_iter()
                .map(|p| PoleSummary { real_part: Rational(p.real_part), order: p.order, period: p.period })
                .collect(),
        });
        zetas.push((region, z));
    }
    if let Some((_, z)) = zetas.iter().find(|(r, _)| *r == Region::Global) {
        report.poincare = Some((&poincare_series(z)?.series).into());
    }

    let depth = match (config.command, config.oracle_depth) {
        (Command::Oracle, 0) => 4,
        (_, j) => j,
    };
    if depth > 0 && config.command != Command::Poles {
        for &region in &regions {
            let counts = count_solutions(&mapping, q, depth, region, budget)?;
            let series = volume_series(&counts);
            let verification = zetas
                .iter()
                .find(|(r, _)| *r == region)
                .map(|(_, z)| verify_zeta(z, &series))
                .transpose()?;
            report.oracle.push(OracleSummary {
                region,
                p: q,
                depth,
                lambda: lambda_estimate(&counts),
                counts: counts.counts,
                c: series.coefficients.iter().map(Rational::from).collect(),
                matched: verification.as_ref().map(|v| v.matched),
                first_mismatch: verification.and_then(|v| v.first_mismatch),
            });
        }
    }
    Ok(report)
}

/// Pretty JSON with the struct field order as key order.
pub fn emit_json(report: &Report) -> String {
    serde_json::to_string_pretty(report).expect("report serializes")
}

pub fn parse_json(text: &str) -> serde_json::Result<Report> {
    serde_json::from_str(text)
}

fn region_name(r: Region) -> &'static str {
    match r {
        Region::Global => "Z",
        Region::Origin => "Z0",
    }
}

fn rat(r: &Rational) -> String {
    r.0.to_string()
}

pub fn emit_text(report: &Report) -> String {
    let mut out = String::new();
    let c = &report.config;
    let _ = writeln!(out, "mapping: {}  (variables {}, q = {})", c.mapping, c.vars, c.q);
    let p = &report.polyhedron;
    let _ = writeln!(out, "Newton polyhedron: vertices {:?}", p.vertices);
    let _ = writeln!(
        out,
        "  facets (normal; d): {}",
        p.facets.iter().map(|f| format!("{:?};{}", f.normal, f.d)).collect::<Vec<_>>().join("  ")
    );
    let _ = writeln!(out, "  faces: {} ({} compact)", p.face_count, p.compact_face_count);
    let extra = report.fan.rays.iter().filter(|r| r.provenance == RayProvenance::ExtraRay).count();
    let _ = writeln!(
        out,
        "fan: {} with {} rays ({} extra), {} cones",
        report.fan.kind,
        report.fan.rays.len(),
        extra,
        report.fan.cones.len()
    );
    for v in &report.nondegeneracy {
        let _ = writeln!(out, "non-degeneracy: {v}");
    }
    if report.status != "ok" {
        let _ = writeln!(out, "status: {}", report.status);
    }
    for z in &report.zeta {
        let tag = if z.extrapolated { "  [extrapolated, unverified]" } else { "" };
        let _ = writeln!(out, "{}(t) = {}{tag}", region_name(z.region), z.function.text);
        let _ = writeln!(out, "    = {}", z.function.symbolic);
        let degree = z.degree.map_or("undefined".to_string(), |d| d.to_string());
        let poles = z
            .poles
            .iter()
            .map(|p| format!("{} (order {}, period {})", rat(&p.real_part), p.order, p.period))
            .collect::<Vec<_>>();
        let _ = writeln!(out, "  degree {degree}; poles: [{}]", poles.join(", "));
    }
    let cands = report
        .candidate_poles
        .iter()
        .map(|c| format!("{} ({}, period {})", rat(&c.real_part), c.provenance.name(), c.period))
        .collect::<Vec<_>>();
    let _ = writeln!(out, "candidate poles: [{}]", cands.join(", "));
    if let Some(d) = &report.diagonal {
        let largest = d.largest_pole_real_part.as_ref().map_or("none".into(), rat);
        let _ = writeln!(out, "t_f = {}, lambda = {}, largest pole real part {}", rat(&d.t_f), rat(&d.lambda), largest);
    }
    if let Some(ps) = &report.poincare {
        let _ = writeln!(out, "P(t) = {}", ps.text);
    }
    for o in &report.oracle {
        let verdict = match o.matched {
            Some(true) => "matches formula".to_string(),
            Some(false) => format!("MISMATCH at j = {}", o.first_mismatch.unwrap_or(0)),
            None => "no formula to compare".to_string(),
        };
        let _ = writeln!(
            out,
            "oracle {} (p = {}, J = {}): N = {:?}; c = [{}]; {verdict}",
            region_name(o.region),
            o.p,
            o.depth,
            o.counts,
            o.c.iter().map(rat).collect::<Vec<_>>().join(", ")
        );
        if let LambdaEstimate::Bracket { lower, upper, .. } = o.lambda {
            let _ = writeln!(out, "  lambda bracket [{lower:.4}, {upper:.4}]");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_round_trip() {
        let r = Rational(Q::new((-3).into(), 125.into()));
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, r#"{"num":"-3","den":"125"}"#);
        assert_eq!(serde_json::from_str::<Rational>(&s).unwrap(), r);
    }

    #[test]
    fn coordinate_function_report() {
        let mut cfg = RunConfig::new(Command::Compute, "x", "x", 3);
        cfg.oracle_depth = 3;
        let report = run(&cfg).unwrap();
        assert_eq!(report.exit_code, 0);
        assert_eq!(report.zeta.len(), 2);
        assert!(report.oracle.iter().all(|o| o.matched == Some(true)));
        let json = emit_json(&report);
        assert_eq!(parse_json(&json).unwrap(), report);
        assert!(emit_text(&report).contains("Z(t) = (2/3) / ((1 - 3^-1 t))"));
    }

    #[test]
    fn degenerate_check() {
        let cfg = RunConfig::new(Command::Check, "x^2 - y^2; x^3; y^3", "x,y", 5);
        let report = run(&cfg).unwrap();
        assert_eq!(report.exit_code, 2);
        assert!(report.zeta.is_empty());
    }

    #[test]
    fn input_errors() {
        let cfg = RunConfig::new(Command::Compute, "x +", "x", 3);
        assert_eq!(exit_code_for(&run(&cfg).unwrap_err()), 1);
        let cfg = RunConfig::new(Command::Compute, "x", "x", 4);
        assert_eq!(exit_code_for(&run(&cfg).unwrap_err()), 1);
    }
}
