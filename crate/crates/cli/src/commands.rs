use std::collections::BTreeMap;
use std::fs;

use gpembed_core::complex::{closeness_bound, subdivide_until_with_cap, ComplexJson, DEFAULT_SUBDIVISION_CAP};
use gpembed_core::exact;
use gpembed_core::fiber::{fiberwise_embed, fibered_report, FiberedInstance};
use gpembed_core::flats;
use gpembed_core::nerve::{build_cover, canonical_map, nerve_complex, refine_for_separation, summarize, PointCloud};
use gpembed_core::perturb::perturb_to_general_position;
use gpembed_core::secant::{
    analyze as analyze_probe, exceptional_reason, probe_region_samples, secant_pairs, secant_set, zero_dim_certificate,
    AnalysisReport,
};
use gpembed_core::{GeneralPositionMap, PLMap, Point, Rational};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::manifest::RunManifest;
use crate::{AnalyzeArgs, EmbedArgs, FiberedArgs, NerveArgs, ProbeArgs};

fn read(path: &str) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::io(path, e))
}

fn utf8(path: &str, bytes: &[u8]) -> Result<String, CliError> {
    String::from_utf8(bytes.to_vec()).map_err(|e| CliError::Invalid(format!("{path}: {e}")))
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

/// A map JSON, or any output carrying one under `"map"`.
fn load_map(path: &str, manifest: &mut RunManifest) -> Result<PLMap, CliError> {
    let bytes = read(path)?;
    manifest.input("map", path, &bytes);
    let mut value: Value =
        serde_json::from_slice(&bytes).map_err(|e| CliError::Invalid(format!("{path}: {e}")))?;
    if let Some(inner) = value.get_mut("map") {
        value = inner.take();
    }
    let json: ComplexJson = serde_json::from_value(value).map_err(|e| CliError::Invalid(format!("{path}: {e}")))?;
    Ok(json.to_map()?)
}

fn certified(h: PLMap) -> Result<GeneralPositionMap, CliError> {
    GeneralPositionMap::certify(h).map_err(|e| CliError::Precondition(format!("general position: {e}")))
}

fn parse_point(text: &str) -> Result<Point, CliError> {
    text.trim_matches(|c| c == '(' || c == ')' || c == '[' || c == ']')
        .split(',')
        .map(|s| s.trim().parse::<Rational>().map_err(|e| CliError::Invalid(format!("z: {e}"))))
        .collect()
}

pub fn embed(a: &EmbedArgs, args: &[String]) -> Result<Value, CliError> {
    let mut manifest = RunManifest::new("embed", args);
    let bytes = read(&a.input)?;
    manifest.input("input", &a.input, &bytes);
    let mut json: ComplexJson =
        serde_json::from_slice(&bytes).map_err(|e| CliError::Invalid(format!("{}: {e}", a.input)))?;
    let m = a.m.unwrap_or(json.m);
    let dim = json.to_complex()?.dimension();
    if (m as isize) < 2 * dim + 1 {
        return Err(CliError::Precondition(format!("m >= 2*dim+1 fails: m = {m}, dim = {dim}")));
    }
    if !a.delta.is_positive() {
        return Err(CliError::Precondition(format!("delta > 0 fails: delta = {}", a.delta)));
    }
    if json.images.is_some() && m != json.m {
        return Err(CliError::Invalid(format!("images lie in R^{} but --m is {m}", json.m)));
    }
    json.m = m;
    let h_in = json.to_map_or_constant()?;
    let (h0, rounds) = subdivide_until_with_cap(&h_in, &a.delta, DEFAULT_SUBDIVISION_CAP)?;
    let (g, report) = perturb_to_general_position(&h0, &a.delta, a.seed)?;
    let bound = closeness_bound(&h0, g.map())?;

    manifest.seed = Some(a.seed);
    manifest.param("m", m);
    manifest.param("n", dim);
    manifest.param("delta", &a.delta);
    manifest.certifies(&["general_position_certificate.overall", "max_displacement < delta/2", "closeness_bound < delta"]);
    Ok(json!({
        "manifest": manifest,
        "map": g.map().to_json(),
        "report": report.to_json(false),
        "subdivision_rounds": rounds,
        "closeness_bound": bound,
        "closeness_bound_below_delta": bound < a.delta,
    }))
}

pub fn analyze(a: &AnalyzeArgs, args: &[String]) -> Result<Value, CliError> {
    let mut manifest = RunManifest::new("analyze", args);
    let g = certified(load_map(&a.map, &mut manifest)?)?;
    let z = parse_point(&a.z)?;
    if z.len() != g.map().ambient() {
        return Err(CliError::Invalid(format!("z has {} coordinates, the map lives in R^{}", z.len(), g.map().ambient())));
    }
    let distance_sq = flats::image_distance_sq(&z, g.map()).map_err(|e| CliError::Invalid(e.to_string()))?;
    if distance_sq.is_zero() {
        return Err(CliError::Precondition(format!("z off image fails: squared distance to the image is {distance_sq}")));
    }
    if !a.k.is_positive() {
        return Err(CliError::Precondition(format!("k > 0 fails: k = {}", a.k)));
    }
    if exact::norm_sq(&z) > a.k.square() {
        return Err(CliError::Precondition(format!("|z| <= k fails: |z|^2 = {}, k = {}", exact::norm_sq(&z), a.k)));
    }
    if let Some(e) = exceptional_reason(&g, &z)? {
        return Err(e.into());
    }
    let secants = secant_set(&g, &z, None)?;
    for r in &secants {
        r.validate(g.map(), &z)?;
    }
    let pairs = secant_pairs(&g, &z)?;
    let certificate = zero_dim_certificate(&secants, a.epsilon, a.k.to_f64())?;

    manifest.param("m", g.map().ambient());
    manifest.param("n", g.map().complex().dimension());
    manifest.param("epsilon", a.epsilon);
    manifest.param("k", &a.k);
    manifest.certifies(&["SecantRecord.validate", "zero_dim_certificate.valid", "secant_pairs = secant_set"]);
    Ok(json!({
        "manifest": manifest,
        "z": z,
        "k": a.k,
        "distance_sq": distance_sq,
        "secants": secants,
        "pairs": pairs,
        "certificate": certificate,
    }))
}

pub fn probe(a: &ProbeArgs, args: &[String]) -> Result<Value, CliError> {
    let mut manifest = RunManifest::new("probe", args);
    let g = certified(load_map(&a.map, &mut manifest)?)?;
    let probes = probe_region_samples(&g, &a.k, a.samples, a.seed)?;
    let reports: Vec<AnalysisReport> =
        probes.par_iter().map(|p| Ok(analyze_probe(&g, p, None, &[a.epsilon])?)).collect::<Result<_, CliError>>()?;

    let passed = reports.iter().filter(|r| r.all_valid()).count();
    let max_count = reports.iter().map(|r| r.secants.len()).max().unwrap_or(0);
    let min_distance = reports.iter().filter_map(AnalysisReport::min_pairwise_distance).reduce(f64::min);
    if passed < reports.len() {
        eprintln!("invariant violated: zero_dim_certificate.valid ({passed}/{} samples)", reports.len());
    }
    let rows: Vec<Value> = reports
        .iter()
        .enumerate()
        .map(|(index, r)| {
            json!({
                "index": index,
                "z": r.z,
                "secants": r.secants.len(),
                "min_pairwise_distance": r.min_pairwise_distance(),
                "valid": r.all_valid(),
            })
        })
        .collect();
    if let Some(path) = &a.csv {
        write_sweep_csv(path, &reports)?;
    }

    manifest.seed = Some(a.seed);
    manifest.param("m", g.map().ambient());
    manifest.param("n", g.map().complex().dimension());
    manifest.param("k", &a.k);
    manifest.param("epsilon", a.epsilon);
    manifest.certifies(&["ProbePoint region", "SecantRecord.validate", "zero_dim_certificate.valid"]);
    Ok(json!({
        "manifest": manifest,
        "summary": {
            "samples": reports.len(),
            "max_count": max_count,
            "min_pairwise_distance": min_distance,
            "passed": passed,
            "pass_rate": (!reports.is_empty()).then(|| passed as f64 / reports.len() as f64),
        },
        "samples": rows,
    }))
}

fn write_sweep_csv(path: &str, reports: &[AnalysisReport]) -> Result<(), CliError> {
    let csv_err = |e: csv::Error| CliError::Invalid(format!("{path}: {e}"));
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    let m = reports.first().map_or(0, |r| r.z.len());
    let mut header: Vec<String> = (0..m).map(|i| format!("z{i}")).collect();
    header.extend(["secants", "min_pairwise_distance", "valid"].map(String::from));
    w.write_record(&header).map_err(csv_err)?;
    for r in reports {
        let mut row: Vec<String> = r.z.iter().map(|x| x.to_f64().to_string()).collect();
        row.push(r.secants.len().to_string());
        row.push(r.min_pairwise_distance().map_or_else(String::new, |d| d.to_string()));
        row.push(r.all_valid().to_string());
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn nerve(a: &NerveArgs, args: &[String]) -> Result<Value, CliError> {
    let mut manifest = RunManifest::new("nerve", args);
    let bytes = read(&a.points)?;
    manifest.input("points", &a.points, &bytes);
    let mut cloud = PointCloud::from_csv(bytes.as_slice())?;
    if let Some(path) = &a.marks {
        let marks = read(path)?;
        manifest.input("marks", path, &marks);
        cloud = cloud.with_marks_json(&utf8(path, &marks)?)?;
    }
    let (cover, refinement) = if cloud.has_marks() {
        let refined = refine_for_separation(&cloud, &a.radius)?;
        if refined.halvings > 0 {
            let trace: Vec<String> = refined.trace.iter().map(Rational::to_string).collect();
            eprintln!("radius refined for separation: {}", trace.join(" -> "));
        }
        let refinement = json!({
            "requested": refined.requested,
            "radius": refined.cover.radius,
            "halvings": refined.halvings,
            "trace": refined.trace,
        });
        (refined.cover, refinement)
    } else {
        (build_cover(&cloud, &a.radius)?, json!({"skipped": true, "radius": a.radius}))
    };
    let complex = nerve_complex(&cover)?;
    let weights = canonical_map(&cloud, &cover)?;
    let summary = summarize(&cover, &complex);
    let m = 2 * complex.dimension().max(0) as usize + 1;

    manifest.param("m", m);
    manifest.param("n", complex.dimension());
    manifest.param("radius", &a.radius);
    manifest.certifies(&["nerve simplices have a common point", "no simplex meets both B1 and B2", "canonical weights sum to 1"]);
    let mut out = to_value(&complex.to_json(m));
    let obj = out.as_object_mut().expect("complex JSON is an object");
    obj.insert("manifest".into(), to_value(&manifest));
    obj.insert("radius".into(), to_value(&cover.radius));
    obj.insert("refinement".into(), refinement);
    obj.insert("nerve".into(), to_value(&summary));
    obj.insert("canonical_map".into(), to_value(&weights));
    Ok(out)
}

pub fn fibered(a: &FiberedArgs, args: &[String]) -> Result<Value, CliError> {
    let mut manifest = RunManifest::new("fibered", args);
    let bytes = read(&a.instance)?;
    manifest.input("instance", &a.instance, &bytes);
    let inst = FiberedInstance::from_json_str(&utf8(&a.instance, &bytes)?)?;
    let etas = if !a.eta.is_empty() {
        a.eta.clone()
    } else if !inst.eta.is_empty() {
        inst.eta.clone()
    } else {
        vec![Rational::one(), Rational::new(1, 2), Rational::new(1, 4)]
    };
    if !a.delta.is_positive() {
        return Err(CliError::Precondition(format!("delta > 0 fails: delta = {}", a.delta)));
    }
    let embeddings = fiberwise_embed(&inst, &a.delta, a.seed)?;
    let reports = fibered_report(&embeddings, &a.k, a.samples, &etas, a.seed)?;

    let cases: usize = reports.iter().map(|r| r.samples.len()).sum();
    let valid: usize = reports.iter().map(|r| r.valid_cases).sum();
    let maps: BTreeMap<&str, Value> =
        embeddings.iter().map(|e| (e.label.as_str(), to_value(&e.map.map().to_json()))).collect();
    let perturbation: BTreeMap<&str, Value> =
        embeddings.iter().map(|e| (e.label.as_str(), e.report.to_json(false))).collect();

    manifest.seed = Some(a.seed);
    manifest.param("m", inst.m);
    manifest.param("delta", &a.delta);
    manifest.param("k", &a.k);
    manifest.param("eta", etas.iter().map(Rational::to_string).collect::<Vec<_>>().join(","));
    manifest.certifies(&["eta-monotonicity", "zero_dim_certificate.valid", "decomposition recovered at eta = 1/K"]);
    Ok(json!({
        "manifest": manifest,
        "summary": {
            "fibers": reports.len(),
            "cases": cases,
            "valid_cases": valid,
            "monotone": reports.iter().all(|r| r.monotone),
            "decomposition_recovered": reports.iter().all(|r| r.decomposition.recovered),
        },
        "fibers": reports,
        "maps": maps,
        "perturbation": perturbation,
    }))
}
