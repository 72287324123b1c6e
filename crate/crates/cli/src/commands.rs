use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use serde_json::json;

use persets::graph::{GraphFamily, MetricGraph};
use persets::plot::{heatmap_svg, scatter_svg, Axes};
use persets::regions::{circle_density, RegionSpec};
use persets::sampling::{
    density_l1_error, histogram, sample_persistence_set, DensityFn, PersistenceSetSample, SampleConfig, TupleMode,
};
use persets::spaces::{FiniteMmSpace, Space, SpaceModel};
use persets::split::detect_corners;
use persets::{bottleneck, metric, DistanceMatrix, Error};

use crate::{CompareArgs, DensityCheckArgs, Failure, GraphBettiArgs, OracleCheckArgs, SampleArgs, ValidateArgs};

pub struct Global {
    pub workers: usize,
    pub seed: u64,
}

impl Global {
    fn workers(&self) -> usize {
        if self.workers > 0 {
            self.workers
        } else {
            std::thread::available_parallelism().map_or(1, |n| n.get())
        }
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, contents: &str) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// A graph from a JSON file if the argument names one, else a family
/// descriptor.
fn load_graph(arg: &str) -> anyhow::Result<MetricGraph> {
    let path = Path::new(arg);
    if path.is_file() {
        return Ok(MetricGraph::from_json(&read(path)?)?.with_label(arg));
    }
    let family: GraphFamily = arg.parse().with_context(|| format!("{arg:?} is neither a file nor a graph family"))?;
    Ok(family.build()?)
}

fn load_matrix(path: &Path) -> anyhow::Result<Vec<Vec<f64>>> {
    let text = read(path)?;
    let rows = if text.trim_start().starts_with('[') {
        serde_json::from_str(&text).with_context(|| format!("{}: expected a JSON array of rows", path.display()))?
    } else {
        metric::parse_csv_rows(&text)?
    };
    Ok(rows)
}

fn load_sample(path: &Path) -> anyhow::Result<PersistenceSetSample> {
    let csv = read(path)?;
    let sidecar = path.with_extension("json");
    let sidecar = if sidecar.is_file() { Some(read(&sidecar)?) } else { None };
    Ok(PersistenceSetSample::from_csv(&csv, sidecar.as_deref())?)
}

fn run_sample<S: Space>(space: &S, cfg: &SampleConfig) -> anyhow::Result<(PersistenceSetSample, bool)> {
    Ok((sample_persistence_set(space, cfg)?, space.is_angular()))
}

pub fn sample(g: &Global, a: SampleArgs) -> Result<(), Failure> {
    if a.n != 2 * a.k + 2 && !a.oracle_fallback {
        return Err(anyhow!(
            "n = {} is not 2k + 2 = {}; pass --oracle-fallback to use the boundary-matrix reduction",
            a.n,
            2 * a.k + 2
        )
        .into());
    }
    let mode = if a.distinct { TupleMode::Distinct } else { TupleMode::WithReplacement };
    let cfg = SampleConfig::new(a.n, a.k, a.tuples, g.seed).workers(g.workers()).mode(mode);
    let (sample, angular) = match (&a.space, &a.graph, &a.matrix) {
        (Some(s), _, _) => run_sample(&s.parse::<SpaceModel>()?, &cfg)?,
        (_, Some(gr), _) => run_sample(&load_graph(gr)?, &cfg)?,
        (_, _, Some(m)) => run_sample(&FiniteMmSpace::uniform(DistanceMatrix::validate(&load_matrix(m)?)?), &cfg)?,
        _ => return Err(anyhow!("one of --space, --graph or --matrix is required").into()),
    };
    write(&with_suffix(&a.out, ".csv"), &sample.to_csv())?;
    write(&with_suffix(&a.out, ".json"), &sample.sidecar_json())?;
    let title = format!("D_{},{}({})", a.n, a.k, sample.space);
    if !a.no_svg {
        let axes = Axes::fit(&sample.nontrivial_points, angular, &title);
        write(&with_suffix(&a.out, ".svg"), &scatter_svg(&sample.nontrivial_points, &axes))?;
    }
    if let Some(bins) = a.bins {
        let h = histogram(&sample, bins, bins, None);
        write(&with_suffix(&a.out, ".hist.csv"), &h.to_csv())?;
        write(&with_suffix(&a.out, ".hist.json"), &h.metadata_json())?;
        write(&with_suffix(&a.out, ".heatmap.svg"), &heatmap_svg(&h, angular, &title))?;
    }
    let summary = json!({
        "space": sample.space,
        "tuples": sample.tuples_drawn,
        "nontrivial": sample.nontrivial_points.len(),
        "nontrivial_fraction": sample.nontrivial_fraction(),
    });
    println!("{summary}");
    Ok(())
}

pub fn oracle_check(a: OracleCheckArgs) -> Result<(), Failure> {
    let region: RegionSpec = a.region.parse()?;
    let sample = load_sample(&a.check)?;
    let mut csv = String::from("t_b,t_d,inside\n");
    let mut violations = 0usize;
    for &(b, d) in &sample.nontrivial_points {
        let inside = region.contains(b, d, a.tol);
        violations += usize::from(!inside);
        csv.push_str(&format!("{b:?},{d:?},{inside}\n"));
    }
    let summary = json!({
        "region": region.to_string(),
        "points": sample.nontrivial_points.len(),
        "violations": violations,
    });
    match &a.out {
        Some(path) => {
            write(path, &csv)?;
            println!("{summary}");
        }
        None => {
            print!("{csv}");
            eprintln!("{summary}");
        }
    }
    if violations > 0 {
        return Err(Failure::Invalid(format!("{violations} point(s) outside {region}")));
    }
    Ok(())
}

pub fn compare(a: CompareArgs) -> Result<(), Failure> {
    let (h, resolution) = match (&a.a, &a.b, &a.region_a, &a.region_b) {
        (Some(pa), Some(pb), _, _) => {
            let sa = load_sample(pa)?;
            let sb = load_sample(pb)?;
            let h = bottleneck::principal_hausdorff(&sample_diagrams(&sa), &sample_diagrams(&sb))?;
            (h, None)
        }
        (_, _, Some(ra), Some(rb)) => {
            if !(a.step > 0.0) {
                return Err(anyhow!("--step must be positive").into());
            }
            let istep = a.interior_step.unwrap_or(20.0 * a.step);
            if !(istep > 0.0) {
                return Err(anyhow!("--interior-step must be positive").into());
            }
            let ra: RegionSpec = ra.parse()?;
            let rb: RegionSpec = rb.parse()?;
            let h = bottleneck::principal_hausdorff(&ra.diagram_set(a.step, istep), &rb.diagram_set(a.step, istep))?;
            (h, Some(json!({"boundary_step": a.step, "interior_step": istep})))
        }
        _ => return Err(anyhow!("pass either --a/--b or --region-a/--region-b").into()),
    };
    let out = json!({
        "hausdorff_bottleneck": h,
        "gh_lower_bound": h / 2.0,
        "resolution": resolution,
    });
    println!("{out}");
    Ok(())
}

/// The sampled diagram set: every nontrivial point, plus the empty diagram
/// when some tuple was trivial.
fn sample_diagrams(s: &PersistenceSetSample) -> Vec<persets::principal::PrincipalDiagram> {
    use persets::principal::PrincipalDiagram;
    let mut set: Vec<PrincipalDiagram> =
        s.nontrivial_points.iter().map(|&p| PrincipalDiagram { point: Some(p) }).collect();
    if s.trivial_count > 0 {
        set.push(PrincipalDiagram::EMPTY);
    }
    set
}

pub fn graph_betti(g: &Global, a: GraphBettiArgs) -> Result<(), Failure> {
    let graph = load_graph(&a.graph)?;
    for w in graph.warnings() {
        eprintln!("warning: {w}");
    }
    let cfg = SampleConfig::new(4, 1, a.tuples, g.seed).workers(g.workers());
    let sample = sample_persistence_set(&graph, &cfg)?;
    let report = detect_corners(&sample, a.rel_tol, a.min_support)?;
    let cycles: Vec<_> = report
        .corners
        .iter()
        .map(|c| json!({"lambda": c.lambda, "length": 2.0 * c.lambda, "support": c.support, "spread": c.spread}))
        .collect();
    let out = json!({
        "betti": report.estimated_betti,
        "cycles": cycles,
        "caveat": report.caveat,
        "graph_betti_number": graph.betti_number(),
        "warnings": graph.warnings(),
    });
    println!("{out}");
    Ok(())
}

pub fn density_check(g: &Global, a: DensityCheckArgs) -> Result<(), Failure> {
    use std::f64::consts::PI;
    let cfg = SampleConfig::new(4, 1, a.tuples, g.seed).workers(g.workers());
    let sample = sample_persistence_set(&SpaceModel::circle(), &cfg)?;
    let h = histogram(&sample, a.bins, a.bins, Some(((0.0, PI), (0.0, PI))));
    let density = DensityFn::integrated_over(circle_density, (0.0, PI), (0.0, PI), 2000);
    let err = density_l1_error(&h, &density)?;
    let out = json!({
        "tuples": sample.tuples_drawn,
        "nontrivial_fraction": sample.nontrivial_fraction(),
        "density_mass": persets::sampling::BinMass::total_mass(&density),
        "bins": a.bins,
        "l1_error": err,
    });
    println!("{out}");
    match a.max_error {
        Some(m) if err > m => Err(Failure::Invalid(format!("L1 error {err} exceeds {m}"))),
        _ => Ok(()),
    }
}

pub fn validate(a: ValidateArgs) -> Result<(), Failure> {
    let rows = load_matrix(&a.file)?;
    match DistanceMatrix::validate(&rows) {
        Ok(m) => {
            let s = m.stats();
            println!("{}", json!({"valid": true, "size": m.size(), "diameter": s.diameter}));
            Ok(())
        }
        Err(Error::AxiomViolation(v)) => {
            let list: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            println!("{}", json!({"valid": false, "violations": list}));
            Err(Failure::Invalid(format!("{}: {} violation(s)\n{}", a.file.display(), v.len(), list.join("\n"))))
        }
        Err(e @ (Error::NotSquare { .. } | Error::NonFinite { .. })) => {
            println!("{}", json!({"valid": false, "violations": [e.to_string()]}));
            Err(Failure::Invalid(format!("{}: {e}", a.file.display())))
        }
        Err(e) => Err(anyhow!(e).into()),
    }
}
