//! Subcommand implementations and the artifact writers shared with the
//! pipeline.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use synthgraph::analysis::{analyze as run_analysis, AnalysisOptions};
use synthgraph::contact::{
    induce_contacts, read_contacts, sample_contacts, table2_suite, write_contacts, ActivityProbabilities,
};
use synthgraph::features::{extract_features, FeatureLayout, FeatureOptions, FeatureProvenance};
use synthgraph::graph::{load_canonical, load_graph_labeled, save_canonical, sidecar_path, GraphFormat};
use synthgraph::stylized::{generate, table3_specs, ErParameterization, StylizedParams, StylizedSpec, SUITE_NODES};
use synthgraph::synthpop::{read_visits, write_visits, PopulationConfig};
use synthgraph::{AnalysisResult, Family, FeatureMatrix, Graph, GraphLabel};

use crate::manifest::{self, Recorder};
use crate::plot::{read_scatter, render_svg, write_scatter, ScatterRow};

/// Runs `body`, then writes the manifest whether or not it succeeded.
pub fn with_manifest<F>(mut rec: Recorder, path: &Path, body: F) -> Result<manifest::RunManifest>
where
    F: FnOnce(&mut Recorder) -> Result<()>,
{
    match body(&mut rec) {
        Ok(()) => rec.finish(path, None),
        Err(e) => {
            rec.finish(path, Some(&e))?;
            Err(e)
        }
    }
}

fn in_dir(out_dir: &Path, explicit: &Option<PathBuf>, default: &str) -> PathBuf {
    explicit.clone().unwrap_or_else(|| out_dir.join(default))
}

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StylizedFamily {
    #[value(name = "erdos-renyi", alias = "er")]
    ErdosRenyi,
    #[value(name = "newman-watts", alias = "nw")]
    NewmanWatts,
    #[value(name = "random-regular", alias = "rr")]
    RandomRegular,
    #[value(name = "powerlaw-cluster", alias = "plc")]
    PowerlawCluster,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ErChoice {
    Corrected,
    Published,
}

impl From<ErChoice> for ErParameterization {
    fn from(c: ErChoice) -> Self {
        match c {
            ErChoice::Corrected => ErParameterization::Corrected,
            ErChoice::Published => ErParameterization::Published,
        }
    }
}

#[derive(Debug, Args)]
pub struct GenStylizedArgs {
    #[arg(long, required_unless_present = "table3")]
    pub family: Option<StylizedFamily>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Edge, shortcut or triangle probability, depending on the family.
    #[arg(long)]
    pub p: Option<f64>,
    /// Newman-Watts lattice neighbours (even).
    #[arg(long)]
    pub k: Option<usize>,
    /// Random-regular degree.
    #[arg(long)]
    pub d: Option<usize>,
    /// Powerlaw-cluster edges per new node.
    #[arg(long)]
    pub m: Option<usize>,
    /// Output TSV (a metadata sidecar is written beside it).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub name: Option<String>,
    /// Generate the twelve reference graphs into the output directory.
    #[arg(long, conflicts_with = "family")]
    pub table3: bool,
    #[arg(long, value_enum, default_value = "corrected")]
    pub er: ErChoice,
}

pub fn gen_stylized(a: &GenStylizedArgs, seed: u64, out_dir: &Path) -> Result<()> {
    if a.table3 {
        fs::create_dir_all(out_dir)?;
        let mut rec = Recorder::start("gen-stylized");
        rec.seed("seed", seed);
        with_manifest(rec, &out_dir.join("gen-stylized.manifest.json"), |rec| {
            rec.settings(&(a.n.unwrap_or(SUITE_NODES), ErParameterization::from(a.er)))?;
            write_table3(a.n.unwrap_or(SUITE_NODES), seed, a.er.into(), out_dir, rec).map(|_| ())
        })?;
        return Ok(());
    }
    let need = |v: Option<f64>, what: &str| v.with_context(|| format!("--{what} is required for this family"));
    let needu = |v: Option<usize>, what: &str| v.with_context(|| format!("--{what} is required for this family"));
    let params = match a.family.expect("clap enforces --family") {
        StylizedFamily::ErdosRenyi => StylizedParams::ErdosRenyi { p: need(a.p, "p")? },
        StylizedFamily::NewmanWatts => StylizedParams::NewmanWatts {
            k: needu(a.k, "k")?,
            p: need(a.p, "p")?,
        },
        StylizedFamily::RandomRegular => StylizedParams::RandomRegular { d: needu(a.d, "d")? },
        StylizedFamily::PowerlawCluster => StylizedParams::PowerlawCluster {
            m: needu(a.m, "m")?,
            p: need(a.p, "p")?,
        },
    };
    let spec = StylizedSpec::new(needu(a.n, "n")?, params, seed);
    let label = GraphLabel::new(a.name.clone().unwrap_or_else(|| spec.family().as_str().into()), spec.family());
    let out = in_dir(out_dir, &a.out, &format!("{}.tsv", label.name));
    ensure_parent(&out)?;
    let mut rec = Recorder::start("gen-stylized");
    rec.seed("seed", seed);
    with_manifest(rec, &manifest::beside(&out), |rec| {
        rec.settings(&spec)?;
        let g = generate(&spec)?;
        save_canonical(&g, &label, &out)?;
        rec.output(&out)?.output(&sidecar_path(&out))?;
        Ok(())
    })?;
    Ok(())
}

/// Writes the twelve stylized graphs as `<dir>/<name>.tsv`.
pub fn write_table3(
    n: usize,
    seed: u64,
    er: ErParameterization,
    dir: &Path,
    rec: &mut Recorder,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let specs = table3_specs(n, seed, er);
    let mut paths = Vec::new();
    for e in specs {
        let g = generate(&e.spec).with_context(|| format!("generating {}", e.label.name))?;
        let path = dir.join(format!("{}.tsv", e.label.name));
        save_canonical(&g, &e.label, &path)?;
        rec.output(&path)?.output(&sidecar_path(&path))?;
        paths.push(path);
    }
    Ok(paths)
}

#[derive(Debug, Args)]
pub struct GenPopulationArgs {
    /// Population config JSON; the built-in desk-scale town when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    pub households: usize,
    /// Also write the effective config here.
    #[arg(long)]
    pub dump_config: Option<PathBuf>,
}

pub fn load_population_config(path: Option<&Path>) -> Result<PopulationConfig> {
    match path {
        Some(p) => PopulationConfig::load(p).with_context(|| format!("loading {}", p.display())),
        None => Ok(PopulationConfig::desk_scale()),
    }
}

/// Writes `visits.tsv` and `population.json` into `dir`.
pub fn write_population(
    cfg: &PopulationConfig,
    households: usize,
    seed: u64,
    dir: &Path,
    rec: &mut Recorder,
) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    rec.seed("population", seed);
    let generated = cfg.generate(households, seed)?;
    let visits = dir.join("visits.tsv");
    write_visits(&generated.visits, &visits)?;
    let population = dir.join("population.json");
    #[derive(Serialize)]
    struct Summary<'a> {
        ipf_iterations: usize,
        ipf_residual: f64,
        households: usize,
        persons: usize,
        visits: usize,
        diagonal_fallback: bool,
        population: &'a synthgraph::synthpop::Population,
    }
    let summary = Summary {
        ipf_iterations: generated.fit.iterations,
        ipf_residual: generated.fit.residual,
        households: generated.population.households.len(),
        persons: generated.population.persons.len(),
        visits: generated.visits.visits.len(),
        diagonal_fallback: generated.schedules.diagonal_fallback,
        population: &generated.population,
    };
    fs::write(&population, serde_json::to_string(&summary)? + "\n")?;
    rec.output(&visits)?.output(&population)?;
    Ok(visits)
}

pub fn gen_population(a: &GenPopulationArgs, seed: u64, out_dir: &Path) -> Result<()> {
    let cfg = load_population_config(a.config.as_deref())?;
    let mut rec = Recorder::start("gen-population");
    if let Some(c) = &a.config {
        rec.input(c)?;
    }
    with_manifest(rec, &out_dir.join("gen-population.manifest.json"), |rec| {
        rec.settings(&(&cfg, a.households))?;
        write_population(&cfg, a.households, seed, out_dir, rec)?;
        if let Some(p) = &a.dump_config {
            ensure_parent(p)?;
            fs::write(p, serde_json::to_string_pretty(&cfg)? + "\n")?;
            rec.output(p)?;
        }
        Ok(())
    })?;
    Ok(())
}

#[derive(Debug, Args)]
pub struct InduceContactsArgs {
    #[arg(long)]
    pub visits: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn induce(a: &InduceContactsArgs, out_dir: &Path) -> Result<()> {
    let out = in_dir(out_dir, &a.out, "contacts.tsv");
    ensure_parent(&out)?;
    with_manifest(Recorder::start("induce-contacts"), &manifest::beside(&out), |rec| {
        rec.input(&a.visits)?;
        let vs = read_visits(&a.visits)?;
        write_contacts(&induce_contacts(&vs), &out)?;
        rec.output(&out)?;
        Ok(())
    })?;
    Ok(())
}

#[derive(Debug, Args)]
pub struct SampleContactsArgs {
    #[arg(long)]
    pub contacts: PathBuf,
    /// Five probabilities: home,work,shopping,other,school.
    #[arg(long, required_unless_present = "table2", conflicts_with = "table2")]
    pub probs: Option<ActivityProbabilities>,
    /// Emit all ten reference configurations plus a summary.
    #[arg(long)]
    pub table2: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub name: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct SampledSummary {
    pub name: String,
    pub probabilities: [f64; 5],
    pub node_count: usize,
    pub edge_count: usize,
    pub avg_degree: f64,
}

fn avg_degree(g: &Graph) -> f64 {
    if g.node_count() == 0 {
        0.0
    } else {
        2.0 * g.edge_count() as f64 / g.node_count() as f64
    }
}

/// Writes the ten contact graphs and `table2_summary.json` into `dir`.
pub fn write_table2(contacts: &Path, seed: u64, dir: &Path, rec: &mut Recorder) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    rec.input(contacts)?.seed("sampling", seed);
    let cm = read_contacts(contacts)?;
    let mut paths = Vec::new();
    let mut summary = Vec::new();
    for s in table2_suite(&cm, seed)? {
        let path = dir.join(format!("{}.tsv", s.label.name));
        save_canonical(&s.graph, &s.label, &path)?;
        rec.output(&path)?.output(&sidecar_path(&path))?;
        summary.push(SampledSummary {
            name: s.label.name.clone(),
            probabilities: s.probabilities.to_array(),
            node_count: s.graph.node_count(),
            edge_count: s.graph.edge_count(),
            avg_degree: avg_degree(&s.graph),
        });
        paths.push(path);
    }
    let sp = dir.join("table2_summary.json");
    fs::write(&sp, serde_json::to_string_pretty(&summary)? + "\n")?;
    rec.output(&sp)?;
    Ok(paths)
}

pub fn sample(a: &SampleContactsArgs, seed: u64, out_dir: &Path) -> Result<()> {
    if a.table2 {
        fs::create_dir_all(out_dir)?;
        let mut rec = Recorder::start("sample-contacts");
        rec.settings(&"table2")?;
        with_manifest(rec, &out_dir.join("sample-contacts.manifest.json"), |rec| {
            write_table2(&a.contacts, seed, out_dir, rec).map(|_| ())
        })?;
        return Ok(());
    }
    let probs = a.probs.expect("clap enforces --probs");
    let name = a.name.clone().unwrap_or_else(|| format!("sampled-{probs}"));
    let out = in_dir(out_dir, &a.out, &format!("{name}.tsv"));
    ensure_parent(&out)?;
    let mut rec = Recorder::start("sample-contacts");
    rec.seed("sampling", seed);
    with_manifest(rec, &manifest::beside(&out), |rec| {
        rec.input(&a.contacts)?.settings(&probs)?;
        let g = sample_contacts(&read_contacts(&a.contacts)?, &probs, seed)?;
        save_canonical(&g, &GraphLabel::new(name.clone(), Family::AgentSynthetic), &out)?;
        rec.output(&out)?.output(&sidecar_path(&out))?;
        Ok(())
    })?;
    Ok(())
}

#[derive(Debug, Args)]
pub struct FeaturesArgs {
    /// Graph files. Canonical TSVs carry their own labels; anything else is
    /// read as a SNAP edge list (Matrix Market for `.mtx`) named after the
    /// file.
    #[arg(long = "graph", required = true)]
    pub graphs: Vec<PathBuf>,
    #[arg(long, default_value = "full39")]
    pub layout: FeatureLayout,
    /// Node count above which betweenness and distance sums are sampled.
    #[arg(long, default_value_t = 5000)]
    pub approx_threshold: usize,
    #[arg(long, default_value_t = 256)]
    pub sample_sources: usize,
    /// Family for graphs without a metadata sidecar.
    #[arg(long, default_value = "RealWorld")]
    pub family: Family,
    /// Treat sidecar-less graphs as directed.
    #[arg(long)]
    pub directed: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Reads a canonical graph, or a raw edge list labelled by file stem.
pub fn load_any(path: &Path, family: Family, directed: bool, name: Option<&str>) -> Result<(GraphLabel, Graph)> {
    if sidecar_path(path).exists() {
        let (g, mut label) = load_canonical(path).with_context(|| format!("loading {}", path.display()))?;
        if let Some(n) = name {
            label.name = n.into();
        }
        return Ok((label, g));
    }
    let format = match path.extension().and_then(|e| e.to_str()) {
        Some("mtx") => GraphFormat::MatrixMarket,
        _ => GraphFormat::SnapEdgelist,
    };
    let loaded = load_graph_labeled(path, format, directed).with_context(|| format!("loading {}", path.display()))?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("graph").to_string();
    Ok((GraphLabel::new(name.map_or(stem, str::to_string), family), loaded.graph))
}

#[derive(Debug, Serialize)]
pub struct ProvenanceRow {
    pub name: String,
    pub family: Family,
    pub provenance: FeatureProvenance,
}

/// Features for every graph, extracted in parallel across graphs; rows
/// keep input order.
pub fn featurize(graphs: &[(GraphLabel, Graph)], opts: &FeatureOptions) -> Result<(FeatureMatrix, Vec<ProvenanceRow>)> {
    let extracted: Vec<_> = graphs
        .par_iter()
        .map(|(label, g)| {
            extract_features::<f64>(g, opts)
                .with_context(|| format!("features of {}", label.name))
                .map(|f| (label.clone(), f))
        })
        .collect::<Result<Vec<_>>>()?;
    let provenance = extracted
        .iter()
        .map(|(l, f)| ProvenanceRow {
            name: l.name.clone(),
            family: l.family,
            provenance: f.provenance.clone(),
        })
        .collect();
    let matrix = FeatureMatrix::from_vectors(extracted.into_iter().map(|(l, f)| (l, f.vector)).collect())?;
    Ok((matrix, provenance))
}

/// Writes `out` plus a `<stem>.provenance.json` sidecar.
pub fn write_features(matrix: &FeatureMatrix, provenance: &[ProvenanceRow], out: &Path, rec: &mut Recorder) -> Result<()> {
    ensure_parent(out)?;
    matrix.write_csv(out)?;
    let side = out.with_extension("provenance.json");
    fs::write(&side, serde_json::to_string_pretty(provenance)? + "\n")?;
    rec.output(out)?.output(&side)?;
    Ok(())
}

pub fn features(a: &FeaturesArgs, seed: u64, out_dir: &Path) -> Result<()> {
    let out = in_dir(out_dir, &a.out, "features.csv");
    let opts = FeatureOptions {
        layout: a.layout,
        approx_threshold: a.approx_threshold,
        sample_sources: a.sample_sources,
        seed,
        ..FeatureOptions::default()
    };
    let mut rec = Recorder::start("features");
    rec.seed("sampling", seed);
    with_manifest(rec, &manifest::beside(&out), |rec| {
        rec.settings(&opts)?;
        let mut graphs = Vec::new();
        for p in &a.graphs {
            rec.input(p)?;
            graphs.push(load_any(p, a.family, a.directed, None)?);
        }
        let (matrix, prov) = featurize(&graphs, &opts)?;
        write_features(&matrix, &prov, &out, rec)
    })?;
    Ok(())
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub features: PathBuf,
    /// Cluster count; defaults to the number of families present.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 32)]
    pub restarts: usize,
    /// Cluster the raw feature values.
    #[arg(long)]
    pub no_standardize: bool,
}

/// Writes `analysis.json` and `scatter.csv` into `dir`.
pub fn write_analysis(features: &Path, opts: &AnalysisOptions, dir: &Path, rec: &mut Recorder) -> Result<AnalysisResult> {
    fs::create_dir_all(dir)?;
    rec.input(features)?.seed("kmeans", opts.seed);
    let matrix = FeatureMatrix::read_csv(features)?;
    let result = run_analysis(&matrix, opts)?;
    let json = dir.join("analysis.json");
    fs::write(&json, serde_json::to_string_pretty(&result)? + "\n")?;
    let rows: Vec<ScatterRow> = matrix
        .labels
        .iter()
        .zip(&result.assignments)
        .zip(&result.projection)
        .map(|((l, &c), p)| ScatterRow {
            name: l.name.clone(),
            family: l.family,
            cluster: c,
            pc1: p[0],
            pc2: p[1],
        })
        .collect();
    let scatter = dir.join("scatter.csv");
    write_scatter(&rows, &scatter)?;
    rec.output(&json)?.output(&scatter)?;
    Ok(result)
}

pub fn analyze(a: &AnalyzeArgs, seed: u64, out_dir: &Path) -> Result<()> {
    let opts = AnalysisOptions {
        k: a.k,
        seed,
        restarts: a.restarts,
        standardize: !a.no_standardize,
    };
    with_manifest(Recorder::start("analyze"), &out_dir.join("analyze.manifest.json"), |rec| {
        rec.settings(&opts)?;
        write_analysis(&a.features, &opts, out_dir, rec).map(|_| ())
    })?;
    Ok(())
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[arg(long)]
    pub scatter: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn write_plot(scatter: &Path, out: &Path, rec: &mut Recorder) -> Result<()> {
    rec.input(scatter)?;
    let rows = read_scatter(scatter)?;
    ensure_parent(out)?;
    fs::write(out, render_svg(&rows)?)?;
    rec.output(out)?;
    Ok(())
}

pub fn plot(a: &PlotArgs, out_dir: &Path) -> Result<()> {
    let out = in_dir(out_dir, &a.out, "scatter.svg");
    if a.scatter == out {
        bail!("refusing to overwrite the input");
    }
    with_manifest(Recorder::start("plot"), &manifest::beside(&out), |rec| write_plot(&a.scatter, &out, rec))?;
    Ok(())
}
