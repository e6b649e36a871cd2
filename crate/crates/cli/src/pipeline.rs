//! End-to-end run: stylized suite, population, contacts, features,
//! clustering and the scatter plot. Each stage is skipped when its
//! manifest shows the same settings and inputs and its outputs are intact.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use synthgraph::analysis::AnalysisOptions;
use synthgraph::contact::TABLE2;
use synthgraph::features::{FeatureLayout, FeatureOptions};
use synthgraph::graph::{sidecar_path, GraphFormat};
use synthgraph::rng::mix;
use synthgraph::stylized::{table3_specs, ErParameterization, SUITE_NODES};
use synthgraph::{AnalysisResult, Family};

use synthgraph::contact::{induce_contacts, write_contacts};
use synthgraph::synthpop::read_visits;

use crate::commands::{
    featurize, load_any, load_population_config, with_manifest, write_analysis, write_features, write_plot,
    write_population, write_table2, write_table3,
};
use crate::manifest::{self, Recorder, Status};
use crate::PipelineArgs;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealGraph {
    pub name: String,
    pub path: PathBuf,
    #[serde(default = "default_real_format")]
    pub format: GraphFormat,
    #[serde(default)]
    pub directed: bool,
}

fn default_real_format() -> GraphFormat {
    GraphFormat::SnapEdgelist
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureSettings {
    pub layout: FeatureLayout,
    pub approx_threshold: usize,
    pub sample_sources: usize,
}

impl Default for FeatureSettings {
    fn default() -> Self {
        let d = FeatureOptions::default();
        FeatureSettings {
            layout: d.layout,
            approx_threshold: d.approx_threshold,
            sample_sources: d.sample_sources,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisSettings {
    pub k: Option<usize>,
    pub restarts: usize,
    pub standardize: bool,
}

impl Default for AnalysisSettings {
    fn default() -> Self {
        AnalysisSettings {
            k: None,
            restarts: 32,
            standardize: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub stylized_n: usize,
    pub er: ErParameterization,
    pub households: usize,
    /// Population config JSON; the built-in desk-scale town when absent.
    pub population_config: Option<PathBuf>,
    pub real_graphs: Vec<RealGraph>,
    pub features: FeatureSettings,
    pub analysis: AnalysisSettings,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            stylized_n: SUITE_NODES,
            er: ErParameterization::Corrected,
            households: 1000,
            population_config: None,
            real_graphs: Vec::new(),
            features: FeatureSettings::default(),
            analysis: AnalysisSettings::default(),
        }
    }
}

impl PipelineConfig {
    /// Relative paths are taken from the config file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg: PipelineConfig = serde_json::from_str(
            &fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?,
        )
        .with_context(|| format!("parsing {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        if let Some(p) = cfg.population_config.as_mut() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        for r in cfg.real_graphs.iter_mut() {
            if r.path.is_relative() {
                r.path = base.join(&r.path);
            }
        }
        Ok(cfg)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyGroup {
    Stylized,
    Agent,
    Real,
}

pub fn parse_groups(raw: &[String]) -> Result<Vec<FamilyGroup>> {
    if raw.is_empty() {
        return Ok(vec![FamilyGroup::Stylized, FamilyGroup::Agent, FamilyGroup::Real]);
    }
    let mut out = Vec::new();
    for s in raw {
        let g = match s.trim().to_ascii_lowercase().as_str() {
            "stylized" => FamilyGroup::Stylized,
            "agent" | "agentsynthetic" | "agent-synthetic" => FamilyGroup::Agent,
            "real" | "realworld" | "real-world" => FamilyGroup::Real,
            other => bail!(synthgraph::Error::InvalidInput(format!(
                "unknown family group {other:?} (expected stylized, agent or real)"
            ))),
        };
        if !out.contains(&g) {
            out.push(g);
        }
    }
    out.sort();
    Ok(out)
}

#[derive(Debug)]
pub struct PipelineReport {
    pub out_dir: PathBuf,
    pub features: PathBuf,
    pub analysis: AnalysisResult,
    pub skipped_stages: Vec<String>,
    pub missing_real_graphs: Vec<String>,
}

struct Stages<'a> {
    out_dir: &'a Path,
    force: bool,
    skipped: Vec<String>,
}

impl Stages<'_> {
    /// Runs `body` unless the stage's manifest is current.
    fn run<S: Serialize>(
        &mut self,
        name: &str,
        settings: &S,
        inputs: &[PathBuf],
        seeds: &[(&str, u64)],
        body: impl FnOnce(&mut Recorder) -> Result<()>,
    ) -> Result<()> {
        let path = self.out_dir.join("manifests").join(format!("{name}.manifest.json"));
        let mut rec = Recorder::start(&format!("run-pipeline:{name}"));
        for &(k, v) in seeds {
            rec.seed(k, v);
        }
        rec.settings(settings)?;
        if !self.force && current(&path, rec.manifest().settings_sha256.as_deref(), inputs) {
            eprintln!("stage {name}: up to date");
            self.skipped.push(name.to_string());
            return Ok(());
        }
        eprintln!("stage {name}: running");
        with_manifest(rec, &path, |rec| {
            for i in inputs {
                rec.input(i)?;
            }
            body(rec)
        })
        .with_context(|| format!("stage {name} failed (see {})", path.display()))?;
        Ok(())
    }
}

fn current(path: &Path, settings: Option<&str>, inputs: &[PathBuf]) -> bool {
    let Ok(m) = manifest::load(path) else {
        return false;
    };
    m.status == Status::Ok
        && m.settings_sha256.as_deref() == settings
        && m.inputs.len() == inputs.len()
        && m.inputs.iter().zip(inputs).all(|(d, p)| d.path == *p && d.matches_disk())
        && m.outputs.iter().all(|d| d.matches_disk())
}

fn with_sidecars(paths: &[PathBuf]) -> Vec<PathBuf> {
    paths.iter().flat_map(|p| [p.clone(), sidecar_path(p)]).collect()
}

pub fn run_pipeline(a: &PipelineArgs, seed: u64, out_dir: &Path) -> Result<PipelineReport> {
    let cfg = match &a.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    let groups = parse_groups(&a.families)?;
    fs::create_dir_all(out_dir)?;
    let mut stages = Stages {
        out_dir,
        force: a.force,
        skipped: Vec::new(),
    };
    let mut graph_files: Vec<PathBuf> = Vec::new();

    if groups.contains(&FamilyGroup::Stylized) {
        let dir = out_dir.join("stylized");
        let s = mix(seed, 1);
        let (n, er) = (cfg.stylized_n, cfg.er);
        stages.run("stylized", &(n, er, s), &[], &[("stylized", s)], |rec| {
            write_table3(n, s, er, &dir, rec).map(|_| ())
        })?;
        graph_files.extend(table3_specs(n, s, er).iter().map(|e| dir.join(format!("{}.tsv", e.label.name))));
    }

    if groups.contains(&FamilyGroup::Agent) {
        let pop_dir = out_dir.join("population");
        let pop_seed = mix(seed, 2);
        let pop_cfg = load_population_config(cfg.population_config.as_deref())?;
        let pop_inputs: Vec<PathBuf> = cfg.population_config.iter().cloned().collect();
        stages.run(
            "population",
            &(&pop_cfg, cfg.households, pop_seed),
            &pop_inputs,
            &[("population", pop_seed)],
            |rec| write_population(&pop_cfg, cfg.households, pop_seed, &pop_dir, rec).map(|_| ()),
        )?;

        let visits = pop_dir.join("visits.tsv");
        let contacts = out_dir.join("contacts").join("contacts.tsv");
        stages.run("contacts", &"induce", &[visits.clone()], &[], |rec| {
            fs::create_dir_all(contacts.parent().unwrap())?;
            write_contacts(&induce_contacts(&read_visits(&visits)?), &contacts)?;
            rec.output(&contacts)?;
            Ok(())
        })?;

        let agent_dir = out_dir.join("agent");
        let sampling = mix(seed, 3);
        stages.run("table2", &sampling, &[contacts.clone()], &[("sampling", sampling)], |rec| {
            write_table2(&contacts, sampling, &agent_dir, rec).map(|_| ())
        })?;
        graph_files.extend(TABLE2.iter().map(|(name, _)| agent_dir.join(format!("{name}.tsv"))));
    }

    let mut missing = Vec::new();
    let mut real: Vec<&RealGraph> = Vec::new();
    if groups.contains(&FamilyGroup::Real) {
        for r in &cfg.real_graphs {
            if r.path.exists() {
                real.push(r);
            } else {
                eprintln!("warning: real graph {} not found at {}; excluding it", r.name, r.path.display());
                missing.push(r.name.clone());
            }
        }
    }

    let features = out_dir.join("features.csv");
    let opts = FeatureOptions {
        layout: cfg.features.layout,
        approx_threshold: cfg.features.approx_threshold,
        sample_sources: cfg.features.sample_sources,
        seed: mix(seed, 4),
        ..FeatureOptions::default()
    };
    let mut feature_inputs = with_sidecars(&graph_files);
    feature_inputs.extend(real.iter().map(|r| r.path.clone()));
    let real_settings: Vec<&RealGraph> = real.clone();
    stages.run(
        "features",
        &(&opts, &groups, &real_settings),
        &feature_inputs,
        &[("features", opts.seed)],
        |rec| {
            let mut graphs = Vec::new();
            for p in &graph_files {
                graphs.push(load_any(p, Family::RealWorld, false, None)?);
            }
            for r in &real {
                let loaded = synthgraph::graph::load_graph(&r.path, r.format, r.directed)
                    .with_context(|| format!("loading real graph {}", r.path.display()))?;
                graphs.push((synthgraph::GraphLabel::new(r.name.clone(), Family::RealWorld), loaded));
            }
            let (matrix, prov) = featurize(&graphs, &opts)?;
            write_features(&matrix, &prov, &features, rec)
        },
    )?;

    let analysis_opts = AnalysisOptions {
        k: cfg.analysis.k,
        seed: mix(seed, 5),
        restarts: cfg.analysis.restarts,
        standardize: cfg.analysis.standardize,
    };
    stages.run(
        "analysis",
        &analysis_opts,
        &[features.clone()],
        &[("kmeans", analysis_opts.seed)],
        |rec| write_analysis(&features, &analysis_opts, out_dir, rec).map(|_| ()),
    )?;
    let analysis: AnalysisResult = serde_json::from_str(&fs::read_to_string(out_dir.join("analysis.json"))?)?;

    let scatter = out_dir.join("scatter.csv");
    let svg = out_dir.join("scatter.svg");
    stages.run("plot", &"svg", &[scatter.clone()], &[], |rec| write_plot(&scatter, &svg, rec))?;

    Ok(PipelineReport {
        out_dir: out_dir.to_path_buf(),
        features,
        analysis,
        skipped_stages: stages.skipped,
        missing_real_graphs: missing,
    })
}
