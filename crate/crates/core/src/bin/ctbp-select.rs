//! Batch command line for dataset generation, features, training and
//! classification.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ctbp_select::dynamic::{corner_correlations, delta_matrices, CohortSpec, DynamicFeatureMatrix};
use ctbp_select::engine::GrowthRecord;
use ctbp_select::gbdt::{evaluate, permutation_importance, FeatureTable, GbdtModel, TrainConfig};
use ctbp_select::model::{check_supercritical, BatchRate, ModelClass, ModelConfig, ModelConfigJson, OutDegreePmf};
use ctbp_select::pipeline::{self, DatasetManifest, FeatureSet, RunSpec, SplitFile, TrainOptions};
use ctbp_select::{Error, Result};

#[derive(Parser)]
#[command(name = "ctbp-select", version, about = "Model selection for growing networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct FeatureArgs {
    /// Feature families: static, dynamic or both.
    #[arg(long, default_value = "dynamic")]
    features: String,
    /// Cohort specs for dynamic features.
    #[arg(long, default_value = "time:10x10")]
    cohorts: String,
}

impl FeatureArgs {
    fn feature_set(&self) -> Result<FeatureSet> {
        FeatureSet::from_cli(&self.features, &parse_cohorts(&self.cohorts)?)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a labeled dataset of synthetic networks.
    Generate {
        #[arg(long, default_value = "all")]
        classes: String,
        #[arg(long, default_value_t = 120)]
        per_class: usize,
        #[arg(long, default_value_t = 5000)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        max_attempts: u32,
        /// Out-degree distribution as `m,p` CSV; the shipped one by default.
        #[arg(long)]
        pmf: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads, 0 for one per core.
        #[arg(long, default_value_t = 0)]
        workers: usize,
        #[arg(long, default_value = "time:10x10,size:10x10")]
        cohorts: String,
        /// `undivided` or `divided` sharing of a batch's rate.
        #[arg(long, default_value = "undivided")]
        batch_rate: String,
        #[arg(long)]
        gzip: bool,
    },
    /// Compute feature tables for a generated dataset.
    Features {
        /// Dataset directory holding manifest.json.
        #[arg(long)]
        dataset: PathBuf,
        /// Output directory, `<dataset>/features` by default.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "static,dynamic")]
        features: String,
        /// Cohort specs; the dataset's own by default.
        #[arg(long)]
        cohorts: Option<String>,
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
    /// Split, cross-validate, train and evaluate on a feature table.
    Train {
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.2)]
        test_fraction: f64,
        /// Cross-validation folds, 0 to train the default configuration.
        #[arg(long, default_value_t = 5)]
        cv_folds: usize,
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
    /// Evaluate a model on a table, optionally restricted to a split's test ids.
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        split: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 10)]
        importance_repeats: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Class probabilities for one network.
    Classify {
        #[arg(long)]
        model: PathBuf,
        /// Record directory written by `generate` or `ingest`.
        #[arg(long, conflicts_with = "edges")]
        network: Option<PathBuf>,
        /// Edge list `time,source,target`.
        #[arg(long)]
        edges: Option<PathBuf>,
        /// Vertex list `vertex_id,birth_time`.
        #[arg(long, requires = "edges")]
        vertices: Option<PathBuf>,
        #[command(flatten)]
        features: FeatureArgs,
    },
    /// Supercriticality of a configuration.
    CheckSupercritical {
        #[arg(long, conflicts_with = "config")]
        class: Option<String>,
        /// `name=value`, repeatable.
        #[arg(long = "param")]
        params: Vec<String>,
        /// Configuration JSON, as stored in a manifest.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Convert a timestamped edge list into a record directory.
    Ingest {
        #[arg(long)]
        edges: PathBuf,
        #[arg(long)]
        vertices: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Class-mean, delta and corner-correlation grids from a dynamic table.
    Report {
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_cohorts(text: &str) -> Result<Vec<CohortSpec>> {
    text.split(',').map(str::trim).filter(|s| !s.is_empty()).map(CohortSpec::parse).collect()
}

fn parse_classes(text: &str) -> Result<Vec<ModelClass>> {
    if text.trim() == "all" {
        return Ok(ModelClass::ALL.to_vec());
    }
    text.split(',')
        .map(|s| s.trim().parse::<ModelClass>().map_err(|_| Error::InvalidArgument(format!("unknown class {s:?}"))))
        .collect()
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(value)?).map_err(|e| Error::Io { path: path.into(), source: e })
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io { path: path.into(), source: e })
}

/// `mode,s,r` of the first data row of a dynamic feature table.
fn table_cohort(path: &Path) -> Result<CohortSpec> {
    let text = read_text(path)?;
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(Error::Csv)?.clone();
    let col = |n: &str| headers.iter().position(|h| h == n).ok_or_else(|| Error::Data(format!("{} has no {n} column", path.display())));
    let (m, s, r) = (col("mode")?, col("s")?, col("r")?);
    let row = rdr.records().next().ok_or_else(|| Error::Data("empty table".into()))?.map_err(Error::Csv)?;
    CohortSpec::parse(&format!("{}:{}x{}", &row[m], &row[s], &row[r]))
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Generate { classes, per_class, size, seed, max_attempts, pmf, out, workers, cohorts, batch_rate, gzip } => {
            let batch_rate = match batch_rate.as_str() {
                "undivided" => BatchRate::Undivided,
                "divided" => BatchRate::Divided,
                other => return Err(Error::InvalidArgument(format!("unknown batch rate {other:?}"))),
            };
            let spec = RunSpec {
                classes: parse_classes(&classes)?,
                networks_per_class: per_class,
                target_size: size,
                master_seed: seed,
                max_attempts,
                outdeg_pmf: pmf,
                cohorts: parse_cohorts(&cohorts)?,
                batch_rate,
                gzip,
                out_dir: out.clone(),
                workers,
            };
            let manifest = pipeline::generate_dataset(&spec)?;
            println!(
                "{} networks written to {}, {} configurations dropped",
                manifest.entries.len(),
                out.display(),
                manifest.dropped.len()
            );
            if manifest.entries.is_empty() {
                return Ok(ExitCode::from(3));
            }
        }
        Command::Features { dataset, out, features, cohorts, workers } => {
            let manifest = DatasetManifest::read(&dataset)?;
            let cohorts = match cohorts {
                Some(c) => parse_cohorts(&c)?,
                None => manifest.run.cohorts.clone(),
            };
            let set = FeatureSet::from_cli(&features, &cohorts)?;
            let extracted = pipeline::extract_features(&manifest, &dataset, &set.families, workers)?;
            let out = out.unwrap_or_else(|| dataset.join("features"));
            for p in extracted.write(&out)? {
                println!("{}", p.display());
            }
            if !extracted.skipped.is_empty() {
                eprintln!("{} networks skipped", extracted.skipped.len());
            }
        }
        Command::Train { table, out, seed, test_fraction, cv_folds, workers } => {
            let table = FeatureTable::read_csv(&table)?;
            let options = TrainOptions {
                test_fraction,
                cv_folds: (cv_folds > 0).then_some(cv_folds),
                base: TrainConfig::default(),
                seed,
            };
            let outcome = pipeline_pool(workers)?.install(|| pipeline::train_and_evaluate(&table, &options))?;
            std::fs::create_dir_all(&out).map_err(|e| Error::Io { path: out.clone(), source: e })?;
            outcome.model.save(&out.join("model.json"))?;
            write_json(&out.join("split.json"), &outcome.split)?;
            if let Some(cv) = &outcome.cv {
                write_json(&out.join("cv.json"), cv)?;
            }
            if let Some(report) = &outcome.test_report {
                pipeline::write_eval_report(report, None, &out)?;
                println!("held-out accuracy {:.4}", report.accuracy);
            }
        }
        Command::Evaluate { model, table, split, out, importance_repeats, seed } => {
            let model = GbdtModel::load(&model)?;
            let mut table = FeatureTable::read_csv(&table)?;
            if let Some(split) = split {
                let split: SplitFile = serde_json::from_str(&read_text(&split)?)?;
                let index = table.index_by_id();
                let rows: Vec<usize> = split
                    .test
                    .iter()
                    .map(|id| index.get(id.as_str()).copied().ok_or_else(|| Error::Data(format!("{id} not in table"))))
                    .collect::<Result<_>>()?;
                table = table.subset(&rows);
            }
            let report = evaluate(&model, &table)?;
            let importance = permutation_importance(&model, &table, importance_repeats, seed)?;
            pipeline::write_eval_report(&report, Some((table.columns(), &importance)), &out)?;
            println!("accuracy {:.4} on {} rows", report.accuracy, table.len());
        }
        Command::Classify { model, network, edges, vertices, features } => {
            let model = GbdtModel::load(&model)?;
            let (record, name) = match (network, edges) {
                (Some(dir), _) => (GrowthRecord::read_dir(&dir)?, dir.display().to_string()),
                (None, Some(e)) => {
                    let ingested = pipeline::ingest_files(&e, vertices.as_deref())?;
                    (ingested.record, e.display().to_string())
                }
                (None, None) => return Err(Error::InvalidArgument("give --network or --edges".into())),
            };
            let report = pipeline::classify_network(&model, &record, &features.feature_set()?, &name)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::CheckSupercritical { class, params, config } => {
            let config = match (class, config) {
                (_, Some(path)) => {
                    let json: ModelConfigJson = serde_json::from_str(&read_text(&path)?)?;
                    ModelConfig::from_json(&json, path.parent().unwrap_or(Path::new(".")))?
                }
                (Some(class), None) => {
                    let class: ModelClass =
                        class.parse().map_err(|_| Error::InvalidArgument(format!("unknown class {class:?}")))?;
                    let mut map = BTreeMap::new();
                    for p in &params {
                        let (k, v) = p
                            .split_once('=')
                            .ok_or_else(|| Error::InvalidArgument(format!("--param {p:?} must be name=value")))?;
                        let v: f64 = v.parse().map_err(|_| Error::InvalidArgument(format!("bad value in {p:?}")))?;
                        map.insert(k.to_string(), v);
                    }
                    ModelConfig::from_params(class, &map, OutDegreePmf::default_shared())?
                }
                (None, None) => return Err(Error::InvalidArgument("give --class or --config".into())),
            };
            let report = check_supercritical(&config);
            println!(
                "class {}: condition value {}, supercritical {}, collapsed conservative value {:.6}",
                config.class(),
                report.condition_value,
                report.is_supercritical,
                report.collapsed_conservative_value
            );
        }
        Command::Ingest { edges, vertices, out } => {
            let ingested = pipeline::ingest_files(&edges, vertices.as_deref())?;
            ingested.record.write_dir(&out, false)?;
            let mut labels = String::from("id,label\n");
            for (i, l) in ingested.labels.iter().enumerate() {
                labels.push_str(&format!("{i},{l}\n"));
            }
            std::fs::write(out.join("labels.csv"), labels).map_err(|e| Error::Io { path: out.clone(), source: e })?;
            println!(
                "{} vertices, {} edges, {} rows rejected",
                ingested.record.num_vertices(),
                ingested.record.num_edges(),
                ingested.rejected.len()
            );
        }
        Command::Report { table, out } => {
            let spec = table_cohort(&table)?;
            let table = FeatureTable::read_csv(&table)?;
            let means = pipeline::class_mean_matrices(&table)?;
            std::fs::create_dir_all(&out).map_err(|e| Error::Io { path: out.clone(), source: e })?;
            for (class, m) in &means {
                pipeline::write_matrix_csv(&out.join(format!("mean_{}.csv", class.name())), m, spec.s, spec.r)?;
            }
            pipeline::write_delta_matrices(&delta_matrices(&means)?, &spec, &out)?;
            let dfms: Vec<DynamicFeatureMatrix> = table
                .rows()
                .iter()
                .map(|r| DynamicFeatureMatrix { values: r.features.clone(), spec, normalization: Some(1.0) })
                .collect();
            pipeline::write_corner_correlations(&corner_correlations(&dfms)?, &spec, &out)?;
            println!("report written to {}", out.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn pipeline_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidArgument(e.to_string()))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::InvalidArgument(_) => 1,
                Error::AllExtinct { .. } => 3,
                _ => 2,
            })
        }
    }
}
