use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use hierosr::{
    classify_batch, build_hierarchy, compute_class_embeddings, fit_node_models, generate, io,
    open_set_split, ClassificationMode, ClassifierConfig, ClusteringConfig, ConstraintSet,
    Dataset, DistanceMetric, Linkage, MetricsReport, NodeModelSet, SynthConfig, UnseenSpec,
};

use crate::config::{resolve, resolve_required, ConfigFile};
use crate::{BuildArgs, ClassifyArgs, EvalArgs, ExportArgs, SplitArgs, SynthArgs, TrainArgs};

fn parse_metric(s: &str) -> Result<DistanceMetric> {
    match s {
        "euclidean" => Ok(DistanceMetric::Euclidean),
        "cosine" => Ok(DistanceMetric::Cosine),
        other => bail!("unknown metric {other:?} (expected euclidean or cosine)"),
    }
}

fn parse_linkage(s: &str) -> Result<Linkage> {
    match s {
        "single" => Ok(Linkage::Single),
        "complete" => Ok(Linkage::Complete),
        "average" => Ok(Linkage::Average),
        other => bail!("unknown linkage {other:?} (expected single, complete or average)"),
    }
}

fn parse_mode(s: &str) -> Result<ClassificationMode> {
    match s {
        "score" => Ok(ClassificationMode::ScoreBased),
        "traversal" => Ok(ClassificationMode::TraversalBased),
        other => bail!("unknown mode {other:?} (expected score or traversal)"),
    }
}

fn load_dataset(path: &Path) -> Result<Dataset> {
    io::load_embeddings_csv(path).with_context(|| format!("loading {}", path.display()))
}

fn load_trained_model(path: &Path) -> Result<(io::SavedModel, NodeModelSet)> {
    let saved = io::load_hierarchy(path).with_context(|| format!("loading {}", path.display()))?;
    let models = saved.models.clone().ok_or_else(|| {
        anyhow::anyhow!(
            "{} has no fitted node models; run `hierosr train` first",
            path.display()
        )
    })?;
    Ok((saved, models))
}

fn check_dimension(dataset: &Dataset, model_dimension: usize) -> Result<()> {
    if dataset.dimension() != model_dimension {
        bail!(
            "input dimension {} does not match model dimension {model_dimension}",
            dataset.dimension()
        );
    }
    Ok(())
}

pub fn synth(args: SynthArgs) -> Result<()> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let synth_config = SynthConfig {
        known_classes: resolve(args.classes, cfg.get_usize("classes")?, 8),
        unseen_classes: resolve(args.unseen, cfg.get_usize("unseen")?, 2),
        dims: resolve(args.dims, cfg.get_usize("dims")?, 16),
        samples_per_class: resolve(
            args.samples_per_class,
            cfg.get_usize("samples-per-class")?,
            50,
        ),
        noise_scale: resolve(args.noise_scale, cfg.get_f64("noise-scale")?, 0.1),
        step_scale: resolve(args.step_scale, cfg.get_f64("step-scale")?, 1.0),
        decay: resolve(args.decay, cfg.get_f64("decay")?, 0.55),
        seed: resolve(args.seed, cfg.get_u64("seed")?, 0),
    };
    let output = resolve_required(
        args.output,
        cfg.get_string("output")?.map(PathBuf::from),
        "output",
    )?;
    let truth = args.truth.or(cfg.get_string("truth")?.map(PathBuf::from));

    let out = generate(&synth_config)?;
    io::save_embeddings_csv(&output, &out.dataset)?;
    if let Some(truth_path) = &truth {
        io::save_truth(truth_path, &out.planted, &out.unseen_classes)?;
    }
    println!(
        "wrote {} samples of {} classes ({} unseen) to {}",
        out.dataset.len(),
        out.dataset.classes().len(),
        out.unseen_classes.len(),
        output.display()
    );
    Ok(())
}

pub fn split(args: SplitArgs) -> Result<()> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let input = resolve_required(
        args.input,
        cfg.get_string("input")?.map(PathBuf::from),
        "input",
    )?;
    let unseen_list = args.unseen.or(cfg.get_string("unseen")?);
    let unseen_count = args.unseen_count.or(cfg.get_usize("unseen-count")?);
    let spec = match (unseen_list, unseen_count) {
        (Some(list), None) => UnseenSpec::Explicit(
            list.split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect(),
        ),
        (None, Some(count)) => UnseenSpec::Count(count),
        (Some(_), Some(_)) => bail!("--unseen and --unseen-count are mutually exclusive"),
        (None, None) => bail!("one of --unseen or --unseen-count is required"),
    };
    let test_fraction = resolve(args.test_fraction, cfg.get_f64("test-fraction")?, 0.2);
    let seed = resolve(args.seed, cfg.get_u64("seed")?, 0);
    let train_output = resolve_required(
        args.train_output,
        cfg.get_string("train-output")?.map(PathBuf::from),
        "train-output",
    )?;
    let test_output = resolve_required(
        args.test_output,
        cfg.get_string("test-output")?.map(PathBuf::from),
        "test-output",
    )?;

    let dataset = load_dataset(&input)?;
    let (train, test) = open_set_split(&dataset, &spec, test_fraction, seed)?;
    io::save_embeddings_csv(&train_output, &train)?;
    io::save_embeddings_csv(&test_output, &test)?;
    println!(
        "train: {} samples / {} classes -> {}",
        train.len(),
        train.classes().len(),
        train_output.display()
    );
    println!(
        "test:  {} samples / {} classes -> {}",
        test.len(),
        test.classes().len(),
        test_output.display()
    );
    Ok(())
}

pub fn build(args: BuildArgs) -> Result<()> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let input = resolve_required(
        args.input,
        cfg.get_string("input")?.map(PathBuf::from),
        "input",
    )?;
    let metric = parse_metric(&resolve(
        args.metric,
        cfg.get_string("metric")?,
        "euclidean".to_string(),
    ))?;
    let linkage = parse_linkage(&resolve(
        args.linkage,
        cfg.get_string("linkage")?,
        "average".to_string(),
    ))?;
    let relax = if args.no_relax {
        false
    } else {
        cfg.get_bool("relax")?.unwrap_or(true)
    };
    let constraints_path = args
        .constraints
        .or(cfg.get_string("constraints")?.map(PathBuf::from));
    let output = resolve_required(
        args.output,
        cfg.get_string("output")?.map(PathBuf::from),
        "output",
    )?;

    let dataset = load_dataset(&input)?;
    let constraints = match &constraints_path {
        Some(path) => io::load_constraints(path)
            .with_context(|| format!("loading {}", path.display()))?,
        None => ConstraintSet::empty(),
    };
    let clustering = ClusteringConfig {
        distance_metric: metric,
        linkage,
        relax_constraints_when_stuck: relax,
    };
    let embeddings = compute_class_embeddings(&dataset)?;
    let (hierarchy, merge_log) = build_hierarchy(&embeddings, &constraints, &clustering)?;
    for warning in &merge_log.warnings {
        eprintln!("warning: {warning}");
    }
    let saved = io::SavedModel {
        dimension: dataset.dimension(),
        hierarchy,
        clustering,
        merge_log,
        models: None,
    };
    io::save_hierarchy(&output, &saved)?;
    println!(
        "built hierarchy over {} classes ({} nodes) -> {}",
        saved.hierarchy.classes().count(),
        saved.hierarchy.len(),
        output.display()
    );
    Ok(())
}

pub fn train(args: TrainArgs) -> Result<()> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let input = resolve_required(
        args.input,
        cfg.get_string("input")?.map(PathBuf::from),
        "input",
    )?;
    let model_path = resolve_required(
        args.model,
        cfg.get_string("model")?.map(PathBuf::from),
        "model",
    )?;
    let percentile = resolve(args.percentile, cfg.get_f64("percentile")?, 95.0);
    let output = args
        .output
        .or(cfg.get_string("output")?.map(PathBuf::from))
        .unwrap_or_else(|| model_path.clone());

    let mut saved = io::load_hierarchy(&model_path)
        .with_context(|| format!("loading {}", model_path.display()))?;
    let dataset = load_dataset(&input)?;
    check_dimension(&dataset, saved.dimension)?;
    let models = fit_node_models(&saved.hierarchy, &dataset, percentile)?;
    saved.models = Some(models);
    io::save_hierarchy(&output, &saved)?;
    println!(
        "fitted models for {} nodes at percentile {percentile} -> {}",
        saved.hierarchy.len(),
        output.display()
    );
    Ok(())
}

fn classifier_config(
    mode: Option<String>,
    depth_bonus: Option<f64>,
    cfg: &ConfigFile,
) -> Result<ClassifierConfig> {
    Ok(ClassifierConfig {
        mode: parse_mode(&resolve(mode, cfg.get_string("mode")?, "score".to_string()))?,
        depth_bonus: resolve(depth_bonus, cfg.get_f64("depth-bonus")?, 0.0),
    })
}

pub fn classify(args: ClassifyArgs) -> Result<()> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let input = resolve_required(
        args.input,
        cfg.get_string("input")?.map(PathBuf::from),
        "input",
    )?;
    let model_path = resolve_required(
        args.model,
        cfg.get_string("model")?.map(PathBuf::from),
        "model",
    )?;
    let output = resolve_required(
        args.output,
        cfg.get_string("output")?.map(PathBuf::from),
        "output",
    )?;
    let config = classifier_config(args.mode, args.depth_bonus, &cfg)?;

    let (saved, models) = load_trained_model(&model_path)?;
    let dataset = load_dataset(&input)?;
    check_dimension(&dataset, saved.dimension)?;
    let results = classify_batch(dataset.samples(), &saved.hierarchy, &models, &config)?;
    io::save_predictions_csv(&output, &results, &saved.hierarchy)?;
    println!("classified {} samples -> {}", results.len(), output.display());
    Ok(())
}

pub fn eval(args: EvalArgs) -> Result<()> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let input = resolve_required(
        args.input,
        cfg.get_string("input")?.map(PathBuf::from),
        "input",
    )?;
    let model_path = resolve_required(
        args.model,
        cfg.get_string("model")?.map(PathBuf::from),
        "model",
    )?;
    let output = resolve_required(
        args.output,
        cfg.get_string("output")?.map(PathBuf::from),
        "output",
    )?;
    let format: io::ReportFormat = resolve(args.format, cfg.get_string("format")?, "json".to_string())
        .parse()?;
    let config = classifier_config(args.mode, args.depth_bonus, &cfg)?;

    let (saved, models) = load_trained_model(&model_path)?;
    let dataset = load_dataset(&input)?;
    check_dimension(&dataset, saved.dimension)?;
    let results = classify_batch(dataset.samples(), &saved.hierarchy, &models, &config)?;
    let report = MetricsReport::compute(&results, &saved.hierarchy)?;
    io::write_report(&report, format, &output)?;
    print!("{}", io::render_report_text(&report));
    println!("report -> {}", output.display());
    Ok(())
}

pub fn export(args: ExportArgs) -> Result<()> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let model_path = resolve_required(
        args.model,
        cfg.get_string("model")?.map(PathBuf::from),
        "model",
    )?;
    let format = resolve(args.format, cfg.get_string("format")?, "dot".to_string());
    let output = resolve_required(
        args.output,
        cfg.get_string("output")?.map(PathBuf::from),
        "output",
    )?;
    let annotate = args.annotate.or(cfg.get_string("annotate")?.map(PathBuf::from));

    let saved = io::load_hierarchy(&model_path)
        .with_context(|| format!("loading {}", model_path.display()))?;
    let text = match format.as_str() {
        "dot" => {
            let annotations = match &annotate {
                Some(report_path) => {
                    let report: MetricsReport = serde_json::from_str(
                        &std::fs::read_to_string(report_path)
                            .with_context(|| format!("reading {}", report_path.display()))?,
                    )?;
                    let mut notes: BTreeMap<usize, String> = BTreeMap::new();
                    for (class, entry) in &report.per_class_ccc {
                        let note = format!("ccc({class})={:.3}", entry.ccc);
                        notes
                            .entry(entry.best_node)
                            .and_modify(|n| {
                                n.push_str("\\n");
                                n.push_str(&note);
                            })
                            .or_insert(note);
                    }
                    Some(notes)
                }
                None => None,
            };
            io::export_dot(&saved.hierarchy, annotations.as_ref())
        }
        "newick" => io::export_newick(&saved.hierarchy),
        other => bail!("unknown export format {other:?} (expected dot or newick)"),
    };
    std::fs::write(&output, text)?;
    println!("exported {format} -> {}", output.display());
    Ok(())
}
