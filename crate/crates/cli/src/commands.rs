use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use crisk::dataset::{generate_synthetic, load_csv, split, write_csv, Dataset, Nonlinearity, SplitSpec, SyntheticSpec};
use crisk::gbm::{fit_gbm, GbmConfig};
use crisk::lime::{explain, stability, weakness_probe, FeatureStats, LimeConfig, Perturbation, ProbeSpec, SeedPolicy};
use crisk::linear_models::{fit_glm, FitConfig, Link};
use crisk::metrics::{evaluate, gini_delta};
use crisk::model::Model;
use crisk::{parallel, Error, Result, SCHEMA_VERSION};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::args::*;
use crate::config::{ConfigFile, Flags};
use crate::documents::*;
use crate::plot;

/// Where a command reads and writes.
pub struct Context {
    pub base_dir: PathBuf,
    pub out_dir: PathBuf,
    pub config: ConfigFile,
    pub seed: Option<u64>,
}

/// What a command did, for the manifest and the console.
pub struct Outcome {
    pub config: Value,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub seed: Option<u64>,
    pub summary: String,
}

impl Context {
    pub fn input(&self, path: &Path) -> PathBuf {
        self.base_dir.join(path)
    }

    pub fn output(&self, path: &Path) -> PathBuf {
        self.out_dir.join(path)
    }

    fn seed_flags(&self) -> Flags {
        Flags::new().set("seed", self.seed)
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("configs serialize")
}

fn load(ctx: &Context, path: &Path, target: &str) -> Result<(PathBuf, Dataset)> {
    let p = ctx.input(path);
    let d = load_csv(&p, target)?;
    Ok((p, d))
}

fn save_csv(path: &Path, data: &Dataset, target: &str) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(data, target, BufWriter::new(file))
}

pub fn generate(ctx: &Context, a: &GenerateArgs) -> Result<Outcome> {
    let defaults = SyntheticSpec {
        n_rows: 56_311,
        n_features: 20,
        bad_rate_target: 0.03,
        nonlinearity: Nonlinearity::Linear,
        correlation: 0.0,
        seed: 0,
    };
    let shape = if a.nonlinear {
        Some(Nonlinearity::Nonlinear)
    } else if a.linear {
        Some(Nonlinearity::Linear)
    } else {
        None
    };
    let flags = ctx
        .seed_flags()
        .set("n_rows", a.rows)
        .set("n_features", a.features)
        .set("bad_rate_target", a.bad_rate)
        .set("correlation", a.correlation)
        .set("nonlinearity", shape);
    let spec: SyntheticSpec = ctx.config.resolve(&defaults, "synthetic", flags)?;
    let data = generate_synthetic(&spec)?;
    let out = ctx.output(&a.output);
    save_csv(&out, &data, &a.target.target)?;
    Ok(Outcome {
        config: to_value(&spec),
        inputs: vec![],
        outputs: vec![out.clone()],
        seed: Some(spec.seed),
        summary: format!(
            "wrote {} rows × {} features (bad rate {:.4}) to {}",
            data.n_rows(),
            data.n_features(),
            data.bad_rate(),
            out.display()
        ),
    })
}

pub fn split_cmd(ctx: &Context, a: &SplitArgs) -> Result<Outcome> {
    let flags = ctx
        .seed_flags()
        .set("train_fraction", a.train_fraction)
        .set("balance_check_tolerance", a.tolerance);
    let spec: SplitSpec = ctx.config.resolve(&SplitSpec::default(), "split", flags)?;
    let (input, data) = load(ctx, &a.data, &a.target.target)?;
    let (train, test) = split(&data, &spec)?;
    let (train_out, test_out) = (ctx.output(&a.train_output), ctx.output(&a.test_output));
    save_csv(&train_out, &train, &a.target.target)?;
    save_csv(&test_out, &test, &a.target.target)?;
    Ok(Outcome {
        config: to_value(&spec),
        inputs: vec![input],
        outputs: vec![train_out, test_out],
        seed: Some(spec.seed),
        summary: format!(
            "train {} rows (bad rate {:.4}), test {} rows (bad rate {:.4})",
            train.n_rows(),
            train.bad_rate(),
            test.n_rows(),
            test.bad_rate()
        ),
    })
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct GlmSettings {
    link: Link,
    #[serde(flatten)]
    fit: FitConfig,
}

pub fn train(ctx: &Context, cmd: &TrainCommand) -> Result<Outcome> {
    match cmd {
        TrainCommand::Glm(a) => {
            let defaults = GlmSettings { link: Link::Logit, fit: FitConfig::default() };
            let flags = Flags::new()
                .set("link", a.link)
                .set("max_iterations", a.max_iterations)
                .set("tolerance", a.tolerance);
            let settings: GlmSettings = ctx.config.resolve(&defaults, "glm", flags)?;
            let (input, data) = load(ctx, &a.data, &a.target.target)?;
            let model = fit_glm(&data, settings.link, &settings.fit)?;
            let summary = format!(
                "{} model: {} iterations, log-likelihood {:.6}",
                settings.link.name(),
                model.iterations,
                model.final_log_likelihood
            );
            let out = ctx.output(&a.output);
            Model::Glm(model).save(&out)?;
            Ok(Outcome { config: to_value(&settings), inputs: vec![input], outputs: vec![out], seed: None, summary })
        }
        TrainCommand::Gbm(a) => {
            let flags = ctx
                .seed_flags()
                .set("n_trees", a.trees)
                .set("max_depth", a.depth)
                .set("learning_rate", a.learning_rate)
                .set("min_samples_leaf", a.min_samples_leaf)
                .set("subsample_fraction", a.subsample);
            let config: GbmConfig = ctx.config.resolve(&GbmConfig::default(), "gbm", flags)?;
            let (input, data) = load(ctx, &a.data, &a.target.target)?;
            let model = fit_gbm(&data, &config)?;
            let summary = format!(
                "gbm: {} trees, training deviance {:.6} → {:.6}",
                model.trees.len(),
                model.train_deviance[0],
                model.train_deviance.last().copied().unwrap_or(f64::NAN)
            );
            let out = ctx.output(&a.output);
            Model::Gbm(model).save(&out)?;
            Ok(Outcome { config: to_value(&config), inputs: vec![input], outputs: vec![out], seed: Some(config.seed), summary })
        }
    }
}

fn check_columns(model: &Model, data: &Dataset) -> Result<()> {
    if model.feature_names() != data.feature_names() {
        return Err(Error::InvalidArgument(format!(
            "model features {:?} do not match data columns {:?}",
            model.feature_names(),
            data.feature_names()
        )));
    }
    Ok(())
}

pub fn evaluate_cmd(ctx: &Context, a: &EvaluateArgs) -> Result<Outcome> {
    let (data_path, data) = load(ctx, &a.data, &a.target.target)?;
    let mut inputs = vec![data_path];
    let mut models = Vec::new();
    let paths = std::iter::once(("A", &a.model_a)).chain(a.model_b.as_ref().map(|p| ("B", p)));
    for (label, path) in paths {
        let full = ctx.input(path);
        let model = Model::load(&full)?;
        check_columns(&model, &data)?;
        let scores = parallel::map_rows(data.features(), data.n_features(), |x| model.predict_pd(x))
            .into_iter()
            .collect::<Result<Vec<f64>>>()?;
        let report = evaluate(&scores, data.target())?;
        models.push(ModelEvaluation {
            label: label.into(),
            path: path.to_string_lossy().into_owned(),
            kind: model.kind().into(),
            report,
        });
        inputs.push(full);
    }
    let delta = (models.len() == 2).then(|| gini_delta(&models[0].report, &models[1].report));
    let mut summary: Vec<String> = models
        .iter()
        .map(|m| format!("model {} ({}): Gini {:.4}, AUC {:.4}", m.label, m.kind, m.report.gini, m.report.auc))
        .collect();
    if let Some(d) = delta {
        summary.push(format!("Gini delta (A − B): {d:+.2} points"));
    }
    let doc = EvaluationDocument {
        schema_version: SCHEMA_VERSION,
        kind: "evaluation".into(),
        data: a.data.to_string_lossy().into_owned(),
        models,
        gini_delta_points: delta,
    };
    let out = ctx.output(&a.output);
    write_json(&out, &doc)?;
    Ok(Outcome { config: Value::Null, inputs, outputs: vec![out], seed: None, summary: summary.join("\n") })
}

struct LimeSetup {
    model: Model,
    unit_id: String,
    unit: Vec<f64>,
    stats: FeatureStats,
    config: LimeConfig,
    inputs: Vec<PathBuf>,
}

fn lime_setup(ctx: &Context, a: &LimeArgs) -> Result<LimeSetup> {
    let model_path = ctx.input(&a.model);
    let model = Model::load(&model_path)?;
    let (data_path, data) = load(ctx, &a.data, &a.target.target)?;
    check_columns(&model, &data)?;
    if a.row >= data.n_rows() {
        return Err(Error::InvalidArgument(format!("row {} out of range ({} rows)", a.row, data.n_rows())));
    }
    let mut inputs = vec![model_path, data_path];
    let stats = match &a.stats_data {
        Some(p) => {
            let (sp, sd) = load(ctx, p, &a.target.target)?;
            check_columns(&model, &sd)?;
            inputs.push(sp);
            FeatureStats::from_dataset(&sd)
        }
        None => FeatureStats::from_dataset(&data),
    };
    let flags = ctx
        .seed_flags()
        .set("n_features_shown", a.top)
        .set("n_samples", a.samples)
        .set("kernel_width", a.kernel_width)
        .set("lambda", a.lambda)
        .set_if("perturbation", a.binned, Perturbation::QuartileBins);
    let config: LimeConfig = ctx.config.resolve(&LimeConfig::default(), "lime", flags)?;
    Ok(LimeSetup {
        model,
        unit_id: data.row_ids()[a.row].clone(),
        unit: data.row(a.row).to_vec(),
        stats,
        config,
        inputs,
    })
}

pub fn explain_cmd(ctx: &Context, a: &ExplainArgs) -> Result<Outcome> {
    let s = lime_setup(ctx, &a.lime)?;
    let e = explain(&s.model, &s.unit_id, &s.unit, &s.stats, &s.config)?;
    let summary = format!(
        "unit {}: black box {:.4}, surrogate {:.4}, R² {:.3}, intercept {:.4}, {} bars",
        e.unit_id,
        e.blackbox_prediction,
        e.surrogate_prediction,
        e.surrogate_r_squared,
        e.intercept,
        e.contributions.len()
    );
    let out = ctx.output(&a.output);
    write_json(&out, &ExplanationDocument::new(e))?;
    Ok(Outcome { config: to_value(&s.config), inputs: s.inputs, outputs: vec![out], seed: Some(s.config.seed), summary })
}

pub fn stability_cmd(ctx: &Context, a: &StabilityArgs) -> Result<Outcome> {
    let s = lime_setup(ctx, &a.lime)?;
    let policy = if a.fixed_seed { SeedPolicy::Fixed } else { SeedPolicy::Increment };
    let r = stability(&s.model, &s.unit_id, &s.unit, &s.stats, &s.config, a.runs, policy)?;
    let summary = format!(
        "unit {}: {} runs, top-{} overlap {:.3}, mean dispersion {:.3e}, {}",
        r.unit_id,
        r.runs,
        s.config.n_features_shown,
        r.topk_overlap,
        r.mean_dispersion(),
        if r.stable { "stable" } else { "unstable" }
    );
    let out = ctx.output(&a.output);
    write_json(&out, &StabilityDocument::new(r))?;
    let config = serde_json::json!({ "lime": s.config, "runs": a.runs, "seed_policy": policy });
    Ok(Outcome { config, inputs: s.inputs, outputs: vec![out], seed: Some(s.config.seed), summary })
}

pub fn probe_cmd(ctx: &Context, a: &ProbeArgs) -> Result<Outcome> {
    let flags = ctx
        .seed_flags()
        .set("n_rows", a.rows)
        .set("units", a.units)
        .set("runs", a.runs)
        .set("dims", a.dims.clone())
        .set("correlations", a.correlations.clone())
        .set("width_multipliers", a.widths.clone())
        .set("sweep_unit", a.sweep_unit)
        .set("base_dim", a.base_dim)
        .set("gbm", a.trees.map(|t| serde_json::json!({ "n_trees": t })))
        .set("lime", a.samples.map(|n| serde_json::json!({ "n_samples": n })));
    let spec: ProbeSpec = ctx.config.resolve(&ProbeSpec::default(), "probe", flags)?;
    let report = weakness_probe(a.scenario, &spec)?;
    let lines: Vec<String> = report
        .rows
        .iter()
        .map(|r| {
            let opt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.4}"));
            format!(
                "{} = {}: overlap {}, dispersion {}, mean |top| {}, R² {:.3}, slope {}",
                r.parameter,
                r.value,
                opt(r.overlap),
                opt(r.dispersion),
                opt(r.mean_abs_top_contribution),
                r.r_squared,
                opt(r.slope)
            )
        })
        .collect();
    let out = ctx.output(&a.output);
    write_json(&out, &ProbeDocument::new(report))?;
    Ok(Outcome { config: to_value(&spec), inputs: vec![], outputs: vec![out], seed: Some(spec.seed), summary: lines.join("\n") })
}

pub fn plot_cmd(ctx: &Context, a: &PlotArgs) -> Result<Outcome> {
    let input = ctx.input(&a.input);
    let doc: Value = read_json(&input)?;
    let svg = plot::render(&doc)?;
    let out = match &a.output {
        Some(p) => ctx.output(p),
        None => ctx.output(Path::new(input.with_extension("svg").file_name().unwrap_or_default())),
    };
    std::fs::write(&out, svg).map_err(|e| Error::io(&out, e))?;
    Ok(Outcome {
        config: Value::Null,
        inputs: vec![input],
        outputs: vec![out.clone()],
        seed: None,
        summary: format!("wrote {}", out.display()),
    })
}
