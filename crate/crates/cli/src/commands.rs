//! One function per subcommand. Each returns the text printed on stdout;
//! files are written only to the configured output path(s).

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sparse_bayes::bayes_lasso::{acf, classical_lasso, run_chain_with, write_chain_csv, ChainConfig, LassoHyper};
use sparse_bayes::dataset::{assemble, load_songs, preprocess_song, read_dataset, write_dataset, Dataset, Split};
use sparse_bayes::distributions::Rng;
use sparse_bayes::evaluation::{interval_hits, r_squared, region_hits, rmse, MetricsReport, ReportTable};
use sparse_bayes::mard::CredibleRegion;
use sparse_bayes::recommender::{recommend, Catalog, CatalogItem, Ranking};
use sparse_bayes::{Error, Result};

use crate::bench::{run_synth_bench, BenchConfig};
use crate::config::{ModelKind, RankingKind, RunConfig};
use crate::model::{fit_model, predict_rows, training_rows, FittedModel, RowPrediction};
use crate::reference;

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Split requested on the command line, if any.
fn requested_split(cfg: &RunConfig, n: usize) -> Result<Option<Split>> {
    let seed = cfg.seed();
    match (cfg.train_count, cfg.train_fraction) {
        (Some(train), _) => {
            let test = cfg.test_count.unwrap_or(n.saturating_sub(train));
            Split::by_count(n, train, test, seed).map(Some)
        }
        (None, Some(f)) => Split::by_fraction(n, f, seed).map(Some),
        (None, None) => Ok(None),
    }
}

/// Loads the input dataset and applies a split from the flags, which
/// replaces any split stored with the data.
fn load_input(cfg: &RunConfig) -> Result<Dataset> {
    let data = read_dataset(cfg.require_input()?)?;
    match requested_split(cfg, data.n())? {
        Some(s) => data.with_split(s),
        None => Ok(data),
    }
}

pub fn cmd_preprocess(cfg: &RunConfig) -> Result<String> {
    let features_dir = cfg.features_dir.as_deref().ok_or_else(|| Error::Parameter("--features-dir is required".into()))?;
    let annotations = cfg.annotations.as_deref().ok_or_else(|| Error::Parameter("--annotations is required".into()))?;
    let output = cfg.require_output()?;
    let (names, songs) = load_songs(features_dir, annotations)?;
    let mut log = String::new();
    let mut summaries = Vec::with_capacity(songs.len());
    for song in &songs {
        let s = preprocess_song(song)?;
        if s.trailing_zeros > 0 {
            eprintln!("song {}: dropped {} trailing all-zero frames", s.song_id, s.trailing_zeros);
        }
        summaries.push(s);
    }
    let mut data = assemble(&summaries)?;
    data.feature_names = names;
    let components = match cfg.components {
        Some(0) => None,
        Some(k) => Some(k),
        None => Some(data.x.ncols().min(data.n())),
    };
    if let Some(k) = components {
        data = data.with_pca(Some(k))?;
    }
    if let Some(s) = requested_split(cfg, data.n())? {
        data = data.with_split(s)?;
    }
    write_dataset(output, &data)?;
    log += &format!("{} songs, {} features -> {}\n", data.n(), data.x.ncols(), output.display());
    Ok(log)
}

pub fn cmd_fit(cfg: &RunConfig) -> Result<String> {
    let kind = cfg.require_model()?;
    let output = cfg.require_output()?;
    let train = training_rows(&load_input(cfg)?)?;
    let model = fit_model(kind, &train, cfg)?;
    write_text(output, &model.to_json()?)?;
    Ok(format!("fitted {} on {} rows -> {}\n", kind.name(), train.n(), output.display()))
}

fn split_label(data: &Dataset, i: usize) -> &'static str {
    match &data.split {
        Some(s) if s.train_idx.binary_search(&i).is_ok() => "train",
        Some(s) if s.test_idx.binary_search(&i).is_ok() => "test",
        _ => "",
    }
}

/// `song_id, split, {r}, {r}_mean, {r}_lower, {r}_upper` for each response `r`.
pub fn predictions_csv(data: &Dataset, responses: &[String], preds: &[RowPrediction]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["song_id".to_string(), "split".to_string()];
    for r in responses {
        header.extend([r.clone(), format!("{r}_mean"), format!("{r}_lower"), format!("{r}_upper")]);
    }
    w.write_record(&header).map_err(Error::from)?;
    for (i, p) in preds.iter().enumerate() {
        let mut rec = vec![p.song_id.clone(), split_label(data, i).to_string()];
        for k in 0..responses.len() {
            rec.extend([data.y[(i, k)], p.mean[k], p.lower[k], p.upper[k]].iter().map(f64::to_string));
        }
        w.write_record(&rec).map_err(Error::from)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

fn read_model(cfg: &RunConfig) -> Result<FittedModel> {
    let path = cfg.fit.as_deref().ok_or_else(|| Error::Parameter("--fit (fitted model file) is required".into()))?;
    FittedModel::read(path)
}

pub fn cmd_predict(cfg: &RunConfig) -> Result<String> {
    let model = read_model(cfg)?;
    let output = cfg.require_output()?;
    let data = load_input(cfg)?;
    if data.response_names != model.response_names {
        return Err(Error::Dimension("dataset responses differ from the fitted model's".into()));
    }
    let level = cfg.level.map_or(Ok(model.level), |_| cfg.level())?;
    let preds = predict_rows(&model, &data.x, &data.song_ids, level, cfg.draws(), cfg.seed())?;
    write_text(output, &predictions_csv(&data, &model.response_names, &preds)?)?;
    Ok(format!("{} predictions -> {}\n", preds.len(), output.display()))
}

/// Metrics on `rows` of `data` given the matching predictions.
fn score(data: &Dataset, preds: &[RowPrediction], rows: &[usize]) -> Result<(Vec<f64>, Vec<f64>, Vec<usize>, Option<usize>)> {
    let m = data.y.ncols();
    let (mut r2, mut err, mut hits) = (Vec::new(), Vec::new(), Vec::new());
    for k in 0..m {
        let truth: Vec<f64> = rows.iter().map(|&i| data.y[(i, k)]).collect();
        let mean: Vec<f64> = rows.iter().map(|&i| preds[i].mean[k]).collect();
        let iv: Vec<(f64, f64)> = rows.iter().map(|&i| (preds[i].lower[k], preds[i].upper[k])).collect();
        r2.push(r_squared(&truth, &mean)?);
        err.push(rmse(&truth, &mean)?);
        hits.push(interval_hits(&truth, &iv)?);
    }
    let region = if m == 2 {
        let truth: Vec<[f64; 2]> = rows.iter().map(|&i| [data.y[(i, 0)], data.y[(i, 1)]]).collect();
        let regions: Vec<_> = rows.iter().map(|&i| preds[i].region().expect("two responses")).collect();
        Some(region_hits(&truth, &regions)?)
    } else {
        None
    };
    Ok((r2, err, hits, region))
}

/// Fits `kind` on the training rows and scores train and test rows.
pub fn evaluate_model(kind: ModelKind, data: &Dataset, cfg: &RunConfig) -> Result<MetricsReport> {
    let split = data.split.as_ref().ok_or_else(|| {
        Error::Parameter("evaluation needs a split: store one with the data or pass --train-count/--train-fraction".into())
    })?;
    let model = fit_model(kind, &data.select(&split.train_idx), cfg)?;
    let preds = predict_rows(&model, &data.x, &data.song_ids, cfg.level()?, cfg.draws(), cfg.seed())?;
    let (train_r2, _, _, _) = score(data, &preds, &split.train_idx)?;
    let (test_r2, rmse, interval_hits, region_hits) = score(data, &preds, &split.test_idx)?;
    let report = MetricsReport {
        model_name: kind.name().to_string(),
        response_names: data.response_names.clone(),
        train_r2,
        test_r2,
        rmse,
        interval_hits,
        region_hits: if kind == ModelKind::Mard || data.y.ncols() == 2 { region_hits } else { None },
        n_test: split.test_idx.len(),
    };
    report.validate()?;
    Ok(report)
}

/// Classical LASSO baseline: point predictions only.
pub fn evaluate_classical(data: &Dataset, lambda: f64) -> Result<MetricsReport> {
    let split = data.split.as_ref().ok_or_else(|| Error::Parameter("evaluation needs a split".into()))?;
    let train = data.select(&split.train_idx);
    let (mut train_r2, mut test_r2, mut errs) = (Vec::new(), Vec::new(), Vec::new());
    for k in 0..data.y.ncols() {
        let fit = classical_lasso(&train.x, &train.y.column(k).into_owned(), lambda)?;
        let pred = data.x.clone() * &fit.beta;
        let on = |rows: &[usize]| -> (Vec<f64>, Vec<f64>) {
            (rows.iter().map(|&i| data.y[(i, k)]).collect(), rows.iter().map(|&i| pred[i] + fit.beta0).collect())
        };
        let (t, p) = on(&split.train_idx);
        train_r2.push(r_squared(&t, &p)?);
        let (t, p) = on(&split.test_idx);
        test_r2.push(r_squared(&t, &p)?);
        errs.push(rmse(&t, &p)?);
    }
    Ok(MetricsReport {
        model_name: "classical-lasso".into(),
        response_names: data.response_names.clone(),
        train_r2,
        test_r2,
        rmse: errs,
        interval_hits: Vec::new(),
        region_hits: None,
        n_test: split.test_idx.len(),
    })
}

/// Scores a predictions CSV written by `predict`: rows labelled `test` if any
/// carry a label, all rows otherwise.
pub fn evaluate_predictions(path: &Path, name: &str) -> Result<MetricsReport> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let responses: Vec<String> = headers
        .iter()
        .filter_map(|h| h.strip_suffix("_mean").map(str::to_string))
        .collect();
    let col = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| Error::Parse(format!("{}: missing column {name}", path.display())))
    };
    let mut cols = Vec::new();
    for r in &responses {
        cols.push([col(r)?, col(&format!("{r}_mean"))?, col(&format!("{r}_lower"))?, col(&format!("{r}_upper"))?]);
    }
    let split_col = col("split").ok();
    let (mut labels, mut values) = (Vec::new(), Vec::new());
    for rec in rdr.records() {
        let rec = rec?;
        labels.push(split_col.map(|c| rec[c].to_string()).unwrap_or_default());
        let mut row = Vec::new();
        for c in &cols {
            for &j in c {
                row.push(rec[j].parse::<f64>().map_err(|_| Error::Parse(format!("{}: `{}` is not a number", path.display(), &rec[j])))?);
            }
        }
        values.push(row);
    }
    let any_test = labels.iter().any(|l| l == "test");
    let rows: Vec<usize> = (0..values.len()).filter(|&i| !any_test || labels[i] == "test").collect();
    if rows.is_empty() {
        return Err(Error::EmptyData(format!("{} has no rows", path.display())));
    }
    let (mut test_r2, mut errs, mut hits) = (Vec::new(), Vec::new(), Vec::new());
    for k in 0..responses.len() {
        let get = |i: usize, o: usize| values[i][4 * k + o];
        let truth: Vec<f64> = rows.iter().map(|&i| get(i, 0)).collect();
        let mean: Vec<f64> = rows.iter().map(|&i| get(i, 1)).collect();
        let iv: Vec<(f64, f64)> = rows.iter().map(|&i| (get(i, 2), get(i, 3))).collect();
        test_r2.push(r_squared(&truth, &mean)?);
        errs.push(rmse(&truth, &mean)?);
        hits.push(interval_hits(&truth, &iv)?);
    }
    let region = if responses.len() == 2 {
        let truth: Vec<[f64; 2]> = rows.iter().map(|&i| [values[i][0], values[i][4]]).collect();
        let regions: Vec<_> = rows.iter().map(|&i| [(values[i][2], values[i][3]), (values[i][6], values[i][7])]).collect();
        Some(region_hits(&truth, &regions)?)
    } else {
        None
    };
    let report = MetricsReport {
        model_name: name.to_string(),
        response_names: responses,
        train_r2: Vec::new(),
        test_r2,
        rmse: errs,
        interval_hits: hits,
        region_hits: region,
        n_test: rows.len(),
    };
    report.validate()?;
    Ok(report)
}

pub fn cmd_evaluate(cfg: &RunConfig) -> Result<String> {
    let reports = match &cfg.predictions {
        Some(path) => vec![evaluate_predictions(path, cfg.model.map_or("predictions", |m| m.name()))?],
        None => {
            let data = load_input(cfg)?;
            vec![evaluate_model(cfg.require_model()?, &data, cfg)?]
        }
    };
    if let Some(out) = &cfg.output {
        write_text(out, &(serde_json::to_string_pretty(&reports)? + "\n"))?;
    }
    Ok(ReportTable(&reports).to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recommendations {
    pub query: String,
    pub model: String,
    pub level: f64,
    pub region: CredibleRegion,
    pub items: Vec<CatalogItem>,
}

pub fn cmd_recommend(cfg: &RunConfig) -> Result<String> {
    let model = read_model(cfg)?;
    if model.response_names.len() != 2 {
        return Err(Error::Parameter("recommendation needs a model with two responses".into()));
    }
    let data = load_input(cfg)?;
    let song = cfg.song.as_deref().ok_or_else(|| Error::Parameter("--song is required".into()))?;
    let row = data
        .song_ids
        .iter()
        .position(|s| s == song)
        .ok_or_else(|| Error::Parameter(format!("song {song} is not in the input")))?;
    let catalog = match &cfg.catalog {
        Some(p) => Catalog::read_csv(p)?,
        None => Catalog::new(
            (0..data.n())
                .map(|i| CatalogItem { song_id: data.song_ids[i].clone(), arousal: data.y[(i, 0)], valence: data.y[(i, 1)] })
                .collect(),
        )?,
    };
    let level = cfg.level.map_or(Ok(model.level), |_| cfg.level())?;
    let x = data.x.rows(row, 1).into_owned();
    let pred = predict_rows(&model, &x, &data.song_ids[row..=row], level, cfg.draws(), cfg.seed())?;
    let [a, v] = pred[0].region().expect("two responses");
    let region = CredibleRegion { a_interval: a, v_interval: v };
    let ranking = match cfg.ranking.unwrap_or(RankingKind::Distance) {
        RankingKind::Distance => Ranking::Distance,
        RankingKind::Random => Ranking::Random { seed: cfg.seed() },
    };
    let items: Vec<CatalogItem> =
        recommend(&catalog, &region, cfg.k.unwrap_or(10), Some(song), ranking)?.into_iter().cloned().collect();
    let out = Recommendations { query: song.to_string(), model: model.kind().name().into(), level, region, items };
    let json = serde_json::to_string_pretty(&out)? + "\n";
    match &cfg.output {
        Some(p) => {
            write_text(p, &json)?;
            Ok(format!("{} recommendations -> {}\n", out.items.len(), p.display()))
        }
        None => Ok(json),
    }
}

pub fn bench_config(cfg: &RunConfig) -> Result<BenchConfig> {
    let d = BenchConfig::default();
    Ok(BenchConfig {
        sizes: cfg.sizes.clone().unwrap_or(d.sizes),
        features: cfg.features.unwrap_or(d.features),
        nonzero: cfg.nonzero.unwrap_or(d.nonzero),
        test_size: cfg.test_size.unwrap_or(d.test_size),
        noise_cov: if cfg.independent_noise.unwrap_or(false) { [1.0, 0.0, 0.0, 1.0] } else { d.noise_cov },
        level: cfg.level()?,
        draws: cfg.draws(),
        tol: cfg.tol(),
        max_iter: cfg.max_iter(),
        seed: cfg.seed(),
    })
}

pub fn cmd_synth_bench(cfg: &RunConfig) -> Result<String> {
    let report = run_synth_bench(&bench_config(cfg)?)?;
    if let Some(out) = &cfg.output {
        write_text(out, &(serde_json::to_string_pretty(&report)? + "\n"))?;
    }
    Ok(report.to_string())
}

fn acf_path(output: &Path) -> PathBuf {
    let stem = output.file_stem().and_then(|s| s.to_str()).unwrap_or("chain");
    output.with_file_name(format!("{stem}_acf.csv"))
}

/// Gibbs chain for one response as CSV, plus its autocorrelations next to it.
pub fn cmd_chain_export(cfg: &RunConfig) -> Result<String> {
    let output = cfg.require_output()?;
    let train = training_rows(&load_input(cfg)?)?;
    let k = match cfg.response.as_deref() {
        None => 0,
        Some(r) => match train.response_names.iter().position(|n| n == r) {
            Some(k) => k,
            None => r.parse::<usize>().ok().filter(|&k| k < train.y.ncols()).ok_or_else(|| {
                Error::Parameter(format!("unknown response {r}; choose one of {:?}", train.response_names))
            })?,
        },
    };
    let hyper = LassoHyper { a: cfg.a.unwrap_or(0.01), b: cfg.b.unwrap_or(0.01), c: cfg.c.unwrap_or(0.01), d: cfg.d.unwrap_or(0.01) };
    let chain_cfg = ChainConfig::new(cfg.iters.unwrap_or(10_000), cfg.burn_in.unwrap_or(1_000), cfg.thin.unwrap_or(1), cfg.seed());
    let chain = run_chain_with(&train.x, &train.y.column(k).into_owned(), &hyper, &chain_cfg, &mut Rng::new(cfg.seed()))?;
    let mut buf = Vec::new();
    write_chain_csv(&chain, &mut buf)?;
    write_text(output, &String::from_utf8(buf).map_err(|e| Error::Parse(e.to_string()))?)?;

    let max_lag = cfg.max_lag.unwrap_or(50).min(chain.draws.len().saturating_sub(1));
    let mut series: Vec<(String, Vec<f64>)> = vec![
        ("beta0".into(), chain.trace(|s| s.beta0)),
        ("sigma2".into(), chain.trace(|s| s.sigma2)),
        ("lambda".into(), chain.trace(|s| s.lambda)),
    ];
    for j in 0..chain.p() {
        series.push((format!("beta_{}", j + 1), chain.trace(|s| s.beta[j])));
    }
    let acfs = series.iter().map(|(_, xs)| acf(xs, max_lag)).collect::<Result<Vec<_>>>()?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["lag".to_string()];
    header.extend(series.iter().map(|(n, _)| n.clone()));
    w.write_record(&header)?;
    for lag in 0..=max_lag {
        let mut rec = vec![lag.to_string()];
        rec.extend(acfs.iter().map(|a| a[lag].to_string()));
        w.write_record(&rec)?;
    }
    let acf_out = acf_path(output);
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    write_text(&acf_out, &String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))?)?;
    Ok(format!("{} draws -> {}, autocorrelations -> {}\n", chain.draws.len(), output.display(), acf_out.display()))
}

/// Fits every model on a DEAM-layout dataset and prints the results next to
/// the reference ones. Informational only.
pub fn cmd_compare(cfg: &RunConfig) -> Result<String> {
    let mut data = read_dataset(cfg.require_input()?)?;
    if data.y.ncols() != 2 {
        return Err(Error::Parameter("compare expects arousal and valence responses".into()));
    }
    let split = match requested_split(cfg, data.n())? {
        Some(s) => s,
        None if data.split.is_some() => data.split.clone().expect("checked"),
        None if data.n() == reference::SONGS => {
            Split::by_count(data.n(), reference::TRAIN_SONGS, reference::TEST_SONGS, cfg.seed())?
        }
        None => Split::by_fraction(data.n(), 2.0 / 3.0, cfg.seed())?,
    };
    data = data.with_split(split)?;
    let mut reports = vec![evaluate_classical(&data, cfg.lambda.unwrap_or(1.0))?];
    for kind in [ModelKind::GibbsLasso, ModelKind::Ard, ModelKind::Mard] {
        match evaluate_model(kind, &data, cfg) {
            Ok(r) => reports.push(r),
            Err(e) => eprintln!("{}: {e}", kind.name()),
        }
    }
    if let Some(out) = &cfg.output {
        write_text(out, &(serde_json::to_string_pretty(&reports)? + "\n"))?;
    }
    Ok(format!("this run\n{}\nreference\n{}", ReportTable(&reports), reference::table()))
}
