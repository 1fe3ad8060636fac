use std::fmt::Write as _;
use std::io::Read;
use std::path::{Path, PathBuf};

use topicforge_core::corpus::Vocabulary;
use topicforge_core::ingest::{self, load_troll_csv, split_train_test, Diagnostics, LabeledDoc, Polarity};
use topicforge_core::lda::{lda_train, LdaHyper, LdaModel, LdaModelFile};
use topicforge_core::pipeline::{
    build_corpus, encode_with, preprocess_all, troll_documents, PreparedCorpus, VocabOptions,
};
use topicforge_core::sentiment::{evaluate, most_informative, ClassifierKind, EnsembleModel, SgdConfig};
use topicforge_core::slda::{mae, slda_train, train_log_csv, SldaModel, SldaModelFile};

use crate::config::{Command, RunConfig};
use crate::CliError;

pub const MODEL_FILE: &str = "model.json";
pub const VOCAB_FILE: &str = "vocab.json";
pub const CORPUS_FILE: &str = "corpus.tsv";
pub const TOPICS_FILE: &str = "topics.tsv";
pub const ETA_FILE: &str = "eta_report.tsv";
pub const TRAIN_LOG_FILE: &str = "train_log.csv";
pub const METRICS_FILE: &str = "metrics.csv";
pub const PREDICTIONS_FILE: &str = "predictions.tsv";
pub const REPORT_FILE: &str = "report.tsv";

pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    match cfg.command {
        Command::Preprocess => cmd_preprocess(cfg),
        Command::LdaTrain => cmd_lda_train(cfg),
        Command::LdaTopics => cmd_lda_topics(cfg),
        Command::SldaTrain => cmd_slda_train(cfg),
        Command::SldaEval => cmd_slda_eval(cfg),
        Command::SldaPredict => cmd_slda_predict(cfg),
        Command::SentiTrain => cmd_senti_train(cfg),
        Command::SentiClassify => cmd_senti_classify(cfg),
        Command::Report => cmd_report(cfg),
    }
}

fn write_out(cfg: &RunConfig, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(&cfg.out).map_err(|e| topicforge_core::Error::io(&cfg.out, e))?;
    let path = cfg.out.join(name);
    std::fs::write(&path, contents).map_err(|e| topicforge_core::Error::io(&path, e))?;
    eprintln!("wrote {}", path.display());
    Ok(path)
}

fn read_text(path: &Path) -> Result<String, CliError> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| topicforge_core::Error::io(path, e))?;
        return Ok(s);
    }
    Ok(std::fs::read_to_string(path).map_err(|e| topicforge_core::Error::io(path, e))?)
}

fn vocab_opts(cfg: &RunConfig) -> VocabOptions {
    VocabOptions {
        no_below: cfg.no_below,
        no_above: cfg.no_above,
        keep_n: cfg.keep_n,
        tfidf: cfg.tfidf,
    }
}

fn hyper(cfg: &RunConfig) -> Result<LdaHyper, CliError> {
    Ok(LdaHyper::new(cfg.topics, cfg.alpha, cfg.beta)?)
}

fn load_troll_docs(cfg: &RunConfig, diag: &mut Diagnostics) -> Result<Vec<LabeledDoc>, CliError> {
    let mut records = Vec::new();
    for path in &cfg.inputs {
        records.extend(load_troll_csv(path)?);
    }
    let docs = troll_documents(records, cfg.year, diag)?;
    if docs.is_empty() {
        return Err(CliError::Runtime(
            "no English left/right documents left after filtering".into(),
        ));
    }
    Ok(docs)
}

fn prepare(cfg: &RunConfig, docs: &[LabeledDoc], diag: &mut Diagnostics) -> Result<PreparedCorpus, CliError> {
    let prepared = build_corpus(docs, &vocab_opts(cfg), diag)?;
    if prepared.corpus.num_docs() == 0 {
        return Err(CliError::Runtime(
            "vocabulary filtering removed every document; lower --no-below or raise --no-above".into(),
        ));
    }
    Ok(prepared)
}

fn vocab_path(cfg: &RunConfig, model: &Path) -> PathBuf {
    cfg.vocab
        .clone()
        .unwrap_or_else(|| model.parent().unwrap_or_else(|| Path::new(".")).join(VOCAB_FILE))
}

fn load_vocab(path: &Path) -> Result<Vocabulary, CliError> {
    Ok(Vocabulary::from_json(&read_text(path)?)?)
}

fn cmd_preprocess(cfg: &RunConfig) -> Result<(), CliError> {
    let mut diag = Diagnostics::default();
    let docs = load_troll_docs(cfg, &mut diag)?;
    let prepared = prepare(cfg, &docs, &mut diag)?;
    diag.emit();

    let mut out = String::from("doc_id\ty\tterms\n");
    for (i, &src) in prepared.kept.iter().enumerate() {
        let terms: Vec<&str> = docs[src]
            .terms
            .iter()
            .filter(|t| prepared.vocab.id(t).is_some())
            .map(String::as_str)
            .collect();
        writeln!(out, "{i}\t{}\t{}", docs[src].y, terms.join(" ")).unwrap();
    }
    write_out(cfg, CORPUS_FILE, &out)?;
    write_out(cfg, VOCAB_FILE, &prepared.vocab.to_json()?)?;
    Ok(())
}

fn cmd_lda_train(cfg: &RunConfig) -> Result<(), CliError> {
    let mut diag = Diagnostics::default();
    let docs = load_troll_docs(cfg, &mut diag)?;
    let prepared = prepare(cfg, &docs, &mut diag)?;
    diag.emit();

    let (model, trace) = lda_train(&prepared.corpus, hyper(cfg)?, cfg.iters, cfg.seed)?;
    let mut log = String::from("sweep,log_likelihood\n");
    writeln!(log, "0,{:.6}", trace.initial).unwrap();
    for (i, ll) in trace.sweeps.iter().enumerate() {
        writeln!(log, "{},{ll:.6}", i + 1).unwrap();
    }
    write_out(cfg, MODEL_FILE, &serde_json::to_string(&model.to_file(cfg.save_state))?)?;
    write_out(cfg, VOCAB_FILE, &prepared.vocab.to_json()?)?;
    write_out(
        cfg,
        TOPICS_FILE,
        &model.topic_report(&prepared.vocab, cfg.top_n)?.to_tsv(),
    )?;
    write_out(cfg, TRAIN_LOG_FILE, &log)?;
    Ok(())
}

fn cmd_lda_topics(cfg: &RunConfig) -> Result<(), CliError> {
    let path = &cfg.inputs[0];
    let file: LdaModelFile = serde_json::from_str(&read_text(path)?)?;
    let model = LdaModel::from_file(&file)?;
    let vocab = load_vocab(&vocab_path(cfg, path))?;
    write_out(cfg, TOPICS_FILE, &model.topic_report(&vocab, cfg.top_n)?.to_tsv())?;
    Ok(())
}

fn write_slda_outputs(
    cfg: &RunConfig,
    model: &SldaModel,
    vocab: &Vocabulary,
    log: &[topicforge_core::slda::EmRecord],
) -> Result<(), CliError> {
    write_out(cfg, MODEL_FILE, &serde_json::to_string(&model.to_file(cfg.save_state))?)?;
    write_out(cfg, VOCAB_FILE, &vocab.to_json()?)?;
    write_out(cfg, TOPICS_FILE, &model.base.topic_report(vocab, cfg.top_n)?.to_tsv())?;
    write_out(cfg, ETA_FILE, &model.eta_report(vocab, cfg.top_n)?.to_tsv())?;
    write_out(cfg, TRAIN_LOG_FILE, &train_log_csv(log))?;
    Ok(())
}

fn cmd_slda_train(cfg: &RunConfig) -> Result<(), CliError> {
    let mut diag = Diagnostics::default();
    let docs = load_troll_docs(cfg, &mut diag)?;
    let prepared = prepare(cfg, &docs, &mut diag)?;
    diag.emit();

    let (model, log) = slda_train(
        &prepared.corpus,
        &prepared.ys,
        hyper(cfg)?,
        cfg.sigma2,
        cfg.iters,
        cfg.seed,
    )?;
    write_slda_outputs(cfg, &model, &prepared.vocab, &log)
}

/// `doc_id<TAB>y<TAB>prediction` rows and the `metric,value` table.
fn regression_outputs(preds: &[f64], ys: &[f64], baseline: Option<f64>) -> Result<(String, String), CliError> {
    let mut table = String::from("doc_id\ty\tprediction\n");
    for (i, (p, y)) in preds.iter().zip(ys).enumerate() {
        writeln!(table, "{i}\t{y}\t{p:.6}").unwrap();
    }
    let agree = preds.iter().zip(ys).filter(|(p, y)| p.signum() == y.signum()).count();
    let mut metrics = String::from("metric,value\n");
    writeln!(metrics, "mae,{:.6}", mae(preds, ys)?).unwrap();
    if let Some(mean) = baseline {
        writeln!(metrics, "baseline_mae,{:.6}", mae(&vec![mean; ys.len()], ys)?).unwrap();
    }
    writeln!(metrics, "sign_agreement,{:.6}", agree as f64 / ys.len() as f64).unwrap();
    writeln!(metrics, "documents,{}", ys.len()).unwrap();
    Ok((table, metrics))
}

fn cmd_slda_eval(cfg: &RunConfig) -> Result<(), CliError> {
    let mut diag = Diagnostics::default();
    let docs = load_troll_docs(cfg, &mut diag)?;
    let (train, test) = split_train_test(docs, cfg.train_frac, cfg.seed)?;
    if test.is_empty() {
        return Err(CliError::Runtime("held-out split is empty".into()));
    }
    let prepared = prepare(cfg, &train, &mut diag)?;
    let (test_bows, kept) = encode_with(&prepared.vocab, &test, cfg.tfidf)?;
    for _ in kept.len()..test.len() {
        diag.skip("held-out document has no known terms");
    }
    diag.emit();
    if test_bows.is_empty() {
        return Err(CliError::Runtime(
            "no held-out document shares terms with the training vocabulary".into(),
        ));
    }

    let (model, log) = slda_train(
        &prepared.corpus,
        &prepared.ys,
        hyper(cfg)?,
        cfg.sigma2,
        cfg.iters,
        cfg.seed,
    )?;
    write_slda_outputs(cfg, &model, &prepared.vocab, &log)?;

    let preds = model.predict_all(&test_bows, cfg.iters, cfg.seed)?;
    let ys: Vec<f64> = kept.iter().map(|&i| test[i].y).collect();
    let mean = prepared.ys.iter().sum::<f64>() / prepared.ys.len() as f64;
    let (table, metrics) = regression_outputs(&preds, &ys, Some(mean))?;
    write_out(cfg, PREDICTIONS_FILE, &table)?;
    write_out(cfg, METRICS_FILE, &metrics)?;
    Ok(())
}

fn cmd_slda_predict(cfg: &RunConfig) -> Result<(), CliError> {
    let model_path = cfg.model.as_ref().expect("validated");
    let file: SldaModelFile = serde_json::from_str(&read_text(model_path)?)?;
    let model = SldaModel::from_file(&file)?;
    let vocab = load_vocab(&vocab_path(cfg, model_path))?;

    let mut diag = Diagnostics::default();
    let docs = load_troll_docs(cfg, &mut diag)?;
    let (bows, kept) = encode_with(&vocab, &docs, cfg.tfidf)?;
    for _ in kept.len()..docs.len() {
        diag.skip("document has no known terms");
    }
    diag.emit();
    if bows.is_empty() {
        return Err(CliError::Runtime(
            "no document shares terms with the model vocabulary".into(),
        ));
    }
    let preds = model.predict_all(&bows, cfg.iters, cfg.seed)?;
    let ys: Vec<f64> = kept.iter().map(|&i| docs[i].y).collect();
    let (table, metrics) = regression_outputs(&preds, &ys, None)?;
    write_out(cfg, PREDICTIONS_FILE, &table)?;
    write_out(cfg, METRICS_FILE, &metrics)?;
    Ok(())
}

fn prediction_rows(preds: impl IntoIterator<Item = (Polarity, f64)>) -> String {
    let mut out = String::from("doc_id\tpolarity\tconfidence\n");
    for (i, (p, c)) in preds.into_iter().enumerate() {
        writeln!(out, "{i}\t{p}\t{c:.1}").unwrap();
    }
    out
}

fn cmd_senti_train(cfg: &RunConfig) -> Result<(), CliError> {
    let mut diag = Diagnostics::default();
    let mut records = Vec::new();
    for path in &cfg.inputs {
        let (rs, d) = ingest::load_sentiment_csv(path, cfg.senti_fraction, cfg.seed)?;
        records.extend(rs);
        diag.merge(d);
    }
    diag.emit();
    let texts: Vec<&str> = records.iter().map(|r| r.text.as_str()).collect();
    let labeled: Vec<(Vec<String>, Polarity)> = preprocess_all(&texts)
        .into_iter()
        .zip(records.iter().map(|r| r.polarity))
        .collect();
    let (train, test) = split_train_test(labeled, cfg.train_frac, cfg.seed)?;
    if test.is_empty() {
        return Err(CliError::Runtime("held-out split is empty".into()));
    }
    let (train_docs, train_labels): (Vec<_>, Vec<_>) = train.into_iter().unzip();
    let (test_docs, golds): (Vec<_>, Vec<_>) = test.into_iter().unzip();

    let sgd = SgdConfig {
        seed: cfg.seed,
        ..Default::default()
    };
    let ensemble = EnsembleModel::train(&train_docs, &train_labels, cfg.features, &sgd)?;

    let fvs: Vec<_> = test_docs.iter().map(|d| ensemble.features.featurize(d)).collect();
    let mut metrics = String::from("metric,value\n");
    for kind in ClassifierKind::ALL {
        let member = ensemble.member(kind).expect("trained ensemble has every kind");
        let preds: Vec<Polarity> = fvs.iter().map(|fv| member.classify(fv)).collect();
        let (acc, f1) = evaluate(&preds, &golds)?;
        writeln!(
            metrics,
            "{}_accuracy,{acc:.6}\n{}_f1_micro,{f1:.6}",
            kind.name(),
            kind.name()
        )
        .unwrap();
    }
    let preds: Vec<_> = test_docs.iter().map(|d| ensemble.classify(d)).collect();
    let labels: Vec<Polarity> = preds.iter().map(|p| p.polarity).collect();
    let (acc, f1) = evaluate(&labels, &golds)?;
    writeln!(metrics, "ensemble_accuracy,{acc:.6}\nensemble_f1_micro,{f1:.6}").unwrap();
    writeln!(
        metrics,
        "train_documents,{}\ntest_documents,{}",
        train_docs.len(),
        test_docs.len()
    )
    .unwrap();

    write_out(cfg, MODEL_FILE, &ensemble.to_json()?)?;
    write_out(cfg, METRICS_FILE, &metrics)?;
    write_out(
        cfg,
        PREDICTIONS_FILE,
        &prediction_rows(preds.iter().map(|p| (p.polarity, p.confidence))),
    )?;
    Ok(())
}

fn cmd_senti_classify(cfg: &RunConfig) -> Result<(), CliError> {
    let ensemble = EnsembleModel::from_json(&read_text(cfg.model.as_ref().expect("validated"))?)?;
    let text = read_text(&cfg.inputs[0])?;
    let lines: Vec<&str> = text.lines().collect();
    let rows = preprocess_all(&lines).into_iter().map(|terms| {
        let p = ensemble.classify(&terms);
        (p.polarity, p.confidence)
    });
    write_out(cfg, PREDICTIONS_FILE, &prediction_rows(rows))?;
    Ok(())
}

/// Writes `section<TAB>key<TAB>value` rows describing a run directory.
fn cmd_report(cfg: &RunConfig) -> Result<(), CliError> {
    let dir = &cfg.inputs[0];
    let model_text = read_text(&dir.join(MODEL_FILE))?;
    let value: serde_json::Value = serde_json::from_str(&model_text)?;
    let mut out = String::from("section\tkey\tvalue\n");

    if value.get("classifiers").is_some() {
        let ensemble = EnsembleModel::from_json(&model_text)?;
        writeln!(out, "model\tkind\tsentiment_ensemble").unwrap();
        writeln!(out, "model\tfeatures\t{}", ensemble.features.len()).unwrap();
        let nb = ensemble.member(ClassifierKind::BernoulliNb).expect("ensemble member");
        for f in most_informative(nb, &ensemble.features, cfg.top_n)? {
            writeln!(out, "informative\t{}\t{}:{:.3}", f.term, f.favors, f.ratio).unwrap();
        }
    } else {
        let lda_file: LdaModelFile = serde_json::from_value(value.clone())?;
        let supervised = value.get("eta").is_some();
        let kind = if supervised { "slda" } else { "lda" };
        writeln!(out, "model\tkind\t{kind}").unwrap();
        writeln!(out, "model\ttopics\t{}", lda_file.num_topics).unwrap();
        writeln!(out, "model\tterms\t{}", lda_file.num_terms).unwrap();
        writeln!(out, "model\talpha\t{}", lda_file.alpha).unwrap();
        writeln!(out, "model\tbeta\t{}", lda_file.beta).unwrap();
        writeln!(out, "model\ttokens\t{}", lda_file.n_k.iter().sum::<u64>()).unwrap();
        let vocab = load_vocab(&cfg.vocab.clone().unwrap_or_else(|| dir.join(VOCAB_FILE)))?;
        let eta = if supervised {
            let file: SldaModelFile = serde_json::from_value(value)?;
            writeln!(out, "model\tsigma2\t{}", file.sigma2).unwrap();
            Some(file.eta)
        } else {
            None
        };
        let model = LdaModel::from_file(&lda_file)?;
        for (k, words) in model.topic_report(&vocab, cfg.top_n)?.topics.iter().enumerate() {
            let words: Vec<&str> = words.iter().map(|(w, _)| w.as_str()).collect();
            if let Some(eta) = &eta {
                writeln!(out, "eta\t{k}\t{:.6}", eta[k]).unwrap();
            }
            writeln!(out, "topic\t{k}\t{}", words.join(",")).unwrap();
        }
    }

    if let Ok(metrics) = std::fs::read_to_string(dir.join(METRICS_FILE)) {
        for line in metrics.lines().skip(1) {
            if let Some((k, v)) = line.split_once(',') {
                writeln!(out, "metric\t{k}\t{v}").unwrap();
            }
        }
    }
    write_out(cfg, REPORT_FILE, &out)?;
    Ok(())
}
