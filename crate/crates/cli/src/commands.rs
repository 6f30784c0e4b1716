use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use seqlint_core::conll::{attach_truth, parse_conll};
use seqlint_core::evaluation::{
    eval_input, format_table, noise_matrix, pr_curve, report, token_combos, EvalOptions, Metric,
};
use seqlint_core::formats::{
    read_dataset_file, read_reports_file, read_subword_probs_file, read_word_probs_file,
    write_dataset, write_pr_curves, write_reports, write_scores,
};
use seqlint_core::preprocess::preprocess;
use seqlint_core::sentence_scores::{combos, score_all};
use seqlint_core::{
    mark_errors, merge_prefixes, pool_dataset, Dataset, Error, LabelSpace, MethodCombo,
    ScoreConfig, SentenceMethod, TokenEvidence, TokenScoreMethod, Unit,
};
use seqlint_review::{router, serve, ReviewService};

use crate::args::{
    Cli, Command, EvalArgs, IngestArgs, MethodArgs, PoolArgs, ReportArgs, ScoreArgs,
    ScoreOverrides, ServeArgs, UnitArg,
};
use crate::MissingInput;

pub fn run(cli: Cli) -> Result<()> {
    let config = cli.config.as_deref();
    match cli.command {
        Command::Ingest(a) => ingest(a),
        Command::Pool(a) => pool(a),
        Command::Score(a) => score(a, config),
        Command::Eval(a) => eval(a, config),
        Command::Report(a) => report_cmd(a),
        Command::Serve(a) => serve_cmd(a),
    }
}

fn input(path: &Path) -> Result<&Path> {
    if !path.exists() {
        return Err(MissingInput(path.to_path_buf()).into());
    }
    Ok(path)
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(input(path)?).with_context(|| format!("reading {}", path.display()))
}

fn load_dataset(path: &Path) -> Result<Dataset> {
    Ok(read_dataset_file(input(path)?)?)
}

/// Opens `path` for writing, or standard output when absent.
fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn save_dataset(ds: &Dataset, path: &Path) -> Result<()> {
    write_dataset(ds, output(Some(path))?).with_context(|| format!("writing {}", path.display()))
}

fn ingest(a: IngestArgs) -> Result<()> {
    let label_space = match &a.classes {
        Some(c) => LabelSpace::new(c)?,
        None => LabelSpace::conll2003(),
    };
    let text = read_text(&a.conll)?;
    if let Some(p) = a.subword_probs.as_deref().or(a.word_probs.as_deref()) {
        input(p)?;
    }
    let mut sentences = parse_conll(&text, &label_space)
        .with_context(|| format!("parsing {}", a.conll.display()))?;
    if let Some(truth) = &a.truth {
        let truth_sentences = parse_conll(&read_text(truth)?, &label_space)
            .with_context(|| format!("parsing {}", truth.display()))?;
        attach_truth(&mut sentences, &truth_sentences)?;
    }
    let read = sentences.len();
    if !a.no_preprocess {
        sentences = preprocess(sentences);
    }
    let mut ds = Dataset::new(label_space, sentences, None)?;
    if let Some(p) = &a.subword_probs {
        let sub = read_subword_probs_file(p, &ds.label_space)?;
        ds.probs = Some(pool_dataset(&ds, &sub, a.pool.into())?);
    } else if let Some(p) = &a.word_probs {
        let mut words = read_word_probs_file(p, &ds.label_space)?;
        let probs = ds
            .sentences
            .iter()
            .map(|s| {
                words.remove(&s.id).ok_or(Error::Sentence {
                    id: s.id,
                    message: "no word probabilities".into(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        ds = Dataset::new(ds.label_space, ds.sentences, Some(probs))?;
    }
    if a.merge_prefixes {
        ds = merge_prefixes(&ds)?;
    }
    save_dataset(&ds, &a.out)?;
    eprintln!(
        "read {read} sentences, dropped {} in preprocessing, wrote {} with {} classes to {}",
        read - ds.len(),
        ds.len(),
        ds.label_space.len(),
        a.out.display()
    );
    Ok(())
}

fn pool(a: PoolArgs) -> Result<()> {
    let mut ds = load_dataset(&a.dataset)?;
    let sub = read_subword_probs_file(input(&a.subword_probs)?, &ds.label_space)?;
    ds.probs = Some(pool_dataset(&ds, &sub, a.pool.into())?);
    ds.validate()?;
    if a.merge_prefixes {
        ds = merge_prefixes(&ds)?;
    }
    save_dataset(&ds, &a.out)?;
    eprintln!("pooled {} sentences into {}", ds.len(), a.out.display());
    Ok(())
}

fn score_config(path: Option<&Path>, o: &ScoreOverrides) -> Result<ScoreConfig> {
    let mut cfg: ScoreConfig = match path {
        Some(p) => toml::from_str(&read_text(p)?)
            .with_context(|| format!("parsing config {}", p.display()))?,
        None => ScoreConfig::default(),
    };
    if let Some(v) = o.epsilon {
        cfg.epsilon = v;
    }
    if let Some(v) = o.c {
        cfg.c = v;
    }
    if let Some(v) = o.j {
        cfg.j = v;
    }
    if let Some(v) = o.d {
        cfg.d = v;
    }
    if let Some(v) = o.temperature {
        cfg.temperature = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn selected_methods(m: &MethodArgs) -> Result<(Vec<SentenceMethod>, Vec<TokenScoreMethod>)> {
    let mut methods = Vec::new();
    for name in &m.method {
        let chosen: Vec<SentenceMethod> = match name.as_str() {
            "all" => SentenceMethod::ALL.to_vec(),
            "main" => SentenceMethod::MAIN.to_vec(),
            n => vec![n.parse()?],
        };
        for c in chosen {
            if !methods.contains(&c) {
                methods.push(c);
            }
        }
    }
    let preset = m.method.iter().any(|n| n == "all" || n == "main");
    let default_token = if preset { "all" } else { "self-confidence" };
    let names = if m.token_score.is_empty() {
        vec![default_token.to_string()]
    } else {
        m.token_score.clone()
    };
    let mut tokens = Vec::new();
    for name in &names {
        let chosen: Vec<TokenScoreMethod> = match name.as_str() {
            "all" => TokenScoreMethod::ALL.to_vec(),
            n => vec![n.parse()?],
        };
        for c in chosen {
            if !tokens.contains(&c) {
                tokens.push(c);
            }
        }
    }
    Ok((methods, tokens))
}

fn score(a: ScoreArgs, config: Option<&Path>) -> Result<()> {
    let cfg = score_config(config, &a.overrides)?;
    let ds = load_dataset(&a.dataset)?;
    let (methods, tokens) = selected_methods(&a.methods)?;
    let records = score_all(&ds, &methods, &tokens, &cfg)?;
    write_scores(&records, output(a.out.as_deref())?).context("writing scores")?;
    if let Some(out) = &a.out {
        eprintln!(
            "wrote {} scores for {} sentences to {}",
            records.len(),
            ds.len(),
            out.display()
        );
    }
    Ok(())
}

fn eval(a: EvalArgs, config: Option<&Path>) -> Result<()> {
    let cfg = score_config(config, &a.overrides)?;
    let ds = load_dataset(&a.dataset)?;
    let (methods, tokens) = selected_methods(&a.methods)?;
    let metrics: Vec<Metric> = a
        .metrics
        .iter()
        .map(|m| m.parse())
        .collect::<Result<_, _>>()?;
    let unit = match a.unit {
        UnitArg::Sentence => Unit::Sentence,
        UnitArg::Token => Unit::Token,
    };
    let chosen: Vec<MethodCombo> = match unit {
        Unit::Sentence => combos(&methods, &tokens),
        Unit::Token => token_combos(&tokens),
    };
    let marks = mark_errors(&ds).map_err(|e| match e {
        Error::MissingTruth { id } => anyhow::anyhow!(
            "sentence {id} has no ground-truth labels; evaluation needs a dataset ingested with --truth"
        ),
        other => other.into(),
    })?;
    if marks.num_flagged_sentences() == 0 {
        bail!("the ground truth contains no label errors, so there is nothing to detect");
    }
    let evidence = TokenEvidence::new(&ds)?;
    let opts = EvalOptions {
        top_t: a.top_t,
        ks: a.k.clone(),
    };
    let mut reports = Vec::with_capacity(chosen.len());
    let mut curves = Vec::new();
    for &combo in &chosen {
        let e = eval_input(&evidence, &marks, combo, &cfg, unit)?;
        reports.push(report(combo, &e, &opts).with_context(|| format!("evaluating {combo}"))?);
        if a.pr_curves.is_some() {
            curves.push((combo, unit, pr_curve(&e)?));
        }
    }
    if let Some(out) = &a.out {
        write_reports(&reports, &metrics, output(Some(out))?).context("writing report")?;
    }
    if let Some(path) = &a.pr_curves {
        write_pr_curves(&curves, output(Some(path))?).context("writing curves")?;
    }
    if !a.quiet {
        let mut stdout = io::stdout().lock();
        writeln!(
            stdout,
            "{} errors among {} {}s",
            reports.first().map_or(0, |r| r.n_positives),
            reports.first().map_or(0, |r| r.n_items),
            unit.name()
        )?;
        stdout.write_all(format_table(&reports, &metrics).as_bytes())?;
    }
    Ok(())
}

fn report_cmd(a: ReportArgs) -> Result<()> {
    let text = if let Some(path) = &a.reports {
        let (reports, metrics) = read_reports_file(input(path)?)?;
        format_table(&reports, &metrics)
    } else {
        let path = a.noise_matrix.as_deref().expect("clap requires one source");
        noise_matrix(&load_dataset(path)?)?.to_table()
    };
    io::stdout().lock().write_all(text.as_bytes())?;
    Ok(())
}

fn serve_cmd(a: ServeArgs) -> Result<()> {
    let export_dir: PathBuf = match (&a.export_dir, a.state.parent()) {
        (Some(d), _) => d.clone(),
        (None, Some(p)) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let export_dir = std::path::absolute(&export_dir)
        .with_context(|| format!("resolving {}", export_dir.display()))?;
    let service =
        ReviewService::open(input(&a.dataset)?, input(&a.scores)?, &a.state, &export_dir)?;
    let app = router(Arc::new(service), a.static_dir.clone());
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind((a.host.as_str(), a.port))
            .await
            .with_context(|| format!("binding {}:{}", a.host, a.port))?;
        eprintln!("listening on http://{}", listener.local_addr()?);
        serve(listener, app).await?;
        Ok(())
    })
}
