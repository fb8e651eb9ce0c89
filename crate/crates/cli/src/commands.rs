use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use actseq::actions::{extract_actions, tokenize, ActionRecord};
use actseq::bench::{ablation_variants, results_tsv, ClassifierResult};
use actseq::editor_space::{
    balance_dataset, behavior_features, editor_embedding, editor_table_tsv, pearson, percentile_ranks, project_2d,
    scatter_svg, BehaviorFeatures, DynamicStore, EditorRow, ScatterPoint, SplitSizes,
};
use actseq::models::{
    ablate_sequence, accuracy, evaluate_time, featurize_delta, ids_of, parallel_map, train_baseline, train_identifier,
    train_time_predictor, Ablation, BaselineInput, BaselineKind, IdentifierModel, LabeledSeq, ModelError, TextVocab,
    TimeInput,
};
use actseq::session_log::SessionLog;
use actseq::symbols::{anonymize, build_vocab, import_dataset, SymbolizedSession, Vocabulary};
use actseq::synth::{default_profiles, generate_corpus, sample_population, truth_tsv, CorpusSpec};

use crate::config::RunConfig;
use crate::data::{
    check_aligned, labeled, load_actions, load_logs, load_symbolized, load_text_vocab, load_vocab, read_text, sidecar,
    texts, write_bytes, write_text, write_text_vocab, Split, SplitFile,
};
use crate::error::CliError;

/// What a command read and wrote, for the manifest.
#[derive(Default)]
pub struct Io {
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
}

impl Io {
    fn input(&mut self, p: &Path) {
        self.inputs.push(p.to_owned());
    }

    fn output(&mut self, p: &Path) {
        self.outputs.push(p.to_owned());
    }
}

pub struct Ctx<'a> {
    pub cfg: &'a RunConfig,
    pub seed: u64,
    pub threads: usize,
    pub io: Io,
}

fn fmt_f(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.6}")
    } else {
        "NaN".to_owned()
    }
}

fn json_f(v: f64) -> serde_json::Value {
    serde_json::Number::from_f64(v).map_or(serde_json::Value::Null, serde_json::Value::Number)
}

fn emit(ctx: &mut Ctx, path: &Path, text: &str) -> Result<(), CliError> {
    write_text(path, text)?;
    ctx.io.output(path);
    Ok(())
}

pub fn extract(ctx: &mut Ctx, input: &Path, out: &Path) -> Result<(), CliError> {
    let logs = load_logs(input, ctx.threads)?;
    ctx.io.input(input);
    let lines = parallel_map(&logs, ctx.threads, |log| -> Result<String, CliError> {
        let actions = extract_actions(log)?;
        Ok(ActionRecord {
            editor_id: log.editor_id.clone(),
            doc_id: log.doc_id.clone(),
            lang_pair: log.lang_pair.clone(),
            actions,
        }
        .to_line())
    });
    let mut text = String::new();
    for l in lines {
        text.push_str(&l?);
        text.push('\n');
    }
    emit(ctx, out, &text)
}

pub fn vocab(ctx: &mut Ctx, input: &Path, out: &Path, anonymized: bool) -> Result<(), CliError> {
    let n: usize = ctx.cfg.parse("vocab_words")?;
    let v = if anonymized {
        Vocabulary::anonymous(n)
    } else {
        let recs = load_actions(input, false)?;
        build_vocab(recs.iter().map(|r| r.actions.as_slice()), n)?
    };
    ctx.io.input(input);
    emit(ctx, out, &v.to_file_string())
}

pub fn symbolize(ctx: &mut Ctx, input: &Path, vocab: &Path, out: &Path, anonymized: bool) -> Result<(), CliError> {
    let recs = load_actions(input, anonymized)?;
    let v = load_vocab(vocab)?;
    ctx.io.input(input);
    ctx.io.input(vocab);
    let mut text = String::new();
    for r in &recs {
        let s = SymbolizedSession {
            editor_id: r.editor_id.clone(),
            doc_id: r.doc_id.clone(),
            ids: v.symbolize(&r.actions),
        };
        text.push_str(&s.to_line());
        text.push('\n');
    }
    emit(ctx, out, &text)
}

pub fn synth(ctx: &mut Ctx, out: &Path) -> Result<(), CliError> {
    let profiles = match ctx.cfg.get("profiles") {
        "default" => default_profiles(),
        "population" => sample_population(ctx.cfg.parse("population")?, ctx.seed),
        p => return Err(CliError::Usage(format!("unknown profiles {p}"))),
    };
    let spec = CorpusSpec {
        rounds: ctx.cfg.parse("rounds")?,
        document: ctx.cfg.document()?,
        seed: ctx.seed,
    };
    let corpus = generate_corpus(&profiles, &spec, ctx.threads)?;
    let logs = out.join("logs");
    std::fs::create_dir_all(&logs).map_err(|e| CliError::data(logs.display(), e))?;
    for (log, t) in corpus.sessions.iter().zip(&corpus.truth) {
        let p = logs.join(format!("{}.jsonl", t.session_id));
        write_text(&p, &log.to_jsonl())?;
    }
    ctx.io.output(&logs);
    emit(ctx, &out.join("truth.tsv"), &truth_tsv(&corpus.truth))?;
    let profiles_json = serde_json::to_string_pretty(&profiles).expect("profiles serialize") + "\n";
    emit(ctx, &out.join("profiles.json"), &profiles_json)
}

pub fn balance(ctx: &mut Ctx, input: &Path, out: &Path, anonymized: bool) -> Result<(), CliError> {
    let recs = load_actions(input, anonymized)?;
    ctx.io.input(input);
    let sessions: Vec<(String, String)> = recs.iter().map(|r| (r.editor_id.clone(), r.doc_id.clone())).collect();
    let sizes = SplitSizes {
        train: ctx.cfg.parse("train")?,
        dev: ctx.cfg.parse("dev")?,
        test: ctx.cfg.parse("test")?,
    };
    let splits = balance_dataset(&sessions, ctx.cfg.parse("k")?, sizes, ctx.seed)?;
    emit(ctx, out, &SplitFile::from_splits(&splits).to_text())
}

fn ablation(cfg: &RunConfig) -> Result<Option<Ablation>, CliError> {
    match cfg.get("ablation") {
        "full" => Ok(None),
        s => s.parse().map(Some).map_err(CliError::Usage),
    }
}

/// Ablated ids; a sequence reduced to nothing keeps its bare stop symbol.
fn ablated_ids(s: &SymbolizedSession, vocab: &Vocabulary, a: Option<&Ablation>) -> Result<Vec<usize>, CliError> {
    let ids = match a {
        Some(a) => match ablate_sequence(&s.ids, vocab, a) {
            Err(ModelError::EmptyAfterAblation) => s.ids.last().copied().into_iter().collect(),
            r => r?,
        },
        None => s.ids.clone(),
    };
    Ok(ids_of(&ids))
}

struct IdData {
    vocab: Vocabulary,
    sessions: Vec<SymbolizedSession>,
    splits: SplitFile,
}

fn load_id_data(ctx: &mut Ctx, data: &Path, vocab: &Path, splits: &Path) -> Result<IdData, CliError> {
    let d = IdData {
        vocab: load_vocab(vocab)?,
        sessions: load_symbolized(data)?,
        splits: SplitFile::load(splits)?,
    };
    for p in [data, vocab, splits] {
        ctx.io.input(p);
    }
    Ok(d)
}

fn id_split(d: &IdData, split: Split, a: Option<&Ablation>) -> Result<Vec<LabeledSeq>, CliError> {
    labeled(&d.splits, split, &d.sessions, |s| s.editor_id.as_str())?
        .into_iter()
        .map(|(s, y)| Ok((ablated_ids(&s, &d.vocab, a)?, y)))
        .collect()
}

fn train_one(ctx: &Ctx, d: &IdData, a: Option<&Ablation>) -> Result<(IdentifierModel<f32>, ClassifierResult), CliError> {
    let train = id_split(d, Split::Train, a)?;
    let dev = id_split(d, Split::Dev, a)?;
    let test = id_split(d, Split::Test, a)?;
    let cfg = ctx.cfg.model()?;
    let (model, report) = train_identifier::<f32>(&train, &dev, d.splits.editors.clone(), d.vocab.size(), &cfg, ctx.seed)?;
    let r = ClassifierResult {
        model: a.map_or_else(|| "actionseq".to_owned(), Ablation::name),
        dev_accuracy: accuracy(&model, &dev)?,
        test_accuracy: accuracy(&model, &test)?,
        report,
    };
    Ok((model, r))
}

pub fn train_id(ctx: &mut Ctx, data: &Path, vocab: &Path, splits: &Path, out: &Path) -> Result<(), CliError> {
    let d = load_id_data(ctx, data, vocab, splits)?;
    let a = ablation(ctx.cfg)?;
    let (model, r) = train_one(ctx, &d, a.as_ref())?;
    write_bytes(out, &model.to_checkpoint())?;
    ctx.io.output(out);
    emit(ctx, &sidecar(out, ".report.jsonl"), &r.report.to_jsonl())?;
    println!("{}", results_tsv(&[(ctx.seed, r)]).trim_end());
    Ok(())
}

pub fn eval_id(ctx: &mut Ctx, model: Option<&Path>, data: &Path, vocab: &Path, splits: &Path, out: &Path) -> Result<(), CliError> {
    let d = load_id_data(ctx, data, vocab, splits)?;
    let m = match model {
        Some(p) => {
            ctx.io.input(p);
            let bytes = std::fs::read(p).map_err(|e| CliError::data(p.display(), e))?;
            IdentifierModel::<f32>::from_checkpoint(&bytes)?
        }
        None => IdentifierModel::new(d.vocab.size(), d.splits.editors.clone(), ctx.cfg.model()?, ctx.seed)?,
    };
    if m.labels != d.splits.editors {
        return Err(CliError::Data("model editors differ from the split file editors".into()));
    }
    let split = Split::parse(ctx.cfg.get("split"))?;
    let examples = id_split(&d, split, ablation(ctx.cfg)?.as_ref())?;
    let acc = accuracy(&m, &examples)?;
    let k = m.labels.len();
    let report = serde_json::json!({
        "model": model.map_or("untrained".to_owned(), |p| p.display().to_string()),
        "split": ctx.cfg.get("split"),
        "sessions": examples.len(),
        "editors": k,
        "accuracy": json_f(acc),
        "random_baseline": json_f(1.0 / k as f64),
    });
    println!("{report}");
    emit(ctx, out, &format!("{report}\n"))
}

pub fn ablate_id(ctx: &mut Ctx, data: &Path, vocab: &Path, splits: &Path, out: &Path) -> Result<(), CliError> {
    let d = load_id_data(ctx, data, vocab, splits)?;
    let mut rows = Vec::new();
    for a in ablation_variants() {
        let (_, r) = train_one(ctx, &d, a.as_ref())?;
        rows.push((ctx.seed, r));
    }
    let table = results_tsv(&rows);
    print!("{table}");
    emit(ctx, out, &table)
}

pub fn train_baseline_cmd(ctx: &mut Ctx, kind: &str, logs: &Path, splits: &Path, out: &Path) -> Result<(), CliError> {
    let kind: BaselineKind = kind.parse().map_err(|e: ModelError| CliError::Usage(e.to_string()))?;
    let sessions = load_logs(logs, ctx.threads)?;
    let split_file = SplitFile::load(splits)?;
    ctx.io.input(logs);
    ctx.io.input(splits);
    let docs = parallel_map(&sessions, ctx.threads, texts)
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let train_idx = split_file.indices(Split::Train, sessions.len())?;
    let cfg = ctx.cfg.model()?;
    let text_vocab = TextVocab::build(
        train_idx.iter().flat_map(|&i| [&docs[i].0, &docs[i].1, &docs[i].2]),
        cfg.text_vocab,
    );
    let inputs: Vec<(usize, &SessionLog)> = sessions.iter().enumerate().collect();
    let data = |split| -> Result<Vec<(BaselineInput, usize)>, CliError> {
        Ok(labeled(&split_file, split, &inputs, |x| x.1.editor_id.as_str())?
            .into_iter()
            .map(|((i, _), y)| {
                let (src, mt, pe) = &docs[i];
                (
                    BaselineInput {
                        delta: featurize_delta(src, mt, pe),
                        mt: text_vocab.encode(mt),
                        pe: text_vocab.encode(pe),
                    },
                    y,
                )
            })
            .collect())
    };
    let (train, dev, test) = (data(Split::Train)?, data(Split::Dev)?, data(Split::Test)?);
    let (model, report) =
        train_baseline::<f32>(kind, &train, &dev, split_file.editors.clone(), text_vocab.size(), &cfg, ctx.seed)?;
    write_bytes(out, &model.to_checkpoint())?;
    ctx.io.output(out);
    let words = sidecar(out, ".words");
    write_text_vocab(&words, &text_vocab)?;
    ctx.io.output(&words);
    let r = ClassifierResult {
        model: kind.as_str().to_owned(),
        dev_accuracy: accuracy(&model, &dev)?,
        test_accuracy: accuracy(&model, &test)?,
        report,
    };
    emit(ctx, &sidecar(out, ".report.jsonl"), &r.report.to_jsonl())?;
    let table = results_tsv(&[(ctx.seed, r)]);
    print!("{table}");
    emit(ctx, &sidecar(out, ".results.tsv"), &table)
}

fn load_identifier(ctx: &mut Ctx, p: &Path) -> Result<IdentifierModel<f32>, CliError> {
    ctx.io.input(p);
    let bytes = std::fs::read(p).map_err(|e| CliError::data(p.display(), e))?;
    Ok(IdentifierModel::from_checkpoint(&bytes)?)
}

fn vector_cols(v: &[f32]) -> String {
    v.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join("\t")
}

/// Editors in first-appearance order with the indices of their sessions.
fn group_by_editor<'a>(ids: impl Iterator<Item = &'a str>) -> Vec<(String, Vec<usize>)> {
    let mut order: Vec<(String, Vec<usize>)> = Vec::new();
    let mut slot: HashMap<&str, usize> = HashMap::new();
    for (i, e) in ids.enumerate() {
        let k = *slot.entry(e).or_insert_with(|| {
            order.push((e.to_owned(), Vec::new()));
            order.len() - 1
        });
        order[k].1.push(i);
    }
    order
}

pub fn embed(ctx: &mut Ctx, model: &Path, data: &Path, out_sessions: &Path, out_editors: &Path) -> Result<(), CliError> {
    let m = load_identifier(ctx, model)?;
    let sessions = load_symbolized(data)?;
    ctx.io.input(data);
    let vecs = parallel_map(&sessions, ctx.threads, |s| m.session_embedding(&ids_of(&s.ids)))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let mut text = String::new();
    for (s, v) in sessions.iter().zip(&vecs) {
        let _ = writeln!(text, "{}\t{}\t{}", s.editor_id, s.doc_id, vector_cols(v));
    }
    emit(ctx, out_sessions, &text)?;
    let min: usize = ctx.cfg.parse("min_sessions")?;
    let mut text = String::new();
    for (e, idx) in group_by_editor(sessions.iter().map(|s| s.editor_id.as_str())) {
        if idx.len() < min {
            continue;
        }
        let mine: Vec<&Vec<f32>> = idx.iter().map(|&i| &vecs[i]).collect();
        let emb = editor_embedding(&e, &mine)?;
        let _ = writeln!(text, "{}\t{}\t{}", emb.editor_id, emb.n_sessions, vector_cols(&emb.vector));
    }
    emit(ctx, out_editors, &text)
}

const FEATURE_HEADER: &str = "editor_id\tn_sessions\tavg_first_wait\tjump_backs_per_mt_token\tmouse_events_per_mt_token";

pub fn stats(ctx: &mut Ctx, actions: &Path, logs: &Path, out: &Path) -> Result<(), CliError> {
    let recs = load_actions(actions, false)?;
    let sessions = load_logs(logs, ctx.threads)?;
    ctx.io.input(actions);
    ctx.io.input(logs);
    check_aligned(
        recs.iter().map(|r| (r.editor_id.as_str(), r.doc_id.as_str())),
        sessions.iter().map(|l| (l.editor_id.as_str(), l.doc_id.as_str())),
    )?;
    let tokens: Vec<usize> = sessions.iter().map(|l| tokenize(&l.mt_segments).word_count()).collect();
    let min: usize = ctx.cfg.parse("min_sessions")?;
    let mut rows: Vec<(String, usize, BehaviorFeatures)> = Vec::new();
    for (e, idx) in group_by_editor(recs.iter().map(|r| r.editor_id.as_str())) {
        if idx.len() < min {
            continue;
        }
        let pairs: Vec<(&[actseq::actions::Action], usize)> =
            idx.iter().map(|&i| (recs[i].actions.as_slice(), tokens[i])).collect();
        rows.push((e, idx.len(), behavior_features(&pairs)?));
    }
    let mut table = format!("{FEATURE_HEADER}\n");
    for (e, n, f) in &rows {
        let _ = writeln!(
            table,
            "{e}\t{n}\t{}\t{}\t{}",
            fmt_f(f.avg_first_wait),
            fmt_f(f.jump_backs_per_mt_token),
            fmt_f(f.mouse_events_per_mt_token)
        );
    }
    emit(ctx, out, &table)?;
    let col = |f: fn(&BehaviorFeatures) -> f64| rows.iter().map(|r| f(&r.2)).collect::<Vec<f64>>();
    let (wait, jb, mouse) = (
        col(|f| f.avg_first_wait),
        col(|f| f.jump_backs_per_mt_token),
        col(|f| f.mouse_events_per_mt_token),
    );
    let mut report = String::from("x\ty\teditors\tpearson\n");
    for (xn, x, yn, y) in [
        ("mouse_events_per_mt_token", &mouse, "jump_backs_per_mt_token", &jb),
        ("avg_first_wait", &wait, "jump_backs_per_mt_token", &jb),
        ("avg_first_wait", &wait, "mouse_events_per_mt_token", &mouse),
    ] {
        let _ = writeln!(report, "{xn}\t{yn}\t{}\t{}", rows.len(), fmt_f(pearson(x, y)));
    }
    print!("{report}");
    emit(ctx, &sidecar(out, ".pearson.tsv"), &report)
}

fn parse_f(s: &str, what: &str) -> Result<f64, CliError> {
    s.parse().map_err(|_| CliError::Data(format!("{what}: bad number {s}")))
}

pub fn project(ctx: &mut Ctx, input: &Path, stats: Option<&Path>, out: &Path, svg: &Path) -> Result<(), CliError> {
    let text = read_text(input)?;
    ctx.io.input(input);
    let mut ids = Vec::new();
    let mut counts = Vec::new();
    let mut vecs: Vec<Vec<f64>> = Vec::new();
    for (i, l) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let cols: Vec<&str> = l.split('\t').collect();
        if cols.len() < 3 {
            return Err(CliError::Data(format!("{}:{}: expected editor, count, vector", input.display(), i + 1)));
        }
        ids.push(cols[0].to_owned());
        counts.push(cols[1].parse::<usize>().map_err(|_| CliError::Data(format!("line {}: bad count", i + 1)))?);
        vecs.push(cols[2..].iter().map(|c| parse_f(c, "vector")).collect::<Result<_, _>>()?);
    }
    let proj = project_2d(&vecs)?;
    let features: Option<HashMap<String, BehaviorFeatures>> = match stats {
        None => None,
        Some(p) => {
            ctx.io.input(p);
            let mut m = HashMap::new();
            for l in read_text(p)?.lines().skip(1).filter(|l| !l.trim().is_empty()) {
                let c: Vec<&str> = l.split('\t').collect();
                if c.len() != 5 {
                    return Err(CliError::Data(format!("{}: expected 5 columns", p.display())));
                }
                m.insert(
                    c[0].to_owned(),
                    BehaviorFeatures {
                        avg_first_wait: parse_f(c[2], "stats")?,
                        jump_backs_per_mt_token: parse_f(c[3], "stats")?,
                        mouse_events_per_mt_token: parse_f(c[4], "stats")?,
                    },
                );
            }
            Some(m)
        }
    };
    let table = match &features {
        Some(f) => {
            let rows: Vec<EditorRow> = ids
                .iter()
                .zip(&counts)
                .zip(&proj.coords)
                .map(|((e, &n), &xy)| {
                    let features = *f
                        .get(e)
                        .ok_or_else(|| CliError::Data(format!("editor {e} missing from stats")))?;
                    Ok(EditorRow {
                        editor_id: e.clone(),
                        n_sessions: n,
                        features,
                        xy,
                    })
                })
                .collect::<Result<_, CliError>>()?;
            editor_table_tsv(&rows)
        }
        None => {
            let mut t = String::from("editor_id\tn_sessions\tx\ty\n");
            for ((e, n), c) in ids.iter().zip(&counts).zip(&proj.coords) {
                let _ = writeln!(t, "{e}\t{n}\t{:.6}\t{:.6}", c[0], c[1]);
            }
            t
        }
    };
    emit(ctx, out, &table)?;
    let pick: Option<fn(&BehaviorFeatures) -> f64> = match ctx.cfg.get("color_by") {
        "none" => None,
        "first_wait" => Some(|f| f.avg_first_wait),
        "jump_backs" => Some(|f| f.jump_backs_per_mt_token),
        "mouse" => Some(|f| f.mouse_events_per_mt_token),
        c => return Err(CliError::Usage(format!("unknown color_by {c}"))),
    };
    let pct: Option<Vec<f64>> = match (pick, &features) {
        (Some(g), Some(f)) => Some(percentile_ranks(&ids.iter().map(|e| g(&f[e])).collect::<Vec<_>>())),
        (Some(_), None) => return Err(CliError::Usage("color_by needs --stats".into())),
        _ => None,
    };
    let points: Vec<ScatterPoint> = ids
        .iter()
        .zip(&proj.coords)
        .enumerate()
        .map(|(i, (e, c))| ScatterPoint {
            x: c[0],
            y: c[1],
            label: e.clone(),
            percentile: pct.as_ref().map(|p| p[i]),
        })
        .collect();
    emit(ctx, svg, &scatter_svg(&points, "editor embeddings"))
}

struct TimeData {
    split_file: SplitFile,
    inputs: Vec<(TimeInput<f32>, f64)>,
    editor_dim: usize,
}

/// Walks the sessions in file order, querying each editor's dynamic vector
/// before adding the session's own embedding.
fn time_data(
    ctx: &mut Ctx,
    logs: &Path,
    data: &Path,
    id_model: &Path,
    splits: &Path,
    vocab: Option<&TextVocab>,
) -> Result<(TimeData, TextVocab), CliError> {
    let sessions = load_logs(logs, ctx.threads)?;
    let symbols = load_symbolized(data)?;
    let split_file = SplitFile::load(splits)?;
    for p in [logs, data, splits] {
        ctx.io.input(p);
    }
    let ident = load_identifier(ctx, id_model)?;
    check_aligned(
        symbols.iter().map(|s| (s.editor_id.as_str(), s.doc_id.as_str())),
        sessions.iter().map(|l| (l.editor_id.as_str(), l.doc_id.as_str())),
    )?;
    let docs: Vec<_> = sessions.iter().map(|l| (tokenize(&l.source_segments), tokenize(&l.mt_segments))).collect();
    let text_vocab = match vocab {
        Some(v) => v.clone(),
        None => {
            let train = split_file.indices(Split::Train, sessions.len())?;
            TextVocab::build(train.iter().flat_map(|&i| [&docs[i].0, &docs[i].1]), ctx.cfg.model()?.text_vocab)
        }
    };
    let use_editor = ctx.cfg.flag("use_editor")?;
    let dim = ident.config.repr_dim;
    let mut store = DynamicStore::<f32>::with_capacity(dim, ctx.cfg.parse::<usize>("store_capacity")?.max(1));
    let mut inputs = Vec::with_capacity(sessions.len());
    for ((log, sym), (src, mt)) in sessions.iter().zip(&symbols).zip(&docs) {
        let editor = if use_editor {
            store.query(&log.editor_id)
        } else {
            vec![0.0; dim]
        };
        store.update(&log.editor_id, ident.session_embedding(&ids_of(&sym.ids))?)?;
        let words = log.source_segments.iter().map(|s| s.split_whitespace().count()).sum::<usize>().max(1);
        let target = (log.end_t as f64 / 1000.0 / words as f64).ln();
        inputs.push((
            TimeInput {
                source: text_vocab.encode(src),
                mt: text_vocab.encode(mt),
                editor,
            },
            target,
        ));
    }
    Ok((
        TimeData {
            split_file,
            inputs,
            editor_dim: dim,
        },
        text_vocab,
    ))
}

fn time_split(d: &TimeData, split: Split) -> Result<Vec<(TimeInput<f32>, f64)>, CliError> {
    Ok(d.split_file
        .indices(split, d.inputs.len())?
        .into_iter()
        .map(|i| d.inputs[i].clone())
        .collect())
}

pub fn train_time(ctx: &mut Ctx, logs: &Path, data: &Path, id_model: &Path, splits: &Path, out: &Path) -> Result<(), CliError> {
    let (d, text_vocab) = time_data(ctx, logs, data, id_model, splits, None)?;
    let (train, dev) = (time_split(&d, Split::Train)?, time_split(&d, Split::Dev)?);
    let cfg = ctx.cfg.model()?;
    let (model, report) = train_time_predictor::<f32>(&train, &dev, text_vocab.size(), d.editor_dim, &cfg, ctx.seed)?;
    write_bytes(out, &model.to_checkpoint())?;
    ctx.io.output(out);
    let words = sidecar(out, ".words");
    write_text_vocab(&words, &text_vocab)?;
    ctx.io.output(&words);
    emit(ctx, &sidecar(out, ".report.jsonl"), &report.to_jsonl())
}

pub fn eval_time(
    ctx: &mut Ctx,
    model: &Path,
    logs: &Path,
    data: &Path,
    id_model: &Path,
    splits: &Path,
    out: &Path,
) -> Result<(), CliError> {
    ctx.io.input(model);
    let bytes = std::fs::read(model).map_err(|e| CliError::data(model.display(), e))?;
    let m = actseq::models::TimePredictor::<f32>::from_checkpoint(&bytes)?;
    let words = sidecar(model, ".words");
    let vocab = load_text_vocab(&words)?;
    ctx.io.input(&words);
    let (d, _) = time_data(ctx, logs, data, id_model, splits, Some(&vocab))?;
    if d.editor_dim != m.editor_dim {
        return Err(CliError::Data("identifier and time model disagree on the editor vector size".into()));
    }
    let split = Split::parse(ctx.cfg.get("split"))?;
    let examples = time_split(&d, split)?;
    let (mse, r) = evaluate_time(&m, &examples)?;
    let report = format!(
        "split\tsessions\tmse\tpearson\n{}\t{}\t{}\t{}\n",
        ctx.cfg.get("split"),
        examples.len(),
        fmt_f(mse),
        fmt_f(r)
    );
    print!("{report}");
    emit(ctx, out, &report)
}

pub fn import(ctx: &mut Ctx, input: &Path, out: &Path) -> Result<(), CliError> {
    let recs = import_dataset(&read_text(input)?, &ctx.cfg.import()?)?;
    ctx.io.input(input);
    let mut text = String::new();
    for r in &recs {
        text.push_str(&r.to_line());
        text.push('\n');
    }
    emit(ctx, out, &text)
}

/// Anonymizes an action file with its vocabulary.
pub fn anonymize_cmd(ctx: &mut Ctx, input: &Path, vocab: &Path, out: &Path) -> Result<(), CliError> {
    let recs = load_actions(input, false)?;
    let v = load_vocab(vocab)?;
    ctx.io.input(input);
    ctx.io.input(vocab);
    let mut text = String::new();
    for r in anonymize(&recs, &v) {
        text.push_str(&r.to_line());
        text.push('\n');
    }
    emit(ctx, out, &text)
}
