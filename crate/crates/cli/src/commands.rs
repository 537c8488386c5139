use std::fs;
use std::path::{Path, PathBuf};

use archrec::arc::{recover_arc, ArcParams, ConcernAssignment};
use archrec::corpus::Corpus;
use archrec::eval::{
    criteria_scorecard, evolution_study, recover, run_trial, Method, RecoveryConfig, ScorecardConfig, SystemFacts,
    SystemSpec, TopicScope, TrialConfig, TrialKind,
};
use archrec::extract::{scan_source_tree, ExtractOptions};
use archrec::metrics::{a2a, cvg, mojofm, CvgParams};
use archrec::rsf::{parse_arch_rsf, parse_deps_rsf, serialize_arch, serialize_deps};
use archrec::smells::{audit_concerns, detect_smells, SmellThresholds};
use archrec::text::{build_stopword_set, LicenseLexicon, StopWordSet, ENGLISH_STOP_WORDS};
use archrec::Architecture;
use clap::error::ErrorKind;
use clap::CommandFactory;
use serde::Serialize;
use serde_json::{json, Value};

use super::{
    AcdcArgs, ArcArgs, ArcOpts, Cli, Command, CompareArgs, EvaluateArgs, ExtractArgs, ExtractFlags, Metric, MethodArg,
    PkgArgs, RecoverCommand, ScopeArg, ScorecardArgs, SmellsArgs, StudyArgs, TrialArg,
};

const SEED_VAR: &str = "ARCHREC_SEED";

#[derive(Debug)]
pub struct CliError {
    pub kind: &'static str,
    pub message: String,
}

impl From<archrec::Error> for CliError {
    fn from(e: archrec::Error) -> Self {
        CliError {
            kind: e.kind(),
            message: e.to_string(),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        archrec::Error::from(e).into()
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError {
        kind: "io",
        message: format!("{}: {e}", path.display()),
    }
}

/// A domain error from reading `path`, prefixed with the path.
fn in_file(path: &Path, e: archrec::Error) -> CliError {
    CliError {
        kind: e.kind(),
        message: format!("{}: {e}", path.display()),
    }
}

fn usage_error(kind: ErrorKind, message: &str) -> ! {
    Cli::command().error(kind, message).exit()
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Extract(a) => extract(a),
        Command::Recover { method } => match method {
            RecoverCommand::Pkg(a) => recover_pkg(a),
            RecoverCommand::Acdc(a) => recover_acdc(a),
            RecoverCommand::Arc(a) => recover_arc_cmd(a),
        },
        Command::Compare(a) => compare(a),
        Command::Smells(a) => smells(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Study(a) => study(a),
        Command::Scorecard(a) => scorecard(a),
    }
}

// ---------- helpers ----------

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| io_error(path, e))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| io_error(path, e))
}

fn absolute(path: &Path) -> PathBuf {
    std::path::absolute(path).unwrap_or_else(|_| path.to_path_buf())
}

/// Pretty JSON with keys sorted at every level.
fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

/// Writes `text` to `out`, or prints it when there is no output file.
fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn with_run_config(report: &impl Serialize, run_config: Value) -> Result<Value> {
    let mut v = serde_json::to_value(report)?;
    if let Value::Object(map) = &mut v {
        map.insert("runConfig".into(), run_config);
    }
    Ok(v)
}

fn load_arch(path: &Path) -> Result<Architecture> {
    let text = read(path)?;
    let is_json = path.extension().is_some_and(|e| e == "json");
    let arch = if is_json {
        serde_json::from_str(&text)?
    } else {
        parse_arch_rsf(&text).map_err(|e| in_file(path, e))?
    };
    Ok(arch)
}

fn load_corpus(path: &Path) -> Result<Corpus> {
    Ok(serde_json::from_str(&read(path)?)?)
}

fn load_facts(deps: &Path, corpus: Option<&Path>) -> Result<SystemFacts> {
    let graph = parse_deps_rsf(&read(deps)?).map_err(|e| in_file(deps, e))?;
    let corpus = corpus.map(load_corpus).transpose()?.unwrap_or_default();
    Ok(SystemFacts::new(graph, corpus)?)
}

fn arc_params(opts: &ArcOpts, max_entities: Option<usize>) -> ArcParams {
    ArcParams {
        topics: opts.topics,
        clusters: opts.clusters,
        seed: opts.seed,
        alpha: opts.alpha,
        beta: opts.beta,
        iterations: opts.iterations,
        lambda: opts.lambda,
        top_words: opts.top_words,
        max_entities,
    }
}

fn extract_options(flags: &ExtractFlags) -> ExtractOptions {
    ExtractOptions {
        extensions: flags.extensions.clone(),
        strip_comments: flags.strip_comments,
        strip_license_header: flags.strip_license,
        stem: !flags.no_stem,
    }
}

fn stop_words(stopwords: Option<&Path>, system_name: Option<&str>) -> Result<StopWordSet> {
    Ok(build_stopword_set(ENGLISH_STOP_WORDS, stopwords, system_name)?)
}

fn method_of(m: MethodArg) -> Method {
    match m {
        MethodArg::Pkg => Method::Pkg,
        MethodArg::Acdc => Method::Acdc,
        MethodArg::Arc => Method::Arc,
    }
}

/// Recovery settings for one method; the entity cap goes to that method.
fn recovery_config(method: Method, arc: &ArcOpts, max_entities: Option<usize>) -> RecoveryConfig {
    let default_cap = ArcParams::default().max_entities;
    RecoveryConfig {
        arc: arc_params(arc, if method == Method::Arc { max_entities.or(default_cap) } else { default_cap }),
        acdc_max_entities: if method == Method::Acdc { max_entities } else { None },
    }
}

/// Applies `ARCHREC_SEED` to a JSON config that does not set the ARC seed.
fn apply_env_seed(config: &mut Value) -> Result<()> {
    let Ok(raw) = std::env::var(SEED_VAR) else {
        return Ok(());
    };
    let seed: u64 = raw.trim().parse().map_err(|_| CliError {
        kind: "config",
        message: format!("{SEED_VAR} must be an unsigned integer, got `{raw}`"),
    })?;
    let Value::Object(root) = config else {
        return Ok(());
    };
    let recovery = root.entry("recovery").or_insert_with(|| json!({}));
    if let Value::Object(recovery) = recovery {
        let arc = recovery.entry("arc").or_insert_with(|| json!({}));
        if let Value::Object(arc) = arc {
            arc.entry("seed").or_insert(json!(seed));
        }
    }
    Ok(())
}

fn system_spec(src: Option<&Path>, deps: Option<&Path>, corpus: Option<&Path>, flags: &ExtractFlags) -> SystemSpec {
    SystemSpec {
        src: src.map(absolute),
        deps: deps.map(absolute),
        corpus: corpus.map(absolute),
        extract: extract_options(flags),
        system_name: flags.system_name.clone(),
        stopwords: flags.stopwords.as_deref().map(absolute),
    }
}

// ---------- commands ----------

fn extract(a: ExtractArgs) -> Result<()> {
    let options = extract_options(&a.flags);
    let stops = stop_words(a.flags.stopwords.as_deref(), a.flags.system_name.as_deref())?;
    let x = scan_source_tree(&a.src, &options, &stops)?;
    for w in &x.warnings {
        eprintln!("warning: {w}");
    }
    write(&a.out, &serialize_deps(&x.graph))?;
    if let Some(path) = &a.corpus {
        write(path, &to_json(&x.corpus)?)?;
    }
    if a.json {
        let summary = json!({
            "entities": x.entities.len(),
            "edges": x.graph.edge_count(),
            "documents": x.corpus.len(),
            "warnings": x.warnings,
            "runConfig": {
                "command": "extract",
                "src": absolute(&a.src),
                "out": absolute(&a.out),
                "corpus": a.corpus.as_deref().map(absolute),
                "options": options,
                "systemName": a.flags.system_name,
                "stopwords": a.flags.stopwords.as_deref().map(absolute),
            },
        });
        print!("{}", to_json(&summary)?);
    } else {
        println!(
            "{} entities, {} dependencies, {} documents",
            x.entities.len(),
            x.graph.edge_count(),
            x.corpus.len()
        );
    }
    Ok(())
}

fn report_recovery(arch: &Architecture, out: Option<&Path>, json: bool, run_config: Value) -> Result<()> {
    let rsf = serialize_arch(arch);
    if let Some(path) = out {
        write(path, &rsf)?;
    }
    if json {
        let v = json!({
            "clusterCount": arch.cluster_count(),
            "entityCount": arch.entity_count(),
            "architecture": arch,
            "runConfig": run_config,
        });
        print!("{}", to_json(&v)?);
    } else if out.is_none() {
        print!("{rsf}");
    } else {
        println!("{} clusters, {} entities", arch.cluster_count(), arch.entity_count());
    }
    Ok(())
}

fn recover_pkg(a: PkgArgs) -> Result<()> {
    let facts = load_facts(&a.deps, a.corpus.as_deref())?;
    let arch = recover(Method::Pkg, &facts, &RecoveryConfig::default())?;
    let run_config = json!({
        "command": "recover",
        "method": Method::Pkg,
        "deps": absolute(&a.deps),
        "corpus": a.corpus.as_deref().map(absolute),
        "out": a.out.as_deref().map(absolute),
    });
    report_recovery(&arch, a.out.as_deref(), a.json, run_config)
}

fn recover_acdc(a: AcdcArgs) -> Result<()> {
    let facts = load_facts(&a.deps, a.corpus.as_deref())?;
    let cfg = RecoveryConfig {
        acdc_max_entities: a.max_entities,
        ..RecoveryConfig::default()
    };
    let arch = recover(Method::Acdc, &facts, &cfg)?;
    let run_config = json!({
        "command": "recover",
        "method": Method::Acdc,
        "deps": absolute(&a.deps),
        "corpus": a.corpus.as_deref().map(absolute),
        "out": a.out.as_deref().map(absolute),
        "maxEntities": a.max_entities,
    });
    report_recovery(&arch, a.out.as_deref(), a.json, run_config)
}

fn recover_arc_cmd(a: ArcArgs) -> Result<()> {
    let graph = parse_deps_rsf(&read(&a.deps)?).map_err(|e| in_file(&a.deps, e))?;
    let corpus = load_corpus(&a.corpus)?;
    let params = arc_params(&a.arc, Some(a.max_entities));
    let rec = recover_arc(&corpus, &graph, &params)?;
    if let Some(path) = &a.concerns {
        write(path, &to_json(&rec.concerns)?)?;
    }
    let run_config = json!({
        "command": "recover",
        "method": Method::Arc,
        "deps": absolute(&a.deps),
        "corpus": absolute(&a.corpus),
        "out": a.out.as_deref().map(absolute),
        "concerns": a.concerns.as_deref().map(absolute),
        "arc": params,
        "effectiveClusters": params.cluster_count_for(rec.architecture.entity_count()),
    });
    report_recovery(&rec.architecture, a.out.as_deref(), a.json, run_config)
}

fn compare(a: CompareArgs) -> Result<()> {
    if a.th.is_some() && !matches!(a.metric, Metric::Cvg) {
        usage_error(ErrorKind::ArgumentConflict, "--th only applies to cvg");
    }
    let a1 = load_arch(&a.a)?;
    let a2 = load_arch(&a.b)?;
    let mut run_config = json!({
        "command": "compare",
        "a": absolute(&a.a),
        "b": absolute(&a.b),
    });
    let (metric, output) = match a.metric {
        Metric::A2a => ("a2a", serde_json::to_value(a2a(&a1, &a2))?),
        Metric::Mojofm => ("mojofm", serde_json::to_value(mojofm(&a1, &a2)?)?),
        Metric::Cvg => {
            let params = match a.th {
                Some(th) => CvgParams::new(th)?,
                None => CvgParams::default(),
            };
            run_config["threshold"] = json!(params.threshold);
            let forward = cvg(&a1, &a2, params)?;
            let backward = cvg(&a2, &a1, params)?;
            ("cvg", json!({ "forward": forward, "backward": backward }))
        }
    };
    run_config["metric"] = json!(metric);
    if a.json {
        let mut v = output;
        if let Value::Object(map) = &mut v {
            map.insert("metric".into(), json!(metric));
            map.insert("runConfig".into(), run_config);
        }
        print!("{}", to_json(&v)?);
    } else if let Some(value) = output.get("value").and_then(Value::as_f64) {
        println!("{value:.3}");
    } else {
        let f = output["forward"]["value"].as_f64().unwrap_or(f64::NAN);
        let b = output["backward"]["value"].as_f64().unwrap_or(f64::NAN);
        println!("forward {f:.3}");
        println!("backward {b:.3}");
    }
    Ok(())
}

fn smells(a: SmellsArgs) -> Result<()> {
    let arch = load_arch(&a.arch)?;
    let ca: ConcernAssignment = serde_json::from_str(&read(&a.concerns)?)?;
    let th = SmellThresholds {
        relevance: a.relevance_th,
        overload: a.overload_th,
        scatter: a.scatter_th,
        duplicate: a.duplicate_th,
        orthogonality: a.orthogonality_th,
    };
    th.validate()?;
    let findings = detect_smells(&arch, &ca, &th);
    let mut report = json!({
        "findings": findings,
        "runConfig": {
            "command": "smells",
            "arch": absolute(&a.arch),
            "concerns": absolute(&a.concerns),
            "thresholds": th,
            "audit": a.audit,
        },
    });
    if a.audit {
        let stops = stop_words(a.stopwords.as_deref(), a.system_name.as_deref())?;
        report["audit"] = serde_json::to_value(audit_concerns(&ca, &stops, &LicenseLexicon::apache(), th.duplicate))?;
        report["runConfig"]["systemName"] = json!(a.system_name);
        report["runConfig"]["stopwords"] = json!(a.stopwords.as_deref().map(absolute));
    }
    emit(a.out.as_deref(), &to_json(&report)?)
}

fn trial_kind(k: TrialArg) -> TrialKind {
    match k {
        TrialArg::Determinism => TrialKind::Determinism,
        TrialArg::Proportionality => TrialKind::Proportionality,
        TrialArg::Continuity => TrialKind::Continuity,
        TrialArg::Isolation => TrialKind::Isolation,
    }
}

fn evaluate(a: EvaluateArgs) -> Result<()> {
    let mut raw: Value = serde_json::from_str(&read(&a.config)?)?;
    apply_env_seed(&mut raw)?;
    let cfg: TrialConfig = serde_json::from_value(raw)?;
    let config_path = absolute(&a.config);
    let base = config_path.parent().unwrap_or(Path::new("."));
    let input = cfg.system.load(base)?;
    let method = method_of(a.method);
    let kind = trial_kind(a.kind);
    let report = run_trial(kind, method, &input, &cfg)?;
    let run_config = json!({
        "command": "evaluate",
        "kind": kind,
        "method": method,
        "config": config_path,
        "trial": cfg,
    });
    let text = to_json(&with_run_config(&report, run_config)?)?;
    emit(a.out.as_deref(), &text)?;
    if a.out.is_some() {
        let kind = serde_json::to_value(kind)?;
        println!("{} {method}: {}", kind.as_str().unwrap_or_default(), report.verdict);
    }
    Ok(())
}

fn study(a: StudyArgs) -> Result<()> {
    let method = method_of(a.method);
    let scope = match a.topic_scope {
        ScopeArg::PerVersion => TopicScope::PerVersion,
        ScopeArg::Shared => TopicScope::Shared,
    };
    let cfg = recovery_config(method, &a.arc, a.max_entities);
    let mut versions = Vec::new();
    let mut specs = Vec::new();
    for dir in &a.versions {
        let deps = dir.join("deps.rsf");
        let spec = if deps.is_file() {
            let corpus = dir.join("corpus.json");
            system_spec(None, Some(&deps), corpus.is_file().then_some(corpus.as_path()), &a.flags)
        } else {
            system_spec(Some(dir), None, None, &a.flags)
        };
        let input = spec.load(Path::new("."))?;
        versions.push((dir.display().to_string(), input));
        specs.push(spec);
    }
    let report = evolution_study(&versions, method, scope, &cfg)?;
    let run_config = json!({
        "command": "study",
        "method": method,
        "topicScope": scope,
        "versions": specs,
        "recovery": cfg,
    });
    let text = to_json(&with_run_config(&report, run_config)?)?;
    emit(a.out.as_deref(), &text)?;
    if a.out.is_some() {
        for v in &report.versions {
            match (&v.architecture, &v.error) {
                (Some(arch), _) => println!("{}: {} clusters", v.label, arch.cluster_count()),
                (None, Some(e)) => println!("{}: failed: {e}", v.label),
                (None, None) => println!("{}: no result", v.label),
            }
        }
    }
    Ok(())
}

fn scorecard(a: ScorecardArgs) -> Result<()> {
    let method = method_of(a.method);
    let cfg = match &a.config {
        Some(path) => {
            let mut raw: Value = serde_json::from_str(&read(path)?)?;
            apply_env_seed(&mut raw)?;
            serde_json::from_value(raw)?
        }
        None => ScorecardConfig {
            recovery: recovery_config(method, &a.arc, a.max_entities),
            runs: a.runs,
            ..ScorecardConfig::default()
        },
    };
    let spec = system_spec(a.src.as_deref(), a.deps.as_deref(), a.corpus.as_deref(), &a.flags);
    let input = spec.load(Path::new("."))?;
    let card = criteria_scorecard(method, &input, &cfg);
    let run_config = json!({
        "command": "scorecard",
        "method": method,
        "system": spec,
        "scorecard": cfg,
        "configFile": a.config.as_deref().map(absolute),
    });
    let text = to_json(&with_run_config(&card, run_config)?)?;
    if let Some(path) = &a.out {
        write(path, &text)?;
    }
    if a.json {
        print!("{text}");
    } else {
        for row in &card.rows {
            println!("{:<4} {:<20} {:<24} {}", row.question, row.verdict, row.criterion, row.detail);
        }
        let f = &card.feasibility;
        match &f.error {
            Some(e) => println!("feasibility: {} entities, {} edges, failed: {e}", f.entities, f.edges),
            None => println!(
                "feasibility: {} entities, {} edges, {:.3} ms{}",
                f.entities,
                f.edges,
                f.wall_clock_ms,
                f.peak_memory_kb.map_or(String::new(), |kb| format!(", peak {kb} kB"))
            ),
        }
    }
    Ok(())
}
