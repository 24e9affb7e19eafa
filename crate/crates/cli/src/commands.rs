use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{BufWriter, Write};
use std::time::Instant;

use bunkbed::analysis::{
    batch_scan, bbc_gap_exact_with, complete_bbc_gap_exact_with, counterexample_gap, GapReport, GapSign, ScanEvent,
    ScanOptions, TransversalFamily,
};
use bunkbed::exact::{check_eq390, gadget_kernel_closed, terminal_kernel_exact_with, EnumOptions};
use bunkbed::graph::{
    build_complete_clone_instance, build_gadget, build_hollom, emit_edge_list, parse_edge_list, parse_graph6_with,
    BunkbedInstance, WeightedGraph, HOLLOM_POLES,
};
use bunkbed::hyper::{alt_bunkbed_probs, EvalMode};
use bunkbed::montecarlo::{mc_gap, mc_gap_parallel, mc_gap_with_early_stop, McEstimate, Model};
use bunkbed::rational::{fmt_rational, parse_rational, rat};
use bunkbed::verify::{run_criterion, CRITERIA};
use bunkbed::{Error, Rational};
use serde_json::{json, Value};

use crate::record::RunRecord;
use crate::{Cli, Command, GapArgs, GapMethod, GraphSource, McModel, Mode, ScanArgs};

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_MISMATCH: u8 = 3;
pub const EXIT_UNCERTIFIED: u8 = 4;
pub const EXIT_VIOLATION: u8 = 5;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Verification(_) => EXIT_MISMATCH,
            Error::Uncertified { .. } => EXIT_UNCERTIFIED,
            _ => EXIT_USAGE,
        };
        let mut message = e.to_string();
        if matches!(e, Error::CapExceeded { .. }) {
            message.push_str("; try --method mc");
        }
        Failure { code, message }
    }
}

type Outcome = Result<u8, Failure>;

struct Ctx {
    json: bool,
    workers: usize,
    start: Instant,
}

impl Ctx {
    fn enum_options(&self) -> EnumOptions {
        EnumOptions { workers: self.workers, ..Default::default() }
    }

    fn emit(&self, command: &str, inputs: BTreeMap<String, String>, result: Value, text: &str) {
        if self.json {
            let rec = RunRecord::new(command, inputs, result, self.start.elapsed().as_secs_f64());
            println!("{}", rec.to_line());
        } else {
            println!("{text}");
        }
    }
}

fn inputs<const N: usize>(pairs: [(&str, String); N]) -> BTreeMap<String, String> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn parse_p(text: &str) -> Result<Rational, Failure> {
    let p = parse_rational(text).ok_or_else(|| Failure::usage(format!("cannot parse probability `{text}`")))?;
    if p < rat(0, 1) || p > rat(1, 1) {
        return Err(Failure::usage(format!("probability {text} outside [0, 1]")));
    }
    Ok(p)
}

fn parse_set(text: &str) -> Result<BTreeSet<usize>, Failure> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| Failure::usage(format!("bad vertex `{s}` in `{text}`"))))
        .collect()
}

fn load_graph(src: &GraphSource, p: Option<&Rational>) -> Result<WeightedGraph, Failure> {
    let g = match (&src.graph, &src.graph6) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
            parse_edge_list(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?
        }
        (None, Some(s)) => parse_graph6_with(s.trim(), &rat(1, 2))?,
        (None, None) => return Err(Failure::usage("give --graph or --graph6")),
    };
    Ok(match p {
        Some(p) => g.with_uniform_probability(p),
        None => g,
    })
}

fn source_label(src: &GraphSource) -> String {
    match (&src.graph, &src.graph6) {
        (Some(path), _) => path.display().to_string(),
        (None, Some(s)) => format!("graph6:{s}"),
        _ => String::new(),
    }
}

pub fn run(cli: &Cli) -> Outcome {
    let workers = match cli.workers {
        Some(0) => return Err(Failure::usage("--workers must be at least 1")),
        Some(w) => {
            std::env::set_var("BUNKBED_WORKERS", w.to_string());
            w
        }
        None => bunkbed::hyper::default_workers(),
    };
    let ctx = Ctx { json: cli.json, workers, start: Instant::now() };
    match &cli.command {
        Command::GadgetKernel { n, p, check_390, oracle } => gadget_kernel(&ctx, *n, p, *check_390, *oracle),
        Command::HollomCheck => hollom_check(&ctx),
        Command::Counterexample { n, p, mode, bits } => counterexample(&ctx, *n, p, *mode, *bits),
        Command::Gap(args) => gap(&ctx, args),
        Command::BatchScan(args) => scan(&ctx, args),
        Command::CompleteBbc { graph, poles } => complete_bbc(&ctx, graph, poles),
        Command::CloneBuild { k, out } => clone_build(&ctx, *k, out.as_deref()),
        Command::VerifyPaper { criterion } => verify_paper(&ctx, criterion),
    }
}

fn gadget_kernel(ctx: &Ctx, n: usize, p_text: &str, check_390: bool, oracle: bool) -> Outcome {
    if n < 2 {
        return Err(Failure::usage("gadget-kernel needs n >= 2"));
    }
    let p = parse_p(p_text)?;
    let kernel = gadget_kernel_closed(n, &p)?;
    let mut result = json!({ "kernel": kernel });
    let mut text = TerminalLines::kernel(&kernel);
    let mut code = 0;
    if check_390 {
        let ok = check_eq390(&kernel);
        result["check_390"] = json!(ok);
        text.push_str(&format!("\ncheck_390 {ok}"));
    }
    if oracle {
        if n > 6 {
            return Err(Failure::usage("--oracle supports n <= 6"));
        }
        let g = build_gadget(n, &p)?;
        let brute = terminal_kernel_exact_with(&g.graph, g.terminal_a, g.terminal_b, g.terminal_c, ctx.enum_options())?;
        let ok = brute == kernel;
        result["oracle"] = json!(if ok { "OK" } else { "MISMATCH" });
        text.push_str(if ok { "\noracle OK" } else { "\noracle MISMATCH" });
        if !ok {
            result["oracle_kernel"] = json!(brute);
            code = EXIT_MISMATCH;
        }
    }
    let record_inputs = inputs([
        ("n", n.to_string()),
        ("p", fmt_rational(&p)),
        ("check_390", check_390.to_string()),
        ("oracle", oracle.to_string()),
    ]);
    ctx.emit("gadget-kernel", record_inputs, result, &text);
    Ok(code)
}

struct TerminalLines;

impl TerminalLines {
    fn kernel(k: &bunkbed::exact::HyperedgeKernel) -> String {
        bunkbed::exact::TerminalPartition::ALL
            .iter()
            .map(|&part| format!("{:<6}{}", part.name(), fmt_rational(k.get(part))))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

fn over_64(r: &Rational) -> String {
    let scaled = r * rat(64, 1);
    if scaled.is_integer() {
        format!("{}/64", scaled.to_integer())
    } else {
        fmt_rational(r)
    }
}

fn hollom_check(ctx: &Ctx) -> Outcome {
    let (s, t) = HOLLOM_POLES;
    let (same, cross) = alt_bunkbed_probs(&build_hollom(), s, t)?;
    let ok = same == rat(12, 64) && cross == rat(13, 64);
    let status = if ok { "PASS" } else { "FAIL" };
    let result = json!({
        "p_same": fmt_rational(&same),
        "p_cross": fmt_rational(&cross),
        "p_same_64": over_64(&same),
        "p_cross_64": over_64(&cross),
        "status": status,
    });
    let text = format!(
        "p_same  {} ({})\np_cross {} ({})\n{status}",
        fmt_rational(&same),
        over_64(&same),
        fmt_rational(&cross),
        over_64(&cross)
    );
    ctx.emit("hollom-check", BTreeMap::new(), result, &text);
    Ok(if ok { 0 } else { EXIT_MISMATCH })
}

fn log10_value(report: &GapReport) -> Value {
    match report.log10_window() {
        None => Value::Null,
        Some((lo, hi)) if lo == hi => json!(lo),
        Some((lo, hi)) => json!([lo.floor() as i64, hi.ceil() as i64]),
    }
}

fn log10_text(report: &GapReport) -> String {
    match report.log10_window() {
        None => "none".into(),
        Some((lo, hi)) if lo == hi => format!("{lo:.3}"),
        Some((lo, hi)) => format!("[{}, {}]", lo.floor() as i64, hi.ceil() as i64),
    }
}

fn report_value(report: &GapReport) -> Value {
    let mut v = serde_json::to_value(report).expect("reports serialize");
    v["log10_abs_gap"] = log10_value(report);
    v
}

fn sign_name(sign: GapSign) -> Value {
    serde_json::to_value(sign).expect("signs serialize")
}

fn counterexample(ctx: &Ctx, n: usize, p_text: &str, mode: Mode, bits: u32) -> Outcome {
    let p = parse_p(p_text)?;
    if bits == 0 {
        return Err(Failure::usage("--bits must be positive"));
    }
    let eval = match mode {
        Mode::Exact => EvalMode::Exact,
        Mode::Interval => EvalMode::Interval { bits },
    };
    let report = counterexample_gap(n, &p, eval)?;
    let text = format!(
        "sign {}\nlog10|gap| {}\nprecision {}\nwork {} configurations",
        sign_name(report.sign).as_str().unwrap_or("?"),
        log10_text(&report),
        report.precision_bits.map(|b| format!("{b} bits")).unwrap_or_else(|| "exact".into()),
        report.work
    );
    let mut record_inputs = inputs([("n", n.to_string()), ("p", fmt_rational(&p))]);
    record_inputs.insert("mode".into(), format!("{mode:?}").to_lowercase());
    if mode == Mode::Interval {
        record_inputs.insert("bits".into(), bits.to_string());
    }
    ctx.emit("counterexample", record_inputs, report_value(&report), &text);
    Ok(if report.sign == GapSign::Uncertified { EXIT_UNCERTIFIED } else { 0 })
}

fn poles(values: &[usize]) -> Result<(usize, usize), Failure> {
    match values {
        [u, v] => Ok((*u, *v)),
        _ => Err(Failure::usage("--poles takes two vertices")),
    }
}

fn mc_value(e: &McEstimate) -> Value {
    let mut v = serde_json::to_value(e).expect("estimates serialize");
    let (lo, hi) = e.ci95();
    v["ci95"] = json!([lo, hi]);
    v
}

fn gap(ctx: &Ctx, args: &GapArgs) -> Outcome {
    let p = args.p.as_deref().map(parse_p).transpose()?;
    let g = load_graph(&args.graph, p.as_ref())?;
    let t = parse_set(&args.transversal)?;
    let (u, v) = poles(&args.poles)?;
    let b = BunkbedInstance::new(g, t.iter().copied(), u, v)?;
    let mut record_inputs = inputs([
        ("graph", source_label(&args.graph)),
        ("transversal", t.iter().map(usize::to_string).collect::<Vec<_>>().join(",")),
        ("poles", format!("{u} {v}")),
        ("method", format!("{:?}", args.method).to_lowercase()),
    ]);
    if let Some(p) = &p {
        record_inputs.insert("p".into(), fmt_rational(p));
    }
    match args.method {
        GapMethod::Exact => {
            let report = bbc_gap_exact_with(&b, ctx.enum_options())?;
            let text = format!(
                "p_same  {}\np_cross {}\ngap     {}\nsign    {}",
                report.p_same,
                report.p_cross,
                report.gap,
                sign_name(report.sign).as_str().unwrap_or("?")
            );
            ctx.emit("gap", record_inputs, report_value(&report), &text);
        }
        GapMethod::Mc => {
            if args.samples == 0 {
                return Err(Failure::usage("--samples must be at least 1"));
            }
            let model = match args.model {
                McModel::Standard => Model::Standard,
                McModel::Alternative => Model::Alternative,
            };
            let e = match args.early_stop {
                Some(threshold) => mc_gap_with_early_stop(&b, model, args.samples, args.seed, threshold),
                None if ctx.workers > 1 => mc_gap_parallel(&b, model, args.samples, args.seed, ctx.workers),
                None => mc_gap(&b, model, args.samples, args.seed),
            };
            record_inputs.insert("samples".into(), args.samples.to_string());
            record_inputs.insert("seed".into(), args.seed.to_string());
            record_inputs.insert("model".into(), format!("{:?}", args.model).to_lowercase());
            if let Some(threshold) = args.early_stop {
                record_inputs.insert("early_stop".into(), threshold.to_string());
            }
            let (lo, hi) = e.ci95();
            let text = format!(
                "p_same  {:.6}\np_cross {:.6}\ngap     {:.6} +- {:.6} (95% CI [{lo:.6}, {hi:.6}])\nsamples {}{}",
                e.p_same_hat,
                e.p_cross_hat,
                e.gap_hat,
                1.959963984540054 * e.std_error,
                e.samples,
                if e.early_stopped { " (stopped early)" } else { "" }
            );
            ctx.emit("gap", record_inputs, mc_value(&e), &text);
        }
    }
    Ok(0)
}

fn scan(ctx: &Ctx, args: &ScanArgs) -> Outcome {
    let p = parse_p(&args.p)?;
    let text = fs::read_to_string(&args.graph6_file)
        .map_err(|e| Failure::usage(format!("{}: {e}", args.graph6_file.display())))?;
    let transversals = if args.transversal.is_empty() {
        TransversalFamily::All
    } else {
        TransversalFamily::Given(args.transversal.iter().map(|s| parse_set(s)).collect::<Result<_, _>>()?)
    };
    let mut out = match &args.out {
        Some(path) => Some(BufWriter::new(
            fs::File::create(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?,
        )),
        None => None,
    };
    let mut write_line = |line: &str, to_stdout: bool| {
        if to_stdout {
            println!("{line}");
        }
        if let Some(w) = out.as_mut() {
            let _ = writeln!(w, "{line}");
            let _ = w.flush();
        }
    };

    let mut graphs = Vec::new();
    let mut lines = Vec::new();
    let mut parse_errors = 0;
    let mut skipped = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        match parse_graph6_with(line, &p) {
            Ok(g) if args.max_vertices.is_some_and(|k| g.vertex_count() > k) => skipped += 1,
            Ok(g) => {
                graphs.push(g);
                lines.push(i + 1);
            }
            Err(e) => {
                parse_errors += 1;
                eprintln!("line {}: {e}", i + 1);
                let rec = json!({ "event": "parse-error", "line": i + 1, "message": e.to_string() });
                write_line(&rec.to_string(), ctx.json);
            }
        }
    }

    let options = ScanOptions {
        p: Some(p.clone()),
        transversals,
        enumeration: ctx.enum_options(),
        verbose: args.verbose,
    };
    let summary = batch_scan(graphs, &options, |event| {
        let (kind, value) = match &event {
            ScanEvent::Violation(r) => ("violation", serde_json::to_value(r).expect("records serialize")),
            ScanEvent::Instance(r) => ("instance", serde_json::to_value(r).expect("records serialize")),
            ScanEvent::GraphError { graph_index, message } => {
                eprintln!("line {}: {message}", lines[*graph_index]);
                ("graph-error", json!({ "graph_index": graph_index, "message": message }))
            }
        };
        let index = match &event {
            ScanEvent::Violation(r) | ScanEvent::Instance(r) => r.graph_index,
            ScanEvent::GraphError { graph_index, .. } => *graph_index,
        };
        let mut rec = json!({ "event": kind, "line": lines[index] });
        if let (Value::Object(dst), Value::Object(src)) = (&mut rec, value) {
            dst.extend(src);
        }
        if !ctx.json && kind == "violation" {
            println!("VIOLATION line {}: {}", lines[index], rec);
        }
        write_line(&rec.to_string(), ctx.json && kind != "graph-error");
    });

    let mut result = serde_json::to_value(&summary).expect("summaries serialize");
    result["parse_errors"] = json!(parse_errors);
    result["skipped_by_size"] = json!(skipped);
    let record_inputs = inputs([
        ("graph6_file", args.graph6_file.display().to_string()),
        ("p", fmt_rational(&p)),
        ("max_vertices", args.max_vertices.map(|k| k.to_string()).unwrap_or_default()),
        (
            "transversals",
            if args.transversal.is_empty() { "all".into() } else { args.transversal.join(";") },
        ),
    ]);
    let rec = RunRecord::new("batch-scan", record_inputs, result, ctx.start.elapsed().as_secs_f64());
    write_line(&rec.to_line(), ctx.json);
    if !ctx.json {
        println!(
            "graphs {}\ninstances {}\nviolations {}\nmin gap {}\nparse errors {}",
            summary.graphs,
            summary.instances,
            summary.violations,
            summary.min_gap.as_ref().map(fmt_rational).unwrap_or_else(|| "none".into()),
            parse_errors
        );
        if let Some(w) = &summary.witness {
            println!(
                "witness line {}: {} T = {:?} poles ({}, {})",
                lines[w.graph_index],
                w.graph6.as_deref().unwrap_or("?"),
                w.transversal,
                w.u,
                w.v
            );
        }
    }
    Ok(if summary.violations > 0 { EXIT_VIOLATION } else { 0 })
}

fn complete_bbc(ctx: &Ctx, src: &GraphSource, pole_args: &[usize]) -> Outcome {
    let g = load_graph(src, None)?;
    let (u, v) = poles(pole_args)?;
    let report = complete_bbc_gap_exact_with(&g, u, v, ctx.enum_options())?;
    let text = format!(
        "p_same  {}\np_cross {}\ngap     {}\nsign    {}",
        report.p_same,
        report.p_cross,
        report.gap,
        sign_name(report.sign).as_str().unwrap_or("?")
    );
    let record_inputs = inputs([("graph", source_label(src)), ("poles", format!("{u} {v}"))]);
    ctx.emit("complete-bbc", record_inputs, report_value(&report), &text);
    Ok(0)
}

const PUBLISHED_K: usize = 102;
const PUBLISHED_VERTICES: usize = 7523;
const PUBLISHED_EDGES: usize = 15654;

fn clone_build(ctx: &Ctx, k: usize, out: Option<&std::path::Path>) -> Outcome {
    let g = build_complete_clone_instance(k)?;
    let (v, e) = (g.vertex_count(), g.edge_count());
    let (expect_v, expect_e) = (7222 + 3 * (k - 1), 14442 + 12 * (k - 1));
    let counts_ok = v == expect_v && e == expect_e;
    let mut result = json!({
        "vertices": v,
        "edges": e,
        "expected_vertices": expect_v,
        "expected_edges": expect_e,
        "counts": if counts_ok { "PASS" } else { "FAIL" },
    });
    let mut text = format!(
        "vertices {v} (formula {expect_v})\nedges {e} (formula {expect_e})\ncounts {}",
        if counts_ok { "PASS" } else { "FAIL" }
    );
    if k == PUBLISHED_K {
        let matches = v == PUBLISHED_VERTICES && e == PUBLISHED_EDGES;
        result["published"] = json!({ "vertices": PUBLISHED_VERTICES, "edges": PUBLISHED_EDGES, "matches": matches });
        text.push_str(&format!(
            "\npublished {PUBLISHED_VERTICES} vertices, {PUBLISHED_EDGES} edges: {}",
            if matches { "match" } else { "differs" }
        ));
    }
    if let Some(path) = out {
        fs::write(path, emit_edge_list(&g)).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
        result["out"] = json!(path.display().to_string());
    }
    let mut record_inputs = inputs([("k", k.to_string())]);
    if let Some(path) = out {
        record_inputs.insert("out".into(), path.display().to_string());
    }
    ctx.emit("clone-build", record_inputs, result, &text);
    Ok(if counts_ok { 0 } else { EXIT_MISMATCH })
}

fn verify_paper(ctx: &Ctx, only: &[usize]) -> Outcome {
    if let Some(bad) = only.iter().find(|&&c| c == 0 || c > CRITERIA) {
        return Err(Failure::usage(format!("no criterion {bad}; use 1 to {CRITERIA}")));
    }
    let ids: Vec<usize> = if only.is_empty() { (1..=CRITERIA).collect() } else { only.to_vec() };
    let mut results = Vec::new();
    for id in ids {
        let r = run_criterion(id);
        if !ctx.json {
            println!("{r}");
        }
        results.push(r);
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    let result = json!({ "criteria": results, "passed": results.len() - failed, "failed": failed });
    let text = format!("{} of {} criteria pass", results.len() - failed, results.len());
    let record_inputs = inputs([("criteria", only.iter().map(usize::to_string).collect::<Vec<_>>().join(","))]);
    ctx.emit("verify-paper", record_inputs, result, &text);
    Ok(if failed > 0 { EXIT_MISMATCH } else { 0 })
}
