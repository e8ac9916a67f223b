//! `gstwalk` command-line front end.
//!
//! Every verb writes one JSON [`Report`] to stdout (or `--out`) and a short
//! summary to stderr. Exit codes: 0 success, 1 negative verdict for `check`,
//! `certify` and `golden`, 2 on any error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use gstwalk::exact::{certify_gst, Verdict};
use gstwalk::golden::{run_golden, GoldenConfig};
use gstwalk::gst::{classify, equal_card_structure, has_gst, has_gst_from, DEFAULT_ZERO_TOL};
use gstwalk::io::group_file::read_group_file;
use gstwalk::io::load_graph_arg;
use gstwalk::io::report::{GraphSummary, Report, Tolerances, SCHEMA_VERSION};
use gstwalk::io::time::{parse_time, TimeSpec};
use gstwalk::poset::{closed_vs_bijective_report, maximal_pairs, periodic_sets, st_poset, topology_at, verify_topology_axioms, DEFAULT_N_CAP};
use gstwalk::scan::{bipartite_times, entry_zero_scan, monogamy_audit, srg_times, verify_candidates, ScanParams};
use gstwalk::spectral::verify_spectrum;
use gstwalk::symmetry::{
    group_closure, gst_symmetry_check, is_automorphism, known_generators, orbit_of_set, setwise_stabilizer, vertex_orbits,
    DEFAULT_GROUP_CAP,
};
use gstwalk::{decompose, transition, Error, GeneratorSpec, Graph, Result, Spectrum, VertexSet};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

const SRG_CONFERENCE_BOUND: u64 = 100_000;
const BIPARTITE_DENOMINATOR_BOUND: u64 = 64;

#[derive(Parser, Debug)]
#[command(name = "gstwalk", version, about = "Group state transfer in continuous-time quantum walks")]
pub struct Cli {
    #[command(subcommand)]
    pub verb: Verb,
}

#[derive(Args, Debug, Clone)]
pub struct GraphArgs {
    /// Graph DSL (e.g. `hypercube:3`, `join(complete:1,cycle:4)`) or `@path` to an edge list.
    #[arg(long)]
    pub graph: String,
    /// Eigenvalue clustering tolerance; default 1e-8 * max(1, spectral radius).
    #[arg(long)]
    pub eigen_tol: Option<f64>,
    /// Entries of U(t) at or below this magnitude count as zero.
    #[arg(long, default_value_t = DEFAULT_ZERO_TOL)]
    pub zero_tol: f64,
    /// Write the JSON report here instead of stdout.
    #[arg(long, visible_alias = "report")]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Verb {
    /// Distinct eigenvalues, multiplicities, projectors and their diagnostics.
    Spectrum {
        #[command(flatten)]
        g: GraphArgs,
    },
    /// The transition matrix U(t) as [re, im] pairs.
    Evolve {
        #[command(flatten)]
        g: GraphArgs,
        #[arg(long)]
        time: String,
    },
    /// Decide (S,T)-GST at one time; exit 1 if it fails.
    Check {
        #[command(flatten)]
        g: GraphArgs,
        #[arg(long)]
        source: String,
        #[arg(long)]
        target: String,
        #[arg(long)]
        time: String,
    },
    /// Scan an interval for times with nontrivial bijective GST.
    Scan {
        #[command(flatten)]
        g: GraphArgs,
        #[arg(long, default_value = "0")]
        from: String,
        #[arg(long, default_value = "2pi")]
        to: String,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        /// With --target, report the first event carrying (S,T) bijectively.
        #[arg(long)]
        source: Option<String>,
        #[arg(long)]
        target: Option<String>,
    },
    /// Maximal pairs, the state-transfer poset (n <= 5) and periodic sets at one time.
    Poset {
        #[command(flatten)]
        g: GraphArgs,
        #[arg(long)]
        time: String,
    },
    /// Closed and open sets at one time.
    Topology {
        #[command(flatten)]
        g: GraphArgs,
        #[arg(long)]
        time: String,
    },
    /// Automorphism group orbits; with --source, --target and --time, the symmetry checks.
    Orbits {
        #[command(flatten)]
        g: GraphArgs,
        /// `@path` to a permutation file; defaults to the known generators of the family.
        #[arg(long)]
        group: Option<String>,
        #[arg(long)]
        source: Option<String>,
        #[arg(long)]
        target: Option<String>,
        #[arg(long)]
        time: Option<String>,
    },
    /// Exact (S,T)-GST certificate at t = 2pi p/q; exit 1 if certified not-GST.
    Certify {
        #[command(flatten)]
        g: GraphArgs,
        #[arg(long)]
        source: String,
        #[arg(long)]
        target: String,
        /// `2pi:p/q`, or any rational multiple of pi such as `pi/2`.
        #[arg(long)]
        time: String,
    },
    /// Run the acceptance suite; exit 0 iff every criterion passes.
    Golden {
        /// Cases per randomized property suite.
        #[arg(long, default_value_t = 10_000)]
        cases: usize,
        #[arg(long, default_value_t = GoldenConfig::default().seed)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

impl Verb {
    fn name(&self) -> &'static str {
        match self {
            Verb::Spectrum { .. } => "spectrum",
            Verb::Evolve { .. } => "evolve",
            Verb::Check { .. } => "check",
            Verb::Scan { .. } => "scan",
            Verb::Poset { .. } => "poset",
            Verb::Topology { .. } => "topology",
            Verb::Orbits { .. } => "orbits",
            Verb::Certify { .. } => "certify",
            Verb::Golden { .. } => "golden",
        }
    }

    fn out(&self) -> Option<&Path> {
        match self {
            Verb::Spectrum { g }
            | Verb::Evolve { g, .. }
            | Verb::Check { g, .. }
            | Verb::Scan { g, .. }
            | Verb::Poset { g, .. }
            | Verb::Topology { g, .. }
            | Verb::Orbits { g, .. }
            | Verb::Certify { g, .. } => g.out.as_deref(),
            Verb::Golden { out, .. } => out.as_deref(),
        }
    }
}

/// What a verb produced before it is wrapped into a [`Report`].
struct Outcome {
    graph: Option<GraphSummary>,
    tolerances: Tolerances,
    results: Value,
    warnings: Vec<String>,
    exit: i32,
    summary: String,
}

struct Loaded {
    graph: Graph,
    spec: Spectrum,
    summary: GraphSummary,
    zero_tol: f64,
}

impl Loaded {
    fn new(args: &GraphArgs) -> Result<Loaded> {
        if !(args.zero_tol > 0.0 && args.zero_tol.is_finite()) {
            return Err(Error::Precondition(format!("--zero-tol must be positive, got {}", args.zero_tol)));
        }
        let tree: GeneratorSpec = load_graph_arg(&args.graph)?;
        let graph = tree.build()?;
        let spec = decompose(&graph, args.eigen_tol)?;
        let summary = GraphSummary::new(&args.graph, &graph, &spec);
        Ok(Loaded { graph, spec, summary, zero_tol: args.zero_tol })
    }

    fn set(&self, text: &str) -> Result<VertexSet> {
        parse_set(self.graph.n(), text)
    }

    fn outcome(self, results: Value, warnings: Vec<String>, exit: i32, summary: String) -> Outcome {
        Outcome {
            graph: Some(self.summary),
            tolerances: Tolerances { eigen_tol: self.spec.eigen_tol(), zero_tol: self.zero_tol },
            results,
            warnings,
            exit,
            summary,
        }
    }
}

/// `1,2,5`, or `{}` / empty for the empty set.
pub fn parse_set(n: usize, text: &str) -> Result<VertexSet> {
    let trimmed = text.trim().trim_start_matches('{').trim_end_matches('}');
    let mut labels = Vec::new();
    for tok in trimmed.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        labels.push(
            tok.parse::<usize>()
                .map_err(|_| Error::Precondition(format!("bad vertex {tok:?} in set {text:?}")))?,
        );
    }
    VertexSet::from_one_based(n, &labels)
}

fn real_time(text: &str) -> Result<f64> {
    Ok(parse_time(text)?.value())
}

fn to_value<T: serde::Serialize>(x: &T) -> Result<Value> {
    Ok(serde_json::to_value(x)?)
}

fn matrix_json(n: usize, get: impl Fn(usize, usize) -> Value) -> Value {
    Value::Array((0..n).map(|b| Value::Array((0..n).map(|a| get(b, a)).collect())).collect())
}

fn spectrum_verb(args: &GraphArgs) -> Result<Outcome> {
    let l = Loaded::new(args)?;
    let n = l.graph.n();
    let diag = verify_spectrum(&l.spec);
    let projectors: Vec<Value> = l.spec.projectors().iter().map(|e| matrix_json(n, |b, a| json!(e[(b, a)]))).collect();
    let srg = l.graph.recognize_srg();
    let mut warnings = Vec::new();
    if !diag.within(l.spec.eigen_tol()) {
        warnings.push(format!("spectral identities deviate by {:.3e}", diag.max_deviation()));
    }
    let results = json!({
        "eigenvalues": l.spec.eigenvalues(),
        "multiplicities": l.spec.multiplicities(),
        "spectral_radius": l.spec.spectral_radius(),
        "projectors": projectors,
        "diagnostics": to_value(&diag)?,
        "bipartite": l.graph.bipartition()?.is_some(),
        "strongly_regular": to_value(&srg)?,
    });
    let summary = format!("{} distinct eigenvalues, max deviation {:.2e}", l.spec.eigenvalues().len(), diag.max_deviation());
    Ok(l.outcome(results, warnings, EXIT_OK, summary))
}

fn evolve_verb(args: &GraphArgs, time: &str) -> Result<Outcome> {
    let l = Loaded::new(args)?;
    let t = real_time(time)?;
    let u = transition(&l.spec, t);
    let n = l.graph.n();
    let results = json!({
        "time": t,
        "matrix": matrix_json(n, |b, a| { let z = u.get(b, a); json!([z.re, z.im]) }),
        "magnitudes": matrix_json(n, |b, a| json!(u.get(b, a).norm())),
        "unitarity_defect": u.unitarity_defect(),
        "symmetry_defect": u.symmetry_defect(),
    });
    let summary = format!("U({t}) on {n} vertices, unitarity defect {:.2e}", u.unitarity_defect());
    Ok(l.outcome(results, vec![], EXIT_OK, summary))
}

fn check_verb(args: &GraphArgs, source: &str, target: &str, time: &str) -> Result<Outcome> {
    let l = Loaded::new(args)?;
    let (s, t_set) = (l.set(source)?, l.set(target)?);
    let t = real_time(time)?;
    let u = transition(&l.spec, t);
    let mut report = has_gst_from(&u, &s, &t_set, l.zero_tol);
    report.classification = classify(&report, &u, l.zero_tol);
    let mut warnings: Vec<String> = report
        .borderline
        .iter()
        .map(|b| format!("borderline entry U[{},{}] = {:.3e} within 10x zero_tol", b.row, b.col, b.magnitude))
        .collect();
    let structure = if report.holds && s.len() == t_set.len() {
        let r = equal_card_structure(&l.spec, &s, &t_set, t, l.zero_tol)?;
        if !r.all_hold() {
            warnings.push("equal-cardinality consequences fail; the verdict sits near the tolerance".into());
        }
        Some(r)
    } else {
        None
    };
    let exit = if report.holds { EXIT_OK } else { EXIT_NEGATIVE };
    let summary = format!(
        "({s},{t_set})-GST at t = {t}: {} (residual {:.3e})",
        if report.holds { "holds" } else { "fails" },
        report.residual
    );
    let results = json!({ "gst": to_value(&report)?, "equal_cardinality": to_value(&structure)? });
    Ok(l.outcome(results, warnings, exit, summary))
}

fn scan_verb(args: &GraphArgs, from: &str, to: &str, step: f64, source: Option<&str>, target: Option<&str>) -> Result<Outcome> {
    let l = Loaded::new(args)?;
    let params = ScanParams {
        from: real_time(from)?,
        to: real_time(to)?,
        step,
        zero_tol: l.zero_tol,
        ..ScanParams::default()
    };
    let result = entry_zero_scan(&l.spec, &params)?;
    let mut warnings = result.warnings.clone();
    let audit = monogamy_audit(&[&result]);
    if !audit.violations.is_empty() {
        warnings.push(format!("{} monogamy violations; check tolerances", audit.violations.len()));
    }

    let mut candidates = Vec::new();
    if l.graph.bipartition()?.is_some() {
        let mut c = bipartite_times(&l.graph, &l.spec, BIPARTITE_DENOMINATOR_BOUND)?;
        verify_candidates(&l.spec, &mut c, l.zero_tol);
        candidates.extend(c);
    }
    let srg = match l.graph.recognize_srg() {
        Some(p) => Some(srg_times(&p, SRG_CONFERENCE_BOUND)?),
        None => None,
    };
    let wanted = match (source, target) {
        (Some(s), Some(t)) => {
            let (s, t) = (l.set(s)?, l.set(t)?);
            let hit = result.find_bijective(&s, &t).map(|e| e.time);
            Some(json!({ "source": to_value(&s)?, "target": to_value(&t)?, "first_time": hit }))
        }
        (None, None) => None,
        _ => return Err(Error::Precondition("--source and --target go together".into())),
    };
    let summary = format!(
        "{} zero hits, {} nontrivial events on [{}, {}]",
        result.hits.len(),
        result.gst_events.len(),
        params.from,
        params.to
    );
    let results = json!({
        "scan": to_value(&result)?,
        "monogamy": to_value(&audit)?,
        "closed_form_candidates": to_value(&candidates)?,
        "strongly_regular": to_value(&srg)?,
        "requested_pair": wanted,
    });
    Ok(l.outcome(results, warnings, EXIT_OK, summary))
}

fn poset_verb(args: &GraphArgs, time: &str) -> Result<Outcome> {
    let l = Loaded::new(args)?;
    let t = real_time(time)?;
    let map = maximal_pairs(&l.spec, t, l.zero_tol);
    let mut warnings = Vec::new();
    let poset = match st_poset(&l.spec, t, l.zero_tol) {
        Ok(p) => Some(p),
        Err(Error::TooLarge(msg)) => {
            warnings.push(msg);
            None
        }
        Err(e) => return Err(e),
    };
    let periodic = match periodic_sets(&l.spec, t, l.zero_tol, DEFAULT_N_CAP) {
        Ok(p) => Some(p),
        Err(Error::TooLarge(msg)) => {
            warnings.push(msg);
            None
        }
        Err(e) => return Err(e),
    };
    let summary = format!(
        "t = {t}: {} poset pairs, {} periodic sets",
        poset.as_ref().map_or("-".into(), |p| p.pairs.len().to_string()),
        periodic.as_ref().map_or("-".into(), |p| p.len().to_string())
    );
    let maximal = poset.as_ref().map(|p| p.maximal_elements().into_iter().cloned().collect::<Vec<_>>());
    let results = json!({
        "maximal_pairs": to_value(&map)?,
        "st_poset": to_value(&poset)?,
        "poset_maximal_elements": to_value(&maximal)?,
        "periodic_sets": to_value(&periodic)?,
    });
    Ok(l.outcome(results, warnings, EXIT_OK, summary))
}

fn topology_verb(args: &GraphArgs, time: &str) -> Result<Outcome> {
    let l = Loaded::new(args)?;
    let t = real_time(time)?;
    let topo = topology_at(&l.spec, t, l.zero_tol, DEFAULT_N_CAP)?;
    let axioms = verify_topology_axioms(&topo);
    let closed = closed_vs_bijective_report(&l.spec, t, l.zero_tol, DEFAULT_N_CAP)?;
    let mut warnings = Vec::new();
    if !axioms {
        warnings.push("closed sets violate the topology axioms; the support threshold is inconsistent".into());
    }
    if !closed.non_bijective_closed.is_empty() {
        warnings.push(format!("{} t-closed sets without bijective GST", closed.non_bijective_closed.len()));
    }
    let kind = if topo.is_discrete() {
        "discrete"
    } else if topo.is_indiscrete() {
        "indiscrete"
    } else {
        "intermediate"
    };
    let summary = format!("t = {t}: {} closed sets ({kind})", topo.closed_sets.len());
    let results = json!({
        "topology": to_value(&topo)?,
        "kind": kind,
        "axioms_hold": axioms,
        "closed_vs_bijective": to_value(&closed)?,
    });
    Ok(l.outcome(results, warnings, EXIT_OK, summary))
}

fn orbits_verb(
    args: &GraphArgs,
    group: Option<&str>,
    source: Option<&str>,
    target: Option<&str>,
    time: Option<&str>,
) -> Result<Outcome> {
    let l = Loaded::new(args)?;
    let n = l.graph.n();
    let gens = match group {
        Some(arg) => {
            let path = arg
                .strip_prefix('@')
                .ok_or_else(|| Error::Precondition("--group expects @path".into()))?;
            read_group_file(Path::new(path))?
        }
        None => {
            let tree = load_graph_arg(&args.graph)?;
            known_generators(&tree).ok_or_else(|| {
                Error::Precondition("no known generators for this graph; pass --group @file".into())
            })?
        }
    };
    for (index, g) in gens.iter().enumerate() {
        if !is_automorphism(&l.graph, g)? {
            return Err(Error::NotAutomorphism { index });
        }
    }
    let g = group_closure(n, &gens, DEFAULT_GROUP_CAP)?;
    let orbits = vertex_orbits(&g);
    let mut results = json!({
        "group_order": g.order(),
        "generators": to_value(&gens)?,
        "vertex_orbits": to_value(&orbits)?,
    });
    let mut summary = format!("group of order {}, {} vertex orbits", g.order(), orbits.len());
    let mut exit = EXIT_OK;
    let mut warnings = Vec::new();
    if let Some(s) = source {
        let s = l.set(s)?;
        results["source_orbit"] = to_value(&orbit_of_set(&s, &g))?;
        results["source_stabilizer_order"] = json!(setwise_stabilizer(&s, &g).order());
        match (target, time) {
            (Some(t_set), Some(time)) => {
                let t_set = l.set(t_set)?;
                let t = real_time(time)?;
                if has_gst(&l.spec, &s, &t_set, t, l.zero_tol).holds {
                    let report = gst_symmetry_check(&l.spec, &l.graph, &s, &t_set, t, &g, l.zero_tol)?;
                    summary.push_str(&format!("; symmetry checks {}", if report.all_hold() { "hold" } else { "fail" }));
                    if !report.all_hold() {
                        exit = EXIT_NEGATIVE;
                    }
                    results["symmetry"] = to_value(&report)?;
                } else {
                    warnings.push(format!("({s},{t_set})-GST fails at t = {t}; symmetry checks skipped"));
                    results["symmetry"] = Value::Null;
                }
            }
            (None, None) => {}
            _ => return Err(Error::Precondition("--target and --time go together".into())),
        }
    }
    Ok(l.outcome(results, warnings, exit, summary))
}

fn certify_verb(args: &GraphArgs, source: &str, target: &str, time: &str) -> Result<Outcome> {
    let l = Loaded::new(args)?;
    let (s, t_set) = (l.set(source)?, l.set(target)?);
    let (p, q) = match parse_time(time)? {
        TimeSpec::TwoPiRational { p, q } => (p, q),
        TimeSpec::Real { value } => {
            return Err(Error::Precondition(format!(
                "certify needs a rational multiple of 2pi (e.g. 2pi:1/3 or pi/2), got {value}"
            )))
        }
    };
    let cert = certify_gst(&l.graph, &s, &t_set, p, q)?;
    let ok = cert.verdict == Verdict::CertifiedGst;
    let summary = format!(
        "({s},{t_set}) at 2pi*{}/{}: {}",
        cert.p,
        cert.q,
        if ok { "certified GST" } else { "certified not GST" }
    );
    let results = to_value(&cert)?;
    Ok(l.outcome(results, vec![], if ok { EXIT_OK } else { EXIT_NEGATIVE }, summary))
}

fn golden_verb(cases: usize, seed: u64) -> Result<Outcome> {
    let outcomes = run_golden(&GoldenConfig { property_cases: cases, seed });
    let mut lines = Vec::new();
    for o in &outcomes {
        lines.push(o.to_string());
        if !o.passed {
            lines.extend(o.details.iter().map(|d| format!("        {d}")));
        }
    }
    let all = outcomes.iter().all(|o| o.passed);
    Ok(Outcome {
        graph: None,
        tolerances: Tolerances { eigen_tol: f64::NAN, zero_tol: DEFAULT_ZERO_TOL },
        results: json!({ "all_passed": all, "criteria": to_value(&outcomes)? }),
        warnings: vec![],
        exit: if all { EXIT_OK } else { EXIT_NEGATIVE },
        summary: lines.join("\n"),
    })
}

fn dispatch(verb: &Verb) -> Result<Outcome> {
    match verb {
        Verb::Spectrum { g } => spectrum_verb(g),
        Verb::Evolve { g, time } => evolve_verb(g, time),
        Verb::Check { g, source, target, time } => check_verb(g, source, target, time),
        Verb::Scan { g, from, to, step, source, target } => {
            scan_verb(g, from, to, *step, source.as_deref(), target.as_deref())
        }
        Verb::Poset { g, time } => poset_verb(g, time),
        Verb::Topology { g, time } => topology_verb(g, time),
        Verb::Orbits { g, group, source, target, time } => {
            orbits_verb(g, group.as_deref(), source.as_deref(), target.as_deref(), time.as_deref())
        }
        Verb::Certify { g, source, target, time } => certify_verb(g, source, target, time),
        Verb::Golden { cases, seed, .. } => golden_verb(*cases, *seed),
    }
}

/// Caps the global rayon pool from `GSTWALK_THREADS`, if set.
pub fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("GSTWALK_THREADS") {
        let threads: usize = v
            .trim()
            .parse()
            .map_err(|_| Error::Precondition(format!("GSTWALK_THREADS must be a positive integer, got {v:?}")))?;
        if threads == 0 {
            return Err(Error::Precondition("GSTWALK_THREADS must be at least 1".into()));
        }
        // Fails only if the pool was already built, in which case it is kept.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    Ok(())
}

/// Runs a parsed command, writes the report, and returns the exit code.
pub fn run(cli: &Cli, argv: &[String]) -> i32 {
    let command = json!({ "verb": cli.verb.name(), "argv": argv });
    let outcome = configure_threads().and_then(|_| dispatch(&cli.verb));
    let (report, exit, summary) = match outcome {
        Ok(o) => (
            Report {
                schema_version: SCHEMA_VERSION,
                command,
                graph: o.graph,
                tolerances: o.tolerances,
                results: o.results,
                warnings: o.warnings,
            },
            o.exit,
            o.summary,
        ),
        Err(e) => (
            Report {
                schema_version: SCHEMA_VERSION,
                command,
                graph: None,
                tolerances: Tolerances { eigen_tol: f64::NAN, zero_tol: DEFAULT_ZERO_TOL },
                results: json!({ "error": e.to_string() }),
                warnings: vec![],
            },
            EXIT_ERROR,
            format!("error: {e}"),
        ),
    };
    eprintln!("{summary}");
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    match emit(&report, cli.verb.out()) {
        Ok(()) => exit,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn emit(report: &Report, out: Option<&Path>) -> Result<()> {
    let text = report.to_json()?;
    match out {
        Some(path) => std::fs::write(path, text + "\n")?,
        None => {
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{text}")?;
        }
    }
    Ok(())
}
