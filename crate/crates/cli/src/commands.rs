//! Subcommand implementations. Each returns both renderings of its report;
//! `main` picks one.

use std::fmt::{self, Write as _};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use blockgroup::group::{GroupParams, PoolPermutation, PoolUpdate};
use blockgroup::order::{self, AnalysisReport};
use blockgroup::representation::{cayley_embedding, relabel_report, IsoVerdict, MultiplicationTable};
use blockgroup::subgroup::{cauchy_witness, lattice_report, sylow_subgroup};
use blockgroup::trace::{self, Snapshot, Trace};
use blockgroup::{Error, ErrorCategory};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub struct Output {
    pub json: String,
    pub text: String,
    pub exit_code: u8,
}

impl Output {
    fn new<T: Serialize>(report: &T, text: String) -> Self {
        Self {
            json: serde_json::to_string_pretty(report).expect("reports serialize"),
            text,
            exit_code: 0,
        }
    }
}

#[derive(Debug)]
pub enum CmdError {
    Engine(Error),
    Io { path: PathBuf, source: std::io::Error },
    TraceFile { path: PathBuf, source: Error },
}

impl CmdError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CmdError::Engine(e) => match e.category() {
                ErrorCategory::InvalidInput => 2,
                ErrorCategory::CapExceeded => 3,
                ErrorCategory::Precondition => 4,
                ErrorCategory::InvalidData => 5,
            },
            CmdError::Io { .. } => 2,
            CmdError::TraceFile { .. } => 5,
        }
    }
}

impl fmt::Display for CmdError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CmdError::Engine(e) => e.fmt(f),
            CmdError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CmdError::TraceFile { path, source } => match source {
                // events start on the second line, after the header
                Error::InvariantViolation { event, .. } | Error::SourceMismatch { event, .. } => {
                    write!(f, "{}:{}: {source}", path.display(), event + 2)
                }
                _ => write!(f, "{}: {source}", path.display()),
            },
        }
    }
}

impl From<Error> for CmdError {
    fn from(e: Error) -> Self {
        CmdError::Engine(e)
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CmdError + '_ {
    move |source| CmdError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn params(nodes: usize, pools: usize) -> Result<GroupParams, CmdError> {
    Ok(GroupParams::new(nodes, pools)?)
}

pub fn analyze(nodes: usize, pools: usize) -> Result<Output, CmdError> {
    let report = order::analyze(params(nodes, pools)?);
    let text = analyze_text(&report);
    Ok(Output::new(&report, text))
}

fn factor_string(factors: &[(u64, u64)]) -> String {
    order::OrderFactorization::from_factors(factors.to_vec())
        .expect("report factors are canonical")
        .to_display_string()
}

fn analyze_text(r: &AnalysisReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "B_{{{},{}}}: {} nodes, {} pools", r.n, r.r, r.n, r.r);
    let _ = writeln!(s, "order n^r = {}", r.paper_order);
    let _ = writeln!(s, "factorization: {}", factor_string(&r.factors));
    for e in &r.sylow {
        let _ = writeln!(s, "Sylow p={}: {} · {}  ({} does not divide {})", e.p, e.p_part, e.cofactor, e.p, e.cofactor);
    }
    let _ = writeln!(s, "at least {} Sylow subgroups", r.min_subgroup_count);
    let primes: Vec<String> = r.cauchy_primes.iter().map(u64::to_string).collect();
    let _ = writeln!(s, "Cauchy primes: {}", if primes.is_empty() { "none".into() } else { primes.join(", ") });
    let verdict = if r.exceeds_2_512 { "> 512, exceeds 2^512" } else { "<= 512" };
    let _ = writeln!(
        s,
        "Stirling: log2(({})!) ≈ {:.3}  {}",
        r.paper_order, r.stirling_log2_of_paper_order_factorial, verdict
    );
    if let Some(exact) = r.exact_log2_of_paper_order_factorial {
        let _ = writeln!(s, "exact:    log2(({})!) = {:.3}", r.paper_order, exact);
    }
    let _ = writeln!(s, "concrete order (r!)^n = {}", r.concrete_order);
    let _ = writeln!(s, "concrete factorization: {}", factor_string(&r.concrete_factors));
    for e in &r.concrete_sylow {
        let _ = writeln!(s, "concrete Sylow p={}: {} · {}", e.p, e.p_part, e.cofactor);
    }
    let _ = writeln!(
        s,
        "concrete Stirling: log2(({})!) ≈ {:.3}",
        r.concrete_order, r.stirling_log2_of_concrete_order_factorial
    );
    s
}

#[derive(Serialize)]
struct LawTally {
    passed: u64,
    failed: u64,
}

#[derive(Serialize)]
struct AxiomsReport {
    n: usize,
    r: usize,
    trials: u64,
    seed: u64,
    associativity: LawTally,
    identity: LawTally,
    inverse: LawTally,
    non_commuting_witness: Option<(PoolUpdate, PoolUpdate)>,
    status: &'static str,
}

pub fn axioms(nodes: usize, pools: usize, trials: u64, seed: u64) -> Result<Output, CmdError> {
    let params = params(nodes, pools)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let e = PoolUpdate::identity(params);
    let mut assoc = LawTally { passed: 0, failed: 0 };
    let mut ident = LawTally { passed: 0, failed: 0 };
    let mut inv = LawTally { passed: 0, failed: 0 };
    let tally = |t: &mut LawTally, ok: bool| if ok { t.passed += 1 } else { t.failed += 1 };
    for _ in 0..trials {
        let a = PoolUpdate::random(params, &mut rng);
        let b = PoolUpdate::random(params, &mut rng);
        let c = PoolUpdate::random(params, &mut rng);
        let ab_c = a.compose(&b)?.compose(&c)?;
        let a_bc = a.compose(&b.compose(&c)?)?;
        tally(&mut assoc, ab_c == a_bc);
        tally(&mut ident, e.compose(&a)? == a && a.compose(&e)? == a);
        let a_inv = a.invert();
        tally(&mut inv, a.compose(&a_inv)? == e && a_inv.compose(&a)? == e);
    }
    let witness = non_commuting_pair(params)?;
    let ok = assoc.failed + ident.failed + inv.failed == 0;
    let report = AxiomsReport {
        n: nodes,
        r: pools,
        trials,
        seed,
        associativity: assoc,
        identity: ident,
        inverse: inv,
        non_commuting_witness: witness,
        status: if ok { "PASS" } else { "FAIL" },
    };
    let mut text = String::new();
    let _ = writeln!(text, "{params}: {trials} trials, seed {seed}");
    for (name, t) in [
        ("associativity", &report.associativity),
        ("identity", &report.identity),
        ("inverse", &report.inverse),
    ] {
        let _ = writeln!(text, "{name}: {} passed, {} failed", t.passed, t.failed);
    }
    match &report.non_commuting_witness {
        Some((a, b)) => {
            let _ = writeln!(text, "non-commuting pair: a = {a}, b = {b}");
        }
        None => {
            let _ = writeln!(text, "abelian: every pair commutes when r <= 2");
        }
    }
    let _ = writeln!(text, "{}", report.status);
    let mut out = Output::new(&report, text);
    if !ok {
        out.exit_code = 1;
    }
    Ok(out)
}

/// `(0 1)` and `(1 2)` on node 0 whenever there are at least three pools.
fn non_commuting_pair(params: GroupParams) -> Result<Option<(PoolUpdate, PoolUpdate)>, CmdError> {
    let r = params.pool_count();
    if r < 3 {
        return Ok(None);
    }
    let a = PoolUpdate::single_node(params, 0, PoolPermutation::transposition(r, 0, 1))?;
    let b = PoolUpdate::single_node(params, 0, PoolPermutation::transposition(r, 1, 2))?;
    assert_ne!(a.compose(&b)?, b.compose(&a)?);
    Ok(Some((a, b)))
}

pub fn subgroups(nodes: usize, pools: usize, cap: u64) -> Result<Output, CmdError> {
    let params = params(nodes, pools)?;
    let report = lattice_report(params, cap)?;
    let mut text = String::new();
    let _ = writeln!(text, "{params}: {} subgroups", report.subgroups.len());
    for (i, h) in report.subgroups.iter().enumerate() {
        let _ = writeln!(
            text,
            "#{i}: order {}, index {}, {}",
            h.order,
            h.index,
            if h.normal { "normal" } else { "not normal" }
        );
    }
    let covers: Vec<String> = report.containment.iter().map(|(i, j)| format!("{i}<{j}")).collect();
    let _ = writeln!(text, "covers: {}", covers.join(" "));
    Ok(Output::new(&report, text))
}

#[derive(Serialize)]
struct SylowReport {
    n: usize,
    r: usize,
    prime: u64,
    order: usize,
    elements: Vec<PoolUpdate>,
}

pub fn sylow(nodes: usize, pools: usize, prime: u64, cap: u64) -> Result<Output, CmdError> {
    let params = params(nodes, pools)?;
    let h = sylow_subgroup(params, prime, cap)?;
    let report = SylowReport {
        n: nodes,
        r: pools,
        prime,
        order: h.order(),
        elements: h.elements().to_vec(),
    };
    let mut text = String::new();
    let _ = writeln!(text, "{params}: Sylow {prime}-subgroup of order {}", h.order());
    for g in h.elements() {
        let _ = writeln!(text, "  {g}");
    }
    Ok(Output::new(&report, text))
}

#[derive(Serialize)]
struct CauchyReport {
    n: usize,
    r: usize,
    prime: u64,
    witness: PoolUpdate,
    order: u64,
}

pub fn cauchy(nodes: usize, pools: usize, prime: u64, cap: u64) -> Result<Output, CmdError> {
    let params = params(nodes, pools)?;
    let w = cauchy_witness(params, prime, cap)?;
    let report = CauchyReport {
        n: nodes,
        r: pools,
        prime,
        order: w.element_order(),
        witness: w,
    };
    let text = format!(
        "{params}: element of order {}: {}\n",
        report.order, report.witness
    );
    Ok(Output::new(&report, text))
}

#[derive(Serialize)]
struct CayleyReport {
    n: usize,
    r: usize,
    order: usize,
    elements: Vec<PoolUpdate>,
    table: MultiplicationTable,
    regular_representation: Vec<String>,
    injective: bool,
    homomorphism: bool,
}

pub fn cayley(nodes: usize, pools: usize, cap: u64) -> Result<Output, CmdError> {
    let params = params(nodes, pools)?;
    let emb = cayley_embedding(params, cap)?;
    let size = emb.elements().len();
    let table = MultiplicationTable::new(
        (0..size)
            .map(|a| (0..size).map(|b| emb.table().product(a, b)).collect())
            .collect(),
    )?;
    let report = CayleyReport {
        n: nodes,
        r: pools,
        order: size,
        elements: emb.elements().to_vec(),
        regular_representation: emb.images().iter().map(ToString::to_string).collect(),
        injective: emb.is_injective(),
        homomorphism: emb.is_homomorphism(),
        table,
    };
    let mut text = String::new();
    let _ = writeln!(text, "{params}: order {size}");
    text.push_str(&report.table.to_text());
    for (i, (g, img)) in report.elements.iter().zip(&report.regular_representation).enumerate() {
        let _ = writeln!(text, "{i}: {g} -> {img}");
    }
    let _ = writeln!(
        text,
        "regular representation: injective={}, homomorphism={}",
        report.injective, report.homomorphism
    );
    let faithful = report.injective && report.homomorphism;
    let mut out = Output::new(&report, text);
    if !faithful {
        out.exit_code = 1;
    }
    Ok(out)
}

pub fn relabel(nodes: usize, pools: usize, cap: u64) -> Result<Output, CmdError> {
    let params = params(nodes, pools)?;
    let report = relabel_report(params, cap)?;
    let mut text = String::new();
    let _ = writeln!(text, "{params}: uniform pool-relabel subgroup of order {}", report.order);
    let verdict = match report.isomorphic_to_pool_symmetric_group {
        IsoVerdict::Isomorphic => "yes",
        IsoVerdict::NotIsomorphic => "no",
        IsoVerdict::Unknown => "unknown (too large for exhaustive search)",
    };
    let _ = writeln!(text, "isomorphic to the symmetric group on {} pools: {verdict}", report.r);
    let _ = writeln!(text, "symmetric group on {} nodes: {}", report.n, report.node_symmetric_claim);
    Ok(Output::new(&report, text))
}

pub enum TraceSource {
    File(PathBuf),
    Generate {
        nodes: usize,
        pools: usize,
        churn: f64,
        seed: u64,
    },
}

#[derive(Serialize)]
struct SimulationReport {
    n: usize,
    r: usize,
    epochs: usize,
    events: usize,
    closure_epochs: Vec<usize>,
    final_configuration: Vec<usize>,
    final_cumulative: PoolUpdate,
    replay_consistent: bool,
    extension_rule: &'static str,
}

fn load_trace(path: &Path) -> Result<Trace, CmdError> {
    let file = File::open(path).map_err(io_err(path))?;
    trace::parse_trace(BufReader::new(file)).map_err(|source| CmdError::TraceFile {
        path: path.to_path_buf(),
        source,
    })
}

fn write_lines<T: Serialize>(path: &Path, items: &[T]) -> Result<(), CmdError> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    for item in items {
        let line = serde_json::to_string(item).expect("snapshots serialize");
        writeln!(w, "{line}").map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

fn run_trace(trace: &Trace, min_epochs: u64, out: Option<&Path>) -> Result<Output, CmdError> {
    let updates = trace::fold_trace_epochs(trace, min_epochs);
    let snaps: Vec<Snapshot> = trace::snapshots(&updates)?;
    let closure = trace::detect_identity_closure(&updates)?;
    let evolved = trace::evolve_epochs(trace, min_epochs);
    let replayed = trace::replay(trace);
    let final_cfg = evolved.last().expect("at least one epoch").clone();
    let replay_consistent = replayed.last() == Some(&final_cfg);
    if let Some(path) = out {
        write_lines(path, &snaps)?;
    }
    let params = trace.params();
    let report = SimulationReport {
        n: params.node_count(),
        r: params.pool_count(),
        epochs: updates.len(),
        events: trace.events().len(),
        closure_epochs: closure,
        final_configuration: final_cfg.assignment().to_vec(),
        final_cumulative: snaps.last().expect("at least one epoch").update.clone(),
        replay_consistent,
        extension_rule: "a switch i -> j folds to the pool transposition (i j)",
    };
    let mut text = String::new();
    let _ = writeln!(
        text,
        "{params}: {} epochs, {} events",
        report.epochs, report.events
    );
    let closures: Vec<String> = report.closure_epochs.iter().map(usize::to_string).collect();
    let _ = writeln!(text, "identity closure at epochs: {}", closures.join(" "));
    let _ = writeln!(text, "final configuration: {:?}", report.final_configuration);
    let _ = writeln!(text, "final cumulative update: {}", report.final_cumulative);
    let _ = writeln!(text, "replay consistent: {}", report.replay_consistent);
    let mut output = Output::new(&report, text);
    if !replay_consistent {
        output.exit_code = 1;
    }
    Ok(output)
}

pub fn simulate(
    source: TraceSource,
    epochs: u64,
    out: Option<&Path>,
    trace_out: Option<&Path>,
) -> Result<Output, CmdError> {
    let (trace, min_epochs) = match source {
        TraceSource::File(path) => (load_trace(&path)?, 0),
        TraceSource::Generate {
            nodes,
            pools,
            churn,
            seed,
        } => (
            trace::generate_random_trace(params(nodes, pools)?, epochs, churn, seed)?,
            epochs,
        ),
    };
    if let Some(path) = trace_out {
        let file = File::create(path).map_err(io_err(path))?;
        trace.write_to(BufWriter::new(file)).map_err(io_err(path))?;
    }
    run_trace(&trace, min_epochs, out)
}

pub fn fold(input: &Path, out: Option<&Path>) -> Result<Output, CmdError> {
    let trace = load_trace(input)?;
    run_trace(&trace, 0, out)
}
