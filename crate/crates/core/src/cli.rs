//! Command-line front end for the `gw` binary.
//!
//! Exit codes: 0 success, 2 invalid input, 3 hypothesis refusal, 4 genuine
//! inequality violation.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::concurrence::{bipartite_concurrence, gw_block_concurrence_oracle, printed_pair_concurrence_sq, BlockCut, BlockPair, PairConcurrenceSource};
use crate::error::{Error, Result};
use crate::monogamy::{
    alpha_monogamy_report, check_theorem4, example1_quantities, fig1_series, squared_monogamy_report, BetaInputs,
    FocusConcurrences, MonogamyReport, TighteningParams,
};
use crate::pre::{self, PreKind, PreResult};
use crate::states::{GwState, Partition, StateFile, C64};
use crate::suite::{run_suite, SuiteConfig, DEFAULT_SEED};
use crate::table::{NumberFormat, Table};
use crate::unified::{f_qs, UeParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_REFUSED: i32 = 3;
pub const EXIT_VIOLATION: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "gw", version, about = "Concurrence, unified-(q,s) entanglement and monogamy checks for GW states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Concurrences and unified entanglement of site pairs or block cuts.
    Measure(MeasureArgs),
    /// Run a monogamy checker over parameter grids.
    Check(CheckArgs),
    /// Regenerate a table, figure series or worked example.
    Reproduce(ReproduceArgs),
    /// Residual entanglements under a two-level block cut.
    Pre(PreArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SourceArg {
    Printed,
    Oracle,
}

impl From<SourceArg> for PairConcurrenceSource {
    fn from(s: SourceArg) -> Self {
        match s {
            SourceArg::Printed => PairConcurrenceSource::PrintedClosedForm,
            SourceArg::Oracle => PairConcurrenceSource::EffectiveQubitOracle,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct StateArgs {
    /// JSON state file `{n, d, coeffs: [[re, im], ...]}`.
    #[arg(long)]
    pub state: Option<PathBuf>,
    /// Named preset: `example1` or `uniform-w N`.
    #[arg(long, num_args = 1..=2)]
    pub preset: Option<Vec<String>>,
    /// Inline real qubit amplitudes, one per site.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub amplitudes: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct MeasureArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub q: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub s: Vec<f64>,
    /// Emit every site pair and every site against the rest of the selection.
    #[arg(long)]
    pub pairs: bool,
    /// Block cut `M` or `M,A,B` (1-based sizes as in the PRE tables).
    #[arg(long, value_delimiter = ',')]
    pub cut: Option<Vec<usize>>,
    /// Restrict to these sites (0-based). Defaults to all sites, or to 0,1,2
    /// for the `example1` preset.
    #[arg(long, value_delimiter = ',')]
    pub sites: Option<Vec<usize>>,
    #[arg(long, value_enum, default_value_t = SourceArg::Oracle)]
    pub source: SourceArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Theorem {
    Squared,
    Alpha,
    Tightened,
    BetaLower,
    BetaUpper,
    PreChain,
    Suite,
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    #[arg(long, value_enum)]
    pub theorem: Theorem,
    #[command(flatten)]
    pub state: StateArgs,
    /// Blocks separated by `|`, sites by `,`, e.g. `0|1,2|3`.
    #[arg(long)]
    pub partition: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub focus: usize,
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub q: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub s: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "2")]
    pub alpha: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub beta: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    #[arg(long, default_value_t = 1.0)]
    pub h: f64,
    /// Tightening factor p.
    #[arg(long = "p-factor", default_value_t = 1.0)]
    pub p_factor: f64,
    #[arg(long, default_value_t = 0)]
    pub site_a: usize,
    #[arg(long, default_value_t = 1)]
    pub site_b: usize,
    /// Block cut `M,A,B` for the PRE chain.
    #[arg(long, value_delimiter = ',')]
    pub cut: Option<Vec<usize>>,
    #[arg(long, value_enum, default_value_t = SourceArg::Oracle)]
    pub source: SourceArg,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Number of random states for the suite.
    #[arg(long, default_value_t = 500)]
    pub count: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Table1,
    Table2,
    Table3,
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Example1,
    Discrepancy,
}

#[derive(Debug, Clone, Args)]
pub struct ReproduceArgs {
    #[arg(value_enum)]
    pub target: Target,
    #[arg(long, value_enum, default_value_t = SourceArg::Printed)]
    pub source: SourceArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PreKindArg {
    Upsilon,
    UpsilonPrime,
}

#[derive(Debug, Clone, Args)]
pub struct PreArgs {
    #[arg(long, value_enum, default_value_t = PreKindArg::Upsilon)]
    pub kind: PreKindArg,
    /// Evaluate on this state through the oracle instead of the uniform W state.
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long, default_value_t = 6)]
    pub n: usize,
    #[arg(long, default_value_t = 4)]
    pub m: usize,
    #[arg(long, default_value_t = 1)]
    pub a: usize,
    #[arg(long, default_value_t = 6)]
    pub b: usize,
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub q: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub s: Vec<f64>,
    #[arg(long, value_enum, default_value_t = SourceArg::Oracle)]
    pub source: SourceArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Label, block A, block B, C², source tag.
type MeasureEntry = (String, Vec<usize>, Vec<usize>, f64, &'static str);

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            return code;
        }
    };
    let outcome = match &cli.command {
        Command::Measure(a) => cmd_measure(a),
        Command::Check(a) => cmd_check(a),
        Command::Reproduce(a) => cmd_reproduce(a),
        Command::Pre(a) => cmd_pre(a),
    };
    match outcome.and_then(|o| emit(&o, stdout).map(|_| o.violations)) {
        Ok(0) => EXIT_OK,
        Ok(v) => {
            let _ = writeln!(stderr, "{v} inequality violation(s) beyond tolerance");
            EXIT_VIOLATION
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::HypothesisRefused { .. } => EXIT_REFUSED,
        _ => EXIT_INPUT,
    }
}

struct Output {
    text: String,
    out: Option<PathBuf>,
    violations: usize,
}

fn emit(o: &Output, stdout: &mut dyn Write) -> Result<()> {
    let io = |e: std::io::Error| Error::Unsupported(format!("write failed: {e}"));
    match &o.out {
        Some(path) => std::fs::write(path, &o.text).map_err(io),
        None => stdout.write_all(o.text.as_bytes()).map_err(io),
    }
}

fn output(args: &OutputArgs, text: String, violations: usize) -> Output {
    Output {
        text,
        out: args.out.clone(),
        violations,
    }
}

fn input_err(msg: impl Into<String>) -> Error {
    Error::InvalidSubsystems(msg.into())
}

/// Loaded state plus the preset name, if any.
struct LoadedState {
    gw: GwState,
    preset: Option<String>,
}

fn load_state(args: &StateArgs) -> Result<Option<LoadedState>> {
    let given = [args.state.is_some(), args.preset.is_some(), args.amplitudes.is_some()];
    match given.iter().filter(|&&g| g).count() {
        0 => return Ok(None),
        1 => {}
        _ => return Err(input_err("give exactly one of --state, --preset, --amplitudes")),
    }
    if let Some(path) = &args.state {
        let text = std::fs::read_to_string(path)
            .map_err(|e| input_err(format!("cannot read {}: {e}", path.display())))?;
        let file = StateFile::from_json(&text)?;
        return Ok(Some(LoadedState {
            gw: file.gw_state()?,
            preset: None,
        }));
    }
    if let Some(amps) = &args.amplitudes {
        let amps: Vec<C64> = amps.iter().map(|&x| C64::new(x, 0.0)).collect();
        return Ok(Some(LoadedState {
            gw: GwState::qubits(&amps)?,
            preset: None,
        }));
    }
    let words = args.preset.as_ref().expect("checked above");
    let gw = match words.first().map(String::as_str) {
        Some("example1") if words.len() == 1 => GwState::example1(),
        Some("uniform-w") if words.len() == 2 => {
            let n: usize = words[1].parse().map_err(|_| input_err(format!("bad site count {:?}", words[1])))?;
            GwState::uniform_w(n)?
        }
        _ => return Err(input_err(format!("unknown preset {:?}", words.join(" ")))),
    };
    Ok(Some(LoadedState {
        preset: Some(words[0].clone()),
        gw,
    }))
}

fn require_state(args: &StateArgs) -> Result<LoadedState> {
    load_state(args)?.ok_or_else(|| input_err("a state is required (--state, --preset or --amplitudes)"))
}

fn default_sites(st: &LoadedState) -> Vec<usize> {
    if st.preset.as_deref() == Some("example1") {
        vec![0, 1, 2]
    } else {
        (0..st.gw.n()).collect()
    }
}

fn param_grid(q: &[f64], s: &[f64]) -> Result<Vec<UeParams>> {
    if q.is_empty() || s.is_empty() {
        return Err(input_err("parameter grids must be non-empty"));
    }
    q.iter()
        .flat_map(|&q| s.iter().map(move |&s| UeParams::new(q, s)))
        .collect()
}

fn full(x: f64) -> String {
    NumberFormat::Full.format(x)
}

fn sites_label(s: &[usize]) -> String {
    s.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

#[derive(Debug, Clone, Serialize)]
struct MeasureRow {
    quantity: String,
    block_a: Vec<usize>,
    block_b: Vec<usize>,
    source: &'static str,
    q: f64,
    s: f64,
    concurrence: f64,
    concurrence_sq: f64,
    ue: f64,
}

fn cmd_measure(args: &MeasureArgs) -> Result<Output> {
    let st = require_state(&args.state)?;
    let grid = param_grid(&args.q, &args.s)?;
    let psi = st.gw.state_vector()?;
    let n = st.gw.n();
    let source: PairConcurrenceSource = args.source.into();

    let mut entries: Vec<MeasureEntry> = Vec::new();
    if let Some(cut) = &args.cut {
        let cut = match cut.as_slice() {
            [m] => BlockCut::top(n, *m)?,
            [m, a, b] => BlockCut::new(n, *m, *a, *b)?,
            _ => return Err(input_err("--cut takes M or M,A,B")),
        };
        if source == PairConcurrenceSource::PrintedClosedForm && st.preset.as_deref() != Some("uniform-w") {
            return Err(input_err("printed closed forms describe the uniform W state only"));
        }
        let [p11, p12, p21, p22] = cut.blocks();
        let left: Vec<usize> = (0..cut.m).collect();
        let right: Vec<usize> = (cut.m..n).collect();
        let mut items = vec![("top_cut", BlockPair::TopCut, left, right)];
        if args.cut.as_ref().map(Vec::len) == Some(3) {
            items.push(("p11_p21", BlockPair::P11P21, p11.clone(), p21.clone()));
            items.push(("p12_p21", BlockPair::P12P21, p12.clone(), p21));
            items.push(("p11_p22", BlockPair::P11P22, p11, p22.clone()));
            items.push(("p12_p22", BlockPair::P12P22, p12, p22));
        }
        for (label, pair, a, b) in items {
            let c2 = if source == PairConcurrenceSource::PrintedClosedForm {
                printed_pair_concurrence_sq(&cut, pair)
            } else if a.is_empty() || b.is_empty() {
                0.0
            } else {
                bipartite_concurrence(&psi, &a, &b)?.powi(2)
            };
            entries.push((label.into(), a, b, c2, source.label()));
        }
    }
    if args.pairs || args.cut.is_none() {
        let sites = args.sites.clone().unwrap_or_else(|| default_sites(&st));
        crate::states::validate_selection(&sites, n)?;
        for (i, &x) in sites.iter().enumerate() {
            let rest: Vec<usize> = sites.iter().copied().filter(|&y| y != x).collect();
            if rest.len() >= 2 {
                let c = bipartite_concurrence(&psi, &[x], &rest)?;
                entries.push(("site_vs_rest".into(), vec![x], rest, c * c, "oracle"));
            }
            for &y in &sites[i + 1..] {
                let c = gw_block_concurrence_oracle(&psi, &[x], &[y])?;
                entries.push(("site_pair".into(), vec![x], vec![y], c * c, "oracle"));
            }
        }
    }

    let mut rows = Vec::new();
    for params in &grid {
        for (label, a, b, c2, src) in &entries {
            let c = c2.max(0.0).sqrt();
            rows.push(MeasureRow {
                quantity: label.clone(),
                block_a: a.clone(),
                block_b: b.clone(),
                source: src,
                q: params.q(),
                s: params.s(),
                concurrence: c,
                concurrence_sq: *c2,
                ue: f_qs(c.min(1.0), params)?,
            });
        }
    }
    let text = match args.output.format {
        Format::Json => to_json(&rows),
        Format::Csv => {
            let mut t = String::from("quantity,block_a,block_b,source,q,s,concurrence,concurrence_sq,ue\n");
            for r in &rows {
                t.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{}\n",
                    r.quantity,
                    sites_label(&r.block_a),
                    sites_label(&r.block_b),
                    r.source,
                    full(r.q),
                    full(r.s),
                    full(r.concurrence),
                    full(r.concurrence_sq),
                    full(r.ue)
                ));
            }
            t
        }
    };
    Ok(output(&args.output, text, 0))
}

fn parse_partition(text: &str, n: usize) -> Result<Partition> {
    let blocks = text
        .split('|')
        .map(|b| {
            b.split(',')
                .map(|x| x.trim().parse::<usize>().map_err(|_| input_err(format!("bad site {x:?} in partition"))))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Partition::new(blocks, n)
}

fn reports_csv(reports: &[MonogamyReport]) -> String {
    let mut t = String::from("inequality_id,params,lhs,rhs,margin,hypotheses_ok\n");
    for r in reports {
        let params: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        t.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.inequality_id,
            params.join(" "),
            full(r.lhs),
            full(r.rhs),
            full(r.margin),
            r.hypotheses_ok()
        ));
    }
    t
}

fn reports_output(args: &OutputArgs, reports: Vec<MonogamyReport>) -> Output {
    let violations = reports.iter().filter(|r| r.is_violation()).count();
    let text = match args.format {
        Format::Json => to_json(&reports),
        Format::Csv => reports_csv(&reports),
    };
    output(args, text, violations)
}

fn cmd_check(args: &CheckArgs) -> Result<Output> {
    if args.theorem == Theorem::Suite {
        let config = SuiteConfig {
            seed: args.seed,
            states: args.count,
            ..SuiteConfig::default()
        };
        let summary = run_suite(&config)?;
        let text = match args.output.format {
            Format::Json => format!("{}\n", summary.to_json()),
            Format::Csv => {
                let mut t = String::from("id,checked,skipped,violations,worst_margin,worst_case\n");
                for x in &summary.tallies {
                    t.push_str(&format!(
                        "{},{},{},{},{},{}\n",
                        x.id,
                        x.checked,
                        x.skipped,
                        x.violations,
                        full(x.worst_margin),
                        x.worst_case
                    ));
                }
                t
            }
        };
        return Ok(output(&args.output, text, summary.violations()));
    }

    let st = require_state(&args.state)?;
    let n = st.gw.n();
    let partition = match &args.partition {
        Some(p) => parse_partition(p, n)?,
        None => Partition::singletons(&default_sites(&st), n)?,
    };
    let mut reports = Vec::new();
    match args.theorem {
        Theorem::Squared | Theorem::Alpha | Theorem::Tightened => {
            let fc = FocusConcurrences::compute(&st.gw, &partition, args.focus, args.source.into())?;
            for params in param_grid(&args.q, &args.s)? {
                match args.theorem {
                    Theorem::Squared => reports.push(squared_monogamy_report(&fc, &params)?),
                    Theorem::Alpha => {
                        for &alpha in &args.alpha {
                            reports.push(alpha_monogamy_report(&fc, &params, alpha)?);
                        }
                    }
                    _ => {
                        if partition.len() != 3 {
                            return Err(input_err("the tightened bound needs a three-block partition"));
                        }
                        let whole = fc.whole_ue(&params)?;
                        let pairs = fc.pair_ues(&params)?;
                        for &alpha in &args.alpha {
                            let t = TighteningParams {
                                mu: args.mu,
                                h: args.h,
                                tightening_factor: args.p_factor,
                                alpha,
                            };
                            let mut rep = check_theorem4(whole, pairs[0], pairs[1], &t)?;
                            rep.params.insert("q".into(), params.q());
                            rep.params.insert("s".into(), params.s());
                            reports.push(rep);
                        }
                    }
                }
            }
        }
        Theorem::BetaLower | Theorem::BetaUpper => {
            let inputs = BetaInputs::compute(&st.gw, args.site_a, args.site_b)?;
            for &s in &args.s {
                for &beta in &args.beta {
                    reports.push(if args.theorem == Theorem::BetaLower {
                        inputs.lower_bound(beta, s)?
                    } else {
                        inputs.upper_bound(beta, s)?
                    });
                }
            }
        }
        Theorem::PreChain => {
            let cut = match args.cut.as_deref() {
                Some([m, a, b]) => BlockCut::new(n, *m, *a, *b)?,
                _ => return Err(input_err("--cut M,A,B is required for the PRE chain")),
            };
            for params in param_grid(&args.q, &args.s)? {
                let rep = pre::monogamy_like_pre_check(&st.gw, &cut, &params)?;
                reports.push(rep.upper);
                reports.push(rep.lower);
            }
        }
        Theorem::Suite => unreachable!("handled above"),
    }
    Ok(reports_output(&args.output, reports))
}

fn table_output(args: &OutputArgs, table: &Table, fmt: NumberFormat) -> Output {
    let text = match args.format {
        Format::Json => format!("{}\n", table.to_json()),
        Format::Csv => table.to_csv(fmt),
    };
    output(args, text, 0)
}

fn cmd_reproduce(args: &ReproduceArgs) -> Result<Output> {
    let source: PairConcurrenceSource = args.source.into();
    let table_fmt = NumberFormat::Fixed(6);
    Ok(match args.target {
        Target::Table1 => table_output(&args.output, &pre::table1(source)?, table_fmt),
        Target::Table2 => table_output(&args.output, &pre::table2(source)?, table_fmt),
        Target::Table3 => table_output(&args.output, &pre::table3(source)?, table_fmt),
        Target::Fig1 => table_output(&args.output, &fig1_series()?, NumberFormat::Full),
        Target::Fig2 => table_output(&args.output, &pre::upsilon_figure(5, source)?, NumberFormat::Full),
        Target::Fig3 => table_output(&args.output, &pre::upsilon_figure(6, source)?, NumberFormat::Full),
        Target::Fig4 => table_output(&args.output, &pre::upsilon_prime_figure(source)?, NumberFormat::Full),
        Target::Discrepancy => {
            let table = pre::discrepancy_table(&BlockCut::new(6, 4, 2, 5)?)?;
            match args.output.format {
                Format::Json => table_output(&args.output, &table, NumberFormat::Full),
                Format::Csv => {
                    let mut t = String::from("pair,printed,oracle,difference\n");
                    for (label, row) in table.notes.iter().zip(&table.rows) {
                        t.push_str(&format!("{label},{},{},{}\n", full(row[1]), full(row[2]), full(row[3])));
                    }
                    output(&args.output, t, 0)
                }
            }
        }
        Target::Example1 => {
            let ex = example1_quantities()?;
            match args.output.format {
                Format::Json => output(&args.output, to_json(&ex), 0),
                Format::Csv => {
                    let rows = [
                        ("C(P1|P2P3)", ex.c_whole),
                        ("C(P1P2)", ex.c12),
                        ("C(P1P3)", ex.c13),
                        ("U21(P1|P2P3)", ex.u_whole),
                        ("U21(P1P2)", ex.u12),
                        ("U21(P1P3)", ex.u13),
                    ];
                    let mut t = String::from("quantity,value\n");
                    for (k, v) in rows {
                        t.push_str(&format!("{k},{}\n", full(v)));
                    }
                    output(&args.output, t, 0)
                }
            }
        }
    })
}

fn cmd_pre(args: &PreArgs) -> Result<Output> {
    let source: PairConcurrenceSource = args.source.into();
    let state = load_state(&args.state)?;
    let kind = match args.kind {
        PreKindArg::Upsilon => PreKind::Upsilon,
        PreKindArg::UpsilonPrime => PreKind::UpsilonPrime,
    };
    let n = state.as_ref().map_or(args.n, |s| s.gw.n());
    let cut = match kind {
        PreKind::Upsilon => BlockCut::new(n, args.m, args.a, args.b)?,
        PreKind::UpsilonPrime => BlockCut::top(n, args.m)?,
    };
    let mut results = Vec::new();
    for params in param_grid(&args.q, &args.s)? {
        let (value, src) = match &state {
            Some(st) => {
                let tiers = pre::pre_tiers(&st.gw, &cut, &params)?;
                let v = match kind {
                    PreKind::Upsilon => tiers.upsilon(),
                    PreKind::UpsilonPrime => tiers.upsilon_prime(),
                };
                (v, PairConcurrenceSource::EffectiveQubitOracle)
            }
            None => {
                let v = match kind {
                    PreKind::Upsilon => pre::upsilon(&cut, &params, source)?,
                    PreKind::UpsilonPrime => pre::upsilon_prime(n, args.m, &params, source)?,
                };
                (v, source)
            }
        };
        let with_ab = kind == PreKind::Upsilon;
        results.push(PreResult {
            kind,
            n,
            m: cut.m,
            a: with_ab.then_some(cut.a),
            b: with_ab.then_some(cut.b),
            q: params.q(),
            s: params.s(),
            value,
            source: src,
        });
    }
    let text = match args.output.format {
        Format::Json => to_json(&results),
        Format::Csv => {
            let mut t = String::from("kind,n,m,a,b,q,s,value,source\n");
            for r in &results {
                let opt = |x: Option<usize>| x.map_or(String::new(), |v| v.to_string());
                t.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{}\n",
                    match r.kind {
                        PreKind::Upsilon => "upsilon",
                        PreKind::UpsilonPrime => "upsilon_prime",
                    },
                    r.n,
                    r.m,
                    opt(r.a),
                    opt(r.b),
                    full(r.q),
                    full(r.s),
                    full(r.value),
                    r.source.label()
                ));
            }
            t
        }
    };
    Ok(output(&args.output, text, 0))
}
