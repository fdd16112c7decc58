mod ranges;
mod render;

use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ruinwalk::dist::{DEFAULT_TAIL_TOL, MAX_TAIL_TOL};
use ruinwalk::published::{self, CellStatus, Horizon, TableReport};
use ruinwalk::ultimate::{DEFAULT_N_SOLVE, DEFAULT_PRECISION_BITS, DEFAULT_U_BIG};
use ruinwalk::{
    boundary_oracle, determinant_trace, mc_estimate, parse_pmf_spec, survival_finite, survival_ultimate,
    Conjecture, ModelSpec, SolverOptions,
};

use ranges::parse_indices;
use render::{Format, NumberStyle, Table};

#[derive(Debug, Parser)]
#[command(name = "ruinwalk", version, about = "Survival probabilities of the bi-seasonal discrete-time risk model")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "markdown")]
    format: Format,

    /// Decimal places of rendered values.
    #[arg(long, global = true, default_value_t = 3)]
    digits: usize,

    /// Emit full-precision values instead of rounded ones.
    #[arg(long, global = true)]
    raw: bool,

    /// Truncation tolerance for infinite-support distributions.
    #[arg(long, global = true, default_value_t = DEFAULT_TAIL_TOL)]
    tail_tol: f64,

    /// Index at which the initial-value systems are first solved.
    #[arg(long, global = true, default_value_t = DEFAULT_N_SOLVE)]
    n_solve: usize,

    /// Significand bits of the extended-precision arithmetic.
    #[arg(long, global = true, env = "RUINWALK_PRECISION_BITS", default_value_t = DEFAULT_PRECISION_BITS)]
    precision_bits: u32,

    /// Seed of the Monte Carlo streams.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Grid of finite-time survival probabilities.
    Finite {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        /// Initial surplus values, e.g. `0..5,10`.
        #[arg(long)]
        u: String,
        /// Horizons, e.g. `1..5,10,20`.
        #[arg(long)]
        t: String,
    },
    /// Ultimate survival probabilities with solver diagnostics.
    Ultimate {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        u_max: usize,
        /// Columns to print (default `0..u_max`).
        #[arg(long)]
        u: Option<String>,
        /// Add a row from the boundary-value oracle.
        #[arg(long)]
        oracle: bool,
        /// Truncation point of the oracle.
        #[arg(long, default_value_t = DEFAULT_U_BIG)]
        u_big: usize,
    },
    /// Case of the model and the margin 4 - E S.
    Classify {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Monte Carlo estimates of finite-time survival.
    Simulate {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        u: String,
        #[arg(long)]
        t: String,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
    /// Determinant trace of the 3x3 (1) or 2x2 (2) difference systems.
    Conjecture {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        which: u8,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long, default_value_t = 100)]
        n_max: usize,
    },
    /// Recompute the published tables and compare them cell by cell.
    VerifyPaper {
        /// 1-5 or `all`.
        #[arg(long, default_value = "all")]
        table: String,
    },
}

enum Failure {
    Validation(String),
    Numerical(String),
    Mismatch(String),
    Io(io::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) | Failure::Io(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Mismatch(_) => 4,
        }
    }
}

impl From<ruinwalk::Error> for Failure {
    fn from(e: ruinwalk::Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Validation(e.to_string())
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(&cli, &mut out).and_then(|()| out.flush().map_err(Failure::from)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Validation(m) => eprintln!("error: {m}"),
                Failure::Numerical(m) => eprintln!("numerical failure: {m}"),
                Failure::Mismatch(m) => eprintln!("mismatch: {m}"),
                Failure::Io(e) if e.kind() == io::ErrorKind::BrokenPipe => return ExitCode::SUCCESS,
                Failure::Io(e) => eprintln!("io error: {e}"),
            }
            ExitCode::from(f.code())
        }
    }
}

fn validate(cli: &Cli) -> Outcome {
    let bad = |m: String| Err(Failure::Validation(m));
    if cli.digits > 15 {
        return bad(format!("--digits must be at most 15, got {}", cli.digits));
    }
    if !(cli.tail_tol > 0.0 && cli.tail_tol <= MAX_TAIL_TOL) {
        return bad(format!("--tail-tol must lie in (0, {MAX_TAIL_TOL}], got {}", cli.tail_tol));
    }
    if cli.n_solve < 8 {
        return bad(format!("--n-solve must be at least 8, got {}", cli.n_solve));
    }
    if cli.precision_bits < 53 {
        return bad(format!("--precision-bits must be at least 53, got {}", cli.precision_bits));
    }
    match &cli.command {
        Command::Simulate { trials: 0, .. } => bad("--trials must be positive".into()),
        Command::Ultimate { u_max, u_big, oracle: true, .. } if u_max >= u_big => {
            bad(format!("--u-big ({u_big}) must exceed --u-max ({u_max})"))
        }
        _ => Ok(()),
    }
}

fn indices(text: &str, flag: &str) -> Result<Vec<usize>, Failure> {
    parse_indices(text).map_err(|e| Failure::Validation(format!("--{flag}: {e}")))
}

fn model(cli: &Cli, x: &str, y: &str) -> Result<ModelSpec, Failure> {
    let parse = |flag: &str, text: &str| {
        parse_pmf_spec(text, cli.tail_tol).map_err(|e| Failure::Validation(format!("--{flag} `{text}`: {e}")))
    };
    Ok(ModelSpec::new(parse("x", x)?, parse("y", y)?))
}

fn solver_options(cli: &Cli) -> SolverOptions {
    SolverOptions {
        n_solve: cli.n_solve,
        precision_bits: cli.precision_bits,
        ..SolverOptions::default()
    }
}

fn infinity_label(format: Format) -> String {
    if format == Format::Markdown { "∞" } else { "inf" }.to_string()
}

fn run(cli: &Cli, out: &mut impl Write) -> Outcome {
    validate(cli)?;
    let style = NumberStyle {
        digits: cli.digits,
        raw: cli.raw,
    };
    match &cli.command {
        Command::Finite { x, y, u, t } => {
            let m = model(cli, x, y)?;
            let us = indices(u, "u")?;
            let ts = indices(t, "t")?;
            if ts.first() == Some(&0) {
                return Err(Failure::Validation("--t: horizons start at 1".into()));
            }
            let grid = survival_finite(&m, *us.last().expect("non-empty"), *ts.last().expect("non-empty"));
            let mut table = Table::new(std::iter::once("T\\u".to_string()).chain(us.iter().map(usize::to_string)));
            for &h in &ts {
                let mut row = vec![h.to_string()];
                row.extend(us.iter().map(|&u| style.cell(grid.get(u, h))));
                table.push(row);
            }
            table.write(cli.format, out)?;
        }
        Command::Ultimate { x, y, u_max, u, oracle, u_big } => {
            let m = model(cli, x, y)?;
            let us = match u {
                Some(text) => indices(text, "u")?,
                None => (0..=*u_max).collect(),
            };
            if let Some(&last) = us.last() {
                if last > *u_max {
                    return Err(Failure::Validation(format!("--u reaches {last} beyond --u-max {u_max}")));
                }
            }
            let res = survival_ultimate(&m, *u_max, &solver_options(cli))?;
            let mut table = Table::new(std::iter::once("T\\u".to_string()).chain(us.iter().map(usize::to_string)));
            let mut row = vec![infinity_label(cli.format)];
            row.extend(us.iter().map(|&u| style.cell(res.phi[u])));
            table.push(row);
            if *oracle {
                let o = boundary_oracle(&m, *u_big, *u_max)?;
                let mut row = vec!["oracle".to_string()];
                row.extend(us.iter().map(|&u| style.cell(o[u])));
                table.push(row);
            }
            table.write(cli.format, out)?;
            eprintln!("case: {}", res.case);
            eprintln!("initials: {:?}", res.initials);
            eprintln!("n_solve: {}", res.n_solve);
            eprintln!("solve_change: {:.3e}", res.solve_change);
            if let Some(d) = &res.determinant_at_solve {
                eprintln!("determinant_at_solve: {:.6e}", d.to_f64());
            }
            eprintln!("residual_master: {:.3e}", res.residual_master);
            eprintln!("residual_constraint: {:.3e}", res.residual_constraint);
            eprintln!("representation_error: {:.3e}", res.representation_error);
            eprintln!("precision_bits: {}", res.precision_bits);
        }
        Command::Classify { x, y } => {
            let m = model(cli, x, y)?;
            let tag = m.classify()?;
            let margin = m.margin();
            let mut table = Table::new(["case", "mean_s", "margin", "margin_error_bound"]);
            table.push(vec![
                tag.to_string(),
                format!("{:?}", m.mean_s()),
                format!("{:?}", margin.value),
                format!("{:e}", margin.error_bound),
            ]);
            table.write(cli.format, out)?;
        }
        Command::Simulate { x, y, u, t, trials } => {
            let m = model(cli, x, y)?;
            let us = indices(u, "u")?;
            let ts = indices(t, "t")?;
            if ts.first() == Some(&0) {
                return Err(Failure::Validation("--t: horizons start at 1".into()));
            }
            let grid = survival_finite(&m, *us.last().expect("non-empty"), *ts.last().expect("non-empty"));
            let mut table = Table::new(["u", "T", "trials", "seed", "estimate", "stderr", "recursion"]);
            for &h in &ts {
                for &u in &us {
                    let (p, se) = mc_estimate(&m, u, h, *trials, cli.seed);
                    table.push(vec![
                        u.to_string(),
                        h.to_string(),
                        trials.to_string(),
                        cli.seed.to_string(),
                        style.cell(p),
                        if cli.raw { format!("{se:?}") } else { format!("{se:.3e}") },
                        style.cell(grid.get(u, h)),
                    ]);
                }
            }
            table.write(cli.format, out)?;
        }
        Command::Conjecture { which, x, y, n_max } => {
            let m = model(cli, x, y)?;
            let which = if *which == 1 { Conjecture::Conjecture1 } else { Conjecture::Conjecture2 };
            let trace = determinant_trace(&m, which, *n_max, cli.precision_bits)?;
            let mut table = Table::new(["n", "D_n"]);
            for (n, d) in trace.values.iter().enumerate() {
                let cell = if cli.raw {
                    format!("{d:.40e}")
                } else {
                    format!("{:.12e}", d.to_f64())
                };
                table.push(vec![n.to_string(), cell]);
            }
            table.write(cli.format, out)?;
            eprintln!("precision_bits: {}", trace.precision_bits);
            eprintln!("zero determinants: {:?}", trace.zeros);
            eprintln!("|D_n| below 1 at: {:?}", trace.below_unit());
            eprintln!("|D_n| decreasing within parity class at: {:?}", trace.magnitude_drops());
            eprintln!("printed-inequality violations: {}", trace.violations.len());
            for (n, what) in &trace.violations {
                eprintln!("  n={n}: {what}");
            }
        }
        Command::VerifyPaper { table } => verify(cli, table, out)?,
    }
    Ok(())
}

fn verify(cli: &Cli, which: &str, out: &mut impl Write) -> Outcome {
    let ids: Vec<u8> = match which {
        "all" => published::TABLES.iter().map(|t| t.id).collect(),
        s => match s.parse::<u8>().ok().filter(|id| published::table(*id).is_some()) {
            Some(id) => vec![id],
            None => return Err(Failure::Validation(format!("--table must be 1-5 or all, got `{s}`"))),
        },
    };
    let opts = solver_options(cli);
    let mut failed = Vec::new();
    for id in ids {
        let t = published::table(id).expect("checked above");
        let report = published::verify_table(t, cli.tail_tol, &opts)?;
        writeln!(out, "Table {id}")?;
        status_matrix(&report, t.columns, cli.format).write(cli.format, out)?;
        let odd: Vec<_> = report.cells.iter().filter(|c| c.status != CellStatus::Pass).collect();
        if !odd.is_empty() {
            writeln!(out)?;
            let mut detail = Table::new(["T", "u", "printed", "computed", "status"]);
            for c in odd {
                detail.push(vec![
                    horizon_label(c.horizon, cli.format),
                    c.u.to_string(),
                    format!("{:.3}", c.printed),
                    format!("{:.6}", c.computed),
                    status_label(c.status).to_string(),
                ]);
            }
            detail.write(cli.format, out)?;
        }
        writeln!(
            out,
            "table {id}: {} pass, {} flagged, {} fail\n",
            report.count(CellStatus::Pass),
            report.count(CellStatus::Flagged),
            report.count(CellStatus::Fail)
        )?;
        if !report.ok() {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Mismatch(format!("unexpected mismatches in table(s) {failed:?}")))
    }
}

fn horizon_label(h: Horizon, format: Format) -> String {
    match h {
        Horizon::Finite(t) => t.to_string(),
        Horizon::Infinite => infinity_label(format),
    }
}

fn status_label(s: CellStatus) -> &'static str {
    match s {
        CellStatus::Pass => "pass",
        CellStatus::Flagged => "flagged",
        CellStatus::Fail => "FAIL",
    }
}

fn status_matrix(report: &TableReport, columns: &[usize], format: Format) -> Table {
    let mut table = Table::new(std::iter::once("T\\u".to_string()).chain(columns.iter().map(usize::to_string)));
    let mut horizons: Vec<Horizon> = Vec::new();
    for c in &report.cells {
        if !horizons.contains(&c.horizon) {
            horizons.push(c.horizon);
        }
    }
    for h in horizons {
        let mut row = vec![horizon_label(h, format)];
        row.extend(report.row(h).map(|c| status_label(c.status).to_string()));
        table.push(row);
    }
    table
}
