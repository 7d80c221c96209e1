use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use polarsl::catalog::{catalog_entry, CatalogParams, CATALOG};
use polarsl::classify::{discreteness, ClassifyConfig};
use polarsl::coeffs::{parse_problem, ProblemSpec, Side, SideProfile};
use polarsl::eigen::{eigenvalues, fd_oracle, oracle_table, EigenConfig, SpectrumReport};
use polarsl::karamata::{is_positively_increasing, is_slowly_varying, karamata_rep_check, resolve_function, GridPolicy, Regime, Status};
use polarsl::report::analyze;
use polarsl::weyl::{atkinson_predict, log_grid, m_trace, sample_flags, WeylConfig};

mod output;

use output::{csv_escape, Output};

#[derive(Parser)]
#[command(name = "polarsl", version, about = "Spectral regularity of indefinite Sturm-Liouville operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Clone)]
struct Common {
    /// Output file; the document goes to stdout when omitted
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Relative tolerance of the ODE integrator [default: 1e-9, eigs 1e-11]
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Worker threads for data-parallel stages [default: all cores]
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Exit with status 4 when any verdict is inconclusive
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Clone, Default)]
struct ProblemArgs {
    /// Problem definition file
    #[arg(long, conflicts_with = "catalog")]
    problem: Option<PathBuf>,
    /// Built-in catalog entry
    #[arg(long)]
    catalog: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    alpha_plus: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    alpha_minus: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    b_plus: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    b_minus: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Plus,
    Minus,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum TestArg {
    SlowlyVarying,
    PositivelyIncreasing,
    KaramataRep,
}

#[derive(Clone, Copy, ValueEnum)]
enum AtArg {
    ZeroPlus,
    ZeroMinus,
    PlusInf,
    MinusInf,
}

#[derive(Subcommand)]
enum Command {
    /// Full classification report
    Analyze {
        #[command(flatten)]
        p: ProblemArgs,
        /// Skip the numeric D-ratio when an analytic route decides
        #[arg(long)]
        no_cross_check: bool,
    },
    /// Neumann m-function trace on the imaginary axis
    Mfun {
        #[command(flatten)]
        p: ProblemArgs,
        #[arg(long, default_value_t = 1e-2)]
        y_min: f64,
        #[arg(long, default_value_t = 1e6)]
        y_max: f64,
        #[arg(long, default_value_t = 50)]
        points: usize,
        #[arg(long, value_enum, default_value_t = SideArg::Both)]
        side: SideArg,
    },
    /// One Karamata test on a named function or power-log expression
    Karamata {
        #[arg(long = "fn")]
        function: String,
        #[arg(long, value_enum)]
        test: TestArg,
        #[arg(long, value_enum)]
        at: AtArg,
        /// Probe grid depth
        #[arg(long, default_value_t = 60)]
        depth: usize,
    },
    /// Eigenvalues of the coupled operator in a window
    Eigs {
        #[command(flatten)]
        p: ProblemArgs,
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true, default_values_t = [-500.0, 500.0])]
        window: Vec<f64>,
        /// Scan panels, uniform in sign(λ)√|λ|
        #[arg(long, default_value_t = 400)]
        panels: usize,
        /// Add the finite-difference oracle column
        #[arg(long)]
        oracle: bool,
        /// Intervals of the oracle mesh
        #[arg(long, default_value_t = 2000)]
        oracle_points: usize,
        /// Run even when discreteness is not established (singular ends get a Neumann cap)
        #[arg(long)]
        force_truncate: bool,
        /// Solve only the Neumann problem of one side
        #[arg(long, value_enum)]
        decoupled: Option<SideArg>,
    },
    /// List catalog entries, or show one
    Catalog {
        name: Option<String>,
        #[command(flatten)]
        p: ProblemArgs,
    },
}

impl ProblemArgs {
    fn params(&self) -> CatalogParams {
        CatalogParams {
            alpha_plus: self.alpha_plus,
            alpha_minus: self.alpha_minus,
            b_plus: self.b_plus,
            b_minus: self.b_minus,
            alpha: self.alpha,
            beta: self.beta,
        }
    }

    fn overrides(&self) -> BTreeMap<String, f64> {
        let mut m = BTreeMap::new();
        for (k, v) in [
            ("alpha_plus", self.alpha_plus),
            ("alpha_minus", self.alpha_minus),
            ("b_plus", self.b_plus),
            ("b_minus", self.b_minus),
            ("alpha", self.alpha),
            ("beta", self.beta),
        ] {
            if let Some(v) = v {
                m.insert(k.to_string(), v);
            }
        }
        m
    }

    /// The problem and, for catalog entries, the side to decouple.
    fn load(&self) -> Result<(ProblemSpec, Option<Side>)> {
        if let Some(path) = &self.problem {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let p = parse_problem(&text, &self.overrides()).with_context(|| format!("in {}", path.display()))?;
            return Ok((p, None));
        }
        let Some(name) = &self.catalog else { bail!("one of --problem or --catalog is required") };
        let e = catalog_entry(name, &self.params())?;
        match e.problem {
            Some(p) => Ok((p, e.decoupled)),
            None => bail!("catalog entry '{name}' is a function pair; use `karamata --fn {}`", e.functions.join("|")),
        }
    }
}

fn weyl_cfg(tol: Option<f64>) -> WeylConfig {
    let mut w = WeylConfig::default();
    if let Some(t) = tol {
        w.ode.rtol = t;
    }
    w
}

fn side_of(s: SideArg) -> Vec<Side> {
    match s {
        SideArg::Plus => vec![Side::Plus],
        SideArg::Minus => vec![Side::Minus],
        SideArg::Both => Side::BOTH.to_vec(),
    }
}

fn run_analyze(c: &Common, p: &ProblemArgs, no_cross: bool, out: &mut Output) -> Result<bool> {
    let (problem, _) = p.load()?;
    let cfg = ClassifyConfig { weyl: weyl_cfg(c.tol), cross_check: !no_cross, ..Default::default() };
    let mut rep = analyze(&problem, &cfg)?;
    let mut sidecars: Vec<(String, String)> = Vec::new();
    if let Some(inf) = &rep.regularity_infinity {
        if let Some(q) = &inf.q_trace {
            let mut s = String::from("x,q\n");
            for (x, v) in q.x.iter().zip(&q.q) {
                s.push_str(&format!("{x:e},{v:e}\n"));
            }
            sidecars.push(("q_trace".into(), s));
        }
        if let Some(d) = &inf.d_check {
            let mut s = String::from("y,d_ratio\n");
            for (y, v) in &d.ratios {
                s.push_str(&format!("{y:e},{v:e}\n"));
            }
            sidecars.push(("d_ratio".into(), s));
        }
    }
    if let Some(d) = &rep.discreteness {
        for sd in &d.sides {
            let mut s = String::from("point,diagnostic\n");
            for (x, v) in &sd.limit.evidence {
                s.push_str(&format!("{x:e},{v:e}\n"));
            }
            sidecars.push((format!("discreteness_{}", sd.side.label()), s));
        }
    }
    for (name, body) in sidecars {
        if let Some(file) = out.sidecar(&name, &body)? {
            rep.traces.insert(name, file);
        }
    }
    for v in [&rep.regularity_infinity, &rep.regularity_zero].into_iter().flatten() {
        eprintln!("{:?}: {} via {}", v.point, v.status.status.label(), v.route.label());
    }
    if let Some(s) = &rep.similarity {
        eprintln!("similarity: {}", s.status.label());
    }
    let strict_ok = rep.inconclusive().is_empty();
    match c.format {
        Format::Json => out.write(&to_json(&rep)?)?,
        Format::Csv => {
            let mut s = String::from("verdict,status,route\n");
            if let Some(v) = &rep.regularity_infinity {
                s.push_str(&format!("regularity_infinity,{},{}\n", v.status.status.label(), v.route.label()));
            }
            if let Some(v) = &rep.regularity_zero {
                s.push_str(&format!("regularity_zero,{},{}\n", v.status.status.label(), v.route.label()));
            }
            for (k, v) in [("riesz", &rep.riesz), ("similarity", &rep.similarity)] {
                if let Some(v) = v {
                    s.push_str(&format!("{k},{},{}\n", v.status.label(), csv_escape(&v.note)));
                }
            }
            out.write(&s)?
        }
    }
    Ok(strict_ok)
}

fn run_mfun(c: &Common, p: &ProblemArgs, y_min: f64, y_max: f64, points: usize, side: SideArg, out: &mut Output) -> Result<bool> {
    if !(y_min > 0.0 && y_max >= y_min && points >= 1) {
        bail!("usage: need 0 < --y-min <= --y-max and --points >= 1");
    }
    let (problem, _) = p.load()?;
    let cfg = weyl_cfg(c.tol);
    let ys = log_grid(y_min, y_max, points);
    let mut traces = Vec::new();
    for s in side_of(side) {
        traces.push((s, m_trace(&problem, s, &ys, &cfg)?, SideProfile::new(&problem, s, cfg.profile)?));
    }
    match c.format {
        Format::Json => {
            let v: Vec<_> = traces.iter().map(|(_, t, _)| t).collect();
            out.write(&to_json(&v)?)?;
        }
        Format::Csv => {
            let mut s = String::from("side,y,re_m,im_m,abs_m,truncation,disk_radius,atkinson_re,atkinson_im,ratio,mode,drift,flags\n");
            for (side, t, prof) in &traces {
                for row in &t.rows {
                    let atk = atkinson_predict(prof, row.y).ok();
                    let (are, aim) = (opt(atk.map(|a| a.re)), opt(atk.map(|a| a.im)));
                    match &row.sample {
                        Ok(m) => {
                            let ratio = atk.map(|a| m.m.im / a.im);
                            s.push_str(&format!(
                                "{},{:e},{:e},{:e},{:e},{},{},{are},{aim},{},{:?},{:e},{}\n",
                                side.label(),
                                row.y,
                                m.m.re,
                                m.m.im,
                                m.m.norm(),
                                opt(m.truncation),
                                opt(m.disk_radius),
                                opt(ratio),
                                m.mode,
                                m.wronskian_drift,
                                csv_escape(&sample_flags(m).join(";"))
                            ));
                        }
                        Err(e) => s.push_str(&format!("{},{:e},,,,,,{are},{aim},,,,{}\n", side.label(), row.y, csv_escape(&format!("error: {e}")))),
                    }
                }
            }
            out.write(&s)?;
        }
    }
    Ok(true)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

fn run_karamata(c: &Common, function: &str, test: TestArg, at: AtArg, depth: usize, out: &mut Output) -> Result<bool> {
    let h = resolve_function(function)?;
    let regime = match at {
        AtArg::ZeroPlus => Regime::ZeroPlus,
        AtArg::ZeroMinus => Regime::ZeroMinus,
        AtArg::PlusInf => Regime::PlusInfinity,
        AtArg::MinusInf => Regime::MinusInfinity,
    };
    // minus regimes take the odd reflection x -> -f(-x) of the function
    let h = if regime.is_minus() { h.reflect()? } else { h };
    let policy = GridPolicy::default().with_depth(depth);
    let (name, v) = match test {
        TestArg::SlowlyVarying => ("slowly-varying", is_slowly_varying(&h, regime, &policy)?),
        TestArg::PositivelyIncreasing => ("positively-increasing", is_positively_increasing(&h, regime, &policy)?),
        TestArg::KaramataRep => ("karamata-rep", karamata_rep_check(&h, regime, &policy)?),
    };
    let note = if v.note.is_empty() { String::new() } else { format!(" ({})", v.note) };
    println!("{name} {function} at {}: {}{note}", regime.label(), v.status.label());
    match c.format {
        Format::Json => out.write_or_skip(&to_json(&v)?)?,
        Format::Csv => {
            let mut s = String::from("point,diagnostic\n");
            for (x, d) in &v.evidence {
                s.push_str(&format!("{x:e},{d:e}\n"));
            }
            out.write_or_skip(&s)?;
        }
    }
    Ok(v.status != Status::Inconclusive)
}

#[allow(clippy::too_many_arguments)]
fn run_eigs(
    c: &Common,
    p: &ProblemArgs,
    window: &[f64],
    panels: usize,
    oracle: bool,
    oracle_points: usize,
    force: bool,
    decoupled: Option<SideArg>,
    out: &mut Output,
) -> Result<bool> {
    let (problem, cat_side) = p.load()?;
    let (lo, hi) = (window[0], window[1]);
    let mut cfg = EigenConfig { panels, ..Default::default() };
    if let Some(t) = c.tol {
        cfg.weyl.ode.rtol = t;
    }
    cfg.decoupled = match decoupled {
        Some(SideArg::Plus) => Some(Side::Plus),
        Some(SideArg::Minus) => Some(Side::Minus),
        Some(SideArg::Both) => None,
        None => cat_side,
    };
    let ccfg = ClassifyConfig { weyl: weyl_cfg(c.tol), ..Default::default() };
    let disc = discreteness(&problem, &ccfg)?;
    if disc.status != Status::Holds && !force {
        bail!(
            "discreteness of the spectrum is {} for this problem ({} / {}); eigenvalues would not be isolated. \
             Pass --force-truncate to solve with Neumann caps at singular endpoints anyway",
            disc.status.label(),
            disc.sides[0].limit.note,
            disc.sides[1].limit.note
        );
    }
    let mut rep: SpectrumReport = eigenvalues(&problem, (lo, hi), &cfg)?;
    if oracle {
        let count = rep.counts.0.max(rep.counts.1).max(1);
        let fd = fd_oracle(&problem, oracle_points, count, &cfg)?;
        rep.oracle = Some(oracle_table(&rep, &fd));
        rep.warnings.extend(fd.warnings);
    }
    eprintln!("{} positive, {} negative eigenvalues in [{lo}, {hi}]{}", rep.counts.0, rep.counts.1, if rep.zero.is_some() { ", and 0" } else { "" });
    let csv = spectrum_csv(&rep);
    match c.format {
        Format::Json => {
            out.sidecar("spectrum", &csv)?;
            out.write(&to_json(&rep)?)?;
        }
        Format::Csv => out.write(&csv)?,
    }
    Ok(true)
}

fn spectrum_csv(rep: &SpectrumReport) -> String {
    let mut s = String::from("index,lambda,residual,sign_class,oracle_lambda,oracle_diff\n");
    let oracle = |sign: i8, k: usize| rep.oracle.as_ref().and_then(|o| o.iter().find(|r| r.sign == sign && r.index == k));
    let mut line = |k: usize, e: &polarsl::eigen::Eigenvalue, class: &str, sign: i8| {
        let o = oracle(sign, k);
        s.push_str(&format!(
            "{k},{:.15e},{:e},{class},{},{}\n",
            e.lambda,
            e.residual,
            o.map(|r| format!("{:.15e}", r.oracle)).unwrap_or_default(),
            o.map(|r| format!("{:e}", r.rel_diff)).unwrap_or_default()
        ));
    };
    for (k, e) in rep.negative.iter().enumerate().rev() {
        line(k + 1, e, "negative", -1);
    }
    if let Some(z) = &rep.zero {
        line(0, z, "zero", 0);
    }
    for (k, e) in rep.positive.iter().enumerate() {
        line(k + 1, e, "positive", 1);
    }
    s
}

fn run_catalog(c: &Common, name: Option<&str>, p: &ProblemArgs, out: &mut Output) -> Result<bool> {
    match name {
        None => {
            let mut s = String::new();
            for n in CATALOG {
                let e = catalog_entry(n, &CatalogParams::default())?;
                s.push_str(&format!("{n}\t{}\n", e.description));
            }
            match c.format {
                Format::Json => {
                    let all: Vec<_> = CATALOG.iter().map(|n| catalog_entry(n, &CatalogParams::default())).collect::<polarsl::Result<_>>()?;
                    out.write(&to_json(&all)?)?
                }
                Format::Csv => out.write(&s.replace('\t', ","))?,
            }
        }
        Some(n) => {
            let e = catalog_entry(n, &p.params())?;
            out.write(&to_json(&e)?)?;
        }
    }
    Ok(true)
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let c = cli.common.clone();
    if let Some(n) = c.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let mut out = Output::new(c.out.clone(), std::env::args().collect());
    let res = match &cli.command {
        Command::Analyze { p, no_cross_check } => run_analyze(&c, p, *no_cross_check, &mut out),
        Command::Mfun { p, y_min, y_max, points, side } => run_mfun(&c, p, *y_min, *y_max, *points, *side, &mut out),
        Command::Karamata { function, test, at, depth } => run_karamata(&c, function, *test, *at, *depth, &mut out),
        Command::Eigs { p, window, panels, oracle, oracle_points, force_truncate, decoupled } => {
            run_eigs(&c, p, window, *panels, *oracle, *oracle_points, *force_truncate, *decoupled, &mut out)
        }
        Command::Catalog { name, p } => run_catalog(&c, name.as_deref(), p, &mut out),
    };
    let res = res.and_then(|ok| out.finish().map(|_| ok));
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) if c.strict => {
            eprintln!("strict: inconclusive verdicts present");
            ExitCode::from(4)
        }
        Ok(false) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
