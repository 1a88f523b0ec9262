use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use gbsknot::gbs::{check_theorem, match_gbs, slope_threshold, TheoremOptions};
use gbsknot::homology::h1_diagnostic;
use gbsknot::orderability::{
    check_certificate, search_nonlo, Certificate, SearchConfig, SearchOutcome,
};
use gbsknot::presentations::CasDialect;
use gbsknot::twisted_torus::{
    derive_ab_presentation, derive_longitude, sweep, LongitudeConvention, TwistParams, A, B,
};
use gbsknot::{dehn_fill, Error, PeripheralSystem, Presentation, Slope};

#[derive(Debug, Parser)]
#[command(
    name = "gbsknot",
    version,
    about = "GBS knot groups, Dehn fillings and non-left-orderability certificates"
)]
pub struct Cli {
    /// Omit timing and host-dependent fields so output is reproducible.
    #[arg(long, global = true)]
    pub deterministic: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print a knot group presentation with its peripheral system.
    Present {
        #[command(subcommand)]
        family: Family,
    },
    /// Dehn filling of a knot group along a slope.
    Fill(FillArgs),
    /// Check the threshold theorem's hypotheses; exit 0 iff it applies.
    CheckTheorem(TheoremArgs),
    /// Compare H1 of the filling with Z/|p| and report the longitude class.
    DiagnoseH1(FillArgs),
    /// Search for a non-left-orderability certificate.
    CertifyNonlo(CertifyArgs),
    /// Replay a certificate.
    VerifyCert(VerifyArgs),
    /// Tabulate thresholds and verdicts over a (u, v) grid.
    Sweep(SweepArgs),
}

#[derive(Debug, Subcommand)]
pub enum Family {
    /// Positively u-twisted (3, 3v+2) torus knot.
    TwistedTorus {
        #[command(flatten)]
        knot: TwistArgs,
        #[arg(long, value_enum, default_value_t = Emit::Text)]
        emit: Emit,
        /// CAS dialect for `--emit cas`: `gap` or a template string.
        #[arg(long, default_value = "gap")]
        dialect: String,
    },
}

#[derive(Debug, Clone, Copy, Args)]
pub struct TwistArgs {
    #[arg(long)]
    pub u: u32,
    #[arg(long)]
    pub v: u32,
    #[arg(long, value_enum, default_value_t = Convention::Literal)]
    pub convention: Convention,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Convention {
    #[value(name = "paper")]
    Literal,
    H1,
}

impl From<Convention> for LongitudeConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::Literal => LongitudeConvention::Literal,
            Convention::H1 => LongitudeConvention::HomologyCorrected,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Text,
    Struct,
    Cas,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// A knot given either as twisted-torus parameters or as a presentation file.
#[derive(Debug, Clone, Args)]
pub struct KnotSource {
    #[arg(long, requires = "v", conflicts_with = "presentation")]
    pub u: Option<u32>,
    #[arg(long, requires = "u")]
    pub v: Option<u32>,
    #[arg(long, value_enum, default_value_t = Convention::Literal)]
    pub convention: Convention,
    /// Presentation file, text `< a b | ... >` or structured JSON.
    #[arg(long)]
    pub presentation: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FillArgs {
    #[command(flatten)]
    pub knot: KnotSource,
    /// Slope `p/q`, or `p` for `p/1`.
    #[arg(long)]
    pub slope: Option<String>,
    #[arg(long, value_enum, default_value_t = Emit::Text)]
    pub emit: Emit,
    #[arg(long, default_value = "gap")]
    pub dialect: String,
}

#[derive(Debug, Args)]
pub struct TheoremArgs {
    #[command(flatten)]
    pub knot: KnotSource,
    #[arg(long)]
    pub slope: Option<String>,
    /// Do not require w to contain b.
    #[arg(long)]
    pub weak_w: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub knot: KnotSource,
    /// Fill along this slope first.
    #[arg(long)]
    pub slope: Option<String>,
    #[arg(long, default_value_t = 2)]
    pub radius: usize,
    #[arg(long, default_value_t = 1)]
    pub budget: usize,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// Write the certificate here when one is found.
    #[arg(long)]
    pub emit: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub certificate: PathBuf,
    /// Check against this presentation instead of the embedded one.
    #[arg(long)]
    pub presentation: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 0)]
    pub u_min: u32,
    #[arg(long, default_value_t = 3)]
    pub u_max: u32,
    #[arg(long, default_value_t = 0)]
    pub v_min: u32,
    #[arg(long, default_value_t = 3)]
    pub v_max: u32,
    /// Comma separated slopes to check at every grid point.
    #[arg(long, value_delimiter = ',')]
    pub slopes: Vec<String>,
    #[arg(long, value_enum, default_value_t = Convention::Literal)]
    pub convention: Convention,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

pub enum Failure {
    Usage(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Internal(m) => Failure::Internal(m),
            other => Failure::Usage(other.to_string()),
        }
    }
}

type Outcome = Result<(String, i32), Failure>;

pub fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Present { family } => match family {
            Family::TwistedTorus {
                knot,
                emit,
                dialect,
            } => present(*knot, *emit, dialect),
        },
        Command::Fill(a) => fill(a),
        Command::CheckTheorem(a) => theorem(a),
        Command::DiagnoseH1(a) => diagnose(a),
        Command::CertifyNonlo(a) => certify(a, cli.deterministic),
        Command::VerifyCert(a) => verify(a),
        Command::Sweep(a) => run_sweep(a),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

struct Knot {
    pres: Presentation,
    peripheral: Option<PeripheralSystem>,
    slope: Option<Slope>,
    warnings: Vec<String>,
}

fn twisted_knot(params: TwistParams, convention: LongitudeConvention) -> Result<Knot, Failure> {
    let d = derive_ab_presentation(params)?;
    let l = derive_longitude(params, convention)?;
    Ok(Knot {
        pres: d.presentation,
        peripheral: Some(l.peripheral()?),
        slope: None,
        warnings: l.warning.into_iter().collect(),
    })
}

fn load(src: &KnotSource) -> Result<Knot, Failure> {
    match (&src.presentation, src.u, src.v) {
        (Some(path), _, _) => {
            let (pres, peripheral, slope) = Presentation::parse_any(&read(path)?)?;
            Ok(Knot {
                pres,
                peripheral,
                slope,
                warnings: Vec::new(),
            })
        }
        (None, Some(u), Some(v)) => twisted_knot(TwistParams::new(u, v), src.convention.into()),
        _ => Err(Failure::Usage(
            "give --u and --v, or --presentation FILE".into(),
        )),
    }
}

fn slope_arg(arg: &Option<String>, knot: &Knot) -> Result<Slope, Failure> {
    match (arg, knot.slope) {
        (Some(s), _) => Ok(Slope::parse(s)?),
        (None, Some(s)) => Ok(s),
        (None, None) => Err(Failure::Usage("a slope is required (--slope p/q)".into())),
    }
}

fn peripheral(knot: &Knot) -> Result<&PeripheralSystem, Failure> {
    knot.peripheral
        .as_ref()
        .ok_or_else(|| Failure::Usage("the presentation carries no peripheral system".into()))
}

fn present(knot: TwistArgs, emit: Emit, dialect: &str) -> Outcome {
    let params = TwistParams::new(knot.u, knot.v);
    let convention: LongitudeConvention = knot.convention.into();
    let d = derive_ab_presentation(params)?;
    let l = derive_longitude(params, convention)?;
    let per = l.peripheral()?;
    let out = match emit {
        Emit::Struct => {
            let mut e = d.presentation.export();
            e.peripheral = Some(per.export());
            e.to_json()
        }
        Emit::Cas => d.presentation.render_cas(&CasDialect::from_config(dialect)),
        Emit::Text => {
            let mut s = String::new();
            let (p, q) = params.torus_type();
            writeln!(
                s,
                "knot: positively {}-twisted ({p},{q}) torus knot",
                params.u
            )
            .unwrap();
            if let Some((a, b, c)) = params.pretzel() {
                writeln!(s, "note: equivalent to the ({a},{b},{c})-pretzel knot").unwrap();
            }
            writeln!(s, "presentation: {}", d.presentation.render_text()).unwrap();
            let g = &d.gbs;
            writeln!(
                s,
                "gbs data: w1 = {}, m = {}, r = {}, w2 = {}, n = {}, k = {}",
                show(&g.w1.to_string()),
                g.m,
                g.r,
                show(&g.w2.to_string()),
                g.n,
                g.k
            )
            .unwrap();
            if let Some(found) = match_gbs(&d.relator, A, B) {
                writeln!(
                    s,
                    "canonical parse: w1 = {}, m = {}, r = {}, w2 = {}, n = {}, k = {}",
                    show(&found.w1.render()),
                    found.m,
                    found.r,
                    show(&found.w2.render()),
                    found.n,
                    found.k
                )
                .unwrap();
            }
            writeln!(s, "meridian: {}", per.meridian).unwrap();
            writeln!(
                s,
                "longitude ({} convention): {}",
                convention.as_str(),
                per.longitude
            )
            .unwrap();
            writeln!(
                s,
                "decomposition: s = {}, t = {}, w = {}",
                per.s, per.t, per.w
            )
            .unwrap();
            writeln!(s, "threshold: s + t = {}", slope_threshold(&per)).unwrap();
            if let Some(c) = l.homology_class {
                writeln!(s, "longitude homology class: {c} x meridian").unwrap();
            }
            if let Some(w) = &l.warning {
                writeln!(s, "warning: {w}").unwrap();
            }
            s.push_str("relator derivation:\n");
            s.push_str(&d.trace.render());
            s.push_str("longitude derivation:\n");
            s.push_str(&l.trace.render());
            s
        }
    };
    Ok((out, 0))
}

fn show(s: &str) -> &str {
    if s.is_empty() {
        "1"
    } else {
        s
    }
}

fn warnings_text(knot: &Knot) -> String {
    knot.warnings
        .iter()
        .map(|w| format!("warning: {w}\n"))
        .collect()
}

fn fill(a: &FillArgs) -> Outcome {
    let knot = load(&a.knot)?;
    let slope = slope_arg(&a.slope, &knot)?;
    let filled = dehn_fill(&knot.pres, peripheral(&knot)?, slope)?;
    let out = match a.emit {
        Emit::Struct => filled.export().to_json(),
        Emit::Cas => filled
            .presentation()
            .render_cas(&CasDialect::from_config(&a.dialect)),
        Emit::Text => {
            let mut s = warnings_text(&knot);
            writeln!(s, "slope: {slope}").unwrap();
            writeln!(s, "filled: {}", filled.presentation().render_text()).unwrap();
            let f = filled.filling_relators();
            writeln!(s, "commutator relator: {}", show(&f[0].render())).unwrap();
            writeln!(s, "filling relator: {}", show(&f[1].render())).unwrap();
            s
        }
    };
    Ok((out, 0))
}

fn theorem(a: &TheoremArgs) -> Outcome {
    let knot = load(&a.knot)?;
    let slope = slope_arg(&a.slope, &knot)?;
    let report = check_theorem(
        &knot.pres,
        peripheral(&knot)?,
        slope,
        TheoremOptions {
            weak_w_condition: a.weak_w,
        },
    );
    let out = match a.format {
        Format::Json => json(&report),
        Format::Text => warnings_text(&knot) + &report.render_checklist(),
    };
    Ok((out, if report.applies() { 0 } else { 1 }))
}

fn diagnose(a: &FillArgs) -> Outcome {
    let knot = load(&a.knot)?;
    let slope = slope_arg(&a.slope, &knot)?;
    let filled = dehn_fill(&knot.pres, peripheral(&knot)?, slope)?;
    let report = h1_diagnostic(&filled);
    let out = match a.emit {
        Emit::Struct => json(&report),
        _ => warnings_text(&knot) + &report.render(),
    };
    Ok((out, 0))
}

#[derive(Serialize)]
struct CertifySummary<'a> {
    outcome: &'a str,
    stats: &'a gbsknot::orderability::SearchStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate_nodes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate_verified: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    elapsed_ms: Option<u128>,
}

fn certify(a: &CertifyArgs, deterministic: bool) -> Outcome {
    if a.radius == 0 || a.threads == 0 {
        return Err(Failure::Usage(
            "--radius and --threads must be positive".into(),
        ));
    }
    let knot = load(&a.knot)?;
    let slope = match (&a.slope, knot.slope) {
        (Some(s), _) => Some(Slope::parse(s)?),
        (None, s) => s,
    };
    let pres = match slope {
        Some(s) => dehn_fill(&knot.pres, peripheral(&knot)?, s)?.presentation(),
        None => knot.pres.clone(),
    };
    let mut cfg = SearchConfig::new(a.radius, a.budget).with_env_overrides()?;
    cfg.threads = a.threads;
    let start = Instant::now();
    let run = search_nonlo(&pres, &cfg);
    let elapsed = (!deterministic).then(|| start.elapsed().as_millis());
    let cert = run.outcome.certificate();
    let verified = match cert {
        Some(c) => match check_certificate(c, &pres) {
            Ok(()) => Some(true),
            Err(e) => {
                return Err(Failure::Internal(format!(
                    "produced certificate fails replay: {e}"
                )))
            }
        },
        None => None,
    };
    if let (Some(path), Some(c)) = (&a.emit, cert) {
        std::fs::write(path, c.to_json())
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    let summary = CertifySummary {
        outcome: run.outcome.label(),
        stats: &run.stats,
        certificate_nodes: cert.map(|c| c.nodes.len()),
        certificate_verified: verified,
        elapsed_ms: elapsed,
    };
    let out = match a.format {
        Format::Json => json(&summary),
        Format::Text => {
            let st = &run.stats;
            let mut s = warnings_text(&knot);
            writeln!(s, "presentation: {}", pres.render_text()).unwrap();
            writeln!(s, "radius: {}, budget: {}", a.radius, a.budget).unwrap();
            writeln!(s, "outcome: {}", summary.outcome).unwrap();
            writeln!(
                s,
                "ball: {} words, {} classes, {} merges, {} words explored{}",
                st.ball_size,
                st.classes,
                st.merges,
                st.explored_words,
                if st.saturation_truncated {
                    " (truncated)"
                } else {
                    ""
                }
            )
            .unwrap();
            writeln!(
                s,
                "search: {} witnessed classes, {} constraints, {} nodes",
                st.witnessed_classes, st.constraints, st.nodes
            )
            .unwrap();
            writeln!(s, "reason: {}", st.reason).unwrap();
            if let Some(c) = cert {
                writeln!(
                    s,
                    "certificate: {} tree nodes, {} classes, replay ok",
                    c.nodes.len(),
                    c.classes.len()
                )
                .unwrap();
            }
            if let (Some(path), Some(_)) = (&a.emit, cert) {
                writeln!(s, "written: {}", path.display()).unwrap();
            }
            if let Some(ms) = elapsed {
                writeln!(s, "elapsed: {ms} ms").unwrap();
            }
            s
        }
    };
    let code = match run.outcome {
        SearchOutcome::Inconclusive => 1,
        _ => 0,
    };
    Ok((out, code))
}

fn verify(a: &VerifyArgs) -> Outcome {
    let cert = Certificate::from_json(&read(&a.certificate)?)?;
    let pres = match &a.presentation {
        Some(p) => Presentation::parse_any(&read(p)?)?.0,
        None => cert.presentation.clone().into_parts()?.0,
    };
    Ok(match check_certificate(&cert, &pres) {
        Ok(()) => ("certificate valid\n".to_string(), 0),
        Err(e) => (format!("certificate invalid: {e}\n"), 1),
    })
}

#[derive(Serialize)]
struct SweepRow {
    u: u32,
    v: u32,
    s: i64,
    t: i64,
    threshold: i64,
    verified: bool,
    longitude_class: Option<i64>,
    slopes: Vec<SweepSlope>,
}

#[derive(Serialize)]
struct SweepSlope {
    slope: Slope,
    applies: bool,
    h1: String,
    h1_matches: bool,
}

fn run_sweep(a: &SweepArgs) -> Outcome {
    if a.u_min > a.u_max || a.v_min > a.v_max {
        return Err(Failure::Usage("empty grid".into()));
    }
    let slopes = a
        .slopes
        .iter()
        .map(|s| Slope::parse(s))
        .collect::<Result<Vec<_>, _>>()?;
    let convention: LongitudeConvention = a.convention.into();
    let reports = sweep(a.u_min..=a.u_max, a.v_min..=a.v_max, convention);
    let mut rows = Vec::new();
    for r in &reports {
        let knot = twisted_knot(r.params, convention)?;
        let per = peripheral(&knot)?;
        let mut cells = Vec::new();
        for &slope in &slopes {
            let applies =
                check_theorem(&knot.pres, per, slope, TheoremOptions::default()).applies();
            let h1 = h1_diagnostic(&dehn_fill(&knot.pres, per, slope)?);
            cells.push(SweepSlope {
                slope,
                applies,
                h1: h1.computed_h1,
                h1_matches: h1.matches,
            });
        }
        rows.push(SweepRow {
            u: r.params.u,
            v: r.params.v,
            s: r.s,
            t: r.t,
            threshold: r.threshold,
            verified: r.all_passed(),
            longitude_class: r.longitude_class,
            slopes: cells,
        });
    }
    let out = match a.format {
        Format::Json => json(&rows),
        Format::Text => {
            let mut s = format!("convention: {}\n", convention.as_str());
            write!(
                s,
                "{:>3} {:>3} {:>5} {:>3} {:>9} {:>8} {:>7}",
                "u", "v", "s", "t", "threshold", "verified", "l-class"
            )
            .unwrap();
            for sl in &slopes {
                write!(s, " {:>16}", format!("{sl}")).unwrap();
            }
            s.push('\n');
            for r in &rows {
                write!(
                    s,
                    "{:>3} {:>3} {:>5} {:>3} {:>9} {:>8} {:>7}",
                    r.u,
                    r.v,
                    r.s,
                    r.t,
                    r.threshold,
                    if r.verified { "yes" } else { "NO" },
                    r.longitude_class.map_or("-".to_string(), |c| c.to_string())
                )
                .unwrap();
                for c in &r.slopes {
                    let cell = format!(
                        "{} {}{}",
                        if c.applies { "applies" } else { "no" },
                        c.h1,
                        if c.h1_matches { "" } else { "*" }
                    );
                    write!(s, " {cell:>16}").unwrap();
                }
                s.push('\n');
            }
            if !slopes.is_empty() {
                s.push_str("* H1 differs from Z/|p|\n");
            }
            s
        }
    };
    let code = if rows.iter().all(|r| r.verified) {
        0
    } else {
        3
    };
    Ok((out, code))
}
