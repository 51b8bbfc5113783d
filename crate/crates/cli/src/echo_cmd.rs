use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use echolab_core::echo::{
    certify_fixed_point, nonvanishing_probe, render_alignment, verify_certificate, BuildOptions, Mode, ProbeTable,
    Thresholds, VerificationReport,
};
use echolab_core::numeric::precision_cap;
use echolab_core::{AlgebraicInput, EchoingCertificate, Error, EvalStatus, Ratio, WordStream};
use serde_json::{json, Value};

use crate::source::{self, Source};
use crate::{CliError, Report, EXIT_FAILED, EXIT_OK};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    /// Each interval runs from the first to the last mismatch of its block
    Tight,
    /// Each interval spans the whole mismatch block
    Block,
}

#[derive(Debug, Args)]
pub struct EchoArgs {
    #[command(flatten)]
    source: Source,
    /// Prefix x of the fixed point used for return words and the shift
    #[arg(long, default_value = "0")]
    prefix: String,
    #[arg(long, default_value = "1/10")]
    epsilon: Ratio,
    #[arg(long, default_value_t = 12)]
    n_max: usize,
    #[arg(long, default_value_t = 100_000)]
    horizon: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Tight)]
    mode: ModeArg,
    /// Fix n0 instead of searching for the least admissible one
    #[arg(long)]
    n0: Option<usize>,
    /// Keep reading each level until this many intervals are known
    #[arg(long)]
    min_intervals: Option<usize>,
    #[arg(long, default_value_t = 1)]
    delta_min: usize,
    #[arg(long, default_value = "1/8")]
    gap_floor: Ratio,
    #[arg(long, default_value = "4")]
    gap_ceiling: Ratio,
    /// Also check the gap ceiling and run non-vanishing probes
    #[arg(long)]
    strong: bool,
    /// Bases for the probes, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "2")]
    beta: Vec<String>,
    /// Probe interval indices 1..=J
    #[arg(long, default_value_t = 3)]
    j_max: usize,
    /// Verify this certificate instead of building one
    #[arg(long)]
    verify_only: Option<PathBuf>,
    /// Write the certificate JSON here
    #[arg(long, conflicts_with = "verify_only")]
    output: Option<PathBuf>,
    /// Write density and gap curves as CSV
    #[arg(long)]
    dump_csv: Option<PathBuf>,
    /// Columns of the alignment shown for the first entry
    #[arg(long, default_value_t = 80)]
    width: usize,
}

const STRONG_MIN_INTERVALS: usize = 3;

fn csv(cert: &EchoingCertificate, report: &VerificationReport) -> String {
    let mut out = String::from("n,kind,index,value\n");
    for e in &report.entries {
        for (i, d) in e.density_curve.iter().enumerate() {
            let _ = writeln!(out, "{},density,{},{}", e.n, i + report.thresholds.delta_min.max(1), d.to_f64());
        }
    }
    for e in &cert.entries {
        let seen: Vec<_> = e.intervals.iter().filter(|i| i.hi < report.horizon).collect();
        let gaps = seen.first().map(|i| i.lo).into_iter().chain(seen.windows(2).map(|w| w[0].gap_to(w[1])));
        for (j, g) in gaps.enumerate() {
            let _ = writeln!(out, "{},gap,{},{}", e.n, j, g as f64 / e.s as f64);
        }
    }
    out
}

fn status_json(s: &Option<EvalStatus>) -> Value {
    match s {
        None => Value::Null,
        Some(EvalStatus::NonZero { lower, .. }) => json!({ "status": "NonZero", "log2_lower": lower.log2_abs() }),
        Some(EvalStatus::Undetermined { precision }) => json!({ "status": "Undetermined", "precision": precision }),
        Some(EvalStatus::Zero) => json!({ "status": "Zero" }),
    }
}

fn probe_json(t: &ProbeTable) -> Value {
    json!({
        "beta": t.beta,
        "js": t.js,
        "rows": t.rows.iter().map(|r| json!({
            "n": r.n,
            "statuses": r.statuses.iter().map(status_json).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "witness": t.witness,
        "undetermined": t.undetermined(),
    })
}

fn probe_text(out: &mut String, t: &ProbeTable) {
    let _ = writeln!(out, "non-vanishing at 1/beta, beta = {}:", t.beta);
    let head: Vec<String> = t.js.iter().map(|j| format!("{:<14}", format!("j={j}"))).collect();
    let _ = writeln!(out, "  {:>3}  {}", "n", head.join(" ").trim_end());
    for r in &t.rows {
        let cells: Vec<String> = r
            .statuses
            .iter()
            .map(|s| format!("{:<14}", s.as_ref().map_or("-", EvalStatus::label)))
            .collect();
        let _ = writeln!(out, "  {:>3}  {}", r.n, cells.join(" ").trim_end());
    }
    match t.witness {
        Some((a, b)) => writeln!(out, "  witness: j0 = {a}, j1 = {b}"),
        None => writeln!(out, "  witness: none"),
    }
    .ok();
}

fn opt_ratio(r: &Option<Ratio>) -> String {
    r.as_ref().map_or_else(|| "-".into(), |r| format!("{:.4}", r.to_f64()))
}

fn render_report(out: &mut String, cert: &EchoingCertificate, report: &VerificationReport) {
    let _ = writeln!(
        out,
        "{:>3} {:>12} {:>14} {:>6} {:>6} {:>9} {:>9} {:>9}  status",
        "n", "r", "s", "ivals", "seen", "density", "gap min", "gap max"
    );
    for (e, c) in report.entries.iter().zip(&cert.entries) {
        let _ = writeln!(
            out,
            "{:>3} {:>12} {:>14} {:>6} {:>6} {:>9} {:>9} {:>9}  {}",
            e.n,
            e.r,
            e.s,
            c.intervals.len(),
            e.intervals_in_horizon,
            opt_ratio(&e.density_max),
            opt_ratio(&e.gap_ratio_min),
            opt_ratio(&e.gap_ratio_max),
            if e.passed() { "ok" } else { "FAIL" }
        );
    }
    for issue in &report.issues {
        let _ = writeln!(out, "structural issue: {issue}");
    }
    let v = &report.verdicts;
    let mark = |b: bool| if b { "ok" } else { "FAIL" };
    let _ = writeln!(
        out,
        "horizon {}: structure {}, covering {}, density {}, expanding gaps {}, gap ceiling {}",
        report.horizon,
        mark(v.structure),
        mark(v.covering),
        mark(v.density),
        mark(v.expanding_gaps),
        v.gap_ceiling.map_or("-", mark)
    );
}

fn render(
    cert: &EchoingCertificate,
    report: Result<&VerificationReport, &str>,
    alignment: &str,
    probes: &[ProbeTable],
    ok: bool,
) -> String {
    let mut out = format!(
        "certificate: n0 = {}, epsilon = {}, {} entries\n{}\n",
        cert.n0,
        cert.epsilon,
        cert.entries.len(),
        cert.provenance
    );
    match report {
        Ok(report) => render_report(&mut out, cert, report),
        Err(note) => {
            let _ = writeln!(out, "verification: {note}");
        }
    }
    if !alignment.is_empty() {
        let _ = writeln!(out, "entry {} alignment:\n{}", cert.entries[0].n, alignment.trim_end_matches('\n'));
    }
    for t in probes {
        probe_text(&mut out, t);
    }
    let _ = writeln!(out, "result: {}", if ok { "PASS" } else { "FAIL" });
    out
}

pub fn echo(a: &EchoArgs) -> Result<Report, CliError> {
    let m = a.source.resolve()?;
    let x = source::prefix(&m, &a.prefix)?;
    let strong_min = if a.strong { STRONG_MIN_INTERVALS } else { 1 };
    let min_intervals = a.min_intervals.unwrap_or(strong_min);
    let betas = if a.strong {
        a.beta.iter().map(|b| AlgebraicInput::parse(b)).collect::<Result<Vec<_>, _>>()?
    } else {
        Vec::new()
    };
    let u = WordStream::new(m.clone(), x[0])?;

    let cert = match &a.verify_only {
        Some(path) => EchoingCertificate::from_json(&source::read(path)?)?,
        None => {
            let mut opts = BuildOptions::new(a.epsilon.0.clone(), a.n_max, a.horizon);
            opts.mode = match a.mode {
                ModeArg::Tight => Mode::Tight,
                ModeArg::Block => Mode::Block,
            };
            opts.min_intervals = min_intervals;
            opts.n0_override = a.n0;
            let run = certify_fixed_point(&m, &x, &opts)?;
            if let Some(path) = &a.output {
                source::write(path, &run.certificate.to_json())?;
            }
            run.certificate
        }
    };

    let thresholds = Thresholds {
        delta_min: a.delta_min,
        gap_floor: a.gap_floor.clone(),
        gap_ceiling: a.gap_ceiling.clone(),
        strong: a.strong,
    };
    // a certificate whose intervals all lie past the horizon is unverified,
    // but its probes are still worth reporting
    let report = match verify_certificate(&u, &cert, a.horizon, &thresholds) {
        Ok(r) => Ok(r),
        Err(e @ Error::InsufficientData { .. }) => Err(e.to_string()),
        Err(e) => return Err(e.into()),
    };
    let probes = betas
        .iter()
        .map(|b| nonvanishing_probe(&u, &cert, b, 1..=a.j_max, precision_cap()))
        .collect::<Result<Vec<_>, _>>()?;
    let ok = report.as_ref().is_ok_and(VerificationReport::passed) && probes.iter().all(|t| t.witness.is_some());

    if let (Some(path), Ok(report)) = (&a.dump_csv, &report) {
        source::write(path, &csv(&cert, report))?;
    }
    let alignment = match cert.entries.first() {
        Some(e) if cert.structural_issues().is_empty() && e.r < e.s => render_alignment(&u, e.r, e.s, a.width)?,
        _ => String::new(),
    };
    let text = render(&cert, report.as_ref().map_err(String::as_str), &alignment, &probes, ok);
    let verification = match &report {
        Ok(r) => serde_json::to_value(r).expect("reports serialize"),
        Err(note) => json!({ "error": note }),
    };
    let json = json!({
        "certificate": serde_json::to_value(&cert).expect("certificates serialize"),
        "verification": verification,
        "probes": probes.iter().map(probe_json).collect::<Vec<_>>(),
        "passed": ok,
    });
    Ok(Report { text, json, code: if ok { EXIT_OK } else { EXIT_FAILED } })
}
