use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use echolab_core::echo::{mismatch_positions, render_alignment, SEED_BUDGET, SEED_HORIZON};
use echolab_core::kbonacci::{
    alternating_cycle, canonical_cycle_cover, count_cycle_covers, crosscheck_lift, crosscheck_table, cycle_template_holds,
    determinant_check, incidence_graph, lifted_kbonacci,
};
use echolab_core::numeric::precision_cap;
use echolab_core::pairs::{
    balanced_pair_closure, coincidence_condition, seed_return_pairs, ClosureStatus, LiftFile, DEFAULT_MAX_ROUNDS,
    DEFAULT_MAX_SYMBOLS,
};
use echolab_core::poly::eval_number;
use echolab_core::spectral::spectral_report_with_cap;
use echolab_core::{AlgebraicInput, LiftedMorphism, Ratio, WordStream};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::source::{self, Source};
use crate::{CliError, Report, EXIT_BUDGET, EXIT_FAILED, EXIT_OK};

fn verdict(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}

/// `q` rounded to `places` decimals.
pub fn decimal(q: &BigRational, places: usize) -> String {
    let scale = BigInt::from(10).pow(places as u32);
    let scaled = (q * BigRational::from_integer(scale)).round().to_integer();
    let digits = scaled.abs().to_string();
    let sign = if scaled.is_negative() { "-" } else { "" };
    if places == 0 {
        return format!("{sign}{digits}");
    }
    let padded = format!("{digits:0>width$}", width = places + 1);
    let (int, frac) = padded.split_at(padded.len() - places);
    format!("{sign}{int}.{frac}")
}

/// Largest `d <= cap` with `radius <= 10^-d`.
fn correct_digits(radius: &BigRational, cap: usize) -> usize {
    let mut bound = BigRational::one();
    let ten = BigRational::from_integer(10.into());
    let mut d = 0;
    while d < cap && *radius <= &bound / &ten {
        bound /= &ten;
        d += 1;
    }
    d
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    source: Source,
    /// Width of the rational bracket around the Perron root
    #[arg(long, default_value_t = 1e-12)]
    tolerance: f64,
}

pub fn analyze(a: &AnalyzeArgs) -> Result<Report, CliError> {
    let m = a.source.resolve()?;
    let rep = spectral_report_with_cap(&m, a.tolerance, precision_cap());
    let text = format!("morphism: {m}\n{rep}\n");
    let json = json!({
        "incidence": rep.incidence.0,
        "primitive": rep.primitive,
        "primitivity_power": rep.primitivity_power,
        "characteristic_polynomial": rep.char_poly.to_string(),
        "dominant_eigenvalue": rep.dominant_eigenvalue.as_ref().map(|e| json!({
            "lower": e.lower.to_string(),
            "upper": e.upper.to_string(),
            "midpoint": e.midpoint(),
        })),
        "dominant_factor": rep.dominant_factor.as_ref().map(ToString::to_string),
        "conjugate_moduli": rep.conjugate_moduli,
        "classification": rep.classification,
        "irreducible": rep.irreducible,
        "precision_bits": rep.precision_bits,
    });
    Ok(Report { text, json, code: EXIT_OK })
}

#[derive(Debug, Args)]
pub struct PairsArgs {
    #[command(flatten)]
    source: Source,
    /// Prefix x of the fixed point whose return words seed the closure
    #[arg(long, default_value = "0")]
    prefix: String,
    #[arg(long, default_value_t = DEFAULT_MAX_SYMBOLS)]
    max_symbols: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_ROUNDS)]
    max_rounds: usize,
    /// Length of the fixed-point prefix scanned for return words
    #[arg(long, default_value_t = SEED_HORIZON)]
    seed_horizon: usize,
    /// Write the closed system as JSON
    #[arg(long)]
    output: Option<PathBuf>,
    /// Load a system file instead of running the closure
    #[arg(long, conflicts_with = "output")]
    import: Option<PathBuf>,
}

fn system_report(lift: &LiftedMorphism, mut text: String, mut json: Value) -> Report {
    let co = coincidence_condition(lift);
    let consistent = crosscheck_table(lift);
    let _ = write!(text, "{lift}");
    let _ = writeln!(text, "symbols: {} ({} mismatch)", lift.len(), lift.mismatch_ids().len());
    let _ = writeln!(text, "images agree with lift-and-decompose: {}", verdict(consistent));
    let _ = writeln!(text, "coincidence condition: {}", if co.satisfied { "satisfied" } else { "violated" });
    let curve: Vec<String> = co.density_curve.iter().map(ToString::to_string).collect();
    if !curve.is_empty() {
        let _ = writeln!(text, "mismatch density by level: {}", curve.join(", "));
    }
    json["system"] = serde_json::to_value(lift.to_file()).expect("systems serialize");
    json["consistent"] = json!(consistent);
    json["coincidence"] = json!({ "satisfied": co.satisfied, "horizons": co.horizons, "density_curve": curve });
    Report { text, json, code: if consistent { EXIT_OK } else { EXIT_FAILED } }
}

pub fn pairs(a: &PairsArgs) -> Result<Report, CliError> {
    let m = a.source.resolve()?;
    if let Some(path) = &a.import {
        let file: LiftFile = serde_json::from_str(&source::read(path)?)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        let lift = LiftedMorphism::from_file(&file, m)?;
        return Ok(system_report(&lift, format!("imported {}\n", path.display()), json!({ "status": "Imported" })));
    }
    let x = source::prefix(&m, &a.prefix)?;
    let seeds = seed_return_pairs(&m, &x, a.seed_horizon, SEED_BUDGET)?;
    let closure = balanced_pair_closure(&m, &seeds.pairs, a.max_symbols, a.max_rounds)?;
    let mut text = format!("morphism: {m}\nprefix: {x}\nseed pairs: {}", seeds.pairs.len());
    let _ = writeln!(text, " (return words stable: {})", seeds.stable);
    let head = json!({
        "prefix": x.to_string(),
        "seed_pairs": seeds.pairs.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "seeds_stable": seeds.stable,
        "rounds": closure.iterations_used,
    });
    match (closure.status, closure.lifted) {
        (ClosureStatus::Closed, Some(lift)) => {
            if let Some(path) = &a.output {
                let body = serde_json::to_string_pretty(&lift.to_file()).expect("systems serialize");
                source::write(path, &body)?;
            }
            let mut head = head;
            head["status"] = json!("Closed");
            Ok(system_report(&lift, text, head))
        }
        _ => {
            let _ = writeln!(
                text,
                "closure exceeded its budget after {} symbols and {} rounds",
                closure.discovered.len(),
                closure.iterations_used
            );
            let mut head = head;
            head["status"] = json!("BudgetExceeded");
            head["discovered"] = json!(closure.discovered.iter().map(ToString::to_string).collect::<Vec<_>>());
            Ok(Report { text, json: head, code: EXIT_BUDGET })
        }
    }
}

#[derive(Debug, Args)]
pub struct KbonacciArgs {
    #[arg(long)]
    k: usize,
    /// Name the k = 3 symbols a0 … a10
    #[arg(long)]
    paper_labels: bool,
    /// Check det M_n for n = 0..=N
    #[arg(long, default_value_t = 4)]
    n_max: usize,
}

pub fn kbonacci(a: &KbonacciArgs) -> Result<Report, CliError> {
    let sys = lifted_kbonacci(a.k)?;
    let labels = if a.paper_labels { sys.paper_labels() } else { None };
    let name = |id: usize| labels.as_ref().map_or_else(|| format!("g{id}"), |l| l[id].clone());
    let mut text = format!("k = {}: {} symbols\n", a.k, sys.symbols.len());
    let mut rows = Vec::new();
    for (id, sym) in sys.symbols.iter().enumerate() {
        let pair = &sys.lift.symbol(id).pair;
        let image: Vec<String> = sys.lift.image(id).iter().map(|&t| name(t)).collect();
        let _ = writeln!(text, "{:<4} {:<12} {:<28} -> {}", name(id), sym.to_string(), pair.to_string(), image.join(" "));
        rows.push(json!({ "id": id, "name": name(id), "symbol": sym.to_string(), "pair": pair.to_string(), "image": image }));
    }

    let crosscheck = crosscheck_lift(a.k)? && crosscheck_table(&sys.lift);
    let coincidence = coincidence_condition(&sys.lift).satisfied;
    let g = incidence_graph(&sys);
    let covers = count_cycle_covers(&g)?;
    let cover = canonical_cycle_cover(&g)?;
    let alternating = alternating_cycle(&g, &cover);
    let template = cycle_template_holds(a.k);
    let dets = (0..=a.n_max).map(|n| determinant_check(&sys, &g, &cover, n)).collect::<Result<Vec<_>, _>>()?;
    let dets_ok = dets.iter().all(|d| d.holds());

    let _ = writeln!(text, "crosscheck against lift-and-decompose: {}", verdict(crosscheck));
    let _ = writeln!(text, "coincidence condition: {}", verdict(coincidence));
    let _ = writeln!(text, "incidence graph: {} vertices, {} edges", g.len(), g.edges.len());
    let _ = writeln!(text, "cycle covers: {covers}");
    let _ = writeln!(text, "canonical cover: cycle lengths {:?}, sign {:+}", cover.cycle_lengths, cover.sign());
    let _ = writeln!(text, "alternating cycle: {}", if alternating.is_some() { "found" } else { "none" });
    let _ = writeln!(text, "cycle template: {}", verdict(template));
    for d in &dets {
        let agree = match d.elimination_agrees {
            Some(true) => "elimination agrees",
            Some(false) => "elimination DISAGREES",
            None => "elimination skipped",
        };
        let _ = writeln!(text, "det M_{} = {} ({agree}): {}", d.n, d.det, verdict(d.holds()));
    }
    let ok = crosscheck && coincidence && covers.is_one() && alternating.is_none() && template && dets_ok;
    let _ = writeln!(text, "result: {}", if ok { "PASS" } else { "FAIL" });

    let json = json!({
        "k": a.k,
        "symbols": rows,
        "crosscheck": crosscheck,
        "coincidence": coincidence,
        "graph": { "vertices": g.len(), "edges": g.edges.len() },
        "cycle_covers": covers.to_string(),
        "canonical_cover": { "cycle_lengths": cover.cycle_lengths, "sign": cover.sign() },
        "alternating_cycle": alternating,
        "template": template,
        "determinants": dets.iter().map(|d| json!({
            "n": d.n,
            "det": d.det.to_string(),
            "cover_degree": d.cover_degree,
            "elimination_agrees": d.elimination_agrees,
            "monomial": d.holds(),
        })).collect::<Vec<_>>(),
        "passed": ok,
    });
    Ok(Report { text, json, code: if ok { EXIT_OK } else { EXIT_FAILED } })
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    source: Source,
    /// Base: p/q, p/q+r/si or rootof:[c0,c1,…]@[reLo,reHi,imLo,imHi]
    #[arg(long, allow_hyphen_values = true)]
    beta: String,
    /// Target enclosure radius
    #[arg(long, default_value = "1e-30")]
    error: String,
    /// Letter whose fixed point is read
    #[arg(long, default_value_t = 0)]
    seed: u16,
}

pub fn eval(a: &EvalArgs) -> Result<Report, CliError> {
    let m = a.source.resolve()?;
    let beta = AlgebraicInput::parse(&a.beta)?;
    let target: Ratio = a.error.parse()?;
    if target.0 <= BigRational::zero() {
        return Err(CliError::Usage("--error must be positive".into()));
    }
    let u = WordStream::new(m, echolab_core::Letter(a.seed))?;
    let enc = eval_number(&u, &beta, &target.0)?;
    let digits = correct_digits(&enc.radius, 2000);
    let places = digits + 2;
    let re = decimal(&enc.center.re, places);
    let im = decimal(&enc.center.im, places);
    let radius = echolab_core::numeric::Dyadic::from_rational(&enc.radius, 64, echolab_core::numeric::Round::Up);
    let mut text = format!("beta = {beta}\nterms: {}\n", enc.terms);
    if enc.center.im.is_zero() {
        let _ = writeln!(text, "value: {re}");
    } else {
        let _ = writeln!(text, "value: {re} + ({im}) i");
    }
    let _ = writeln!(text, "radius: {:.3e}\ncorrect digits: {digits}", radius.to_f64());
    let json = json!({
        "beta": beta.to_string(),
        "terms": enc.terms,
        "center": { "re": re, "im": im },
        "center_exact": { "re": enc.center.re.to_string(), "im": enc.center.im.to_string() },
        "radius": enc.radius.to_string(),
        "digits": digits,
    });
    Ok(Report { text, json, code: EXIT_OK })
}

#[derive(Debug, Args)]
pub struct AlignArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, default_value_t = 0)]
    r: u64,
    #[arg(long)]
    s: u64,
    #[arg(long, default_value_t = 80)]
    width: usize,
    #[arg(long, default_value_t = 0)]
    seed: u16,
}

pub fn align(a: &AlignArgs) -> Result<Report, CliError> {
    if a.r >= a.s {
        return Err(CliError::Usage("--r must be smaller than --s".into()));
    }
    let u = WordStream::new(a.source.resolve()?, echolab_core::Letter(a.seed))?;
    let text = render_alignment(&u, a.r, a.s, a.width)?;
    let mismatches = mismatch_positions(&u, a.r, a.s, a.width as u64)?;
    let json = json!({ "r": a.r, "s": a.s, "width": a.width, "mismatches": mismatches, "text": text });
    Ok(Report { text, json, code: EXIT_OK })
}
