//! `semistab` command-line front end. Every subcommand prints one JSON
//! document; `--replay` re-verifies the certificates inside such a document.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use semistab::binary::{
    closed_form_check, enumerate_oracle, expand, oracle_equivalence, root_adapted_frames, standard_points,
    EnumerationRow, FactoredBinaryForm, OracleReport,
};
use semistab::curves::{CurveDegrees, CurveStabilityData, FrameVerdict, PlaneCurve};
use semistab::geometry::{
    contains_polytope, convex_hull, minimize_linear, Containment, LatticePolytope, RationalVector,
};
use semistab::kempf_ness::{
    default_alpha_grid, distance_identity_residual, energy, energy_along_psg, energy_scan, EnergySample,
    HermitianFrame, MonomialWeights, ScanConfig, ScanReport, SlopeReport,
};
use semistab::matrix::Matrix;
use semistab::number::{parse_rational, Rational};
use semistab::stability::{
    check_pair_numerical, default_frames, destabilizing_slope, hilbert_mumford_check, replay_certificate, Pair,
    PairVerdict, Status, DEFAULT_FRAME_SEED,
};
use semistab::weights::{OnePSG, SparseForm, TorusFrame};

#[derive(Parser)]
#[command(name = "semistab", version, about = "Numerical semistability of pairs, with replayable certificates")]
#[command(args_conflicts_with_subcommands = true)]
struct Cli {
    /// Re-verify every certificate in a JSON document emitted earlier.
    #[arg(long, value_name = "FILE")]
    replay: Option<PathBuf>,

    /// Write the JSON document to this file instead of standard output.
    #[arg(long, short, global = true, value_name = "FILE")]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Convex hull of rational points; optionally test whether the hull of
    /// `inside` lies in it.
    Hull { input: String },
    /// Polytope test for a pair (v, w) over a family of tori.
    PairCheck {
        input: String,
        #[command(flatten)]
        frames: FrameArgs,
    },
    /// Classical Hilbert-Mumford test, i.e. the pair (1, w).
    HmCheck {
        /// JSON with a field `w`; omit when using `--factored`.
        input: Option<String>,
        /// Binary form as "[a:b]^m * ...", tested on its root-adapted frames.
        #[arg(long, conflicts_with = "input")]
        factored: Option<String>,
        #[command(flatten)]
        frames: FrameArgs,
    },
    /// Energy along a one-parameter subgroup and its fitted slope.
    Slope {
        input: String,
        /// Comma-separated positive rationals (default 1/10, ..., 1/10^6).
        #[arg(long)]
        alphas: Option<String>,
        #[arg(long, value_enum, default_value_t = Norm::Unit)]
        norm: Norm,
    },
    /// Energy at one group element, or a seeded scan with `--scan`.
    Energy {
        input: String,
        #[arg(long)]
        scan: bool,
        #[arg(long, default_value_t = DEFAULT_FRAME_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        samples: usize,
        #[arg(long, default_value_t = 8)]
        max_exponent: i64,
        #[arg(long, value_enum, default_value_t = Norm::Unit)]
        norm: Norm,
    },
    /// Binary forms: closed-form criterion against the polytope test.
    Binary {
        #[arg(long, requires = "g", conflicts_with = "enumerate")]
        f: Option<String>,
        #[arg(long, requires = "f")]
        g: Option<String>,
        /// Exhaustive run over the five standard points, e.g. `--enumerate e=2 d=4`
        /// (bounds are maximal degrees).
        #[arg(long, num_args = 0..=2, value_name = "BOUND")]
        enumerate: Option<Vec<String>>,
    },
    /// Plane curve pipeline: X-resultant, dual curve, polytope test.
    Curve {
        input: String,
        #[command(flatten)]
        frames: FrameArgs,
    },
}

#[derive(Args)]
struct FrameArgs {
    /// JSON array of frames; overrides frames in the input and the default family.
    #[arg(long, value_name = "FILE")]
    frames: Option<PathBuf>,
    /// Seed of the default frame family.
    #[arg(long, default_value_t = DEFAULT_FRAME_SEED)]
    seed: u64,
    /// Number of sheared frames added to the identity in the default family.
    #[arg(long, default_value_t = 5)]
    count: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Norm {
    Unit,
    Bombieri,
}

impl Norm {
    fn frame(self) -> HermitianFrame {
        HermitianFrame::with_base(match self {
            Norm::Unit => MonomialWeights::Unit,
            Norm::Bombieri => MonomialWeights::Bombieri,
        })
    }
}

/// Errors from reading or decoding input exit with 2, mathematical ones with 3.
enum Failure {
    Input(anyhow::Error),
    Math(anyhow::Error),
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Input(anyhow!("malformed JSON: {e}"))
    }
}

impl From<semistab::Error> for Failure {
    fn from(e: semistab::Error) -> Self {
        match e {
            semistab::Error::Parse(_) => Failure::Input(e.into()),
            _ => Failure::Math(e.into()),
        }
    }
}

type Outcome<T> = Result<T, Failure>;

fn input_err(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Input(e.into())
}

/// `-` is standard input, text starting with `{` or `[` is inline JSON,
/// anything else a path.
fn read_input(arg: &str) -> Outcome<String> {
    let t = arg.trim_start();
    if arg == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(input_err)?;
        Ok(s)
    } else if t.starts_with('{') || t.starts_with('[') {
        Ok(arg.to_string())
    } else {
        fs::read_to_string(arg).with_context(|| format!("reading {arg}")).map_err(input_err)
    }
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Outcome<T> {
    Ok(serde_json::from_str(text)?)
}

fn resolve_frames(
    args: &FrameArgs,
    from_input: Option<Vec<TorusFrame>>,
    n: usize,
) -> Outcome<(Vec<TorusFrame>, Option<u64>)> {
    if let Some(path) = &args.frames {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(input_err)?;
        return Ok((parse(&text)?, None));
    }
    match from_input {
        Some(frames) => Ok((frames, None)),
        None => Ok((default_frames(n, args.count, args.seed), Some(args.seed))),
    }
}

#[derive(Serialize, Deserialize)]
struct HullInput {
    points: Vec<RationalVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    inside: Option<Vec<RationalVector>>,
}

#[derive(Serialize, Deserialize)]
struct HullDoc {
    command: String,
    points: Vec<RationalVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    inside: Option<Vec<RationalVector>>,
    polytope: LatticePolytope,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    containment: Option<Containment>,
}

#[derive(Deserialize)]
struct PairInput {
    v: SparseForm,
    w: SparseForm,
    #[serde(default)]
    frames: Option<Vec<TorusFrame>>,
}

#[derive(Deserialize)]
struct HmInput {
    w: SparseForm,
    #[serde(default)]
    frames: Option<Vec<TorusFrame>>,
}

#[derive(Serialize, Deserialize)]
struct PairDoc {
    command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    factored: Option<FactoredBinaryForm>,
    v: SparseForm,
    w: SparseForm,
    verdict: PairVerdict,
}

#[derive(Deserialize)]
struct SlopeInput {
    v: SparseForm,
    w: SparseForm,
    u: Vec<i64>,
    #[serde(default)]
    frame: Option<TorusFrame>,
}

#[derive(Serialize, Deserialize)]
struct SlopeDoc {
    command: String,
    v: SparseForm,
    w: SparseForm,
    frame: TorusFrame,
    report: SlopeReport,
}

#[derive(Deserialize)]
struct EnergyInput {
    v: SparseForm,
    w: SparseForm,
    #[serde(default)]
    sigma: Option<Matrix>,
}

#[derive(Serialize)]
struct EnergyDoc {
    command: &'static str,
    sample: EnergySample,
    distance_residual: f64,
}

#[derive(Serialize)]
struct ScanDoc {
    command: &'static str,
    note: &'static str,
    report: ScanReport,
}

#[derive(Serialize, Deserialize)]
struct BinaryDoc {
    command: String,
    report: OracleReport,
}

#[derive(Serialize, Deserialize)]
struct EnumerationDoc {
    command: String,
    max_e: u32,
    max_d: u32,
    points: Vec<String>,
    instances: usize,
    semistable: usize,
    mismatches: usize,
    rows: Vec<EnumerationRow>,
}

#[derive(Serialize, Deserialize)]
struct CurveDoc {
    command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    curve: PlaneCurve,
    degrees: CurveDegrees,
    r_x: SparseForm,
    delta_x: SparseForm,
    verdict: PairVerdict,
    frames: Vec<FrameVerdict>,
}

#[derive(Serialize)]
struct ReplayDoc {
    command: &'static str,
    document: String,
    certificates: usize,
    checks: usize,
    ok: bool,
}

fn run_hull(input: &str) -> Outcome<HullDoc> {
    let inp: HullInput = parse(&read_input(input)?)?;
    let polytope = convex_hull(&inp.points)?;
    let containment = match &inp.inside {
        Some(q) => Some(contains_polytope(&convex_hull(q)?, &polytope)?),
        None => None,
    };
    Ok(HullDoc { command: "hull".into(), points: inp.points, inside: inp.inside, polytope, containment })
}

fn run_pair(input: &str, frames: &FrameArgs) -> Outcome<PairDoc> {
    let inp: PairInput = parse(&read_input(input)?)?;
    let pair = Pair::new(inp.v, inp.w)?;
    let (frames, seed) = resolve_frames(frames, inp.frames, pair.group_dim())?;
    let verdict = check_pair_numerical(&pair, &frames)?;
    Ok(PairDoc { command: "pair-check".into(), seed, factored: None, v: pair.v, w: pair.w, verdict })
}

fn run_hm(input: Option<&str>, factored: Option<&str>, frames: &FrameArgs) -> Outcome<PairDoc> {
    let (w, factored, frames, seed) = match (input, factored) {
        (_, Some(s)) => {
            let g: FactoredBinaryForm = s.parse()?;
            let frames = root_adapted_frames(&FactoredBinaryForm::one(), &g)?;
            (expand(&g), Some(g), frames, None)
        }
        (Some(input), None) => {
            let inp: HmInput = parse(&read_input(input)?)?;
            let n = inp.w.block_size()?;
            let (frames, seed) = resolve_frames(frames, inp.frames, n)?;
            (inp.w, None, frames, seed)
        }
        (None, None) => return Err(input_err(anyhow!("hm-check needs an input document or --factored"))),
    };
    let verdict = hilbert_mumford_check(&w, &frames)?;
    let v = SparseForm::constant_one(w.block_size()?);
    Ok(PairDoc { command: "hm-check".into(), seed, factored, v, w, verdict })
}

fn parse_alphas(s: &str) -> Outcome<Vec<Rational>> {
    s.split(',').map(|a| parse_rational(a.trim()).map_err(Failure::from)).collect()
}

fn run_slope(input: &str, alphas: Option<&str>, norm: Norm) -> Outcome<SlopeDoc> {
    let inp: SlopeInput = parse(&read_input(input)?)?;
    let n = Pair::new(inp.v.clone(), inp.w.clone())?.group_dim();
    let frame = inp.frame.unwrap_or_else(|| TorusFrame::identity(n));
    let alphas = match alphas {
        Some(s) => parse_alphas(s)?,
        None => default_alpha_grid(),
    };
    let u = OnePSG::from_ints(&inp.u)?;
    let report = energy_along_psg(&inp.v, &inp.w, &u, &frame, &norm.frame(), &alphas)?;
    Ok(SlopeDoc { command: "slope".into(), v: inp.v, w: inp.w, frame, report })
}

fn run_energy(input: &str, scan: bool, config: ScanConfig, norm: Norm) -> Outcome<String> {
    let inp: EnergyInput = parse(&read_input(input)?)?;
    let h = norm.frame();
    let doc = if scan {
        let report = energy_scan(&inp.v, &inp.w, &h, &config)?;
        to_json(&ScanDoc { command: "energy", note: "heuristic probe of the infimum, not a bound", report })
    } else {
        let n = Pair::new(inp.v.clone(), inp.w.clone())?.group_dim();
        let sigma = inp.sigma.unwrap_or_else(|| Matrix::identity(n));
        let sample = energy(&inp.v, &inp.w, &sigma, &h)?;
        let distance_residual = distance_identity_residual(&inp.v, &inp.w, &sigma, &h)?;
        to_json(&EnergyDoc { command: "energy", sample, distance_residual })
    };
    doc
}

fn parse_bounds(args: &[String]) -> Outcome<(u32, u32)> {
    let (mut e, mut d) = (5, 5);
    for a in args {
        let (k, v) = a.split_once('=').ok_or_else(|| input_err(anyhow!("expected e=N or d=N, got {a:?}")))?;
        let v: u32 = v.parse().map_err(|_| input_err(anyhow!("bad degree bound {a:?}")))?;
        match k {
            "e" => e = v,
            "d" => d = v,
            _ => return Err(input_err(anyhow!("unknown bound {k:?}; use e or d"))),
        }
    }
    Ok((e, d))
}

fn run_binary(f: Option<&str>, g: Option<&str>, enumerate: Option<&[String]>) -> Outcome<String> {
    if let Some(bounds) = enumerate {
        let (max_e, max_d) = parse_bounds(bounds)?;
        let points = standard_points();
        let r = enumerate_oracle(&points, 0..=max_e, 0..=max_d)?;
        to_json(&EnumerationDoc {
            command: "binary".into(),
            max_e,
            max_d,
            points: points.iter().map(|p| p.to_string()).collect(),
            instances: r.instances,
            semistable: r.semistable,
            mismatches: r.mismatches,
            rows: r.rows,
        })
    } else {
        let (Some(f), Some(g)) = (f, g) else {
            return Err(input_err(anyhow!("binary needs --f and --g, or --enumerate")));
        };
        let report = oracle_equivalence(&f.parse()?, &g.parse()?)?;
        to_json(&BinaryDoc { command: "binary".into(), report })
    }
}

fn run_curve(input: &str, frames: &FrameArgs) -> Outcome<CurveDoc> {
    let form: SparseForm = parse(&read_input(input)?)?;
    let curve = PlaneCurve::new(form)?;
    let (frames, seed) = resolve_frames(frames, None, 3)?;
    let data = CurveStabilityData::new(&curve)?;
    let verdict = data.check(&frames)?;
    let per_frame = data.frame_report(&frames)?;
    Ok(CurveDoc {
        command: "curve".into(),
        seed,
        curve,
        degrees: data.degrees,
        r_x: data.r_x,
        delta_x: data.delta_x,
        verdict,
        frames: per_frame,
    })
}

fn replay_failure(msg: String) -> Failure {
    Failure::Math(anyhow!("replay failed: {msg}"))
}

/// Checks that a verdict carries a certificate exactly when destabilized and
/// replays it. Returns the number of certificates checked.
fn replay_verdict(
    v: &SparseForm,
    w: &SparseForm,
    status: Status,
    cert: Option<&semistab::stability::Certificate>,
) -> Outcome<usize> {
    match (status, cert) {
        (Status::Destabilized, Some(c)) => {
            replay_certificate(v, w, c)?;
            Ok(1)
        }
        (Status::SemistableForTestedTori, None) => Ok(0),
        (s, _) => Err(replay_failure(format!("status {s:?} inconsistent with certificate presence"))),
    }
}

fn run_replay(path: &PathBuf) -> Outcome<ReplayDoc> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(input_err)?;
    let value: serde_json::Value = parse(&text)?;
    let command = value.get("command").and_then(|c| c.as_str()).unwrap_or_default().to_string();
    let (mut certificates, mut checks) = (0, 0);
    match command.as_str() {
        "pair-check" | "hm-check" => {
            let doc: PairDoc = serde_json::from_value(value)?;
            certificates += replay_verdict(&doc.v, &doc.w, doc.verdict.status, doc.verdict.certificate.as_ref())?;
            if let Some(g) = &doc.factored {
                checks += 1;
                if expand(g) != doc.w {
                    return Err(replay_failure("factored form does not expand to w".into()));
                }
            }
        }
        "curve" => {
            let doc: CurveDoc = serde_json::from_value(value)?;
            certificates +=
                replay_verdict(&doc.r_x, &doc.delta_x, doc.verdict.status, doc.verdict.certificate.as_ref())?;
            for f in &doc.frames {
                certificates += replay_verdict(&doc.r_x, &doc.delta_x, f.status, f.certificate.as_ref())?;
            }
            let any_destabilized = doc.frames.iter().any(|f| f.status == Status::Destabilized);
            checks += 1;
            if any_destabilized == doc.verdict.is_semistable() {
                return Err(replay_failure("per-frame verdicts disagree with the overall verdict".into()));
            }
        }
        "binary" if value.get("rows").is_some() => {
            let doc: EnumerationDoc = serde_json::from_value(value)?;
            for r in &doc.rows {
                checks += 1;
                if closed_form_check(&r.f, &r.g) != r.closed_form {
                    return Err(replay_failure(format!("closed form differs for ({}, {})", r.f, r.g)));
                }
            }
        }
        "binary" => {
            let doc: BinaryDoc = serde_json::from_value(value)?;
            let r = &doc.report;
            checks += 1;
            if closed_form_check(&r.f, &r.g) != r.closed_form {
                return Err(replay_failure("closed form differs".into()));
            }
            certificates +=
                replay_verdict(&expand(&r.f), &expand(&r.g), r.polytope.status, r.polytope.certificate.as_ref())?;
        }
        "hull" => {
            let doc: HullDoc = serde_json::from_value(value)?;
            checks += 1;
            if convex_hull(&doc.points)? != doc.polytope {
                return Err(replay_failure("hull differs".into()));
            }
            if let (Some(q), Some(Containment::Separated { u, min_p, min_q })) = (&doc.inside, &doc.containment) {
                certificates += 1;
                let inner = convex_hull(q)?;
                if minimize_linear(&inner, u)? != *min_p
                    || minimize_linear(&doc.polytope, u)? != *min_q
                    || min_q <= min_p
                {
                    return Err(replay_failure("separation certificate does not hold".into()));
                }
            }
        }
        "slope" => {
            let doc: SlopeDoc = serde_json::from_value(value)?;
            checks += 1;
            let exact = destabilizing_slope(&Pair::new(doc.v, doc.w)?, &doc.frame, &doc.report.u)?;
            if exact != doc.report.exact_slope {
                return Err(replay_failure("exact slope differs".into()));
            }
        }
        other => return Err(input_err(anyhow!("no replayable content in document with command {other:?}"))),
    }
    Ok(ReplayDoc { command: "replay", document: command, certificates, checks, ok: true })
}

fn to_json<T: Serialize>(doc: &T) -> Outcome<String> {
    serde_json::to_string_pretty(doc).map_err(|e| Failure::Math(e.into()))
}

fn run(cli: Cli) -> Outcome<String> {
    if let Some(path) = &cli.replay {
        return to_json(&run_replay(path)?);
    }
    let Some(command) = cli.command else {
        return Err(input_err(anyhow!("a subcommand or --replay is required")));
    };
    match command {
        Command::Hull { input } => to_json(&run_hull(&input)?),
        Command::PairCheck { input, frames } => to_json(&run_pair(&input, &frames)?),
        Command::HmCheck { input, factored, frames } => {
            to_json(&run_hm(input.as_deref(), factored.as_deref(), &frames)?)
        }
        Command::Slope { input, alphas, norm } => to_json(&run_slope(&input, alphas.as_deref(), norm)?),
        Command::Energy { input, scan, seed, samples, max_exponent, norm } => {
            run_energy(&input, scan, ScanConfig { seed, samples, max_exponent }, norm)
        }
        Command::Binary { f, g, enumerate } => run_binary(f.as_deref(), g.as_deref(), enumerate.as_deref()),
        Command::Curve { input, frames } => to_json(&run_curve(&input, &frames)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let output = cli.output.clone();
    let result = run(cli).and_then(|json| {
        match &output {
            Some(path) => fs::write(path, json + "\n").with_context(|| format!("writing {}", path.display())),
            None => writeln!(io::stdout().lock(), "{json}").context("writing standard output"),
        }
        .map_err(input_err)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Math(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn enumeration_bounds() {
        assert_eq!(parse_bounds(&["e=2".into(), "d=4".into()]).ok(), Some((2, 4)));
        assert_eq!(parse_bounds(&[]).ok(), Some((5, 5)));
        assert!(parse_bounds(&["k=1".into()]).is_err());
    }
}
