use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use latfold::analysis::{self, Barriers};
use latfold::embedding::{ChainStrength, CouplerPlacement, EmbeddingMap, HardwareGraph};
use latfold::encoders::{
    encode_coord_cartesian, encode_coord_tetrahedral, encode_turn_cartesian, encode_turn_tetrahedral, CoordinatePenalties,
    GlobalScaling, InteractionModel, ModelKind, PeptideSequence, TurnCartesianPenalties, TurnTetrahedralPenalties,
};
use latfold::io::{read_text, write_text, ProblemFile, RunManifest};
use latfold::lattice::min_grid;
use latfold::pipeline;
use latfold::reduction::AlphaPolicy;
use latfold::solvers::{self, ExactConfig, PtConfig, SaConfig, Sample, SampleSet, T0Policy};
use latfold::{Error, Result};

/// Lattice protein folding as pseudo-Boolean optimization.
///
/// Exit codes: 0 success, 2 input error, 3 verification failure, 4 resource refusal.
#[derive(Parser, Debug)]
#[command(name = "latfold", version, args_override_self = true)]
struct Cli {
    /// `key = value` lines read as `--key value` flags; explicit flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker thread cap.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Build a problem file from a sequence.
    Encode(EncodeArgs),
    /// Quadratize a higher-order problem and verify the result.
    Reduce(ReduceArgs),
    /// Sample or solve a problem; writes a sample CSV.
    Solve(SolveArgs),
    /// Read samples as folds with validity flags and contact energies.
    Decode(DecodeArgs),
    /// Overlap, time-to-solution and scaling reports.
    #[command(subcommand)]
    Analyze(AnalyzeCmd),
    /// Map a QUBO onto a hardware graph through a given embedding.
    Embed(EmbedArgs),
    /// Majority-vote physical samples back to logical ones.
    Unembed(UnembedArgs),
    /// Random benchmark sequences and their prefixes.
    GenDataset(DatasetArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum InteractionChoice {
    /// HP when the sequence only has H and P, otherwise MJ
    Auto,
    Hp,
    Mj,
}

#[derive(Args, Debug)]
struct EncodeArgs {
    /// turn-cart, turn-tet, coord-cart or coord-tet
    model: String,
    #[arg(long, conflicts_with = "fasta")]
    seq: Option<String>,
    #[arg(long)]
    fasta: Option<PathBuf>,
    /// Grid side of coordinate models (default: minimal grid plus one)
    #[arg(long = "L", alias = "side")]
    side: Option<usize>,
    #[arg(long, value_enum, default_value = "auto")]
    interaction: InteractionChoice,
    /// Pair table file ("A B energy" lines) instead of a built-in model
    #[arg(long)]
    pair_table: Option<PathBuf>,
    /// HP contact energy
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    hp_epsilon: f64,
    #[arg(long, default_value_t = 20.0)]
    lambda_back: f64,
    #[arg(long, default_value_t = 20.0)]
    lambda_turn: f64,
    #[arg(long, default_value_t = 20.0)]
    lambda_olap: f64,
    #[arg(long, default_value_t = 10.0)]
    lambda2: f64,
    /// Fixed contact-distance penalty of turn-tet (default: per pair)
    #[arg(long)]
    lambda1: Option<f64>,
    /// Global turn-tet penalty: strict (21N³), tuned (21N²) or a number
    #[arg(long, default_value = "strict")]
    global: String,
    #[arg(long, default_value_t = 18.6)]
    lambda_one_site: f64,
    #[arg(long, default_value_t = 14.4)]
    lambda_overlap: f64,
    #[arg(long, default_value_t = 18.6)]
    lambda_chain: f64,
    /// Chain term summed over adjacent site pairs only
    #[arg(long)]
    efficient_h3: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ReduceArgs {
    #[arg(long)]
    problem: PathBuf,
    /// worst-case, fixed:VALUE or scaled:LAMBDA_GLOBAL
    #[arg(long, default_value = "worst-case")]
    alpha: String,
    /// Largest variable count checked exhaustively
    #[arg(long, default_value_t = pipeline::VERIFY_BUDGET)]
    verify_budget: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq)]
enum SolverChoice {
    Sa,
    Pt,
    Brute,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long)]
    problem: PathBuf,
    #[arg(long, value_enum)]
    solver: SolverChoice,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    sweeps: Option<usize>,
    /// SA restarts
    #[arg(long, default_value_t = 432)]
    restarts: usize,
    /// SA temperature factor per variable proposal
    #[arg(long, default_value_t = 0.999)]
    cooling_rate: f64,
    /// SA start temperature; automatic when absent
    #[arg(long)]
    t0: Option<f64>,
    #[arg(long, default_value_t = 400)]
    num_temps: usize,
    #[arg(long)]
    t_min: Option<f64>,
    /// Default by model: coordinate 1e4, turn-cart 1e8, turn-tet 1e6
    #[arg(long)]
    t_max: Option<f64>,
    /// PT sweeps whose lowest-temperature states are written out
    #[arg(long, default_value_t = 0)]
    measure_sweeps: usize,
    #[arg(long, default_value_t = solvers::exact::DEFAULT_FREE_VAR_LIMIT)]
    free_var_limit: usize,
    #[arg(long, default_value_t = solvers::exact::DEFAULT_STRUCTURED_LIMIT)]
    structured_limit: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct DecodeArgs {
    #[arg(long)]
    problem: PathBuf,
    #[arg(long)]
    samples: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand, Debug)]
enum AnalyzeCmd {
    /// Spin-overlap histogram of two PT measurement windows.
    Sod(SodArgs),
    /// Time to solution from a sample file.
    Tts(TtsArgs),
    /// Qubit count, density, couplers per qubit and resolution per model and length.
    Scaling(ScalingArgs),
}

#[derive(Args, Debug)]
struct SodArgs {
    #[arg(long)]
    run1: PathBuf,
    #[arg(long)]
    run2: PathBuf,
    #[arg(long, default_value_t = analysis::DEFAULT_BINS)]
    bins: usize,
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct TtsArgs {
    #[arg(long)]
    samples: PathBuf,
    /// Ground energy to count hits against
    #[arg(long, allow_negative_numbers = true)]
    reference: f64,
    #[arg(long, default_value_t = analysis::DEFAULT_HIT_TOLERANCE)]
    tol: f64,
    /// Seconds per run; read from the sample summary when absent
    #[arg(long)]
    tau: Option<f64>,
    /// Problem file, for the model and length columns
    #[arg(long)]
    problem: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ScalingArgs {
    #[arg(long, value_delimiter = ',', default_value = "coord-cart,coord-tet,turn-tet,turn-cart")]
    models: Vec<String>,
    #[arg(long, default_value_t = 8)]
    n_min: usize,
    #[arg(long, default_value_t = 24)]
    n_max: usize,
    #[arg(long, default_value_t = 1)]
    step: usize,
    /// Longest turn-cart chain; its reduction grows fast
    #[arg(long, default_value_t = 16)]
    turn_cart_max: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct EmbedArgs {
    #[arg(long)]
    problem: PathBuf,
    #[arg(long)]
    embedding: PathBuf,
    #[arg(long)]
    hardware: PathBuf,
    /// Default: half the largest absolute QUBO coefficient
    #[arg(long)]
    chain_strength: Option<f64>,
    /// Spread each coupling over all connecting edges
    #[arg(long)]
    split: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct UnembedArgs {
    #[arg(long)]
    samples: PathBuf,
    /// The embedded problem file
    #[arg(long)]
    problem: PathBuf,
    #[arg(long)]
    embedding: PathBuf,
    /// The logical problem file
    #[arg(long)]
    logical: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct DatasetArgs {
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long, default_value_t = 10)]
    len: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

/// Splices `--key value` pairs from the config file in right after the
/// subcommand, so flags given later on the command line override them.
fn with_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let strs: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let Some(k) = strs.iter().position(|a| a == "--config" || a.starts_with("--config=")) else {
        return Ok(args);
    };
    let path = if let Some(p) = strs[k].strip_prefix("--config=") {
        p.to_string()
    } else {
        strs.get(k + 1).cloned().ok_or_else(|| Error::Input("--config needs a file".into()))?
    };
    let mut extra = Vec::new();
    for (no, line) in read_text(Path::new(&path))?.lines().enumerate() {
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) =
            line.split_once('=').ok_or_else(|| Error::Input(format!("{path} line {}: expected key = value", no + 1)))?;
        let flag = format!("--{}", key.trim().replace('_', "-"));
        match value.trim() {
            "true" => extra.push(flag),
            "false" => {}
            v => {
                extra.push(flag);
                extra.push(v.to_string());
            }
        }
    }
    const COMMANDS: [&str; 8] = ["encode", "reduce", "solve", "decode", "analyze", "embed", "unembed", "gen-dataset"];
    let mut at = strs.iter().position(|a| COMMANDS.contains(&a.as_str())).map_or(strs.len(), |i| i + 1);
    if strs.get(at - 1).map(String::as_str) == Some("analyze") && at < strs.len() {
        at += 1;
    }
    let mut out: Vec<OsString> = args[..at].to_vec();
    out.extend(extra.into_iter().map(OsString::from));
    out.extend_from_slice(&args[at..]);
    Ok(out)
}

fn main() -> ExitCode {
    let args = match with_config(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let cli = Cli::parse_from(args);
    if let Some(j) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global() {
            eprintln!("error: cannot set up {j} worker threads: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::Encode(a) => encode(a),
        Cmd::Reduce(a) => reduce(a),
        Cmd::Solve(a) => solve(a),
        Cmd::Decode(a) => decode(a),
        Cmd::Analyze(a) => analyze(a),
        Cmd::Embed(a) => embed(a),
        Cmd::Unembed(a) => unembed(a),
        Cmd::GenDataset(a) => gen_dataset(a),
    }
}

fn encode(a: EncodeArgs) -> Result<()> {
    let kind: ModelKind = a.model.parse()?;
    let seq = match (&a.seq, &a.fasta) {
        (Some(s), None) => PeptideSequence::new(s)?,
        (None, Some(p)) => PeptideSequence::from_fasta(&read_text(p)?)?,
        _ => return Err(Error::Input("give exactly one of --seq or --fasta".into())),
    };
    let inter = match (&a.pair_table, a.interaction) {
        (Some(p), _) => InteractionModel::parse_pairs(&read_text(p)?)?,
        (None, InteractionChoice::Auto) => {
            if seq.residues().iter().all(|&c| c == 'H' || c == 'P') {
                InteractionModel::hp(a.hp_epsilon)?
            } else {
                InteractionModel::miyazawa_jernigan()
            }
        }
        (None, InteractionChoice::Hp) => InteractionModel::hp(a.hp_epsilon)?,
        (None, InteractionChoice::Mj) => InteractionModel::miyazawa_jernigan(),
    };
    let coord = CoordinatePenalties { one_site: a.lambda_one_site, overlap: a.lambda_overlap, chain: a.lambda_chain };
    let side = a.side.unwrap_or_else(|| min_grid(kind.lattice(), seq.len()));
    let global = match a.global.as_str() {
        "strict" => GlobalScaling::Strict,
        "tuned" => GlobalScaling::Tuned,
        v => GlobalScaling::Fixed(v.parse().map_err(|_| Error::Input(format!("--global: expected strict, tuned or a number, got {v:?}")))?),
    };
    let m = match kind {
        ModelKind::TurnCartesian => encode_turn_cartesian(
            &seq,
            &inter,
            &TurnCartesianPenalties { back: a.lambda_back, turn: a.lambda_turn, overlap: a.lambda_olap },
        )?,
        ModelKind::TurnTetrahedral => {
            encode_turn_tetrahedral(&seq, &inter, &TurnTetrahedralPenalties { lambda2: a.lambda2, global, lambda1: a.lambda1 })?
        }
        ModelKind::CoordCartesian => encode_coord_cartesian(&seq, side, &inter, &coord, a.efficient_h3)?,
        ModelKind::CoordTetrahedral => encode_coord_tetrahedral(&seq, side, &inter, &coord, a.efficient_h3)?,
    };
    let pf = ProblemFile::from_model(&m);
    write_text(&a.out, &pf.to_json())?;
    let pairs = m.objective.terms().filter(|(k, _)| k.len() == 2).count();
    let n = m.num_vars() as f64;
    let density = if n > 1.0 { pairs as f64 / (n * (n - 1.0) / 2.0) } else { 0.0 };
    println!("model {kind}, {} residues, {} variables, degree {}, {} terms, density {density:.4}", seq.len(), m.num_vars(), m.objective.degree(), m.objective.num_terms());
    let mut man = RunManifest::new("encode");
    man.set("model", kind);
    man.set("sequence", seq.to_string());
    man.set("interaction", inter.kind);
    man.set("penalties", m.penalties);
    if let Some(l) = m.lattice() {
        man.set("side", l.side);
    }
    man.write_for(&a.out)
}

fn parse_alpha(s: &str) -> Result<AlphaPolicy> {
    if s == "worst-case" {
        return Ok(AlphaPolicy::WorstCase);
    }
    let num = |v: &str| v.parse::<f64>().map_err(|_| Error::Input(format!("--alpha: bad number {v:?}")));
    match s.split_once(':') {
        Some(("fixed", v)) => Ok(AlphaPolicy::Fixed(num(v)?)),
        Some(("scaled", v)) => Ok(AlphaPolicy::Scaled { lambda_global: num(v)? }),
        _ => Err(Error::Input(format!("--alpha: expected worst-case, fixed:VALUE or scaled:VALUE, got {s:?}"))),
    }
}

fn reduce(a: ReduceArgs) -> Result<()> {
    let pf = ProblemFile::read(&a.problem)?;
    let policy = parse_alpha(&a.alpha)?;
    let t = Instant::now();
    let (out, rep) = pipeline::reduce_problem(&pf, policy, a.verify_budget)?;
    write_text(&a.out, &out.to_json())?;
    println!(
        "{} -> {} variables ({} aux), verification {:?} over {} assignments: passed",
        pf.num_vars,
        out.num_vars,
        out.aux_map.len() - pf.aux_map.len(),
        rep.method,
        rep.checked
    );
    let mut man = RunManifest::new("reduce");
    man.input(&a.problem)?;
    man.set("alpha_policy", policy);
    man.set("alpha", out.alpha);
    man.set("verification", rep);
    man.timings.insert("reduce_s".into(), t.elapsed().as_secs_f64());
    man.write_for(&a.out)
}

fn sidecar(out: &Path, suffix: &str) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(suffix);
    s.into()
}

fn solve(a: SolveArgs) -> Result<()> {
    let pf = ProblemFile::read(&a.problem)?;
    let obj = pipeline::sampling_objective(&pf)?;
    let mut man = RunManifest::new("solve");
    man.input(&a.problem)?;
    man.set("solver", format!("{:?}", a.solver).to_lowercase());
    let seed = match (a.solver, a.seed) {
        (SolverChoice::Brute, s) => s.unwrap_or(0),
        (_, Some(s)) => s,
        (_, None) => return Err(Error::Input("--seed is required for sa and pt".into())),
    };
    man.seed = Some(seed);
    let t = Instant::now();
    let mut summary = serde_json::Map::new();
    let set = match a.solver {
        SolverChoice::Sa => {
            let cfg = SaConfig {
                cooling_rate: a.cooling_rate,
                sweeps: a.sweeps.unwrap_or(100),
                restarts: a.restarts,
                seed,
                t0: a.t0.map_or(T0Policy::Auto, T0Policy::Fixed),
            };
            man.set("config", cfg);
            solvers::simulated_annealing(&obj, &cfg)?
        }
        SolverChoice::Pt => {
            let base = pf.model.as_ref().map_or_else(PtConfig::default, |m| PtConfig::for_model(m.kind));
            let cfg = PtConfig {
                num_temps: a.num_temps,
                t_min: a.t_min.unwrap_or(base.t_min),
                t_max: a.t_max.unwrap_or(base.t_max),
                sweeps: a.sweeps.unwrap_or(1000),
                measure_sweeps: a.measure_sweeps,
                seed,
            };
            man.set("config", cfg);
            let r = solvers::parallel_tempering(&obj, &cfg)?;
            let mut traj = String::from("sweep,energy\n");
            for (k, e) in r.trajectory.iter().enumerate() {
                traj.push_str(&format!("{},{e}\n", k + 1));
            }
            write_text(&sidecar(&a.out, ".trajectory.csv"), &traj)?;
            let first = cfg.sweeps - r.window.len();
            let mut win = String::from("sweep,bitstring\n");
            for (k, b) in r.window.iter().enumerate() {
                let bits: String = b.iter().map(|&x| if x == 1 { '1' } else { '0' }).collect();
                win.push_str(&format!("{},{bits}\n", first + k + 1));
            }
            write_text(&sidecar(&a.out, ".window.csv"), &win)?;
            summary.insert("lowest_t_final_energy".into(), r.trajectory.last().copied().into());
            summary.insert("swap_acceptance_mean".into(), (r.swap_acceptance.iter().sum::<f64>() / r.swap_acceptance.len() as f64).into());
            r.samples
        }
        SolverChoice::Brute => {
            let cfg = ExactConfig { free_var_limit: a.free_var_limit, structured_limit: a.structured_limit, ..Default::default() };
            man.set("config", cfg);
            let r = pipeline::exact_problem(&pf, &cfg)?;
            summary.insert("method".into(), serde_json::to_value(r.method)?);
            summary.insert("free_vars".into(), r.free_vars.into());
            let samples = r
                .minimizers
                .into_iter()
                .enumerate()
                .map(|(k, bits)| Sample { energy: obj.evaluate_bits(&bits), bits, replica: k, sweep: 0 })
                .collect();
            let mut s = SampleSet::new(samples);
            s.wall_seconds = t.elapsed().as_secs_f64();
            s.tau_seconds = s.wall_seconds;
            s
        }
    };
    write_text(&a.out, &set.to_csv())?;
    let best = set.best_energy();
    println!("{} samples, best energy {best}", set.len());
    summary.insert("samples".into(), set.len().into());
    summary.insert("best_energy".into(), best.into());
    summary.insert("hits_of_best".into(), set.hits(best, analysis::DEFAULT_HIT_TOLERANCE).into());
    summary.insert("seed".into(), seed.into());
    summary.insert("wall_s".into(), set.wall_seconds.into());
    summary.insert("tau_s".into(), set.tau_seconds.into());
    write_text(&sidecar(&a.out, ".summary.json"), &(serde_json::to_string_pretty(&summary)? + "\n"))?;
    man.timings.insert("solve_s".into(), t.elapsed().as_secs_f64());
    man.write_for(&a.out)
}

fn decode(a: DecodeArgs) -> Result<()> {
    let pf = ProblemFile::read(&a.problem)?;
    let samples = SampleSet::from_csv(&read_text(&a.samples)?)?;
    let decoded = pipeline::decode_samples(&pf, &samples)?;
    write_text(&a.out, &(serde_json::to_string_pretty(&decoded)? + "\n"))?;
    let feasible = decoded.iter().filter(|d| d.fold.decode_feasible).count();
    let physical = decoded.iter().filter(|d| d.physical).count();
    println!("{} samples: {feasible} decode-feasible, {physical} physical", decoded.len());
    let mut man = RunManifest::new("decode");
    man.input(&a.problem)?;
    man.input(&a.samples)?;
    man.write_for(&a.out)
}

fn read_window(path: &Path) -> Result<Vec<Vec<u8>>> {
    let text = read_text(path)?;
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some("sweep,bitstring") {
        return Err(Error::Input(format!("{}: expected a window file with header 'sweep,bitstring'", path.display())));
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let bits = l.split(',').nth(1).ok_or_else(|| Error::Input(format!("{}: malformed row {l:?}", path.display())))?;
            Ok(latfold::objective::Assignment::from_bitstring(bits)?.to_bits())
        })
        .collect()
}

fn analyze(cmd: AnalyzeCmd) -> Result<()> {
    match cmd {
        AnalyzeCmd::Sod(a) => {
            let (r1, r2) = (read_window(&a.run1)?, read_window(&a.run2)?);
            let (_, mut h) = analysis::spin_overlap(&r1, &r2, None, a.bins)?;
            h.provenance.insert("run1".into(), a.run1.display().to_string());
            h.provenance.insert("run2".into(), a.run2.display().to_string());
            write_text(&a.out, &h.to_csv())?;
            let class = analysis::classify_barriers(&h, a.threshold)?;
            let peaks: Vec<String> = analysis::peaks(&h).iter().map(|&k| format!("{:.3}", h.center(k))).collect();
            println!(
                "{} overlaps, peaks at q = [{}], barriers {}",
                h.samples,
                peaks.join(", "),
                if class == Barriers::Thin { "thin" } else { "thick" }
            );
            let mut man = RunManifest::new("analyze sod");
            man.input(&a.run1)?;
            man.input(&a.run2)?;
            man.set("bins", a.bins);
            man.set("barriers", class);
            man.write_for(&a.out)
        }
        AnalyzeCmd::Tts(a) => {
            let mut set = SampleSet::from_csv(&read_text(&a.samples)?)?;
            let summary_path = sidecar(&a.samples, ".summary.json");
            let summary: Option<serde_json::Value> =
                if summary_path.exists() { Some(serde_json::from_str(&read_text(&summary_path)?)?) } else { None };
            set.tau_seconds = match (a.tau, &summary) {
                (Some(t), _) => t,
                (None, Some(s)) => s["tau_s"].as_f64().ok_or_else(|| Error::Input("sample summary has no tau_s".into()))?,
                (None, None) => return Err(Error::Input("no --tau given and no sample summary found".into())),
            };
            let seed = summary.as_ref().and_then(|s| s["seed"].as_u64()).map_or(String::new(), |s| s.to_string());
            let (model, n) = match &a.problem {
                Some(p) => {
                    let pf = ProblemFile::read(p)?;
                    pf.model.map_or((String::new(), String::new()), |m| (m.kind.to_string(), m.sequence.len().to_string()))
                }
                None => (String::new(), String::new()),
            };
            let r = analysis::tts_from_samples(&set, a.reference, a.tol)?;
            let csv = format!("model,N,seed,tau_s,p_ground,tts_s\n{model},{n},{seed},{},{},{}\n", r.tau, r.p_ground, r.tts);
            write_text(&a.out, &csv)?;
            let (lo, hi) = r.interval.unwrap_or((0.0, 1.0));
            println!("p_ground {} (95% CI {lo:.4}..{hi:.4}), tau {} s, TTS {} s", r.p_ground, r.tau, r.tts);
            let mut man = RunManifest::new("analyze tts");
            man.input(&a.samples)?;
            man.set("reference", a.reference);
            man.set("tol", a.tol);
            man.write_for(&a.out)
        }
        AnalyzeCmd::Scaling(a) => {
            let mut rows = Vec::new();
            for m in &a.models {
                let kind: ModelKind = m.parse()?;
                for n in (a.n_min..=a.n_max).step_by(a.step.max(1)) {
                    if kind == ModelKind::TurnCartesian && n > a.turn_cart_max {
                        break;
                    }
                    rows.push(analysis::scaling_row(kind, n)?);
                }
            }
            let report = analysis::ScalingReport { rows };
            write_text(&a.out, &report.to_csv())?;
            println!("{} rows written", report.rows.len());
            let mut man = RunManifest::new("analyze scaling");
            man.set("models", &a.models);
            man.set("n_range", (a.n_min, a.n_max, a.step));
            man.write_for(&a.out)
        }
    }
}

fn embed(a: EmbedArgs) -> Result<()> {
    let pf = ProblemFile::read(&a.problem)?;
    let emb = EmbeddingMap::parse(&read_text(&a.embedding)?)?;
    let hw = HardwareGraph::parse(&read_text(&a.hardware)?)?;
    let strength = a.chain_strength.map_or(ChainStrength::HalfMaxQubo, ChainStrength::Fixed);
    let placement = if a.split { CouplerPlacement::Split } else { CouplerPlacement::Lowest };
    let out = pipeline::embed_problem(&pf, &emb, &hw, strength, placement)?;
    write_text(&a.out, &out.to_json())?;
    let info = out.embedding.as_ref().unwrap();
    println!("{} logical -> {} physical qubits, chain strength {}", info.logical_vars, info.nodes.len(), info.chain_strength);
    let mut man = RunManifest::new("embed");
    man.input(&a.problem)?;
    man.input(&a.embedding)?;
    man.input(&a.hardware)?;
    man.set("chain_strength", info.chain_strength);
    man.set("placement", placement);
    man.write_for(&a.out)
}

fn unembed(a: UnembedArgs) -> Result<()> {
    let samples = SampleSet::from_csv(&read_text(&a.samples)?)?;
    let embedded = ProblemFile::read(&a.problem)?;
    let emb = EmbeddingMap::parse(&read_text(&a.embedding)?)?;
    let logical = ProblemFile::read(&a.logical)?;
    let rows = pipeline::unembed_samples(&samples, &embedded, &emb, &logical, a.seed)?;
    write_text(&a.out, &pipeline::unembedded_csv(&rows))?;
    let broken = rows.iter().filter(|r| r.chain_break_fraction > 0.0).count();
    println!("{} samples, {broken} with broken chains", rows.len());
    let mut man = RunManifest::new("unembed");
    man.seed = Some(a.seed);
    man.input(&a.samples)?;
    man.input(&a.problem)?;
    man.input(&a.embedding)?;
    man.input(&a.logical)?;
    man.set("tie_break", "majority vote, seeded coin on ties");
    man.write_for(&a.out)
}

fn gen_dataset(a: DatasetArgs) -> Result<()> {
    let rows = pipeline::gen_dataset(a.count, a.len, a.seed)?;
    write_text(&a.out, &pipeline::dataset_csv(&rows))?;
    println!("{} sequences, {} rows", a.count, rows.len());
    let mut man = RunManifest::new("gen-dataset");
    man.seed = Some(a.seed);
    man.set("count", a.count);
    man.set("len", a.len);
    man.write_for(&a.out)
}
