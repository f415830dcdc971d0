//! Command-line front end: plan arithmetic, certified construction,
//! invariance verification, limit-set rendering, and the classification
//! table.
//!
//! Exit codes: 0 = success / certified, 1 = verified violation or failed
//! hypothesis, 2 = input or usage error.

use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};

use crate::combine::{certify_combined, ping_pong_certify};
use crate::deform::verify_deformed_blocks;
use crate::error::{Error, Result};
use crate::fuchsian::genus_cover_group;
use crate::invariance::{check_precisely_invariant, Alphabet, InvarianceOutcome};
use crate::limitset::{render_shuffle_figure, RenderParams};
use crate::marked::MarkedGroup;
use crate::perm::Perm;
use crate::region::Region;
use crate::scalar::parse_real;
use crate::shuffle::{build_gamma_k, build_gamma_k_tau, homeo_classes, ShufflePlan};

#[derive(Parser)]
#[command(
    name = "kleinian",
    about = "Construct, verify and render stacked Kleinian groups with shuffling parabolics",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Compute the shuffle plan: coset representatives, primes, CRT
    /// coefficients, heights and exponents.
    Shuffle(ShuffleArgs),
    /// Build the stacked group, a shuffled companion and its HNN extension
    /// from a plan, with hypothesis certificates.
    Build(BuildArgs),
    /// Check precise J-invariance of a region (or union of two) in a group
    /// read from a file.
    Verify(VerifyArgs),
    /// Render the paired limit-set figure for a plan and a shuffle.
    Render(RenderArgs),
    /// Print the classification table: marked classes and homeomorphism
    /// classes.
    Classify(ClassifyArgs),
    /// Run the deformed-block verification pipeline on supplied groups.
    Deform(DeformArgs),
}

#[derive(Args)]
pub struct ShuffleArgs {
    /// Number of blocks (k >= 3).
    #[arg(long)]
    pub k: usize,
    /// Strip constant (positive integer).
    #[arg(long = "C", default_value_t = 1)]
    pub c: u64,
    /// Output file for the plan (defaults to <out-dir>/plan-k<k>-C<C>.txt).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct BuildArgs {
    /// Plan file written by `shuffle`.
    #[arg(long)]
    pub plan: PathBuf,
    /// Shuffle permutation in cycle notation, e.g. "(1 2)" or "id".
    #[arg(long, default_value = "id")]
    pub tau: String,
    /// Word-length budget for invariance certificates.
    #[arg(long = "L", default_value_t = 6)]
    pub word_budget: usize,
    /// Base marking: reorder the block genera by this permutation before
    /// stacking (the re-marked construction recipe).
    #[arg(long)]
    pub base_tau: Option<String>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct VerifyArgs {
    /// Group description file (plain or combined format).
    #[arg(long)]
    pub group: PathBuf,
    /// Region spec: "H:t" (upper half-plane), "H*:t" (lower), or two joined
    /// by ';' for a union, e.g. "H:1;H*:-1". Heights may be rationals.
    #[arg(long)]
    pub region: String,
    #[arg(long = "L", default_value_t = 6)]
    pub word_budget: usize,
    /// Certificate output file (JSON).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct RenderArgs {
    #[arg(long)]
    pub plan: PathBuf,
    #[arg(long, default_value = "id")]
    pub tau: String,
    /// Orbit word depth.
    #[arg(long, default_value_t = 6)]
    pub depth: usize,
    /// Disk-diameter prune threshold.
    #[arg(long, default_value_t = 1e-4)]
    pub prune: f64,
    /// Node budget for the enumeration.
    #[arg(long, default_value_t = 2_000_000)]
    pub budget: u64,
    /// Viewport "re0,im0,re1,im1"; default spans the stacked strips.
    #[arg(long)]
    pub viewport: Option<String>,
    /// Resolution "WxH".
    #[arg(long, default_value = "480x640")]
    pub resolution: String,
    /// Recorded in provenance comments (the enumeration is deterministic).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write PNG copies.
    #[arg(long)]
    pub png: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub k: usize,
}

#[derive(Args)]
pub struct DeformArgs {
    /// Plan file.
    #[arg(long)]
    pub plan: PathBuf,
    /// Block description files, genus order (k files).
    #[arg(long, num_args = 1..)]
    pub blocks: Vec<PathBuf>,
    #[arg(long = "L", default_value_t = 4)]
    pub word_budget: usize,
    /// Claimed quasiconformal constant (recorded in the report).
    #[arg(long = "K")]
    pub claimed_k: Option<f64>,
    /// Report output file (JSON).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Process exit code semantics.
pub enum Outcome {
    Ok,
    Violation,
}

fn out_dir(explicit: &Option<PathBuf>) -> PathBuf {
    if let Some(p) = explicit {
        return p.clone();
    }
    std::env::var_os("KLEINIAN_OUT")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

/// Write atomically: a temporary file in the target directory, then rename.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    let tmp = path.with_extension("tmp-write");
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Shuffle(args) => cmd_shuffle(args),
        Command::Build(args) => cmd_build(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Render(args) => cmd_render(args),
        Command::Classify(args) => cmd_classify(args),
        Command::Deform(args) => cmd_deform(args),
    }
}

fn cmd_shuffle(args: ShuffleArgs) -> Result<Outcome> {
    let plan = ShufflePlan::build(args.k, args.c)?;
    let path = args.out.clone().unwrap_or_else(|| {
        out_dir(&None).join(format!("plan-k{}-C{}.txt", args.k, args.c))
    });
    write_atomic(&path, plan.serialize().as_bytes())?;
    println!("plan written to {}", path.display());
    println!("k = {}, C = {}, marked classes = {}", plan.k, plan.c, plan.reps.len());
    for (i, rep) in plan.reps.iter().enumerate() {
        println!(
            "  rep {i}: tau = {:8}  p = {:4}  d = {}",
            rep.to_cycles(),
            plan.primes[i],
            plan.coeffs[i]
        );
    }
    for (j, a) in plan.heights.iter().enumerate() {
        println!("  a_{} = {a}", j + 1);
    }
    for i in 0..plan.reps.len() {
        let exps = plan.exponents(i)?;
        println!(
            "  n({}) = {}",
            plan.reps[i].to_cycles(),
            exps.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(", ")
        );
    }
    Ok(Outcome::Ok)
}

fn load_blocks(k: usize) -> Result<Vec<MarkedGroup>> {
    (1..=k as u32).map(genus_cover_group).collect()
}

fn parse_tau(s: &str, k: usize) -> Result<Perm> {
    Perm::parse_cycles(s, k)
}

fn cmd_build(args: BuildArgs) -> Result<Outcome> {
    let plan = ShufflePlan::parse(&std::fs::read_to_string(&args.plan)?)?;
    let tau = parse_tau(&args.tau, plan.k)?;
    let (rep_idx, was_canonical) = plan.rep_index_of(&tau)?;
    if !was_canonical {
        println!(
            "note: tau = {} remapped to its canonical coset representative {}",
            tau.to_cycles(),
            plan.reps[rep_idx].to_cycles()
        );
    }
    let mut blocks = load_blocks(plan.k)?;
    if let Some(base) = &args.base_tau {
        let sigma = parse_tau(base, plan.k)?;
        let orig = blocks.clone();
        for (l, b) in blocks.iter_mut().enumerate() {
            *b = orig[sigma.apply(l)].clone();
        }
        println!("base marking: genera reordered by {}", sigma.to_cycles());
    }

    let dir = out_dir(&args.out);
    let mut gamma = build_gamma_k(&plan, &blocks, args.word_budget)?;
    certify_combined(&mut gamma, args.word_budget)?;
    let cert = gamma.combined_certificate.as_ref().unwrap();
    println!(
        "{}: certified H_top/H*_bottom at L = {}, margin {:?}, examined {}",
        gamma.id, cert.word_length, cert.margin, cert.examined
    );
    match ping_pong_certify(&gamma, 3, 0, 0) {
        Ok(pp) => println!(
            "{}: ping-pong depth {} checked {} words",
            gamma.id, pp.depth, pp.words_checked
        ),
        Err(v) => {
            return Err(Error::hypothesis(
                "ping-pong",
                format!("{:?}: {}", v.word, v.description),
            ))
        }
    }
    let (mut shuffled, extended) = build_gamma_k_tau(&plan, rep_idx, &blocks, args.word_budget)?;
    if shuffled.combined_certificate.is_none() {
        certify_combined(&mut shuffled, args.word_budget)?;
    }
    println!(
        "{}: built with HNN letter p = {} (width {})",
        extended.id,
        extended.hnn.as_ref().unwrap().p,
        extended.hnn_certificate.as_ref().unwrap().width
    );

    for (name, g) in [
        ("gamma.group", &gamma),
        ("gamma_tau.group", &shuffled),
        ("gamma_tau_hat.group", &extended),
    ] {
        let path = dir.join(name);
        write_atomic(&path, g.to_description().as_bytes())?;
        println!("wrote {}", path.display());
    }
    Ok(Outcome::Ok)
}

/// Parse "H:t", "H*:t" / "Hstar:t", or "disk:re,im,r".
fn parse_region(s: &str) -> Result<Region> {
    let (kind, rest) = s
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("bad region spec: {s}")))?;
    match kind.trim() {
        "H" => Ok(Region::upper(parse_real(rest)?)),
        "H*" | "Hstar" => Ok(Region::lower(parse_real(rest)?)),
        "disk" => {
            let parts: Vec<&str> = rest.split(',').collect();
            if parts.len() != 3 {
                return Err(Error::Parse("disk needs re,im,r".into()));
            }
            let re = parse_real(parts[0])?;
            let im = parse_real(parts[1])?;
            let r = parse_real(parts[2])?;
            let i = crate::scalar::Scalar::exact_int(0, 1);
            Region::disk(&re + &(&i * &im), &r * &r)
        }
        other => Err(Error::Parse(format!("unknown region kind {other}"))),
    }
}

fn load_group_alphabet(path: &Path, word_budget: usize) -> Result<Alphabet> {
    let text = std::fs::read_to_string(path)?;
    if text.starts_with("combined-group") {
        let g = crate::combine::CombinedGroup::from_description(&text, word_budget)?;
        Ok(g.alphabet())
    } else {
        let g = MarkedGroup::from_description(&text)?;
        Ok(Alphabet::from_marked(&g))
    }
}

fn cmd_verify(args: VerifyArgs) -> Result<Outcome> {
    let alpha = load_group_alphabet(&args.group, args.word_budget)?;
    let regions: Vec<Region> = args
        .region
        .split(';')
        .map(parse_region)
        .collect::<Result<Vec<_>>>()?;
    let outcome = check_precisely_invariant(&alpha, &regions, args.word_budget)?;
    let json = serde_json::to_string_pretty(&outcome).expect("outcome serializes");
    if let Some(out) = &args.out {
        write_atomic(out, json.as_bytes())?;
    }
    println!("{json}");
    match outcome {
        InvarianceOutcome::Certificate(_) => Ok(Outcome::Ok),
        InvarianceOutcome::Violation(_) => Ok(Outcome::Violation),
    }
}

fn cmd_render(args: RenderArgs) -> Result<Outcome> {
    let plan = ShufflePlan::parse(&std::fs::read_to_string(&args.plan)?)?;
    let tau = parse_tau(&args.tau, plan.k)?;
    let (rep_idx, _) = plan.rep_index_of(&tau)?;
    let blocks = load_blocks(plan.k)?;
    let (w, h) = args
        .resolution
        .split_once('x')
        .and_then(|(a, b)| Some((a.parse::<usize>().ok()?, b.parse::<usize>().ok()?)))
        .ok_or_else(|| Error::Parse(format!("bad resolution: {}", args.resolution)))?;
    let viewport = match &args.viewport {
        None => None,
        Some(v) => {
            let nums: Vec<f64> = v
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Parse(format!("bad viewport: {v}")))?;
            if nums.len() != 4 {
                return Err(Error::Parse("viewport needs four numbers".into()));
            }
            Some((nums[0], nums[1], nums[2], nums[3]))
        }
    };
    let params = RenderParams {
        depth: args.depth,
        prune: args.prune,
        budget: args.budget,
        width: w,
        height: h,
        viewport,
    };
    let (left, right) = render_shuffle_figure(&plan, rep_idx, &blocks, &params)?;
    let dir = out_dir(&args.out);
    let comments = vec![
        format!(
            "k {} C {} tau {} depth {} prune {:?} budget {} seed {}",
            plan.k,
            plan.c,
            plan.reps[rep_idx].to_cycles(),
            args.depth,
            args.prune,
            args.budget,
            args.seed
        ),
    ];
    let left_path = dir.join("gamma.pgm");
    let right_path = dir.join("gamma_tau.pgm");
    write_atomic(&left_path, &left.to_pgm(&comments))?;
    write_atomic(&right_path, &right.to_pgm(&comments))?;
    println!("wrote {}", left_path.display());
    println!("wrote {}", right_path.display());
    if args.png {
        left.write_png(&dir.join("gamma.png"))?;
        right.write_png(&dir.join("gamma_tau.png"))?;
        println!("wrote PNG copies");
    }
    Ok(Outcome::Ok)
}

fn cmd_classify(args: ClassifyArgs) -> Result<Outcome> {
    let plan_reps = crate::shuffle::coset_reps(args.k)?;
    let classes = homeo_classes(args.k)?;
    println!(
        "k = {}: {} marked classes, {} homeomorphism classes",
        args.k,
        plan_reps.len(),
        classes.len()
    );
    for (ci, class) in classes.iter().enumerate() {
        let members: Vec<String> = class
            .iter()
            .map(|&i| plan_reps[i].to_cycles())
            .collect();
        println!("  class {ci}: {}", members.join(", "));
    }
    Ok(Outcome::Ok)
}

fn cmd_deform(args: DeformArgs) -> Result<Outcome> {
    let plan = ShufflePlan::parse(&std::fs::read_to_string(&args.plan)?)?;
    let blocks: Vec<MarkedGroup> = args
        .blocks
        .iter()
        .map(|p| Ok(MarkedGroup::from_description(&std::fs::read_to_string(p)?)?))
        .collect::<Result<Vec<_>>>()?;
    let outcome = verify_deformed_blocks(&blocks, &plan, args.word_budget, args.claimed_k)?;
    let json = outcome.report.to_json();
    if let Some(out) = &args.out {
        write_atomic(out, json.as_bytes())?;
    }
    println!("{json}");
    match outcome.report.verdict {
        crate::deform::Verdict::Consistent => Ok(Outcome::Ok),
        crate::deform::Verdict::Violated => Ok(Outcome::Violation),
    }
}
