use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use khcube::chain::HomologyTable;
use khcube::cube::{CubeOptions, GradedCube};
use khcube::diagram::{parse_pd, PlanarDiagram};
use khcube::filtration::{FilteredComplex, PerturbedDifferential, SANDBOX_DENSITY};
use khcube::invariants::{
    alexander, differential_feasibility, mod4_betti, rank_lower_bound, FiltrationMode, T45_INSTANTON_MOD4,
};
use khcube::khovanov::{Coeffs, KhovanovComplex};
use khcube::oracle::jones_unnormalized;
use khcube::{corpus, par, selftest, Error};

#[derive(Parser)]
#[command(name = "kh", version, about = "Khovanov homology of link diagrams and pseudo-diagrams")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum CoeffArg {
    Z,
    Q,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    H,
    Q,
}

#[derive(Args)]
struct Input {
    /// PD file (text or JSON), an inline code such as `PD[X(1,1,2,2)]`, or
    /// `@name` for a bundled diagram.
    input: String,
    /// Swap over and under at every crossing first.
    #[arg(long)]
    mirror: bool,
    /// Reject resolutions not verified as unlinks (the default).
    #[arg(long, conflicts_with = "trust_pseudo")]
    strict: bool,
    /// Accept resolutions the unlink check could not verify.
    #[arg(long)]
    trust_pseudo: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a diagram and print its crossings, signs and components.
    Parse(Input),
    /// Dump the cube of resolutions with grading offsets and edge data.
    Cube(Input),
    /// Bigraded Khovanov homology.
    Homology {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        reduced: bool,
        #[arg(long, value_enum, default_value = "z")]
        coeffs: CoeffArg,
    },
    /// Spectral sequence of the filtration by `a·h + b·q`.
    Ss {
        #[command(flatten)]
        input: Input,
        /// Filtration weight `a,b` with `a, b ≥ 0`.
        #[arg(long, value_parser = parse_weight)]
        weight: (i64, i64),
        /// Replace `d` by a seeded conjugate `g d g⁻¹`.
        #[arg(long)]
        perturb: Option<u64>,
        /// Entry density of the conjugating perturbation.
        #[arg(long, requires = "perturb", default_value_t = SANDBOX_DENSITY)]
        density: f64,
        #[arg(long)]
        reduced: bool,
    },
    /// Symmetrized Alexander polynomial and the rank bound it gives.
    Alexander(Input),
    /// Reduced rational homology, mod-4 table and differential feasibility.
    Analyze {
        #[command(flatten)]
        input: Input,
        /// Rank the spectral sequence must end at; defaults to the Alexander bound.
        #[arg(long)]
        target_rank: Option<usize>,
        #[arg(long, value_enum, default_value = "h")]
        mode: ModeArg,
        /// Required mod-4 table of the limit, as four comma-separated counts.
        #[arg(long, value_parser = parse_mod4, conflicts_with = "instanton_mod4")]
        mod4: Option<[usize; 4]>,
        /// Require the mod-4 table 2,1,2,2 expected for the instanton homology of T(4,5).
        #[arg(long)]
        instanton_mod4: bool,
    },
    /// Check d² = 0, bidegrees and the Jones polynomial against an oracle.
    Verify(Input),
    /// Run the bundled acceptance suite.
    Selftest {
        /// Run only these criteria.
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
    },
}

fn parse_weight(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once(',').ok_or("expected a,b")?;
    let a = a.trim().parse().map_err(|e| format!("{e}"))?;
    let b = b.trim().parse().map_err(|e| format!("{e}"))?;
    Ok((a, b))
}

fn parse_mod4(s: &str) -> Result<[usize; 4], String> {
    let v: Vec<usize> = s.split(',').map(|x| x.trim().parse().map_err(|e| format!("{e}"))).collect::<Result<_, _>>()?;
    v.try_into().map_err(|_| "expected four counts".to_string())
}

/// Failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: if e.is_internal() { 2 } else { 1 }, message: e.to_string() }
    }
}

fn input_error(message: String) -> Failure {
    Failure { code: 1, message }
}

type Run = Result<(String, u8), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Ok(n) = std::env::var("KH_THREADS") {
        match n.parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = par::set_threads(n) {
                    eprintln!("error: KH_THREADS: {e}");
                    return ExitCode::from(1);
                }
            }
            _ => {
                eprintln!("error: KH_THREADS must be a positive integer, got {n:?}");
                return ExitCode::from(1);
            }
        }
    }
    match run(&cli) {
        Ok((out, code)) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load(input: &Input) -> Result<(PlanarDiagram, CubeOptions), Failure> {
    let d = if let Some(name) = input.input.strip_prefix('@') {
        corpus::all()
            .into_iter()
            .find(|(n, _)| *n == name)
            .map(|(_, d)| d)
            .ok_or_else(|| input_error(format!("no bundled diagram named {name:?}")))?
    } else if Path::new(&input.input).is_file() {
        let text = std::fs::read_to_string(&input.input)
            .map_err(|e| input_error(format!("cannot read {}: {e}", input.input)))?;
        parse_pd(&text)?
    } else {
        parse_pd(&input.input)?
    };
    let d = if input.mirror { d.mirror()? } else { d };
    Ok((d, CubeOptions { trust_pseudo: input.trust_pseudo }))
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn csv(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut s = format!("{header}\n");
    for r in rows {
        s.push_str(&r);
        s.push('\n');
    }
    s
}

fn bits(v: &[u8]) -> String {
    v.iter().map(|b| char::from(b'0' + b)).collect()
}

fn complex(d: &PlanarDiagram, opts: CubeOptions, reduced: bool) -> Result<KhovanovComplex, Failure> {
    Ok(if reduced { KhovanovComplex::reduced_assemble(d, opts)? } else { KhovanovComplex::assemble(d, opts)? })
}

fn run(cli: &Cli) -> Run {
    let f = cli.format;
    match &cli.command {
        Command::Parse(input) => parse(input, f),
        Command::Cube(input) => cube(input, f),
        Command::Homology { input, reduced, coeffs } => homology(input, *reduced, *coeffs, f),
        Command::Ss { input, weight, perturb, density, reduced } => ss(input, *weight, *perturb, *density, *reduced, f),
        Command::Alexander(input) => alexander_cmd(input, f),
        Command::Analyze { input, target_rank, mode, mod4, instanton_mod4 } => {
            let required = if *instanton_mod4 { Some(T45_INSTANTON_MOD4) } else { *mod4 };
            analyze(input, *target_rank, *mode, required, f)
        }
        Command::Verify(input) => verify(input, f),
        Command::Selftest { only } => selftest_cmd(only, f),
    }
}

fn parse(input: &Input, f: Format) -> Run {
    let (d, _) = load(input)?;
    let n: Vec<usize> = d.n_indices().iter().map(|i| i + 1).collect();
    let out = match f {
        Format::Json => to_json(&json!({
            "pd": d.to_pd_string(),
            "crossings": d.crossings().iter().map(|c| c.arcs).collect::<Vec<_>>(),
            "signs": d.signs(),
            "n": n,
            "components": d.component_count(),
            "free_circles": d.extra_circles(),
            "arcs": d.arc_count(),
            "writhe": d.writhe(),
            "basepoint": d.basepoint(),
            "genus": d.genus(),
        })),
        Format::Csv => csv(
            "crossing,a,b,c,d,sign,in_n",
            d.crossings().iter().enumerate().map(|(i, c)| {
                let [a, b, cc, dd] = c.arcs;
                format!("{},{a},{b},{cc},{dd},{},{}", i + 1, d.sign(i), n.contains(&(i + 1)))
            }),
        ),
    };
    Ok((out, 0))
}

fn cube(input: &Input, f: Format) -> Run {
    let (d, opts) = load(input)?;
    let dump = GradedCube::build(&d, opts)?.dump();
    let out = match f {
        Format::Json => to_json(&dump),
        Format::Csv => {
            let verts = dump.vertices.iter().map(|v| {
                format!("vertex,{},,{},{},{},{:?},,", bits(&v.v), v.circles, v.h_offset, v.q_offset, v.unlink_status)
            });
            let edges = dump.edges.iter().map(|e| format!("edge,{},{},,,,,{:?},{}", bits(&e.v), bits(&e.u), e.kind, e.sigma));
            csv("record,v,u,circles,h_offset,q_offset,unlink_status,kind,sigma", verts.chain(edges).collect::<Vec<_>>())
        }
    };
    Ok((out, 0))
}

fn table_csv(t: &HomologyTable) -> String {
    csv(
        "h,q,free_rank,torsion",
        t.iter().map(|((h, q), g)| {
            let tors: Vec<String> = g.torsion.iter().map(|x| x.to_string()).collect();
            format!("{h},{q},{},{}", g.free_rank, tors.join(";"))
        }),
    )
}

fn homology(input: &Input, reduced: bool, coeffs: CoeffArg, f: Format) -> Run {
    let (d, opts) = load(input)?;
    let c = match coeffs {
        CoeffArg::Z => Coeffs::Z,
        CoeffArg::Q => Coeffs::Q,
    };
    let t = complex(&d, opts, reduced)?.homology(c)?;
    let out = match f {
        Format::Json => to_json(&json!({
            "reduced": reduced,
            "coeffs": c,
            "mirror": input.mirror,
            "total_rank": t.total_rank(),
            "groups": t,
        })),
        Format::Csv => table_csv(&t),
    };
    Ok((out, 0))
}

fn ss(input: &Input, weight: (i64, i64), perturb: Option<u64>, density: f64, reduced: bool, f: Format) -> Run {
    let (d, opts) = load(input)?;
    if !(0.0..=1.0).contains(&density) {
        return Err(input_error(format!("density {density} is not a probability")));
    }
    let (_, base) = complex(&d, opts, reduced)?.to_bigraded()?;
    let c = match perturb {
        Some(seed) => PerturbedDifferential::conjugate(&base, seed, density)?.complex()?,
        None => base,
    };
    let seq = FilteredComplex::new(c, weight)?.spectral_sequence()?;
    let out = match f {
        Format::Json => to_json(&json!({
            "weight": [weight.0, weight.1],
            "perturb": perturb,
            "homology_rank": seq.homology_rank,
            "pages": seq.pages,
        })),
        Format::Csv => {
            let mut rows = Vec::new();
            for page in &seq.pages {
                for (kind, list) in [("group", &page.groups), ("d", &page.d_ranks)] {
                    for g in list {
                        let comp = g.complementary().map(|x| x.to_string()).unwrap_or_default();
                        rows.push(format!("{},{kind},{},{comp},{}", page.r, g.p, g.rank));
                    }
                }
            }
            csv("r,record,p,complementary,rank", rows)
        }
    };
    Ok((out, 0))
}

fn alexander_cmd(input: &Input, f: Format) -> Run {
    let (d, _) = load(input)?;
    let delta = alexander(&d)?;
    let bound = rank_lower_bound(&delta);
    let out = match f {
        Format::Json => to_json(&json!({
            "polynomial": delta.to_string(),
            "coefficients": delta,
            "rank_lower_bound": bound,
        })),
        Format::Csv => csv("exponent,coefficient", delta.terms().map(|(e, c)| format!("{e},{c}"))),
    };
    Ok((out, 0))
}

fn analyze(input: &Input, target: Option<usize>, mode: ModeArg, required: Option<[usize; 4]>, f: Format) -> Run {
    let (d, opts) = load(input)?;
    let ranks = KhovanovComplex::reduced_assemble(&d, opts)?.homology(Coeffs::Q)?.ranks();
    let delta = alexander(&d)?;
    let bound = rank_lower_bound(&delta);
    let mode = match mode {
        ModeArg::H => FiltrationMode::H,
        ModeArg::Q => FiltrationMode::Q,
    };
    let report = differential_feasibility(&ranks, target.unwrap_or(bound), mode, required)?;
    let out = match f {
        Format::Json => {
            let rows: Vec<_> = ranks.iter().map(|(&(i, j), &r)| json!({"i": i, "j": j, "rank": r})).collect();
            to_json(&json!({
                "homology": rows,
                "mod4": mod4_betti(&ranks).betti,
                "alexander": delta.to_string(),
                "rank_lower_bound": bound,
                "feasibility": report,
            }))
        }
        Format::Csv => {
            let mut rows = Vec::new();
            for (k, p) in report.placements.iter().enumerate() {
                for dd in &p.differentials {
                    rows.push(format!("{},{},{},{}", k + 1, dd.source_row, dd.target_row, dd.rank));
                }
                if p.differentials.is_empty() {
                    rows.push(format!("{},,,0", k + 1));
                }
            }
            csv("placement,source_row,target_row,rank", rows)
        }
    };
    Ok((out, 0))
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    ok: bool,
    detail: String,
}

/// Largest genuine diagram whose Jones polynomial the state-sum oracle checks.
const ORACLE_CROSSINGS: usize = 12;

fn verify(input: &Input, f: Format) -> Run {
    let (d, opts) = load(input)?;
    let k = KhovanovComplex::assemble(&d, opts)?;
    let mut checks = Vec::new();
    let r = k.check_differential();
    checks.push(Check {
        name: "differential",
        ok: r.is_ok(),
        detail: r.err().map_or_else(|| "d² = 0, bidegree (1,0)".into(), |e| e.to_string()),
    });
    let (small, max) = k.cube().small_self_intersection();
    checks.push(Check { name: "small_squares", ok: small, detail: format!("max σ(v,u) over v ≥ u is {max}") });
    if d.n_size() == d.crossing_count() && d.crossing_count() <= ORACLE_CROSSINGS {
        let chi = k.homology(Coeffs::Q)?.euler_by_q();
        let arcs: Vec<[i64; 4]> = d.crossings().iter().map(|c| c.arcs).collect();
        let jones: BTreeMap<i64, i64> =
            jones_unnormalized(&arcs, d.signs(), d.extra_circles()).into_iter().map(|(e, c)| (-e, c)).collect();
        checks.push(Check {
            name: "jones",
            ok: chi == jones,
            detail: "graded Euler characteristic against the Kauffman bracket".into(),
        });
    }
    let ok = checks.iter().all(|c| c.ok);
    let out = match f {
        Format::Json => to_json(&json!({ "ok": ok, "checks": checks })),
        Format::Csv => csv("check,ok,detail", checks.iter().map(|c| format!("{},{},\"{}\"", c.name, c.ok, c.detail))),
    };
    Ok((out, if ok { 0 } else { 2 }))
}

fn selftest_cmd(only: &[usize], f: Format) -> Run {
    let ids: Vec<usize> = if only.is_empty() { (1..=selftest::CRITERIA).collect() } else { only.to_vec() };
    let mut outcomes = Vec::new();
    for id in ids {
        let o = selftest::run(id).ok_or_else(|| input_error(format!("no criterion {id}")))?;
        eprintln!("{}", o.line());
        outcomes.push(o);
    }
    let ok = outcomes.iter().all(|o| o.passed);
    let out = match f {
        Format::Json => to_json(&outcomes),
        Format::Csv => {
            let mut s = String::from("id,passed,title,seconds,detail\n");
            for o in &outcomes {
                let _ = writeln!(s, "{},{},\"{}\",{:.3},\"{}\"", o.id, o.passed, o.title, o.seconds, o.detail.replace('"', "'"));
            }
            s
        }
    };
    Ok((out, if ok { 0 } else { 2 }))
}
