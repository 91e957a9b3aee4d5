//! `tiltlab` command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 domain or precondition error,
//! 3 internal invariant failure (including an oracle mismatch).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use tiltlab::bmt::{conj1_check, conj3_margin, grid_csv, q_form, q_region_sample, Grid};
use tiltlab::charclass::CharVector;
use tiltlab::geometry::{fano_preset, Geometry};
use tiltlab::hilb::{alpha_from_poly, n_constant, rk_deg_c2, tau_charge, HilbertData};
use tiltlab::rational::{fmt_rat, parse_rat, parse_rat_list, to_f64};
use tiltlab::stabfamily::{default_precision, support_interval, vr_contains, SupportInterval};
use tiltlab::tiltplane::{restricted_range_min_w, LePotierBound, TiltPoint};
use tiltlab::walls::{
    bruteforce_band, bruteforce_walls, certified_band_box, certified_box, walls_in_band,
    walls_through_point, Wall, WallConfig, WallReport,
};
use tiltlab::{QuadraticNumber, Rat, TiltError};

#[derive(Parser)]
#[command(name = "tiltlab", version, about = "Exact tilt-stability computations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Geometry file utilities.
    Geometry {
        #[command(subcommand)]
        action: GeometryAction,
    },
    /// Emit the geometry of a Fano threefold preset.
    Fano {
        /// Fano index, 1 to 4.
        #[arg(long)]
        index: u32,
        /// Degree d as "p/q".
        #[arg(long, allow_hyphen_values = true)]
        degree: String,
    },
    /// Euler characteristic of a class.
    Chi(ClassArgs),
    /// Walls through a point or crossing a vertical band.
    Walls(WallsArgs),
    /// Quadratic form and cubic margin at a point.
    Bmt {
        #[command(flatten)]
        target: ClassArgs,
        /// Point "b,w".
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Sign of the quadratic form over a rectangular grid, as CSV.
    BmtGrid {
        #[command(flatten)]
        target: ClassArgs,
        /// Rectangle "b_min,b_max,w_min,w_max".
        #[arg(long, allow_hyphen_values = true)]
        rect: String,
        /// Steps "db,dw".
        #[arg(long)]
        step: String,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact margin of the cubic inequality at bbar.
    Conj3(ClassArgs),
    /// Support-property interval of the four-parameter family.
    StabCheck {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
        /// Endpoint enclosure width, default 1/1048576.
        #[arg(long)]
        precision: Option<String>,
    },
    /// Rank, degree and c2 from Hilbert polynomials.
    Hilb {
        /// Coefficients of chi(O(m)), constant term first.
        #[arg(long, allow_hyphen_values = true)]
        base: String,
        /// Coefficients of chi(E(m)), constant term first.
        #[arg(long, allow_hyphen_values = true)]
        class: String,
        #[arg(long, allow_hyphen_values = true, requires = "t")]
        s: Option<String>,
        #[arg(long, allow_hyphen_values = true, requires = "s")]
        t: Option<String>,
        /// Also report the BG-type constant for this twist N.
        #[arg(long, allow_hyphen_values = true)]
        big_n: Option<String>,
    },
    /// Lower edge of the restricted range at b.
    Range {
        #[arg(long, allow_hyphen_values = true)]
        b: String,
    },
}

#[derive(Subcommand)]
enum GeometryAction {
    /// Parse, check and re-emit a geometry file in canonical form.
    Validate { file: PathBuf },
}

#[derive(Args)]
struct ClassArgs {
    /// Geometry JSON file, or "fano:INDEX:DEGREE".
    #[arg(long)]
    geom: String,
    /// Class as a JSON file, a JSON array or object, or "v0,v1,v2[,v3]".
    #[arg(long, allow_hyphen_values = true)]
    class: String,
}

#[derive(Args)]
struct WallsArgs {
    #[command(flatten)]
    target: ClassArgs,
    /// Point "b,w".
    #[arg(long, allow_hyphen_values = true, conflicts_with = "band", required_unless_present = "band")]
    at: Option<String>,
    /// Band "b0,w_lo,w_hi".
    #[arg(long, allow_hyphen_values = true)]
    band: Option<String>,
    /// Cross-check against exhaustive enumeration; exit 3 on mismatch.
    #[arg(long)]
    oracle: bool,
    /// Also write one CSV row per wall here.
    #[arg(long)]
    csv: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Domain(String),
    Invariant(String),
}

impl From<TiltError> for Failure {
    fn from(e: TiltError) -> Self {
        match e {
            TiltError::Parse { .. } => Failure::Usage(e.to_string()),
            TiltError::Invariant(_) => Failure::Invariant(e.to_string()),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

type Outcome<T> = Result<T, Failure>;

fn read_file(path: &Path) -> Outcome<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Outcome<()> {
    std::fs::write(path, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn load_geometry(arg: &str) -> Outcome<Geometry> {
    if let Some(rest) = arg.strip_prefix("fano:") {
        let (idx, deg) = rest
            .split_once(':')
            .ok_or_else(|| Failure::Usage("expected fano:INDEX:DEGREE".into()))?;
        let idx: u32 = idx
            .parse()
            .map_err(|_| Failure::Usage(format!("malformed value for `geom`: index {idx:?}")))?;
        return Ok(fano_preset(idx, parse_rat("geom", deg)?)?);
    }
    Ok(Geometry::from_json(&read_file(Path::new(arg))?)?)
}

fn load_class(arg: &str) -> Outcome<CharVector> {
    let trimmed = arg.trim_start();
    let text = if trimmed.starts_with('[') || trimmed.starts_with('{') {
        arg.to_string()
    } else if Path::new(arg).is_file() {
        read_file(Path::new(arg))?
    } else {
        return Ok(CharVector::from_components(&parse_rat_list("class", arg)?)?);
    };
    let val: Value = serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("malformed value for `class`: {e}")))?;
    Ok(CharVector::from_json_value(&val)?)
}

fn rats<const N: usize>(field: &str, s: &str) -> Outcome<[Rat; N]> {
    let v = parse_rat_list(field, s)?;
    let n = v.len();
    v.try_into()
        .map_err(|_| Failure::Usage(format!("malformed value for `{field}`: expected {N} values, got {n}")))
}

fn threads() -> Outcome<Option<usize>> {
    match std::env::var("TILTLAB_THREADS") {
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Failure::Usage(format!("malformed value for `TILTLAB_THREADS`: {s:?}"))),
        },
        Err(_) => Ok(None),
    }
}

fn point_json(p: &TiltPoint) -> Value {
    json!({"b": fmt_rat(&p.b), "w": fmt_rat(&p.w)})
}

fn quadratic_json(x: &QuadraticNumber) -> Value {
    json!({"p": fmt_rat(x.p()), "q": fmt_rat(x.q()), "rad": fmt_rat(x.rad())})
}

fn wall_json(w: &Wall) -> Value {
    json!({
        "line": w.line.iter().map(|x| fmt_rat(&Rat::from_integer(x.clone()))).collect::<Vec<_>>(),
        "slope": w.slope().to_string(),
        "witnesses": w.witnesses.iter().map(CharVector::to_json_value).collect::<Vec<_>>(),
        "overflow": w.overflow,
    })
}

fn walls_csv(report: &WallReport) -> String {
    let mut s = String::from("line_a,line_b,line_c,slope,slope_decimal,witness_count\n");
    for w in &report.walls {
        let slope = w.slope();
        let decimal = match &slope {
            tiltlab::charclass::Slope::Finite(x) => format!("{:.12}", to_f64(x)),
            tiltlab::charclass::Slope::Infinite => "inf".into(),
        };
        let [a, b, c] = &w.line;
        s.push_str(&format!("{a},{b},{c},{slope},{decimal},{}\n", w.witnesses.len()));
    }
    s
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json serializes"));
}

fn cmd_walls(args: &WallsArgs) -> Outcome<()> {
    let geom = load_geometry(&args.target.geom)?;
    let v = load_class(&args.target.class)?;
    let lp = LePotierBound::new(geom.bg_defect.clone())?;
    let cfg = WallConfig { threads: threads()?, ..WallConfig::default() };
    let (mut out, report, oracle) = if let Some(at) = &args.at {
        let [b, w] = rats::<2>("at", at)?;
        let p = TiltPoint::new(b, w);
        let report = walls_through_point(&v, &p, &geom, &lp, &cfg)?;
        let oracle = if args.oracle {
            let bx = certified_box(&v, &p, &geom, &lp)?
                .ok_or_else(|| Failure::Domain("no finite box for the oracle".into()))?;
            Some(bruteforce_walls(&v, &p, &geom, &lp, &bx, &cfg)?)
        } else {
            None
        };
        (json!({"class": v.to_json_value(), "point": point_json(&p)}), report, oracle)
    } else {
        let band = args.band.as_deref().expect("clap enforces --at or --band");
        let [b0, lo, hi] = rats::<3>("band", band)?;
        let report = walls_in_band(&v, &b0, &lo, &hi, &geom, &lp, &cfg)?;
        let oracle = if args.oracle {
            let bx = certified_band_box(&v, &b0, &lo, &hi, &geom, &lp)?
                .ok_or_else(|| Failure::Domain("no finite box for the oracle".into()))?;
            Some(bruteforce_band(&v, &b0, &lo, &hi, &geom, &lp, &bx, &cfg)?)
        } else {
            None
        };
        let band = json!({"b0": fmt_rat(&b0), "w_lo": fmt_rat(&lo), "w_hi": fmt_rat(&hi)});
        (json!({"class": v.to_json_value(), "band": band}), report, oracle)
    };
    out["walls"] = Value::Array(report.walls.iter().map(wall_json).collect());
    out["relaxed"] = json!(report.relaxed);
    if let Some(csv) = &args.csv {
        write_file(csv, &walls_csv(&report))?;
    }
    if let Some(slow) = oracle {
        let agrees = slow == report;
        out["oracle_agrees"] = json!(agrees);
        print_json(&out);
        if !agrees {
            return Err(Failure::Invariant(format!(
                "oracle mismatch: {} walls enumerated, {} by exhaustive scan",
                report.walls.len(),
                slow.walls.len()
            )));
        }
        return Ok(());
    }
    print_json(&out);
    Ok(())
}

fn run(cli: Cli) -> Outcome<()> {
    match cli.command {
        Command::Geometry { action: GeometryAction::Validate { file } } => {
            let g = Geometry::from_json(&read_file(&file)?)?;
            print!("{}", g.to_json());
        }
        Command::Fano { index, degree } => {
            print!("{}", fano_preset(index, parse_rat("degree", &degree)?)?.to_json());
        }
        Command::Chi(t) => {
            let geom = load_geometry(&t.geom)?;
            let v = load_class(&t.class)?;
            print_json(&json!({"class": v.to_json_value(), "chi": fmt_rat(&v.euler_char(&geom)?)}));
        }
        Command::Walls(args) => cmd_walls(&args)?,
        Command::Bmt { target, point } => {
            let geom = load_geometry(&target.geom)?;
            let v = load_class(&target.class)?;
            let [b, w] = rats::<2>("point", &point)?;
            let p = TiltPoint::new(b, w);
            let q = q_form(&v, &p, &geom)?;
            let margin = conj1_check(&v, &p, &geom)?;
            print_json(&json!({
                "class": v.to_json_value(),
                "point": point_json(&p),
                "q": fmt_rat(&q),
                "q_sign": tiltlab::rational::sign(&q),
                "cubic_margin": fmt_rat(&margin),
                "cubic_holds": margin >= Rat::from_integer(0.into()),
            }));
        }
        Command::BmtGrid { target, rect, step, out } => {
            let geom = load_geometry(&target.geom)?;
            let v = load_class(&target.class)?;
            let [b_min, b_max, w_min, w_max] = rats::<4>("rect", &rect)?;
            let [db, dw] = rats::<2>("step", &step)?;
            let grid = Grid { b_min, b_max, w_min, w_max, db, dw };
            let samples = match threads()? {
                Some(n) => rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| Failure::Invariant(format!("thread pool: {e}")))?
                    .install(|| q_region_sample(&v, &geom, &grid))?,
                None => q_region_sample(&v, &geom, &grid)?,
            };
            let csv = grid_csv(&samples);
            match out {
                Some(path) => write_file(&path, &csv)?,
                None => print!("{csv}"),
            }
        }
        Command::Conj3(t) => {
            let geom = load_geometry(&t.geom)?;
            let v = load_class(&t.class)?;
            let margin = conj3_margin(&v, &geom)?;
            print_json(&json!({
                "class": v.to_json_value(),
                "bbar": quadratic_json(&v.bbar()?),
                "margin": quadratic_json(&margin),
                "sign": margin.signum(),
            }));
        }
        Command::StabCheck { a, alpha, beta, precision } => {
            let a = parse_rat("a", &a)?;
            let alpha = parse_rat("alpha", &alpha)?;
            let beta = parse_rat("beta", &beta)?;
            let precision = match precision {
                Some(p) => parse_rat("precision", &p)?,
                None => default_precision(),
            };
            let criterion = vr_contains(&a, &Rat::from_integer(0.into()), &alpha, &beta, |_, _| true);
            let out = match support_interval(&a, &alpha, &beta, &precision)? {
                SupportInterval::Empty => json!({"interval": "empty", "nonempty_criterion": criterion}),
                SupportInterval::Interval { inner, outer } => json!({
                    "interval": [fmt_rat(&inner.0), fmt_rat(&inner.1)],
                    "outer": [fmt_rat(&outer.0), fmt_rat(&outer.1)],
                    "nonempty_criterion": criterion,
                }),
            };
            print_json(&out);
        }
        Command::Hilb { base, class, s, t, big_n } => {
            let base = HilbertData::new(parse_rat_list("base", &base)?)?;
            let e = parse_rat_list("class", &class)?;
            let triple = rk_deg_c2(&e, &base)?;
            let mut out = json!({
                "dim": base.dim(),
                "alpha_base": base.alpha().iter().map(fmt_rat).collect::<Vec<_>>(),
                "alpha_class": alpha_from_poly(&e)?.iter().map(fmt_rat).collect::<Vec<_>>(),
                "rk": fmt_rat(&triple.0),
                "deg": fmt_rat(&triple.1),
                "c2": fmt_rat(&triple.2),
            });
            if let (Some(s), Some(t)) = (s, t) {
                let (re, im) = tau_charge(&triple, &parse_rat("s", &s)?, &parse_rat("t", &t)?);
                out["tau"] = json!({"re": fmt_rat(&re), "im": fmt_rat(&im)});
            }
            if let Some(n) = big_n {
                out["n_constant"] = json!(fmt_rat(&n_constant(base.alpha(), &parse_rat("big-n", &n)?)?));
            }
            print_json(&out);
        }
        Command::Range { b } => {
            let b = parse_rat("b", &b)?;
            print_json(&json!({"b": fmt_rat(&b), "min_w": fmt_rat(&restricted_range_min_w(&b))}));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Domain(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Invariant(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
