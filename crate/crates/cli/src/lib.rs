//! Command-line front end: argument schema, job execution and the JSON report envelope.
//!
//! Every report has the shape `{"schema_version", "command", "input", "result"}`.
//! `input` echoes the canonical form of what was read, never file paths, so
//! identical inputs give byte-identical reports.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use transverse::certify::{
    certify_auto, check_corollary_curves, check_corollary_identity, check_theorem_a, check_theorem_main,
    check_theorem_weak, Certificate,
};
use transverse::diagonal_isogeny::DiagonalIsogeny;
use transverse::exact_poly::Rational;
use transverse::ff_oracle::{
    degree_spot_check, verify_maps_vs_group_law, verify_preimage_membership, PrimeFieldCtx, ScanPolicy,
};
use transverse::height_bounds::{
    bezout_intersection_bounds, c0, essential_minimum_image_bounds, galateau_lambda, product_constants,
    weil_height_rational, zhang_special_bound, EssentialMinimumMode, Interval,
};
use transverse::preimage_equations::{generate_preimage_with, SubstitutionStyle};
use transverse::product_variety::{preimage_degree, preimage_degree_curve, preimage_multidegrees, SubvarietyPresentation};

pub const SCHEMA_VERSION: &str = "1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "transverse", version, about = "Preimages, transversality certificates and height bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Try to certify that phi^{-1}(V) is transverse.
    Certify(CertifyArgs),
    /// Equations of phi^{-1}(V).
    Preimage(PreimageArgs),
    /// Multidegrees and degree of phi^{-1}(V).
    Degree(VarietyIsogeny),
    /// Height comparison constants c1, c2, c3 of the curves of a variety.
    Constants(ConstantsArgs),
    /// Explicit height and degree bounds.
    Bounds {
        #[command(subcommand)]
        bound: Bound,
    },
    /// Brute-force checks over a prime field.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
pub struct VarietyIsogeny {
    /// Subvariety JSON file.
    #[arg(long)]
    pub variety: PathBuf,
    /// Diagonal isogeny as a JSON array, e.g. '[2,1]'.
    #[arg(long)]
    pub isogeny: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CriterionArg {
    Auto,
    Curves,
    Main,
    Weak,
    Identity,
    TheoremA,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub target: VarietyIsogeny,
    #[arg(long, value_enum, default_value_t = CriterionArg::Auto)]
    pub criterion: CriterionArg,
    /// Integer n for the identity criterion; defaults to alpha_1 when all alphas agree.
    #[arg(long, allow_hyphen_values = true)]
    pub n: Option<i64>,
    /// Use the prime form of the identity criterion.
    #[arg(long)]
    pub prime_mode: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StyleArg {
    Reduced,
    Unreduced,
}

#[derive(Debug, Args)]
pub struct PreimageArgs {
    #[command(flatten)]
    pub target: VarietyIsogeny,
    #[arg(long, value_enum, default_value_t = StyleArg::Reduced)]
    pub style: StyleArg,
}

#[derive(Debug, Args)]
pub struct ConstantsArgs {
    #[arg(long)]
    pub variety: PathBuf,
    /// Use the sharper constants valid over the rationals.
    #[arg(long)]
    pub better: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Smart,
    Naive,
}

#[derive(Debug, Subcommand)]
pub enum Bound {
    /// c0(d1, d2, m).
    C0 {
        #[arg(long)]
        d1: u32,
        #[arg(long)]
        d2: u32,
        #[arg(long)]
        m: u128,
    },
    /// Height bound for a subvariety of a point fibre.
    Zhang {
        #[arg(long)]
        variety: PathBuf,
        #[arg(long)]
        h2: f64,
        #[arg(long)]
        better: bool,
    },
    /// Arithmetic Bezout bounds, trivial and improved.
    Bezout {
        #[arg(long)]
        deg_pre: u128,
        #[arg(long)]
        h2_pre: f64,
        #[arg(long)]
        deg_b: u128,
        #[arg(long)]
        h2_b: f64,
        #[arg(long)]
        dim_b: u32,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        deg_phi: u128,
    },
    /// lambda(N, k) exactly.
    Lambda {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
    },
    /// Lower-bound multipliers for the essential minimum of an image curve.
    EssentialMinimum {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        d_l: u128,
        #[arg(long, allow_hyphen_values = true)]
        alpha: i64,
        #[arg(long)]
        deg_c: u128,
        #[arg(long)]
        deg_pre: Option<u128>,
        #[arg(long, value_enum, default_value_t = ModeArg::Smart)]
        mode: ModeArg,
    },
    /// Weil height of a rational number.
    WeilHeight {
        #[arg(long, allow_hyphen_values = true)]
        value: String,
    },
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub target: VarietyIsogeny,
    #[arg(long)]
    pub p: u64,
    /// Sample tuples even when an exhaustive scan is affordable.
    #[arg(long)]
    pub sampled: bool,
}

/// Result of one job: exit code and the text for each stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn load_variety(path: &Path) -> Result<SubvarietyPresentation, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    SubvarietyPresentation::from_json_str(&text).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn load_pair(t: &VarietyIsogeny) -> Result<(SubvarietyPresentation, DiagonalIsogeny), Failure> {
    Ok((load_variety(&t.variety)?, DiagonalIsogeny::parse(&t.isogeny)?))
}

fn interval(x: &Interval) -> Value {
    json!({
        "lower": x.lower_f64(),
        "upper": x.upper_f64(),
        "lower_decimal": x.lower_decimal(),
        "upper_decimal": x.upper_decimal(),
    })
}

fn envelope(command: &str, input: Value, result: Value) -> String {
    let doc = json!({ "schema_version": SCHEMA_VERSION, "command": command, "input": input, "result": result });
    let mut s = serde_json::to_string_pretty(&doc).expect("values serialize");
    s.push('\n');
    s
}

fn certificate(args: &CertifyArgs, v: &SubvarietyPresentation, phi: &DiagonalIsogeny) -> Result<Certificate, Failure> {
    let cert = match args.criterion {
        CriterionArg::Auto => certify_auto(v, phi)?,
        CriterionArg::Curves => check_corollary_curves(v, phi)?,
        CriterionArg::Main => check_theorem_main(v, phi)?,
        CriterionArg::Weak => check_theorem_weak(v, phi)?,
        CriterionArg::TheoremA => check_theorem_a(v, phi.alphas())?,
        CriterionArg::Identity => {
            let n = match args.n {
                Some(n) => n,
                None if phi.alphas().iter().all(|&a| a == phi.alphas()[0]) => phi.alphas()[0],
                None => return Err(Failure("identity criterion needs --n or an isogeny [n,...,n]".into())),
            };
            check_corollary_identity(v, n, args.prime_mode)?
        }
    };
    Ok(cert)
}

fn execute(cli: &Cli) -> Result<(i32, String), Failure> {
    match &cli.command {
        Command::Certify(args) => {
            let (v, phi) = load_pair(&args.target)?;
            let cert = certificate(args, &v, &phi)?;
            let input = json!({
                "variety": v.to_json(),
                "isogeny": phi.alphas(),
                "criterion": format!("{:?}", args.criterion),
                "n": args.n,
                "prime_mode": args.prime_mode,
            });
            let code = if cert.is_certified() { EXIT_OK } else { EXIT_NEGATIVE };
            Ok((code, envelope("certify", input, serde_json::to_value(&cert)?)))
        }
        Command::Preimage(args) => {
            let (v, phi) = load_pair(&args.target)?;
            let style = match args.style {
                StyleArg::Reduced => SubstitutionStyle::Reduced,
                StyleArg::Unreduced => SubstitutionStyle::Unreduced,
            };
            let pre = generate_preimage_with(&v, &phi, style)?;
            let input = json!({ "variety": v.to_json(), "isogeny": phi.alphas(), "style": format!("{:?}", args.style) });
            Ok((EXIT_OK, envelope("preimage", input, serde_json::to_value(pre.to_json()?)?)))
        }
        Command::Degree(t) => {
            let (v, phi) = load_pair(t)?;
            let table = preimage_multidegrees(&v.multidegrees, &phi)?;
            let total = preimage_degree(&v, &phi)?;
            let entries: Vec<Value> = table.entries().map(|(i, d)| json!({ "I": i, "deg": d })).collect();
            // The curve formula applies when phi acts on a single coordinate.
            let moved: Vec<usize> = (0..phi.arity()).filter(|&j| phi.alphas()[j].abs() != 1).collect();
            let via_curve = match (v.multidegrees.curve_degrees(), moved.as_slice()) {
                (Some(d), [j]) => Some(preimage_degree_curve(&d, *j, phi.alphas()[*j])?),
                _ => None,
            };
            let result = json!({
                "total_degree": total,
                "multidegrees": entries,
                "total_degree_via_curve_formula": via_curve,
            });
            let input = json!({ "variety": v.to_json(), "isogeny": phi.alphas() });
            Ok((EXIT_OK, envelope("degree", input, result)))
        }
        Command::Constants(args) => {
            let v = load_variety(&args.variety)?;
            let pc = product_constants(v.system.curves(), args.better);
            let per: Vec<Value> = v
                .system
                .curves()
                .iter()
                .zip(&pc.curves)
                .map(|(c, k)| {
                    json!({ "curve": c, "c1": interval(&k.c1), "c2": interval(&k.c2), "c3": interval(&k.c3) })
                })
                .collect();
            let result = json!({ "curves": per, "c1": interval(&pc.c1), "c2": interval(&pc.c2), "c3": interval(&pc.c3) });
            let input = json!({ "curves": v.system.curves(), "better": args.better });
            Ok((EXIT_OK, envelope("constants", input, result)))
        }
        Command::Bounds { bound } => bounds(bound),
        Command::Oracle(args) => {
            let (v, phi) = load_pair(&args.target)?;
            if phi.arity() != v.arity() {
                return Err(Failure(format!("isogeny has {} coordinates, variety {}", phi.arity(), v.arity())));
            }
            let ctx = PrimeFieldCtx::new(args.p, v.system.curves(), phi.alphas())?;
            let pre = generate_preimage_with(&v, &phi, SubstitutionStyle::Reduced)?;
            let maps = (0..v.arity())
                .map(|j| verify_maps_vs_group_law(&ctx, j, phi.alphas()[j]))
                .collect::<Result<Vec<_>, _>>()?;
            let policy = if args.sampled {
                ScanPolicy::Sampled {
                    samples: transverse::ff_oracle::SAMPLE_COUNT,
                    seed: transverse::ff_oracle::SAMPLE_SEED,
                }
            } else {
                ScanPolicy::Auto
            };
            let membership = verify_preimage_membership(&ctx, &pre, policy)?;
            let fibres = degree_spot_check(&ctx, &pre).ok();
            let passed = membership.passed && maps.iter().all(|m| m.passed);
            let result = json!({ "passed": passed, "maps": maps, "membership": membership, "fibres": fibres });
            let input = json!({ "variety": v.to_json(), "isogeny": phi.alphas(), "p": args.p, "sampled": args.sampled });
            Ok((if passed { EXIT_OK } else { EXIT_NEGATIVE }, envelope("oracle", input, result)))
        }
    }
}

fn bounds(bound: &Bound) -> Result<(i32, String), Failure> {
    let (name, input, result) = match bound {
        Bound::C0 { d1, d2, m } => {
            ("bounds c0", json!({ "d1": d1, "d2": d2, "m": m.to_string() }), json!({ "c0": interval(&c0(*d1, *d2, *m)) }))
        }
        Bound::Zhang { variety, h2, better } => {
            let v = load_variety(variety)?;
            let n = u32::try_from(v.arity()).map_err(|_| Failure("too many factors".into()))?;
            let pc = product_constants(v.system.curves(), *better);
            let b = zhang_special_bound(n, *h2, &pc.c3)?;
            (
                "bounds zhang",
                json!({ "curves": v.system.curves(), "h2": h2, "better": better }),
                json!({ "c3": interval(&pc.c3), "bound": interval(&b) }),
            )
        }
        Bound::Bezout { deg_pre, h2_pre, deg_b, h2_b, dim_b, n, deg_phi } => {
            let b = bezout_intersection_bounds(*deg_pre, *h2_pre, *deg_b, *h2_b, *dim_b, *n, *deg_phi)?;
            (
                "bounds bezout",
                json!({
                    "deg_pre": deg_pre.to_string(), "h2_pre": h2_pre, "deg_b": deg_b.to_string(), "h2_b": h2_b,
                    "dim_b": dim_b, "n": n, "deg_phi": deg_phi.to_string(),
                }),
                json!({ "c0": interval(&b.c0), "trivial": interval(&b.trivial), "improved": interval(&b.improved) }),
            )
        }
        Bound::Lambda { n, k } => {
            ("bounds lambda", json!({ "n": n, "k": k }), json!({ "lambda": galateau_lambda(*n, *k).to_string() }))
        }
        Bound::EssentialMinimum { n, r, d_l, alpha, deg_c, deg_pre, mode } => {
            let m = match mode {
                ModeArg::Smart => EssentialMinimumMode::Smart,
                ModeArg::Naive => EssentialMinimumMode::Naive,
            };
            let report = essential_minimum_image_bounds(*n, *r, *d_l, *alpha, *deg_c, *deg_pre, m)?;
            (
                "bounds essential-minimum",
                json!({
                    "n": n, "r": r, "d_l": d_l.to_string(), "alpha": alpha, "deg_c": deg_c.to_string(),
                    "deg_pre": deg_pre.map(|d| d.to_string()), "mode": m,
                }),
                serde_json::to_value(&report)?,
            )
        }
        Bound::WeilHeight { value } => {
            let q: Rational = value
                .trim()
                .parse()
                .map_err(|e| Failure(format!("cannot parse rational `{value}`: {e}")))?;
            ("bounds weil-height", json!({ "value": q.to_string() }), json!({ "height": interval(&weil_height_rational(&q)) }))
        }
    };
    Ok((EXIT_OK, envelope(name, input, result)))
}

/// Runs one parsed job.  Input errors give exit code 2 and a message on stderr.
pub fn run(cli: &Cli) -> Output {
    match execute(cli) {
        Ok((code, stdout)) => Output { code, stdout, stderr: String::new() },
        Err(Failure(msg)) => Output { code: EXIT_INPUT, stdout: String::new(), stderr: format!("error: {msg}\n") },
    }
}

/// Parses `args` (program name first) and runs the job.
pub fn run_args<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                Output { code, stdout: String::new(), stderr: text }
            } else {
                Output { code, stdout: text, stderr: String::new() }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schema_is_validated_before_execution() {
        let out = run_args(["transverse", "certify", "--isogeny", "[2,1]"]);
        assert_eq!(out.code, EXIT_INPUT);
        let out = run_args(["transverse", "bounds", "lambda", "--n", "2", "--k", "1"]);
        assert_eq!(out.code, EXIT_OK);
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["result"]["lambda"], "400");
        assert_eq!(v["schema_version"], SCHEMA_VERSION);
    }

    #[test]
    fn bad_isogeny_and_rational() {
        let out = run_args(["transverse", "bounds", "weil-height", "--value", "3/0"]);
        assert_eq!(out.code, EXIT_INPUT);
        let out = run_args(["transverse", "bounds", "weil-height", "--value", "-3/4"]);
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        assert!((v["result"]["height"]["upper"].as_f64().unwrap() - 4f64.ln()).abs() < 1e-12);
        let out = run_args(["transverse", "degree", "--variety", "/nonexistent.json", "--isogeny", "[2,1]"]);
        assert_eq!(out.code, EXIT_INPUT);
        assert!(out.stderr.contains("nonexistent"));
    }
}
