//! Argument model, dispatch and report rendering for the `gradinv` binary.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use gradinv::abgroup::FinAbGroup;
use gradinv::homog::classify::{classify_direct, classify_pauli, ClassificationReport, DEFAULT_N_CAP};
use gradinv::homog::{check_homogeneous_map, check_involution};
use gradinv::orbits::{
    canonical_label, conjugator_table, orbit_reduce, sweep, two_power_exponent,
    verify_odd_similarities,
};
use gradinv::realize::{involution_form_sign, realize_division_algebra, soundness_oracle};
use gradinv::secthree::{parse_datum, run_datum};
use gradinv::{Error, GroupMap, HomMapData, MapMode, ModMatrix2, RootOfUnity, SymplecticShape};

#[derive(Parser, Debug)]
#[command(name = "gradinv", version, about = "Homogeneous involutions on graded matrix algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Largest accepted modulus n.
    #[arg(long, default_value_t = DEFAULT_N_CAP, global = true)]
    pub n_cap: u64,

    /// Largest accepted group order |T|.
    #[arg(long, default_value_t = 4096, global = true)]
    pub group_cap: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Classify homogeneous involutions for the Pauli grading by Z_n^2.
    Classify {
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum, default_value_t = Method::Crt)]
        method: Method,
    },
    /// Reduce a 2x2 matrix with det -1, trace 0 to its canonical form, or
    /// sweep every such matrix when --matrix is absent.
    Orbit {
        #[arg(long)]
        n: u64,
        #[arg(long, allow_hyphen_values = true)]
        matrix: Option<String>,
    },
    /// Decide whether (tau, lambda) defines a homogeneous map.
    Check(CheckArgs),
    /// Build the Pauli matrices for Z_n^2 and check them against the cocycle.
    Realize {
        #[arg(long)]
        n: u64,
        /// Also run the soundness oracle over every (tau, lambda).
        #[arg(long)]
        oracle: bool,
        /// Check every k-th rejected oracle candidate.
        #[arg(long, default_value_t = 1)]
        stride: usize,
    },
    /// Validate an involution datum and build its involution.
    Sec3 {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Replay the conjugator table (n = 2^i) or the odd similarities (n odd).
    VerifyTables {
        #[arg(long)]
        n: u64,
    },
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    /// Group descriptor such as Z2^2 or Z4^2xZ2^2.
    #[arg(long)]
    pub group: String,
    /// Row-major entries; row j is the image of generator j.
    #[arg(long, allow_hyphen_values = true)]
    pub tau: String,
    /// One literal z<name>:<order>:<exp> per generator.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: String,
    #[arg(long, value_enum, default_value_t = Mode::Anti)]
    pub mode: Mode,
    /// Ambient root-of-unity order M; defaults to 2L^2.
    #[arg(long)]
    pub ambient: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Crt,
    Direct,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Anti,
    Auto,
}

/// A finished run: the JSON document, optional CSV rows and the verdict.
#[derive(Debug)]
pub struct Report {
    pub doc: Value,
    pub table: Option<(Vec<&'static str>, Vec<Vec<String>>)>,
    pub verdict: bool,
}

impl Report {
    fn new(command: &str, input: Value, result: Value, expected: Value, verdict: bool) -> Self {
        Report {
            doc: json!({
                "command": command,
                "input": input,
                "result": result,
                "expected": expected,
                "match": verdict,
            }),
            table: None,
            verdict,
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.verdict {
            0
        } else {
            1
        }
    }

    pub fn render(&self, format: Format) -> Result<String, Error> {
        match format {
            Format::Json => Ok(serde_json::to_string_pretty(&self.doc).expect("json value") + "\n"),
            Format::Csv => {
                let (header, rows) = self.table.as_ref().ok_or_else(|| {
                    Error::InvalidArgument("csv output is only available for classify".into())
                })?;
                let mut w = csv::Writer::from_writer(Vec::new());
                let io = |e: csv::Error| Error::InvalidArgument(e.to_string());
                w.write_record(header).map_err(io)?;
                for r in rows {
                    w.write_record(r).map_err(io)?;
                }
                let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(e.to_string()))?;
                Ok(String::from_utf8(bytes).expect("csv is utf-8"))
            }
            Format::Text => Ok(text(&self.doc)),
        }
    }
}

fn text(doc: &Value) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "command: {}", doc["command"].as_str().unwrap_or(""));
    let _ = writeln!(out, "input: {}", doc["input"]);
    if let Some(obj) = doc["result"].as_object() {
        for (k, v) in obj {
            let _ = writeln!(out, "{k}: {v}");
        }
    } else {
        let _ = writeln!(out, "result: {}", doc["result"]);
    }
    if !doc["expected"].is_null() {
        let _ = writeln!(out, "expected: {}", doc["expected"]);
    }
    let _ = writeln!(out, "match: {}", doc["match"]);
    out
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn check_n(n: u64, cap: u64) -> Result<(), Error> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("n must be at least 2, got {n}")));
    }
    if n > cap {
        return Err(Error::CapExceeded { value: n, cap });
    }
    Ok(())
}

pub fn parse_int_list(s: &str) -> Result<Vec<i64>, Error> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<i64>()
                .map_err(|_| Error::Parse(format!("not an integer: {x:?}")))
        })
        .collect()
}

/// Parses `z<name>:<order>:<exp>`; the name is a free label.
pub fn parse_root(lit: &str) -> Result<RootOfUnity, Error> {
    let bad = || Error::Parse(format!("root literal {lit:?}, expected z<name>:<order>:<exp>"));
    let body = lit.trim().strip_prefix('z').ok_or_else(bad)?;
    let mut parts = body.split(':');
    let (Some(name), Some(ord), Some(exp), None) =
        (parts.next(), parts.next(), parts.next(), parts.next())
    else {
        return Err(bad());
    };
    if !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(bad());
    }
    let ord: u64 = ord.parse().map_err(|_| bad())?;
    let exp: i64 = exp.parse().map_err(|_| bad())?;
    if ord == 0 {
        return Err(bad());
    }
    Ok(RootOfUnity::new(ord, exp))
}

pub fn run(cli: &Cli) -> Result<Report, Error> {
    match &cli.command {
        Command::Classify { n, method } => classify(*n, *method, cli.n_cap),
        Command::Orbit { n, matrix } => orbit(*n, matrix.as_deref(), cli.n_cap),
        Command::Check(args) => check(args, cli.group_cap),
        Command::Realize { n, oracle, stride } => realize(*n, *oracle, *stride, cli.n_cap),
        Command::Sec3 { spec } => sec3(spec),
        Command::VerifyTables { n } => verify_tables(*n, cli.n_cap),
    }
}

fn classify(n: u64, method: Method, cap: u64) -> Result<Report, Error> {
    check_n(n, cap)?;
    let rep: ClassificationReport = match method {
        Method::Crt => classify_pauli(n)?,
        Method::Direct => classify_direct(n)?,
    };
    let m = match method {
        Method::Crt => "crt",
        Method::Direct => "direct",
    };
    let mut out = Report::new(
        "classify",
        json!({"n": n, "method": m}),
        to_value(&rep),
        to_value(&rep.expected),
        rep.matches,
    );
    let rows = rep.csv_rows().into_iter().map(Vec::from).collect();
    out.table = Some((
        vec!["orbit", "lambda_a", "lambda_b", "iso_class", "equiv_class", "epsilon_b"],
        rows,
    ));
    Ok(out)
}

fn orbit(n: u64, matrix: Option<&str>, cap: u64) -> Result<Report, Error> {
    check_n(n, cap)?;
    let Some(matrix) = matrix else {
        let s = sweep(n);
        return Ok(Report::new(
            "orbit",
            json!({"n": n}),
            to_value(&s),
            json!({"forms": s.expected_forms}),
            s.ok(),
        ));
    };
    let e = parse_int_list(matrix)?;
    let e: [i64; 4] = e
        .try_into()
        .map_err(|_| Error::MalformedMatrix("expected four entries a,b,c,d".into()))?;
    let a = ModMatrix2::new(n, e);
    let (theta, p) = orbit_reduce(&a)?;
    let certified = p.det() == 1 % n && a.conjugate_by(&p) == Some(theta);
    Ok(Report::new(
        "orbit",
        json!({"n": n, "matrix": matrix}),
        json!({
            "canonical": canonical_label(&theta),
            "theta": theta,
            "witness": p,
            "certified": certified,
        }),
        Value::Null,
        certified,
    ))
}

fn check(args: &CheckArgs, group_cap: u64) -> Result<Report, Error> {
    let t = FinAbGroup::parse(&args.group)?;
    if t.size() > group_cap {
        return Err(Error::GroupTooLarge {
            size: t.size(),
            cap: group_cap,
        });
    }
    let mut shape = SymplecticShape::from_group(&t)?;
    if let Some(m) = args.ambient {
        shape = shape.with_ambient(m)?;
    }
    let tau = GroupMap::from_image_rows(&t, &parse_int_list(&args.tau)?)?;
    let lambda = args
        .lambda
        .split(',')
        .map(parse_root)
        .collect::<Result<Vec<_>, _>>()?;
    let mode = match args.mode {
        Mode::Anti => MapMode::Anti,
        Mode::Auto => MapMode::Auto,
    };
    let m = HomMapData::new(&shape, tau, lambda, mode)?;
    let homogeneous = check_homogeneous_map(&shape, &m);
    let mut result = json!({
        "group": t.descriptor(),
        "ambient": shape.ambient(),
        "tau": m.tau,
        "lambda": m.lambda,
        "homogeneous": homogeneous,
    });
    if homogeneous && mode == MapMode::Anti {
        let inv = check_involution(&shape, &m)?;
        result["involution"] = json!(inv);
        if inv {
            result["epsilon_b"] = json!(involution_form_sign(&shape, &m)?);
        }
    }
    Ok(Report::new(
        "check",
        json!({
            "group": args.group,
            "tau": args.tau,
            "lambda": args.lambda,
            "mode": m.mode,
        }),
        result,
        Value::Null,
        homogeneous,
    ))
}

fn realize(n: u64, oracle: bool, stride: usize, cap: u64) -> Result<Report, Error> {
    check_n(n, cap)?;
    if stride == 0 {
        return Err(Error::InvalidArgument("stride must be positive".into()));
    }
    let shape = SymplecticShape::pauli(n);
    let r = realize_division_algebra(&shape)?;
    let t = shape.group().clone();
    let basis: Vec<_> = t.elements().collect();
    let mut products_ok = true;
    for u in &basis {
        for v in &basis {
            let lhs = r.basis_matrix(u).mul(r.basis_matrix(v))?;
            let rhs = r
                .basis_matrix(&t.add(u, v))
                .scale(&r.scalar(shape.sigma(u, v))?)?;
            products_ok &= lhs == rhs;
        }
    }
    let mut result = json!({
        "algebra": to_value(&r),
        "products_match_cocycle": products_ok,
    });
    let mut verdict = products_ok;
    if oracle {
        let rep = soundness_oracle(n, stride)?;
        verdict &= rep.ok();
        result["oracle"] = to_value(&rep);
    }
    Ok(Report::new(
        "realize",
        json!({"n": n, "oracle": oracle, "stride": stride}),
        result,
        Value::Null,
        verdict,
    ))
}

fn sec3(spec: &std::path::Path) -> Result<Report, Error> {
    let src = std::fs::read_to_string(spec)
        .map_err(|e| Error::InvalidArgument(format!("{}: {e}", spec.display())))?;
    let dat = parse_datum(&src)?;
    let rep = run_datum(&dat)?;
    let ok = rep.ok(dat.kind);
    Ok(Report::new(
        "sec3",
        json!({"spec": spec.file_name().map(|f| f.to_string_lossy().into_owned())}),
        to_value(&rep),
        json!({"kind": dat.kind, "epsilon_b": dat.kind.sign()}),
        ok,
    ))
}

fn verify_tables(n: u64, cap: u64) -> Result<Report, Error> {
    check_n(n, cap)?;
    if let Some(i) = two_power_exponent(n) {
        let rows = conjugator_table(i);
        let ok = rows.iter().all(|r| r.ok());
        return Ok(Report::new(
            "verify-tables",
            json!({"n": n}),
            json!({"table": "two-power", "i": i, "rows": rows}),
            Value::Null,
            ok,
        ));
    }
    if n % 2 == 1 {
        let ok = verify_odd_similarities(n);
        return Ok(Report::new(
            "verify-tables",
            json!({"n": n}),
            json!({"table": "odd", "similarities_ok": ok}),
            Value::Null,
            ok,
        ));
    }
    Err(Error::InvalidArgument(format!(
        "no table for n = {n}; use an odd n or a power of two at least 4"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_literals() {
        assert_eq!(parse_root("za:4:1").unwrap(), RootOfUnity::new(4, 1));
        assert_eq!(parse_root("zb:8:-1").unwrap(), RootOfUnity::new(8, 7));
        for bad in ["a:4:1", "za:0:1", "za:4", "za:4:1:2", "z-a:4:1", "za:x:1"] {
            assert!(parse_root(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn integer_lists() {
        assert_eq!(parse_int_list("1, -2,3").unwrap(), vec![1, -2, 3]);
        assert!(parse_int_list("1,,2").is_err());
    }

    #[test]
    fn csv_only_for_tables() {
        let cli = Cli::parse_from(["gradinv", "orbit", "--n", "4", "--matrix", "1,2,2,-1"]);
        let rep = run(&cli).unwrap();
        assert!(rep.render(Format::Csv).is_err());
        assert!(rep.render(Format::Text).unwrap().contains("theta3"));
    }
}
