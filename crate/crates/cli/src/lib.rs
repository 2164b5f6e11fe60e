//! Library half of the `homotower` binary, so the commands can be driven
//! from tests without spawning a process.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use homotower_core::exactlinalg::is_prime;
use homotower_core::fixtures::{self, FIXTURE_NAMES};
use homotower_core::tower::{self, Caps, LevelCertificate, TowerError, TowerReport};
use homotower_core::{abelian_invariants, parse_presentation, print_presentation, Presentation};

pub const SCHEMA_VERSION: u64 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

/// What the certificate does not cover. Printed with every `verify-cd` run.
pub const SCOPE_EXCLUDED: [&str; 3] = [
    "geometric claims about the quotient manifolds (growth of injectivity radius, hyperbolic structure)",
    "identification of the iterated p-descent tower with the arithmetic congruence tower beyond level 1",
    "levels deeper than the requested depth",
];

#[derive(Debug, Parser)]
#[command(name = "homotower", version, about = "p-descent towers and homology certificates for finitely presented groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Abelian invariants and the elementary abelian p-quotient rank.
    Abelianize,
    /// Kernel of the maximal elementary abelian p-quotient, with certificate.
    Kernel,
    /// Iterated descent with one certificate per level.
    Tower,
    /// Check the rank-3 and Betti-zero claims on the builtin gamma1 fixture.
    VerifyCd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Options {
    /// Presentation file in the `< gens | rels >` grammar.
    #[arg(long, global = true, conflicts_with = "fixture")]
    pub input: Option<PathBuf>,
    /// Builtin presentation: gamma1 or gamma2.
    #[arg(long, global = true)]
    pub fixture: Option<String>,
    #[arg(long, global = true, default_value_t = 3)]
    pub prime: u32,
    /// Number of descent steps (tower and verify-cd).
    #[arg(long, global = true, default_value_t = 2)]
    pub depth: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = Caps::default().coset_cap)]
    pub coset_cap: usize,
    #[arg(long, global = true, default_value_t = Caps::default().gen_cap)]
    pub gen_cap: usize,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("resource cap reached: {0}")]
    Resource(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Resource(_) => EXIT_RESOURCE,
            CliError::Verification(_) => EXIT_VERIFICATION,
        }
    }
}

impl From<TowerError> for CliError {
    fn from(e: TowerError) -> Self {
        if e.is_resource() {
            CliError::Resource(e.to_string())
        } else if matches!(e, TowerError::TheoremContradiction { .. }) {
            CliError::Verification(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parse `args` (including the program name) and run the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let (stdout, stderr) = if e.use_stderr() { (String::new(), text) } else { (text, String::new()) };
            return Outcome { code, stdout, stderr };
        }
    };
    run_cli(&cli)
}

pub fn run_cli(cli: &Cli) -> Outcome {
    let mut stderr = String::new();
    let result = execute(cli, &mut stderr).and_then(|(code, body)| {
        match &cli.opts.out {
            Some(path) => std::fs::write(path, &body)
                .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
                .map(|_| (code, String::new())),
            None => Ok((code, body)),
        }
    });
    match result {
        Ok((code, stdout)) => Outcome { code, stdout, stderr },
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            Outcome {
                code: e.exit_code(),
                stdout: String::new(),
                stderr,
            }
        }
    }
}

fn execute(cli: &Cli, stderr: &mut String) -> Result<(i32, String), CliError> {
    let o = &cli.opts;
    if o.prime == 2 || !is_prime(o.prime as u64) {
        return Err(CliError::Input(format!("--prime {} is not an odd prime", o.prime)));
    }
    if o.depth == 0 {
        return Err(CliError::Input("--depth must be at least 1".into()));
    }
    if o.coset_cap == 0 || o.gen_cap == 0 {
        return Err(CliError::Input("caps must be positive".into()));
    }
    let caps = Caps {
        coset_cap: o.coset_cap,
        gen_cap: o.gen_cap,
        ..Caps::default()
    };
    match cli.command {
        Command::Abelianize => abelianize(&load_input(o)?, o),
        Command::Kernel => kernel(&load_input(o)?, o, &caps),
        Command::Tower => tower_cmd(&load_input(o)?, o, &caps, stderr),
        Command::VerifyCd => verify_cd(o, &caps, stderr),
    }
}

fn load_input(o: &Options) -> Result<Presentation, CliError> {
    match (&o.input, &o.fixture) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
            parse_presentation(&text).map_err(|e| CliError::Input(format!("{}:{e}", path.display())))
        }
        (None, Some(name)) => fixtures::fixture(name).ok_or_else(|| {
            CliError::Input(format!("unknown fixture {name:?}; available: {}", FIXTURE_NAMES.join(", ")))
        }),
        (None, None) => Err(CliError::Input("one of --input or --fixture is required".into())),
    }
}

fn render_json(mut v: Value) -> String {
    if let Value::Object(m) = &mut v {
        m.insert("schema".into(), json!(SCHEMA_VERSION));
    }
    // serde_json maps are BTreeMaps here, so keys come out sorted.
    let mut s = serde_json::to_string_pretty(&v).expect("values serialize");
    s.push('\n');
    s
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn abelianize(pres: &Presentation, o: &Options) -> Result<(i32, String), CliError> {
    let inv = abelian_invariants(pres);
    let rank = homotower_core::abelian::h1_fp_rank(pres, o.prime).map_err(|e| CliError::Input(e.to_string()))?;
    let torsion: Vec<String> = inv.torsion.iter().map(|t| t.to_string()).collect();
    let body = match o.format {
        Format::Json => render_json(json!({
            "command": "abelianize",
            "fingerprint": pres.fingerprint(),
            "ngens": pres.ngens(),
            "nrelators": pres.relators().len(),
            "betti": inv.betti,
            "torsion": torsion.iter().map(|t| t.parse::<u64>().map_or_else(|_| json!(t), |n| json!(n))).collect::<Vec<_>>(),
            "p": o.prime,
            "elementary_quotient_rank": rank,
        })),
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "generators: {}", pres.ngens());
            let _ = writeln!(s, "relators: {}", pres.relators().len());
            let _ = writeln!(s, "betti: {}", inv.betti);
            let _ = writeln!(s, "torsion: [{}]", torsion.join(", "));
            let _ = writeln!(s, "elementary {}-quotient rank: {rank}", o.prime);
            s
        }
    };
    Ok((EXIT_OK, body))
}

fn kernel(pres: &Presentation, o: &Options, caps: &Caps) -> Result<(i32, String), CliError> {
    let d = tower::descend_once(pres, o.prime, caps)?;
    let fp = print_presentation(&d.kernel);
    let body = match o.format {
        Format::Json => render_json(json!({
            "command": "kernel",
            "p": o.prime,
            "parent_fingerprint": pres.fingerprint(),
            "kernel": fp,
            "certificate": to_value(&d.cert),
        })),
        Format::Text => {
            let mut s = fp;
            s.push_str("\n\n");
            s.push_str(&certificate_text(&d.cert));
            s
        }
    };
    Ok((EXIT_OK, body))
}

fn tower_cmd(pres: &Presentation, o: &Options, caps: &Caps, stderr: &mut String) -> Result<(i32, String), CliError> {
    let report = tower::descend(pres, o.prime, o.depth, caps)?;
    if let Some(why) = &report.truncated {
        let _ = writeln!(stderr, "warning: report truncated ({why})");
    }
    let body = match o.format {
        Format::Json => {
            let mut v = to_value(&report);
            v["command"] = json!("tower");
            render_json(v)
        }
        Format::Text => tower_text(&report),
    };
    Ok((EXIT_OK, body))
}

fn certificate_text(c: &LevelCertificate) -> String {
    let method = match c.betti_method {
        homotower_core::abelian::BettiMethod::ModQ { q } => format!("full rank mod {q}"),
        homotower_core::abelian::BettiMethod::Snf => "Smith normal form".to_string(),
    };
    let expp = match (c.expp_elementary, c.expp_rank) {
        (true, Some(r)) if c.expp_unconditional => format!("elementary abelian of rank {r}"),
        (true, Some(r)) => format!("class-2-elementary of rank {r} (no nilpotency guarantee for this p)"),
        _ => format!("not elementary abelian (class-2 dimension {})", c.baer.dim_total),
    };
    let mut s = String::new();
    let _ = writeln!(s, "level {}", c.level);
    let _ = writeln!(s, "  index in parent: {}", c.index_in_parent);
    let _ = writeln!(s, "  index in root: {}", c.index_in_root);
    let _ = writeln!(s, "  generators/relators (raw): {}/{}", c.ngens_raw, c.nrelators_raw);
    let _ = writeln!(s, "  generators/relators (simplified): {}/{}", c.ngens, c.nrelators);
    let _ = writeln!(s, "  dim H^1(F_{}): {}", c.baer.p, c.h1_fp_rank);
    let _ = writeln!(s, "  betti: {} ({method})", c.betti);
    let _ = writeln!(s, "  G/G^{}: {expp}", c.baer.p);
    let _ = writeln!(s, "  fingerprint: {}", c.fingerprint);
    s
}

fn tower_text(r: &TowerReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "p = {}", r.p);
    let _ = writeln!(s, "root fingerprint: {}", r.root_fingerprint);
    let _ = writeln!(s, "root has rank-3 elementary G/G^p: {}", r.prop1_hypothesis);
    if let Some(a) = r.prop1_anchor_level {
        let _ = writeln!(s, "first rank-3 level: {a}");
    }
    s.push_str(&certificate_text(&r.root));
    for c in &r.levels {
        s.push_str(&certificate_text(c));
    }
    if let Some(t) = &r.truncated {
        let _ = writeln!(s, "truncated: {t}");
    }
    s
}

/// One named assertion inside a verification certificate.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub observed: String,
    pub pass: bool,
}

fn check(name: impl Into<String>, expected: impl ToString, observed: impl ToString) -> Check {
    let (expected, observed) = (expected.to_string(), observed.to_string());
    Check {
        name: name.into(),
        pass: expected == observed,
        expected,
        observed,
    }
}

/// The assertions `verify-cd` makes on a p = 3 report.
pub fn cd_checks(r: &TowerReport) -> Vec<Check> {
    let mut out = vec![check("level0_elementary_quotient_rank", 2, r.root.h1_fp_rank)];
    match r.levels.first() {
        Some(l1) => {
            out.push(check("level1_index", 9, l1.index_in_parent));
            out.push(check("level1_raw_generators", 28, l1.ngens_raw));
            out.push(check("level1_raw_relators", 54, l1.nrelators_raw));
            out.push(check("level1_h1_f3_rank", 3, l1.h1_fp_rank));
            out.push(check(
                "level1_exponent3_quotient",
                "elementary abelian of rank 3",
                match l1.expp_rank {
                    Some(k) if l1.expp_elementary && l1.expp_unconditional => format!("elementary abelian of rank {k}"),
                    _ => format!("not elementary (class-2 dimension {})", l1.baer.dim_total),
                },
            ));
        }
        None => out.push(check("level1_present", true, false)),
    }
    out.push(check("level0_betti", 0, r.root.betti));
    for l in &r.levels {
        out.push(check(format!("level{}_betti", l.level), 0, l.betti));
    }
    out
}

fn verify_cd(o: &Options, caps: &Caps, stderr: &mut String) -> Result<(i32, String), CliError> {
    if o.input.is_some() || o.fixture.as_deref().is_some_and(|f| f != "gamma1") {
        return Err(CliError::Input("verify-cd always runs on the builtin gamma1 fixture".into()));
    }
    if o.depth > caps.max_depth {
        // A truncated run could not certify the requested depth anyway.
        return Err(CliError::Resource(format!("depth {} exceeds the depth cap {}", o.depth, caps.max_depth)));
    }
    let report = tower::descend(&fixtures::gamma1(), o.prime, o.depth, caps)?;
    if let Some(t) = &report.truncated {
        return Err(CliError::Resource(t.clone()));
    }
    let exploratory = o.prime != 3;
    let checks = if exploratory { Vec::new() } else { cd_checks(&report) };
    let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
    let verdict = if exploratory {
        "exploratory"
    } else if failed.is_empty() {
        "verified"
    } else {
        "failed"
    };
    let claim = (!exploratory && failed.is_empty()).then(|| {
        format!(
            "the kernel of gamma1 onto its maximal elementary abelian 3-quotient has index 9 and mod-3 quotient (Z/3)^3; \
             every computed level down to depth {} has first Betti number 0",
            o.depth
        )
    });
    let body = json!({
        "command": "verify-cd",
        "p": o.prime,
        "depth": o.depth,
        "verdict": verdict,
        "claim": claim,
        "checks": to_value(&checks),
        "report": to_value(&report),
        "scope": {
            "established": [
                "index and generator/relator counts of the level-1 kernel",
                "dim H^1 over F_3 and elementary abelian exponent-3 quotient of the level-1 kernel",
                "first Betti number 0 at every computed level"
            ],
            "excluded": SCOPE_EXCLUDED,
        },
    });
    let digest = certificate_digest(&body);
    let mut signed = body;
    signed["digest"] = json!({ "algorithm": "sha256", "value": digest });
    let out = match o.format {
        Format::Json => render_json(signed),
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "verdict: {verdict}");
            for c in &checks {
                let mark = if c.pass { "PASS" } else { "FAIL" };
                let _ = writeln!(s, "{mark} {}: expected {}, observed {}", c.name, c.expected, c.observed);
            }
            if exploratory {
                let _ = writeln!(s, "p = {} is exploratory; no claim is made", o.prime);
            }
            if let Some(c) = &claim {
                let _ = writeln!(s, "claim: {c}");
            }
            s.push_str(&tower_text(&report));
            let _ = writeln!(s, "not covered:");
            for e in SCOPE_EXCLUDED {
                let _ = writeln!(s, "  - {e}");
            }
            let _ = writeln!(s, "sha256: {digest}");
            s
        }
    };
    if failed.is_empty() {
        Ok((EXIT_OK, out))
    } else {
        let _ = writeln!(stderr, "error: {}", CliError::Verification(format!("failing checks: {}", failed.join(", "))));
        Ok((EXIT_VERIFICATION, out))
    }
}

/// SHA-256 over the compact, key-sorted JSON of a certificate body.
pub fn certificate_digest(body: &Value) -> String {
    let canonical = serde_json::to_string(body).expect("values serialize");
    hex::encode(Sha256::digest(canonical.as_bytes()))
}
