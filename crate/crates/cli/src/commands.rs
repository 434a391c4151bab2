use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use farkas_core::closedness::{check_family, ConvergentFamily};
use farkas_core::cone::{
    self, Branch, Certificate, ConeInstance, MembershipCertificate, SeparationCertificate, Verdict,
};
use farkas_core::decomposition::{self, Minimality, Mode, DEFAULT_NMAX};
use farkas_core::instances::{
    generate_with_witness, lncone_nonclosedness_demo, read_instance, write_instance, BranchSpec,
    CertificateSection, GenSpec, InstanceFile, Witness,
};
use farkas_core::linalg::{self, Vector};
use farkas_core::oracle::{self, MAX_EXACT_DECIDE};
use farkas_core::rng::SplitMix64;
use rayon::prelude::*;

use crate::output::{cell, document, indices, num, nums, section_only, Outcome, Status, Table};
use crate::{read_source, BranchArg, CliError, Command, Common, ModeArg};

pub(crate) fn dispatch(common: &Common, command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::Decide { files, exact_check } => Ok(cmd_decide(common, files, *exact_check)),
        Command::Project { file } => cmd_project(common, file),
        Command::Reduce { file, x } => cmd_reduce(common, file, x.as_deref()),
        Command::Optimal { file, x, mode, nmax } => cmd_optimal(common, file, x.as_deref(), *mode, *nmax),
        Command::Verify { file } => cmd_verify(common, file),
        Command::Gen { m, n, branch, lo, hi } => cmd_gen(common, *m, *n, *branch, *lo, *hi),
        Command::Cbound { file, nmax, samples } => cmd_cbound(common, file, *nmax, *samples),
        Command::DemoLncone { kmax } => Ok(cmd_demo_lncone(*kmax)),
        Command::Closedness { count, terms, max_m, max_n, verify_tol } => {
            cmd_closedness(common, *count, *terms, *max_m, *max_n, *verify_tol)
        }
    }
}

fn load(path: &Path) -> Result<(InstanceFile, ConeInstance<f64>), CliError> {
    let label = path.display().to_string();
    let text = read_source(path)?;
    let file = read_instance(&text).map_err(|e| CliError::Input { path: label.clone(), message: e.to_string() })?;
    let inst = file
        .to_instance::<f64>()
        .map_err(|e| CliError::Input { path: label, message: e.to_string() })?;
    Ok((file, inst))
}

fn tol_for(common: &Common, inst: &ConeInstance<f64>) -> f64 {
    common.tol.unwrap_or_else(|| inst.default_tol())
}

fn parse_values(tokens: &[String]) -> Result<Vec<f64>, String> {
    tokens
        .iter()
        .map(|t| {
            t.parse::<f64>()
                .ok()
                .or_else(|| oracle::parse_rational(t).map(|q| oracle::to_f64(&q)))
                .filter(|x| x.is_finite())
                .ok_or_else(|| format!("invalid number '{t}'"))
        })
        .collect()
}

fn parse_vector(tokens: &[String], len: usize, what: &str) -> Result<Vector<f64>, CliError> {
    let values = parse_values(tokens).map_err(CliError::Argument)?;
    if values.len() != len {
        return Err(CliError::Argument(format!("{what} has {} entries, expected {len}", values.len())));
    }
    Vector::new(values).map_err(|e| CliError::Argument(e.to_string()))
}

fn verdict_values(v: &Verdict) -> Vec<String> {
    match v {
        Verdict::Accepted => vec!["accepted".into()],
        Verdict::Rejected(r) => vec!["rejected".into(), r.to_string()],
    }
}

fn verdict_cell(v: &Verdict) -> String {
    verdict_values(v).join(" ")
}

/// Result of cross-checking a decision against the exact oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExactCheck {
    NotRequested,
    /// Instance too large for the oracle.
    Skipped,
    Agrees(bool),
}

impl ExactCheck {
    fn label(self) -> &'static str {
        match self {
            ExactCheck::NotRequested => "off",
            ExactCheck::Skipped => "skipped",
            ExactCheck::Agrees(true) => "agrees",
            ExactCheck::Agrees(false) => "disagrees",
        }
    }
}

/// One decided instance.
#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub id: String,
    pub branch: Branch,
    pub delta: f64,
    pub tol: f64,
    pub certificate: Certificate<f64>,
    pub verdict: Verdict,
    pub borderline: bool,
    pub exact: ExactCheck,
    pub elapsed: Duration,
}

impl RunReport {
    /// Follows the verified certificate: a rejected certificate or an
    /// oracle disagreement is an error whatever branch the solver took.
    pub fn status(&self) -> Status {
        if !self.verdict.is_accepted() || self.exact == ExactCheck::Agrees(false) {
            return Status::Error;
        }
        match self.branch {
            Branch::Membership => Status::Ok,
            Branch::Separation => Status::Negative,
        }
    }

    fn section(&self) -> CertificateSection {
        let mut s = CertificateSection::new(self.branch.to_string());
        match &self.certificate {
            Certificate::Membership(c) => {
                s.push("x", nums(&c.x));
                s.push("residual", vec![num(c.residual)]);
            }
            Certificate::Separation(c) => {
                s.push("y", nums(&c.y));
                s.push("margins", nums(&c.margins));
                s.push("bmargin", vec![num(c.bmargin)]);
            }
        }
        s.push("delta", vec![num(self.delta)]);
        s.push("tol", vec![num(self.tol)]);
        s.push("borderline", vec![self.borderline.to_string()]);
        s.push("verified", verdict_values(&self.verdict));
        s.push("exact", vec![self.exact.label().into()]);
        s
    }

    fn certificate_cell(&self) -> String {
        match &self.certificate {
            Certificate::Membership(c) => cell(&c.x),
            Certificate::Separation(c) => cell(&c.y),
        }
    }
}

/// Decides one parsed instance; `tol` overrides the instance default.
pub fn decide_instance(
    id: &str,
    file: &InstanceFile,
    tol: Option<f64>,
    exact_check: bool,
) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let input_err = |message: String| CliError::Input { path: id.to_string(), message };
    let inst = file.to_instance::<f64>().map_err(|e| input_err(e.to_string()))?;
    let tol = tol.unwrap_or_else(|| inst.default_tol());
    let result = cone::farkas_decide(&inst, tol).map_err(|e| input_err(e.to_string()))?;
    let verdict = cone::verify_result(&inst, &result, tol);
    let exact = if !exact_check {
        ExactCheck::NotRequested
    } else if inst.rows() > MAX_EXACT_DECIDE || inst.cols() > MAX_EXACT_DECIDE {
        ExactCheck::Skipped
    } else {
        let exact = file.to_exact().map_err(|e| input_err(e.to_string()))?;
        let cert = oracle::exact_farkas_decide(&exact).map_err(|e| input_err(e.to_string()))?;
        ExactCheck::Agrees(cert.is_membership() == (result.branch() == Branch::Membership))
    };
    Ok(RunReport {
        id: id.to_string(),
        branch: result.branch(),
        delta: result.projection.distance,
        tol,
        certificate: result.certificate,
        verdict,
        borderline: result.borderline,
        exact,
        elapsed: start.elapsed(),
    })
}

type Decided = Result<(InstanceFile, RunReport), CliError>;

fn cmd_decide(common: &Common, files: &[PathBuf], exact_check: bool) -> Outcome {
    let results: Vec<(String, Decided)> = files
        .par_iter()
        .map(|path| {
            let id = path.display().to_string();
            let run = read_source(path).and_then(|text| {
                let file = read_instance(&text)
                    .map_err(|e| CliError::Input { path: id.clone(), message: e.to_string() })?;
                let report = decide_instance(&id, &file, common.tol, exact_check)?;
                Ok((file, report))
            });
            (id, run)
        })
        .collect();

    let mut text = String::new();
    let mut table = Table::new(&["id", "branch", "delta", "borderline", "verified", "exact", "certificate"]);
    let mut status = Status::Ok;
    let multi = files.len() > 1;
    for (id, run) in results {
        if multi {
            text.push_str(&format!("# {id}\n"));
        }
        match run {
            Ok((file, report)) => {
                if common.timing {
                    eprintln!("{id}: {} in {:.3} ms", report.branch, report.elapsed.as_secs_f64() * 1e3);
                }
                if !report.verdict.is_accepted() {
                    eprintln!("{id}: certificate failed verification: {}", verdict_cell(&report.verdict));
                }
                if report.exact == ExactCheck::Agrees(false) {
                    eprintln!("{id}: exact oracle disagrees with the {} branch", report.branch);
                }
                status = status.max(report.status());
                text.push_str(&document(&file, report.section()));
                table.push(vec![
                    id,
                    report.branch.to_string(),
                    num(report.delta),
                    report.borderline.to_string(),
                    verdict_cell(&report.verdict),
                    report.exact.label().into(),
                    report.certificate_cell(),
                ]);
            }
            Err(e) => {
                eprintln!("error: {e}");
                status = Status::Error;
                text.push_str(&format!("# error: {e}\n"));
                table.push(vec![id, "error".into(), String::new(), String::new(), String::new(), String::new(), String::new()]);
            }
        }
        if multi {
            text.push('\n');
        }
    }
    Outcome { text, table, status }
}

fn cmd_project(common: &Common, path: &Path) -> Result<Outcome, CliError> {
    let (file, inst) = load(path)?;
    let tol = tol_for(common, &inst);
    let p = cone::project_onto_cone(&inst, tol).map_err(|e| CliError::Failed(e.to_string()))?;
    let kkt = p.kkt_residual(&inst);
    let mut s = CertificateSection::new("projection");
    s.push("x", nums(&p.coeffs));
    s.push("v", nums(&p.point));
    s.push("delta", vec![num(p.distance)]);
    s.push("kkt", vec![num(kkt)]);
    s.push("iterations", vec![p.iterations.to_string()]);
    let mut table = Table::new(&["x", "v", "delta", "kkt", "iterations"]);
    table.push(vec![cell(&p.coeffs), cell(&p.point), num(p.distance), num(kkt), p.iterations.to_string()]);
    Ok(Outcome { text: document(&file, s), table, status: Status::Ok })
}

/// `--x`, else the file's `x` field, else the projection coefficients.
fn coefficients(
    common: &Common,
    file: &InstanceFile,
    inst: &ConeInstance<f64>,
    flag: Option<&str>,
) -> Result<Vector<f64>, CliError> {
    if let Some(raw) = flag {
        let tokens: Vec<String> = raw
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(str::to_string)
            .collect();
        return parse_vector(&tokens, inst.cols(), "--x");
    }
    if let Some(x) = file.certificate.as_ref().and_then(|c| c.get("x")) {
        return parse_vector(x, inst.cols(), "x");
    }
    let p = cone::project_onto_cone(inst, tol_for(common, inst)).map_err(|e| CliError::Failed(e.to_string()))?;
    Ok(p.coeffs)
}

fn cmd_reduce(common: &Common, path: &Path, x: Option<&str>) -> Result<Outcome, CliError> {
    let (file, inst) = load(path)?;
    let tol = tol_for(common, &inst);
    let x = coefficients(common, &file, &inst, x)?;
    let w = decomposition::reduce_to_independent_support(inst.a(), &x, tol)
        .map_err(|e| CliError::Failed(e.to_string()))?;
    let drift = inst.a().mul_vec(&w.z).sub(&inst.a().mul_vec(&x)).norm();
    let rank = linalg::rank(inst.a(), tol);
    let minimality = match w.minimality {
        Minimality::Global => "global",
        Minimality::IndependentColumns => "independent",
    };
    let mut s = CertificateSection::new("reduction");
    s.push("x", nums(&x));
    s.push("z", nums(&w.z));
    s.push("support", indices(w.support.indices()));
    s.push("size", vec![w.support.len().to_string()]);
    s.push("rank", vec![rank.to_string()]);
    s.push("minimality", vec![minimality.into()]);
    s.push("drift", vec![num(drift)]);
    let mut table = Table::new(&["z", "support", "size", "rank", "minimality", "drift"]);
    table.push(vec![
        cell(&w.z),
        indices(w.support.indices()).join(","),
        w.support.len().to_string(),
        rank.to_string(),
        minimality.into(),
        num(drift),
    ]);
    Ok(Outcome { text: document(&file, s), table, status: Status::Ok })
}

fn cmd_optimal(
    common: &Common,
    path: &Path,
    x: Option<&str>,
    mode: ModeArg,
    nmax: usize,
) -> Result<Outcome, CliError> {
    let (file, inst) = load(path)?;
    let tol = tol_for(common, &inst);
    let x = coefficients(common, &file, &inst, x)?;
    let mode = match mode {
        ModeArg::Exact => {
            if inst.cols() > nmax {
                return Err(CliError::Argument(format!(
                    "exact mode needs n ≤ {nmax}, instance has n = {}",
                    inst.cols()
                )));
            }
            Mode::Exact
        }
        ModeArg::Heuristic => Mode::Heuristic,
    };
    let d = decomposition::optimalize(inst.a(), &x, mode, tol).map_err(|e| CliError::Failed(e.to_string()))?;
    let au_norm = inst.a().mul_vec(&d.u).norm();
    let drift = d.point(inst.a()).sub(&inst.a().mul_vec(&x)).norm();
    let mut s = CertificateSection::new("optimal");
    s.push("lambda", vec![num(d.lambda)]);
    s.push("u", nums(&d.u));
    s.push("support", indices(d.support.indices()));
    s.push("au_norm", vec![num(au_norm)]);
    s.push("drift", vec![num(drift)]);
    let mut table = Table::new(&["lambda", "u", "support", "au_norm", "drift"]);
    table.push(vec![
        num(d.lambda),
        cell(&d.u),
        indices(d.support.indices()).join(","),
        num(au_norm),
        num(drift),
    ]);
    Ok(Outcome { text: document(&file, s), table, status: Status::Ok })
}

fn cmd_verify(common: &Common, path: &Path) -> Result<Outcome, CliError> {
    let (file, inst) = load(path)?;
    let label = path.display().to_string();
    let tol = tol_for(common, &inst);
    let section = file.certificate.as_ref().ok_or_else(|| CliError::Input {
        path: label.clone(),
        message: "no certificate section".into(),
    })?;
    let missing = |key: &str| CliError::Input { path: label.clone(), message: format!("certificate has no '{key}' field") };
    let verdict = match section.kind.as_str() {
        "membership" => {
            let x = parse_vector(section.get("x").ok_or_else(|| missing("x"))?, inst.cols(), "x")?;
            let residual = inst.a().mul_vec(&x).sub(inst.b()).norm();
            cone::verify_membership(&inst, &MembershipCertificate { x, residual }, tol)
        }
        "separation" => {
            let y = parse_vector(section.get("y").ok_or_else(|| missing("y"))?, inst.rows(), "y")?;
            cone::verify_separation(&inst, &SeparationCertificate::for_vector(&inst, y), tol)
        }
        other => {
            return Err(CliError::Input { path: label, message: format!("unknown certificate kind '{other}'") });
        }
    };
    let mut s = section.clone();
    s.push("tol", vec![num(tol)]);
    s.push("verified", verdict_values(&verdict));
    let mut table = Table::new(&["kind", "tol", "verified"]);
    table.push(vec![section.kind.clone(), num(tol), verdict_cell(&verdict)]);
    let status = if verdict.is_accepted() { Status::Ok } else { Status::Negative };
    Ok(Outcome { text: document(&file, s), table, status })
}

fn cmd_gen(common: &Common, m: usize, n: usize, branch: BranchArg, lo: f64, hi: f64) -> Result<Outcome, CliError> {
    let branch = match branch {
        BranchArg::Membership => BranchSpec::ForceMembership,
        BranchArg::Separation => BranchSpec::ForceSeparation,
        BranchArg::Random => BranchSpec::Random,
    };
    let spec = GenSpec { m, n, branch, lo, hi, seed: common.seed };
    let g = generate_with_witness(&spec).map_err(|e| CliError::Failed(e.to_string()))?;
    let mut file = InstanceFile::from_instance(&g.instance);
    let witness = match &g.witness {
        Some(Witness::Membership(x)) => Some(("membership", "x", x)),
        Some(Witness::Separation(y)) => Some(("separation", "y", y)),
        None => None,
    };
    if let Some((kind, key, v)) = witness {
        let mut s = CertificateSection::new(kind);
        s.push(key, nums(v));
        file.certificate = Some(s);
    }
    let a: Vec<String> = file.a.iter().map(ToString::to_string).collect();
    let b: Vec<String> = file.b.iter().map(ToString::to_string).collect();
    let mut table = Table::new(&["m", "n", "seed", "a", "b", "witness"]);
    table.push(vec![
        m.to_string(),
        n.to_string(),
        common.seed.to_string(),
        a.join(","),
        b.join(","),
        witness.map(|(_, _, v)| cell(v)).unwrap_or_default(),
    ]);
    Ok(Outcome { text: write_instance(&file), table, status: Status::Ok })
}

fn cmd_cbound(common: &Common, path: &Path, nmax: usize, samples: usize) -> Result<Outcome, CliError> {
    let (file, inst) = load(path)?;
    let tol = common.tol.unwrap_or_else(|| 1e-9 * (1.0 + inst.a().max_abs()));
    let bound = decomposition::c_lower_bound(inst.a(), nmax, tol).map_err(|e| CliError::Failed(e.to_string()))?;
    let mut s = CertificateSection::new("cbound");
    s.push("lower_bound", vec![num(bound)]);
    let mut table = Table::new(&["lower_bound", "sample_estimate"]);
    let estimate = if samples > 0 {
        let e = decomposition::c_sample_estimate(inst.a(), samples, common.seed);
        s.push("sample_estimate", vec![num(e)]);
        s.push("samples", vec![samples.to_string()]);
        num(e)
    } else {
        String::new()
    };
    table.push(vec![num(bound), estimate]);
    Ok(Outcome { text: document(&file, s), table, status: Status::Ok })
}

fn cmd_demo_lncone(kmax: usize) -> Outcome {
    let report = lncone_nonclosedness_demo::<f64>(kmax);
    let mut s = CertificateSection::new("lncone");
    s.push("kmax", vec![kmax.to_string()]);
    let mut table = Table::new(&["k", "p0", "p1", "member", "lambda", "x", "y", "verified"]);
    for row in report.rows.iter().chain(std::iter::once(&report.limit)) {
        let k = row.k.map_or_else(|| "limit".to_string(), |k| k.to_string());
        let (lambda, x, y) = match row.membership.witness {
            Some(w) => (num(w.lambda), num(w.x), num(w.y)),
            None => ("-".into(), "-".into(), "-".into()),
        };
        let values = vec![
            k,
            num(row.point.p[0]),
            num(row.point.p[1]),
            row.membership.member.to_string(),
            lambda,
            x,
            y,
            row.witness_verified.to_string(),
        ];
        s.push("row", values.clone());
        table.push(values);
    }
    let holds = report.exhibits_nonclosedness();
    s.push("nonclosed", vec![holds.to_string()]);
    let status = if holds { Status::Ok } else { Status::Negative };
    Outcome { text: section_only(&s), table, status }
}

fn cmd_closedness(
    common: &Common,
    count: usize,
    terms: usize,
    max_m: usize,
    max_n: usize,
    verify_tol: f64,
) -> Result<Outcome, CliError> {
    if terms == 0 || max_m == 0 || max_n == 0 {
        return Err(CliError::Argument("--terms, --max-m and --max-n must be positive".into()));
    }
    if !(verify_tol.is_finite() && verify_tol > 0.0) {
        return Err(CliError::Argument("--verify-tol must be positive and finite".into()));
    }
    let tol = common.tol.unwrap_or(1e-9);
    let mut rng = SplitMix64::new(common.seed);
    let families: Vec<ConvergentFamily<f64>> = (0..count)
        .map(|_| {
            let m = 1 + rng.below(max_m);
            let n = 1 + rng.below(max_n);
            ConvergentFamily::random(&mut rng, m, n)
        })
        .collect();
    let results: Vec<_> = families
        .par_iter()
        .map(|fam| {
            let report = check_family(fam, terms, tol, verify_tol);
            let bound = decomposition::c_lower_bound(&fam.a, DEFAULT_NMAX, tol);
            (report, bound)
        })
        .collect();

    let mut s = CertificateSection::new("closedness");
    s.push("seed", vec![common.seed.to_string()]);
    s.push("terms", vec![terms.to_string()]);
    let mut table = Table::new(&["family", "m", "n", "support", "lambda", "lambda_gap", "cbound", "pass"]);
    let mut passed = 0;
    for (i, (fam, (report, bound))) in families.iter().zip(results).enumerate() {
        let (support, lambda, gap, limit_ok) = match &report {
            Ok(r) => (
                indices(r.support.indices()).join(","),
                num(r.lambda),
                num(r.lambda_gap),
                r.verdict.is_accepted(),
            ),
            Err(e) => (format!("error: {e}"), "-".into(), "-".into(), false),
        };
        // An all-zero A has no independent support to bound.
        let (cbound, bound_ok) = match bound {
            Ok(c) => (num(c), c > 0.0),
            Err(_) => ("-".into(), fam.a.is_zero()),
        };
        let pass = limit_ok && bound_ok;
        passed += usize::from(pass);
        let values = vec![
            (i + 1).to_string(),
            fam.a.rows().to_string(),
            fam.a.cols().to_string(),
            if support.is_empty() { "-".into() } else { support },
            lambda,
            gap,
            cbound,
            pass.to_string(),
        ];
        s.push("family", values.clone());
        table.push(values);
    }
    s.push("passed", vec![passed.to_string(), count.to_string()]);
    let status = if passed == count { Status::Ok } else { Status::Negative };
    Ok(Outcome { text: section_only(&s), table, status })
}
