//! One function per subcommand. Each returns a JSON report and, when a
//! check failed, the error that sets the exit code after the report is
//! written.

use bicoef_core::{
    bound_consistency_check, check_membership, closed_form, fekete_szego_class_bound, membership_threshold,
    nu_for, oracle_infimum, run_fekete_szego, run_stress, ClassSpec, OracleConfig, PhiProfile,
    PiecewiseProblem, TestFunction, TruncatedSeries,
};
use serde_json::{json, Map, Value};

use crate::args::{
    BoundsArgs, ClassKind, Command, FeketeSzegoArgs, InvertArgs, LemmaArgs, MembershipArgs, SampleArgs,
    SweepArgs, SweepFamily, ThresholdArgs,
};
use crate::{resolve_seed, CliError};

pub struct Outcome {
    pub report: Value,
    pub failure: Option<CliError>,
    /// Row-per-record view used for CSV and plain output.
    pub table: Option<Table>,
}

pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Map<String, Value>>,
}

impl Outcome {
    fn ok(report: Value) -> Self {
        Self {
            report,
            failure: None,
            table: None,
        }
    }

    fn failing_if(report: Value, failure: Option<CliError>) -> Self {
        Self {
            report,
            failure,
            table: None,
        }
    }
}

pub fn execute(command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::Bounds(a) => bounds(a),
        Command::Lemma(a) => lemma(a),
        Command::FeketeSzego(a) => fekete_szego(a),
        Command::Membership(a) => membership(a),
        Command::Threshold(a) => threshold(a),
        Command::Sample(a) => sample(a),
        Command::Invert(a) => invert(a),
        Command::Sweep(a) => sweep(a),
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Io(e.to_string()))
}

fn class_fields(class: &ClassSpec) -> Result<Map<String, Value>, CliError> {
    match to_value(class)? {
        Value::Object(m) => Ok(m),
        _ => unreachable!("class serializes to an object"),
    }
}

fn bounds(a: &BoundsArgs) -> Result<Outcome, CliError> {
    let class = a.class.spec()?;
    let report = class.bounds()?;
    let failed: Vec<&str> = report
        .comparisons
        .iter()
        .filter(|c| !c.holds)
        .map(|c| c.name.as_str())
        .collect();
    let failure = (!failed.is_empty()).then(|| {
        CliError::Violation(format!("new bound exceeds earlier bound: {}", failed.join(", ")))
    });
    Ok(Outcome::failing_if(to_value(&report)?, failure))
}

fn lemma(a: &LemmaArgs) -> Result<Outcome, CliError> {
    let problem = PiecewiseProblem::new(a.id, a.xi, a.eta)?;
    let cf = closed_form(&problem);
    let mut report = json!({
        "lemma": a.id,
        "xi": a.xi,
        "eta": a.eta,
        "gamma": cf.gamma,
        "rho": cf.rho,
        "closed_form": cf.value,
        "branch": cf.branch,
        "oracle": null,
    });
    let mut failure = None;
    if a.oracle {
        if !(a.tol > 0.0) {
            return Err(CliError::Usage(format!("--tol must be positive, got {}", a.tol)));
        }
        let config = OracleConfig {
            half_width: a.half_width,
            levels: a.levels,
            base_step: a.base_step,
        };
        let oracle = oracle_infimum(&problem, &config)?;
        let gap = (oracle.value - cf.value).abs();
        let relative = if cf.value == 0.0 { gap } else { gap / cf.value.abs() };
        let agrees = relative <= a.tol;
        if !agrees {
            failure = Some(CliError::Core(bicoef_core::Error::InternalInconsistency(format!(
                "oracle {} vs closed form {} (relative gap {relative:.3e} > {})",
                oracle.value, cf.value, a.tol
            ))));
        }
        let mut o = to_value(&oracle)?;
        o["relative_gap"] = json!(relative);
        o["tol"] = json!(a.tol);
        o["agrees"] = json!(agrees);
        report["oracle"] = o;
    }
    Ok(Outcome::failing_if(report, failure))
}

fn fekete_szego(a: &FeketeSzegoArgs) -> Result<Outcome, CliError> {
    let class = a.class.spec()?;
    if !a.x.is_finite() {
        return Err(CliError::Usage(format!("--x must be finite, got {}", a.x)));
    }
    let mut report = class_fields(&class)?;
    report.insert("x".into(), json!(a.x));
    report.insert("nu".into(), json!(nu_for(&class, a.x)));
    report.insert("bound".into(), json!(fekete_szego_class_bound(&class, a.x)?));
    let mut failure = None;
    let sampling = if a.samples > 0 {
        let seed = resolve_seed(a.seed)?;
        let r = run_fekete_szego(&class, a.x, a.samples, seed)?;
        failure = r.ensure_clean().err().map(CliError::from);
        json!({
            "n": r.n,
            "seed": r.seed,
            "admissible_count": r.admissible_count,
            "max_functional": r.max_functional,
            "max_nu_lhs": r.max_nu_lhs,
            "nu_bound": r.nu_bound,
            "violation_count": r.violation_count,
            "violations": to_value(&r.violations)?,
        })
    } else {
        Value::Null
    };
    report.insert("sampling".into(), sampling);
    Ok(Outcome::failing_if(Value::Object(report), failure))
}

fn membership(a: &MembershipArgs) -> Result<Outcome, CliError> {
    let class = a.class.spec()?;
    let config = a.sampling.config();
    let f = &a.function.0;
    let verdict = check_membership(f, &class, &config)?;
    let mut report = Map::new();
    report.insert("function".into(), json!(f.describe()));
    report.extend(class_fields(&class)?);
    if let Value::Object(v) = to_value(&verdict)? {
        report.extend(v);
    }
    report.insert("radii".into(), json!(config.radii));
    report.insert("angles".into(), json!(config.angles));
    report.insert("closure_tol".into(), json!(config.closure_tol));

    let mut failure = None;
    let consistency = match f {
        TestFunction::Fnu(spec) if verdict.verdict => match bound_consistency_check(&class, spec) {
            Ok(c) => to_value(&c)?,
            Err(e) => {
                failure = Some(CliError::from(e));
                Value::Null
            }
        },
        _ => Value::Null,
    };
    report.insert("consistency".into(), consistency);
    Ok(Outcome::failing_if(Value::Object(report), failure))
}

fn threshold(a: &ThresholdArgs) -> Result<Outcome, CliError> {
    let class = a.class.spec()?;
    let config = a.sampling.config();
    let t = membership_threshold(&class, a.lo, a.hi, a.tol, &config)?;
    let mut report = class_fields(&class)?;
    report.insert("lo".into(), json!(a.lo));
    report.insert("hi".into(), json!(a.hi));
    report.insert("tol".into(), json!(a.tol));
    if let Value::Object(v) = to_value(&t)? {
        report.extend(v);
    }
    report.insert("radii".into(), json!(config.radii));
    report.insert("angles".into(), json!(config.angles));
    Ok(Outcome::ok(Value::Object(report)))
}

fn sample(a: &SampleArgs) -> Result<Outcome, CliError> {
    let class = a.class.spec()?;
    if a.n == 0 {
        return Err(CliError::Usage("--n must be positive".into()));
    }
    let seed = resolve_seed(a.seed)?;
    let r = run_stress(&class, a.n, seed)?;
    let failure = r.ensure_clean().err().map(CliError::from);
    Ok(Outcome::failing_if(to_value(&r)?, failure))
}

fn invert(a: &InvertArgs) -> Result<Outcome, CliError> {
    let mut coeffs = a.coeffs.clone();
    if let Some(order) = a.order {
        if order < coeffs.len() {
            return Err(CliError::Usage(format!(
                "--order {order} is below the {} coefficients given",
                coeffs.len()
            )));
        }
        coeffs.resize(order, Default::default());
    }
    let f = TruncatedSeries::new(coeffs)?;
    let g = f.invert()?;
    let roundtrip = f.compose(&g)?.max_abs_diff(&TruncatedSeries::identity(f.order()))?;
    Ok(Outcome::ok(json!({
        "order": f.order(),
        "coeffs": f.coeffs(),
        "inverse": g.coeffs(),
        "roundtrip_error": roundtrip,
    })))
}

const SWEEP_COLUMNS: [&str; 18] = [
    "class",
    "lambda",
    "phi",
    "param",
    "b1",
    "b2",
    "tau",
    "branch",
    "a2_bound",
    "a3_bound",
    "a3_branch",
    "prior_holds",
    "samples",
    "seed",
    "admissible_count",
    "max_a2",
    "max_a3",
    "violation_count",
];

fn grid(lo: f64, hi: f64, steps: usize, name: &str) -> Result<Vec<f64>, CliError> {
    if steps == 0 || !lo.is_finite() || !hi.is_finite() || lo > hi {
        return Err(CliError::Usage(format!("bad {name} grid: [{lo}, {hi}] with {steps} steps")));
    }
    if steps == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..steps)
        .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
        .collect())
}

fn sweep(a: &SweepArgs) -> Result<Outcome, CliError> {
    let params = grid(a.param_min, a.param_max, a.param_steps, "parameter")?;
    let lambdas: Vec<Option<f64>> = match a.class {
        ClassKind::RSigma => grid(a.lambda_min, a.lambda_max, a.lambda_steps, "lambda")?
            .into_iter()
            .map(Some)
            .collect(),
        ClassKind::BiStarlike => vec![None],
    };
    let seed = if a.samples > 0 {
        Some(resolve_seed(a.seed)?)
    } else {
        None
    };

    let mut rows = Vec::new();
    let mut bad_prior = 0usize;
    let mut violations = 0u64;
    for &lambda in &lambdas {
        for &p in &params {
            let phi = match a.family {
                SweepFamily::Power => PhiProfile::power(p)?,
                SweepFamily::Beta => PhiProfile::order_beta(p)?,
            };
            let class = match lambda {
                Some(l) => ClassSpec::r_sigma(l, phi)?,
                None => ClassSpec::bi_starlike(phi)?,
            };
            let b = class.bounds()?;
            let prior_holds = b.comparisons.iter().all(|c| c.holds);
            bad_prior += usize::from(!prior_holds);
            let mut row = class_fields(&class)?;
            row.insert("param".into(), json!(p));
            row.insert("b1".into(), json!(b.b1));
            row.insert("b2".into(), json!(b.b2));
            row.insert("tau".into(), json!(b.tau));
            row.insert("branch".into(), to_value(&b.branch)?);
            row.insert("a2_bound".into(), json!(b.a2_bound));
            row.insert("a3_bound".into(), json!(b.a3_bound));
            row.insert("a3_branch".into(), to_value(&b.a3_branch)?);
            row.insert("prior_holds".into(), json!(prior_holds));
            match seed {
                Some(seed) => {
                    let r = run_stress(&class, a.samples, seed)?;
                    violations += r.violation_count;
                    row.insert("samples".into(), json!(r.n));
                    row.insert("seed".into(), json!(r.seed));
                    row.insert("admissible_count".into(), json!(r.admissible_count));
                    row.insert("max_a2".into(), json!(r.max_a2));
                    row.insert("max_a3".into(), json!(r.max_a3));
                    row.insert("violation_count".into(), json!(r.violation_count));
                }
                None => {
                    for k in &SWEEP_COLUMNS[12..] {
                        row.insert((*k).into(), Value::Null);
                    }
                }
            }
            rows.push(row);
        }
    }

    let failure = if violations > 0 {
        Some(CliError::Violation(format!("{violations} sampled bound violations")))
    } else if bad_prior > 0 {
        Some(CliError::Violation(format!(
            "{bad_prior} grid points where the new bound exceeds an earlier one"
        )))
    } else {
        None
    };
    let report = json!({
        "family": match a.family { SweepFamily::Power => "power", SweepFamily::Beta => "beta" },
        "columns": SWEEP_COLUMNS,
        "rows": rows.iter().cloned().map(Value::Object).collect::<Vec<_>>(),
    });
    Ok(Outcome {
        report,
        failure,
        table: Some(Table {
            columns: SWEEP_COLUMNS.to_vec(),
            rows,
        }),
    })
}
