use std::fs;
use std::path::PathBuf;

use beurling::certify::{
    certify_invariance_with, CertifyOptions, InvarianceReport, SchurVerdict, VerdictStatus,
};
use beurling::crosscheck::{cross_check, Alarm};
use beurling::maps::{DiskAutomorphism, LinearFractionalMap};
use beurling::orbits::{jones_refutation, JonesReport};
use beurling::Error;
use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use thiserror::Error as ThisError;

use crate::grammar::{parse_complex, parse_spec, SpecError};
use crate::report::{complex, csv_num, envelope, num, opt_complex, opt_num};

pub const EXIT_MEMBER: i32 = 0;
pub const EXIT_NON_MEMBER: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INDETERMINATE: i32 = 3;
pub const EXIT_ALARM: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "beurling",
    version,
    about = "Invariant Beurling subspaces of composition operators"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a linear-fractional self-map and locate its Denjoy-Wolff point.
    Classify {
        #[arg(allow_hyphen_values = true)]
        map: String,
    },
    /// Decide whether theta H^2 is invariant under C_phi.
    Certify {
        #[arg(long, allow_hyphen_values = true)]
        theta: String,
        #[arg(long, allow_hyphen_values = true)]
        phi: String,
        #[arg(long, value_delimiter = ',')]
        radii: Option<Vec<f64>>,
        #[arg(long)]
        angles: Option<usize>,
        #[arg(long)]
        margin: Option<f64>,
    },
    /// Tabulate a parabolic orbit against its closed form.
    Orbit {
        #[arg(long, allow_hyphen_values = true)]
        phi: String,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long)]
        terms: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every numerical cross-check for a pair.
    Oracle {
        #[arg(long, allow_hyphen_values = true)]
        theta: String,
        #[arg(long, allow_hyphen_values = true)]
        phi: String,
        #[arg(short = 'N', default_value_t = beurling::series::DEFAULT_ORACLE_N)]
        n: usize,
    },
}

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Library(#[from] Error),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// Output of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    match execute(cli.command) {
        Ok((code, value)) => Outcome {
            code,
            stdout: serde_json::to_string_pretty(&value).expect("report serializes") + "\n",
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: EXIT_INPUT,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

pub fn execute(command: Command) -> Result<(i32, Value), CliError> {
    match command {
        Command::Classify { map } => classify(&map),
        Command::Certify {
            theta,
            phi,
            radii,
            angles,
            margin,
        } => {
            let mut opts = CertifyOptions::default();
            if let Some(r) = radii {
                opts.radii = r;
            }
            if let Some(a) = angles {
                opts.angles = a;
            }
            if let Some(m) = margin {
                opts.margin = m;
            }
            certify(&theta, &phi, &opts)
        }
        Command::Orbit { phi, z, terms, out } => orbit(&phi, &z, terms, out),
        Command::Oracle { theta, phi, n } => oracle(&theta, &phi, n),
    }
}

fn parse_map(raw: &str) -> Result<(String, LinearFractionalMap), CliError> {
    let spec = parse_spec(raw)?;
    let canonical = spec.canonical();
    Ok((canonical, spec.into_map()?))
}

fn parse_inner(raw: &str) -> Result<(String, beurling::inner::InnerFunction), CliError> {
    let spec = parse_spec(raw)?;
    let canonical = spec.canonical();
    Ok((canonical, spec.into_inner()?))
}

fn classify(raw: &str) -> Result<(i32, Value), CliError> {
    let (canonical, phi) = parse_map(raw)?;
    // every point is fixed by the identity; nothing to list
    let points = if phi.is_identity() {
        Vec::new()
    } else {
        phi.fixed_points()?
    };
    let fixed: Vec<Value> = points
        .iter()
        .map(|f| {
            json!({
                "point": complex(f.point),
                "multiplicity": f.multiplicity,
                "boundary": f.is_boundary(),
            })
        })
        .collect();
    let (class, half_plane_b) = if phi.is_identity() {
        ("identity".to_string(), None)
    } else {
        match DiskAutomorphism::classify(&phi) {
            Ok(a) => (
                a.class().as_str().to_string(),
                a.half_plane_conjugate().ok().map(|h| h.b()),
            ),
            Err(Error::NotAutomorphism(_)) => ("non-automorphic".to_string(), None),
            Err(e) => return Err(e.into()),
        }
    };
    let dw = match phi.denjoy_wolff() {
        Ok(d) => json!({
            "point": complex(d.point),
            "derivative": num(d.derivative),
            "interior": d.interior,
        }),
        Err(Error::EllipticAutomorphism | Error::IdentityMap) => Value::Null,
        Err(e) => return Err(e.into()),
    };
    let result = json!({
        "class": class,
        "automorphism": phi.is_automorphism(),
        "fixed_points": fixed,
        "denjoy_wolff": dw,
        "half_plane_b": opt_num(half_plane_b),
        "phi_at_zero": complex(phi.eval(num_complex::Complex64::new(0.0, 0.0))?),
    });
    Ok((
        EXIT_MEMBER,
        envelope("classify", json!({ "map": canonical }), result),
    ))
}

fn verdict_json(v: &SchurVerdict) -> Value {
    json!({
        "status": v.status.as_str(),
        "sup_estimate": num(v.sup_estimate),
        "witness": v.witness.map_or(Value::Null, |w| json!({
            "point": complex(w.point),
            "modulus": num(w.modulus),
        })),
        "route": v.route,
    })
}

fn report_json(r: &InvarianceReport) -> Value {
    json!({
        "route": r.route.as_str(),
        "verdict": r.status().as_str(),
        "sup_estimate": num(r.verdict.sup_estimate),
        "witness": verdict_json(&r.verdict)["witness"].clone(),
        "sampling": verdict_json(&r.sampling),
        "skipped_points": r.skipped_points,
        "oracle": {
            "status": r.oracle.status.as_str(),
            "residual": opt_num(r.oracle.residual),
            "tail_error": opt_num(r.oracle.tail_error),
            "n": r.oracle.n,
        },
        "oracle_residual": opt_num(r.oracle_residual()),
        "quotient_constant": opt_complex(r.quotient_constant),
        "constancy_residual": opt_num(r.constancy_residual),
        "agreement": r.agreement,
        "sampling_agreement": r.sampling_agreement,
    })
}

pub fn status_code(s: VerdictStatus) -> i32 {
    match s {
        VerdictStatus::CertifiedMember | VerdictStatus::NumericallyConsistent => EXIT_MEMBER,
        VerdictStatus::CertifiedNonMember | VerdictStatus::NumericallyViolated => EXIT_NON_MEMBER,
        VerdictStatus::Indeterminate => EXIT_INDETERMINATE,
    }
}

fn options_json(opts: &CertifyOptions) -> Value {
    json!({
        "radii": opts.radii.iter().map(|&r| num(r)).collect::<Vec<_>>(),
        "angles": opts.angles,
        "margin": num(opts.margin),
        "oracle_n": opts.oracle_n,
        "probes": opts.probes,
    })
}

fn certify(
    theta_raw: &str,
    phi_raw: &str,
    opts: &CertifyOptions,
) -> Result<(i32, Value), CliError> {
    let (theta_c, theta) = parse_inner(theta_raw)?;
    let (phi_c, phi) = parse_map(phi_raw)?;
    let report = certify_invariance_with(&theta, &phi, opts)?;
    let mut result = report_json(&report);
    result["options"] = options_json(opts);
    let inputs = json!({ "theta": theta_c, "phi": phi_c });
    Ok((
        status_code(report.status()),
        envelope("certify", inputs, result),
    ))
}

fn jones_json(r: &JonesReport, csv: Option<&PathBuf>) -> Value {
    let o = &r.orbit;
    json!({
        "z": complex(o.z),
        "b": num(o.b),
        "u": num(o.u),
        "v": num(o.v),
        "zeta": complex(o.zeta),
        "terms": o.rows.len(),
        "fit_slope": num(o.fit_slope),
        "slope_gap": num(r.slope_gap),
        "max_formula_error": num(o.max_formula_error()),
        "summability": {
            "partial": num(o.summability.partial),
            "tail": num(o.summability.tail),
            "upper": num(o.summability.upper()),
            "certified": o.summability.certified,
        },
        "forward_invariance_error": num(r.forward_invariance_error),
        "transport_holds": r.transport_holds(),
        "transport": r.transport.iter().map(|t| json!({
            "m": t.m,
            "point": complex(t.point),
            "mult": t.mult,
            "mult_composed": t.mult_composed,
        })).collect::<Vec<_>>(),
        "truncated_failures": r.truncated_failures,
        "trend": r.trend.iter().map(|t| json!({
            "factors": t.factors,
            "residual": num(t.oracle.residual),
            "tail_error": num(t.oracle.tail_error),
            "model_space_residual": num(t.model_space),
        })).collect::<Vec<_>>(),
        "trend_decreasing": r.trend_decreasing(),
        "csv": csv.map(|p| p.display().to_string()),
    })
}

pub fn orbit_csv(r: &JonesReport) -> String {
    let mut s = String::from("m,re_phi_m,im_phi_m,direct,formula,partial_sum\n");
    for row in &r.orbit.rows {
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.m,
            csv_num(row.point.re),
            csv_num(row.point.im),
            csv_num(row.direct),
            csv_num(row.formula),
            csv_num(row.partial_sum),
        ));
    }
    s
}

fn orbit(
    phi_raw: &str,
    z_raw: &str,
    terms: usize,
    out: Option<PathBuf>,
) -> Result<(i32, Value), CliError> {
    let (phi_c, phi) = parse_map(phi_raw)?;
    let z = parse_complex(z_raw)?;
    let report = jones_refutation(&phi, z, terms)?;
    if let Some(path) = &out {
        fs::write(path, orbit_csv(&report)).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
    }
    let inputs = json!({ "phi": phi_c, "z": crate::grammar::print_complex(z), "terms": terms });
    Ok((
        EXIT_MEMBER,
        envelope("orbit", inputs, jones_json(&report, out.as_ref())),
    ))
}

fn alarm_json(a: &Alarm) -> Value {
    match a {
        Alarm::OracleDisagrees => json!({ "kind": "oracle_disagrees" }),
        Alarm::SamplingDisagrees => json!({ "kind": "sampling_disagrees" }),
        Alarm::LittlewoodViolated {
            section_norm,
            bound,
        } => json!({
            "kind": "littlewood_violated",
            "section_norm": num(*section_norm),
            "bound": num(*bound),
        }),
        Alarm::KernelNormExceeds { points, c, bound } => json!({
            "kind": "kernel_norm_exceeds",
            "points": points,
            "c": num(*c),
            "bound": num(*bound),
        }),
    }
}

fn error_json(e: &Error) -> Value {
    json!({ "error": e.to_string() })
}

fn oracle(theta_raw: &str, phi_raw: &str, n: usize) -> Result<(i32, Value), CliError> {
    let (theta_c, theta) = parse_inner(theta_raw)?;
    let (phi_c, phi) = parse_map(phi_raw)?;
    let cc = cross_check(&theta, &phi, n, &CertifyOptions::default())?;
    let alarms = cc.alarms();
    let residual = match &cc.residual {
        Ok(r) => json!({
            "residual": num(r.residual),
            "tail_error": num(r.tail_error),
            "n": r.n,
            "probes": r.probes,
        }),
        Err(e) => error_json(e),
    };
    let littlewood = match &cc.littlewood {
        Ok(l) => json!({
            "section_norm": num(l.section_norm),
            "bound": num(l.bound),
            "holds": l.holds(),
        }),
        Err(e) => error_json(e),
    };
    let kernel_relation: Vec<Value> = cc
        .kernel_relation
        .iter()
        .map(|(w, r)| match r {
            Ok(x) => json!({ "w": complex(*w), "residual": num(*x) }),
            Err(e) => json!({ "w": complex(*w), "error": e.to_string() }),
        })
        .collect();
    let kernel_norms: Vec<Value> = cc
        .kernel_norms
        .iter()
        .map(|(k, r)| match r {
            Ok(est) => json!({ "points": k, "c": num(est.c), "bound": num(est.bound), "ridge": num(est.ridge) }),
            Err(e) => json!({ "points": k, "error": e.to_string() }),
        })
        .collect();
    let result = json!({
        "certify": report_json(&cc.report),
        "residual": residual,
        "littlewood": littlewood,
        "kernel_relation": kernel_relation,
        "kernel_map_norm": kernel_norms,
        "agreement": cc.report.agreement,
        "alarms": alarms.iter().map(alarm_json).collect::<Vec<_>>(),
    });
    let code = if alarms.is_empty() {
        EXIT_MEMBER
    } else {
        EXIT_ALARM
    };
    let inputs = json!({ "theta": theta_c, "phi": phi_c, "n": n });
    Ok((code, envelope("oracle", inputs, result)))
}
