//! Batch front end: read CP-map or representation specs, run one
//! computation, emit a single JSON report on stdout.
//!
//! Exit codes: 0 on success, 2 on validation errors (malformed specs,
//! precondition violations, windows too small), 3 on numerical failure
//! (a matrix expected Hermitian was not). Rank-deficient least-squares
//! systems are not failures: they are solved by pseudo-inverse and flagged
//! in the report.

mod report;
mod spec;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use rotcp::cpmap::monomial_unitary;
use rotcp::gns::purity_probe;
use rotcp::invariants::{invariant_values, DEFAULT_RANK_TOL};
use rotcp::reps::{build_rep, cocycle_equiv_residual, relation_residuals, RepSpecFile, WTableFile};
use rotcp::rn::{rn_component_closed, rn_oracle_for};
use rotcp::state::{extendibility_certificate, StateFunctional};
use rotcp::{CoreError, CpMap};

use report::*;
use spec::CpMapSpecFile;

#[derive(Parser)]
#[command(
    name = "rotcp",
    version,
    about = "Invariants of completely positive maps on the irrational rotation algebra"
)]
struct Cli {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct MapArg {
    /// CP-map spec file (JSON).
    #[arg(long)]
    map: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Table of ψ_T on the monomial box |hᵢ| ≤ BOX.
    State {
        #[command(flatten)]
        map: MapArg,
        #[arg(long, default_value_t = 2)]
        r#box: i64,
    },
    /// Extendibility certificate: density data of μ_T^k for |kᵢ| ≤ KBOX.
    Extendible {
        #[command(flatten)]
        map: MapArg,
        #[arg(long, default_value_t = 2)]
        kbox: i64,
    },
    /// Radon–Nikodym component D_T^(k) by one or both routes.
    Rn {
        #[command(flatten)]
        map: MapArg,
        /// Component index as k1,k2.
        #[arg(long, value_parser = parse_pair)]
        k: (i64, i64),
        /// Evaluate the single-Kraus closed form.
        #[arg(long)]
        closed_form: bool,
        /// Solve the defining identity.
        #[arg(long)]
        oracle: bool,
    },
    /// Heat traces and range-projection traces at cutoff and cutoff−1.
    Invariants {
        #[command(flatten)]
        map: MapArg,
        /// Comma-separated list of heat-trace times.
        #[arg(long, value_parser = parse_f64_list, default_value = "0.5,1,2")]
        t: std::vec::Vec<f64>,
        #[arg(long, default_value_t = 4)]
        cutoff: i64,
        #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
        rank_tol: f64,
    },
    /// Invariance report for conjugation by the monomial unitary U^pV^q.
    Equiv {
        #[command(flatten)]
        map: MapArg,
        /// Conjugating monomial exponents as p,q.
        #[arg(long, value_parser = parse_pair)]
        unitary: (i64, i64),
        #[arg(long, value_parser = parse_f64_list, default_value = "0.5,1,2")]
        t: std::vec::Vec<f64>,
        #[arg(long, default_value_t = 4)]
        cutoff: i64,
        #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
        rank_tol: f64,
    },
    /// Representation checks: unitarity, defining relations, cocycle
    /// equivalence.
    Rep {
        /// Representation spec file (JSON).
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        check_relations: bool,
        /// Second spec for a cocycle-equivalence comparison.
        #[arg(long)]
        equiv: Option<PathBuf>,
        /// Intertwiner field file for the comparison.
        #[arg(long)]
        gauge: Option<PathBuf>,
    },
    /// Commutant-dimension purity probe at cutoff−1 and cutoff.
    Purity {
        #[command(flatten)]
        map: MapArg,
        #[arg(long, default_value_t = 3)]
        cutoff: i64,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
    },
}

fn parse_pair(s: &str) -> Result<(i64, i64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err("expected two comma-separated integers".into());
    }
    let a = parts[0].trim().parse().map_err(|e| format!("{e}"))?;
    let b = parts[1].trim().parse().map_err(|e| format!("{e}"))?;
    Ok((a, b))
}

fn parse_f64_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{e}")))
        .collect()
}

/// Exit code for an error per the CLI contract.
fn exit_code_for(err: &CliError) -> u8 {
    match err {
        CliError::Io(_) | CliError::Json(_) => 2,
        CliError::Core(e) => match e {
            CoreError::NotHermitian { .. } => 3,
            _ => 2,
        },
    }
}

#[derive(Debug)]
enum CliError {
    Io(String),
    Json(String),
    Core(CoreError),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(e) => write!(f, "io error: {e}"),
            CliError::Json(e) => write!(f, "parse error: {e}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Json(format!("{}: {e}", path.display())))
}

fn load_map(path: &PathBuf) -> Result<CpMap, CliError> {
    let file: CpMapSpecFile = read_json(path)?;
    Ok(file.to_map()?)
}

fn run(cli: &Cli) -> Result<String, CliError> {
    let json = match &cli.command {
        Command::State { map, r#box } => {
            let t = load_map(&map.map)?;
            let psi = StateFunctional::new(t.clone());
            let values = psi
                .table(*r#box)
                .into_iter()
                .map(|(index, v)| IndexedValue {
                    index,
                    re: v.re,
                    im: v.im,
                })
                .collect();
            let rep = StateReport {
                meta: Meta::new("state", t.ctx()),
                box_radius: *r#box,
                values,
            };
            serde_json::to_string_pretty(&rep)
        }
        Command::Extendible { map, kbox } => {
            let t = load_map(&map.map)?;
            let psi = StateFunctional::new(t.clone());
            let cert = extendibility_certificate(&psi, *kbox)?;
            let rep = ExtendibleReport {
                meta: Meta::new("extendible", t.ctx()).note(
                    "certificate only: finite Kraus data always yields \
                     trigonometric-polynomial densities; refutation would \
                     require data outside every finite box",
                ),
                k_radius: cert.k_radius,
                verdict: cert.verdict,
                entries: cert
                    .entries
                    .iter()
                    .map(|e| DensityEntry {
                        k: e.k,
                        support_bound: e.support_bound,
                        density: poly_coeffs(&e.density),
                    })
                    .collect(),
            };
            serde_json::to_string_pretty(&rep)
        }
        Command::Rn {
            map,
            k,
            closed_form,
            oracle,
        } => {
            let t = load_map(&map.map)?;
            // default: run both routes
            let (want_closed, want_oracle) = if !closed_form && !oracle {
                (true, true)
            } else {
                (*closed_form, *oracle)
            };
            let closed = if want_closed {
                Some(rn_component_closed(&t, *k)?)
            } else {
                None
            };
            let oracle_poly = if want_oracle {
                let k_radius = k.0.abs().max(k.1.abs());
                Some(rn_oracle_for(&t, k_radius)?.component(*k))
            } else {
                None
            };
            let agreement = match (&closed, &oracle_poly) {
                (Some(a), Some(b)) => {
                    let keys: std::collections::BTreeSet<_> = a.keys().chain(b.keys()).collect();
                    Some(
                        keys.into_iter()
                            .map(|m| {
                                let x = a.get(m).copied().unwrap_or_default();
                                let y = b.get(m).copied().unwrap_or_default();
                                (x - y).norm()
                            })
                            .fold(0.0f64, f64::max),
                    )
                }
                _ => None,
            };
            let rep = RnReport {
                meta: Meta::new("rn", t.ctx()),
                k: *k,
                closed_form: closed.as_ref().map(poly_coeffs),
                oracle: oracle_poly.as_ref().map(poly_coeffs),
                agreement_residual: agreement,
            };
            serde_json::to_string_pretty(&rep)
        }
        Command::Invariants {
            map,
            t,
            cutoff,
            rank_tol,
        } => {
            let m = load_map(&map.map)?;
            if *cutoff < 1 {
                return Err(CoreError::InvalidSpec {
                    reason: "cutoff must be at least 1".into(),
                }
                .into());
            }
            let current = invariant_values(&m, t, *cutoff, *rank_tol)?;
            let previous = invariant_values(&m, t, *cutoff - 1, *rank_tol)?;
            let drift = current
                .heat
                .iter()
                .zip(&previous.heat)
                .map(|(a, b)| (a - b).abs())
                .fold(
                    (current.proj_spectral - previous.proj_spectral)
                        .abs()
                        .max((current.proj_lsq.value - previous.proj_lsq.value).abs()),
                    f64::max,
                );
            let rep = InvariantsReport {
                meta: Meta::new("invariants", m.ctx())
                    .tol("rank_tol", *rank_tol)
                    .tol("hermitian_tol", rotcp::invariants::HERMITIAN_TOL),
                t_list: t.clone(),
                current: (&current).into(),
                previous: (&previous).into(),
                cutoff_drift: drift,
            };
            serde_json::to_string_pretty(&rep)
        }
        Command::Equiv {
            map,
            unitary,
            t,
            cutoff,
            rank_tol,
        } => {
            let m = load_map(&map.map)?;
            let u = monomial_unitary(unitary.0, unitary.1, 0, m.ctx());
            let report = rotcp::invariants::invariance_report(&m, &u, t, *cutoff, *rank_tol)?;
            let rep = EquivReport {
                meta: Meta::new("equiv", m.ctx()).tol("rank_tol", *rank_tol),
                unitary: *unitary,
                t_list: t.clone(),
                original: (&report.original).into(),
                conjugated: (&report.conjugated).into(),
                max_deviation: report.max_deviation,
            };
            serde_json::to_string_pretty(&rep)
        }
        Command::Rep {
            spec,
            check_relations,
            equiv,
            gauge,
        } => {
            let file: RepSpecFile = read_json(spec)?;
            let (rep_spec, ctx) = file.to_spec()?;
            let matrices = build_rep(&rep_spec)?;
            let relations = if *check_relations {
                Some(
                    relation_residuals(&matrices, &ctx)
                        .into_iter()
                        .map(|(relation, residual)| RelationResidual { relation, residual })
                        .collect(),
                )
            } else {
                None
            };
            let equiv_residual = match (equiv, gauge) {
                (Some(other_path), Some(gauge_path)) => {
                    let other_file: RepSpecFile = read_json(other_path)?;
                    let (other_spec, _) = other_file.to_spec()?;
                    let w_file: WTableFile = read_json(gauge_path)?;
                    let w = w_file.to_matrices(rep_spec.m)?;
                    Some(cocycle_equiv_residual(&rep_spec, &other_spec, &w)?)
                }
                (None, None) => None,
                _ => {
                    return Err(CoreError::InvalidSpec {
                        reason: "--equiv and --gauge must be given together".into(),
                    }
                    .into())
                }
            };
            let rep = RepReport {
                meta: Meta::new("rep", &ctx)
                    .note("ergodicity of the measure is the user's assertion, not verified"),
                multiplicity: rep_spec.m,
                points: rep_spec.measure.len(),
                unitarity_residual: matrices.unitarity_residual(),
                relations,
                equiv_residual,
            };
            serde_json::to_string_pretty(&rep)
        }
        Command::Purity { map, cutoff, tol } => {
            let m = load_map(&map.map)?;
            if *cutoff < 1 {
                return Err(CoreError::InvalidSpec {
                    reason: "cutoff must be at least 1".into(),
                }
                .into());
            }
            let ev = purity_probe(&m, *cutoff, *tol)?;
            let evidence = if ev.upper.dimension == 1 && ev.stable {
                format!(
                    "commutant dimension 1 at cutoffs {} and {}: consistent with a pure state \
                     at these truncations",
                    ev.lower.cutoff, ev.upper.cutoff
                )
            } else if ev.stable {
                format!(
                    "commutant dimension {} stable across cutoffs {} and {}: evidence of a \
                     reducible state at these truncations",
                    ev.upper.dimension, ev.lower.cutoff, ev.upper.cutoff
                )
            } else {
                "commutant dimension unstable across cutoffs: no verdict".to_string()
            };
            let rep = PurityReport {
                meta: Meta::new("purity", m.ctx()).tol("null_tol", *tol),
                caveat: "TRUNCATED",
                lower: CommutantBlock {
                    cutoff: ev.lower.cutoff,
                    quotient_rank: ev.lower.quotient_rank,
                    dimension: ev.lower.dimension,
                },
                upper: CommutantBlock {
                    cutoff: ev.upper.cutoff,
                    quotient_rank: ev.upper.quotient_rank,
                    dimension: ev.upper.dimension,
                },
                stable: ev.stable,
                evidence,
            };
            serde_json::to_string_pretty(&rep)
        }
    };
    json.map_err(|e| CliError::Json(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(json) => {
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, &json) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            } else {
                println!("{json}");
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            let code = exit_code_for(&err);
            let doc = serde_json::json!({
                "error": err.to_string(),
                "exit_code": code,
            });
            eprintln!("{}", serde_json::to_string_pretty(&doc).unwrap());
            ExitCode::from(code)
        }
    }
}
