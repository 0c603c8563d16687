use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use crystor::abelian::{p_primary_part, AbelianError, Matrix, DEFAULT_BUDGET};
use crystor::crys::{
    component_group, crys1_torsion, les_report, oracle_crys1, phi_formula_check, phi_n,
    r1crys1_tors, tate_closed_form, CrysError, DEFAULT_CAP,
};
use crystor::degeneration::Degeneration;
use crystor::suite::{run_suite, Check, SuiteOptions};
use crystor::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::input::{parse_input, InputError};
use crate::report::{CheckRecord, Crys1Record, Payload, Report};

pub const BUDGET_ENV: &str = "CRYSTOR_ENUM_BUDGET";
pub const DEFAULT_SEED: u64 = 1;

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_SUITE: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "crystor",
    version,
    about = "Crys1 torsion and Néron component groups of totally degenerate abelian varieties"
)]
pub struct Cli {
    /// Print the machine-readable report.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Φ = coker(mu).
    ComponentGroup {
        file: PathBuf,
        /// Also report the p-primary part.
        #[arg(long)]
        p_part: bool,
    },
    /// A[p^m]: valuation matrix, Kummer classes and orders.
    Torsion {
        file: PathBuf,
        #[arg(long)]
        m: u32,
    },
    /// Crys1(A[p^m]).
    Crys1 {
        file: PathBuf,
        #[arg(long)]
        m: u32,
        /// Cross-check against subgroup enumeration.
        #[arg(long)]
        oracle: bool,
    },
    /// Φ[p^m] against Crys1(A[p^m]) / T[p^m].
    PhiCheck {
        file: PathBuf,
        #[arg(long)]
        m: u32,
    },
    /// Torsion of R1Crys1 of the Tate module.
    R1 {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u32,
    },
    /// The long exact sequence, truncated at level cap.
    Les {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u32,
    },
    /// Closed form for the Tate curve with v(q) = V.
    Tate {
        #[arg(long)]
        v: BigInt,
        #[arg(long)]
        p: BigInt,
        #[arg(long)]
        m: u32,
    },
    /// Run the invariant suite; exits 2 on any failure.
    Verify {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_m: u32,
        /// Seed for the randomized change-of-basis checks.
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Settings {
    pub budget: u64,
}

impl Settings {
    /// The enumeration budget from the environment, if set and valid.
    pub fn from_env() -> Self {
        let budget = std::env::var(BUDGET_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_BUDGET);
        Self { budget }
    }
}

pub struct Outcome {
    pub report: Report,
    pub exit_code: u8,
    pub json: bool,
}

struct Failure {
    exit_code: u8,
    payload: Payload,
}

impl Failure {
    fn new(exit_code: u8, id: &str, message: impl Into<String>) -> Self {
        Self {
            exit_code,
            payload: Payload::Error {
                id: id.into(),
                message: message.into(),
                field: None,
                line: None,
                column: None,
            },
        }
    }
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Self {
            exit_code: EXIT_INPUT,
            payload: Payload::Error {
                id: e.id.into(),
                message: e.message,
                field: e.field,
                line: e.position.map(|p| p.line),
                column: e.position.map(|p| p.column),
            },
        }
    }
}

impl From<CrysError> for Failure {
    fn from(e: CrysError) -> Self {
        let message = e.to_string();
        match e {
            CrysError::Abelian(AbelianError::BudgetExceeded { .. }) => {
                Self::new(EXIT_BUDGET, "budget-exceeded", message)
            }
            CrysError::NotStabilized { .. } => Self::new(EXIT_INPUT, "not-stabilized", message),
            CrysError::BadInput(_) => Self::new(EXIT_INPUT, "bad-input", message),
            CrysError::Degeneration(_) => Self::new(EXIT_INPUT, "invalid-data", message),
            _ => Self::new(EXIT_SUITE, "internal", message),
        }
    }
}

fn load(path: &Path) -> Result<Degeneration<BigInt>, Failure> {
    let bytes = std::fs::read(path)
        .map_err(|e| Failure::new(EXIT_INPUT, "io-error", format!("{}: {e}", path.display())))?;
    let text = String::from_utf8(bytes).map_err(|_| {
        Failure::new(
            EXIT_INPUT,
            "parse-error",
            format!("{}: not UTF-8", path.display()),
        )
    })?;
    Ok(parse_input(&text)?)
}

/// SHA-256 of the input file, when there is one and it can be read.
fn digest(command: &Command) -> Option<String> {
    let file = match command {
        Command::ComponentGroup { file, .. }
        | Command::Torsion { file, .. }
        | Command::Crys1 { file, .. }
        | Command::PhiCheck { file, .. }
        | Command::R1 { file, .. }
        | Command::Les { file, .. }
        | Command::Verify { file, .. } => file,
        Command::Tate { .. } => return None,
    };
    std::fs::read(file)
        .ok()
        .map(|bytes| hex::encode(Sha256::digest(&bytes)))
}

fn check_level(m: u32) -> Result<(), Failure> {
    if m < 1 {
        return Err(Failure::new(
            EXIT_INPUT,
            "bad-level",
            "m must be at least 1",
        ));
    }
    Ok(())
}

/// The suite, plus invariance of every reported group under a random
/// change of basis `mu -> Uᵀ mu U` of the character lattice.
fn verify(
    data: &Degeneration<BigInt>,
    max_m: u32,
    seed: u64,
    settings: Settings,
) -> Result<Vec<Check>, CrysError> {
    let opts = SuiteOptions {
        max_m,
        oracle_budget: settings.budget,
        ..SuiteOptions::default()
    };
    let mut checks = run_suite(data, &opts)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = data.toric_rank();
    for trial in 0..4 {
        let u = random_unimodular(&mut rng, t);
        let moved = u.transpose().mul(data.mu())?.mul(&u)?;
        let other = Degeneration::new(data.p().clone(), moved, None)?;
        let mut same = component_group(&other)? == component_group(data)?;
        for m in 1..=max_m {
            same &= phi_n(&other, m)? == phi_n(data, m)?;
            same &= crys1_torsion(&other, m)?.group() == crys1_torsion(data, m)?.group();
        }
        checks.push(Check {
            name: format!("basis-change #{trial}"),
            passed: same,
            detail: String::new(),
        });
    }
    Ok(checks)
}

fn random_unimodular(rng: &mut ChaCha8Rng, k: usize) -> Matrix<BigInt> {
    let mut u = Matrix::identity(k);
    if k < 2 {
        return u;
    }
    for _ in 0..2 * k {
        let i = rng.gen_range(0..k);
        let j = (i + rng.gen_range(1..k)) % k;
        let mut e = Matrix::identity(k);
        e[(i, j)] = BigInt::from(rng.gen_range(-1..=1));
        u = u.mul(&e).expect("square");
    }
    u
}

fn execute(command: &Command, settings: Settings) -> Result<(Payload, u8), Failure> {
    let ok = |payload| Ok((payload, EXIT_OK));
    match command {
        Command::ComponentGroup { file, p_part } => {
            let data = load(file)?;
            let phi = component_group(&data)?;
            let p_part = if *p_part {
                Some((&p_primary_part(&phi, data.p()).map_err(CrysError::from)?).into())
            } else {
                None
            };
            ok(Payload::ComponentGroup {
                group: (&phi).into(),
                p_part,
            })
        }
        Command::Torsion { file, m } => {
            check_level(*m)?;
            let data = load(file)?;
            let tm = data.torsion_module(*m).map_err(CrysError::from)?;
            let t = tm.toric_rank();
            let strings = |f: &dyn Fn(usize, usize) -> String| -> Vec<Vec<String>> {
                (0..t).map(|i| (0..t).map(|j| f(i, j)).collect()).collect()
            };
            let vals = tm.ext.val_matrix();
            ok(Payload::Torsion {
                level: tm.level.to_string(),
                exponent: tm.exponent,
                order: tm.order().to_string(),
                labels: tm.basis_labels(),
                torus_order: tm.ext.mult().order().to_string(),
                etale_order: tm.ext.etale().order().to_string(),
                val_matrix: strings(&|i, j| vals[(i, j)].to_string()),
                kappa: strings(&|i, j| tm.ext.entry(i, j).to_string()),
            })
        }
        Command::Crys1 { file, m, oracle } => {
            check_level(*m)?;
            let data = load(file)?;
            let c = crys1_torsion(&data, *m)?;
            let agrees = if *oracle {
                Some(oracle_crys1(&data, *m, settings.budget)?.same_as(&c))
            } else {
                None
            };
            let exit = if agrees == Some(false) {
                EXIT_SUITE
            } else {
                EXIT_OK
            };
            Ok((Payload::Crys1(Crys1Record::new(&c, agrees)), exit))
        }
        Command::PhiCheck { file, m } => {
            check_level(*m)?;
            let data = load(file)?;
            let r = phi_formula_check(&data, *m)?;
            let exit = if r.agrees { EXIT_OK } else { EXIT_SUITE };
            let payload = Payload::PhiCheck {
                level: data.p().pow(*m).to_string(),
                quotient: (&r.quotient).into(),
                phi: (&r.phi).into(),
                agrees: r.agrees,
            };
            Ok((payload, exit))
        }
        Command::R1 { file, cap } => {
            let data = load(file)?;
            let r = r1crys1_tors(&data, *cap)?;
            ok(Payload::R1 {
                cap: *cap,
                group: (&r.group).into(),
                stable_from: r.stable_from,
            })
        }
        Command::Les { file, cap } => {
            let data = load(file)?;
            let r = les_report(&data, *cap)?;
            let exit = if r.all_exact() { EXIT_OK } else { EXIT_SUITE };
            let payload = Payload::Les {
                cap: r.cap,
                rank: r.rank,
                weight: r.weight.value(),
                divisible_rank: r.divisible_rank,
                colimit_torsion: (&r.colimit_torsion).into(),
                r1_torsion: (&r.r1_torsion.group).into(),
                all_exact: r.all_exact(),
                finite_exact: r.finite_exact,
                transitions: r.transitions,
                connecting: r.connecting,
            };
            Ok((payload, exit))
        }
        Command::Tate { v, p, m } => {
            let c = tate_closed_form(v, p, *m)?;
            Ok((Payload::Tate(Crys1Record::new(&c, None)), EXIT_OK))
        }
        Command::Verify { file, max_m, seed } => {
            check_level(*max_m)?;
            let data = load(file)?;
            let checks = verify(&data, *max_m, *seed, settings)?;
            let failed = checks.iter().filter(|c| !c.passed).count();
            let payload = Payload::Verify {
                seed: *seed,
                passed: checks.len() - failed,
                failed,
                checks: checks.iter().map(CheckRecord::from).collect(),
            };
            Ok((payload, if failed == 0 { EXIT_OK } else { EXIT_SUITE }))
        }
    }
}

/// Runs a parsed command line. `argv` excludes the program name and is
/// echoed in the report.
pub fn run_command(cli: &Cli, argv: &[String], settings: Settings) -> Outcome {
    let (result, exit_code) = match execute(&cli.command, settings) {
        Ok(r) => r,
        Err(f) => (f.payload, f.exit_code),
    };
    let input_digest = digest(&cli.command);
    let report = Report {
        version: env!("CARGO_PKG_VERSION").into(),
        command: argv.to_vec(),
        input_digest,
        result,
    };
    Outcome {
        report,
        exit_code,
        json: cli.json,
    }
}

/// Parses and runs; clap usage errors become input errors.
pub fn run(argv: &[String], settings: Settings) -> Result<Outcome, clap::Error> {
    let cli =
        Cli::try_parse_from(std::iter::once("crystor".to_string()).chain(argv.iter().cloned()))?;
    Ok(run_command(&cli, argv, settings))
}
