//! Command-line front end: solve, verify, generate, reduce, enumerate.
//!
//! Exit codes: 0 success (verify: all checks passed), 1 verification
//! failure, 2 infeasible instance, 3 inconclusive (certification skipped
//! or enumeration truncated), 64 usage error, 65 unreadable or invalid
//! input file.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind as ClapErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use hrlq_core::format::{
    parse_hrlq, parse_matching, render_matching, serialize_hr, serialize_hrlq,
};
use hrlq_core::generate::{generate, GenerateParams};
use hrlq_core::hr::{gale_shapley, ProposingSide};
use hrlq_core::instance::HrlqInstance;
use hrlq_core::popularity::{
    certify_popular, enumerate_feasible, max_card_feasible, vote, CertifyOutcome, CorrPolicy,
    UniverseKind,
};
use hrlq_core::reduction::{
    build_g_double_prime, build_g_prime, check_reduced_invariants, solve_max_popular,
    solve_popular_max,
};
use hrlq_core::Matching;

const EXIT_FAIL: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;
const EXIT_USAGE: u8 = 64;
const EXIT_PARSE: u8 = 65;

#[derive(Parser)]
#[command(
    name = "hrlq",
    about = "Popular matchings for hospital/residents instances with lower quotas",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Objective {
    /// Maximum-cardinality matching popular among all feasible matchings.
    MaxPopular,
    /// Matching popular among maximum-cardinality feasible matchings.
    PopularMax,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReduceKind {
    /// Reduction behind the max-popular objective.
    Gprime,
    /// Reduction behind the popular-max objective.
    Gdoubleprime,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance and print the matching.
    Solve {
        #[arg(long, value_enum)]
        objective: Objective,
        file: PathBuf,
    },
    /// Re-check a matching against an instance and objective.
    Verify {
        #[arg(long, value_enum)]
        objective: Objective,
        /// Matching file in the `match <resident> <hospital>` format.
        #[arg(long)]
        matching: PathBuf,
        /// Cap on enumerated matchings during certification.
        #[arg(long, default_value_t = 1_000_000)]
        limit: usize,
        /// Skip popularity certification above this many residents.
        #[arg(long, default_value_t = 10)]
        certify_bound: usize,
        file: PathBuf,
    },
    /// Emit a random instance.
    Generate {
        #[arg(long)]
        residents: usize,
        #[arg(long)]
        hospitals: usize,
        #[arg(long = "max-uq")]
        max_uq: usize,
        #[arg(long = "max-lq")]
        max_lq: usize,
        #[arg(long)]
        density: f64,
        #[arg(long)]
        seed: u64,
    },
    /// Print the reduced plain instance for inspection.
    Reduce {
        #[arg(long, value_enum)]
        kind: ReduceKind,
        file: PathBuf,
    },
    /// Stream every feasible matching.
    Enumerate {
        #[arg(long, default_value_t = 1_000_000)]
        limit: usize,
        file: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            return match err.kind() {
                ClapErrorKind::DisplayHelp | ClapErrorKind::DisplayVersion => {
                    print!("{err}");
                    ExitCode::SUCCESS
                }
                _ => {
                    eprint!("{err}");
                    ExitCode::from(EXIT_USAGE)
                }
            };
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("{message}");
            ExitCode::from(EXIT_PARSE)
        }
    }
}

fn load_instance(path: &Path) -> Result<HrlqInstance, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_hrlq(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn run(command: Command) -> Result<ExitCode, String> {
    match command {
        Command::Solve { objective, file } => {
            let inst = load_instance(&file)?;
            let solved = match objective {
                Objective::MaxPopular => solve_max_popular(&inst),
                Objective::PopularMax => solve_popular_max(&inst),
            };
            match solved {
                Ok(m) => {
                    print!("{}", render_matching(&inst, &m));
                    Ok(ExitCode::SUCCESS)
                }
                Err(err) => {
                    eprintln!("{err}");
                    for h in err.evidence.deficient_hospitals {
                        eprintln!(
                            "unfillable lower quota: {} needs {}",
                            inst.hospital_name(h),
                            inst.lower(h)
                        );
                    }
                    Ok(ExitCode::from(EXIT_INFEASIBLE))
                }
            }
        }
        Command::Verify {
            objective,
            matching,
            limit,
            certify_bound,
            file,
        } => {
            let inst = load_instance(&file)?;
            let text = std::fs::read_to_string(&matching)
                .map_err(|e| format!("cannot read {}: {e}", matching.display()))?;
            let pairs =
                parse_matching(&inst, &text).map_err(|e| format!("{}: {e}", matching.display()))?;
            Ok(verify(&inst, &pairs, objective, limit, certify_bound))
        }
        Command::Generate {
            residents,
            hospitals,
            max_uq,
            max_lq,
            density,
            seed,
        } => {
            let params = GenerateParams {
                residents,
                hospitals,
                max_upper: max_uq,
                max_lower: max_lq,
                density,
                seed,
            };
            match generate(&params) {
                Ok(inst) => {
                    print!("{}", serialize_hrlq(&inst));
                    Ok(ExitCode::SUCCESS)
                }
                Err(err) => {
                    eprintln!("{err}");
                    Ok(ExitCode::from(EXIT_USAGE))
                }
            }
        }
        Command::Reduce { kind, file } => {
            let inst = load_instance(&file)?;
            let red = match kind {
                ReduceKind::Gprime => build_g_prime(&inst),
                ReduceKind::Gdoubleprime => build_g_double_prime(&inst),
            };
            print!("{}", serialize_hr(&red.hr));
            Ok(ExitCode::SUCCESS)
        }
        Command::Enumerate { limit, file } => {
            let inst = load_instance(&file)?;
            let mut total = 0usize;
            for item in enumerate_feasible(&inst, limit) {
                match item {
                    Ok(m) => {
                        total += 1;
                        print!("{}", render_matching(&inst, &m));
                    }
                    Err(err) => {
                        println!("# truncated at limit={limit}");
                        eprintln!("{err}");
                        return Ok(ExitCode::from(EXIT_INCONCLUSIVE));
                    }
                }
            }
            println!("# total={total}");
            Ok(ExitCode::SUCCESS)
        }
    }
}

struct Verdict {
    failed: bool,
    inconclusive: bool,
}

impl Verdict {
    fn new() -> Self {
        Verdict {
            failed: false,
            inconclusive: false,
        }
    }

    fn check(&mut self, label: &str, ok: bool, detail: &str) {
        if ok {
            println!("pass — {label}");
        } else {
            println!("FAIL — {label}: {detail}");
            self.failed = true;
        }
    }

    fn skip(&mut self, label: &str, why: &str) {
        println!("skipped — {label}: {why}");
        self.inconclusive = true;
    }

    fn exit(&self) -> ExitCode {
        if self.failed {
            ExitCode::from(EXIT_FAIL)
        } else if self.inconclusive {
            ExitCode::from(EXIT_INCONCLUSIVE)
        } else {
            ExitCode::SUCCESS
        }
    }
}

fn verify(
    inst: &HrlqInstance,
    pairs: &[(usize, usize)],
    objective: Objective,
    limit: usize,
    certify_bound: usize,
) -> ExitCode {
    let mut verdict = Verdict::new();

    let m = match Matching::from_pairs(inst.n_residents(), inst.n_hospitals(), pairs) {
        Ok(m) => m,
        Err(err) => {
            verdict.check("matching well-formed", false, &err.to_string());
            return verdict.exit();
        }
    };
    match inst.validate_matching(&m) {
        Ok(()) => verdict.check("matching uses instance edges within upper quotas", true, ""),
        Err(err) => {
            verdict.check(
                "matching uses instance edges within upper quotas",
                false,
                &err.to_string(),
            );
            return verdict.exit();
        }
    }
    let deficient = inst.deficient_hospitals(&m);
    verdict.check(
        "all lower quotas met",
        deficient.is_empty(),
        &format!(
            "deficient: {}",
            deficient
                .iter()
                .map(|&h| inst.hospital_name(h))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    );
    if verdict.failed {
        return verdict.exit();
    }

    // Pipeline self-check: the reduction behind the objective still
    // satisfies its structural clauses on this instance.
    let red = match objective {
        Objective::MaxPopular => build_g_prime(inst),
        Objective::PopularMax => build_g_double_prime(inst),
    };
    let stable = gale_shapley(&red.hr, ProposingSide::Residents);
    let report = check_reduced_invariants(&red, &stable).expect("stable matching is valid");
    verdict.check(
        "reduction invariants hold on its stable matching",
        report.all_passed(),
        &report.render(),
    );

    if let Objective::PopularMax = objective {
        let max = max_card_feasible(inst).expect("feasible: the matching above is feasible");
        verdict.check(
            "matching has maximum cardinality",
            m.size() == max,
            &format!("size {} but maximum is {max}", m.size()),
        );
    }

    if inst.n_residents() > certify_bound {
        verdict.skip(
            "popularity certification",
            &format!(
                "{} residents exceed --certify-bound {certify_bound}",
                inst.n_residents()
            ),
        );
        return verdict.exit();
    }
    let universe = match objective {
        Objective::MaxPopular => UniverseKind::AllFeasible,
        Objective::PopularMax => UniverseKind::MaxCardinality,
    };
    match certify_popular(inst, &m, universe, limit) {
        Ok(CertifyOutcome::Popular { universe }) => {
            verdict.check(
                &format!("popular in its universe ({universe} matchings, adversarial pairings)"),
                true,
                "",
            );
        }
        Ok(outcome @ CertifyOutcome::Beaten { .. }) => {
            verdict.check("popular in its universe", false, &outcome.render(inst));
        }
        Ok(CertifyOutcome::Inconclusive { scanned }) => {
            verdict.skip(
                "popularity certification",
                &format!("enumeration hit the limit after {scanned} matchings"),
            );
        }
        Err(err) => verdict.check("popular in its universe", false, &err.to_string()),
    }

    if let Objective::MaxPopular = objective {
        // Any strictly larger feasible matching must lose the election
        // outright, which certifies maximality among popular matchings.
        let policy = CorrPolicy::adversarial_against(&m);
        let mut checked = true;
        let mut detail = String::new();
        for item in enumerate_feasible(inst, limit) {
            match item {
                Ok(n) if n.size() > m.size() => {
                    let outcome = vote(inst, &n, &m, &policy).expect("valid matchings");
                    if outcome.delta_for >= outcome.delta_against {
                        checked = false;
                        detail = format!(
                            "a larger matching gets {} votes to {}",
                            outcome.delta_for, outcome.delta_against
                        );
                        break;
                    }
                }
                Ok(_) => {}
                Err(_) => {
                    verdict.skip("larger matchings lose strictly", "enumeration limit hit");
                    return verdict.exit();
                }
            }
        }
        verdict.check("larger matchings lose strictly", checked, &detail);
    }

    verdict.exit()
}
