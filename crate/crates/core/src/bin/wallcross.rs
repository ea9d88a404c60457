use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use wallcross_core::config::{Problem, ProblemConfig};
use wallcross_core::delta::total_change;
use wallcross_core::report::{self, DeltaReport, MiniwallsReport, WallRow, WallsReport};
use wallcross_core::verify::{self, VerifyOptions};
use wallcross_core::walls::{
    admissibility, check_fine_criterion, enumerate_miniwalls, enumerate_separating_classes,
    WallClass,
};
use wallcross_core::{Error, H2Class};

/// Walls, wall-crossing polynomials and self-checks for rank-2 Donaldson
/// invariants of surfaces with p_g = q = 0.
#[derive(Parser)]
#[command(name = "wallcross", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Problem description (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Emit JSON instead of a table.
    #[arg(long)]
    json: bool,
    /// Append decimal approximations, marked with `~`, to table output.
    #[arg(long)]
    decimals: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the walls crossed between the two polarizations.
    Walls {
        #[command(flatten)]
        common: Common,
    },
    /// Miniwalls of one wall (all walls when --xi is omitted).
    Miniwalls {
        #[command(flatten)]
        common: Common,
        /// Wall index (0-based, in `walls` order) or a class such as `-1,1` or `[3]`.
        #[arg(long, allow_hyphen_values = true)]
        xi: Option<String>,
    },
    /// The change of the invariants across every wall.
    Delta {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        l: i64,
        #[arg(long)]
        r: i64,
        /// Evaluate at this class, e.g. `1,0`.
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<String>,
    },
    /// Run the verification suites.
    Verify {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = 2)]
        level: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Corrupt Q_2 to check that the substitution suite catches it.
        #[arg(long, hide = true)]
        mutate: bool,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidPolarization(_) => 3,
            Error::DegenerateC(_) => 4,
            Error::WeightMismatch { .. } => 5,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

fn load(path: &PathBuf) -> Result<Problem, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| fail(2, format!("cannot read {}: {e}", path.display())))?;
    Ok(ProblemConfig::from_json(&text)?.validate()?)
}

fn parse_vector(s: &str) -> Result<H2Class, Failure> {
    let inner = s.trim().trim_start_matches('[').trim_end_matches(']');
    inner
        .split(',')
        .map(|x| x.trim().parse::<i64>())
        .collect::<Result<Vec<_>, _>>()
        .map(H2Class)
        .map_err(|_| fail(2, format!("cannot parse class {s:?}")))
}

fn walls(common: &Common) -> Result<String, Failure> {
    let p = load(&common.config)?;
    let found = enumerate_separating_classes(&p.surface, &p.chern, &p.h_minus, &p.h_plus)?;
    let (fine, fine_note) = check_fine_criterion(&p.surface, &p.chern);
    let r = WallsReport {
        walls: found.iter().map(WallRow::from).collect(),
        fine,
        fine_note,
        admissibility: admissibility(&p.surface, &p.chern, &p.h_minus, &p.h_plus)?,
    };
    Ok(if common.json {
        report::to_json(&r)
    } else {
        report::walls_table(&r, common.decimals)
    })
}

fn miniwalls(common: &Common, xi: Option<&str>) -> Result<String, Failure> {
    let p = load(&common.config)?;
    let c = p.c.clone().ok_or_else(|| fail(4, "config has no C"))?;
    let found = enumerate_separating_classes(&p.surface, &p.chern, &p.h_minus, &p.h_plus)?;
    let selected: Vec<WallClass> = match xi {
        None => found,
        Some(s) if !s.contains(',') && !s.contains('[') => {
            let i: usize = s
                .trim()
                .parse()
                .map_err(|_| fail(2, format!("cannot parse wall index {s:?}")))?;
            let n = found.len();
            vec![found
                .into_iter()
                .nth(i)
                .ok_or_else(|| fail(2, format!("wall index {i} out of range ({n} walls)")))?]
        }
        Some(s) => {
            let v = parse_vector(s)?;
            match found.iter().find(|w| w.xi == v) {
                Some(w) => vec![w.clone()],
                None => vec![WallClass::from_class(
                    &p.surface, &p.chern, v, &p.h_minus, &p.h_plus,
                )?],
            }
        }
    };
    let reports = selected
        .iter()
        .map(|w| {
            Ok(MiniwallsReport {
                xi: w.xi.clone(),
                d: w.d,
                c: c.clone(),
                miniwalls: enumerate_miniwalls(&p.surface, &p.chern, w, &c)?,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(if common.json {
        report::to_json(&reports)
    } else {
        reports
            .iter()
            .map(|r| report::miniwalls_table(r, common.decimals))
            .collect::<Vec<_>>()
            .join("\n")
    })
}

fn delta(common: &Common, l: i64, r: i64, alpha: Option<&str>) -> Result<String, Failure> {
    let p = load(&common.config)?;
    let total = total_change(&p.surface, &p.chern, &p.h_minus, &p.h_plus, l, r)?;
    let eval = match alpha {
        Some(s) => {
            let a = parse_vector(s)?;
            let ev = total.evaluate(&p.surface, &a)?;
            Some((ev.value, ev.exact))
        }
        None => None,
    };
    let rep = DeltaReport::new(&total, eval);
    Ok(if common.json {
        report::to_json(&rep)
    } else {
        report::delta_table(&rep, common.decimals)
    })
}

fn verify_cmd(
    config: Option<&PathBuf>,
    json: bool,
    opts: VerifyOptions,
) -> Result<(String, bool), Failure> {
    let problem = config.map(load).transpose()?;
    let rep = verify::run(opts, problem.as_ref());
    let text = if json {
        report::to_json(&rep)
    } else {
        report::verify_table(&rep)
    };
    Ok((text, rep.passed()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Walls { common } => walls(common).map(|t| (t, true)),
        Command::Miniwalls { common, xi } => miniwalls(common, xi.as_deref()).map(|t| (t, true)),
        Command::Delta {
            common,
            l,
            r,
            alpha,
        } => delta(common, *l, *r, alpha.as_deref()).map(|t| (t, true)),
        Command::Verify {
            config,
            json,
            level,
            seed,
            mutate,
        } => verify_cmd(
            config.as_ref(),
            *json,
            VerifyOptions {
                level: *level,
                seed: *seed,
                mutation: *mutate,
            },
        ),
    };
    match result {
        Ok((text, ok)) => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                eprintln!("verification failed");
                ExitCode::from(1)
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
