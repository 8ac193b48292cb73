//! `entangled`: batch checks for the entangled system-noise algebra.
//!
//! Exit status: 0 when every check passes, 1 when a mathematical violation or a
//! genericity rejection is found, 2 on malformed input or exceeded capacity.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use entangled_algebra::algebra::{parse_word, Entangled};
use entangled_algebra::config::RunConfig;
use entangled_algebra::dyson::{
    depends_only_on_entangled, propagator_elements_with_bra, unitarity_deviation, DysonSeries, PropagatorOrder,
};
use entangled_algebra::exact;
use entangled_algebra::fock::{
    check_c_squared, check_module_relation, check_residual_sweep, compare_representations, for_each_nonvanishing_word,
    generator_alphabet,
};
use entangled_algebra::oracle::{
    build_oracle, cross_validate, oracle_check_relation, summarize_moments, write_dump, RELATION_TOL,
};
use entangled_algebra::report::CheckReport;
use entangled_algebra::{EntangledAlgebra, Error};

const DYSON_TOL: f64 = 1e-8;

#[derive(Parser, Debug)]
#[command(name = "entangled", version, about = "Entangled system-noise algebra checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args, Debug)]
struct Opts {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Longest word for moments and representation comparison.
    #[arg(long, global = true)]
    max_word_len: Option<usize>,
    /// Highest entangled-vector order (relations) or Dyson order.
    #[arg(long, global = true)]
    max_order: Option<usize>,
    /// Oracle occupation cutoff per mode.
    #[arg(long, global = true)]
    nmax: Option<usize>,
    /// Numeric tolerance for oracle comparisons.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Skip the genericity gate (counterexample searches).
    #[arg(long, global = true)]
    force: bool,
    /// Plain-text summary instead of JSON.
    #[arg(long, global = true)]
    text: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check genericity and list Bohr frequencies.
    Validate,
    /// Check c² = 0, the Fock-module relation and the oracle relation.
    Relations,
    /// Vacuum moments of words, symbolic against oracle.
    Moments {
        /// Word such as "c(1,t0,k0) c*(1,t0,k0)"; repeatable. Defaults to the config's
        /// words, else every non-vanishing word up to --max-word-len.
        #[arg(long)]
        word: Vec<String>,
    },
    /// Compare the direct, tensor and doubly factorized representations.
    CompareReps,
    /// Per-order Dyson propagator elements, symbolic against oracle.
    Dyson,
    /// Write the oracle matrices as a binary blob and print its header.
    OracleDump {
        #[arg(long)]
        out: PathBuf,
    },
}

enum Failure {
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

struct Outcome {
    passed: bool,
    json: Value,
    text: Vec<String>,
}

impl Outcome {
    fn from_reports(command: &str, extra: Value, reports: &[CheckReport]) -> Self {
        let passed = reports.iter().all(CheckReport::passed);
        let mut json = json!({ "command": command, "passed": passed, "reports": reports });
        if let (Value::Object(map), Value::Object(more)) = (&mut json, extra) {
            map.extend(more);
        }
        Outcome {
            passed,
            json,
            text: reports.iter().map(CheckReport::summary).collect(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            let body = if cli.opts.text {
                let mut lines = outcome.text.clone();
                lines.push(if outcome.passed { "PASS" } else { "FAIL" }.into());
                lines.join("\n")
            } else {
                serde_json::to_string_pretty(&outcome.json).expect("serializable")
            };
            emit(&body);
            ExitCode::from(if outcome.passed { 0 } else { 1 })
        }
        Err(Failure::Input(message)) => {
            if cli.opts.text {
                eprintln!("error: {message}");
            } else {
                emit(&serde_json::to_string_pretty(&json!({ "error": message })).expect("serializable"));
            }
            ExitCode::from(2)
        }
    }
}

/// Writes the report; a closed pipe (`| head`) is not an error.
fn emit(body: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{body}");
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let path = cli
        .opts
        .config
        .as_ref()
        .ok_or_else(|| Failure::Input("--config is required".into()))?;
    let config = RunConfig::from_path(path)?;
    let opts = &cli.opts;
    if opts.nmax == Some(0) || opts.max_word_len == Some(0) {
        return Err(Failure::Input("bounds must be positive".into()));
    }
    if let Some(tol) = opts.tol {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Failure::Input(format!("tolerance must be positive, got {tol}")));
        }
    }
    match &cli.command {
        Command::Validate => Ok(validate(&config)),
        other => {
            let system = match config.system(opts.force) {
                Ok(system) => system,
                Err(rejection) => return Ok(rejected(rejection)),
            };
            let alg = config.algebra(system)?;
            match other {
                Command::Relations => relations(&config, opts, &alg),
                Command::Moments { word } => moments(&config, opts, &alg, word),
                Command::CompareReps => compare_reps(&config, opts, &alg),
                Command::Dyson => dyson(&config, opts, &alg),
                Command::OracleDump { out } => oracle_dump(&config, opts, &alg, out),
                Command::Validate => unreachable!(),
            }
        }
    }
}

fn rejected(report: entangled_algebra::system::RejectionReport) -> Outcome {
    let text = report
        .rejections
        .iter()
        .map(|r| format!("rejected: {}", serde_json::to_string(r).expect("serializable")))
        .collect();
    Outcome {
        passed: false,
        json: json!({ "generic": false, "rejections": report.rejections }),
        text,
    }
}

fn validate(config: &RunConfig) -> Outcome {
    match config.system(false) {
        Err(report) => {
            let mut outcome = rejected(report);
            outcome.json["command"] = json!("validate");
            outcome
        }
        Ok(system) => {
            let frequencies: Vec<Value> = system
                .frequency_values()
                .map(|w| {
                    let f = system.frequency(w).expect("listed frequency");
                    json!({ "omega": exact::format_rational(w), "lower": f.lower, "upper": f.upper })
                })
                .collect();
            let text = std::iter::once(format!(
                "generic: dimension {} with {} Bohr frequencies",
                system.dimension(),
                frequencies.len()
            ))
            .chain(frequencies.iter().map(|f| {
                format!(
                    "  ω = {}: {} → {}",
                    f["omega"].as_str().unwrap(),
                    f["lower"].as_str().unwrap(),
                    f["upper"].as_str().unwrap()
                )
            }))
            .collect();
            Outcome {
                passed: true,
                json: json!({
                    "command": "validate",
                    "generic": true,
                    "dimension": system.dimension(),
                    "frequency_count": frequencies.len(),
                    "frequencies": frequencies,
                }),
                text,
            }
        }
    }
}

fn nmax(config: &RunConfig, opts: &Opts) -> usize {
    opts.nmax.unwrap_or(config.nmax)
}

fn relations(config: &RunConfig, opts: &Opts, alg: &EntangledAlgebra) -> Result<Outcome, Failure> {
    let max_order = opts.max_order.unwrap_or(config.max_order);
    let tol = opts.tol.or(config.tol).unwrap_or(RELATION_TOL);
    let orderer = alg.orderer();
    let rep = build_oracle(alg, nmax(config, opts))?;
    let reports = vec![
        check_c_squared(alg),
        check_module_relation(alg, &orderer, max_order, opts.force)?,
        check_residual_sweep(alg, &orderer, max_order),
        oracle_check_relation(&rep, max_order.min(nmax(config, opts)), tol)?,
    ];
    Ok(Outcome::from_reports(
        "relations",
        json!({ "generic": alg.system().is_certified() }),
        &reports,
    ))
}

fn moments(config: &RunConfig, opts: &Opts, alg: &EntangledAlgebra, requested: &[String]) -> Result<Outcome, Failure> {
    let tol = opts.tol.or(config.tol).unwrap_or(RELATION_TOL);
    let specs = if requested.is_empty() { &config.words } else { requested };
    let words: Vec<Vec<Entangled>> = if specs.is_empty() {
        let max_len = opts.max_word_len.unwrap_or(config.max_word_len);
        let mut words = vec![Vec::new()];
        for_each_nonvanishing_word(alg, &generator_alphabet(alg), max_len, |w| words.push(w.to_vec()));
        words
    } else {
        specs
            .iter()
            .map(|s| parse_word(s, alg.labels()))
            .collect::<Result<_, _>>()?
    };
    let rep = build_oracle(alg, nmax(config, opts))?;
    let rows = cross_validate(alg, &alg.orderer(), &rep, &words)?;
    let summary = summarize_moments(&rows, tol);
    let mut outcome = Outcome::from_reports("moments", json!({ "moments": rows }), std::slice::from_ref(&summary));
    if !requested.is_empty() || !config.words.is_empty() {
        outcome.text.extend(
            rows.iter()
                .map(|r| format!("  {:<40} deviation {:.3e}", r.word, r.max_deviation)),
        );
    }
    Ok(outcome)
}

fn compare_reps(config: &RunConfig, opts: &Opts, alg: &EntangledAlgebra) -> Result<Outcome, Failure> {
    let max_len = opts.max_word_len.unwrap_or(config.max_word_len);
    match compare_representations(alg, &alg.orderer(), max_len) {
        Ok(report) => Ok(Outcome::from_reports("compare-reps", json!({}), &[report])),
        Err(Error::NotGeneric(message)) => {
            let mut report = CheckReport::new("compare_representations").param("max_word_len", max_len);
            report.violation(json!({ "not_generic": message }));
            Ok(Outcome::from_reports("compare-reps", json!({}), &[report]))
        }
        Err(e) => Err(e.into()),
    }
}

fn dyson(config: &RunConfig, opts: &Opts, alg: &EntangledAlgebra) -> Result<Outcome, Failure> {
    let spec = config.interaction(alg)?;
    let n_max = opts.max_order.unwrap_or(config.max_order);
    let tol = opts.tol.or(config.tol).unwrap_or(DYSON_TOL);
    let t_end = spec.grid_len() - 1;
    let rep = build_oracle(alg, nmax(config, opts))?;

    let mut structure = CheckReport::new("dyson_structure").param("max_order", n_max);
    if !depends_only_on_entangled(alg, &spec, n_max, t_end)? {
        structure.violation(json!({ "reason": "non-entangled factor in expansion" }));
    }

    let states: Vec<(Vec<_>, Vec<_>)> = match &config.psi {
        Some(psi) => vec![(psi.clone(), config.psi_prime.clone().unwrap_or_else(|| psi.clone()))],
        None => (0..alg.dim())
            .flat_map(|i| (0..alg.dim()).map(move |j| (i, j)))
            .map(|(i, j)| (alg.system().basis_vector(i), alg.system().basis_vector(j)))
            .collect(),
    };
    for (psi, _) in &states {
        let norm = psi.iter().fold(exact::integer(0), |acc, z| acc + exact::norm_sqr(z));
        if norm != exact::integer(1) {
            return Err(Error::NotNormalized.into());
        }
    }

    let mut elements = CheckReport::new("dyson_oracle")
        .param("tol", tol)
        .param("max_order", n_max);
    elements.deviation(0.0);
    let series = DysonSeries::new(alg, &spec, n_max, t_end)?;
    let mut rows = Vec::new();
    let mut text = Vec::new();
    // vacuum bra, then one emitted quantum per on-shell grid label
    let mut bras: Vec<Vec<Entangled>> = vec![Vec::new()];
    bras.extend(
        alg.labels()
            .on_shell_labels()
            .into_iter()
            .filter(|l| (l.time as usize) < spec.grid_len())
            .map(|l| vec![Entangled::c_dag(l)]),
    );
    for bra in &bras {
        let bra_text = entangled_algebra::algebra::render_word(bra, alg.labels());
        for (psi, psi_prime) in &states {
            let orders = propagator_elements_with_bra(alg, &spec, &rep, &series, bra, psi, psi_prime)?;
            for o in &orders {
                elements.count("elements", 1);
                if !o.symbolic_zero {
                    elements.count("elements_nonzero", 1);
                }
                elements.deviation(o.deviation);
                let parity_broken = bra.is_empty() && o.order % 2 == 1 && !o.symbolic_zero;
                if o.deviation > tol || parity_broken {
                    elements.violation(
                        json!({ "bra": bra_text, "order": o.order, "deviation": o.deviation, "symbolic": o.symbolic }),
                    );
                }
                if bra.is_empty() || !o.symbolic_zero {
                    text.push(element_line(&bra_text, o));
                }
            }
            rows.push(json!({
                "bra_word": bra_text,
                "psi": psi.iter().map(exact::format_complex).collect::<Vec<_>>(),
                "psi_prime": psi_prime.iter().map(exact::format_complex).collect::<Vec<_>>(),
                "orders": orders,
            }));
        }
    }
    let unitarity: Vec<f64> = states
        .iter()
        .map(|(psi, _)| unitarity_deviation(alg, &spec, &rep, psi, n_max, t_end))
        .collect::<Result<_, _>>()?;

    let mut outcome = Outcome::from_reports(
        "dyson",
        json!({
            "depends_only_on_entangled": structure.passed(),
            "t_end": alg.labels().times()[t_end],
            "elements": rows,
            "unitarity_deviation": unitarity,
        }),
        &[structure, elements],
    );
    outcome.text.extend(text);
    Ok(outcome)
}

fn element_line(bra: &str, o: &PropagatorOrder) -> String {
    format!(
        "  ⟨{bra}| n={} {:>14}  oracle {:+.6e}{:+.6e}i  deviation {:.3e}",
        o.order, o.symbolic, o.oracle_value[0], o.oracle_value[1], o.deviation
    )
}

fn oracle_dump(config: &RunConfig, opts: &Opts, alg: &EntangledAlgebra, out: &PathBuf) -> Result<Outcome, Failure> {
    let rep = build_oracle(alg, nmax(config, opts))?;
    let file = std::fs::File::create(out).map_err(|e| Failure::Input(format!("{}: {e}", out.display())))?;
    let mut writer = std::io::BufWriter::new(file);
    let header = write_dump(&rep, &mut writer).map_err(|e| Failure::Input(e.to_string()))?;
    Ok(Outcome {
        passed: true,
        text: vec![format!(
            "wrote {} matrices of dimension {} to {}",
            header.matrices.len(),
            header.total_dim,
            out.display()
        )],
        json: json!({ "command": "oracle-dump", "header": header }),
    })
}
