//! Acceptance criteria 1–9, one PASS/FAIL line each. Runs as a plain binary so the
//! lines show up in `cargo test` output; exits non-zero if any criterion fails.

use std::time::{Duration, Instant};

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use entangled_algebra::algebra::{CommutatorRule, Dispersion, Entangled, LabelSpace, NoiseLabel, NormalOrderer};
use entangled_algebra::dyson::{
    depends_only_on_entangled, dyson_expansion, propagator_elements_with_bra, DysonSeries, InteractionSpec,
};
use entangled_algebra::exact::{self, integer, rational};
use entangled_algebra::fock::{
    check_c_squared, check_module_relation, check_residual_sweep, compare_representations, compress_gram,
    generator_alphabet, gram_block_matrix, min_eigenvalue, order_sensitivity, EntangledVector,
};
use entangled_algebra::oracle::{
    build_oracle, cross_validate, oracle_check_relation, summarize_moments, OracleRep, CONSTRUCTION_TOL, RELATION_TOL,
};
use entangled_algebra::system::Rejection;
use entangled_algebra::{validate_generic, EntangledAlgebra, GenericSystem, Spectrum};

const DYSON_TOL: f64 = 1e-8;
const GRAM_TOL: f64 = -1e-10;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn algebra(
    energies: &[i64],
    omegas: Option<&[i64]>,
    times: usize,
    momenta: &[(&str, i64)],
    force: bool,
) -> EntangledAlgebra {
    let spectrum = Spectrum::from_integers(energies).unwrap();
    let system = if force {
        GenericSystem::bypass_validation(&spectrum)
    } else {
        validate_generic(&spectrum).unwrap()
    };
    let labels = LabelSpace::new(
        &system,
        omegas.map(|w| w.iter().map(|&x| integer(x)).collect()),
        (0..times).map(|t| format!("t{t}")).collect(),
        momenta.iter().map(|(k, _)| k.to_string()).collect(),
        &Dispersion::from_pairs(momenta.iter().map(|&(k, v)| (k, integer(v)))),
    )
    .unwrap();
    EntangledAlgebra::new(system, labels).unwrap()
}

const MOMENTA: [(&str, i64); 2] = [("k0", 1), ("k1", 2)];

/// `{0,1,3}` with every Bohr frequency, 2 times × 2 momenta.
fn theorem_system() -> EntangledAlgebra {
    algebra(&[0, 1, 3], None, 2, &MOMENTA, false)
}

/// The 2×2×2 label corpus: ω ∈ {1,2} of `{0,1,3}`, 2 times, 2 momenta.
fn corpus() -> EntangledAlgebra {
    algebra(&[0, 1, 3], Some(&[1, 2]), 2, &MOMENTA, false)
}

fn criterion_1() -> Outcome {
    let oscillator = Spectrum::from_integers(&[0, 1, 2, 3, 4, 5]).unwrap();
    let rejected = match validate_generic(&oscillator) {
        Err(report) => report
            .rejections
            .iter()
            .any(|r| matches!(r, Rejection::DuplicateBohrFrequency { value, multiplicity: 5, .. } if value == "1")),
        Ok(_) => false,
    };
    let accepted = validate_generic(&Spectrum::from_integers(&[0, 1, 3, 7]).unwrap())
        .map(|s| s.frequency_count())
        .ok();
    outcome(
        rejected && accepted == Some(6),
        format!("oscillator rejected citing ω=1 ×5: {rejected}; {{0,1,3,7}} frequencies: {accepted:?}"),
    )
}

/// Frobenius norm of `G²` from its action on every basis vector.
fn oracle_square_norm(rep: &OracleRep, g: Entangled) -> f64 {
    let mut total = 0.0;
    for i in 0..rep.total_dim() {
        let mut e = DVector::<Complex64>::zeros(rep.total_dim());
        e[i] = Complex64::new(1.0, 0.0);
        total += rep.apply(g, &rep.apply(g, &e)).norm_squared();
    }
    total.sqrt()
}

fn criterion_2() -> Outcome {
    let mut symbolic_ok = true;
    let mut labels_checked = 0;
    let mut worst: f64 = 0.0;
    for alg in [theorem_system(), corpus()] {
        let report = check_c_squared(&alg);
        symbolic_ok &= report.passed();
        labels_checked += report.get_count("labels_checked");
        let rep = build_oracle(&alg, 3).unwrap();
        for l in alg.labels().all_labels() {
            worst = worst.max(oracle_square_norm(&rep, Entangled::c(l)));
            worst = worst.max(oracle_square_norm(&rep, Entangled::c_dag(l)));
        }
    }
    outcome(
        symbolic_ok && worst < CONSTRUCTION_TOL,
        format!("symbolic c²=0 on {labels_checked} labels: {symbolic_ok}; max oracle ‖C²‖ = {worst:.1e}"),
    )
}

/// Symbolic relation check, residual sweep and oracle check at `max_order`.
fn theorem_checks(
    alg: &EntangledAlgebra,
    orderer: &NormalOrderer<'_>,
    max_order: usize,
    force: bool,
) -> (bool, bool, f64, u64) {
    let module = check_module_relation(alg, orderer, max_order, force).unwrap();
    let residual = check_residual_sweep(alg, orderer, max_order);
    let rep = build_oracle(alg, 3).unwrap();
    let oracle = oracle_check_relation(&rep, max_order, RELATION_TOL).unwrap();
    (
        module.passed() && residual.passed(),
        oracle.passed(),
        oracle.max_deviation.unwrap_or(0.0),
        module.get_count("pairs_checked"),
    )
}

fn criterion_3() -> Outcome {
    let alg = theorem_system();
    let (symbolic, oracle, deviation, pairs) = theorem_checks(&alg, &alg.orderer(), 3, false);

    let degenerate = algebra(&[0, 1, 2], None, 1, &[("k0", 1)], true);
    let module = check_module_relation(&degenerate, &degenerate.orderer(), 2, true).unwrap();
    let rep = build_oracle(&degenerate, 3).unwrap();
    let degenerate_oracle = oracle_check_relation(&rep, 2, RELATION_TOL).unwrap();
    let witness = !module.passed() && !degenerate_oracle.passed();
    outcome(
        symbolic && oracle && witness,
        format!(
            "{{0,1,3}} order ≤ 3: {pairs} symbolic pairs exact: {symbolic}, oracle max residual {deviation:.1e}; \
             {{0,1,2}} witnesses: {} symbolic, oracle residual {:.2e}",
            module.get_count("violations"),
            degenerate_oracle.max_deviation.unwrap_or(0.0)
        ),
    )
}

/// Fixed-seed sample: uniform words plus walks that keep the system product nonzero.
fn sample_words(alg: &EntangledAlgebra, count: usize, max_len: usize, seed: u64) -> Vec<Vec<Entangled>> {
    let alphabet = generator_alphabet(alg);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let len = rng.gen_range(0..=max_len);
        let word: Vec<Entangled> = if out.len() % 2 == 0 {
            (0..len).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect()
        } else {
            let mut word = Vec::new();
            let mut prefix = entangled_algebra::SystemOperator::identity(alg.dim());
            for _ in 0..len {
                let options: Vec<_> = alphabet
                    .iter()
                    .filter_map(|g| {
                        let next = prefix.mul(alg.system_factor(*g));
                        (!next.is_zero()).then_some((*g, next))
                    })
                    .collect();
                let (g, next) = options[rng.gen_range(0..options.len())].clone();
                word.push(g);
                prefix = next;
            }
            word
        };
        out.push(word);
    }
    out
}

fn oracle_equivalence(
    alg: &EntangledAlgebra,
    orderer: &NormalOrderer<'_>,
    rep: &OracleRep,
    words: &[Vec<Entangled>],
) -> (bool, f64, usize) {
    let rows = cross_validate(alg, orderer, rep, words).unwrap();
    let nonzero = rows.iter().filter(|r| !r.symbolic_exact.parts.is_empty()).count();
    let summary = summarize_moments(&rows, RELATION_TOL);
    (summary.passed(), summary.max_deviation.unwrap_or(0.0), nonzero)
}

fn criterion_4() -> Outcome {
    let alg = corpus();
    let full: u64 = (0..=6).map(|n| 16u64.pow(n)).sum();
    let words = sample_words(&alg, 1000, 6, 0x5eed);
    let rep = build_oracle(&alg, 3).unwrap();
    let (passed, deviation, nonzero) = oracle_equivalence(&alg, &alg.orderer(), &rep, &words);
    outcome(
        passed && words.len() >= 500 && nonzero > 0,
        format!(
            "{} of {full} words sampled (seed 0x5eed), {nonzero} with nonzero moment; max deviation {deviation:.1e}",
            words.len()
        ),
    )
}

fn criterion_5() -> Outcome {
    let alg = corpus();
    let report = compare_representations(&alg, &alg.orderer(), 6).unwrap();
    outcome(
        report.passed() && report.get_count("words_nonzero") > 0,
        format!(
            "length ≤ 6: {} words compared exactly, {} nonzero, {} pruned by zero system product, {} mismatches",
            report.get_count("words_compared"),
            report.get_count("words_nonzero"),
            report.get_count("words_vanishing_system_product"),
            report.get_count("violations")
        ),
    )
}

fn criterion_6() -> Outcome {
    let alg = corpus();
    let l1 = NoiseLabel::new(0, 0, 0);
    let l2 = NoiseLabel::new(1, 1, 1);
    let (same, swapped) = order_sensitivity(&alg, &alg.orderer(), l1, l2);
    let labels = alg.labels();
    outcome(
        same != swapped && !same.is_zero(),
        format!(
            "ξ = c*({}) c*({})|0⟩: ⟨ξ12,ξ12⟩ = {:?}, ⟨ξ12,ξ21⟩ zero: {}",
            labels.display(l1),
            labels.display(l2),
            same.to_json().parts,
            swapped.is_zero()
        ),
    )
}

fn criterion_7() -> Outcome {
    let g = [("1", (1, 1, 0, 1)), ("2", (0, 1, 1, 1)), ("3", (1, 2, -1, 3))];
    let spec_for = |alg: &EntangledAlgebra, points: usize| {
        let mut couplings = std::collections::BTreeMap::new();
        for (w, (re, d, im, e)) in g {
            for (k, _) in MOMENTA {
                couplings.insert(
                    (exact::parse_rational(w).unwrap(), k.to_string()),
                    exact::cq(rational(re, d), rational(im, e)),
                );
            }
        }
        InteractionSpec::new(alg, &couplings, points, rational(1, 4)).unwrap()
    };

    let structural_alg = algebra(&[0, 1, 3], None, 4, &MOMENTA, false);
    let structural = depends_only_on_entangled(&structural_alg, &spec_for(&structural_alg, 4), 4, 3).unwrap();

    let alg = algebra(&[0, 1, 3], None, 3, &MOMENTA, false);
    let spec = spec_for(&alg, 3);
    let rep = build_oracle(&alg, 3).unwrap();
    let mut tuples_ok = true;
    for n in 0..=3u64 {
        let expected = [1, 3, 3, 1][n as usize];
        tuples_ok &= dyson_expansion(&alg, &spec, n as usize, 2).unwrap().tuples == expected;
    }
    let series = DysonSeries::new(&alg, &spec, 3, 2).unwrap();
    let mut bras: Vec<Vec<Entangled>> = vec![Vec::new()];
    bras.extend(
        alg.labels()
            .on_shell_labels()
            .into_iter()
            .map(|l| vec![Entangled::c_dag(l)]),
    );
    let (mut worst, mut elements, mut nonzero, mut odd_ok) = (0.0f64, 0, 0, true);
    for bra in &bras {
        for i in 0..alg.dim() {
            for j in 0..alg.dim() {
                let psi = alg.system().basis_vector(i);
                let psi_prime = alg.system().basis_vector(j);
                for o in propagator_elements_with_bra(&alg, &spec, &rep, &series, bra, &psi, &psi_prime).unwrap() {
                    elements += 1;
                    worst = worst.max(o.deviation);
                    nonzero += usize::from(!o.symbolic_zero);
                    if bra.is_empty() && o.order % 2 == 1 {
                        odd_ok &= o.symbolic_zero;
                    }
                }
            }
        }
    }
    outcome(
        structural && tuples_ok && odd_ok && worst <= DYSON_TOL && nonzero > alg.dim(),
        format!(
            "entangled-only through order 4: {structural}; {elements} elements (orders ≤ 3, 3-point grid, {nonzero} nonzero) \
             max deviation {worst:.1e}; odd vacuum orders exactly zero: {odd_ok}; tuple counts C(3,n): {tuples_ok}"
        ),
    )
}

fn random_unit(rng: &mut ChaCha8Rng, d: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..d)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

fn criterion_8() -> Outcome {
    let alg = theorem_system();
    let orderer = alg.orderer();
    let labels = alg.labels().all_labels();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let vectors: Vec<EntangledVector> = (0..100)
        .map(|_| {
            let order = rng.gen_range(0..=3);
            EntangledVector::new((0..order).map(|_| labels[rng.gen_range(0..labels.len())]).collect())
        })
        .collect();
    let d = alg.dim();
    let mut worst = f64::INFINITY;
    let mut matrices = 0;
    for family in vectors.chunks(10) {
        let block = gram_block_matrix(&alg, &orderer, family);
        worst = worst.min(min_eigenvalue(&block));
        matrices += 1;
        let mut states: Vec<Vec<Complex64>> = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0))
                    .collect()
            })
            .collect();
        states.extend((0..5).map(|_| random_unit(&mut rng, d)));
        for psi in &states {
            worst = worst.min(min_eigenvalue(&compress_gram(&block, d, psi)));
            matrices += 1;
        }
    }
    outcome(
        worst >= GRAM_TOL,
        format!("100 vectors (seed 8) in 10 families, {matrices} Gram matrices; min eigenvalue {worst:.2e}"),
    )
}

fn criterion_9() -> Outcome {
    let theorem = theorem_system();
    let alg = corpus();
    let rep = build_oracle(&alg, 3).unwrap();
    let words = sample_words(&alg, 500, 6, 0x5eed);
    let mut lines = Vec::new();
    let mut all_caught = true;
    for (name, rule) in [
        ("without 2π", CommutatorRule::without_two_pi()),
        ("without on-shell", CommutatorRule::without_on_shell()),
        ("without time delta", CommutatorRule::without_time_delta()),
    ] {
        let mutant_theorem = NormalOrderer::new(theorem.labels()).with_rule(rule);
        let (symbolic, _, _, _) = theorem_checks(&theorem, &mutant_theorem, 2, false);
        let mutant = NormalOrderer::new(alg.labels()).with_rule(rule);
        let (oracle_ok, _, _) = oracle_equivalence(&alg, &mutant, &rep, &words);
        let reps_ok = compare_representations(&alg, &mutant, 4).unwrap().passed();
        let caught: Vec<&str> = [(!symbolic, "3"), (!oracle_ok, "4"), (!reps_ok, "5")]
            .into_iter()
            .filter_map(|(failed, c)| failed.then_some(c))
            .collect();
        all_caught &= !caught.is_empty();
        lines.push(format!(
            "{name} → fails {}",
            if caught.is_empty() {
                "none".into()
            } else {
                caught.join(",")
            }
        ));
    }
    outcome(all_caught, lines.join("; "))
}

type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        (1, "genericity gate", Duration::from_secs(1), criterion_1),
        (2, "c² = 0", Duration::from_secs(5), criterion_2),
        (3, "module relation theorem", Duration::from_secs(60), criterion_3),
        (4, "oracle equivalence", Duration::from_secs(120), criterion_4),
        (5, "representation equivalence", Duration::from_secs(60), criterion_5),
        (6, "order sensitivity", Duration::from_secs(1), criterion_6),
        (7, "Dyson structure", Duration::from_secs(60), criterion_7),
        (8, "Gram positivity", Duration::from_secs(30), criterion_8),
        (9, "mutation sensitivity", Duration::from_secs(60), criterion_9),
    ];
    let mut failures = 0;
    for (id, name, limit, check) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let passed = result.passed && elapsed < limit;
        failures += usize::from(!passed);
        println!(
            "criterion {id} [{}] {name} ({:.2}s, limit {}s): {}",
            if passed { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            limit.as_secs(),
            result.detail
        );
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
