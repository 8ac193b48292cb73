//! Entangled number vectors, the `B(H_S)`-valued inner product, and mechanical
//! checks of the module relations `c_L c*_{L'} = γ(L,L') σ⁺_ω σ⁻_ω` on the Fock module.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::json;

use crate::algebra::{
    render_word, Entangled, EntangledAlgebra, NoiseLabel, NormalOrderer, OperatorValue, PiScalar, Polynomial,
    ScalarExpr,
};
use crate::error::{Error, Result};
use crate::exact::{self, ComplexRational};
use crate::report::CheckReport;
use crate::representations::{vacuum_in, Representation};

/// `∏ c*_{L_n} |0⟩`, leftmost creator applied last. The empty list is the vacuum.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct EntangledVector {
    pub creators: Vec<NoiseLabel>,
}

impl EntangledVector {
    pub fn vacuum() -> Self {
        Self::default()
    }

    pub fn new(creators: Vec<NoiseLabel>) -> Self {
        Self { creators }
    }

    pub fn order(&self) -> usize {
        self.creators.len()
    }

    pub fn word(&self) -> Vec<Entangled> {
        self.creators.iter().map(|l| Entangled::c_dag(*l)).collect()
    }
}

/// `γ(L, L') = 2π·[ω=ω'][t=t'][k=k'][ω(k)=ω]` under the Kronecker convention.
pub fn gamma(alg: &EntangledAlgebra, a: NoiseLabel, b: NoiseLabel) -> Option<ScalarExpr> {
    (a == b && alg.labels().is_on_shell(a)).then(ScalarExpr::two_pi)
}

/// `⟨ξ, η⟩ = ⟨0| word(ξ)† word(η) |0⟩`.
pub fn module_inner_product(
    alg: &EntangledAlgebra,
    orderer: &NormalOrderer<'_>,
    xi: &EntangledVector,
    eta: &EntangledVector,
) -> OperatorValue {
    let bra = alg.word_polynomial(&xi.word()).adjoint();
    let ket = alg.word_polynomial(&eta.word());
    orderer.vacuum_expectation(&bra.multiply(&ket).expect("same algebra"))
}

/// Visits every word over `alphabet` of length `≤ max_len` whose system product is
/// nonzero. A zero prefix zeroes every extension, so those subtrees are skipped;
/// returns how many words were skipped that way.
pub fn for_each_nonvanishing_word(
    alg: &EntangledAlgebra,
    alphabet: &[Entangled],
    max_len: usize,
    mut visit: impl FnMut(&[Entangled]),
) -> u64 {
    fn subtree(n: u64, depth: usize) -> u64 {
        (0..=depth as u32).map(|j| n.pow(j)).sum()
    }
    fn walk(
        alg: &EntangledAlgebra,
        alphabet: &[Entangled],
        max_len: usize,
        word: &mut Vec<Entangled>,
        prefix: &crate::SystemOperator,
        visit: &mut impl FnMut(&[Entangled]),
        skipped: &mut u64,
    ) {
        visit(word);
        if word.len() == max_len {
            return;
        }
        for g in alphabet {
            let next = prefix.mul(alg.system_factor(*g));
            if next.is_zero() {
                *skipped += subtree(alphabet.len() as u64, max_len - word.len() - 1);
                continue;
            }
            word.push(*g);
            walk(alg, alphabet, max_len, word, &next, visit, skipped);
            word.pop();
        }
    }
    let mut skipped = 0;
    let identity = crate::SystemOperator::identity(alg.dim());
    walk(
        alg,
        alphabet,
        max_len,
        &mut Vec::new(),
        &identity,
        &mut visit,
        &mut skipped,
    );
    skipped
}

pub fn creator_alphabet(alg: &EntangledAlgebra) -> Vec<Entangled> {
    alg.labels().all_labels().into_iter().map(Entangled::c_dag).collect()
}

/// All `c_L` then all `c*_L`.
pub fn generator_alphabet(alg: &EntangledAlgebra) -> Vec<Entangled> {
    let labels = alg.labels().all_labels();
    labels
        .iter()
        .map(|l| Entangled::c(*l))
        .chain(labels.iter().map(|l| Entangled::c_dag(*l)))
        .collect()
}

fn labels_json(alg: &EntangledAlgebra, labels: &[NoiseLabel]) -> Vec<String> {
    labels.iter().map(|l| alg.labels().display(*l).to_string()).collect()
}

/// `c_L² = 0` (and `c*_L² = 0`) for every declared label.
pub fn check_c_squared(alg: &EntangledAlgebra) -> CheckReport {
    let mut report = CheckReport::new("c_squared");
    for label in alg.labels().all_labels() {
        let c = alg.entangled_annihilate(label).expect("declared label");
        let square = c.multiply(&c).expect("same algebra");
        let adjoint_square = square.adjoint();
        report.count("labels_checked", 1);
        if !square.is_zero() || !adjoint_square.is_zero() {
            report.violation(json!({ "label": alg.labels().display(label).to_string() }));
        }
    }
    report
}

/// `(c_L c*_{L'} − γ(L,L') σ⁺_ω σ⁻_ω)·word(v)|0⟩` after normal ordering.
pub fn relation_residual(
    alg: &EntangledAlgebra,
    orderer: &NormalOrderer<'_>,
    l: NoiseLabel,
    lp: NoiseLabel,
    v: &Polynomial,
) -> Polynomial {
    let pair = alg.word_polynomial(&[Entangled::c(l), Entangled::c_dag(lp)]);
    let mut lhs = pair.multiply(v).expect("same algebra");
    if let Some(g) = gamma(alg, l, lp) {
        let rhs = Polynomial::from_system(alg.projector(l))
            .scale(&g)
            .multiply(v)
            .expect("same algebra");
        lhs = lhs.sub(&rhs).expect("same algebra");
    }
    orderer.apply_to_vacuum(&lhs)
}

/// Checks the module relation on every entangled vector of order `≤ max_order` and
/// every label pair. Non-generic systems are refused unless `force` is set.
pub fn check_module_relation(
    alg: &EntangledAlgebra,
    orderer: &NormalOrderer<'_>,
    max_order: usize,
    force: bool,
) -> Result<CheckReport> {
    if !alg.system().is_certified() && !force {
        return Err(Error::NotGeneric("module relation requires a generic system".into()));
    }
    let labels = alg.labels().all_labels();
    let mut report = CheckReport::new("module_relation")
        .param("max_order", max_order)
        .param("generic", alg.system().is_certified());
    let skipped = for_each_nonvanishing_word(alg, &creator_alphabet(alg), max_order, |word| {
        report.count("vectors_nonvanishing", 1);
        let v = alg.word_polynomial(word);
        for &l in &labels {
            for &lp in &labels {
                report.count("pairs_checked", 1);
                let residual = relation_residual(alg, orderer, l, lp, &v);
                if !residual.is_zero() {
                    report.violation(json!({
                        "annihilator": alg.labels().display(l).to_string(),
                        "creator": alg.labels().display(lp).to_string(),
                        "vector": render_word(word, alg.labels()),
                        "residual_terms": residual.len(),
                    }));
                }
            }
        }
    });
    report.count("vectors_vanishing", skipped);
    let nonvanishing = report.get_count("vectors_nonvanishing");
    report.count("vectors", nonvanishing + skipped);
    Ok(report)
}

/// `σ⁺_ω σ⁻_{ω'} b*_{L'} b_L · word(v)|0⟩` normal-orders to zero.
pub fn check_residual_vanishing(
    alg: &EntangledAlgebra,
    orderer: &NormalOrderer<'_>,
    l: NoiseLabel,
    lp: NoiseLabel,
    v: &EntangledVector,
) -> bool {
    let system = alg.sigma_plus(l).mul(alg.sigma_minus(lp));
    let op = Polynomial::monomial(
        ScalarExpr::one(),
        system,
        vec![Entangled::c_dag(lp).noise(), Entangled::c(l).noise()],
    );
    let applied = op.multiply(&alg.word_polynomial(&v.word())).expect("same algebra");
    orderer.apply_to_vacuum(&applied).is_zero()
}

/// Sweeps [`check_residual_vanishing`] over all label pairs and vectors up to `max_order`.
pub fn check_residual_sweep(alg: &EntangledAlgebra, orderer: &NormalOrderer<'_>, max_order: usize) -> CheckReport {
    let labels = alg.labels().all_labels();
    let mut report = CheckReport::new("residual_vanishing").param("max_order", max_order);
    let skipped = for_each_nonvanishing_word(alg, &creator_alphabet(alg), max_order, |word| {
        let v = EntangledVector::new(word.iter().map(|g| g.label).collect());
        for &l in &labels {
            for &lp in &labels {
                report.count("cases_checked", 1);
                if !check_residual_vanishing(alg, orderer, l, lp, &v) {
                    report.violation(json!({
                        "annihilator": alg.labels().display(l).to_string(),
                        "creator": alg.labels().display(lp).to_string(),
                        "vector": labels_json(alg, &v.creators),
                    }));
                }
            }
        }
    });
    report.count("vectors_vanishing", skipped);
    report
}

/// `m_n = ⟨ψ⊗Ω|(c_L + c*_L)^n|ψ⊗Ω⟩` for `n = 0..=n_max`, exact in 2π.
pub fn moment_sequence(
    alg: &EntangledAlgebra,
    orderer: &NormalOrderer<'_>,
    label: NoiseLabel,
    psi: &[ComplexRational],
    n_max: usize,
) -> Result<Vec<PiScalar>> {
    if psi.len() != alg.dim() {
        return Err(Error::DimensionMismatch {
            left: alg.dim(),
            right: psi.len(),
        });
    }
    let norm = psi.iter().fold(exact::integer(0), |acc, z| acc + exact::norm_sqr(z));
    if norm != exact::integer(1) {
        return Err(Error::NotNormalized);
    }
    let field = alg
        .entangled_annihilate(label)?
        .add(&alg.entangled_create(label)?)
        .expect("same algebra");
    let mut state = Polynomial::identity(alg.dim());
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        if n > 0 {
            // stay a vector: (c + c*)·state|0⟩, annihilators acting on |0⟩ dropped
            state = orderer.apply_to_vacuum(&field.multiply(&state).expect("same algebra"));
        }
        out.push(state.scalar_part().sandwich(psi, psi));
    }
    Ok(out)
}

/// The three vacuum expectations of `word`, or `RepresentationMismatch`.
pub fn compare_word(alg: &EntangledAlgebra, orderer: &NormalOrderer<'_>, word: &[Entangled]) -> Result<OperatorValue> {
    let direct = vacuum_in(Representation::Direct, alg, orderer, word);
    for r in [Representation::Tensor, Representation::DoublyFactorized] {
        if vacuum_in(r, alg, orderer, word) != direct {
            return Err(Error::RepresentationMismatch(render_word(word, alg.labels())));
        }
    }
    Ok(direct)
}

/// Direct, tensor and doubly factorized representations agree exactly on every word of
/// length `≤ max_len`. Words whose system product vanishes are zero in all three.
pub fn compare_representations(
    alg: &EntangledAlgebra,
    orderer: &NormalOrderer<'_>,
    max_len: usize,
) -> Result<CheckReport> {
    if !alg.system().is_certified() {
        return Err(Error::NotGeneric(
            "representation comparison requires a generic system".into(),
        ));
    }
    let mut report = CheckReport::new("compare_representations").param("max_word_len", max_len);
    let skipped = for_each_nonvanishing_word(alg, &generator_alphabet(alg), max_len, |word| {
        report.count("words_compared", 1);
        match compare_word(alg, orderer, word) {
            Ok(value) if !value.is_zero() => report.count("words_nonzero", 1),
            Ok(_) => {}
            Err(_) => report.violation(json!({ "word": render_word(word, alg.labels()) })),
        }
    });
    report.count("words_vanishing_system_product", skipped);
    Ok(report)
}

/// `(⟨ξ₁₂, ξ₁₂⟩, ⟨ξ₁₂, ξ₂₁⟩)` with `ξ_ab = c*_{L_a} c*_{L_b} |0⟩`.
pub fn order_sensitivity(
    alg: &EntangledAlgebra,
    orderer: &NormalOrderer<'_>,
    l1: NoiseLabel,
    l2: NoiseLabel,
) -> (OperatorValue, OperatorValue) {
    let xi12 = EntangledVector::new(vec![l1, l2]);
    let xi21 = EntangledVector::new(vec![l2, l1]);
    (
        module_inner_product(alg, orderer, &xi12, &xi12),
        module_inner_product(alg, orderer, &xi12, &xi21),
    )
}

/// Numeric block Gram matrix `[⟨ξ_i, ξ_j⟩]`, `(n·d) × (n·d)`.
pub fn gram_block_matrix(
    alg: &EntangledAlgebra,
    orderer: &NormalOrderer<'_>,
    family: &[EntangledVector],
) -> DMatrix<Complex64> {
    let d = alg.dim();
    let n = family.len();
    let mut out = DMatrix::zeros(n * d, n * d);
    for (i, xi) in family.iter().enumerate() {
        for (j, eta) in family.iter().enumerate().skip(i) {
            let block = module_inner_product(alg, orderer, xi, eta).to_complex64();
            for a in 0..d {
                for b in 0..d {
                    out[(i * d + a, j * d + b)] = block[(a, b)];
                    out[(j * d + b, i * d + a)] = block[(a, b)].conj();
                }
            }
        }
    }
    out
}

/// `G_ij = ⟨ψ| ⟨ξ_i, ξ_j⟩ |ψ⟩` from a block Gram matrix.
pub fn compress_gram(block: &DMatrix<Complex64>, d: usize, psi: &[Complex64]) -> DMatrix<Complex64> {
    let n = block.nrows() / d;
    DMatrix::from_fn(n, n, |i, j| {
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..d {
            for b in 0..d {
                acc += psi[a].conj() * block[(i * d + a, j * d + b)] * psi[b];
            }
        }
        acc
    })
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &DMatrix<Complex64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    let hermitian = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    hermitian
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Dispersion, LabelSpace};
    use crate::exact::integer;
    use crate::system::{GenericSystem, Spectrum};
    use crate::SystemOperator;

    fn algebra(energies: &[i64]) -> EntangledAlgebra {
        let system = GenericSystem::bypass_validation(&Spectrum::from_integers(energies).unwrap());
        let labels = LabelSpace::new(
            &system,
            None,
            vec!["t0".into(), "t1".into()],
            vec!["k0".into(), "k1".into()],
            &Dispersion::from_pairs([("k0", integer(1)), ("k1", integer(2))]),
        )
        .unwrap();
        EntangledAlgebra::new(system, labels).unwrap()
    }

    #[test]
    fn vacuum_norm_is_identity() {
        let alg = algebra(&[0, 1, 3]);
        let v = EntangledVector::vacuum();
        assert_eq!(
            module_inner_product(&alg, &alg.orderer(), &v, &v),
            OperatorValue::from_operator(SystemOperator::identity(3))
        );
    }

    #[test]
    fn one_particle_norm_is_two_pi_projector() {
        let alg = algebra(&[0, 1, 3]);
        let l = NoiseLabel::new(1, 0, 1);
        let v = EntangledVector::new(vec![l]);
        let value = module_inner_product(&alg, &alg.orderer(), &v, &v);
        assert_eq!(value, OperatorValue::scaled(&alg.projector(l), &ScalarExpr::two_pi()));
        assert!(value.part(1).unwrap().is_hermitian());
    }

    #[test]
    fn swapped_two_particle_overlap_vanishes_for_distinct_frequencies() {
        let alg = algebra(&[0, 1, 3]);
        let l1 = NoiseLabel::new(0, 0, 0);
        let l2 = NoiseLabel::new(1, 1, 1);
        let (same, swapped) = order_sensitivity(&alg, &alg.orderer(), l1, l2);
        assert!(swapped.is_zero());
        assert!(!same.is_zero());
        // ξ₁₂ = σ⁻₁σ⁻₂ ⊗ b*b*|0⟩ = |0⟩⟨3| ⊗ …, so ⟨ξ₁₂,ξ₁₂⟩ = (2π)²|3⟩⟨3|
        assert_eq!(
            same,
            OperatorValue::scaled(&SystemOperator::unit(3, 2, 2), &ScalarExpr::new(exact::cone(), 2))
        );
    }

    #[test]
    fn c_squared_vanishes_for_generic_but_not_degenerate() {
        assert!(check_c_squared(&algebra(&[0, 1, 3])).passed());
        assert!(!check_c_squared(&algebra(&[0, 1, 2])).passed());
    }

    #[test]
    fn mixed_frequency_product_is_nonzero() {
        let alg = algebra(&[0, 1, 3]);
        let c1 = alg.entangled_annihilate(NoiseLabel::new(0, 0, 0)).unwrap();
        let c2 = alg.entangled_annihilate(NoiseLabel::new(1, 0, 1)).unwrap();
        // σ⁺₂σ⁺₁ = |3⟩⟨1|·|1⟩⟨0| ≠ 0
        assert!(!c2.multiply(&c1).unwrap().is_zero());
    }

    #[test]
    fn module_relation_holds_on_vacuum_and_generic_system() {
        let alg = algebra(&[0, 1, 3]);
        let report = check_module_relation(&alg, &alg.orderer(), 0, false).unwrap();
        assert!(report.passed());
        assert_eq!(report.get_count("pairs_checked"), 144);
        assert!(check_module_relation(&alg, &alg.orderer(), 3, false).unwrap().passed());
    }

    #[test]
    fn module_relation_refuses_and_then_fails_degenerate_system() {
        let alg = algebra(&[0, 1, 2]);
        assert!(matches!(
            check_module_relation(&alg, &alg.orderer(), 2, false),
            Err(Error::NotGeneric(_))
        ));
        let report = check_module_relation(&alg, &alg.orderer(), 2, true).unwrap();
        assert!(!report.passed());
    }

    #[test]
    fn residual_vanishing_on_vacuum_and_one_particle() {
        let alg = algebra(&[0, 1, 3]);
        let l = NoiseLabel::new(0, 1, 0);
        assert!(check_residual_vanishing(
            &alg,
            &alg.orderer(),
            l,
            l,
            &EntangledVector::vacuum()
        ));
        assert!(check_residual_vanishing(
            &alg,
            &alg.orderer(),
            l,
            l,
            &EntangledVector::new(vec![l])
        ));
        assert!(check_residual_sweep(&alg, &alg.orderer(), 3).passed());
    }

    #[test]
    fn residual_survives_on_degenerate_spectrum() {
        let alg = algebra(&[0, 1, 2]);
        let l = NoiseLabel::new(0, 0, 0);
        // σ⁺₁σ⁻₁ σ⁻₁ = |1⟩⟨2| ≠ 0 when ω = 1 is shared by two transitions
        assert!(!check_residual_vanishing(
            &alg,
            &alg.orderer(),
            l,
            l,
            &EntangledVector::new(vec![l])
        ));
    }

    #[test]
    fn moments_start_at_one_and_odd_ones_vanish() {
        let alg = algebra(&[0, 1]);
        let l = NoiseLabel::new(0, 0, 0);
        let psi = vec![
            exact::cq(exact::rational(3, 5), exact::integer(0)),
            exact::cq(exact::integer(0), exact::rational(4, 5)),
        ];
        let m = moment_sequence(&alg, &alg.orderer(), l, &psi, 6).unwrap();
        assert_eq!(m[0].coeff(0), exact::cone());
        for n in [1, 3, 5] {
            assert!(m[n].is_zero());
        }
        assert!(matches!(
            moment_sequence(&alg, &alg.orderer(), l, &[exact::cone(), exact::cone()], 2),
            Err(Error::NotNormalized)
        ));
    }

    #[test]
    fn representations_agree_on_short_words() {
        let alg = algebra(&[0, 1, 3]);
        let report = compare_representations(&alg, &alg.orderer(), 4).unwrap();
        assert!(report.passed(), "{:?}", report.violations);
        assert!(report.get_count("words_nonzero") > 0);
    }

    #[test]
    fn pruned_and_visited_words_cover_everything() {
        let alg = algebra(&[0, 1, 3]);
        let alphabet = generator_alphabet(&alg);
        let mut visited = 0u64;
        let skipped = for_each_nonvanishing_word(&alg, &alphabet, 3, |_| visited += 1);
        let n = alphabet.len() as u64;
        assert_eq!(visited + skipped, 1 + n + n * n + n * n * n);
    }

    #[test]
    fn gram_blocks_are_positive() {
        let alg = algebra(&[0, 1, 3]);
        let family: Vec<EntangledVector> = [
            vec![],
            vec![NoiseLabel::new(0, 0, 0)],
            vec![NoiseLabel::new(0, 0, 0), NoiseLabel::new(1, 0, 1)],
        ]
        .into_iter()
        .map(EntangledVector::new)
        .collect();
        let block = gram_block_matrix(&alg, &alg.orderer(), &family);
        assert!(min_eigenvalue(&block) > -1e-10);
        let psi = [
            Complex64::new(0.6, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.8),
        ];
        assert!(min_eigenvalue(&compress_gram(&block, 3, &psi)) > -1e-10);
    }
}
