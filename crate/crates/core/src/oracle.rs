//! Truncated Fock-space matrix model: the brute-force oracle for every symbolic identity.
//!
//! The total space is `H_S ⊗ F_1 ⊗ … ⊗ F_M`, one truncated bosonic mode per on-shell
//! label, each with occupations `0..=N_max`. Vectors are indexed system-major:
//! `i·fock_dim + f`, and inside the Fock index mode 0 is the most significant digit,
//! matching `kron(σ, kron(a_0, kron(a_1, …)))`. Annihilators are `√(2π)·a` so that
//! `[b, b*] = 2π` below the cutoff. Off-shell labels have no mode; their noise is zero.
//!
//! Nothing here touches the rewrite engine.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::io::Write;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::algebra::{render_word, Entangled, EntangledAlgebra, LabelSpace, NoiseKind, NoiseLabel, NormalOrderer};
use crate::error::{Error, Result};
use crate::exact;
use crate::report::CheckReport;

/// Construction identities are checked to this tolerance.
pub const CONSTRUCTION_TOL: f64 = 1e-12;
/// Relations and oracle/symbolic agreement are checked to this tolerance.
pub const RELATION_TOL: f64 = 1e-10;
/// Upper bound on `system_dim · fock_dim`.
pub const DEFAULT_CAPACITY: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedFock {
    modes: Vec<NoiseLabel>,
    cutoff: usize,
    fock_dim: usize,
}

impl TruncatedFock {
    pub fn new(mut modes: Vec<NoiseLabel>, cutoff: usize) -> Result<Self> {
        if cutoff < 1 {
            return Err(Error::BadCutoff(cutoff));
        }
        modes.sort();
        modes.dedup();
        let fock_dim = (cutoff + 1)
            .checked_pow(modes.len() as u32)
            .ok_or(Error::CapacityExceeded {
                dimension: usize::MAX,
                bound: DEFAULT_CAPACITY,
            })?;
        Ok(Self {
            modes,
            cutoff,
            fock_dim,
        })
    }

    pub fn modes(&self) -> &[NoiseLabel] {
        &self.modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn fock_dim(&self) -> usize {
        self.fock_dim
    }

    fn stride(&self, mode: usize) -> usize {
        (self.cutoff + 1).pow((self.modes.len() - 1 - mode) as u32)
    }

    /// Occupation of `mode` in Fock basis state `f`.
    pub fn occupation(&self, f: usize, mode: usize) -> usize {
        (f / self.stride(mode)) % (self.cutoff + 1)
    }
}

/// Single-mode `√(2π)·a` on occupations `0..=cutoff`.
pub fn scaled_lowering(cutoff: usize) -> DMatrix<Complex64> {
    let scale = TAU.sqrt();
    DMatrix::from_fn(cutoff + 1, cutoff + 1, |i, j| {
        if j == i + 1 {
            Complex64::new(scale * (j as f64).sqrt(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

#[derive(Debug, Clone)]
pub struct OracleRep {
    labels: LabelSpace,
    system_dim: usize,
    fock: TruncatedFock,
    mode_of: BTreeMap<NoiseLabel, usize>,
    sigma_plus: Vec<DMatrix<Complex64>>,
    sigma_minus: Vec<DMatrix<Complex64>>,
    lowering: DMatrix<Complex64>,
    raising: DMatrix<Complex64>,
    commutator_deviation: f64,
}

pub fn build_oracle(alg: &EntangledAlgebra, cutoff: usize) -> Result<OracleRep> {
    build_oracle_with_capacity(alg, cutoff, DEFAULT_CAPACITY)
}

pub fn build_oracle_with_capacity(alg: &EntangledAlgebra, cutoff: usize, capacity: usize) -> Result<OracleRep> {
    let labels = alg.labels().clone();
    let fock = TruncatedFock::new(labels.on_shell_labels(), cutoff)?;
    let dimension = fock.fock_dim().saturating_mul(alg.dim());
    if dimension > capacity {
        return Err(Error::CapacityExceeded {
            dimension,
            bound: capacity,
        });
    }
    let mode_of = fock.modes().iter().enumerate().map(|(i, l)| (*l, i)).collect();
    let sigma_plus: Vec<DMatrix<Complex64>> = labels
        .omegas()
        .iter()
        .map(|w| alg.system().sigma_plus(w).map(|m| m.to_complex64()))
        .collect::<Result<_>>()?;
    let sigma_minus = sigma_plus.iter().map(|m| m.adjoint()).collect();
    let lowering = scaled_lowering(cutoff);
    let raising = lowering.adjoint();
    let mut rep = OracleRep {
        labels,
        system_dim: alg.dim(),
        fock,
        mode_of,
        sigma_plus,
        sigma_minus,
        lowering,
        raising,
        commutator_deviation: 0.0,
    };
    rep.commutator_deviation = rep.measure_commutators();
    if rep.commutator_deviation > CONSTRUCTION_TOL {
        return Err(Error::Invalid(format!(
            "oracle commutator deviation {:.3e} exceeds {CONSTRUCTION_TOL:e}",
            rep.commutator_deviation
        )));
    }
    Ok(rep)
}

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

impl OracleRep {
    pub fn fock(&self) -> &TruncatedFock {
        &self.fock
    }

    pub fn labels(&self) -> &LabelSpace {
        &self.labels
    }

    pub fn system_dim(&self) -> usize {
        self.system_dim
    }

    pub fn total_dim(&self) -> usize {
        self.system_dim * self.fock.fock_dim()
    }

    pub fn commutator_deviation(&self) -> f64 {
        self.commutator_deviation
    }

    pub fn mode_of(&self, label: NoiseLabel) -> Option<usize> {
        self.mode_of.get(&label).copied()
    }

    /// `|e_i⟩ ⊗ |Ω⟩`.
    pub fn vacuum_state(&self, system_index: usize) -> DVector<Complex64> {
        let mut v = DVector::zeros(self.total_dim());
        v[system_index * self.fock.fock_dim()] = Complex64::new(1.0, 0.0);
        v
    }

    /// `|ψ⟩ ⊗ |Ω⟩`.
    pub fn product_state(&self, psi: &[Complex64]) -> DVector<Complex64> {
        let mut v = DVector::zeros(self.total_dim());
        for (i, amp) in psi.iter().enumerate() {
            v[i * self.fock.fock_dim()] = *amp;
        }
        v
    }

    /// `(I ⊗ … ⊗ ladder ⊗ … ⊗ I)` on the Fock leg of every system block.
    fn apply_ladder(&self, mode: usize, ladder: &DMatrix<Complex64>, v: &DVector<Complex64>) -> DVector<Complex64> {
        let fd = self.fock.fock_dim();
        let stride = self.fock.stride(mode);
        let n = self.fock.cutoff() + 1;
        let mut out = DVector::zeros(v.len());
        for (idx, amp) in v.iter().enumerate() {
            if *amp == czero() {
                continue;
            }
            let f = idx % fd;
            let occ = (f / stride) % n;
            for row in 0..n {
                let m = ladder[(row, occ)];
                if m != czero() {
                    out[idx - occ * stride + row * stride] += m * amp;
                }
            }
        }
        out
    }

    fn apply_system(&self, sigma: &DMatrix<Complex64>, v: &DVector<Complex64>) -> DVector<Complex64> {
        let fd = self.fock.fock_dim();
        let mut out = DVector::zeros(v.len());
        for i in 0..self.system_dim {
            for j in 0..self.system_dim {
                let s = sigma[(i, j)];
                if s == czero() {
                    continue;
                }
                for f in 0..fd {
                    out[i * fd + f] += s * v[j * fd + f];
                }
            }
        }
        out
    }

    /// `C_L v` or `C*_L v`; zero for off-shell labels.
    pub fn apply(&self, g: Entangled, v: &DVector<Complex64>) -> DVector<Complex64> {
        let Some(mode) = self.mode_of(g.label) else {
            return DVector::zeros(v.len());
        };
        let omega = g.label.omega as usize;
        let (sigma, ladder) = match g.kind {
            NoiseKind::Annihilator => (&self.sigma_plus[omega], &self.lowering),
            NoiseKind::Creator => (&self.sigma_minus[omega], &self.raising),
        };
        self.apply_system(sigma, &self.apply_ladder(mode, ladder, v))
    }

    /// Applies a word right to left.
    pub fn apply_word(&self, word: &[Entangled], v: &DVector<Complex64>) -> DVector<Complex64> {
        word.iter().rev().fold(v.clone(), |acc, g| self.apply(*g, &acc))
    }

    /// `P_ω ⊗ I` with `P_ω = σ⁺_ω σ⁻_ω`.
    pub fn apply_projector(&self, label: NoiseLabel, v: &DVector<Complex64>) -> DVector<Complex64> {
        let omega = label.omega as usize;
        let p = &self.sigma_plus[omega] * &self.sigma_minus[omega];
        self.apply_system(&p, v)
    }

    /// Dense `kron(σ, I ⊗ … ⊗ ladder ⊗ … ⊗ I)` for a generator.
    pub fn dense_operator(&self, g: Entangled) -> DMatrix<Complex64> {
        let n = self.total_dim();
        let Some(mode) = self.mode_of(g.label) else {
            return DMatrix::zeros(n, n);
        };
        let omega = g.label.omega as usize;
        let (sigma, ladder) = match g.kind {
            NoiseKind::Annihilator => (&self.sigma_plus[omega], &self.lowering),
            NoiseKind::Creator => (&self.sigma_minus[omega], &self.raising),
        };
        let identity = DMatrix::<Complex64>::identity(self.fock.cutoff() + 1, self.fock.cutoff() + 1);
        let mut fock_op = DMatrix::<Complex64>::identity(1, 1);
        for m in 0..self.fock.modes().len() {
            fock_op = fock_op.kronecker(if m == mode { ladder } else { &identity });
        }
        sigma.kronecker(&fock_op)
    }

    /// `ladder` on mode `mode` applied to a sparse Fock vector.
    fn ladder_sparse(
        &self,
        mode: usize,
        ladder: &DMatrix<Complex64>,
        v: &BTreeMap<usize, Complex64>,
    ) -> BTreeMap<usize, Complex64> {
        let stride = self.fock.stride(mode);
        let n = self.fock.cutoff() + 1;
        let mut out = BTreeMap::new();
        for (&f, amp) in v {
            let occ = (f / stride) % n;
            for row in 0..n {
                let m = ladder[(row, occ)];
                if m != czero() {
                    *out.entry(f - occ * stride + row * stride).or_insert(czero()) += m * amp;
                }
            }
        }
        out
    }

    /// Max over modes and sub-cutoff basis states of `|([b_m, b*_n] − 2π δ_mn) e_f|`.
    fn measure_commutators(&self) -> f64 {
        let modes = self.fock.modes().len();
        let mut worst: f64 = 0.0;
        for f in 0..self.fock.fock_dim() {
            let e = BTreeMap::from([(f, Complex64::new(1.0, 0.0))]);
            for n in 0..modes {
                if self.fock.occupation(f, n) >= self.fock.cutoff() {
                    continue;
                }
                let raised = self.ladder_sparse(n, &self.raising, &e);
                for m in 0..modes {
                    let mut diff = self.ladder_sparse(m, &self.lowering, &raised);
                    let lowered = self.ladder_sparse(m, &self.lowering, &e);
                    for (k, amp) in self.ladder_sparse(n, &self.raising, &lowered) {
                        *diff.entry(k).or_insert(czero()) -= amp;
                    }
                    if m == n {
                        *diff.entry(f).or_insert(czero()) -= Complex64::new(TAU, 0.0);
                    }
                    worst = worst.max(diff.values().map(|z| z.norm_sqr()).sum::<f64>().sqrt());
                }
            }
        }
        worst
    }
}

/// A vector `(∏ C*)(e_i ⊗ Ω)` with its provenance.
#[derive(Debug, Clone)]
pub struct BasisVector {
    pub system_index: usize,
    pub word: Vec<NoiseLabel>,
    pub vector: DVector<Complex64>,
    pub is_zero: bool,
}

/// Every ordered creator word of length `≤ max_order` over the oracle's modes, applied to
/// each `e_i ⊗ Ω`. Off-shell creators are identically zero here, so only modes are used.
pub fn entangled_basis(rep: &OracleRep, max_order: usize) -> Result<Vec<BasisVector>> {
    let bound = rep.fock.cutoff() * rep.fock.modes().len();
    if max_order > bound {
        return Err(Error::OrderTooLarge {
            order: max_order,
            bound,
        });
    }
    let modes = rep.fock.modes();
    let mut words: Vec<Vec<NoiseLabel>> = vec![Vec::new()];
    let mut frontier: Vec<Vec<NoiseLabel>> = vec![Vec::new()];
    for _ in 0..max_order {
        let mut next = Vec::new();
        for w in &frontier {
            for m in modes {
                let mut longer = w.clone();
                longer.push(*m);
                next.push(longer);
            }
        }
        words.extend(next.iter().cloned());
        frontier = next;
    }
    let mut out = Vec::new();
    for i in 0..rep.system_dim() {
        let vacuum = rep.vacuum_state(i);
        for word in &words {
            let gens: Vec<Entangled> = word.iter().map(|l| Entangled::c_dag(*l)).collect();
            let vector = rep.apply_word(&gens, &vacuum);
            let is_zero = vector.norm() == 0.0;
            out.push(BasisVector {
                system_index: i,
                word: word.clone(),
                vector,
                is_zero,
            });
        }
    }
    Ok(out)
}

/// `γ(L, L') = 2π·[L = L']·[ω(k) = ω]`.
pub fn gamma(labels: &LabelSpace, a: NoiseLabel, b: NoiseLabel) -> f64 {
    if a == b && labels.is_on_shell(a) {
        TAU
    } else {
        0.0
    }
}

/// `‖(C_L C*_{L'} − γ(L,L') P_ω) v‖ ≤ tol·‖v‖` for all label pairs and nonzero basis vectors.
pub fn oracle_check_relation(rep: &OracleRep, max_order: usize, tol: f64) -> Result<CheckReport> {
    let basis = entangled_basis(rep, max_order)?;
    let labels = rep.labels().all_labels();
    let mut report = CheckReport::new("oracle_module_relation")
        .param("max_order", max_order)
        .param("nmax", rep.fock.cutoff())
        .param("tol", tol)
        .param("modes", rep.fock.modes().len());
    report.count("zero_vectors", basis.iter().filter(|b| b.is_zero).count() as u64);
    report.deviation(0.0);
    for v in basis.iter().filter(|b| !b.is_zero) {
        report.count("vectors", 1);
        let norm = v.vector.norm();
        for &l in &labels {
            for &lp in &labels {
                report.count("pairs_checked", 1);
                let mut r = rep.apply(Entangled::c(l), &rep.apply(Entangled::c_dag(lp), &v.vector));
                let g = gamma(rep.labels(), l, lp);
                if g != 0.0 {
                    r -= rep.apply_projector(l, &v.vector) * Complex64::new(g, 0.0);
                }
                let relative = r.norm() / norm;
                report.deviation(relative);
                if relative > tol {
                    report.violation(json!({
                        "annihilator": rep.labels().display(l).to_string(),
                        "creator": rep.labels().display(lp).to_string(),
                        "system_index": v.system_index,
                        "vector_word": v.word.iter().map(|w| rep.labels().display(*w).to_string()).collect::<Vec<_>>(),
                        "relative_residual": relative,
                    }));
                }
            }
        }
    }
    Ok(report)
}

/// Entry `(i, j) = ⟨e_i⊗Ω| word |e_j⊗Ω⟩`.
pub fn oracle_vacuum_moment(rep: &OracleRep, word: &[Entangled]) -> Result<DMatrix<Complex64>> {
    let bound = 2 * rep.fock.cutoff() * rep.fock.modes().len().max(1);
    if word.len() > bound {
        return Err(Error::OrderTooLarge {
            order: word.len(),
            bound,
        });
    }
    let d = rep.system_dim();
    let fd = rep.fock.fock_dim();
    let mut out = DMatrix::zeros(d, d);
    for j in 0..d {
        let v = rep.apply_word(word, &rep.vacuum_state(j));
        for i in 0..d {
            out[(i, j)] = v[i * fd];
        }
    }
    Ok(out)
}

pub fn max_abs_deviation(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn matrix_json(m: &DMatrix<Complex64>) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

/// Symbolic vs oracle vacuum expectation for one word.
#[derive(Debug, Clone, Serialize)]
pub struct MomentReport {
    pub word: String,
    pub symbolic: Vec<Vec<String>>,
    pub symbolic_exact: crate::algebra::scalar::OperatorValueJson,
    pub oracle: Vec<Vec<[f64; 2]>>,
    pub max_deviation: f64,
}

impl MomentReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.max_deviation <= tol
    }
}

/// Compares `orderer`'s vacuum expectations with the oracle, word by word.
pub fn cross_validate(
    alg: &EntangledAlgebra,
    orderer: &NormalOrderer<'_>,
    rep: &OracleRep,
    words: &[Vec<Entangled>],
) -> Result<Vec<MomentReport>> {
    words
        .iter()
        .map(|word| {
            let symbolic = orderer.vacuum_expectation(&alg.word_polynomial(word));
            let numeric = symbolic.to_complex64();
            let oracle = oracle_vacuum_moment(rep, word)?;
            let deviation = max_abs_deviation(&numeric, &oracle);
            Ok(MomentReport {
                word: render_word(word, alg.labels()),
                symbolic: (0..numeric.nrows())
                    .map(|i| {
                        (0..numeric.ncols())
                            .map(|j| format!("{:.12e}{:+.12e}i", numeric[(i, j)].re, numeric[(i, j)].im))
                            .collect()
                    })
                    .collect(),
                symbolic_exact: symbolic.to_json(),
                oracle: matrix_json(&oracle),
                max_deviation: deviation,
            })
        })
        .collect()
}

/// Aggregates moment reports into a pass/fail report at `tol`.
pub fn summarize_moments(reports: &[MomentReport], tol: f64) -> CheckReport {
    let mut report = CheckReport::new("oracle_cross_validation").param("tol", tol);
    report.count("words", reports.len() as u64);
    report.deviation(0.0);
    for m in reports {
        report.deviation(m.max_deviation);
        if !m.passed(tol) {
            report.violation(json!({ "word": m.word, "deviation": m.max_deviation }));
        }
    }
    report
}

#[derive(Debug, Clone, Serialize)]
pub struct DumpHeader {
    pub dtype: &'static str,
    pub layout: &'static str,
    pub system_dim: usize,
    pub fock_dim: usize,
    pub total_dim: usize,
    pub cutoff: usize,
    pub modes: Vec<String>,
    pub matrices: Vec<String>,
}

/// Writes `C_L` for every mode (then `C*_L`) as row-major little-endian complex64
/// (`f32` real, `f32` imaginary) and returns the JSON header describing the blob.
pub fn write_dump(rep: &OracleRep, out: &mut impl Write) -> std::io::Result<DumpHeader> {
    let mut names = Vec::new();
    for kind in [NoiseKind::Annihilator, NoiseKind::Creator] {
        for &mode in rep.fock.modes() {
            let g = Entangled { kind, label: mode };
            let m = rep.dense_operator(g);
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    out.write_all(&(m[(i, j)].re as f32).to_le_bytes())?;
                    out.write_all(&(m[(i, j)].im as f32).to_le_bytes())?;
                }
            }
            names.push(g.render(rep.labels()));
        }
    }
    Ok(DumpHeader {
        dtype: "complex64",
        layout: "row-major little-endian, f32 real then f32 imaginary",
        system_dim: rep.system_dim(),
        fock_dim: rep.fock.fock_dim(),
        total_dim: rep.total_dim(),
        cutoff: rep.fock.cutoff(),
        modes: rep
            .fock
            .modes()
            .iter()
            .map(|l| rep.labels().display(*l).to_string())
            .collect(),
        matrices: names,
    })
}

/// `(ψ, ψ')` → `⟨ψ|X|ψ'⟩` for a `d×d` numeric matrix.
pub fn sandwich(m: &DMatrix<Complex64>, bra: &[Complex64], ket: &[Complex64]) -> Complex64 {
    let mut acc = czero();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            acc += bra[i].conj() * m[(i, j)] * ket[j];
        }
    }
    acc
}

pub fn to_numeric_state(psi: &[exact::ComplexRational]) -> Vec<Complex64> {
    psi.iter().map(exact::to_complex64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Dispersion;
    use crate::exact::integer;
    use crate::system::Spectrum;

    fn algebra(energies: &[i64], omegas: Option<Vec<i64>>, times: usize, momenta: &[(&str, i64)]) -> EntangledAlgebra {
        let system = crate::system::GenericSystem::bypass_validation(&Spectrum::from_integers(energies).unwrap());
        let labels = LabelSpace::new(
            &system,
            omegas.map(|ws| ws.into_iter().map(integer).collect()),
            (0..times).map(|t| format!("t{t}")).collect(),
            momenta.iter().map(|(k, _)| k.to_string()).collect(),
            &Dispersion::from_pairs(momenta.iter().map(|(k, w)| (*k, integer(*w)))),
        )
        .unwrap();
        EntangledAlgebra::new(system, labels).unwrap()
    }

    #[test]
    fn single_mode_lowering_is_scaled_ladder() {
        let b = scaled_lowering(1);
        assert!((b[(0, 1)].re - TAU.sqrt()).abs() < 1e-15);
        assert_eq!(b[(1, 0)], czero());
        assert_eq!(b[(0, 0)], czero());
    }

    #[test]
    fn two_modes_at_cutoff_two_give_nine_states() {
        let fock = TruncatedFock::new(
            vec![
                NoiseLabel::new(0, 0, 0),
                NoiseLabel::new(0, 1, 0),
                NoiseLabel::new(0, 0, 0),
            ],
            2,
        )
        .unwrap();
        assert_eq!(fock.modes().len(), 2);
        assert_eq!(fock.fock_dim(), 9);
    }

    #[test]
    fn build_checks_commutators_and_rejects_bad_input() {
        let alg = algebra(&[0, 1, 3], None, 2, &[("k0", 1), ("k1", 2)]);
        let rep = build_oracle(&alg, 3).unwrap();
        assert!(rep.commutator_deviation() < CONSTRUCTION_TOL);
        assert_eq!(rep.fock().modes().len(), 4);
        assert!(matches!(build_oracle(&alg, 0), Err(Error::BadCutoff(0))));
        assert!(matches!(
            build_oracle_with_capacity(&alg, 3, 100),
            Err(Error::CapacityExceeded {
                dimension: 768,
                bound: 100
            })
        ));
    }

    #[test]
    fn structured_action_matches_dense_kron() {
        let alg = algebra(&[0, 1, 3], Some(vec![1, 2]), 1, &[("k0", 1), ("k1", 2)]);
        let rep = build_oracle(&alg, 2).unwrap();
        let n = rep.total_dim();
        let v = DVector::from_fn(n, |i, _| Complex64::new((i as f64).sin(), (i as f64 * 0.3).cos()));
        for l in rep.labels().all_labels() {
            for g in [Entangled::c(l), Entangled::c_dag(l)] {
                let dense = rep.dense_operator(g) * &v;
                assert!((dense - rep.apply(g, &v)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn basis_flags_vanishing_vectors() {
        let alg = algebra(&[0, 1], None, 1, &[("k0", 1)]);
        let rep = build_oracle(&alg, 2).unwrap();
        let basis = entangled_basis(&rep, 2).unwrap();
        // d = 2, words {∅, L, LL}
        assert_eq!(basis.len(), 6);
        let order0: Vec<_> = basis.iter().filter(|b| b.word.is_empty()).collect();
        assert!(order0.iter().all(|b| !b.is_zero));
        let repeated: Vec<_> = basis.iter().filter(|b| b.word.len() == 2).collect();
        assert!(repeated.iter().all(|b| b.is_zero));
        assert!(matches!(entangled_basis(&rep, 3), Err(Error::OrderTooLarge { .. })));
    }

    #[test]
    fn order_one_over_two_modes() {
        let alg = algebra(&[0, 1], None, 2, &[("k0", 1)]);
        let rep = build_oracle(&alg, 1).unwrap();
        let basis = entangled_basis(&rep, 1).unwrap();
        let nonzero: Vec<_> = basis.iter().filter(|b| b.word.len() == 1 && !b.is_zero).collect();
        // σ⁻ kills the ground state, so only e_1 survives, once per mode
        assert_eq!(nonzero.len(), 2);
        assert!(nonzero.iter().all(|b| b.system_index == 1));
    }

    #[test]
    fn contraction_moment_is_two_pi_projector() {
        let alg = algebra(&[0, 1, 3], None, 1, &[("k0", 1)]);
        let rep = build_oracle(&alg, 2).unwrap();
        let l = NoiseLabel::new(0, 0, 0);
        let m = oracle_vacuum_moment(&rep, &[Entangled::c(l), Entangled::c_dag(l)]).unwrap();
        let expected = alg.projector(l).to_complex64() * Complex64::new(TAU, 0.0);
        assert!(max_abs_deviation(&m, &expected) < CONSTRUCTION_TOL);
        let id = oracle_vacuum_moment(&rep, &[]).unwrap();
        assert!(max_abs_deviation(&id, &DMatrix::identity(3, 3)) == 0.0);
    }

    #[test]
    fn generic_relation_holds_and_vacuum_sector_is_exact() {
        let alg = algebra(&[0, 1, 3], None, 2, &[("k0", 1), ("k1", 2)]);
        let rep = build_oracle(&alg, 3).unwrap();
        let report = oracle_check_relation(&rep, 0, RELATION_TOL).unwrap();
        assert!(report.passed());
        assert!(report.max_deviation.unwrap() < 1e-14);
        assert!(oracle_check_relation(&rep, 3, RELATION_TOL).unwrap().passed());
    }

    #[test]
    fn degenerate_spectrum_breaks_the_relation() {
        let alg = algebra(&[0, 1, 2], None, 2, &[("k0", 1), ("k1", 2)]);
        let rep = build_oracle(&alg, 3).unwrap();
        let report = oracle_check_relation(&rep, 3, RELATION_TOL).unwrap();
        assert!(!report.passed());
        assert!(report.max_deviation.unwrap() > RELATION_TOL);
    }

    #[test]
    fn dump_writes_eight_bytes_per_entry() {
        let alg = algebra(&[0, 1], None, 1, &[("k0", 1)]);
        let rep = build_oracle(&alg, 1).unwrap();
        let mut blob = Vec::new();
        let header = write_dump(&rep, &mut blob).unwrap();
        assert_eq!(header.matrices, vec!["c(1,t0,k0)", "c*(1,t0,k0)"]);
        assert_eq!(blob.len(), 2 * header.total_dim * header.total_dim * 8);
        // C = kron(σ⁺, b): entry (row e1⊗|0⟩ = 2, col e0⊗|1⟩ = 1) is √(2π)
        let idx = (2 * header.total_dim + 1) * 8;
        let re = f32::from_le_bytes(blob[idx..idx + 4].try_into().unwrap());
        assert!((re as f64 - TAU.sqrt()).abs() < 1e-6);
    }
}
