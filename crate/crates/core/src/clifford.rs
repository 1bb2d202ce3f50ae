//! Clifford algebras, the Hermite-basis model of `L²(R^n, Cliff(R^n))`, and
//! the Bott–Dirac operator `B = D + C`.
//!
//! The one-dimensional factor is `L²(R) ⊗ Cliff(R)`, with `Cliff(R)` spanned by
//! `1` (even) and `e` (odd). In the Hermite basis `ψ_k` the position and
//! derivative come from the ladder relations `x = (a + a†)/√2`,
//! `d/dx = (a - a†)/√2`. Clifford multiplication is `C = x ⊗ e` (left
//! multiplication) and the Dirac operator is `D = d/dx ⊗ ê` with the signed
//! right multiplication `ê(g) = (-1)^{∂g} g e`. Then
//!
//! ```text
//! B (ψ_k ⊗ 1) = √(2k) ψ_{k-1} ⊗ e,    B (ψ_k ⊗ e) = √(2k+2) ψ_{k+1} ⊗ 1,
//! ```
//!
//! so `B` preserves the span of `{ψ_k ⊗ 1 : k < K} ∪ {ψ_k ⊗ e : k < K-1}`.
//! The model keeps exactly that span: one fewer odd level than even ones.
//! On it `B` is exact, its kernel is spanned by `ψ_0 ⊗ 1`, and its nonzero
//! eigenvalues are `±√(2k)`. A square truncation (equal even and odd levels)
//! would pair the top odd level into a spurious second zero mode.
//!
//! For `n > 1` the model is the graded tensor power of the one-dimensional
//! one, `B = Σ_i 1 ⊗̂ … ⊗̂ B_1 ⊗̂ … ⊗̂ 1`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcalc::{ScalarFunction, Spectrum};
use crate::graded::{
    graded_commutator, graded_tensor, operator_norm, CMatrix, GradedMatrix, GradedSpace, OddSelfAdjoint, C64,
};
use crate::pairs::{
    compose_pairs, AsymptoticPair, Factorization, NamedProfile, Pushforward, RepresentedAlgebra, AP2_EXPONENT,
    SECOND_ORDER_EXPONENT,
};
use crate::profile::{scalar_profile, DecayProfile, TGrid};

pub const MAX_CLIFFORD_DIM: usize = 6;
/// Largest total dimension a Hermite model may have.
pub const MAX_MODEL_DIM: usize = 4096;
const RELATION_TOL: f64 = 1e-12;

/// Irreducible graded module of `Cliff_C(R^n)` of dimension `2^⌈n/2⌉`.
#[derive(Clone, Debug)]
pub struct CliffordRep {
    n: usize,
    space: GradedSpace,
    generators: Vec<GradedMatrix>,
}

fn pauli(space: &GradedSpace, which: char) -> GradedMatrix {
    let (z, o, i) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 1.0));
    let m = match which {
        'x' => CMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        'y' => CMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        _ => unreachable!(),
    };
    GradedMatrix::new(space.clone(), m).expect("2x2")
}

/// Odd self-adjoint generators `e_1..e_n`, built as graded tensor products
/// `1 ⊗̂ … ⊗̂ σ ⊗̂ 1 ⊗̂ …` of Pauli matrices on `⌈n/2⌉` graded qubits.
pub fn clifford_rep(n: usize) -> Result<CliffordRep> {
    if !(1..=MAX_CLIFFORD_DIM).contains(&n) {
        return Err(Error::InvalidParameter {
            name: "n",
            value: n as f64,
        });
    }
    let qubits = n.div_ceil(2);
    let qubit = GradedSpace::new(vec![0, 1]).expect("valid");
    let identity_on = |k: usize| {
        let space = (0..k).fold(None::<GradedSpace>, |acc, _| {
            Some(acc.map_or(qubit.clone(), |s| s.tensor(&qubit)))
        });
        space.map(|s| GradedMatrix::identity(&s))
    };
    let mut generators = Vec::with_capacity(n);
    for k in 0..qubits {
        for which in ['x', 'y'] {
            if generators.len() == n {
                break;
            }
            let mut m = pauli(&qubit, which);
            if let Some(before) = identity_on(k) {
                m = graded_tensor(&before, &m);
            }
            if let Some(after) = identity_on(qubits - k - 1) {
                m = graded_tensor(&m, &after);
            }
            generators.push(m);
        }
    }
    let space = generators[0].space().clone();
    let rep = CliffordRep { n, space, generators };
    let defect = rep.relation_defect();
    if defect > RELATION_TOL {
        return Err(Error::Precondition(format!("Clifford relations fail ({defect:e})")));
    }
    Ok(rep)
}

impl CliffordRep {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn space(&self) -> &GradedSpace {
        &self.space
    }

    pub fn generators(&self) -> &[GradedMatrix] {
        &self.generators
    }

    /// Largest entry of `[e_i, e_j] - 2δ_ij I` (graded commutator), of the
    /// non-hermitian part, and of the even part of each generator.
    pub fn relation_defect(&self) -> f64 {
        let id = GradedMatrix::identity(&self.space);
        let mut worst = 0.0_f64;
        for (i, a) in self.generators.iter().enumerate() {
            worst = worst.max(a.hermitian_defect()).max(a.even_part().max_abs());
            for (j, b) in self.generators.iter().enumerate() {
                let c = graded_commutator(a, b).expect("same space");
                let target = if i == j {
                    id.scale(2.0)
                } else {
                    GradedMatrix::zeros(&self.space)
                };
                worst = worst.max((&c - &target).max_abs());
            }
        }
        worst
    }
}

/// Position and derivative on the first `n_basis` Hermite functions.
pub fn ladder_matrices(n_basis: usize) -> (CMatrix, CMatrix) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut x = CMatrix::zeros(n_basis, n_basis);
    let mut dx = CMatrix::zeros(n_basis, n_basis);
    for k in 0..n_basis.saturating_sub(1) {
        // a ψ_{k+1} = √(k+1) ψ_k
        let a = ((k + 1) as f64).sqrt() * s;
        x[(k, k + 1)] = C64::new(a, 0.0);
        x[(k + 1, k)] = C64::new(a, 0.0);
        dx[(k, k + 1)] = C64::new(a, 0.0);
        dx[(k + 1, k)] = C64::new(-a, 0.0);
    }
    (x, dx)
}

/// Truncated Hermite model of `L²(R^n, Cliff(R^n))`.
#[derive(Clone, Debug)]
pub struct HermiteModel {
    n_basis: usize,
    coords: usize,
    position: CMatrix,
    derivative: CMatrix,
    clifford: CliffordRep,
    /// Signed right multiplication `ê` on `Cliff(R)`.
    right_multiplication: GradedMatrix,
    factor_space: GradedSpace,
    /// `(hermite level, clifford index)` of each kept factor basis vector.
    factor_basis: Vec<(usize, usize)>,
    space: GradedSpace,
}

pub fn hermite_model(n_basis: usize, n: usize) -> Result<HermiteModel> {
    if n_basis < 8 {
        return Err(Error::InvalidParameter {
            name: "n_basis",
            value: n_basis as f64,
        });
    }
    if n == 0 {
        return Err(Error::InvalidParameter { name: "n", value: 0.0 });
    }
    let factor_dim = 2 * n_basis - 1;
    let total = (0..n).try_fold(1usize, |acc, _| acc.checked_mul(factor_dim));
    if total.is_none_or(|d| d > MAX_MODEL_DIM) {
        return Err(Error::InvalidParameter {
            name: "n",
            value: n as f64,
        });
    }
    let (position, derivative) = ladder_matrices(n_basis);
    let clifford = clifford_rep(1)?;
    // ê(1) = e, ê(e) = -e·e = -1
    let right_multiplication = GradedMatrix::from_real_rows(clifford.space().clone(), &[&[0.0, -1.0], &[1.0, 0.0]])?;
    let factor_basis: Vec<(usize, usize)> = (0..n_basis)
        .flat_map(|k| [(k, 0), (k, 1)])
        .filter(|&(k, c)| !(c == 1 && k == n_basis - 1))
        .collect();
    let factor_space = GradedSpace::new(factor_basis.iter().map(|&(_, c)| c as u8).collect())?;
    let space = (1..n).fold(factor_space.clone(), |acc, _| acc.tensor(&factor_space));
    Ok(HermiteModel {
        n_basis,
        coords: n,
        position,
        derivative,
        clifford,
        right_multiplication,
        factor_space,
        factor_basis,
        space,
    })
}

impl HermiteModel {
    pub fn n_basis(&self) -> usize {
        self.n_basis
    }

    pub fn coords(&self) -> usize {
        self.coords
    }

    pub fn position(&self) -> &CMatrix {
        &self.position
    }

    pub fn derivative(&self) -> &CMatrix {
        &self.derivative
    }

    pub fn clifford(&self) -> &CliffordRep {
        &self.clifford
    }

    pub fn right_multiplication(&self) -> &GradedMatrix {
        &self.right_multiplication
    }

    pub fn space(&self) -> &GradedSpace {
        &self.space
    }

    pub fn factor_space(&self) -> &GradedSpace {
        &self.factor_space
    }

    /// Index of `ψ_0 ⊗ … ⊗ ψ_0 ⊗ 1`, the exact kernel vector of `B`.
    pub fn ground_index(&self) -> usize {
        0
    }

    /// `h ⊗ c` compressed onto the kept factor basis.
    fn factor_operator(&self, hermite: &CMatrix, cliff: &GradedMatrix) -> GradedMatrix {
        let full = hermite.kronecker(cliff.matrix());
        let idx: Vec<usize> = self.factor_basis.iter().map(|&(k, c)| 2 * k + c).collect();
        let m = CMatrix::from_fn(idx.len(), idx.len(), |i, j| full[(idx[i], idx[j])]);
        GradedMatrix::new(self.factor_space.clone(), m).expect("square")
    }

    /// `1 ⊗̂ … ⊗̂ m ⊗̂ … ⊗̂ 1` with `m` in coordinate `i`.
    pub fn lift(&self, m: &GradedMatrix, i: usize) -> GradedMatrix {
        let id = GradedMatrix::identity(&self.factor_space);
        let mut out: Option<GradedMatrix> = None;
        for j in 0..self.coords {
            let factor = if j == i { m } else { &id };
            out = Some(match out {
                None => factor.clone(),
                Some(acc) => graded_tensor(&acc, factor),
            });
        }
        out.expect("coords >= 1")
    }

    /// Basis indices whose Hermite level is at most `n_basis - 3` in every
    /// coordinate; ladder relations hold exactly there.
    pub fn interior_indices(&self) -> Vec<usize> {
        let fd = self.factor_space.dim();
        (0..self.space.dim())
            .filter(|&idx| {
                let mut rest = idx;
                (0..self.coords).all(|_| {
                    let local = rest % fd;
                    rest /= fd;
                    self.factor_basis[local].0 + 3 <= self.n_basis
                })
            })
            .collect()
    }

    /// `-Σ_i γ^{(i)}`, the grading of each coordinate's Clifford factor,
    /// negated and summed. This is what `[D, C]` equals on the interior.
    pub fn dc_commutator_reference(&self) -> GradedMatrix {
        let gamma = GradedMatrix::grading(&self.factor_space);
        (0..self.coords)
            .map(|i| self.lift(&gamma, i))
            .reduce(|a, b| &a + &b)
            .expect("coords >= 1")
            .scale(-1.0)
    }
}

/// The Dirac operator, Clifford multiplication, and their sum.
#[derive(Clone, Debug)]
pub struct BottDirac {
    pub dirac: OddSelfAdjoint,
    pub clifford: OddSelfAdjoint,
    pub bott: OddSelfAdjoint,
}

pub fn bott_dirac(model: &HermiteModel) -> Result<BottDirac> {
    let d1 = model.factor_operator(&model.derivative, &model.right_multiplication);
    let c1 = model.factor_operator(&model.position, &model.clifford.generators()[0]);
    let sum_lifts = |m: &GradedMatrix| -> Result<OddSelfAdjoint> {
        let total = (0..model.coords)
            .map(|i| model.lift(m, i))
            .reduce(|a, b| &a + &b)
            .expect("coords >= 1");
        OddSelfAdjoint::new(total)
    };
    let dirac = sum_lifts(&d1)?;
    let clifford = sum_lifts(&c1)?;
    let bott = dirac.try_add(&clifford)?;
    Ok(BottDirac { dirac, clifford, bott })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumSummary {
    /// Ascending eigenvalues.
    pub eigenvalues: Vec<f64>,
    /// Number of `|λ| < tol`.
    pub kernel_dim: usize,
    /// `|λ|` sorted ascending.
    pub magnitudes: Vec<f64>,
}

impl SpectrumSummary {
    /// Largest `|λ_i + λ_{n-1-i}|` over the sorted spectrum.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.eigenvalues.len();
        (0..n)
            .map(|i| (self.eigenvalues[i] + self.eigenvalues[n - 1 - i]).abs())
            .fold(0.0, f64::max)
    }

    /// Eigenvalues as CSV with header `index,eigenvalue`.
    pub fn to_csv(&self, fmt: impl Fn(f64) -> String) -> String {
        let mut out = String::from("index,eigenvalue\n");
        for (i, l) in self.eigenvalues.iter().enumerate() {
            out.push_str(&format!("{i},{}\n", fmt(*l)));
        }
        out
    }
}

pub fn spectrum_and_kernel(b: &OddSelfAdjoint, tol: f64) -> Result<SpectrumSummary> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "tol",
            value: tol,
        });
    }
    let spec = Spectrum::of(b);
    let eigenvalues: Vec<f64> = spec.eigenvalues().iter().copied().collect();
    let mut magnitudes: Vec<f64> = eigenvalues.iter().map(|l| l.abs()).collect();
    magnitudes.sort_by(f64::total_cmp);
    let kernel_dim = magnitudes.iter().filter(|&&m| m < tol).count();
    Ok(SpectrumSummary {
        eigenvalues,
        kernel_dim,
        magnitudes,
    })
}

/// Measured quantities of one Bott–Dirac model.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BottDiagnostics {
    pub n_basis: usize,
    pub coords: usize,
    pub dim: usize,
    pub kernel_dim: usize,
    pub smallest_magnitude: f64,
    pub second_magnitude: f64,
    /// `‖B (ψ_0 ⊗ 1)‖`
    pub kernel_residual: f64,
    /// `|second magnitude - √2|`
    pub gap_defect: f64,
    /// Interior `‖[D, C] - reference‖` with the reference `-Σ γ^{(i)}`.
    pub dc_defect: f64,
    /// Interior `‖[D, C] - I‖`.
    pub dc_identity_defect: f64,
    /// Interior `‖[∂, x] - I‖` on the first `n_basis - 2` levels.
    pub ccr_defect: f64,
    pub symmetry_defect: f64,
}

pub fn bott_diagnostics(model: &HermiteModel, kernel_tol: f64) -> Result<BottDiagnostics> {
    let ops = bott_dirac(model)?;
    let summary = spectrum_and_kernel(&ops.bott, kernel_tol)?;
    let mut ground = CMatrix::zeros(model.space().dim(), 1);
    ground[(model.ground_index(), 0)] = C64::new(1.0, 0.0);
    let kernel_residual = crate::graded::matrix_norm(&(ops.bott.matrix() * ground));
    let interior = model.interior_indices();
    let comm = graded_commutator(&ops.dirac, &ops.clifford)?.restrict(&interior)?;
    let reference = model.dc_commutator_reference().restrict(&interior)?;
    let dc_defect = operator_norm(&(&comm - &reference));
    let dc_identity_defect = operator_norm(&(&comm - &GradedMatrix::identity(comm.space())));
    let nb = model.n_basis();
    let ccr = model.derivative() * model.position() - model.position() * model.derivative();
    let keep = nb - 2;
    let ccr_defect =
        crate::graded::matrix_norm(&(ccr.view((0, 0), (keep, keep)).into_owned() - CMatrix::identity(keep, keep)));
    Ok(BottDiagnostics {
        n_basis: nb,
        coords: model.coords(),
        dim: model.space().dim(),
        kernel_dim: summary.kernel_dim,
        smallest_magnitude: summary.magnitudes[0],
        second_magnitude: summary.magnitudes.get(1).copied().unwrap_or(f64::NAN),
        kernel_residual,
        gap_defect: (summary.magnitudes.get(1).copied().unwrap_or(f64::NAN) - std::f64::consts::SQRT_2).abs(),
        dc_defect,
        dc_identity_defect,
        ccr_defect,
        symmetry_defect: summary.symmetry_defect(),
    })
}

/// Perturbing `(φ, D)` by a bounded odd `V`.
#[derive(Clone, Debug, Serialize)]
pub struct PerturbationReport {
    /// `‖f(t^{-1}V) b - f(0) b‖` for `f ∈ {(x²+1)^{-1}, x(x²+1)^{-1}}`.
    pub homomorphism_profiles: Vec<NamedProfile>,
    pub even_defect: DecayProfile,
    pub odd_defect: DecayProfile,
    /// The composite of `(φ, D)` with `(id, V)` equals `(φ, D + V)`.
    pub composition_matches: bool,
    pub composition_exponent: f64,
    pub pass: bool,
}

pub fn perturbation_check(pair: &AsymptoticPair, v: &OddSelfAdjoint, grid: &TGrid) -> Result<PerturbationReport> {
    pair.d().same_space(v)?;
    let spec_v = Spectrum::of(v);
    let mut homomorphism_profiles = Vec::new();
    for f in [ScalarFunction::Cayley, ScalarFunction::G] {
        let at_zero = f.eval(0.0);
        for (name, b) in pair.rep().generators() {
            let fb = b.scale_complex(at_zero);
            let profile = scalar_profile(
                |t| operator_norm(&(&(&spec_v.apply_scaled(&f, 1.0 / t) * b) - &fb)),
                grid,
            )?;
            homomorphism_profiles.push(NamedProfile {
                generator: name.clone(),
                function: f.name(),
                profile,
            });
        }
    }
    let (even_defect, odd_defect) = Factorization::new(pair.d(), v)?.profiles(grid)?;
    let perturbation = AsymptoticPair::new(RepresentedAlgebra::unit(v.space()), v.clone(), None)?;
    let composite = compose_pairs(pair, &perturbation, &Pushforward::Identity, grid)?;
    let expected = pair.d().try_add(v)?;
    let composition_matches =
        composite.pair.d() == &expected && composite.pair.rep().generators() == pair.rep().generators();
    let composition_exponent = composite.worst_exponent();
    let pass = homomorphism_profiles
        .iter()
        .all(|p| p.profile.decays_at_least(AP2_EXPONENT))
        && even_defect.decays_at_least(SECOND_ORDER_EXPONENT)
        && odd_defect.decays_at_least(SECOND_ORDER_EXPONENT)
        && composition_matches
        && composite.pass;
    Ok(PerturbationReport {
        homomorphism_profiles,
        even_defect,
        odd_defect,
        composition_matches,
        composition_exponent,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clifford_low_dimensions() {
        let one = clifford_rep(1).unwrap();
        assert_eq!(one.space().parities(), &[0, 1]);
        let sx = GradedMatrix::from_real_rows(one.space().clone(), &[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        assert_eq!(one.generators()[0], sx);

        let two = clifford_rep(2).unwrap();
        assert_eq!(two.generators()[0], sx);
        let sy = &two.generators()[1];
        assert_eq!(sy.matrix()[(0, 1)], C64::new(0.0, -1.0));
        assert_eq!(sy.matrix()[(1, 0)], C64::new(0.0, 1.0));
    }

    #[test]
    fn clifford_relations_all_n() {
        for n in 1..=MAX_CLIFFORD_DIM {
            let rep = clifford_rep(n).unwrap();
            assert_eq!(rep.space().dim(), 1 << n.div_ceil(2));
            assert_eq!(rep.generators().len(), n);
            assert!(rep.relation_defect() <= 1e-12);
            for e in rep.generators() {
                let sq = e * e;
                assert!((&sq - &GradedMatrix::identity(rep.space())).max_abs() <= 1e-12);
            }
        }
        assert!(clifford_rep(0).is_err());
        assert!(clifford_rep(7).is_err());
    }

    #[test]
    fn ladder_entries() {
        let m = hermite_model(16, 1).unwrap();
        assert!((m.position()[(0, 1)].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        let x = m.position();
        let d = m.derivative();
        assert_eq!(x, &x.adjoint());
        assert_eq!(d, &-d.adjoint());
        assert!(hermite_model(7, 1).is_err());
        assert!(hermite_model(64, 3).is_err());
    }

    #[test]
    fn model_structure() {
        let m = hermite_model(8, 1).unwrap();
        assert_eq!(m.space().dim(), 15);
        assert_eq!(m.space().even_dim(), 8);
        let m2 = hermite_model(8, 2).unwrap();
        assert_eq!(m2.space().dim(), 225);
        // interior levels 0..=5 of each component: 6 even + 6 odd per coordinate
        assert_eq!(m.interior_indices().len(), 12);
        assert_eq!(m2.interior_indices().len(), 144);
    }

    #[test]
    fn bott_operators_are_odd_hermitian() {
        let m = hermite_model(12, 1).unwrap();
        let ops = bott_dirac(&m).unwrap();
        for op in [&ops.dirac, &ops.clifford, &ops.bott] {
            assert!(OddSelfAdjoint::new(op.as_graded().clone()).is_ok());
        }
    }

    #[test]
    fn ground_state_is_exact_kernel() {
        for nb in [8, 32, 64] {
            let d = bott_diagnostics(&hermite_model(nb, 1).unwrap(), 1e-8).unwrap();
            assert_eq!(d.kernel_dim, 1);
            assert!(d.kernel_residual <= 1e-10);
        }
    }

    #[test]
    fn spectrum_is_sqrt_two_k() {
        let nb = 32;
        let s = spectrum_and_kernel(&bott_dirac(&hermite_model(nb, 1).unwrap()).unwrap().bott, 1e-8).unwrap();
        // magnitudes: 0, then each √(2k) twice (±), k = 1..nb-1
        assert_eq!(s.magnitudes.len(), 2 * nb - 1);
        for k in 1..nb {
            let want = (2.0 * k as f64).sqrt();
            for m in &s.magnitudes[2 * k - 1..2 * k + 1] {
                assert!((m - want).abs() < 1e-10, "k={k}: {m} vs {want}");
            }
        }
        assert!(s.symmetry_defect() < 1e-10);
    }

    #[test]
    fn spectrum_edge_cases() {
        let space = GradedSpace::balanced(6).unwrap();
        let s = spectrum_and_kernel(&OddSelfAdjoint::zeros(&space), 1e-12).unwrap();
        assert_eq!(s.kernel_dim, 6);
        assert!(spectrum_and_kernel(&OddSelfAdjoint::zeros(&space), 0.0).is_err());
    }

    #[test]
    fn two_dimensional_bott_has_one_dimensional_kernel() {
        let d = bott_diagnostics(&hermite_model(8, 2).unwrap(), 1e-8).unwrap();
        assert_eq!(d.kernel_dim, 1);
        assert!(d.kernel_residual < 1e-12);
        assert!(d.dc_defect < 1e-10);
        // B² = Σ B_i², so the next level is √2 (one coordinate excited)
        assert!(d.gap_defect < 1e-10);
    }

    #[test]
    fn dirac_clifford_commutator_is_minus_grading() {
        let d = bott_diagnostics(&hermite_model(32, 1).unwrap(), 1e-8).unwrap();
        assert!(d.dc_defect <= 1e-10);
        assert!(d.ccr_defect <= 1e-12);
        // the commutator is -γ, which differs from I by 2 on odd vectors
        assert!((d.dc_identity_defect - 2.0).abs() < 1e-10);
    }

    #[test]
    fn position_eigenvalues_are_hermite_roots() {
        // Independent oracle: evaluate the physicists' Hermite recurrence at
        // each eigenvalue of the position matrix, normalized to avoid overflow.
        let nb = 64;
        let (x, _) = ladder_matrices(nb);
        let eig = x.symmetric_eigen().eigenvalues;
        for &lambda in eig.iter() {
            // orthonormal Hermite functions h_k(x) ∝ H_k(x) e^{-x²/2}
            let (mut prev, mut cur) = (
                0.0_f64,
                std::f64::consts::PI.powf(-0.25) * (-lambda * lambda / 2.0).exp(),
            );
            let mut scale = cur.abs();
            for k in 0..nb {
                let next = (2.0 / (k as f64 + 1.0)).sqrt() * lambda * cur - (k as f64 / (k as f64 + 1.0)).sqrt() * prev;
                prev = cur;
                cur = next;
                scale = scale.max(cur.abs());
            }
            assert!(cur.abs() <= 1e-8 * scale, "λ={lambda}: residual {}", cur.abs() / scale);
        }
        // spot check against a published quadrature rule
        let rule = gauss_quad::GaussHermite::new(nb).unwrap();
        let mut nodes: Vec<f64> = rule.as_node_weight_pairs().iter().map(|p| p.0).collect();
        nodes.sort_by(f64::total_cmp);
        let mut ev: Vec<f64> = eig.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        for (a, b) in nodes.iter().zip(&ev) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }
}
