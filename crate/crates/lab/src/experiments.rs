//! The experiment suites. Each returns an [`Outcome`] whose checks carry a
//! plain statement of the inequality or identity being verified.

use apair_core::clifford::{
    bott_diagnostics, bott_dirac, hermite_model, perturbation_check, spectrum_and_kernel, BottDiagnostics,
};
use apair_core::estimates::{
    commbound_check, commbound_suite, exp_inverse_defect, exp_product_path_check, exp_product_series,
    exp_product_suite, exp_shift_suite, techlemma_sweep, SuiteOutcome, TechlemmaSweep,
};
use apair_core::pairs::{compose_pairs, AsymptoticPair, Factorization, Pushforward, RepresentedAlgebra};
use apair_core::profile::format_sci;
use apair_core::random::{
    odd_with_norm, random_even_hermitian, random_matrix, random_odd_self_adjoint, random_space, trial_rng, with_norm,
    LabRng,
};
use apair_core::{
    graded_commutator, graded_tensor, operator_norm, GradedMatrix, GradedSpace, OddSelfAdjoint, Parity, ScalarFunction,
    C64,
};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Experiment, RunConfig};
use crate::report::{Check, Outcome};
use crate::LabError;

pub fn run_experiment(cfg: &RunConfig) -> Result<Outcome, LabError> {
    match cfg.experiment {
        Experiment::Commbound => commbound(cfg),
        Experiment::Expfactor => expfactor(cfg),
        Experiment::Techlemma => techlemma(cfg),
        Experiment::Compose => compose(cfg),
        Experiment::Bott => bott(cfg),
        Experiment::Perturb => perturb(cfg),
        Experiment::AppendixB => appendix_b(cfg),
    }
}

fn qubit() -> GradedSpace {
    GradedSpace::new(vec![0, 1]).expect("valid")
}

fn sigma_x() -> OddSelfAdjoint {
    OddSelfAdjoint::new(GradedMatrix::from_real_rows(qubit(), &[&[0.0, 1.0], &[1.0, 0.0]]).expect("2x2")).expect("odd")
}

fn sigma_y() -> OddSelfAdjoint {
    let (z, i) = (C64::new(0.0, 0.0), C64::new(0.0, 1.0));
    let m = apair_core::graded::CMatrix::from_row_slice(2, 2, &[z, -i, i, z]);
    OddSelfAdjoint::new(GradedMatrix::new(qubit(), m).expect("2x2")).expect("odd")
}

fn dim_for(cfg: &RunConfig, trial: usize) -> usize {
    cfg.dims[trial % cfg.dims.len()]
}

fn random_odd_pair(rng: &mut LabRng, dim: usize) -> (GradedSpace, OddSelfAdjoint, OddSelfAdjoint) {
    let space = random_space(rng, dim);
    let d = random_odd_self_adjoint(rng, &space);
    let d2 = random_odd_self_adjoint(rng, &space);
    (space, d, d2)
}

fn koszul_lifts(rng: &mut LabRng, dim: usize) -> (OddSelfAdjoint, OddSelfAdjoint) {
    let (space, d, d2) = random_odd_pair(rng, dim);
    let id = GradedMatrix::identity(&space);
    (
        OddSelfAdjoint::new(graded_tensor(&d, &id)).expect("odd"),
        OddSelfAdjoint::new(graded_tensor(&id, &d2)).expect("odd"),
    )
}

fn suite_check(id: &str, reference: &str, suite: &SuiteOutcome, prefix: &str) -> Check {
    let certs: Vec<_> = suite
        .certificates
        .iter()
        .filter(|c| c.check.starts_with(prefix))
        .collect();
    let passed = certs.iter().filter(|c| c.pass).count();
    Check::new(id, reference, passed, certs.len())
        .measure(
            "worst_margin",
            certs.iter().map(|c| c.margin).fold(f64::INFINITY, f64::min),
        )
        .measure("max_lhs", certs.iter().map(|c| c.lhs).fold(0.0, f64::max))
}

fn commbound(cfg: &RunConfig) -> Result<Outcome, LabError> {
    let grid = cfg.grid();
    let suite = commbound_suite(cfg.seed, cfg.trials, &cfg.dims, &cfg.n_grid, &grid)?;
    let mut out = Outcome::default();
    out.check(
        suite_check(
            "commbound",
            "‖[i_N(D), i_N(D')]‖ ≤ ‖[D, D']‖ for every N > 0, where i_N(x) = x(1 + x²/N²)⁻¹",
            &suite,
            "commbound[",
        )
        .measure("trials", cfg.trials),
    );
    out.check(suite_check(
        "commbound_scaled",
        "‖[i_N(D/t), i_N(D'/t)]‖ ≤ t⁻²‖[D, D']‖ for every N > 0 and t on the grid",
        &suite,
        "commbound_scaled[",
    ));

    let mut rng = trial_rng(cfg.seed, cfg.trials as u64);
    let (l, r) = koszul_lifts(&mut rng, 3);
    let lifted = commbound_check(&l, &r, &cfg.n_grid, &grid)?;
    let worst = lifted.iter().map(|c| c.lhs).fold(0.0, f64::max);
    out.check(
        Check::single(
            "commbound_koszul",
            "[D ⊗̂ 1, 1 ⊗̂ D'] = 0 forces [i_N(D ⊗̂ 1), i_N(1 ⊗̂ D')] = 0",
            worst <= cfg.tolerances.exact,
        )
        .measure("max_lhs", worst),
    );
    let sx = commbound_check(&sigma_x(), &sigma_x(), &[1.0], &grid)?;
    out.check(
        Check::single(
            "commbound_sigma_x",
            "D = D' = σx, N = 1: ‖[D_N, D'_N]‖ = 2·(1/2)² = 1/2 and ‖[D, D']‖ = 2",
            (sx[0].lhs - 0.5).abs() <= 1e-12 && (sx[0].rhs - 2.0).abs() <= 1e-12,
        )
        .measure("lhs", sx[0].lhs)
        .measure("rhs", sx[0].rhs),
    );
    out.detail("failures", &suite.failures);
    out.certificates = suite.certificates;
    Ok(out)
}

#[derive(Serialize)]
struct RateRow {
    trial: usize,
    commutator_norm: f64,
    scaled_defect: f64,
    relative_error: f64,
    even_exponent: f64,
    odd_exponent: f64,
}

fn expfactor(cfg: &RunConfig) -> Result<Outcome, LabError> {
    let grid = cfg.grid();
    let t_max = *cfg.t_grid.last().expect("nonempty");
    let rows: Vec<(RateRow, _)> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(cfg.seed, i as u64);
            let (_, d, d2) = random_odd_pair(&mut rng, dim_for(cfg, i));
            let (d, d2) = (odd_with_norm(&d, 1.0), odd_with_norm(&d2, 1.0));
            let commutator_norm = operator_norm(&graded_commutator(&d, &d2)?);
            let fact = Factorization::new(&d, &d2)?;
            let (even, _) = fact.at(t_max)?;
            let scaled_defect = t_max * t_max * even;
            let (pe, po) = fact.profiles(&grid)?;
            Ok((
                RateRow {
                    trial: i,
                    commutator_norm,
                    scaled_defect,
                    relative_error: (scaled_defect / commutator_norm - 1.0).abs(),
                    even_exponent: pe.fitted_exponent,
                    odd_exponent: po.fitted_exponent,
                },
                (pe, po),
            ))
        })
        .collect::<Result<_, apair_core::Error>>()?;
    let mut out = Outcome::default();
    let tol = &cfg.tolerances;
    let rate_ok = rows.iter().filter(|r| r.0.relative_error <= tol.rate_relative).count();
    out.check(
        Check::new(
            "factorization_rate",
            "t²‖e^{-(D+D')²/t²} - e^{-D²/t²}e^{-D'²/t²}‖ → ‖[D, D']‖ at the largest t (‖D‖ = ‖D'‖ = 1)",
            rate_ok,
            rows.len(),
        )
        .measure("t", t_max)
        .measure(
            "worst_relative_error",
            rows.iter().map(|r| r.0.relative_error).fold(0.0, f64::max),
        ),
    );
    let exp_ok = rows.iter().filter(|r| (r.0.even_exponent + 2.0).abs() <= 0.1).count();
    out.check(
        Check::new(
            "factorization_exponent",
            "the even factorization defect decays like t⁻² (fitted exponent -2 ± 0.1)",
            exp_ok,
            rows.len(),
        )
        .measure(
            "min_exponent",
            rows.iter().map(|r| r.0.even_exponent).fold(f64::INFINITY, f64::min),
        )
        .measure(
            "max_exponent",
            rows.iter().map(|r| r.0.even_exponent).fold(f64::NEG_INFINITY, f64::max),
        ),
    );

    let mut rng = trial_rng(cfg.seed, cfg.trials as u64);
    let cases = [
        ("koszul", koszul_lifts(&mut rng, 4)),
        ("sigma_xy", (sigma_x(), sigma_y())),
    ];
    for (name, (d, d2)) in &cases {
        let (pe, po) = Factorization::new(d, d2)?.profiles(&grid)?;
        let worst = pe.max_value().max(po.max_value());
        out.check(
            Check::single(
                &format!("factorization_exact_{name}"),
                "[D, D'] = 0 gives e^{-(D+D')²/t²} = e^{-D²/t²}e^{-D'²/t²} and the odd analogue exactly",
                worst <= tol.exact,
            )
            .measure("max_defect", worst),
        );
        out.profile(format!("exact_{name}_even"), pe);
    }
    if let Some((_, (pe, po))) = rows.first() {
        out.profile("trial0_even", pe.clone());
        out.profile("trial0_odd", po.clone());
    }
    out.detail("trials", rows.iter().map(|r| &r.0).collect::<Vec<_>>());
    Ok(out)
}

#[derive(Serialize)]
struct SweepRow<'a> {
    trial: usize,
    suprema: &'a [f64],
    monotone: bool,
    final_supremum: f64,
    constant_m: f64,
    resolvent_factor: f64,
}

fn techlemma(cfg: &RunConfig) -> Result<Outcome, LabError> {
    let grid = cfg.grid();
    let f = ScalarFunction::ResolventPlus;
    let sweeps: Vec<TechlemmaSweep> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(cfg.seed, i as u64);
            let (_, d, d2) = random_odd_pair(&mut rng, dim_for(cfg, i));
            techlemma_sweep(&d, &d2, &f, &cfg.n_grid, &grid)
        })
        .collect::<Result<_, _>>()?;
    let tail = cfg.tolerances.techlemma_tail;
    let mut out = Outcome::default();
    let count = |p: &dyn Fn(&TechlemmaSweep) -> bool| sweeps.iter().filter(|s| p(s)).count();
    out.check(
        Check::new(
            "techlemma_monotone",
            "sup over the top decade of t of ‖f((D/t)_N + (D'/t)_N) - f((D + D')/t)‖ is nonincreasing in N",
            count(&|s| s.monotone),
            sweeps.len(),
        )
        .measure("function", f.name()),
    );
    out.check(
        Check::new(
            "techlemma_tail",
            "the same supremum is below the tail tolerance at the largest N",
            count(&|s| s.final_supremum <= tail && s.tail_small),
            sweeps.len(),
        )
        .measure(
            "largest_final_supremum",
            sweeps.iter().map(|s| s.final_supremum).fold(0.0, f64::max),
        )
        .measure("tolerance", tail),
    );
    out.check(
        Check::new(
            "techlemma_constant",
            "‖D (D + D' + i)⁻¹‖² ≤ 1 + ‖[D, D']‖",
            count(&|s| s.constant_pass),
            sweeps.len(),
        )
        .measure(
            "worst_ratio",
            sweeps
                .iter()
                .map(|s| s.resolvent_factor / s.constant_m)
                .fold(0.0, f64::max),
        ),
    );
    if let Some(s) = sweeps.first() {
        for (n, row) in s.n_grid.iter().zip(&s.values) {
            out.profile(
                format!("trial0_N{n}"),
                apair_core::DecayProfile::from_values(&grid, row.clone())?,
            );
        }
    }
    out.detail(
        "trials",
        sweeps
            .iter()
            .enumerate()
            .map(|(trial, s)| SweepRow {
                trial,
                suprema: &s.suprema,
                monotone: s.monotone,
                final_supremum: s.final_supremum,
                constant_m: s.constant_m,
                resolvent_factor: s.resolvent_factor,
            })
            .collect::<Vec<_>>(),
    );
    out.detail("n_grid", &cfg.n_grid);
    Ok(out)
}

fn random_rep(rng: &mut LabRng, space: &GradedSpace) -> Result<RepresentedAlgebra, apair_core::Error> {
    let a = random_matrix(rng, space, None);
    let b = random_even_hermitian(rng, space);
    RepresentedAlgebra::new(space.clone(), vec![("a".into(), a), ("b".into(), b)])
}

#[derive(Serialize)]
struct ComposeRow {
    trial: usize,
    pushforward: &'static str,
    commutator_norm: f64,
    worst_exponent: f64,
    pass: bool,
}

fn compose(cfg: &RunConfig) -> Result<Outcome, LabError> {
    let grid = cfg.grid();
    let threshold = cfg.tolerances.second_order_exponent;
    let results: Vec<(ComposeRow, apair_core::pairs::Composition, f64, bool)> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(cfg.seed, i as u64);
            let space = random_space(&mut rng, dim_for(cfg, i));
            let d = random_odd_self_adjoint(&mut rng, &space);
            let p_ab = AsymptoticPair::new(random_rep(&mut rng, &space)?, d, None)?;
            let (push, target, label) = if i % 2 == 0 {
                (Pushforward::Identity, space.clone(), "identity")
            } else {
                let aux = qubit();
                let big = space.tensor(&aux);
                (Pushforward::AmplifyRight { aux }, big, "amplify_right")
            };
            let d2 = random_odd_self_adjoint(&mut rng, &target);
            let p_bc = AsymptoticPair::new(RepresentedAlgebra::unit(&target), d2, None)?;
            let c = compose_pairs(&p_ab, &p_bc, &push, &grid)?;

            let zero = AsymptoticPair::new(RepresentedAlgebra::unit(&space), OddSelfAdjoint::zeros(&space), None)?;
            let cz = compose_pairs(&p_ab, &zero, &Pushforward::Identity, &grid)?;
            let zero_defect = cz
                .naive_defects
                .iter()
                .map(|p| p.profile.max_value())
                .fold(0.0, f64::max);
            let zero_same = cz.pair.d() == p_ab.d() && cz.pair.rep().generators() == p_ab.rep().generators();
            let worst = c.worst_exponent();
            Ok((
                ComposeRow {
                    trial: i,
                    pushforward: label,
                    commutator_norm: c.bc.commutator_norm,
                    worst_exponent: worst,
                    pass: c.bc.pass && worst <= threshold,
                },
                c,
                zero_defect,
                zero_same,
            ))
        })
        .collect::<Result<_, apair_core::Error>>()?;
    let mut out = Outcome::default();
    out.check(
        Check::new(
            "compose_rate",
            "‖f((ψ(D) + D')/t) ρ(a) - naive_t(f)(a)‖ decays at second order for f ∈ {e^{-x²}, x e^{-x²}}",
            results.iter().filter(|r| r.0.pass).count(),
            results.len(),
        )
        .measure("threshold", threshold)
        .measure(
            "worst_exponent",
            results
                .iter()
                .map(|r| r.0.worst_exponent)
                .fold(f64::NEG_INFINITY, f64::max),
        ),
    );
    let exact = cfg.tolerances.exact;
    out.check(
        Check::new(
            "compose_zero_exact",
            "composing with (id, 0) returns (φ, D) and the naive composite exactly",
            results.iter().filter(|r| r.3 && r.2 <= exact).count(),
            results.len(),
        )
        .measure("max_defect", results.iter().map(|r| r.2).fold(0.0, f64::max)),
    );
    if let Some((_, c, _, _)) = results.first() {
        for p in &c.naive_defects {
            out.profile(format!("trial0_{}_{}", p.generator, p.function), p.profile.clone());
        }
    }
    out.detail("trials", results.iter().map(|r| &r.0).collect::<Vec<_>>());
    Ok(out)
}

fn bott(cfg: &RunConfig) -> Result<Outcome, LabError> {
    let nb = cfg.n_basis;
    let tol = &cfg.tolerances;
    let ladder: Vec<usize> = [nb / 2, nb, 2 * nb].into_iter().filter(|&k| k >= 8).collect();
    let diags: Vec<BottDiagnostics> = ladder
        .par_iter()
        .map(|&k| bott_diagnostics(&hermite_model(k, 1)?, tol.kernel))
        .collect::<Result<_, _>>()?;
    let main = diags
        .iter()
        .find(|d| d.n_basis == nb)
        .expect("n_basis is in the ladder");
    let mut out = Outcome::default();
    out.check(
        Check::single(
            "bott_kernel",
            "the Bott–Dirac operator B = D + C has a one-dimensional kernel spanned by ψ₀ ⊗ 1",
            main.kernel_dim == 1 && main.smallest_magnitude < tol.kernel,
        )
        .measure("kernel_dim", main.kernel_dim)
        .measure("smallest_magnitude", main.smallest_magnitude)
        .measure("kernel_residual", main.kernel_residual),
    );
    out.check(
        Check::single(
            "bott_gap",
            "the smallest nonzero |λ| of B is √2 (B² = -∂² + x² + [D, C])",
            main.gap_defect <= tol.gap,
        )
        .measure("second_magnitude", main.second_magnitude)
        .measure("defect", main.gap_defect),
    );
    out.check(
        Check::single(
            "bott_dc_identity",
            "‖[D, C] - I‖ on the interior levels",
            main.dc_identity_defect <= tol.commutator,
        )
        .measure("defect", main.dc_identity_defect),
    );
    out.check(
        Check::single(
            "bott_dc_grading",
            "[D, C] = [∂, x] ⊗ (êe + eê) = -γ on the interior levels",
            main.dc_defect <= tol.commutator,
        )
        .measure("defect", main.dc_defect),
    );
    out.check(
        Check::single(
            "bott_ccr",
            "[∂, x] = I on the first n_basis - 2 Hermite levels",
            main.ccr_defect <= tol.exact,
        )
        .measure("defect", main.ccr_defect),
    );
    out.check(
        Check::single(
            "bott_symmetry",
            "the spectrum of B is symmetric about 0",
            main.symmetry_defect <= tol.commutator,
        )
        .measure("defect", main.symmetry_defect),
    );
    let floor = 1e-12;
    let converging = diags.windows(2).all(|w| {
        w[1].kernel_residual <= w[0].kernel_residual.max(floor) && w[1].gap_defect <= w[0].gap_defect.max(floor)
    });
    out.check(
        Check::single(
            "bott_convergence",
            "the kernel residual ‖B(ψ₀ ⊗ 1)‖ and the gap defect |λ₂ - √2| do not grow as n_basis doubles (roundoff floor 1e-12)",
            converging && diags.len() >= 2,
        )
        .measure("n_basis", diags.iter().map(|d| d.n_basis).collect::<Vec<_>>())
        .measure("kernel_residual", diags.iter().map(|d| d.kernel_residual).collect::<Vec<_>>())
        .measure("gap_defect", diags.iter().map(|d| d.gap_defect).collect::<Vec<_>>()),
    );
    if cfg.coords > 1 {
        let multi = bott_diagnostics(&hermite_model(8, cfg.coords)?, tol.kernel)?;
        out.check(
            Check::single(
                "bott_kernel_multi",
                "the graded tensor power model in several coordinates keeps a one-dimensional kernel",
                multi.kernel_dim == 1 && multi.dc_defect <= tol.commutator,
            )
            .measure("coords", cfg.coords)
            .measure("kernel_dim", multi.kernel_dim)
            .measure("dc_defect", multi.dc_defect),
        );
        out.detail("multi", &multi);
    }
    let ops = bott_dirac(&hermite_model(nb, 1)?)?;
    let summary = spectrum_and_kernel(&ops.bott, tol.kernel)?;
    out.tables.push(("spectrum.csv".into(), summary.to_csv(format_sci)));
    out.detail("diagnostics", &diags);
    Ok(out)
}

#[derive(Serialize)]
struct PerturbRow {
    case: String,
    g_exponent: f64,
    cayley_exponent: f64,
    even_exponent: f64,
    odd_exponent: f64,
    composition_matches: bool,
    composition_exponent: f64,
}

fn perturb_row(case: String, r: &apair_core::clifford::PerturbationReport) -> PerturbRow {
    let worst = |name: &str| {
        r.homomorphism_profiles
            .iter()
            .filter(|p| p.function == name)
            .map(|p| p.profile.fitted_exponent)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    PerturbRow {
        case,
        g_exponent: worst("g"),
        cayley_exponent: worst("cayley"),
        even_exponent: r.even_defect.fitted_exponent,
        odd_exponent: r.odd_defect.fitted_exponent,
        composition_matches: r.composition_matches,
        composition_exponent: r.composition_exponent,
    }
}

fn perturb(cfg: &RunConfig) -> Result<Outcome, LabError> {
    let grid = cfg.grid();
    let tol = &cfg.tolerances;
    let reports: Vec<(PerturbRow, apair_core::clifford::PerturbationReport)> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(cfg.seed, i as u64);
            let space = random_space(&mut rng, dim_for(cfg, i));
            let d = random_odd_self_adjoint(&mut rng, &space);
            let rep =
                RepresentedAlgebra::new(space.clone(), vec![("a".into(), random_matrix(&mut rng, &space, None))])?;
            let pair = AsymptoticPair::new(rep, d, None)?;
            let v = odd_with_norm(&random_odd_self_adjoint(&mut rng, &space), cfg.max_norm);
            let r = perturbation_check(&pair, &v, &grid)?;
            Ok((perturb_row(format!("random#{i}"), &r), r))
        })
        .collect::<Result<_, apair_core::Error>>()?;

    let model = hermite_model(cfg.n_basis, 1)?;
    let ops = bott_dirac(&model)?;
    let bott_pair = AsymptoticPair::new(RepresentedAlgebra::unit(model.space()), ops.dirac.clone(), None)?;
    let bott_report = perturbation_check(&bott_pair, &ops.clifford, &grid)?;
    let bott_row = perturb_row("bott".into(), &bott_report);

    let mut out = Outcome::default();
    let all: Vec<&PerturbRow> = reports.iter().map(|r| &r.0).chain(std::iter::once(&bott_row)).collect();
    let count = |p: &dyn Fn(&PerturbRow) -> bool| all.iter().filter(|r| p(r)).count();
    out.check(
        Check::new(
            "perturb_homomorphism_g",
            "‖g(V/t) b - g(0) b‖ → 0 at rate t⁻¹ for g(x) = x(1 + x²)⁻¹",
            count(&|r| r.g_exponent <= tol.first_order_exponent),
            all.len(),
        )
        .measure("threshold", tol.first_order_exponent)
        .measure(
            "worst_exponent",
            all.iter().map(|r| r.g_exponent).fold(f64::NEG_INFINITY, f64::max),
        )
        .measure(
            "best_exponent",
            all.iter().map(|r| r.g_exponent).fold(f64::INFINITY, f64::min),
        ),
    );
    out.check(
        Check::new(
            "perturb_homomorphism_cayley",
            "‖(1 + V²/t²)⁻¹ b - b‖ → 0 at rate t⁻²",
            count(&|r| r.cayley_exponent <= tol.second_order_exponent),
            all.len(),
        )
        .measure(
            "worst_exponent",
            all.iter().map(|r| r.cayley_exponent).fold(f64::NEG_INFINITY, f64::max),
        ),
    );
    out.check(
        Check::new(
            "perturb_factorization",
            "the even and odd factorization defects of (D, V) decay at second order",
            count(&|r| r.even_exponent <= tol.second_order_exponent && r.odd_exponent <= tol.second_order_exponent),
            all.len(),
        )
        .measure(
            "worst_even_exponent",
            all.iter().map(|r| r.even_exponent).fold(f64::NEG_INFINITY, f64::max),
        ),
    );
    out.check(
        Check::new(
            "perturb_composition",
            "composing (φ, D) with (id, V) gives (φ, D + V) with a second-order naive defect",
            count(&|r| r.composition_matches && r.composition_exponent <= tol.second_order_exponent),
            all.len(),
        )
        .measure(
            "worst_exponent",
            all.iter()
                .map(|r| r.composition_exponent)
                .fold(f64::NEG_INFINITY, f64::max),
        ),
    );

    let mut rng = trial_rng(cfg.seed, cfg.trials as u64);
    let space = random_space(&mut rng, cfg.dims[0]);
    let pair = AsymptoticPair::new(
        RepresentedAlgebra::new(space.clone(), vec![("a".into(), random_matrix(&mut rng, &space, None))])?,
        random_odd_self_adjoint(&mut rng, &space),
        None,
    )?;
    let zero = perturbation_check(&pair, &OddSelfAdjoint::zeros(&space), &grid)?;
    let zero_max = zero
        .homomorphism_profiles
        .iter()
        .map(|p| p.profile.max_value())
        .chain([zero.even_defect.max_value(), zero.odd_defect.max_value()])
        .fold(0.0, f64::max);
    out.check(
        Check::single(
            "perturb_zero",
            "V = 0 leaves every profile identically zero",
            zero_max == 0.0,
        )
        .measure("max_value", zero_max),
    );

    if let Some((_, r)) = reports.first() {
        for p in &r.homomorphism_profiles {
            out.profile(format!("trial0_{}_{}", p.generator, p.function), p.profile.clone());
        }
    }
    out.profile("bott_even_defect", bott_report.even_defect.clone());
    out.profile("bott_odd_defect", bott_report.odd_defect.clone());
    out.detail("cases", &all);
    Ok(out)
}

fn appendix_b(cfg: &RunConfig) -> Result<Outcome, LabError> {
    let max_dim = cfg.dims.iter().copied().max().expect("nonempty");
    let shift = exp_shift_suite(cfg.seed, cfg.trials, max_dim, cfg.max_norm)?;
    let product_seed = cfg.seed.wrapping_add(1);
    let product = exp_product_suite(product_seed, cfg.trials, max_dim, 1.0)?;
    let mut out = Outcome::default();
    out.check(
        suite_check(
            "exp_shift",
            "‖e^{x+y} - e^x‖ ≤ ‖y‖e^{2‖x‖} for even x, y with ‖y‖ ≤ ‖x‖",
            &shift,
            "exp_shift#",
        )
        .measure("max_norm", cfg.max_norm),
    );
    out.check(
        suite_check(
            "exp_product",
            "‖e^{x+y} - e^x e^y‖ ≤ Σ_n (n+1)(⌊n/2⌋!)⁻²(n²/4)‖[x, y]‖M^{n-2} with M > max(‖x‖, ‖y‖)",
            &product,
            "exp_product#",
        )
        .measure("seed", product_seed),
    );
    let ratios: Vec<bool> = [0.5, 1.0, 3.0, 10.0]
        .iter()
        .map(|&m| exp_product_series(1.0, m).map(|s| s.ratio_certified))
        .collect::<Result<_, _>>()?;
    out.check(Check::new(
        "exp_series_finite",
        "the series bound converges: successive terms shrink by a factor below 1/2 where it is truncated (M ∈ {0.5, 1, 3, 10})",
        ratios.iter().filter(|&&b| b).count(),
        ratios.len(),
    ));

    let mut rng = trial_rng(cfg.seed, cfg.trials as u64);
    let (_, d, d2) = random_odd_pair(&mut rng, 8);
    let path = exp_product_path_check(&d, &d2, &cfg.grid())?;
    out.check(
        Check::single(
            "exp_product_path",
            "along x_t = -D²/t², y_t = -D'²/t² the product defect is bounded by the series and tends to 0",
            path.pass,
        )
        .measure("exponent", path.defect.fitted_exponent)
        .measure("commutator_exponent", path.commutator.fitted_exponent),
    );
    out.profile("path_defect", path.defect.clone());
    out.profile("path_commutator", path.commutator.clone());

    let (general, hermitian): (Vec<f64>, Vec<(f64, f64)>) = (0..40u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(cfg.seed, cfg.trials as u64 + 1 + i);
            let dim = rng.gen_range(2..=max_dim.max(2));
            let space = random_space(&mut rng, dim);
            let norm = rng.gen_range(0.1..=5.0);
            let x = with_norm(&random_matrix(&mut rng, &space, Some(Parity::Even)), norm);
            let h = with_norm(&random_even_hermitian(&mut rng, &space), norm);
            let cond = apair_core::estimates::expm(&h).operator_norm()
                * apair_core::estimates::expm(&h.scale(-1.0)).operator_norm();
            (exp_inverse_defect(&x), (exp_inverse_defect(&h), cond))
        })
        .unzip();
    let worst = general.iter().copied().fold(0.0, f64::max);
    out.check(
        Check::new(
            "exp_self_test",
            "‖e^x e^{-x} - I‖ ≤ 1e-12 for random even x with ‖x‖ ≤ 5",
            general.iter().filter(|&&v| v <= 1e-12).count(),
            general.len(),
        )
        .measure("worst", worst),
    );
    let worst_h = hermitian.iter().map(|h| h.0).fold(0.0, f64::max);
    let worst_ratio = hermitian.iter().map(|h| h.0 / (h.1 * f64::EPSILON)).fold(0.0, f64::max);
    out.check(
        Check::new(
            "exp_self_test_hermitian",
            "‖e^x e^{-x} - I‖ ≤ 1e-12 for hermitian even x with ‖x‖ ≤ 5 (limited by ε‖e^x‖‖e^{-x}‖)",
            hermitian.iter().filter(|h| h.0 <= 1e-12).count(),
            hermitian.len(),
        )
        .informational()
        .measure("worst", worst_h)
        .measure("worst_over_roundoff_floor", worst_ratio),
    );

    out.detail(
        "failures",
        shift.failures.iter().chain(&product.failures).collect::<Vec<_>>(),
    );
    out.certificates = shift.certificates;
    out.certificates.extend(product.certificates);
    out.certificates
        .extend(path.certificates.into_iter().map(|c| c.with_seed(cfg.seed)));
    Ok(out)
}
