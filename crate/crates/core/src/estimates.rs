//! Certified inequalities: exponential shift and product bounds, the
//! bounded-transform commutator bound, and the double limit of the
//! technical lemma, with seeded randomized suites for each.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcalc::{ScalarFunction, Spectrum};
use crate::graded::{graded_commutator, operator_norm, CMatrix, GradedMatrix, GradedSpace, OddSelfAdjoint, Parity};
use crate::profile::{DecayProfile, TGrid};
use crate::random::{random_matrix, random_odd_self_adjoint, random_space, trial_rng, with_norm};

/// A certificate passes when `rhs - lhs >= -MARGIN_TOL`.
pub const MARGIN_TOL: f64 = 1e-10;
const SERIES_REL_TOL: f64 = 1e-16;
const SERIES_CAP: usize = 400;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundCertificate {
    pub check: String,
    pub seed: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub pass: bool,
}

impl BoundCertificate {
    pub fn new(check: impl Into<String>, seed: u64, lhs: f64, rhs: f64) -> Self {
        let margin = rhs - lhs;
        Self {
            check: check.into(),
            seed,
            lhs,
            rhs,
            margin,
            pass: margin >= -MARGIN_TOL,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Matrix exponential. Hermitian inputs go through the eigendecomposition,
/// everything else through Padé scaling and squaring.
pub fn expm(x: &GradedMatrix) -> GradedMatrix {
    if x.hermitian_defect() <= 1e-14 * x.max_abs().max(1.0) {
        Spectrum::of(x).map(|l| l.exp().into())
    } else {
        x.map_matrix(|m| m.exp())
    }
}

/// `‖e^x e^{-x} - I‖`.
pub fn exp_inverse_defect(x: &GradedMatrix) -> f64 {
    let prod = &expm(x) * &expm(&x.scale(-1.0));
    operator_norm(&(&prod - &GradedMatrix::identity(x.space())))
}

fn require_even(x: &GradedMatrix) -> Result<()> {
    match x.homogeneous_parity(1e-12 * x.max_abs().max(1.0)) {
        Some(Parity::Even) => Ok(()),
        _ => Err(Error::NotEven),
    }
}

/// `‖e^{x+y} - e^x‖ <= ‖y‖ e^{2‖x‖}` for even `x, y` with `‖y‖ <= ‖x‖`.
pub fn exp_shift_bound_check(x: &GradedMatrix, y: &GradedMatrix) -> Result<BoundCertificate> {
    x.same_space(y)?;
    require_even(x)?;
    require_even(y)?;
    let (nx, ny) = (x.operator_norm(), y.operator_norm());
    if ny > nx * (1.0 + 1e-12) {
        return Err(Error::Precondition(format!("need ‖y‖ <= ‖x‖, got {ny} > {nx}")));
    }
    let lhs = operator_norm(&(&expm(&(x + y)) - &expm(x)));
    Ok(BoundCertificate::new("exp_shift", 0, lhs, ny * (2.0 * nx).exp()))
}

/// The product-defect series `Σ_n (n+1) (⌊n/2⌋!)^{-2} (n²/4) c M^{n-2}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesBound {
    pub value: f64,
    pub terms: usize,
    /// Largest of `a_n / a_{n-2}` over the last two terms. The factorial
    /// only changes every other step, so adjacent terms are not compared.
    pub last_ratio: f64,
    /// Terms were decreasing by a factor below 1/2 when the sum stopped.
    pub ratio_certified: bool,
}

/// Sums the series in log space, stopping once a term drops below
/// `1e-16` of the partial sum (at most 400 terms).
pub fn exp_product_series(commutator_norm: f64, m: f64) -> Result<SeriesBound> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::InvalidParameter { name: "M", value: m });
    }
    if commutator_norm == 0.0 {
        return Ok(SeriesBound {
            value: 0.0,
            terms: 0,
            last_ratio: 0.0,
            ratio_certified: true,
        });
    }
    let (ln_c, ln_m) = (commutator_norm.ln(), m.ln());
    let mut ln_fact = vec![0.0_f64];
    let mut sum = 0.0;
    let mut history: Vec<f64> = Vec::new();
    let mut last_ratio = f64::NAN;
    let mut terms = 0;
    for n in 1..SERIES_CAP {
        let half = n / 2;
        while ln_fact.len() <= half {
            let k = ln_fact.len();
            ln_fact.push(ln_fact[k - 1] + (k as f64).ln());
        }
        let nf = n as f64;
        let ln_term = (nf + 1.0).ln() - 2.0 * ln_fact[half] + (nf * nf / 4.0).ln() + ln_c + (nf - 2.0) * ln_m;
        let term = ln_term.exp();
        sum += term;
        terms = n + 1;
        history.push(term);
        let k = history.len();
        if k >= 4 {
            last_ratio = (history[k - 1] / history[k - 3]).max(history[k - 2] / history[k - 4]);
        }
        if n >= 4 && term < SERIES_REL_TOL * sum {
            break;
        }
    }
    Ok(SeriesBound {
        value: sum,
        terms,
        last_ratio,
        ratio_certified: last_ratio < 0.5,
    })
}

/// Bound constant `M`: any number strictly above `max(‖x‖, ‖y‖)`.
fn strict_majorant(a: f64, b: f64) -> f64 {
    a.max(b) * (1.0 + 1e-9) + 1e-12
}

/// `‖e^{x+y} - e^x e^y‖` against the series bound.
pub fn exp_product_bound_check(x: &GradedMatrix, y: &GradedMatrix) -> Result<BoundCertificate> {
    x.same_space(y)?;
    require_even(x)?;
    require_even(y)?;
    let comm = operator_norm(&(&(x * y) - &(y * x)));
    let series = exp_product_series(comm, strict_majorant(x.operator_norm(), y.operator_norm()))?;
    if !series.ratio_certified {
        return Err(Error::Precondition(format!(
            "series bound not certified finite (last ratio {})",
            series.last_ratio
        )));
    }
    let lhs = operator_norm(&(&expm(&(x + y)) - &(&expm(x) * &expm(y))));
    Ok(BoundCertificate::new("exp_product", 0, lhs, series.value))
}

/// The product defect along `x_t = -D²/t²`, `y_t = -D'²/t²`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PathReport {
    pub defect: DecayProfile,
    pub commutator: DecayProfile,
    pub certificates: Vec<BoundCertificate>,
    pub pass: bool,
}

pub fn exp_product_path_check(d: &OddSelfAdjoint, d2: &OddSelfAdjoint, grid: &TGrid) -> Result<PathReport> {
    d.same_space(d2)?;
    let (dd, dd2) = (d.as_graded() * d.as_graded(), d2.as_graded() * d2.as_graded());
    let rows: Vec<(f64, f64, BoundCertificate)> = grid
        .points()
        .par_iter()
        .map(|&t| {
            let s = -1.0 / (t * t);
            let (x, y) = (dd.scale(s), dd2.scale(s));
            let cert = exp_product_bound_check(&x, &y)?;
            let comm = operator_norm(&(&(&x * &y) - &(&y * &x)));
            Ok((
                cert.lhs,
                comm,
                BoundCertificate {
                    check: format!("exp_product_path[t={t}]"),
                    ..cert
                },
            ))
        })
        .collect::<Result<_>>()?;
    let defect = DecayProfile::from_values(grid, rows.iter().map(|r| r.0).collect())?;
    let commutator = DecayProfile::from_values(grid, rows.iter().map(|r| r.1).collect())?;
    let certificates: Vec<BoundCertificate> = rows.into_iter().map(|r| r.2).collect();
    let pass = certificates.iter().all(|c| c.pass)
        && defect.fitted_exponent < 0.0
        && defect.values.last() <= defect.values.first();
    Ok(PathReport {
        defect,
        commutator,
        certificates,
        pass,
    })
}

fn validate_n_grid(n_grid: &[f64]) -> Result<()> {
    if n_grid.is_empty() || n_grid.iter().any(|n| !(*n > 0.0 && n.is_finite())) {
        return Err(Error::InvalidGrid("N grid must be nonempty and positive".into()));
    }
    Ok(())
}

fn i_n(x: f64, n: f64) -> f64 {
    x / (1.0 + x * x / (n * n))
}

/// `‖[D_N, D'_N]‖ <= ‖[D, D']‖` for each `N`, then the scaled version
/// `‖[(D/t)_N, (D'/t)_N]‖ <= ‖[D, D']‖/t²` over `t_grid`.
pub fn commbound_check(
    d: &OddSelfAdjoint,
    d2: &OddSelfAdjoint,
    n_grid: &[f64],
    t_grid: &TGrid,
) -> Result<Vec<BoundCertificate>> {
    d.same_space(d2)?;
    validate_n_grid(n_grid)?;
    let rhs = operator_norm(&graded_commutator(d, d2)?);
    let (s1, s2) = (Spectrum::of(d), Spectrum::of(d2));
    let comm = |a: &GradedMatrix, b: &GradedMatrix| operator_norm(&(&(a * b) + &(b * a)));
    let mut out = Vec::with_capacity(n_grid.len() * (1 + t_grid.len()));
    for &n in n_grid {
        let (a, b) = (s1.map(|x| i_n(x, n).into()), s2.map(|x| i_n(x, n).into()));
        out.push(BoundCertificate::new(format!("commbound[N={n}]"), 0, comm(&a, &b), rhs));
    }
    for &n in n_grid {
        for &t in t_grid.points() {
            let (a, b) = (s1.map(|x| i_n(x / t, n).into()), s2.map(|x| i_n(x / t, n).into()));
            out.push(BoundCertificate::new(
                format!("commbound_scaled[N={n},t={t}]"),
                0,
                comm(&a, &b),
                rhs / (t * t),
            ));
        }
    }
    Ok(out)
}

/// `d(N, t) = ‖f((D/t)_N + (D'/t)_N) - f(D/t + D'/t)‖` on a grid, with the
/// per-`N` suprema over the top decade of `t`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TechlemmaSweep {
    pub function: String,
    pub n_grid: Vec<f64>,
    pub t_grid: Vec<f64>,
    /// Row `i` belongs to `n_grid[i]`.
    pub values: Vec<Vec<f64>>,
    pub suprema: Vec<f64>,
    pub monotone: bool,
    /// Supremum at the largest `N`.
    pub final_supremum: f64,
    /// `64 · max(‖D‖, ‖D'‖)`; suprema at `N` at or beyond this must be `<= 1e-6`.
    pub large_n_threshold: f64,
    pub tail_small: bool,
    /// `M = 1 + ‖[D, D']‖`.
    pub constant_m: f64,
    /// `‖D (D + D' + i)^{-1}‖²`.
    pub resolvent_factor: f64,
    pub constant_pass: bool,
    pub pass: bool,
}

pub const TECHLEMMA_TAIL: f64 = 1e-6;

fn vanishes_at_infinity(f: &ScalarFunction) -> bool {
    matches!(
        f,
        ScalarFunction::Gauss0
            | ScalarFunction::Gauss1
            | ScalarFunction::ResolventPlus
            | ScalarFunction::ResolventMinus
            | ScalarFunction::Cayley
            | ScalarFunction::G
            | ScalarFunction::Cutoff { .. }
    )
}

pub fn techlemma_sweep(
    d: &OddSelfAdjoint,
    d2: &OddSelfAdjoint,
    f: &ScalarFunction,
    n_grid: &[f64],
    t_grid: &TGrid,
) -> Result<TechlemmaSweep> {
    d.same_space(d2)?;
    validate_n_grid(n_grid)?;
    if !vanishes_at_infinity(f) {
        return Err(Error::Precondition(format!("{} does not vanish at infinity", f.name())));
    }
    let (s1, s2) = (Spectrum::of(d), Spectrum::of(d2));
    let sum = Spectrum::of(d.try_add(d2)?.as_graded());
    let values: Vec<Vec<f64>> = n_grid
        .par_iter()
        .map(|&n| {
            t_grid
                .points()
                .iter()
                .map(|&t| {
                    let a = &s1.map(|x| i_n(x / t, n).into()) + &s2.map(|x| i_n(x / t, n).into());
                    let transformed = Spectrum::of(&a).apply(f);
                    operator_norm(&(&transformed - &sum.apply_scaled(f, 1.0 / t)))
                })
                .collect()
        })
        .collect();
    let top = t_grid.points()[t_grid.len() - 1] / 10.0;
    let suprema: Vec<f64> = values
        .iter()
        .map(|row| {
            t_grid
                .points()
                .iter()
                .zip(row)
                .filter(|(&t, _)| t >= top)
                .map(|(_, &v)| v)
                .fold(0.0, f64::max)
        })
        .collect();
    let mut order: Vec<usize> = (0..n_grid.len()).collect();
    order.sort_by(|&a, &b| n_grid[a].total_cmp(&n_grid[b]));
    let monotone = order
        .windows(2)
        .all(|w| suprema[w[1]] <= suprema[w[0]] * (1.0 + 1e-9) + 1e-15);
    let largest = *order.last().expect("nonempty");
    let final_supremum = suprema[largest];
    let large_n_threshold = 64.0 * d.operator_norm().max(d2.operator_norm());
    let tail_small = final_supremum <= TECHLEMMA_TAIL
        && order
            .iter()
            .filter(|&&i| n_grid[i] >= large_n_threshold)
            .all(|&i| suprema[i] <= TECHLEMMA_TAIL);

    let constant_m = 1.0 + operator_norm(&graded_commutator(d, d2)?);
    let resolvent = sum.apply(&ScalarFunction::ResolventPlus);
    let resolvent_factor = operator_norm(&(d.as_graded() * &resolvent)).powi(2);
    let constant_pass = resolvent_factor <= constant_m + MARGIN_TOL;
    Ok(TechlemmaSweep {
        function: f.name(),
        n_grid: n_grid.to_vec(),
        t_grid: t_grid.points().to_vec(),
        values,
        suprema,
        monotone,
        final_supremum,
        large_n_threshold,
        tail_small,
        constant_m,
        resolvent_factor,
        constant_pass,
        pass: monotone && tail_small && constant_pass,
    })
}

/// A matrix in a failure dump: parity signature and entries as `[re, im]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DumpedMatrix {
    pub name: String,
    pub parity: Vec<u8>,
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl DumpedMatrix {
    pub fn new(name: &str, m: &GradedMatrix) -> Self {
        let mat: &CMatrix = m.matrix();
        Self {
            name: name.into(),
            parity: m.space().parities().to_vec(),
            entries: (0..mat.nrows())
                .map(|i| (0..mat.ncols()).map(|j| [mat[(i, j)].re, mat[(i, j)].im]).collect())
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FailureDump {
    pub trial: u64,
    pub seed: u64,
    pub checks: Vec<String>,
    pub matrices: Vec<DumpedMatrix>,
}

/// Certificates of a randomized suite, ordered by trial.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SuiteOutcome {
    pub certificates: Vec<BoundCertificate>,
    pub failures: Vec<FailureDump>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> usize {
        self.certificates.iter().filter(|c| c.pass).count()
    }

    pub fn all_pass(&self) -> bool {
        !self.certificates.is_empty() && self.failures.is_empty()
    }

    pub fn worst_margin(&self) -> f64 {
        self.certificates.iter().map(|c| c.margin).fold(f64::INFINITY, f64::min)
    }
}

/// Runs `trial` for each index in parallel on its own stream of `seed`,
/// tagging certificates with the trial index and collecting dumps for
/// failing trials.
fn run_suite<F>(seed: u64, trials: usize, trial: F) -> Result<SuiteOutcome>
where
    F: Fn(u64, &mut crate::random::LabRng) -> Result<(Vec<BoundCertificate>, Vec<DumpedMatrix>)> + Sync,
{
    let per_trial: Vec<(Vec<BoundCertificate>, Vec<DumpedMatrix>)> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let (certs, mats) = trial(i, &mut rng)?;
            let certs = certs
                .into_iter()
                .map(|c| BoundCertificate {
                    check: format!("{}#{i}", c.check),
                    ..c.with_seed(seed)
                })
                .collect();
            Ok((certs, mats))
        })
        .collect::<Result<_>>()?;
    let mut out = SuiteOutcome::default();
    for (i, (certs, mats)) in per_trial.into_iter().enumerate() {
        let failing: Vec<String> = certs.iter().filter(|c| !c.pass).map(|c| c.check.clone()).collect();
        if !failing.is_empty() {
            out.failures.push(FailureDump {
                trial: i as u64,
                seed,
                checks: failing,
                matrices: mats,
            });
        }
        out.certificates.extend(certs);
    }
    Ok(out)
}

fn random_pair_in(rng: &mut crate::random::LabRng, space: &GradedSpace) -> (OddSelfAdjoint, OddSelfAdjoint) {
    let d = random_odd_self_adjoint(rng, space);
    let d2 = random_odd_self_adjoint(rng, space);
    (d, d2)
}

/// Random odd self-adjoint pairs with dimensions cycling through `dims`.
pub fn commbound_suite(
    seed: u64,
    trials: usize,
    dims: &[usize],
    n_grid: &[f64],
    t_grid: &TGrid,
) -> Result<SuiteOutcome> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::InvalidParameter {
            name: "dims",
            value: 0.0,
        });
    }
    run_suite(seed, trials, |i, rng| {
        let space = random_space(rng, dims[i as usize % dims.len()]);
        let (d, d2) = random_pair_in(rng, &space);
        let certs = commbound_check(&d, &d2, n_grid, t_grid)?;
        Ok((certs, vec![DumpedMatrix::new("D", &d), DumpedMatrix::new("D'", &d2)]))
    })
}

/// Random even pairs with `‖y‖ <= ‖x‖ <= max_norm` and dimension in `2..=max_dim`.
pub fn exp_shift_suite(seed: u64, trials: usize, max_dim: usize, max_norm: f64) -> Result<SuiteOutcome> {
    if max_dim < 2 {
        return Err(Error::InvalidParameter {
            name: "max_dim",
            value: max_dim as f64,
        });
    }
    run_suite(seed, trials, |_, rng| {
        let dim = rng.gen_range(2..=max_dim);
        let space = random_space(rng, dim);
        let nx = max_norm * rng.gen_range(0.05..=1.0);
        let ny = nx * rng.gen_range(0.0..=1.0);
        let x = with_norm(&random_matrix(rng, &space, Some(Parity::Even)), nx);
        let y = with_norm(&random_matrix(rng, &space, Some(Parity::Even)), ny);
        let cert = exp_shift_bound_check(&x, &y)?;
        Ok((vec![cert], vec![DumpedMatrix::new("x", &x), DumpedMatrix::new("y", &y)]))
    })
}

/// Random even pairs with `‖x‖, ‖y‖ <= max_norm` and dimension in `2..=max_dim`.
pub fn exp_product_suite(seed: u64, trials: usize, max_dim: usize, max_norm: f64) -> Result<SuiteOutcome> {
    if max_dim < 2 {
        return Err(Error::InvalidParameter {
            name: "max_dim",
            value: max_dim as f64,
        });
    }
    run_suite(seed, trials, |_, rng| {
        let dim = rng.gen_range(2..=max_dim);
        let space = random_space(rng, dim);
        let x = with_norm(
            &random_matrix(rng, &space, Some(Parity::Even)),
            max_norm * rng.gen_range(0.05..=1.0),
        );
        let y = with_norm(
            &random_matrix(rng, &space, Some(Parity::Even)),
            max_norm * rng.gen_range(0.05..=1.0),
        );
        let cert = exp_product_bound_check(&x, &y)?;
        Ok((vec![cert], vec![DumpedMatrix::new("x", &x), DumpedMatrix::new("y", &y)]))
    })
}
