//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Two criteria cannot hold as literally stated and are expected to print
//! FAIL: 8 (the interior commutator [D, C] equals -γ, so ‖[D, C] - I‖ = 2)
//! and 9 (a least-squares slope of ‖Vb‖/t - c/t³ always lies strictly above
//! -1). Those lines are followed by the checks that do hold. The process
//! exits nonzero if any other criterion fails, or if a known failure stops
//! matching its analysis.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use apair_lab::config::{Experiment, RunConfig};
use apair_lab::report::render;
use apair_lab::{run_experiment, Outcome};

const SEED: u64 = 42;

struct Run {
    outcome: Outcome,
    elapsed: Duration,
}

fn run(e: Experiment) -> Run {
    let start = Instant::now();
    let outcome = run_experiment(&RunConfig::for_experiment(e, SEED)).unwrap_or_else(|err| panic!("{e}: {err}"));
    Run {
        outcome,
        elapsed: start.elapsed(),
    }
}

fn passed(o: &Outcome, id: &str) -> bool {
    o.get(id).unwrap_or_else(|| panic!("missing check {id}")).pass
}

fn measured(o: &Outcome, id: &str, key: &str) -> f64 {
    o.get(id)
        .and_then(|c| c.measured.get(key))
        .and_then(|v| v.as_f64())
        .unwrap_or(f64::NAN)
}

fn certs(o: &Outcome, prefix: &str) -> (usize, usize, f64) {
    let c: Vec<_> = o.certificates.iter().filter(|c| c.check.starts_with(prefix)).collect();
    let worst = c.iter().map(|c| c.margin).fold(f64::INFINITY, f64::min);
    (c.iter().filter(|c| c.pass).count(), c.len(), worst)
}

#[derive(Default)]
struct Tally {
    unexpected: Vec<String>,
}

impl Tally {
    fn line(&mut self, id: &str, pass: bool, detail: String) {
        println!("{} criterion {id}: {detail}", if pass { "PASS" } else { "FAIL" });
        if !pass {
            self.unexpected.push(id.into());
        }
    }

    /// A failure explained by the analysis in the module docs. `explained`
    /// says whether the measurement still matches that analysis.
    fn known(&mut self, id: &str, pass: bool, explained: bool, detail: String) {
        println!("{} criterion {id}: {detail}", if pass { "PASS" } else { "FAIL" });
        if !pass && !explained {
            self.unexpected.push(id.into());
        }
    }
}

fn main() -> ExitCode {
    let mut t = Tally::default();

    let r = run(Experiment::Commbound);
    let (ok, n, worst) = certs(&r.outcome, "commbound[");
    t.line(
        "1",
        ok == n && n == 200 * 6 && worst >= -1e-10 && r.elapsed < Duration::from_secs(10),
        format!(
            "commutator bound {ok}/{n} certificates, worst margin {worst:.3e}, {:.2?}",
            r.elapsed
        ),
    );
    let commbound = r;

    let r = run(Experiment::AppendixB);
    let (ok, n, worst) = certs(&r.outcome, "exp_shift");
    t.line(
        "2",
        ok == n && n == 500 && r.elapsed < Duration::from_secs(10),
        format!(
            "exponential shift bound {ok}/{n}, worst margin {worst:.3e}, {:.2?}",
            r.elapsed
        ),
    );
    let (ok, n, worst) = certs(&r.outcome, "exp_product#");
    t.line(
        "3",
        ok == n && n == 500 && passed(&r.outcome, "exp_series_finite"),
        format!("exponential product bound {ok}/{n}, worst margin {worst:.3e}"),
    );
    let appendix = r;

    let r = run(Experiment::Expfactor);
    let o = &r.outcome;
    t.line(
        "4",
        passed(o, "factorization_rate") && passed(o, "factorization_exponent") && r.elapsed < Duration::from_secs(30),
        format!(
            "t²·defect at t = 1e3 within {:.2e} relative of ‖[D,D']‖ (tol 2e-2), exponents in [{:.4}, {:.4}] (tol -2 ± 0.1), {:.2?}",
            measured(o, "factorization_rate", "worst_relative_error"),
            measured(o, "factorization_exponent", "min_exponent"),
            measured(o, "factorization_exponent", "max_exponent"),
            r.elapsed
        ),
    );
    t.line(
        "5",
        passed(o, "factorization_exact_koszul") && passed(o, "factorization_exact_sigma_xy"),
        format!(
            "exact factorization, max defect {:.3e} (Koszul lifts), {:.3e} (σx, σy), tol 1e-12",
            measured(o, "factorization_exact_koszul", "max_defect"),
            measured(o, "factorization_exact_sigma_xy", "max_defect")
        ),
    );
    let expfactor = r;

    let r = run(Experiment::Compose);
    let o = &r.outcome;
    let c = o.get("compose_rate").expect("compose_rate");
    t.line(
        "6",
        c.pass && c.total == 50 && passed(o, "compose_zero_exact"),
        format!(
            "composition {}/{} with worst exponent {:.4} (tol -1.75), (id, 0) defect {:.3e}",
            c.passed,
            c.total,
            measured(o, "compose_rate", "worst_exponent"),
            measured(o, "compose_zero_exact", "max_defect")
        ),
    );
    let compose = r;

    let r = run(Experiment::Techlemma);
    let o = &r.outcome;
    t.line(
        "7",
        passed(o, "techlemma_monotone") && passed(o, "techlemma_tail") && passed(o, "techlemma_constant"),
        format!(
            "suprema nonincreasing in N, largest final supremum {:.3e} (tol 1e-6), worst constant ratio {:.4}",
            measured(o, "techlemma_tail", "largest_final_supremum"),
            measured(o, "techlemma_constant", "worst_ratio")
        ),
    );
    let techlemma = r;

    let r = run(Experiment::Bott);
    let o = &r.outcome;
    let literal = passed(o, "bott_kernel")
        && passed(o, "bott_gap")
        && passed(o, "bott_dc_identity")
        && passed(o, "bott_convergence")
        && r.elapsed < Duration::from_secs(5);
    let dc = measured(o, "bott_dc_identity", "defect");
    let holds = passed(o, "bott_kernel")
        && passed(o, "bott_gap")
        && passed(o, "bott_dc_grading")
        && passed(o, "bott_convergence")
        && r.elapsed < Duration::from_secs(5);
    t.known(
        "8",
        literal,
        holds && (dc - 2.0).abs() <= 1e-10,
        format!(
            "kernel dim {} with |λ_min| {:.3e}, |λ₂| - √2 = {:.3e}, ‖[D,C] - I‖ = {dc:.3e} (tol 1e-10), {:.2?}",
            measured(o, "bott_kernel", "kernel_dim"),
            measured(o, "bott_kernel", "smallest_magnitude"),
            measured(o, "bott_gap", "defect"),
            r.elapsed
        ),
    );
    t.line(
        "8 (with [D,C] = -γ)",
        holds,
        format!(
            "‖[D,C] + γ‖ = {:.3e}, residuals nonincreasing as n_basis doubles",
            measured(o, "bott_dc_grading", "defect")
        ),
    );
    let bott = r;

    let r = run(Experiment::Perturb);
    let o = &r.outcome;
    let g = measured(o, "perturb_homomorphism_g", "worst_exponent");
    let cayley = measured(o, "perturb_homomorphism_cayley", "worst_exponent");
    let rest = cayley <= -1.0
        && passed(o, "perturb_factorization")
        && passed(o, "perturb_composition")
        && passed(o, "perturb_zero");
    t.known(
        "9",
        rest && g <= -1.0,
        rest && g > -1.0 && g <= -0.9,
        format!(
            "g exponent ≤ {g:.4}, cayley ≤ {cayley:.4} (tol -1), factorization ≤ {:.4} (tol -1.75), composition certified: {}",
            measured(o, "perturb_factorization", "worst_even_exponent"),
            passed(o, "perturb_composition")
        ),
    );
    t.line(
        "9 (fit tolerance 0.1)",
        rest && g <= -1.0 + 0.1 && (cayley + 2.0).abs() <= 0.1,
        format!("g exponent {g:.4} ≤ -0.9, cayley exponent {cayley:.4} within -2 ± 0.1"),
    );
    let perturb = r;

    let first = [
        (Experiment::Commbound, commbound),
        (Experiment::AppendixB, appendix),
        (Experiment::Expfactor, expfactor),
        (Experiment::Compose, compose),
        (Experiment::Techlemma, techlemma),
        (Experiment::Bott, bott),
        (Experiment::Perturb, perturb),
    ];
    let mut identical = 0;
    for (e, r) in &first {
        let e = *e;
        let cfg = RunConfig::for_experiment(e, SEED);
        let report = |o: &Outcome| {
            render(o, &cfg)
                .expect("render")
                .into_iter()
                .find(|(n, _)| n == "report.json")
                .expect("report.json")
                .1
        };
        if report(&r.outcome) == report(&run(e).outcome) {
            identical += 1;
        }
    }
    t.line(
        "10",
        identical == Experiment::ALL.len(),
        format!(
            "{identical}/{} experiments gave byte-identical report.json on rerun",
            Experiment::ALL.len()
        ),
    );

    if t.unexpected.is_empty() {
        println!("acceptance: all failures are the documented ones (criteria 8, 9)");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected failures: {}", t.unexpected.join(", "));
        ExitCode::FAILURE
    }
}
