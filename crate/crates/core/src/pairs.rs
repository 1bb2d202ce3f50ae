//! Asymptotic pairs `(φ, D)` at finite scale.
//!
//! A pair is a represented algebra (the images `φ(a)` of a few generators)
//! together with an odd self-adjoint `D` on the same graded space. The two
//! defining conditions become measurable statements:
//!
//! * `f(D) φ(a)` lands in the designated corner `P M P` (checked to `1e-8`);
//! * `‖[f(t^{-1}D), φ(a)]‖ → 0`, checked by a decay profile whose fitted
//!   exponent must be at most `-1 + 0.25`.
//!
//! Both are checked on the declared generators and the function set
//! `{e^{-x²}, x e^{-x²}, (x ± i)^{-1}}`. These generate `C_0(R)` and the
//! generators span a dense subalgebra, so the finite check is what the
//! continuous statement reduces to.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcalc::{bounded_transform_of, ScalarFunction, Spectrum};
use crate::graded::{
    conjugate_by_grading, direct_sum, graded_commutator, graded_tensor, operator_norm, GradedMatrix, GradedSpace,
    OddSelfAdjoint,
};
use crate::profile::{scalar_profile, DecayProfile, TGrid};

/// Off-corner mass allowed for `f(D)φ(a)`.
pub const CORNER_TOL: f64 = 1e-8;
/// Required decay exponent for `‖[f(t^{-1}D), φ(a)]‖` (rate `t^{-1}` with slack).
pub const AP2_EXPONENT: f64 = -1.0 + 0.25;
/// Required decay exponent for second-order defects (rate `t^{-2}` with slack).
pub const SECOND_ORDER_EXPONENT: f64 = -2.0 + 0.25;

const HOMOGENEITY_TOL: f64 = 1e-12;

/// The functions the two pair conditions are checked on.
pub fn pair_test_functions() -> Vec<ScalarFunction> {
    vec![
        ScalarFunction::Gauss0,
        ScalarFunction::Gauss1,
        ScalarFunction::ResolventPlus,
        ScalarFunction::ResolventMinus,
    ]
}

/// Images `φ(a)` of named generators on one graded space.
#[derive(Clone, Debug, PartialEq)]
pub struct RepresentedAlgebra {
    space: GradedSpace,
    generators: Vec<(String, GradedMatrix)>,
}

impl RepresentedAlgebra {
    /// Inhomogeneous generators are split into `name.even` and `name.odd`.
    pub fn new(space: GradedSpace, generators: Vec<(String, GradedMatrix)>) -> Result<Self> {
        let mut out = Vec::with_capacity(generators.len());
        for (name, g) in generators {
            if g.space() != &space {
                return Err(Error::SpaceMismatch {
                    left: space.dim(),
                    right: g.dim(),
                });
            }
            if g.homogeneous_parity(HOMOGENEITY_TOL).is_some() {
                out.push((name, g));
            } else {
                let (even, odd) = g.parity_decompose();
                out.push((format!("{name}.even"), even));
                out.push((format!("{name}.odd"), odd));
            }
        }
        if out
            .iter()
            .enumerate()
            .any(|(i, (n, _))| out[..i].iter().any(|(m, _)| m == n))
        {
            return Err(Error::GeneratorMismatch("duplicate generator names".into()));
        }
        Ok(Self { space, generators: out })
    }

    /// The unital representation `{1 ↦ I}`.
    pub fn unit(space: &GradedSpace) -> Self {
        Self {
            space: space.clone(),
            generators: vec![("1".into(), GradedMatrix::identity(space))],
        }
    }

    pub fn space(&self) -> &GradedSpace {
        &self.space
    }

    pub fn generators(&self) -> &[(String, GradedMatrix)] {
        &self.generators
    }

    pub fn get(&self, name: &str) -> Option<&GradedMatrix> {
        self.generators.iter().find(|(n, _)| n == name).map(|(_, g)| g)
    }

    pub fn names(&self) -> Vec<&str> {
        self.generators.iter().map(|(n, _)| n.as_str()).collect()
    }

    fn map_generators(&self, space: GradedSpace, f: impl Fn(&GradedMatrix) -> Result<GradedMatrix>) -> Result<Self> {
        let generators = self
            .generators
            .iter()
            .map(|(n, g)| Ok((n.clone(), f(g)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { space, generators })
    }
}

/// `(φ, D)` with an optional corner projection `P` for the target `P M P`.
#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticPair {
    rep: RepresentedAlgebra,
    d: OddSelfAdjoint,
    corner: Option<GradedMatrix>,
}

impl AsymptoticPair {
    pub fn new(rep: RepresentedAlgebra, d: OddSelfAdjoint, corner: Option<GradedMatrix>) -> Result<Self> {
        rep.space.ensure_same(d.space())?;
        if let Some(p) = &corner {
            rep.space.ensure_same(p.space())?;
            let idempotent = operator_norm(&(&(p * p) - p));
            if !p.is_hermitian(1e-10) || idempotent > 1e-10 {
                return Err(Error::Precondition("corner must be an orthogonal projection".into()));
            }
        }
        Ok(Self { rep, d, corner })
    }

    /// Same generator names, every image zero, `D = 0`.
    pub fn zero_like(names: &[&str], space: &GradedSpace) -> Self {
        let generators = names
            .iter()
            .map(|n| (n.to_string(), GradedMatrix::zeros(space)))
            .collect();
        Self {
            rep: RepresentedAlgebra {
                space: space.clone(),
                generators,
            },
            d: OddSelfAdjoint::zeros(space),
            corner: None,
        }
    }

    pub fn rep(&self) -> &RepresentedAlgebra {
        &self.rep
    }

    pub fn d(&self) -> &OddSelfAdjoint {
        &self.d
    }

    pub fn corner(&self) -> Option<&GradedMatrix> {
        self.corner.as_ref()
    }

    pub fn space(&self) -> &GradedSpace {
        &self.rep.space
    }
}

/// Profile of one `(generator, function)` combination.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NamedProfile {
    pub generator: String,
    pub function: String,
    pub profile: DecayProfile,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CornerEntry {
    pub generator: String,
    pub function: String,
    /// `‖(I-P) f(D)φ(a)‖ + ‖f(D)φ(a) (I-P)‖`
    pub off_corner: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairReport {
    pub corner: Vec<CornerEntry>,
    pub commutators: Vec<NamedProfile>,
    pub corner_pass: bool,
    pub commutator_pass: bool,
    pub pass: bool,
}

fn off_corner_mass(p: &GradedMatrix, x: &GradedMatrix) -> f64 {
    let q = &GradedMatrix::identity(p.space()) - p;
    operator_norm(&(&q * x)) + operator_norm(&(x * &q))
}

/// Runs both pair conditions on every generator and test function.
pub fn validate_pair(p: &AsymptoticPair, grid: &TGrid) -> Result<PairReport> {
    p.space().ensure_same(p.d.space())?;
    let spec = Spectrum::of(&p.d);
    let functions = pair_test_functions();
    let mut corner = Vec::new();
    if let Some(proj) = &p.corner {
        for f in &functions {
            let fd = spec.apply(f);
            for (name, g) in &p.rep.generators {
                corner.push(CornerEntry {
                    generator: name.clone(),
                    function: f.name(),
                    off_corner: off_corner_mass(proj, &(&fd * g)),
                });
            }
        }
    }
    let mut commutators = Vec::new();
    for f in &functions {
        for (name, g) in &p.rep.generators {
            let profile = scalar_profile(
                |t| {
                    let ft = spec.apply_scaled(f, 1.0 / t);
                    operator_norm(&graded_commutator(&ft, g).expect("same space"))
                },
                grid,
            )?;
            commutators.push(NamedProfile {
                generator: name.clone(),
                function: f.name(),
                profile,
            });
        }
    }
    let corner_pass = corner.iter().all(|c| c.off_corner <= CORNER_TOL);
    let commutator_pass = commutators.iter().all(|c| c.profile.decays_at_least(AP2_EXPONENT));
    Ok(PairReport {
        corner,
        commutators,
        corner_pass,
        commutator_pass,
        pass: corner_pass && commutator_pass,
    })
}

/// `(diag(φ, φ̃), diag(D, D̃))`, summed generator by generator.
pub fn pair_sum(p: &AsymptoticPair, q: &AsymptoticPair) -> Result<AsymptoticPair> {
    let mut names_p = p.rep.names();
    let mut names_q = q.rep.names();
    names_p.sort_unstable();
    names_q.sort_unstable();
    if names_p != names_q {
        return Err(Error::GeneratorMismatch(format!("{names_p:?} vs {names_q:?}")));
    }
    let space = p.space().direct_sum(q.space());
    let generators = p
        .rep
        .generators
        .iter()
        .map(|(n, g)| (n.clone(), direct_sum(g, q.rep.get(n).expect("checked names"))))
        .collect();
    let d = OddSelfAdjoint::new(direct_sum(&p.d, &q.d))?;
    let corner = match (&p.corner, &q.corner) {
        (None, None) => None,
        (a, b) => {
            let pa = a.clone().unwrap_or_else(|| GradedMatrix::identity(p.space()));
            let pb = b.clone().unwrap_or_else(|| GradedMatrix::identity(q.space()));
            Some(direct_sum(&pa, &pb))
        }
    };
    Ok(AsymptoticPair {
        rep: RepresentedAlgebra { space, generators },
        d,
        corner,
    })
}

/// `(φ^opp, -D)` with `φ^opp(a) = γ φ(a) γ`.
pub fn pair_inverse(p: &AsymptoticPair) -> AsymptoticPair {
    let rep = p
        .rep
        .map_generators(p.space().clone(), |g| Ok(conjugate_by_grading(g)))
        .expect("infallible");
    AsymptoticPair {
        rep,
        d: p.d.neg(),
        corner: p.corner.as_ref().map(conjugate_by_grading),
    }
}

/// Bounded-commutator conditions for `(D, D')`. The whole finite-dimensional
/// space is a common core and is preserved by every function of either
/// operator, so only the norm of `[D, D']` carries information.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BCReport {
    pub commutator_norm: f64,
    pub core_note: String,
    pub common_core: bool,
    pub core_preserved: bool,
    pub threshold: Option<f64>,
    pub pass: bool,
}

pub fn bc_check(d: &OddSelfAdjoint, d2: &OddSelfAdjoint) -> Result<BCReport> {
    bc_check_with_threshold(d, d2, None)
}

pub fn bc_check_with_threshold(d: &OddSelfAdjoint, d2: &OddSelfAdjoint, threshold: Option<f64>) -> Result<BCReport> {
    let commutator_norm = operator_norm(&graded_commutator(d, d2)?);
    let pass = commutator_norm.is_finite() && threshold.is_none_or(|th| commutator_norm <= th);
    Ok(BCReport {
        commutator_norm,
        core_note:
            "finite dimension: the whole space is a common core, invariant under resolvents and bounded transforms"
                .into(),
        common_core: true,
        core_preserved: true,
        threshold,
        pass,
    })
}

/// Cached spectra of `D`, `D'` and `D + D'` for evaluating heat-semigroup
/// factorization defects at many scales.
pub struct Factorization {
    d: Spectrum,
    d2: Spectrum,
    sum: Spectrum,
}

impl Factorization {
    pub fn new(d: &OddSelfAdjoint, d2: &OddSelfAdjoint) -> Result<Self> {
        let sum = d.try_add(d2)?;
        Ok(Self {
            d: Spectrum::of(d),
            d2: Spectrum::of(d2),
            sum: Spectrum::of(&sum),
        })
    }

    /// `(even, odd)` defects at scale `t`:
    /// `‖e^{-(D+D')²/t²} - e^{-D²/t²} e^{-D'²/t²}‖` and
    /// `‖g₁((D+D')/t) - g₁(D/t) g₀(D'/t) - g₀(D/t) g₁(D'/t)‖` with
    /// `g₀ = e^{-x²}`, `g₁ = x e^{-x²}`.
    pub fn at(&self, t: f64) -> Result<(f64, f64)> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidParameter { name: "t", value: t });
        }
        let s = 1.0 / t;
        let g0 = ScalarFunction::Gauss0;
        let g1 = ScalarFunction::Gauss1;
        let (a0, a1) = (self.d.apply_scaled(&g0, s), self.d.apply_scaled(&g1, s));
        let (b0, b1) = (self.d2.apply_scaled(&g0, s), self.d2.apply_scaled(&g1, s));
        let even = &self.sum.apply_scaled(&g0, s) - &(&a0 * &b0);
        let odd = &(&self.sum.apply_scaled(&g1, s) - &(&a1 * &b0)) - &(&a0 * &b1);
        Ok((operator_norm(&even), operator_norm(&odd)))
    }

    /// Even and odd defect profiles over a grid.
    pub fn profiles(&self, grid: &TGrid) -> Result<(DecayProfile, DecayProfile)> {
        let pairs: Vec<(f64, f64)> = {
            use rayon::prelude::*;
            grid.points()
                .par_iter()
                .map(|&t| self.at(t))
                .collect::<Result<Vec<_>>>()?
        };
        let even = DecayProfile::from_values(grid, pairs.iter().map(|p| p.0).collect())?;
        let odd = DecayProfile::from_values(grid, pairs.iter().map(|p| p.1).collect())?;
        Ok((even, odd))
    }
}

pub fn factorization_defect(d: &OddSelfAdjoint, d2: &OddSelfAdjoint, t: f64) -> Result<(f64, f64)> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter { name: "t", value: t });
    }
    Factorization::new(d, d2)?.at(t)
}

/// A graded *-homomorphism `ψ` carrying the first pair's space into the
/// second pair's space.
#[derive(Clone, Debug)]
pub enum Pushforward {
    /// Both pairs act on the same space.
    Identity,
    /// `m ↦ m ⊗̂ 1` on `space ⊗ aux`.
    AmplifyRight { aux: GradedSpace },
    /// `m ↦ 1 ⊗̂ m` on `aux ⊗ space`.
    AmplifyLeft { aux: GradedSpace },
    /// Caller-supplied images of `D` and of every generator.
    Explicit {
        d_image: OddSelfAdjoint,
        generator_images: Vec<(String, GradedMatrix)>,
    },
}

impl Pushforward {
    /// Image of an arbitrary operator under the homomorphism variants.
    pub fn apply(&self, m: &GradedMatrix) -> Result<GradedMatrix> {
        match self {
            Pushforward::Identity => Ok(m.clone()),
            Pushforward::AmplifyRight { aux } => Ok(graded_tensor(m, &GradedMatrix::identity(aux))),
            Pushforward::AmplifyLeft { aux } => Ok(graded_tensor(&GradedMatrix::identity(aux), m)),
            Pushforward::Explicit { .. } => Err(Error::Precondition(
                "explicit pushforward only carries D and the generators".into(),
            )),
        }
    }

    fn push_d(&self, d: &OddSelfAdjoint) -> Result<OddSelfAdjoint> {
        match self {
            Pushforward::Explicit { d_image, .. } => Ok(d_image.clone()),
            _ => OddSelfAdjoint::new(self.apply(d)?),
        }
    }

    fn push_generator(&self, name: &str, g: &GradedMatrix) -> Result<GradedMatrix> {
        match self {
            Pushforward::Explicit { generator_images, .. } => generator_images
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, m)| m.clone())
                .ok_or_else(|| Error::Precondition(format!("pushforward lacks generator {name}"))),
            _ => self.apply(g),
        }
    }
}

/// Result of composing two pairs.
#[derive(Clone, Debug)]
pub struct Composition {
    /// `(ψ∘φ, ψ(D) + D')`.
    pub pair: AsymptoticPair,
    pub bc: BCReport,
    /// Profiles of `‖f(t^{-1}(ψ(D)+D')) ρ(a) - naive_t(f)(a)‖` for
    /// `f ∈ {e^{-x²}, x e^{-x²}}`.
    pub naive_defects: Vec<NamedProfile>,
    pub pass: bool,
}

impl Composition {
    pub fn worst_exponent(&self) -> f64 {
        self.naive_defects
            .iter()
            .map(|p| p.profile.fitted_exponent)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Composes `(φ, D)` with `(ψ, D')` into `(ψ∘φ, ψ(D) + D')` and certifies
/// that the composite agrees with the naive two-step composite
/// `e^{-D'²/t²} ψ(e^{-D²/t²}) ρ(a)` to second order in `t^{-1}` (and the
/// analogue for `x e^{-x²}` through the comultiplication).
pub fn compose_pairs(
    p_ab: &AsymptoticPair,
    p_bc: &AsymptoticPair,
    push: &Pushforward,
    grid: &TGrid,
) -> Result<Composition> {
    let psi_d = push.push_d(&p_ab.d)?;
    p_bc.space().ensure_same(psi_d.space())?;
    let generators = p_ab
        .rep
        .generators
        .iter()
        .map(|(n, g)| Ok((n.clone(), push.push_generator(n, g)?)))
        .collect::<Result<Vec<_>>>()?;
    for (_, g) in &generators {
        p_bc.space().ensure_same(g.space())?;
    }
    let bc = bc_check(&psi_d, &p_bc.d)?;
    let total = psi_d.try_add(&p_bc.d)?;

    let s_total = Spectrum::of(&total);
    let s_psi = Spectrum::of(&psi_d);
    let s_prime = Spectrum::of(&p_bc.d);
    let (g0, g1) = (ScalarFunction::Gauss0, ScalarFunction::Gauss1);
    // Per t: the differences f((ψ(D)+D')/t) - naive_t(f) for f = g₀, g₁,
    // multiplied by each generator. Row k is generator k/2, function k%2.
    let rows: Vec<Vec<f64>> = {
        use rayon::prelude::*;
        grid.points()
            .par_iter()
            .map(|&t| {
                let s = 1.0 / t;
                let (p0, p1) = (s_prime.apply_scaled(&g0, s), s_prime.apply_scaled(&g1, s));
                let (q0, q1) = (s_psi.apply_scaled(&g0, s), s_psi.apply_scaled(&g1, s));
                let diff0 = &s_total.apply_scaled(&g0, s) - &(&p0 * &q0);
                let diff1 = &(&s_total.apply_scaled(&g1, s) - &(&p1 * &q0)) - &(&p0 * &q1);
                generators
                    .iter()
                    .flat_map(|(_, rho)| [operator_norm(&(&diff0 * rho)), operator_norm(&(&diff1 * rho))])
                    .collect()
            })
            .collect()
    };
    let mut naive_defects = Vec::new();
    for (k, (name, _)) in generators.iter().enumerate() {
        for (j, f) in [&g0, &g1].into_iter().enumerate() {
            let values = rows.iter().map(|r| r[2 * k + j]).collect();
            naive_defects.push(NamedProfile {
                generator: name.clone(),
                function: f.name(),
                profile: DecayProfile::from_values(grid, values)?,
            });
        }
    }
    let pass = bc.pass
        && naive_defects
            .iter()
            .all(|p| p.profile.decays_at_least(SECOND_ORDER_EXPONENT));
    let rep = RepresentedAlgebra::new(p_bc.space().clone(), generators)?;
    Ok(Composition {
        pair: AsymptoticPair {
            rep,
            d: total,
            corner: p_bc.corner.clone(),
        },
        bc,
        naive_defects,
        pass,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComultiplicationReport {
    /// `‖[D ⊗̂ 1, 1 ⊗̂ D]‖`
    pub lift_commutator: f64,
    /// Largest `‖e^{-L²/t²} - e^{-(D⊗̂1)²/t²} e^{-(1⊗̂D)²/t²}‖` over the probe grid.
    pub gauss0_defect: f64,
    /// Same for `x e^{-x²}` against the comultiplied sum.
    pub gauss1_defect: f64,
    /// Largest `‖f(D⊗̂1) - f(D)⊗̂1‖` (lifting commutes with the calculus).
    pub lift_defect: f64,
    pub pass: bool,
}

/// `f(D ⊗̂ 1 + 1 ⊗̂ D)` against the graded tensor product of the factors.
pub fn comultiplication_check(d: &OddSelfAdjoint, probe: &TGrid) -> Result<ComultiplicationReport> {
    let id = GradedMatrix::identity(d.space());
    let left = OddSelfAdjoint::new(graded_tensor(d, &id))?;
    let right = OddSelfAdjoint::new(graded_tensor(&id, d))?;
    let lift_commutator = operator_norm(&graded_commutator(&left, &right)?);
    let fact = Factorization::new(&left, &right)?;
    let spec_d = Spectrum::of(d);
    let spec_left = Spectrum::of(&left);
    let (mut gauss0_defect, mut gauss1_defect, mut lift_defect) = (0.0_f64, 0.0_f64, 0.0_f64);
    for &t in probe.points() {
        let (e, o) = fact.at(t)?;
        gauss0_defect = gauss0_defect.max(e);
        gauss1_defect = gauss1_defect.max(o);
        for f in [ScalarFunction::Gauss0, ScalarFunction::Gauss1] {
            let direct = spec_left.apply_scaled(&f, 1.0 / t);
            let lifted = graded_tensor(&spec_d.apply_scaled(&f, 1.0 / t), &id);
            lift_defect = lift_defect.max(operator_norm(&(&direct - &lifted)));
        }
    }
    let pass = lift_commutator <= 1e-12 && gauss0_defect <= 1e-10 && gauss1_defect <= 1e-10 && lift_defect <= 1e-10;
    Ok(ComultiplicationReport {
        lift_commutator,
        gauss0_defect,
        gauss1_defect,
        lift_defect,
        pass,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CornerMembershipReport {
    /// Largest `‖χ(t^{-1}D) f(D)φ(a) - f(D)φ(a)‖` over generators and `t`.
    pub identity_defect: f64,
    /// Largest off-corner mass of `f(D)φ(a)`.
    pub off_corner: f64,
    /// Largest off-corner mass of `χ(t^{-1}D) f(D)φ(a)` over the upper half
    /// of the grid.
    pub family_off_corner: f64,
    pub pass: bool,
}

/// For `f` the cutoff supported in `[-2R, 2R]` and `χ` the cutoff equal to
/// one on `[-2R, 2R]`, `χ(t^{-1}D) f(D) = f(D)` for every `t >= 1`; hence the
/// corner membership of `f(D)φ(a)` is inherited from the `t`-family.
pub fn corner_membership_check(p: &AsymptoticPair, grid: &TGrid, radius: f64) -> Result<CornerMembershipReport> {
    let proj = p.corner.as_ref().ok_or(Error::MissingCorner)?;
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "radius",
            value: radius,
        });
    }
    if grid.points()[0] < 1.0 {
        return Err(Error::InvalidGrid("corner membership needs t >= 1".into()));
    }
    let spec = Spectrum::of(&p.d);
    let f = ScalarFunction::Cutoff { radius };
    let chi = ScalarFunction::Cutoff { radius: 2.0 * radius };
    let fd = spec.apply(&f);
    let upper = grid.points()[grid.len() / 2];
    let (mut identity_defect, mut off_corner, mut family_off_corner) = (0.0_f64, 0.0_f64, 0.0_f64);
    for (_, g) in &p.rep.generators {
        let target = &fd * g;
        off_corner = off_corner.max(off_corner_mass(proj, &target));
        for &t in grid.points() {
            let family = &spec.apply_scaled(&chi, 1.0 / t) * &target;
            identity_defect = identity_defect.max(operator_norm(&(&family - &target)));
            if t >= upper {
                family_off_corner = family_off_corner.max(off_corner_mass(proj, &family));
            }
        }
    }
    let pass = identity_defect <= 1e-10 && off_corner <= family_off_corner + 1e-10;
    Ok(CornerMembershipReport {
        identity_defect,
        off_corner,
        family_off_corner,
        pass,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransferReport {
    /// `‖[f(t^{-1}D'), φ(a)]‖` per generator and function.
    pub generator_profiles: Vec<NamedProfile>,
    /// `‖[f(t^{-1}D'), D_N]‖` per function.
    pub transform_profiles: Vec<NamedProfile>,
    /// `‖[D', D_N]‖`
    pub transform_commutator: f64,
    /// Smallest `t^{-1}‖[D', D_N]‖ + 1e-10 - ‖[f(t^{-1}D'), D_N]‖` over the grid.
    pub worst_margin: f64,
    pub pass: bool,
}

/// Moving functions of `D'` past `φ(a)` and past the bounded transform `D_N`
/// of the first pair's operator. The second family obeys
/// `‖[f(t^{-1}D'), D_N]‖ <= t^{-1} ‖[D', D_N]‖` for `f ∈ {(x²+1)^{-1}, x(x²+1)^{-1}}`.
pub fn commutator_transfer_check(
    p_ab: &AsymptoticPair,
    d2: &OddSelfAdjoint,
    n: f64,
    grid: &TGrid,
) -> Result<TransferReport> {
    p_ab.space().ensure_same(d2.space())?;
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::InvalidParameter { name: "N", value: n });
    }
    let dn = bounded_transform_of(&Spectrum::of(&p_ab.d), n);
    let spec2 = Spectrum::of(d2);
    let transform_commutator = operator_norm(&graded_commutator(d2, &dn)?);
    let functions = [ScalarFunction::Cayley, ScalarFunction::G];
    let mut generator_profiles = Vec::new();
    let mut transform_profiles = Vec::new();
    let mut worst_margin = f64::INFINITY;
    for f in &functions {
        for (name, g) in &p_ab.rep.generators {
            let profile = scalar_profile(
                |t| operator_norm(&graded_commutator(&spec2.apply_scaled(f, 1.0 / t), g).expect("same space")),
                grid,
            )?;
            generator_profiles.push(NamedProfile {
                generator: name.clone(),
                function: f.name(),
                profile,
            });
        }
        let profile = scalar_profile(
            |t| operator_norm(&graded_commutator(&spec2.apply_scaled(f, 1.0 / t), &dn).expect("same space")),
            grid,
        )?;
        for (&t, &v) in profile.t_grid.iter().zip(&profile.values) {
            worst_margin = worst_margin.min(transform_commutator / t + 1e-10 - v);
        }
        transform_profiles.push(NamedProfile {
            generator: "D_N".into(),
            function: f.name(),
            profile,
        });
    }
    Ok(TransferReport {
        generator_profiles,
        transform_profiles,
        transform_commutator,
        worst_margin,
        pass: worst_margin >= 0.0,
    })
}
