//! Z/2-graded dense matrices.
//!
//! A [`GradedSpace`] is `C^dim` with a parity attached to every basis vector.
//! Its grading operator `γ = diag((-1)^parity)` splits every matrix into an
//! even part (commutes with `γ`) and an odd part (anticommutes with `γ`). The
//! split is done by masking entries, so it is exact in floating point.

use std::fmt;
use std::ops::{Add, Deref, Mul, Neg, Sub};
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

/// Default tolerance for constructor validation of hermitian/odd operators.
pub const VALIDATION_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn from_bit(bit: u8) -> Self {
        if bit & 1 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    /// Koszul sign `(-1)^(self * other)`.
    pub fn koszul(self, other: Parity) -> f64 {
        if self == Parity::Odd && other == Parity::Odd {
            -1.0
        } else {
            1.0
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

impl Add for Parity {
    type Output = Parity;

    #[allow(clippy::suspicious_arithmetic_impl)] // addition in Z/2
    fn add(self, rhs: Parity) -> Parity {
        Parity::from_bit(self.bit() ^ rhs.bit())
    }
}

/// `C^dim` together with the parity of each basis vector.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GradedSpace {
    parity: Arc<[u8]>,
}

impl fmt::Debug for GradedSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GradedSpace(dim={}, even={})", self.dim(), self.even_dim())
    }
}

impl GradedSpace {
    pub fn new(parity: Vec<u8>) -> Result<Self> {
        if parity.is_empty() {
            return Err(Error::EmptySpace);
        }
        if let Some(&bad) = parity.iter().find(|&&p| p > 1) {
            return Err(Error::InvalidParity(bad));
        }
        Ok(Self { parity: parity.into() })
    }

    /// `ceil(dim/2)` even basis vectors followed by the odd ones.
    pub fn balanced(dim: usize) -> Result<Self> {
        let even = dim.div_ceil(2);
        Self::new((0..dim).map(|i| u8::from(i >= even)).collect())
    }

    /// Every basis vector even (the trivially graded space).
    pub fn trivial(dim: usize) -> Result<Self> {
        Self::new(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.parity.len()
    }

    pub fn parity_of(&self, i: usize) -> Parity {
        Parity::from_bit(self.parity[i])
    }

    pub fn parities(&self) -> &[u8] {
        &self.parity
    }

    pub fn even_dim(&self) -> usize {
        self.parity.iter().filter(|&&p| p == 0).count()
    }

    pub fn odd_dim(&self) -> usize {
        self.dim() - self.even_dim()
    }

    /// The diagonal sign of basis vector `i`.
    pub fn sign(&self, i: usize) -> f64 {
        if self.parity[i] == 0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn grading(&self) -> CMatrix {
        CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            self.dim(),
            (0..self.dim()).map(|i| C64::new(self.sign(i), 0.0)),
        ))
    }

    pub fn direct_sum(&self, other: &GradedSpace) -> GradedSpace {
        let parity: Vec<u8> = self.parity.iter().chain(other.parity.iter()).copied().collect();
        GradedSpace { parity: parity.into() }
    }

    /// Kronecker ordering: index `i * other.dim() + j`, parity `p(i) + q(j) mod 2`.
    pub fn tensor(&self, other: &GradedSpace) -> GradedSpace {
        let parity: Vec<u8> = self
            .parity
            .iter()
            .flat_map(|&p| other.parity.iter().map(move |&q| p ^ q))
            .collect();
        GradedSpace { parity: parity.into() }
    }

    /// The subspace spanned by the listed basis vectors, in the given order.
    pub fn restrict(&self, keep: &[usize]) -> Result<GradedSpace> {
        GradedSpace::new(keep.iter().map(|&i| self.parity[i]).collect())
    }

    pub(crate) fn ensure_same(&self, other: &GradedSpace) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::SpaceMismatch {
                left: self.dim(),
                right: other.dim(),
            })
        }
    }
}

/// A complex square matrix acting on a graded space.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedMatrix {
    space: GradedSpace,
    m: CMatrix,
}

impl GradedMatrix {
    pub fn new(space: GradedSpace, m: CMatrix) -> Result<Self> {
        let dim = space.dim();
        if m.nrows() != dim || m.ncols() != dim {
            return Err(Error::Shape {
                rows: m.nrows(),
                cols: m.ncols(),
                dim,
            });
        }
        Ok(Self { space, m })
    }

    /// Real-entried convenience constructor (row-major).
    pub fn from_real_rows(space: GradedSpace, rows: &[&[f64]]) -> Result<Self> {
        let dim = space.dim();
        let m = CMatrix::from_fn(rows.len(), rows.first().map_or(0, |r| r.len()), |i, j| {
            C64::new(rows[i][j], 0.0)
        });
        if m.nrows() != dim {
            return Err(Error::Shape {
                rows: m.nrows(),
                cols: m.ncols(),
                dim,
            });
        }
        Self::new(space, m)
    }

    pub fn zeros(space: &GradedSpace) -> Self {
        let d = space.dim();
        Self {
            space: space.clone(),
            m: CMatrix::zeros(d, d),
        }
    }

    pub fn identity(space: &GradedSpace) -> Self {
        let d = space.dim();
        Self {
            space: space.clone(),
            m: CMatrix::identity(d, d),
        }
    }

    /// The grading operator `γ` of the space.
    pub fn grading(space: &GradedSpace) -> Self {
        Self {
            space: space.clone(),
            m: space.grading(),
        }
    }

    pub fn space(&self) -> &GradedSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Entrywise same-space map, keeping the grading.
    pub fn map_matrix(&self, f: impl FnOnce(&CMatrix) -> CMatrix) -> Self {
        let m = f(&self.m);
        debug_assert_eq!(m.shape(), self.m.shape());
        Self {
            space: self.space.clone(),
            m,
        }
    }

    fn masked(&self, keep: Parity) -> Self {
        let s = &self.space;
        let m = CMatrix::from_fn(s.dim(), s.dim(), |i, j| {
            if s.parity_of(i) + s.parity_of(j) == keep {
                self.m[(i, j)]
            } else {
                C64::new(0.0, 0.0)
            }
        });
        Self { space: s.clone(), m }
    }

    pub fn even_part(&self) -> Self {
        self.masked(Parity::Even)
    }

    pub fn odd_part(&self) -> Self {
        self.masked(Parity::Odd)
    }

    /// `(even, odd)` with `even + odd == self` exactly.
    pub fn parity_decompose(&self) -> (Self, Self) {
        (self.even_part(), self.odd_part())
    }

    pub fn part(&self, parity: Parity) -> Self {
        self.masked(parity)
    }

    /// `Some(p)` when the opposite-parity part has max-entry at most
    /// `tol * max(1, max_abs)`. The zero matrix reports `Even`.
    pub fn homogeneous_parity(&self, tol: f64) -> Option<Parity> {
        let scale = tol * self.max_abs().max(1.0);
        let odd = self.odd_part().max_abs();
        let even = self.even_part().max_abs();
        if odd <= scale {
            Some(Parity::Even)
        } else if even <= scale {
            Some(Parity::Odd)
        } else {
            None
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
    }

    pub fn adjoint(&self) -> Self {
        self.map_matrix(|m| m.adjoint())
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map_matrix(|m| m * C64::new(s, 0.0))
    }

    pub fn scale_complex(&self, s: C64) -> Self {
        self.map_matrix(|m| m * s)
    }

    pub fn hermitian_defect(&self) -> f64 {
        (&self.m - self.m.adjoint())
            .iter()
            .fold(0.0_f64, |a, z| a.max(z.norm()))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol * self.max_abs().max(1.0)
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        operator_norm(self)
    }

    /// `γ a γ`: fixes the even part and negates the odd part.
    pub fn conjugate_by_grading(&self) -> Self {
        conjugate_by_grading(self)
    }

    pub fn try_mul(&self, rhs: &GradedMatrix) -> Result<GradedMatrix> {
        self.space.ensure_same(&rhs.space)?;
        Ok(Self {
            space: self.space.clone(),
            m: &self.m * &rhs.m,
        })
    }

    pub fn try_add(&self, rhs: &GradedMatrix) -> Result<GradedMatrix> {
        self.space.ensure_same(&rhs.space)?;
        Ok(Self {
            space: self.space.clone(),
            m: &self.m + &rhs.m,
        })
    }

    /// Compression onto the listed basis vectors.
    pub fn restrict(&self, keep: &[usize]) -> Result<GradedMatrix> {
        let space = self.space.restrict(keep)?;
        let m = CMatrix::from_fn(keep.len(), keep.len(), |i, j| self.m[(keep[i], keep[j])]);
        GradedMatrix::new(space, m)
    }

    pub fn same_space(&self, other: &GradedMatrix) -> Result<()> {
        self.space.ensure_same(&other.space)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl<'a> $trait<&'a GradedMatrix> for &'a GradedMatrix {
            type Output = GradedMatrix;

            /// Panics when the operands live on different spaces.
            fn $method(self, rhs: &'a GradedMatrix) -> GradedMatrix {
                assert_eq!(self.space, rhs.space, "graded space mismatch");
                GradedMatrix {
                    space: self.space.clone(),
                    m: &self.m $op &rhs.m,
                }
            }
        }

        impl $trait<GradedMatrix> for GradedMatrix {
            type Output = GradedMatrix;

            fn $method(self, rhs: GradedMatrix) -> GradedMatrix {
                &self $op &rhs
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl Neg for &GradedMatrix {
    type Output = GradedMatrix;

    fn neg(self) -> GradedMatrix {
        self.map_matrix(|m| -m)
    }
}

impl Neg for GradedMatrix {
    type Output = GradedMatrix;

    fn neg(self) -> GradedMatrix {
        -&self
    }
}

/// Hermitian operator anticommuting with the grading.
#[derive(Clone, Debug, PartialEq)]
pub struct OddSelfAdjoint(GradedMatrix);

impl OddSelfAdjoint {
    pub fn new(m: GradedMatrix) -> Result<Self> {
        Self::with_tolerance(m, VALIDATION_TOL)
    }

    /// Validates hermiticity and oddness to `tol * max(1, max|entry|)`.
    pub fn with_tolerance(m: GradedMatrix, tol: f64) -> Result<Self> {
        let scale = tol * m.max_abs().max(1.0);
        let herm = m.hermitian_defect();
        if herm > scale {
            return Err(Error::NotHermitian(herm));
        }
        let even = m.even_part().max_abs();
        if even > scale {
            return Err(Error::NotOdd(even));
        }
        Ok(Self(m))
    }

    /// Orthogonal projection onto odd hermitian matrices:
    /// `(m + m*)/2` with the even part removed. Used for operators computed in
    /// floating point that are odd and hermitian in exact arithmetic.
    pub fn project(m: &GradedMatrix) -> Self {
        let herm = m.map_matrix(|a| (a + a.adjoint()) * C64::new(0.5, 0.0));
        Self(herm.odd_part())
    }

    pub fn zeros(space: &GradedSpace) -> Self {
        Self(GradedMatrix::zeros(space))
    }

    pub fn as_graded(&self) -> &GradedMatrix {
        &self.0
    }

    pub fn into_graded(self) -> GradedMatrix {
        self.0
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self(self.0.scale(s))
    }

    /// Sum of two odd hermitian operators on the same space.
    pub fn try_add(&self, other: &OddSelfAdjoint) -> Result<Self> {
        Ok(Self(self.0.try_add(&other.0)?))
    }

    pub fn neg(&self) -> Self {
        Self(-&self.0)
    }
}

impl Deref for OddSelfAdjoint {
    type Target = GradedMatrix;

    fn deref(&self) -> &GradedMatrix {
        &self.0
    }
}

impl AsRef<GradedMatrix> for OddSelfAdjoint {
    fn as_ref(&self) -> &GradedMatrix {
        &self.0
    }
}

/// Graded commutator `ab - (-1)^{∂a∂b} ba`, extended bilinearly over the
/// parity parts of inhomogeneous operands.
pub fn graded_commutator(a: &GradedMatrix, b: &GradedMatrix) -> Result<GradedMatrix> {
    a.same_space(b)?;
    let ab = &a.m * &b.m;
    let ba = &b.m * &a.m;
    // Only the odd-odd block flips sign: [a,b] = ab - ba + 2 b_odd a_odd.
    let cross = &b.odd_part().m * &a.odd_part().m;
    Ok(GradedMatrix {
        space: a.space.clone(),
        m: ab - ba + cross * C64::new(2.0, 0.0),
    })
}

/// Graded tensor product realized as `(a γ^{∂b}) ⊗ b` on the product space.
/// Inhomogeneous `b` is handled by splitting it into parity parts.
pub fn graded_tensor(a: &GradedMatrix, b: &GradedMatrix) -> GradedMatrix {
    let space = a.space.tensor(&b.space);
    let (b_even, b_odd) = b.parity_decompose();
    let a_gamma = &a.m * a.space.grading();
    let m = a.m.kronecker(&b_even.m) + a_gamma.kronecker(&b_odd.m);
    GradedMatrix { space, m }
}

/// Block-diagonal sum on the concatenated space.
pub fn direct_sum(a: &GradedMatrix, b: &GradedMatrix) -> GradedMatrix {
    let (da, db) = (a.dim(), b.dim());
    let mut m = CMatrix::zeros(da + db, da + db);
    m.view_mut((0, 0), (da, da)).copy_from(&a.m);
    m.view_mut((da, da), (db, db)).copy_from(&b.m);
    GradedMatrix {
        space: a.space.direct_sum(&b.space),
        m,
    }
}

pub fn conjugate_by_grading(a: &GradedMatrix) -> GradedMatrix {
    let (even, odd) = a.parity_decompose();
    even - odd
}

/// Largest singular value of the matrix.
pub fn operator_norm(a: &GradedMatrix) -> f64 {
    matrix_norm(&a.m)
}

/// Spectral norm of a plain complex matrix.
pub fn matrix_norm(m: &CMatrix) -> f64 {
    if m.iter().all(|z| *z == C64::new(0.0, 0.0)) {
        return 0.0;
    }
    m.singular_values().max()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn qubit() -> GradedSpace {
        GradedSpace::new(vec![0, 1]).unwrap()
    }

    fn sx() -> GradedMatrix {
        GradedMatrix::from_real_rows(qubit(), &[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
    }

    fn sy() -> GradedMatrix {
        let m = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]);
        GradedMatrix::new(qubit(), m).unwrap()
    }

    #[test]
    fn rejects_bad_spaces() {
        assert_eq!(GradedSpace::new(vec![]), Err(Error::EmptySpace));
        assert_eq!(GradedSpace::new(vec![0, 2]), Err(Error::InvalidParity(2)));
        let err = GradedMatrix::new(qubit(), CMatrix::zeros(3, 3)).unwrap_err();
        assert!(matches!(err, Error::Shape { dim: 2, .. }));
    }

    #[test]
    fn grading_squares_to_identity() {
        let s = GradedSpace::new(vec![1, 0, 0, 1, 1]).unwrap();
        let g = s.grading();
        assert_eq!(&g * &g, CMatrix::identity(5, 5));
    }

    #[test]
    fn commutator_examples() {
        let g = GradedMatrix::grading(&qubit());
        let zero = GradedMatrix::zeros(&qubit());
        assert_eq!(graded_commutator(&g, &g).unwrap(), zero);
        assert_eq!(graded_commutator(&sx(), &sy()).unwrap(), zero);
        let two = GradedMatrix::identity(&qubit()).scale(2.0);
        assert_eq!(graded_commutator(&sx(), &sx()).unwrap(), two);
    }

    #[test]
    fn commutator_space_mismatch() {
        let big = GradedMatrix::identity(&GradedSpace::balanced(3).unwrap());
        assert!(matches!(
            graded_commutator(&sx(), &big),
            Err(Error::SpaceMismatch { left: 2, right: 3 })
        ));
    }

    #[test]
    fn tensor_examples() {
        let i2 = GradedMatrix::identity(&qubit());
        let i4 = GradedMatrix::identity(&qubit().tensor(&qubit()));
        assert_eq!(graded_tensor(&i2, &i2), i4);

        let lift_left = graded_tensor(&sx(), &i2);
        let lift_right = graded_tensor(&i2, &sx());
        let comm = graded_commutator(&lift_left, &lift_right).unwrap();
        assert_eq!(comm.max_abs(), 0.0);

        // (σx ⊗̂ σx)^2 = (-1)^{1·1} (σx² ⊗̂ σx²) = -I.
        let t = graded_tensor(&sx(), &sx());
        let sq = &t * &t;
        let sx2 = &sx() * &sx();
        let lifted = graded_tensor(&sx2, &sx2).scale(-1.0);
        assert_eq!(sq, lifted);
        assert_eq!(sq, i4.scale(-1.0));
    }

    #[test]
    fn tensor_parities() {
        let a = GradedSpace::new(vec![0, 1, 1]).unwrap();
        let b = GradedSpace::new(vec![1, 0]).unwrap();
        assert_eq!(a.tensor(&b).parities(), &[1, 0, 0, 1, 0, 1]);
    }

    #[test]
    fn direct_sum_examples() {
        let z = GradedMatrix::zeros(&qubit());
        assert_eq!(direct_sum(&z, &z).max_abs(), 0.0);
        let s = direct_sum(&sx(), &-sx());
        assert_eq!(s.space().parities(), &[0, 1, 0, 1]);
        let eig = s.matrix().clone().symmetric_eigen().eigenvalues;
        let mut eig: Vec<f64> = eig.iter().copied().collect();
        eig.sort_by(f64::total_cmp);
        for (got, want) in eig.iter().zip([-1.0, -1.0, 1.0, 1.0]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn grading_conjugation() {
        let g = GradedMatrix::grading(&qubit());
        assert_eq!(conjugate_by_grading(&g), g);
        assert_eq!(conjugate_by_grading(&sx()), -sx());
    }

    #[test]
    fn norms() {
        assert!((operator_norm(&GradedMatrix::identity(&qubit())) - 1.0).abs() < 1e-14);
        assert!((operator_norm(&sx()) - 1.0).abs() < 1e-14);
        let m = CMatrix::from_row_slice(2, 2, &[c(3., 0.), c(0., 0.), c(0., 0.), c(0., -4.)]);
        let d = GradedMatrix::new(qubit(), m).unwrap();
        assert!((operator_norm(&d) - 4.0).abs() < 1e-12);
        assert_eq!(operator_norm(&GradedMatrix::zeros(&qubit())), 0.0);
    }

    #[test]
    fn odd_self_adjoint_validation() {
        assert!(OddSelfAdjoint::new(sx()).is_ok());
        assert!(OddSelfAdjoint::new(sy()).is_ok());
        let g = GradedMatrix::grading(&qubit());
        assert!(matches!(OddSelfAdjoint::new(g), Err(Error::NotOdd(_))));
        let skew = GradedMatrix::from_real_rows(qubit(), &[&[0.0, 1.0], &[-1.0, 0.0]]).unwrap();
        assert!(matches!(OddSelfAdjoint::new(skew), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn homogeneity_detection() {
        assert_eq!(sx().homogeneous_parity(0.0), Some(Parity::Odd));
        assert_eq!(
            GradedMatrix::grading(&qubit()).homogeneous_parity(0.0),
            Some(Parity::Even)
        );
        let mixed = sx() + GradedMatrix::identity(&qubit());
        assert_eq!(mixed.homogeneous_parity(1e-12), None);
    }
}
