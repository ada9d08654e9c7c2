//! Small dense linear algebra over a [`Scalar`] field: state vectors,
//! unitary operators and projective measurements.

use super::scalar::{Scalar, Weight, FLOAT_TOLERANCE};
use super::ModelError;
use num_traits::{One, Zero};

/// A quantum register state over `dim` basis states `q_0 .. q_{dim-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<S> {
    amps: Vec<S>,
}

impl<S: Scalar> StateVector<S> {
    pub fn new(amps: Vec<S>) -> Result<Self, ModelError> {
        if amps.is_empty() {
            return Err(ModelError::EmptyDimension);
        }
        Ok(StateVector { amps })
    }

    /// The computational basis state `|q_index>`.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(
            index < dim,
            "basis index {index} out of range for dimension {dim}"
        );
        let amps = (0..dim)
            .map(|i| {
                if i == index {
                    S::one_amp()
                } else {
                    S::zero_amp()
                }
            })
            .collect();
        StateVector { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[S] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> S::Prob {
        self.amps
            .iter()
            .fold(S::Prob::zero(), |acc, a| acc + a.norm_sqr())
    }

    /// Exact for the rational backend, within [`FLOAT_TOLERANCE`] otherwise.
    pub fn is_normalized(&self) -> bool {
        let n = self.norm_sqr();
        if <S::Prob as Weight>::EXACT {
            n == S::Prob::one()
        } else {
            (n.to_f64() - 1.0).abs() <= FLOAT_TOLERANCE
        }
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim() == other.dim()
            && self
                .amps
                .iter()
                .zip(&other.amps)
                .all(|(a, b)| a.approx_eq(b, tol))
    }

    /// Representative of the state's ray: the first amplitude whose modulus
    /// exceeds `tol` is rotated onto the positive real axis.
    pub fn canonical_phase(&self, tol: f64) -> Self {
        let lead = self.amps.iter().find(|a| {
            if S::BACKEND == super::Backend::Rational {
                !a.is_exact_zero()
            } else {
                a.abs_f64() > tol
            }
        });
        match lead {
            Some(a) => {
                let rot = a.unit_phase().conj();
                StateVector {
                    amps: self.amps.iter().map(|x| x.mul(&rot)).collect(),
                }
            }
            None => self.clone(),
        }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> StateVector<T> {
        StateVector {
            amps: self.amps.iter().map(f).collect(),
        }
    }
}

/// Square matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S> {
    dim: usize,
    entries: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self, ModelError> {
        let dim = rows.len();
        if dim == 0 {
            return Err(ModelError::EmptyDimension);
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(ModelError::DimensionMismatch {
                expected: dim,
                found: bad.len(),
            });
        }
        Ok(Matrix {
            dim,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(
            dim,
            |i, j| if i == j { S::one_amp() } else { S::zero_amp() },
        )
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_fn(dim, |_, _| S::zero_amp())
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> S) -> Self {
        let entries = (0..dim * dim).map(|k| f(k / dim, k % dim)).collect();
        Matrix { dim, entries }
    }

    /// `|v><v|` for a normalized `v`.
    pub fn outer(v: &StateVector<S>) -> Self {
        let a = v.amps();
        Self::from_fn(a.len(), |i, j| a[i].mul(&a[j].conj()))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> &S {
        &self.entries[row * self.dim + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[S]> {
        self.entries.chunks(self.dim)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).clone())
    }

    pub fn add(&self, other: &Self) -> Result<Self, ModelError> {
        self.check_dim(other.dim)?;
        Ok(Self::from_fn(self.dim, |i, j| {
            self.get(i, j).add(other.get(i, j))
        }))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, ModelError> {
        self.check_dim(other.dim)?;
        Ok(Self::from_fn(self.dim, |i, j| {
            self.get(i, j).sub(other.get(i, j))
        }))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, ModelError> {
        self.check_dim(other.dim)?;
        let n = self.dim;
        Ok(Self::from_fn(n, |i, j| {
            (0..n).fold(S::zero_amp(), |acc, k| {
                acc.add(&self.get(i, k).mul(other.get(k, j)))
            })
        }))
    }

    pub fn apply(&self, v: &StateVector<S>) -> Result<StateVector<S>, ModelError> {
        self.check_dim(v.dim())?;
        let amps = self
            .rows()
            .map(|row| {
                row.iter()
                    .zip(v.amps())
                    .fold(S::zero_amp(), |acc, (m, x)| acc.add(&m.mul(x)))
            })
            .collect();
        Ok(StateVector { amps })
    }

    /// `<v|M|v>`.
    pub fn expectation(&self, v: &StateVector<S>) -> Result<S, ModelError> {
        let mv = self.apply(v)?;
        Ok(v.amps()
            .iter()
            .zip(mv.amps())
            .fold(S::zero_amp(), |acc, (a, b)| acc.add(&a.conj().mul(b))))
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim == other.dim
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| a.approx_eq(b, tol))
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.approx_eq(&Self::identity(self.dim), tol)
    }

    /// Block-embed into a `total`-dimensional space at `offset`; the
    /// complement gets `fill` on the diagonal (identity for unitaries, zero
    /// for projectors).
    pub fn embed(&self, offset: usize, total: usize, fill: S) -> Self {
        assert!(offset + self.dim <= total);
        Self::from_fn(total, |i, j| {
            let inside = |k: usize| k >= offset && k < offset + self.dim;
            if inside(i) && inside(j) {
                self.get(i - offset, j - offset).clone()
            } else if i == j {
                fill.clone()
            } else {
                S::zero_amp()
            }
        })
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix {
            dim: self.dim,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    fn check_dim(&self, found: usize) -> Result<(), ModelError> {
        if found == self.dim {
            Ok(())
        } else {
            Err(ModelError::DimensionMismatch {
                expected: self.dim,
                found,
            })
        }
    }
}

/// A matrix that is meant to be unitary. Unitarity is not enforced on
/// construction; [`UnitaryOp::is_unitary`] and machine validation report it.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryOp<S> {
    matrix: Matrix<S>,
}

impl<S: Scalar> UnitaryOp<S> {
    pub fn new(matrix: Matrix<S>) -> Self {
        UnitaryOp { matrix }
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self, ModelError> {
        Matrix::from_rows(rows).map(Self::new)
    }

    pub fn identity(dim: usize) -> Self {
        UnitaryOp {
            matrix: Matrix::identity(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.matrix
    }

    /// `U^dagger U = I`: exact for rationals, entrywise within
    /// [`FLOAT_TOLERANCE`] for floats.
    pub fn is_unitary(&self) -> bool {
        self.matrix
            .adjoint()
            .matmul(&self.matrix)
            .map(|p| p.is_identity(FLOAT_TOLERANCE))
            .unwrap_or(false)
    }

    pub fn inverse(&self) -> Self {
        UnitaryOp {
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn compose(&self, after: &Self) -> Result<Self, ModelError> {
        after.matrix.matmul(&self.matrix).map(Self::new)
    }

    pub fn embed(&self, offset: usize, total: usize) -> Self {
        UnitaryOp {
            matrix: self.matrix.embed(offset, total, S::one_amp()),
        }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> UnitaryOp<T> {
        UnitaryOp {
            matrix: self.matrix.map(f),
        }
    }
}

/// `u . v`.
pub fn apply_unitary<S: Scalar>(
    u: &UnitaryOp<S>,
    v: &StateVector<S>,
) -> Result<StateVector<S>, ModelError> {
    u.matrix.apply(v)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome<S> {
    pub label: String,
    pub projector: Matrix<S>,
}

/// A projective measurement `{P(e_j)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Measurement<S> {
    outcomes: Vec<Outcome<S>>,
}

/// Why a measurement is not a valid projective measurement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProjectorDefect {
    NotIdempotent { outcome: String },
    NotHermitian { outcome: String },
    Incomplete,
    DimensionMismatch { outcome: String },
}

impl<S: Scalar> Measurement<S> {
    pub fn new(outcomes: Vec<Outcome<S>>) -> Result<Self, ModelError> {
        let Some(first) = outcomes.first() else {
            return Err(ModelError::EmptyDimension);
        };
        let dim = first.projector.dim();
        if let Some(bad) = outcomes.iter().find(|o| o.projector.dim() != dim) {
            return Err(ModelError::DimensionMismatch {
                expected: dim,
                found: bad.projector.dim(),
            });
        }
        Ok(Measurement { outcomes })
    }

    /// One outcome per basis state, labelled `q0`, `q1`, ...
    pub fn computational(dim: usize) -> Self {
        let outcomes = (0..dim)
            .map(|i| Outcome {
                label: format!("q{i}"),
                projector: Matrix::outer(&StateVector::basis(dim, i)),
            })
            .collect();
        Measurement { outcomes }
    }

    /// `{|q_i><q_i|, I - |q_i><q_i|}`.
    pub fn basis_vs_rest(dim: usize, index: usize) -> Self {
        let p = Matrix::outer(&StateVector::basis(dim, index));
        let rest = Matrix::identity(dim).sub(&p).expect("same dimension");
        Measurement {
            outcomes: vec![
                Outcome {
                    label: format!("q{index}"),
                    projector: p,
                },
                Outcome {
                    label: "other".into(),
                    projector: rest,
                },
            ],
        }
    }

    pub fn dim(&self) -> usize {
        self.outcomes[0].projector.dim()
    }

    pub fn outcomes(&self) -> &[Outcome<S>] {
        &self.outcomes
    }

    pub fn defects(&self) -> Vec<ProjectorDefect> {
        let dim = self.dim();
        let mut found = Vec::new();
        let mut total = Matrix::zeros(dim);
        for o in &self.outcomes {
            let p = &o.projector;
            if p.dim() != dim {
                found.push(ProjectorDefect::DimensionMismatch {
                    outcome: o.label.clone(),
                });
                continue;
            }
            if !p
                .matmul(p)
                .map(|pp| pp.approx_eq(p, FLOAT_TOLERANCE))
                .unwrap_or(false)
            {
                found.push(ProjectorDefect::NotIdempotent {
                    outcome: o.label.clone(),
                });
            }
            if !p.adjoint().approx_eq(p, FLOAT_TOLERANCE) {
                found.push(ProjectorDefect::NotHermitian {
                    outcome: o.label.clone(),
                });
            }
            total = total.add(p).expect("checked dimension");
        }
        if !total.is_identity(FLOAT_TOLERANCE) {
            found.push(ProjectorDefect::Incomplete);
        }
        found
    }

    /// Block-embed each projector at `offset` inside a `total`-dimensional
    /// space. When the space grows, an extra outcome labelled `outside`
    /// projects onto the complement so completeness is preserved.
    pub fn embed(&self, offset: usize, total: usize) -> Self {
        let mut outcomes: Vec<Outcome<S>> = self
            .outcomes
            .iter()
            .map(|o| Outcome {
                label: o.label.clone(),
                projector: o.projector.embed(offset, total, S::zero_amp()),
            })
            .collect();
        if total > self.dim() {
            let inside = Matrix::<S>::identity(self.dim()).embed(offset, total, S::zero_amp());
            let rest = Matrix::identity(total)
                .sub(&inside)
                .expect("same dimension");
            outcomes.push(Outcome {
                label: OUTSIDE_LABEL.into(),
                projector: rest,
            });
        }
        Measurement { outcomes }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Measurement<T> {
        Measurement {
            outcomes: self
                .outcomes
                .iter()
                .map(|o| Outcome {
                    label: o.label.clone(),
                    projector: o.projector.map(&f),
                })
                .collect(),
        }
    }
}

/// Label of the complement outcome added by [`Measurement::embed`].
pub const OUTSIDE_LABEL: &str = "outside";

#[derive(Clone, Debug, PartialEq)]
pub struct MeasuredOutcome<S: Scalar> {
    pub index: usize,
    pub label: String,
    pub probability: S::Prob,
    pub post: StateVector<S>,
}

/// Born rule: outcome `j` with probability `<v|P_j|v>` and post-state
/// `P_j v / sqrt(p_j)`. Zero-probability outcomes are omitted.
pub fn measure<S: Scalar>(
    meas: &Measurement<S>,
    v: &StateVector<S>,
) -> Result<Vec<MeasuredOutcome<S>>, ModelError> {
    let mut out = Vec::with_capacity(meas.outcomes.len());
    for (index, o) in meas.outcomes.iter().enumerate() {
        let projected = o.projector.apply(v)?;
        let p = projected.norm_sqr();
        if p == S::Prob::zero() {
            continue;
        }
        let amps = projected
            .amps()
            .iter()
            .map(|a| a.div_sqrt(&p))
            .collect::<Result<Vec<_>, _>>()?;
        out.push(MeasuredOutcome {
            index,
            label: o.label.clone(),
            probability: p,
            post: StateVector { amps },
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::scalar::rational;
    use num_complex::Complex64;
    use num_rational::BigRational;

    fn rvec(xs: &[(i64, i64)]) -> StateVector<BigRational> {
        StateVector::new(xs.iter().map(|&(n, d)| rational(n, d)).collect()).unwrap()
    }

    fn u_a() -> UnitaryOp<BigRational> {
        let r = |n| rational(n, 5);
        UnitaryOp::from_rows(vec![
            vec![r(4), r(3), r(0)],
            vec![r(-3), r(4), r(0)],
            vec![r(0), r(0), r(5)],
        ])
        .unwrap()
    }

    #[test]
    fn apply_unitary_to_first_basis_state() {
        let v = apply_unitary(&u_a(), &StateVector::basis(3, 0)).unwrap();
        assert_eq!(v, rvec(&[(4, 5), (-3, 5), (0, 1)]));
        assert!(v.is_normalized());
    }

    #[test]
    fn identity_leaves_vector_alone() {
        let v = rvec(&[(4, 5), (-3, 5), (0, 1)]);
        assert_eq!(apply_unitary(&UnitaryOp::identity(3), &v).unwrap(), v);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let err = apply_unitary(&u_a(), &StateVector::basis(2, 0)).unwrap_err();
        assert!(matches!(
            err,
            ModelError::DimensionMismatch {
                expected: 3,
                found: 2
            }
        ));
    }

    #[test]
    fn shear_is_not_unitary() {
        let r = |n| rational(n, 1);
        let shear = UnitaryOp::from_rows(vec![vec![r(1), r(1)], vec![r(0), r(1)]]).unwrap();
        assert!(!shear.is_unitary());
        assert!(u_a().is_unitary());
    }

    #[test]
    fn born_rule_on_rotated_state() {
        // <v|P|v> by hand: (4/5)^2 = 16/25 and (-3/5)^2 = 9/25.
        let v = rvec(&[(4, 5), (-3, 5), (0, 1)]);
        let out = measure(&Measurement::basis_vs_rest(3, 0), &v).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].probability, rational(16, 25));
        assert_eq!(out[0].post, StateVector::basis(3, 0));
        assert_eq!(out[1].probability, rational(9, 25));
        assert_eq!(out[1].post, rvec(&[(0, 1), (-1, 1), (0, 1)]));
    }

    #[test]
    fn eigenstate_gives_single_outcome() {
        let out = measure(
            &Measurement::<BigRational>::basis_vs_rest(3, 0),
            &StateVector::basis(3, 0),
        )
        .unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].probability, rational(1, 1));
        assert_eq!(out[0].label, "q0");
    }

    #[test]
    fn irrational_post_state_is_refused() {
        let v = rvec(&[(3, 5), (0, 1), (4, 5)]);
        // The complement projector leaves (0, 0, 4/5) with p = 16/25: fine.
        assert!(measure(&Measurement::basis_vs_rest(3, 1), &v).is_ok());
        let w = rvec(&[(1, 3), (2, 3), (2, 3)]);
        // p = 8/9 has no rational square root.
        assert!(matches!(
            measure(&Measurement::basis_vs_rest(3, 0), &w),
            Err(ModelError::IrrationalAmplitude(_))
        ));
    }

    #[test]
    fn projector_defects() {
        assert!(Measurement::<BigRational>::computational(3)
            .defects()
            .is_empty());
        let half = Measurement::new(vec![Outcome {
            label: "x".into(),
            projector: Matrix::outer(&StateVector::<BigRational>::basis(2, 0)),
        }])
        .unwrap();
        assert_eq!(half.defects(), vec![ProjectorDefect::Incomplete]);
    }

    #[test]
    fn embedded_measurement_stays_complete() {
        let m = Measurement::<Complex64>::computational(2).embed(1, 4);
        assert_eq!(m.outcomes().len(), 3);
        assert!(m.defects().is_empty());
        let u = UnitaryOp::<Complex64>::identity(2).embed(2, 4);
        assert!(u.is_unitary());
    }

    #[test]
    fn canonical_phase_removes_sign() {
        let v = rvec(&[(0, 1), (-3, 5), (4, 5)]);
        assert_eq!(v.canonical_phase(0.0), rvec(&[(0, 1), (3, 5), (-4, 5)]));
        let z = StateVector::new(vec![Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)]).unwrap();
        assert!(z
            .canonical_phase(1e-12)
            .approx_eq(&StateVector::basis(2, 0), 1e-15));
    }
}
