//! Nonlinear-crystal measurement layer.
//!
//! A crystal operator maps an input pair |a⟩|b⟩ on Alice's two qudits to a
//! single upconverted level |c⟩. Each crystal group `m` accepts exactly `d`
//! of the `d²` input pairs, and the groups together accept every pair once.
//! The upconverted photon then passes through a discrete Fourier transform and
//! a path detector, so a full measurement outcome is the pair (detector `i`,
//! crystal group `m`) with operator |i⟩⟨i| · QFT_d · M_m.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::root_of_unity;
use crate::tensor::{ComplexMatrix, ONE, ZERO};

/// Which table of crystal operators to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// The closed-form family valid for every d; reduces to the qubit
    /// type-I/type-II crystals at d = 2.
    #[default]
    General,
    /// The explicit three-crystal qutrit table (d = 3 only). Agrees with
    /// `General` for m = 0 and differs for m = 1, 2.
    QutritListing,
}

impl Convention {
    pub fn name(&self) -> &'static str {
        match self {
            Convention::General => "general",
            Convention::QutritListing => "qutrit-listing",
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Convention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "general" => Ok(Convention::General),
            "qutrit-listing" => Ok(Convention::QutritListing),
            other => Err(Error::Parse(format!("unknown convention {other:?}"))),
        }
    }
}

/// (row, column) pairs of the explicit qutrit table, columns written as
/// (a, b) for the input pair |a⟩|b⟩.
const QUTRIT_LISTING: [[(usize, (usize, usize)); 3]; 3] = [
    [(0, (2, 1)), (1, (0, 0)), (2, (1, 2))],
    [(0, (0, 1)), (1, (1, 0)), (2, (2, 2))],
    [(0, (2, 0)), (1, (1, 1)), (2, (0, 2))],
];

/// A d × d² crystal operator for group `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct CrystalOperator {
    d: usize,
    m: usize,
    convention: Convention,
    matrix: ComplexMatrix,
}

impl CrystalOperator {
    /// Wraps an arbitrary d × d² matrix. Only the shape is checked here;
    /// structural properties are reported by [`certify_measurement_set`].
    pub fn from_parts(d: usize, m: usize, convention: Convention, matrix: ComplexMatrix) -> Result<Self> {
        if matrix.rows() != d || matrix.cols() != d * d {
            return Err(Error::DimensionMismatch(format!(
                "crystal operator for d = {d} must be {d}x{}, got {}x{}",
                d * d,
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Self {
            d,
            m,
            convention,
            matrix,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Accepted input pairs as (output level, column index a·d + b), ordered by
    /// column.
    pub fn support(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self.matrix.nonzeros().into_iter().map(|(r, c, _)| (r, c)).collect();
        out.sort_by_key(|&(_, c)| c);
        out
    }
}

/// Crystal operator for group `m`.
///
/// General convention, with ⊕/⊖ taken mod d:
/// M_0 = Σ_k |k⊕1⟩⟨k|⟨d⊖k|, M_1 = Σ_k |k⟩⟨k|⟨d⊖(k+1)|, and
/// M_j = Σ_k |k⊕j⟩⟨k|⟨d⊖(k+j)| for j ≥ 2.
pub fn crystal_operator(d: usize, m: usize, convention: Convention) -> Result<CrystalOperator> {
    if d == 0 || m >= d {
        return Err(Error::IndexOutOfRange { index: m, dim: d });
    }
    let mut matrix = ComplexMatrix::zeros(d, d * d);
    match convention {
        Convention::General => {
            for k in 0..d {
                let (out, partner) = match m {
                    0 => ((k + 1) % d, (d - k) % d),
                    1 => (k, (2 * d - k - 1) % d),
                    j => ((k + j) % d, (2 * d - k - j) % d),
                };
                matrix[(out, k * d + partner)] = ONE;
            }
        }
        Convention::QutritListing => {
            if d != 3 {
                return Err(Error::InvalidConvention {
                    convention: convention.name().into(),
                    dim: d,
                });
            }
            for &(row, (a, b)) in &QUTRIT_LISTING[m] {
                matrix[(row, a * 3 + b)] = ONE;
            }
        }
    }
    Ok(CrystalOperator {
        d,
        m,
        convention,
        matrix,
    })
}

/// All `d` crystal operators of a convention, ordered by `m`.
pub fn crystal_set(d: usize, convention: Convention) -> Result<Vec<CrystalOperator>> {
    (0..d).map(|m| crystal_operator(d, m, convention)).collect()
}

/// Discrete Fourier transform with entry (y, x) = ω_d^{xy} / √d.
pub fn qft(d: usize) -> ComplexMatrix {
    assert!(d >= 1, "dimension must be positive");
    let norm = 1.0 / (d as f64).sqrt();
    ComplexMatrix::from_fn(d, d, |y, x| root_of_unity(d, (x * y) % d) * norm)
}

/// M_(i,m) = |i⟩⟨i| · QFT_d · M_m.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementOperator {
    d: usize,
    i: usize,
    m: usize,
    matrix: ComplexMatrix,
}

impl MeasurementOperator {
    pub fn d(&self) -> usize {
        self.d
    }
    pub fn i(&self) -> usize {
        self.i
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Nonzero entries of row `i` as (column, value).
    pub fn row_entries(&self) -> Vec<(usize, Complex64)> {
        self.matrix
            .row(self.i)
            .iter()
            .enumerate()
            .filter(|(_, z)| **z != ZERO)
            .map(|(c, z)| (c, *z))
            .collect()
    }
}

pub fn measurement_operator(d: usize, i: usize, m: usize, convention: Convention) -> Result<MeasurementOperator> {
    if i >= d {
        return Err(Error::IndexOutOfRange { index: i, dim: d });
    }
    let crystal = crystal_operator(d, m, convention)?;
    let mut projector = ComplexMatrix::zeros(d, d);
    projector[(i, i)] = ONE;
    let matrix = projector.matmul(&qft(d)).matmul(crystal.matrix());

    // Only row i survives, and there each accepted pair carries the QFT
    // amplitude of its output level.
    let f = qft(d);
    let expected = ComplexMatrix::from_fn(d, d * d, |r, c| {
        if r != i {
            return ZERO;
        }
        (0..d)
            .find(|&out| crystal.matrix()[(out, c)] != ZERO)
            .map_or(ZERO, |out| f[(i, out)] * crystal.matrix()[(out, c)])
    });
    let residual = matrix.max_abs_diff(&expected);
    if residual > 1e-12 {
        return Err(Error::DimensionMismatch(format!(
            "measurement operator ({i}, {m}) deviates from its row form by {residual:e}"
        )));
    }
    Ok(MeasurementOperator { d, i, m, matrix })
}

/// All d² measurement operators ordered by (i, m).
pub fn measurement_set(d: usize, convention: Convention) -> Result<Vec<MeasurementOperator>> {
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        for m in 0..d {
            out.push(measurement_operator(d, i, m, convention)?);
        }
    }
    Ok(out)
}

/// Π_(i,m) = M_(i,m)† M_(i,m), a d² × d² positive operator.
#[derive(Debug, Clone, PartialEq)]
pub struct PovmElement {
    pub i: usize,
    pub m: usize,
    pub matrix: ComplexMatrix,
}

pub fn povm_elements(d: usize, convention: Convention) -> Result<Vec<PovmElement>> {
    Ok(measurement_set(d, convention)?
        .into_iter()
        .map(|op| PovmElement {
            i: op.i,
            m: op.m,
            matrix: op.matrix.dagger().matmul(&op.matrix),
        })
        .collect())
}

/// max |Σ Π - I| over a POVM.
pub fn povm_completeness_residual(elements: &[PovmElement]) -> f64 {
    let Some(first) = elements.first() else {
        return f64::INFINITY;
    };
    let n = first.matrix.rows();
    let sum = elements
        .iter()
        .fold(ComplexMatrix::zeros(n, n), |acc, e| acc.add(&e.matrix));
    sum.max_abs_diff(&ComplexMatrix::identity(n))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorCertification {
    pub m: usize,
    /// max |M M† - I_d|.
    pub row_orthonormality_residual: f64,
    pub nonzero_count: usize,
    /// Every nonzero entry equals 1.
    pub unit_entries: bool,
}

/// Structural checks on a set of crystal operators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub dimension: usize,
    pub convention: Option<Convention>,
    /// max |Σ_m M_m† M_m - I_{d²}|.
    pub completeness_residual: f64,
    /// The same residual for (1/d) Σ_m M_m† M_m, i.e. with a 1/d prefactor
    /// applied to the sum. Nonzero for every d ≥ 2 when the unscaled sum is
    /// complete.
    pub scaled_completeness_residual: f64,
    /// Every input pair is accepted by exactly one operator.
    pub partition_valid: bool,
    pub per_operator: Vec<OperatorCertification>,
}

impl CertificationReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.partition_valid
            && self.completeness_residual <= tol
            && self.per_operator.iter().all(|op| {
                op.unit_entries && op.nonzero_count == self.dimension && op.row_orthonormality_residual <= tol
            })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn certify_measurement_set(operators: &[CrystalOperator]) -> CertificationReport {
    let Some(first) = operators.first() else {
        return CertificationReport {
            dimension: 0,
            convention: None,
            completeness_residual: f64::INFINITY,
            scaled_completeness_residual: f64::INFINITY,
            partition_valid: false,
            per_operator: Vec::new(),
        };
    };
    let d = first.d;
    let n = d * d;
    let convention = operators
        .iter()
        .all(|op| op.convention == first.convention)
        .then_some(first.convention);

    let mut sum = ComplexMatrix::zeros(n, n);
    let mut hits = vec![0usize; n];
    let mut per_operator = Vec::with_capacity(operators.len());
    let mut shapes_ok = true;
    for op in operators {
        if op.d != d {
            shapes_ok = false;
            continue;
        }
        let mat = &op.matrix;
        sum = sum.add(&mat.dagger().matmul(mat));
        let nonzeros = mat.nonzeros();
        for &(_, c, _) in &nonzeros {
            hits[c] += 1;
        }
        per_operator.push(OperatorCertification {
            m: op.m,
            row_orthonormality_residual: mat.matmul(&mat.dagger()).max_abs_diff(&ComplexMatrix::identity(d)),
            nonzero_count: nonzeros.len(),
            unit_entries: nonzeros.iter().all(|&(_, _, z)| z == ONE),
        });
    }
    let identity = ComplexMatrix::identity(n);
    let scaled = sum.scale(Complex64::new(1.0 / d as f64, 0.0));
    CertificationReport {
        dimension: d,
        convention,
        completeness_residual: sum.max_abs_diff(&identity),
        scaled_completeness_residual: scaled.max_abs_diff(&identity),
        partition_valid: shapes_ok && operators.len() == d && hits.iter().all(|&h| h == 1),
        per_operator,
    }
}
