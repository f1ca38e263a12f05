//! Kraus channels and the crosstalk (d-flip) noise family.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::{root_of_unity, PureState};
use crate::tensor::{kron, ComplexMatrix, ComplexVector, DensityOperator, ONE, ZERO};

/// Completeness tolerance for [`KrausChannel`].
pub const COMPLETENESS_TOL: f64 = 1e-12;

/// Generalized Pauli operator U_im = Σ_k ω_d^{k·i} |k⟩⟨k⊕m|.
#[derive(Debug, Clone, PartialEq)]
pub struct WeylOperator {
    pub d: usize,
    pub i: usize,
    pub m: usize,
    pub matrix: ComplexMatrix,
}

pub fn weyl(d: usize, i: usize, m: usize) -> Result<WeylOperator> {
    for index in [i, m] {
        if index >= d {
            return Err(Error::IndexOutOfRange { index, dim: d });
        }
    }
    Ok(WeylOperator {
        d,
        i,
        m,
        matrix: weyl_matrix(d, i, m),
    })
}

pub(crate) fn weyl_matrix(d: usize, i: usize, m: usize) -> ComplexMatrix {
    let mut u = ComplexMatrix::zeros(d, d);
    for k in 0..d {
        u[(k, (k + m) % d)] = root_of_unity(d, k * i);
    }
    u
}

/// The permutation |l⟩ → |(−l) mod d⟩.
pub fn index_inversion(d: usize) -> ComplexMatrix {
    let mut p = ComplexMatrix::zeros(d, d);
    for l in 0..d {
        p[((d - l) % d, l)] = ONE;
    }
    p
}

/// A finite Kraus decomposition with Σ C†C = I.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    d: usize,
    operators: Vec<ComplexMatrix>,
    label: String,
}

impl KrausChannel {
    pub fn new(d: usize, operators: Vec<ComplexMatrix>, label: impl Into<String>) -> Result<Self> {
        if operators.is_empty() {
            return Err(Error::NotTracePreserving(f64::INFINITY));
        }
        if let Some(bad) = operators.iter().find(|op| op.rows() != d || op.cols() != d) {
            return Err(Error::DimensionMismatch(format!(
                "Kraus operator is {}x{}, channel dimension {d}",
                bad.rows(),
                bad.cols()
            )));
        }
        let channel = Self {
            d,
            operators,
            label: label.into(),
        };
        let residual = channel.completeness_residual();
        if residual > COMPLETENESS_TOL {
            return Err(Error::NotTracePreserving(residual));
        }
        Ok(channel)
    }

    pub fn identity(d: usize) -> Self {
        Self {
            d,
            operators: vec![ComplexMatrix::identity(d)],
            label: "identity".into(),
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Number of Kraus operators.
    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    /// max |Σ C†C − I|.
    pub fn completeness_residual(&self) -> f64 {
        let sum = self
            .operators
            .iter()
            .fold(ComplexMatrix::zeros(self.d, self.d), |acc, op| {
                acc.add(&op.dagger().matmul(op))
            });
        sum.max_abs_diff(&ComplexMatrix::identity(self.d))
    }

    /// Tr(C†C)/d per operator; the flip probabilities for scaled unitaries.
    pub fn weights(&self) -> Vec<f64> {
        self.operators
            .iter()
            .map(|op| op.data().iter().map(|z| z.norm_sqr()).sum::<f64>() / self.d as f64)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseVariant {
    /// Cyclic shifts U_{0j}.
    Shift,
    /// Pure phases U_{j0}.
    Phase,
    /// Every non-identity Weyl operator with equal weight.
    #[default]
    Weyl,
}

impl NoiseVariant {
    pub fn name(&self) -> &'static str {
        match self {
            NoiseVariant::Shift => "shift",
            NoiseVariant::Phase => "phase",
            NoiseVariant::Weyl => "weyl",
        }
    }
}

impl fmt::Display for NoiseVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NoiseVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shift" => Ok(NoiseVariant::Shift),
            "phase" => Ok(NoiseVariant::Phase),
            "weyl" => Ok(NoiseVariant::Weyl),
            other => Err(Error::Parse(format!("unknown noise variant {other:?}"))),
        }
    }
}

/// How two single-qudit channels combine into a channel on the pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProductMode {
    /// Every pair A_i ⊗ B_j: the two qudits flip independently.
    #[default]
    Independent,
    /// Index-locked pairs A_i ⊗ B_i: both qudits undergo the same flip event.
    Correlated,
}

impl ProductMode {
    pub fn name(&self) -> &'static str {
        match self {
            ProductMode::Independent => "independent",
            ProductMode::Correlated => "correlated",
        }
    }
}

impl fmt::Display for ProductMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProductMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "independent" => Ok(ProductMode::Independent),
            "correlated" => Ok(ProductMode::Correlated),
            other => Err(Error::Parse(format!("unknown noise mode {other:?}"))),
        }
    }
}

/// Serializable noise description, e.g. `{"variant": "weyl", "p": 0.3, "mode": "independent"}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelDescriptor {
    pub variant: NoiseVariant,
    pub p: f64,
    #[serde(default)]
    pub mode: ProductMode,
}

impl ChannelDescriptor {
    pub fn channel(&self, d: usize) -> Result<KrausChannel> {
        crosstalk_channel(d, self.p, self.variant)
    }
}

/// Crosstalk channel with flip probability `p`.
///
/// Shift and Phase keep `√(1 − (d−1)p/d)·I` and add `√(p/d)` times each of the
/// d − 1 non-trivial shifts (resp. phases). Weyl keeps `√(1 − (d²−1)p/d²)·I`
/// and adds `√(p/d²)` times each of the d² − 1 non-trivial Weyl operators.
/// Zero-weight operators are dropped.
pub fn crosstalk_channel(d: usize, p: f64, variant: NoiseVariant) -> Result<KrausChannel> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    if d == 0 {
        return Err(Error::IndexOutOfRange { index: 0, dim: 0 });
    }
    let df = d as f64;
    let mut ops = Vec::new();
    let mut push = |weight: f64, m: ComplexMatrix| {
        if weight > 0.0 {
            ops.push(m.scale(Complex64::new(weight.sqrt(), 0.0)));
        }
    };
    match variant {
        NoiseVariant::Shift | NoiseVariant::Phase => {
            push(1.0 - (df - 1.0) * p / df, ComplexMatrix::identity(d));
            for j in 1..d {
                let u = match variant {
                    NoiseVariant::Shift => weyl_matrix(d, 0, j),
                    _ => weyl_matrix(d, j, 0),
                };
                push(p / df, u);
            }
        }
        NoiseVariant::Weyl => {
            let n = df * df;
            push(1.0 - (n - 1.0) * p / n, ComplexMatrix::identity(d));
            for i in 0..d {
                for m in 0..d {
                    if (i, m) != (0, 0) {
                        push(p / n, weyl_matrix(d, i, m));
                    }
                }
            }
        }
    }
    KrausChannel::new(d, ops, format!("{variant}(d={d}, p={p})"))
}

/// Two-qudit channel from single-qudit channels `a` (first factor) and `b`.
///
/// Correlated mode pairs operators by index and rescales each pair by
/// (w_a w_b)^{-1/4}, with w the operator weight Tr(C†C)/d, so that scaled
/// unitaries with matching weights give √w (U ⊗ V). Channels whose weights
/// do not match are rejected as not trace preserving.
pub fn product_channel(a: &KrausChannel, b: &KrausChannel, mode: ProductMode) -> Result<KrausChannel> {
    let d = a.d * b.d;
    match mode {
        ProductMode::Independent => {
            let mut ops = Vec::with_capacity(a.len() * b.len());
            for x in &a.operators {
                for y in &b.operators {
                    ops.push(kron(x, y));
                }
            }
            KrausChannel::new(d, ops, format!("{} x {}", a.label, b.label))
        }
        ProductMode::Correlated => {
            if a.len() != b.len() {
                return Err(Error::OperatorCountMismatch(a.len(), b.len()));
            }
            let ops = a
                .operators
                .iter()
                .zip(a.weights())
                .zip(b.operators.iter().zip(b.weights()))
                .filter(|((_, wa), (_, wb))| *wa > 0.0 && *wb > 0.0)
                .map(|((x, wa), (y, wb))| kron(x, y).scale(Complex64::new((wa * wb).powf(-0.25), 0.0)))
                .collect();
            KrausChannel::new(d, ops, format!("{} ~ {}", a.label, b.label))
        }
    }
}

/// One term of a pure-state ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub weight: f64,
    pub state: PureState,
}

impl Branch {
    pub fn new(weight: f64, state: PureState) -> Self {
        Self { weight, state }
    }
}

/// Σ w |ψ⟩⟨ψ| over an ensemble.
pub fn ensemble_density(branches: &[Branch]) -> DensityOperator {
    let n = branches.first().map_or(0, |b| b.state.dim());
    let sum = branches.iter().fold(ComplexMatrix::zeros(n, n), |acc, b| {
        acc.add(&b.state.vector().outer().scale(Complex64::new(b.weight, 0.0)))
    });
    DensityOperator::from_trusted(sum)
}

/// A square operator on some subsystems of a composite system, with the
/// identity on the rest, stored as index offsets.
#[derive(Debug, Clone)]
pub struct EmbeddedOperator {
    dim: usize,
    /// (row offset, column offset, value) for every nonzero entry.
    entries: Vec<(usize, usize, Complex64)>,
    /// Offsets of every basis index of the untouched subsystems.
    rest: Vec<usize>,
}

impl EmbeddedOperator {
    /// Embeds `op`, acting on `targets` (in that order), into the system with
    /// subsystem dimensions `dims`.
    pub fn new(op: &ComplexMatrix, dims: &[usize], targets: &[usize]) -> Result<Self> {
        let dim: usize = dims.iter().product();
        let mut seen = vec![false; dims.len()];
        for &t in targets {
            if t >= dims.len() || seen[t] {
                return Err(Error::DimensionMismatch(format!(
                    "invalid target subsystems {targets:?} for dims {dims:?}"
                )));
            }
            seen[t] = true;
        }
        let target_dim: usize = targets.iter().map(|&t| dims[t]).product();
        if targets.is_empty() || !op.is_square() || op.rows() != target_dim {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} operator on subsystems {targets:?} of dims {dims:?}",
                op.rows(),
                op.cols()
            )));
        }
        let mut strides = vec![1usize; dims.len()];
        for k in (0..dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * dims[k + 1];
        }
        let strides = &strides;
        let offsets = |subset: &[usize]| -> Vec<usize> {
            let mut out = vec![0usize];
            for &s in subset {
                let (n, stride) = (dims[s], strides[s]);
                out = out.iter().flat_map(|&o| (0..n).map(move |x| o + x * stride)).collect();
            }
            out
        };
        let target_off = offsets(targets);
        let others: Vec<usize> = (0..dims.len()).filter(|k| !seen[*k]).collect();
        let rest = offsets(&others);
        let entries = op
            .nonzeros()
            .into_iter()
            .map(|(r, c, z)| (target_off[r], target_off[c], z))
            .collect();
        Ok(Self { dim, entries, rest })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(v.len(), self.dim);
        let mut out = vec![ZERO; self.dim];
        for &(r, c, z) in &self.entries {
            for &o in &self.rest {
                out[r + o] += z * v[c + o];
            }
        }
        out
    }

    /// Dense matrix on the full system.
    pub fn to_matrix(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim, self.dim);
        for &(r, c, z) in &self.entries {
            for &o in &self.rest {
                m[(r + o, c + o)] += z;
            }
        }
        m
    }
}

fn check_state_dims(state_dim: usize, dims: &[usize]) -> Result<()> {
    let total: usize = dims.iter().product();
    if total != state_dim {
        return Err(Error::DimensionMismatch(format!(
            "subsystem dims {dims:?} do not match state dimension {state_dim}"
        )));
    }
    Ok(())
}

/// Applies `channel` to subsystems `targets` of every branch.
///
/// Each input branch (w, ψ) yields (w‖Cψ‖², Cψ/‖Cψ‖) for every Kraus operator
/// C with nonzero image; output order is branch-major, operator-minor.
pub fn apply_channel_to_branches(
    channel: &KrausChannel,
    branches: &[Branch],
    dims: &[usize],
    targets: &[usize],
) -> Result<Vec<Branch>> {
    let embedded = channel
        .operators()
        .iter()
        .map(|op| EmbeddedOperator::new(op, dims, targets))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::with_capacity(branches.len() * embedded.len());
    for branch in branches {
        check_state_dims(branch.state.dim(), dims)?;
        for op in &embedded {
            if let Some(b) = apply_embedded(op, branch) {
                out.push(b);
            }
        }
    }
    Ok(out)
}

pub(crate) fn apply_embedded(op: &EmbeddedOperator, branch: &Branch) -> Option<Branch> {
    let image = ComplexVector::new(op.apply(branch.state.amplitudes()));
    let norm_sqr = image.norm_sqr();
    let weight = branch.weight * norm_sqr;
    if weight <= 0.0 || norm_sqr < 1e-300 {
        return None;
    }
    let state = PureState::normalize(image).ok()?;
    Some(Branch { weight, state })
}

/// E(ρ) = Σ C ρ C† with the channel embedded on `targets`.
pub fn apply_channel_to_density(
    channel: &KrausChannel,
    rho: &DensityOperator,
    dims: &[usize],
    targets: &[usize],
) -> Result<DensityOperator> {
    check_state_dims(rho.dim(), dims)?;
    let n = rho.dim();
    let mut acc = ComplexMatrix::zeros(n, n);
    for op in channel.operators() {
        let full = EmbeddedOperator::new(op, dims, targets)?.to_matrix();
        acc = acc.add(&full.matmul(rho.matrix()).matmul(&full.dagger()));
    }
    Ok(DensityOperator::from_trusted(acc))
}
