//! Literal density-matrix reference for the teleportation pipeline.
//!
//! Everything here is built directly from the operator definitions with full
//! matrices on the d³-dimensional space: ρ = |ψ⟩⟨ψ|, ρ' = Σ (C ⊗ I) ρ (C ⊗ I)†,
//! p = Tr((M†M ⊗ I) ρ'), ρ_CB = (M ⊗ I) ρ' (M ⊗ I)† / p, ρ_B = Tr_C ρ_CB,
//! then V ρ_B V† and the general Uhlmann fidelity. Only the tensor helpers
//! (kron, partial trace, fidelity) come from the library.

#![allow(dead_code)]

use std::f64::consts::PI;

use nlo_teleport::noise::{NoiseVariant, ProductMode};
use nlo_teleport::protocol::NoiseTargets;
use nlo_teleport::tensor::{fidelity, kron, partial_trace, ComplexMatrix, ComplexVector, DensityOperator};
use nlo_teleport::Complex64;

pub fn omega(d: usize, k: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * (k % d) as f64 / d as f64)
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// |a⟩⟨b| on a space of `rows` × `cols`.
pub fn ketbra(rows: usize, a: usize, cols: usize, b: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(rows, cols);
    m[(a, b)] = real(1.0);
    m
}

/// Σ_k ω^{ki} |k⟩⟨k ⊕ m|.
pub fn weyl(d: usize, i: usize, m: usize) -> ComplexMatrix {
    let mut u = ComplexMatrix::zeros(d, d);
    for k in 0..d {
        u = u.add(&ketbra(d, k, d, (k + m) % d).scale(omega(d, k * i)));
    }
    u
}

/// |l⟩ → |−l mod d⟩.
pub fn inversion(d: usize) -> ComplexMatrix {
    let mut u = ComplexMatrix::zeros(d, d);
    for l in 0..d {
        u = u.add(&ketbra(d, (d - l) % d, d, l));
    }
    u
}

pub fn kraus(d: usize, variant: NoiseVariant, p: f64) -> Vec<ComplexMatrix> {
    let id = ComplexMatrix::identity(d);
    let mut ops = Vec::new();
    match variant {
        NoiseVariant::Shift | NoiseVariant::Phase => {
            ops.push(id.scale(real((1.0 - (d - 1) as f64 * p / d as f64).sqrt())));
            for i in 1..d {
                let u = if variant == NoiseVariant::Shift {
                    weyl(d, 0, i)
                } else {
                    weyl(d, i, 0)
                };
                ops.push(u.scale(real((p / d as f64).sqrt())));
            }
        }
        NoiseVariant::Weyl => {
            let dd = (d * d) as f64;
            ops.push(id.scale(real((1.0 - (dd - 1.0) * p / dd).sqrt())));
            for i in 0..d {
                for m in 0..d {
                    if (i, m) != (0, 0) {
                        ops.push(weyl(d, i, m).scale(real((p / dd).sqrt())));
                    }
                }
            }
        }
    }
    ops
}

/// M_m as a d × d² map from (A1, A2) to C.
pub fn crystal(d: usize, m: usize) -> ComplexMatrix {
    let mut op = ComplexMatrix::zeros(d, d * d);
    for k in 0..d {
        let (out, partner) = match m {
            0 => ((k + 1) % d, (d - k) % d),
            1 => (k, (d - (k + 1) % d) % d),
            j => ((k + j) % d, (d - (k + j) % d) % d),
        };
        // |out⟩⟨k|⟨partner|
        let bra = kron(&ketbra(1, 0, d, k), &ketbra(1, 0, d, partner));
        op = op.add(&kron(&ketbra(d, out, 1, 0), &bra));
    }
    op
}

pub fn dft(d: usize) -> ComplexMatrix {
    let mut f = ComplexMatrix::zeros(d, d);
    for y in 0..d {
        for x in 0..d {
            f[(y, x)] = omega(d, x * y) / (d as f64).sqrt();
        }
    }
    f
}

/// |i⟩⟨i| QFT M_m.
pub fn measurement(d: usize, i: usize, m: usize) -> ComplexMatrix {
    ketbra(d, i, d, i).matmul(&dft(d)).matmul(&crystal(d, m))
}

/// U_{−i, m} · INV.
pub fn exact_correction(d: usize, i: usize, m: usize) -> ComplexMatrix {
    weyl(d, (d - i) % d, m).matmul(&inversion(d))
}

#[derive(Debug, Clone)]
pub struct OracleCase {
    pub d: usize,
    pub input: Vec<Complex64>,
    pub variant: NoiseVariant,
    pub p: f64,
    pub targets: NoiseTargets,
    pub mode: ProductMode,
}

#[derive(Debug, Clone)]
pub struct OracleResult {
    /// Ordered by (i, m), i major.
    pub probabilities: Vec<f64>,
    pub fidelities: Vec<f64>,
    pub average_fidelity: f64,
}

/// Kraus operators on (A1, A2).
fn pair_kraus(case: &OracleCase) -> Vec<ComplexMatrix> {
    let d = case.d;
    let single = kraus(d, case.variant, case.p);
    let id = ComplexMatrix::identity(d);
    match (case.targets, case.mode) {
        (NoiseTargets::A1, _) => single.iter().map(|k| kron(k, &id)).collect(),
        (NoiseTargets::A2, _) => single.iter().map(|k| kron(&id, k)).collect(),
        (NoiseTargets::Both, ProductMode::Independent) => single
            .iter()
            .flat_map(|a| single.iter().map(move |b| kron(a, b)))
            .collect(),
        (NoiseTargets::Both, ProductMode::Correlated) => single
            .iter()
            .filter_map(|k| {
                let w = k.dagger().matmul(k).trace().re / d as f64;
                (w > 0.0).then(|| kron(k, k).scale(real(1.0 / w.sqrt())))
            })
            .collect(),
    }
}

pub fn run(case: &OracleCase) -> OracleResult {
    let d = case.d;
    let norm: f64 = case.input.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let phi = ComplexVector::new(case.input.iter().map(|z| z / norm).collect());
    let mut bell = ComplexVector::zeros(d * d);
    for k in 0..d {
        bell.amplitudes_mut()[k * d + k] = real(1.0 / (d as f64).sqrt());
    }
    let psi = phi.kron(&bell);
    let rho = psi.outer();

    let id = ComplexMatrix::identity(d);
    let mut noisy = ComplexMatrix::zeros(d * d * d, d * d * d);
    for c in pair_kraus(case) {
        let full = kron(&c, &id);
        noisy = noisy.add(&full.matmul(&rho).matmul(&full.dagger()));
    }

    let target = DensityOperator::from_pure(&phi).unwrap();
    let mut probabilities = Vec::new();
    let mut fidelities = Vec::new();
    let mut average = 0.0;
    for i in 0..d {
        for m in 0..d {
            let mm = kron(&measurement(d, i, m), &id);
            let pi = kron(&measurement(d, i, m).dagger().matmul(&measurement(d, i, m)), &id);
            let p = pi.matmul(&noisy).trace().re;
            probabilities.push(p);
            if p <= 1e-14 {
                fidelities.push(f64::NAN);
                continue;
            }
            let rho_cb = mm.matmul(&noisy).matmul(&mm.dagger()).scale(real(1.0 / p));
            let rho_b = partial_trace(&DensityOperator::new(rho_cb).unwrap(), &[d, d], &[1]).unwrap();
            let v = exact_correction(d, i, m);
            let corrected = DensityOperator::new(v.matmul(rho_b.matrix()).matmul(&v.dagger())).unwrap();
            let f = fidelity(&target, &corrected).unwrap();
            fidelities.push(f);
            average += p * f;
        }
    }
    OracleResult {
        probabilities,
        fidelities,
        average_fidelity: average,
    }
}

/// √(1 − (d−1)p/d): phase noise on Alice's half of the pair, uniform input.
pub fn phase_on_pair_closed_form(d: usize, p: f64) -> f64 {
    (1.0 - (d - 1) as f64 * p / d as f64).sqrt()
}

/// √((1−p)² + (1 − (1−p)²)/d): Weyl noise on both of Alice's qudits, uniform
/// input.
pub fn weyl_both_closed_form(d: usize, p: f64) -> f64 {
    let keep = (1.0 - p) * (1.0 - p);
    (keep + (1.0 - keep) / d as f64).sqrt()
}

pub fn uniform(d: usize) -> Vec<Complex64> {
    vec![real(1.0 / (d as f64).sqrt()); d]
}

/// Seeded input without the library's sampler.
pub fn scrambled(d: usize, seed: u64) -> Vec<Complex64> {
    let mut x = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut next = || {
        x ^= x >> 33;
        x = x.wrapping_mul(0xff51afd7ed558ccd);
        x ^= x >> 33;
        (x >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    (0..d).map(|_| Complex64::new(next(), next())).collect()
}
