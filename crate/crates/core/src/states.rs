//! Constructors for the standard ensembles: Bell bases, generalized Bell
//! states in d (x) d, partially entangled quadruples and their tensor
//! powers, classical-copy ensembles, and conjugate detector states.
//!
//! Multi-qubit constructions order subsystems with all of Alice's qubits
//! first, then all of Bob's, so A:B partial traces stay contiguous.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::ensemble::Ensemble;
use crate::error::{Error, Result};
use crate::qmat::{permute_vector, CVector, DensityMatrix};

const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// The Bell basis in fixed order Phi+, Phi-, Psi+, Psi-.
pub fn bell_states() -> [CVector; 4] {
    [
        CVector::from_real(&[SQRT_HALF, 0.0, 0.0, SQRT_HALF]),
        CVector::from_real(&[SQRT_HALF, 0.0, 0.0, -SQRT_HALF]),
        CVector::from_real(&[0.0, SQRT_HALF, SQRT_HALF, 0.0]),
        CVector::from_real(&[0.0, SQRT_HALF, -SQRT_HALF, 0.0]),
    ]
}

/// Ensemble of the four Bell states (uniform priors unless given).
pub fn bell_ensemble(priors: Option<&[f64]>) -> Result<Ensemble> {
    let labels = ["phi+", "phi-", "psi+", "psi-"];
    let vectors = bell_states();
    let priors = match priors {
        Some(p) if p.len() == 4 => p.to_vec(),
        Some(p) => {
            return Err(Error::InvalidInput(format!(
                "bell4 expects 4 priors, got {}",
                p.len()
            )))
        }
        None => vec![0.25; 4],
    };
    Ensemble::from_pure_states(
        priors
            .into_iter()
            .zip(vectors)
            .zip(labels)
            .map(|((p, v), l)| (p, v, l.to_string()))
            .collect(),
        &[2, 2],
    )
}

/// Canonical maximally entangled state
/// |psi_nm> = (1/sqrt d) sum_k exp(2 pi i k n / d) |k>|k+m mod d>.
pub fn canonical_max_entangled(d: usize, n: usize, m: usize) -> Result<CVector> {
    if d < 2 {
        return Err(Error::InvalidInput(format!("dimension {} too small", d)));
    }
    if n >= d || m >= d {
        return Err(Error::InvalidInput(format!(
            "indices (n={}, m={}) out of range for d={}",
            n, m, d
        )));
    }
    let mut v = CVector::zeros(d * d);
    let scale = 1.0 / (d as f64).sqrt();
    for k in 0..d {
        let phase = std::f64::consts::TAU * (k * n) as f64 / d as f64;
        v.set(k * d + (k + m) % d, Complex::from_polar(scale, phase));
    }
    Ok(v)
}

/// Ensemble of all d^2 canonical maximally entangled states.
pub fn canonical_ensemble(d: usize, priors: Option<&[f64]>) -> Result<Ensemble> {
    let count = d * d;
    let priors = match priors {
        Some(p) if p.len() == count => p.to_vec(),
        Some(p) => {
            return Err(Error::InvalidInput(format!(
                "canonical ensemble in {0}x{0} expects {1} priors, got {2}",
                d,
                count,
                p.len()
            )))
        }
        None => vec![1.0 / count as f64; count],
    };
    let mut weighted = Vec::with_capacity(count);
    for n in 0..d {
        for m in 0..d {
            weighted.push((
                priors[n * d + m],
                canonical_max_entangled(d, n, m)?,
                format!("{},{}", n, m),
            ));
        }
    }
    Ensemble::from_pure_states(weighted, &[d, d])
}

/// The four partially entangled orthonormal states
/// a1|00> + a2|11>, -a2|00> + a1|11>, a1|01> + a2|10>, -a2|01> + a1|10>
/// with a2 = sqrt(1 - a1^2).
pub fn partial4(a1: f64) -> Result<[CVector; 4]> {
    if !(0.0..=1.0).contains(&a1) {
        return Err(Error::InvalidInput(format!(
            "a1 must lie in [0, 1], got {}",
            a1
        )));
    }
    let a2 = (1.0 - a1 * a1).sqrt();
    Ok([
        CVector::from_real(&[a1, 0.0, 0.0, a2]),
        CVector::from_real(&[-a2, 0.0, 0.0, a1]),
        CVector::from_real(&[0.0, a1, a2, 0.0]),
        CVector::from_real(&[0.0, -a2, a1, 0.0]),
    ])
}

/// Equal-prior ensemble over the partially entangled quadruple.
pub fn partial4_ensemble(a1: f64) -> Result<Ensemble> {
    Ensemble::uniform_pure(partial4(a1)?.to_vec(), &[2, 2])
}

/// All n1-fold tensor products of the partially entangled quadruple, one
/// a1 parameter per pair, as an equal-prior ensemble in 2^n1 (x) 2^n1.
/// Qubits are reordered so Alice holds the first n1 factors.
pub fn tensor_power_ensemble(a1_list: &[f64]) -> Result<Ensemble> {
    let n1 = a1_list.len();
    if n1 == 0 {
        return Err(Error::InvalidInput("a1_list must not be empty".into()));
    }
    if n1 > 3 {
        return Err(Error::DimensionTooLarge(1 << (2 * n1), 64));
    }
    let families: Vec<[CVector; 4]> = a1_list
        .iter()
        .map(|&a1| partial4(a1))
        .collect::<Result<Vec<_>>>()?;

    // interleaved order A1 B1 A2 B2 ... -> block order A1 A2 ... B1 B2 ...
    let pair_dims = vec![2usize; 2 * n1];
    let mut perm = Vec::with_capacity(2 * n1);
    perm.extend((0..n1).map(|k| 2 * k));
    perm.extend((0..n1).map(|k| 2 * k + 1));

    let count = 4usize.pow(n1 as u32);
    let side = 1usize << n1;
    let mut weighted = Vec::with_capacity(count);
    for flat in 0..count {
        let mut digits = Vec::with_capacity(n1);
        let mut rest = flat;
        for _ in 0..n1 {
            digits.push(rest % 4);
            rest /= 4;
        }
        digits.reverse();
        let mut v = families[0][digits[0]].clone();
        for (k, &digit) in digits.iter().enumerate().skip(1) {
            v = v.tensor(&families[k][digit]);
        }
        let v = permute_vector(&v, &pair_dims, &perm)?;
        let label = digits
            .iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join(",");
        weighted.push((1.0 / count as f64, v, label));
    }
    Ensemble::from_pure_states(weighted, &[side, side])
}

/// Ensemble of the d classical-copy states |i>|i> with equal priors.
pub fn copy_classical(d: usize) -> Result<Ensemble> {
    if d < 2 {
        return Err(Error::InvalidInput(format!(
            "copy-classical ensemble needs d >= 2, got {}",
            d
        )));
    }
    let vectors: Vec<CVector> = (0..d)
        .map(|i| CVector::basis_state(d, i).tensor(&CVector::basis_state(d, i)))
        .collect();
    Ensemble::uniform_pure(vectors, &[d, d])
}

/// Equal-prior ensemble of the product basis |i>|j> in d (x) d.
pub fn product_basis_ensemble(d: usize) -> Result<Ensemble> {
    if d < 2 {
        return Err(Error::InvalidInput(format!(
            "product basis needs d >= 2, got {}",
            d
        )));
    }
    let mut weighted = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            weighted.push((
                1.0 / (d * d) as f64,
                CVector::basis_state(d, i).tensor(&CVector::basis_state(d, j)),
                format!("{},{}", i, j),
            ));
        }
    }
    Ensemble::from_pure_states(weighted, &[d, d])
}

/// Bell-diagonal state sum_i lambda_i |bell_i><bell_i| with the Bell
/// basis in the fixed order Phi+, Phi-, Psi+, Psi-.
pub fn bell_diagonal_state(lambdas: &[f64]) -> Result<DensityMatrix> {
    if lambdas.len() != 4 {
        return Err(Error::InvalidDistribution(format!(
            "Bell-diagonal weights need 4 entries, got {}",
            lambdas.len()
        )));
    }
    crate::ensemble::shannon_entropy(lambdas)?;
    let bells = bell_states();
    let mut mat = crate::qmat::CMatrix::zeros(4, 4);
    for (v, &l) in bells.iter().zip(lambdas) {
        mat = mat.add(&v.outer().scale(Complex::new(l, 0.0)));
    }
    DensityMatrix::new(mat, &[2, 2])
}

/// Entrywise-conjugated detector states, one per signal state and in the
/// same order. Requires a pure ensemble.
pub fn conjugate_detectors(e: &Ensemble) -> Result<Vec<DensityMatrix>> {
    for item in e.items() {
        if !item.state().is_pure(1e-9) {
            return Err(Error::InvalidInput(format!(
                "conjugate detectors need a pure ensemble; state \"{}\" is mixed",
                item.label()
            )));
        }
    }
    Ok(e.items().iter().map(|i| i.state().conjugate()).collect())
}

/// Declarative ensemble description, loadable from CLI config JSON:
/// `{ "family": "...", "params": { ... } }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum EnsembleSpec {
    Bell4 {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        priors: Option<Vec<f64>>,
    },
    CanonicalDxd {
        d: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        priors: Option<Vec<f64>>,
    },
    Partial4 {
        a1: f64,
    },
    TensorPower {
        a1_list: Vec<f64>,
    },
    CopyClassical {
        d: usize,
    },
    ProductBasis {
        d: usize,
    },
    Custom {
        ensemble: serde_json::Value,
    },
}

impl EnsembleSpec {
    pub fn build(&self) -> Result<Ensemble> {
        match self {
            EnsembleSpec::Bell4 { priors } => bell_ensemble(priors.as_deref()),
            EnsembleSpec::CanonicalDxd { d, priors } => canonical_ensemble(*d, priors.as_deref()),
            EnsembleSpec::Partial4 { a1 } => partial4_ensemble(*a1),
            EnsembleSpec::TensorPower { a1_list } => tensor_power_ensemble(a1_list),
            EnsembleSpec::CopyClassical { d } => copy_classical(*d),
            EnsembleSpec::ProductBasis { d } => product_basis_ensemble(*d),
            EnsembleSpec::Custom { ensemble } => Ensemble::from_json(ensemble),
        }
    }
}
