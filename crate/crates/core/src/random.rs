//! Seeded random quantum objects for property suites and tests.
//!
//! All generators take an explicit RNG so that every randomized check in
//! the crate is reproducible from a single 64-bit seed. The verification
//! suites use ChaCha8 (a counter-based stream cipher RNG) seeded per
//! trial, which keeps results identical across platforms and thread
//! counts.

use num_complex::Complex;
use rand::Rng;

use crate::ensemble::Ensemble;
use crate::error::Result;
use crate::measure::{ActingParty, Instrument, ProtocolTree};
use crate::qmat::{hermitian_eig, CMatrix, CVector, Complex64, DensityMatrix};

/// Standard normal sample (Box-Muller).
pub fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn complex_gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    Complex::new(gaussian(rng), gaussian(rng))
}

/// Haar-random pure state in the given dimension.
pub fn random_state_vector<R: Rng>(dim: usize, rng: &mut R) -> CVector {
    let v = CVector::new((0..dim).map(|_| complex_gaussian(rng)).collect());
    v.normalized()
}

/// Random Hermitian matrix with O(1) entries.
pub fn random_hermitian<R: Rng>(dim: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    g.add(&g.adjoint()).scale(Complex::new(0.5, 0.0))
}

/// Random probability vector (flat Dirichlet).
pub fn random_probability_vector<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..n)
        .map(|_| -rng.random::<f64>().max(1e-300).ln())
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

/// Random mixed state of the given rank (single subsystem of size `dim`).
pub fn random_density_matrix<R: Rng>(dim: usize, rank: usize, rng: &mut R) -> DensityMatrix {
    let rank = rank.clamp(1, dim);
    let weights = random_probability_vector(rank, rng);
    let mut mat = CMatrix::zeros(dim, dim);
    for &w in &weights {
        let psi = random_state_vector(dim, rng);
        mat = mat.add(&psi.outer().scale(Complex::new(w, 0.0)));
    }
    DensityMatrix::new(mat, &[dim]).expect("random state construction is valid")
}

/// Haar-ish random unitary via Gram-Schmidt on a Gaussian matrix.
pub fn random_unitary<R: Rng>(dim: usize, rng: &mut R) -> CMatrix {
    let mut columns: Vec<CVector> = Vec::with_capacity(dim);
    while columns.len() < dim {
        let mut v = CVector::new((0..dim).map(|_| complex_gaussian(rng)).collect());
        for u in &columns {
            let coeff = u.inner(&v);
            v = v.add(&u.scale(-coeff));
        }
        if v.norm() > 1e-8 {
            columns.push(v.normalized());
        }
    }
    CMatrix::from_fn(dim, dim, |i, j| columns[j].get(i))
}

/// Mutually orthogonal random pure states (columns of a random unitary).
pub fn random_orthogonal_vectors<R: Rng>(dim: usize, count: usize, rng: &mut R) -> Vec<CVector> {
    let u = random_unitary(dim, rng);
    (0..count.min(dim))
        .map(|k| CVector::new((0..dim).map(|i| u.get(i, k)).collect()))
        .collect()
}

/// Ensemble of random pure states with a flat-Dirichlet prior.
pub fn random_pure_ensemble<R: Rng>(dims: &[usize], count: usize, rng: &mut R) -> Ensemble {
    let total: usize = dims.iter().product();
    let probs = random_probability_vector(count, rng);
    Ensemble::from_pure_states(
        probs
            .into_iter()
            .enumerate()
            .map(|(i, p)| (p, random_state_vector(total, rng), i.to_string()))
            .collect(),
        dims,
    )
    .expect("random pure ensemble is valid")
}

/// Ensemble of random mixed states (rank up to `max_rank`).
pub fn random_mixed_ensemble<R: Rng>(
    dims: &[usize],
    count: usize,
    max_rank: usize,
    rng: &mut R,
) -> Ensemble {
    let total: usize = dims.iter().product();
    let probs = random_probability_vector(count, rng);
    let states = probs
        .into_iter()
        .map(|p| {
            let rank = 1 + rng.random_range(0..max_rank.max(1));
            let rho = random_density_matrix(total, rank, rng)
                .with_dims(dims)
                .expect("dims match");
            (p, rho)
        })
        .collect();
    Ensemble::new(states).expect("random mixed ensemble is valid")
}

/// Random projective instrument from a Haar-ish random basis.
pub fn random_projective_instrument<R: Rng>(
    dim: usize,
    acting: ActingParty,
    rng: &mut R,
) -> Instrument {
    let basis = random_orthogonal_vectors(dim, dim, rng);
    Instrument::projective(&basis, acting).expect("random basis is complete")
}

/// Random completely positive instrument: Gaussian Kraus candidates
/// normalized through S^{-1/2} with S their summed effect.
pub fn random_cp_instrument<R: Rng>(
    dim: usize,
    outcomes: usize,
    acting: ActingParty,
    rng: &mut R,
) -> Result<Instrument> {
    let candidates: Vec<CMatrix> = (0..outcomes.max(1))
        .map(|_| CMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng)))
        .collect();
    let mut total = CMatrix::zeros(dim, dim);
    for g in &candidates {
        total = total.add(&g.adjoint().matmul(g));
    }
    let spec = hermitian_eig(&total.hermitized())?;
    let inv_sqrt = spec.apply(|x| 1.0 / x.max(1e-12).sqrt());
    let kraus = candidates.iter().map(|g| g.matmul(&inv_sqrt)).collect();
    Instrument::new(kraus, acting)
}

/// Random ensemble, pure or mixed with equal chance.
pub fn random_ensemble_for_dims<R: Rng>(dims: &[usize], count: usize, rng: &mut R) -> Ensemble {
    if rng.random::<bool>() {
        random_pure_ensemble(dims, count, rng)
    } else {
        random_mixed_ensemble(dims, count, 2, rng)
    }
}

/// Random Bell-diagonal weights (flat Dirichlet over 4 outcomes).
pub fn random_bell_diagonal_weights<R: Rng>(rng: &mut R) -> [f64; 4] {
    let v = random_probability_vector(4, rng);
    [v[0], v[1], v[2], v[3]]
}

/// Random instrument, projective or general CP, on the chosen subsystem.
pub fn random_instrument<R: Rng>(dim: usize, acting: ActingParty, rng: &mut R) -> Instrument {
    if rng.random::<bool>() {
        random_projective_instrument(dim, acting, rng)
    } else {
        let outcomes = 2 + rng.random_range(0..3);
        random_cp_instrument(dim, outcomes, acting, rng).expect("random instrument is complete")
    }
}

/// Random strictly alternating two-level protocol tree on a d_a (x) d_b
/// ensemble.
pub fn random_two_level_tree<R: Rng>(d_a: usize, d_b: usize, rng: &mut R) -> ProtocolTree {
    use crate::ensemble::Party;
    let first = if rng.random::<bool>() { Party::A } else { Party::B };
    let (first_dim, second_dim) = match first {
        Party::A => (d_a, d_b),
        Party::B => (d_b, d_a),
    };
    let root = random_instrument(first_dim, first.into(), rng);
    let children = (0..root.outcomes())
        .map(|y| {
            let response = random_instrument(second_dim, first.other().into(), rng);
            (
                y,
                ProtocolTree::round(first.other(), response).expect("matching party"),
            )
        })
        .collect();
    ProtocolTree::node(first, root, children).expect("tree parties consistent")
}
