//! Entanglement measures: pure-state entropy of entanglement, Wootters
//! concurrence and entanglement of formation for two qubits, negativity,
//! and relative entropy of entanglement (REE).
//!
//! REE is computed by minimizing S(rho|sigma) over the PPT states via
//! projected gradient descent with Dykstra alternating projections onto
//! the PSD and PPT-PSD cones intersected with the unit-trace hyperplane.
//! PPT equals separability for 2x2 and 2x3 cuts, so the minimum is exact
//! there; for larger cuts it is a lower bound on REE and the report is
//! tagged accordingly.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::ensemble::{binary_entropy, Ensemble};
use crate::error::{Error, Result};
use crate::qmat::{
    hermitian_eig, partial_transpose, von_neumann_entropy, xlog2x, CMatrix, CVector,
    DensityMatrix, Spectrum, KERNEL_TOL, SUPPORT_TOL,
};

const LN_2: f64 = std::f64::consts::LN_2;

/// Which entanglement measure backs a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntanglementMeasure {
    PureEntropy,
    Eof2q,
    Negativity,
    Ree,
}

impl std::fmt::Display for EntanglementMeasure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            EntanglementMeasure::PureEntropy => "pure_entropy",
            EntanglementMeasure::Eof2q => "eof_2q",
            EntanglementMeasure::Negativity => "negativity",
            EntanglementMeasure::Ree => "ree",
        };
        write!(f, "{}", name)
    }
}

/// Entanglement entropy S(tr_Y |psi><psi|) of a pure state across the
/// bipartition whose X side is `left`.
pub fn pure_entanglement_entropy(psi: &CVector, dims: &[usize], left: &[usize]) -> Result<f64> {
    let rho = DensityMatrix::from_pure(psi, dims)?;
    let view = rho.bipartite_view(left)?;
    von_neumann_entropy(&view.partial_trace(&[0])?)
}

fn require_two_qubits(rho: &DensityMatrix) -> Result<()> {
    if rho.dims() != [2, 2] {
        return Err(Error::DimensionMismatch(format!(
            "two-qubit measure applied to dims {:?}",
            rho.dims()
        )));
    }
    Ok(())
}

/// Wootters concurrence of a two-qubit state.
pub fn concurrence_2q(rho: &DensityMatrix) -> Result<f64> {
    require_two_qubits(rho)?;
    let sy = CMatrix::new(
        vec![
            Complex::new(0.0, 0.0),
            Complex::new(0.0, -1.0),
            Complex::new(0.0, 1.0),
            Complex::new(0.0, 0.0),
        ],
        2,
        2,
    );
    let flip = sy.tensor(&sy);
    let rho_tilde = flip.matmul(&rho.mat().conj()).matmul(&flip);
    let sqrt_rho = rho.spectrum()?.apply(|x| x.max(0.0).sqrt());
    let r_squared = sqrt_rho.matmul(&rho_tilde).matmul(&sqrt_rho).hermitized();
    let spec = hermitian_eig(&r_squared)?;
    // eigenvalue noise of order 1e-16 would inflate to 1e-8 under the
    // square root, so noise-level values are zeroed first
    let mut lambdas: Vec<f64> = spec
        .eigenvalues()
        .iter()
        .map(|&x| if x > 1e-12 { x.sqrt() } else { 0.0 })
        .collect();
    lambdas.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

/// Entanglement of formation of a two-qubit state,
/// h((1 + sqrt(1 - C^2)) / 2) with C the concurrence.
pub fn eof_2q(rho: &DensityMatrix) -> Result<f64> {
    let c = concurrence_2q(rho)?;
    Ok(binary_entropy(0.5 * (1.0 + (1.0 - c * c).max(0.0).sqrt())))
}

/// Negativity (||rho^{T_Y}||_1 - 1) / 2 across the bipartition whose X
/// side is `left`.
pub fn negativity(rho: &DensityMatrix, left: &[usize]) -> Result<f64> {
    let view = rho.bipartite_view(left)?;
    let (d1, d2) = (view.dims()[0], view.dims()[1]);
    let pt = partial_transpose(view.mat(), d1, d2)?;
    let spec = hermitian_eig(&pt)?;
    let trace_norm: f64 = spec.eigenvalues().iter().map(|l| l.abs()).sum();
    Ok(((trace_norm - 1.0) / 2.0).max(0.0))
}

/// Closed-form REE of a Bell-diagonal state: 0 when max lambda <= 1/2,
/// else 1 - h(lambda_max).
pub fn ree_bell_diagonal(lambdas: &[f64]) -> Result<f64> {
    if lambdas.len() != 4 {
        return Err(Error::InvalidDistribution(format!(
            "Bell-diagonal weights need 4 entries, got {}",
            lambdas.len()
        )));
    }
    crate::ensemble::shannon_entropy(lambdas)?;
    let max = lambdas.iter().copied().fold(0.0, f64::max);
    if max <= 0.5 {
        Ok(0.0)
    } else {
        Ok(1.0 - binary_entropy(max))
    }
}

/// Options for the REE optimizer.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ReeOptions {
    /// Stop when the relative objective decrease falls below this.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for ReeOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 5000,
        }
    }
}

/// Whether the PPT set equals the separable set for the cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReeMethod {
    /// 2x2 or 2x3 cut: the PPT minimum is the exact REE.
    ReeExact,
    /// Larger cuts: the PPT minimum is a lower bound on REE.
    ReePptRelaxation,
}

impl std::fmt::Display for ReeMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ReeMethod::ReeExact => write!(f, "ree-exact"),
            ReeMethod::ReePptRelaxation => write!(f, "ree-ppt-relaxation"),
        }
    }
}

/// Result of an REE optimization.
#[derive(Debug, Clone, Serialize)]
pub struct ReeReport {
    /// min over PPT sigma of S(rho|sigma), bits.
    pub value: f64,
    pub method: ReeMethod,
    pub iterations: usize,
    pub converged: bool,
    /// Objective never increased across accepted iterations.
    pub monotone: bool,
    pub final_objective_change: f64,
    pub final_step_norm: f64,
}

struct ProjectedState {
    mat: CMatrix,
    spec: Spectrum,
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumulative = 0.0;
    let mut tau = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let candidate = (cumulative - 1.0) / (k + 1) as f64;
        if u - candidate > 0.0 {
            tau = candidate;
        }
    }
    v.iter().map(|&x| (x - tau).max(0.0)).collect()
}

/// Projection onto {sigma >= 0, tr sigma = 1}: project the spectrum onto
/// the simplex.
fn project_density(m: &CMatrix) -> Result<ProjectedState> {
    let spec = hermitian_eig(&m.hermitized())?;
    let clipped = project_simplex(spec.eigenvalues());
    let mat = {
        let n = m.rows();
        let v = spec.eigenvectors();
        let mut out = CMatrix::zeros(n, n);
        for (k, &l) in clipped.iter().enumerate() {
            if l == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = v.get(i, k);
                for j in 0..n {
                    let val = out.get(i, j) + vi * v.get(j, k).conj() * l;
                    out.set(i, j, val);
                }
            }
        }
        out
    };
    let spec = Spectrum::from_parts(clipped, spec.eigenvectors().clone());
    Ok(ProjectedState { mat, spec })
}

/// Projection onto {sigma : sigma^{T_B} >= 0, tr sigma = 1}.
fn project_ppt(m: &CMatrix, d1: usize, d2: usize) -> Result<CMatrix> {
    let pt = partial_transpose(m, d1, d2)?;
    let projected = project_density(&pt)?;
    partial_transpose(&projected.mat, d1, d2)
}

/// Fraction of the maximally mixed state blended into every iterate.
/// Keeps the iterate strictly inside both cones; without it the finite
/// Dykstra loop returns points a hair outside the PPT set, the objective
/// evaluates slightly below its feasible value, and the line search can
/// never accept small steps. Shifts the optimum by O(eps log eps).
const INTERIOR_BLEND: f64 = 1e-8;

/// Dykstra alternating projections onto the intersection of the density
/// set and the PPT set, followed by the fixed interior blend. Returns
/// the blended point and its residual PPT violation; callers must treat
/// a violation beyond what the blend absorbs as an unusable projection,
/// otherwise the objective is evaluated at infeasible points. Mixing
/// with I/n keeps the eigenvectors, so the blended spectrum is free.
fn dykstra_project(y: &CMatrix, d1: usize, d2: usize) -> Result<(ProjectedState, f64)> {
    let n = y.rows();
    let mut x = y.clone();
    let mut p = CMatrix::zeros(n, n);
    let mut q = CMatrix::zeros(n, n);
    let mut last = project_density(&x)?;
    for _ in 0..500 {
        let a = project_density(&x.add(&p))?;
        p = x.add(&p).sub(&a.mat);
        let b = project_ppt(&a.mat.add(&q), d1, d2)?;
        q = a.mat.add(&q).sub(&b);
        let increment = b.max_abs_diff(&x);
        let gap = a.mat.max_abs_diff(&b);
        x = b;
        last = a;
        if increment < 1e-12 && gap < 1e-11 {
            break;
        }
    }
    let nf = n as f64;
    let eps = INTERIOR_BLEND;
    let mat = last
        .mat
        .scale(Complex::new(1.0 - eps, 0.0))
        .add(&CMatrix::identity(n).scale(Complex::new(eps / nf, 0.0)));
    let eigenvalues: Vec<f64> = last
        .spec
        .eigenvalues()
        .iter()
        .map(|&l| (1.0 - eps) * l + eps / nf)
        .collect();
    let pt_spec = hermitian_eig(&partial_transpose(&mat, d1, d2)?)?;
    let violation = (-pt_spec
        .eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min))
    .max(0.0);
    Ok((
        ProjectedState {
            mat,
            spec: Spectrum::from_parts(eigenvalues, last.spec.eigenvectors().clone()),
        },
        violation,
    ))
}

/// A candidate state blended into the interior, with its residual PPT
/// violation (callers reject candidates the blend cannot absorb).
fn blended_state(mat: &CMatrix, d1: usize, d2: usize) -> Result<(ProjectedState, f64)> {
    let n = mat.rows();
    let nf = n as f64;
    let eps = INTERIOR_BLEND;
    let spec = hermitian_eig(&mat.hermitized())?;
    let blended = mat
        .hermitized()
        .scale(Complex::new(1.0 - eps, 0.0))
        .add(&CMatrix::identity(n).scale(Complex::new(eps / nf, 0.0)));
    let eigenvalues: Vec<f64> = spec
        .eigenvalues()
        .iter()
        .map(|&l| (1.0 - eps) * l.max(0.0) + eps / nf)
        .collect();
    let pt_spec = hermitian_eig(&partial_transpose(&blended, d1, d2)?)?;
    let violation = (-pt_spec
        .eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min))
    .max(0.0);
    Ok((
        ProjectedState {
            mat: blended,
            spec: Spectrum::from_parts(eigenvalues, spec.eigenvectors().clone()),
        },
        violation,
    ))
}

/// Objective S(rho|sigma) in bits from sigma's eigendecomposition;
/// infinite when rho leaks onto sigma's kernel.
fn objective_bits(rho: &CMatrix, rho_self_term: f64, spec: &Spectrum) -> f64 {
    let mut kernel = 0.0;
    let mut cross = 0.0;
    for (k, &mu) in spec.eigenvalues().iter().enumerate() {
        let w = spec.eigenvector(k);
        let overlap = w.inner(&rho.matvec(&w)).re.max(0.0);
        if mu <= KERNEL_TOL {
            kernel += overlap;
        } else {
            cross += overlap * mu.min(1.0).log2();
        }
    }
    if kernel > SUPPORT_TOL {
        f64::INFINITY
    } else {
        rho_self_term - cross
    }
}

/// Gradient of sigma -> -tr(rho log2 sigma) via the divided-difference
/// (Daleckii-Krein) formula in sigma's eigenbasis.
fn objective_gradient(rho: &CMatrix, spec: &Spectrum) -> CMatrix {
    let n = rho.rows();
    let v = spec.eigenvectors();
    let w = v.adjoint().matmul(rho).matmul(v);
    // eigenvalues are floored at the kernel tolerance: dividing noise-level
    // rho weights by anything smaller would flood the kernel block of the
    // gradient with junk that stalls the line search
    let lambdas: Vec<f64> = spec.eigenvalues().iter().map(|&l| l.max(KERNEL_TOL)).collect();
    let mut scaled = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let (li, lj) = (lambdas[i], lambdas[j]);
            let dd = if (li - lj).abs() < 1e-10 {
                2.0 / (li + lj)
            } else {
                (li.ln() - lj.ln()) / (li - lj)
            };
            // near-kernel scales are capped: below 1/dd = 1e-6 the
            // leftover objective error is a few 1e-5 bits at most, while
            // uncapped entries (1/lambda up to ~1e9 against noise-level
            // rho weights) dwarf the genuine components of the step
            // direction and stall the line search
            let dd = dd.min(1e6);
            scaled.set(i, j, w.get(i, j) * Complex::new(dd / LN_2, 0.0));
        }
    }
    v.matmul(&scaled).matmul(&v.adjoint()).scale(Complex::new(-1.0, 0.0))
}

/// Relative entropy of entanglement across the bipartition whose X side
/// is `left`, minimized over the PPT set.
pub fn ree(rho: &DensityMatrix, left: &[usize], opts: &ReeOptions) -> Result<ReeReport> {
    let view = rho.bipartite_view(left)?;
    let (d1, d2) = (view.dims()[0], view.dims()[1]);
    let n = d1 * d2;
    if n > 36 {
        return Err(Error::DimensionTooLarge(n, 36));
    }
    let method = if (d1 == 2 && d2 <= 3) || (d2 == 2 && d1 <= 3) {
        ReeMethod::ReeExact
    } else {
        ReeMethod::ReePptRelaxation
    };

    let rho_mat = view.mat().clone();
    let rho_self_term: f64 = view
        .spectrum()?
        .eigenvalues()
        .iter()
        .map(|&l| xlog2x(l.clamp(0.0, 1.0)))
        .sum();

    let mut sigma = project_density(&CMatrix::identity(n).scale(Complex::new(
        1.0 / n as f64,
        0.0,
    )))?;
    let mut f = objective_bits(&rho_mat, rho_self_term, &sigma.spec);
    let mut step: f64 = 0.25;
    let mut monotone = true;
    let mut iterations = 0;
    let mut converged = false;
    let mut last_change = f64::NAN;
    let mut last_step_norm = f64::NAN;

    // the stopping rule looks at progress over a short window; a single
    // backtracking hiccup must not end the run early
    let mut history: std::collections::VecDeque<f64> = std::collections::VecDeque::new();
    for iter in 0..opts.max_iter {
        iterations = iter + 1;
        let grad = objective_gradient(&rho_mat, &sigma.spec);
        let mut accepted: Option<(ProjectedState, f64)> = None;
        let mut t = (step * 4.0).min(64.0);
        while t > 1e-14 {
            let candidate_raw = sigma.mat.sub(&grad.scale(Complex::new(t, 0.0)));
            let (candidate, violation) = dykstra_project(&candidate_raw, d1, d2)?;
            // a projection the blend cannot make feasible is unusable
            if violation > 1e-12 {
                t *= 0.5;
                continue;
            }
            let f_new = objective_bits(&rho_mat, rho_self_term, &candidate.spec);
            // Armijo condition on the projected step
            let delta = candidate.mat.sub(&sigma.mat);
            let slope = grad.inner_hermitian(&delta);
            if slope < 0.0 && f_new <= f + 1e-4 * slope {
                accepted = Some((candidate, f_new));
                step = t;
                break;
            }
            t *= 0.5;
        }
        // complementary move along the segment toward rho itself; for
        // PPT targets this reaches the optimum in one jump, and near an
        // active PPT face it takes the bites the gradient step cannot
        let mut gamma = 1.0;
        while gamma > 1e-6 {
            let mixed = sigma
                .mat
                .scale(Complex::new(1.0 - gamma, 0.0))
                .add(&rho_mat.scale(Complex::new(gamma, 0.0)));
            let (candidate, violation) = blended_state(&mixed, d1, d2)?;
            if violation <= 1e-12 {
                let f_mix = objective_bits(&rho_mat, rho_self_term, &candidate.spec);
                if f_mix < accepted.as_ref().map_or(f, |(_, v)| *v) - 1e-15 {
                    accepted = Some((candidate, f_mix));
                    break;
                }
            }
            gamma *= 0.5;
        }

        let Some((candidate, f_new)) = accepted else {
            converged = true;
            break;
        };
        if f_new > f + 1e-12 {
            monotone = false;
        }
        last_change = f - f_new;
        last_step_norm = candidate.mat.max_abs_diff(&sigma.mat);
        sigma = candidate;
        f = f_new;
        history.push_back(f);
        if history.len() > 10 {
            history.pop_front();
        }
        if history.len() == 10 {
            let window_change = history.front().unwrap() - f;
            if window_change / f.abs().max(1e-12) < opts.tol || window_change < 1e-13 {
                converged = true;
                break;
            }
        }
    }

    Ok(ReeReport {
        value: f.max(0.0),
        method,
        iterations,
        converged,
        monotone,
        final_objective_change: last_change,
        final_step_norm: last_step_norm,
    })
}

/// Average entanglement sum_x p_x E(rho_x) of a bipartite ensemble under
/// the chosen measure.
pub fn average_entanglement(e: &Ensemble, measure: EntanglementMeasure) -> Result<f64> {
    if !e.is_bipartite() {
        return Err(Error::DimensionMismatch(format!(
            "average entanglement needs a bipartite ensemble, got dims {:?}",
            e.dims()
        )));
    }
    let mut total = 0.0;
    for item in e.items() {
        let value = match measure {
            EntanglementMeasure::PureEntropy => {
                if !item.state().is_pure(1e-9) {
                    return Err(Error::InvalidInput(format!(
                        "pure-state entropy requested but state \"{}\" is mixed",
                        item.label()
                    )));
                }
                von_neumann_entropy(&item.state().partial_trace(&[0])?)?
            }
            EntanglementMeasure::Eof2q => eof_2q(item.state())?,
            EntanglementMeasure::Negativity => negativity(item.state(), &[0])?,
            EntanglementMeasure::Ree => {
                ree(item.state(), &[0], &ReeOptions::default())?.value
            }
        };
        total += item.prob() * value;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_density_matrix, random_state_vector, random_unitary};
    use crate::states::{bell_diagonal_state, bell_states, partial4_ensemble, product_basis_ensemble};
    use proptest::prelude::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pure_entropy_examples() {
        let zero = CVector::basis_state(2, 0).tensor(&CVector::basis_state(2, 0));
        assert!(pure_entanglement_entropy(&zero, &[2, 2], &[0]).unwrap().abs() < 1e-12);

        let phi = bell_states()[0].clone();
        assert!((pure_entanglement_entropy(&phi, &[2, 2], &[0]).unwrap() - 1.0).abs() < 1e-10);

        let a1 = 0.9f64.sqrt();
        let a2 = (1.0 - 0.9f64).sqrt();
        let psi = CVector::from_real(&[a1, 0.0, 0.0, a2]);
        let expected = binary_entropy(0.9);
        assert!(
            (pure_entanglement_entropy(&psi, &[2, 2], &[0]).unwrap() - expected).abs() < 1e-10
        );

        let unnormalized = CVector::from_real(&[1.0, 0.0, 0.0, 1.0]);
        assert!(pure_entanglement_entropy(&unnormalized, &[2, 2], &[0]).is_err());
    }

    #[test]
    fn concurrence_examples() {
        let phi = DensityMatrix::from_pure(&bell_states()[0], &[2, 2]).unwrap();
        assert!((concurrence_2q(&phi).unwrap() - 1.0).abs() < 1e-10);

        let product = DensityMatrix::from_pure(
            &CVector::basis_state(2, 0).tensor(&CVector::basis_state(2, 1)),
            &[2, 2],
        )
        .unwrap();
        assert!(concurrence_2q(&product).unwrap().abs() < 1e-10);

        let a1 = 0.8f64;
        let a2 = (1.0 - a1 * a1).sqrt();
        let psi = CVector::from_real(&[a1, 0.0, 0.0, a2]);
        let rho = DensityMatrix::from_pure(&psi, &[2, 2]).unwrap();
        assert!((concurrence_2q(&rho).unwrap() - 2.0 * a1 * a2).abs() < 1e-10);
        // EoF from concurrence agrees with the reduced entropy
        let eof = eof_2q(&rho).unwrap();
        let entropy = pure_entanglement_entropy(&psi, &[2, 2], &[0]).unwrap();
        assert!((eof - entropy).abs() < 1e-8);
    }

    #[test]
    fn eof_examples() {
        let diag = DensityMatrix::new(
            CMatrix::from_real_diagonal(&[0.4, 0.1, 0.2, 0.3]),
            &[2, 2],
        )
        .unwrap();
        assert!(eof_2q(&diag).unwrap().abs() < 1e-10);

        let phi = DensityMatrix::from_pure(&bell_states()[0], &[2, 2]).unwrap();
        assert!((eof_2q(&phi).unwrap() - 1.0).abs() < 1e-10);

        // Werner mixture with concurrence 1/2
        let p = 2.0 / 3.0;
        let mixed = DensityMatrix::new(
            phi.mat()
                .scale(Complex::new(p, 0.0))
                .add(&CMatrix::identity(4).scale(Complex::new((1.0 - p) / 4.0, 0.0))),
            &[2, 2],
        )
        .unwrap();
        let c = concurrence_2q(&mixed).unwrap();
        assert!((c - 0.5).abs() < 1e-10);
        let expected = binary_entropy(0.5 * (1.0 + 0.75f64.sqrt()));
        assert!((eof_2q(&mixed).unwrap() - expected).abs() < 1e-10);
        assert!((expected - 0.3546).abs() < 1e-4);
    }

    #[test]
    fn negativity_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        // separable mixture of products
        let mut mat = CMatrix::zeros(4, 4);
        let weights = crate::random::random_probability_vector(4, &mut rng);
        for &w in &weights {
            let a = random_density_matrix(2, 2, &mut rng);
            let b = random_density_matrix(2, 2, &mut rng);
            mat = mat.add(&a.tensor(&b).mat().scale(Complex::new(w, 0.0)));
        }
        let separable = DensityMatrix::new(mat, &[2, 2]).unwrap();
        assert!(negativity(&separable, &[0]).unwrap() < 1e-9);

        let phi = DensityMatrix::from_pure(&bell_states()[0], &[2, 2]).unwrap();
        assert!((negativity(&phi, &[0]).unwrap() - 0.5).abs() < 1e-10);
    }

    #[test]
    fn ree_bell_diagonal_closed_form() {
        assert!((ree_bell_diagonal(&[1.0, 0.0, 0.0, 0.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!(ree_bell_diagonal(&[0.25; 4]).unwrap().abs() < 1e-12);
        let v = ree_bell_diagonal(&[0.75, 0.25, 0.0, 0.0]).unwrap();
        assert!((v - (1.0 - binary_entropy(0.75))).abs() < 1e-12);
        assert!((v - 0.18872).abs() < 1e-5);
        assert!(ree_bell_diagonal(&[0.7, 0.2, 0.2, -0.1]).is_err());
    }

    #[test]
    fn ree_of_separable_state_is_zero() {
        let rho = DensityMatrix::maximally_mixed(&[2, 2]);
        let report = ree(&rho, &[0], &ReeOptions::default()).unwrap();
        assert!(report.value < 1e-6, "value {}", report.value);
        assert!(report.converged);
        assert!(report.monotone);
    }

    #[test]
    fn ree_of_bell_state_is_one() {
        let phi = DensityMatrix::from_pure(&bell_states()[0], &[2, 2]).unwrap();
        let report = ree(&phi, &[0], &ReeOptions::default()).unwrap();
        assert!((report.value - 1.0).abs() < 1e-4, "value {}", report.value);
        assert_eq!(report.method, ReeMethod::ReeExact);
    }

    #[test]
    fn ree_matches_bell_diagonal_closed_form() {
        let lambdas = [0.75, 0.25, 0.0, 0.0];
        let rho = bell_diagonal_state(&lambdas).unwrap();
        let report = ree(&rho, &[0], &ReeOptions::default()).unwrap();
        let expected = ree_bell_diagonal(&lambdas).unwrap();
        assert!(
            (report.value - expected).abs() < 1e-4,
            "value {} expected {}",
            report.value,
            expected
        );
    }

    #[test]
    fn ree_of_pure_states_matches_entanglement_entropy() {
        for a1_sq in [0.6, 0.75, 0.9] {
            let a1 = (a1_sq as f64).sqrt();
            let a2 = (1.0 - a1_sq as f64).sqrt();
            let psi = CVector::from_real(&[a1, 0.0, 0.0, a2]);
            let rho = DensityMatrix::from_pure(&psi, &[2, 2]).unwrap();
            let report = ree(&rho, &[0], &ReeOptions::default()).unwrap();
            let expected = binary_entropy(a1_sq);
            assert!(
                (report.value - expected).abs() < 1e-6,
                "a1^2 {}: REE {} vs entropy {}",
                a1_sq,
                report.value,
                expected
            );
        }
    }

    #[test]
    fn ree_rejects_large_dimensions() {
        let rho = DensityMatrix::maximally_mixed(&[7, 7]);
        assert!(matches!(
            ree(&rho, &[0], &ReeOptions::default()),
            Err(Error::DimensionTooLarge(..))
        ));
    }

    #[test]
    fn average_entanglement_examples() {
        let product = product_basis_ensemble(2).unwrap();
        assert!(
            average_entanglement(&product, EntanglementMeasure::PureEntropy)
                .unwrap()
                .abs()
                < 1e-10
        );

        let bells = crate::states::bell_ensemble(None).unwrap();
        assert!(
            (average_entanglement(&bells, EntanglementMeasure::PureEntropy).unwrap() - 1.0)
                .abs()
                < 1e-10
        );

        let partial = partial4_ensemble(0.9f64.sqrt()).unwrap();
        let expected = binary_entropy(0.9);
        assert!(
            (average_entanglement(&partial, EntanglementMeasure::PureEntropy).unwrap()
                - expected)
                .abs()
                < 1e-9
        );
        // consistent with the two-qubit EoF route on pure states
        assert!(
            (average_entanglement(&partial, EntanglementMeasure::Eof2q).unwrap() - expected)
                .abs()
                < 1e-8
        );
    }

    #[test]
    fn average_entanglement_rejects_mixed_for_pure_entropy() {
        let e = Ensemble::new(vec![(1.0, DensityMatrix::maximally_mixed(&[2, 2]))]).unwrap();
        assert!(average_entanglement(&e, EntanglementMeasure::PureEntropy).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn eof_equals_reduced_entropy_on_pure_states(seed in 0u64..10_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let psi = random_state_vector(4, &mut rng);
            let rho = DensityMatrix::from_pure(&psi, &[2, 2]).unwrap();
            let eof = eof_2q(&rho).unwrap();
            let entropy = pure_entanglement_entropy(&psi, &[2, 2], &[0]).unwrap();
            prop_assert!((eof - entropy).abs() < 1e-8);
        }

        #[test]
        fn measures_invariant_under_local_unitaries(seed in 0u64..10_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rho = {
                let psi = random_state_vector(4, &mut rng);
                DensityMatrix::from_pure(&psi, &[2, 2]).unwrap()
            };
            let u = random_unitary(2, &mut rng).tensor(&random_unitary(2, &mut rng));
            let rotated = DensityMatrix::from_parts_unchecked(
                u.matmul(rho.mat()).matmul(&u.adjoint()),
                &[2, 2],
            );
            prop_assert!((concurrence_2q(&rho).unwrap() - concurrence_2q(&rotated).unwrap()).abs() < 1e-8);
            prop_assert!((negativity(&rho, &[0]).unwrap() - negativity(&rotated, &[0]).unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn ree_bounded_by_eof_and_consistent_with_ppt() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..5 {
            // random two-qubit mixture
            let k = 1 + rng.random_range(0..3);
            let rho = {
                let weights = crate::random::random_probability_vector(k, &mut rng);
                let mut mat = CMatrix::zeros(4, 4);
                for &w in &weights {
                    let psi = random_state_vector(4, &mut rng);
                    mat = mat.add(&psi.outer().scale(Complex::new(w, 0.0)));
                }
                DensityMatrix::new(mat, &[2, 2]).unwrap()
            };
            let report = ree(&rho, &[0], &ReeOptions::default()).unwrap();
            let eof = eof_2q(&rho).unwrap();
            assert!(
                report.value <= eof + 1e-4,
                "REE {} exceeds EoF {}",
                report.value,
                eof
            );
            let neg = negativity(&rho, &[0]).unwrap();
            if neg < 1e-10 {
                assert!(report.value < 1e-5);
            } else if neg > 1e-3 {
                assert!(report.value > 1e-6);
            }
            assert!(report.monotone);
        }
    }
}
