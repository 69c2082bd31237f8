//! Ensembles of quantum states with prior probabilities, Holevo
//! quantities, reductions and entropy bookkeeping.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmat::{von_neumann_entropy, xlog2x, CMatrix, CVector, DensityMatrix};

/// Probabilities below this are dropped (with renormalization) before any
/// entropy bookkeeping.
pub const PROB_FLOOR: f64 = 1e-12;
const PROB_SUM_TOL: f64 = 1e-10;

/// The two parties of a bipartite ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Party {
    A,
    B,
}

impl Party {
    pub fn other(self) -> Party {
        match self {
            Party::A => Party::B,
            Party::B => Party::A,
        }
    }

    /// Subsystem index in a bipartite dims list.
    pub fn index(self) -> usize {
        match self {
            Party::A => 0,
            Party::B => 1,
        }
    }
}

impl std::fmt::Display for Party {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Party::A => write!(f, "A"),
            Party::B => write!(f, "B"),
        }
    }
}

/// One weighted member of an ensemble.
#[derive(Debug, Clone)]
pub struct EnsembleItem {
    prob: f64,
    state: DensityMatrix,
    label: String,
    vector: Option<CVector>,
}

impl EnsembleItem {
    pub fn prob(&self) -> f64 {
        self.prob
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// The state vector, when the item was supplied as a pure state.
    pub fn vector(&self) -> Option<&CVector> {
        self.vector.as_ref()
    }

    pub fn is_pure_flagged(&self) -> bool {
        self.vector.is_some()
    }
}

/// Probability-weighted list of density matrices on shared subsystem dims.
#[derive(Debug, Clone)]
pub struct Ensemble {
    items: Vec<EnsembleItem>,
    dims: Vec<usize>,
}

impl Ensemble {
    /// Build from (probability, state) pairs; labels default to indices.
    pub fn new(weighted: Vec<(f64, DensityMatrix)>) -> Result<Self> {
        let labeled = weighted
            .into_iter()
            .enumerate()
            .map(|(i, (p, s))| (p, s, i.to_string()))
            .collect();
        Self::with_labels(labeled)
    }

    pub fn with_labels(weighted: Vec<(f64, DensityMatrix, String)>) -> Result<Self> {
        let items = weighted
            .into_iter()
            .map(|(prob, state, label)| EnsembleItem {
                prob,
                state,
                label,
                vector: None,
            })
            .collect();
        Self::from_items(items)
    }

    /// Build from pure states given as normalized vectors.
    pub fn from_pure_states(
        weighted: Vec<(f64, CVector, String)>,
        dims: &[usize],
    ) -> Result<Self> {
        let mut items = Vec::with_capacity(weighted.len());
        for (prob, psi, label) in weighted {
            let state = DensityMatrix::from_pure(&psi, dims)?;
            items.push(EnsembleItem {
                prob,
                state,
                label,
                vector: Some(psi.normalized()),
            });
        }
        Self::from_items(items)
    }

    /// Equal priors over pure states, labeled by index.
    pub fn uniform_pure(vectors: Vec<CVector>, dims: &[usize]) -> Result<Self> {
        let n = vectors.len();
        if n == 0 {
            return Err(Error::InvalidInput("empty ensemble".into()));
        }
        let p = 1.0 / n as f64;
        Self::from_pure_states(
            vectors
                .into_iter()
                .enumerate()
                .map(|(i, v)| (p, v, i.to_string()))
                .collect(),
            dims,
        )
    }

    fn from_items(mut items: Vec<EnsembleItem>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::InvalidInput("empty ensemble".into()));
        }
        let dims = items[0].state.dims().to_vec();
        for item in &items {
            if item.state.dims() != dims.as_slice() {
                return Err(Error::DimensionMismatch(format!(
                    "ensemble state \"{}\" has dims {:?}, expected {:?}",
                    item.label,
                    item.state.dims(),
                    dims
                )));
            }
            if item.prob < -PROB_FLOOR {
                return Err(Error::InvalidDistribution(format!(
                    "negative probability {} for state \"{}\"",
                    item.prob, item.label
                )));
            }
        }
        let total: f64 = items.iter().map(|i| i.prob).sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {}, expected 1",
                total
            )));
        }
        items.retain(|i| i.prob >= PROB_FLOOR);
        if items.is_empty() {
            return Err(Error::InvalidDistribution(
                "all probabilities below the floor".into(),
            ));
        }
        let kept: f64 = items.iter().map(|i| i.prob).sum();
        for item in &mut items {
            item.prob /= kept;
        }
        let mut labels: Vec<&str> = items.iter().map(|i| i.label.as_str()).collect();
        labels.sort_unstable();
        labels.dedup();
        if labels.len() != items.len() {
            return Err(Error::InvalidInput("duplicate state labels".into()));
        }
        Ok(Self { items, dims })
    }

    pub fn items(&self) -> &[EnsembleItem] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Total Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn probs(&self) -> Vec<f64> {
        self.items.iter().map(|i| i.prob).collect()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.items.iter().map(|i| i.label.as_str()).collect()
    }

    pub fn is_bipartite(&self) -> bool {
        self.dims.len() == 2
    }

    fn require_bipartite(&self) -> Result<()> {
        if !self.is_bipartite() {
            return Err(Error::DimensionMismatch(format!(
                "operation requires a bipartite ensemble, got dims {:?}",
                self.dims
            )));
        }
        Ok(())
    }

    /// All states pure within tolerance.
    pub fn is_pure(&self, tol: f64) -> bool {
        self.items.iter().all(|i| i.state.is_pure(tol))
    }

    /// The ensemble average state.
    pub fn average_state(&self) -> DensityMatrix {
        let n = self.dim();
        let mut mat = CMatrix::zeros(n, n);
        for item in &self.items {
            mat = mat.add(&item.state.mat().scale(Complex::new(item.prob, 0.0)));
        }
        DensityMatrix::from_parts_unchecked(mat, &self.dims)
    }

    /// Holevo quantity chi = S(avg) - sum_x p_x S(rho_x), in bits.
    pub fn holevo_chi(&self) -> Result<f64> {
        let mut chi = von_neumann_entropy(&self.average_state())?;
        for item in &self.items {
            chi -= item.prob * von_neumann_entropy(&item.state)?;
        }
        Ok(chi)
    }

    /// Same priors and labels, states reduced to one party.
    pub fn reduced(&self, party: Party) -> Result<Ensemble> {
        self.require_bipartite()?;
        let keep = [party.index()];
        let items = self
            .items
            .iter()
            .map(|i| -> Result<EnsembleItem> {
                Ok(EnsembleItem {
                    prob: i.prob,
                    state: i.state.partial_trace(&keep)?,
                    label: i.label.clone(),
                    vector: None,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Ensemble {
            items,
            dims: vec![self.dims[party.index()]],
        })
    }

    /// Average reduced-state entropy sum_x p_x S(rho_Z^x), in bits.
    pub fn average_reduced_entropy(&self, party: Party) -> Result<f64> {
        self.require_bipartite()?;
        let keep = [party.index()];
        let mut total = 0.0;
        for item in &self.items {
            total += item.prob * von_neumann_entropy(&item.state.partial_trace(&keep)?)?;
        }
        Ok(total)
    }

    /// All entropic summaries used by the bound machinery.
    pub fn stats(&self) -> Result<EnsembleStats> {
        self.require_bipartite()?;
        let avg_state = self.average_state();
        let chi = self.holevo_chi()?;
        let s_a = von_neumann_entropy(&avg_state.partial_trace(&[0])?)?;
        let s_b = von_neumann_entropy(&avg_state.partial_trace(&[1])?)?;
        let sbar_a = self.average_reduced_entropy(Party::A)?;
        let sbar_b = self.average_reduced_entropy(Party::B)?;
        let h_source = shannon_entropy(&self.probs())?;
        Ok(EnsembleStats {
            avg_state,
            chi,
            s_a,
            s_b,
            sbar_a,
            sbar_b,
            h_source,
        })
    }

    /// Apply a per-state map, keeping priors and labels.
    pub fn map_states<F>(&self, mut f: F) -> Result<Ensemble>
    where
        F: FnMut(&DensityMatrix) -> Result<DensityMatrix>,
    {
        let items = self
            .items
            .iter()
            .map(|i| -> Result<EnsembleItem> {
                Ok(EnsembleItem {
                    prob: i.prob,
                    state: f(&i.state)?,
                    label: i.label.clone(),
                    vector: None,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let dims = items[0].state.dims().to_vec();
        Ok(Ensemble { items, dims })
    }

    /// Serialize to the ensemble wire format.
    pub fn to_json(&self) -> serde_json::Value {
        let states = self
            .items
            .iter()
            .map(|i| {
                let mut obj = serde_json::Map::new();
                obj.insert("prob".into(), serde_json::json!(i.prob));
                obj.insert("label".into(), serde_json::json!(i.label));
                if let Some(v) = &i.vector {
                    let entries: Vec<[f64; 2]> =
                        v.data().iter().map(|c| [c.re, c.im]).collect();
                    obj.insert("vector".into(), serde_json::json!(entries));
                } else {
                    obj.insert(
                        "matrix".into(),
                        serde_json::json!(i.state.mat().to_entries()),
                    );
                }
                serde_json::Value::Object(obj)
            })
            .collect::<Vec<_>>();
        serde_json::json!({ "dims": self.dims, "states": states })
    }

    /// Parse the ensemble wire format
    /// `{ "dims": [dA, dB], "states": [ { "prob", "label"?, "vector" | "matrix" } ] }`
    /// with complex numbers as `[re, im]` pairs.
    pub fn from_json(value: &serde_json::Value) -> Result<Ensemble> {
        let parsed: EnsembleJson = serde_json::from_value(value.clone())
            .map_err(|e| Error::MalformedJson(e.to_string()))?;
        let dims = parsed.dims;
        if dims.is_empty() || dims.iter().any(|&d| d == 0) {
            return Err(Error::MalformedJson(format!("invalid dims {:?}", dims)));
        }
        let mut items = Vec::with_capacity(parsed.states.len());
        for (idx, s) in parsed.states.into_iter().enumerate() {
            let label = s.label.unwrap_or_else(|| idx.to_string());
            let item = match (s.vector, s.matrix) {
                (Some(v), None) => {
                    let psi = CVector::new(
                        v.iter().map(|e| Complex::new(e[0], e[1])).collect(),
                    );
                    let state = DensityMatrix::from_pure(&psi, &dims).map_err(|e| {
                        Error::MalformedJson(format!("states[{}].vector: {}", idx, e))
                    })?;
                    EnsembleItem {
                        prob: s.prob,
                        state,
                        label,
                        vector: Some(psi.normalized()),
                    }
                }
                (None, Some(m)) => {
                    let mat = CMatrix::from_entries(&m)?;
                    let state = DensityMatrix::new(mat, &dims).map_err(|e| {
                        Error::MalformedJson(format!("states[{}].matrix: {}", idx, e))
                    })?;
                    EnsembleItem {
                        prob: s.prob,
                        state,
                        label,
                        vector: None,
                    }
                }
                _ => {
                    return Err(Error::MalformedJson(format!(
                        "states[{}]: exactly one of \"vector\" or \"matrix\" is required",
                        idx
                    )))
                }
            };
            items.push(item);
        }
        Self::from_items(items)
    }
}

#[derive(Serialize, Deserialize)]
struct EnsembleJson {
    dims: Vec<usize>,
    states: Vec<StateJson>,
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    prob: f64,
    #[serde(default)]
    label: Option<String>,
    #[serde(default)]
    vector: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    matrix: Option<Vec<Vec<[f64; 2]>>>,
}

/// Entropic summary of a bipartite ensemble.
#[derive(Debug, Clone)]
pub struct EnsembleStats {
    pub avg_state: DensityMatrix,
    /// Holevo quantity, bits.
    pub chi: f64,
    /// S of the reduced average state on A.
    pub s_a: f64,
    /// S of the reduced average state on B.
    pub s_b: f64,
    /// Average per-state reduced entropy on A.
    pub sbar_a: f64,
    /// Average per-state reduced entropy on B.
    pub sbar_b: f64,
    /// Shannon entropy of the priors.
    pub h_source: f64,
}

/// Shannon entropy of a probability vector, in bits.
pub fn shannon_entropy(p: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for &x in p {
        if x < -PROB_FLOOR {
            return Err(Error::InvalidDistribution(format!(
                "negative probability {}",
                x
            )));
        }
        total += x;
    }
    if (total - 1.0).abs() > PROB_SUM_TOL {
        return Err(Error::InvalidDistribution(format!(
            "probabilities sum to {}, expected 1",
            total
        )));
    }
    Ok(p.iter().map(|&x| -xlog2x(x.max(0.0))).sum::<f64>() + 0.0)
}

/// Binary entropy h(p), in bits.
pub fn binary_entropy(p: f64) -> f64 {
    -xlog2x(p.clamp(0.0, 1.0)) - xlog2x((1.0 - p).clamp(0.0, 1.0)) + 0.0
}

/// Mutual information of a joint probability table (rows: X, cols: Y),
/// in bits. The table must sum to 1.
pub fn classical_mutual_information(joint: &[Vec<f64>]) -> f64 {
    let rows = joint.len();
    let cols = if rows > 0 { joint[0].len() } else { 0 };
    let mut px = vec![0.0; rows];
    let mut py = vec![0.0; cols];
    for (i, row) in joint.iter().enumerate() {
        for (j, &p) in row.iter().enumerate() {
            px[i] += p;
            py[j] += p;
        }
    }
    let mut mi = 0.0;
    for (i, row) in joint.iter().enumerate() {
        for (j, &p) in row.iter().enumerate() {
            if p > 0.0 && px[i] > 0.0 && py[j] > 0.0 {
                mi += p * (p / (px[i] * py[j])).log2();
            }
        }
    }
    mi
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_density_matrix, random_state_vector, random_unitary};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bell_phi_plus() -> CVector {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        CVector::from_real(&[s, 0.0, 0.0, s])
    }

    fn bell_vectors() -> Vec<CVector> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        vec![
            CVector::from_real(&[s, 0.0, 0.0, s]),
            CVector::from_real(&[s, 0.0, 0.0, -s]),
            CVector::from_real(&[0.0, s, s, 0.0]),
            CVector::from_real(&[0.0, s, -s, 0.0]),
        ]
    }

    #[test]
    fn average_state_single_member() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rho = random_density_matrix(4, 2, &mut rng).with_dims(&[2, 2]).unwrap();
        let e = Ensemble::new(vec![(1.0, rho.clone())]).unwrap();
        assert!(e.average_state().mat().max_abs_diff(rho.mat()) < 1e-14);
    }

    #[test]
    fn average_state_bell_basis_is_maximally_mixed() {
        let e = Ensemble::uniform_pure(bell_vectors(), &[2, 2]).unwrap();
        let mixed = DensityMatrix::maximally_mixed(&[2, 2]);
        assert!(e.average_state().mat().max_abs_diff(mixed.mat()) < 1e-14);
    }

    #[test]
    fn average_state_diagonal_mixture() {
        let zero = DensityMatrix::from_pure(&CVector::basis_state(2, 0), &[2]).unwrap();
        let one = DensityMatrix::from_pure(&CVector::basis_state(2, 1), &[2]).unwrap();
        let e = Ensemble::new(vec![(0.25, zero), (0.75, one)]).unwrap();
        let expected = CMatrix::from_real_diagonal(&[0.25, 0.75]);
        assert!(e.average_state().mat().max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn chi_vanishes_for_single_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rho = random_density_matrix(3, 2, &mut rng);
        let e = Ensemble::new(vec![(1.0, rho)]).unwrap();
        assert!(e.holevo_chi().unwrap().abs() < 1e-10);
    }

    #[test]
    fn chi_of_classical_bit() {
        let e = Ensemble::uniform_pure(
            vec![CVector::basis_state(2, 0), CVector::basis_state(2, 1)],
            &[2],
        )
        .unwrap();
        assert!((e.holevo_chi().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn chi_of_bell_ensemble_is_two() {
        let e = Ensemble::uniform_pure(bell_vectors(), &[2, 2]).unwrap();
        assert!((e.holevo_chi().unwrap() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn reduction_of_bell_states_is_maximally_mixed() {
        let e = Ensemble::uniform_pure(bell_vectors(), &[2, 2]).unwrap();
        for party in [Party::A, Party::B] {
            let r = e.reduced(party).unwrap();
            for item in r.items() {
                let mixed = DensityMatrix::maximally_mixed(&[2]);
                assert!(item.state().mat().max_abs_diff(mixed.mat()) < 1e-12);
            }
        }
    }

    #[test]
    fn reduction_of_product_basis() {
        let mut vectors = Vec::new();
        for i in 0..2 {
            for j in 0..2 {
                vectors.push(CVector::basis_state(2, i).tensor(&CVector::basis_state(2, j)));
            }
        }
        let e = Ensemble::uniform_pure(vectors, &[2, 2]).unwrap();
        let r = e.reduced(Party::A).unwrap();
        for (k, item) in r.items().iter().enumerate() {
            let expected = CVector::basis_state(2, k / 2).outer();
            assert!(item.state().mat().max_abs_diff(&expected) < 1e-13);
        }
    }

    #[test]
    fn stats_of_bell_ensemble() {
        let e = Ensemble::uniform_pure(bell_vectors(), &[2, 2]).unwrap();
        let st = e.stats().unwrap();
        assert!((st.s_a - 1.0).abs() < 1e-10);
        assert!((st.s_b - 1.0).abs() < 1e-10);
        assert!((st.sbar_a - 1.0).abs() < 1e-10);
        assert!((st.sbar_b - 1.0).abs() < 1e-10);
        assert!((st.chi - 2.0).abs() < 1e-10);
        assert!((st.h_source - 2.0).abs() < 1e-12);
    }

    #[test]
    fn stats_of_product_basis() {
        let mut vectors = Vec::new();
        for i in 0..2 {
            for j in 0..2 {
                vectors.push(CVector::basis_state(2, i).tensor(&CVector::basis_state(2, j)));
            }
        }
        let e = Ensemble::uniform_pure(vectors, &[2, 2]).unwrap();
        let st = e.stats().unwrap();
        assert!(st.sbar_a.abs() < 1e-10);
        assert!(st.sbar_b.abs() < 1e-10);
        assert!((st.s_a - 1.0).abs() < 1e-10);
        assert!((st.s_b - 1.0).abs() < 1e-10);
    }

    #[test]
    fn copy_classical_saturates_holevo() {
        for d in [2usize, 3] {
            let vectors: Vec<CVector> = (0..d)
                .map(|i| CVector::basis_state(d, i).tensor(&CVector::basis_state(d, i)))
                .collect();
            let e = Ensemble::uniform_pure(vectors, &[d, d]).unwrap();
            let st = e.stats().unwrap();
            let logd = (d as f64).log2();
            assert!((st.chi - logd).abs() < 1e-10);
            assert!((st.h_source - logd).abs() < 1e-12);
        }
    }

    #[test]
    fn shannon_entropy_examples() {
        assert!(shannon_entropy(&[1.0, 0.0, 0.0]).unwrap().abs() < 1e-15);
        assert!((shannon_entropy(&[0.25; 4]).unwrap() - 2.0).abs() < 1e-15);
        let expected = -(0.25f64 * 0.25f64.log2() + 0.75 * 0.75f64.log2());
        assert!((shannon_entropy(&[0.25, 0.75]).unwrap() - expected).abs() < 1e-15);
        assert!(matches!(
            shannon_entropy(&[0.5, 0.6]),
            Err(Error::InvalidDistribution(_))
        ));
    }

    #[test]
    fn chi_of_commuting_states_matches_classical_mi() {
        // diagonal states = rows of a classical conditional distribution
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let px = crate::random::random_probability_vector(3, &mut rng);
        let cond: Vec<Vec<f64>> = (0..3)
            .map(|_| crate::random::random_probability_vector(4, &mut rng))
            .collect();
        let states: Vec<DensityMatrix> = cond
            .iter()
            .map(|row| DensityMatrix::new(CMatrix::from_real_diagonal(row), &[4]).unwrap())
            .collect();
        let e = Ensemble::new(px.iter().copied().zip(states).collect()).unwrap();
        let joint: Vec<Vec<f64>> = px
            .iter()
            .zip(cond.iter())
            .map(|(&p, row)| row.iter().map(|&q| p * q).collect())
            .collect();
        let mi = classical_mutual_information(&joint);
        assert!((e.holevo_chi().unwrap() - mi).abs() < 1e-9);
    }

    #[test]
    fn ensemble_json_round_trip() {
        let e = Ensemble::uniform_pure(bell_vectors(), &[2, 2]).unwrap();
        let json = e.to_json();
        let back = Ensemble::from_json(&json).unwrap();
        assert_eq!(back.len(), 4);
        for (a, b) in e.items().iter().zip(back.items()) {
            assert!((a.prob() - b.prob()).abs() < 1e-15);
            assert!(a.state().mat().max_abs_diff(b.state().mat()) < 1e-12);
        }
        // matrix form round-trips too
        let mixed = Ensemble::new(vec![(1.0, DensityMatrix::maximally_mixed(&[2, 2]))]).unwrap();
        let back = Ensemble::from_json(&mixed.to_json()).unwrap();
        assert!(back.items()[0]
            .state()
            .mat()
            .max_abs_diff(mixed.items()[0].state().mat())
            < 1e-15);
    }

    #[test]
    fn ensemble_json_rejects_ambiguous_state() {
        let bad = serde_json::json!({
            "dims": [2],
            "states": [ { "prob": 1.0 } ]
        });
        let err = Ensemble::from_json(&bad).unwrap_err();
        assert!(err.to_string().contains("states[0]"));
    }

    #[test]
    fn tiny_probabilities_are_dropped() {
        let zero = DensityMatrix::from_pure(&CVector::basis_state(2, 0), &[2]).unwrap();
        let one = DensityMatrix::from_pure(&CVector::basis_state(2, 1), &[2]).unwrap();
        let e = Ensemble::new(vec![(1.0 - 1e-13, zero), (1e-13, one)]).unwrap();
        assert_eq!(e.len(), 1);
        assert!((e.probs()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_bell_state_has_unit_reduced_entropy() {
        let rho = DensityMatrix::from_pure(&bell_phi_plus(), &[2, 2]).unwrap();
        let e = Ensemble::new(vec![(1.0, rho)]).unwrap();
        assert!((e.average_reduced_entropy(Party::A).unwrap() - 1.0).abs() < 1e-10);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn chi_bounded_by_average_entropy(seed in 0u64..1_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let k = 2 + (seed % 3) as usize;
            let states: Vec<(f64, DensityMatrix)> =
                crate::random::random_probability_vector(k, &mut rng)
                    .into_iter()
                    .map(|p| (p, random_density_matrix(4, 2, &mut rng)))
                    .collect();
            let e = Ensemble::new(states).unwrap();
            let chi = e.holevo_chi().unwrap();
            let s_avg = von_neumann_entropy(&e.average_state()).unwrap();
            prop_assert!(chi <= s_avg + 1e-9);
            prop_assert!(chi >= -1e-9);
        }

        #[test]
        fn data_processing_under_partial_trace(seed in 0u64..1_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let vectors: Vec<CVector> = (0..3).map(|_| random_state_vector(4, &mut rng)).collect();
            let probs = crate::random::random_probability_vector(3, &mut rng);
            let e = Ensemble::from_pure_states(
                probs.into_iter().zip(vectors).enumerate()
                    .map(|(i, (p, v))| (p, v, i.to_string())).collect(),
                &[2, 2],
            ).unwrap();
            let chi = e.holevo_chi().unwrap();
            for party in [Party::A, Party::B] {
                let chi_reduced = e.reduced(party).unwrap().holevo_chi().unwrap();
                prop_assert!(chi_reduced <= chi + 1e-9);
            }
        }

        #[test]
        fn sbar_invariant_under_local_unitaries(seed in 0u64..1_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let vectors: Vec<CVector> = (0..3).map(|_| random_state_vector(4, &mut rng)).collect();
            let e = Ensemble::uniform_pure(vectors, &[2, 2]).unwrap();
            let st = e.stats().unwrap();
            let u = random_unitary(2, &mut rng).tensor(&random_unitary(2, &mut rng));
            let rotated = e.map_states(|rho| {
                Ok(DensityMatrix::from_parts_unchecked(
                    u.matmul(rho.mat()).matmul(&u.adjoint()),
                    rho.dims(),
                ))
            }).unwrap();
            let st2 = rotated.stats().unwrap();
            prop_assert!((st.sbar_a - st2.sbar_a).abs() < 1e-8);
            prop_assert!((st.sbar_b - st2.sbar_b).abs() < 1e-8);
        }
    }
}
