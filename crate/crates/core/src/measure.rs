//! Quantum instruments, posterior-ensemble updates, multi-round LOCC
//! protocol trees with chain-rule information accounting, and grid search
//! over restricted local measurement families.
//!
//! A protocol tree alternates (or repeats) parties; each node carries a
//! complete local instrument and a child per outcome. Running a tree on
//! an ensemble produces the joint distribution over (signal, outcome
//! path), per-level conditional information gains, and the cooperative
//! entropy bookkeeping g_A / g_B: at each node performed by one party,
//! the change in the *other* party's average reduced entropy is credited
//! to that other party's g.

use std::collections::BTreeMap;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::ensemble::{classical_mutual_information, Ensemble, Party, PROB_FLOOR};
use crate::error::{Error, Result};
use crate::qmat::{von_neumann_entropy, CMatrix, CVector, DensityMatrix};

/// Completeness tolerance for sum_y V_y† V_y = I.
pub const COMPLETENESS_TOL: f64 = 1e-9;

/// Which subsystem an instrument acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActingParty {
    A,
    B,
    Global,
}

impl From<Party> for ActingParty {
    fn from(p: Party) -> Self {
        match p {
            Party::A => ActingParty::A,
            Party::B => ActingParty::B,
        }
    }
}

impl std::fmt::Display for ActingParty {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ActingParty::A => write!(f, "A"),
            ActingParty::B => write!(f, "B"),
            ActingParty::Global => write!(f, "global"),
        }
    }
}

/// A measurement given by Kraus operators {V_y} with sum V_y† V_y = I.
/// Local instruments are embedded as V (x) I or I (x) V when applied to a
/// bipartite ensemble.
#[derive(Debug, Clone)]
pub struct Instrument {
    kraus: Vec<CMatrix>,
    acting: ActingParty,
}

impl Instrument {
    pub fn new(kraus: Vec<CMatrix>, acting: ActingParty) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::InvalidInput("instrument has no Kraus operators".into()));
        }
        let dim = kraus[0].rows();
        for v in &kraus {
            if !v.is_square() || v.rows() != dim {
                return Err(Error::DimensionMismatch(
                    "all Kraus operators must be square with equal dimension".into(),
                ));
            }
        }
        let mut total = CMatrix::zeros(dim, dim);
        for v in &kraus {
            total = total.add(&v.adjoint().matmul(v));
        }
        let deviation = total.max_abs_diff(&CMatrix::identity(dim));
        if deviation > COMPLETENESS_TOL {
            return Err(Error::IncompleteInstrument(deviation));
        }
        Ok(Self { kraus, acting })
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn acting(&self) -> ActingParty {
        self.acting
    }

    /// Dimension the Kraus operators act on.
    pub fn local_dim(&self) -> usize {
        self.kraus[0].rows()
    }

    pub fn outcomes(&self) -> usize {
        self.kraus.len()
    }

    /// Single-Kraus identity instrument.
    pub fn identity(dim: usize, acting: ActingParty) -> Self {
        Self {
            kraus: vec![CMatrix::identity(dim)],
            acting,
        }
    }

    /// Projective measurement onto an orthonormal basis.
    pub fn projective(basis: &[CVector], acting: ActingParty) -> Result<Self> {
        let kraus = basis.iter().map(|v| v.outer()).collect();
        Self::new(kraus, acting)
    }

    /// Projective measurement in the computational basis.
    pub fn computational(dim: usize, acting: ActingParty) -> Self {
        let basis: Vec<CVector> = (0..dim).map(|i| CVector::basis_state(dim, i)).collect();
        Self::projective(&basis, acting).expect("computational basis is complete")
    }

    /// Kraus operators embedded into the full ensemble space.
    fn embedded(&self, dims: &[usize]) -> Result<Vec<CMatrix>> {
        let total: usize = dims.iter().product();
        match self.acting {
            ActingParty::Global => {
                if self.local_dim() != total {
                    return Err(Error::DimensionMismatch(format!(
                        "global instrument acts on dim {} but ensemble dim is {}",
                        self.local_dim(),
                        total
                    )));
                }
                Ok(self.kraus.clone())
            }
            ActingParty::A | ActingParty::B => {
                if dims.len() != 2 {
                    return Err(Error::DimensionMismatch(format!(
                        "local instrument needs a bipartite ensemble, got dims {:?}",
                        dims
                    )));
                }
                let (da, db) = (dims[0], dims[1]);
                let own = if self.acting == ActingParty::A { da } else { db };
                if self.local_dim() != own {
                    return Err(Error::DimensionMismatch(format!(
                        "instrument on {} acts on dim {} but that subsystem has dim {}",
                        self.acting,
                        self.local_dim(),
                        own
                    )));
                }
                Ok(self
                    .kraus
                    .iter()
                    .map(|v| match self.acting {
                        ActingParty::A => v.tensor(&CMatrix::identity(db)),
                        _ => CMatrix::identity(da).tensor(v),
                    })
                    .collect())
            }
        }
    }
}

/// Outcome of applying an instrument: probability and posterior ensemble.
pub type PosteriorBranch = (f64, Ensemble);

/// Apply an instrument to an ensemble, returning each outcome with its
/// probability and Bayes-updated posterior ensemble. Outcomes with
/// probability below the floor are dropped (with renormalization).
pub fn apply_instrument(e: &Ensemble, m: &Instrument) -> Result<Vec<PosteriorBranch>> {
    let ops = m.embedded(e.dims())?;
    let mut branches = Vec::with_capacity(ops.len());
    for v in &ops {
        let vd = v.adjoint();
        let effect = vd.matmul(v);
        // p_{y|x} = tr(V rho_x V†) = <rho_x, V†V>
        let likelihoods: Vec<f64> = e
            .items()
            .iter()
            .map(|item| item.state().mat().inner_hermitian(&effect).max(0.0))
            .collect();
        let p_y: f64 = e
            .items()
            .iter()
            .zip(&likelihoods)
            .map(|(item, &l)| item.prob() * l)
            .sum();
        if p_y < PROB_FLOOR {
            continue;
        }
        let mut posterior = Vec::new();
        for (item, &l) in e.items().iter().zip(&likelihoods) {
            let weight = item.prob() * l / p_y;
            if weight < PROB_FLOOR {
                continue;
            }
            let updated = v
                .matmul(item.state().mat())
                .matmul(&vd)
                .scale(Complex::new(1.0 / l, 0.0));
            posterior.push((
                weight,
                DensityMatrix::from_parts_unchecked(updated, e.dims()),
                item.label().to_string(),
            ));
        }
        branches.push((p_y, Ensemble::with_labels(posterior)?));
    }
    if branches.is_empty() {
        return Err(Error::InvalidInput(
            "all instrument outcomes have vanishing probability".into(),
        ));
    }
    let total: f64 = branches.iter().map(|(p, _)| *p).sum();
    for (p, _) in &mut branches {
        *p /= total;
    }
    Ok(branches)
}

/// Classical information extracted by one measurement together with the
/// Holevo-difference bound on it: returns
/// (I(X:Y), chi before - average chi after).
pub fn step_info_gain(e: &Ensemble, m: &Instrument) -> Result<(f64, f64)> {
    let branches = apply_instrument(e, m)?;
    let info = branch_mutual_information(e, &branches);
    let mut rhs = e.holevo_chi()?;
    for (p_y, posterior) in &branches {
        rhs -= p_y * posterior.holevo_chi()?;
    }
    Ok((info, rhs))
}

/// I(X:Y) of the classical joint induced by the measurement branches.
fn branch_mutual_information(e: &Ensemble, branches: &[PosteriorBranch]) -> f64 {
    let labels = e.labels();
    let mut joint = vec![vec![0.0; branches.len()]; labels.len()];
    for (y, (p_y, posterior)) in branches.iter().enumerate() {
        for item in posterior.items() {
            if let Some(row) = labels.iter().position(|&l| l == item.label()) {
                joint[row][y] = p_y * item.prob();
            }
        }
    }
    classical_mutual_information(&joint)
}

/// Quantum mutual information I_M = S_X + S_Y - S_XY across a bipartition
/// given by the subsystem indices on the X side.
pub fn quantum_mutual_information(rho: &DensityMatrix, left: &[usize]) -> Result<f64> {
    let view = rho.bipartite_view(left)?;
    let s_x = von_neumann_entropy(&view.partial_trace(&[0])?)?;
    let s_y = von_neumann_entropy(&view.partial_trace(&[1])?)?;
    let s_xy = von_neumann_entropy(&view)?;
    Ok(s_x + s_y - s_xy)
}

/// Classical-quantum state sum_x p_x |x><x| (x) rho_x with dims
/// [#states, state dim].
pub fn cq_state(e: &Ensemble) -> DensityMatrix {
    let k = e.len();
    let d = e.dim();
    let mut mat = CMatrix::zeros(k * d, k * d);
    for (x, item) in e.items().iter().enumerate() {
        for i in 0..d {
            for j in 0..d {
                mat.set(
                    x * d + i,
                    x * d + j,
                    item.state().mat().get(i, j) * Complex::new(item.prob(), 0.0),
                );
            }
        }
    }
    DensityMatrix::from_parts_unchecked(mat, &[k, d])
}

/// One round of an LOCC protocol: a local instrument and a continuation
/// per outcome. Outcomes without a child terminate the protocol on that
/// branch.
#[derive(Debug, Clone)]
pub struct ProtocolTree {
    party: Party,
    instrument: Instrument,
    children: BTreeMap<usize, ProtocolTree>,
}

impl ProtocolTree {
    pub fn node(
        party: Party,
        instrument: Instrument,
        children: BTreeMap<usize, ProtocolTree>,
    ) -> Result<Self> {
        if instrument.acting() != ActingParty::from(party) {
            return Err(Error::InvalidInput(format!(
                "node labeled {} holds an instrument acting on {}",
                party,
                instrument.acting()
            )));
        }
        for (&y, _) in &children {
            if y >= instrument.outcomes() {
                return Err(Error::InvalidInput(format!(
                    "child for outcome {} but instrument has {} outcomes",
                    y,
                    instrument.outcomes()
                )));
            }
        }
        Ok(Self {
            party,
            instrument,
            children,
        })
    }

    /// Single measurement round with no continuation.
    pub fn round(party: Party, instrument: Instrument) -> Result<Self> {
        Self::node(party, instrument, BTreeMap::new())
    }

    /// Computational-basis round on the given party.
    pub fn computational_round(party: Party, dim: usize) -> Self {
        Self {
            party,
            instrument: Instrument::computational(dim, party.into()),
            children: BTreeMap::new(),
        }
    }

    /// Alice measures her side in the computational basis, then Bob
    /// measures his, for a d_a (x) d_b ensemble.
    pub fn two_round_computational(d_a: usize, d_b: usize) -> Self {
        let bob = Self::computational_round(Party::B, d_b);
        let children = (0..d_a).map(|y| (y, bob.clone())).collect();
        Self {
            party: Party::A,
            instrument: Instrument::computational(d_a, ActingParty::A),
            children,
        }
    }

    pub fn party(&self) -> Party {
        self.party
    }

    pub fn instrument(&self) -> &Instrument {
        &self.instrument
    }

    pub fn children(&self) -> &BTreeMap<usize, ProtocolTree> {
        &self.children
    }

    pub fn depth(&self) -> usize {
        1 + self
            .children
            .values()
            .map(ProtocolTree::depth)
            .max()
            .unwrap_or(0)
    }

    /// True when consecutive rounds change party along every path.
    pub fn is_strictly_alternating(&self) -> bool {
        self.children
            .values()
            .all(|c| c.party == self.party.other() && c.is_strictly_alternating())
    }

    /// Serialize to the protocol wire format
    /// `{ "party": "A"|"B", "kraus": [...], "children": { "<outcome>": ... } }`.
    pub fn to_json(&self) -> serde_json::Value {
        let kraus: Vec<_> = self.instrument.kraus().iter().map(|k| k.to_entries()).collect();
        let children: serde_json::Map<String, serde_json::Value> = self
            .children
            .iter()
            .map(|(y, c)| (y.to_string(), c.to_json()))
            .collect();
        serde_json::json!({
            "party": self.party,
            "kraus": kraus,
            "children": children,
        })
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let parsed: ProtocolTreeJson = serde_json::from_value(value.clone())
            .map_err(|e| Error::MalformedJson(e.to_string()))?;
        parsed.build()
    }
}

#[derive(Serialize, Deserialize)]
struct ProtocolTreeJson {
    party: Party,
    kraus: Vec<Vec<Vec<[f64; 2]>>>,
    #[serde(default)]
    children: BTreeMap<String, ProtocolTreeJson>,
}

impl ProtocolTreeJson {
    fn build(self) -> Result<ProtocolTree> {
        let kraus = self
            .kraus
            .iter()
            .map(|k| CMatrix::from_entries(k))
            .collect::<Result<Vec<_>>>()?;
        let instrument = Instrument::new(kraus, self.party.into())?;
        let mut children = BTreeMap::new();
        for (key, sub) in self.children {
            let outcome: usize = key.parse().map_err(|_| {
                Error::MalformedJson(format!("outcome key \"{}\" is not a 0-based index", key))
            })?;
            children.insert(outcome, sub.build()?);
        }
        ProtocolTree::node(self.party, instrument, children)
    }
}

/// Per-level record of a protocol run. Entropies are averaged over all
/// branches alive at that level (terminated branches keep their frozen
/// values).
#[derive(Debug, Clone, Serialize)]
pub struct StepRecord {
    pub level: usize,
    /// None when different branches measure different parties at this level.
    pub party: Option<Party>,
    /// Conditional mutual information contributed by this level, bits.
    pub info_gain: f64,
    /// chi before minus average chi after, bits (the per-step bound).
    pub chi_drop: f64,
    pub sbar_a_before: f64,
    pub sbar_a_after: f64,
    pub sbar_b_before: f64,
    pub sbar_b_after: f64,
}

/// Joint distribution over (signal label, root-to-leaf outcome path).
#[derive(Debug, Clone, Serialize)]
pub struct JointDistribution {
    pub labels: Vec<String>,
    pub paths: Vec<String>,
    /// Rows follow `labels`, columns follow `paths`.
    pub table: Vec<Vec<f64>>,
}

impl JointDistribution {
    pub fn mutual_information(&self) -> f64 {
        classical_mutual_information(&self.table)
    }
}

/// Full accounting of a protocol run.
#[derive(Debug, Clone, Serialize)]
pub struct ProtocolResult {
    /// I(X:Y) between signal and complete outcome paths, bits.
    pub total_info: f64,
    pub steps: Vec<StepRecord>,
    /// Accumulated decrease of Alice's average reduced entropy caused by
    /// Bob's measurement rounds, bits.
    pub g_a: f64,
    /// Accumulated decrease of Bob's average reduced entropy caused by
    /// Alice's measurement rounds, bits.
    pub g_b: f64,
    pub joint: JointDistribution,
    /// Whether the tree strictly alternates parties; the telescoped
    /// bound accounting is only claimed for alternating trees.
    pub alternating: bool,
}

impl ProtocolResult {
    /// Sum of per-level conditional information gains (the chain rule
    /// makes this equal to `total_info`).
    pub fn chain_rule_sum(&self) -> f64 {
        self.steps.iter().map(|s| s.info_gain).sum()
    }
}

struct Branch<'t> {
    prob: f64,
    ensemble: Ensemble,
    node: Option<&'t ProtocolTree>,
    path: String,
}

/// Run a protocol tree on a bipartite ensemble.
pub fn run_protocol(e: &Ensemble, tree: &ProtocolTree) -> Result<ProtocolResult> {
    if !e.is_bipartite() {
        return Err(Error::DimensionMismatch(format!(
            "protocols require bipartite ensembles, got dims {:?}",
            e.dims()
        )));
    }
    let mut branches = vec![Branch {
        prob: 1.0,
        ensemble: e.clone(),
        node: Some(tree),
        path: String::new(),
    }];
    let mut steps = Vec::new();
    let mut g_a = 0.0;
    let mut g_b = 0.0;
    let mut level = 0usize;

    while branches.iter().any(|b| b.node.is_some()) {
        let mut info_gain = 0.0;
        let mut chi_drop = 0.0;
        let mut sbar = LevelEntropies::default();
        let mut parties: Vec<Party> = Vec::new();
        let mut next: Vec<Branch> = Vec::new();

        for branch in branches {
            let sbar_a = branch.ensemble.average_reduced_entropy(Party::A)?;
            let sbar_b = branch.ensemble.average_reduced_entropy(Party::B)?;
            sbar.a_before += branch.prob * sbar_a;
            sbar.b_before += branch.prob * sbar_b;

            let Some(node) = branch.node else {
                // terminated branch: entropies stay frozen
                sbar.a_after += branch.prob * sbar_a;
                sbar.b_after += branch.prob * sbar_b;
                next.push(branch);
                continue;
            };

            if !parties.contains(&node.party) {
                parties.push(node.party);
            }
            let posteriors = apply_instrument(&branch.ensemble, node.instrument())?;
            info_gain += branch.prob * branch_mutual_information(&branch.ensemble, &posteriors);

            let mut branch_chi_drop = branch.ensemble.holevo_chi()?;
            let mut sbar_a_after = 0.0;
            let mut sbar_b_after = 0.0;
            for (p_y, posterior) in &posteriors {
                branch_chi_drop -= p_y * posterior.holevo_chi()?;
                sbar_a_after += p_y * posterior.average_reduced_entropy(Party::A)?;
                sbar_b_after += p_y * posterior.average_reduced_entropy(Party::B)?;
            }
            chi_drop += branch.prob * branch_chi_drop;
            sbar.a_after += branch.prob * sbar_a_after;
            sbar.b_after += branch.prob * sbar_b_after;
            match node.party {
                Party::A => g_b += branch.prob * (sbar_b - sbar_b_after),
                Party::B => g_a += branch.prob * (sbar_a - sbar_a_after),
            }

            for (y, (p_y, posterior)) in posteriors.into_iter().enumerate() {
                let path = if branch.path.is_empty() {
                    y.to_string()
                } else {
                    format!("{}.{}", branch.path, y)
                };
                next.push(Branch {
                    prob: branch.prob * p_y,
                    ensemble: posterior,
                    node: node.children().get(&y),
                    path,
                });
            }
        }

        steps.push(StepRecord {
            level,
            party: if parties.len() == 1 {
                Some(parties[0])
            } else {
                None
            },
            info_gain,
            chi_drop,
            sbar_a_before: sbar.a_before,
            sbar_a_after: sbar.a_after,
            sbar_b_before: sbar.b_before,
            sbar_b_after: sbar.b_after,
        });
        branches = next;
        level += 1;
    }

    let labels: Vec<String> = e.labels().iter().map(|s| s.to_string()).collect();
    let paths: Vec<String> = branches.iter().map(|b| b.path.clone()).collect();
    let mut table = vec![vec![0.0; paths.len()]; labels.len()];
    for (col, branch) in branches.iter().enumerate() {
        for item in branch.ensemble.items() {
            if let Some(row) = labels.iter().position(|l| l == item.label()) {
                table[row][col] = branch.prob * item.prob();
            }
        }
    }
    let joint = JointDistribution {
        labels,
        paths,
        table,
    };
    Ok(ProtocolResult {
        total_info: joint.mutual_information(),
        steps,
        g_a,
        g_b,
        joint,
        alternating: tree.is_strictly_alternating(),
    })
}

#[derive(Default)]
struct LevelEntropies {
    a_before: f64,
    a_after: f64,
    b_before: f64,
    b_after: f64,
}

/// Grid resolution for projective-basis searches, per qubit.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GridResolution {
    pub polar: usize,
    pub azimuthal: usize,
}

impl Default for GridResolution {
    fn default() -> Self {
        Self {
            polar: 24,
            azimuthal: 48,
        }
    }
}

impl GridResolution {
    pub fn new(polar: usize, azimuthal: usize) -> Self {
        Self { polar, azimuthal }
    }

    /// Single-qubit bases on the grid; theta = 0 appears once.
    fn qubit_bases(&self) -> Vec<[CVector; 2]> {
        let mut bases = Vec::new();
        for i in 0..self.polar.max(1) {
            let theta = std::f64::consts::PI * i as f64 / self.polar.max(1) as f64;
            let azimuthal_count = if i == 0 { 1 } else { self.azimuthal.max(1) };
            for j in 0..azimuthal_count {
                let phi = std::f64::consts::TAU * j as f64 / self.azimuthal.max(1) as f64;
                let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
                let e_phi = Complex::from_polar(1.0, phi);
                let v0 = CVector::new(vec![Complex::new(c, 0.0), e_phi * s]);
                let v1 = CVector::new(vec![Complex::new(s, 0.0), -e_phi * c]);
                bases.push([v0, v1]);
            }
        }
        bases
    }
}

/// Exhaustive search over per-qubit projective bases for the best
/// one-round local measurement, scored by extracted information.
/// The party's subsystem must be a tensor power of qubits.
pub fn optimize_one_round_local(
    e: &Ensemble,
    party: Party,
    grid: GridResolution,
) -> Result<(Instrument, f64)> {
    if !e.is_bipartite() {
        return Err(Error::DimensionMismatch(format!(
            "local optimization requires a bipartite ensemble, got dims {:?}",
            e.dims()
        )));
    }
    let dim = e.dims()[party.index()];
    if !dim.is_power_of_two() {
        return Err(Error::InvalidInput(format!(
            "local dimension {} is not a tensor power of qubits",
            dim
        )));
    }
    let qubits = dim.trailing_zeros() as usize;
    let bases = grid.qubit_bases();
    let combos = bases.len().checked_pow(qubits as u32).ok_or_else(|| {
        Error::InvalidInput("grid too large for multi-qubit search".into())
    })?;
    if combos > 2_000_000 {
        return Err(Error::InvalidInput(format!(
            "grid enumerates {} bases for {} qubits; use a coarser grid",
            combos, qubits
        )));
    }

    let build = |combo: usize| -> Instrument {
        let mut choice = Vec::with_capacity(qubits);
        let mut rest = combo;
        for _ in 0..qubits {
            choice.push(rest % bases.len());
            rest /= bases.len();
        }
        let mut basis: Vec<CVector> = vec![];
        for bits in 0..dim {
            let mut v: Option<CVector> = None;
            for (q, &b) in choice.iter().enumerate() {
                let bit = (bits >> (qubits - 1 - q)) & 1;
                let factor = &bases[b][bit];
                v = Some(match v {
                    None => factor.clone(),
                    Some(prev) => prev.tensor(factor),
                });
            }
            basis.push(v.expect("at least one qubit"));
        }
        Instrument::projective(&basis, party.into()).expect("grid basis is complete")
    };

    use rayon::prelude::*;
    let scores: Vec<f64> = (0..combos)
        .into_par_iter()
        .map(|combo| step_info_gain(e, &build(combo)).map(|(info, _)| info))
        .collect::<Result<Vec<_>>>()?;
    let mut best = 0usize;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = i;
        }
    }
    Ok((build(best), scores[best]))
}

/// Adaptive two-round search: enumerate the first party's grid, and for
/// each outcome pick the other party's best one-round response.
pub fn optimize_two_round(
    e: &Ensemble,
    first: Party,
    grid: GridResolution,
) -> Result<(ProtocolTree, f64)> {
    if !e.is_bipartite() {
        return Err(Error::DimensionMismatch(format!(
            "local optimization requires a bipartite ensemble, got dims {:?}",
            e.dims()
        )));
    }
    let dim = e.dims()[first.index()];
    if !dim.is_power_of_two() {
        return Err(Error::InvalidInput(format!(
            "local dimension {} is not a tensor power of qubits",
            dim
        )));
    }
    if dim != 2 {
        return Err(Error::InvalidInput(
            "two-round search is implemented for single-qubit first rounds".into(),
        ));
    }
    let bases = grid.qubit_bases();

    use rayon::prelude::*;
    let evaluated: Vec<Result<(f64, ProtocolTree)>> = bases
        .par_iter()
        .map(|basis| {
            let instrument = Instrument::projective(basis, first.into())?;
            let branches = apply_instrument(e, &instrument)?;
            let (first_info, _) = step_info_gain(e, &instrument)?;
            let mut total = first_info;
            let mut children = BTreeMap::new();
            for (y, (p_y, posterior)) in branches.iter().enumerate() {
                let (response, info) =
                    optimize_one_round_local(posterior, first.other(), grid)?;
                total += p_y * info;
                children.insert(y, ProtocolTree::round(first.other(), response)?);
            }
            Ok((total, ProtocolTree::node(first, instrument, children)?))
        })
        .collect();

    let mut best: Option<(f64, ProtocolTree)> = None;
    for entry in evaluated {
        let (score, tree) = entry?;
        if best.as_ref().map_or(true, |(b, _)| score > *b) {
            best = Some((score, tree));
        }
    }
    let (score, tree) = best.expect("grid is never empty");
    Ok((tree, score))
}
