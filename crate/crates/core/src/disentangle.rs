//! State-set classification and the disentanglement machines.
//!
//! A machine is built for a fixed, known set of bipartite states and applied
//! to one secretly chosen member. Three machines exist:
//!
//! * measure-and-prepare — identify which member was supplied (possible when
//!   the members have orthogonal supports), then prepare the tensor product
//!   of that member's marginals;
//! * bilocal preparation — when every member shares the same marginals, skip
//!   identification and prepare the shared product directly;
//! * local broadcasting — when one party's marginals all commute, rotate
//!   that party into the common eigenbasis, copy its basis index onto an
//!   ancilla with a CNOT, discard the ancilla and rotate back. The output is
//!   separable (but in general not a product) and keeps both marginals.
//!
//! The first two yield a product state; broadcasting yields a separable
//! state. Classification evaluates all applicable conditions and picks the
//! strongest machine.

use crate::entanglement::{self, BipartiteState};
use crate::error::{Error, Result};
use crate::linalg::{
    commutes, partial_trace, simultaneous_diagonalizer, tensor_product, ComplexMatrix, Dims,
    Party, Tolerance,
};
use num_complex::Complex64;
use std::fmt;

/// A named, ordered collection of bipartite states sharing dimensions — the
/// predefined set a disentanglement machine is built for.
#[derive(Clone, Debug)]
pub struct StateSet {
    name: String,
    dims: Dims,
    members: Vec<Member>,
}

/// One labeled member of a [`StateSet`].
#[derive(Clone, Debug)]
pub struct Member {
    pub label: String,
    pub state: BipartiteState,
}

impl StateSet {
    /// Requires at least one member, unique labels and uniform dimensions.
    pub fn new(name: impl Into<String>, members: Vec<Member>) -> Result<StateSet> {
        let first = members.first().ok_or(Error::EmptySet)?;
        let dims = first.state.dims();
        for member in &members {
            if member.state.dims() != dims {
                return Err(Error::DimensionMismatch {
                    expected: dims.to_string(),
                    actual: format!("{} (member {:?})", member.state.dims(), member.label),
                });
            }
        }
        for (i, member) in members.iter().enumerate() {
            if members[..i].iter().any(|m| m.label == member.label) {
                return Err(Error::DuplicateLabel(member.label.clone()));
            }
        }
        Ok(StateSet {
            name: name.into(),
            dims,
            members,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn member(&self, label: &str) -> Result<&Member> {
        self.members
            .iter()
            .find(|m| m.label == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// The chosen party's marginal of every member, in member order.
    pub fn marginals_of(&self, party: Party) -> Vec<ComplexMatrix> {
        self.members
            .iter()
            .map(|m| m.state.marginal(party))
            .collect()
    }
}

/// The disentanglement machine selected for a state set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Machine {
    /// Identify the member, then bilocally prepare its marginals.
    MeasurePrepare,
    /// Bilocally prepare the shared marginals without identification.
    BilocalPrepare,
    /// Broadcast B's state onto an ancilla in the common eigenbasis of the
    /// B marginals.
    LocalBroadcastB,
    /// Same, acting on A.
    LocalBroadcastA,
    /// No sufficient condition applies.
    None,
}

impl Machine {
    pub fn as_str(&self) -> &'static str {
        match self {
            Machine::MeasurePrepare => "measure-prepare",
            Machine::BilocalPrepare => "bilocal-prepare",
            Machine::LocalBroadcastB => "local-broadcast-b",
            Machine::LocalBroadcastA => "local-broadcast-a",
            Machine::None => "none",
        }
    }

    /// Machines whose output is an exact tensor product.
    pub fn yields_product(&self) -> bool {
        matches!(self, Machine::MeasurePrepare | Machine::BilocalPrepare)
    }
}

impl fmt::Display for Machine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which sufficient conditions a state set satisfies, and the machine that
/// selection picks.
///
/// Selection priority is MeasurePrepare > BilocalPrepare > LocalBroadcastB >
/// LocalBroadcastA: a product output is strictly stronger than a merely
/// separable one, and identification works even when the members' marginals
/// differ. `selected_machine` is `None` exactly when all four flags are
/// false.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Classification {
    pub perfectly_distinguishable: bool,
    pub identical_marginals: bool,
    pub commuting_marginals_a: bool,
    pub commuting_marginals_b: bool,
    pub selected_machine: Machine,
}

/// Quantitative verification of one disentanglement run.
#[derive(Clone, Debug)]
pub struct DisentanglementReport {
    pub input_label: String,
    pub machine: Machine,
    pub output: BipartiteState,
    /// ‖tr_B ρ_in − tr_B ρ_out‖_F.
    pub marginal_deviation_a: f64,
    /// ‖tr_A ρ_in − tr_A ρ_out‖_F.
    pub marginal_deviation_b: f64,
    pub output_is_product: bool,
    pub output_is_separable: bool,
    /// Negativity of the output (zero iff PPT).
    pub ppt_margin: f64,
}

/// True iff tr(ρᵢ·ρⱼ) vanishes for every pair of distinct members, i.e. the
/// members have orthogonal supports. For pure states this reduces to
/// pairwise orthogonality.
pub fn are_perfectly_distinguishable(set: &StateSet, tol: &Tolerance) -> bool {
    let members = set.members();
    for i in 0..members.len() {
        for j in (i + 1)..members.len() {
            let a = members[i].state.rho();
            let b = members[j].state.rho();
            let overlap = a.mul(b).trace().norm();
            let scale = a.frobenius_norm() * b.frobenius_norm();
            if overlap > tol.threshold(scale) {
                return false;
            }
        }
    }
    true
}

/// True iff all members share the same A marginal and the same B marginal.
pub fn have_identical_marginals(set: &StateSet, tol: &Tolerance) -> bool {
    for party in [Party::A, Party::B] {
        let marginals = set.marginals_of(party);
        let reference = &marginals[0];
        let threshold = tol.threshold(reference.frobenius_norm());
        if marginals[1..]
            .iter()
            .any(|m| m.distance(reference) > threshold)
        {
            return false;
        }
    }
    true
}

/// True iff the chosen party's marginals pairwise commute. Vacuously true
/// for single-member sets.
pub fn commuting_marginals(set: &StateSet, party: Party, tol: &Tolerance) -> bool {
    let marginals = set.marginals_of(party);
    for i in 0..marginals.len() {
        for j in (i + 1)..marginals.len() {
            let ok = commutes(&marginals[i], &marginals[j], tol)
                .expect("marginals share dimensions by construction");
            if !ok {
                return false;
            }
        }
    }
    true
}

/// Evaluate all four sufficient conditions and select a machine by priority.
/// Single-member sets satisfy every condition vacuously and classify as
/// MeasurePrepare.
pub fn classify(set: &StateSet, tol: &Tolerance) -> Classification {
    let perfectly_distinguishable = are_perfectly_distinguishable(set, tol);
    let identical_marginals = have_identical_marginals(set, tol);
    let commuting_marginals_a = commuting_marginals(set, Party::A, tol);
    let commuting_marginals_b = commuting_marginals(set, Party::B, tol);
    let selected_machine = if perfectly_distinguishable {
        Machine::MeasurePrepare
    } else if identical_marginals {
        Machine::BilocalPrepare
    } else if commuting_marginals_b {
        Machine::LocalBroadcastB
    } else if commuting_marginals_a {
        Machine::LocalBroadcastA
    } else {
        Machine::None
    };
    Classification {
        perfectly_distinguishable,
        identical_marginals,
        commuting_marginals_a,
        commuting_marginals_b,
        selected_machine,
    }
}

/// Index of the unique member matching `input` within tolerance (Frobenius
/// distance). This models the identification measurement for perfectly
/// distinguishable sets: the input is assumed to be one of the members.
pub fn identify(set: &StateSet, input: &BipartiteState, tol: &Tolerance) -> Result<usize> {
    let threshold = tol.threshold(1.0);
    let mut matched: Option<usize> = None;
    let mut best = f64::INFINITY;
    for (i, member) in set.members().iter().enumerate() {
        let distance = member.state.rho().distance(input.rho());
        best = best.min(distance);
        if distance <= threshold {
            if let Some(first) = matched {
                return Err(Error::AmbiguousMatch { first, second: i });
            }
            matched = Some(i);
        }
    }
    matched.ok_or(Error::NoMatch { best })
}

fn bilocal_product(
    reference: &BipartiteState,
    dims: Dims,
    tol: &Tolerance,
) -> Result<BipartiteState> {
    let (a, b) = reference.marginals();
    BipartiteState::new(tensor_product(&a, &b), dims, tol)
}

/// Measure-and-prepare machine: identify the input against the set, then
/// output the tensor product of the identified member's marginals.
pub fn measure_and_prepare(
    set: &StateSet,
    input: &BipartiteState,
    tol: &Tolerance,
) -> Result<BipartiteState> {
    if !are_perfectly_distinguishable(set, tol) {
        return Err(Error::PreconditionViolated(
            "set members are not perfectly distinguishable".to_string(),
        ));
    }
    let index = identify(set, input, tol)?;
    bilocal_product(&set.members()[index].state, set.dims(), tol)
}

/// Bilocal-preparation machine: all members share marginals, so the same
/// product state is prepared whatever the input was.
pub fn bilocal_prepare(
    set: &StateSet,
    _input: &BipartiteState,
    tol: &Tolerance,
) -> Result<BipartiteState> {
    if !have_identical_marginals(set, tol) {
        return Err(Error::PreconditionViolated(
            "set members do not share identical marginals".to_string(),
        ));
    }
    bilocal_product(&set.members()[0].state, set.dims(), tol)
}

/// Disentangle to the tensor product of marginals, dispatching between the
/// measure-and-prepare and bilocal-preparation machines by the usual
/// priority. Fails when neither condition holds.
pub fn disentangle_to_product(
    set: &StateSet,
    input: &BipartiteState,
    tol: &Tolerance,
) -> Result<BipartiteState> {
    if are_perfectly_distinguishable(set, tol) {
        measure_and_prepare(set, input, tol)
    } else if have_identical_marginals(set, tol) {
        bilocal_prepare(set, input, tol)
    } else {
        Err(Error::PreconditionViolated(
            "set is neither perfectly distinguishable nor has identical marginals".to_string(),
        ))
    }
}

/// The broadcasting unitary: a CNOT on (control, target) with integer
/// entries,
///
/// ```text
///   1 0 0 0
///   0 1 0 0
///   0 0 0 1
///   0 0 1 0
/// ```
///
/// Self-adjoint and involutive: U = U† and U² = 𝟙 hold exactly. It fixes
/// |00⟩ and |01⟩ and swaps |10⟩ ↔ |11⟩, which is all the broadcast needs:
/// |0⟩|0⟩ → |0⟩|0⟩ and |1⟩|0⟩ → |1⟩|1⟩.
pub fn broadcast_unitary() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
        &[0.0, 0.0, 1.0, 0.0],
    ])
    .expect("constant matrix")
}

/// Local broadcasting channel on a two-qubit state.
///
/// For `party = B` the pipeline is: rotate B by `diagonalizer`† so the
/// intended states become diagonal on B; append an ancilla in |0⟩⟨0|;
/// conjugate by 𝟙_A ⊗ U with B as control and the ancilla as target; trace
/// the ancilla out; rotate B back. `party = A` swaps the subsystems, runs
/// the same pipeline and swaps back.
///
/// The channel is oblivious: it acts on any two-qubit input. Both marginals
/// are preserved whenever the rotated input has a diagonal B marginal (in
/// particular for every member of the set the diagonalizer was built for);
/// the A marginal is preserved unconditionally.
pub fn local_broadcast(
    input: &BipartiteState,
    party: Party,
    diagonalizer: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<BipartiteState> {
    let dims = input.dims();
    if (dims.a, dims.b) != (2, 2) {
        return Err(Error::UnsupportedDims {
            da: dims.a,
            db: dims.b,
            context: "local broadcasting is implemented for two-qubit states".to_string(),
        });
    }
    match party {
        Party::B => broadcast_b(input, diagonalizer, tol),
        Party::A => {
            let swapped = input.swapped();
            let out = broadcast_b(&swapped, diagonalizer, tol)?;
            Ok(out.swapped())
        }
    }
}

fn broadcast_b(
    input: &BipartiteState,
    diagonalizer: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<BipartiteState> {
    if diagonalizer.rows() != 2 || diagonalizer.cols() != 2 {
        return Err(Error::DimensionMismatch {
            expected: "2x2 diagonalizer".to_string(),
            actual: format!("{}x{}", diagonalizer.rows(), diagonalizer.cols()),
        });
    }
    let residual = diagonalizer.unitarity_residual();
    if residual > tol.threshold(1.0) {
        return Err(Error::NotUnitary { residual });
    }
    let dims = input.dims();
    let id2 = ComplexMatrix::identity(2);

    // (𝟙 ⊗ V†) ρ (𝟙 ⊗ V): B's marginals become diagonal in the rotated frame
    let into_frame = tensor_product(&id2, &diagonalizer.adjoint());
    let rotated = input.rho().conjugated_by(&into_frame);

    // ρ ⊗ |0⟩⟨0|, ancilla last; then 𝟙_A ⊗ U_{BC} with B as control
    let mut ancilla = ComplexMatrix::zeros(2, 2);
    ancilla.set(0, 0, Complex64::new(1.0, 0.0));
    let extended = tensor_product(&rotated, &ancilla);
    let gate = tensor_product(&id2, &broadcast_unitary());
    let evolved = extended.conjugated_by(&gate);

    // trace the ancilla out, viewing the 8x8 as (AB)⊗C
    let traced = partial_trace(&evolved, Dims::new(4, 2), Party::A)?;

    let out_of_frame = tensor_product(&id2, diagonalizer);
    let output = traced.conjugated_by(&out_of_frame);
    BipartiteState::new(output, dims, tol)
}

/// A broadcasting machine precomputed for a state set: the acting party and
/// the common eigenbasis of that party's marginals. Immutable once built, so
/// concurrent application to different inputs is safe.
#[derive(Clone, Debug)]
pub struct BroadcastMachine {
    party: Party,
    diagonalizer: ComplexMatrix,
}

impl BroadcastMachine {
    /// Build for a set whose `party` marginals pairwise commute.
    pub fn for_set(set: &StateSet, party: Party, tol: &Tolerance) -> Result<BroadcastMachine> {
        let marginals = set.marginals_of(party);
        let diagonalizer = simultaneous_diagonalizer(&marginals, tol)?;
        Ok(BroadcastMachine {
            party,
            diagonalizer,
        })
    }

    pub fn party(&self) -> Party {
        self.party
    }

    pub fn diagonalizer(&self) -> &ComplexMatrix {
        &self.diagonalizer
    }

    pub fn apply(&self, input: &BipartiteState, tol: &Tolerance) -> Result<BipartiteState> {
        local_broadcast(input, self.party, &self.diagonalizer, tol)
    }
}

/// The party a broadcast machine built for this set would act on: B when
/// B's marginals commute (preferred), else A, else none.
pub fn broadcast_party(set: &StateSet, tol: &Tolerance) -> Option<Party> {
    if commuting_marginals(set, Party::B, tol) {
        Some(Party::B)
    } else if commuting_marginals(set, Party::A, tol) {
        Some(Party::A)
    } else {
        None
    }
}

/// Disentangle to a separable state by local broadcasting. Requires a party
/// whose marginals commute across the set (B is preferred when both do).
/// Membership of the input is not checked — the channel is oblivious — only
/// its dimensions are.
pub fn disentangle_to_separable(
    set: &StateSet,
    input: &BipartiteState,
    tol: &Tolerance,
) -> Result<BipartiteState> {
    let party = broadcast_party(set, tol).ok_or_else(|| {
        Error::PreconditionViolated("no party has commuting marginals across the set".to_string())
    })?;
    BroadcastMachine::for_set(set, party, tol)?.apply(input, tol)
}

/// True iff ρ[0,1] + ρ[2,3] vanishes, i.e. B's marginal is diagonal in the
/// computational basis — the structural mark of the commuting-marginal
/// family the broadcast fixes pointwise.
pub fn fits_general_form(input: &BipartiteState, tol: &Tolerance) -> Result<bool> {
    let dims = input.dims();
    if (dims.a, dims.b) != (2, 2) {
        return Err(Error::UnsupportedDims {
            da: dims.a,
            db: dims.b,
            context: "the commuting-marginal form is defined for two-qubit states".to_string(),
        });
    }
    let rho = input.rho();
    let sum = rho.get(0, 1) + rho.get(2, 3);
    Ok(sum.norm() <= tol.threshold(rho.frobenius_norm()))
}

/// Compare an input/output pair: marginal deviations on both sides, product
/// and separability verdicts, and the PPT margin (negativity) of the output.
///
/// Separability is certified via PPT when the dimensions make PPT exact;
/// otherwise only an exact product output is counted as separable.
pub fn verify(
    input: &BipartiteState,
    output: &BipartiteState,
    tol: &Tolerance,
) -> Result<DisentanglementReport> {
    if input.dims() != output.dims() {
        return Err(Error::DimensionMismatch {
            expected: input.dims().to_string(),
            actual: output.dims().to_string(),
        });
    }
    let (in_a, in_b) = input.marginals();
    let (out_a, out_b) = output.marginals();
    let output_is_product = entanglement::is_product(output, tol);
    let output_is_separable = if output.dims().ppt_is_exact() {
        entanglement::is_ppt(output, tol)
    } else {
        output_is_product
    };
    Ok(DisentanglementReport {
        input_label: String::new(),
        machine: Machine::None,
        output: output.clone(),
        marginal_deviation_a: in_a.distance(&out_a),
        marginal_deviation_b: in_b.distance(&out_b),
        output_is_product,
        output_is_separable,
        ppt_margin: entanglement::negativity(output),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::entanglement::PureState;
    use crate::linalg::partial_transpose;
    use approx::assert_abs_diff_eq;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn pure(amps: &[f64]) -> BipartiteState {
        PureState::from_real(amps, Dims::new(2, 2))
            .unwrap()
            .to_bipartite(&tol())
            .unwrap()
    }

    fn set_of(name: &str, members: &[(&str, BipartiteState)]) -> StateSet {
        StateSet::new(
            name,
            members
                .iter()
                .map(|(label, state)| Member {
                    label: (*label).to_string(),
                    state: state.clone(),
                })
                .collect(),
        )
        .unwrap()
    }

    const INV_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn basis_pair() -> StateSet {
        set_of(
            "basis",
            &[
                ("00", pure(&[1.0, 0.0, 0.0, 0.0])),
                ("11", pure(&[0.0, 0.0, 0.0, 1.0])),
            ],
        )
    }

    #[test]
    fn state_set_validation() {
        assert!(matches!(StateSet::new("empty", vec![]), Err(Error::EmptySet)));
        let duplicated = StateSet::new(
            "dup",
            vec![
                Member {
                    label: "x".into(),
                    state: pure(&[1.0, 0.0, 0.0, 0.0]),
                },
                Member {
                    label: "x".into(),
                    state: pure(&[0.0, 0.0, 0.0, 1.0]),
                },
            ],
        );
        assert!(matches!(duplicated, Err(Error::DuplicateLabel(_))));
    }

    #[test]
    fn distinguishability_detects_orthogonal_supports() {
        assert!(are_perfectly_distinguishable(&basis_pair(), &tol()));
        assert!(are_perfectly_distinguishable(
            &catalog::bell_states().set,
            &tol()
        ));
        // tr(ρ₀·ρ₂) = 1/2 for |00⟩ against (|00⟩+|11⟩)/√2
        assert!(!are_perfectly_distinguishable(
            &catalog::eq4_set().set,
            &tol()
        ));
    }

    #[test]
    fn identical_marginals_detection() {
        assert!(have_identical_marginals(&catalog::bell_states().set, &tol()));
        assert!(!have_identical_marginals(&basis_pair(), &tol()));
        // computed with the index-sum oracle: at (θ=π/8, φ=π/3) the two
        // members' marginals are cos²φ/sin²φ mixtures of different bases
        let pair = catalog::eq3_pair(std::f64::consts::PI / 8.0, std::f64::consts::PI / 3.0);
        assert!(!have_identical_marginals(&pair.set, &tol()));
    }

    #[test]
    fn commuting_marginal_detection() {
        // diag(1,0), diag(0,1) and 𝟙/2 all commute
        assert!(commuting_marginals(&catalog::eq4_set().set, Party::B, &tol()));
        // |+⟩⟨+| does not commute with diag(1,0)
        assert!(!commuting_marginals(&catalog::eq5_set().set, Party::B, &tol()));
        let single = set_of("single", &[("phi+", pure(&[INV_SQRT2, 0.0, 0.0, INV_SQRT2]))]);
        assert!(commuting_marginals(&single, Party::B, &tol()));
    }

    #[test]
    fn classify_bell_set_prefers_measure_prepare() {
        let c = classify(&catalog::bell_states().set, &tol());
        assert!(c.perfectly_distinguishable);
        assert!(c.identical_marginals);
        assert_eq!(c.selected_machine, Machine::MeasurePrepare);
    }

    #[test]
    fn classify_eq4_selects_broadcast_b() {
        let c = classify(&catalog::eq4_set().set, &tol());
        assert!(!c.perfectly_distinguishable);
        assert!(!c.identical_marginals);
        assert!(c.commuting_marginals_a);
        assert!(c.commuting_marginals_b);
        assert_eq!(c.selected_machine, Machine::LocalBroadcastB);
    }

    #[test]
    fn classify_eq5_selects_none() {
        let c = classify(&catalog::eq5_set().set, &tol());
        assert!(!c.perfectly_distinguishable);
        assert!(!c.identical_marginals);
        assert!(!c.commuting_marginals_a);
        assert!(!c.commuting_marginals_b);
        assert_eq!(c.selected_machine, Machine::None);
    }

    #[test]
    fn classify_single_member_set_is_vacuously_everything() {
        let single = set_of("single", &[("phi+", pure(&[INV_SQRT2, 0.0, 0.0, INV_SQRT2]))]);
        let c = classify(&single, &tol());
        assert!(c.perfectly_distinguishable);
        assert!(c.identical_marginals);
        assert!(c.commuting_marginals_a);
        assert!(c.commuting_marginals_b);
        assert_eq!(c.selected_machine, Machine::MeasurePrepare);
    }

    #[test]
    fn identification() {
        let bell = catalog::bell_states().set;
        let psi_minus = pure(&[0.0, INV_SQRT2, -INV_SQRT2, 0.0]);
        assert_eq!(identify(&bell, &psi_minus, &tol()).unwrap(), 3);

        let basis = basis_pair();
        assert_eq!(
            identify(&basis, &pure(&[0.0, 0.0, 0.0, 1.0]), &tol()).unwrap(),
            1
        );

        let mixed = BipartiteState::new(
            ComplexMatrix::identity(4).scale_real(0.25),
            Dims::new(2, 2),
            &tol(),
        )
        .unwrap();
        assert!(matches!(
            identify(&bell, &mixed, &tol()),
            Err(Error::NoMatch { .. })
        ));

        // a sloppy tolerance that matches several members is reported as such
        let sloppy = Tolerance::uniform(10.0).unwrap();
        assert!(matches!(
            identify(&bell, &psi_minus, &sloppy),
            Err(Error::AmbiguousMatch { .. })
        ));
    }

    #[test]
    fn product_disentanglement_of_bell_member() {
        let bell = catalog::bell_states().set;
        let phi_plus = pure(&[INV_SQRT2, 0.0, 0.0, INV_SQRT2]);
        let out = disentangle_to_product(&bell, &phi_plus, &tol()).unwrap();
        let expected = ComplexMatrix::identity(4).scale_real(0.25);
        assert!(out.rho().distance(&expected) < 1e-14);
    }

    #[test]
    fn product_disentanglement_fixes_product_members() {
        let basis = basis_pair();
        let input = pure(&[1.0, 0.0, 0.0, 0.0]);
        let out = disentangle_to_product(&basis, &input, &tol()).unwrap();
        assert!(out.rho().distance(input.rho()) < 1e-14);
    }

    #[test]
    fn bilocal_preparation_ignores_the_input() {
        // a set with identical marginals but non-orthogonal members: Φ⁺ and
        // (𝟙⊗R)Φ⁺ for a π/4 rotation R
        let entry = catalog::max_entangled_pair();
        let c = classify(&entry.set, &tol());
        assert!(!c.perfectly_distinguishable);
        assert!(c.identical_marginals);
        assert_eq!(c.selected_machine, Machine::BilocalPrepare);

        let expected = ComplexMatrix::identity(4).scale_real(0.25);
        for member in entry.set.members() {
            let out = disentangle_to_product(&entry.set, &member.state, &tol()).unwrap();
            assert!(out.rho().distance(&expected) < 1e-12);
            assert!(entanglement::is_product(&out, &tol()));
        }
    }

    #[test]
    fn product_disentanglement_requires_a_condition() {
        let eq4 = catalog::eq4_set().set;
        let input = eq4.members()[2].state.clone();
        assert!(matches!(
            disentangle_to_product(&eq4, &input, &tol()),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn broadcast_unitary_is_exact() {
        let u = broadcast_unitary();
        assert_eq!(u, u.adjoint());
        assert_eq!(u.mul(&u), ComplexMatrix::identity(4));
        // |10⟩ → |11⟩ and |01⟩ → |01⟩ (columns 2 and 1)
        assert_eq!(u.get(3, 2), Complex64::new(1.0, 0.0));
        assert_eq!(u.get(1, 1), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn broadcast_marginal_law_for_diagonal_qubit() {
        // for a single-qubit ρ diagonal in the computational basis, the
        // ancilla pipeline copies it: tr_B ρ̃ = tr_C ρ̃ = ρ
        for &(p, q) in &[(1.0, 0.0), (0.25, 0.75), (0.5, 0.5)] {
            let rho = ComplexMatrix::diagonal(&[p, q]);
            let mut ancilla = ComplexMatrix::zeros(2, 2);
            ancilla.set(0, 0, Complex64::new(1.0, 0.0));
            let joint = tensor_product(&rho, &ancilla);
            let u = broadcast_unitary();
            let evolved = joint.conjugated_by(&u);
            let first = partial_trace(&evolved, Dims::new(2, 2), Party::A).unwrap();
            let second = partial_trace(&evolved, Dims::new(2, 2), Party::B).unwrap();
            assert!(first.distance(&rho) < 1e-12);
            assert!(second.distance(&rho) < 1e-12);
        }
    }

    #[test]
    fn local_broadcast_of_bell_state_dephases_it() {
        let phi_plus = pure(&[INV_SQRT2, 0.0, 0.0, INV_SQRT2]);
        let out =
            local_broadcast(&phi_plus, Party::B, &ComplexMatrix::identity(2), &tol()).unwrap();
        let expected = ComplexMatrix::diagonal(&[0.5, 0.0, 0.0, 0.5]);
        assert!(out.rho().distance(&expected) < 1e-14);
    }

    #[test]
    fn local_broadcast_fixes_basis_states() {
        let input = pure(&[0.0, 0.0, 0.0, 1.0]);
        let out = local_broadcast(&input, Party::B, &ComplexMatrix::identity(2), &tol()).unwrap();
        assert!(out.rho().distance(input.rho()) < 1e-14);
    }

    #[test]
    fn local_broadcast_zeroes_the_off_form_entries() {
        // on the commuting-marginal family the output keeps a, c, e, g, h, s
        // and zeroes b, d, f (and the mirrored -b)
        for seed in 0..50 {
            let input = catalog::random_prop2_state(seed);
            let out =
                local_broadcast(&input, Party::B, &ComplexMatrix::identity(2), &tol()).unwrap();
            let expected = dephased_on_b(input.rho());
            assert!(out.rho().max_abs_diff(&expected) < 1e-12);
        }
    }

    /// Independent closed form for the broadcast output: zero every entry
    /// whose B indices differ, keep the rest.
    fn dephased_on_b(rho: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::from_fn(4, 4, |r, c| {
            let (k, l) = (r % 2, c % 2);
            if k == l {
                rho.get(r, c)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    #[test]
    fn local_broadcast_party_a_mirrors_party_b() {
        for seed in 0..20 {
            let input = catalog::random_density_state(seed, Dims::new(2, 2));
            let v = catalog::random_unitary(seed ^ 0xABCD, 2);
            let direct = local_broadcast(&input, Party::A, &v, &tol()).unwrap();
            let via_swap = local_broadcast(&input.swapped(), Party::B, &v, &tol())
                .unwrap()
                .swapped();
            assert!(direct.rho().distance(via_swap.rho()) < 1e-13);
        }
    }

    #[test]
    fn local_broadcast_rejects_bad_inputs() {
        let big = BipartiteState::new(
            ComplexMatrix::identity(6).scale_real(1.0 / 6.0),
            Dims::new(2, 3),
            &tol(),
        )
        .unwrap();
        assert!(matches!(
            local_broadcast(&big, Party::B, &ComplexMatrix::identity(2), &tol()),
            Err(Error::UnsupportedDims { .. })
        ));

        let input = pure(&[1.0, 0.0, 0.0, 0.0]);
        let not_unitary = ComplexMatrix::diagonal(&[1.0, 2.0]);
        assert!(matches!(
            local_broadcast(&input, Party::B, &not_unitary, &tol()),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn separable_disentanglement_of_eq4_psi2() {
        let entry = catalog::eq4_set();
        let psi2 = entry.set.member("psi2").unwrap().state.clone();
        let out = disentangle_to_separable(&entry.set, &psi2, &tol()).unwrap();
        let expected = ComplexMatrix::diagonal(&[0.5, 0.0, 0.0, 0.5]);
        assert!(out.rho().distance(&expected) < 1e-12);
        assert!(entanglement::is_separable(&out, &tol()).unwrap());
        assert!(!entanglement::is_product(&out, &tol()));
        let report = verify(&psi2, &out, &tol()).unwrap();
        assert!(report.marginal_deviation_a < 1e-12);
        assert!(report.marginal_deviation_b < 1e-12);
    }

    #[test]
    fn separable_disentanglement_is_identity_on_basis_members() {
        let entry = catalog::eq4_set();
        let input = entry.set.member("psi0").unwrap().state.clone();
        let out = disentangle_to_separable(&entry.set, &input, &tol()).unwrap();
        assert!(out.rho().distance(input.rho()) < 1e-13);
    }

    #[test]
    fn separable_disentanglement_of_maximally_entangled_pair() {
        // Φ⁺ and (𝟙⊗σz)Φ⁺ have commuting marginals (both 𝟙/2)
        let phi_plus = pure(&[INV_SQRT2, 0.0, 0.0, INV_SQRT2]);
        let phi_minus = pure(&[INV_SQRT2, 0.0, 0.0, -INV_SQRT2]);
        let set = set_of("me-pair", &[("phi+", phi_plus), ("phi-", phi_minus)]);
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        for member in set.members() {
            let out = disentangle_to_separable(&set, &member.state, &tol()).unwrap();
            assert!(entanglement::is_separable(&out, &tol()).unwrap());
            let (a, b) = out.marginals();
            assert!(a.distance(&half) < 1e-9);
            assert!(b.distance(&half) < 1e-9);
        }
    }

    #[test]
    fn separable_disentanglement_requires_commuting_side() {
        let entry = catalog::eq5_set();
        let input = entry.set.member("psi3").unwrap().state.clone();
        assert!(matches!(
            disentangle_to_separable(&entry.set, &input, &tol()),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn general_form_predicate() {
        let psi2 = pure(&[INV_SQRT2, 0.0, 0.0, INV_SQRT2]);
        assert!(fits_general_form(&psi2, &tol()).unwrap());

        let plus_plus = pure(&[0.5, 0.5, 0.5, 0.5]);
        assert!(!fits_general_form(&plus_plus, &tol()).unwrap());

        let diagonal = BipartiteState::new(
            ComplexMatrix::diagonal(&[0.4, 0.3, 0.2, 0.1]),
            Dims::new(2, 2),
            &tol(),
        )
        .unwrap();
        assert!(fits_general_form(&diagonal, &tol()).unwrap());
    }

    #[test]
    fn broadcast_preserves_marginals_on_the_form_family() {
        for seed in 0..1000 {
            let input = catalog::random_prop2_state(seed);
            let out =
                local_broadcast(&input, Party::B, &ComplexMatrix::identity(2), &tol()).unwrap();
            let report = verify(&input, &out, &tol()).unwrap();
            assert!(report.marginal_deviation_a < 1e-9);
            assert!(report.marginal_deviation_b < 1e-9);
            assert!(report.output_is_separable);
            assert!(report.ppt_margin < 1e-9);
            if report.output_is_product {
                assert!(report.output_is_separable);
            }
            // the output is a fixed point of the partial transpose on B
            let pt = partial_transpose(out.rho(), out.dims(), Party::B).unwrap();
            assert!(pt.distance(out.rho()) < 1e-9);
            // and matches the dephased closed form entrywise
            assert!(out.rho().max_abs_diff(&dephased_on_b(input.rho())) < 1e-12);
        }
    }

    #[test]
    fn classification_machine_is_none_iff_no_flag_is_set() {
        // generic random pairs satisfy no condition at all
        for seed in 0..30u64 {
            let members = vec![
                Member {
                    label: "x".into(),
                    state: catalog::random_density_state(seed * 2 + 1, Dims::new(2, 2)),
                },
                Member {
                    label: "y".into(),
                    state: catalog::random_density_state(seed * 2 + 2, Dims::new(2, 2)),
                },
            ];
            let set = StateSet::new("generic", members).unwrap();
            let c = classify(&set, &tol());
            let any_flag = c.perfectly_distinguishable
                || c.identical_marginals
                || c.commuting_marginals_a
                || c.commuting_marginals_b;
            assert_eq!(c.selected_machine == Machine::None, !any_flag);
            assert!(!any_flag, "random pairs should satisfy nothing (seed {seed})");
        }
    }

    #[test]
    fn broadcast_preserves_marginals_after_self_diagonalization() {
        use crate::linalg::hermitian_eigensystem;
        for seed in 0..1000 {
            let input = catalog::random_density_state(seed, Dims::new(2, 2));
            let (_, v) = hermitian_eigensystem(&input.marginal(Party::B), &tol()).unwrap();
            let out = local_broadcast(&input, Party::B, &v, &tol()).unwrap();
            let report = verify(&input, &out, &tol()).unwrap();
            assert!(report.marginal_deviation_a < 1e-9);
            assert!(report.marginal_deviation_b < 1e-9);
            assert!(entanglement::is_ppt(&out, &tol()));
        }
    }

    #[test]
    fn verify_on_known_pairs() {
        let phi_plus = pure(&[INV_SQRT2, 0.0, 0.0, INV_SQRT2]);
        let mixed = BipartiteState::new(
            ComplexMatrix::identity(4).scale_real(0.25),
            Dims::new(2, 2),
            &tol(),
        )
        .unwrap();
        let report = verify(&phi_plus, &mixed, &tol()).unwrap();
        assert_abs_diff_eq!(report.marginal_deviation_a, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(report.marginal_deviation_b, 0.0, epsilon = 1e-14);
        assert!(report.output_is_product);
        assert!(report.output_is_separable);

        // the identity map preserves marginals but fails separability
        let identity_report = verify(&phi_plus, &phi_plus, &tol()).unwrap();
        assert_abs_diff_eq!(identity_report.marginal_deviation_a, 0.0, epsilon = 1e-14);
        assert!(!identity_report.output_is_separable);
        assert_abs_diff_eq!(identity_report.ppt_margin, 0.5, epsilon = 1e-10);

        let small = BipartiteState::new(
            ComplexMatrix::identity(2).scale_real(0.5),
            Dims::new(1, 2),
            &tol(),
        )
        .unwrap();
        assert!(verify(&phi_plus, &small, &tol()).is_err());
    }

    #[test]
    fn classify_priority_holds_on_random_distinguishable_sets() {
        // whenever the distinguishability flag is up the machine must be
        // measure-prepare, regardless of the other flags
        for seed in 0..50u64 {
            let u = catalog::random_unitary(seed, 4);
            let members: Vec<Member> = (0..2)
                .map(|col| {
                    let amps: Vec<Complex64> = (0..4).map(|row| u.get(row, col)).collect();
                    Member {
                        label: format!("m{col}"),
                        state: PureState::new(amps, Dims::new(2, 2))
                            .unwrap()
                            .to_bipartite(&tol())
                            .unwrap(),
                    }
                })
                .collect();
            let set = StateSet::new("ortho", members).unwrap();
            let c = classify(&set, &tol());
            assert!(c.perfectly_distinguishable);
            assert_eq!(c.selected_machine, Machine::MeasurePrepare);
        }
    }

    #[test]
    fn product_output_is_always_an_exact_product() {
        for seed in 0..50u64 {
            let u = catalog::random_unitary(seed.wrapping_add(999), 4);
            let members: Vec<Member> = (0..3)
                .map(|col| {
                    let amps: Vec<Complex64> = (0..4).map(|row| u.get(row, col)).collect();
                    Member {
                        label: format!("m{col}"),
                        state: PureState::new(amps, Dims::new(2, 2))
                            .unwrap()
                            .to_bipartite(&tol())
                            .unwrap(),
                    }
                })
                .collect();
            let set = StateSet::new("ortho", members).unwrap();
            let input = set.members()[seed as usize % 3].state.clone();
            let out = disentangle_to_product(&set, &input, &tol()).unwrap();
            let strict = Tolerance::uniform(1e-12).unwrap();
            assert!(entanglement::is_product(&out, &strict));
        }
    }
}
