//! Channel verification and eavesdropper models.
//!
//! Two attacks are modeled. In the GHZ intercept, Eve holds a private triplet
//! `EFG` in the channel state, captures two channel qubits in transit,
//! measures them together with `E` in an 8-element GHZ-like basis and
//! forwards them. In probe coupling, Eve entangles an ancilla with the
//! triplet, giving a general state `sum |ijk>_ABC |e_ijk>_E`.
//!
//! Two tests catch them. The Z test expects `A = B = C` on every sampled
//! triplet. The parity test measures one of `XXX`, `YXY`, `YYX`, `XYY`
//! locally and expects the product of outcomes to be -1, +1, +1, +1.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;

use crate::protocol::{prepare_ghz, ALICE, BOB, CHARLIE};
use crate::qsim::{r, OrthonormalBasis, PauliString, StateVector, FRAC_1_SQRT_2};
use crate::{Error, Result};

pub const EVE_E: &str = "E";
pub const EVE_F: &str = "F";
pub const EVE_G: &str = "G";

const ROLES: [&str; 3] = [ALICE, BOB, CHARLIE];

/// Largest probe dimension accepted by [`build_probe_state`].
pub const MAX_PROBE_DIMENSION: usize = 16;

#[derive(Clone, Debug, PartialEq)]
pub enum SourceKind {
    Honest,
    /// Eve intercepts the two listed channel qubits and measures them with
    /// `E` of Eve's own triplet.
    GhzIntercept { intercepted: [&'static str; 2] },
    ProbeCoupled { probe: ProbeState, signs: SignPattern },
}

/// Generator of channel triplets as received by Alice, Bob and Charlie.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelSource {
    pub kind: SourceKind,
    pub description: String,
}

impl ChannelSource {
    pub fn honest() -> Self {
        Self {
            kind: SourceKind::Honest,
            description: "ideal GHZ triplet (|000> - |111>)/sqrt2".into(),
        }
    }

    /// Intercept of `B` and `C`.
    pub fn ghz_intercept() -> Self {
        Self::ghz_intercept_on([BOB, CHARLIE]).expect("B and C are channel roles")
    }

    pub fn ghz_intercept_on(intercepted: [&str; 2]) -> Result<Self> {
        let pick = |l: &str| {
            ROLES
                .into_iter()
                .find(|role| *role == l)
                .ok_or_else(|| Error::Precondition(format!("`{l}` is not a channel qubit")))
        };
        let pair = [pick(intercepted[0])?, pick(intercepted[1])?];
        if pair[0] == pair[1] {
            return Err(Error::Precondition("intercepted qubits must differ".into()));
        }
        Ok(Self {
            kind: SourceKind::GhzIntercept { intercepted: pair },
            description: format!(
                "Eve measures {}{}{EVE_E} of a private GHZ triplet EFG in the GHZ-like basis",
                pair[0], pair[1]
            ),
        })
    }

    pub fn probe_coupled(probe: ProbeState, signs: SignPattern) -> Result<Self> {
        // fail early on unusable specs
        build_probe_state(&probe, &signs)?;
        let description = format!("probe coupled to an Eve system of dimension {}", probe.eve_dimension);
        Ok(Self {
            kind: SourceKind::ProbeCoupled { probe, signs },
            description,
        })
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            SourceKind::Honest => "honest",
            SourceKind::GhzIntercept { .. } => "ghz-intercept",
            SourceKind::ProbeCoupled { .. } => "probe",
        }
    }

    /// Fresh triplet, plus Eve's basis outcome when one was measured.
    pub fn sample_with_eve_outcome<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
    ) -> Result<(StateVector, Option<String>)> {
        match &self.kind {
            SourceKind::Honest => Ok((crate::protocol::channel_ghz(), None)),
            SourceKind::GhzIntercept { intercepted } => {
                let basis = intercept_basis([intercepted[0], intercepted[1], EVE_E]);
                let m = basis.measure(&intercept_joint(), rng)?;
                Ok((m.state, Some(m.outcome)))
            }
            SourceKind::ProbeCoupled { probe, signs } => Ok((build_probe_state(probe, signs)?, None)),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<StateVector> {
        Ok(self.sample_with_eve_outcome(rng)?.0)
    }

    /// Every possible delivered state with its probability.
    pub fn branches(&self) -> Result<Vec<(f64, StateVector)>> {
        match &self.kind {
            SourceKind::GhzIntercept { intercepted } => {
                let basis = intercept_basis([intercepted[0], intercepted[1], EVE_E]);
                let joint = intercept_joint();
                let probabilities = basis.probabilities(&joint)?;
                let mut out = Vec::new();
                for (i, p) in probabilities.into_iter().enumerate() {
                    if p >= crate::qsim::ZERO_PROBABILITY {
                        out.push(basis.force_outcome(&joint, basis.element(i).0)?);
                    }
                }
                Ok(out)
            }
            SourceKind::Honest => Ok(vec![(1.0, crate::protocol::channel_ghz())]),
            SourceKind::ProbeCoupled { probe, signs } => Ok(vec![(1.0, build_probe_state(probe, signs)?)]),
        }
    }
}

impl fmt::Display for ChannelSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.name(), self.description)
    }
}

pub fn sample_channel_triplet<R: Rng + ?Sized>(source: &ChannelSource, rng: &mut R) -> Result<StateVector> {
    source.sample(rng)
}

fn intercept_joint() -> StateVector {
    crate::protocol::channel_ghz()
        .tensor(&prepare_ghz([EVE_E, EVE_F, EVE_G]).expect("fixed labels"))
        .expect("disjoint labels")
}

/// Eve's basis `(|xyz> +- |x'y'z'>)/sqrt2` on three qubits, ordered
/// `000-111, 000+111, 001-110, 001+110, 010-101, 010+101, 100-011, 100+011`.
pub fn intercept_basis(labels: [&str; 3]) -> OrthonormalBasis {
    let pairs = [(0b000, 0b111), (0b001, 0b110), (0b010, 0b101), (0b100, 0b011)];
    let mut elements = Vec::with_capacity(8);
    for (first, second) in pairs {
        for sign in [-1.0, 1.0] {
            let mut v = vec![r(0.0); 8];
            v[first] = r(FRAC_1_SQRT_2);
            v[second] = r(sign * FRAC_1_SQRT_2);
            let name = format!("{first:03b}{}{second:03b}", if sign < 0.0 { '-' } else { '+' });
            elements.push((name, v));
        }
    }
    OrthonormalBasis::new(&labels, elements).expect("intercept basis is orthonormal")
}

fn require_ghz(state: &StateVector, what: &str) -> Result<()> {
    let labels = state.labels();
    let ok = labels.len() == 3
        && prepare_ghz([&labels[0], &labels[1], &labels[2]])
            .map(|ghz| ghz.approx_eq(state, crate::qsim::INVARIANT_TOL))
            .unwrap_or(false);
    if ok {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{what} is not an exact GHZ triplet")))
    }
}

fn intercept_inputs(channel: &StateVector, eve_triplet: &StateVector) -> Result<StateVector> {
    require_ghz(channel, "channel")?;
    require_ghz(eve_triplet, "Eve's triplet")?;
    if channel.labels() != [ALICE, BOB, CHARLIE] || eve_triplet.labels() != [EVE_E, EVE_F, EVE_G] {
        return Err(Error::Precondition("expected labels A,B,C and E,F,G".into()));
    }
    Ok(channel.tensor(eve_triplet)?)
}

/// Eve's measurement of `B,C,E`. Returns Eve's outcome and the collapsed
/// state over `A,B,C,E,F,G`; `B` and `C` then go on to Bob and Charlie.
pub fn eve_ghz_intercept<R: Rng + ?Sized>(
    channel: &StateVector,
    eve_triplet: &StateVector,
    rng: &mut R,
) -> Result<(String, StateVector)> {
    let joint = intercept_inputs(channel, eve_triplet)?;
    let m = intercept_basis([BOB, CHARLIE, EVE_E]).measure(&joint, rng)?;
    Ok((m.outcome, m.state))
}

pub fn eve_ghz_intercept_force(
    channel: &StateVector,
    eve_triplet: &StateVector,
    outcome: &str,
) -> Result<(f64, StateVector)> {
    let joint = intercept_inputs(channel, eve_triplet)?;
    Ok(intercept_basis([BOB, CHARLIE, EVE_E]).force_outcome(&joint, outcome)?)
}

/// Outcome distribution of Eve's measurement, in basis order.
pub fn eve_outcome_probabilities() -> Vec<(String, f64)> {
    let basis = intercept_basis([BOB, CHARLIE, EVE_E]);
    let probabilities = basis.probabilities(&intercept_joint()).expect("labels present");
    basis.names().map(str::to_string).zip(probabilities).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CorrelationStats {
    pub samples: usize,
    pub all_equal_count: usize,
}

impl CorrelationStats {
    pub fn fraction(&self) -> f64 {
        if self.samples == 0 {
            0.0
        } else {
            self.all_equal_count as f64 / self.samples as f64
        }
    }

    /// Triplets whose Z outcomes were not all equal.
    pub fn violations(&self) -> usize {
        self.samples - self.all_equal_count
    }
}

fn z_all_equal<R: Rng + ?Sized>(state: &StateVector, rng: &mut R) -> Result<bool> {
    let mut state = state.clone();
    let mut outcomes = [0u8; 3];
    for (slot, role) in outcomes.iter_mut().zip(ROLES) {
        let m = OrthonormalBasis::computational(role).measure(&state, rng)?;
        *slot = u8::from(m.outcome == "1");
        state = m.state;
    }
    Ok(outcomes[0] == outcomes[1] && outcomes[1] == outcomes[2])
}

/// Each party measures its qubit of `n` fresh triplets in the Z basis.
pub fn z_basis_test<R: Rng + ?Sized>(source: &ChannelSource, n: usize, rng: &mut R) -> Result<CorrelationStats> {
    if n == 0 {
        return Err(Error::TooFewSamples { min: 1, got: 0 });
    }
    let mut all_equal_count = 0;
    for _ in 0..n {
        let state = source.sample(rng)?;
        if z_all_equal(&state, rng)? {
            all_equal_count += 1;
        }
    }
    Ok(CorrelationStats {
        samples: n,
        all_equal_count,
    })
}

/// Probability that one triplet passes the Z test, by summing Born weights
/// of `A = B = C` over every branch of the source.
pub fn z_all_equal_probability(source: &ChannelSource) -> Result<f64> {
    let mut total = 0.0;
    for (weight, state) in source.branches()? {
        let positions: Vec<usize> = ROLES
            .iter()
            .map(|l| state.position(l))
            .collect::<Result<_, _>>()?;
        let n = state.num_qubits();
        let p: f64 = state
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(index, _)| {
                let bits: Vec<usize> = positions.iter().map(|p| index >> (n - 1 - p) & 1).collect();
                bits[0] == bits[1] && bits[1] == bits[2]
            })
            .map(|(_, a)| a.norm_sqr())
            .sum();
        total += weight * p;
    }
    Ok(total)
}

/// One of the four stabilizer products checked by the parity test; letters
/// act on `A`, `B`, `C` in that order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ParityOperator {
    Xxx,
    Yxy,
    Yyx,
    Xyy,
}

impl ParityOperator {
    pub const ALL: [ParityOperator; 4] = [
        ParityOperator::Xxx,
        ParityOperator::Yxy,
        ParityOperator::Yyx,
        ParityOperator::Xyy,
    ];

    pub fn letters(self) -> &'static str {
        match self {
            ParityOperator::Xxx => "XXX",
            ParityOperator::Yxy => "YXY",
            ParityOperator::Yyx => "YYX",
            ParityOperator::Xyy => "XYY",
        }
    }

    /// Eigenvalue of the ideal channel.
    pub fn honest_value(self) -> i8 {
        match self {
            ParityOperator::Xxx => -1,
            _ => 1,
        }
    }

    pub fn pauli(self) -> PauliString {
        PauliString::parse(self.letters(), &ROLES).expect("valid letters")
    }

    /// Outcome triples compatible with the ideal channel.
    pub fn allowed_triples(self) -> Vec<[i8; 3]> {
        let mut out = Vec::with_capacity(4);
        for a in [-1i8, 1] {
            for b in [-1i8, 1] {
                for c in [-1i8, 1] {
                    if a * b * c == self.honest_value() {
                        out.push([a, b, c]);
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for ParityOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.letters())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParityTally {
    pub samples: usize,
    pub product_sum: i64,
    pub triples: BTreeMap<[i8; 3], usize>,
}

impl ParityTally {
    pub fn mean(&self) -> f64 {
        if self.samples == 0 {
            0.0
        } else {
            self.product_sum as f64 / self.samples as f64
        }
    }

    fn record(&mut self, triple: [i8; 3]) {
        self.samples += 1;
        self.product_sum += i64::from(triple[0] * triple[1] * triple[2]);
        *self.triples.entry(triple).or_default() += 1;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityStats {
    pub tallies: BTreeMap<ParityOperator, ParityTally>,
}

impl ParityStats {
    pub fn tally(&self, op: ParityOperator) -> &ParityTally {
        &self.tallies[&op]
    }

    /// Observed triples outside the allowed set of their operator.
    pub fn violations(&self) -> usize {
        self.tallies
            .iter()
            .map(|(op, t)| {
                let allowed = op.allowed_triples();
                t.triples
                    .iter()
                    .filter(|(triple, _)| !allowed.contains(triple))
                    .map(|(_, count)| count)
                    .sum::<usize>()
            })
            .sum()
    }

    /// Operators whose empirical mean is more than three standard errors
    /// from the ideal eigenvalue.
    pub fn deviating_operators(&self) -> Vec<ParityOperator> {
        self.tallies
            .iter()
            .filter(|(_, t)| t.samples > 0)
            .filter(|(op, t)| {
                let mean = t.mean();
                let sigma = ((1.0 - mean * mean).max(0.0) / t.samples as f64).sqrt();
                (mean - f64::from(op.honest_value())).abs() > 3.0 * sigma
            })
            .map(|(op, _)| *op)
            .collect()
    }
}

fn local_basis(letter: char, label: &str) -> OrthonormalBasis {
    match letter {
        'X' => OrthonormalBasis::x_basis(label),
        _ => OrthonormalBasis::y_basis(label),
    }
}

/// Measures the three local Paulis of `op` on one triplet; `+1` for the
/// `+` eigenvector.
pub fn measure_parity_round<R: Rng + ?Sized>(
    state: &StateVector,
    op: ParityOperator,
    rng: &mut R,
) -> Result<[i8; 3]> {
    let mut state = state.clone();
    let mut triple = [0i8; 3];
    for ((slot, role), letter) in triple.iter_mut().zip(ROLES).zip(op.letters().chars()) {
        let m = local_basis(letter, role).measure(&state, rng)?;
        *slot = if m.outcome == "+" { 1 } else { -1 };
        state = m.state;
    }
    Ok(triple)
}

/// Runs `n` rounds, choosing the operator uniformly for each triplet.
pub fn parity_test<R: Rng + ?Sized>(source: &ChannelSource, n: usize, rng: &mut R) -> Result<ParityStats> {
    if n < 4 {
        return Err(Error::TooFewSamples { min: 4, got: n });
    }
    let mut tallies: BTreeMap<ParityOperator, ParityTally> =
        ParityOperator::ALL.iter().map(|op| (*op, ParityTally::default())).collect();
    for _ in 0..n {
        let state = source.sample(rng)?;
        let op = ParityOperator::ALL[rng.random_range(0..4)];
        let triple = measure_parity_round(&state, op, rng)?;
        tallies.get_mut(&op).expect("all operators present").record(triple);
    }
    Ok(ParityStats { tallies })
}

/// `<XXX>, <YXY>, <YYX>, <XYY>` on `A,B,C`, identity on everything else.
pub fn parity_expectations(state: &StateVector) -> Result<[f64; 4]> {
    let mut out = [0.0; 4];
    for (slot, op) in out.iter_mut().zip(ParityOperator::ALL) {
        *slot = op.pauli().expectation(state)?;
    }
    Ok(out)
}

/// Parity expectations averaged over every branch of the source.
pub fn exact_parity_means(source: &ChannelSource) -> Result<[f64; 4]> {
    let mut out = [0.0; 4];
    for (weight, state) in source.branches()? {
        for (slot, v) in out.iter_mut().zip(parity_expectations(&state)?) {
            *slot += weight * v;
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChannelVerdict {
    ChannelOk,
    EavesdropperDetected,
}

impl ChannelVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            ChannelVerdict::ChannelOk => "CHANNEL-OK",
            ChannelVerdict::EavesdropperDetected => "EAVESDROPPER-DETECTED",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChannelAssessment {
    pub z_violations: usize,
    pub parity_violations: usize,
    pub deviating_operators: Vec<ParityOperator>,
    pub verdict: ChannelVerdict,
}

/// Rejects on any impossible outcome (zero tolerance) or on any parity mean
/// more than 3 sigma from its ideal value.
pub fn assess_channel(z: &CorrelationStats, parity: &ParityStats) -> ChannelAssessment {
    let z_violations = z.violations();
    let parity_violations = parity.violations();
    let deviating_operators = parity.deviating_operators();
    let verdict = if z_violations == 0 && parity_violations == 0 && deviating_operators.is_empty() {
        ChannelVerdict::ChannelOk
    } else {
        ChannelVerdict::EavesdropperDetected
    };
    ChannelAssessment {
        z_violations,
        parity_violations,
        deviating_operators,
        verdict,
    }
}

/// Eve's components `|e_ijk>`, indexed by `ijk` read as a binary number.
/// They need not be normalized or orthogonal.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeState {
    pub eve_dimension: usize,
    pub components: Vec<Vec<Complex64>>,
}

impl ProbeState {
    pub fn new(eve_dimension: usize, components: Vec<Vec<Complex64>>) -> Result<Self> {
        let probe = Self {
            eve_dimension,
            components,
        };
        probe.validate()?;
        Ok(probe)
    }

    pub fn zeros(eve_dimension: usize) -> Self {
        Self {
            eve_dimension,
            components: vec![vec![r(0.0); eve_dimension]; 8],
        }
    }

    fn validate(&self) -> Result<()> {
        let d = self.eve_dimension;
        if d == 0 || d > MAX_PROBE_DIMENSION || !d.is_power_of_two() {
            return Err(Error::InvalidProbe(format!(
                "Eve dimension {d} must be a power of two between 1 and {MAX_PROBE_DIMENSION}"
            )));
        }
        if self.components.len() != 8 {
            return Err(Error::InvalidProbe(format!(
                "expected 8 components, got {}",
                self.components.len()
            )));
        }
        if let Some(i) = self.components.iter().position(|v| v.len() != d) {
            return Err(Error::InvalidProbe(format!("component {i:03b} does not have length {d}")));
        }
        Ok(())
    }

    pub fn eve_qubits(&self) -> usize {
        self.eve_dimension.trailing_zeros() as usize
    }
}

/// Labels of Eve's probe qubits: `E` for a single qubit, `E0, E1, ...`
/// otherwise.
pub fn probe_labels(eve_qubits: usize) -> Vec<String> {
    match eve_qubits {
        1 => vec![EVE_E.to_string()],
        m => (0..m).map(|i| format!("{EVE_E}{i}")).collect(),
    }
}

/// Per-component sign multipliers applied while assembling a probe state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SignPattern([i8; 8]);

impl SignPattern {
    pub fn new(signs: [i8; 8]) -> Result<Self> {
        if signs.iter().any(|s| *s != 1 && *s != -1) {
            return Err(Error::InvalidProbe(format!("signs must be +1 or -1, got {signs:?}")));
        }
        Ok(Self(signs))
    }

    pub fn uniform() -> Self {
        Self([1; 8])
    }

    pub fn signs(&self) -> [i8; 8] {
        self.0
    }
}

impl Default for SignPattern {
    fn default() -> Self {
        Self::uniform()
    }
}

/// Normalized `sum_ijk s_ijk |ijk>_ABC |e_ijk>_E`.
pub fn build_probe_state(spec: &ProbeState, signs: &SignPattern) -> Result<StateVector> {
    spec.validate()?;
    let d = spec.eve_dimension;
    let mut amplitudes = Vec::with_capacity(8 * d);
    for (component, sign) in spec.components.iter().zip(signs.0) {
        amplitudes.extend(component.iter().map(|e| e * f64::from(sign)));
    }
    let mut labels: Vec<String> = ROLES.iter().map(|s| s.to_string()).collect();
    labels.extend(probe_labels(spec.eve_qubits()));
    StateVector::normalized(&labels, amplitudes).map_err(|e| match e {
        crate::QsimError::ZeroVector => Error::InvalidProbe("all components are zero".into()),
        other => other.into(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Separability {
    SeparableGhz,
    Tampered,
}

impl Separability {
    pub fn as_str(self) -> &'static str {
        match self {
            Separability::SeparableGhz => "SEPARABLE-GHZ",
            Separability::Tampered => "TAMPERED",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeparabilityReport {
    pub verdict: Separability,
    /// `<XXX>, <YXY>, <YYX>, <XYY>`
    pub parities: [f64; 4],
    pub ghz_fidelity: f64,
}

/// Classifies a joint state by its four parity values and reports its GHZ
/// fidelity on `A,B,C`.
pub fn check_probe_separability(joint: &StateVector, tol: f64) -> Result<SeparabilityReport> {
    for role in ROLES {
        if !joint.has_label(role) {
            return Err(Error::Precondition(format!("joint state has no `{role}` qubit")));
        }
    }
    let parities = parity_expectations(joint)?;
    let ghz = crate::protocol::channel_ghz();
    let ghz_fidelity = if joint.num_qubits() == 3 {
        ghz.inner(&joint.reorder(&ROLES)?)?.norm_sqr()
    } else {
        joint.projection_fidelity(&ghz)?
    };
    let passes = parities
        .iter()
        .zip(ParityOperator::ALL)
        .all(|(v, op)| (v - f64::from(op.honest_value())).abs() <= tol);
    Ok(SeparabilityReport {
        verdict: if passes {
            Separability::SeparableGhz
        } else {
            Separability::Tampered
        },
        parities,
        ghz_fidelity,
    })
}

/// Projects `state` onto the joint eigenspace of the four parity operators
/// with the ideal eigenvalues, via the product of `(I + v P)/2`. Returns
/// `None` when the projection vanishes.
pub fn project_to_parity_class(state: &StateVector) -> Result<Option<StateVector>> {
    let mut amplitudes = state.amplitudes().to_vec();
    for op in ParityOperator::ALL {
        let current = StateVector::normalized(state.labels(), amplitudes.clone());
        let current = match current {
            Ok(s) => s,
            Err(crate::QsimError::ZeroVector) => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let flipped = op.pauli().apply(&current)?;
        let v = f64::from(op.honest_value());
        amplitudes = current
            .amplitudes()
            .iter()
            .zip(flipped.amplitudes())
            .map(|(a, pa)| (a + pa * v) * 0.5)
            .collect();
    }
    let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-9 {
        return Ok(None);
    }
    Ok(Some(StateVector::normalized(state.labels(), amplitudes)?))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectionPoint {
    pub k: usize,
    pub trials: usize,
    pub detections: usize,
}

impl DetectionPoint {
    pub fn probability(&self) -> f64 {
        self.detections as f64 / self.trials as f64
    }
}

/// For each `k` in `1..=k_max`, the fraction of `trials` in which at least
/// one of `k` Z-tested triplets shows unequal outcomes.
pub fn detection_curve<R: Rng + ?Sized>(
    source: &ChannelSource,
    k_max: usize,
    trials: usize,
    rng: &mut R,
) -> Result<Vec<DetectionPoint>> {
    if k_max == 0 {
        return Err(Error::TooFewSamples { min: 1, got: 0 });
    }
    if trials == 0 {
        return Err(Error::TooFewSamples { min: 1, got: 0 });
    }
    let mut curve = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let mut detections = 0;
        for _ in 0..trials {
            for _ in 0..k {
                if !z_all_equal(&source.sample(rng)?, rng)? {
                    detections += 1;
                    break;
                }
            }
        }
        curve.push(DetectionPoint { k, trials, detections });
    }
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    fn ghz_with_probe(e: Vec<Complex64>, relative_sign: i8) -> StateVector {
        let mut probe = ProbeState::zeros(e.len());
        probe.components[0] = e.clone();
        probe.components[7] = e;
        build_probe_state(&probe, &SignPattern::new([1, 1, 1, 1, 1, 1, 1, relative_sign]).unwrap())
            .unwrap()
    }

    #[test]
    fn honest_source_is_ghz() {
        let s = ChannelSource::honest().sample(&mut stream_rng(0, 0)).unwrap();
        assert!(s.approx_eq(&crate::protocol::channel_ghz(), 0.0));
    }

    #[test]
    fn probe_with_equal_components_is_product() {
        let joint = ghz_with_probe(vec![r(1.0), r(0.0)], -1);
        let expected = crate::protocol::channel_ghz()
            .tensor(&StateVector::zero_state(&[EVE_E]).unwrap())
            .unwrap();
        assert!(joint.approx_eq(&expected, 1e-12));
        let report = check_probe_separability(&joint, 1e-10).unwrap();
        assert_eq!(report.verdict, Separability::SeparableGhz);
        assert!((report.ghz_fidelity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn probe_validation() {
        assert!(matches!(
            build_probe_state(&ProbeState::zeros(2), &SignPattern::uniform()),
            Err(Error::InvalidProbe(_))
        ));
        assert!(ProbeState::new(3, vec![vec![r(1.0); 3]; 8]).is_err());
        assert!(ProbeState::new(32, vec![vec![r(1.0); 32]; 8]).is_err());
        assert!(ProbeState::new(2, vec![vec![r(1.0); 2]; 7]).is_err());
        assert!(SignPattern::new([1, 1, 1, 1, 1, 1, 1, 0]).is_err());
    }

    #[test]
    fn dimension_one_probe_has_no_eve_qubits() {
        let mut probe = ProbeState::zeros(1);
        probe.components[0] = vec![r(1.0)];
        probe.components[7] = vec![r(-1.0)];
        let s = build_probe_state(&probe, &SignPattern::uniform()).unwrap();
        assert_eq!(s.num_qubits(), 3);
        let report = check_probe_separability(&s, 1e-10).unwrap();
        assert_eq!(report.verdict, Separability::SeparableGhz);
        assert!((report.ghz_fidelity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn four_probe_qubits_are_labeled() {
        assert_eq!(probe_labels(4), vec!["E0", "E1", "E2", "E3"]);
        assert_eq!(probe_labels(1), vec!["E"]);
    }

    #[test]
    fn intercept_basis_order() {
        let basis = intercept_basis([BOB, CHARLIE, EVE_E]);
        let names: Vec<&str> = basis.names().collect();
        assert_eq!(
            names,
            ["000-111", "000+111", "001-110", "001+110", "010-101", "010+101", "100-011", "100+011"]
        );
    }

    #[test]
    fn intercept_rejects_non_ghz() {
        let eve = prepare_ghz([EVE_E, EVE_F, EVE_G]).unwrap();
        let bad = StateVector::zero_state(&[ALICE, BOB, CHARLIE]).unwrap();
        assert!(matches!(
            eve_ghz_intercept(&bad, &eve, &mut stream_rng(0, 0)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn intercept_on_other_pairs() {
        let source = ChannelSource::ghz_intercept_on([ALICE, BOB]).unwrap();
        let p = z_all_equal_probability(&source).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
        assert!(ChannelSource::ghz_intercept_on([BOB, BOB]).is_err());
        assert!(ChannelSource::ghz_intercept_on([BOB, "Q"]).is_err());
    }

    #[test]
    fn honest_z_test_never_fails() {
        let stats = z_basis_test(&ChannelSource::honest(), 500, &mut stream_rng(2, 0)).unwrap();
        assert_eq!(stats.fraction(), 1.0);
        assert!(matches!(
            z_basis_test(&ChannelSource::honest(), 0, &mut stream_rng(2, 0)),
            Err(Error::TooFewSamples { .. })
        ));
    }

    #[test]
    fn parity_needs_four_samples() {
        assert!(parity_test(&ChannelSource::honest(), 3, &mut stream_rng(0, 0)).is_err());
        let stats = parity_test(&ChannelSource::honest(), 400, &mut stream_rng(0, 0)).unwrap();
        assert_eq!(stats.violations(), 0);
        assert!(stats.deviating_operators().is_empty());
        assert_eq!(stats.tallies.values().map(|t| t.samples).sum::<usize>(), 400);
    }

    #[test]
    fn allowed_triples_match_listed_sets() {
        let mut xxx = ParityOperator::Xxx.allowed_triples();
        xxx.sort();
        let mut listed = vec![[-1, -1, -1], [-1, 1, 1], [1, -1, 1], [1, 1, -1]];
        listed.sort();
        assert_eq!(xxx, listed);
        let mut yxy = ParityOperator::Yxy.allowed_triples();
        yxy.sort();
        let mut listed = vec![[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]];
        listed.sort();
        assert_eq!(yxy, listed);
    }

    #[test]
    fn intercept_is_detected() {
        let source = ChannelSource::ghz_intercept();
        let z = z_basis_test(&source, 2000, &mut stream_rng(4, 0)).unwrap();
        let parity = parity_test(&source, 2000, &mut stream_rng(4, 1)).unwrap();
        let a = assess_channel(&z, &parity);
        assert_eq!(a.verdict, ChannelVerdict::EavesdropperDetected);
        assert!(a.z_violations > 0);
    }

    #[test]
    fn exact_means_under_intercept_are_zero() {
        let means = exact_parity_means(&ChannelSource::ghz_intercept()).unwrap();
        for m in means {
            assert!(m.abs() < 1e-12);
        }
        let honest = exact_parity_means(&ChannelSource::honest()).unwrap();
        assert_eq!(honest.map(|v| v.round()), [-1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn detection_curve_honest_is_zero() {
        let curve = detection_curve(&ChannelSource::honest(), 3, 100, &mut stream_rng(0, 0)).unwrap();
        assert_eq!(curve.len(), 3);
        assert!(curve.iter().all(|p| p.detections == 0));
        assert!(detection_curve(&ChannelSource::honest(), 0, 100, &mut stream_rng(0, 0)).is_err());
        assert!(detection_curve(&ChannelSource::honest(), 2, 0, &mut stream_rng(0, 0)).is_err());
    }

    #[test]
    fn missing_role_label() {
        let s = StateVector::zero_state(&[ALICE, BOB, "X"]).unwrap();
        assert!(matches!(check_probe_separability(&s, 1e-8), Err(Error::Precondition(_))));
    }

    #[test]
    fn projection_lands_in_class() {
        let labels = [ALICE, BOB, CHARLIE, EVE_E];
        let amps = (0..16).map(|i| Complex64::new((i as f64).sin(), (i as f64 * 0.7).cos())).collect();
        let s = StateVector::normalized(&labels, amps).unwrap();
        let projected = project_to_parity_class(&s).unwrap().unwrap();
        let report = check_probe_separability(&projected, 1e-10).unwrap();
        assert_eq!(report.verdict, Separability::SeparableGhz);
        assert!((report.ghz_fidelity - 1.0).abs() < 1e-10);
    }
}
