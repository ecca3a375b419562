//! Controlled teleportation of message bits over GHZ triplets.
//!
//! Per bit: Alice prepares the signal qubit `D` as `|+>` (bit 1) or `|->`
//! (bit 0), Bell-measures `D,A` against Alice's share of a fresh channel
//! triplet and broadcasts two classical bits. Bob and Charlie bring `B,C`
//! into the common form `(|00> + b|11>)/sqrt2`. Charlie then measures `C` in
//! the X basis and sends one bit to Bob, who fixes up `B` and reads the
//! message bit in the X basis.

use std::fmt;

use rand::Rng;
use sha2::{Digest, Sha256};

use crate::qsim::{c, r, OrthonormalBasis, StateVector, UnitaryGate, FRAC_1_SQRT_2};
use crate::security::ChannelSource;
use crate::{Error, Result};

pub const SIGNAL: &str = "D";
pub const ALICE: &str = "A";
pub const BOB: &str = "B";
pub const CHARLIE: &str = "C";

/// A message bit together with its phase sign `b`: 1 <-> +1, 0 <-> -1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SignalBit(bool);

impl SignalBit {
    pub fn new(bit: u8) -> Result<Self> {
        match bit {
            0 => Ok(Self(false)),
            1 => Ok(Self(true)),
            other => Err(Error::InvalidBit(other)),
        }
    }

    pub fn bit(self) -> u8 {
        self.0 as u8
    }

    pub fn sign(self) -> f64 {
        if self.0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// Alice's Bell-measurement result on `D,A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BellOutcome {
    /// `(|00> + |11>)/sqrt2`, sent as `00`
    PhiPlus,
    /// `(|00> - |11>)/sqrt2`, sent as `01`
    PhiMinus,
    /// `(|01> + |10>)/sqrt2`, sent as `10`
    PsiPlus,
    /// `(|01> - |10>)/sqrt2`, sent as `11`
    PsiMinus,
}

impl BellOutcome {
    pub const ALL: [BellOutcome; 4] = [
        BellOutcome::PhiPlus,
        BellOutcome::PhiMinus,
        BellOutcome::PsiPlus,
        BellOutcome::PsiMinus,
    ];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn bits(self) -> [u8; 2] {
        [self.code() >> 1, self.code() & 1]
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Self::ALL.get(code as usize).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            BellOutcome::PhiPlus => "PhiPlus",
            BellOutcome::PhiMinus => "PhiMinus",
            BellOutcome::PsiPlus => "PsiPlus",
            BellOutcome::PsiMinus => "PsiMinus",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|b| b.name() == name)
    }

    /// Two-qubit amplitudes of the Bell state, MSB first.
    pub fn amplitudes(self) -> [num_complex::Complex64; 4] {
        let h = FRAC_1_SQRT_2;
        let z = r(0.0);
        match self {
            BellOutcome::PhiPlus => [r(h), z, z, r(h)],
            BellOutcome::PhiMinus => [r(h), z, z, r(-h)],
            BellOutcome::PsiPlus => [z, r(h), r(h), z],
            BellOutcome::PsiMinus => [z, r(h), r(-h), z],
        }
    }
}

impl fmt::Display for BellOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Charlie's X-basis result on `C`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CharlieOutcome {
    /// `|+>`, sent as `0`
    Plus,
    /// `|->`, sent as `1`
    Minus,
}

impl CharlieOutcome {
    pub const ALL: [CharlieOutcome; 2] = [CharlieOutcome::Plus, CharlieOutcome::Minus];

    pub fn code(self) -> u8 {
        self as u8
    }

    fn basis_name(self) -> &'static str {
        match self {
            CharlieOutcome::Plus => "+",
            CharlieOutcome::Minus => "-",
        }
    }

    fn from_basis_name(name: &str) -> Self {
        if name == "+" {
            CharlieOutcome::Plus
        } else {
            CharlieOutcome::Minus
        }
    }
}

/// Local operations Bob (on `B`) and Charlie (on `C`) apply after hearing
/// Alice's Bell result.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrectionPair {
    pub bob_gate: UnitaryGate,
    pub charlie_gate: UnitaryGate,
}

/// Whether Charlie releases the measurement result to Bob.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Cooperation {
    #[default]
    Cooperative,
    Refused,
}

/// Classical messages exchanged while teleporting one bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BitRecord {
    pub bell: BellOutcome,
    pub charlie: Option<CharlieOutcome>,
    pub decoded: u8,
}

impl BitRecord {
    /// Alice's two broadcast bits followed by Charlie's bit, when sent.
    pub fn classical_bits(&self) -> Vec<u8> {
        let mut bits = self.bell.bits().to_vec();
        bits.extend(self.charlie.map(CharlieOutcome::code));
        bits
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SessionTranscript {
    pub records: Vec<BitRecord>,
}

impl SessionTranscript {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn recovered(&self) -> Vec<u8> {
        self.records.iter().map(|r| r.decoded).collect()
    }

    /// Three bytes per record: Bell code, Charlie code (`0xff` if withheld),
    /// decoded bit.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.records
            .iter()
            .flat_map(|r| [r.bell.code(), r.charlie.map_or(0xff, CharlieOutcome::code), r.decoded])
            .collect()
    }

    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_bytes()))
    }
}

/// `|+>` for 1, `|->` for 0, on qubit `D`.
pub fn encode_bit(bit: u8) -> Result<StateVector> {
    let b = SignalBit::new(bit)?.sign();
    Ok(StateVector::from_amplitudes(
        &[SIGNAL],
        vec![r(FRAC_1_SQRT_2), r(b * FRAC_1_SQRT_2)],
    )?)
}

pub fn encode_message(message: &[u8]) -> Result<Vec<StateVector>> {
    message.iter().map(|&b| encode_bit(b)).collect()
}

/// `(|000> - |111>)/sqrt2` on the three labels.
pub fn prepare_ghz<S: AsRef<str>>(labels: [S; 3]) -> Result<StateVector> {
    let mut amps = vec![r(0.0); 8];
    amps[0] = r(FRAC_1_SQRT_2);
    amps[7] = r(-FRAC_1_SQRT_2);
    Ok(StateVector::from_amplitudes(&labels, amps)?)
}

pub fn channel_ghz() -> StateVector {
    prepare_ghz([ALICE, BOB, CHARLIE]).expect("fixed labels are valid")
}

pub fn bell_basis(first: &str, second: &str) -> OrthonormalBasis {
    let elements = BellOutcome::ALL
        .iter()
        .map(|b| (b.name().to_string(), b.amplitudes().to_vec()))
        .collect();
    OrthonormalBasis::new(&[first, second], elements).expect("Bell basis is orthonormal")
}

/// Bell-measures `D,A`; returns the outcome and the normalized state of the
/// remaining qubits (`B,C` and any eavesdropper qubits).
pub fn alice_bell_measure<R: Rng + ?Sized>(
    joint: &StateVector,
    rng: &mut R,
) -> Result<(BellOutcome, StateVector)> {
    let m = bell_basis(SIGNAL, ALICE).measure_and_discard(joint, rng)?;
    let outcome = BellOutcome::from_name(&m.outcome).expect("outcome names come from the Bell basis");
    Ok((outcome, m.state))
}

/// Deterministic branch of [`alice_bell_measure`]: `(probability, remainder)`.
pub fn alice_bell_force(joint: &StateVector, outcome: BellOutcome) -> Result<(f64, StateVector)> {
    Ok(bell_basis(SIGNAL, ALICE).force_and_discard(joint, outcome.name())?)
}

/// The correction table, operators applied verbatim as matrices.
pub fn corrections_for_bell(outcome: BellOutcome) -> CorrectionPair {
    let identity = UnitaryGate::identity;
    let build = |e: [f64; 4]| {
        UnitaryGate::new(2, e.iter().map(|&x| r(x)).collect()).expect("correction is unitary")
    };
    match outcome {
        BellOutcome::PhiPlus => CorrectionPair {
            bob_gate: identity(),
            charlie_gate: build([1.0, 0.0, 0.0, -1.0]),
        },
        BellOutcome::PhiMinus => CorrectionPair {
            bob_gate: identity(),
            charlie_gate: identity(),
        },
        BellOutcome::PsiPlus => CorrectionPair {
            bob_gate: build([0.0, 1.0, 1.0, 0.0]),
            charlie_gate: build([0.0, -1.0, 1.0, 0.0]),
        },
        BellOutcome::PsiMinus => CorrectionPair {
            bob_gate: build([0.0, -1.0, -1.0, 0.0]),
            charlie_gate: build([0.0, 1.0, 1.0, 0.0]),
        },
    }
}

pub fn apply_corrections(bc: &StateVector, pair: &CorrectionPair) -> Result<StateVector> {
    Ok(bc
        .apply_unitary(&pair.bob_gate, &[BOB])?
        .apply_unitary(&pair.charlie_gate, &[CHARLIE])?)
}

/// X-basis measurement of `C`; returns Charlie's result and the state of the
/// remaining qubits.
pub fn charlie_measure<R: Rng + ?Sized>(
    bc: &StateVector,
    rng: &mut R,
) -> Result<(CharlieOutcome, StateVector)> {
    let m = OrthonormalBasis::x_basis(CHARLIE).measure_and_discard(bc, rng)?;
    Ok((CharlieOutcome::from_basis_name(&m.outcome), m.state))
}

pub fn charlie_force(bc: &StateVector, outcome: CharlieOutcome) -> Result<(f64, StateVector)> {
    Ok(OrthonormalBasis::x_basis(CHARLIE).force_and_discard(bc, outcome.basis_name())?)
}

/// Bob's fix-up: identity on `|+>_C`, `|0><0| - |1><1|` on `|->_C`.
pub fn bob_correction(outcome: CharlieOutcome) -> UnitaryGate {
    match outcome {
        CharlieOutcome::Plus => UnitaryGate::identity(),
        CharlieOutcome::Minus => UnitaryGate::pauli_z(),
    }
}

/// Reads `B` in the X basis: `|+>` -> 1, `|->` -> 0.
pub fn bob_decode<R: Rng + ?Sized>(b_state: &StateVector, rng: &mut R) -> Result<u8> {
    let m = OrthonormalBasis::x_basis(BOB).measure(b_state, rng)?;
    Ok(u8::from(m.outcome == "+"))
}

fn signal_joint(bit: u8, channel: &StateVector) -> Result<StateVector> {
    Ok(encode_bit(bit)?.tensor(channel)?)
}

/// Teleports one bit through `channel` (labels `A,B,C` plus any
/// eavesdropper qubits).
pub fn teleport_bit<R: Rng + ?Sized>(
    bit: u8,
    channel: &StateVector,
    cooperation: Cooperation,
    rng: &mut R,
) -> Result<(u8, BitRecord)> {
    let joint = signal_joint(bit, channel)?;
    let (bell, rest) = alice_bell_measure(&joint, rng)?;
    let pair = corrections_for_bell(bell);
    let (bob_state, charlie) = match cooperation {
        Cooperation::Cooperative => {
            let common = apply_corrections(&rest, &pair)?;
            let (outcome, b) = charlie_measure(&common, rng)?;
            (b.apply_unitary(&bob_correction(outcome), &[BOB])?, Some(outcome))
        }
        // Charlie keeps the qubit and the result; Bob can only apply
        // the Bob half of Alice's correction.
        Cooperation::Refused => (rest.apply_unitary(&pair.bob_gate, &[BOB])?, None),
    };
    let decoded = bob_decode(&bob_state, rng)?;
    Ok((
        decoded,
        BitRecord {
            bell,
            charlie,
            decoded,
        },
    ))
}

/// Bob's state just before decoding on a fixed `(Bell, Charlie)` branch,
/// with the joint probability of that branch.
pub fn teleport_branch(
    bit: u8,
    channel: &StateVector,
    bell: BellOutcome,
    charlie: CharlieOutcome,
) -> Result<(f64, StateVector)> {
    let joint = signal_joint(bit, channel)?;
    let (p_bell, rest) = alice_bell_force(&joint, bell)?;
    let common = apply_corrections(&rest, &corrections_for_bell(bell))?;
    let (p_charlie, b) = charlie_force(&common, charlie)?;
    Ok((p_bell * p_charlie, b.apply_unitary(&bob_correction(charlie), &[BOB])?))
}

/// Sends `message` one bit at a time, drawing a fresh triplet from `source`
/// for every bit.
pub fn run_session<R: Rng + ?Sized>(
    message: &[u8],
    source: &ChannelSource,
    cooperation: Cooperation,
    rng: &mut R,
) -> Result<(Vec<u8>, SessionTranscript)> {
    let mut transcript = SessionTranscript::default();
    for &bit in message {
        let channel = source.sample(rng)?;
        let (_, record) = teleport_bit(bit, &channel, cooperation, rng)?;
        transcript.records.push(record);
    }
    Ok((transcript.recovered(), transcript))
}

/// Signal state `(|0> + b|1>)/sqrt2` on `label`.
pub fn signal_state(bit: u8, label: &str) -> Result<StateVector> {
    let b = SignalBit::new(bit)?.sign();
    Ok(StateVector::from_amplitudes(
        &[label],
        vec![r(FRAC_1_SQRT_2), c(b * FRAC_1_SQRT_2, 0.0)],
    )?)
}

/// Common form `(|00> + b|11>)/sqrt2` on `B,C`.
pub fn common_form(bit: u8) -> Result<StateVector> {
    let b = SignalBit::new(bit)?.sign();
    let mut amps = vec![r(0.0); 4];
    amps[0] = r(FRAC_1_SQRT_2);
    amps[3] = r(b * FRAC_1_SQRT_2);
    Ok(StateVector::from_amplitudes(&[BOB, CHARLIE], amps)?)
}
