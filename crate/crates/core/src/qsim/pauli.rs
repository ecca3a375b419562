use std::fmt;

use num_complex::Complex64;

use super::{QsimError, StateVector, UnitaryGate};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(ch: char) -> Result<Self, QsimError> {
        match ch.to_ascii_uppercase() {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            other => Err(QsimError::InvalidPauliLetter(other)),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn gate(self) -> UnitaryGate {
        match self {
            Pauli::I => UnitaryGate::identity(),
            Pauli::X => UnitaryGate::pauli_x(),
            Pauli::Y => UnitaryGate::pauli_y(),
            Pauli::Z => UnitaryGate::pauli_z(),
        }
    }
}

/// Tensor product of Pauli letters on a subset of labels; identity elsewhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PauliString {
    factors: Vec<(String, Pauli)>,
}

impl PauliString {
    pub fn new<S: AsRef<str>>(factors: &[(S, Pauli)]) -> Result<Self, QsimError> {
        let mut out: Vec<(String, Pauli)> = Vec::with_capacity(factors.len());
        for (label, p) in factors {
            let label = label.as_ref();
            if out.iter().any(|(l, _)| l == label) {
                return Err(QsimError::DuplicateLabel(label.to_string()));
            }
            out.push((label.to_string(), *p));
        }
        if out.iter().all(|(_, p)| *p == Pauli::I) {
            return Err(QsimError::IdentityPauli);
        }
        Ok(Self { factors: out })
    }

    /// `PauliString::parse("XYY", &["A", "B", "C"])`
    pub fn parse<S: AsRef<str>>(letters: &str, labels: &[S]) -> Result<Self, QsimError> {
        let chars: Vec<char> = letters.chars().collect();
        if chars.len() != labels.len() {
            return Err(QsimError::DimensionMismatch {
                expected: labels.len(),
                got: chars.len(),
            });
        }
        let factors = labels
            .iter()
            .zip(chars)
            .map(|(l, ch)| Ok((l.as_ref().to_string(), Pauli::from_char(ch)?)))
            .collect::<Result<Vec<_>, QsimError>>()?;
        Self::new(&factors)
    }

    pub fn factors(&self) -> &[(String, Pauli)] {
        &self.factors
    }

    /// `P|state>`
    pub fn apply(&self, state: &StateVector) -> Result<StateVector, QsimError> {
        let mut out = state.clone();
        for (label, p) in self.factors.iter().filter(|(_, p)| *p != Pauli::I) {
            out = out.apply_unitary(&p.gate(), &[label])?;
        }
        Ok(out)
    }

    /// `<state|P|state>` before discarding the imaginary part.
    pub fn expectation_complex(&self, state: &StateVector) -> Result<Complex64, QsimError> {
        state.inner(&self.apply(state)?)
    }

    pub fn expectation(&self, state: &StateVector) -> Result<f64, QsimError> {
        Ok(self.expectation_complex(state)?.re.clamp(-1.0, 1.0))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (label, p) in &self.factors {
            write!(f, "{}{}", p.as_char(), label)?;
        }
        Ok(())
    }
}
