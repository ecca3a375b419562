use num_complex::Complex64;
use rand::Rng;

use super::{c, r, QsimError, StateVector, FRAC_1_SQRT_2, INVARIANT_TOL, ZERO_PROBABILITY};

/// A complete orthonormal basis on `k` named qubits, each element carrying a
/// display name used as the measurement outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthonormalBasis {
    targets: Vec<String>,
    elements: Vec<(String, Vec<Complex64>)>,
}

/// Result of a projective measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct Measurement {
    pub outcome: String,
    pub index: usize,
    pub probability: f64,
    pub state: StateVector,
}

impl OrthonormalBasis {
    pub fn new<S: AsRef<str>>(
        targets: &[S],
        elements: Vec<(String, Vec<Complex64>)>,
    ) -> Result<Self, QsimError> {
        let targets: Vec<String> = targets.iter().map(|t| t.as_ref().to_string()).collect();
        if targets.is_empty() {
            return Err(QsimError::NoLabels);
        }
        for (i, t) in targets.iter().enumerate() {
            if targets[..i].contains(t) {
                return Err(QsimError::DuplicateLabel(t.clone()));
            }
        }
        let dim = 1usize << targets.len();
        if elements.len() != dim {
            return Err(QsimError::NotOrthonormal(format!(
                "{} elements for a {dim}-dimensional space",
                elements.len()
            )));
        }
        for (i, (name, v)) in elements.iter().enumerate() {
            if v.len() != dim {
                return Err(QsimError::DimensionMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
            if elements[..i].iter().any(|(n, _)| n == name) {
                return Err(QsimError::NotOrthonormal(format!("duplicate outcome name `{name}`")));
            }
            for (j, (other_name, w)) in elements.iter().enumerate().take(i + 1) {
                let ip: Complex64 = w.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                if (ip - target).norm() > INVARIANT_TOL {
                    return Err(QsimError::NotOrthonormal(format!(
                        "<{other_name}|{name}> = {ip}"
                    )));
                }
            }
        }
        Ok(Self { targets, elements })
    }

    /// Z basis with outcomes `0` and `1`.
    pub fn computational(label: &str) -> Self {
        Self {
            targets: vec![label.to_string()],
            elements: vec![
                ("0".into(), vec![r(1.0), r(0.0)]),
                ("1".into(), vec![r(0.0), r(1.0)]),
            ],
        }
    }

    /// X eigenbasis `|+>, |->` with outcomes `+` and `-`.
    pub fn x_basis(label: &str) -> Self {
        let h = FRAC_1_SQRT_2;
        Self {
            targets: vec![label.to_string()],
            elements: vec![
                ("+".into(), vec![r(h), r(h)]),
                ("-".into(), vec![r(h), r(-h)]),
            ],
        }
    }

    /// Y eigenbasis `(|0> +- i|1>)/sqrt2` with outcomes `+` and `-`.
    pub fn y_basis(label: &str) -> Self {
        let h = FRAC_1_SQRT_2;
        Self {
            targets: vec![label.to_string()],
            elements: vec![
                ("+".into(), vec![r(h), c(0.0, h)]),
                ("-".into(), vec![r(h), c(0.0, -h)]),
            ],
        }
    }

    pub fn targets(&self) -> &[String] {
        &self.targets
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.elements.iter().map(|(n, _)| n.as_str())
    }

    pub fn element(&self, index: usize) -> (&str, &[Complex64]) {
        let (n, v) = &self.elements[index];
        (n, v)
    }

    pub fn index_of(&self, name: &str) -> Result<usize, QsimError> {
        self.elements
            .iter()
            .position(|(n, _)| n == name)
            .ok_or_else(|| QsimError::UnknownOutcome(name.to_string()))
    }

    /// Unnormalized remainder of `state` after projecting the targets onto
    /// element `index`.
    fn remainder(&self, state: &StateVector, index: usize) -> Result<Vec<Complex64>, QsimError> {
        state.contract(&self.targets, &self.elements[index].1)
    }

    /// Probability of each element, in basis order.
    pub fn probabilities(&self, state: &StateVector) -> Result<Vec<f64>, QsimError> {
        (0..self.len())
            .map(|i| Ok(self.remainder(state, i)?.iter().map(|a| a.norm_sqr()).sum()))
            .collect()
    }

    fn check_forceable(&self, index: usize, probability: f64) -> Result<(), QsimError> {
        if probability < ZERO_PROBABILITY {
            return Err(QsimError::ZeroProbability {
                outcome: self.elements[index].0.clone(),
                probability,
            });
        }
        Ok(())
    }

    /// Projects onto the named element without sampling. The returned state
    /// keeps every label, with the targets set to the basis element.
    pub fn force_outcome(
        &self,
        state: &StateVector,
        name: &str,
    ) -> Result<(f64, StateVector), QsimError> {
        let index = self.index_of(name)?;
        self.force_index(state, index)
    }

    fn force_index(&self, state: &StateVector, index: usize) -> Result<(f64, StateVector), QsimError> {
        let rest = self.remainder(state, index)?;
        let probability: f64 = rest.iter().map(|a| a.norm_sqr()).sum();
        self.check_forceable(index, probability)?;
        let scale = probability.sqrt();
        let positions = state.positions(&self.targets)?;
        let n = state.num_qubits();
        let target_offsets = super::offset_table(n, &positions);
        let rest_offsets = super::offset_table(n, &super::complement(n, &positions));
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
        for (&base, a) in rest_offsets.iter().zip(&rest) {
            for (&off, b) in target_offsets.iter().zip(&self.elements[index].1) {
                amplitudes[base + off] = b * a / scale;
            }
        }
        Ok((
            probability,
            StateVector::from_parts(state.labels().to_vec(), amplitudes),
        ))
    }

    /// Like [`force_outcome`](Self::force_outcome), but the measured qubits
    /// are dropped and only the normalized state of the rest is returned.
    pub fn force_and_discard(
        &self,
        state: &StateVector,
        name: &str,
    ) -> Result<(f64, StateVector), QsimError> {
        let index = self.index_of(name)?;
        self.discard_index(state, index)
    }

    fn discard_index(&self, state: &StateVector, index: usize) -> Result<(f64, StateVector), QsimError> {
        let positions = state.positions(&self.targets)?;
        if positions.len() >= state.num_qubits() {
            return Err(QsimError::NotStrictSubset(self.targets.clone()));
        }
        let rest = self.remainder(state, index)?;
        let probability: f64 = rest.iter().map(|a| a.norm_sqr()).sum();
        self.check_forceable(index, probability)?;
        let scale = probability.sqrt();
        Ok((
            probability,
            StateVector::from_parts(
                state.labels_without(&positions),
                rest.into_iter().map(|a| a / scale).collect(),
            ),
        ))
    }

    fn sample<R: Rng + ?Sized>(&self, state: &StateVector, rng: &mut R) -> Result<usize, QsimError> {
        let probabilities = self.probabilities(state)?;
        let u: f64 = rng.random::<f64>() * probabilities.iter().sum::<f64>();
        let mut acc = 0.0;
        let mut last_nonzero = 0;
        for (i, p) in probabilities.iter().enumerate() {
            if *p < ZERO_PROBABILITY {
                continue;
            }
            last_nonzero = i;
            acc += p;
            if u < acc {
                return Ok(i);
            }
        }
        Ok(last_nonzero)
    }

    /// Samples an outcome with Born-rule probabilities and collapses.
    pub fn measure<R: Rng + ?Sized>(
        &self,
        state: &StateVector,
        rng: &mut R,
    ) -> Result<Measurement, QsimError> {
        let index = self.sample(state, rng)?;
        let (probability, state) = self.force_index(state, index)?;
        Ok(Measurement {
            outcome: self.elements[index].0.clone(),
            index,
            probability,
            state,
        })
    }

    /// Samples an outcome and returns the state of the unmeasured qubits.
    pub fn measure_and_discard<R: Rng + ?Sized>(
        &self,
        state: &StateVector,
        rng: &mut R,
    ) -> Result<Measurement, QsimError> {
        let index = self.sample(state, rng)?;
        let (probability, state) = self.discard_index(state, index)?;
        Ok(Measurement {
            outcome: self.elements[index].0.clone(),
            index,
            probability,
            state,
        })
    }
}
