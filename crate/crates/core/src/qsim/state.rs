use num_complex::Complex64;

use super::{complement, offset_table, QsimError, UnitaryGate, INVARIANT_TOL, MAX_QUBITS};

/// Normalized pure state over a register of labeled qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    labels: Vec<String>,
    amplitudes: Vec<Complex64>,
}

fn check_labels<S: AsRef<str>>(labels: &[S]) -> Result<Vec<String>, QsimError> {
    if labels.is_empty() {
        return Err(QsimError::NoLabels);
    }
    if labels.len() > MAX_QUBITS {
        return Err(QsimError::TooManyQubits(labels.len()));
    }
    let mut out: Vec<String> = Vec::with_capacity(labels.len());
    for label in labels {
        let label = label.as_ref();
        if out.iter().any(|l| l == label) {
            return Err(QsimError::DuplicateLabel(label.to_string()));
        }
        out.push(label.to_string());
    }
    Ok(out)
}

impl StateVector {
    /// `|0...0>` over the given labels.
    pub fn zero_state<S: AsRef<str>>(labels: &[S]) -> Result<Self, QsimError> {
        let labels = check_labels(labels)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << labels.len()];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(Self { labels, amplitudes })
    }

    /// Wraps amplitudes that must already be normalized within [`INVARIANT_TOL`].
    pub fn from_amplitudes<S: AsRef<str>>(
        labels: &[S],
        amplitudes: Vec<Complex64>,
    ) -> Result<Self, QsimError> {
        let state = Self::unchecked(labels, amplitudes)?;
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > INVARIANT_TOL {
            return Err(QsimError::NotNormalized(norm));
        }
        Ok(state)
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized<S: AsRef<str>>(
        labels: &[S],
        amplitudes: Vec<Complex64>,
    ) -> Result<Self, QsimError> {
        let mut state = Self::unchecked(labels, amplitudes)?;
        let norm = state.norm_sqr().sqrt();
        if norm < f64::EPSILON {
            return Err(QsimError::ZeroVector);
        }
        state.amplitudes.iter_mut().for_each(|a| *a /= norm);
        Ok(state)
    }

    fn unchecked<S: AsRef<str>>(
        labels: &[S],
        amplitudes: Vec<Complex64>,
    ) -> Result<Self, QsimError> {
        let labels = check_labels(labels)?;
        let expected = 1usize << labels.len();
        if amplitudes.len() != expected {
            return Err(QsimError::DimensionMismatch {
                expected,
                got: amplitudes.len(),
            });
        }
        Ok(Self { labels, amplitudes })
    }

    pub fn num_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn has_label(&self, label: &str) -> bool {
        self.labels.iter().any(|l| l == label)
    }

    pub fn position(&self, label: &str) -> Result<usize, QsimError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| QsimError::UnknownLabel(label.to_string()))
    }

    pub(crate) fn positions<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<usize>, QsimError> {
        let mut out: Vec<usize> = Vec::with_capacity(labels.len());
        for label in labels {
            let p = self.position(label.as_ref())?;
            if out.contains(&p) {
                return Err(QsimError::DuplicateLabel(label.as_ref().to_string()));
            }
            out.push(p);
        }
        Ok(out)
    }

    /// Applies a one- or two-qubit gate; the first target is the gate's most
    /// significant qubit.
    pub fn apply_unitary<S: AsRef<str>>(
        &self,
        gate: &UnitaryGate,
        targets: &[S],
    ) -> Result<Self, QsimError> {
        let positions = self.positions(targets)?;
        if gate.dimension() != 1 << positions.len() {
            return Err(QsimError::DimensionMismatch {
                expected: 1 << positions.len(),
                got: gate.dimension(),
            });
        }
        let n = self.num_qubits();
        let target_offsets = offset_table(n, &positions);
        let rest_offsets = offset_table(n, &complement(n, &positions));
        let dim = gate.dimension();
        let mut out = self.amplitudes.clone();
        let mut local = vec![Complex64::new(0.0, 0.0); dim];
        for &base in &rest_offsets {
            for (slot, &off) in local.iter_mut().zip(&target_offsets) {
                *slot = self.amplitudes[base + off];
            }
            for (row, &off) in target_offsets.iter().enumerate() {
                out[base + off] = (0..dim).map(|col| gate.entry(row, col) * local[col]).sum();
            }
        }
        Ok(Self {
            labels: self.labels.clone(),
            amplitudes: out,
        })
    }

    /// Kronecker product; labels are `self` followed by `other`.
    pub fn tensor(&self, other: &StateVector) -> Result<Self, QsimError> {
        if let Some(shared) = self.labels.iter().find(|l| other.has_label(l)) {
            return Err(QsimError::OverlappingLabels(shared.clone()));
        }
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        if labels.len() > MAX_QUBITS {
            return Err(QsimError::TooManyQubits(labels.len()));
        }
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        Ok(Self { labels, amplitudes })
    }

    /// Same physical state with the qubits listed in a new order.
    pub fn reorder<S: AsRef<str>>(&self, order: &[S]) -> Result<Self, QsimError> {
        if order.len() != self.num_qubits() {
            return Err(self.mismatch(order));
        }
        let positions = self.positions(order)?;
        let n = self.num_qubits();
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        for (new_index, slot) in amplitudes.iter_mut().enumerate() {
            let old_index = positions
                .iter()
                .enumerate()
                .filter(|(j, _)| new_index >> (n - 1 - j) & 1 == 1)
                .map(|(_, &p)| 1usize << (n - 1 - p))
                .sum::<usize>();
            *slot = self.amplitudes[old_index];
        }
        Ok(Self {
            labels: positions.iter().map(|&p| self.labels[p].clone()).collect(),
            amplitudes,
        })
    }

    fn mismatch<S: AsRef<str>>(&self, other: &[S]) -> QsimError {
        QsimError::LabelMismatch {
            left: self.labels.clone(),
            right: other.iter().map(|s| s.as_ref().to_string()).collect(),
        }
    }

    /// `<self|other>`; both states must carry identical label lists.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64, QsimError> {
        if self.labels != other.labels {
            return Err(self.mismatch(&other.labels));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn equal_up_to_global_phase(&self, other: &StateVector, tol: f64) -> Result<bool, QsimError> {
        Ok(self.inner(other)?.norm() >= 1.0 - tol)
    }

    /// Component-wise comparison, sensitive to global phase.
    pub fn approx_eq(&self, other: &StateVector, tol: f64) -> bool {
        self.labels == other.labels
            && self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .all(|(a, b)| (a - b).norm() <= tol)
    }

    /// `|| (<reference| (x) I) |self> ||^2` where `reference` lives on a strict
    /// subset of this state's labels. This is the fidelity of the reduced
    /// state of that subset with the reference.
    pub fn projection_fidelity(&self, reference: &StateVector) -> Result<f64, QsimError> {
        if reference.num_qubits() >= self.num_qubits()
            || reference.labels.iter().any(|l| !self.has_label(l))
        {
            return Err(QsimError::NotStrictSubset(reference.labels.clone()));
        }
        let remainder = self.contract(&reference.labels, &reference.amplitudes)?;
        Ok(remainder.iter().map(|a| a.norm_sqr()).sum())
    }

    /// Unnormalized amplitudes of `(<v| (x) I) |self>` over the labels not in
    /// `targets`, in their original relative order.
    pub(crate) fn contract<S: AsRef<str>>(
        &self,
        targets: &[S],
        vector: &[Complex64],
    ) -> Result<Vec<Complex64>, QsimError> {
        let positions = self.positions(targets)?;
        let n = self.num_qubits();
        let target_offsets = offset_table(n, &positions);
        let rest_offsets = offset_table(n, &complement(n, &positions));
        Ok(rest_offsets
            .iter()
            .map(|&base| {
                target_offsets
                    .iter()
                    .zip(vector)
                    .map(|(&off, v)| v.conj() * self.amplitudes[base + off])
                    .sum()
            })
            .collect())
    }

    pub(crate) fn labels_without(&self, targets: &[usize]) -> Vec<String> {
        complement(self.num_qubits(), targets)
            .into_iter()
            .map(|p| self.labels[p].clone())
            .collect()
    }

    pub(crate) fn from_parts(labels: Vec<String>, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(amplitudes.len(), 1 << labels.len());
        Self { labels, amplitudes }
    }
}
