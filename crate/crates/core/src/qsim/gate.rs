use num_complex::Complex64;

use super::{c, r, QsimError, FRAC_1_SQRT_2, INVARIANT_TOL};

/// A 2x2 or 4x4 unitary matrix, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryGate {
    dimension: usize,
    entries: Vec<Complex64>,
}

impl UnitaryGate {
    pub fn new(dimension: usize, entries: Vec<Complex64>) -> Result<Self, QsimError> {
        if dimension != 2 && dimension != 4 {
            return Err(QsimError::UnsupportedGateDimension(dimension));
        }
        if entries.len() != dimension * dimension {
            return Err(QsimError::DimensionMismatch {
                expected: dimension * dimension,
                got: entries.len(),
            });
        }
        let gate = Self { dimension, entries };
        let deviation = gate.unitarity_deviation();
        if deviation > INVARIANT_TOL {
            return Err(QsimError::NotUnitary(deviation));
        }
        Ok(gate)
    }

    fn fixed(entries: [Complex64; 4]) -> Self {
        Self {
            dimension: 2,
            entries: entries.to_vec(),
        }
    }

    pub fn identity() -> Self {
        Self::fixed([r(1.0), r(0.0), r(0.0), r(1.0)])
    }

    pub fn pauli_x() -> Self {
        Self::fixed([r(0.0), r(1.0), r(1.0), r(0.0)])
    }

    pub fn pauli_y() -> Self {
        Self::fixed([r(0.0), c(0.0, -1.0), c(0.0, 1.0), r(0.0)])
    }

    /// `|0><0| - |1><1|`
    pub fn pauli_z() -> Self {
        Self::fixed([r(1.0), r(0.0), r(0.0), r(-1.0)])
    }

    pub fn hadamard() -> Self {
        let h = FRAC_1_SQRT_2;
        Self::fixed([r(h), r(h), r(h), r(-h)])
    }

    /// Entry-wise scalar multiple; the factor must have unit modulus.
    pub fn scaled(&self, factor: Complex64) -> Result<Self, QsimError> {
        Self::new(self.dimension, self.entries.iter().map(|e| e * factor).collect())
    }

    pub fn cnot() -> Self {
        let (o, z) = (r(1.0), r(0.0));
        Self {
            dimension: 4,
            entries: vec![o, z, z, z, z, o, z, z, z, z, z, o, z, z, o, z],
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dimension + col]
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dimension;
        let entries = (0..d * d).map(|i| self.entry(i % d, i / d).conj()).collect();
        Self { dimension: d, entries }
    }

    /// Matrix product `self * other`, i.e. `other` acts first.
    pub fn compose(&self, other: &UnitaryGate) -> Result<Self, QsimError> {
        if self.dimension != other.dimension {
            return Err(QsimError::DimensionMismatch {
                expected: self.dimension,
                got: other.dimension,
            });
        }
        let d = self.dimension;
        let entries = (0..d * d)
            .map(|i| {
                let (row, col) = (i / d, i % d);
                (0..d).map(|k| self.entry(row, k) * other.entry(k, col)).sum()
            })
            .collect();
        Ok(Self { dimension: d, entries })
    }

    /// Largest entry-wise deviation of `U^dagger U` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        let d = self.dimension;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let v: Complex64 = (0..d).map(|k| self.entry(k, i).conj() * self.entry(k, j)).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((v - target).norm());
            }
        }
        worst
    }

    pub fn approx_eq(&self, other: &UnitaryGate, tol: f64) -> bool {
        self.dimension == other.dimension
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| (a - b).norm() <= tol)
    }
}
