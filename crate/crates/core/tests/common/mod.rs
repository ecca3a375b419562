#![allow(dead_code)]

use cdsc::qsim::{StateVector, UnitaryGate};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_amplitudes<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Complex64> {
    (0..n).map(|_| gaussian(rng)).collect()
}

pub fn random_state<R: Rng + ?Sized>(labels: &[&str], rng: &mut R) -> StateVector {
    StateVector::normalized(labels, random_amplitudes(1 << labels.len(), rng)).unwrap()
}

/// Unitary from Gram-Schmidt on the columns of a complex Gaussian matrix.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> UnitaryGate {
    let mut cols: Vec<Vec<Complex64>> = (0..dim).map(|_| random_amplitudes(dim, rng)).collect();
    for j in 0..dim {
        for k in 0..j {
            let ip: Complex64 = (0..dim).map(|i| cols[k][i].conj() * cols[j][i]).sum();
            for i in 0..dim {
                let v = cols[k][i] * ip;
                cols[j][i] -= v;
            }
        }
        let norm = cols[j].iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        cols[j].iter_mut().for_each(|a| *a /= norm);
    }
    let entries = (0..dim * dim).map(|i| cols[i % dim][i / dim]).collect();
    UnitaryGate::new(dim, entries).unwrap()
}

/// State from `(bitstring, coefficient)` terms, bits MSB-first in label
/// order. Coefficients are used as given.
pub fn ket(labels: &[&str], terms: &[(&str, f64)]) -> StateVector {
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << labels.len()];
    for (bits, coeff) in terms {
        assert_eq!(bits.len(), labels.len());
        let index = usize::from_str_radix(bits, 2).unwrap();
        amps[index] += Complex64::new(*coeff, 0.0);
    }
    StateVector::from_amplitudes(labels, amps).unwrap()
}

pub fn bit(index: usize, position: usize, num_qubits: usize) -> usize {
    (index >> (num_qubits - 1 - position)) & 1
}
