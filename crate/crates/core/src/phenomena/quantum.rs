//! Two-qubit states, log-negativity, and simulated σz⊗σz measurements.

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::PhenomenaError;
use crate::data::DataTable;

/// Entanglement as the common cause of the measurements and of `|C|`.
pub const MODEL: &str = "digraph {
    E -> absC;
    E -> M_A;
    E -> M_B;
    M_A -> absC;
    M_B -> absC;
}
";

pub const COLUMNS: [&str; 6] = ["state", "E", "M_A", "M_B", "C", "absC"];

const TOL: f64 = 1e-12;

/// A 4×4 Hermitian, unit-trace, positive semidefinite matrix in the basis
/// |00⟩, |01⟩, |10⟩, |11⟩ (first qubit is Alice's).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(Matrix4<Complex64>);

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

impl DensityMatrix {
    pub fn new(m: Matrix4<Complex64>) -> Result<Self, PhenomenaError> {
        let herm = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > TOL {
            return Err(PhenomenaError::InvalidDensity(format!(
                "not Hermitian (deviation {herm:e})"
            )));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > TOL || tr.im.abs() > TOL {
            return Err(PhenomenaError::InvalidDensity(format!("trace {tr}")));
        }
        let min = m.symmetric_eigenvalues().min();
        if min < -TOL {
            return Err(PhenomenaError::InvalidDensity(format!("eigenvalue {min:e}")));
        }
        Ok(DensityMatrix(m))
    }

    /// `|ψ⟩⟨ψ|` for a normalised copy of `psi`.
    pub fn pure(psi: [Complex64; 4]) -> Result<Self, PhenomenaError> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let m = Matrix4::from_fn(|i, j| psi[i] * psi[j].conj() / (norm * norm));
        DensityMatrix::new(m)
    }

    /// (|00⟩ + |11⟩)/√2.
    pub fn bell_phi_plus() -> Self {
        DensityMatrix::pure([c(1.0), c(0.0), c(0.0), c(1.0)]).expect("valid state")
    }

    /// Computational basis state |ab⟩.
    pub fn basis(a: u8, b: u8) -> Self {
        let mut m = Matrix4::zeros();
        let k = 2 * (a as usize & 1) + (b as usize & 1);
        m[(k, k)] = c(1.0);
        DensityMatrix(m)
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix(Matrix4::identity() * c(0.25))
    }

    /// `p |Φ+⟩⟨Φ+| + (1 - p) I/4`.
    pub fn werner(p: f64) -> Result<Self, PhenomenaError> {
        let m = Self::bell_phi_plus().0 * c(p) + Matrix4::identity() * c((1.0 - p) / 4.0);
        DensityMatrix::new(m)
    }

    /// `ρA ⊗ ρB` for single-qubit density matrices.
    pub fn product(a: &Matrix2<Complex64>, b: &Matrix2<Complex64>) -> Result<Self, PhenomenaError> {
        DensityMatrix::new(a.kronecker(b))
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.0
    }

    pub fn purity(&self) -> f64 {
        (self.0 * self.0).trace().re
    }

    /// Transpose on the second qubit: `ρ^{T_B}[(a,b),(a',b')] = ρ[(a,b'),(a',b)]`.
    pub fn partial_transpose_b(&self) -> Matrix4<Complex64> {
        Matrix4::from_fn(|i, j| {
            let (a, b) = (i / 2, i % 2);
            let (a2, b2) = (j / 2, j % 2);
            self.0[(2 * a + b2, 2 * a2 + b)]
        })
    }

    /// `tr(ρ σz⊗σz)`.
    pub fn zz_expectation(&self) -> f64 {
        self.0[(0, 0)].re - self.0[(1, 1)].re - self.0[(2, 2)].re + self.0[(3, 3)].re
    }
}

/// Ginibre ensemble: `GG† / tr(GG†)` with `G` a 4×4 matrix of i.i.d.
/// standard complex normal entries.
pub fn random_density_matrix<R: Rng + ?Sized>(rng: &mut R) -> DensityMatrix {
    let g = Matrix4::from_fn(|_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) / std::f64::consts::SQRT_2
    });
    let mut m = g * g.adjoint();
    let tr = m.trace().re;
    m /= c(tr);
    // Remove round-off asymmetry so the matrix is exactly Hermitian.
    let m = (m + m.adjoint()) * c(0.5);
    DensityMatrix(m)
}

/// `log2 ‖ρ^{T_B}‖₁`, clamped at 0.
pub fn log_negativity(rho: &DensityMatrix) -> f64 {
    let pt = rho.partial_transpose_b();
    let pt = (pt + pt.adjoint()) * c(0.5);
    let norm: f64 = pt.symmetric_eigenvalues().iter().map(|l| l.abs()).sum();
    norm.log2().max(0.0)
}

/// `shots` joint σz outcomes; |ab⟩ maps to `(1 - 2a, 1 - 2b)`.
pub fn measure_zz<R: Rng + ?Sized>(rho: &DensityMatrix, shots: usize, rng: &mut R) -> Vec<(i8, i8)> {
    let mut p = [0.0; 4];
    for (k, pk) in p.iter_mut().enumerate() {
        *pk = rho.0[(k, k)].re.max(0.0);
    }
    let total: f64 = p.iter().sum();
    (0..shots)
        .map(|_| {
            let u = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut k = 3;
            for (i, pi) in p.iter().enumerate() {
                acc += pi;
                if u < acc {
                    k = i;
                    break;
                }
            }
            let (a, b) = ((k / 2) as i8, (k % 2) as i8);
            (1 - 2 * a, 1 - 2 * b)
        })
        .collect()
}

/// `mean(m_a * m_b)`; NaN for no samples.
pub fn correlation(samples: &[(i8, i8)]) -> f64 {
    if samples.is_empty() {
        return f64::NAN;
    }
    samples.iter().map(|&(a, b)| (a * b) as f64).sum::<f64>() / samples.len() as f64
}

/// Generator for state `id` of a dataset seeded with `seed`.
pub fn state_rng(seed: u64, id: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id as u64);
    rng
}

/// One table row per shot, grouped by state; columns are [`COLUMNS`].
pub fn entanglement_table(states: &[(DensityMatrix, Vec<(i8, i8)>)]) -> DataTable {
    let mut cols: [Vec<f64>; 6] = Default::default();
    for (id, (rho, shots)) in states.iter().enumerate() {
        let e = log_negativity(rho);
        let corr = correlation(shots);
        for &(a, b) in shots {
            for (col, v) in cols
                .iter_mut()
                .zip([id as f64, e, a as f64, b as f64, corr, corr.abs()])
            {
                col.push(v);
            }
        }
    }
    DataTable::new(COLUMNS.iter().map(|s| s.to_string()).zip(cols).collect()).expect("columns are consistent")
}

/// `n_states` Ginibre states, `shots` measurements each. State `i` draws
/// its matrix and its shots from [`state_rng`]`(seed, i)`.
pub fn build_entanglement_dataset(n_states: usize, shots: usize, seed: u64) -> DataTable {
    let states: Vec<(DensityMatrix, Vec<(i8, i8)>)> = (0..n_states)
        .into_par_iter()
        .map(|i| {
            let mut rng = state_rng(seed, i);
            let rho = random_density_matrix(&mut rng);
            let s = measure_zz(&rho, shots, &mut rng);
            (rho, s)
        })
        .collect();
    entanglement_table(&states)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_states() {
        assert!((log_negativity(&DensityMatrix::bell_phi_plus()) - 1.0).abs() < 1e-10);
        assert_eq!(log_negativity(&DensityMatrix::basis(0, 0)), 0.0);
        let w = DensityMatrix::werner(0.5).unwrap();
        assert!((log_negativity(&w) - 1.25f64.log2()).abs() < 1e-10);
    }

    #[test]
    fn validation() {
        let mut m = *DensityMatrix::maximally_mixed().matrix();
        m[(0, 1)] = Complex64::new(0.1, 0.0);
        assert!(DensityMatrix::new(m).is_err());
        let m = Matrix4::identity() * c(0.5);
        assert!(DensityMatrix::new(m).is_err());
        let mut m = Matrix4::zeros();
        m[(0, 0)] = c(1.5);
        m[(1, 1)] = c(-0.5);
        assert!(DensityMatrix::new(m).is_err());
    }

    #[test]
    fn deterministic_shots() {
        let mut rng = state_rng(1, 0);
        let s = measure_zz(&DensityMatrix::basis(0, 1), 50, &mut rng);
        assert!(s.iter().all(|&x| x == (1, -1)));
        assert_eq!(correlation(&s), -1.0);
        let s = measure_zz(&DensityMatrix::bell_phi_plus(), 200, &mut rng);
        assert!(s.iter().all(|&(a, b)| a == b));
    }
}
