//! Dense complex linear algebra over truncated bosonic Fock spaces.
//!
//! States are explicit amplitude vectors over the number basis `|0..N-1>`,
//! density matrices are explicit `N x N` complex matrices, and composite
//! systems are Kronecker products with the leftmost factor slowest (row-major
//! composite indexing). Dimensions stay small here, so everything is plain
//! `Vec`-backed dense storage and the eigensolver is a cyclic Jacobi sweep.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Default Fock cutoff for a set of coherent labels: `ceil(m^2 + 10 m + 20)`
/// with `m` the largest modulus. Keeps the Poisson tail (truncation deficit)
/// below 1e-14 for `m <= 3`.
pub fn default_cutoff(labels: &[C64]) -> usize {
    let m = labels.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
    (m * m + 10.0 * m + 20.0).ceil() as usize
}

/// Pure state of one (or a tensor product of several) modes, held as a
/// finite complex amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedKet {
    amps: Vec<C64>,
}

impl TruncatedKet {
    pub fn from_amps(amps: Vec<C64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::InvalidArgument("ket needs at least one amplitude".into()));
        }
        Ok(Self { amps })
    }

    /// Number-basis vector `|index>` in a space of `dim` levels.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if dim == 0 || index >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `<self|other>` with the conjugate on the left argument.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::InvalidArgument(format!(
                "inner product dimension mismatch: {} vs {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Kronecker product; `self` is the slower (leftmost) factor.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Self { amps }
    }

    pub fn scaled(&self, z: C64) -> Self {
        Self {
            amps: self.amps.iter().map(|a| a * z).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::InvalidArgument("ket addition dimension mismatch".into()));
        }
        Ok(Self {
            amps: self
                .amps
                .iter()
                .zip(&other.amps)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// Unit-norm copy; zero vectors cannot be normalized.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n < 1e-150 {
            return Err(Error::DegenerateState);
        }
        Ok(self.scaled(C64::new(1.0 / n, 0.0)))
    }
}

/// Truncated coherent expansion together with the weight lost to truncation.
#[derive(Debug, Clone)]
pub struct CoherentKet {
    pub ket: TruncatedKet,
    /// `1 - sum |c_n|^2`, the Poisson tail beyond the cutoff.
    pub deficit: f64,
}

/// Coherent state `|label>` truncated to `cutoff` Fock levels, with
/// amplitudes `c_n = e^{-|label|^2/2} label^n / sqrt(n!)`.
///
/// Fails with a truncation error if the deficit exceeds `max_deficit`;
/// callers that only want the deficit reported can pass `f64::INFINITY`.
pub fn coherent_ket(label: C64, cutoff: usize, max_deficit: f64) -> Result<CoherentKet> {
    if cutoff == 0 {
        return Err(Error::InvalidArgument("coherent cutoff must be at least 1".into()));
    }
    let mut amps = Vec::with_capacity(cutoff);
    let mut c = C64::new((-0.5 * label.norm_sqr()).exp(), 0.0);
    amps.push(c);
    for n in 1..cutoff {
        c *= label / (n as f64).sqrt();
        amps.push(c);
    }
    let weight: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    let deficit = (1.0 - weight).max(0.0);
    if deficit > max_deficit {
        return Err(Error::TruncationInsufficient {
            deficit,
            allowed: max_deficit,
            cutoff,
        });
    }
    Ok(CoherentKet {
        ket: TruncatedKet { amps },
        deficit,
    })
}

/// Analytic overlap `<a|b> = exp(-|a|^2/2 - |b|^2/2 + conj(a) b)` of two
/// exact (untruncated) coherent states.
pub fn coherent_overlap(a: C64, b: C64) -> C64 {
    (C64::new(-0.5 * (a.norm_sqr() + b.norm_sqr()), 0.0) + a.conj() * b).exp()
}

/// Factor dimensions of a tensor-product space, leftmost slowest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeLayout {
    dims: Vec<usize>,
}

impl ModeLayout {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidArgument("layout factors must be positive".into()));
        }
        Ok(Self { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Stride of each factor in the composite row-major index.
    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for k in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.dims[k + 1];
        }
        strides
    }
}

/// Dense Hermitian-by-construction-or-validation density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    entries: Vec<C64>,
}

impl DensityMatrix {
    pub fn from_entries(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::InvalidArgument(format!(
                "density matrix needs {dim}x{dim} entries, got {}",
                entries.len()
            )));
        }
        Ok(Self { dim, entries })
    }

    /// `|psi><psi|` for a (not necessarily normalized) ket.
    pub fn from_pure(psi: &TruncatedKet) -> Self {
        let n = psi.dim();
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(psi.amps[i] * psi.amps[j].conj());
            }
        }
        Self { dim: n, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.entries[i * self.dim + j]
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Largest entrywise deviation from `M = M^dagger`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Kronecker product; `self` is the slower (leftmost) factor.
    pub fn tensor(&self, other: &Self) -> Self {
        let (da, db) = (self.dim, other.dim);
        let dim = da * db;
        let mut entries = vec![C64::new(0.0, 0.0); dim * dim];
        for i1 in 0..da {
            for j1 in 0..da {
                let a = self.get(i1, j1);
                for i2 in 0..db {
                    for j2 in 0..db {
                        entries[(i1 * db + i2) * dim + (j1 * db + j2)] = a * other.get(i2, j2);
                    }
                }
            }
        }
        Self { dim, entries }
    }

    /// Checks the state invariants: Hermitian, unit trace, positive
    /// semidefinite (smallest eigenvalue above -1e-10).
    pub fn validate_state(&self) -> Result<()> {
        if self.hermiticity_defect() > 1e-12 {
            return Err(Error::InvalidArgument("density matrix is not Hermitian".into()));
        }
        let tr = self.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::InvalidArgument(format!(
                "density matrix trace {} is not 1",
                tr.re
            )));
        }
        let eigs = hermitian_eigs(self)?;
        if eigs.values[0] < -1e-10 {
            return Err(Error::InvalidArgument(format!(
                "density matrix has negative eigenvalue {}",
                eigs.values[0]
            )));
        }
        Ok(())
    }
}

/// Trace over all factors of `layout` except `keep`.
pub fn partial_trace(rho: &DensityMatrix, layout: &ModeLayout, keep: usize) -> Result<DensityMatrix> {
    if layout.total_dim() != rho.dim() {
        return Err(Error::InvalidArgument(format!(
            "layout dimension {} does not match matrix dimension {}",
            layout.total_dim(),
            rho.dim()
        )));
    }
    if keep >= layout.dims.len() {
        return Err(Error::InvalidArgument(format!(
            "keep index {keep} out of range for {} factors",
            layout.dims.len()
        )));
    }
    let strides = layout.strides();
    let dk = layout.dims[keep];
    let sk = strides[keep];
    let rest: usize = rho.dim() / dk;

    // Enumerate the traced-out multi-index by decomposing 0..rest over the
    // non-kept factors and accumulating their composite offset.
    let other: Vec<(usize, usize)> = layout
        .dims
        .iter()
        .zip(&strides)
        .enumerate()
        .filter(|(k, _)| *k != keep)
        .map(|(_, (&d, &s))| (d, s))
        .collect();

    let mut out = vec![C64::new(0.0, 0.0); dk * dk];
    for r in 0..rest {
        let mut offset = 0;
        let mut q = r;
        for &(d, s) in other.iter().rev() {
            offset += (q % d) * s;
            q /= d;
        }
        for a in 0..dk {
            let row = offset + a * sk;
            for b in 0..dk {
                out[a * dk + b] += rho.get(row, offset + b * sk);
            }
        }
    }
    DensityMatrix::from_entries(dk, out)
}

/// Reduced density matrix of a pure state without materializing the full
/// `|psi><psi|`; same result as `partial_trace(&DensityMatrix::from_pure(..))`.
pub fn reduced_from_ket(psi: &TruncatedKet, layout: &ModeLayout, keep: usize) -> Result<DensityMatrix> {
    if layout.total_dim() != psi.dim() {
        return Err(Error::InvalidArgument(format!(
            "layout dimension {} does not match ket dimension {}",
            layout.total_dim(),
            psi.dim()
        )));
    }
    if keep >= layout.dims.len() {
        return Err(Error::InvalidArgument(format!(
            "keep index {keep} out of range for {} factors",
            layout.dims.len()
        )));
    }
    let strides = layout.strides();
    let dk = layout.dims[keep];
    let sk = strides[keep];
    let rest = psi.dim() / dk;
    let other: Vec<(usize, usize)> = layout
        .dims
        .iter()
        .zip(&strides)
        .enumerate()
        .filter(|(k, _)| *k != keep)
        .map(|(_, (&d, &s))| (d, s))
        .collect();

    let mut out = vec![C64::new(0.0, 0.0); dk * dk];
    for r in 0..rest {
        let mut offset = 0;
        let mut q = r;
        for &(d, s) in other.iter().rev() {
            offset += (q % d) * s;
            q /= d;
        }
        for a in 0..dk {
            let pa = psi.amps[offset + a * sk];
            for b in 0..dk {
                out[a * dk + b] += pa * psi.amps[offset + b * sk].conj();
            }
        }
    }
    DensityMatrix::from_entries(dk, out)
}

/// Eigenvalues (ascending) and matching orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    /// `vectors[k]` is the eigenvector for `values[k]`.
    pub vectors: Vec<Vec<C64>>,
}

const JACOBI_OFF_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Full spectrum of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// The input is symmetrized to `(M + M^dagger)/2` first and rejected if the
/// Hermiticity defect exceeds 1e-10. Sweeps run until the off-diagonal
/// Frobenius norm drops below 1e-13.
pub fn hermitian_eigs(m: &DensityMatrix) -> Result<EigenDecomposition> {
    if m.hermiticity_defect() > 1e-10 {
        return Err(Error::InvalidArgument(
            "matrix is not Hermitian within 1e-10".into(),
        ));
    }
    let n = m.dim;
    let mut a: Vec<C64> = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            a.push((m.get(i, j) + m.get(j, i).conj()) * 0.5);
        }
    }
    let mut v = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        v[i * n + i] = C64::new(1.0, 0.0);
    }

    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off < JACOBI_OFF_TOL {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let abs_apq = apq.norm();
                if abs_apq == 0.0 {
                    continue;
                }
                // Unitary plane rotation zeroing a[p][q]: the complex phase
                // of the pivot is absorbed into the rotation.
                let phase = apq / abs_apq;
                let tau = (a[q * n + q].re - a[p * n + p].re) / (2.0 * abs_apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                a[p * n + p] = C64::new(c * c * app + s * s * aqq - 2.0 * c * s * abs_apq, 0.0);
                a[q * n + q] = C64::new(s * s * app + c * c * aqq + 2.0 * c * s * abs_apq, 0.0);
                a[p * n + q] = C64::new(0.0, 0.0);
                a[q * n + p] = C64::new(0.0, 0.0);

                for i in 0..n {
                    if i == p || i == q {
                        continue;
                    }
                    let aip = a[i * n + p];
                    let aiq = a[i * n + q];
                    let new_ip = aip * c - aiq * phase.conj() * s;
                    let new_iq = aip * phase * s + aiq * c;
                    a[i * n + p] = new_ip;
                    a[p * n + i] = new_ip.conj();
                    a[i * n + q] = new_iq;
                    a[q * n + i] = new_iq.conj();
                }
                for i in 0..n {
                    let vip = v[i * n + p];
                    let viq = v[i * n + q];
                    v[i * n + p] = vip * c - viq * phase.conj() * s;
                    v[i * n + q] = vip * phase * s + viq * c;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[i * n + i]
            .re
            .partial_cmp(&a[j * n + j].re)
            .expect("eigenvalues are finite")
    });
    let values: Vec<f64> = order.iter().map(|&k| a[k * n + k].re).collect();
    let vectors: Vec<Vec<C64>> = order
        .iter()
        .map(|&k| (0..n).map(|i| v[i * n + k]).collect())
        .collect();
    Ok(EigenDecomposition { values, vectors })
}
