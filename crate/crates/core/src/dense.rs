//! Brute-force reference: build the truncated Hamiltonian as a dense
//! matrix, diagonalize it with cyclic Jacobi rotations and propagate the
//! discrete state through the eigenbasis.

use num_complex::Complex64;

use crate::dynamics::{time_grid, SeriesMeta, TimeSeries};
use crate::error::{Error, Result};
use crate::params::ModelParams;

pub const DEFAULT_OFF_TOL: f64 = 1e-14;
pub const MAX_SWEEPS: usize = 100;

/// Truncated Hamiltonian in the basis `[φ, k = -n_cut..=n_cut]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSystem {
    pub params: ModelParams,
    pub n_cut: usize,
    /// Row-major `dim × dim`.
    pub matrix: Vec<f64>,
}

impl DenseSystem {
    pub fn dim(&self) -> usize {
        2 * self.n_cut + 2
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[i * self.dim() + j]
    }

    /// Ladder index of basis state `i >= 1`.
    pub fn ladder_index(&self, i: usize) -> i64 {
        i as i64 - 1 - self.n_cut as i64
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

pub fn build_hamiltonian(p: &ModelParams, n_cut: usize) -> Result<DenseSystem> {
    if n_cut == 0 {
        return Err(Error::InvalidParams("n_cut must be at least 1".into()));
    }
    let dim = 2 * n_cut + 2;
    let mut m = vec![0.0; dim * dim];
    m[0] = p.e_phi;
    for i in 1..dim {
        let k = i as i64 - 1 - n_cut as i64;
        m[i * dim + i] = k as f64 * p.delta;
        let vk = p.coupling(k);
        m[i] = vk;
        m[i * dim] = vk;
    }
    Ok(DenseSystem { params: *p, n_cut, matrix: m })
}

/// Eigen-decomposition `H = Q Λ Qᵀ` with eigenvalues ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigen {
    pub dim: usize,
    pub values: Vec<f64>,
    /// Row-major `Q`; column `j` is the eigenvector of `values[j]`.
    pub vectors: Vec<f64>,
    pub sweeps: usize,
}

impl Eigen {
    pub fn q(&self, i: usize, j: usize) -> f64 {
        self.vectors[i * self.dim + j]
    }

    /// `max |QΛQᵀ − H|`
    pub fn reconstruction_error(&self, h: &[f64]) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += self.q(i, k) * self.values[k] * self.q(j, k);
                }
                worst = worst.max((s - h[i * n + j]).abs());
            }
        }
        worst
    }

    /// `max |QᵀQ − I|`
    pub fn orthogonality_error(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += self.q(k, i) * self.q(k, j);
                }
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((s - target).abs());
            }
        }
        worst
    }
}

/// Cyclic Jacobi diagonalization of a symmetric row-major matrix.
///
/// Converges when the off-diagonal Frobenius norm drops below
/// `off_tol · ‖H‖_F`, or after [`MAX_SWEEPS`] sweeps with an error.
pub fn jacobi_eigen(matrix: &[f64], dim: usize, off_tol: f64) -> Result<Eigen> {
    if matrix.len() != dim * dim {
        return Err(Error::InvalidParams(format!("matrix has {} entries, expected {}", matrix.len(), dim * dim)));
    }
    if off_tol <= 0.0 {
        return Err(Error::InvalidParams("off_tol must be positive".into()));
    }
    let n = dim;
    let mut a = matrix.to_vec();
    // rows of vt are the eigenvectors
    let mut vt = vec![0.0; n * n];
    for i in 0..n {
        vt[i * n + i] = 1.0;
    }
    let frob = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let off_norm = |a: &[f64]| {
        let mut s = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                s += a[p * n + q] * a[p * n + q];
            }
        }
        (2.0 * s).sqrt()
    };

    let mut sweeps = 0;
    loop {
        let off = off_norm(&a);
        if off <= off_tol * frob || off == 0.0 {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, off_norm: off });
        }
        sweeps += 1;
        let thresh = if sweeps < 4 { 0.2 * off / (n * n) as f64 } else { 0.0 };
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let g = 100.0 * apq.abs();
                if sweeps > 4 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                if apq.abs() <= thresh {
                    continue;
                }
                let theta = 0.5 * (aqq - app) / apq;
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate_rows(&mut a, n, p, q, c, s);
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for r in 0..n {
                    if r != p && r != q {
                        a[r * n + p] = a[p * n + r];
                        a[r * n + q] = a[q * n + r];
                    }
                }
                rotate_rows(&mut vt, n, p, q, c, s);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    let values: Vec<f64> = order.iter().map(|&i| a[i * n + i]).collect();
    let mut vectors = vec![0.0; n * n];
    for (j, &src) in order.iter().enumerate() {
        for i in 0..n {
            vectors[i * n + j] = vt[src * n + i];
        }
    }
    Ok(Eigen { dim: n, values, vectors, sweeps })
}

/// Applies the plane rotation to rows `p` and `q`: `(x, y) → (cx − sy, sx + cy)`.
#[inline]
fn rotate_rows(m: &mut [f64], n: usize, p: usize, q: usize, c: f64, s: f64) {
    let (head, tail) = m.split_at_mut(q * n);
    let rp = &mut head[p * n..p * n + n];
    let rq = &mut tail[..n];
    for (x, y) in rp.iter_mut().zip(rq.iter_mut()) {
        let (xv, yv) = (*x, *y);
        *x = c * xv - s * yv;
        *y = s * xv + c * yv;
    }
}

pub fn diagonalize(d: &DenseSystem, off_tol: f64) -> Result<Eigen> {
    jacobi_eigen(&d.matrix, d.dim(), off_tol)
}

/// A diagonalized truncated system, ready for propagation.
#[derive(Debug, Clone)]
pub struct DenseSolution {
    pub system: DenseSystem,
    pub eigen: Eigen,
}

impl DenseSolution {
    pub fn new(p: &ModelParams, n_cut: usize) -> Result<Self> {
        let system = build_hamiltonian(p, n_cut)?;
        let eigen = diagonalize(&system, DEFAULT_OFF_TOL)?;
        Ok(Self { system, eigen })
    }

    /// Eigenvalues divided by `δ`.
    pub fn eps_values(&self) -> Vec<f64> {
        self.eigen.values.iter().map(|e| e / self.system.params.delta).collect()
    }

    /// `|⟨φ|ψ_j⟩|²` for each eigenvector.
    pub fn weights(&self) -> Vec<f64> {
        (0..self.eigen.dim).map(|j| self.eigen.q(0, j).powi(2)).collect()
    }

    /// `⟨φ|ψ(t)⟩ = Σ_j e^{−iλ_j t} Q[0][j]²`
    pub fn survival_amplitude(&self, t: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..self.eigen.dim {
            let q = self.eigen.q(0, j);
            acc += Complex64::from_polar(q * q, -self.eigen.values[j] * t);
        }
        acc
    }

    /// Full state at time `t` after starting in `|φ⟩`.
    pub fn state(&self, t: f64) -> Vec<Complex64> {
        let n = self.eigen.dim;
        let coeff: Vec<Complex64> =
            (0..n).map(|j| Complex64::from_polar(self.eigen.q(0, j), -self.eigen.values[j] * t)).collect();
        (0..n)
            .map(|i| (0..n).map(|j| coeff[j] * self.eigen.q(i, j)).sum())
            .collect()
    }

    pub fn survival_series(&self, t_max: f64, n_steps: usize) -> TimeSeries {
        let times = time_grid(t_max, n_steps);
        let amps: Vec<Complex64> = times.iter().map(|&t| self.survival_amplitude(t)).collect();
        let probs = amps.iter().map(|z| z.norm_sqr()).collect();
        TimeSeries {
            times,
            probs,
            amps: Some(amps),
            meta: SeriesMeta {
                params: self.system.params,
                engine: format!("dense-oracle(n_cut={})", self.system.n_cut),
                norm_deficit: 0.0,
                renormalized: false,
            },
        }
    }
}

/// Survival probability of `|φ⟩` from the dense truncated model.
pub fn oracle_survival(p: &ModelParams, n_cut: usize, t_max: f64, n_steps: usize) -> Result<TimeSeries> {
    if !(t_max > 0.0) || n_steps == 0 {
        return Err(Error::InvalidParams("time grid needs t_max > 0 and at least one step".into()));
    }
    Ok(DenseSolution::new(p, n_cut)?.survival_series(t_max, n_steps))
}
