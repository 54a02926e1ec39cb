//! Exact-diagonalization oracle, single-qubit entanglement, fidelities and
//! aggregation of training runs.

use faer::{Mat, Side};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::optimize::TrainingTrace;
use crate::pauli::{PauliString, PauliSum};
use crate::statevec::{fidelity, Statevector};

/// Largest register [`exact_ground`] accepts.
pub const DENSE_MAX_QUBITS: usize = 14;
/// [`ground_state`] switches from dense to Lanczos above this size.
pub const DENSE_AUTO_QUBITS: usize = 10;
pub const COMMUTATOR_MAX_QUBITS: usize = 6;
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Dense,
    Lanczos,
}

#[derive(Clone, Debug)]
pub struct SpectrumResult {
    pub ground_energy: f64,
    /// Orthonormal basis of the eigenspace within `degeneracy_tolerance` of
    /// the ground energy.
    pub ground_space: Vec<Statevector>,
    pub degeneracy_tolerance: f64,
    pub solver: SolverKind,
}

impl SpectrumResult {
    pub fn degeneracy(&self) -> usize {
        self.ground_space.len()
    }

    pub fn num_qubits(&self) -> usize {
        self.ground_space[0].num_qubits()
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(Error::InvalidArgument(format!("degeneracy tolerance must be >= 0, got {tol}")));
    }
    Ok(())
}

/// Dense Hermitian eigendecomposition. Hamiltonians whose terms all carry an
/// even number of `Y` factors are real symmetric and take the real path.
pub fn exact_ground(h: &PauliSum, degeneracy_tol: f64) -> Result<SpectrumResult> {
    check_tol(degeneracy_tol)?;
    let n = h.num_qubits();
    if n > DENSE_MAX_QUBITS {
        return Err(Error::TooLarge {
            what: "dense diagonalization",
            max: DENSE_MAX_QUBITS,
            got: n,
        });
    }
    let dim = 1usize << n;
    let real = h.terms().iter().all(|t| t.string.num_y() % 2 == 0);
    let (values, vectors): (Vec<f64>, Vec<Vec<Complex64>>) = if real {
        let mut m = Mat::<f64>::zeros(dim, dim);
        for t in h.terms() {
            let p = t.string.mask();
            let ph = p.y_phase().re * t.coeff;
            for col in 0..dim {
                m[(col ^ p.x, col)] += ph * p.z_sign(col);
            }
        }
        let eig = m
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Unsupported(format!("eigendecomposition failed: {e:?}")))?;
        let s = eig.S();
        let u = eig.U();
        let vals: Vec<f64> = (0..dim).map(|i| s[i]).collect();
        let e0 = vals[0];
        let vecs = (0..dim)
            .take_while(|&k| vals[k] - e0 <= degeneracy_tol)
            .map(|k| (0..dim).map(|r| Complex64::new(u[(r, k)], 0.0)).collect())
            .collect();
        (vals, vecs)
    } else {
        let mut m = Mat::<faer::c64>::zeros(dim, dim);
        for t in h.terms() {
            let p = t.string.mask();
            let ph = p.y_phase() * t.coeff;
            for col in 0..dim {
                let v = ph * p.z_sign(col);
                let cur = m[(col ^ p.x, col)];
                m[(col ^ p.x, col)] = faer::c64::new(cur.re + v.re, cur.im + v.im);
            }
        }
        let eig = m
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Unsupported(format!("eigendecomposition failed: {e:?}")))?;
        let s = eig.S();
        let u = eig.U();
        let vals: Vec<f64> = (0..dim).map(|i| s[i].re).collect();
        let e0 = vals[0];
        let vecs = (0..dim)
            .take_while(|&k| vals[k] - e0 <= degeneracy_tol)
            .map(|k| {
                (0..dim)
                    .map(|r| {
                        let z = u[(r, k)];
                        Complex64::new(z.re, z.im)
                    })
                    .collect()
            })
            .collect();
        (vals, vecs)
    };
    let ground_space = vectors
        .into_iter()
        .map(Statevector::from_amplitudes)
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumResult {
        ground_energy: values[0],
        ground_space,
        degeneracy_tolerance: degeneracy_tol,
        solver: SolverKind::Dense,
    })
}

/// Options for [`lanczos_ground`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LanczosOptions {
    /// Krylov dimension per restart cycle.
    pub krylov_dim: usize,
    pub max_restarts: usize,
    /// Target `||H x - theta x||`.
    pub residual_tol: f64,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions {
            krylov_dim: 80,
            max_restarts: 200,
            residual_tol: 1e-9,
            seed: 0x5EED,
        }
    }
}

type CVec = Vec<Complex64>;

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn axpy(y: &mut [Complex64], a: Complex64, x: &[Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

fn project_out(v: &mut [Complex64], basis: &[CVec]) {
    for _ in 0..2 {
        for b in basis {
            let c = dot(b, v);
            axpy(v, -c, b);
        }
    }
}

fn apply_h(h: &PauliSum, v: &[Complex64], out: &mut CVec) {
    out.iter_mut().for_each(|x| *x = Complex64::new(0.0, 0.0));
    h.apply_accumulate(v, out);
}

/// Lowest eigenpair of `H` restricted to the orthogonal complement of
/// `deflate`, by explicitly restarted Lanczos with full reorthogonalization.
fn lanczos_lowest(h: &PauliSum, deflate: &[CVec], start: CVec, opts: &LanczosOptions) -> Result<(f64, CVec, f64)> {
    let dim = start.len();
    let mut x = start;
    project_out(&mut x, deflate);
    let nx = norm(&x);
    if nx == 0.0 {
        return Err(Error::InvalidArgument("Lanczos start vector lies in the deflated space".into()));
    }
    x.iter_mut().for_each(|v| *v /= nx);
    let m_max = opts.krylov_dim.min(dim - deflate.len()).max(1);
    let mut w = vec![Complex64::new(0.0, 0.0); dim];
    let mut best = (f64::INFINITY, x.clone(), f64::INFINITY);

    for _ in 0..opts.max_restarts {
        let mut basis: Vec<CVec> = vec![x.clone()];
        let mut alpha = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        loop {
            let j = basis.len() - 1;
            apply_h(h, &basis[j], &mut w);
            project_out(&mut w, deflate);
            let a = dot(&basis[j], &w).re;
            alpha.push(a);
            // full reorthogonalization, twice for stability
            for _ in 0..2 {
                for b in &basis {
                    let c = dot(b, &w);
                    axpy(&mut w, -c, b);
                }
            }
            let bn = norm(&w);
            if basis.len() == m_max || bn < 1e-12 {
                break;
            }
            beta.push(bn);
            basis.push(w.iter().map(|v| v / bn).collect());
        }
        let m = alpha.len();
        let mut t = Mat::<f64>::zeros(m, m);
        for i in 0..m {
            t[(i, i)] = alpha[i];
            if i + 1 < m {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = t
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Unsupported(format!("tridiagonal eigensolve failed: {e:?}")))?;
        let y = eig.U();
        let mut ritz = vec![Complex64::new(0.0, 0.0); dim];
        for (k, b) in basis.iter().enumerate() {
            axpy(&mut ritz, Complex64::new(y[(k, 0)], 0.0), b);
        }
        project_out(&mut ritz, deflate);
        let rn = norm(&ritz);
        ritz.iter_mut().for_each(|v| *v /= rn);
        apply_h(h, &ritz, &mut w);
        project_out(&mut w, deflate);
        let rq = dot(&ritz, &w).re;
        axpy(&mut w, Complex64::new(-rq, 0.0), &ritz);
        let res = norm(&w);
        if res < best.2 {
            best = (rq, ritz.clone(), res);
        }
        if res <= opts.residual_tol {
            return Ok(best);
        }
        x = ritz;
    }
    if best.2 <= opts.residual_tol.max(1e-8) {
        Ok(best)
    } else {
        Err(Error::Unsupported(format!(
            "Lanczos did not converge: residual {:.3e} after {} restarts",
            best.2, opts.max_restarts
        )))
    }
}

/// Matrix-free ground space: repeated deflated Lanczos runs until the next
/// eigenvalue lies more than `degeneracy_tol` above the lowest.
pub fn lanczos_ground(h: &PauliSum, degeneracy_tol: f64, opts: &LanczosOptions) -> Result<SpectrumResult> {
    check_tol(degeneracy_tol)?;
    let n = h.num_qubits();
    let dim = 1usize << n;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut random = || -> CVec {
        (0..dim)
            .map(|_| Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
            .collect()
    };
    let mut found: Vec<CVec> = Vec::new();
    let mut e0 = f64::NAN;
    loop {
        if found.len() == dim {
            break;
        }
        let (theta, v, _) = lanczos_lowest(h, &found, random(), opts)?;
        if found.is_empty() {
            e0 = theta;
        } else if theta - e0 > degeneracy_tol {
            break;
        } else {
            e0 = e0.min(theta);
        }
        found.push(v);
    }
    let ground_space = found
        .into_iter()
        .map(Statevector::from_amplitudes)
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumResult {
        ground_energy: e0,
        ground_space,
        degeneracy_tolerance: degeneracy_tol,
        solver: SolverKind::Lanczos,
    })
}

/// Dense up to [`DENSE_AUTO_QUBITS`], Lanczos beyond.
pub fn ground_state(h: &PauliSum, degeneracy_tol: f64) -> Result<SpectrumResult> {
    if h.num_qubits() <= DENSE_AUTO_QUBITS {
        exact_ground(h, degeneracy_tol)
    } else {
        lanczos_ground(h, degeneracy_tol, &LanczosOptions::default())
    }
}

/// Ground space of `h` restricted to the eigenspace `constraint = target` of a
/// diagonal (`I`/`Z`-only) constraint operator. Solved as the unconstrained
/// ground space of `h + lambda (C - target)^2` with `lambda` large enough to
/// lift every other sector above the spectral bound of `h`.
pub fn sector_ground(h: &PauliSum, constraint: &PauliSum, target: f64, degeneracy_tol: f64) -> Result<SpectrumResult> {
    let n = h.num_qubits();
    if constraint.num_qubits() != n {
        return Err(Error::DimensionMismatch {
            left: n,
            right: constraint.num_qubits(),
        });
    }
    if constraint.terms().iter().any(|t| t.string.mask().x != 0) {
        return Err(Error::Unsupported("sector constraint must be diagonal (I/Z terms only)".into()));
    }
    let masks: Vec<(f64, usize)> = constraint
        .terms()
        .iter()
        .map(|t| (t.coeff, t.string.mask().z))
        .collect();
    let mut in_sector = false;
    let mut gap = f64::INFINITY;
    for b in 0..1usize << n {
        let d: f64 = masks
            .iter()
            .map(|&(c, z)| if (b & z).count_ones() % 2 == 0 { c } else { -c })
            .sum();
        let off = (d - target).abs();
        if off < 1e-9 {
            in_sector = true;
        } else {
            gap = gap.min(off);
        }
    }
    if !in_sector {
        return Err(Error::InvalidArgument(format!("constraint has no eigenvalue {target}")));
    }
    let bound: f64 = h.terms().iter().map(|t| t.coeff.abs()).sum();
    let lambda = if gap.is_finite() { (2.0 * bound + 1.0) / (gap * gap) } else { 0.0 };
    let shifted = constraint.plus(&PauliSum::new(n, [(-target, PauliString::identity(n))])?)?;
    let penalized = h.plus(&shifted.product(&shifted)?.scaled(lambda))?;
    let mut s = ground_state(&penalized, degeneracy_tol)?;
    // the penalty vanishes on the sector, so only rounding separates the two
    s.ground_energy = h.expectation(&s.ground_space[0])?;
    Ok(s)
}

/// Reduced density matrix `[[p0, c], [c*, p1]]` of one qubit, returned as
/// `(p0, p1, c)`.
pub fn single_qubit_rdm(state: &Statevector, qubit: usize) -> Result<(f64, f64, Complex64)> {
    state.check_qubit(qubit)?;
    let bit = crate::statevec::kernel::qubit_bit(state.num_qubits(), qubit);
    let amps = state.amplitudes();
    let (mut p0, mut p1, mut c) = (0.0, 0.0, Complex64::new(0.0, 0.0));
    for i in (0..amps.len()).filter(|i| i & bit == 0) {
        let (a, b) = (amps[i], amps[i | bit]);
        p0 += a.norm_sqr();
        p1 += b.norm_sqr();
        c += a * b.conj();
    }
    Ok((p0, p1, c))
}

fn entropy_of(p: f64, base_ln: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        -p * p.ln() / base_ln
    }
}

/// Average single-qubit von Neumann entropy in bits.
pub fn avg_entropy(state: &Statevector) -> f64 {
    avg_entropy_base(state, 2.0).expect("base 2 is valid")
}

/// Average single-qubit von Neumann entropy with logarithm base `base`.
pub fn avg_entropy_base(state: &Statevector, base: f64) -> Result<f64> {
    if !(base > 0.0 && base != 1.0 && base.is_finite()) {
        return Err(Error::InvalidArgument(format!("invalid logarithm base {base}")));
    }
    let base_ln = base.ln();
    let n = state.num_qubits();
    let mut total = 0.0;
    for q in 0..n {
        let (p0, p1, c) = single_qubit_rdm(state, q)?;
        let tr = p0 + p1;
        let disc = ((p0 - p1).powi(2) + 4.0 * c.norm_sqr()).sqrt();
        let hi = (0.5 * (tr + disc)).clamp(0.0, 1.0);
        let lo = (0.5 * (tr - disc)).clamp(0.0, 1.0);
        total += entropy_of(hi, base_ln) + entropy_of(lo, base_ln);
    }
    Ok(total / n as f64)
}

/// `<psi| P_gs |psi>` with `P_gs` the projector onto the ground space.
pub fn fidelity_to_ground(state: &Statevector, spectrum: &SpectrumResult) -> Result<f64> {
    let mut f = 0.0;
    for g in &spectrum.ground_space {
        f += fidelity(g, state)?;
    }
    Ok(f.min(1.0))
}

/// `||AB - BA||_F` from dense matrices.
pub fn commutator_norm(a: &PauliSum, b: &PauliSum) -> Result<f64> {
    if a.num_qubits() != b.num_qubits() {
        return Err(Error::DimensionMismatch {
            left: a.num_qubits(),
            right: b.num_qubits(),
        });
    }
    if a.num_qubits() > COMMUTATOR_MAX_QUBITS {
        return Err(Error::TooLarge {
            what: "dense commutator",
            max: COMMUTATOR_MAX_QUBITS,
            got: a.num_qubits(),
        });
    }
    Ok(a.to_dense().commutator(&b.to_dense()).frobenius_norm())
}

/// `||UA - AU||_F` for an explicit unitary.
pub fn commutator_norm_dense(u: &DenseMatrix, a: &DenseMatrix) -> f64 {
    u.commutator(a).frobenius_norm()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesStats {
    pub mean: Vec<f64>,
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl SeriesStats {
    fn from_rows(rows: &[Vec<f64>]) -> Self {
        let len = rows[0].len();
        let k = rows.len() as f64;
        let mut s = SeriesStats {
            mean: vec![0.0; len],
            min: vec![f64::INFINITY; len],
            max: vec![f64::NEG_INFINITY; len],
        };
        for r in rows {
            for (i, &v) in r.iter().enumerate() {
                s.mean[i] += v / k;
                s.min[i] = s.min[i].min(v);
                s.max[i] = s.max[i].max(v);
            }
        }
        // keep min <= mean <= max despite rounding in the running mean
        for i in 0..len {
            s.mean[i] = s.mean[i].clamp(s.min[i], s.max[i]);
        }
        s
    }

    pub fn final_mean(&self) -> f64 {
        *self.mean.last().expect("non-empty series")
    }

    /// `max - min` at the last point.
    pub fn final_width(&self) -> f64 {
        self.max.last().expect("non-empty series") - self.min.last().expect("non-empty series")
    }
}

/// `best` is the minimum for energies and the maximum for fidelities; `std`
/// is the population standard deviation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TerminalStats {
    pub best: f64,
    pub mean: f64,
    pub std: f64,
}

impl TerminalStats {
    pub fn from_values(values: &[f64], best_is_max: bool) -> Self {
        let k = values.len() as f64;
        let mean = values.iter().sum::<f64>() / k;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / k;
        let best = if best_is_max {
            values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        } else {
            values.iter().copied().fold(f64::INFINITY, f64::min)
        };
        TerminalStats {
            best,
            mean,
            std: var.max(0.0).sqrt(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateStats {
    pub realizations: usize,
    pub energy: SeriesStats,
    pub entropy: SeriesStats,
    /// Energies of each realization's minimum-cost iterate.
    pub terminal_energy: TerminalStats,
    /// Ground-space fidelities of the same iterates.
    pub terminal_fidelity: TerminalStats,
    pub terminal_fidelities: Vec<f64>,
    pub terminal_energies: Vec<f64>,
}

pub fn aggregate(traces: &[TrainingTrace], spectrum: &SpectrumResult) -> Result<AggregateStats> {
    let first = traces
        .first()
        .ok_or_else(|| Error::InvalidArgument("aggregate needs at least one trace".into()))?;
    let len = first.records.len();
    if len == 0 {
        return Err(Error::InvalidArgument("trace has no records".into()));
    }
    if let Some(t) = traces.iter().find(|t| t.records.len() != len) {
        return Err(Error::LengthMismatch {
            expected: len,
            got: t.records.len(),
        });
    }
    let energies: Vec<Vec<f64>> = traces
        .iter()
        .map(|t| t.records.iter().map(|r| r.energy).collect())
        .collect();
    let entropies: Vec<Vec<f64>> = traces
        .iter()
        .map(|t| t.records.iter().map(|r| r.entropy).collect())
        .collect();
    let mut fids = Vec::with_capacity(traces.len());
    for t in traces {
        let s = t
            .best_state
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("trace carries no best state".into()))?;
        fids.push(fidelity_to_ground(s, spectrum)?);
    }
    let best_e: Vec<f64> = traces.iter().map(|t| t.best_energy).collect();
    Ok(AggregateStats {
        realizations: traces.len(),
        energy: SeriesStats::from_rows(&energies),
        entropy: SeriesStats::from_rows(&entropies),
        terminal_energy: TerminalStats::from_values(&best_e, false),
        terminal_fidelity: TerminalStats::from_values(&fids, true),
        terminal_fidelities: fids,
        terminal_energies: best_e,
    })
}
