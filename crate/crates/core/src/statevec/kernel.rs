//! In-place amplitude kernels.
//!
//! Qubit `q` of an `n`-qubit register lives at bit `n - 1 - q` of the basis
//! index, so qubit 0 is the most significant bit. Every kernel here works on
//! raw bit masks; callers translate qubit indices with [`qubit_bit`].

use num_complex::Complex64;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[inline]
pub fn qubit_bit(num_qubits: usize, qubit: usize) -> usize {
    1usize << (num_qubits - 1 - qubit)
}

/// A Pauli word in symplectic form: `x` flips, `z` phases, `Y = i X Z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliMask {
    pub x: usize,
    pub z: usize,
}

impl PauliMask {
    pub const IDENTITY: PauliMask = PauliMask { x: 0, z: 0 };

    #[inline]
    pub fn num_y(self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// Global factor `i^{#Y}`.
    #[inline]
    pub fn y_phase(self) -> Complex64 {
        match self.num_y() % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => I,
            2 => Complex64::new(-1.0, 0.0),
            _ => -I,
        }
    }

    /// `(-1)^{popcount(index & z)}`
    #[inline]
    pub fn z_sign(self, index: usize) -> f64 {
        if (index & self.z).count_ones() & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// Inserts a zero at the position of `bit` (a power of two) into `k`.
#[inline]
fn insert_zero(k: usize, bit: usize) -> usize {
    let low = k & (bit - 1);
    ((k ^ low) << 1) | low
}

#[inline]
fn high_bit(mask: usize) -> usize {
    1usize << (usize::BITS - 1 - mask.leading_zeros())
}

/// A Pauli supported on one or two qubits, viewed on the `G = 2^weight`
/// amplitudes sharing all other bits.
struct Local<const G: usize> {
    bits: [usize; 2],
    offs: [usize; G],
    flip: usize,
    sign: [f64; G],
}

impl<const G: usize> Local<G> {
    fn new(p: PauliMask, support: usize) -> Self {
        let lo = support & support.wrapping_neg();
        let hi = support ^ lo;
        let bits = if G == 2 { [support, 0] } else { [lo, hi] };
        let mut offs = [0; G];
        let mut sign = [1.0; G];
        let mut flip = 0;
        for (l, o) in offs.iter_mut().enumerate() {
            for (k, b) in bits.iter().enumerate().take(G.trailing_zeros() as usize) {
                if l >> k & 1 == 1 {
                    *o |= b;
                }
                if l == 0 && p.x & b != 0 {
                    flip |= 1 << k;
                }
            }
        }
        for l in 0..G {
            sign[l] = p.z_sign(offs[l]);
        }
        Local { bits, offs, flip, sign }
    }

    #[inline]
    fn base(&self, k: usize) -> usize {
        if G == 2 {
            insert_zero(k, self.bits[0])
        } else {
            insert_zero(insert_zero(k, self.bits[0]), self.bits[1])
        }
    }
}

fn rotation_local<const G: usize>(amps: &mut [Complex64], p: PauliMask, support: usize, c: f64, s: f64) {
    let loc = Local::<G>::new(p, support);
    if loc.flip == 0 {
        let f: [Complex64; G] = std::array::from_fn(|l| Complex64::new(c, -s * loc.sign[l]));
        for k in 0..amps.len() / G {
            let b = loc.base(k);
            for l in 0..G {
                amps[b | loc.offs[l]] *= f[l];
            }
        }
        return;
    }
    let kc = -I * s * p.y_phase();
    // coupling from local config l to its partner l ^ flip
    let kk: [Complex64; G] = std::array::from_fn(|l| kc * loc.sign[l ^ loc.flip]);
    for k in 0..amps.len() / G {
        let b = loc.base(k);
        for l in 0..G {
            let m = l ^ loc.flip;
            if l < m {
                let (i, j) = (b | loc.offs[l], b | loc.offs[m]);
                let (ai, aj) = (amps[i], amps[j]);
                amps[i] = ai * c + kk[l] * aj;
                amps[j] = aj * c + kk[m] * ai;
            }
        }
    }
}

fn adjoint_local<const G: usize>(
    phi: &mut [Complex64],
    lambda: &mut [Complex64],
    p: PauliMask,
    support: usize,
    c: f64,
    s: f64,
) -> f64 {
    let loc = Local::<G>::new(p, support);
    let mut acc = Complex64::new(0.0, 0.0);
    if loc.flip == 0 {
        let f: [Complex64; G] = std::array::from_fn(|l| Complex64::new(c, -s * loc.sign[l]));
        for k in 0..phi.len() / G {
            let b = loc.base(k);
            for l in 0..G {
                let i = b | loc.offs[l];
                acc += lambda[i].conj() * phi[i] * loc.sign[l];
                phi[i] *= f[l];
                lambda[i] *= f[l];
            }
        }
        return acc.im;
    }
    let ph = p.y_phase();
    let kc = -I * s * ph;
    let kk: [Complex64; G] = std::array::from_fn(|l| kc * loc.sign[l ^ loc.flip]);
    for k in 0..phi.len() / G {
        let b = loc.base(k);
        for l in 0..G {
            let m = l ^ loc.flip;
            if l < m {
                let (i, j) = (b | loc.offs[l], b | loc.offs[m]);
                let (fi, fj) = (phi[i], phi[j]);
                let (li, lj) = (lambda[i], lambda[j]);
                acc += li.conj() * fj * loc.sign[m] + lj.conj() * fi * loc.sign[l];
                phi[i] = fi * c + kk[l] * fj;
                phi[j] = fj * c + kk[m] * fi;
                lambda[i] = li * c + kk[l] * lj;
                lambda[j] = lj * c + kk[m] * li;
            }
        }
    }
    (acc * ph).im
}

/// `amps <- exp(-i angle/2 P) amps`.
pub fn pauli_rotation(amps: &mut [Complex64], p: PauliMask, angle: f64) {
    let (s, c) = (0.5 * angle).sin_cos();
    let support = p.x | p.z;
    match support.count_ones() {
        1 if amps.len() >= 2 => return rotation_local::<2>(amps, p, support, c, s),
        2 if amps.len() >= 4 => return rotation_local::<4>(amps, p, support, c, s),
        _ => {}
    }
    if p.x == 0 {
        let plus = Complex64::new(c, -s);
        let minus = Complex64::new(c, s);
        for (idx, a) in amps.iter_mut().enumerate() {
            *a *= if p.z_sign(idx) > 0.0 { plus } else { minus };
        }
        return;
    }
    // off-diagonal coupling constant -i sin(angle/2) i^{#Y}
    let k = -I * s * p.y_phase();
    let h = high_bit(p.x);
    for m in 0..amps.len() / 2 {
        let i = insert_zero(m, h);
        let j = i ^ p.x;
        let (ai, aj) = (amps[i], amps[j]);
        amps[i] = ai * c + k * p.z_sign(j) * aj;
        amps[j] = aj * c + k * p.z_sign(i) * ai;
    }
}

/// Returns `Im <lambda| P |phi>` and then applies `exp(+i angle/2 P)` (the
/// inverse rotation) to both vectors in the same sweep.
pub fn rotation_adjoint_step(
    phi: &mut [Complex64],
    lambda: &mut [Complex64],
    p: PauliMask,
    angle: f64,
) -> f64 {
    let (s, c) = (-0.5 * angle).sin_cos();
    let support = p.x | p.z;
    match support.count_ones() {
        1 if phi.len() >= 2 => return adjoint_local::<2>(phi, lambda, p, support, c, s),
        2 if phi.len() >= 4 => return adjoint_local::<4>(phi, lambda, p, support, c, s),
        _ => {}
    }
    let mut acc = Complex64::new(0.0, 0.0);
    if p.x == 0 {
        let plus = Complex64::new(c, -s);
        let minus = Complex64::new(c, s);
        for idx in 0..phi.len() {
            let sign = p.z_sign(idx);
            acc += lambda[idx].conj() * phi[idx] * sign;
            let f = if sign > 0.0 { plus } else { minus };
            phi[idx] *= f;
            lambda[idx] *= f;
        }
        return acc.im;
    }
    let ph = p.y_phase();
    let k = -I * s * ph;
    let h = high_bit(p.x);
    for m in 0..phi.len() / 2 {
        let i = insert_zero(m, h);
        let j = i ^ p.x;
        let (si, sj) = (p.z_sign(i), p.z_sign(j));
        let (fi, fj) = (phi[i], phi[j]);
        let (li, lj) = (lambda[i], lambda[j]);
        acc += li.conj() * fj * sj + lj.conj() * fi * si;
        phi[i] = fi * c + k * sj * fj;
        phi[j] = fj * c + k * si * fi;
        lambda[i] = li * c + k * sj * lj;
        lambda[j] = lj * c + k * si * li;
    }
    (acc * ph).im
}

/// `out += coeff * P amps`.
pub fn pauli_accumulate(out: &mut [Complex64], amps: &[Complex64], p: PauliMask, coeff: f64) {
    let ph = p.y_phase() * coeff;
    for (c, o) in out.iter_mut().enumerate() {
        let src = c ^ p.x;
        *o += ph * p.z_sign(src) * amps[src];
    }
}

/// `<amps| P |amps>`; real for Hermitian `P` up to rounding.
pub fn pauli_expectation(amps: &[Complex64], p: PauliMask) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    if p.x == 0 {
        for (idx, a) in amps.iter().enumerate() {
            acc += a.norm_sqr() * p.z_sign(idx);
        }
        return acc;
    }
    for (c, a) in amps.iter().enumerate() {
        let src = c ^ p.x;
        acc += a.conj() * amps[src] * p.z_sign(src);
    }
    acc * p.y_phase()
}

/// `amps <- P amps` exactly (no rotation).
pub fn pauli_apply(amps: &mut [Complex64], p: PauliMask) {
    let ph = p.y_phase();
    if p.x == 0 {
        if p.z != 0 {
            for (idx, a) in amps.iter_mut().enumerate() {
                *a *= p.z_sign(idx);
            }
        }
        return;
    }
    let h = high_bit(p.x);
    for m in 0..amps.len() / 2 {
        let i = insert_zero(m, h);
        let j = i ^ p.x;
        let (ai, aj) = (amps[i], amps[j]);
        amps[i] = ph * p.z_sign(j) * aj;
        amps[j] = ph * p.z_sign(i) * ai;
    }
}

pub fn cx(amps: &mut [Complex64], control: usize, target: usize) {
    for m in 0..amps.len() / 2 {
        let i = insert_zero(m, target);
        if i & control != 0 {
            amps.swap(i, i | target);
        }
    }
}

pub fn cz(amps: &mut [Complex64], a: usize, b: usize) {
    let both = a | b;
    for (idx, amp) in amps.iter_mut().enumerate() {
        if idx & both == both {
            *amp = -*amp;
        }
    }
}

/// Applies a 2x2 matrix (row-major) to the qubit at `bit`.
pub fn matrix_1q(amps: &mut [Complex64], bit: usize, m: &[Complex64; 4]) {
    for k in 0..amps.len() / 2 {
        let i = insert_zero(k, bit);
        let j = i | bit;
        let (a0, a1) = (amps[i], amps[j]);
        amps[i] = m[0] * a0 + m[1] * a1;
        amps[j] = m[2] * a0 + m[3] * a1;
    }
}
