//! Test oracles that share no code with the library: explicit Kronecker
//! products, a Taylor matrix exponential and naive dense algebra.

#![allow(dead_code)]

use eha_core::{PauliLetter, PauliSum};
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const ZERO: C = C::new(0.0, 0.0);
pub const ONE: C = C::new(1.0, 0.0);
pub const I: C = C::new(0.0, 1.0);

#[derive(Clone, Debug)]
pub struct Mat {
    pub d: usize,
    pub a: Vec<C>,
}

impl Mat {
    pub fn zeros(d: usize) -> Mat {
        Mat { d, a: vec![ZERO; d * d] }
    }

    pub fn eye(d: usize) -> Mat {
        let mut m = Mat::zeros(d);
        for i in 0..d {
            m.a[i * d + i] = ONE;
        }
        m
    }

    pub fn from(d: usize, v: &[C]) -> Mat {
        assert_eq!(v.len(), d * d);
        Mat { d, a: v.to_vec() }
    }

    pub fn at(&self, r: usize, c: usize) -> C {
        self.a[r * self.d + c]
    }

    pub fn mul(&self, o: &Mat) -> Mat {
        let d = self.d;
        let mut m = Mat::zeros(d);
        for r in 0..d {
            for k in 0..d {
                let x = self.at(r, k);
                if x == ZERO {
                    continue;
                }
                for c in 0..d {
                    m.a[r * d + c] += x * o.at(k, c);
                }
            }
        }
        m
    }

    pub fn add(&self, o: &Mat) -> Mat {
        Mat {
            d: self.d,
            a: self.a.iter().zip(&o.a).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn sub(&self, o: &Mat) -> Mat {
        self.add(&o.scale(-ONE))
    }

    pub fn scale(&self, s: C) -> Mat {
        Mat {
            d: self.d,
            a: self.a.iter().map(|x| x * s).collect(),
        }
    }

    pub fn dagger(&self) -> Mat {
        let d = self.d;
        let mut m = Mat::zeros(d);
        for r in 0..d {
            for c in 0..d {
                m.a[c * d + r] = self.at(r, c).conj();
            }
        }
        m
    }

    pub fn kron(&self, o: &Mat) -> Mat {
        let d = self.d * o.d;
        let mut m = Mat::zeros(d);
        for r1 in 0..self.d {
            for c1 in 0..self.d {
                for r2 in 0..o.d {
                    for c2 in 0..o.d {
                        m.a[(r1 * o.d + r2) * d + c1 * o.d + c2] = self.at(r1, c1) * o.at(r2, c2);
                    }
                }
            }
        }
        m
    }

    pub fn apply(&self, v: &[C]) -> Vec<C> {
        (0..self.d)
            .map(|r| (0..self.d).map(|c| self.at(r, c) * v[c]).sum())
            .collect()
    }

    pub fn norm(&self) -> f64 {
        self.a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, o: &Mat) -> f64 {
        self.a.iter().zip(&o.a).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    /// `exp(self)` by scaling and squaring around a 30-term Taylor series.
    pub fn expm(&self) -> Mat {
        let n = self.norm();
        let mut s = 0;
        while n / 2f64.powi(s) > 0.5 {
            s += 1;
        }
        let a = self.scale(C::new(1.0 / 2f64.powi(s), 0.0));
        let mut term = Mat::eye(self.d);
        let mut sum = Mat::eye(self.d);
        for k in 1..30 {
            term = term.mul(&a).scale(C::new(1.0 / k as f64, 0.0));
            sum = sum.add(&term);
        }
        for _ in 0..s {
            sum = sum.mul(&sum);
        }
        sum
    }
}

pub fn pauli(letter: char) -> Mat {
    match letter {
        'I' => Mat::eye(2),
        'X' => Mat::from(2, &[ZERO, ONE, ONE, ZERO]),
        'Y' => Mat::from(2, &[ZERO, -I, I, ZERO]),
        'Z' => Mat::from(2, &[ONE, ZERO, ZERO, -ONE]),
        _ => panic!("bad letter {letter}"),
    }
}

/// Kronecker product of per-qubit 2x2 factors, qubit 0 leftmost.
pub fn kron_all(factors: &[Mat]) -> Mat {
    factors.iter().skip(1).fold(factors[0].clone(), |acc, f| acc.kron(f))
}

/// Dense Pauli word from `(qubit, letter)` pairs.
pub fn pauli_word(n: usize, letters: &[(usize, char)]) -> Mat {
    let f: Vec<Mat> = (0..n)
        .map(|q| {
            let l = letters.iter().find(|(p, _)| *p == q).map(|(_, l)| *l).unwrap_or('I');
            pauli(l)
        })
        .collect();
    kron_all(&f)
}

/// Embeds a 2x2 matrix on qubit `q` of `n`.
pub fn embed1(n: usize, q: usize, m: &Mat) -> Mat {
    let f: Vec<Mat> = (0..n).map(|p| if p == q { m.clone() } else { Mat::eye(2) }).collect();
    kron_all(&f)
}

/// Embeds a 4x4 matrix on ordered qubits `(a, b)`; `a` indexes the high bit
/// of the local matrix.
pub fn embed2(n: usize, a: usize, b: usize, m: &Mat) -> Mat {
    let d = 1usize << n;
    let bit = |i: usize, q: usize| (i >> (n - 1 - q)) & 1;
    let mut out = Mat::zeros(d);
    for r in 0..d {
        for c in 0..d {
            let others_equal = (0..n).filter(|&q| q != a && q != b).all(|q| bit(r, q) == bit(c, q));
            if others_equal {
                let lr = 2 * bit(r, a) + bit(r, b);
                let lc = 2 * bit(c, a) + bit(c, b);
                out.a[r * d + c] = m.at(lr, lc);
            }
        }
    }
    out
}

pub fn rx(t: f64) -> Mat {
    pauli('X').scale(C::new(0.0, -t / 2.0)).expm()
}

pub fn ry(t: f64) -> Mat {
    pauli('Y').scale(C::new(0.0, -t / 2.0)).expm()
}

pub fn rz(t: f64) -> Mat {
    pauli('Z').scale(C::new(0.0, -t / 2.0)).expm()
}

pub fn two(letter: char) -> Mat {
    pauli(letter).kron(&pauli(letter))
}

pub fn cx4() -> Mat {
    let mut m = Mat::zeros(4);
    for (r, c) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
        m.a[r * 4 + c] = ONE;
    }
    m
}

pub fn cz4() -> Mat {
    let mut m = Mat::eye(4);
    m.a[15] = -ONE;
    m
}

pub fn hadamard() -> Mat {
    let h = C::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    Mat::from(2, &[h, h, h, -h])
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_state(n: usize, seed: u64) -> Vec<C> {
    let mut r = rng(seed);
    let v: Vec<C> = (0..1usize << n)
        .map(|_| C::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)))
        .collect();
    let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / norm).collect()
}

pub fn random_params(n: usize, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    (0..n).map(|_| r.random_range(-std::f64::consts::PI..std::f64::consts::PI)).collect()
}

pub fn max_diff(a: &[C], b: &[C]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `|<a|b>|^2` for phase-insensitive comparisons.
pub fn overlap(a: &[C], b: &[C]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<C>().norm_sqr()
}

/// Hermitian expectation `<v|M|v>`.
pub fn expect(m: &Mat, v: &[C]) -> f64 {
    let mv = m.apply(v);
    v.iter().zip(&mv).map(|(x, y)| x.conj() * y).sum::<C>().re
}

/// Eigenvalues of a real symmetric matrix (row-major) by cyclic Jacobi
/// rotations, ascending.
pub fn jacobi_eigenvalues(mut a: Vec<f64>, d: usize) -> Vec<f64> {
    for _ in 0..100 {
        let off: f64 = (0..d)
            .flat_map(|r| (0..d).filter(move |&c| c != r).map(move |c| (r, c)))
            .map(|(r, c)| a[r * d + c].powi(2))
            .sum();
        if off < 1e-26 {
            break;
        }
        for p in 0..d {
            for q in p + 1..d {
                let apq = a[p * d + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q * d + q] - a[p * d + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..d {
                    let akp = a[k * d + p];
                    let akq = a[k * d + q];
                    a[k * d + p] = c * akp - s * akq;
                    a[k * d + q] = s * akp + c * akq;
                }
                for k in 0..d {
                    let apk = a[p * d + k];
                    let aqk = a[q * d + k];
                    a[p * d + k] = c * apk - s * aqk;
                    a[q * d + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..d).map(|i| a[i * d + i]).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ev
}

/// Dense matrix of a library Pauli sum, rebuilt letter by letter.
pub fn sum_to_mat(h: &PauliSum) -> Mat {
    let n = h.num_qubits();
    h.terms().iter().fold(Mat::zeros(1 << n), |acc, t| {
        let word: Vec<(usize, char)> = (0..n)
            .map(|q| {
                let l = match t.string.letter(q) {
                    PauliLetter::I => 'I',
                    PauliLetter::X => 'X',
                    PauliLetter::Y => 'Y',
                    PauliLetter::Z => 'Z',
                };
                (q, l)
            })
            .collect();
        acc.add(&pauli_word(n, &word).scale(C::new(t.coeff, 0.0)))
    })
}

/// Dense unitary of a state-preparation map, one basis column at a time.
pub fn unitary_of(n: usize, f: impl Fn(&mut eha_core::Statevector)) -> Mat {
    let d = 1usize << n;
    let mut m = Mat::zeros(d);
    for c in 0..d {
        let mut s = eha_core::Statevector::basis(n, c).unwrap();
        f(&mut s);
        for (r, a) in s.amplitudes().iter().enumerate() {
            m.a[r * d + c] = *a;
        }
    }
    m
}

/// Frobenius norm of `ab - ba`.
pub fn comm(a: &Mat, b: &Mat) -> f64 {
    a.mul(b).sub(&b.mul(a)).norm()
}
