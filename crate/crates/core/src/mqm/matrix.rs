//! Square matrices over a prime field acting on row vectors from the right,
//! used as `End_{F_p}(E)` for a finite field `E`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::algebra::{Field, Fq};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FpMatrix {
    p: u32,
    n: usize,
    // Row-major entries in [0, p).
    entries: Vec<u32>,
}

impl FpMatrix {
    pub fn from_rows(p: u32, n: usize, entries: Vec<u32>) -> Option<Self> {
        (entries.len() == n * n).then(|| FpMatrix { p, n, entries: entries.into_iter().map(|x| x % p).collect() })
    }

    pub fn zero(p: u32, n: usize) -> Self {
        FpMatrix { p, n, entries: vec![0; n * n] }
    }

    pub fn scalar(p: u32, n: usize, c: u32) -> Self {
        let mut m = Self::zero(p, n);
        for i in 0..n {
            m.entries[i * n + i] = c % p;
        }
        m
    }

    pub fn identity(p: u32, n: usize) -> Self {
        Self::scalar(p, n, 1)
    }

    /// All `p^{n²}` matrices, in index order.
    pub fn all(p: u32, n: usize) -> impl Iterator<Item = FpMatrix> {
        let count = (p as u64).pow((n * n) as u32);
        (0..count).map(move |mut idx| {
            let entries = (0..n * n)
                .map(|_| {
                    let d = (idx % p as u64) as u32;
                    idx /= p as u64;
                    d
                })
                .collect();
            FpMatrix { p, n, entries }
        })
    }

    /// The matrix of an `F_p`-linear map `f: E → E` on the power basis:
    /// row `i` holds the coordinates of `f(x^i)`.
    pub fn of_linear_map(field: Field, f: impl Fn(Fq) -> Fq) -> Self {
        let (p, r) = (field.characteristic(), field.degree() as usize);
        let mut entries = Vec::with_capacity(r * r);
        for i in 0..r {
            let mut basis = vec![0u32; r];
            basis[i] = 1;
            entries.extend(f(field.from_coeffs(&basis)).coeffs());
        }
        FpMatrix { p, n: r, entries }
    }

    /// Right multiplication `y ↦ y x` on `E`.
    pub fn right_mul(x: Fq) -> Self {
        Self::of_linear_map(x.field(), |y| y * x)
    }

    /// `v M` for the coordinates of `v ∈ E`.
    pub fn apply(&self, v: Fq) -> Fq {
        let c = v.coeffs();
        let out: Vec<u32> = (0..self.n).map(|j| (0..self.n).map(|i| c[i] * self.entries[i * self.n + j]).sum::<u32>() % self.p).collect();
        v.field().from_coeffs(&out)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0)
    }

    /// Rank by Gaussian elimination over `F_p`.
    pub fn rank(&self) -> usize {
        let (p, n) = (self.p as u64, self.n);
        let mut m: Vec<Vec<u64>> = self.entries.chunks(n).map(|r| r.iter().map(|&x| x as u64).collect()).collect();
        let mut rank = 0;
        for col in 0..n {
            let Some(piv) = (rank..n).find(|&r| m[r][col] != 0) else { continue };
            m.swap(rank, piv);
            let inv = mod_pow(m[rank][col], p - 2, p);
            for r in 0..n {
                if r != rank && m[r][col] != 0 {
                    let f = m[r][col] * inv % p;
                    let pivot_row = m[rank].clone();
                    for (x, &y) in m[r].iter_mut().zip(&pivot_row) {
                        *x = (*x + p * p - f * y % p) % p;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn is_invertible(&self) -> bool {
        self.rank() == self.n
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut out = Self::identity(self.p, self.n);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                out = &out * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        out
    }
}

fn mod_pow(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut out = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            out = out * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    out
}

impl Add for &FpMatrix {
    type Output = FpMatrix;
    fn add(self, o: &FpMatrix) -> FpMatrix {
        let entries = self.entries.iter().zip(&o.entries).map(|(a, b)| (a + b) % self.p).collect();
        FpMatrix { entries, ..self.clone() }
    }
}

impl Neg for &FpMatrix {
    type Output = FpMatrix;
    fn neg(self) -> FpMatrix {
        let entries = self.entries.iter().map(|a| (self.p - a) % self.p).collect();
        FpMatrix { entries, ..self.clone() }
    }
}

impl Sub for &FpMatrix {
    type Output = FpMatrix;
    fn sub(self, o: &FpMatrix) -> FpMatrix {
        self + &(-o)
    }
}

impl Mul for &FpMatrix {
    type Output = FpMatrix;
    fn mul(self, o: &FpMatrix) -> FpMatrix {
        let n = self.n;
        let mut entries = vec![0u32; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[i * n + j] = (0..n).map(|k| self.entries[i * n + k] * o.entries[k * n + j]).sum::<u32>() % self.p;
            }
        }
        FpMatrix { entries, ..self.clone() }
    }
}

impl fmt::Debug for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Row-major entries separated by spaces.
impl fmt::Display for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|x| x.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl2_f3_has_48_elements() {
        assert_eq!(FpMatrix::all(3, 2).filter(|m| m.is_invertible()).count(), 48);
    }

    #[test]
    fn right_multiplication_is_a_representation() {
        let f9 = Field::of_order(9).unwrap();
        for x in f9.elements() {
            for y in f9.elements() {
                assert_eq!(&FpMatrix::right_mul(x) * &FpMatrix::right_mul(y), FpMatrix::right_mul(x * y));
                assert_eq!(FpMatrix::right_mul(x).apply(y), y * x);
            }
        }
    }

    #[test]
    fn pow_and_rank() {
        let m = FpMatrix::from_rows(3, 2, vec![0, 1, 2, 0]).unwrap();
        // x ↦ x M with M² = −1.
        assert_eq!(m.pow(2), FpMatrix::scalar(3, 2, 2));
        assert_eq!(FpMatrix::from_rows(3, 2, vec![1, 2, 2, 1]).unwrap().rank(), 1);
    }
}
