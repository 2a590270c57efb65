//! Raw coefficient arithmetic in `(Z/P)[t]/(h) [Π] / (G(Π))`.
//!
//! A vector of length `E·F` stores the coefficient of `t^a Π^j` at index
//! `j·F + a`. `G` has integer coefficients, so `Π^{E+k}` reduces to a vector
//! with scalar entries.

use crate::fp::{Fq, ResidueField};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct FlatRing {
    pub p: u64,
    /// total ramification `E`
    pub ram: usize,
    /// total residue degree `F`
    pub deg: usize,
    /// storage modulus is `p^m_exp`
    pub m_exp: u32,
    pub modulus: u64,
    /// monic lift of the residue modulus, coefficients in `[0, p)`
    pub h: Vec<u64>,
    /// `red[k]` holds `Π^{E+k}` as `E` scalars, `k = 0..E-1`
    pub red: Vec<Vec<u64>>,
    pub residue: ResidueField,
    /// `pow_p[i] = p^i mod P` for `i <= m_exp`
    pub pow_p: Vec<u64>,
}

impl FlatRing {
    pub fn new(p: u64, eis: &[i64], residue: ResidueField, m_exp: u32) -> Self {
        let ram = eis.len() - 1;
        let deg = residue.deg;
        let modulus = p.pow(m_exp);
        let pm = modulus as i128;
        let mut red = Vec::with_capacity(ram);
        let base: Vec<u64> = eis[..ram]
            .iter()
            .map(|&g| ((-(g as i128)).rem_euclid(pm)) as u64)
            .collect();
        red.push(base.clone());
        for k in 1..ram {
            let prev: &Vec<u64> = &red[k - 1];
            let top = prev[ram - 1] as u128;
            let mut next = vec![0u64; ram];
            for j in 0..ram {
                let shifted = if j == 0 { 0 } else { prev[j - 1] as u128 };
                next[j] = ((shifted + top * base[j] as u128) % modulus as u128) as u64;
            }
            red.push(next);
        }
        let pow_p = (0..=m_exp).map(|i| p.pow(i)).collect();
        FlatRing {
            p,
            ram,
            deg,
            m_exp,
            modulus,
            h: residue.modulus.clone(),
            red,
            residue,
            pow_p,
        }
    }

    pub fn len(&self) -> usize {
        self.ram * self.deg
    }

    pub fn zero(&self) -> Vec<u64> {
        vec![0; self.len()]
    }

    pub fn one(&self) -> Vec<u64> {
        let mut v = self.zero();
        v[0] = 1 % self.modulus;
        v
    }

    pub fn scalar(&self, c: u64) -> Vec<u64> {
        let mut v = self.zero();
        v[0] = c % self.modulus;
        v
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let m = self.modulus;
        a.iter().zip(b).map(|(x, y)| (x + y) % m).collect()
    }

    pub fn neg(&self, a: &[u64]) -> Vec<u64> {
        let m = self.modulus;
        a.iter().map(|x| (m - x) % m).collect()
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let m = self.modulus;
        a.iter().zip(b).map(|(x, y)| (x + m - y) % m).collect()
    }

    pub fn scale(&self, a: &[u64], c: u64) -> Vec<u64> {
        let m = self.modulus as u128;
        a.iter()
            .map(|&x| ((x as u128 * c as u128) % m) as u64)
            .collect()
    }

    /// Product of two ring vectors.
    pub fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let (e, f) = (self.ram, self.deg);
        let m = self.modulus as u128;
        let fw = 2 * f - 1;
        let mut acc = vec![0u128; (2 * e - 1) * fw];
        let a_nz: Vec<(usize, usize, u128)> = a
            .iter()
            .enumerate()
            .filter(|(_, &x)| x != 0)
            .map(|(idx, &x)| (idx / f, idx % f, x as u128))
            .collect();
        if a_nz.is_empty() {
            return self.zero();
        }
        let b_nz: Vec<(usize, usize, u128)> = b
            .iter()
            .enumerate()
            .filter(|(_, &x)| x != 0)
            .map(|(idx, &x)| (idx / f, idx % f, x as u128))
            .collect();
        for &(i, s, x) in &a_nz {
            for &(j, t, y) in &b_nz {
                acc[(i + j) * fw + s + t] += x * y;
            }
        }
        // reduce modulo P and h, one Π-coefficient at a time
        let mut pi_coeffs: Vec<Vec<u64>> = Vec::with_capacity(2 * e - 1);
        for row in acc.chunks(fw) {
            let mut c: Vec<u64> = row.iter().map(|&v| (v % m) as u64).collect();
            self.reduce_t(&mut c);
            c.truncate(f);
            pi_coeffs.push(c);
        }
        self.fold_pi(pi_coeffs)
    }

    /// Reduces a `t`-polynomial of length `< 2F` modulo `h` in place.
    fn reduce_t(&self, c: &mut [u64]) {
        let f = self.deg;
        let m = self.modulus;
        for top in (f..c.len()).rev() {
            let lead = c[top];
            if lead == 0 {
                continue;
            }
            c[top] = 0;
            for (i, &hi) in self.h[..f].iter().enumerate() {
                let sub = ((lead as u128 * hi as u128) % m as u128) as u64;
                c[top - f + i] = (c[top - f + i] + m - sub) % m;
            }
        }
    }

    /// Folds `Π`-coefficients of degree up to `2E-2` back below `E`.
    fn fold_pi(&self, pi_coeffs: Vec<Vec<u64>>) -> Vec<u64> {
        let (e, f) = (self.ram, self.deg);
        let m = self.modulus as u128;
        let mut out = vec![0u128; e * f];
        for (j, c) in pi_coeffs.iter().enumerate().take(e) {
            for (s, &v) in c.iter().enumerate() {
                out[j * f + s] += v as u128;
            }
        }
        for (k, c) in pi_coeffs.iter().enumerate().skip(e) {
            let r = &self.red[k - e];
            for (s, &v) in c.iter().enumerate() {
                if v == 0 {
                    continue;
                }
                for (j, &rj) in r.iter().enumerate() {
                    out[j * f + s] += v as u128 * rj as u128;
                }
            }
        }
        out.into_iter().map(|v| (v % m) as u64).collect()
    }

    /// Multiplies by `Π^d` for `0 <= d < E`.
    pub fn mul_pi(&self, a: &[u64], d: usize) -> Vec<u64> {
        debug_assert!(d < self.ram);
        if d == 0 {
            return a.to_vec();
        }
        let (e, f) = (self.ram, self.deg);
        let mut coeffs: Vec<Vec<u64>> = vec![vec![0; f]; e + d];
        for j in 0..e {
            coeffs[j + d].copy_from_slice(&a[j * f..(j + 1) * f]);
        }
        self.fold_pi(coeffs)
    }

    /// Divides every coefficient by `p`; the caller guarantees divisibility
    /// of every coefficient that is still meaningful.
    pub fn div_p(&self, a: &[u64]) -> Vec<u64> {
        a.iter().map(|&x| x / self.p).collect()
    }

    fn vp(&self, x: u64) -> u32 {
        if x == 0 {
            return self.m_exp;
        }
        let mut k = 0;
        let mut y = x;
        while y.is_multiple_of(self.p) {
            y /= self.p;
            k += 1;
        }
        k
    }

    /// `Π`-adic valuation of a masked vector, if below `limit`.
    pub fn pi_valuation(&self, a: &[u64], limit: i64) -> Option<i64> {
        let (e, f) = (self.ram, self.deg);
        let mut best: Option<i64> = None;
        for j in 0..e {
            let k = a[j * f..(j + 1) * f]
                .iter()
                .map(|&x| self.vp(x))
                .min()
                .unwrap_or(self.m_exp);
            if k >= self.m_exp {
                continue;
            }
            let v = e as i64 * k as i64 + j as i64;
            if best.is_none_or(|b| v < b) {
                best = Some(v);
            }
        }
        best.filter(|&v| v < limit)
    }

    /// Number of `p`-adic digits kept for the `Π^j` coefficient at
    /// relative precision `rp`.
    pub fn digits_kept(&self, j: usize, rp: i64) -> u32 {
        let e = self.ram as i64;
        let k = (rp - j as i64 + e - 1).div_euclid(e);
        k.clamp(0, self.m_exp as i64) as u32
    }

    /// Canonical form modulo `Π^rp`.
    pub fn mask(&self, a: &mut [u64], rp: i64) {
        let f = self.deg;
        for j in 0..self.ram {
            let md = self.pow_p[self.digits_kept(j, rp) as usize];
            for x in a[j * f..(j + 1) * f].iter_mut() {
                *x %= md;
            }
        }
    }

    pub fn residue(&self, a: &[u64]) -> Fq {
        a[..self.deg].iter().map(|&x| x % self.p).collect()
    }

    pub fn lift_residue(&self, z: &Fq) -> Vec<u64> {
        let mut v = self.zero();
        v[..self.deg].copy_from_slice(z);
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fp::default_irreducible;

    fn ring(p: u64, eis: &[i64], f: usize, m: u32) -> FlatRing {
        let k = ResidueField::new(p, default_irreducible(p, f)).unwrap();
        FlatRing::new(p, eis, k, m)
    }

    #[test]
    fn pi_power_reduces_to_p() {
        // Π^2 = 3 in Z_3[Π]/(Π^2 - 3)
        let r = ring(3, &[-3, 0, 1], 1, 5);
        let pi = vec![0, 1];
        assert_eq!(r.mul(&pi, &pi), vec![3, 0]);
        assert_eq!(r.mul_pi(&pi, 1), vec![3, 0]);
    }

    #[test]
    fn unramified_square_root() {
        // t^2 = -1 over Z_3 when h = t^2 + 1
        let r = ring(3, &[-3, 1], 2, 4);
        assert_eq!(r.h, vec![1, 0, 1]);
        let t = vec![0, 1];
        assert_eq!(r.mul(&t, &t), vec![80, 0]);
    }

    #[test]
    fn masking_is_idempotent_and_valuation_exact() {
        let r = ring(3, &[-3, 0, 1], 1, 4);
        let mut a = vec![9 * 2, 3];
        r.mask(&mut a, 5);
        assert_eq!(r.pi_valuation(&a, 100), Some(3));
        let b = a.clone();
        r.mask(&mut a, 5);
        assert_eq!(a, b);
    }
}
