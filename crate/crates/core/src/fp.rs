//! Prime fields, polynomials over them, and the finite fields `F_p[t]/(h)`.

use crate::error::{Error, Result};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as u128 * b as u128) % m as u128) as u64;
        }
        b = ((b as u128 * b as u128) % m as u128) as u64;
        e >>= 1;
    }
    r
}

pub fn inv_mod_p(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, p - 2, p)
}

/// Multiplicative order of `a` modulo `m`, for `gcd(a, m) = 1`.
pub fn mult_order(a: u64, m: u64) -> u64 {
    let a = a % m;
    let mut x = a;
    let mut k = 1;
    while x != 1 % m {
        x = ((x as u128 * a as u128) % m as u128) as u64;
        k += 1;
    }
    k
}

/// Dense polynomials over `F_p`, lowest degree first, no trailing zeros.
pub mod poly {
    use super::inv_mod_p;

    pub fn trim(mut a: Vec<u64>) -> Vec<u64> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        let r = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(r)
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut r = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                r[i + j] = (r[i + j] + x * y) % p;
            }
        }
        trim(r)
    }

    /// Remainder of `a` modulo nonzero `m`.
    pub fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut r = trim(a.to_vec());
        let dm = m.len() - 1;
        let lead_inv = inv_mod_p(m[dm], p);
        while r.len() > dm {
            let k = r.len() - 1 - dm;
            let c = r[r.len() - 1] * lead_inv % p;
            for (i, &mi) in m.iter().enumerate() {
                r[k + i] = (r[k + i] + p * p - c * mi % p) % p;
            }
            r = trim(r);
        }
        r
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = trim(a.to_vec());
        let mut b = trim(b.to_vec());
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        if let Some(&l) = a.last() {
            let li = inv_mod_p(l, p);
            for c in a.iter_mut() {
                *c = *c * li % p;
            }
        }
        a
    }

    pub fn mul_mod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        rem(&mul(a, b, p), m, p)
    }

    pub fn pow_mod(a: &[u64], mut e: u128, m: &[u64], p: u64) -> Vec<u64> {
        let mut r = rem(&[1], m, p);
        let mut b = rem(a, m, p);
        while e > 0 {
            if e & 1 == 1 {
                r = mul_mod(&r, &b, m, p);
            }
            b = mul_mod(&b, &b, m, p);
            e >>= 1;
        }
        r
    }

    pub fn eval(a: &[u64], x: u64, p: u64) -> u64 {
        a.iter().rev().fold(0, |acc, &c| (acc * x + c) % p)
    }
}

/// Rabin's test for a monic polynomial over `F_p`.
pub fn is_irreducible(h: &[u64], p: u64) -> bool {
    let h = poly::trim(h.iter().map(|c| c % p).collect());
    if h.len() < 2 {
        return false;
    }
    let n = (h.len() - 1) as u32;
    let x = vec![0, 1];
    let frob_power = |k: u32| poly::pow_mod(&x, (p as u128).pow(k), &h, p);
    if poly::sub(&frob_power(n), &poly::rem(&x, &h, p), p) != Vec::<u64>::new() {
        return false;
    }
    for r in prime_factors(n as u64) {
        let t = poly::sub(&frob_power(n / r as u32), &x, p);
        if poly::gcd(&t, &h, p).len() != 1 {
            return false;
        }
    }
    true
}

/// First monic irreducible polynomial of degree `n` in lexicographic order of
/// its coefficient vector read from the constant term upward. For `n = 1`
/// this is `t`.
pub fn default_irreducible(p: u64, n: usize) -> Vec<u64> {
    let total = (p as u128).pow(n as u32);
    for idx in 0..total {
        let mut c = Vec::with_capacity(n + 1);
        let mut k = idx;
        for _ in 0..n {
            c.push((k % p as u128) as u64);
            k /= p as u128;
        }
        c.push(1);
        if is_irreducible(&c, p) {
            return c;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// The field `F_p[t]/(h)` with `h` monic irreducible of degree `deg`.
/// Elements are coefficient vectors of length exactly `deg`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueField {
    pub p: u64,
    pub deg: usize,
    pub modulus: Vec<u64>,
}

pub type Fq = Vec<u64>;

impl ResidueField {
    pub fn new(p: u64, modulus: Vec<u64>) -> Result<Self> {
        let modulus: Vec<u64> = modulus.iter().map(|c| c % p).collect();
        if modulus.last() != Some(&1) {
            return Err(Error::InvalidTower(
                "unramified polynomial must be monic".into(),
            ));
        }
        if !is_irreducible(&modulus, p) {
            return Err(Error::InvalidTower(format!(
                "polynomial {modulus:?} is reducible modulo {p}"
            )));
        }
        Ok(ResidueField {
            p,
            deg: modulus.len() - 1,
            modulus,
        })
    }

    pub fn size(&self) -> u64 {
        self.p.pow(self.deg as u32)
    }

    fn pad(&self, mut v: Vec<u64>) -> Fq {
        v.resize(self.deg, 0);
        v
    }

    pub fn zero(&self) -> Fq {
        vec![0; self.deg]
    }

    pub fn one(&self) -> Fq {
        self.from_int(1)
    }

    pub fn from_int(&self, a: i64) -> Fq {
        let mut v = self.zero();
        v[0] = a.rem_euclid(self.p as i64) as u64;
        v
    }

    pub fn is_zero(&self, a: &Fq) -> bool {
        a.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &Fq, b: &Fq) -> Fq {
        a.iter().zip(b).map(|(x, y)| (x + y) % self.p).collect()
    }

    pub fn neg(&self, a: &Fq) -> Fq {
        a.iter().map(|x| (self.p - x) % self.p).collect()
    }

    pub fn sub(&self, a: &Fq, b: &Fq) -> Fq {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Fq, b: &Fq) -> Fq {
        self.pad(poly::mul_mod(a, b, &self.modulus, self.p))
    }

    pub fn pow(&self, a: &Fq, e: u128) -> Fq {
        self.pad(poly::pow_mod(a, e, &self.modulus, self.p))
    }

    pub fn inv(&self, a: &Fq) -> Option<Fq> {
        if self.is_zero(a) {
            None
        } else {
            Some(self.pow(a, self.size() as u128 - 2))
        }
    }

    /// Element with index `k` in base-`p` digit order, `0 <= k < size`.
    pub fn element(&self, mut k: u64) -> Fq {
        (0..self.deg)
            .map(|_| {
                let d = k % self.p;
                k /= self.p;
                d
            })
            .collect()
    }

    pub fn index(&self, a: &Fq) -> u64 {
        a.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    pub fn elements(&self) -> impl Iterator<Item = Fq> + '_ {
        (0..self.size()).map(|k| self.element(k))
    }

    /// A generator of the multiplicative group.
    pub fn primitive_element(&self) -> Fq {
        let order = self.size() - 1;
        let factors = prime_factors(order);
        self.elements()
            .skip(1)
            .find(|g| factors.iter().all(|&r| self.pow(g, (order / r) as u128) != self.one()))
            .expect("multiplicative group is cyclic")
    }

    /// The subfield with `p^sub_deg` elements, as a sorted element list.
    pub fn subfield(&self, sub_deg: usize) -> Vec<Fq> {
        let q = (self.p as u128).pow(sub_deg as u32);
        self.elements().filter(|z| &self.pow(z, q) == z).collect()
    }

    /// Trace from the subfield of degree `sub_deg` down to `F_p`.
    pub fn trace(&self, z: &Fq, sub_deg: usize) -> u64 {
        let mut acc = self.zero();
        let mut y = z.clone();
        for _ in 0..sub_deg {
            acc = self.add(&acc, &y);
            y = self.pow(&y, self.p as u128);
        }
        debug_assert!(acc[1..].iter().all(|&c| c == 0));
        acc[0]
    }
}
