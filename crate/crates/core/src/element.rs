//! Elements of a tower at finite precision.
//!
//! A nonzero element is `Π^shift · unit` with the unit known modulo
//! `Π^rel`, `1 <= rel <= N`. An element with `rel = 0` is zero to absolute
//! precision `shift`. Units are stored masked, so equal elements at equal
//! precision have equal representations.

use std::fmt;

use crate::error::{Error, Result};
use crate::fp::Fq;
use crate::tower::ExtensionTower;
use crate::valuation::{int, Rational, Valuation};

/// Absolute precision assigned to exact zeros.
pub const EXACT: i64 = 1 << 40;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Raw {
    pub shift: i64,
    pub rel: i64,
    pub unit: Vec<u64>,
}

#[derive(Clone, PartialEq, Eq)]
pub struct PadicElement {
    tower: ExtensionTower,
    shift: i64,
    rel: i64,
    unit: Vec<u64>,
}

impl fmt::Debug for PadicElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rel == 0 {
            write!(f, "O(Π^{})", self.shift)
        } else {
            write!(
                f,
                "Π^{}·{:?} + O(Π^{})",
                self.shift,
                self.unit,
                self.shift + self.rel
            )
        }
    }
}

impl PadicElement {
    fn build(tower: &ExtensionTower, shift: i64, rel: i64, unit: Vec<u64>) -> Self {
        PadicElement {
            tower: tower.clone(),
            shift,
            rel,
            unit,
        }
    }

    pub(crate) fn raw(&self) -> Raw {
        Raw {
            shift: self.shift,
            rel: self.rel,
            unit: self.unit.clone(),
        }
    }

    pub(crate) fn from_raw(tower: &ExtensionTower, raw: &Raw) -> Self {
        Self::build(tower, raw.shift, raw.rel, raw.unit.clone())
    }

    pub(crate) fn unit(&self) -> &[u64] {
        &self.unit
    }

    /// Zero to absolute precision `prec` (top-uniformizer digits).
    pub fn zero_to(tower: &ExtensionTower, prec: i64) -> Self {
        let prec = if prec >= EXACT / 2 { EXACT } else { prec };
        Self::build(tower, prec, 0, tower.ring().zero())
    }

    /// The exact zero.
    pub fn zero(tower: &ExtensionTower) -> Self {
        Self::zero_to(tower, EXACT)
    }

    pub fn one(tower: &ExtensionTower) -> Self {
        Self::build(tower, 0, tower.precision(), tower.ring().one())
    }

    /// Normalizes an arbitrary coefficient vector known modulo `Π^rel`
    /// after multiplication by `Π^shift`.
    pub(crate) fn normalize(tower: &ExtensionTower, shift: i64, rel: i64, mut v: Vec<u64>) -> Self {
        let ring = tower.ring();
        let rel = rel.min(tower.precision());
        if rel <= 0 {
            return Self::zero_to(tower, shift + rel.max(0));
        }
        ring.mask(&mut v, rel);
        match ring.pi_valuation(&v, rel) {
            None => Self::zero_to(tower, shift + rel),
            Some(0) => Self::build(tower, shift, rel, v),
            Some(d) => {
                let mut u = div_pi_exact(tower, &v, d);
                let nrel = rel - d;
                ring.mask(&mut u, nrel);
                Self::build(tower, shift + d, nrel, u)
            }
        }
    }

    /// The element represented by a unit-level vector at full precision.
    pub(crate) fn from_unit_vec(tower: &ExtensionTower, v: Vec<u64>) -> Result<Self> {
        Ok(Self::normalize(tower, 0, tower.precision(), v))
    }

    /// Builds an element from the public encoding.
    pub fn from_digits(
        tower: &ExtensionTower,
        digits: &[u64],
        shift: i64,
        certified: i64,
    ) -> Result<Self> {
        let ring = tower.ring();
        if digits.len() != ring.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} digits, got {}",
                ring.len(),
                digits.len()
            )));
        }
        if certified < shift {
            return Err(Error::InvalidInput(
                "certified precision below the shift".into(),
            ));
        }
        let v: Vec<u64> = digits.iter().map(|&d| d % ring.modulus).collect();
        Ok(Self::normalize(tower, shift, certified - shift, v))
    }

    /// Public encoding: unit digits, shift and absolute precision.
    pub fn to_digits(&self) -> (Vec<u64>, i64, i64) {
        (self.unit.clone(), self.shift, self.absolute_precision())
    }

    pub fn from_int(tower: &ExtensionTower, n: i64) -> Self {
        if n == 0 {
            return Self::zero(tower);
        }
        let p = tower.p() as i64;
        let mut k = 0;
        let mut m = n;
        while m % p == 0 {
            m /= p;
            k += 1;
        }
        let ring = tower.ring();
        let c = (m as i128).rem_euclid(ring.modulus as i128) as u64;
        let d = tower.data();
        let ram = tower.ramification();
        // p^k = Π^{kE} η^{-k}
        let inv = if (k as usize) < d.eta_inv_pows.len() {
            d.eta_inv_pows[k as usize].clone()
        } else {
            pow_unit(tower, &d.eta_inv_pows[1], k as u64, &ring.one())
        };
        let v = ring.scale(&inv, c);
        Self::normalize(tower, k * ram, tower.precision(), v)
    }

    pub fn from_rational(tower: &ExtensionTower, r: Rational) -> Result<Self> {
        let n = Self::from_int(tower, *r.numer());
        let d = Self::from_int(tower, *r.denom());
        n.div(&d)
    }

    /// The top uniformizer `Π`.
    pub fn pi(tower: &ExtensionTower) -> Self {
        Self::build(tower, 1, tower.precision(), tower.ring().one())
    }

    pub fn varpi(tower: &ExtensionTower) -> Self {
        let (sign, k) = tower.varpi_monomial();
        let pk = Self::pi(tower).pow(k).expect("positive power");
        if sign < 0 {
            pk.neg()
        } else {
            pk
        }
    }

    /// `(−ϖ)^{1/(q−1)}`, when the tower contains it.
    pub fn neg_varpi_root(tower: &ExtensionTower) -> Result<Self> {
        tower
            .data()
            .lambda
            .as_ref()
            .map(|r| Self::from_raw(tower, r))
            .ok_or(Error::MissingElement("(-varpi)^(1/(q-1))"))
    }

    /// The designated primitive `p`-th root of unity.
    pub fn zeta_p(tower: &ExtensionTower) -> Result<Self> {
        tower
            .data()
            .zeta_p
            .as_ref()
            .map(|r| Self::from_raw(tower, r))
            .ok_or(Error::MissingElement("a primitive p-th root of unity"))
    }

    /// Plain lift of a residue-field element (digits in `[0, p)`).
    pub fn lift(tower: &ExtensionTower, z: &Fq) -> Self {
        Self::normalize(tower, 0, tower.precision(), tower.ring().lift_residue(z))
    }

    pub fn tower(&self) -> &ExtensionTower {
        &self.tower
    }

    pub fn is_zero(&self) -> bool {
        self.rel == 0
    }

    pub fn is_exact_zero(&self) -> bool {
        self.rel == 0 && self.shift >= EXACT
    }

    /// Valuation in top-uniformizer digits; `None` when zero to precision.
    pub fn pi_valuation(&self) -> Option<i64> {
        (self.rel > 0).then_some(self.shift)
    }

    /// Lower bound on the valuation in top-uniformizer digits; exact for
    /// nonzero elements, the absolute precision for zeros.
    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn relative_precision(&self) -> i64 {
        self.rel
    }

    /// Certified absolute precision in top-uniformizer digits.
    pub fn absolute_precision(&self) -> i64 {
        self.shift + self.rel
    }

    /// `ϖ`-normalized valuation.
    pub fn val(&self) -> Valuation {
        match self.pi_valuation() {
            Some(s) => Valuation::Finite(int(s) * self.tower.pi_valuation_unit()),
            None => Valuation::Infinite,
        }
    }

    /// `ϖ`-normalized certified absolute precision.
    pub fn certified(&self) -> Rational {
        int(self.absolute_precision()) * self.tower.pi_valuation_unit()
    }

    /// Residue class of an integral element.
    pub fn residue(&self) -> Result<Fq> {
        let k = self.tower.residue_field();
        match self.pi_valuation() {
            Some(0) => Ok(self.tower.ring().residue(&self.unit)),
            Some(s) if s > 0 => Ok(k.zero()),
            None if self.shift >= 1 => Ok(k.zero()),
            _ => Err(Error::Domain {
                op: "residue",
                detail: "element is not integral to precision".into(),
            }),
        }
    }

    fn same_tower(&self, other: &Self) -> Result<()> {
        if self.tower == other.tower {
            Ok(())
        } else {
            Err(Error::TowerMismatch)
        }
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        out.unit = self.tower.ring().neg(&self.unit);
        out.tower.ring().mask(&mut out.unit, out.rel);
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_tower(other)?;
        let tower = &self.tower;
        let ring = tower.ring();
        let base = self.shift.min(other.shift);
        let abs = self.absolute_precision().min(other.absolute_precision());
        let rel = (abs - base).min(tower.precision());
        if rel <= 0 {
            return Ok(Self::zero_to(tower, abs));
        }
        let mut acc = ring.zero();
        for x in [self, other] {
            if x.rel == 0 {
                continue;
            }
            let d = x.shift - base;
            if d >= rel {
                continue;
            }
            let term = mul_pi_pow(tower, &x.unit, d);
            acc = ring.add(&acc, &term);
        }
        Ok(Self::normalize(tower, base, rel, acc))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_tower(other)?;
        let tower = &self.tower;
        if self.rel == 0 || other.rel == 0 {
            let prec = (self.absolute_precision().saturating_add(other.shift))
                .min(other.absolute_precision().saturating_add(self.shift));
            return Ok(Self::zero_to(tower, prec));
        }
        let ring = tower.ring();
        let rel = self.rel.min(other.rel);
        let mut u = ring.mul(&self.unit, &other.unit);
        ring.mask(&mut u, rel);
        Ok(Self::build(tower, self.shift + other.shift, rel, u))
    }

    /// Multiplies by an integer.
    pub fn mul_int(&self, n: i64) -> Self {
        self.mul(&Self::from_int(&self.tower, n)).expect("same tower")
    }

    pub fn inv(&self) -> Result<Self> {
        if self.rel == 0 {
            return Err(Error::Domain {
                op: "inverse",
                detail: format!("element is zero to precision {}", self.shift),
            });
        }
        let tower = &self.tower;
        let u = inv_unit(tower, &self.unit, self.rel);
        Ok(Self::build(tower, -self.shift, self.rel, u))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.same_tower(other)?;
        self.mul(&other.inv()?)
    }

    pub fn pow(&self, n: i64) -> Result<Self> {
        if n < 0 {
            return self.inv()?.pow(-n);
        }
        let mut result = Self::one(&self.tower);
        let mut base = self.clone();
        let mut e = n as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(result)
    }

    /// Multiplies by `Π^k` exactly.
    pub fn shift_by(&self, k: i64) -> Self {
        let mut out = self.clone();
        out.shift = (out.shift + k).min(if out.rel == 0 { EXACT } else { i64::MAX });
        out
    }

    /// Truncates to absolute precision at most `prec`.
    pub fn truncate(&self, prec: i64) -> Self {
        if prec >= self.absolute_precision() {
            return self.clone();
        }
        Self::normalize(&self.tower, self.shift, prec - self.shift, self.unit.clone())
    }

    /// True when `self - other` is zero to the joint precision.
    pub fn agrees(&self, other: &Self) -> bool {
        self.sub(other).map(|d| d.is_zero()).unwrap_or(false)
    }

    /// Certified `ϖ`-adic digits of agreement with `other`: the certified
    /// precision of the difference if it vanishes, else its valuation.
    pub fn agreement(&self, other: &Self) -> Result<Rational> {
        let d = self.sub(other)?;
        Ok(match d.val() {
            Valuation::Infinite => d.certified(),
            Valuation::Finite(v) => v,
        })
    }
}

/// Multiplies a unit-level vector by `Π^d`, `d >= 0`.
pub(crate) fn mul_pi_pow(tower: &ExtensionTower, v: &[u64], d: i64) -> Vec<u64> {
    let ring = tower.ring();
    let ram = tower.ramification();
    let (c, r) = (d.div_euclid(ram), d.rem_euclid(ram));
    let mut out = ring.mul_pi(v, r as usize);
    if c > 0 {
        // Π^{cE} = p^c η^c
        if c as u32 >= ring.m_exp {
            return ring.zero();
        }
        out = ring.scale(&out, ring.pow_p[c as usize]);
        out = ring.mul(&out, &tower.data().eta_pows[c as usize]);
    }
    out
}

/// Divides a vector by `Π^d` when it is divisible to its precision.
fn div_pi_exact(tower: &ExtensionTower, v: &[u64], d: i64) -> Vec<u64> {
    let ring = tower.ring();
    let ram = tower.ramification();
    let mut out = v.to_vec();
    let mut left = d;
    let mut chunks = 0usize;
    while left > 0 {
        let step = left.min(ram);
        // y / Π^step = (y · Π^{E-step} / p) · η^{-1}
        if step < ram {
            out = ring.mul_pi(&out, (ram - step) as usize);
        }
        out = ring.div_p(&out);
        chunks += 1;
        left -= step;
    }
    if chunks > 0 {
        let d = tower.data();
        let inv = if chunks < d.eta_inv_pows.len() {
            d.eta_inv_pows[chunks].clone()
        } else {
            pow_unit(tower, &d.eta_inv_pows[1], chunks as u64, &ring.one())
        };
        out = ring.mul(&out, &inv);
    }
    out
}

fn pow_unit(tower: &ExtensionTower, base: &[u64], mut e: u64, start: &[u64]) -> Vec<u64> {
    let ring = tower.ring();
    let mut acc = start.to_vec();
    let mut b = base.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = ring.mul(&acc, &b);
        }
        b = ring.mul(&b, &b);
        e >>= 1;
    }
    acc
}

/// Inverse of a unit known modulo `Π^rel`, by Newton iteration.
fn inv_unit(tower: &ExtensionTower, u: &[u64], rel: i64) -> Vec<u64> {
    let ring = tower.ring();
    let k = tower.residue_field();
    let r0 = k
        .inv(&ring.residue(u))
        .expect("unit has nonzero residue");
    let mut z = ring.lift_residue(&r0);
    let two = ring.scalar(2);
    let mut known = 1i64;
    loop {
        known = (2 * known).min(rel);
        let uz = ring.mul(u, &z);
        z = ring.mul(&z, &ring.sub(&two, &uz));
        ring.mask(&mut z, known);
        if known >= rel {
            break;
        }
    }
    z
}
