//! The Hopf algebra `A = V[x]/(x^q + b x)` and its structure maps.
//!
//! Elements of `A` are coefficient vectors of length `q`; elements of
//! `A ⊗ A` are `q × q` tables indexed by `(deg x⊗1, deg 1⊗x)`.

use rayon::prelude::*;

use crate::analytic::teichmuller;
use crate::element::PadicElement;
use crate::error::{Error, Result};
use crate::tower::ExtensionTower;
use crate::valuation::Rational;

use super::model::CanonicalGroupModel;

pub type AlgebraElement = Vec<PadicElement>;

#[derive(Debug, Clone)]
pub struct Tensor {
    q: usize,
    entries: Vec<PadicElement>,
}

impl Tensor {
    pub fn zero(tower: &ExtensionTower, q: usize) -> Self {
        Tensor {
            q,
            entries: vec![PadicElement::zero(tower); q * q],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> &PadicElement {
        &self.entries[i * self.q + j]
    }

    fn get_mut(&mut self, i: usize, j: usize) -> &mut PadicElement {
        &mut self.entries[i * self.q + j]
    }

    /// `a ⊗ b`.
    pub fn pure(a: &AlgebraElement, b: &AlgebraElement) -> Result<Self> {
        let q = a.len();
        let mut entries = Vec::with_capacity(q * q);
        for x in a {
            for y in b {
                entries.push(x.mul(y)?);
            }
        }
        Ok(Tensor { q, entries })
    }
}

/// `V[x]/(x^q + b x)`.
#[derive(Debug, Clone)]
pub struct HopfAlgebra {
    tower: ExtensionTower,
    q: usize,
    b: PadicElement,
}

impl HopfAlgebra {
    pub fn new(b: PadicElement, q: usize) -> Self {
        HopfAlgebra {
            tower: b.tower().clone(),
            q,
            b,
        }
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn one(&self) -> AlgebraElement {
        let mut v = vec![PadicElement::zero(&self.tower); self.q];
        v[0] = PadicElement::one(&self.tower);
        v
    }

    /// `x^n` for `n < q`.
    pub fn monomial(&self, n: usize) -> AlgebraElement {
        let mut v = vec![PadicElement::zero(&self.tower); self.q];
        v[n] = PadicElement::one(&self.tower);
        v
    }

    /// Index and factor for `x^n`, `n <= 2q − 2`: `x^n = −b x^{n−q+1}`.
    fn reduce(&self, n: usize) -> (usize, bool) {
        if n < self.q {
            (n, false)
        } else {
            (n + 1 - self.q, true)
        }
    }

    fn accumulate(&self, acc: &mut PadicElement, term: PadicElement, folded: bool) -> Result<()> {
        let t = if folded { term.mul(&self.b)?.neg() } else { term };
        *acc = acc.add(&t)?;
        Ok(())
    }

    pub fn add(&self, x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement> {
        x.iter().zip(y).map(|(a, b)| a.add(b)).collect()
    }

    pub fn scale(&self, c: &PadicElement, x: &AlgebraElement) -> Result<AlgebraElement> {
        x.iter().map(|a| a.mul(c)).collect()
    }

    pub fn mul(&self, x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement> {
        let mut out = vec![PadicElement::zero(&self.tower); self.q];
        for (i, a) in x.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                if b.is_exact_zero() {
                    continue;
                }
                let (k, folded) = self.reduce(i + j);
                self.accumulate(&mut out[k], a.mul(b)?, folded)?;
            }
        }
        Ok(out)
    }

    pub fn pow(&self, x: &AlgebraElement, n: u64) -> Result<AlgebraElement> {
        let mut acc = self.one();
        for _ in 0..n {
            acc = self.mul(&acc, x)?;
        }
        Ok(acc)
    }

    /// Value at a point `x0` with `x0^q + b x0 = 0`.
    pub fn evaluate(&self, x: &AlgebraElement, x0: &PadicElement) -> Result<PadicElement> {
        crate::analytic::eval_poly(x, x0)
    }

    pub fn tensor_one(&self) -> Tensor {
        let mut t = Tensor::zero(&self.tower, self.q);
        *t.get_mut(0, 0) = PadicElement::one(&self.tower);
        t
    }

    pub fn tensor_add(&self, x: &Tensor, y: &Tensor) -> Result<Tensor> {
        let entries = x
            .entries
            .iter()
            .zip(&y.entries)
            .map(|(a, b)| a.add(b))
            .collect::<Result<_>>()?;
        Ok(Tensor { q: self.q, entries })
    }

    pub fn tensor_mul(&self, x: &Tensor, y: &Tensor) -> Result<Tensor> {
        let q = self.q;
        let sparse: Vec<(usize, usize, &PadicElement)> = (0..q * q)
            .filter(|&n| !y.entries[n].is_exact_zero())
            .map(|n| (n / q, n % q, &y.entries[n]))
            .collect();
        let rows: Vec<Vec<PadicElement>> = (0..q)
            .into_par_iter()
            .map(|out_i| self.tensor_row(x, &sparse, out_i))
            .collect::<Result<_>>()?;
        Ok(Tensor {
            q,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Row `out_i` of `x · y` with `y` given sparsely.
    fn tensor_row(
        &self,
        x: &Tensor,
        sparse: &[(usize, usize, &PadicElement)],
        out_i: usize,
    ) -> Result<Vec<PadicElement>> {
        let q = self.q;
        let mut row = vec![PadicElement::zero(&self.tower); q];
        for i1 in 0..q {
            for &(i2, j2, c) in sparse {
                let (k, fold_i) = self.reduce(i1 + i2);
                if k != out_i {
                    continue;
                }
                for j1 in 0..q {
                    let a = x.get(i1, j1);
                    if a.is_exact_zero() {
                        continue;
                    }
                    let (l, fold_j) = self.reduce(j1 + j2);
                    let mut term = a.mul(c)?;
                    if fold_i {
                        term = term.mul(&self.b)?.neg();
                    }
                    self.accumulate(&mut row[l], term, fold_j)?;
                }
            }
        }
        Ok(row)
    }

    /// `c(x) = x⊗1 + 1⊗x + Σ κ_i x^i ⊗ x^{q−i}`.
    pub fn comultiplication(&self, kappa: &[PadicElement]) -> Result<Tensor> {
        if kappa.len() + 1 != self.q {
            return Err(Error::InvalidInput("need q-1 comultiplication coefficients".into()));
        }
        let mut t = Tensor::zero(&self.tower, self.q);
        *t.get_mut(1, 0) = PadicElement::one(&self.tower);
        *t.get_mut(0, 1) = PadicElement::one(&self.tower);
        for (idx, k) in kappa.iter().enumerate() {
            *t.get_mut(idx + 1, self.q - idx - 1) = k.clone();
        }
        Ok(t)
    }

    /// `c(x)^a` for `a = 0..q−1`.
    pub fn comultiplication_powers(&self, c: &Tensor) -> Result<Vec<Tensor>> {
        let mut out = vec![self.tensor_one()];
        for a in 1..self.q {
            let next = self.tensor_mul(&out[a - 1], c)?;
            out.push(next);
        }
        Ok(out)
    }

    /// `c(Σ y_a x^a) = Σ y_a c(x)^a`.
    pub fn apply_comultiplication(&self, y: &AlgebraElement, powers: &[Tensor]) -> Result<Tensor> {
        let mut acc = Tensor::zero(&self.tower, self.q);
        for (coef, pw) in y.iter().zip(powers) {
            if coef.is_exact_zero() {
                continue;
            }
            for (dst, src) in acc.entries.iter_mut().zip(&pw.entries) {
                *dst = dst.add(&src.mul(coef)?)?;
            }
        }
        Ok(acc)
    }

    /// Value of a tensor at a pair of points.
    pub fn evaluate_tensor(&self, t: &Tensor, x0: &PadicElement, y0: &PadicElement) -> Result<PadicElement> {
        let xs = powers_of(x0, self.q)?;
        let ys = powers_of(y0, self.q)?;
        let mut acc = PadicElement::zero(&self.tower);
        for i in 0..self.q {
            for j in 0..self.q {
                let c = t.get(i, j);
                if c.is_exact_zero() {
                    continue;
                }
                acc = acc.add(&c.mul(&xs[i])?.mul(&ys[j])?)?;
            }
        }
        Ok(acc)
    }
}

fn powers_of(x: &PadicElement, n: usize) -> Result<Vec<PadicElement>> {
    let mut out = vec![PadicElement::one(x.tower())];
    for k in 1..n {
        let next = out[k - 1].mul(x)?;
        out.push(next);
    }
    Ok(out)
}

/// Valuation at least that of `b`, to certified precision.
fn divisible(x: &PadicElement, by: &PadicElement) -> Result<bool> {
    let need = by.pi_valuation().expect("b is nonzero");
    match x.pi_valuation() {
        Some(v) => Ok(v >= need),
        None if x.shift() >= need => Ok(true),
        None => Err(Error::PrecisionExhausted {
            op: "divisibility by b",
            needed: need,
            available: x.shift(),
        }),
    }
}

/// Agreement of `a` and `b`, lowering `floor` to the certified digits of
/// the difference when they agree.
fn agree(a: &PadicElement, b: &PadicElement, floor: &mut Rational) -> bool {
    match a.sub(b) {
        Ok(d) if d.is_zero() => {
            *floor = (*floor).min(d.certified());
            true
        }
        _ => false,
    }
}

fn all_agree<'a>(
    pairs: impl IntoIterator<Item = (&'a PadicElement, &'a PadicElement)>,
    floor: &mut Rational,
) -> bool {
    let mut ok = true;
    for (a, b) in pairs {
        ok &= agree(a, b, floor);
    }
    ok
}

/// Outcome of each structural check on a [`CanonicalGroupModel`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HopfReport {
    pub counit: bool,
    pub coassociative: bool,
    pub points_add: bool,
    pub eta_group_like: bool,
    pub eta_order_p: bool,
    pub eta_is_additive_character: bool,
    pub differential_normalized: bool,
    pub differential_inverse: bool,
    pub differential_mod_b: bool,
    pub differential_invariant: bool,
    /// least certified `ϖ`-digits over the exact identities checked
    pub certified_digits: Rational,
}

impl HopfReport {
    pub fn all(&self) -> bool {
        self.counit
            && self.coassociative
            && self.points_add
            && self.eta_group_like
            && self.eta_order_p
            && self.eta_is_additive_character
            && self.differential_normalized
            && self.differential_inverse
            && self.differential_mod_b
            && self.differential_invariant
    }
}

impl CanonicalGroupModel {
    pub fn hopf_algebra(&self) -> HopfAlgebra {
        HopfAlgebra::new(self.b.clone(), self.q() as usize)
    }

    /// Points `[z] α` for `z` running over [`ExtensionTower::kappa`].
    pub fn points(&self) -> Result<Vec<PadicElement>> {
        self.tower
            .kappa()
            .iter()
            .map(|z| teichmuller(&self.tower, z)?.mul(&self.alpha))
            .collect()
    }

    /// `η(y)` as an element of `A`.
    pub fn eta(&self) -> Result<AlgebraElement> {
        self.eta_coefficients()
    }

    /// `f(x) = 1 + c x^{q−1}` with `c = Q/(1 + Q b)`.
    pub fn invariant_differential(&self) -> Result<AlgebraElement> {
        let qq = self.differential_q()?;
        let c = qq.div(&PadicElement::one(&self.tower).add(&qq.mul(&self.b)?)?)?;
        let mut f = self.hopf_algebra().one();
        let n = self.q() as usize - 1;
        f[n] = f[n].add(&c)?;
        Ok(f)
    }

    pub fn verify_hopf(&self) -> Result<HopfReport> {
        let alg = self.hopf_algebra();
        let q = alg.q();
        let t = &self.tower;
        let kappa = self.comultiplication_coefficients()?;
        let c = alg.comultiplication(&kappa)?;
        let powers = alg.comultiplication_powers(&c)?;
        let mut floor = Rational::from_integer(crate::element::EXACT);
        let mut rep = HopfReport {
            counit: true,
            coassociative: false,
            points_add: true,
            eta_group_like: false,
            eta_order_p: false,
            eta_is_additive_character: true,
            differential_normalized: false,
            differential_inverse: false,
            differential_mod_b: false,
            differential_invariant: false,
            certified_digits: floor,
        };

        // (ε ⊗ id) c = id and (id ⊗ ε) c = id
        for j in 0..q {
            let want = if j == 1 { PadicElement::one(t) } else { PadicElement::zero(t) };
            rep.counit &= agree(c.get(0, j), &want, &mut floor);
            rep.counit &= agree(c.get(j, 0), &want, &mut floor);
        }

        // Σ_a C_{ab} c(x)^a [i,j] against Σ_b C_{ab} c(x)^b [j,l]
        let coassoc: Vec<(bool, Rational)> = (0..q)
            .into_par_iter()
            .map(|i| -> Result<(bool, Rational)> {
                let mut fl = Rational::from_integer(crate::element::EXACT);
                for j in 0..q {
                    for l in 0..q {
                        let mut left = PadicElement::zero(t);
                        let mut right = PadicElement::zero(t);
                        for a in 0..q {
                            let cal = c.get(a, l);
                            if !cal.is_exact_zero() {
                                left = left.add(&cal.mul(powers[a].get(i, j))?)?;
                            }
                            let cia = c.get(i, a);
                            if !cia.is_exact_zero() {
                                right = right.add(&cia.mul(powers[a].get(j, l))?)?;
                            }
                        }
                        if !agree(&left, &right, &mut fl) {
                            return Ok((false, fl));
                        }
                    }
                }
                Ok((true, fl))
            })
            .collect::<Result<_>>()?;
        rep.coassociative = coassoc.iter().all(|r| r.0);
        for (_, fl) in coassoc {
            floor = floor.min(fl);
        }

        // c([z1]α, [z2]α) = [z1 + z2]α
        let k = t.residue_field();
        let kappa = t.kappa();
        let pts = self.points()?;
        for (z1, p1) in kappa.iter().zip(&pts) {
            for (z2, p2) in kappa.iter().zip(&pts) {
                let z = k.add(z1, z2);
                let pos = kappa.iter().position(|y| *y == z).expect("κ is additive");
                let want = &pts[pos];
                rep.points_add &= agree(&alg.evaluate_tensor(&c, p1, p2)?, want, &mut floor);
            }
        }

        let eta = self.eta()?;
        let c_eta = alg.apply_comultiplication(&eta, &powers)?;
        let eta_sq = Tensor::pure(&eta, &eta)?;
        rep.eta_group_like = all_agree(c_eta.entries.iter().zip(&eta_sq.entries), &mut floor);
        let eta_p = alg.pow(&eta, t.p())?;
        let one = alg.one();
        rep.eta_order_p = all_agree(eta_p.iter().zip(&one), &mut floor);
        let zeta = PadicElement::zeta_p(t)?;
        for (z, pt) in kappa.iter().zip(&pts) {
            let want = zeta.pow(k.trace(z, t.f()) as i64)?;
            rep.eta_is_additive_character &= agree(&alg.evaluate(&eta, pt)?, &want, &mut floor);
        }

        self.check_differential(&alg, &c, &powers, &mut rep, &mut floor)?;
        rep.certified_digits = floor;
        Ok(rep)
    }

    fn check_differential(
        &self,
        alg: &HopfAlgebra,
        c: &Tensor,
        powers: &[Tensor],
        rep: &mut HopfReport,
        floor: &mut Rational,
    ) -> Result<()> {
        let t = &self.tower;
        let q = alg.q();
        let qq = self.differential_q()?;
        let f = self.invariant_differential()?;
        rep.differential_normalized = agree(&f[0], &PadicElement::one(t), floor);

        let mut one_minus = alg.one();
        one_minus[q - 1] = qq.neg();
        let prod = alg.mul(&f, &one_minus)?;
        let one = alg.one();
        rep.differential_inverse = all_agree(prod.iter().zip(&one), floor);

        let mut other = alg.one();
        other[q - 1] = qq.mul_int(q as i64 - 1).neg();
        let prod = alg.mul(&other, &one_minus)?;
        let mut ok = true;
        for (a, b) in prod.iter().zip(alg.one()) {
            ok &= divisible(&a.sub(&b)?, &self.b)?;
        }
        rep.differential_mod_b = ok;

        // f(c(X,Y)) ∂_Y c ≡ 1 ⊗ f  and  f(c(X,Y)) ∂_X c ≡ f ⊗ 1  mod b
        let f_of_c = alg.apply_comultiplication(&f, powers)?;
        let mut dy = Tensor::zero(t, q);
        let mut dx = Tensor::zero(t, q);
        for i in 0..q {
            for j in 0..q {
                let e = c.get(i, j);
                if e.is_exact_zero() {
                    continue;
                }
                if j > 0 {
                    let (jj, fold) = alg.reduce(j - 1);
                    debug_assert!(!fold);
                    *dy.get_mut(i, jj) = dy.get(i, jj).add(&e.mul_int(j as i64))?;
                }
                if i > 0 {
                    *dx.get_mut(i - 1, j) = dx.get(i - 1, j).add(&e.mul_int(i as i64))?;
                }
            }
        }
        let lhs_y = alg.tensor_mul(&f_of_c, &dy)?;
        let lhs_x = alg.tensor_mul(&f_of_c, &dx)?;
        let rhs_y = Tensor::pure(&alg.one(), &f)?;
        let rhs_x = Tensor::pure(&f, &alg.one())?;
        let mut ok = true;
        for (l, r) in lhs_y.entries.iter().zip(&rhs_y.entries) {
            ok &= divisible(&l.sub(r)?, &self.b)?;
        }
        for (l, r) in lhs_x.entries.iter().zip(&rhs_x.entries) {
            ok &= divisible(&l.sub(r)?, &self.b)?;
        }
        rep.differential_invariant = ok;
        Ok(())
    }
}
