//! Gauss sums over the residue field `κ` and the Raynaud constants built
//! from them.

use crate::analytic::teichmuller;
use crate::element::PadicElement;
use crate::error::{Error, Result};
use crate::tower::ExtensionTower;
use crate::valuation::{rat, Rational};

fn check_index(i: u64, q: u64) -> Result<()> {
    if i == 0 || i >= q {
        return Err(Error::InvalidInput(format!(
            "character index {i} outside 1..{}",
            q - 1
        )));
    }
    Ok(())
}

/// Base-`p` digits of `i`, least significant first, padded to `f` places.
pub fn digits(i: u64, p: u64, f: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(f);
    let mut k = i;
    for _ in 0..f {
        out.push(k % p);
        k /= p;
    }
    out
}

/// `s(i)`: the sum of the base-`p` digits of `i`, for `1 <= i <= q-1`.
pub fn digit_sum(i: u64, p: u64, f: usize) -> Result<u64> {
    check_index(i, p.pow(f as u32))?;
    Ok(digits(i, p, f).iter().sum())
}

/// `h_i`: the smallest `h` with `0 < h <= f` and `p^{f-h} | i`.
pub fn h_index(i: u64, p: u64, f: usize) -> Result<usize> {
    check_index(i, p.pow(f as u32))?;
    Ok((1..=f)
        .find(|&h| i.is_multiple_of(p.pow((f - h) as u32)))
        .expect("h = f always qualifies"))
}

/// Stickelberger valuation `s(i)·e/(p−1)` of `g(χ_i)`.
pub fn gauss_valuation(i: u64, p: u64, f: usize, e: i64) -> Result<Rational> {
    Ok(rat(digit_sum(i, p, f)? as i64 * e, p as i64 - 1))
}

/// Gauss sums `g(χ_i) = Σ_{z∈κ*} [z]^{−i} ζ_p^{tr z}` for `i = 1..q−1`.
///
/// For the trivial character `i = q−1` the sum runs against
/// `Σ_{z∈κ} 𝐳 − q·𝟎`, giving `−q`; the plain unit sum is
/// [`GaussSumTable::unit_character_sum`].
#[derive(Debug, Clone)]
pub struct GaussSumTable {
    tower: ExtensionTower,
    /// `[g]^m` for a generator `g` of `κ*`, `m = 0..q−2`
    teich_powers: Vec<PadicElement>,
    /// `tr(g^m)` in `F_p`
    traces: Vec<u64>,
    zeta_powers: Vec<PadicElement>,
    sums: Vec<PadicElement>,
}

impl GaussSumTable {
    pub fn new(tower: &ExtensionTower) -> Result<Self> {
        let zeta = PadicElement::zeta_p(tower)?;
        let p = tower.p();
        let q = tower.q();
        let k = tower.residue_field();
        let g = tower.kappa_generator();
        let tg = teichmuller(tower, &g)?;
        let mut teich_powers = Vec::with_capacity(q as usize - 1);
        let mut traces = Vec::with_capacity(q as usize - 1);
        let mut cur = PadicElement::one(tower);
        let mut z = k.one();
        for _ in 0..q - 1 {
            teich_powers.push(cur.clone());
            traces.push(k.trace(&z, tower.f()));
            cur = cur.mul(&tg)?;
            z = k.mul(&z, &g);
        }
        let mut zeta_powers = vec![PadicElement::one(tower)];
        for j in 1..p as usize {
            let next = zeta_powers[j - 1].mul(&zeta)?;
            zeta_powers.push(next);
        }
        let mut table = GaussSumTable {
            tower: tower.clone(),
            teich_powers,
            traces,
            zeta_powers,
            sums: Vec::new(),
        };
        let sums = (1..q)
            .map(|i| table.compute(i))
            .collect::<Result<Vec<_>>>()?;
        table.sums = sums;
        Ok(table)
    }

    /// `Σ_{z∈κ*} [z]^{−i} ζ_p^{tr z}` without the trivial-character term.
    fn unit_sum(&self, i: u64) -> Result<PadicElement> {
        let q1 = self.teich_powers.len() as u64;
        let mut acc = PadicElement::zero(&self.tower);
        for m in 0..q1 {
            let exp = ((q1 - i % q1) * m) % q1;
            let term = self.teich_powers[exp as usize]
                .mul(&self.zeta_powers[self.traces[m as usize] as usize])?;
            acc = acc.add(&term)?;
        }
        Ok(acc)
    }

    fn compute(&self, i: u64) -> Result<PadicElement> {
        let q = self.tower.q();
        let s = self.unit_sum(i)?;
        if i == q - 1 {
            s.add(&PadicElement::from_int(&self.tower, 1 - q as i64))
        } else {
            Ok(s)
        }
    }

    pub fn tower(&self) -> &ExtensionTower {
        &self.tower
    }

    /// `g(χ_i)` for `1 <= i <= q−1`.
    pub fn get(&self, i: u64) -> Result<&PadicElement> {
        check_index(i, self.tower.q())?;
        Ok(&self.sums[i as usize - 1])
    }

    /// The sum over `κ*` alone; equals `−1` for the trivial character.
    pub fn unit_character_sum(&self, i: u64) -> Result<PadicElement> {
        check_index(i, self.tower.q())?;
        self.unit_sum(i)
    }

    /// `Σ_{z∈κ*} [z]^{i} ζ_p^{−tr z}`: the sum for `χ_i` against `Ψ(−z)`.
    pub fn conjugate_sum(&self, i: u64) -> Result<PadicElement> {
        check_index(i, self.tower.q())?;
        let q1 = self.teich_powers.len() as u64;
        let p = self.zeta_powers.len() as u64;
        let mut acc = PadicElement::zero(&self.tower);
        for m in 0..q1 {
            let exp = (i * m) % q1;
            let tr = (p - self.traces[m as usize]) % p;
            let term = self.teich_powers[exp as usize].mul(&self.zeta_powers[tr as usize])?;
            acc = acc.add(&term)?;
        }
        Ok(acc)
    }

    /// Teichmüller lift of `g^m` for the fixed generator `g` of `κ*`.
    pub fn teichmuller_power(&self, m: usize) -> &PadicElement {
        &self.teich_powers[m % self.teich_powers.len()]
    }

    /// `w_i = g(χ_1)^{s(i)} / ((q−1)^{s(i)−1} g(χ_i))`.
    pub fn raynaud_w(&self, i: u64) -> Result<PadicElement> {
        let t = &self.tower;
        let s = digit_sum(i, t.p(), t.f())? as i64;
        let g1 = self.get(1)?;
        let q1 = PadicElement::from_int(t, t.q() as i64 - 1);
        g1.pow(s)?.div(&q1.pow(s - 1)?.mul(self.get(i)?)?)
    }

    /// `w = g(χ_1)^{p−1} / (q−1)^{p−1}`.
    pub fn raynaud_w_total(&self) -> Result<PadicElement> {
        let t = &self.tower;
        let n = t.p() as i64 - 1;
        let q1 = PadicElement::from_int(t, t.q() as i64 - 1);
        self.get(1)?.pow(n)?.div(&q1.pow(n)?)
    }

    /// The unit `u` with `w = ϖ^e u`.
    pub fn raynaud_u(&self) -> Result<PadicElement> {
        let t = &self.tower;
        self.raynaud_w_total()?
            .div(&PadicElement::varpi(t).pow(t.e())?)
    }
}

/// Builds the table for a tower, erroring when `ζ_p` is absent.
pub fn gauss_sum(tower: &ExtensionTower, i: u64) -> Result<PadicElement> {
    GaussSumTable::new(tower)?.get(i).cloned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::{make_tower, ExtensionStep};
    use crate::valuation::Valuation;

    fn cyclo(p: u64, f: usize, e: usize, n: i64) -> ExtensionTower {
        let mut eis = vec![0i64; e + 1];
        eis[0] = -(p as i64);
        eis[e] = 1;
        make_tower(
            p,
            &[
                ExtensionStep::Unramified { degree: f, poly: None },
                ExtensionStep::Eisenstein { poly: eis },
                ExtensionStep::Cyclotomic { order: p },
            ],
            n,
        )
        .unwrap()
    }

    #[test]
    fn digit_combinatorics() {
        assert_eq!(digit_sum(1, 3, 1).unwrap(), 1);
        assert_eq!(h_index(1, 3, 1).unwrap(), 1);
        assert_eq!(digit_sum(5, 3, 2).unwrap(), 3);
        assert_eq!(h_index(3, 3, 2).unwrap(), 1);
        assert_eq!(h_index(1, 3, 2).unwrap(), 2);
        assert!(digit_sum(0, 3, 1).is_err());
        assert!(h_index(9, 3, 2).is_err());
    }

    #[test]
    fn stickelberger_small() {
        let t = cyclo(3, 1, 1, 24);
        let g = GaussSumTable::new(&t).unwrap();
        assert_eq!(g.get(1).unwrap().val(), Valuation::finite(1, 2));
        let t = cyclo(5, 1, 1, 24);
        let g = GaussSumTable::new(&t).unwrap();
        assert_eq!(g.get(2).unwrap().val(), Valuation::finite(1, 2));
    }

    #[test]
    fn trivial_character() {
        let t = cyclo(3, 2, 1, 24);
        let g = GaussSumTable::new(&t).unwrap();
        let minus_one = PadicElement::from_int(&t, -1);
        assert!(g.unit_character_sum(8).unwrap().agrees(&minus_one));
        assert!(g.get(8).unwrap().agrees(&PadicElement::from_int(&t, -9)));
    }

    #[test]
    fn fundamental_characters_have_unit_constant() {
        let t = cyclo(3, 2, 1, 24);
        let g = GaussSumTable::new(&t).unwrap();
        let one = PadicElement::one(&t);
        assert!(g.raynaud_w(1).unwrap().agrees(&one));
        assert!(g.raynaud_w(3).unwrap().agrees(&one));
        assert_eq!(g.raynaud_w_total().unwrap().val(), Valuation::from_int(1));
    }

    #[test]
    fn jacobi_sum_oracle() {
        // w_2 = J / (q−1) with J = Σ_{a≠0,1} [a]^{-1} [1−a]^{-1}
        let t = cyclo(5, 1, 1, 24);
        let g = GaussSumTable::new(&t).unwrap();
        let mut j = PadicElement::zero(&t);
        for a in 2..5u64 {
            let ta = teichmuller(&t, &vec![a]).unwrap();
            let tb = teichmuller(&t, &vec![(6 - a) % 5]).unwrap();
            j = j.add(&ta.mul(&tb).unwrap().inv().unwrap()).unwrap();
        }
        let direct = j.div(&PadicElement::from_int(&t, 4)).unwrap();
        assert!(direct.agrees(&g.raynaud_w(2).unwrap()));
    }
}
