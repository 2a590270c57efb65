//! Series and root finding over a tower.

use crate::element::PadicElement;
use crate::error::{Error, Result};
use crate::fp::{Fq, ResidueField};
use crate::tower::ExtensionTower;
use crate::valuation::{int, Rational};

pub fn eval_poly(coeffs: &[PadicElement], x: &PadicElement) -> Result<PadicElement> {
    let mut acc = PadicElement::zero(x.tower());
    for c in coeffs.iter().rev() {
        acc = acc.mul(x)?.add(c)?;
    }
    Ok(acc)
}

pub fn derivative(coeffs: &[PadicElement]) -> Vec<PadicElement> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c.mul_int(k as i64))
        .collect()
}

/// Roots of valuation `slope` (top-uniformizer digits) of a polynomial.
#[derive(Debug, Clone)]
pub struct RootSearch {
    /// Lifts of simple residual roots, in residue-index order.
    pub roots: Vec<PadicElement>,
    /// Repeated residual roots, with multiplicity; not separated.
    pub clusters: Vec<(Fq, usize)>,
}

fn fq_eval(k: &ResidueField, poly: &[Fq], z: &Fq) -> Fq {
    poly.iter()
        .rev()
        .fold(k.zero(), |acc, c| k.add(&k.mul(&acc, z), c))
}

/// Synthetic division by `X - z`.
fn fq_deflate(k: &ResidueField, poly: &[Fq], z: &Fq) -> Vec<Fq> {
    let n = poly.len();
    let mut out = vec![k.zero(); n - 1];
    let mut carry = k.zero();
    for i in (1..n).rev() {
        carry = k.add(&k.mul(&carry, z), &poly[i]);
        out[i - 1] = carry.clone();
    }
    out
}

fn multiplicity(k: &ResidueField, poly: &[Fq], z: &Fq) -> usize {
    let mut cur = poly.to_vec();
    let mut m = 0;
    while cur.len() > 1 && k.is_zero(&fq_eval(k, &cur, z)) {
        cur = fq_deflate(k, &cur, z);
        m += 1;
    }
    m
}

/// Finds the roots of `Σ c_k y^k` with `Π`-adic valuation exactly `slope`
/// whose residual roots are simple, lifting each by Newton iteration.
pub fn roots_at_valuation(coeffs: &[PadicElement], slope: i64) -> Result<RootSearch> {
    let tower = coeffs
        .first()
        .map(|c| c.tower().clone())
        .ok_or(Error::InvalidInput("empty polynomial".into()))?;
    let scaled: Vec<PadicElement> = coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| c.shift_by(k as i64 * slope))
        .collect();
    let m = scaled
        .iter()
        .filter_map(|c| c.pi_valuation())
        .min()
        .ok_or(Error::PrecisionExhausted {
            op: "root search",
            needed: 1,
            available: 0,
        })?;
    if let Some(c) = scaled.iter().find(|c| c.is_zero() && c.shift() <= m) {
        return Err(Error::PrecisionExhausted {
            op: "root search",
            needed: m + 1,
            available: c.shift(),
        });
    }
    let k = tower.residue_field();
    let residual: Vec<Fq> = scaled
        .iter()
        .map(|c| match c.pi_valuation() {
            Some(v) if v == m => c.shift_by(-m).residue().expect("unit"),
            _ => k.zero(),
        })
        .collect();
    let der = derivative(coeffs);
    let mut out = RootSearch {
        roots: Vec::new(),
        clusters: Vec::new(),
    };
    for z in k.elements().skip(1) {
        if !k.is_zero(&fq_eval(k, &residual, &z)) {
            continue;
        }
        let mult = multiplicity(k, &residual, &z);
        if mult > 1 {
            out.clusters.push((z, mult));
            continue;
        }
        let mut y = PadicElement::lift(&tower, &z).shift_by(slope);
        for _ in 0..256 {
            let step = eval_poly(coeffs, &y)?.div(&eval_poly(&der, &y)?)?;
            let done = step.is_zero() || step.shift() >= y.absolute_precision();
            y = y.sub(&step)?;
            if done {
                break;
            }
        }
        out.roots.push(y);
    }
    Ok(out)
}

/// Teichmüller lift of a residue-field element; `[0] = 0`.
pub fn teichmuller(tower: &ExtensionTower, z: &Fq) -> Result<PadicElement> {
    let k = tower.residue_field();
    if z.len() != k.deg {
        return Err(Error::InvalidInput(format!(
            "residue element needs {} coordinates",
            k.deg
        )));
    }
    if k.is_zero(z) {
        return Ok(PadicElement::zero(tower));
    }
    let big_q = k.size() as i64;
    let mut x = PadicElement::lift(tower, z);
    let one = PadicElement::one(tower);
    // Newton on x^Q - x
    for _ in 0..256 {
        let xq1 = x.pow(big_q - 1)?;
        let num = xq1.mul(&x)?.sub(&x)?;
        let den = xq1.mul_int(big_q).sub(&one)?;
        let step = num.div(&den)?;
        let done = step.is_zero();
        x = x.sub(&step)?;
        if done {
            break;
        }
    }
    Ok(x)
}

/// `min_{j >= 0} (p^j v - j e)`: the valuation of `log(1 + y)` when
/// `val(y) = v > 0` and the minimum is attained once.
pub fn plog_valuation_bound(v: Rational, p: u64, e: i64) -> Rational {
    let mut best = v;
    let mut pj = int(1);
    for j in 1..64 {
        pj *= int(p as i64);
        let cand = pj * v - int(j * e);
        if cand < best {
            best = cand;
        }
        if pj * v > best + int(j * e) + int(e) {
            break;
        }
    }
    best
}

/// p-adic logarithm of `x` with `val(x - 1) > 0`.
pub fn plog(x: &PadicElement) -> Result<PadicElement> {
    let tower = x.tower();
    let one = PadicElement::one(tower);
    let y = x.sub(&one)?;
    if y.shift() < 1 {
        return Err(Error::Domain {
            op: "plog",
            detail: format!("val(x - 1) = {} is not positive", y.val()),
        });
    }
    if y.is_zero() {
        return Ok(y);
    }
    let v = y.shift() as f64;
    let e = tower.ramification() as f64;
    let lnp = (tower.p() as f64).ln();
    let target = y.absolute_precision() as f64;
    let mut acc = PadicElement::zero(tower);
    let mut power = one.clone();
    let mut k: i64 = 1;
    loop {
        power = power.mul(&y)?;
        let term = power.div(&PadicElement::from_int(tower, k))?;
        acc = if k % 2 == 1 { acc.add(&term)? } else { acc.sub(&term)? };
        let kf = k as f64;
        let bound = kf * v - e * kf.ln() / lnp;
        if bound >= target.min(acc.absolute_precision() as f64) + 1.0 && kf * v * lnp >= e {
            break;
        }
        k += 1;
    }
    Ok(acc)
}

/// p-adic exponential of `y` with `val(y) > e/(p−1)`.
pub fn pexp(y: &PadicElement) -> Result<PadicElement> {
    let tower = y.tower();
    let p = tower.p() as i64;
    let big_e = tower.ramification();
    if y.shift() * (p - 1) <= big_e {
        return Err(Error::Domain {
            op: "pexp",
            detail: format!(
                "val(y) = {} is not above e/(p-1) = {}",
                y.val(),
                Rational::new(tower.e(), p - 1)
            ),
        });
    }
    let one = PadicElement::one(tower);
    if y.is_zero() {
        return one.add(y);
    }
    let v = y.shift();
    let mut acc = one.clone();
    let mut term = one;
    let mut k: i64 = 1;
    loop {
        term = term.mul(y)?.div(&PadicElement::from_int(tower, k))?;
        acc = acc.add(&term)?;
        // every later term has valuation >= (k+1)(v(p-1) - E)/(p-1) + E/(p-1)
        let next = (k + 1) * (v * (p - 1) - big_e) + big_e;
        if next >= acc.absolute_precision() * (p - 1) {
            break;
        }
        k += 1;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::{make_tower, ExtensionStep};
    use crate::valuation::{rat, Valuation};

    fn zp(p: u64, n: i64) -> ExtensionTower {
        make_tower(p, &[ExtensionStep::Eisenstein { poly: vec![-(p as i64), 1] }], n).unwrap()
    }

    #[test]
    fn teichmuller_p5() {
        let t = zp(5, 20);
        let w = teichmuller(&t, &vec![2]).unwrap();
        assert_eq!(w.residue().unwrap(), vec![2]);
        assert!(w.pow(4).unwrap().agrees(&PadicElement::one(&t)));
        // Hensel oracle: x <- x^5 starting from 2 converges to the same lift
        let mut x = PadicElement::from_int(&t, 2);
        for _ in 0..25 {
            x = x.pow(5).unwrap();
        }
        assert!(x.agrees(&w));
        assert!(teichmuller(&t, &vec![0]).unwrap().is_exact_zero());
        assert!(teichmuller(&t, &vec![1]).unwrap().agrees(&PadicElement::one(&t)));
    }

    #[test]
    fn plog_pexp_trivial() {
        let t = zp(3, 20);
        let one = PadicElement::one(&t);
        assert!(plog(&one).unwrap().is_zero());
        assert!(pexp(&PadicElement::zero(&t)).unwrap().agrees(&one));
    }

    #[test]
    fn plog_of_four_in_z3() {
        let t = zp(3, 20);
        let l = plog(&PadicElement::from_int(&t, 4)).unwrap();
        assert_eq!(l.val(), Valuation::from_int(1));
        assert_eq!(plog_valuation_bound(rat(1, 1), 3, 1), rat(1, 1));
    }

    #[test]
    fn exp_log_inverse() {
        let t = zp(5, 15);
        let x = PadicElement::from_int(&t, 1 + 5 * 7);
        let back = pexp(&plog(&x).unwrap()).unwrap();
        assert!(back.agrees(&x));
    }

    #[test]
    fn domain_errors() {
        let t = zp(3, 10);
        assert!(plog(&PadicElement::from_int(&t, 2)).is_err());
        // e/(p-1) = 1/2 at p = 3, so val 1 is fine but exp of a unit is not
        assert!(pexp(&PadicElement::from_int(&t, 1)).is_err());
        assert!(pexp(&PadicElement::from_int(&t, 3)).is_ok());
    }

    #[test]
    fn roots_of_quadratic() {
        // y^2 - 2 over Z_7 has two roots of valuation 0
        let t = zp(7, 10);
        let c = vec![
            PadicElement::from_int(&t, -2),
            PadicElement::zero(&t),
            PadicElement::one(&t),
        ];
        let r = roots_at_valuation(&c, 0).unwrap();
        assert_eq!(r.roots.len(), 2);
        for y in &r.roots {
            assert!(y.pow(2).unwrap().agrees(&PadicElement::from_int(&t, 2)));
        }
        // (y - 1)^2 has a repeated residual root
        let c = vec![
            PadicElement::one(&t),
            PadicElement::from_int(&t, -2),
            PadicElement::one(&t),
        ];
        let r = roots_at_valuation(&c, 0).unwrap();
        assert!(r.roots.is_empty());
        assert_eq!(r.clusters, vec![(vec![1], 2)]);
    }
}
