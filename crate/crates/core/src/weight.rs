//! Locally analytic characters of `O_P^*`, accessibility, the disks `W_r`
//! and the growth bounds they impose.

use num_traits::{One, Zero};

use crate::analytic::{plog, plog_valuation_bound, pexp, teichmuller};
use crate::element::PadicElement;
use crate::error::{Error, Result};
use crate::ground::Ground;
use crate::valuation::{int, Rational, Valuation};

/// `χ(t) = [t]^i exp(s log⟨t⟩)` with declared accessibility index `r`.
#[derive(Debug, Clone)]
pub struct Character {
    pub s: PadicElement,
    pub i: u64,
    pub r: u32,
}

impl Character {
    pub fn new(s: PadicElement, i: i64, r: u32) -> Self {
        let q1 = s.tower().q() as i64 - 1;
        Character {
            i: i.rem_euclid(q1) as u64,
            s,
            r,
        }
    }

    /// The integer weight `t ↦ t^k`.
    pub fn integer(tower: &crate::ExtensionTower, k: i64) -> Self {
        Character::new(PadicElement::from_int(tower, k), k, 1)
    }

    pub fn component_index(&self) -> u64 {
        self.i
    }

    pub fn is_accessible(&self) -> bool {
        is_r_accessible(self.s.val(), self.r, Ground::of(self.s.tower()))
    }
}

/// `val(s) > e/(p−1) − r`. When `e > p−1`, indices below `⌈e/(p−1)⌉` are
/// outside the supported range and report `false`.
pub fn is_r_accessible(val_s: Valuation, r: u32, g: Ground) -> bool {
    if r == 0 {
        return false;
    }
    let eps = g.e_over_p1();
    if eps > Rational::one() && int(r as i64) < eps.ceil() {
        return false;
    }
    val_s > Valuation::Finite(eps - int(r as i64))
}

/// Smallest `r` for which `val(s)` is `r`-accessible.
pub fn minimal_accessible_r(val_s: Valuation, g: Ground) -> u32 {
    (1..)
        .find(|&r| is_r_accessible(val_s, r, g))
        .expect("large r is always accessible")
}

/// The disk `B_r` as a valuation threshold: `val(x − 1) > m_r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightDiskConfig {
    pub r: u32,
    pub m_r: Rational,
    /// membership is `val > m_r`; the boundary itself is excluded
    pub strict: bool,
    pub ground: Ground,
}

impl WeightDiskConfig {
    pub fn contains(&self, val_x_minus_1: Valuation) -> bool {
        if self.strict {
            val_x_minus_1 > Valuation::Finite(self.m_r)
        } else {
            val_x_minus_1 >= Valuation::Finite(self.m_r)
        }
    }
}

/// `m_r = max_j (c + j e)/p^j` with `c = e/(p−1) + 1 − r`: the exact
/// infimum of `m` such that `val(y) > m` forces
/// `min_j (p^j val(y) − j e) > c`.
pub fn disk_threshold(r: u32, g: Ground) -> Result<WeightDiskConfig> {
    if r == 0 {
        return Err(Error::InvalidInput("r must be positive".into()));
    }
    let c = g.e_over_p1() + int(1 - r as i64);
    let e = int(g.e);
    // terms increase while j < -c/e + O(1) and decrease afterwards
    let last = ((-c / e).ceil().to_integer().max(0) + 4) as u32;
    let mut best = c;
    let mut pj = int(1);
    for j in 1..=last {
        pj *= int(g.p as i64);
        let cand = (c + int(j as i64) * e) / pj;
        if cand > best {
            best = cand;
        }
    }
    Ok(WeightDiskConfig {
        r,
        m_r: best,
        strict: true,
        ground: g,
    })
}

/// Lower bound on `val(s)` for the character whose coordinate
/// `x = χ(1+ϖ)` satisfies `val(x − 1) = v`, namely
/// `min_j (p^j v − j e) − val(log(1+ϖ))`.
pub fn parameter_valuation_bound(v: Rational, g: Ground) -> Rational {
    plog_valuation_bound(v, g.p, g.e) - plog_valuation_bound(int(1), g.p, g.e)
}

/// Supremum of admissible growth `w` with its inclusivity flag.
pub fn max_growth_w(val_s: Valuation, r: u32, g: Ground) -> Result<(Rational, bool)> {
    if !is_r_accessible(val_s, r, g) {
        return Err(Error::BoundViolated {
            bound: format!("val(s) > e/(p-1) - r with r = {r}"),
            value: val_s.as_finite().unwrap_or_else(Rational::zero),
        });
    }
    let q = int(g.q() as i64);
    let mut exclusive: Vec<Rational> = vec![q / (q + 1), higher_canonical_bound(r, g.q())];
    if let Valuation::Finite(v) = val_s {
        exclusive.push((q - 1) * (v + 1 - g.e_over_p1()));
    }
    let excl = exclusive.into_iter().min().expect("nonempty");
    let inclusive = q.recip();
    if inclusive < excl {
        Ok((inclusive, true))
    } else {
        Ok((excl, false))
    }
}

/// `1/(q^{r−2}(q+1))`; equals `q/(q+1)` at `r = 1`.
pub fn higher_canonical_bound(r: u32, q: u64) -> Rational {
    let q = int(q as i64);
    let qpow = if r >= 2 {
        (0..r - 2).fold(int(1), |acc, _| acc * q)
    } else {
        q.recip()
    };
    (qpow * (q + 1)).recip()
}

/// `χ(t) = [t̄]^i · exp(s · log(t/[t̄]))` for a unit `t`.
pub fn char_eval(chi: &Character, t: &PadicElement) -> Result<PadicElement> {
    if t.pi_valuation() != Some(0) {
        return Err(Error::Domain {
            op: "char_eval",
            detail: format!("argument has valuation {}, not 0", t.val()),
        });
    }
    let tower = t.tower();
    let teich = teichmuller(tower, &t.residue()?)?;
    let bracket = t.div(&teich)?;
    let y = chi.s.mul(&plog(&bracket)?)?;
    teich.pow(chi.i as i64)?.mul(&pexp(&y)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::{make_tower, ExtensionStep};
    use crate::valuation::rat;

    fn g(p: u64, e: i64, f: usize) -> Ground {
        Ground::new(p, e, f).unwrap()
    }

    #[test]
    fn accessibility_examples() {
        assert!(is_r_accessible(Valuation::zero(), 1, g(5, 1, 1)));
        assert!(!is_r_accessible(Valuation::from_int(-1), 1, g(5, 1, 1)));
        assert_eq!(minimal_accessible_r(Valuation::from_int(-1), g(5, 1, 1)), 2);
        assert!(!is_r_accessible(Valuation::zero(), 1, g(3, 2, 1)));
        assert!(is_r_accessible(Valuation::Infinite, 1, g(3, 1, 1)));
    }

    #[test]
    fn disk_thresholds() {
        assert_eq!(disk_threshold(1, g(3, 1, 1)).unwrap().m_r, rat(1, 2));
        assert_eq!(disk_threshold(1, g(5, 3, 2)).unwrap().m_r, rat(3, 4));
        assert_eq!(disk_threshold(2, g(3, 1, 1)).unwrap().m_r, rat(1, 6));
        for ground in [g(3, 1, 1), g(5, 1, 1), g(3, 2, 2), g(7, 4, 1)] {
            let ms: Vec<Rational> = (1..=6)
                .map(|r| disk_threshold(r, ground).unwrap().m_r)
                .collect();
            assert!(ms.windows(2).all(|w| w[1] < w[0]), "{ground:?}: {ms:?}");
        }
    }

    #[test]
    fn growth_bounds() {
        let ground = g(3, 1, 1);
        assert_eq!(max_growth_w(Valuation::zero(), 1, ground).unwrap(), (rat(1, 3), true));
        assert_eq!(higher_canonical_bound(3, 3), rat(1, 12));
        assert_eq!(higher_canonical_bound(1, 3), rat(3, 4));
        assert_eq!(higher_canonical_bound(2, 3), rat(1, 4));
        // first term vanishes as val(s) approaches e/(p-1) - 1 from above
        let eps = rat(1, 1000);
        let (w, incl) = max_growth_w(Valuation::Finite(rat(-1, 2) + eps), 1, ground).unwrap();
        assert_eq!((w, incl), (rat(2, 1000), false));
        assert!(max_growth_w(Valuation::from_int(-1), 1, ground).is_err());
    }

    #[test]
    fn characters() {
        let t = make_tower(3, &[ExtensionStep::Eisenstein { poly: vec![-3, 1] }], 20).unwrap();
        let x = PadicElement::from_int(&t, 7);
        let triv = Character::new(PadicElement::zero(&t), 0, 1);
        assert!(char_eval(&triv, &x).unwrap().agrees(&PadicElement::one(&t)));
        let sq = Character::integer(&t, 2);
        assert_eq!(sq.component_index(), 0);
        assert!(char_eval(&sq, &x).unwrap().agrees(&x.pow(2).unwrap()));
        let teich = teichmuller(&t, &vec![2]).unwrap();
        let chi = Character::new(PadicElement::from_int(&t, 5), 1, 1);
        assert!(char_eval(&chi, &teich).unwrap().agrees(&teich));
        assert!(char_eval(&chi, &PadicElement::from_int(&t, 3)).is_err());
        assert_eq!(Character::integer(&t, 1).component_index(), 1);
    }
}
