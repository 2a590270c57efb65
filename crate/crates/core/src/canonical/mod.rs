//! Valuation calculus of the canonical subgroup: the multiplication-by-ϖ
//! series, its Newton polygon, Hodge-Tate invariants and the growth
//! dynamics under isogenies. The finite flat group scheme itself lives in
//! [`model`] and [`hopf`].

pub mod hopf;
pub mod model;

use num_traits::{One, Zero};

use crate::element::PadicElement;
use crate::error::{Error, Result};
use crate::ground::Ground;
use crate::polygon::NewtonPolygon;
use crate::tower::ExtensionTower;
use crate::valuation::{int, rat, Rational, Valuation};

pub use model::{CanonicalGroupModel, GammaReport};

/// `[ϖ](x) = ϖx + a·x^q + Σ_{j≥2} c_j x^{j(q−1)+1}`, truncated.
#[derive(Debug, Clone)]
pub struct MultiplicationSeries {
    pub q: u64,
    pub a: PadicElement,
    /// `(j, c_j)` for `j >= 2`
    pub higher: Vec<(u64, PadicElement)>,
}

impl MultiplicationSeries {
    /// `ϖx + a x^q + x^{q²}`: the simplest height-two model with Hasse
    /// coefficient `a`.
    pub fn lubin_tate(tower: &ExtensionTower, a: PadicElement) -> Self {
        let q = tower.q();
        MultiplicationSeries {
            q,
            a,
            higher: vec![(q + 1, PadicElement::one(tower))],
        }
    }

    pub fn new(q: u64, a: PadicElement, higher: Vec<(u64, PadicElement)>) -> Result<Self> {
        let s = MultiplicationSeries { q, a, higher };
        s.check()?;
        Ok(s)
    }

    /// Exponent of the `x`-power carried by `c_j`.
    pub fn exponent(&self, j: u64) -> u64 {
        j * (self.q - 1) + 1
    }

    pub fn truncation_degree(&self) -> u64 {
        self.higher
            .iter()
            .map(|(j, _)| self.exponent(*j))
            .max()
            .unwrap_or(self.q)
    }

    /// `c_j ∈ ϖR` unless `j ≡ 1 mod q`.
    pub fn check(&self) -> Result<()> {
        for (j, c) in &self.higher {
            if *j < 2 {
                return Err(Error::InvalidInput(format!("higher term index {j} < 2")));
            }
            if j % self.q != 1 && c.val() < Valuation::from_int(1) {
                return Err(Error::InvalidInput(format!(
                    "c_{j} has valuation {} but must lie in varpi R",
                    c.val()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reduction {
    Ordinary,
    Supersingular,
}

#[derive(Debug, Clone)]
pub struct Classification {
    pub kind: Reduction,
    pub polygon: NewtonPolygon,
    /// valuations of the nonzero `ϖ`-torsion points with multiplicities
    pub root_valuations: Vec<(Rational, i64)>,
}

/// Classifies by `val(a)` and computes the torsion valuations.
pub fn classify(series: &MultiplicationSeries) -> Result<Classification> {
    let q = series.q as i64;
    if series.truncation_degree() < (q * q) as u64 {
        return Err(Error::InvalidInput(format!(
            "truncation degree {} below q^2 = {}",
            series.truncation_degree(),
            q * q
        )));
    }
    series.check()?;
    let va = series.a.val();
    let bound = rat(q, q + 1);
    let w = match va {
        Valuation::Finite(v) if v >= Rational::zero() && v < bound => v,
        _ => {
            return Err(Error::BoundViolated {
                bound: "0 <= val(a) < q/(q+1)".into(),
                value: va.as_finite().unwrap_or(bound),
            })
        }
    };
    let mut pts = vec![
        (0, Valuation::Infinite),
        (1, Valuation::from_int(1)),
        (q, Valuation::Finite(w)),
    ];
    for (j, c) in &series.higher {
        pts.push((series.exponent(*j) as i64, c.val()));
    }
    let polygon = NewtonPolygon::new(&pts)?;
    let top = polygon.span().1;
    if top != q * q || polygon.eval(top) != Some(Rational::zero()) {
        return Err(Error::InvalidInput(
            "the x^(q^2) coefficient must be a unit and dominate the polygon".into(),
        ));
    }
    let kind = if w.is_zero() {
        Reduction::Ordinary
    } else {
        Reduction::Supersingular
    };
    Ok(Classification {
        kind,
        root_valuations: polygon.root_valuations(),
        polygon,
    })
}

/// Computable invariants of the Hodge-Tate sequence at growth `w`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DlogReport {
    pub w: Rational,
    /// `v = w/(q−1)`: the exponent killing kernel, cokernel and homology
    pub v: Rational,
    pub canonical_valuation: Rational,
    pub noncanonical_valuation: Rational,
    /// `val(β) = w/(q−1)` for the cokernel witness
    pub cokernel_witness_valuation: Rational,
    pub dual_w: Rational,
    pub exact: bool,
    pub annihilator_exponent: Rational,
}

pub fn hodge_tate_report(w: Rational, q: u64) -> Result<DlogReport> {
    let qr = int(q as i64);
    if w < Rational::zero() || w > qr.recip() {
        return Err(Error::BoundViolated {
            bound: "0 <= w <= 1/q".into(),
            value: w,
        });
    }
    let v = w / (qr - 1);
    Ok(DlogReport {
        w,
        v,
        canonical_valuation: (Rational::one() - w) / (qr - 1),
        noncanonical_valuation: w / (qr * (qr - 1)),
        cokernel_witness_valuation: v,
        dual_w: w,
        exact: w.is_zero(),
        annihilator_exponent: v,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsogenyKind {
    QuotientByCanonical,
    QuotientByDisjoint,
}

/// Growth of the target of the isogeny: `qw` for the canonical quotient,
/// `w/q` for a quotient by a subgroup disjoint from the canonical one.
pub fn isogeny_measure_map(w: Rational, kind: IsogenyKind, q: u64) -> Result<Rational> {
    let qr = int(q as i64);
    let bound = qr / (qr + 1);
    if w < Rational::zero() {
        return Err(Error::BoundViolated {
            bound: "w >= 0".into(),
            value: w,
        });
    }
    match kind {
        IsogenyKind::QuotientByCanonical => {
            if qr * w >= bound {
                return Err(Error::BoundViolated {
                    bound: "q*w < q/(q+1)".into(),
                    value: qr * w,
                });
            }
            Ok(qr * w)
        }
        IsogenyKind::QuotientByDisjoint => {
            if w >= bound {
                return Err(Error::BoundViolated {
                    bound: "w < q/(q+1)".into(),
                    value: w,
                });
            }
            Ok(w / qr)
        }
    }
}

/// Domain `w < 1/(q^{r−2}(q+1))` of the level-`r` canonical subgroup.
pub fn higher_canonical_domain(r: u32, q: u64) -> Result<Rational> {
    if r == 0 {
        return Err(Error::InvalidInput("r must be positive".into()));
    }
    Ok(crate::weight::higher_canonical_bound(r, q))
}

/// `min_k val(β_k) >= 1` with
/// `val(β_k) = e/(p−1) + p^k (val_E − 1)/(q−1)`.
pub fn gamma_prime_vanishes(g: Ground, val_e: Rational) -> Result<bool> {
    if val_e < Rational::zero() || val_e > Rational::one() {
        return Err(Error::BoundViolated {
            bound: "0 <= val(E) <= 1".into(),
            value: val_e,
        });
    }
    Ok((0..g.f).all(|k| beta_valuation(g, val_e, k) >= Rational::one()))
}

/// `val(β_k) = e/(p−1) + p^k (val_E − 1)/(q−1)`.
pub fn beta_valuation(g: Ground, val_e: Rational, k: usize) -> Rational {
    let pk = int(g.p.pow(k as u32) as i64);
    g.e_over_p1() + pk * (val_e - 1) / int(g.q() as i64 - 1)
}

/// Smallest `e` with `gamma_prime_vanishes`, from the closed form
/// `(p−1)(1 + p^{f−1}(1 − val_E)/(q−1))`.
pub fn gamma_prime_threshold(p: u64, f: usize, val_e: Rational) -> i64 {
    let q = int(p.pow(f as u32) as i64);
    let pf1 = int(p.pow(f as u32 - 1) as i64);
    let t = int(p as i64 - 1) * (Rational::one() + pf1 * (Rational::one() - val_e) / (q - 1));
    t.ceil().to_integer()
}
