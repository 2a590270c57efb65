use num_traits::{Signed, Zero};

use crate::element::PadicElement;
use crate::error::{Error, Result};
use crate::tower::ExtensionTower;
use crate::valuation::{int, Rational, Valuation};

/// Scalar applied once to the raw operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// `1/q`
    U,
    /// `1/(|κ_l| + 1)`
    TL { kappa_l: u64 },
    Raw,
}

impl Normalization {
    pub fn name(&self) -> &'static str {
        match self {
            Normalization::U => "U",
            Normalization::TL { .. } => "T_L",
            Normalization::Raw => "raw",
        }
    }

    pub fn factor(&self, tower: &ExtensionTower) -> Result<PadicElement> {
        match *self {
            Normalization::U => PadicElement::from_int(tower, tower.q() as i64).inv(),
            Normalization::TL { kappa_l } => {
                PadicElement::from_int(tower, kappa_l as i64 + 1).inv()
            }
            Normalization::Raw => Ok(PadicElement::one(tower)),
        }
    }
}

/// Column lower bound `L(j) = offset + slope·j` for 1-based columns `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TailBound {
    pub offset: Rational,
    pub slope: Rational,
}

impl TailBound {
    pub fn linear(slope: Rational) -> Self {
        TailBound {
            offset: Rational::zero(),
            slope,
        }
    }

    pub fn at(&self, j: usize) -> Rational {
        self.offset + self.slope * int(j as i64)
    }

    pub fn diverges(&self) -> bool {
        self.slope.is_positive()
    }
}

/// A truncated matrix family `U(σ)` whose entries are polynomials in `σ`.
/// Entries already include the normalization factor.
#[derive(Debug, Clone)]
pub struct OperatorFamily {
    tower: ExtensionTower,
    /// `entries[i][j][k]` is the `σ^k` coefficient of entry `(i, j)`
    entries: Vec<Vec<Vec<PadicElement>>>,
    raw: Vec<Vec<Vec<PadicElement>>>,
    normalization: Normalization,
    tail: Option<TailBound>,
}

/// Accepted compactness data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    /// least valuation in each column, `σ`-uniformly on `val(σ) >= 0`
    pub column_valuations: Vec<Valuation>,
    /// declared law beyond the truncation, if any
    pub tail: Option<TailBound>,
}

impl Certificate {
    /// Monotone lower bound for column `j` (1-based), including the tail.
    pub fn bound(&self, j: usize) -> Valuation {
        let m = self.column_valuations.len();
        let inside = if (1..=m).contains(&j) {
            self.column_valuations[j - 1..].iter().copied().min().expect("nonempty")
        } else {
            Valuation::Infinite
        };
        match self.tail {
            Some(t) => inside.min(Valuation::Finite(t.at(j.max(m + 1)))),
            None => inside,
        }
    }

    /// Column bounds `1..=count` sorted ascending, tail columns included.
    pub fn smallest(&self, count: usize) -> Vec<Valuation> {
        let mut all = self.column_valuations.clone();
        if let Some(t) = self.tail {
            let m = all.len();
            all.extend((m + 1..=m + count).map(|j| Valuation::Finite(t.at(j))));
        }
        all.sort();
        all.truncate(count);
        all
    }

    pub fn rank(&self) -> usize {
        self.column_valuations.len()
    }
}

/// Why a family is not certified compact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    /// first violating column, 1-based
    pub column: Option<usize>,
    pub reason: String,
}

impl OperatorFamily {
    /// `raw[i][j]` lists the `σ`-coefficients of entry `(i, j)`.
    pub fn new(
        tower: &ExtensionTower,
        raw: Vec<Vec<Vec<PadicElement>>>,
        normalization: Normalization,
        tail: Option<TailBound>,
    ) -> Result<Self> {
        let m = raw.len();
        if raw.iter().any(|row| row.len() != m) {
            return Err(Error::InvalidInput("operator matrix must be square".into()));
        }
        if raw.iter().flatten().flatten().any(|c| c.tower() != tower) {
            return Err(Error::TowerMismatch);
        }
        let factor = normalization.factor(tower)?;
        let entries = raw
            .iter()
            .map(|row| {
                row.iter()
                    .map(|poly| poly.iter().map(|c| c.mul(&factor)).collect())
                    .collect()
            })
            .collect::<Result<_>>()?;
        Ok(OperatorFamily {
            tower: tower.clone(),
            entries,
            raw,
            normalization,
            tail,
        })
    }

    /// Constant family from a matrix.
    pub fn constant(tower: &ExtensionTower, matrix: Vec<Vec<PadicElement>>) -> Result<Self> {
        let raw = matrix
            .into_iter()
            .map(|row| row.into_iter().map(|c| vec![c]).collect())
            .collect();
        Self::new(tower, raw, Normalization::Raw, None)
    }

    /// `diag(ϖ^{⌈(q−1)w·j⌉})`, `j = 1..rank`: the column growth of the
    /// restriction between overconvergence radii, with its linear tail.
    pub fn toy_restriction(tower: &ExtensionTower, rank: usize, w: Rational) -> Result<Self> {
        let slope = w * int(tower.q() as i64 - 1);
        let varpi = PadicElement::varpi(tower);
        let mut raw = vec![vec![vec![PadicElement::zero(tower)]; rank]; rank];
        for (j, row) in raw.iter_mut().enumerate() {
            let k = (slope * int(j as i64 + 1)).ceil().to_integer();
            row[j] = vec![varpi.pow(k)?];
        }
        Self::new(tower, raw, Normalization::Raw, Some(TailBound::linear(slope)))
    }

    /// Dense variant of [`toy_restriction`](Self::toy_restriction): every
    /// entry of column `j` is a small integer times `ϖ^{⌈(q−1)w·j⌉}`.
    pub fn toy_dense(tower: &ExtensionTower, rank: usize, w: Rational) -> Result<Self> {
        let slope = w * int(tower.q() as i64 - 1);
        let varpi = PadicElement::varpi(tower);
        let mut raw = Vec::with_capacity(rank);
        for i in 0..rank {
            let mut row = Vec::with_capacity(rank);
            for j in 0..rank {
                let k = (slope * int(j as i64 + 1)).ceil().to_integer();
                let c = 1 + ((i * 7 + j * 3) % 5) as i64;
                row.push(vec![varpi.pow(k)?.mul_int(c)]);
            }
            raw.push(row);
        }
        Self::new(tower, raw, Normalization::Raw, Some(TailBound::linear(slope)))
    }

    pub fn tower(&self) -> &ExtensionTower {
        &self.tower
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn tail(&self) -> Option<TailBound> {
        self.tail
    }

    /// Normalized `σ`-coefficients of entry `(i, j)`.
    pub fn entry(&self, i: usize, j: usize) -> &[PadicElement] {
        &self.entries[i][j]
    }

    /// Unnormalized `σ`-coefficients as supplied.
    pub fn raw_entry(&self, i: usize, j: usize) -> &[PadicElement] {
        &self.raw[i][j]
    }

    /// Leading `size × size` block with the same tail law.
    pub fn truncate(&self, size: usize) -> Self {
        let cut = |m: &Vec<Vec<Vec<PadicElement>>>| -> Vec<Vec<Vec<PadicElement>>> {
            m.iter().take(size).map(|r| r.iter().take(size).cloned().collect()).collect()
        };
        OperatorFamily {
            tower: self.tower.clone(),
            entries: cut(&self.entries),
            raw: cut(&self.raw),
            normalization: self.normalization,
            tail: self.tail,
        }
    }

    /// `U(σ)` at a point.
    pub fn evaluate(&self, sigma: &PadicElement) -> Result<Vec<Vec<PadicElement>>> {
        self.entries
            .iter()
            .map(|row| {
                row.iter()
                    .map(|poly| crate::analytic::eval_poly(poly, sigma))
                    .collect()
            })
            .collect()
    }

    fn column_valuation(&self, j: usize) -> Valuation {
        self.entries
            .iter()
            .flat_map(|row| row[j].iter())
            .map(|c| {
                if c.is_zero() && !c.is_exact_zero() {
                    Valuation::Finite(c.certified())
                } else {
                    c.val()
                }
            })
            .min()
            .unwrap_or(Valuation::Infinite)
    }
}

/// Accepts iff the declared tail diverges and every column meets it; a
/// finite family without a tail is compact with its own column bounds.
pub fn certify_compact(family: &OperatorFamily) -> std::result::Result<Certificate, Rejection> {
    let cols: Vec<Valuation> = (0..family.rank()).map(|j| family.column_valuation(j)).collect();
    if let Some(t) = family.tail {
        if !t.diverges() {
            return Err(Rejection {
                column: None,
                reason: format!("tail bound slope {} does not diverge", t.slope),
            });
        }
        if let Some(j) = cols
            .iter()
            .enumerate()
            .position(|(j, v)| *v < Valuation::Finite(t.at(j + 1)))
        {
            return Err(Rejection {
                column: Some(j + 1),
                reason: format!(
                    "column {} has valuation {} below L = {}",
                    j + 1,
                    cols[j],
                    t.at(j + 1)
                ),
            });
        }
    }
    Ok(Certificate {
        column_valuations: cols,
        tail: family.tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::{make_tower, ExtensionStep};
    use crate::valuation::rat;

    fn zp(p: u64) -> ExtensionTower {
        make_tower(p, &[ExtensionStep::Eisenstein { poly: vec![-(p as i64), 1] }], 20).unwrap()
    }

    #[test]
    fn diagonal_accepted() {
        let t = zp(3);
        let v = PadicElement::varpi(&t);
        let m: Vec<Vec<PadicElement>> = (0..5)
            .map(|i| {
                (0..5)
                    .map(|j| if i == j { v.pow(i as i64 + 1).unwrap() } else { PadicElement::zero(&t) })
                    .collect()
            })
            .collect();
        let raw = m.into_iter().map(|r| r.into_iter().map(|c| vec![c]).collect()).collect();
        let fam = OperatorFamily::new(&t, raw, Normalization::Raw, Some(TailBound::linear(rat(1, 1)))).unwrap();
        let cert = certify_compact(&fam).unwrap();
        assert_eq!(cert.column_valuations[2], Valuation::from_int(3));
    }

    #[test]
    fn identity_rejected() {
        let t = zp(3);
        let m: Vec<Vec<PadicElement>> = (0..3)
            .map(|i| (0..3).map(|j| PadicElement::from_int(&t, (i == j) as i64)).collect())
            .collect();
        let raw = m.into_iter().map(|r| r.into_iter().map(|c| vec![c]).collect()).collect();
        let fam = OperatorFamily::new(&t, raw, Normalization::Raw, Some(TailBound::linear(rat(0, 1)))).unwrap();
        assert!(certify_compact(&fam).is_err());
        let fam = OperatorFamily::new(
            &t,
            fam.raw.clone(),
            Normalization::Raw,
            Some(TailBound::linear(rat(1, 2))),
        )
        .unwrap();
        assert_eq!(certify_compact(&fam).unwrap_err().column, Some(1));
    }

    #[test]
    fn toy_families() {
        let t = zp(3);
        for w in [rat(1, 4), rat(1, 3), rat(1, 2)] {
            let fam = OperatorFamily::toy_restriction(&t, 8, w).unwrap();
            let cert = certify_compact(&fam).unwrap();
            for (j, v) in cert.column_valuations.iter().enumerate() {
                let want = (w * 2 * int(j as i64 + 1)).ceil();
                assert_eq!(*v, Valuation::Finite(want));
            }
            assert!(certify_compact(&OperatorFamily::toy_dense(&t, 6, w).unwrap()).is_ok());
        }
    }

    #[test]
    fn normalizations() {
        let t = zp(5);
        let one = vec![vec![vec![PadicElement::one(&t)]]];
        let u = OperatorFamily::new(&t, one.clone(), Normalization::U, None).unwrap();
        assert_eq!(u.entry(0, 0)[0].val(), Valuation::from_int(-1));
        let tl = OperatorFamily::new(&t, one, Normalization::TL { kappa_l: 6 }, None).unwrap();
        assert!(tl.entry(0, 0)[0].mul_int(7).agrees(&PadicElement::one(&t)));
        assert_eq!(tl.raw_entry(0, 0)[0].val(), Valuation::zero());
    }
}
