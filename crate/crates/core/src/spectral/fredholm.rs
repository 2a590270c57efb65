use crate::element::PadicElement;
use crate::error::{Error, Result};
use crate::polygon::NewtonPolygon;
use crate::tower::ExtensionTower;
use crate::valuation::{int, Rational, Valuation};

use super::family::{certify_compact, Certificate, OperatorFamily};

/// Commutative ring operations needed by the division-free determinant.
pub trait CommRing: Clone + Send + Sync {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, other: &Self) -> Result<Self>;
    fn mul(&self, other: &Self) -> Result<Self>;
    fn neg(&self) -> Self;
}

impl CommRing for PadicElement {
    fn zero_like(&self) -> Self {
        PadicElement::zero(self.tower())
    }
    fn one_like(&self) -> Self {
        PadicElement::one(self.tower())
    }
    fn add(&self, other: &Self) -> Result<Self> {
        PadicElement::add(self, other)
    }
    fn mul(&self, other: &Self) -> Result<Self> {
        PadicElement::mul(self, other)
    }
    fn neg(&self) -> Self {
        PadicElement::neg(self)
    }
}

/// Polynomial in the weight coordinate `σ`.
#[derive(Debug, Clone)]
pub struct SigmaPoly {
    tower: ExtensionTower,
    pub coeffs: Vec<PadicElement>,
}

impl SigmaPoly {
    pub fn new(tower: &ExtensionTower, coeffs: Vec<PadicElement>) -> Self {
        SigmaPoly {
            tower: tower.clone(),
            coeffs,
        }
    }

    pub fn eval(&self, sigma: &PadicElement) -> Result<PadicElement> {
        if self.coeffs.is_empty() {
            return Ok(PadicElement::zero(&self.tower));
        }
        crate::analytic::eval_poly(&self.coeffs, sigma)
    }
}

impl CommRing for SigmaPoly {
    fn zero_like(&self) -> Self {
        SigmaPoly::new(&self.tower, Vec::new())
    }
    fn one_like(&self) -> Self {
        SigmaPoly::new(&self.tower, vec![PadicElement::one(&self.tower)])
    }
    fn add(&self, other: &Self) -> Result<Self> {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = PadicElement::zero(&self.tower);
        let coeffs = (0..n)
            .map(|k| {
                self.coeffs
                    .get(k)
                    .unwrap_or(&zero)
                    .add(other.coeffs.get(k).unwrap_or(&zero))
            })
            .collect::<Result<_>>()?;
        Ok(SigmaPoly::new(&self.tower, coeffs))
    }
    fn mul(&self, other: &Self) -> Result<Self> {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Ok(self.zero_like());
        }
        let mut out = vec![PadicElement::zero(&self.tower); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b)?)?;
            }
        }
        Ok(SigmaPoly::new(&self.tower, out))
    }
    fn neg(&self) -> Self {
        SigmaPoly::new(&self.tower, self.coeffs.iter().map(|c| c.neg()).collect())
    }
}

/// Coefficients `[1, c_1, …, c_n]` of `det(1 − tA)` by Berkowitz's
/// division-free recursion on trailing principal submatrices.
pub fn charpoly<R: CommRing>(a: &[Vec<R>], unit: &R) -> Result<Vec<R>> {
    let n = a.len();
    let one = unit.one_like();
    if n == 0 {
        return Ok(vec![one]);
    }
    let mut v = vec![one.clone(), a[n - 1][n - 1].neg()];
    for r in (0..n - 1).rev() {
        let m = n - r - 1;
        // first column of the Toeplitz factor: 1, −a, −R C, −R A₁ C, …
        let mut col = Vec::with_capacity(m + 2);
        col.push(one.clone());
        col.push(a[r][r].neg());
        let mut y: Vec<R> = (r + 1..n).map(|i| a[i][r].clone()).collect();
        for k in 0..m {
            let mut dot = unit.zero_like();
            for (j, yj) in y.iter().enumerate() {
                dot = dot.add(&a[r][r + 1 + j].mul(yj)?)?;
            }
            col.push(dot.neg());
            if k + 1 < m {
                let mut next = Vec::with_capacity(m);
                for i in 0..m {
                    let mut s = unit.zero_like();
                    for (j, yj) in y.iter().enumerate() {
                        s = s.add(&a[r + 1 + i][r + 1 + j].mul(yj)?)?;
                    }
                    next.push(s);
                }
                y = next;
            }
        }
        let mut out = Vec::with_capacity(m + 2);
        for i in 0..m + 2 {
            let mut s = unit.zero_like();
            for (j, vj) in v.iter().enumerate().take(i + 1) {
                s = s.add(&col[i - j].mul(vj)?)?;
            }
            out.push(s);
        }
        v = out;
    }
    Ok(v)
}

/// `det(1 − tU)` up to degree `D` with certified precision per coefficient.
#[derive(Debug, Clone)]
pub struct FredholmSeries {
    pub coeffs: Vec<PadicElement>,
    /// lower bound on the valuation of the truncation error in `c_k`
    pub tail_error: Vec<Valuation>,
    /// lower bounds on `val(c_k)` for `k > D`
    pub beyond: Vec<(usize, Valuation)>,
}

fn sum(vals: &[Valuation]) -> Valuation {
    vals.iter().fold(Valuation::zero(), |acc, &v| acc + v)
}

fn assemble(cert: &Certificate, mut coeffs: Vec<PadicElement>, degree: usize) -> FredholmSeries {
    let m = cert.rank();
    coeffs.truncate(degree + 1);
    let tail_error = (0..=degree)
        .map(|k| match cert.tail {
            Some(_) if k > 0 => sum(&cert.smallest(k - 1)) + cert.bound(m + 1),
            _ => Valuation::Infinite,
        })
        .collect();
    let last = if cert.tail.is_some() { m.max(degree) + 64 } else { m };
    let beyond = (degree + 1..=last)
        .map(|k| {
            let s = cert.smallest(k);
            (k, if s.len() < k { Valuation::Infinite } else { sum(&s) })
        })
        .collect();
    FredholmSeries {
        coeffs,
        tail_error,
        beyond,
    }
}

fn checked(family: &OperatorFamily, degree: usize) -> Result<Certificate> {
    let cert = certify_compact(family)
        .map_err(|r| Error::InvalidInput(format!("family is not certified compact: {}", r.reason)))?;
    if degree > family.rank() {
        return Err(Error::InvalidInput(format!(
            "degree {degree} exceeds the truncation rank {}",
            family.rank()
        )));
    }
    Ok(cert)
}

/// Fredholm series of `U(σ)` for an integral `σ`.
pub fn fredholm_series(family: &OperatorFamily, sigma: &PadicElement, degree: usize) -> Result<FredholmSeries> {
    let cert = checked(family, degree)?;
    if sigma.val() < Valuation::zero() {
        return Err(Error::Domain {
            op: "fredholm_series",
            detail: format!("sigma has valuation {}", sigma.val()),
        });
    }
    let matrix = family.evaluate(sigma)?;
    let coeffs = charpoly(&matrix, &PadicElement::one(family.tower()))?;
    Ok(assemble(&cert, coeffs, degree))
}

/// `P(σ, t)` with polynomial-in-`σ` coefficients.
#[derive(Debug, Clone)]
pub struct BivariateSeries {
    pub coeffs: Vec<SigmaPoly>,
    cert: Certificate,
}

impl BivariateSeries {
    /// Specializes to an integral `σ`.
    pub fn at(&self, sigma: &PadicElement) -> Result<FredholmSeries> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.eval(sigma))
            .collect::<Result<Vec<_>>>()?;
        Ok(assemble(&self.cert, coeffs, self.coeffs.len() - 1))
    }
}

pub fn fredholm_series_symbolic(family: &OperatorFamily, degree: usize) -> Result<BivariateSeries> {
    let cert = checked(family, degree)?;
    let t = family.tower();
    let m = family.rank();
    let matrix: Vec<Vec<SigmaPoly>> = (0..m)
        .map(|i| (0..m).map(|j| SigmaPoly::new(t, family.entry(i, j).to_vec())).collect())
        .collect();
    let mut coeffs = charpoly(&matrix, &SigmaPoly::new(t, Vec::new()))?;
    coeffs.truncate(degree + 1);
    Ok(BivariateSeries { coeffs, cert })
}

impl FredholmSeries {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Valuation up to which `c_k` is known.
    pub fn certified(&self, k: usize) -> Valuation {
        Valuation::Finite(self.coeffs[k].certified()).min(self.tail_error[k])
    }

    pub fn slopes(&self) -> SlopeSet {
        newton_slopes(self)
    }
}

/// Certified slopes with multiplicity; every slope not listed is at
/// least `horizon`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlopeSet {
    pub slopes: Vec<(Rational, usize)>,
    pub horizon: Valuation,
}

impl SlopeSet {
    pub fn beyond_certification(&self) -> bool {
        !self.horizon.is_infinite()
    }

    pub fn total(&self) -> usize {
        self.slopes.iter().map(|s| s.1).sum()
    }
}

pub fn newton_slopes(series: &FredholmSeries) -> SlopeSet {
    let mut known: Vec<(i64, Rational)> = Vec::new();
    let mut bounds: Vec<(i64, Rational)> = Vec::new();
    for (k, c) in series.coeffs.iter().enumerate() {
        let cert = series.certified(k);
        match c.val() {
            Valuation::Finite(v) if Valuation::Finite(v) < cert => known.push((k as i64, v)),
            _ => {
                if let Valuation::Finite(b) = cert {
                    bounds.push((k as i64, b));
                }
            }
        }
    }
    for &(k, b) in &series.beyond {
        if let Valuation::Finite(b) = b {
            bounds.push((k as i64, b));
        }
    }

    let mut slopes = Vec::new();
    let mut last = known[0];
    if known.len() >= 2 {
        let pts: Vec<(i64, Valuation)> = known.iter().map(|&(k, v)| (k, Valuation::Finite(v))).collect();
        let poly = NewtonPolygon::new(&pts).expect("distinct abscissas");
        for (seg, end) in poly.segments.iter().zip(poly.vertices.iter().skip(1)) {
            let (x1, y1) = *end;
            let ok = bounds.iter().all(|&(k, b)| {
                if k <= x1 {
                    poly.eval(k).is_none_or(|h| b >= h)
                } else {
                    b > y1 + seg.slope * int(k - x1)
                }
            });
            if !ok {
                break;
            }
            slopes.push((seg.slope, seg.length as usize));
            last = (x1, y1);
        }
    }
    let horizon = known
        .iter()
        .chain(&bounds)
        .filter(|&&(k, _)| k > last.0)
        .map(|&(k, v)| (v - last.1) / int(k - last.0))
        .min()
        .map_or(Valuation::Infinite, Valuation::Finite);
    SlopeSet { slopes, horizon }
}

/// Number of slopes `<= ν` with multiplicity.
pub fn riesz_dimension(slopes: &SlopeSet, nu: Rational) -> Result<usize> {
    if Valuation::Finite(nu) >= slopes.horizon {
        return Err(Error::BoundViolated {
            bound: format!("nu below the certification horizon {}", slopes.horizon),
            value: nu,
        });
    }
    Ok(slopes.slopes.iter().filter(|s| s.0 <= nu).map(|s| s.1).sum())
}
