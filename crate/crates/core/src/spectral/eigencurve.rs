use rayon::prelude::*;

use crate::analytic::roots_at_valuation;
use crate::element::PadicElement;
use crate::error::{Error, Result};
use crate::fp::Fq;
use crate::valuation::{int, Rational, Valuation};
use crate::weight::WeightDiskConfig;

use super::family::OperatorFamily;
use super::fredholm::{fredholm_series, SlopeSet};

/// A point `(σ, t)` of the spectral curve with `λ = t^{−1}`.
#[derive(Debug, Clone)]
pub struct EigenPoint {
    pub sigma_index: usize,
    pub sigma: PadicElement,
    pub t: PadicElement,
    pub lambda: PadicElement,
    pub slope: Rational,
    /// `val(Uv − λv) − val(v)` for the computed eigenvector `v`
    pub margin: Rational,
}

/// A grid point or slope whose roots could not be separated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointFailure {
    pub sigma_index: usize,
    pub slope: Option<Rational>,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct SpectralReport {
    /// sorted by `(σ, slope)`
    pub points: Vec<EigenPoint>,
    pub failures: Vec<PointFailure>,
    /// certified slopes per grid index
    pub slopes: Vec<(usize, SlopeSet)>,
    /// residual margin every point is required to meet
    pub min_margin: Rational,
}

impl SpectralReport {
    pub fn margins_ok(&self) -> bool {
        self.points.iter().all(|p| p.margin >= self.min_margin)
    }
}

/// `(shift, digits)` ordering key of an element.
pub fn sort_key(x: &PadicElement) -> (i64, Vec<u64>) {
    let (digits, shift, _) = x.to_digits();
    (shift, digits)
}

fn lower(x: &PadicElement) -> Rational {
    match x.val() {
        Valuation::Finite(v) => v,
        Valuation::Infinite => x.certified(),
    }
}

/// Kernel vector of `A − λ` by full-pivot elimination; the last pivot is
/// the one that vanishes.
fn eigenvector(a: &[Vec<PadicElement>], lambda: &PadicElement) -> Result<Vec<PadicElement>> {
    let n = a.len();
    let mut b: Vec<Vec<PadicElement>> = a.to_vec();
    for (i, row) in b.iter_mut().enumerate() {
        row[i] = row[i].sub(lambda)?;
    }
    let mut rows: Vec<usize> = (0..n).collect();
    let mut cols: Vec<usize> = (0..n).collect();
    for k in 0..n.saturating_sub(1) {
        let mut best: Option<(usize, usize, Rational)> = None;
        for ri in k..n {
            for ci in k..n {
                let e = &b[rows[ri]][cols[ci]];
                if let Valuation::Finite(v) = e.val() {
                    if best.as_ref().is_none_or(|x| v < x.2) {
                        best = Some((ri, ci, v));
                    }
                }
            }
        }
        let Some((ri, ci, _)) = best else { break };
        rows.swap(k, ri);
        cols.swap(k, ci);
        let piv = b[rows[k]][cols[k]].clone();
        for r in k + 1..n {
            let factor = b[rows[r]][cols[k]].div(&piv)?;
            for c in k..n {
                let upd = b[rows[r]][cols[c]].sub(&factor.mul(&b[rows[k]][cols[c]])?)?;
                b[rows[r]][cols[c]] = upd;
            }
        }
    }
    let mut x = vec![PadicElement::zero(lambda.tower()); n];
    if n == 0 {
        return Ok(x);
    }
    x[cols[n - 1]] = PadicElement::one(lambda.tower());
    for k in (0..n - 1).rev() {
        let piv = &b[rows[k]][cols[k]];
        if piv.is_zero() {
            continue;
        }
        let mut s = PadicElement::zero(lambda.tower());
        for c in k + 1..n {
            s = s.add(&b[rows[k]][cols[c]].mul(&x[cols[c]])?)?;
        }
        x[cols[k]] = s.neg().div(piv)?;
    }
    Ok(x)
}

/// `min val(Av − λv) − min val(v)`.
fn residual_margin(a: &[Vec<PadicElement>], lambda: &PadicElement, v: &[PadicElement]) -> Result<Rational> {
    let mut worst: Option<Rational> = None;
    for (i, row) in a.iter().enumerate() {
        let mut s = v[i].mul(lambda)?.neg();
        for (aij, vj) in row.iter().zip(v) {
            s = s.add(&aij.mul(vj)?)?;
        }
        let l = lower(&s);
        worst = Some(worst.map_or(l, |w| w.min(l)));
    }
    let norm = v.iter().map(lower).min().expect("nonempty");
    Ok(worst.expect("nonempty") - norm)
}

/// `Π`-exponent of the reciprocal roots for an eigenvalue slope.
fn pi_exponent(family: &OperatorFamily, slope: Rational) -> Option<i64> {
    let k = slope / family.tower().pi_valuation_unit();
    k.is_integer().then(|| -k.to_integer())
}

struct Candidates {
    roots: Vec<(Rational, PadicElement)>,
    /// `(slope, residue of t Π^{−val t}, multiplicity)`
    clusters: Vec<(Rational, Fq, usize)>,
    failures: Vec<(Rational, String)>,
}

fn candidates(
    family: &OperatorFamily,
    coeffs: &[PadicElement],
    slopes: &SlopeSet,
    cap: Option<Rational>,
) -> Result<Candidates> {
    let mut out = Candidates {
        roots: Vec::new(),
        clusters: Vec::new(),
        failures: Vec::new(),
    };
    for &(s, mult) in &slopes.slopes {
        if cap.is_some_and(|c| s > c) {
            continue;
        }
        let Some(e) = pi_exponent(family, s) else {
            out.failures.push((s, "slope not realized by the tower's value group".into()));
            continue;
        };
        let found = roots_at_valuation(coeffs, e)?;
        let n = found.roots.len();
        out.roots.extend(found.roots.into_iter().map(|r| (s, r)));
        for (z, m) in found.clusters {
            out.failures.push((s, format!("{m} reciprocal roots share one residue")));
            out.clusters.push((s, z, m));
        }
        if n + out.clusters.iter().filter(|c| c.0 == s).map(|c| c.2).sum::<usize>() < mult {
            out.failures.push((s, "roots lie outside the tower".into()));
        }
    }
    Ok(out)
}

fn evaluate_point(
    family: &OperatorFamily,
    index: usize,
    sigma: &PadicElement,
    degree: usize,
    nu_cap: Rational,
) -> Result<(Vec<EigenPoint>, Vec<PointFailure>, SlopeSet)> {
    let series = fredholm_series(family, sigma, degree)?;
    let slopes = series.slopes();
    let matrix = family.evaluate(sigma)?;
    let cands = candidates(family, &series.coeffs, &slopes, Some(nu_cap))?;
    let mut points = Vec::new();
    for (slope, t) in cands.roots {
        let lambda = t.inv()?;
        let v = eigenvector(&matrix, &lambda)?;
        let margin = residual_margin(&matrix, &lambda, &v)?;
        points.push(EigenPoint {
            sigma_index: index,
            sigma: sigma.clone(),
            t,
            lambda,
            slope,
            margin,
        });
    }
    let failures = cands
        .failures
        .into_iter()
        .map(|(s, reason)| PointFailure {
            sigma_index: index,
            slope: Some(s),
            reason,
        })
        .collect();
    Ok((points, failures, slopes))
}

/// Eigenvalues of slope `<= ν_cap` at each grid point of the weight disk,
/// coordinate `σ` with `val(σ − 1) > m_r`.
pub fn eigencurve_points(
    family: &OperatorFamily,
    disk: &WeightDiskConfig,
    grid: &[PadicElement],
    degree: usize,
    nu_cap: Rational,
) -> Result<SpectralReport> {
    let one = PadicElement::one(family.tower());
    for s in grid {
        let v = s.sub(&one)?.val();
        if !disk.contains(v) {
            return Err(Error::BoundViolated {
                bound: format!("grid point inside the disk val(sigma - 1) > {}", disk.m_r),
                value: v.as_finite().unwrap_or(disk.m_r),
            });
        }
    }
    let results: Vec<_> = grid
        .par_iter()
        .enumerate()
        .map(|(i, s)| evaluate_point(family, i, s, degree, nu_cap))
        .collect::<Result<_>>()?;
    let mut points = Vec::new();
    let mut failures = Vec::new();
    let mut slopes = Vec::new();
    for (i, (p, f, s)) in results.into_iter().enumerate() {
        points.extend(p);
        failures.extend(f);
        slopes.push((i, s));
    }
    points.sort_by(|a, b| {
        (sort_key(&a.sigma), a.slope, sort_key(&a.lambda)).cmp(&(sort_key(&b.sigma), b.slope, sort_key(&b.lambda)))
    });
    let t = family.tower();
    let min_margin = int(t.precision()) * t.pi_valuation_unit() / int(2);
    Ok(SpectralReport {
        points,
        failures,
        slopes,
        min_margin,
    })
}

/// A branch `σ ↦ λ(σ)` followed along a path.
#[derive(Debug, Clone)]
pub struct Branch {
    /// `(σ, λ(σ), slope)`
    pub points: Vec<(PadicElement, PadicElement, Rational)>,
    pub collision: Option<Collision>,
}

/// Reciprocal roots that cannot be separated at a path index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Collision {
    pub path_index: usize,
    pub slope: Rational,
    pub multiplicity: usize,
}

/// Follows the eigenvalue `λ_0` at `σ_0` along `path`, which continues
/// from `σ_0`.
pub fn deform_eigenform(
    family: &OperatorFamily,
    sigma0: &PadicElement,
    lambda0: &PadicElement,
    nu: Rational,
    path: &[PadicElement],
) -> Result<Branch> {
    let mut full = vec![sigma0.clone()];
    full.extend(path.iter().filter(|s| !s.agrees(sigma0)).cloned());
    let mut branch = Branch {
        points: Vec::new(),
        collision: None,
    };
    let mut prev = lambda0.clone();
    let prev_val = |x: &PadicElement| lower(x);
    for (idx, sigma) in full.iter().enumerate() {
        let series = fredholm_series(family, sigma, family.rank())?;
        let slopes = series.slopes();
        let cands = candidates(family, &series.coeffs, &slopes, None)?;
        let threshold = prev_val(&prev);
        let best = cands
            .roots
            .iter()
            .map(|(s, t)| Ok((*s, t.inv()?)))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .map(|(s, l)| {
                let a = l.agreement(&prev).unwrap_or(Rational::from_integer(i64::MIN / 4));
                (a, s, l)
            })
            .filter(|(a, _, _)| *a > threshold)
            .max_by(|x, y| x.0.cmp(&y.0));
        let slope_prev = prev.val();
        let cluster = cands
            .clusters
            .iter()
            .find(|c| Valuation::Finite(c.0) == slope_prev);
        match (best, cluster) {
            (_, Some(&(s, _, m))) => {
                branch.collision = Some(Collision {
                    path_index: idx,
                    slope: s,
                    multiplicity: m,
                });
                return Ok(branch);
            }
            (Some((_, s, l)), None) => {
                if s > nu {
                    return Err(Error::BoundViolated {
                        bound: format!("slope <= {nu} along the path"),
                        value: s,
                    });
                }
                branch.points.push((sigma.clone(), l.clone(), s));
                prev = l;
            }
            (None, None) => {
                return Err(Error::InvalidInput(format!(
                    "no eigenvalue continues the branch at path index {idx}"
                )));
            }
        }
    }
    Ok(branch)
}
