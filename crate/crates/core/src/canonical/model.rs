use num_traits::{One, Zero};

use crate::analytic::roots_at_valuation;
use crate::element::PadicElement;
use crate::error::{Error, Result};
use crate::gauss::{digits, h_index, GaussSumTable};
use crate::ground::Ground;
use crate::tower::{make_tower, ExtensionStep, ExtensionTower, KummerBase};
use crate::valuation::{int, rat, Rational, Valuation};

/// The canonical subgroup `Sp(V[x]/(x^q + (ϖ/E)x))` over a tower `V`
/// containing `ζ_p`, `(−ϖ)^{1/(q−1)}` and a root `E_1` of `E`.
#[derive(Debug, Clone)]
pub struct CanonicalGroupModel {
    pub tower: ExtensionTower,
    pub ground: Ground,
    /// growth `w = val(E)`
    pub w: Rational,
    pub hasse: PadicElement,
    pub hasse_root: PadicElement,
    /// `α` with `α^{q−1} = −ϖ/E`
    pub alpha: PadicElement,
    /// `(−ϖ)^{1/(q−1)}`
    pub lambda: PadicElement,
    /// `ϖ/E`
    pub b: PadicElement,
    pub gauss: GaussSumTable,
    /// `w_i` at index `i − 1`
    pub raynaud: Vec<PadicElement>,
    pub raynaud_total: PadicElement,
    pub u: PadicElement,
}

/// Valuation claims about `β_k = g(χ_1) α^{−p^k}` and `η`.
#[derive(Debug, Clone)]
pub struct GammaReport {
    /// `(measured, predicted)` valuations of `β_k`
    pub beta_valuations: Vec<(Valuation, Rational)>,
    pub min_eta_coefficient_valuation: Valuation,
    pub integral: bool,
}

/// Tower steps realizing the model for growth `w`.
pub fn model_steps(g: Ground, w: Rational) -> Vec<ExtensionStep> {
    let mut steps = Vec::new();
    if g.f > 1 {
        steps.push(ExtensionStep::Unramified {
            degree: g.f,
            poly: None,
        });
    }
    let mut eis = vec![0i64; g.e as usize + 1];
    eis[0] = -(g.p as i64);
    eis[g.e as usize] = 1;
    steps.push(ExtensionStep::Eisenstein { poly: eis });
    steps.push(ExtensionStep::Kummer {
        base: KummerBase::NegVarpi,
        degree: g.q() as usize - 1,
    });
    if !w.is_zero() {
        steps.push(ExtensionStep::Kummer {
            base: KummerBase::NegPi,
            degree: *w.denom() as usize,
        });
    }
    steps.push(ExtensionStep::Cyclotomic { order: g.p });
    steps
}

impl CanonicalGroupModel {
    /// Builds the model with `E_1 = Π^{num(w)}` at `digits` digits of `ϖ`.
    pub fn new(g: Ground, w: Rational, digits: i64) -> Result<Self> {
        Self::with_unit(g, w, digits, 1)
    }

    /// As [`new`](Self::new) with `E_1 = unit · Π^{num(w)}`.
    pub fn with_unit(g: Ground, w: Rational, digits: i64, unit: i64) -> Result<Self> {
        let q = g.q() as i64;
        if w < Rational::zero() || w >= rat(q, q + 1) {
            return Err(Error::BoundViolated {
                bound: "0 <= w < q/(q+1)".into(),
                value: w,
            });
        }
        if unit % g.p as i64 == 0 {
            return Err(Error::InvalidInput("E_1 unit must be prime to p".into()));
        }
        if digits < 1 {
            return Err(Error::InvalidInput("precision must be positive".into()));
        }
        let steps = model_steps(g, w);
        let ram = g.e * (q - 1) * *w.denom();
        let tower = make_tower(g.p, &steps, digits * ram / g.e)?;
        debug_assert_eq!(tower.ramification(), ram);
        let lambda = PadicElement::neg_varpi_root(&tower)?;
        let hasse_root = PadicElement::pi(&tower)
            .pow(*w.numer())?
            .mul_int(unit);
        let hasse = hasse_root.pow(q - 1)?;
        let alpha = lambda.div(&hasse_root)?;
        let b = PadicElement::varpi(&tower).div(&hasse)?;
        let gauss = GaussSumTable::new(&tower)?;
        let raynaud = (1..q as u64)
            .map(|i| gauss.raynaud_w(i))
            .collect::<Result<Vec<_>>>()?;
        let raynaud_total = gauss.raynaud_w_total()?;
        let u = gauss.raynaud_u()?;
        Ok(CanonicalGroupModel {
            tower,
            ground: g,
            w,
            hasse,
            hasse_root,
            alpha,
            lambda,
            b,
            gauss,
            raynaud,
            raynaud_total,
            u,
        })
    }

    pub fn q(&self) -> u64 {
        self.ground.q()
    }

    /// `v = w/(q−1)`.
    pub fn v(&self) -> Rational {
        self.w / int(self.q() as i64 - 1)
    }

    pub fn raynaud_w(&self, i: u64) -> &PadicElement {
        &self.raynaud[i as usize - 1]
    }

    /// `−ϖ^{e−1} u E` common to all comultiplication coefficients.
    fn prefactor(&self) -> Result<PadicElement> {
        let varpi = PadicElement::varpi(&self.tower);
        Ok(varpi
            .pow(self.ground.e - 1)?
            .mul(&self.u)?
            .mul(&self.hasse)?
            .neg())
    }

    /// Coefficient of `x^i ⊗ x^{q−i}` in `c(x)`, at index `i − 1`:
    /// `−ϖ^{e−1} u E w^{h_i−1}/(w_i w_{q−i})`.
    pub fn comultiplication_coefficients(&self) -> Result<Vec<PadicElement>> {
        let g = self.ground;
        let pre = self.prefactor()?;
        let q = self.q();
        (1..q)
            .map(|i| {
                let h = h_index(i, g.p, g.f)? as i64;
                pre.mul(&self.raynaud_total.pow(h - 1)?)?
                    .div(&self.raynaud_w(i).mul(self.raynaud_w(q - i))?)
            })
            .collect()
    }

    /// `β_k = g(χ_1) α^{−p^k}`.
    pub fn beta(&self, k: usize) -> Result<PadicElement> {
        let pk = self.ground.p.pow(k as u32) as i64;
        self.gauss.get(1)?.mul(&self.alpha.pow(-pk)?)
    }

    /// Coefficients of `η(y)` from `η = 1 + Σ g(χ_i)/(q−1) α^{−i} x^i`.
    pub fn eta_coefficients(&self) -> Result<Vec<PadicElement>> {
        let t = &self.tower;
        let q = self.q();
        let q1 = PadicElement::from_int(t, q as i64 - 1);
        let mut out = vec![PadicElement::one(t)];
        for i in 1..q {
            out.push(
                self.gauss
                    .get(i)?
                    .mul(&self.alpha.pow(-(i as i64))?)?
                    .div(&q1)?,
            );
        }
        Ok(out)
    }

    /// Coefficients of `η(y)` from the product formula
    /// `1 + Σ x^i ∏ β_k^{i_k} / ((q−1)^{s(i)} w_i)`.
    pub fn eta_coefficients_from_beta(&self) -> Result<Vec<PadicElement>> {
        let t = &self.tower;
        let g = self.ground;
        let q = self.q();
        let betas = (0..g.f).map(|k| self.beta(k)).collect::<Result<Vec<_>>>()?;
        let q1 = PadicElement::from_int(t, q as i64 - 1);
        let mut out = vec![PadicElement::one(t)];
        for i in 1..q {
            let ds = digits(i, g.p, g.f);
            let s: u64 = ds.iter().sum();
            let mut num = PadicElement::one(t);
            for (k, &d) in ds.iter().enumerate() {
                num = num.mul(&betas[k].pow(d as i64)?)?;
            }
            out.push(num.div(&q1.pow(s as i64)?.mul(self.raynaud_w(i))?)?);
        }
        Ok(out)
    }

    pub fn gamma_report(&self) -> Result<GammaReport> {
        let g = self.ground;
        let beta_valuations = (0..g.f)
            .map(|k| {
                Ok((
                    self.beta(k)?.val(),
                    super::beta_valuation(g, self.w, k),
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        let eta = self.eta_coefficients()?;
        let min = eta
            .iter()
            .map(|c| c.val())
            .min()
            .expect("nonempty");
        let integral = eta.iter().all(|c| {
            c.val() >= Valuation::zero() || (c.is_zero() && c.shift() >= 0)
        });
        if !integral {
            return Err(Error::Consistency(format!(
                "eta has a coefficient of valuation {min}"
            )));
        }
        Ok(GammaReport {
            beta_valuations,
            min_eta_coefficient_valuation: min,
            integral,
        })
    }

    /// `Q = ϖ^{e−1} u E w^{f−1}/w_{q−1}`.
    pub fn differential_q(&self) -> Result<PadicElement> {
        let f = self.ground.f as i64;
        self.prefactor()?
            .neg()
            .mul(&self.raynaud_total.pow(f - 1)?)?
            .div(self.raynaud_w(self.q() - 1))
    }

    /// Certified exponent `c` with `E_1 ≡ E^{1/(q−1)} mod ϖ^c`, where the
    /// right side is the root of `y^{q−1} = E` closest to `E_1`.
    pub fn dlog_gamma_congruence(&self) -> Result<Rational> {
        let q = self.q() as i64;
        if self.w > rat(1, q) {
            return Err(Error::BoundViolated {
                bound: "w <= 1/q".into(),
                value: self.w,
            });
        }
        let t = &self.tower;
        let mut coeffs = vec![PadicElement::zero(t); q as usize];
        coeffs[0] = self.hasse.neg();
        coeffs[q as usize - 1] = PadicElement::one(t);
        let slope = self.hasse_root.pi_valuation().expect("nonzero");
        let roots = roots_at_valuation(&coeffs, slope)?;
        let mut best: Option<Rational> = None;
        for r in &roots.roots {
            let a = self.hasse_root.agreement(r)?;
            if best.is_none_or(|b| a > b) {
                best = Some(a);
            }
        }
        let c = best.ok_or(Error::Consistency("E has no (q-1)-th root".into()))?;
        let need = Rational::one() - self.w;
        let available = self.hasse_root.certified();
        if available < need {
            return Err(Error::PrecisionExhausted {
                op: "dlog congruence",
                needed: need.ceil().to_integer(),
                available: available.floor().to_integer(),
            });
        }
        Ok(c)
    }
}
