//! Towers of local fields over `Z_p`, flattened to a single ring
//! `Z_{p^F}[Π]/(G(Π))` with `G` Eisenstein over `Z` of degree `E`.

use std::fmt;
use std::sync::Arc;

use num_integer::Integer;

use crate::element::{PadicElement, Raw};
use crate::error::{Error, Result};
use crate::fp::{self, default_irreducible, Fq, ResidueField};
use crate::ring::FlatRing;
use crate::valuation::{rat, Rational};

/// Storage moduli stay below this bound so that products fit in `u128`
/// accumulators.
pub const MODULUS_LIMIT: u64 = 1 << 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KummerBase {
    Varpi,
    NegVarpi,
    Pi,
    NegPi,
}

impl KummerBase {
    pub fn name(&self) -> &'static str {
        match self {
            KummerBase::Varpi => "varpi",
            KummerBase::NegVarpi => "-varpi",
            KummerBase::Pi => "pi",
            KummerBase::NegPi => "-pi",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "varpi" => KummerBase::Varpi,
            "-varpi" => KummerBase::NegVarpi,
            "pi" => KummerBase::Pi,
            "-pi" => KummerBase::NegPi,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExtensionStep {
    /// Unramified of the given degree; the optional polynomial (integer
    /// coefficients, lowest degree first, monic) must be irreducible mod `p`.
    Unramified {
        degree: usize,
        poly: Option<Vec<i64>>,
    },
    /// Eisenstein over `Z_p` with integer coefficients, lowest degree first.
    Eisenstein { poly: Vec<i64> },
    /// Adjoins an `n`-th root of `±ϖ` or `±Π` (current top uniformizer).
    Kummer { base: KummerBase, degree: usize },
    /// Adjoins a primitive root of unity of the given order (`p` or prime
    /// to `p`).
    Cyclotomic { order: u64 },
}

#[derive(Debug, PartialEq, Eq)]
pub(crate) struct TowerData {
    pub p: u64,
    pub steps: Vec<ExtensionStep>,
    pub realized: Vec<ExtensionStep>,
    pub precision: i64,
    pub e: i64,
    pub f: usize,
    pub eis: Vec<i64>,
    pub varpi_sign: i64,
    pub varpi_exp: i64,
    pub ring: FlatRing,
    /// `η^c` and `η^{-c}` with `η = Π^E / p`, for `c = 0..=m_exp + 1`
    pub eta_pows: Vec<Vec<u64>>,
    pub eta_inv_pows: Vec<Vec<u64>>,
    pub zeta_p: Option<Raw>,
    pub lambda: Option<Raw>,
}

/// A tower of extensions at fixed precision. Cheap to clone; elements keep
/// a handle to the tower they live in.
#[derive(Clone)]
pub struct ExtensionTower(pub(crate) Arc<TowerData>);

impl fmt::Debug for ExtensionTower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExtensionTower")
            .field("p", &self.p())
            .field("e", &self.e())
            .field("f", &self.f())
            .field("E", &self.ramification())
            .field("F", &self.residue_degree())
            .field("precision", &self.precision())
            .finish()
    }
}

impl PartialEq for ExtensionTower {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

impl Eq for ExtensionTower {}

struct Plan {
    f: usize,
    big_f: usize,
    e: i64,
    eis: Option<Vec<i64>>,
    sign: i64,
    exp: i64,
    unram_poly: Option<Vec<i64>>,
    wants_zeta_p: bool,
    realized: Vec<ExtensionStep>,
    base_closed: bool,
}

impl Plan {
    fn ram(&self) -> usize {
        self.eis.as_ref().map_or(1, |g| g.len() - 1)
    }

    fn close_base(&mut self, p: u64) {
        if self.eis.is_none() {
            self.eis = Some(vec![-(p as i64), 1]);
            self.e = 1;
        }
        self.base_closed = true;
    }
}

fn check_eisenstein(p: u64, poly: &[i64]) -> Result<()> {
    let p = p as i64;
    let n = poly.len();
    if n < 2 || poly[n - 1] != 1 {
        return Err(Error::InvalidTower(
            "eisenstein polynomial must be monic of degree >= 1".into(),
        ));
    }
    if poly[0] % p != 0 || (poly[0] / p) % p == 0 {
        return Err(Error::InvalidTower(format!(
            "constant term {} is not p times a unit",
            poly[0]
        )));
    }
    if let Some(c) = poly[1..n - 1].iter().find(|&&c| c % p != 0) {
        return Err(Error::InvalidTower(format!(
            "coefficient {c} is not divisible by p"
        )));
    }
    Ok(())
}

/// Builds a tower from a list of steps.
pub fn make_tower(p: u64, steps: &[ExtensionStep], precision: i64) -> Result<ExtensionTower> {
    if !fp::is_prime(p) {
        return Err(Error::InvalidTower(format!("{p} is not prime")));
    }
    if precision < 1 {
        return Err(Error::InvalidTower("precision must be positive".into()));
    }
    let mut plan = Plan {
        f: 1,
        big_f: 1,
        e: 1,
        eis: None,
        sign: 1,
        exp: 1,
        unram_poly: None,
        wants_zeta_p: false,
        realized: Vec::new(),
        base_closed: false,
    };
    for step in steps {
        apply_step(p, &mut plan, step)?;
    }
    plan.close_base(p);
    build(p, steps.to_vec(), plan, precision)
}

fn apply_step(p: u64, plan: &mut Plan, step: &ExtensionStep) -> Result<()> {
    match step {
        ExtensionStep::Unramified { degree, poly } => {
            if *degree == 0 {
                return Err(Error::InvalidTower("unramified degree 0".into()));
            }
            if let Some(h) = poly {
                if h.len() != degree + 1 {
                    return Err(Error::InvalidTower(format!(
                        "unramified polynomial has degree {} but step degree is {degree}",
                        h.len() as i64 - 1
                    )));
                }
                let hp: Vec<u64> = h.iter().map(|c| c.rem_euclid(p as i64) as u64).collect();
                if h[h.len() - 1] != 1 {
                    return Err(Error::InvalidTower(
                        "unramified polynomial must be monic".into(),
                    ));
                }
                if !fp::is_irreducible(&hp, p) {
                    return Err(Error::InvalidTower(format!(
                        "polynomial {h:?} is reducible modulo {p}"
                    )));
                }
                plan.unram_poly = Some(h.clone());
            }
            if !plan.base_closed {
                plan.f *= degree;
            }
            plan.big_f *= degree;
            plan.realized.push(step.clone());
        }
        ExtensionStep::Eisenstein { poly } => {
            if plan.base_closed {
                return Err(Error::InvalidTower(
                    "eisenstein step must precede kummer and cyclotomic steps and occur once".into(),
                ));
            }
            check_eisenstein(p, poly)?;
            plan.eis = Some(poly.clone());
            plan.e = poly.len() as i64 - 1;
            plan.base_closed = true;
            plan.realized.push(step.clone());
        }
        ExtensionStep::Kummer { base, degree } => {
            plan.close_base(p);
            let n = *degree;
            if n == 0 {
                return Err(Error::InvalidTower("kummer degree 0".into()));
            }
            let s = match base {
                KummerBase::Pi => 1,
                KummerBase::NegPi => -1,
                KummerBase::Varpi | KummerBase::NegVarpi => {
                    if plan.exp != 1 {
                        return Err(Error::InvalidTower(
                            "kummer over varpi requires varpi to be the current uniformizer".into(),
                        ));
                    }
                    let b = if *base == KummerBase::Varpi { 1 } else { -1 };
                    b * plan.sign
                }
            };
            // Π = s·y^n, so G_new(y) = s^E·G(s·y^n)
            let g = plan.eis.as_ref().expect("base closed");
            let big_e = g.len() - 1;
            let mut ng = vec![0i64; big_e * n + 1];
            for (j, &gj) in g.iter().enumerate() {
                let sgn = if (big_e + j).is_multiple_of(2) { 1 } else { s };
                ng[j * n] = gj * sgn;
            }
            plan.eis = Some(ng);
            plan.sign *= if plan.exp % 2 == 0 { 1 } else { s };
            plan.exp *= n as i64;
            plan.realized.push(step.clone());
        }
        ExtensionStep::Cyclotomic { order } => {
            let m = *order;
            if m == 0 {
                return Err(Error::InvalidTower("cyclotomic order 0".into()));
            }
            if m == p {
                plan.close_base(p);
                let ram = plan.ram();
                let pm1 = (p - 1) as usize;
                if !ram.is_multiple_of(pm1) {
                    let n = pm1 / ram.gcd(&pm1);
                    apply_step(
                        p,
                        plan,
                        &ExtensionStep::Kummer {
                            base: KummerBase::NegPi,
                            degree: n,
                        },
                    )?;
                }
                // -p is a (p-1)-th power iff (G_0/p)^{-1} is one in F_{p^F}
                let g0 = plan.eis.as_ref().expect("base closed")[0] / p as i64;
                let z = fp::inv_mod_p(g0.rem_euclid(p as i64) as u64, p);
                let ord = fp::mult_order(z, p) as usize;
                if !plan.big_f.is_multiple_of(ord) {
                    let nf = plan.big_f.lcm(&ord);
                    plan.realized.push(ExtensionStep::Unramified {
                        degree: nf / plan.big_f,
                        poly: None,
                    });
                    plan.big_f = nf;
                }
                plan.wants_zeta_p = true;
                plan.realized.push(step.clone());
            } else if m % p == 0 {
                return Err(Error::InvalidTower(format!(
                    "cyclotomic order {m} must be p or prime to p"
                )));
            } else {
                let ord = fp::mult_order(p % m, m) as usize;
                if !plan.big_f.is_multiple_of(ord) {
                    let nf = plan.big_f.lcm(&ord);
                    if !plan.base_closed {
                        plan.f = plan.f * nf / plan.big_f;
                    }
                    plan.big_f = nf;
                }
                plan.realized.push(step.clone());
            }
        }
    }
    Ok(())
}

fn build(p: u64, steps: Vec<ExtensionStep>, plan: Plan, precision: i64) -> Result<ExtensionTower> {
    let eis = plan.eis.clone().expect("base closed");
    let ram = eis.len() - 1;
    let m_exp = (precision + ram as i64 - 1) / ram as i64 + 1;
    let modulus = (p as u128).checked_pow(m_exp as u32);
    if modulus.is_none_or(|m| m >= MODULUS_LIMIT as u128) {
        return Err(Error::InvalidTower(format!(
            "precision {precision} needs p^{m_exp}, above the supported modulus 2^50"
        )));
    }
    let hpoly = match &plan.unram_poly {
        Some(h) if h.len() == plan.big_f + 1 => {
            h.iter().map(|c| c.rem_euclid(p as i64) as u64).collect()
        }
        _ => default_irreducible(p, plan.big_f),
    };
    let residue = ResidueField::new(p, hpoly)?;
    let ring = FlatRing::new(p, &eis, residue, m_exp as u32);

    // η = Π^E / p = -Σ (G_j / p) Π^j
    let mut eta = ring.zero();
    for (j, &g) in eis[..ram].iter().enumerate() {
        let c = (-(g / p as i64)).rem_euclid(ring.modulus as i64) as u64;
        eta[j * ring.deg] = c;
    }
    let mut data = TowerData {
        p,
        steps,
        realized: plan.realized,
        precision,
        e: plan.e,
        f: plan.f,
        eis,
        varpi_sign: plan.sign,
        varpi_exp: plan.exp,
        ring,
        eta_pows: Vec::new(),
        eta_inv_pows: Vec::new(),
        zeta_p: None,
        lambda: None,
    };
    let count = m_exp as usize + 2;
    let mut pows = vec![data.ring.one()];
    for c in 1..count {
        let next = data.ring.mul(&pows[c - 1], &eta);
        pows.push(next);
    }
    data.eta_pows = pows;
    // placeholder inverses; filled once unit inversion is available
    data.eta_inv_pows = vec![data.ring.one(); count];
    let provisional = ExtensionTower(Arc::new(data));
    let eta_el = PadicElement::from_unit_vec(&provisional, eta)?;
    let eta_inv = eta_el.inv()?.unit().to_vec();
    drop(eta_el);
    let mut inv_pows = vec![provisional.0.ring.one()];
    for c in 1..count {
        let next = provisional.0.ring.mul(&inv_pows[c - 1], &eta_inv);
        inv_pows.push(next);
    }
    let mut data = Arc::try_unwrap(provisional.0).expect("sole owner");
    data.eta_inv_pows = inv_pows;
    let tower = ExtensionTower(Arc::new(data));

    let lambda = tower.find_lambda()?;
    let zeta = if plan.wants_zeta_p {
        Some(tower.find_zeta_p()?)
    } else {
        None
    };
    let mut data = Arc::try_unwrap(tower.0).expect("sole owner");
    data.lambda = lambda;
    data.zeta_p = zeta;
    Ok(ExtensionTower(Arc::new(data)))
}

impl ExtensionTower {
    pub(crate) fn data(&self) -> &TowerData {
        &self.0
    }

    pub(crate) fn ring(&self) -> &FlatRing {
        &self.0.ring
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }

    /// Ramification index of the base field `O_P` over `Z_p`.
    pub fn e(&self) -> i64 {
        self.0.e
    }

    /// Residue degree of the base field `O_P`.
    pub fn f(&self) -> usize {
        self.0.f
    }

    /// Residue-field size of the base field.
    pub fn q(&self) -> u64 {
        self.0.p.pow(self.0.f as u32)
    }

    /// Total ramification over `Z_p`.
    pub fn ramification(&self) -> i64 {
        self.0.ring.ram as i64
    }

    /// Total residue degree over `F_p`.
    pub fn residue_degree(&self) -> usize {
        self.0.ring.deg
    }

    /// Relative precision cap, in digits of the top uniformizer.
    pub fn precision(&self) -> i64 {
        self.0.precision
    }

    pub fn steps(&self) -> &[ExtensionStep] {
        &self.0.steps
    }

    /// Steps actually realized, including any appended automatically.
    pub fn realized_steps(&self) -> &[ExtensionStep] {
        &self.0.realized
    }

    /// Defining polynomial of the top uniformizer, lowest degree first.
    pub fn eisenstein_poly(&self) -> &[i64] {
        &self.0.eis
    }

    /// `ϖ = sign · Π^exp`.
    pub fn varpi_monomial(&self) -> (i64, i64) {
        (self.0.varpi_sign, self.0.varpi_exp)
    }

    /// `ϖ`-normalized valuation of the top uniformizer.
    pub fn pi_valuation_unit(&self) -> Rational {
        rat(self.0.e, self.ramification())
    }

    /// Top-uniformizer digits corresponding to `k` digits of `ϖ`.
    pub fn digits_for_varpi(&self, k: i64) -> i64 {
        k * self.0.varpi_exp
    }

    pub fn residue_field(&self) -> &ResidueField {
        &self.0.ring.residue
    }

    /// Elements of `κ`, the residue field of the base level, in index order.
    pub fn kappa(&self) -> Vec<Fq> {
        self.residue_field().subfield(self.0.f)
    }

    /// A generator of `κ^*`.
    pub fn kappa_generator(&self) -> Fq {
        let k = self.residue_field();
        let g = k.primitive_element();
        k.pow(&g, ((k.size() - 1) / (self.q() - 1)) as u128)
    }

    pub fn has_zeta_p(&self) -> bool {
        self.0.zeta_p.is_some()
    }

    pub fn has_lambda(&self) -> bool {
        self.0.lambda.is_some()
    }

    /// Label of the coefficient basis used by element encodings.
    pub fn level_basis(&self) -> String {
        format!(
            "t^a*pi^j@j*{}+a;E={};F={}",
            self.residue_degree(),
            self.ramification(),
            self.residue_degree()
        )
    }

    fn find_lambda(&self) -> Result<Option<Raw>> {
        let q1 = self.q() as i64 - 1;
        let (sign, k) = self.varpi_monomial();
        if k % q1 != 0 {
            return Ok(None);
        }
        // c^{q-1} = -sign with c a unit of the unramified level
        let mut coeffs = vec![PadicElement::zero(self); q1 as usize + 1];
        coeffs[0] = PadicElement::from_int(self, sign);
        coeffs[q1 as usize] = PadicElement::one(self);
        let found = crate::analytic::roots_at_valuation(&coeffs, 0)?;
        match found.roots.into_iter().next() {
            None => Ok(None),
            Some(c) => {
                let lam = c.mul(&PadicElement::pi(self).pow(k / q1)?)?;
                Ok(Some(lam.raw()))
            }
        }
    }

    fn find_zeta_p(&self) -> Result<Raw> {
        let p = self.p() as usize;
        // Φ_p(1 + y) = Σ_{j<p} binom(p, j+1) y^j
        let mut coeffs = Vec::with_capacity(p);
        let mut binom: i64 = 1;
        for j in 0..p {
            binom = binom * (p - j) as i64 / (j + 1) as i64;
            coeffs.push(PadicElement::from_int(self, binom));
        }
        let slope = self.ramification() / (p as i64 - 1);
        let found = crate::analytic::roots_at_valuation(&coeffs, slope)?;
        let y = found
            .roots
            .into_iter()
            .next()
            .ok_or(Error::Consistency("no primitive p-th root of unity".into()))?;
        Ok(y.add(&PadicElement::one(self))?.raw())
    }
}
