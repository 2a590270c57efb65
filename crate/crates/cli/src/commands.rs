use std::path::Path;

use serde_json::{json, Value};

use varpi_core::canonical::{classify, hodge_tate_report, CanonicalGroupModel, DlogReport, MultiplicationSeries};
use varpi_core::gauss::{digit_sum, GaussSumTable};
use varpi_core::spectral::{
    deform_eigenform, eigencurve_points, fredholm_series, riesz_dimension, OperatorFamily, SlopeSet,
    SpectralReport,
};
use varpi_core::valuation::int;
use varpi_core::weight::{
    disk_threshold, higher_canonical_bound, is_r_accessible, max_growth_w, minimal_accessible_r, Character,
};
use varpi_core::{
    make_tower, Error as CoreError, ExtensionStep, ExtensionTower, Ground, KummerBase, PadicElement, Rational,
    Valuation,
};

use crate::errors::CliError;
use crate::schema::{
    canonical, decode_element, decode_family, decode_tower, parse_json, rational_json, valuation_json,
    ElementJson, FamilyJson, TowerJson, SCHEMA,
};

pub type Outcome = Result<Value, CliError>;

fn element(x: &PadicElement) -> Value {
    serde_json::to_value(ElementJson::of(x)).expect("plain struct")
}

fn valued(x: &PadicElement) -> Value {
    json!({ "valuation": valuation_json(x.val()), "element": element(x) })
}

fn header(command: &str) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("schema".into(), json!(SCHEMA));
    m.insert("command".into(), json!(command));
    m
}

fn ground_json(g: Ground) -> Value {
    json!({ "p": g.p, "e": g.e, "f": g.f, "q": g.q() })
}

fn eisenstein(g: Ground) -> ExtensionStep {
    let mut poly = vec![0i64; g.e as usize + 1];
    poly[0] = -(g.p as i64);
    poly[g.e as usize] = 1;
    ExtensionStep::Eisenstein { poly }
}

fn ground_steps(g: Ground) -> Vec<ExtensionStep> {
    let mut steps = Vec::new();
    if g.f > 1 {
        steps.push(ExtensionStep::Unramified { degree: g.f, poly: None });
    }
    steps.push(eisenstein(g));
    steps
}

/// Tower carrying `digits` certified digits of `ϖ`.
fn scaled_tower(p: u64, steps: &[ExtensionStep], digits: i64) -> Result<ExtensionTower, CliError> {
    if digits < 1 {
        return Err(CliError::Usage("precision must be positive".into()));
    }
    let probe = make_tower(p, steps, 1)?;
    let per_varpi = probe.digits_for_varpi(1);
    Ok(make_tower(p, steps, digits * per_varpi)?)
}

pub fn dlog_json(r: &DlogReport) -> Value {
    json!({
        "w": rational_json(r.w),
        "v": rational_json(r.v),
        "canonical_valuation": rational_json(r.canonical_valuation),
        "noncanonical_valuation": rational_json(r.noncanonical_valuation),
        "cokernel_witness_valuation": rational_json(r.cokernel_witness_valuation),
        "dual_w": rational_json(r.dual_w),
        "exact": r.exact,
        "annihilator_exponent": rational_json(r.annihilator_exponent),
    })
}

fn dlog_if_defined(w: Rational, q: u64) -> Value {
    match hodge_tate_report(w, q) {
        Ok(r) => dlog_json(&r),
        Err(_) => Value::Null,
    }
}

pub fn constants(g: Ground, digits: i64) -> Outcome {
    let mut steps = ground_steps(g);
    steps.push(ExtensionStep::Cyclotomic { order: g.p });
    let tower = scaled_tower(g.p, &steps, digits)?;
    let table = GaussSumTable::new(&tower)?;
    let q = g.q();
    let one = PadicElement::one(&tower);
    let gauss = (1..q)
        .map(|i| {
            let s = digit_sum(i, g.p, g.f)?;
            let x = table.get(i)?;
            Ok(json!({
                "i": i,
                "digit_sum": s,
                "valuation": valuation_json(x.val()),
                "predicted": rational_json(int(s as i64) * g.e_over_p1()),
                "element": element(x),
            }))
        })
        .collect::<Result<Vec<_>, CoreError>>()?;
    let mut raynaud = Vec::new();
    let mut pk = 1u64;
    for _ in 0..g.f {
        let w = table.raynaud_w(pk)?;
        raynaud.push(json!({
            "i": pk,
            "is_one": w.agrees(&one),
            "valuation": valuation_json(w.val()),
            "element": element(&w),
        }));
        pk *= g.p;
    }
    let mut out = header("constants");
    out.insert("ground".into(), ground_json(g));
    out.insert("tower".into(), serde_json::to_value(TowerJson::of(&tower)).expect("plain struct"));
    out.insert("gauss_sums".into(), json!(gauss));
    out.insert("raynaud".into(), json!(raynaud));
    out.insert("raynaud_total".into(), valued(&table.raynaud_w_total()?));
    out.insert("raynaud_unit".into(), valued(&table.raynaud_u()?));
    Ok(Value::Object(out))
}

pub fn polygon(g: Ground, w: Rational, digits: i64) -> Outcome {
    let den = *w.denom();
    let mut steps = ground_steps(g);
    if den > 1 {
        steps.push(ExtensionStep::Kummer {
            base: KummerBase::Pi,
            degree: den as usize,
        });
    }
    let tower = scaled_tower(g.p, &steps, digits)?;
    if w < Rational::from_integer(0) {
        return Err(CoreError::BoundViolated {
            bound: "w >= 0".into(),
            value: w,
        }
        .into());
    }
    let a = PadicElement::pi(&tower).pow(*w.numer())?;
    let c = classify(&MultiplicationSeries::lubin_tate(&tower, a))?;
    let mut out = header("polygon");
    out.insert("ground".into(), ground_json(g));
    out.insert("w".into(), rational_json(w));
    out.insert(
        "reduction".into(),
        json!(match c.kind {
            varpi_core::canonical::Reduction::Ordinary => "ordinary",
            varpi_core::canonical::Reduction::Supersingular => "supersingular",
        }),
    );
    let pairs = |v: Vec<(Rational, i64)>, key: &str| -> Vec<Value> {
        v.into_iter()
            .map(|(s, m)| json!({ key: rational_json(s), "multiplicity": m }))
            .collect()
    };
    out.insert("slopes".into(), json!(pairs(c.polygon.slopes(), "slope")));
    out.insert("root_valuations".into(), json!(pairs(c.root_valuations, "valuation")));
    out.insert("dlog".into(), dlog_if_defined(w, g.q()));
    Ok(Value::Object(out))
}

pub fn canonical_group(g: Ground, w: Rational, digits: i64, unit: i64) -> Outcome {
    let model = CanonicalGroupModel::with_unit(g, w, digits, unit)?;
    let coeffs = model.comultiplication_coefficients()?;
    let table: Vec<Value> = coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            json!({
                "index": i + 1,
                "valuation": valuation_json(c.val()),
                "element": element(c),
            })
        })
        .collect();
    let hopf = model.verify_hopf()?;
    let gamma = model.gamma_report()?;
    let mut out = header("canonical");
    out.insert("ground".into(), ground_json(g));
    out.insert("w".into(), rational_json(w));
    out.insert("tower".into(), serde_json::to_value(TowerJson::of(&model.tower)).expect("plain struct"));
    out.insert("dlog".into(), dlog_if_defined(w, g.q()));
    out.insert("hasse".into(), valued(&model.hasse));
    out.insert("hasse_root".into(), valued(&model.hasse_root));
    out.insert("relation_coefficient".into(), valued(&model.b));
    out.insert("comultiplication".into(), json!(table));
    out.insert(
        "hopf".into(),
        json!({
            "counit": hopf.counit,
            "coassociative": hopf.coassociative,
            "points_add": hopf.points_add,
            "eta_group_like": hopf.eta_group_like,
            "eta_order_p": hopf.eta_order_p,
            "eta_is_additive_character": hopf.eta_is_additive_character,
            "differential_normalized": hopf.differential_normalized,
            "differential_inverse": hopf.differential_inverse,
            "differential_mod_b": hopf.differential_mod_b,
            "differential_invariant": hopf.differential_invariant,
            "certified_digits": rational_json(hopf.certified_digits),
            "all": hopf.all(),
        }),
    );
    out.insert(
        "gamma".into(),
        json!({
            "beta_valuations": gamma
                .beta_valuations
                .iter()
                .enumerate()
                .map(|(k, (m, p))| json!({ "k": k, "measured": valuation_json(*m), "predicted": rational_json(*p) }))
                .collect::<Vec<_>>(),
            "min_eta_coefficient_valuation": valuation_json(gamma.min_eta_coefficient_valuation),
            "integral": gamma.integral,
        }),
    );
    Ok(Value::Object(out))
}

/// Character file: `{"schema", "tower", "character": {"s", "i", "r"}}`.
pub fn load_character(path: &Path) -> Result<Character, CliError> {
    let v = parse_json(&std::fs::read_to_string(path)?)?;
    let m = v
        .as_object()
        .ok_or_else(|| CliError::Schema { pointer: String::new(), detail: "expected an object".into() })?;
    let missing = |k: &str| CliError::Schema { pointer: format!("/{k}"), detail: format!("missing field \"{k}\"") };
    let tower = decode_tower(m.get("tower").ok_or_else(|| missing("tower"))?, "/tower")?;
    let c = m.get("character").ok_or_else(|| missing("character"))?;
    let field = |k: &str| {
        c.get(k).ok_or_else(|| CliError::Schema {
            pointer: format!("/character/{k}"),
            detail: format!("missing field \"{k}\""),
        })
    };
    let s = decode_element(&tower, field("s")?, "/character/s")?;
    let int_field = |k: &str| {
        field(k)?.as_i64().ok_or_else(|| CliError::Schema {
            pointer: format!("/character/{k}"),
            detail: "expected an integer".into(),
        })
    };
    let i = int_field("i")?;
    let r = int_field("r")?;
    if r < 1 {
        return Err(CliError::Schema { pointer: "/character/r".into(), detail: "r must be positive".into() });
    }
    Ok(Character::new(s, i, r as u32))
}

pub fn weights(g: Ground, val_s: Valuation, r: u32, w: Option<Rational>, component: Option<u64>) -> Outcome {
    let disk = disk_threshold(r, g)?;
    let accessible = is_r_accessible(val_s, r, g);
    let (max_w, inclusive) = max_growth_w(val_s, r, g)?;
    if let Some(w) = w {
        let ok = w >= Rational::from_integer(0) && if inclusive { w <= max_w } else { w < max_w };
        if !ok {
            let rel = if inclusive { "<=" } else { "<" };
            return Err(CoreError::BoundViolated {
                bound: format!("0 <= w {rel} {max_w} (growth allowed by the character)"),
                value: w,
            }
            .into());
        }
    }
    let mut out = header("weights");
    out.insert("ground".into(), ground_json(g));
    out.insert("s_valuation".into(), valuation_json(val_s));
    out.insert("r".into(), json!(r));
    if let Some(i) = component {
        out.insert("component".into(), json!(i));
    }
    out.insert("accessible".into(), json!(accessible));
    out.insert("minimal_r".into(), json!(minimal_accessible_r(val_s, g)));
    out.insert(
        "disk".into(),
        json!({ "r": disk.r, "threshold": rational_json(disk.m_r), "strict": disk.strict }),
    );
    out.insert("max_w".into(), json!({ "value": rational_json(max_w), "inclusive": inclusive }));
    out.insert("higher_canonical_bound".into(), rational_json(higher_canonical_bound(r, g.q())));
    if let Some(w) = w {
        out.insert("w".into(), rational_json(w));
    }
    Ok(Value::Object(out))
}

pub fn load_family(path: &Path) -> Result<OperatorFamily, CliError> {
    decode_family(&parse_json(&std::fs::read_to_string(path)?)?)
}

fn slopes_json(s: &SlopeSet) -> Value {
    json!({
        "slopes": s
            .slopes
            .iter()
            .map(|(v, m)| json!({ "slope": rational_json(*v), "multiplicity": m }))
            .collect::<Vec<_>>(),
        "horizon": valuation_json(s.horizon),
    })
}

fn resolve_degree(family: &OperatorFamily, degree: Option<usize>) -> usize {
    degree.unwrap_or(family.rank())
}

pub fn charpoly(family: &OperatorFamily, sigma: i64, degree: Option<usize>, nu: Option<Rational>) -> Outcome {
    let tower = family.tower();
    let s = PadicElement::from_int(tower, sigma);
    let degree = resolve_degree(family, degree);
    let series = fredholm_series(family, &s, degree)?;
    let slopes = series.slopes();
    let coeffs: Vec<Value> = series
        .coeffs
        .iter()
        .zip(&series.tail_error)
        .enumerate()
        .map(|(k, (c, e))| {
            json!({
                "k": k,
                "valuation": valuation_json(c.val()),
                "tail_error": valuation_json(*e),
                "element": element(c),
            })
        })
        .collect();
    let beyond: Vec<Value> = series
        .beyond
        .iter()
        .map(|(k, b)| json!({ "k": k, "bound": valuation_json(*b) }))
        .collect();
    let mut out = header("charpoly");
    out.insert("rank".into(), json!(family.rank()));
    out.insert("degree".into(), json!(degree));
    out.insert("sigma".into(), element(&s));
    out.insert("coefficients".into(), json!(coeffs));
    out.insert("beyond".into(), json!(beyond));
    out.insert("slopes".into(), slopes_json(&slopes));
    if let Some(nu) = nu {
        out.insert("nu".into(), rational_json(nu));
        out.insert("riesz_dimension".into(), json!(riesz_dimension(&slopes, nu)?));
    }
    Ok(Value::Object(out))
}

/// Integer grid `start + step·j`, `j = 0..count`.
#[derive(Debug, Clone, Copy)]
pub struct Grid {
    pub start: i64,
    pub step: i64,
    pub count: usize,
}

impl Grid {
    pub fn labels(&self) -> Vec<i64> {
        (0..self.count as i64).map(|j| self.start + self.step * j).collect()
    }
}

pub struct EigencurveRun {
    pub labels: Vec<i64>,
    pub report: SpectralReport,
    pub branch: Option<Value>,
}

pub fn eigencurve(
    family: &OperatorFamily,
    r: u32,
    grid: Grid,
    degree: Option<usize>,
    nu: Rational,
    deform_nu: Option<Rational>,
) -> Result<EigencurveRun, CliError> {
    let tower = family.tower();
    let disk = disk_threshold(r, Ground::of(tower))?;
    let labels = grid.labels();
    if labels.is_empty() {
        return Err(CliError::Usage("grid must contain at least one point".into()));
    }
    let sigmas: Vec<PadicElement> = labels.iter().map(|&l| PadicElement::from_int(tower, l)).collect();
    let report = eigencurve_points(family, &disk, &sigmas, resolve_degree(family, degree), nu)?;
    let branch = match deform_nu {
        None => None,
        Some(dn) => {
            let separated = report
                .points
                .iter()
                .filter(|p| p.sigma_index == 0 && p.slope <= dn)
                .min_by(|a, b| a.slope.cmp(&b.slope))
                .map(|p| p.lambda.clone());
            // an unseparated cluster still seeds the branch so the collision is reported
            let lambda0 = match separated {
                Some(l) => l,
                None => {
                    let slope = report
                        .failures
                        .iter()
                        .filter(|f| f.sigma_index == 0)
                        .filter_map(|f| f.slope)
                        .filter(|s| *s <= dn)
                        .min()
                        .ok_or_else(|| {
                            CliError::Usage(format!("no eigenvalue of slope <= {dn} at the first grid point"))
                        })?;
                    let k = slope / tower.pi_valuation_unit();
                    if !k.is_integer() {
                        return Err(CliError::Usage(format!("cluster slope {slope} is not a power of the uniformizer")));
                    }
                    PadicElement::pi(tower).pow(k.to_integer())?
                }
            };
            let b = deform_eigenform(family, &sigmas[0], &lambda0, dn, &sigmas[1..])?;
            Some(json!({
                "nu": rational_json(dn),
                "points": b
                    .points
                    .iter()
                    .zip(&labels)
                    .map(|((s, l, slope), label)| json!({
                        "sigma_label": label,
                        "sigma": element(s),
                        "slope": rational_json(*slope),
                        "lambda": valued(l),
                    }))
                    .collect::<Vec<_>>(),
                "collision": b.collision.map(|c| json!({
                    "sigma_label": labels.get(c.path_index),
                    "slope": rational_json(c.slope),
                    "multiplicity": c.multiplicity,
                })),
            }))
        }
    };
    Ok(EigencurveRun { labels, report, branch })
}

impl EigencurveRun {
    /// Point indices ordered by `(σ label, slope)`; ties keep the core order.
    fn order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.report.points.len()).collect();
        idx.sort_by_key(|&i| {
            let p = &self.report.points[i];
            (self.labels[p.sigma_index], p.slope)
        });
        idx
    }

    pub fn to_json(&self) -> Value {
        let rep = &self.report;
        let points: Vec<Value> = self
            .order()
            .into_iter()
            .map(|i| {
                let p = &rep.points[i];
                json!({
                    "sigma_label": self.labels[p.sigma_index],
                    "sigma": element(&p.sigma),
                    "slope": rational_json(p.slope),
                    "t": element(&p.t),
                    "lambda": valued(&p.lambda),
                    "margin": rational_json(p.margin),
                })
            })
            .collect();
        let failures: Vec<Value> = rep
            .failures
            .iter()
            .map(|f| {
                json!({
                    "sigma_label": self.labels[f.sigma_index],
                    "slope": f.slope.map(rational_json),
                    "reason": f.reason,
                })
            })
            .collect();
        let slopes: Vec<Value> = rep
            .slopes
            .iter()
            .map(|(i, s)| json!({ "sigma_label": self.labels[*i], "slopes": slopes_json(s) }))
            .collect();
        let mut out = header("eigencurve");
        out.insert("points".into(), json!(points));
        out.insert("failures".into(), json!(failures));
        out.insert("slopes".into(), json!(slopes));
        out.insert("min_margin".into(), rational_json(rep.min_margin));
        out.insert("margins_ok".into(), json!(rep.margins_ok()));
        if let Some(b) = &self.branch {
            out.insert("branch".into(), b.clone());
        }
        Value::Object(out)
    }

    /// `sigma,slope,eigenvalue_valuation,margin` rows sorted by `(σ, slope)`.
    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Io(std::io::Error::other(e));
        w.write_record(["sigma", "slope", "eigenvalue_valuation", "margin"]).map_err(io)?;
        for i in self.order() {
            let p = &self.report.points[i];
            w.write_record([
                self.labels[p.sigma_index].to_string(),
                p.slope.to_string(),
                p.lambda.val().to_string(),
                p.margin.to_string(),
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(std::io::Error::other(e.to_string())))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

pub fn family_canonical(family: &OperatorFamily) -> String {
    canonical(&FamilyJson::of(family))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ToyKind {
    Restriction,
    Dense,
}

pub fn toy_family(g: Ground, digits: i64, rank: usize, w: Rational, kind: ToyKind) -> Result<OperatorFamily, CliError> {
    let tower = scaled_tower(g.p, &ground_steps(g), digits)?;
    Ok(match kind {
        ToyKind::Restriction => OperatorFamily::toy_restriction(&tower, rank, w)?,
        ToyKind::Dense => OperatorFamily::toy_dense(&tower, rank, w)?,
    })
}
