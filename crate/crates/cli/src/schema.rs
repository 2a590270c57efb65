//! Versioned JSON encodings. Input is decoded from `serde_json::Value` by
//! hand so every schema error carries a JSON pointer.

use serde::Serialize;
use serde_json::{Map, Value};

use varpi_core::spectral::{Normalization, OperatorFamily, TailBound};
use varpi_core::{make_tower, ExtensionStep, ExtensionTower, KummerBase, PadicElement, Rational, Valuation};

use crate::errors::CliError;

pub const SCHEMA: &str = "v1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RationalJson {
    pub num: i64,
    pub den: i64,
}

impl From<Rational> for RationalJson {
    fn from(r: Rational) -> Self {
        RationalJson {
            num: *r.numer(),
            den: *r.denom(),
        }
    }
}

/// `{"num","den"}`, or `{"infinite": true}` for the `+∞` marker.
pub fn valuation_json(v: Valuation) -> Value {
    match v {
        Valuation::Finite(r) => serde_json::to_value(RationalJson::from(r)).expect("plain struct"),
        Valuation::Infinite => serde_json::json!({ "infinite": true }),
    }
}

pub fn rational_json(r: Rational) -> Value {
    serde_json::to_value(RationalJson::from(r)).expect("plain struct")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ElementJson {
    pub digits: Vec<u64>,
    pub shift: i64,
    pub certified: i64,
    pub level_basis: String,
}

impl ElementJson {
    pub fn of(x: &PadicElement) -> Self {
        let (digits, shift, certified) = x.to_digits();
        ElementJson {
            digits,
            shift,
            certified,
            level_basis: x.tower().level_basis(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StepJson {
    Unramified {
        degree: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        poly: Option<Vec<i64>>,
    },
    Eisenstein {
        poly: Vec<i64>,
    },
    Kummer {
        base: String,
        degree: usize,
    },
    Cyclotomic {
        order: u64,
    },
}

impl StepJson {
    pub fn of(step: &ExtensionStep) -> Self {
        match step {
            ExtensionStep::Unramified { degree, poly } => StepJson::Unramified {
                degree: *degree,
                poly: poly.clone(),
            },
            ExtensionStep::Eisenstein { poly } => StepJson::Eisenstein { poly: poly.clone() },
            ExtensionStep::Kummer { base, degree } => StepJson::Kummer {
                base: base.name().to_string(),
                degree: *degree,
            },
            ExtensionStep::Cyclotomic { order } => StepJson::Cyclotomic { order: *order },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TowerJson {
    pub p: u64,
    pub precision: i64,
    pub steps: Vec<StepJson>,
}

impl TowerJson {
    pub fn of(t: &ExtensionTower) -> Self {
        TowerJson {
            p: t.p(),
            precision: t.precision(),
            steps: t.steps().iter().map(StepJson::of).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TailJson {
    pub kind: String,
    pub slope: RationalJson,
    pub offset: RationalJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntryJson {
    pub poly: Vec<ElementJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyJson {
    pub schema: String,
    pub tower: TowerJson,
    pub rank: usize,
    pub tail_bound: Option<TailJson>,
    pub normalization: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_l: Option<u64>,
    pub entries: Vec<Vec<EntryJson>>,
}

impl FamilyJson {
    pub fn of(f: &OperatorFamily) -> Self {
        let m = f.rank();
        let kappa_l = match f.normalization() {
            Normalization::TL { kappa_l } => Some(kappa_l),
            _ => None,
        };
        FamilyJson {
            schema: SCHEMA.into(),
            tower: TowerJson::of(f.tower()),
            rank: m,
            tail_bound: f.tail().map(|t| TailJson {
                kind: "linear".into(),
                slope: t.slope.into(),
                offset: t.offset.into(),
            }),
            normalization: f.normalization().name().into(),
            kappa_l,
            entries: (0..m)
                .map(|i| {
                    (0..m)
                        .map(|j| EntryJson {
                            poly: f.raw_entry(i, j).iter().map(ElementJson::of).collect(),
                        })
                        .collect()
                })
                .collect(),
        }
    }
}

/// Canonical text: pretty-printed with a trailing newline.
pub fn canonical<T: Serialize>(x: &T) -> String {
    let mut s = serde_json::to_string_pretty(x).expect("serializable");
    s.push('\n');
    s
}

fn schema_err(pointer: &str, detail: impl Into<String>) -> CliError {
    CliError::Schema {
        pointer: pointer.to_string(),
        detail: detail.into(),
    }
}

fn obj<'a>(v: &'a Value, ptr: &str) -> Result<&'a Map<String, Value>, CliError> {
    v.as_object().ok_or_else(|| schema_err(ptr, "expected an object"))
}

fn field<'a>(m: &'a Map<String, Value>, key: &str, ptr: &str) -> Result<&'a Value, CliError> {
    m.get(key)
        .ok_or_else(|| schema_err(&format!("{ptr}/{key}"), format!("missing field \"{key}\"")))
}

fn as_i64(v: &Value, ptr: &str) -> Result<i64, CliError> {
    v.as_i64().ok_or_else(|| schema_err(ptr, "expected an integer"))
}

fn as_u64(v: &Value, ptr: &str) -> Result<u64, CliError> {
    v.as_u64().ok_or_else(|| schema_err(ptr, "expected a non-negative integer"))
}

fn as_str<'a>(v: &'a Value, ptr: &str) -> Result<&'a str, CliError> {
    v.as_str().ok_or_else(|| schema_err(ptr, "expected a string"))
}

fn as_array<'a>(v: &'a Value, ptr: &str) -> Result<&'a Vec<Value>, CliError> {
    v.as_array().ok_or_else(|| schema_err(ptr, "expected an array"))
}

fn int_list(v: &Value, ptr: &str) -> Result<Vec<i64>, CliError> {
    as_array(v, ptr)?
        .iter()
        .enumerate()
        .map(|(i, x)| as_i64(x, &format!("{ptr}/{i}")))
        .collect()
}

pub fn decode_rational(v: &Value, ptr: &str) -> Result<Rational, CliError> {
    let m = obj(v, ptr)?;
    let num = as_i64(field(m, "num", ptr)?, &format!("{ptr}/num"))?;
    let den = as_i64(field(m, "den", ptr)?, &format!("{ptr}/den"))?;
    if den <= 0 {
        return Err(schema_err(&format!("{ptr}/den"), "denominator must be positive"));
    }
    Ok(Rational::new(num, den))
}

pub fn decode_step(v: &Value, ptr: &str) -> Result<ExtensionStep, CliError> {
    let m = obj(v, ptr)?;
    let kind = as_str(field(m, "kind", ptr)?, &format!("{ptr}/kind"))?;
    let usize_field = |key: &str| -> Result<usize, CliError> {
        Ok(as_u64(field(m, key, ptr)?, &format!("{ptr}/{key}"))? as usize)
    };
    Ok(match kind {
        "unramified" => ExtensionStep::Unramified {
            degree: usize_field("degree")?,
            poly: match m.get("poly") {
                Some(p) => Some(int_list(p, &format!("{ptr}/poly"))?),
                None => None,
            },
        },
        "eisenstein" => ExtensionStep::Eisenstein {
            poly: int_list(field(m, "poly", ptr)?, &format!("{ptr}/poly"))?,
        },
        "kummer" => {
            let b = as_str(field(m, "base", ptr)?, &format!("{ptr}/base"))?;
            ExtensionStep::Kummer {
                base: KummerBase::parse(b)
                    .ok_or_else(|| schema_err(&format!("{ptr}/base"), format!("unknown base \"{b}\"")))?,
                degree: usize_field("degree")?,
            }
        }
        "cyclotomic" => ExtensionStep::Cyclotomic {
            order: usize_field("order")? as u64,
        },
        other => {
            return Err(schema_err(&format!("{ptr}/kind"), format!("unknown step kind \"{other}\"")))
        }
    })
}

pub fn decode_tower(v: &Value, ptr: &str) -> Result<ExtensionTower, CliError> {
    let m = obj(v, ptr)?;
    let p = as_u64(field(m, "p", ptr)?, &format!("{ptr}/p"))?;
    let precision = as_i64(field(m, "precision", ptr)?, &format!("{ptr}/precision"))?;
    let sp = format!("{ptr}/steps");
    let steps = as_array(field(m, "steps", ptr)?, &sp)?
        .iter()
        .enumerate()
        .map(|(i, s)| decode_step(s, &format!("{sp}/{i}")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(make_tower(p, &steps, precision)?)
}

/// Canonical `{"digits", "shift", "certified", "level_basis"}` or the
/// shorthands `{"int": n}` and `{"varpi": k, "unit": n}`.
pub fn decode_element(t: &ExtensionTower, v: &Value, ptr: &str) -> Result<PadicElement, CliError> {
    let m = obj(v, ptr)?;
    if let Some(n) = m.get("int") {
        return Ok(PadicElement::from_int(t, as_i64(n, &format!("{ptr}/int"))?));
    }
    if let Some(k) = m.get("varpi") {
        let k = as_i64(k, &format!("{ptr}/varpi"))?;
        let unit = match m.get("unit") {
            Some(u) => as_i64(u, &format!("{ptr}/unit"))?,
            None => 1,
        };
        return Ok(PadicElement::varpi(t).pow(k)?.mul_int(unit));
    }
    let dp = format!("{ptr}/digits");
    let digits = as_array(field(m, "digits", ptr)?, &dp)?
        .iter()
        .enumerate()
        .map(|(i, d)| as_u64(d, &format!("{dp}/{i}")))
        .collect::<Result<Vec<_>, _>>()?;
    let shift = as_i64(field(m, "shift", ptr)?, &format!("{ptr}/shift"))?;
    let certified = as_i64(field(m, "certified", ptr)?, &format!("{ptr}/certified"))?;
    let basis = as_str(field(m, "level_basis", ptr)?, &format!("{ptr}/level_basis"))?;
    if basis != t.level_basis() {
        return Err(schema_err(
            &format!("{ptr}/level_basis"),
            format!("expected \"{}\"", t.level_basis()),
        ));
    }
    PadicElement::from_digits(t, &digits, shift, certified)
        .map_err(|e| schema_err(&dp, e.to_string()))
}

pub fn decode_family(v: &Value) -> Result<OperatorFamily, CliError> {
    let m = obj(v, "")?;
    if let Some(s) = m.get("schema") {
        let s = as_str(s, "/schema")?;
        if s != SCHEMA {
            return Err(schema_err("/schema", format!("unsupported schema \"{s}\"")));
        }
    }
    let tower = decode_tower(field(m, "tower", "")?, "/tower")?;
    let rank = as_u64(field(m, "rank", "")?, "/rank")? as usize;
    let tail = match m.get("tail_bound") {
        None | Some(Value::Null) => None,
        Some(tb) => {
            let tm = obj(tb, "/tail_bound")?;
            let kind = as_str(field(tm, "kind", "/tail_bound")?, "/tail_bound/kind")?;
            if kind != "linear" {
                return Err(schema_err("/tail_bound/kind", format!("unknown tail kind \"{kind}\"")));
            }
            let slope = decode_rational(field(tm, "slope", "/tail_bound")?, "/tail_bound/slope")?;
            let offset = match tm.get("offset") {
                Some(o) => decode_rational(o, "/tail_bound/offset")?,
                None => Rational::from_integer(0),
            };
            Some(TailBound { offset, slope })
        }
    };
    let norm = as_str(field(m, "normalization", "")?, "/normalization")?;
    let normalization = match norm {
        "U" => Normalization::U,
        "raw" => Normalization::Raw,
        "T_L" => Normalization::TL {
            kappa_l: as_u64(field(m, "kappa_l", "")?, "/kappa_l")?,
        },
        other => {
            return Err(schema_err("/normalization", format!("unknown normalization \"{other}\"")))
        }
    };
    let rows = as_array(field(m, "entries", "")?, "/entries")?;
    if rows.len() != rank {
        return Err(schema_err("/entries", format!("expected {rank} rows")));
    }
    let mut raw = Vec::with_capacity(rank);
    for (i, row) in rows.iter().enumerate() {
        let rp = format!("/entries/{i}");
        let cells = as_array(row, &rp)?;
        if cells.len() != rank {
            return Err(schema_err(&rp, format!("expected {rank} entries")));
        }
        let mut out_row = Vec::with_capacity(rank);
        for (j, cell) in cells.iter().enumerate() {
            let cp = format!("{rp}/{j}");
            let cm = obj(cell, &cp)?;
            let pp = format!("{cp}/poly");
            let poly = as_array(field(cm, "poly", &cp)?, &pp)?
                .iter()
                .enumerate()
                .map(|(k, e)| decode_element(&tower, e, &format!("{pp}/{k}")))
                .collect::<Result<Vec<_>, _>>()?;
            out_row.push(poly);
        }
        raw.push(out_row);
    }
    Ok(OperatorFamily::new(&tower, raw, normalization, tail)?)
}

pub fn parse_json(text: &str) -> Result<Value, CliError> {
    serde_json::from_str(text).map_err(|e| schema_err("", format!("malformed JSON: {e}")))
}
