//! Readers for the JSON input formats.
//!
//! Numbers may be written as `"p/q"` strings, decimal strings or JSON numbers; JSON
//! numbers are read through their decimal text, so `0.1` is exactly `1/10`.

use num::{BigInt, Zero};
use serde_json::{json, Map, Value};

use crate::dyadic::{DyadicMeasure, DyadicStep};
use crate::error::{Error, Result};
use crate::martingale::{AdaptedSequence, Filtration};
use crate::measure::{AtomSpace, Partition, SignedMeasure};
use crate::norms::{NormDescriptor, ValueKind};
use crate::paths::{Interp, Polyline};
use crate::scalar::{parse_rational, ComplexQ, Exponent, Q};
use crate::sums::{FiniteFamily, Generator, IndexedFamily, StreamedFamily};

fn bad(what: &str) -> Error {
    Error::Parse(what.to_string())
}

pub fn parse(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("malformed JSON: {e}")))
}

fn field<'a>(obj: &'a Value, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| bad(&format!("missing field {key:?}")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| bad(&format!("{what} must be an array")))
}

fn index(v: &Value, what: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| bad(&format!("{what} must be a nonnegative integer")))
}

/// `"p/q"`, `"p/2^l"`, a decimal string or a JSON number.
pub fn rational(v: &Value) -> Result<Q> {
    match v {
        Value::String(s) => match s.split_once("/2^") {
            Some((n, l)) => {
                let n: BigInt = n.trim().parse().map_err(|_| bad(&format!("bad numerator in {s:?}")))?;
                let l: usize = l.trim().parse().map_err(|_| bad(&format!("bad level in {s:?}")))?;
                Ok(Q::new(n, num::pow(BigInt::from(2), l)))
            }
            None => parse_rational(s),
        },
        Value::Number(n) => parse_rational(&n.to_string()),
        _ => Err(bad(&format!("expected a number, found {v}"))),
    }
}

pub fn rationals(v: &Value) -> Result<Vec<Q>> {
    array(v, "a number list")?.iter().map(rational).collect()
}

fn vectors(v: &Value) -> Result<Vec<Vec<Q>>> {
    array(v, "a vector list")?.iter().map(rationals).collect()
}

/// `"l1"`, `"l3/2"`, `"linf"` or `{kind: "lp"|"weighted"|"table", p, weights, vertices}`.
pub fn norm(v: &Value) -> Result<NormDescriptor> {
    match v {
        Value::String(s) => NormDescriptor::parse(s),
        Value::Object(_) => {
            let kind = v.get("kind").and_then(Value::as_str).unwrap_or("lp");
            let p = || -> Result<Exponent> {
                match field(v, "p")? {
                    Value::String(s) => Exponent::parse(s),
                    other => Exponent::finite(rational(other)?),
                }
            };
            match kind {
                "lp" => NormDescriptor::lp(p()?),
                "weighted" => NormDescriptor::weighted(p()?, rationals(field(v, "weights")?)?),
                "table" => {
                    let vertices = vectors(field(v, "vertices")?)?
                        .into_iter()
                        .map(|xy| match <[Q; 2]>::try_from(xy) {
                            Ok(pair) => Ok(pair),
                            Err(_) => Err(bad("table vertices must be pairs")),
                        })
                        .collect::<Result<_>>()?;
                    NormDescriptor::table(vertices)
                }
                other => Err(bad(&format!("unknown norm kind {other:?}"))),
            }
        }
        _ => Err(bad("a norm is a string or an object")),
    }
}

pub fn norm_to_json(n: &NormDescriptor) -> Value {
    match n {
        NormDescriptor::Lp(_) => Value::String(n.name()),
        NormDescriptor::WeightedLp { p, weights } => json!({
            "kind": "weighted",
            "p": p.to_string(),
            "weights": weights.iter().map(Q::to_string).collect::<Vec<_>>(),
        }),
        NormDescriptor::Table { vertices } => json!({
            "kind": "table",
            "vertices": vertices
                .iter()
                .map(|[x, y]| vec![x.to_string(), y.to_string()])
                .collect::<Vec<_>>(),
        }),
    }
}

fn optional_norm(obj: &Value) -> Result<Option<NormDescriptor>> {
    obj.get("norm").map(norm).transpose()
}

fn kind_of(obj: &Value) -> Result<Option<ValueKind>> {
    match obj.get("kind").and_then(Value::as_str) {
        None => Ok(None),
        Some("real") => Ok(Some(ValueKind::Real)),
        Some("complex") => Ok(Some(ValueKind::Complex)),
        Some("vector") => Ok(Some(ValueKind::Vector)),
        Some(other) => Err(bad(&format!("unknown value kind {other:?}"))),
    }
}

/// Values as `ℚ^d` rows: scalars are reals, arrays are complex pairs when `kind` says
/// so or when no norm is given and every array has two entries, vectors otherwise.
fn typed_values(items: &[Value], kind: Option<ValueKind>, norm: Option<NormDescriptor>) -> Result<(ValueKind, NormDescriptor, Vec<Vec<Q>>)> {
    let scalars = items.iter().all(|v| !v.is_array());
    if scalars {
        if matches!(kind, Some(ValueKind::Complex)) {
            return Err(bad("complex values are [re, im] pairs"));
        }
        let rows = items.iter().map(|v| Ok(vec![rational(v)?])).collect::<Result<_>>()?;
        return Ok((ValueKind::Real, NormDescriptor::l1(), rows));
    }
    let rows = items.iter().map(rationals).collect::<Result<Vec<_>>>()?;
    let pairs = rows.iter().all(|r| r.len() == 2);
    let kind = kind.unwrap_or(if pairs && norm.is_none() { ValueKind::Complex } else { ValueKind::Vector });
    match kind {
        ValueKind::Complex if !pairs => Err(bad("complex values are [re, im] pairs")),
        ValueKind::Complex => Ok((kind, NormDescriptor::l2(), rows)),
        ValueKind::Real => Err(bad("real values are plain numbers")),
        ValueKind::Vector => Ok((kind, norm.unwrap_or_else(NormDescriptor::l2), rows)),
    }
}

fn complex_rows(rows: Vec<Vec<Q>>) -> Vec<ComplexQ> {
    rows.into_iter()
        .map(|mut r| {
            let im = r.pop().unwrap_or_else(Q::zero);
            let re = r.pop().unwrap_or_else(Q::zero);
            ComplexQ::new(re, im)
        })
        .collect()
}

/// `{atoms: [labels] | n, weights, norm?, kind?}`.
pub fn measure(v: &Value) -> Result<(AtomSpace, SignedMeasure)> {
    let weights = array(field(v, "weights")?, "weights")?;
    let space = match v.get("atoms") {
        None => AtomSpace::indexed(weights.len())?,
        Some(Value::Number(n)) => AtomSpace::indexed(index(&Value::Number(n.clone()), "atoms")?)?,
        Some(labels) => AtomSpace::new(
            array(labels, "atoms")?
                .iter()
                .map(|l| match l {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                })
                .collect(),
            v.get("base").map(rationals).transpose()?,
        )?,
    };
    if space.len() != weights.len() {
        return Err(Error::LengthMismatch {
            left: weights.len(),
            right: space.len(),
        });
    }
    let (kind, norm, rows) = typed_values(weights, kind_of(v)?, optional_norm(v)?)?;
    let mu = match kind {
        ValueKind::Real => SignedMeasure::real(rows.into_iter().map(|mut r| r.remove(0)).collect()),
        ValueKind::Complex => SignedMeasure::complex(complex_rows(rows)),
        ValueKind::Vector => SignedMeasure::vector(rows, norm)?,
    };
    Ok((space, mu))
}

/// `[[atom indices], …]`.
pub fn partition(v: &Value, atoms: usize) -> Result<Partition> {
    let cells = array(v, "a partition")?
        .iter()
        .map(|c| array(c, "a cell")?.iter().map(|i| index(i, "an atom index")).collect())
        .collect::<Result<_>>()?;
    Partition::new(atoms, cells)
}

/// Index sets given as 1-based arrays.
pub fn index_set(v: &Value) -> Result<Vec<usize>> {
    array(v, "an index set")?.iter().map(|i| index(i, "an index")).collect()
}

/// `{kind?, terms, norm?}` or `{generator, params, horizon}`.
pub fn family(v: &Value) -> Result<IndexedFamily> {
    if let Some(name) = v.get("generator") {
        let name = name.as_str().ok_or_else(|| bad("generator must be a string"))?;
        let empty = Value::Object(Map::new());
        let params = v.get("params").unwrap_or(&empty);
        let horizon = index(field(v, "horizon")?, "horizon")?;
        return Ok(IndexedFamily::Streamed(StreamedFamily::new(generator(name, params)?, horizon)?));
    }
    let terms = array(field(v, "terms")?, "terms")?;
    let (kind, norm, rows) = typed_values(terms, kind_of(v)?, optional_norm(v)?)?;
    let f = match kind {
        ValueKind::Real => FiniteFamily::real(rows.into_iter().map(|mut r| r.remove(0)).collect()),
        ValueKind::Complex => FiniteFamily::complex(complex_rows(rows)),
        ValueKind::Vector => FiniteFamily::vectors(rows, norm)?,
    };
    Ok(IndexedFamily::Finite(f))
}

/// Named generators: `geometric {ratio, scale}`, `alternating-harmonic`, `harmonic`,
/// `power {s}`, `zero {dim}`, `vector-geometric {ratio, dim, p}`, `harmonic-basis`.
pub fn generator(name: &str, params: &Value) -> Result<Generator> {
    let q_or = |key: &str, default: i64| -> Result<Q> {
        params.get(key).map_or(Ok(Q::from_integer(default.into())), rational)
    };
    let usize_or = |key: &str, default: usize| -> Result<usize> {
        params.get(key).map_or(Ok(default), |x| index(x, key))
    };
    Ok(match name {
        "geometric" => Generator::Geometric {
            ratio: params.get("ratio").map_or_else(|| Err(bad("geometric needs a ratio")), rational)?,
            scale: q_or("scale", 1)?,
        },
        "alternating-harmonic" => Generator::AlternatingHarmonic,
        "harmonic" => Generator::Harmonic,
        "power" => Generator::Power {
            s: usize_or("s", 2)? as u32,
        },
        "zero" => Generator::Zero { dim: usize_or("dim", 1)? },
        "vector-geometric" => Generator::VectorGeometric {
            ratio: params.get("ratio").map_or_else(|| Err(bad("vector-geometric needs a ratio")), rational)?,
            dim: usize_or("dim", 2)?,
            p: match params.get("p") {
                None => Exponent::int(2),
                Some(Value::String(s)) => Exponent::parse(s)?,
                Some(other) => Exponent::finite(rational(other)?)?,
            },
        },
        "harmonic-basis" => Generator::HarmonicBasis,
        other => return Err(bad(&format!("unknown generator {other:?}"))),
    })
}

/// `{level, values}`.
pub fn dyadic_step(v: &Value) -> Result<DyadicStep> {
    let level = index(field(v, "level")?, "level")? as u32;
    DyadicStep::new(level, rationals(field(v, "values")?)?)
}

/// `{density?, atoms?: [{loc, mass}]}`; a missing density is zero.
pub fn dyadic_measure(v: &Value) -> Result<DyadicMeasure> {
    let density = match v.get("density") {
        None | Some(Value::Null) => DyadicStep::constant(Q::zero()),
        Some(d) => dyadic_step(d)?,
    };
    let atoms = match v.get("atoms") {
        None => Vec::new(),
        Some(list) => array(list, "atoms")?
            .iter()
            .map(|a| Ok((rational(field(a, "loc")?)?, rational(field(a, "mass")?)?)))
            .collect::<Result<_>>()?,
    };
    DyadicMeasure::new(density, atoms)
}

/// `{atoms, weights?, stages}`; `atoms` is a count or a label list and weights default
/// to uniform.
pub fn filtration(v: &Value) -> Result<Filtration> {
    let n = match field(v, "atoms")? {
        Value::Array(labels) => labels.len(),
        other => index(other, "atoms")?,
    };
    let weights = match v.get("weights") {
        Some(w) => rationals(w)?,
        None if n > 0 => vec![Q::new(1.into(), BigInt::from(n)); n],
        None => return Err(bad("a filtration needs atoms")),
    };
    let stages = array(field(v, "stages")?, "stages")?
        .iter()
        .map(|s| partition(s, n))
        .collect::<Result<_>>()?;
    Filtration::new(weights, stages)
}

/// A filtration object with `values`: one list per stage, given per atom or per cell
/// of that stage.
pub fn adapted_sequence(v: &Value) -> Result<AdaptedSequence> {
    let filt = filtration(v)?;
    let stages = array(field(v, "values")?, "values")?;
    let kind = kind_of(v)?;
    let declared = optional_norm(v)?;
    let mut rows_by_stage = Vec::with_capacity(stages.len());
    let mut seen: Option<(ValueKind, NormDescriptor)> = None;
    for s in stages {
        let (k, n, rows) = typed_values(array(s, "stage values")?, kind, declared.clone())?;
        if let Some((k0, _)) = &seen {
            if *k0 != k {
                return Err(bad("stages mix value kinds"));
            }
        }
        seen = Some((k, n));
        rows_by_stage.push(rows);
    }
    let (kind, norm) = seen.ok_or_else(|| bad("values must list at least one stage"))?;
    let per_atom = rows_by_stage.iter().all(|r| r.len() == filt.atoms());
    if per_atom {
        AdaptedSequence::new(filt, kind, norm, rows_by_stage)
    } else {
        AdaptedSequence::from_cells(filt, kind, norm, rows_by_stage)
    }
}

/// `{knots, points, interp?, norm?}`; points are numbers or vectors.
pub fn polyline(v: &Value) -> Result<(Polyline, NormDescriptor)> {
    let knots = rationals(field(v, "knots")?)?;
    let points = array(field(v, "points")?, "points")?
        .iter()
        .map(|p| if p.is_array() { rationals(p) } else { Ok(vec![rational(p)?]) })
        .collect::<Result<Vec<_>>>()?;
    let interp = match v.get("interp") {
        None => Interp::Linear,
        Some(s) => Interp::parse(s.as_str().ok_or_else(|| bad("interp must be a string"))?)?,
    };
    let norm = optional_norm(v)?.unwrap_or_else(NormDescriptor::l1);
    Ok((Polyline::new(knots, points, interp)?, norm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qi};

    #[test]
    fn numbers() {
        assert_eq!(rational(&json!("3/2^4")).unwrap(), q(3, 16));
        assert_eq!(rational(&json!(0.1)).unwrap(), q(1, 10));
        assert_eq!(rational(&json!("-2/6")).unwrap(), q(-1, 3));
        assert!(rational(&json!(true)).is_err());
        assert!(parse("{").is_err());
    }

    #[test]
    fn measures() {
        let (s, mu) = measure(&json!({"atoms": ["a", "b"], "weights": ["1/2", "-1"]})).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(mu.kind(), ValueKind::Real);
        let (_, mu) = measure(&json!({"atoms": 2, "weights": [["1", "0"], ["0", "1"]]})).unwrap();
        assert_eq!(mu.kind(), ValueKind::Complex);
        let (_, mu) = measure(&json!({"atoms": 2, "weights": [["1", "0"], ["0", "1"]], "norm": "linf"})).unwrap();
        assert_eq!(mu.kind(), ValueKind::Vector);
        assert!(measure(&json!({"atoms": 3, "weights": ["1"]})).is_err());
    }

    #[test]
    fn families() {
        let f = family(&json!({"terms": [1, -2, "1/3"]})).unwrap();
        assert_eq!(f.horizon(), 3);
        let g = family(&json!({"generator": "geometric", "params": {"ratio": "1/2"}, "horizon": 10})).unwrap();
        assert_eq!(g.horizon(), 10);
        assert!(family(&json!({"generator": "nope", "horizon": 1})).is_err());
    }

    #[test]
    fn sequences() {
        let v = json!({
            "atoms": 4,
            "stages": [[[0, 1, 2, 3]], [[0, 1], [2, 3]]],
            "values": [["1"], ["0", "2"]]
        });
        let s = adapted_sequence(&v).unwrap();
        assert_eq!(s.real_stage(1).unwrap(), vec![qi(0), qi(0), qi(2), qi(2)]);
        let bad_seq = json!({"atoms": 2, "stages": [[[0, 1]]], "values": [["1", "2"]]});
        assert!(adapted_sequence(&bad_seq).is_err());
    }

    #[test]
    fn dyadic_and_paths() {
        let m = dyadic_measure(&json!({"density": {"level": 1, "values": ["1", "3"]}, "atoms": [{"loc": "1/2^2", "mass": "1/2"}]})).unwrap();
        assert_eq!(m.total(), qi(2) + q(1, 2));
        let (p, n) = polyline(&json!({"knots": ["0", "1/2", "1"], "points": [0, 1, [3]], "interp": "jump-right", "norm": "l2"})).unwrap();
        assert_eq!(p.dim(), 1);
        assert_eq!(n, NormDescriptor::l2());
        let w = norm(&json!({"kind": "weighted", "p": "2", "weights": ["1", "2"]})).unwrap();
        assert_eq!(w, NormDescriptor::weighted(Exponent::int(2), vec![qi(1), qi(2)]).unwrap());
        assert_eq!(norm(&norm_to_json(&w)).unwrap(), w);
    }
}
