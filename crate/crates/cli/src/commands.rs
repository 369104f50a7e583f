use std::path::Path;

use num::Zero;
use serde_json::{json, Value};
use summa_core::dyadic::{self, Open};
use summa_core::martingale::{self, AdaptedSequence, ExperimentParams, StoppingTime};
use summa_core::measure::{self, Partition, SignedMeasure};
use summa_core::norms::{self, SeqVector};
use summa_core::paths::{self, Interval, Piecewise};
use summa_core::scalar::{parse_rational, Certified, Scalar};
use summa_core::sums::{self, CauchyVerdict, FiniteFamily, IndexedFamily};
use summa_core::{json as input, Error, NormDescriptor, Result, Q};

use crate::args::*;
use crate::report::{Cell, Check, Report, Table};
use crate::{suites, Cli, Command};

pub(crate) fn dispatch(cli: &Cli, echo: String) -> Result<Report> {
    let mut r = Report::new(echo);
    match &cli.command {
        Command::Norms(c) => norms_cmd(c, &mut r)?,
        Command::Sums(c) => sums_cmd(c, &mut r)?,
        Command::Measures(c) => measures_cmd(c, &mut r)?,
        Command::Dyadic(c) => dyadic_cmd(c, &mut r)?,
        Command::Mart(c) => mart_cmd(c, cli.global.seed, &mut r)?,
        Command::Path(c) => path_cmd(c, &mut r)?,
        Command::Convexity(c) => convexity_cmd(c, &mut r)?,
        Command::Suite(s) => suites::run_suite(s.name, cli.global.seed, s.inject_fault, &mut r)?,
    }
    Ok(r)
}

fn load(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    input::parse(&text)
}

fn vec_cell(v: &[Q]) -> Cell {
    match v {
        [x] => Cell::Rational(x.clone()),
        _ => Cell::rationals(v),
    }
}

fn floats(v: &[f64]) -> Cell {
    Cell::List(v.iter().map(|&x| Cell::Float(x)).collect())
}

fn certified(c: Certified) -> Cell {
    Cell::text(format!("{c:?}").to_lowercase())
}

fn norms_cmd(c: &NormsCmd, r: &mut Report) -> Result<()> {
    match c {
        NormsCmd::Lp { values, p } => {
            let v = SeqVector::Exact(values.clone());
            r.value("p", p.to_string()).value("norm", &norms::lp_norm(&v, p)?);
        }
        NormsCmd::Holder { f, g, p, q } => {
            let q = match q {
                Some(q) => q.clone(),
                None => p.conjugate()?,
            };
            let h = norms::holder_verify(&SeqVector::Exact(f.clone()), &SeqVector::Exact(g.clone()), p, &q)?;
            r.value("p", p.to_string())
                .value("q", q.to_string())
                .value("lhs", &h.lhs)
                .value("rhs", &h.rhs)
                .value("equality", h.equality);
            if let Some(c) = h.certified {
                r.value("certified", certified(c));
            }
            r.check("holder", h.holds);
        }
        NormsCmd::Interpolate { values, p, q, r: rr } => {
            let i = norms::lp_interpolate(&SeqVector::Exact(values.clone()), p, q, rr)?;
            r.value("t", i.t).value("lhs", &i.lhs).value("rhs", &i.rhs);
            r.check("interpolation", i.holds);
        }
        NormsCmd::Subadd { a, b, p } => {
            let holds = norms::p_subadditivity_check(&Scalar::Exact(a.clone()), &Scalar::Exact(b.clone()), p)?;
            r.value("p", p.to_string());
            r.check("p-subadditivity", holds);
        }
    }
    Ok(())
}

fn family_of(s: &FamilySource) -> Result<IndexedFamily> {
    if let Some(path) = &s.terms {
        return input::family(&load(path)?);
    }
    let name = s
        .family
        .as_deref()
        .ok_or_else(|| Error::Invalid("give --terms FILE or --family NAME".into()))?;
    let mut params = serde_json::Map::new();
    if let Some(x) = &s.ratio {
        params.insert("ratio".into(), json!(x.to_string()));
    }
    if let Some(x) = &s.scale {
        params.insert("scale".into(), json!(x.to_string()));
    }
    if let Some(x) = s.s {
        params.insert("s".into(), json!(x));
    }
    if let Some(x) = s.dim {
        params.insert("dim".into(), json!(x));
    }
    if let Some(x) = &s.family_p {
        params.insert("p".into(), json!(x));
    }
    input::family(&json!({"generator": name, "params": params, "horizon": s.horizon}))
}

fn finite_of(s: &FamilySource) -> Result<FiniteFamily> {
    let f = family_of(s)?;
    Ok(f.prefix(f.horizon()))
}

fn signed_indices(e: &sums::Extremal) -> Cell {
    Cell::List(
        e.indices
            .iter()
            .zip(&e.signs)
            .map(|(i, s)| Cell::Int(*i as i64 * i64::from(*s)))
            .collect(),
    )
}

fn sums_cmd(c: &SumsCmd, r: &mut Report) -> Result<()> {
    match c {
        SumsCmd::Ynorm(s) => {
            let f = finite_of(s)?;
            let e = sums::y_norm(&f)?;
            r.value("terms", Cell::int(f.len())).value("y", &e.value).value("indices", Cell::indices(&e.indices));
        }
        SumsCmd::Znorm(s) => {
            let f = finite_of(s)?;
            let e = sums::z_norm(&f)?;
            r.value("terms", Cell::int(f.len())).value("z", &e.value).value("signed_indices", signed_indices(&e));
        }
        SumsCmd::Wnorm { source, k } => {
            let f = finite_of(source)?;
            let w = sums::w_norm(&f, *k)?;
            let roots = Cell::List(
                w.coefficients
                    .iter()
                    .map(|c| c.map_or(Cell::Empty, Cell::int))
                    .collect(),
            );
            r.value("terms", Cell::int(f.len())).value("k", Cell::int(w.k)).value("w", &w.value).value("roots", roots);
        }
        SumsCmd::Subset { source, indices } => {
            let f = finite_of(source)?;
            r.value("sum", vec_cell(&sums::subset_sum(&f, indices)?));
        }
        SumsCmd::Cauchy { source, eps } => {
            let f = family_of(source)?;
            let v = sums::generalized_cauchy_check(&f, eps, None)?;
            r.value("verdict", v.label());
            match &v {
                CauchyVerdict::Pass { prefix, bound } => {
                    r.value("prefix", Cell::int(*prefix)).value("bound", bound);
                }
                CauchyVerdict::Fail { prefix, witness, value } => {
                    r.value("prefix", Cell::int(*prefix)).value("value", value);
                    r.checks.push(Check {
                        witness: Some(format!("{witness:?}")),
                        ..Check::new("cauchy", false)
                    });
                    return Ok(());
                }
                CauchyVerdict::Inconclusive { reason } => {
                    r.value("reason", reason.as_str());
                    return Ok(());
                }
            }
            r.check("cauchy", true);
        }
        SumsCmd::Eval { source, eps } => {
            let f = family_of(source)?;
            let e = sums::unordered_sum_eval(&f, eps)?;
            r.value("sum", vec_cell(&e.value))
                .value("prefix", Cell::int(e.prefix))
                .value("error_bound", &e.error_bound);
        }
        SumsCmd::Rearrange { source, perm, eps } => {
            let f = family_of(source)?;
            let rep = sums::rearrangement_test(&f, perm, eps)?;
            r.value("sum", rep.sum.as_deref().map(vec_cell))
                .value("permuted_sum", rep.permuted_sum.as_deref().map(vec_cell))
                .value("difference", rep.difference.as_ref());
            if let Some(w) = &rep.witness {
                r.value("divergent_order", Cell::indices(&w.order));
                let mut t = Table::new("blocks", &["block", "indices", "sum"]);
                for (i, b) in w.blocks.iter().enumerate() {
                    t.push(vec![Cell::int(i + 1), Cell::indices(&b.indices), Cell::from(&b.sum)]);
                }
                r.tables.push(t);
            }
            r.check("rearrangement", rep.agree);
        }
        SumsCmd::Uniform { source, eps, sample } => {
            let f = family_of(source)?;
            let u = sums::sign_uniform_convergence_check(&f, eps, None, *sample)?;
            r.value("l_eps", Cell::int(u.l_eps))
                .value("sup", &u.sup)
                .value("bound", u.bound)
                .value("method", u.method.label());
            r.check("sign-uniform", u.holds);
        }
    }
    Ok(())
}

fn load_measure(path: &Path) -> Result<SignedMeasure> {
    Ok(input::measure(&load(path)?)?.1)
}

fn parse_cells(s: &str, n: usize) -> Result<Partition> {
    let cells = s
        .split(';')
        .map(|cell| {
            cell.split(',')
                .map(|a| a.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad atom {a:?}"))))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Partition::new(n, cells)
}

fn measure_table(name: &str, mu: &SignedMeasure) -> Table {
    let mut t = Table::new(name, &["atom", "weight"]);
    for (a, w) in mu.weights().iter().enumerate() {
        t.push(vec![Cell::int(a), vec_cell(w)]);
    }
    t
}

fn density_table(h: &[Vec<Q>]) -> Table {
    let mut t = Table::new("density", &["atom", "h"]);
    for (a, w) in h.iter().enumerate() {
        t.push(vec![Cell::int(a), vec_cell(w)]);
    }
    t
}

fn measures_cmd(c: &MeasuresCmd, r: &mut Report) -> Result<()> {
    match c {
        MeasuresCmd::Tv { input, cells, set } => {
            let mu = load_measure(input)?;
            let n = mu.atoms();
            let p = match cells {
                Some(s) => parse_cells(s, n)?,
                None => Partition::discrete(n),
            };
            let set = set.clone().unwrap_or_else(|| (0..n).collect());
            r.value("total_variation", &measure::total_variation(&mu, &p, &set)?);
        }
        MeasuresCmd::TwoSet { input, set } => {
            let mu = load_measure(input)?;
            let set = set.clone().unwrap_or_else(|| (0..mu.atoms()).collect());
            let two = measure::two_set_variation(&mu, &set)?;
            let tv = measure::total_variation(&mu, &Partition::discrete(mu.atoms()), &set)?;
            r.value("two_set", &two).value("total_variation", &tv);
            if mu.real_weights().is_some() {
                r.check("two-set formula", two.cmp_value(&tv).is_eq());
            }
        }
        MeasuresCmd::Jordan { input } => {
            let mu = load_measure(input)?;
            let (plus, minus) = measure::jordan_decompose(&mu)?;
            let mut t = Table::new("jordan", &["atom", "mu", "plus", "minus"]);
            for a in 0..mu.atoms() {
                t.push(vec![
                    Cell::int(a),
                    vec_cell(&mu.weights()[a]),
                    vec_cell(&plus.weights()[a]),
                    vec_cell(&minus.weights()[a]),
                ]);
            }
            r.tables.push(t);
            let all: Vec<usize> = (0..mu.atoms()).collect();
            r.value("plus_total", vec_cell(&plus.measure_of(&all)?))
                .value("minus_total", vec_cell(&minus.measure_of(&all)?));
            let ok = (0..mu.atoms()).all(|a| plus.weights()[a][0].clone() - &minus.weights()[a][0] == mu.weights()[a][0]);
            r.check("mu = plus - minus", ok);
        }
        MeasuresCmd::Hahn { input } => {
            let mu = load_measure(input)?;
            let (pos, neg) = measure::hahn_decompose(&mu)?;
            r.value("positive", Cell::indices(&pos)).value("negative", Cell::indices(&neg));
        }
        MeasuresCmd::Rn { input, nu } => {
            let mu = load_measure(input)?;
            let nu = load_measure(nu)?;
            let h = measure::radon_nikodym(&mu, &nu)?;
            r.tables.push(density_table(&h));
            let all: Vec<usize> = (0..mu.atoms()).collect();
            r.check("mu = h nu", measure::reconstruct(&h, &nu, &all)? == mu.measure_of(&all)?);
        }
        MeasuresCmd::Lebesgue { input, nu } => {
            let mu = load_measure(input)?;
            let nu = load_measure(nu)?;
            let d = measure::lebesgue_decompose(&mu, &nu)?;
            r.tables.push(measure_table("absolutely_continuous", &d.absolutely_continuous));
            r.tables.push(measure_table("singular", &d.singular));
            r.tables.push(density_table(&d.density));
        }
        MeasuresCmd::Polar { input } => {
            let mu = load_measure(input)?;
            r.tables.push(density_table(&measure::polar_density(&mu)?));
        }
        MeasuresCmd::Distance { input, a, b } => {
            let mu = load_measure(input)?;
            r.value("distance", measure::symdiff_distance(&mu, a, b)?);
        }
    }
    Ok(())
}

fn parse_interval(s: &str) -> Result<Open> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("expected a:b, got {s:?}")))?;
    Ok((parse_rational(a)?, parse_rational(b)?))
}

fn dyadic_cmd(c: &DyadicCmd, r: &mut Report) -> Result<()> {
    match c {
        DyadicCmd::Maximal { measure, t, depth } => {
            let mu = input::dyadic_measure(&load(measure)?)?;
            let m = dyadic::dyadic_maximal(&mu, *depth)?;
            let mut table = Table::new("maximal", &["interval", "value"]);
            for (j, v) in m.values().iter().enumerate() {
                table.push(vec![Cell::text(format!("[{j}/2^{}, {}/2^{})", m.level(), j + 1, m.level())), Cell::from(v)]);
            }
            r.tables.push(table);
            let level = dyadic::maximal_level_sets(&mu, t, *depth)?;
            let hl = dyadic::hl_maximal_weak_type(&mu, t, *depth)?;
            let intervals = Cell::List(
                level
                    .intervals
                    .iter()
                    .map(|(l, j)| Cell::text(format!("{l}:{j}")))
                    .collect(),
            );
            r.value("t", t.clone())
                .value("level_set", intervals)
                .value("lebesgue", level.lebesgue.clone())
                .value("mass", level.mass.clone())
                .value("hl_lower", hl.lower)
                .value("hl_upper", hl.upper)
                .value("hl_bound", hl.bound)
                .value("hl_constant_one", hl.holds_constant_one);
            r.check("dyadic weak type (strict)", level.strict);
            r.check("grid weak type", hl.holds);
        }
        DyadicCmd::Khintchine { coeffs, p } => {
            let rep = dyadic::khintchine_report(coeffs, p)?;
            if let Some(k) = p.as_integer() {
                let m = dyadic::rademacher_moment(coeffs, k)?;
                r.value("moment", m.value.clone());
                if let Some(w) = &m.warning {
                    r.value("warning", w.as_str());
                }
                r.check("enumeration agrees", m.agree);
            } else {
                r.value("moment", &rep.moment);
            }
            r.value("p", p.to_string())
                .value("comparison", &rep.comparison)
                .value("ratio", &rep.ratio)
                .value("even_bound", rep.even_bound.clone())
                .value("lower_constant", rep.lower_constant);
            if let Some(ok) = rep.within_even_bound {
                r.check("upper Khintchine", ok);
            }
            if let Some(ok) = rep.lower_holds {
                r.check("lower Khintchine", ok);
            }
            r.check("monotone in p", rep.monotone);
        }
        DyadicCmd::Average { input: path, level } => {
            let f = input::dyadic_step(&load(path)?)?;
            let g = dyadic::dyadic_average(&f, *level)?;
            r.value("level", Cell::int(*level as usize)).value("values", Cell::rationals(g.values()));
            r.check("integral preserved", g.integral() == f.integral());
        }
        DyadicCmd::Lacunary { freqs, coeffs, k } => {
            let cs: Vec<_> = coeffs.iter().map(|x| num::Complex::new(x.clone(), Q::zero())).collect();
            let m = dyadic::lacunary_moment(freqs, &cs, *k)?;
            r.value("moment", m.value).value("gap_ratio", m.gap_ratio).value("collapse", m.collapse);
        }
        DyadicCmd::Walsh { n } => {
            r.value("n", Cell::int(*n as usize));
            r.check("walsh gram = identity", dyadic::walsh_gram_is_identity(*n)?);
        }
        DyadicCmd::Covering { intervals } => {
            let ivs = intervals.iter().map(|s| parse_interval(s)).collect::<Result<Vec<_>>>()?;
            let keep = dyadic::covering_reduce(&ivs)?;
            let chosen: Vec<Open> = keep.iter().map(|&i| ivs[i].clone()).collect();
            r.value("kept", Cell::indices(&keep))
                .value("multiplicity", Cell::int(dyadic::max_multiplicity(&chosen)));
            r.check("multiplicity <= 2", dyadic::max_multiplicity(&chosen) <= 2);
            r.check("same union", dyadic::union_of(&chosen) == dyadic::union_of(&ivs));
        }
    }
    Ok(())
}

fn load_seq(path: &Path) -> Result<AdaptedSequence> {
    input::adapted_sequence(&load(path)?)
}

fn seq_table(name: &str, seq: &AdaptedSequence) -> Table {
    let mut t = Table::new(name, &["stage", "atom", "value"]);
    for (j, stage) in seq.values().iter().enumerate() {
        for (a, v) in stage.iter().enumerate() {
            t.push(vec![Cell::int(j), Cell::int(a), vec_cell(v)]);
        }
    }
    t
}

fn mart_cmd(c: &MartCmd, seed: u64, r: &mut Report) -> Result<()> {
    match c {
        MartCmd::Classify { seq } => {
            let seq = load_seq(seq)?;
            let cl = martingale::classify(&seq);
            r.value("class", cl.class.label());
            if let Some(w) = cl.witness {
                r.value("witness_stage", Cell::int(w.stage))
                    .value("witness_cell", Cell::int(w.cell))
                    .value("witness_value", vec_cell(&w.value))
                    .value("witness_expected", vec_cell(&w.expected));
            }
        }
        MartCmd::Doob { seq } => {
            let seq = load_seq(seq)?;
            let d = martingale::doob_decompose(&seq)?;
            r.value("martingale_class", martingale::classify(&d.martingale).class.label());
            r.tables.push(seq_table("martingale", &d.martingale));
            r.tables.push(seq_table("compensator", &d.compensator));
            let round_trip = (0..seq.len()).all(|j| {
                seq.stage_values(j).iter().enumerate().all(|(a, v)| {
                    v.iter()
                        .zip(&d.martingale.stage_values(j)[a])
                        .zip(&d.compensator.stage_values(j)[a])
                        .all(|((f, m), c)| *f == m + c)
                })
            });
            r.check("f = m + A", round_trip);
        }
        MartCmd::Maximal { seq, t } => {
            let seq = load_seq(seq)?;
            let w = martingale::weak_type_check(&seq, t)?;
            r.value("t", w.t).value("level_mass", w.level_mass).value("lhs", w.lhs).value("bound", &w.bound);
            r.check("maximal weak type", w.holds);
        }
        MartCmd::DoobLp { seq, p } => {
            let seq = load_seq(seq)?;
            let d = martingale::doob_lp_check(&seq, p)?;
            r.value("p", d.p)
                .value("stage", Cell::int(d.stage))
                .value("lhs", &d.lhs)
                .value("constant", &d.constant)
                .value("rhs", &d.rhs)
                .value("ratio", d.ratio)
                .value("certified", certified(d.certified));
            r.check("doob lp", d.holds);
        }
        MartCmd::Stop { seq, t } => {
            let seq = load_seq(seq)?;
            let tau = StoppingTime::first_passage(&seq, t).truncated(seq.len() - 1);
            let stopped = martingale::stopped_sequence(&seq, &tau)?;
            let taus = Cell::List(tau.values().iter().map(|v| Cell::from(v.map(Cell::int))).collect());
            r.value("tau", taus)
                .value("class", martingale::classify(&seq).class.label())
                .value("stopped_class", martingale::classify(&stopped).class.label());
            r.tables.push(seq_table("stopped", &stopped));
        }
        MartCmd::OptionalStopping { seq, t } => {
            let seq = load_seq(seq)?;
            let tau = StoppingTime::first_passage(&seq, t).truncated(seq.len() - 1);
            let o = martingale::optional_stopping_check(&seq, &tau)?;
            r.value("horizon", Cell::int(o.horizon))
                .value("cells", Cell::int(o.cells))
                .value("stopped_mean", vec_cell(&o.stopped_mean))
                .value("initial_mean", vec_cell(&o.initial_mean));
            r.checks.push(Check {
                witness: o.witness.map(|w| format!("{w:?}")),
                ..Check::new("optional stopping", o.holds)
            });
        }
        MartCmd::Integrability { seq, ts } => {
            let seq = load_seq(seq)?;
            let mut t = Table::new("tails", &["t", "tail"]);
            for row in martingale::uniform_integrability(&seq, ts) {
                t.push(vec![Cell::from(row.t), Cell::from(row.tail)]);
            }
            r.tables.push(t);
        }
        MartCmd::Surrogates { seq, p } => {
            let seq = load_seq(seq)?;
            let (inc, sup) = martingale::increment_surrogates(&seq, *p);
            r.value("increment_sum", inc).value("sup_norm", sup);
        }
        MartCmd::Experiment { name, stages, threshold } => {
            let trace = martingale::run_experiment(
                name,
                &ExperimentParams {
                    stages: *stages,
                    seed,
                    threshold: threshold.clone(),
                },
            )?;
            let cols: Vec<&str> = trace.columns.iter().map(String::as_str).collect();
            let mut t = Table::new(&trace.name, &cols);
            for row in &trace.rows {
                t.push(row.iter().map(Cell::from).collect());
            }
            r.tables.push(t);
            for c in &trace.checks {
                r.checks.push(Check {
                    witness: (!c.detail.is_empty()).then(|| c.detail.clone()),
                    ..Check::new(&c.name, c.passed)
                });
            }
        }
    }
    Ok(())
}

fn path_cmd(c: &PathCmd, r: &mut Report) -> Result<()> {
    match c {
        PathCmd::Length { input: path } => {
            let (f, norm) = input::polyline(&load(path)?)?;
            let len = paths::path_length(&f, &norm)?;
            r.value("norm", norm.name()).value("length", len.to_string()).value("length_f64", len.to_f64());
        }
        PathCmd::Variation { input: path } => {
            let (f, _) = input::polyline(&load(path)?)?;
            let v = paths::pos_neg_variation(&f)?;
            let first = f.value_at(f.start())?;
            let last = f.value_at(f.end())?;
            let rise = &last[0] - &first[0];
            r.value("positive", v.positive.clone()).value("negative", v.negative.clone()).value("total", v.total.clone());
            r.check("P + N = total", &v.positive + &v.negative == v.total);
            r.check("P - N = f(b) - f(a)", &v.positive - &v.negative == rise);
        }
        PathCmd::Stieltjes { phi, input: path, mesh } => {
            let (f, norm) = input::polyline(&load(path)?)?;
            let phi = Piecewise::parse(phi)?;
            let s = paths::riemann_stieltjes(&phi, &f, mesh, &norm)?;
            let bound = s.length.scale(&s.sup_phi);
            let value_norm = norm.value(&s.value);
            r.value("value", vec_cell(&s.value))
                .value("cells", Cell::int(s.cells))
                .value("modulus", s.modulus)
                .value("length", s.length.to_string())
                .value("error_bound", s.error_bound.to_string());
            r.check("|sum| <= sup|phi| * length", value_norm.to_f64() <= bound.to_f64() + summa_core::scalar::tolerance());
        }
        PathCmd::Measure { input: path, intervals } => {
            let (f, norm) = input::polyline(&load(path)?)?;
            let set = intervals.iter().map(|s| Interval::parse(s)).collect::<Result<Vec<_>>>()?;
            let pm = paths::path_measure(&f);
            let mut t = Table::new("intervals", &["interval", "measure"]);
            for iv in &set {
                t.push(vec![Cell::text(iv.to_string()), vec_cell(&pm.measure(std::slice::from_ref(iv))?)]);
            }
            r.tables.push(t);
            r.value("measure", vec_cell(&pm.measure(&set)?))
                .value("length_measure", pm.length_measure(&set, &norm)?.to_string());
            r.check("dominated by length measure", pm.dominated(&set, &norm)?);
        }
    }
    Ok(())
}

fn parse_norm(s: &str) -> Result<NormDescriptor> {
    input::norm(&Value::String(s.to_string()))
}

fn parse_vectors(s: &str) -> Result<Vec<Vec<Q>>> {
    s.split(';')
        .map(|v| v.split(',').map(parse_rational).collect())
        .collect()
}

fn convexity_cmd(c: &ConvexityCmd, r: &mut Report) -> Result<()> {
    match c {
        ConvexityCmd::Modulus { norm, dim, grid, eps } => {
            let n = parse_norm(norm)?;
            let rows = paths::uniform_convexity_modulus(&n, *dim, eps, *grid)?;
            let mut t = Table::new("modulus", &["eps", "delta", "v", "w"]);
            for row in rows {
                t.push(vec![Cell::Float(row.eps), Cell::Float(row.delta), floats(&row.v), floats(&row.w)]);
            }
            r.value("norm", n.name()).value("dim", Cell::int(*dim)).value("grid", Cell::int(*grid));
            r.tables.push(t);
        }
        ConvexityCmd::Strict { norm, dim, grid, sphere_tol } => {
            let n = parse_norm(norm)?;
            r.value("norm", n.name());
            match paths::strict_convexity_witness(&n, *dim, *grid, *sphere_tol)? {
                Some(w) => {
                    r.value("strictly_convex", false)
                        .value("v", floats(&w.v))
                        .value("w", floats(&w.w))
                        .value("t", w.t)
                        .value("separation", w.separation);
                }
                None => {
                    r.value("strictly_convex", true);
                }
            }
        }
        ConvexityCmd::Averaged { norm, vectors, weights, eps, eta } => {
            let n = parse_norm(norm)?;
            let vs = parse_vectors(vectors)?;
            let a = paths::averaged_convexity_check(&n, &vs, weights, *eps, *eta)?;
            r.value("average", Cell::rationals(&a.average))
                .value("average_norm", a.average_norm)
                .value("spread", a.spread)
                .value("premise", a.premise)
                .value("conclusion", a.conclusion);
            r.check("no counterexample", !a.counterexample);
        }
    }
    Ok(())
}
