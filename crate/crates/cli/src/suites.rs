//! Named verification batteries. Each battery draws from its own ChaCha stream, so a
//! suite's checks do not depend on which other suites run alongside it.

use num::{Complex, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use summa_core::dyadic::{self, DyadicMeasure, DyadicStep};
use summa_core::martingale::{self, random, ExperimentParams, SeqClass};
use summa_core::measure::{self, Partition, SignedMeasure};
use summa_core::norms::{self, NormValue, SeqVector};
use summa_core::paths::{self, Interp, Polyline};
use summa_core::scalar::{q, qi, ComplexQ, Scalar};
use summa_core::sums::{self, CauchyVerdict, FiniteFamily, IndexedFamily};
use summa_core::{Exponent, NormDescriptor, Result, Q};

use crate::args::SuiteName;
use crate::report::{Cell, Check, Report};

/// Runs the named suite into `r`. With `fault`, one identity per battery is evaluated
/// with a flipped sign.
pub fn run_suite(name: SuiteName, seed: u64, fault: bool, r: &mut Report) -> Result<()> {
    let all = [
        SuiteName::Inequalities,
        SuiteName::Measures,
        SuiteName::Dyadic,
        SuiteName::Martingales,
        SuiteName::Paths,
    ];
    let chosen: Vec<SuiteName> = if name == SuiteName::All { all.to_vec() } else { vec![name] };
    r.value("seed", Cell::Int(seed as i64));
    for (i, s) in all.iter().enumerate() {
        if !chosen.contains(s) {
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i as u64));
        let sign = if fault { -1 } else { 1 };
        let checks = match s {
            SuiteName::Inequalities => inequalities(&mut rng, sign)?,
            SuiteName::Measures => measures(&mut rng, sign)?,
            SuiteName::Dyadic => dyadic_battery(&mut rng, sign)?,
            SuiteName::Martingales => martingales(&mut rng, seed, sign)?,
            SuiteName::Paths => paths_battery(&mut rng, sign)?,
            SuiteName::All => unreachable!(),
        };
        let label = format!("{s:?}").to_lowercase();
        for c in checks {
            r.checks.push(Check {
                name: format!("{label}/{}", c.name),
                ..c
            });
        }
    }
    let total: usize = r.checks.iter().map(|c| c.count).sum();
    r.value("instances", Cell::int(total));
    Ok(())
}

/// Counts instances and keeps the first failure.
struct Tally {
    check: Check,
}

impl Tally {
    fn new(name: &str) -> Self {
        Tally {
            check: Check {
                count: 0,
                ..Check::new(name, true)
            },
        }
    }

    fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.check.count += 1;
        if !ok && self.check.passed {
            self.check.passed = false;
            self.check.witness = Some(witness());
        }
    }

    fn done(self) -> Check {
        self.check
    }
}

fn rat(rng: &mut ChaCha8Rng, range: i64, den: i64) -> Q {
    random::rational(rng, range, den)
}

fn rats(rng: &mut ChaCha8Rng, n: usize, range: i64, den: i64) -> Vec<Q> {
    (0..n).map(|_| rat(rng, range, den)).collect()
}

fn show(v: &[Q]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

fn f64_le(a: &Scalar, b: f64) -> bool {
    a.to_f64() <= b + summa_core::scalar::tolerance() * (1.0 + b.abs())
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..1 << n).map(move |m| (0..n).filter(|j| m >> j & 1 == 1).collect())
}

fn inequalities(rng: &mut ChaCha8Rng, sign: i64) -> Result<Vec<Check>> {
    let exps = [Exponent::int(1), Exponent::ratio(3, 2), Exponent::int(2), Exponent::int(3), Exponent::Infinity];
    let mut triangle = Tally::new("minkowski");
    let mut monotone = Tally::new("lp monotone in p");
    let mut holder = Tally::new("holder");
    let mut subadd = Tally::new("p-subadditivity");
    for _ in 0..500 {
        let n = rng.gen_range(1..=6);
        let f = rats(rng, n, 9, 4);
        let g = rats(rng, n, 9, 4);
        let sum: Vec<Q> = f.iter().zip(&g).map(|(a, b)| a + b).collect();
        let p = &exps[rng.gen_range(0..exps.len())];
        let (nf, ng, ns) = (
            norms::lp_norm(&SeqVector::Exact(f.clone()), p)?,
            norms::lp_norm(&SeqVector::Exact(g.clone()), p)?,
            norms::lp_norm(&SeqVector::Exact(sum), p)?,
        );
        triangle.record(f64_le(&ns, nf.to_f64() + ng.to_f64()), || format!("p={p} f={} g={}", show(&f), show(&g)));
        let i = rng.gen_range(0..exps.len() - 1);
        let (lo, hi) = (&exps[i], &exps[rng.gen_range(i + 1..exps.len())]);
        let a = norms::lp_norm(&SeqVector::Exact(f.clone()), hi)?;
        let b = norms::lp_norm(&SeqVector::Exact(f.clone()), lo)?;
        monotone.record(f64_le(&a, b.to_f64()), || format!("{lo} < {hi} f={}", show(&f)));
        let fin = [Exponent::ratio(3, 2), Exponent::int(2), Exponent::int(3), Exponent::int(1)];
        let p = &fin[rng.gen_range(0..fin.len())];
        let h = norms::holder_verify(&SeqVector::Exact(f.clone()), &SeqVector::Exact(g.clone()), p, &p.conjugate()?)?;
        holder.record(h.holds, || format!("p={p} f={} g={}", show(&f), show(&g)));
        let a = rat(rng, 8, 4).abs();
        let b = rat(rng, 8, 4).abs();
        let p = Exponent::ratio(rng.gen_range(1..=4), 4);
        let ok = norms::p_subadditivity_check(&Scalar::Exact(a.clone()), &Scalar::Exact(b.clone()), &p)?;
        subadd.record(ok, || format!("a={a} b={b} p={p}"));
    }

    let mut sandwich = Tally::new("y <= z <= 2y");
    let mut w_sandwich = Tally::new("z <= w(K) <= 2z");
    let mut collapse = Tally::new("scalar y = max(positive part, negative part)");
    for _ in 0..150 {
        let m = rng.gen_range(1..=8);
        let real = FiniteFamily::real(rats(rng, m, 9, 3));
        let y = sums::y_norm(&real)?.value;
        let z = sums::z_norm(&real)?.value;
        sandwich.record(y.le(&z) && z.le_scaled(&qi(2), &y), || show(&real.terms().concat()));
        let xs = real.terms().concat();
        let pos: Q = xs.iter().filter(|x| x.is_positive()).sum();
        let neg: Q = -qi(sign) * xs.iter().filter(|x| x.is_negative()).sum::<Q>();
        let expect = NormValue::Exact(pos.max(neg));
        collapse.record(y.cmp_value(&expect).is_eq(), || show(&xs));
        let m = rng.gen_range(1..=5);
        let zs: Vec<ComplexQ> = (0..m).map(|_| Complex::new(rat(rng, 6, 2), rat(rng, 6, 2))).collect();
        let cf = FiniteFamily::complex(zs);
        let z = sums::z_norm(&cf)?.value;
        for k in [4, 8] {
            let w = sums::w_norm(&cf, k)?.value;
            w_sandwich.record(z.le(&w) && w.le_scaled(&qi(2), &z), || format!("K={k} terms={}", cf.terms().iter().map(|t| show(t)).collect::<Vec<_>>().join(" ")));
        }
    }

    let mut cauchy = Tally::new("geometric families pass the Cauchy criterion");
    for _ in 0..20 {
        let ratio = q(rng.gen_range(-3..=3), 4);
        let family = IndexedFamily::Streamed(sums::StreamedFamily::new(
            sums::Generator::Geometric {
                ratio: ratio.clone(),
                scale: qi(1),
            },
            64,
        )?);
        let v = sums::generalized_cauchy_check(&family, &q(1, 1000), None)?;
        cauchy.record(matches!(v, CauchyVerdict::Pass { .. }), || format!("ratio={ratio}: {}", v.label()));
    }
    Ok(vec![triangle.done(), monotone.done(), holder.done(), subadd.done(), sandwich.done(), w_sandwich.done(), collapse.done(), cauchy.done()])
}

fn measures(rng: &mut ChaCha8Rng, sign: i64) -> Result<Vec<Check>> {
    let mut jordan = Tally::new("jordan: mu = plus - minus");
    let mut hahn = Tally::new("hahn sets are positive and negative");
    let mut two = Tally::new("two-set formula");
    let mut rn = Tally::new("radon-nikodym round trip");
    let mut leb = Tally::new("lebesgue: mu = ac + singular");
    let mut tri = Tally::new("symmetric-difference triangle inequality");
    for _ in 0..200 {
        let n = rng.gen_range(1..=7);
        let w = rats(rng, n, 6, 3);
        let mu = SignedMeasure::real(w.clone());
        let (plus, minus) = measure::jordan_decompose(&mu)?;
        let ok = (0..n).all(|a| {
            let (p, m) = (&plus.weights()[a][0], &minus.weights()[a][0]);
            !p.is_negative() && !m.is_negative() && p - m * qi(sign) == w[a]
        });
        jordan.record(ok, || show(&w));
        let (pos, neg) = measure::hahn_decompose(&mu)?;
        let mut ok = true;
        for e in subsets(n) {
            let in_p: Vec<usize> = e.iter().copied().filter(|a| pos.contains(a)).collect();
            let in_n: Vec<usize> = e.iter().copied().filter(|a| neg.contains(a)).collect();
            ok &= !mu.measure_of(&in_p)?[0].is_negative() && !mu.measure_of(&in_n)?[0].is_positive();
        }
        hahn.record(ok, || show(&w));
        let set: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.6)).collect();
        let tv = measure::total_variation(&mu, &Partition::discrete(n), &set)?;
        let ts = measure::two_set_variation(&mu, &set)?;
        two.record(tv.cmp_value(&ts).is_eq(), || format!("{} on {set:?}", show(&w)));

        let nu_w: Vec<Q> = w
            .iter()
            .map(|x| if x.is_zero() { qi(rng.gen_range(0..=2)) } else { x.abs() * qi(rng.gen_range(1..=3)) })
            .collect();
        let nu = SignedMeasure::real(nu_w.clone());
        let h = measure::radon_nikodym(&mu, &nu)?;
        let mut ok = true;
        for e in subsets(n) {
            ok &= measure::reconstruct(&h, &nu, &e)? == mu.measure_of(&e)?;
        }
        rn.record(ok, || format!("mu={} nu={}", show(&w), show(&nu_w)));

        let base: Vec<Q> = (0..n).map(|_| qi(rng.gen_range(0..=2))).collect();
        let d = measure::lebesgue_decompose(&mu, &SignedMeasure::real(base.clone()))?;
        let ok = (0..n).all(|a| &d.absolutely_continuous.weights()[a][0] + &d.singular.weights()[a][0] == w[a])
            && (0..n).all(|a| !base[a].is_zero() || d.absolutely_continuous.weights()[a][0].is_zero());
        leb.record(ok, || format!("mu={} nu={}", show(&w), show(&base)));

        let pick = |rng: &mut ChaCha8Rng| -> Vec<usize> { (0..n).filter(|_| rng.gen_bool(0.5)).collect() };
        let (a, b, c) = (pick(rng), pick(rng), pick(rng));
        let var = measure::variation_measure(&mu)?;
        let d_ab = measure::symdiff_distance(&var, &a, &b)?;
        let d_bc = measure::symdiff_distance(&var, &b, &c)?;
        let d_ac = measure::symdiff_distance(&var, &a, &c)?;
        tri.record(d_ac <= d_ab + d_bc, || format!("{} A={a:?} B={b:?} C={c:?}", show(&w)));
    }
    Ok(vec![jordan.done(), hahn.done(), two.done(), rn.done(), leb.done(), tri.done()])
}

fn random_dyadic_measure(rng: &mut ChaCha8Rng) -> Result<DyadicMeasure> {
    let l = rng.gen_range(0..=4u32);
    let density: Vec<i64> = (0..1usize << l).map(|_| rng.gen_range(0..=6)).collect();
    let atoms = (0..rng.gen_range(0..=3))
        .map(|_| {
            let level = rng.gen_range(1..=6u32);
            (q(rng.gen_range(0..1i64 << level), 1 << level), qi(rng.gen_range(1..=4)))
        })
        .collect();
    DyadicMeasure::new(DyadicStep::from_ints(l, &density)?, atoms)
}

fn dyadic_battery(rng: &mut ChaCha8Rng, sign: i64) -> Result<Vec<Check>> {
    let mut fourth = Tally::new("fourth moment closed form");
    let mut l2 = Tally::new("rademacher L2 and sup identities");
    let mut weak = Tally::new("dyadic weak type is strict");
    let mut hl = Tally::new("grid maximal weak type");
    let mut avg = Tally::new("averages preserve integrals");
    let mut lac = Tally::new("lacunary k=1 equals energy");
    for _ in 0..200 {
        let n = rng.gen_range(1..=8);
        let a = rats(rng, n, 6, 3);
        let m = dyadic::rademacher_moment(&a, 4)?;
        fourth.record(m.agree && m.value == dyadic::fourth_moment_closed_form(&a), || show(&a));
        let s = dyadic::rademacher_sum(&a, n as u32)?;
        let sq: Q = a.iter().map(|x| x * x).sum();
        let abs: Q = a.iter().map(|x| x.abs()).sum();
        l2.record(s.l2_norm_sq() == sq && s.sup_norm() == abs * qi(sign), || show(&a));

        let mu = random_dyadic_measure(rng)?;
        let t = q(rng.gen_range(1..=40), 4);
        let level = dyadic::maximal_level_sets(&mu, &t, 7)?;
        weak.record(level.strict, || format!("t={t} atoms={:?}", mu.atoms()));
        let h = dyadic::hl_maximal_weak_type(&mu, &t, 7)?;
        hl.record(h.holds && h.lower <= h.upper, || format!("t={t} atoms={:?}", mu.atoms()));

        let lv = rng.gen_range(0..=4u32);
        let f = DyadicStep::new(lv, rats(rng, 1 << lv, 6, 4))?;
        let k = rng.gen_range(0..=lv);
        let g = dyadic::dyadic_average(&f, k)?;
        avg.record(g.integral() == f.integral(), || format!("level {k} of {:?}", f.values()));

        let terms = rng.gen_range(1..=4);
        let mut freqs: Vec<u64> = (0..terms).map(|_| rng.gen_range(1..=50)).collect();
        freqs.sort_unstable();
        freqs.dedup();
        let cs: Vec<ComplexQ> = freqs.iter().map(|_| Complex::new(rat(rng, 4, 2), rat(rng, 4, 2))).collect();
        let lm = dyadic::lacunary_moment(&freqs, &cs, 1)?;
        lac.record(lm.value == dyadic::coefficient_energy(&cs), || format!("freqs={freqs:?}"));
    }
    let mut walsh = Tally::new("walsh gram is the identity");
    for n in 0..=4 {
        walsh.record(dyadic::walsh_gram_is_identity(n)?, || format!("n={n}"));
    }
    let mut pair = Tally::new("lacunary (1,2),(1,1),k=2");
    let one = Complex::new(qi(1), qi(0));
    pair.record(dyadic::lacunary_moment(&[1, 2], &[one.clone(), one], 2)?.value == qi(6), || "moment != 6".into());
    Ok(vec![fourth.done(), l2.done(), weak.done(), hl.done(), avg.done(), lac.done(), walsh.done(), pair.done()])
}

fn martingales(rng: &mut ChaCha8Rng, seed: u64, sign: i64) -> Result<Vec<Check>> {
    let mut tower = Tally::new("tower property");
    let mut class = Tally::new("random martingales classify as martingales");
    let mut doob = Tally::new("doob decomposition round trip");
    let mut stop = Tally::new("stopped martingales stay martingales");
    let mut optional = Tally::new("optional stopping");
    let mut weak = Tally::new("maximal weak type");
    let mut lp = Tally::new("doob lp at p = 2, 3/2");
    for _ in 0..150 {
        let filt = random::filtration(rng, 16, 4);
        let l = rng.gen_range(0..filt.len());
        let j = rng.gen_range(0..=l);
        let i = rng.gen_range(0..=j);
        let f = random::measurable_function(rng, &filt, l, 1);
        let direct = martingale::conditional_expectation(&filt, &f, l, i)?;
        let two_step = martingale::conditional_expectation(&filt, &martingale::conditional_expectation(&filt, &f, l, j)?, j, i)?;
        tower.record(direct == two_step, || format!("stages {i} <= {j} <= {l}"));

        let m = random::martingale(rng, &filt, 1);
        let c = martingale::classify(&m);
        class.record(c.class == SeqClass::Martingale, || format!("{:?}", c.witness));

        let tau = random::stopping_time(rng, &filt, false);
        let stopped = martingale::stopped_sequence(&m, &tau)?;
        stop.record(martingale::classify(&stopped).class == SeqClass::Martingale, || format!("tau={:?}", tau.values()));
        let bounded = random::stopping_time(rng, &filt, true);
        let o = martingale::optional_stopping_check(&m, &bounded)?;
        optional.record(o.holds && o.stopped_mean == o.initial_mean, || format!("tau={:?} cell={:?}", bounded.values(), o.witness));
        let t = q(rng.gen_range(1..=40), 4);
        let w = martingale::weak_type_check(&m, &t)?;
        weak.record(w.holds, || format!("t={t} lhs={} bound={}", w.lhs, w.bound));

        let depth = rng.gen_range(1..=4);
        let seq = random::nonneg_dyadic_submartingale(rng, depth)?;
        let d = martingale::doob_decompose(&seq)?;
        let ok = (0..seq.len()).all(|j| {
            let f = seq.real_stage(j).unwrap_or_default();
            let m = d.martingale.real_stage(j).unwrap_or_default();
            let a = d.compensator.real_stage(j).unwrap_or_default();
            f.iter().zip(&m).zip(&a).all(|((f, m), a)| *f == m + a * qi(sign))
        }) && martingale::classify(&d.martingale).class == SeqClass::Martingale;
        doob.record(ok, || format!("depth {depth}"));
        for p in [qi(2), q(3, 2)] {
            let rep = martingale::doob_lp_check(&seq, &p)?;
            lp.record(rep.holds, || format!("p={p} lhs={} rhs={}", rep.lhs, rep.rhs));
        }
    }
    let mut dirac = Tally::new("dirac_singular experiment");
    let trace = martingale::run_experiment(
        "dirac_singular",
        &ExperimentParams {
            stages: Some(8),
            seed,
            threshold: None,
        },
    )?;
    for c in &trace.checks {
        dirac.record(c.passed, || format!("{}: {}", c.name, c.detail));
    }
    Ok(vec![tower.done(), class.done(), doob.done(), stop.done(), optional.done(), weak.done(), lp.done(), dirac.done()])
}

fn random_polyline(rng: &mut ChaCha8Rng, dim: usize) -> Result<Polyline> {
    let n = rng.gen_range(2..=8);
    let mut t = qi(0);
    let mut knots = vec![t.clone()];
    for _ in 1..n {
        t += q(rng.gen_range(1..=4), 4);
        knots.push(t.clone());
    }
    let points = (0..n).map(|_| rats(rng, dim, 12, 4)).collect();
    let interp = [Interp::Linear, Interp::JumpLeft, Interp::JumpRight][rng.gen_range(0..3)];
    Polyline::new(knots, points, interp)
}

fn paths_battery(rng: &mut ChaCha8Rng, sign: i64) -> Result<Vec<Check>> {
    let mut var = Tally::new("P + N = length and P - N = f(b) - f(a)");
    let mut additive = Tally::new("length is additive at knots");
    let mut stieltjes = Tally::new("stieltjes sum bounded by sup|phi| * length");
    let mut dominated = Tally::new("path measure dominated by length measure");
    let l1 = NormDescriptor::l1();
    for _ in 0..400 {
        let f = random_polyline(rng, 1)?;
        let v = paths::pos_neg_variation(&f)?;
        let len = paths::path_length(&f, &l1)?;
        let rise = &f.points().last().expect("nonempty")[0] - &f.points()[0][0];
        var.record(
            len.as_rational() == Some(&v.positive + &v.negative) && &v.positive - &v.negative * qi(sign) == rise,
            || format!("knots={} points={}", show(f.knots()), show(&f.points().concat())),
        );

        let dim = rng.gen_range(1..=3);
        let g = random_polyline(rng, dim)?;
        let norm = [NormDescriptor::l1(), NormDescriptor::l2(), NormDescriptor::linf()][rng.gen_range(0..3)].clone();
        let last = g.knots().len() - 1;
        if last >= 2 {
            let k = rng.gen_range(1..last);
            let whole = paths::path_length(&g, &norm)?;
            let left = paths::path_length(&g.between(0, k)?, &norm)?;
            let right = paths::path_length(&g.between(k, last)?, &norm)?;
            additive.record(whole.exact_eq(&left.add(&right)), || format!("{} knots={} split at {k}", norm.name(), show(g.knots())));
        }

        let phi = paths::Piecewise::polynomial(paths::Poly(rats(rng, 3, 4, 2)));
        let s = paths::riemann_stieltjes(&phi, &g, &q(1, 8), &norm)?;
        let bound = s.length.scale(&s.sup_phi).to_f64();
        stieltjes.record(norm.value(&s.value).to_f64() <= bound + 1e-9 * (1.0 + bound), || format!("{} knots={}", norm.name(), show(g.knots())));

        let span = g.end() - g.start();
        let (x, y) = (rng.gen_range(0..=8), rng.gen_range(0..=8));
        let a = g.start() + &span * q(x.min(y), 8);
        let b = g.start() + &span * q(x.max(y), 8);
        let set = [paths::Interval::new(a, b, rng.gen_bool(0.5), rng.gen_bool(0.5))];
        dominated.record(paths::path_measure(&g).dominated(&set, &norm)?, || format!("{} on {}", norm.name(), set[0]));
    }

    let mut modulus = Tally::new("l2 modulus within 1e-3 of the closed form");
    for row in paths::uniform_convexity_modulus(&NormDescriptor::l2(), 2, &[0.5, 1.0, 1.5], 2048)? {
        let exact = paths::l2_modulus(row.eps);
        modulus.record((row.delta - exact).abs() <= 1e-3, || format!("eps={} delta={} exact={exact}", row.eps, row.delta));
    }
    let mut strict = Tally::new("strict convexity witnesses");
    for (name, norm, expect) in [
        ("l1", NormDescriptor::l1(), true),
        ("linf", NormDescriptor::linf(), true),
        ("l2", NormDescriptor::l2(), false),
    ] {
        let w = paths::strict_convexity_witness(&norm, 2, 1024, 1e-9)?;
        strict.record(w.is_some() == expect, || format!("{name}: {w:?}"));
    }
    Ok(vec![var.done(), additive.done(), stieltjes.done(), dominated.done(), modulus.done(), strict.done()])
}
