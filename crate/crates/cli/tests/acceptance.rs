//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints exactly one result line; exits non-zero if any fails.

use std::time::Instant;

use fsadiff::generate::{random_automaton, random_automaton_with, RandomSpec, RandomWeight};
use fsadiff::oracle::{
    brute_weight, count_shortest_distance_ops, count_weight_ops, fd_gradient, fixed_point_rhs,
    subgradient_reference, Param,
};
use fsadiff::semiring::{close, elem_close};
use fsadiff::tape::{record_dot, record_weight};
use fsadiff::text::{parse_fsa, write_fsa};
use fsadiff::wfsa::Forward;
use fsadiff::{
    dot, dot_vjp, Automaton, AutomatonGradients, Cotangent, Counted, CountedValue, Error,
    ExpectationValue, Log, LogExpectation, LogKappa, OpCounter, Pair, Real, Semiring,
    SemiringVector,
};
use fsadiff_cli::{cmd_bench, BenchRow, CountingAlloc};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[global_allocator]
static GLOBAL: CountingAlloc = CountingAlloc;

/// Random streams are derived from `ACCEPTANCE_SEED` (default 0) and the
/// criterion number.
fn rng_for(criterion: u64) -> StdRng {
    let base: u64 = std::env::var("ACCEPTANCE_SEED")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(0);
    StdRng::seed_from_u64(base.wrapping_mul(1000).wrapping_add(criterion))
}

const EXAMPLE: &str = include_str!("../../../data/example.fsa");

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(failures: &[String], summary: String) -> Self {
        let detail = match failures.first() {
            None => summary,
            Some(f) => format!("{summary}; {} failures, first: {f}", failures.len()),
        };
        Self {
            pass: failures.is_empty(),
            detail,
        }
    }
}

fn param_grad<C: Copy>(g: &AutomatonGradients<C>, p: Param) -> C {
    match p {
        Param::Initial(q) => g.grad_initial[q],
        Param::Final(q) => g.grad_final[q],
        Param::Arc(e) => g.grad_arcs[e],
    }
}

fn all_grads<C: Copy>(g: &AutomatonGradients<C>) -> impl Iterator<Item = C> + '_ {
    g.grad_initial
        .iter()
        .chain(&g.grad_final)
        .chain(&g.grad_arcs)
        .copied()
}

/// Relative closeness, or bit equality when `tol == 0`.
fn cot_eq<C: Cotangent>(a: C, b: C, tol: f64) -> bool {
    (0..C::DIM).all(|k| {
        let (x, y) = (a.coord(k), b.coord(k));
        if tol == 0.0 {
            x == y
        } else {
            close(x, y, tol)
        }
    })
}

fn seeds<S: Semiring>() -> Vec<S::Cotangent> {
    (0..S::Cotangent::DIM).map(S::Cotangent::unit).collect()
}

// 1. flattened gradients against central finite differences

fn fd_suite<S: RandomWeight>(s: &S, rng: &mut StdRng, count: usize, failures: &mut Vec<String>) -> usize {
    let spec = RandomSpec::default();
    let mut compared = 0;
    for inst in 0..count {
        let a = random_automaton(s, rng, &spec);
        let fwd = Forward::evaluate(&a).expect("sorted");
        for (o, seed) in seeds::<S>().into_iter().enumerate() {
            let g = fwd.backward(&a, seed).expect("backward");
            for p in Param::all(&a) {
                let analytic = param_grad(&g, p);
                for k in 0..S::Cotangent::DIM {
                    match fd_gradient(&a, p, k, o, None) {
                        Ok(est) => {
                            compared += 1;
                            if !close(analytic.coord(k), est.central, 1e-5) {
                                failures.push(format!(
                                    "{} #{inst} {p:?}[{k}] seed {o}: {} vs {}",
                                    s.name(),
                                    analytic.coord(k),
                                    est.central
                                ));
                            }
                        }
                        Err(Error::Domain(_)) => {}
                        Err(e) => failures.push(format!("{} #{inst} {p:?}: {e}", s.name())),
                    }
                }
            }
        }
    }
    compared
}

fn criterion_1() -> Outcome {
    let mut rng = rng_for(1);
    let mut failures = Vec::new();
    let mut compared = fd_suite(&Real, &mut rng, 100, &mut failures);
    for tau in [0.5, 1.0, 2.0] {
        compared += fd_suite(&Log::new(tau).unwrap(), &mut rng, 100, &mut failures);
    }
    for kappa in [0.25, 0.5, 1.0] {
        compared += fd_suite(&LogKappa::new(kappa).unwrap(), &mut rng, 100, &mut failures);
    }
    compared += fd_suite(&LogExpectation, &mut rng, 100, &mut failures);
    Outcome::new(
        &failures,
        format!("{compared} gradient coordinates over 800 automata within 1e-5"),
    )
}

// 2. flattened VJPs against the tape

fn tape_suite<S: RandomWeight>(
    s: &S,
    rng: &mut StdRng,
    count: usize,
    tol: f64,
    failures: &mut Vec<String>,
) -> usize {
    let spec = RandomSpec::default();
    let mut compared = 0;
    for inst in 0..count {
        let a = random_automaton(s, rng, &spec);
        let fwd = Forward::evaluate(&a).expect("sorted");
        let rec = record_weight(&a).expect("record");
        if rec.nu != fwd.nu {
            failures.push(format!("{} #{inst}: primal differs", s.name()));
        }
        for seed in seeds::<S>() {
            let g = fwd.backward(&a, seed).expect("backward");
            let t = rec.gradients(seed).expect("tape");
            let tape = t
                .grad_initial
                .iter()
                .chain(&t.grad_final)
                .chain(&t.grad_arcs)
                .copied();
            for (x, y) in all_grads(&g).zip(tape) {
                compared += 1;
                if !cot_eq(x, y, tol) {
                    failures.push(format!("{} #{inst}: weight {x:?} vs tape {y:?}", s.name()));
                }
            }
        }

        let k = rng.gen_range(0..=64);
        let x = SemiringVector::new(s.clone(), (0..k).map(|_| s.random_weight(rng)).collect());
        let y = SemiringVector::new(s.clone(), (0..k).map(|_| s.random_weight(rng)).collect());
        let z = dot(&x, &y).expect("dot");
        let (tz, tape) = record_dot(&x, &y).expect("record");
        if z != tz {
            failures.push(format!("{} dot #{inst}: primal differs", s.name()));
        }
        for seed in seeds::<S>() {
            let (gx, gy) = dot_vjp(&x, &y, z, seed).expect("dot_vjp");
            let t = tape.backward(seed).expect("tape");
            for (a, b) in gx.iter().chain(&gy).zip(&t) {
                compared += 1;
                if !cot_eq(*a, *b, tol) {
                    failures.push(format!("{} dot #{inst}: {a:?} vs tape {b:?}", s.name()));
                }
            }
        }
    }
    compared
}

fn criterion_2() -> Outcome {
    let mut rng = rng_for(2);
    let mut failures = Vec::new();
    let tol = 1e-10;
    let mut compared = tape_suite(&Real, &mut rng, 100, tol, &mut failures);
    for tau in [0.5, 1.0, 2.0] {
        compared += tape_suite(&Log::new(tau).unwrap(), &mut rng, 100, tol, &mut failures);
    }
    for kappa in [0.25, 0.5, 1.0] {
        compared += tape_suite(&LogKappa::new(kappa).unwrap(), &mut rng, 100, tol, &mut failures);
    }
    compared += tape_suite(&LogExpectation, &mut rng, 100, tol, &mut failures);
    // integer weights make ties frequent; the tape multiplies count ratios
    // along the chain, so only the fixtures can be compared bit for bit
    let ties = tape_suite(&Counted::tropical(), &mut rng, 100, 1e-12, &mut failures)
        + tape_suite(&Counted::arctic(), &mut rng, 100, 1e-12, &mut failures);
    let mut exact = 0;
    for s in [Counted::tropical(), Counted::arctic()] {
        for a in [
            counted_diamond(s, [1.0, 2.0, 3.0, 2.0]),
            counted_diamond(s, [1.0, 2.0, 3.0, 5.0]),
            shared_arc_fixture(s),
        ] {
            let g = Forward::evaluate(&a).unwrap().backward(&a, 1.0).unwrap();
            let t = record_weight(&a).unwrap().gradients(1.0).unwrap();
            exact += g.grad_arcs.len();
            if g.grad_arcs != t.grad_arcs
                || g.grad_initial != t.grad_initial
                || g.grad_final != t.grad_final
            {
                failures.push(format!("{} fixture: {:?} vs tape {:?}", s.name(), g.grad_arcs, t.grad_arcs));
            }
        }
    }
    Outcome::new(
        &failures,
        format!(
            "{compared} coordinates within 1e-10, {ties} random counted coordinates within 1e-12, \
             {exact} fixture arcs bit-equal"
        ),
    )
}

// 3. weight and tropical gradients against path enumeration

const MAX_PATHS: usize = 10_000;

fn brute_suite<S: RandomWeight>(
    s: &S,
    rng: &mut StdRng,
    count: usize,
    failures: &mut Vec<String>,
) -> (usize, usize) {
    let small = RandomSpec {
        max_states: 15,
        max_arcs: 40,
        ..RandomSpec::default()
    };
    let exact = s.tie_count(s.one()).is_some();
    let (mut compared, mut skipped) = (0, 0);
    for inst in 0..count {
        let spec = if inst % 4 == 0 { RandomSpec::default() } else { small };
        let a = random_automaton(s, rng, &spec);
        let nu = Forward::evaluate(&a).expect("sorted").nu;
        match brute_weight(&a, MAX_PATHS) {
            Ok(b) => {
                compared += 1;
                let ok = if exact { b == nu } else { elem_close(s, b, nu, 1e-9) };
                if !ok {
                    failures.push(format!(
                        "{} #{inst}: {} vs brute {}",
                        s.name(),
                        s.format_elem(nu),
                        s.format_elem(b)
                    ));
                }
            }
            Err(Error::PathExplosion { .. }) => skipped += 1,
            Err(e) => failures.push(format!("{} #{inst}: {e}", s.name())),
        }
    }
    (compared, skipped)
}

fn counted_diamond(s: Counted, w: [f64; 4]) -> Automaton<Counted> {
    let mut a = Automaton::new(s, 4);
    for (e, (o, d)) in [(0, 1), (0, 2), (1, 3), (2, 3)].into_iter().enumerate() {
        a.add_arc(o, d, e as u32 + 1, CountedValue::new(w[e], 1.0)).unwrap();
    }
    a.set_initial(0, s.one()).unwrap();
    a.set_final(3, s.one()).unwrap();
    a
}

fn shared_arc_fixture(s: Counted) -> Automaton<Counted> {
    let c = |v| CountedValue::new(v, 1.0);
    let mut a = Automaton::new(s, 5);
    a.add_arc(0, 1, 1, c(1.0)).unwrap();
    a.add_arc(1, 2, 2, c(1.0)).unwrap();
    a.add_arc(1, 3, 3, c(2.0)).unwrap();
    a.add_arc(2, 4, 4, c(2.0)).unwrap();
    a.add_arc(3, 4, 5, c(1.0)).unwrap();
    a.set_initial(0, s.one()).unwrap();
    a.set_final(4, s.one()).unwrap();
    a
}

/// Compares every parameter's gradient with the averaged subgradient.
fn subgradient_match(a: &Automaton<Counted>, tol: f64, label: &str, failures: &mut Vec<String>) -> usize {
    let g = Forward::evaluate(a).unwrap().backward(a, 1.0).unwrap();
    let mut n = 0;
    for p in Param::all(a) {
        let want = match subgradient_reference(a, p, MAX_PATHS) {
            Ok(v) => v,
            Err(_) => return n,
        };
        let got = param_grad(&g, p);
        n += 1;
        let ok = if tol == 0.0 { got == want } else { close(got, want, tol) };
        if !ok {
            failures.push(format!("{label} {p:?}: {got} vs subgradient {want}"));
        }
    }
    n
}

fn criterion_3() -> Outcome {
    let mut rng = rng_for(3);
    let mut failures = Vec::new();
    let mut totals = (0, 0);
    let mut add = |(c, s): (usize, usize)| {
        totals.0 += c;
        totals.1 += s;
    };
    add(brute_suite(&Real, &mut rng, 100, &mut failures));
    add(brute_suite(&Log::default(), &mut rng, 100, &mut failures));
    add(brute_suite(&LogKappa::default(), &mut rng, 100, &mut failures));
    add(brute_suite(&LogExpectation, &mut rng, 100, &mut failures));
    add(brute_suite(&Counted::tropical(), &mut rng, 100, &mut failures));
    add(brute_suite(&Counted::arctic(), &mut rng, 100, &mut failures));

    let mut fixtures = 0;
    for s in [Counted::tropical(), Counted::arctic()] {
        let tied = counted_diamond(s, [1.0, 2.0, 3.0, 2.0]);
        let g = Forward::evaluate(&tied).unwrap().backward(&tied, 1.0).unwrap();
        if g.grad_arcs != vec![0.5; 4] {
            failures.push(format!("{} tied diamond: {:?}", s.name(), g.grad_arcs));
        }
        let shared = shared_arc_fixture(s);
        let g = Forward::evaluate(&shared).unwrap().backward(&shared, 1.0).unwrap();
        if g.grad_arcs != vec![1.0, 0.5, 0.5, 0.5, 0.5] {
            failures.push(format!("{} shared arc: {:?}", s.name(), g.grad_arcs));
        }
        let unique = counted_diamond(s, [1.0, 2.0, 3.0, 5.0]);
        fixtures += subgradient_match(&tied, 0.0, "tied diamond", &mut failures);
        fixtures += subgradient_match(&shared, 0.0, "shared arc", &mut failures);
        fixtures += subgradient_match(&unique, 0.0, "unique optimum", &mut failures);
    }
    let small = RandomSpec {
        max_states: 15,
        max_arcs: 40,
        ..RandomSpec::default()
    };
    let mut random_ties = 0;
    for inst in 0..100 {
        let s = if inst % 2 == 0 { Counted::tropical() } else { Counted::arctic() };
        let a = random_automaton(&s, &mut rng, &small);
        random_ties += subgradient_match(&a, 1e-12, &format!("random #{inst}"), &mut failures);
    }
    Outcome::new(
        &failures,
        format!(
            "{} automata match enumeration ({} over {MAX_PATHS} paths skipped); \
             {fixtures} fixture and {random_ties} random subgradients match",
            totals.0, totals.1
        ),
    )
}

// 4. allocation flatness and timing of the benchmark

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

fn criterion_4() -> Outcome {
    let repeats: Vec<usize> = (0..=8).map(|i| 1 << i).collect();
    let rows: Vec<BenchRow> = match cmd_bench(&Log::default(), EXAMPLE, &repeats, 5) {
        Ok(r) => r,
        Err(e) => {
            return Outcome {
                pass: false,
                detail: e.message,
            }
        }
    };
    let mut failures = Vec::new();
    let first = rows[0];
    let last = rows[rows.len() - 1];
    if rows.iter().any(|r| r.rule_allocs != first.rule_allocs) {
        let v: Vec<_> = rows.iter().map(|r| r.rule_allocs).collect();
        failures.push(format!("rule_allocs not constant: {v:?}"));
    }
    let ks: Vec<f64> = rows.iter().map(|r| r.k as f64).collect();
    let naive: Vec<f64> = rows.iter().map(|r| r.naive_allocs as f64).collect();
    let min_step = rows
        .windows(2)
        .map(|w| (w[1].naive_allocs as f64 - w[0].naive_allocs as f64) / (w[1].k - w[0].k) as f64)
        .fold(f64::INFINITY, f64::min);
    if min_step <= 0.5 {
        failures.push(format!("naive_allocs grows by only {min_step:.3} per unit K"));
    }
    for r in &rows {
        if r.rule_s > 10.0 * r.forward_s {
            failures.push(format!(
                "K={}: rule {:.3e}s exceeds 10x forward {:.3e}s",
                r.k, r.rule_s, r.forward_s
            ));
        }
    }
    let ratios: Vec<f64> = rows.iter().map(|r| r.naive_s / r.forward_s).collect();
    let log_k: Vec<f64> = ks.iter().map(|k| k.ln()).collect();
    let ratio_slope = slope(&log_k, &ratios);
    let (r0, r1) = (ratios[0], ratios[ratios.len() - 1]);
    if !(r1 > r0 && ratio_slope > 0.0) {
        failures.push(format!(
            "naive/forward ratio does not grow: {r0:.2} at K={} to {r1:.2} at K={}, slope {ratio_slope:.3} per ln K",
            first.k, last.k
        ));
    }
    let max_rule = rows
        .iter()
        .map(|r| r.rule_s / r.forward_s)
        .fold(0.0, f64::max);
    Outcome::new(
        &failures,
        format!(
            "K {}..{}: rule_allocs {} throughout, naive_allocs {}..{} (slope {:.2}/K), \
             rule/forward <= {max_rule:.2}, naive/forward {r0:.2} -> {r1:.2}",
            first.k,
            last.k,
            first.rule_allocs,
            first.naive_allocs,
            last.naive_allocs,
            slope(&ks, &naive)
        ),
    )
}

// 5. operation counts

fn map_automaton<S: Semiring, T: Semiring>(
    a: &Automaton<S>,
    t: &T,
    mut f: impl FnMut(S::Elem) -> T::Elem,
) -> Automaton<T> {
    let mut b = Automaton::new(t.clone(), a.num_states());
    for arc in a.arcs() {
        b.add_arc(arc.origin, arc.dest, arc.label, f(arc.weight)).unwrap();
    }
    for (&q, &w) in a.initial() {
        b.set_initial(q, f(w)).unwrap();
    }
    for (&q, &w) in a.finals() {
        b.set_final(q, f(w)).unwrap();
    }
    b
}

fn op_check<S: Semiring>(a: &Automaton<S>, failures: &mut Vec<String>) -> OpCounter {
    let fwd = Forward::evaluate(a).unwrap();
    let m = fwd.matrix.transitions.nnz() as u64;
    let q = a.num_states() as u64;
    let sd = count_shortest_distance_ops(&fwd.matrix.transitions, &fwd.matrix.alpha).unwrap();
    if sd.plus != m || sd.times != m {
        failures.push(format!("{}: shortest distance {sd:?} for {m} entries", a.semiring().name()));
    }
    let w = count_weight_ops(a).unwrap();
    if w.plus > m + 2 * q || w.times > m + 2 * q {
        failures.push(format!("{}: weight {w:?} exceeds m + 2Q = {}", a.semiring().name(), m + 2 * q));
    }
    w
}

fn criterion_5() -> Outcome {
    let mut rng = rng_for(5);
    let mut failures = Vec::new();
    let spec = RandomSpec::default();
    let mut entries = 0;
    for inst in 0..100 {
        let a = random_automaton(&Log::default(), &mut rng, &spec);
        entries += build_nnz(&a);
        let reference = op_check(&a, &mut failures);
        let others = [
            op_check(&a.clone().rebind(Real), &mut failures),
            op_check(&a.clone().rebind(LogKappa::default()), &mut failures),
            op_check(&map_automaton(&a, &LogExpectation, |w| ExpectationValue::new(w, w)), &mut failures),
            op_check(&map_automaton(&a, &Counted::tropical(), |w| CountedValue::new(w, 1.0)), &mut failures),
        ];
        if others.iter().any(|o| *o != reference) {
            failures.push(format!("#{inst}: counts differ across semirings"));
        }
    }
    Outcome::new(
        &failures,
        format!("100 automata, {entries} stored entries, one op of each kind per entry"),
    )
}

fn build_nnz<S: Semiring>(a: &Automaton<S>) -> usize {
    fsadiff::build_matrix(a).unwrap().transitions.nnz()
}

// 6. algebraic properties

const CASES: usize = 1000;

fn axiom_suite<S: Semiring>(
    s: &S,
    tol: f64,
    mut sample: impl FnMut() -> S::Elem,
    failures: &mut Vec<String>,
) {
    let eq = |a: S::Elem, b: S::Elem| if tol == 0.0 { a == b } else { elem_close(s, a, b, tol) };
    let (z, o) = (s.zero(), s.one());
    for _ in 0..CASES {
        let (x, y, w) = (sample(), sample(), sample());
        let checks = [
            ("plus commutes", eq(s.plus(x, y), s.plus(y, x))),
            ("plus associates", eq(s.plus(s.plus(x, y), w), s.plus(x, s.plus(y, w)))),
            ("times associates", eq(s.times(s.times(x, y), w), s.times(x, s.times(y, w)))),
            (
                "left distributivity",
                eq(s.times(x, s.plus(y, w)), s.plus(s.times(x, y), s.times(x, w))),
            ),
            (
                "right distributivity",
                eq(s.times(s.plus(y, w), x), s.plus(s.times(y, x), s.times(w, x))),
            ),
            ("zero absorbs", s.times(z, x) == z && s.times(x, z) == z),
            ("zero is neutral", s.plus(z, x) == x && s.plus(x, z) == x),
            ("one is neutral", eq(s.times(o, x), x) && eq(s.times(x, o), x)),
        ];
        for (name, ok) in checks {
            if !ok {
                failures.push(format!("{}: {name} fails at {x:?}, {y:?}, {w:?}", s.name()));
            }
        }
    }
}

trait Coords: Copy {
    fn coords(self) -> Vec<f64>;
}

impl Coords for f64 {
    fn coords(self) -> Vec<f64> {
        vec![self]
    }
}

impl Coords for Pair {
    fn coords(self) -> Vec<f64> {
        vec![self.0, self.1]
    }
}

fn morphism_suite<S>(s: &S, mut sample: impl FnMut() -> S::Elem, failures: &mut Vec<String>)
where
    S: Semiring,
    S::Image: Coords,
{
    match s.morphism(s.zero()) {
        Ok(m) if m == s.image_zero() => {}
        other => failures.push(format!("{}: mu(zero) = {other:?}", s.name())),
    }
    for _ in 0..CASES {
        let (x, y) = (sample(), sample());
        let lhs = s.morphism(s.plus(x, y)).unwrap().coords();
        let rhs = (s.morphism(x).unwrap() + s.morphism(y).unwrap()).coords();
        if lhs
            .iter()
            .zip(&rhs)
            .any(|(l, r)| (l - r).abs() > 1e-10 * (1.0 + r.abs()))
        {
            failures.push(format!("{}: morphism law at {x:?}, {y:?}", s.name()));
        }
        let back = s.morphism_inv(s.morphism(x).unwrap()).unwrap();
        if !elem_close(s, back, x, 1e-10) {
            failures.push(format!("{}: round trip {x:?} -> {back:?}", s.name()));
        }
    }
}

fn fixed_point_suite<S: RandomWeight>(s: &S, rng: &mut StdRng, failures: &mut Vec<String>) {
    let spec = RandomSpec::default();
    for inst in 0..CASES {
        let a = random_automaton(s, rng, &spec);
        let fwd = Forward::evaluate(&a).unwrap();
        let rhs = fixed_point_rhs(&fwd.matrix.transitions, &fwd.matrix.alpha, &fwd.distances);
        let exact = s.tie_count(s.one()).is_some();
        for (i, (&r, &d)) in rhs.iter().zip(fwd.distances.as_slice()).enumerate() {
            let ok = if exact { r == d } else { elem_close(s, r, d, 1e-10) };
            if !ok {
                failures.push(format!("{} #{inst}: d[{i}] = {d:?} but rhs = {r:?}", s.name()));
            }
        }
    }
}

fn criterion_6() -> Outcome {
    let mut failures = Vec::new();
    let mut rng = rng_for(6);
    let r = &mut rng;

    // small integers keep Real and tropical arithmetic exact
    let real = Real;
    axiom_suite(&real, 0.0, || r.gen_range(-20..=20) as f64, &mut failures);
    for s in [Counted::tropical(), Counted::arctic()] {
        axiom_suite(
            &s,
            0.0,
            || CountedValue::new(r.gen_range(-5..=5) as f64, r.gen_range(1..=3) as f64),
            &mut failures,
        );
    }
    for tau in [0.5, 1.0, 2.0] {
        let s = Log::new(tau).unwrap();
        axiom_suite(&s, 1e-9, || r.gen_range(-5.0..5.0), &mut failures);
        morphism_suite(&s, || r.gen_range(-5.0..5.0), &mut failures);
    }
    for kappa in [0.25, 0.5, 1.0] {
        let s = LogKappa::new(kappa).unwrap();
        axiom_suite(&s, 1e-9, || r.gen_range(-5.0..5.0), &mut failures);
        morphism_suite(&s, || r.gen_range(-5.0..5.0), &mut failures);
    }
    let le = LogExpectation;
    axiom_suite(
        &le,
        1e-9,
        || ExpectationValue::new(r.gen_range(-5.0..5.0), r.gen_range(-3.0..3.0)),
        &mut failures,
    );
    morphism_suite(
        &le,
        || ExpectationValue::new(r.gen_range(-5.0..5.0), r.gen_range(-3.0..3.0)),
        &mut failures,
    );
    morphism_suite(&real, || r.gen_range(-100.0..100.0), &mut failures);

    fixed_point_suite(&Real, &mut rng, &mut failures);
    fixed_point_suite(&Log::default(), &mut rng, &mut failures);
    fixed_point_suite(&LogKappa::default(), &mut rng, &mut failures);
    fixed_point_suite(&LogExpectation, &mut rng, &mut failures);
    fixed_point_suite(&Counted::tropical(), &mut rng, &mut failures);
    fixed_point_suite(&Counted::arctic(), &mut rng, &mut failures);
    Outcome::new(
        &failures,
        format!("{CASES} cases per property and semiring (axioms, morphism, round trip, fixed point)"),
    )
}

// 7. small-κ limit

fn criterion_7() -> Outcome {
    let mut rng = rng_for(7);
    let k = LogKappa::new(1e-4).unwrap();
    let l = Log::default();
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    let mut check = |what: &str, a: f64, b: f64, failures: &mut Vec<String>| {
        let d = (a - b).abs();
        worst = worst.max(d);
        if !(d <= 1e-3) {
            failures.push(format!("{what}: {a} vs {b}"));
        }
    };
    for _ in 0..CASES {
        let x = rng.gen_range(-5.0..5.0);
        let y = rng.gen_range(-5.0..5.0);
        check("plus", k.plus(x, y), l.plus(x, y), &mut failures);
        check("times", k.times(x, y), l.times(x, y), &mut failures);
        let (ka, kb) = k.vjp_plus(x, y, 1.0);
        let (la, lb) = l.vjp_plus(x, y, 1.0);
        check("plus partials", ka, la, &mut failures);
        check("plus partials", kb, lb, &mut failures);
        check("times partial", k.vjp_times_left(x, y, 1.0), 1.0, &mut failures);
        check("times partial", k.vjp_times_right(x, y, 1.0), 1.0, &mut failures);
    }
    let spec = RandomSpec {
        max_states: 8,
        max_arcs: 16,
        ..RandomSpec::default()
    };
    for inst in 0..100 {
        let a = random_automaton_with(&l, &mut rng, &spec, |_, r| r.gen_range(-5.0..5.0));
        let b = a.clone().rebind(k);
        let fa = Forward::evaluate(&a).unwrap();
        let fb = Forward::evaluate(&b).unwrap();
        check(&format!("weight #{inst}"), fa.nu, fb.nu, &mut failures);
        let ga = fa.backward(&a, 1.0).unwrap();
        let gb = fb.backward(&b, 1.0).unwrap();
        for (x, y) in all_grads(&ga).zip(all_grads(&gb)) {
            check(&format!("gradient #{inst}"), x, y, &mut failures);
        }
    }
    Outcome::new(
        &failures,
        format!("largest deviation {worst:.2e} on operations, partials and automaton gradients"),
    )
}

// 8. text round trip

fn round_trip_suite<S: RandomWeight>(
    s: &S,
    rng: &mut StdRng,
    special: &[S::Elem],
    failures: &mut Vec<String>,
) {
    let spec = RandomSpec {
        shuffle: true,
        ..RandomSpec::default()
    };
    for inst in 0..50 {
        let a = random_automaton_with(s, rng, &spec, |s, r| {
            if !special.is_empty() && r.gen_bool(0.05) {
                special[r.gen_range(0..special.len())]
            } else {
                s.random_weight(r)
            }
        });
        let text = write_fsa(&a);
        match parse_fsa(s, &text) {
            Ok(p) if p.automaton == a => {}
            Ok(_) => failures.push(format!("{} #{inst}: parsed automaton differs", s.name())),
            Err(e) => failures.push(format!("{} #{inst}: {e}", s.name())),
        }
    }
}

fn criterion_8() -> Outcome {
    let mut rng = rng_for(8);
    let mut failures = Vec::new();
    let inf = f64::INFINITY;
    round_trip_suite(&Real, &mut rng, &[0.0, -0.0, 1e-300, 1.0 / 3.0], &mut failures);
    round_trip_suite(&Log::default(), &mut rng, &[-inf, inf, 0.1 + 0.2], &mut failures);
    round_trip_suite(&LogKappa::default(), &mut rng, &[-inf, 5e-324], &mut failures);
    round_trip_suite(
        &LogExpectation,
        &mut rng,
        &[ExpectationValue::new(-inf, 0.0), ExpectationValue::new(1e17, -2.5e-8)],
        &mut failures,
    );
    round_trip_suite(
        &Counted::tropical(),
        &mut rng,
        &[CountedValue::new(inf, 0.0), CountedValue::new(0.5, 7.0)],
        &mut failures,
    );
    round_trip_suite(
        &Counted::arctic(),
        &mut rng,
        &[CountedValue::new(-inf, 0.0), CountedValue::new(-1.25, 2.0)],
        &mut failures,
    );
    Outcome::new(&failures, "50 automata per weight syntax, 6 syntaxes".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("gradients match finite differences", criterion_1),
        ("flattened VJPs match the tape", criterion_2),
        ("weights match path enumeration", criterion_3),
        ("allocation flatness and timing", criterion_4),
        ("operation counts", criterion_5),
        ("algebraic properties", criterion_6),
        ("small kappa limit", criterion_7),
        ("text round trip", criterion_8),
    ];
    let mut all = true;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        all &= out.pass;
        println!(
            "criterion {} {name}: {} ({:.1}s) {}",
            i + 1,
            if out.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            out.detail
        );
    }
    if !all {
        std::process::exit(1);
    }
}
