//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails.

mod common;

use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use common::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use seriesolve::residual::{linear_residual, scalar_residual, shifted_residual};
use seriesolve::{
    dac, newton, nonlinear, oracle, poly, special, Field, Matrix, Monomial, NonlinearEvaluator, OpCounter, PrimeField, Rationals, Ring, Series,
    SeriesMatrix, SparsePolySystem,
};

type Fp = seriesolve::Fp;
type Outcome = std::result::Result<String, String>;

fn ensure(ok: bool, what: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn err<E: std::fmt::Display>(ctx: &str) -> impl Fn(E) -> String + '_ {
    move |e| format!("{ctx}: {e}")
}

// ---------------------------------------------------------------------------
// criteria 1 and 2: one random instance per (seed, r, N)

#[derive(Default)]
struct Tally {
    oracle: Vec<String>,
    residual: Vec<String>,
    solves: usize,
}

impl Tally {
    fn same<T: PartialEq>(&mut self, what: &str, fast: &T, slow: &T) {
        self.solves += 1;
        if fast != slow {
            self.oracle.push(what.to_string());
        }
    }

    fn zero(&mut self, what: &str, ok: bool) {
        if !ok {
            self.residual.push(what.to_string());
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.oracle.extend(other.oracle);
        self.residual.extend(other.residual);
        self.solves += other.solves;
        self
    }
}

/// Scalar equation of order `r` with unit leading constant term.
fn scalar_equation(k: &PrimeField, g: &mut ChaCha8Rng, r: usize, len: usize) -> Vec<Series<Fp>> {
    let mut a: Vec<_> = (0..=r).map(|_| series(k, g, len)).collect();
    a[r].coeffs_mut()[0] = k.from_u64(g.gen_range(1..P));
    a
}

/// Sparse quadratic system: up to three terms per equation.
fn quadratic_system(k: &PrimeField, g: &mut ChaCha8Rng, r: usize) -> SparsePolySystem<Fp> {
    let eqs = (0..r)
        .map(|_| {
            (0..g.gen_range(1..=3))
                .map(|_| {
                    let mut y_exps = vec![0u32; r];
                    for _ in 0..g.gen_range(0..=2) {
                        y_exps[g.gen_range(0..r)] += 1;
                    }
                    Monomial {
                        coeff: k.from_u64(g.gen_range(1..P)),
                        t_exp: g.gen_range(0..=2),
                        y_exps,
                    }
                })
                .collect()
        })
        .collect();
    SparsePolySystem::new(k, eqs).unwrap()
}

fn instance(seed: u64, r: usize, n: usize) -> Tally {
    let ring = ring();
    let k = ring.field();
    let mut g = rng(seed * 1_000_003 + (r as u64) * 1_009 + n as u64);
    let mut t = Tally::default();
    let tag = |name: &str| format!("{name} seed={seed} r={r} N={n}");
    let run = |t: &mut Tally, name: &str, f: &mut dyn FnMut(&mut Tally) -> seriesolve::Result<()>| {
        if let Err(e) = f(t) {
            t.oracle.push(format!("{}: {e}", tag(name)));
        }
    };

    // I, Newton
    run(&mut t, "newton I", &mut |t| {
        let a = matrix(k, &mut g, r, r, n - 1);
        let y0 = invertible(k, &mut g, r);
        let hom = newton::solve_hom(&ring, &a, n, &y0)?;
        t.same(&tag("newton I"), &hom.y, &oracle::naive_solve_I(&ring, &a, n, &y0)?);
        t.zero(&tag("newton I Y'-AY"), ring.mat_is_zero(&linear_residual(&ring, &a, None, &hom.y, n - 1)?));
        let half = n / 2;
        t.zero(&tag("newton I YZ-I"), ring.mat_mul(&hom.y, &hom.z, half)? == ring.identity_matrix(r, half));
        Ok(())
    });

    // II, divide and conquer; also the shifted equation with a random p
    run(&mut t, "dac II", &mut |t| {
        let a = matrix(k, &mut g, r, r, n - 1);
        let b = matrix(k, &mut g, r, 1, n - 1);
        let v = scalars(k, &mut g, r);
        let y = dac::solve(&ring, &a, &b, n, &v)?;
        t.same(&tag("dac II"), &y, &oracle::naive_solve_II(&ring, &a, Some(&b), n, &v)?);
        t.zero(&tag("dac II y'-Ay-b"), ring.mat_is_zero(&linear_residual(&ring, &a, Some(&b), &y, n - 1)?));
        let p = g.gen_range(1..=n as u64);
        let s = matrix(k, &mut g, r, 1, n);
        let y = dac::divide_and_conquer(&ring, &a, &s, p, n, &v)?;
        t.zero(&tag("dac shifted"), ring.mat_is_zero(&shifted_residual(&ring, &a, &s, p, n, &y)?));
        Ok(())
    });

    // ii, divide and conquer on the companion system
    run(&mut t, "dac ii", &mut |t| {
        let a = scalar_equation(k, &mut g, r, n - 1);
        let rhs = series(k, &mut g, n - 1);
        let alpha = scalars(k, &mut g, r);
        let y = dac::solve_companion(&ring, &a, Some(&rhs), n, &alpha)?;
        t.same(&tag("dac ii"), &y, &oracle::naive_solve_scalar(&ring, &a, Some(&rhs), &alpha, n)?);
        if n > r {
            t.zero(&tag("dac ii residual"), ring.is_zero(&scalar_residual(&ring, &a, Some(&rhs), &y, n - r)?));
        }
        Ok(())
    });

    // constant coefficients
    run(&mut t, "const", &mut |t| {
        let a = const_matrix(k, &mut g, r);
        let dense = ring.constant_matrix(&a, n - 1);
        let v = scalars(k, &mut g, r);
        let y = special::solve_const_II(&ring, &a, &v, n)?;
        t.same(&tag("const II"), &y, &oracle::naive_solve_II(&ring, &dense, None, n, &v)?);
        t.zero(&tag("const II residual"), ring.mat_is_zero(&linear_residual(&ring, &dense, None, &y, n - 1)?));
        let y0 = invertible(k, &mut g, r);
        let y = special::solve_const_I(&ring, &a, &y0, n)?;
        t.same(&tag("const I"), &y, &oracle::naive_solve_I(&ring, &dense, n, &y0)?);
        t.zero(&tag("const I residual"), ring.mat_is_zero(&linear_residual(&ring, &dense, None, &y, n - 1)?));
        let mut coeffs = scalars(k, &mut g, r + 1);
        coeffs[r] = k.from_u64(g.gen_range(1..P));
        let eq: Vec<_> = coeffs.iter().map(|c| ring.constant(c.clone(), n)).collect();
        let alpha = scalars(k, &mut g, r);
        let y = special::solve_const_ii(&ring, &coeffs, &alpha, n)?;
        t.same(&tag("const ii"), &y, &oracle::naive_solve_scalar(&ring, &eq, None, &alpha, n)?);
        if n > r {
            t.zero(&tag("const ii residual"), ring.is_zero(&scalar_residual(&ring, &eq, None, &y, n - r)?));
        }
        Ok(())
    });

    // polynomial coefficients of degree at most 3
    run(&mut t, "polycoeff", &mut |t| {
        let deg = g.gen_range(0..=3);
        let a = matrix(k, &mut g, r, r, deg + 1);
        let b = matrix(k, &mut g, r, 1, deg + 1);
        let v = scalars(k, &mut g, r);
        let y = special::solve_polycoeff_II(&ring, &a, Some(&b), &v, n)?;
        t.same(&tag("polycoeff II"), &y, &oracle::naive_solve_II(&ring, &a, Some(&b), n, &v)?);
        let (pa, pb) = (ring.mat_resize(&a, n - 1), ring.mat_resize(&b, n - 1));
        t.zero(&tag("polycoeff II residual"), ring.mat_is_zero(&linear_residual(&ring, &pa, Some(&pb), &y, n - 1)?));
        let eq = scalar_equation(k, &mut g, r, deg + 1);
        let alpha = scalars(k, &mut g, r);
        let y = special::solve_polycoeff_ii(&ring, &eq, &alpha, n)?;
        t.same(&tag("polycoeff ii"), &y, &oracle::naive_solve_scalar(&ring, &eq, None, &alpha, n)?);
        if n > r {
            t.zero(&tag("polycoeff ii residual"), ring.is_zero(&scalar_residual(&ring, &eq, None, &y, n - r)?));
        }
        Ok(())
    });

    // quadratic non-linear systems
    run(&mut t, "nonlinear", &mut |t| {
        let sys = quadratic_system(k, &mut g, r);
        let v = scalars(k, &mut g, r);
        let y = nonlinear::solve_nonlinear(&ring, &sys, &v, n)?;
        t.same(&tag("nonlinear"), &y, &oracle::picard_solve_nonlinear(&ring, &sys, &v, n)?);
        let dy = ring.mat_resize(&ring.mat_differentiate(&y), n - 1);
        let res = ring.mat_sub(&dy, &sys.value(&ring, &y, n - 1)?)?;
        t.zero(&tag("nonlinear residual"), ring.mat_is_zero(&res));
        Ok(())
    });
    t
}

fn oracle_and_residuals() -> (Outcome, Outcome) {
    let start = Instant::now();
    let grid: Vec<(u64, usize, usize)> = (1..=50u64)
        .flat_map(|s| [1, 2, 4, 8].into_iter().flat_map(move |r| [16, 64, 256].into_iter().map(move |n| (s, r, n))))
        .collect();
    let t = grid
        .par_iter()
        .map(|&(s, r, n)| instance(s, r, n))
        .reduce(Tally::default, Tally::merge);
    let secs = start.elapsed().as_secs_f64();
    let summary = |bad: &[String], what: &str| -> Outcome {
        if bad.is_empty() {
            Ok(format!("{} solves on {} instances, {what} ({secs:.1} s)", t.solves, grid.len()))
        } else {
            Err(format!("{} failures, first: {}", bad.len(), bad[0]))
        }
    };
    let mut first = summary(&t.oracle, "all equal to the reference solvers");
    if first.is_ok() && secs >= 300.0 {
        first = Err(format!("exact but took {secs:.1} s, budget is 300 s"));
    }
    (first, summary(&t.residual, "all residuals zero"))
}

// ---------------------------------------------------------------------------
// criterion 3

fn ratio<F: Field>(k: &F, a: i64, b: u64) -> F::Elem {
    k.mul(&k.from_i64(a), &k.inv(&k.from_u64(b)).unwrap())
}

fn closed_forms_in<F: Field>(k: F, label: &str) -> std::result::Result<(), String> {
    const N: usize = 64;
    let ring = Ring::new(k);
    let k = ring.field();
    let e = err::<seriesolve::Error>(label);
    let inv_fact: Vec<F::Elem> = {
        let mut f = k.one();
        (0..N)
            .map(|i| {
                if i > 0 {
                    f = k.mul(&f, &k.from_u64(i as u64));
                }
                k.inv(&f).unwrap()
            })
            .collect()
    };

    // y' = y
    let exp = Series::from_coeffs(inv_fact.clone());
    let a = ring.constant_matrix(&Matrix::from_vec(1, 1, vec![k.one()]).unwrap(), N - 1);
    let zero = ring.zero_matrix(1, 1, N - 1);
    let one = [k.one()];
    ensure(dac::solve(&ring, &a, &zero, N, &one).map_err(&e)?.component(0) == &exp, || format!("{label}: exp via dac"))?;
    ensure(newton::solve_hom(&ring, &a, N, &ring.identity(1)).map_err(&e)?.y.get(0, 0) == &exp, || format!("{label}: exp via newton"))?;
    let c = Matrix::from_vec(1, 1, vec![k.one()]).unwrap();
    ensure(special::solve_const_II(&ring, &c, &one, N).map_err(&e)?.component(0) == &exp, || format!("{label}: exp via const"))?;

    // rotation: (cos, sin)' = (−sin, cos)
    let (mut cos, mut sin) = (Vec::new(), Vec::new());
    for i in 0..N {
        let sign = |j: usize| if (j / 2) % 2 == 0 { inv_fact[i].clone() } else { k.neg(&inv_fact[i]) };
        cos.push(if i % 2 == 0 { sign(i) } else { k.zero() });
        sin.push(if i % 2 == 1 { sign(i) } else { k.zero() });
    }
    let (cos, sin) = (Series::from_coeffs(cos), Series::from_coeffs(sin));
    let rot = Matrix::from_vec(2, 2, vec![k.zero(), k.neg(&k.one()), k.one(), k.zero()]).unwrap();
    let want = SeriesMatrix::new(2, 2, vec![cos.clone(), ring.neg(&sin), sin.clone(), cos.clone()]).unwrap();
    let dense = ring.constant_matrix(&rot, N - 1);
    ensure(newton::solve_hom(&ring, &dense, N, &ring.identity(2)).map_err(&e)?.y == want, || format!("{label}: rotation via newton"))?;
    ensure(special::solve_const_I(&ring, &rot, &ring.identity(2), N).map_err(&e)? == want, || format!("{label}: rotation via const"))?;

    // y' = y², y(0) = 1
    let sys = SparsePolySystem::parse(k, "dy1 = y1^2", 0).map_err(&e)?;
    let geo = nonlinear::solve_nonlinear(&ring, &sys, &one, N).map_err(&e)?;
    ensure(geo.component(0).coeffs().iter().all(|c| *c == k.one()), || format!("{label}: geometric"))?;

    // y'' = t·y, y(0) = 1, y'(0) = 0
    let mut airy = vec![k.one(), k.zero(), k.zero()];
    for i in 0..N - 3 {
        airy.push(k.mul(&airy[i], &k.inv(&k.from_u64(((i + 2) * (i + 3)) as u64)).unwrap()));
    }
    ensure(airy[3] == ratio(k, 1, 6) && airy[6] == ratio(k, 1, 180), || format!("{label}: Airy closed form"))?;
    let airy = Series::from_coeffs(airy);
    let eq = [ring.resize(&ring.from_i64s(&[0, -1]), N - 1), ring.zero(N - 1), ring.one(N - 1)];
    let alpha = [k.one(), k.zero()];
    let reference = oracle::naive_solve_scalar(&ring, &eq, None, &alpha, N).map_err(&e)?;
    ensure(reference == airy, || format!("{label}: Airy reference solver"))?;
    ensure(dac::solve_companion(&ring, &eq, None, N, &alpha).map_err(&e)? == airy, || format!("{label}: Airy via dac"))?;
    let short = [ring.from_i64s(&[0, -1]), ring.zero(2), ring.one(2)];
    ensure(special::solve_polycoeff_ii(&ring, &short, &alpha, N).map_err(&e)? == airy, || format!("{label}: Airy via polycoeff"))?;
    Ok(())
}

fn closed_forms() -> Outcome {
    closed_forms_in(Rationals, "Q")?;
    closed_forms_in(PrimeField::new(P).unwrap(), "F_p")?;
    Ok("exp, rotation, geometric and Airy at N = 64 over Q and F_p".into())
}

// ---------------------------------------------------------------------------
// criterion 4

fn counted_ring() -> (Ring<PrimeField>, Arc<OpCounter>) {
    let c = Arc::new(OpCounter::with_division_log());
    (Ring::with_counter(PrimeField::new(P).unwrap(), c.clone()), c)
}

fn operation_counts() -> Outcome {
    let mut g = rng(4);
    let mut checked = 0;
    for r in [1, 2, 4, 8] {
        for n in [3, 16, 17, 64, 100, 256, 1000] {
            let (ring, c) = counted_ring();
            let a = matrix(ring.field(), &mut g, r, r, n - 1);
            newton::solve_hom(&ring, &a, n, &ring.identity(r)).map_err(err("solve_hom"))?;
            let rounds = (1..).take_while(|&i| 1usize << i < n).count();
            let snap = c.snapshot();
            ensure(snap.mat_muls == 5 * rounds as u64, || format!("r={r} N={n}: {} products over {rounds} rounds", snap.mat_muls))?;
            if n.is_power_of_two() {
                // round m multiplies at lengths m, m, 2m − 1, 2m − 1 and 2m
                let mut want = std::collections::BTreeMap::new();
                let mut m = 2;
                while m < n {
                    for size in [m, m, 2 * m - 1, 2 * m - 1, 2 * m] {
                        *want.entry((r, size)).or_insert(0u64) += 1;
                    }
                    m *= 2;
                }
                ensure(snap.mat_muls_by_shape == want, || format!("r={r} N={n}: product lengths {:?}", snap.mat_muls_by_shape))?;
            }

            let (ring, c) = counted_ring();
            let b = matrix(ring.field(), &mut g, r, 1, n - 1);
            let v = scalars(ring.field(), &mut g, r);
            dac::solve(&ring, &a, &b, n, &v).map_err(err("dac"))?;
            let divs = c.divisions();
            ensure(!divs.is_empty() && divs.iter().all(|&d| d >= 1 && d < n as u64), || format!("r={r} N={n}: divisors {divs:?}"))?;
            checked += 1;
        }
    }
    Ok(format!("5 products per round and divisors in [1, N-1] on {checked} sizes"))
}

// ---------------------------------------------------------------------------
// criterion 5

fn best_of<T>(reps: usize, mut f: impl FnMut() -> T) -> f64 {
    (0..reps)
        .map(|_| {
            let s = Instant::now();
            std::hint::black_box(f());
            s.elapsed().as_secs_f64()
        })
        .fold(f64::INFINITY, f64::min)
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mx, my) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x.ln() / n, b + y.ln() / n));
    let (num, den) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| {
        let dx = x.ln() - mx;
        (a + dx * (y.ln() - my), b + dx * dx)
    });
    num / den
}

fn scaling() -> Outcome {
    let ring = ring();
    let k = ring.field();
    let mut g = rng(5);
    let r = 4;
    let (mut newton_t, mut dac_t, mut naive_t) = (Vec::new(), Vec::new(), Vec::new());
    for log in 10..=16 {
        let n = 1usize << log;
        let a = matrix(k, &mut g, r, r, n - 1);
        let b = matrix(k, &mut g, r, 1, n - 1);
        let v = scalars(k, &mut g, r);
        let id = ring.identity(r);
        let reps = if log <= 13 { 3 } else { 2 };
        newton_t.push((n as f64, best_of(reps, || newton::solve_hom(&ring, &a, n, &id).unwrap())));
        dac_t.push((n as f64, best_of(reps, || dac::solve(&ring, &a, &b, n, &v).unwrap())));
        if log <= 13 {
            naive_t.push((n as f64, best_of(1, || oracle::naive_solve_I(&ring, &a, n, &id).unwrap())));
        }
    }
    let (sn, sd, so) = (slope(&newton_t), slope(&dac_t), slope(&naive_t));
    let detail = format!("slopes newton {sn:.2}, dac {sd:.2}, naive {so:.2}");
    ensure(sn <= 1.35 && sd <= 1.35 && so >= 1.8, || detail.clone())?;
    for ((n, fast), (_, slow)) in newton_t.iter().zip(&naive_t) {
        ensure(fast < slow, || format!("{detail}; newton {fast:.3} s vs naive {slow:.3} s at N={n}"))?;
    }
    Ok(format!("{detail}; newton ahead of naive at every measured N"))
}

// ---------------------------------------------------------------------------
// criterion 6

fn throughput() -> Outcome {
    let ring = ring();
    let k = ring.field();
    let mut g = rng(6);
    let a = const_matrix(k, &mut g, 8);
    let v = scalars(k, &mut g, 8);
    let n = 1_000_000;
    let t1 = best_of(2, || special::solve_const_II(&ring, &a, &v, n).unwrap());
    let t2 = best_of(2, || special::solve_const_II(&ring, &a, &v, 2 * n).unwrap());
    let detail = format!("N=10^6 in {t1:.2} s, 2*10^6 in {t2:.2} s, ratio {:.2}", t2 / t1);
    ensure(t1 < 120.0 && (1.6..=2.6).contains(&(t2 / t1)), || detail.clone())?;
    Ok(detail)
}

// ---------------------------------------------------------------------------
// criterion 7

fn step_invariants() -> Outcome {
    let ring = ring();
    let k = ring.field();
    let mut g = rng(7);

    for i in 0..200 {
        let r = 1 + i % 5;
        let m = 2 * g.gen_range(1..=32);
        let a = matrix(k, &mut g, r, r, 2 * m);
        let y0 = invertible(k, &mut g, r);
        // inputs from the reference solver: Y correct to order m − 1, Z to m/2
        let y = oracle::naive_solve_I(&ring, &a, m, &y0).map_err(err("oracle"))?;
        let z = ring.mat_series_inverse(&y, m / 2).map_err(err("inverse"))?;
        let (y2, z2) = newton::newton_step(&ring, &y, &z, &a, m).map_err(err("newton_step"))?;
        let ok = ring.mat_mul(&y2, &z2, m).unwrap() == ring.identity_matrix(r, m)
            && ring.mat_is_zero(&linear_residual(&ring, &a, None, &y2, 2 * m - 1).unwrap());
        ensure(ok, || format!("newton_step instance {i} (r={r}, m={m})"))?;
    }

    for i in 0..200 {
        let r = 1 + i % 4;
        let m = g.gen_range(2..=128);
        let p = if i % 3 == 0 { 0 } else { g.gen_range(1..500) };
        let a = matrix(k, &mut g, r, r, m);
        let mut s = matrix(k, &mut g, r, 1, m);
        if p == 0 {
            s = ring.mat_shift(&ring.mat_resize(&s, m - 1), 1);
        }
        let v = scalars(k, &mut g, r);
        let d = m / 2;
        let y = dac::divide_and_conquer(&ring, &a, &s, p, m, &v).map_err(err("dac"))?;
        let lo = dac::divide_and_conquer(&ring, &a, &s, p, d, &v).map_err(err("dac"))?;
        // y = lo + t^d·hi where hi solves the equation shifted by d with
        // right-hand side (s − L_p(lo)) / t^d
        let defect = shifted_residual(&ring, &a, &s, p, m, &lo).unwrap();
        let rest = ring.mat_scale(&k.neg(&k.one()), &defect.mid(d, m).unwrap());
        let hi = dac::divide_and_conquer(&ring, &a, &rest, p + d as u64, m - d, &v).map_err(err("dac"))?;
        let ok = y.low(d).unwrap() == lo
            && y.mid(d, m).unwrap() == hi
            && ring.mat_is_zero(&shifted_residual(&ring, &a, &rest, p + d as u64, m - d, &hi).unwrap())
            && ring.mat_is_zero(&shifted_residual(&ring, &a, &s, p, m, &y).unwrap());
        ensure(ok, || format!("dac split instance {i} (r={r}, m={m}, p={p})"))?;
    }

    for i in 0..100 {
        let r = 1 + i % 6;
        let a = const_matrix(k, &mut g, r);
        let v = scalars(k, &mut g, r);
        let chi = reversed_charpoly(k, &a);
        let block = special::krylov_doubling(&ring, &a, &v).map_err(err("krylov"))?;
        for j in 0..r {
            let f = special::pade(&ring, &block.coordinate(j), r).map_err(err("pade"))?;
            let (_, rem) = poly::divrem(k, &chi, f.denominator());
            ensure(rem.iter().all(|c| k.is_zero(c)), || format!("pade instance {i} (r={r}) coordinate {j}"))?;
        }
    }
    Ok("200 newton steps, 200 dac splits, 100 Padé denominators".into())
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |id: usize, name: &str, outcome: Outcome| {
        match outcome {
            Ok(msg) => println!("PASS  criterion {id} {name}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL  criterion {id} {name}: {msg}");
            }
        }
    };
    let (c1, c2) = oracle_and_residuals();
    report(1, "oracle equivalence", c1);
    report(2, "residuals", c2);
    report(3, "closed forms", closed_forms());
    report(4, "operation counts", operation_counts());
    report(5, "scaling", scaling());
    report(6, "constant-coefficient throughput", throughput());
    report(7, "step invariants", step_invariants());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
