//! First-order non-linear systems `y' = φ(t, y)` by Newton iteration on the
//! linearized equation: each pass solves `z' = Jac(φ)(y)·z + φ(y) − y'` and
//! doubles the number of correct coefficients.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::dac;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::{SeriesMatrix, SeriesVector};
use crate::series::{Ring, Series};

/// `φ` and its Jacobian along a series.
pub trait NonlinearEvaluator<F: Field>: Sync {
    fn arity(&self) -> usize;

    /// `(φ(t, y) mod t^n, Jac(φ)(t, y) mod t^n)`. Must be deterministic.
    fn eval(&self, ring: &Ring<F>, y: &SeriesVector<F::Elem>, n: usize) -> Result<(SeriesVector<F::Elem>, SeriesMatrix<F::Elem>)>;

    /// `φ(t, y) mod t^n` alone.
    fn value(&self, ring: &Ring<F>, y: &SeriesVector<F::Elem>, n: usize) -> Result<SeriesVector<F::Elem>> {
        Ok(self.eval(ring, y, n)?.0)
    }

    /// Estimated operation count `L(n)` of one evaluation, if known.
    fn cost(&self, _n: usize) -> Option<f64> {
        None
    }
}

/// `c · t^e · y_1^{a_1} ⋯ y_r^{a_r}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monomial<E> {
    pub coeff: E,
    pub t_exp: usize,
    pub y_exps: Vec<u32>,
}

/// `r` sparse polynomials in `t, y_1, …, y_r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparsePolySystem<E> {
    arity: usize,
    equations: Vec<Vec<Monomial<E>>>,
    jacobian: Vec<Vec<Monomial<E>>>,
}

impl<E: Clone + PartialEq> SparsePolySystem<E> {
    /// Merges repeated exponents and drops zero terms.
    pub fn new<F: Field<Elem = E>>(k: &F, equations: Vec<Vec<Monomial<E>>>) -> Result<Self> {
        let r = equations.len();
        let mut merged = Vec::with_capacity(r);
        for eq in equations {
            let mut terms: BTreeMap<(usize, Vec<u32>), E> = BTreeMap::new();
            for m in eq {
                if m.y_exps.len() != r {
                    return Err(Error::DimensionMismatch(format!(
                        "monomial in {} variables for a system of {r} equations",
                        m.y_exps.len()
                    )));
                }
                let slot = terms.entry((m.t_exp, m.y_exps)).or_insert_with(|| k.zero());
                *slot = k.add(slot, &m.coeff);
            }
            merged.push(
                terms
                    .into_iter()
                    .filter(|(_, c)| !k.is_zero(c))
                    .map(|((t_exp, y_exps), coeff)| Monomial { coeff, t_exp, y_exps })
                    .collect::<Vec<_>>(),
            );
        }
        let mut jacobian = Vec::with_capacity(r * r);
        for eq in &merged {
            for j in 0..r {
                jacobian.push(
                    eq.iter()
                        .filter(|m| m.y_exps[j] > 0)
                        .map(|m| {
                            let mut y_exps = m.y_exps.clone();
                            y_exps[j] -= 1;
                            Monomial {
                                coeff: k.mul(&m.coeff, &k.from_u64(m.y_exps[j] as u64)),
                                t_exp: m.t_exp,
                                y_exps,
                            }
                        })
                        .filter(|m| !k.is_zero(&m.coeff))
                        .collect(),
                );
            }
        }
        Ok(SparsePolySystem {
            arity: r,
            equations: merged,
            jacobian,
        })
    }

    pub fn equations(&self) -> &[Vec<Monomial<E>>] {
        &self.equations
    }

    /// `∂φ_i/∂y_j`.
    pub fn derivative(&self, i: usize, j: usize) -> &[Monomial<E>] {
        &self.jacobian[i * self.arity + j]
    }

    pub fn monomial_count(&self) -> usize {
        self.equations.iter().map(Vec::len).sum()
    }

    /// Parses lines `dy1 = t + y1^2*y2 - 3*y2`, one per unknown, in any
    /// order. Blank lines and `#` comments are skipped; `line_offset` is
    /// added to reported line numbers.
    pub fn parse<F: Field<Elem = E>>(k: &F, text: &str, line_offset: usize) -> Result<Self> {
        let mut found: BTreeMap<usize, (usize, Vec<Monomial<E>>)> = BTreeMap::new();
        let mut raw = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("");
            if !line.trim().is_empty() {
                raw.push((idx + 1 + line_offset, line));
            }
        }
        let r = raw.len();
        for (lineno, line) in raw {
            let (lhs, rhs) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(lineno, 1, "expected `dyK = ...`"))?;
            let index = lhs
                .trim()
                .strip_prefix("dy")
                .and_then(|s| s.parse::<usize>().ok())
                .filter(|&i| (1..=r).contains(&i))
                .ok_or_else(|| Error::parse(lineno, 1, format!("left-hand side must be dy1..dy{r}")))?;
            let terms = parse_polynomial(k, rhs, r, lineno, lhs.len() + 2)?;
            if found.insert(index, (lineno, terms)).is_some() {
                return Err(Error::parse(lineno, 1, format!("dy{index} defined twice")));
            }
        }
        if r == 0 {
            return Err(Error::parse(line_offset + 1, 1, "no equations"));
        }
        Self::new(k, found.into_values().map(|(_, t)| t).collect())
    }

    /// Inverse of [`SparsePolySystem::parse`].
    pub fn render<F: Field<Elem = E>>(&self, k: &F) -> String {
        let mut out = String::new();
        for (i, eq) in self.equations.iter().enumerate() {
            let _ = write!(out, "dy{} = ", i + 1);
            if eq.is_empty() {
                out.push('0');
            }
            for (idx, m) in eq.iter().enumerate() {
                if idx > 0 {
                    out.push_str(" + ");
                }
                out.push_str(&k.format(&m.coeff));
                if m.t_exp > 0 {
                    out.push_str("*t");
                    if m.t_exp > 1 {
                        let _ = write!(out, "^{}", m.t_exp);
                    }
                }
                for (j, &e) in m.y_exps.iter().enumerate() {
                    if e > 0 {
                        let _ = write!(out, "*y{}", j + 1);
                        if e > 1 {
                            let _ = write!(out, "^{e}");
                        }
                    }
                }
            }
            out.push('\n');
        }
        out
    }

    fn max_exponents(&self) -> Vec<u32> {
        let mut max = vec![0; self.arity];
        for m in self.equations.iter().flatten() {
            for (x, &e) in max.iter_mut().zip(&m.y_exps) {
                *x = (*x).max(e);
            }
        }
        max
    }
}

fn parse_polynomial<F: Field>(k: &F, text: &str, r: usize, line: usize, col0: usize) -> Result<Vec<Monomial<F::Elem>>> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut pieces: Vec<(bool, usize, String)> = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let mut neg = false;
        while i < chars.len() && matches!(chars[i].1, '+' | '-') || i < chars.len() && chars[i].1.is_whitespace() {
            neg ^= chars[i].1 == '-';
            i += 1;
        }
        let offset = chars.get(i).map_or(text.len(), |c| c.0);
        let mut body = String::new();
        while i < chars.len() {
            let c = chars[i].1;
            let prev = body.chars().rev().find(|c| !c.is_whitespace());
            if (c == '+' || c == '-') && !matches!(prev, None | Some('*' | '^' | '/')) {
                break;
            }
            body.push(c);
            i += 1;
        }
        pieces.push((neg, offset, body.trim_end().to_string()));
    }
    if pieces.is_empty() {
        return Err(Error::parse(line, col0, "empty right-hand side"));
    }
    let mut terms = Vec::new();
    for (neg, offset, piece) in pieces {
        if piece.is_empty() {
            return Err(Error::parse(line, col0 + offset, "empty term"));
        }
        let mut m = Monomial {
            coeff: k.one(),
            t_exp: 0,
            y_exps: vec![0; r],
        };
        let mut pending: Option<String> = None;
        for factor in piece.split('*') {
            let factor = factor.trim();
            let err = |msg: String| Error::parse(line, col0 + offset, msg);
            let (base, exp) = match factor.split_once('^') {
                Some((b, e)) => (
                    b.trim(),
                    e.trim().parse::<u32>().map_err(|_| err(format!("bad exponent in `{factor}`")))?,
                ),
                None => (factor, 1),
            };
            if base.contains(char::is_whitespace) {
                return Err(err(format!("malformed factor `{factor}`")));
            }
            if base == "t" {
                m.t_exp += exp as usize;
            } else if let Some(idx) = base.strip_prefix('y') {
                let j = idx
                    .parse::<usize>()
                    .ok()
                    .filter(|&j| (1..=r).contains(&j))
                    .ok_or_else(|| err(format!("unknown variable `{base}`")))?;
                m.y_exps[j - 1] += exp;
            } else {
                if pending.is_some() || factor.contains('^') {
                    return Err(err(format!("unexpected factor `{factor}`")));
                }
                pending = Some(base.to_string());
                let c = k.parse(base).map_err(|_| err(format!("bad coefficient `{base}`")))?;
                m.coeff = k.mul(&m.coeff, &c);
            }
        }
        if neg {
            m.coeff = k.neg(&m.coeff);
        }
        terms.push(m);
    }
    Ok(terms)
}

fn eval_monomials<F: Field>(
    ring: &Ring<F>,
    terms: &[Monomial<F::Elem>],
    powers: &[Vec<Series<F::Elem>>],
    n: usize,
) -> Series<F::Elem> {
    let mut acc = ring.zero(n);
    for m in terms {
        if m.t_exp >= n {
            continue;
        }
        let mut prod: Option<Series<F::Elem>> = None;
        for (j, &e) in m.y_exps.iter().enumerate() {
            if e > 0 {
                let p = &powers[j][e as usize];
                prod = Some(match prod {
                    None => p.clone(),
                    Some(q) => ring.mul(&q, p, n - m.t_exp),
                });
            }
        }
        let term = match prod {
            None => ring.constant(m.coeff.clone(), n - m.t_exp),
            Some(p) => ring.scale(&m.coeff, &ring.resize(&p, n - m.t_exp)),
        };
        let term = ring.shift(&term, m.t_exp);
        acc = ring.add(&acc, &term);
    }
    acc
}

impl<F: Field> NonlinearEvaluator<F> for SparsePolySystem<F::Elem> {
    fn arity(&self) -> usize {
        self.arity
    }

    fn eval(&self, ring: &Ring<F>, y: &SeriesVector<F::Elem>, n: usize) -> Result<(SeriesVector<F::Elem>, SeriesMatrix<F::Elem>)> {
        let powers = self.powers(ring, y, n)?;
        let r = self.arity;
        let phi = self.equations.iter().map(|eq| eval_monomials(ring, eq, &powers, n)).collect();
        let jac = self.jacobian.iter().map(|eq| eval_monomials(ring, eq, &powers, n)).collect();
        Ok((SeriesMatrix::column(phi)?, SeriesMatrix::new(r, r, jac)?))
    }

    fn value(&self, ring: &Ring<F>, y: &SeriesVector<F::Elem>, n: usize) -> Result<SeriesVector<F::Elem>> {
        let powers = self.powers(ring, y, n)?;
        SeriesMatrix::column(self.equations.iter().map(|eq| eval_monomials(ring, eq, &powers, n)).collect())
    }

    fn cost(&self, n: usize) -> Option<f64> {
        let n = n.max(2) as f64;
        Some((self.monomial_count() * self.arity) as f64 * n * n.log2())
    }
}

impl<E: Clone + PartialEq> SparsePolySystem<E> {
    /// `powers[j][e] = y_j^e mod t^n` for every exponent in use.
    fn powers<F: Field<Elem = E>>(&self, ring: &Ring<F>, y: &SeriesVector<E>, n: usize) -> Result<Vec<Vec<Series<E>>>> {
        if y.rows() != self.arity || y.cols() != 1 {
            return Err(Error::DimensionMismatch(format!(
                "evaluating a system in {} unknowns at a {}x{} vector",
                self.arity,
                y.rows(),
                y.cols()
            )));
        }
        Ok(self
            .max_exponents()
            .iter()
            .enumerate()
            .map(|(j, &e)| {
                let base = ring.resize(y.component(j), n);
                let mut pw = vec![ring.one(n)];
                for i in 1..=e as usize {
                    let next = if i == 1 { base.clone() } else { ring.mul(&pw[i - 1], &base, n) };
                    pw.push(next);
                }
                pw
            })
            .collect())
    }
}

/// `φ(t, y) = A·y + b` as an evaluator.
pub struct LinearEvaluator<'a, E> {
    pub a: &'a SeriesMatrix<E>,
    pub b: Option<&'a SeriesVector<E>>,
}

impl<F: Field> NonlinearEvaluator<F> for LinearEvaluator<'_, F::Elem> {
    fn arity(&self) -> usize {
        self.a.rows()
    }

    fn eval(&self, ring: &Ring<F>, y: &SeriesVector<F::Elem>, n: usize) -> Result<(SeriesVector<F::Elem>, SeriesMatrix<F::Elem>)> {
        Ok((self.value(ring, y, n)?, ring.mat_resize(self.a, n)))
    }

    fn value(&self, ring: &Ring<F>, y: &SeriesVector<F::Elem>, n: usize) -> Result<SeriesVector<F::Elem>> {
        let ay = ring.mat_mul(self.a, y, n)?;
        match self.b {
            Some(b) => ring.mat_add(&ay, &ring.mat_resize(b, n)),
            None => Ok(ay),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NonlinearOptions {
    /// Check `y' − φ(t, y) ≡ 0 mod t^{N−1}` before returning.
    pub verify: bool,
}

impl Default for NonlinearOptions {
    fn default() -> Self {
        NonlinearOptions { verify: true }
    }
}

/// `y' ≡ φ(t, y) mod t^{N−1}`, `y(0) = v`, precision `N`.
pub fn solve_nonlinear<F: Field>(
    ring: &Ring<F>,
    phi: &dyn NonlinearEvaluator<F>,
    v: &[F::Elem],
    n: usize,
) -> Result<SeriesVector<F::Elem>> {
    solve_nonlinear_with(ring, phi, v, n, NonlinearOptions::default())
}

pub fn solve_nonlinear_with<F: Field>(
    ring: &Ring<F>,
    phi: &dyn NonlinearEvaluator<F>,
    v: &[F::Elem],
    n: usize,
    options: NonlinearOptions,
) -> Result<SeriesVector<F::Elem>> {
    let r = phi.arity();
    if v.len() != r {
        return Err(Error::DimensionMismatch(format!("{} initial values for {r} unknowns", v.len())));
    }
    if n == 0 {
        return Err(Error::IndexOutOfRange("precision must be positive".into()));
    }
    ring.ensure_characteristic(n)?;
    let mut y = SeriesMatrix::column(v.iter().map(|c| Series::from_coeffs(vec![c.clone()])).collect())?;
    let zeros = vec![ring.field().zero(); r];
    let mut m = 1;
    while m < n {
        let p = (2 * m).min(n);
        let (value, jac) = phi.eval(ring, &y, p - 1)?;
        let dy = ring.mat_resize(&ring.mat_differentiate(&y), p - 1);
        let b = ring.mat_sub(&value, &dy)?;
        let z = dac::solve(ring, &jac, &b, p, &zeros)?;
        y = ring.mat_add(&ring.mat_resize(&y, p), &z)?;
        m = p;
    }
    if options.verify && n > 1 {
        let value = phi.value(ring, &y, n - 1)?;
        let res = ring.mat_sub(&ring.mat_differentiate(&y), &value)?;
        if let Some(order) = first_nonzero(ring, &res) {
            return Err(Error::ResidualNonzero(order));
        }
    }
    Ok(y)
}

/// Lowest degree of a nonzero coefficient over all entries.
pub(crate) fn first_nonzero<F: Field>(ring: &Ring<F>, m: &SeriesMatrix<F::Elem>) -> Option<usize> {
    let k = ring.field();
    m.entries()
        .iter()
        .filter_map(|e| e.coeffs().iter().position(|c| !k.is_zero(c)))
        .min()
}
