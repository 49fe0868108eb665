//! Dense polynomial helpers on coefficient vectors (lowest degree first).

use crate::field::Field;

/// Degree, or `None` for the zero polynomial.
pub fn degree<F: Field>(k: &F, p: &[F::Elem]) -> Option<usize> {
    p.iter().rposition(|c| !k.is_zero(c))
}

pub fn trim<F: Field>(k: &F, p: &mut Vec<F::Elem>) {
    let len = degree(k, p).map_or(0, |d| d + 1);
    p.truncate(len);
}

pub fn sub<F: Field>(k: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    let n = a.len().max(b.len());
    let zero = k.zero();
    (0..n)
        .map(|i| k.sub(a.get(i).unwrap_or(&zero), b.get(i).unwrap_or(&zero)))
        .collect()
}

pub fn mul<F: Field>(k: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    crate::series::naive_product(k, a, b, a.len() + b.len() - 1)
}

pub fn scale<F: Field>(k: &F, c: &F::Elem, a: &[F::Elem]) -> Vec<F::Elem> {
    a.iter().map(|x| k.mul(c, x)).collect()
}

/// Euclidean division `a = q·b + r`, `deg r < deg b`. Panics if `b` is zero.
pub fn divrem<F: Field>(k: &F, a: &[F::Elem], b: &[F::Elem]) -> (Vec<F::Elem>, Vec<F::Elem>) {
    let db = degree(k, b).expect("division by the zero polynomial");
    let lead_inv = k.inv(&b[db]).expect("nonzero leading coefficient");
    let mut r: Vec<F::Elem> = a.to_vec();
    trim(k, &mut r);
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut q = vec![k.zero(); r.len() - db];
    for i in (0..q.len()).rev() {
        let c = k.mul(&r[i + db], &lead_inv);
        if !k.is_zero(&c) {
            for (j, bj) in b[..=db].iter().enumerate() {
                r[i + j] = k.sub(&r[i + j], &k.mul(&c, bj));
            }
        }
        q[i] = c;
    }
    r.truncate(db);
    trim(k, &mut r);
    trim(k, &mut q);
    (q, r)
}

/// Monic greatest common divisor (empty for `gcd(0, 0)`).
pub fn gcd<F: Field>(k: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(k, &mut a);
    trim(k, &mut b);
    while !b.is_empty() {
        let (_, r) = divrem(k, &a, &b);
        a = std::mem::replace(&mut b, r);
    }
    if let Some(lead) = a.last() {
        let inv = k.inv(lead).unwrap();
        a = scale(k, &inv, &a);
    }
    a
}

pub fn eval<F: Field>(k: &F, p: &[F::Elem], x: &F::Elem) -> F::Elem {
    p.iter().rev().fold(k.zero(), |acc, c| k.add(&k.mul(&acc, x), c))
}
