//! Independent oracles shared by the integration suites.
#![allow(dead_code)]

use varpi_core::valuation::{int, Rational};
use varpi_core::{make_tower, ExtensionStep, ExtensionTower, PadicElement, Valuation};

pub fn eisenstein(p: u64, e: usize) -> ExtensionStep {
    let mut poly = vec![0i64; e + 1];
    poly[0] = -(p as i64);
    poly[e] = 1;
    ExtensionStep::Eisenstein { poly }
}

pub fn ground_tower(p: u64, f: usize, e: usize, precision: i64) -> ExtensionTower {
    let mut steps = Vec::new();
    if f > 1 {
        steps.push(ExtensionStep::Unramified { degree: f, poly: None });
    }
    steps.push(eisenstein(p, e));
    make_tower(p, &steps, precision).unwrap()
}

pub fn cyclotomic_tower(p: u64, f: usize, e: usize, precision: i64) -> ExtensionTower {
    let mut steps = Vec::new();
    if f > 1 {
        steps.push(ExtensionStep::Unramified { degree: f, poly: None });
    }
    steps.push(eisenstein(p, e));
    steps.push(ExtensionStep::Cyclotomic { order: p });
    make_tower(p, &steps, precision).unwrap()
}

fn heap_permutations(n: usize) -> Vec<(Vec<usize>, bool)> {
    let mut out = Vec::new();
    let mut a: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    let mut even = true;
    out.push((a.clone(), even));
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            even = !even;
            out.push((a.clone(), even));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

fn poly_mul(a: &[PadicElement], b: &[PadicElement], zero: &PadicElement) -> Vec<PadicElement> {
    let mut out = vec![zero.clone(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&x.mul(y).unwrap()).unwrap();
        }
    }
    out
}

/// `det(1 − tA)` by the Leibniz expansion with polynomial entries.
pub fn leibniz_fredholm(a: &[Vec<PadicElement>], tower: &ExtensionTower) -> Vec<PadicElement> {
    let n = a.len();
    let zero = PadicElement::zero(tower);
    let one = PadicElement::one(tower);
    let mut total = vec![zero.clone(); n + 1];
    total[0] = if n == 0 { one.clone() } else { zero.clone() };
    if n == 0 {
        return total;
    }
    for (perm, even) in heap_permutations(n) {
        let mut prod = vec![one.clone()];
        for (i, &j) in perm.iter().enumerate() {
            let entry = if i == j {
                vec![one.clone(), a[i][j].neg()]
            } else {
                vec![zero.clone(), a[i][j].neg()]
            };
            prod = poly_mul(&prod, &entry, &zero);
        }
        for (k, c) in prod.into_iter().enumerate() {
            total[k] = if even { total[k].add(&c).unwrap() } else { total[k].sub(&c).unwrap() };
        }
    }
    total
}

/// Lower convex hull ordinate at `x` by minimizing over all chords.
pub fn brute_hull(points: &[(i64, Rational)], x: i64) -> Option<Rational> {
    let mut best: Option<Rational> = None;
    for &(xa, ya) in points {
        for &(xb, yb) in points {
            let value = if xa == x && xb == x {
                Some(ya)
            } else if xa < x && x < xb {
                Some(ya + (yb - ya) * int(x - xa) / int(xb - xa))
            } else {
                None
            };
            if let Some(v) = value {
                best = Some(best.map_or(v, |b: Rational| b.min(v)));
            }
        }
    }
    best
}

/// Slopes of the lower hull of `(k, val c_k)`, as sorted `(slope, length)`.
pub fn hull_slopes(points: &[(i64, Rational)]) -> Vec<(Rational, i64)> {
    let xs: Vec<i64> = points.iter().map(|p| p.0).collect();
    let (lo, hi) = (*xs.iter().min().unwrap(), *xs.iter().max().unwrap());
    let mut out: Vec<(Rational, i64)> = Vec::new();
    for x in lo..hi {
        let s = brute_hull(points, x + 1).unwrap() - brute_hull(points, x).unwrap();
        match out.last_mut() {
            Some(last) if last.0 == s => last.1 += 1,
            _ => out.push((s, 1)),
        }
    }
    out
}

pub fn finite(v: Valuation) -> Rational {
    v.as_finite().expect("finite valuation")
}
