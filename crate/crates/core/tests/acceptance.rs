//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Each criterion checks against oracles computed here.

mod common;

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{cyclotomic_tower, ground_tower, hull_slopes, leibniz_fredholm};
use varpi_core::canonical::{
    classify, gamma_prime_threshold, gamma_prime_vanishes, hodge_tate_report, isogeny_measure_map,
    CanonicalGroupModel, IsogenyKind, MultiplicationSeries,
};
use varpi_core::gauss::GaussSumTable;
use varpi_core::spectral::{
    certify_compact, classicality_check, deform_eigenform, eigencurve_points, fredholm_series, newton_slopes,
    OperatorFamily,
};
use varpi_core::valuation::{int, rat};
use varpi_core::weight::{disk_threshold, is_r_accessible};
use varpi_core::{make_tower, ExtensionStep, Ground, KummerBase, PadicElement, Rational, Valuation};

type Check = Result<(), String>;
type Criterion = (&'static str, Box<dyn FnOnce() -> Check>);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// `(p, f, e)` grounds shared by the constants criteria.
const GROUNDS: [(u64, usize, i64); 4] = [(3, 1, 1), (5, 1, 1), (3, 2, 1), (3, 1, 2)];

fn digit_sum(mut i: u64, p: u64) -> u64 {
    let mut s = 0;
    while i > 0 {
        s += i % p;
        i /= p;
    }
    s
}

fn timed(budget: Duration, label: &str, f: impl FnOnce() -> Check) -> Check {
    let start = Instant::now();
    f()?;
    let took = start.elapsed();
    ensure(took <= budget, || format!("{label} took {took:?}, budget {budget:?}"))
}

fn gauss_valuations() -> Check {
    for (p, f, e) in GROUNDS {
        timed(Duration::from_secs(1), &format!("ground ({p},{f},{e})"), || {
            let t = cyclotomic_tower(p, f, e as usize, 24);
            let table = GaussSumTable::new(&t).map_err(|x| x.to_string())?;
            let q = p.pow(f as u32);
            for i in 1..q {
                let want = rat(digit_sum(i, p) as i64 * e, p as i64 - 1);
                let got = table.get(i).map_err(|x| x.to_string())?.val();
                ensure(got == Valuation::Finite(want), || {
                    format!("({p},{f},{e}) i={i}: val g = {got}, expected {want}")
                })?;
                if i < q - 1 {
                    // |g(χ)|² = q pins the sum independently of its valuation
                    let norm = table.get(i).unwrap().mul(&table.conjugate_sum(i).unwrap()).unwrap();
                    ensure(norm.agrees(&PadicElement::from_int(&t, q as i64)), || {
                        format!("({p},{f},{e}) i={i}: g(χ) times its conjugate is not q")
                    })?;
                }
            }
            Ok(())
        })?;
    }
    Ok(())
}

fn raynaud_constants() -> Check {
    for (p, f, e) in GROUNDS {
        timed(Duration::from_secs(1), &format!("ground ({p},{f},{e})"), || {
            let t = cyclotomic_tower(p, f, e as usize, 24);
            let table = GaussSumTable::new(&t).map_err(|x| x.to_string())?;
            let one = PadicElement::one(&t);
            for k in 0..f {
                let w = table.raynaud_w(p.pow(k as u32)).map_err(|x| x.to_string())?;
                ensure(w.agrees(&one), || format!("({p},{f},{e}): w_(p^{k}) is not 1"))?;
            }
            let total = table.raynaud_w_total().map_err(|x| x.to_string())?.val();
            ensure(total == Valuation::from_int(e), || format!("({p},{f},{e}): val w = {total}"))
        })?;
    }
    Ok(())
}

fn hopf_verification() -> Check {
    for (p, f, e) in [(3u64, 1usize, 1i64), (5, 1, 1), (3, 2, 1)] {
        let g = Ground::new(p, e, f).unwrap();
        let q = g.q() as i64;
        for w in [rat(0, 1), rat(1, q + 1), rat(1, q)] {
            timed(Duration::from_secs(30), &format!("({p},{f},{e}) w={w}"), || {
                let model = CanonicalGroupModel::new(g, w, 6).map_err(|x| x.to_string())?;
                let r = model.verify_hopf().map_err(|x| x.to_string())?;
                let label = format!("({p},{f},{e}) w={w}");
                ensure(r.counit, || format!("{label}: counit"))?;
                ensure(r.coassociative, || format!("{label}: coassociativity"))?;
                ensure(r.eta_group_like, || format!("{label}: eta group-like"))?;
                ensure(r.eta_order_p, || format!("{label}: eta^p = 1"))?;
                ensure(r.certified_digits >= int(3), || {
                    format!("{label}: only {} certified digits", r.certified_digits)
                })
            })?;
        }
    }
    Ok(())
}

fn torsion_valuations() -> Check {
    timed(Duration::from_secs(1), "grid", || {
        for f in [1usize, 2] {
            let q = 3i64.pow(f as u32);
            for j in 0..20 {
                let w = rat(j, 19 * q);
                let den = *w.denom() as usize;
                let mut steps = Vec::new();
                if f > 1 {
                    steps.push(ExtensionStep::Unramified { degree: f, poly: None });
                }
                steps.push(ExtensionStep::Eisenstein { poly: vec![-3, 1] });
                if den > 1 {
                    steps.push(ExtensionStep::Kummer { base: KummerBase::Pi, degree: den });
                }
                let t = make_tower(3, &steps, 4 * den as i64).map_err(|x| x.to_string())?;
                let a = PadicElement::pi(&t).pow(*w.numer()).unwrap();
                let c = classify(&MultiplicationSeries::lubin_tate(&t, a)).map_err(|x| x.to_string())?;
                let canonical = (int(1) - w) / int(q - 1);
                let other = w / int(q * (q - 1));
                let mut want = vec![(canonical, q - 1), (other, q * q - q)];
                want.sort();
                let mut got = c.root_valuations.clone();
                got.sort();
                ensure(got == want, || format!("q={q} w={w}: {got:?} vs {want:?}"))?;
                let r = hodge_tate_report(w, q as u64).map_err(|x| x.to_string())?;
                ensure(r.canonical_valuation == canonical && r.noncanonical_valuation == other, || {
                    format!("q={q} w={w}: report disagrees")
                })?;
            }
        }
        Ok(())
    })
}

fn measure_dynamics() -> Check {
    for q in [3i64, 5, 9] {
        for j in 0..20 {
            let w = rat(j, 20) * rat(q, q + 1);
            let down = isogeny_measure_map(w, IsogenyKind::QuotientByDisjoint, q as u64).map_err(|x| x.to_string())?;
            let back = isogeny_measure_map(down, IsogenyKind::QuotientByCanonical, q as u64).map_err(|x| x.to_string())?;
            ensure(back == w, || format!("q={q}: round trip of {w} gave {back}"))?;
            ensure(down == w / int(q), || format!("q={q}: disjoint quotient of {w} gave {down}"))?;
            let lhs = down / int(q - 1) + w / int(q);
            ensure(lhs == w / int(q - 1), || format!("q={q} w={w}: measure identity gives {lhs}"))?;
            if w < rat(1, q + 1) {
                let up = isogeny_measure_map(w, IsogenyKind::QuotientByCanonical, q as u64).unwrap();
                ensure(up == int(q) * w, || format!("q={q}: canonical quotient of {w}"))?;
                let again = isogeny_measure_map(up, IsogenyKind::QuotientByDisjoint, q as u64).unwrap();
                ensure(again == w, || format!("q={q}: reverse round trip of {w}"))?;
            }
        }
    }
    Ok(())
}

fn gamma_boundary() -> Check {
    for f in [1usize, 2] {
        let threshold = gamma_prime_threshold(3, f, int(0));
        let closed = int(2) * (int(1) + int(3i64.pow(f as u32 - 1)) / int(3i64.pow(f as u32) - 1));
        ensure(threshold == closed.ceil().to_integer(), || format!("f={f}: threshold {threshold} vs {closed}"))?;
        let mut flip = None;
        for e in 1..=6i64 {
            let g = Ground::new(3, e, f).unwrap();
            let model = CanonicalGroupModel::new(g, int(0), 4 + 2 * e).map_err(|x| format!("f={f} e={e}: {x}"))?;
            let mut direct = true;
            for k in 0..f {
                let v = model.beta(k).map_err(|x| x.to_string())?.val();
                direct &= v >= Valuation::from_int(1);
            }
            let predicate = gamma_prime_vanishes(g, int(0)).map_err(|x| x.to_string())?;
            ensure(predicate == direct, || format!("f={f} e={e}: predicate {predicate}, measured {direct}"))?;
            if direct && flip.is_none() {
                flip = Some(e);
            }
            if let Some(start) = flip {
                ensure(direct, || format!("f={f}: vanishing lost at e={e} after starting at {start}"))?;
            }
        }
        ensure(flip == Some(threshold), || format!("f={f}: flip at {flip:?}, threshold {threshold}"))?;
    }
    Ok(())
}

/// Integers prime to 3.
const UNITS: [i64; 6] = [1, 2, 4, 5, 7, 8];

fn fredholm_correctness(rng: &mut ChaCha8Rng) -> Check {
    timed(Duration::from_secs(5), "fredholm", || {
        let t = ground_tower(3, 1, 1, 30);
        let varpi = PadicElement::varpi(&t);
        let one = PadicElement::one(&t);
        for rank in 1..=10usize {
            let vals: Vec<i64> = (0..rank).map(|_| rng.gen_range(0..3)).collect();
            let units: Vec<i64> = (0..rank).map(|_| UNITS[rng.gen_range(0..UNITS.len())]).collect();
            let entries: Vec<PadicElement> =
                vals.iter().zip(&units).map(|(&v, &u)| varpi.pow(v).unwrap().mul_int(u)).collect();
            let mut m = vec![vec![PadicElement::zero(&t); rank]; rank];
            for (i, d) in entries.iter().enumerate() {
                m[i][i] = d.clone();
            }
            let fam = OperatorFamily::constant(&t, m).unwrap();
            let series = fredholm_series(&fam, &one, rank).map_err(|x| x.to_string())?;
            // Π(1 − d_i t)
            let mut product = vec![one.clone()];
            for d in &entries {
                let mut next = vec![PadicElement::zero(&t); product.len() + 1];
                for (k, c) in product.iter().enumerate() {
                    next[k] = next[k].add(c).unwrap();
                    next[k + 1] = next[k + 1].sub(&c.mul(d).unwrap()).unwrap();
                }
                product = next;
            }
            for (k, (a, b)) in series.coeffs.iter().zip(&product).enumerate() {
                ensure(a.agrees(b), || format!("diagonal rank {rank}: coefficient {k} differs"))?;
            }
            let mut want: Vec<(Rational, usize)> = Vec::new();
            let mut sorted = vals.clone();
            sorted.sort();
            for v in sorted {
                match want.last_mut() {
                    Some(last) if last.0 == int(v) => last.1 += 1,
                    _ => want.push((int(v), 1)),
                }
            }
            let got = newton_slopes(&series);
            ensure(got.slopes == want, || format!("diagonal rank {rank}: slopes {:?} vs {want:?}", got.slopes))?;
        }

        let mut compared = 0;
        while compared < 30 {
            let n = rng.gen_range(1..=6usize);
            let a: Vec<Vec<PadicElement>> = (0..n)
                .map(|_| {
                    (0..n)
                        .map(|_| {
                            let v: i64 = rng.gen_range(0..5);
                            varpi.pow(v).unwrap().mul_int(UNITS[rng.gen_range(0..UNITS.len())])
                        })
                        .collect()
                })
                .collect();
            let oracle = leibniz_fredholm(&a, &t);
            if oracle.iter().any(|c| c.is_zero()) {
                continue;
            }
            compared += 1;
            let fam = OperatorFamily::constant(&t, a).unwrap();
            let series = fredholm_series(&fam, &one, n).map_err(|x| x.to_string())?;
            let points: Vec<(i64, Rational)> =
                oracle.iter().enumerate().map(|(k, c)| (k as i64, c.val().as_finite().unwrap())).collect();
            let want: Vec<(Rational, usize)> = hull_slopes(&points).into_iter().map(|(s, l)| (s, l as usize)).collect();
            let got = newton_slopes(&series);
            ensure(got.slopes == want && got.horizon.is_infinite(), || {
                format!("rank {n}: slopes {:?} vs oracle {want:?}", got.slopes)
            })?;
        }

        for m in 3..=8usize {
            for w in [rat(1, 4), rat(1, 3), rat(1, 2)] {
                let big = OperatorFamily::toy_dense(&t, m + 5, w).unwrap();
                let small = big.truncate(m);
                certify_compact(&small).map_err(|r| r.reason)?;
                let sigma = PadicElement::from_int(&t, 1 + 3 * rng.gen_range(0..9));
                let a = fredholm_series(&small, &sigma, m).map_err(|x| x.to_string())?;
                let b = fredholm_series(&big, &sigma, m).map_err(|x| x.to_string())?;
                for k in 0..=m {
                    let diff = a.coeffs[k].sub(&b.coeffs[k]).unwrap();
                    let within = diff.val() >= a.tail_error[k]
                        || Valuation::Finite(diff.certified()) <= a.tail_error[k];
                    ensure(within, || {
                        format!("truncation {m} w={w}: c_{k} moved by {} past bound {}", diff.val(), a.tail_error[k])
                    })?;
                }
            }
        }
        Ok(())
    })
}

fn eigencurve_toy() -> Check {
    timed(Duration::from_secs(5), "eigencurve", || {
        let t = ground_tower(3, 1, 1, 20);
        let zero = PadicElement::zero(&t);
        let varpi = PadicElement::varpi(&t);
        let raw = vec![
            vec![vec![zero.clone(), varpi.clone()], vec![zero.clone()]],
            vec![vec![zero.clone()], vec![varpi.pow(2).unwrap()]],
        ];
        let fam = OperatorFamily::new(&t, raw, varpi_core::spectral::Normalization::Raw, None).unwrap();
        let disk = disk_threshold(1, Ground::of(&t)).unwrap();
        let grid: Vec<PadicElement> = (0..10).map(|j| PadicElement::from_int(&t, 1 + 3 * j)).collect();
        let report = eigencurve_points(&fam, &disk, &grid, 2, int(2)).map_err(|x| x.to_string())?;
        ensure(report.points.len() == 20, || format!("{} points, expected 20", report.points.len()))?;
        let half = int(t.precision()) * t.pi_valuation_unit() / int(2);
        ensure(report.min_margin >= half, || format!("declared margin {}", report.min_margin))?;
        let one = PadicElement::one(&t);
        for p in &report.points {
            ensure(p.lambda.mul(&p.t).unwrap().agrees(&one), || format!("λt != 1 at grid {}", p.sigma_index))?;
            ensure(p.margin >= half, || format!("margin {} at grid {}", p.margin, p.sigma_index))?;
        }
        let start = report
            .points
            .iter()
            .find(|p| p.sigma_index == 0 && p.slope == int(1))
            .ok_or("no slope-1 point at the first grid point")?;
        let branch = deform_eigenform(&fam, &grid[0], &start.lambda, int(1), &grid[1..]).map_err(|x| x.to_string())?;
        ensure(branch.collision.is_none() && branch.points.len() == grid.len(), || {
            format!("branch of {} points, collision {:?}", branch.points.len(), branch.collision)
        })?;
        for (sigma, lambda, slope) in &branch.points {
            ensure(*slope == int(1), || format!("branch slope {slope}"))?;
            ensure(lambda.agrees(&sigma.mul(&varpi).unwrap()), || "branch leaves σϖ".to_string())?;
        }
        Ok(())
    })
}

fn classicality_table() -> Check {
    let eps = rat(1, 1000);
    for (e, f) in [(1i64, 1i64), (2, 1), (1, 2)] {
        for k in [2i64, 3, 5] {
            let edge = int(k - e * f);
            for slope in [int(0), rat(1, 2), int(1), edge - eps, edge] {
                let got = classicality_check(Valuation::Finite(slope), k, e, f);
                ensure(got == (slope < edge), || format!("slope {slope}, k={k}, e={e}, f={f}: {got}"))?;
            }
        }
    }
    Ok(())
}

/// `min_j (p^j v − j e)`; for `v <= 0` only a truncated minimum, which is
/// already below every threshold compared against.
fn growth_min(v: Rational, p: u64, e: i64) -> Rational {
    let mut best = v;
    let mut pj = int(1);
    for j in 1..24 {
        pj *= int(p as i64);
        best = best.min(pj * v - int(j * e));
        // terms increase from here on
        if v > int(0) && pj * int(p as i64 - 1) * v >= int(e) {
            break;
        }
    }
    best
}

fn accessibility_suite(rng: &mut ChaCha8Rng) -> Check {
    timed(Duration::from_secs(1), "accessibility", || {
        for (p, f, e) in GROUNDS {
            let g = Ground::new(p, e, f).unwrap();
            let eps = rat(e, p as i64 - 1);
            let m1 = disk_threshold(1, g).unwrap().m_r;
            ensure(m1 == eps, || format!("({p},{f},{e}): m_1 = {m1}"))?;
            for _ in 0..1000 {
                let vs = rat(rng.gen_range(-60..60), rng.gen_range(1..13));
                let r: u32 = rng.gen_range(1..7);
                let got = is_r_accessible(Valuation::Finite(vs), r, g);
                ensure(got == (vs > eps - int(r as i64)), || {
                    format!("({p},{f},{e}): accessibility of val(s)={vs}, r={r}")
                })?;
                let disk = disk_threshold(r, g).unwrap();
                let c = eps + int(1 - r as i64);
                let delta = rat(rng.gen_range(1..40), rng.gen_range(1..13));
                let inside = disk.m_r + delta;
                ensure(disk.contains(Valuation::Finite(inside)) && growth_min(inside, p, e) > c, || {
                    format!("({p},{f},{e}) r={r}: val {inside} inside the disk fails the bound")
                })?;
                let outside = disk.m_r - delta / int(100);
                ensure(!disk.contains(Valuation::Finite(outside)), || format!("r={r}: {outside} counted inside"))?;
                let just_below = disk.m_r - rat(1, 1_000_000);
                ensure(growth_min(just_below, p, e) <= c, || format!("r={r}: threshold {} is not minimal", disk.m_r))?;
            }
        }
        Ok(())
    })
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut rng2 = ChaCha8Rng::seed_from_u64(0xacce55);
    let criteria: Vec<Criterion> = vec![
        ("gauss-sum valuations", Box::new(gauss_valuations)),
        ("raynaud constants", Box::new(raynaud_constants)),
        ("hopf verification", Box::new(hopf_verification)),
        ("torsion valuations", Box::new(torsion_valuations)),
        ("measure dynamics", Box::new(measure_dynamics)),
        ("gamma-prime boundary", Box::new(gamma_boundary)),
        ("fredholm correctness", Box::new(move || fredholm_correctness(&mut rng))),
        ("eigencurve toy run", Box::new(eigencurve_toy)),
        ("classicality predicate", Box::new(classicality_table)),
        ("accessibility and disks", Box::new(move || accessibility_suite(&mut rng2))),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(std::panic::AssertUnwindSafe(check))
            .unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(()) => println!("criterion {:>2} {name:<24} PASS ({secs:.2}s)", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} {name:<24} FAIL ({secs:.2}s): {msg}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all 10 criteria passed");
}
