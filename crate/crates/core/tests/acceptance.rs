//! Acceptance suite: twelve criteria, each with its tolerance and a
//! wall-clock budget. Criteria run one after another in a single test so the
//! timings are not distorted by parallel tests; set `TNL_CRITERIA=3,7` to run
//! a subset.

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use nalgebra::{dmatrix, DMatrix};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use tnl_core::convex::{Relation, SdpProblem, Sense, SolverSettings};
use tnl_core::experiments::{run_hfp_complex, run_hfp_nonstrict, run_tensor_radius_strictness};
use tnl_core::ideal::{gamma2, gamma2_star, haar_twirl, pi2};
use tnl_core::limits::{norm_eps_to_pi, pair_target, regularization_report, Pair};
use tnl_core::projective::projective_norm;
use tnl_core::random::{gaussian_in, mc_eps_growth, mc_expected_norms};
use tnl_core::spaces::{operator_norm, OperatorMap, Space, SpaceDescriptor};
use tnl_core::tensor::{hilbert_norm, injective_norm};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn map(x: Space, y: Space, m: DMatrix<f64>) -> OperatorMap {
    OperatorMap::new(x, y, m).unwrap()
}

fn gaussian_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| rng.sample(StandardNormal))
}

fn hexagon() -> Space {
    Space::new(SpaceDescriptor::polytope_vertices(vec![
        vec![2.0, 2.0],
        vec![2.0, 0.0],
        vec![0.0, 2.0],
        vec![-2.0, -2.0],
        vec![-2.0, 0.0],
        vec![0.0, -2.0],
    ]))
    .unwrap()
}

/// `min tr V` subject to `V ⪰ ΦᵀΦ`: the Pietsch program on a euclidean
/// domain, whose measures have second-moment matrices `{W ⪰ 0, tr W = 1}`.
fn pi2_sq_euclidean_sdp(g: &DMatrix<f64>) -> f64 {
    let n = g.nrows();
    let mut sdp = SdpProblem::new(Sense::Minimize);
    let v = sdp.add_psd(n);
    let s = sdp.add_psd(n);
    for i in 0..n {
        for j in i..n {
            sdp.add_constraint(vec![(v.at(i, j), 1.0), (s.at(i, j), -1.0)], Relation::Eq, g[(i, j)]);
        }
    }
    sdp.set_objective((0..n).map(|i| (v.at(i, i), 1.0)).collect());
    let sol = sdp.solve_sdp(&SolverSettings::default()).unwrap().require_optimal().unwrap();
    sol.dual_objective
}

fn c1_identity_ideal_norms() -> Outcome {
    let mut detail = Vec::new();
    for n in 2..=4usize {
        let nf = n as f64;
        let id = OperatorMap::identity(Space::euclidean(n));
        let p = pi2(&id).map_err(|e| e.to_string())?;
        let sdp = pi2_sq_euclidean_sdp(&DMatrix::identity(n, n)).sqrt();
        let g = gamma2_star(&id).map_err(|e| e.to_string())?;
        ensure((p.lower - nf.sqrt()).abs() <= 1e-5 && (p.upper - nf.sqrt()).abs() <= 1e-5, || {
            format!("π₂(id_{n}) = [{}, {}]", p.lower, p.upper)
        })?;
        ensure((sdp - nf.sqrt()).abs() <= 1e-5, || format!("Pietsch SDP for id_{n} gives {sdp}"))?;
        ensure((g.lower - nf).abs() <= 1e-5 && (g.upper - nf).abs() <= 1e-5, || {
            format!("γ₂*(id_{n}) = [{}, {}]", g.lower, g.upper)
        })?;
        detail.push(format!("n={n}: π₂={:.7} γ₂*={:.7}", p.upper, g.upper));
    }
    Ok(detail.join("; "))
}

fn c2_pi2_multiplicativity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let a = map(Space::linf(2), Space::euclidean(2), gaussian_matrix(&mut rng, 2, 2));
        let b = map(Space::linf(3), Space::euclidean(2), gaussian_matrix(&mut rng, 2, 3));
        let ab = a.tensor_eps_h(&b).map_err(|e| e.to_string())?;
        let (pa, pb, pab) = (pi2(&a).unwrap(), pi2(&b).unwrap(), pi2(&ab).map_err(|e| e.to_string())?);
        let prod_lo = pa.lower * pb.lower;
        let prod_hi = pa.upper * pb.upper;
        let rel = ((pab.lower - prod_lo).abs()).max((pab.upper - prod_hi).abs()) / prod_hi;
        worst = worst.max(rel);
        ensure(rel <= 1e-4, || format!("π₂(φ₁⊗φ₂) = [{}, {}] vs product [{prod_lo}, {prod_hi}]", pab.lower, pab.upper))?;
    }
    Ok(format!("10 pairs, worst relative deviation {worst:.2e}"))
}

/// Twenty operators covering polytopal, euclidean and mixed pairs.
fn battery() -> Vec<OperatorMap> {
    let kinds: Vec<(Space, Space)> = vec![
        (Space::linf(2), Space::euclidean(2)),
        (Space::l1(2), Space::euclidean(2)),
        (hexagon(), Space::euclidean(2)),
        (Space::euclidean(2), Space::euclidean(2)),
        (Space::euclidean(2), Space::l1(2)),
        (Space::euclidean(2), Space::linf(2)),
        (Space::linf(2), Space::l1(2)),
        (Space::l1(2), Space::linf(2)),
        (Space::linf(2), Space::linf(2)),
        (Space::l1(2), Space::l1(2)),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut ops = Vec::new();
    for (x, y) in &kinds {
        for _ in 0..2 {
            let m = gaussian_matrix(&mut rng, y.dim(), x.dim());
            ops.push(map(x.clone(), y.clone(), m));
        }
    }
    ops
}

fn c3_sandwich_battery() -> Outcome {
    let mut reports = 0;
    let mut worst_margin = f64::INFINITY;
    for (idx, phi) in battery().into_iter().enumerate() {
        let mut pairs = vec![Pair::EpsToPi];
        if phi.codomain().is_euclidean() {
            pairs.push(Pair::EpsToH);
        }
        if phi.domain().is_euclidean() {
            pairs.push(Pair::HToPi);
        }
        for pair in pairs {
            let report = regularization_report(&phi, 4, pair).map_err(|e| format!("op {idx} {pair}: {e}"))?;
            // The report's target is computed independently here as well.
            let target = pair_target(&phi, pair, &Default::default()).map_err(|e| e.to_string())?.upper;
            for r in &report.rows {
                ensure(r.lower <= r.upper * (1.0 + 1e-9) + 1e-9, || {
                    format!("op {idx} {pair} k={}: lower {} > upper {}", r.k, r.lower, r.upper)
                })?;
                ensure(r.root_lower <= target + 1e-5, || {
                    format!("op {idx} {pair} k={}: root {} above target {target}", r.k, r.root_lower)
                })?;
                worst_margin = worst_margin.min(target - r.root_lower);
            }
            ensure(report.rows.windows(2).all(|w| w[1].fekete_lower >= w[0].fekete_lower), || {
                format!("op {idx} {pair}: Fekete roots decrease")
            })?;
            reports += 1;
        }
    }
    Ok(format!("{reports} reports up to k=4, smallest target margin {worst_margin:.2e}"))
}

fn c4_exact_k2_identity() -> Outcome {
    let id = OperatorMap::identity(Space::euclidean(2));
    let est = norm_eps_to_pi(&id, 2).map_err(|e| e.to_string())?;
    // ε→π norm of id⊗id on ℓ₂² ⊗ ℓ₂² is the largest nuclear/spectral ratio.
    let ratio = |m: &DMatrix<f64>| {
        let s = m.singular_values();
        s.sum() / s.max()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut oracle = ratio(&DMatrix::identity(2, 2));
    for _ in 0..100_000 {
        oracle = oracle.max(ratio(&gaussian_matrix(&mut rng, 2, 2)));
    }
    ensure((est.lower - oracle).abs() <= 1e-6 && (est.upper - oracle).abs() <= 1e-6, || {
        format!("estimate [{}, {}] vs brute force {oracle}", est.lower, est.upper)
    })?;
    Ok(format!("[{:.9}, {:.9}], oracle {oracle:.9}", est.lower, est.upper))
}

fn c5_gaussian_moments() -> Outcome {
    let phi = map(Space::euclidean(2), Space::euclidean(2), dmatrix![1.0, 0.0; 0.0, 0.5]);
    let hs: f64 = (1.0f64 + 0.25).sqrt();
    let mut detail = Vec::new();
    for k in 1..=3 {
        let rec = mc_expected_norms(&phi, k, 10_000, 5).map_err(|e| e.to_string())?;
        let target_sq = hs.powi(2 * k as i32);
        let z = (rec.mean_sq - target_sq) / rec.se_sq;
        ensure(z.abs() <= 4.0, || format!("k={k}: mean ‖·‖² {} is {z:.2}σ from {target_sq}", rec.mean_sq))?;
        ensure(rec.mean >= 0.52 * hs.powi(k as i32), || format!("k={k}: mean ‖·‖ {} too small", rec.mean))?;
        detail.push(format!("k={k}: z={z:+.2} mean/hs^k={:.3}", rec.mean / hs.powi(k as i32)));
    }
    Ok(detail.join("; "))
}

fn c6_eps_growth() -> Outcome {
    let rows = mc_eps_growth(2, 10, 8, 6).map_err(|e| e.to_string())?;
    let ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    let max = ratios.iter().copied().fold(0.0, f64::max);
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    ensure(max / min <= 3.0, || format!("ratio spread {max}/{min}"))?;
    let increasing = ratios.windows(2).all(|w| w[1] > w[0]);
    ensure(!increasing, || format!("ratios increase monotonically: {ratios:?}"))?;
    Ok(format!("ratios k=2..10 in [{min:.3}, {max:.3}], spread {:.3}", max / min))
}

fn c7_duality() -> Outcome {
    let mut worst = f64::INFINITY;
    for (n, k) in [(3usize, 2usize), (2, 3)] {
        let e = Space::euclidean(n);
        for t in 0..100u64 {
            let z = gaussian_in(&e, k, 7, t).map_err(|e| e.to_string())?.tensor;
            let h = hilbert_norm(&z).unwrap();
            let eps = injective_norm(&z).map_err(|e| e.to_string())?;
            let pi = projective_norm(&z).map_err(|e| e.to_string())?;
            // Certified: ε·π >= ε.lower·π.lower.
            let slack = eps.lower * pi.lower - h * h;
            worst = worst.min(slack);
            ensure(slack >= -1e-6, || format!("order {k} trial {t}: h² = {} > ε·π >= {}", h * h, eps.lower * pi.lower))?;
        }
    }
    Ok(format!("200 tensors, smallest ε·π - h² = {worst:.3e}"))
}

fn c8_radius_strictness() -> Outcome {
    let r = run_tensor_radius_strictness(5).map_err(|e| e.to_string())?;
    let product = r.outputs.values["product_lower"];
    ensure(r.outputs.flags["strict"] && product >= 5.0 * 5f64.sqrt() - 1e-5 && product > 10.0, || {
        format!("product lower bound {product}")
    })?;
    ensure(r.passed, || format!("failed checks {:?}", r.failures()))?;
    Ok(format!("d_X·γ₂*(id_X) >= {product:.6} > 10"))
}

fn c9_nonstrict_failure() -> Outcome {
    let r = run_hfp_nonstrict().map_err(|e| e.to_string())?;
    let norm = r.outputs.bounds["operator_norm"];
    let g = r.outputs.bounds["gamma2"];
    let eps = r.outputs.values["epsilon"];
    let target = (1.0 + eps * eps / 4.0).sqrt();
    ensure((norm.lower - 1.0).abs() <= 1e-9 && (norm.upper - 1.0).abs() <= 1e-9, || format!("‖φ‖ in [{}, {}]", norm.lower, norm.upper))?;
    ensure(g.lower >= target - 1e-5, || format!("γ₂ >= {} below {target}", g.lower))?;
    ensure(r.passed, || format!("failed checks {:?}", r.failures()))?;
    Ok(format!("ε = {eps}, γ₂ in [{:.7}, {:.7}] >= {target:.7}", g.lower, g.upper))
}

fn c10_complex_hfp() -> Outcome {
    let r = run_hfp_complex(50, 10).map_err(|e| e.to_string())?;
    let max = r.outputs.values["max_complex_ratio"];
    ensure(r.outputs.values["net_delta"] == 1e-2, || "net resolution differs from 1e-2".into())?;
    ensure(max <= 1.0 + 5e-3, || format!("max γ₂/‖φ‖ = {max}"))?;
    Ok(format!("50 maps, max certified γ₂/‖φ‖ = {max:.6}; real max {:.4}", r.outputs.values["max_real_ratio"]))
}

fn c11_heredity() -> Outcome {
    let hex = hexagon();
    let triples: Vec<(OperatorMap, OperatorMap, OperatorMap)> = vec![
        (
            map(Space::l1(2), Space::l1(2), dmatrix![1.0, 0.5; -0.3, 2.0]),
            map(Space::l1(2), Space::l1(3), dmatrix![1.0, 0.0; 0.0, 1.0; 0.0, 0.0]),
            map(Space::l1(3), Space::l1(2), dmatrix![1.0, 0.0, 0.0; 0.0, 1.0, 0.0]),
        ),
        (
            map(Space::linf(2), Space::linf(2), dmatrix![0.4, 1.0; 1.0, -0.2]),
            map(Space::linf(2), Space::linf(3), dmatrix![1.0, 0.0; 0.0, 1.0; 0.0, 0.0]),
            map(Space::linf(3), Space::linf(2), dmatrix![1.0, 0.0, 0.0; 0.0, 1.0, 0.0]),
        ),
        (
            map(hex.clone(), Space::l1(2), dmatrix![0.5, 0.1; 0.2, -0.4]),
            map(Space::l1(2), Space::linf(2), dmatrix![1.0, 1.0; 1.0, -1.0]),
            map(Space::linf(3), hex, dmatrix![1.0, 0.0, -1.0; 0.0, 1.0, -1.0]),
        ),
        (
            map(Space::euclidean(2), Space::l1(2), dmatrix![0.7, -0.2; 0.3, 1.1]),
            map(Space::l1(2), Space::l1(3), dmatrix![1.0, 0.0; 0.0, 1.0; 0.0, 0.0]),
            map(Space::euclidean(3), Space::euclidean(2), dmatrix![1.0, 0.0, 0.0; 0.0, 1.0, 0.0]),
        ),
        (
            map(Space::l1(3), Space::linf(2), dmatrix![1.0, -0.5, 0.2; 0.3, 0.8, -1.0]),
            map(Space::linf(2), Space::linf(4), dmatrix![1.0, 0.0; 0.0, 1.0; 1.0, 0.0; 0.0, 1.0]),
            map(Space::l1(4), Space::l1(3), dmatrix![1.0, 0.0, 0.0, 0.0; 0.0, 1.0, 0.0, 0.0; 0.0, 0.0, 1.0, 1.0]),
        ),
    ];
    let mut worst = 0.0f64;
    for (i, (phi, j, q)) in triples.iter().enumerate() {
        let nj = operator_norm(j).unwrap();
        let nq = operator_norm(q).unwrap();
        ensure((nj.upper - 1.0).abs() <= 1e-9 && (nq.upper - 1.0).abs() <= 1e-9, || format!("triple {i}: ‖j‖={} ‖q‖={}", nj.upper, nq.upper))?;
        let base = gamma2(phi).map_err(|e| e.to_string())?;
        let lifted = gamma2(&j.compose(phi).unwrap().compose(q).unwrap()).map_err(|e| e.to_string())?;
        let dev = (base.lower - lifted.lower).abs().max((base.upper - lifted.upper).abs());
        worst = worst.max(dev);
        ensure(dev <= 1e-5, || format!("triple {i}: γ₂(φ) = [{}, {}], γ₂(jφq) = [{}, {}]", base.lower, base.upper, lifted.lower, lifted.upper))?;
    }
    Ok(format!("5 triples, worst deviation {worst:.2e}"))
}

fn c12_haar_twirl() -> Outcome {
    let samples = 4000;
    let bound = 5.0 / (samples as f64).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let e2 = Space::euclidean(2);
    let e3 = Space::euclidean(3);
    let triples = [(
            map(Space::linf(2), Space::l1(2), gaussian_matrix(&mut rng, 2, 2) * 0.5),
            map(e2.clone(), Space::linf(2), DMatrix::identity(2, 2)),
            map(Space::l1(2), e2.clone(), DMatrix::identity(2, 2)),
        ),
        (
            map(Space::l1(3), Space::euclidean(3), gaussian_matrix(&mut rng, 3, 3) * 0.5),
            map(e3.clone(), Space::l1(3), gaussian_matrix(&mut rng, 3, 3) * 0.5),
            map(Space::euclidean(3), e3, DMatrix::identity(3, 3)),
        ),
        {
            let cx = Space::new(SpaceDescriptor::linf(2).complex()).unwrap();
            let ch = Space::new(SpaceDescriptor::euclidean(2).complex()).unwrap();
            let m = DMatrix::from_fn(2, 2, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)) * 0.5);
            (
                OperatorMap::new_complex(cx.clone(), ch.clone(), m).unwrap(),
                OperatorMap::new_complex(ch.clone(), cx, DMatrix::identity(2, 2)).unwrap(),
                OperatorMap::new_complex(ch.clone(), ch, DMatrix::identity(2, 2)).unwrap(),
            )
        }];
    let mut worst = 0.0f64;
    for (i, (phi, alpha, beta)) in triples.iter().enumerate() {
        let t = haar_twirl(phi, alpha, beta, samples, 100 + i as u64).map_err(|e| e.to_string())?;
        let a = beta.compose(&phi.compose(alpha).unwrap()).unwrap().complex_matrix();
        let n = a.nrows();
        let expected = DMatrix::<Complex64>::identity(n, n) * (a.trace() / n as f64);
        let err = (t.complex_matrix() - expected).norm();
        worst = worst.max(err);
        ensure(err <= bound, || format!("triple {i}: Frobenius error {err} > {bound}"))?;
    }
    Ok(format!("3 triples, {samples} samples, worst error {worst:.4} <= {bound:.4}"))
}

struct Criterion {
    id: usize,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn criteria() -> Vec<Criterion> {
    let c = |id, name, secs, run| Criterion { id, name, budget: Duration::from_secs(secs), run };
    vec![
        c(1, "identity ideal norms", 10, c1_identity_ideal_norms as fn() -> Outcome),
        c(2, "pi2 multiplicativity", 60, c2_pi2_multiplicativity),
        c(3, "sandwich and one-sided limit bounds", 300, c3_sandwich_battery),
        c(4, "exact k=2 identity value", 30, c4_exact_k2_identity),
        c(5, "Gaussian moments", 120, c5_gaussian_moments),
        c(6, "injective norm growth", 300, c6_eps_growth),
        c(7, "injective/projective duality", 120, c7_duality),
        c(8, "tensor radius strictness", 60, c8_radius_strictness),
        c(9, "non-strictly convex failure", 10, c9_nonstrict_failure),
        c(10, "complex factorization property", 300, c10_complex_hfp),
        c(11, "heredity", 30, c11_heredity),
        c(12, "Haar twirl", 30, c12_haar_twirl),
    ]
}

fn selected() -> Option<Vec<usize>> {
    let v = std::env::var("TNL_CRITERIA").ok()?;
    Some(v.split(',').filter_map(|s| s.trim().parse().ok()).collect())
}

#[test]
fn acceptance() {
    let only = selected();
    let mut failures = Vec::new();
    // Written to the process stdout directly so the lines survive output
    // capture.
    let mut out = std::io::stdout();
    out.write_all(b"\n").unwrap();
    for c in criteria() {
        if only.as_ref().is_some_and(|o| !o.contains(&c.id)) {
            continue;
        }
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let elapsed = start.elapsed();
        let result = match result {
            Ok(d) if elapsed > c.budget => Err(format!("{d}; over budget")),
            other => other,
        };
        let (tag, detail) = match &result {
            Ok(d) => ("PASS", d.clone()),
            Err(e) => ("FAIL", e.clone()),
        };
        let line = format!(
            "[{tag}] criterion {:>2} {:<38} {:>7.2}s / {:>3}s  {detail}\n",
            c.id,
            c.name,
            elapsed.as_secs_f64(),
            c.budget.as_secs()
        );
        out.write_all(line.as_bytes()).unwrap();
        out.flush().unwrap();
        if result.is_err() {
            failures.push(c.id);
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}

