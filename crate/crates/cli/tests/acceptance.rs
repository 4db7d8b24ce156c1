//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured quantities. Run with `cargo test --test acceptance`.

use std::process::Command;
use std::time::Instant;

use nalgebra::DVector;
use radiso_core::descent::{
    descend, perturbed_gradient_wrapper, smooth_gd, solve, strongly_convex_gd, DescentConfig,
    Region, SvdSource, SvdTolPolicy,
};
use radiso_core::model::{MethodKind, ScalingVector, VectorSet, WeightVector};
use radiso_core::oracle::{newton_reference, rotation_scale_defect};
use radiso_core::polytope::{
    deepness_estimate, default_delta_grid, delta_s_min, gamma_general_position,
    hessian_min_eigenvalue_on_complement, hm_bound, membership, membership_lp, t_inf_bound,
    Membership,
};
use radiso_core::potential::{
    assemble, grad_f, grad_phi, grad_phi_subsets, hessian, phi, spectral_bound_check,
};
use radiso_core::{synth, Error};

fn smooth_cfg(eps: f64) -> DescentConfig {
    DescentConfig {
        eps,
        ..DescentConfig::default()
    }
}

/// Criterion 1: the closed-form planar triple. For theta in {10,15,20,25}
/// the solver must match t = (2 ln(1/(2 sin theta)), same, 0) within 1e-4 at
/// eps = 1e-6; at theta = 30 the minimizer is zero within 1e-8; each case
/// solves in under a second.
#[test]
fn acceptance_01_worked_example() {
    let c = WeightVector::uniform(2, 3).unwrap();
    for theta in [10.0, 15.0, 20.0, 25.0] {
        let x = synth::planar_triple(theta);
        let start = Instant::now();
        let r = solve(&x, &c, &smooth_cfg(1e-6)).unwrap();
        let elapsed = start.elapsed();
        let expected = synth::planar_triple_optimum(theta);
        let dev = (r.t_apx.vector() - &expected).amax();
        assert!(dev < 1e-4, "theta {theta}: deviation {dev}");
        assert!(
            elapsed.as_secs_f64() < 1.0,
            "theta {theta}: took {elapsed:?}"
        );
    }
    let x30 = synth::planar_triple(30.0);
    let start = Instant::now();
    let r30 = solve(&x30, &c, &smooth_cfg(1e-6)).unwrap();
    assert!(start.elapsed().as_secs_f64() < 1.0);
    assert!(
        r30.t_apx.vector().amax() <= 1e-8,
        "theta 30: |t| = {}",
        r30.t_apx.vector().amax()
    );
    println!("[PASS] criterion 1: closed-form triple matched for all five angles");
}

/// Criterion 2: isotropy residual at most 2 eps on 50 random general-position
/// instances up to n = 40, d = 8, within 60 seconds total.
#[test]
fn acceptance_02_isotropy_residual() {
    let eps = 1e-6;
    let mut rng = synth::rng(20_240_001);
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let d = 2 + i % 7; // 2..=8
        let n = (d + 3 + (i * 5) % 33).min(40);
        let x = synth::random_general_position(d, n, &mut rng);
        let c = if i % 2 == 0 {
            WeightVector::uniform(d, n).unwrap()
        } else {
            synth::random_interior_weights(d, n, &mut rng)
        };
        let r = solve(&x, &c, &smooth_cfg(eps)).unwrap();
        worst = worst.max(r.isotropy_residual);
        assert!(
            r.isotropy_residual <= 2.0 * eps,
            "instance {i} (d={d}, n={n}): residual {}",
            r.isotropy_residual
        );
    }
    let total = start.elapsed();
    assert!(total.as_secs_f64() < 60.0, "suite took {total:?}");
    println!(
        "[PASS] criterion 2: 50 instances, worst residual {worst:.3e}, total {:.1}s",
        total.as_secs_f64()
    );
}

/// Criterion 3: derivative correctness. SVD gradient vs central finite
/// differences (1e-5), Hessian entries vs finite differences of the gradient
/// (1e-4), and SVD vs Cauchy-Binet gradients (1e-9); 20 instances each.
#[test]
fn acceptance_03_derivative_correctness() {
    let mut rng = synth::rng(20_240_003);
    let mut worst_fd: f64 = 0.0;
    for _ in 0..20 {
        let d = 2 + (rand::Rng::random_range(&mut rng, 0..3usize));
        let n = d + 2 + rand::Rng::random_range(&mut rng, 0..(10 - d - 1));
        let x = synth::random_unit_vectors(d, n, &mut rng);
        let t = synth::random_scaling(n, 3.0, &mut rng);
        let g = assemble(&x, &ScalingVector::raw(t.clone()), 1e-14).unwrap();
        let grad = grad_phi(&g);
        let h = 1e-5;
        for j in 0..n {
            let mut tp = t.clone();
            tp[j] += h;
            let mut tm = t.clone();
            tm[j] -= h;
            let fp = phi(&assemble(&x, &ScalingVector::raw(tp), 1e-14).unwrap()).unwrap();
            let fm = phi(&assemble(&x, &ScalingVector::raw(tm), 1e-14).unwrap()).unwrap();
            let fd = (fp - fm) / (2.0 * h);
            worst_fd = worst_fd.max((grad[j] - fd).abs());
        }
    }
    assert!(worst_fd <= 1e-5, "gradient fd deviation {worst_fd:.3e}");

    let mut worst_hess: f64 = 0.0;
    for _ in 0..20 {
        let d = 2 + rand::Rng::random_range(&mut rng, 0..3usize);
        let n = d + 2 + rand::Rng::random_range(&mut rng, 0..3usize);
        let x = synth::random_unit_vectors(d, n, &mut rng);
        let t = synth::random_scaling(n, 2.0, &mut rng);
        let hm = hessian(&assemble(&x, &ScalingVector::raw(t.clone()), 1e-14).unwrap());
        let step = 1e-5;
        for k in 0..n {
            let mut tp = t.clone();
            tp[k] += step;
            let mut tm = t.clone();
            tm[k] -= step;
            let gp = grad_phi(&assemble(&x, &ScalingVector::raw(tp), 1e-14).unwrap());
            let gm = grad_phi(&assemble(&x, &ScalingVector::raw(tm), 1e-14).unwrap());
            let col = (gp - gm) / (2.0 * step);
            for j in 0..n {
                worst_hess = worst_hess.max((hm.matrix()[(j, k)] - col[j]).abs());
            }
        }
    }
    assert!(worst_hess <= 1e-4, "hessian fd deviation {worst_hess:.3e}");

    let mut worst_cb: f64 = 0.0;
    for _ in 0..20 {
        let d = 2 + rand::Rng::random_range(&mut rng, 0..3usize);
        let n = d + 2 + rand::Rng::random_range(&mut rng, 0..(12 - d - 1));
        let x = synth::random_unit_vectors(d, n, &mut rng);
        let t = ScalingVector::raw(synth::random_scaling(n, 3.0, &mut rng));
        let a = grad_phi(&assemble(&x, &t, 1e-14).unwrap());
        let b = grad_phi_subsets(&x, &t).unwrap();
        worst_cb = worst_cb.max((a - b).amax());
    }
    assert!(worst_cb <= 1e-9, "svd vs subset deviation {worst_cb:.3e}");
    println!(
        "[PASS] criterion 3: grad fd {worst_fd:.2e} <= 1e-5, hessian fd {worst_hess:.2e} <= 1e-4, \
         svd-vs-subsets {worst_cb:.2e} <= 1e-9"
    );
}

/// Criterion 4: structural constants on 100 random (instance, t) pairs:
/// gradient entries sum to d, |grad f|_1 <= 2d, largest Hessian eigenvalue
/// at most 1/2, and the all-ones vector in the Hessian kernel.
#[test]
fn acceptance_04_paper_constants() {
    let mut rng = synth::rng(20_240_004);
    for i in 0..100 {
        let d = 2 + i % 4;
        let n = d + 2 + i % 7;
        let x = synth::random_unit_vectors(d, n, &mut rng);
        let c = synth::random_interior_weights(d, n, &mut rng);
        let t = ScalingVector::raw(synth::random_scaling(n, 5.0, &mut rng));
        let g = assemble(&x, &t, 1e-14).unwrap();
        let grad = grad_phi(&g);
        assert!(
            (grad.sum() - d as f64).abs() <= 1e-9 * n as f64,
            "pair {i}: gradient sum {}",
            grad.sum()
        );
        let l1: f64 = grad_f(&g, &c).iter().map(|v| v.abs()).sum();
        assert!(l1 <= 2.0 * d as f64 + 1e-9 * n as f64, "pair {i}: |grad f|_1 = {l1}");
        let h = hessian(&g);
        let top = spectral_bound_check(&h);
        assert!(top <= 0.5 + 1e-8, "pair {i}: top eigenvalue {top}");
        let ones = DVector::from_element(n, 1.0);
        let kernel_defect = (h.matrix() * ones).amax();
        assert!(
            kernel_defect <= 1e-9 * n as f64,
            "pair {i}: H*1 defect {kernel_defect:.3e}"
        );
    }
    println!("[PASS] criterion 4: gradient sum, 2d bound, 1/2 spectral bound, kernel on 100 pairs");
}

/// Criterion 5: bound soundness over the regression suite. Solved min-zero
/// norms stay under the deepness bound; in general position they also stay
/// under the corrected margin bound with gamma = c_min/d; and the exact
/// smallest Hessian eigenvalue on the mean-zero slice dominates both
/// strong-convexity lower bounds.
#[test]
fn acceptance_05_bound_soundness() {
    let mut rng = synth::rng(20_240_005);
    let mut checked = 0;
    for i in 0..12 {
        let d = 2 + i % 3;
        let n = d + 3 + i % 4;
        let x = synth::random_general_position(d, n, &mut rng);
        let c = WeightVector::uniform(d, n).unwrap();
        let Ok(cert) = deepness_estimate(&x, &c, &default_delta_grid()) else {
            continue;
        };
        let bound = t_inf_bound(&c, cert.eta, cert.delta, d);
        let r = solve(&x, &c, &smooth_cfg(1e-8)).unwrap();
        let t_inf = r.t_apx.vector().amax();
        assert!(
            t_inf <= bound + 1e-9,
            "instance {i}: |t*| = {t_inf} > deepness bound {bound}"
        );
        let gamma = gamma_general_position(&c, &x).unwrap();
        let r0 = hm_bound(&x, gamma).unwrap();
        assert!(
            t_inf <= r0 + 1e-9,
            "instance {i}: |t*| = {t_inf} > margin bound {r0}"
        );
        // Strong convexity lower bounds, pointwise at random slice points.
        for _ in 0..5 {
            let mut t = synth::random_scaling(n, 1.0, &mut rng);
            let mean = t.mean();
            t.apply(|v| *v -= mean);
            let b =
                radiso_core::polytope::alpha_bounds(&x, cert.eta, cert.delta, t.amax()).unwrap();
            let g = assemble(&x, &ScalingVector::raw(t), 1e-14).unwrap();
            let exact = hessian_min_eigenvalue_on_complement(&hessian(&g));
            assert!(exact >= b.alpha_general - 1e-12);
            if let Some(gp) = b.alpha_gp {
                assert!(exact >= gp - 1e-12);
            }
        }
        checked += 1;
    }
    assert!(checked >= 10, "only {checked} certified instances");
    println!("[PASS] criterion 5: norm and alpha bounds sound on {checked} instances, zero violations");
}

/// Criterion 6: rate envelopes. Smooth descent obeys the value envelope
/// `f(t_s) - f* <= 2 beta |t*|^2 / (s-1) * 1.01`; strongly convex descent
/// contracts iterate distances by `e^{-s/(2 kappa)}` with kappa from the
/// exact numerically computed modulus; 10 instances.
#[test]
fn acceptance_06_rate_envelopes() {
    let mut rng = synth::rng(20_240_006);
    for i in 0..10 {
        let d = 2 + i % 2;
        let n = d + 3 + i % 3;
        let x = synth::random_general_position(d, n, &mut rng);
        let c = synth::random_interior_weights(d, n, &mut rng);
        let reference = newton_reference(&x, &c, 1e-12).unwrap();
        let t_star = reference.t_star.vector();
        let t_star_sq = t_star.norm_squared();

        // Smooth value envelope.
        let mut cfg = smooth_cfg(1e-9);
        cfg.record_trace = true;
        let region = Region::box_positive(radiso_core::tol::T_RANGE_LIMIT);
        let mut src = SvdSource::new(&x, &c, SvdTolPolicy::Fixed(1e-14), 1e-9);
        let run = descend(MethodKind::Smooth, &mut src, n, &region, &cfg).unwrap();
        for (s, point) in run.trace.as_ref().unwrap().iter().enumerate().skip(1) {
            let envelope = 2.0 * 0.5 * t_star_sq / s as f64 * 1.01 + 1e-12;
            let gap = point.f_value - reference.f_star;
            assert!(
                gap <= envelope,
                "instance {i}: smooth gap {gap} > envelope {envelope} at step {s}"
            );
        }

        // Strongly convex distance contraction with the measured modulus.
        let mean = t_star.mean();
        let t_star_slice = t_star.map(|v| v - mean);
        let mut sc_cfg = smooth_cfg(1e-9);
        sc_cfg.record_trace = true;
        sc_cfg.alpha = Some(0.01); // feeds only the momentum bookkeeping
        sc_cfg.method = MethodKind::StronglyConvex;
        let sc_region = Region::projected_e0(2.0 * (t_star.amax() + 1.0));
        let mut sc_src = SvdSource::new(&x, &c, SvdTolPolicy::Fixed(1e-14), 1e-9);
        let sc_run = descend(
            MethodKind::StronglyConvex,
            &mut sc_src,
            n,
            &sc_region,
            &sc_cfg,
        )
        .unwrap();
        let iterates = sc_run.iterates.as_ref().unwrap();
        // Exact modulus: smallest slice eigenvalue along the segments from
        // each iterate to the minimizer.
        let mut alpha_exact = f64::INFINITY;
        for it in iterates {
            for k in 0..=4 {
                let tau = k as f64 / 4.0;
                let point = it * (1.0 - tau) + &t_star_slice * tau;
                let g = assemble(&x, &ScalingVector::raw(point), 1e-14).unwrap();
                alpha_exact = alpha_exact.min(hessian_min_eigenvalue_on_complement(&hessian(&g)));
            }
        }
        assert!(alpha_exact > 0.0);
        let kappa = 0.5 / alpha_exact;
        let start_dist = (&t_star_slice - &iterates[0]).norm();
        for (s, it) in iterates.iter().enumerate().skip(1) {
            let dist = (&t_star_slice - it).norm();
            let envelope = (-(s as f64) / (2.0 * kappa)).exp() * start_dist * 1.01 + 1e-10;
            assert!(
                dist <= envelope,
                "instance {i}: sc distance {dist} > envelope {envelope} at step {s} \
                 (alpha = {alpha_exact:.3e})"
            );
        }
    }
    println!("[PASS] criterion 6: smooth value and strongly-convex distance envelopes on 10 instances");
}

/// Criterion 7: feasibility logic on the canonical degenerate instances,
/// plus agreement of the halfspace and vertex-representation membership
/// checks on 50 mixed instances.
#[test]
fn acceptance_07_feasibility_logic() {
    // Duplicated direction: outside, with the witness pair.
    let dup = VectorSet::from_vectors(2, &[vec![1.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]])
        .unwrap();
    let c3 = WeightVector::uniform(2, 3).unwrap();
    match solve(&dup, &c3, &DescentConfig::default()) {
        Err(Error::Infeasible { report, .. }) => {
            assert_eq!(report.member, Membership::Outside);
            assert_eq!(report.witness.unwrap().indices, vec![0, 1]);
        }
        other => panic!("expected infeasible, got {other:?}"),
    }

    // Balanced duplicated pairs: reducible, block-solved to 1e-8.
    let pairs = VectorSet::from_vectors(
        2,
        &[vec![1.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, 1.0]],
    )
    .unwrap();
    let c4 = WeightVector::from_slice(2, &[0.5; 4]).unwrap();
    let r = solve(&pairs, &c4, &smooth_cfg(1e-8)).unwrap();
    assert!(r.isotropy_residual <= 1e-8);

    // Vertex weights: boundary, and the strongly convex solver refuses.
    let mut rng = synth::rng(20_240_007);
    let x = synth::random_general_position(2, 4, &mut rng);
    let vertex_c = WeightVector::from_slice(2, &[1.0, 1.0, 1e-13, 1e-13]).unwrap();
    assert_eq!(membership(&x, &vertex_c).unwrap().member, Membership::Boundary);
    let mut sc = smooth_cfg(1e-6);
    sc.method = MethodKind::StronglyConvex;
    sc.alpha = Some(0.1);
    assert!(matches!(
        strongly_convex_gd(&x, &vertex_c, &sc),
        Err(Error::Infeasible { .. })
    ));

    // Representation agreement on 50 mixed instances.
    let mut agree = 0;
    for k in 0..50 {
        let d = 2 + k % 3;
        let n = (d + 2 + k % 6).min(12);
        let (xi, ci) = match k % 4 {
            0 => {
                let x = synth::random_general_position(d, n, &mut rng);
                let c = WeightVector::uniform(d, n).unwrap();
                (x, c)
            }
            1 => {
                let x = synth::random_general_position(d, n, &mut rng);
                let c = synth::random_interior_weights(d, n, &mut rng);
                (x, c)
            }
            2 => {
                // Duplicated first direction.
                let base = synth::random_general_position(d, n - 1, &mut rng);
                let mut cols: Vec<Vec<f64>> = (0..n - 1)
                    .map(|j| base.matrix().column(j).iter().copied().collect())
                    .collect();
                cols.push(cols[0].clone());
                let x = VectorSet::from_vectors(d, &cols).unwrap();
                let c = WeightVector::uniform(d, n).unwrap();
                (x, c)
            }
            _ => {
                // Single overloaded coordinate (outside).
                let x = synth::random_general_position(d, n, &mut rng);
                let mut w = vec![(d as f64 - 1.1) / (n - 1) as f64; n];
                w[0] = 1.1;
                let c = WeightVector::from_slice(d, &w).unwrap();
                (x, c)
            }
        };
        let a = membership(&xi, &ci).unwrap();
        let b = membership_lp(&xi, &ci).unwrap();
        assert_eq!(a.member, b.member, "instance {k}");
        agree += 1;
    }
    assert_eq!(agree, 50);
    println!("[PASS] criterion 7: degenerate verdicts correct; CLL and LP agree on 50 instances");
}

/// Criterion 8: uniqueness up to rotation and scale between transforms from
/// different methods on 10 irreducible instances.
#[test]
fn acceptance_08_uniqueness() {
    let mut rng = synth::rng(20_240_008);
    for i in 0..10 {
        let d = 2 + i % 2;
        let n = d + 3 + i % 4;
        let x = synth::random_general_position(d, n, &mut rng);
        let c = synth::random_interior_weights(d, n, &mut rng);
        let a = smooth_gd(&x, &c, &smooth_cfg(1e-9)).unwrap();
        let mut sc = smooth_cfg(1e-9);
        sc.method = MethodKind::StronglyConvex;
        sc.alpha = Some(0.01);
        let b = strongly_convex_gd(&x, &c, &sc).unwrap();
        let (_, defect) = rotation_scale_defect(&a.transform, &b.transform).unwrap();
        assert!(defect <= 1e-6, "instance {i}: defect {defect:.3e}");
    }
    println!("[PASS] criterion 8: transform pairs scalar-orthogonal within 1e-6 on 10 instances");
}

/// Criterion 9: entropy identity. After mapping into radial c-isotropic
/// position, the re-solved minimizer satisfies `t_i - log c_i` constant
/// within 1e-7 and `<t,c> - phi(t) = sum c_i log c_i` within 1e-9.
#[test]
fn acceptance_09_entropy_identity() {
    let mut rng = synth::rng(20_240_009);
    for i in 0..10 {
        let d = 2 + i % 2;
        let n = d + 3 + i % 3;
        let x = synth::random_general_position(d, n, &mut rng);
        let c = synth::random_interior_weights(d, n, &mut rng);
        let first = newton_reference(&x, &c, 1e-12).unwrap();
        let g = assemble(&x, &first.t_star, f64::EPSILON).unwrap();
        let map = g.q_inv_sqrt_symmetric().unwrap();
        let cols: Vec<Vec<f64>> = (0..n)
            .map(|j| {
                let v = &map * x.column(j);
                (&v / v.norm()).iter().copied().collect()
            })
            .collect();
        let z = VectorSet::from_vectors(d, &cols).unwrap();
        let second = newton_reference(&z, &c, 1e-12).unwrap();
        let offsets = second.t_star.vector() - c.vector().map(|v| v.ln());
        let spread = offsets.max() - offsets.min();
        assert!(spread <= 1e-7, "instance {i}: offset spread {spread:.3e}");
        let gz = assemble(&z, &second.t_star, f64::EPSILON).unwrap();
        let dual = second.t_star.vector().dot(c.vector()) - phi(&gz).unwrap();
        let entropy: f64 = c.vector().iter().map(|&ci| ci * ci.ln()).sum();
        assert!(
            (dual - entropy).abs() <= 1e-9,
            "instance {i}: duality defect {:.3e}",
            (dual - entropy).abs()
        );
    }
    println!("[PASS] criterion 9: entropy attainment and duality identity on 10 instances");
}

/// Criterion 10: approximate-gradient robustness. With an eps^2-relative
/// perturbation at eps = 1e-2, the final value gap exceeds the exact run's
/// by at most `M^2 (t-1) eps^2 / beta` with the measured gradient bound M.
#[test]
fn acceptance_10_perturbed_gradients() {
    let mut rng = synth::rng(20_240_010);
    let eps = 1e-2;
    for i in 0..5 {
        let d = 2 + i % 2;
        let n = d + 3;
        let x = synth::random_general_position(d, n, &mut rng);
        let c = synth::random_interior_weights(d, n, &mut rng);
        let reference = newton_reference(&x, &c, 1e-12).unwrap();
        let mut cfg = smooth_cfg(1e-15);
        cfg.record_trace = true;
        cfg.max_iters = 60;
        let region = Region::box_positive(radiso_core::tol::T_RANGE_LIMIT);

        let mut exact_src = SvdSource::new(&x, &c, SvdTolPolicy::Fixed(1e-14), 1e-15);
        let exact = descend(MethodKind::Smooth, &mut exact_src, n, &region, &cfg).unwrap();
        let inner = SvdSource::new(&x, &c, SvdTolPolicy::Fixed(1e-14), 1e-15);
        let mut noisy_src = perturbed_gradient_wrapper(inner, eps, 97 + i as u64).unwrap();
        let noisy = descend(MethodKind::Smooth, &mut noisy_src, n, &region, &cfg).unwrap();
        assert!(noisy_src.max_ratio() <= eps * eps);

        let te = exact.trace.unwrap();
        let tn = noisy.trace.unwrap();
        let steps = te.len().min(tn.len());
        let m = te.iter().map(|p| p.grad_norm).fold(0.0f64, f64::max);
        let gap_exact = te[steps - 1].f_value - reference.f_star;
        let gap_noisy = tn[steps - 1].f_value - reference.f_star;
        let envelope = m * m * (steps as f64 - 1.0) * eps * eps / 0.5;
        assert!(
            gap_noisy <= gap_exact + envelope + 1e-12,
            "instance {i}: noisy {gap_noisy:.3e} vs exact {gap_exact:.3e} + {envelope:.3e}"
        );
    }
    println!("[PASS] criterion 10: perturbed-gradient value gap within the drift envelope on 5 instances");
}

/// Criterion 11: repeated CLI runs under different thread caps produce
/// byte-identical reports.
#[test]
fn acceptance_11_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let t = 15.0f64.to_radians();
    let inst = dir.path().join("b1.json");
    std::fs::write(
        &inst,
        format!(
            r#"{{"d":2,"n":3,"vectors":[[{},{}],[{},{}],[0.0,1.0]],"c":"uniform"}}"#,
            t.cos(),
            t.sin(),
            t.cos(),
            -t.sin()
        ),
    )
    .unwrap();
    let mut outputs: Vec<Vec<u8>> = Vec::new();
    for threads in ["1", "4"] {
        for _ in 0..2 {
            let out = Command::new(env!("CARGO_BIN_EXE_radiso"))
                .args([
                    "solve",
                    "--in",
                    inst.to_str().unwrap(),
                    "--eps",
                    "1e-8",
                    "--method",
                    "smooth_nesterov",
                ])
                .env("RADISO_THREADS", threads)
                .output()
                .unwrap();
            assert_eq!(out.status.code(), Some(0));
            outputs.push(out.stdout);
        }
    }
    for other in &outputs[1..] {
        assert_eq!(&outputs[0], other);
    }
    println!("[PASS] criterion 11: byte-identical reports across RADISO_THREADS in {{1,4}}");
}
