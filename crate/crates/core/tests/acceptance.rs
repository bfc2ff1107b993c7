//! Acceptance suite: one line per criterion, nonzero exit on any failure.
//!
//! Run with `cargo test -p ultragh --test acceptance`.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;
use ultragh::chain::min_connecting_scale;
use ultragh::generators::{
    euclidean_space, geometric_progression, grid_segment, random_points, random_ultrametric,
    SpaceRng,
};
use ultragh::gh::{gh_exact, product_correspondence, GhLimits, GhResult};
use ultragh::kuratowski::{dt_connectivity_check, dt_correspondence, sample_dt};
use ultragh::metric::{diameter, product_l1, product_linf, ultrametric_defect, FiniteMetricSpace};
use ultragh::ultra::{bottleneck, minimax_closure_oracle, subdominant};

use common::*;

/// Float slack for inequality-style checks.
const SLACK: f64 = 1e-12;

type Outcome = Result<String, String>;

/// Id, title, time budget in seconds, check.
type Criterion = (&'static str, &'static str, u64, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn exact(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<GhResult, String> {
    let r = gh_exact(x, y, &GhLimits::default());
    if !r.exact {
        return Err(format!(
            "solver did not finish on {}x{} spaces",
            x.len(),
            y.len()
        ));
    }
    Ok(r)
}

fn u(x: &FiniteMetricSpace) -> FiniteMetricSpace {
    subdominant(x).space
}

fn ac1_oracle_equivalence() -> Outcome {
    let mut rng = rng(1);
    for k in 0..500 {
        let n = rng.random_range(1..=8);
        let x = if k % 2 == 0 {
            random_euclid(&mut rng, n)
        } else {
            ultragh::generators::random_ultrametric_with(n, &mut rng)
        };
        let fast = u(&x).rows();
        let slow = minimax_closure_oracle(&x).map_err(|e| e.to_string())?;
        ensure!(
            fast == slow,
            "instance {k}: spanning-tree route differs from closure oracle"
        );
    }
    Ok("500 spaces, exact entrywise equality".into())
}

fn ac2_fixed_points_and_idempotence() -> Outcome {
    let mut rng = rng(2);
    for k in 0..200 {
        let n = rng.random_range(1..=10);
        let x = ultragh::generators::random_ultrametric_with(n, &mut rng);
        let ux = subdominant(&x);
        ensure!(ux.space == x, "ultrametric instance {k} is not fixed");
    }
    for k in 0..200 {
        let n = rng.random_range(1..=10);
        let x = random_space(&mut rng, n);
        let once = u(&x);
        ensure!(u(&once) == once, "metric instance {k}: U(U(X)) != U(X)");
    }
    Ok("200 fixed points, 200 idempotence checks".into())
}

fn ac3_solver_vs_enumeration() -> Outcome {
    let mut rng = rng(3);
    let pool: Vec<FiniteMetricSpace> = (0..30)
        .map(|_| {
            let n = rng.random_range(1..=3);
            random_space(&mut rng, n)
        })
        .collect();
    let check = |x: &FiniteMetricSpace, y: &FiniteMetricSpace, tag: &str| -> Result<(), String> {
        let r = exact(x, y)?;
        let brute = brute_force_gh(x, y);
        ensure!(
            (r.upper - brute).abs() <= SLACK && r.lower == r.upper,
            "{tag}: solver {} vs enumeration {brute}",
            r.upper
        );
        let w = r.witness.as_ref().ok_or("no witness")?;
        let dis = w.distortion(x, y).map_err(|e| e.to_string())?;
        ensure!(
            (dis - 2.0 * r.upper).abs() <= SLACK,
            "{tag}: witness distortion {dis} vs {}",
            2.0 * r.upper
        );
        Ok(())
    };
    let mut pairs = 0;
    for (a, x) in pool.iter().enumerate() {
        for (b, y) in pool.iter().enumerate() {
            check(x, y, &format!("pool pair ({a},{b})"))?;
            pairs += 1;
        }
    }
    let shapes = [
        (3, 4),
        (4, 3),
        (2, 6),
        (6, 2),
        (2, 5),
        (4, 2),
        (3, 3),
        (1, 12),
        (12, 1),
        (2, 4),
    ];
    for k in 0..20 {
        let (n, m) = shapes[k % shapes.len()];
        let x = random_space(&mut rng, n);
        let y = random_space(&mut rng, m);
        check(&x, &y, &format!("sampled pair {k} ({n}x{m})"))?;
        pairs += 1;
    }
    Ok(format!(
        "{pairs} pairs agree with enumeration; witnesses re-verified"
    ))
}

fn ac4_ultrametric_lower_bound() -> Outcome {
    let mut rng = rng(4);
    let mut strict = 0;
    for k in 0..100 {
        let (n, m) = (rng.random_range(1..=5), rng.random_range(1..=5));
        let x = random_space(&mut rng, n);
        let y = random_space(&mut rng, m);
        let d = exact(&x, &y)?.upper;
        let du = exact(&u(&x), &u(&y))?.upper;
        ensure!(d + SLACK >= du, "pair {k}: d_GH = {d} < d_GH(U,U) = {du}");
        if d > du {
            strict += 1;
        }
    }
    Ok(format!("100 pairs hold ({strict} strictly)"))
}

fn ac5_product_formula() -> Outcome {
    let mut rng = rng(5);
    for k in 0..100 {
        let n = rng.random_range(1..=6);
        let m = rng.random_range(1..=36 / n).min(6);
        let x = random_space(&mut rng, n);
        let y = random_space(&mut rng, m);
        let lhs = u(&product_l1(&x, &y).map_err(|e| e.to_string())?);
        let rhs = product_linf(&u(&x), &u(&y)).map_err(|e| e.to_string())?;
        ensure!(lhs.labels() == rhs.labels(), "pair {k}: pair labels differ");
        ensure!(
            lhs.flat() == rhs.flat(),
            "pair {k}: U(X x1 Y) != U(X) xinf U(Y)"
        );
    }
    let mut bumped = 0;
    for k in 0..50 {
        let n = rng.random_range(2..=5);
        let m = rng.random_range(2..=5);
        let x = random_dyadic_space(&mut rng, n);
        let y = random_dyadic_space(&mut rng, m);
        let (table, above) = random_fair_table(&mut rng, &x, &y);
        ensure!(table.check_fair(0.0), "table {k} is not fair");
        ensure!(
            table.check_dominates_linf(0.0),
            "table {k} does not dominate l-infinity"
        );
        let space = table.to_space(0.0).map_err(|e| format!("table {k}: {e}"))?;
        let rhs = product_linf(&u(&x), &u(&y)).map_err(|e| e.to_string())?;
        ensure!(
            u(&space).flat() == rhs.flat(),
            "table {k}: U(X x_rho Y) != U(X) xinf U(Y)"
        );
        if above > 0 {
            bumped += 1;
        }
    }
    ensure!(
        bumped >= 40,
        "only {bumped} of 50 tables differ from l-infinity"
    );
    Ok(format!(
        "100 l1 products exact; 50 fair tables exact ({bumped} strictly above l-infinity)"
    ))
}

fn ac6_product_is_one_lipschitz() -> Outcome {
    let mut rng = rng(6);
    for k in 0..30 {
        let (n, m, a) = (
            rng.random_range(1..=3),
            rng.random_range(1..=3),
            rng.random_range(1..=2),
        );
        let x = random_space(&mut rng, n);
        let y = random_space(&mut rng, m);
        let factor = random_space(&mut rng, a);
        let base = exact(&x, &y)?;
        let xa = product_l1(&x, &factor).map_err(|e| e.to_string())?;
        let ya = product_l1(&y, &factor).map_err(|e| e.to_string())?;
        let lifted = exact(&xa, &ya)?.upper;
        ensure!(
            lifted <= base.upper + SLACK,
            "triple {k}: {lifted} > {}",
            base.upper
        );
        let r = base.witness.as_ref().ok_or("no witness")?;
        let s = product_correspondence(r, &factor);
        let (dr, ds) = (
            r.distortion(&x, &y).map_err(|e| e.to_string())?,
            s.distortion(&xa, &ya).map_err(|e| e.to_string())?,
        );
        // (a + c) - (b + c) may round differently from a - b
        ensure!(
            (dr - ds).abs() <= SLACK,
            "triple {k}: lifted correspondence distortion {ds} != {dr}"
        );
    }
    Ok("30 triples".into())
}

fn ac7_psi_isometry_on_ultrametrics() -> Outcome {
    let mut rng = rng(7);
    let mut largest = 0;
    for delta in [0.5, 0.25] {
        let a = grid_segment(1.0, delta).map_err(|e| e.to_string())?;
        for k in 0..20 {
            let (n, m) = (rng.random_range(1..=3), rng.random_range(1..=3));
            let x = ultragh::generators::random_ultrametric_with(n, &mut rng);
            let y = ultragh::generators::random_ultrametric_with(m, &mut rng);
            let base = exact(&x, &y)?.upper;
            let xa = product_l1(&x, &a).map_err(|e| e.to_string())?;
            let ya = product_l1(&y, &a).map_err(|e| e.to_string())?;
            largest = largest.max(xa.len().max(ya.len()));
            let lifted = exact(&xa, &ya)?.upper;
            ensure!(
                base - delta <= lifted && lifted <= base + SLACK,
                "delta {delta}, pair {k}: {lifted} outside [{}, {base}]",
                base - delta
            );
        }
    }
    Ok(format!(
        "40 pairs (20 per delta), products up to {largest} points"
    ))
}

/// Moves each point by a random vector of length at most `radius`.
fn jitter(rng: &mut SpaceRng, pts: &[Vec<f64>], radius: f64) -> Vec<Vec<f64>> {
    pts.iter()
        .map(|p| {
            let dir: Vec<f64> = p.iter().map(|_| rng.random_range(-1.0..1.0)).collect();
            let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
            let scale = radius * rng.random_range(0.0..1.0) / norm;
            p.iter().zip(&dir).map(|(a, d)| a + d * scale).collect()
        })
        .collect()
}

fn ac8_ult_is_closed() -> Outcome {
    let mut rng = rng(8);
    let (mut in_regime, mut uniform_hits, mut tries) = (0, 0, 0);
    while in_regime < 100 {
        tries += 1;
        ensure!(tries < 5000, "could not populate the regime");
        let n = rng.random_range(3..=5);
        let dim = rng.random_range(1..=3);
        let pts = random_points(n, dim, &mut rng);
        let x = euclidean_space(&pts).map_err(|e| e.to_string())?;
        let t = ultrametric_defect(&x);
        if t <= 0.0 {
            continue;
        }
        let adversarial = tries % 2 == 0;
        let y = if adversarial {
            // every distance moves by at most t/8
            euclidean_space(&jitter(&mut rng, &pts, t / 16.0)).map_err(|e| e.to_string())?
        } else {
            let m = rng.random_range(1..=5);
            random_space(&mut rng, m)
        };
        let d = exact(&x, &y)?.upper;
        if d < t / 4.0 {
            in_regime += 1;
            if !adversarial {
                uniform_hits += 1;
            }
            ensure!(
                ultrametric_defect(&y) > 0.0,
                "Y within {d} < t/4 = {} of X but ultrametric",
                t / 4.0
            );
        }
    }
    Ok(format!(
        "100 pairs below t/4 ({uniform_hits} from uniform sampling, {tries} draws)"
    ))
}

fn ac9_dt_distortion_bound() -> Outcome {
    let mut rng = rng(9);
    let mut worst_ratio = 0.0f64;
    for k in 0..50 {
        let n = rng.random_range(2..=5);
        let x = random_space(&mut rng, n);
        let t = if k % 2 == 0 {
            bottleneck(&x)
        } else {
            diameter(&x)
        };
        let dt = sample_dt(&x, t, t / 4.0).map_err(|e| e.to_string())?;
        let r = dt_correspondence(&x, &dt).map_err(|e| e.to_string())?;
        let dis = r.distortion(&x, &dt.space).map_err(|e| e.to_string())?;
        ensure!(dis <= t + SLACK, "instance {k}: distortion {dis} > t = {t}");
        worst_ratio = worst_ratio.max(dis / t);
        let c = bottleneck(&x);
        let connected = dt_connectivity_check(&x, c, c / 4.0).map_err(|e| e.to_string())?;
        ensure!(
            connected,
            "instance {k}: D_c sample not chain connected at c = bottleneck"
        );
    }
    Ok(format!("50 instances, max distortion/t = {worst_ratio:.3}"))
}

fn ac10_identities() -> Outcome {
    let mut rng = rng(10);
    for k in 0..300 {
        let n = rng.random_range(1..=12);
        let x = random_space(&mut rng, n);
        let (a, b, c) = (min_connecting_scale(&x), bottleneck(&x), diameter(&u(&x)));
        ensure!(a == b && b == c, "instance {k}: {a}, {b}, {c}");
    }
    let mut prev = 0.0;
    for count in 2..=10 {
        let q = geometric_progression(2.0, count).map_err(|e| e.to_string())?;
        let b = bottleneck(&q);
        let expected = 2f64.powi(count as i32) - 2f64.powi(count as i32 - 1);
        ensure!(b == expected, "q_2 truncated at {count}: {b} != {expected}");
        ensure!(b > prev, "bottleneck did not grow at {count}");
        prev = b;
    }
    Ok(format!(
        "300 spaces exact; q_2 bottleneck reaches {prev} at N = 10"
    ))
}

fn ac11_pseudometric_laws() -> Outcome {
    let mut rng = rng(11);
    for k in 0..50 {
        let mut draw = || {
            let n = rng.random_range(1..=4);
            random_space(&mut rng, n)
        };
        let (x, y, z) = (draw(), draw(), draw());
        let xy = exact(&x, &y)?.upper;
        let yx = exact(&y, &x)?.upper;
        ensure!(xy == yx, "triple {k}: asymmetric {xy} vs {yx}");
        let yz = exact(&y, &z)?.upper;
        let xz = exact(&x, &z)?.upper;
        ensure!(xz <= xy + yz + SLACK, "triple {k}: {xz} > {xy} + {yz}");
    }
    // the distance between equal spaces is zero
    let x = random_ultrametric(4, 0).map_err(|e| e.to_string())?;
    ensure!(exact(&x, &x)?.upper == 0.0, "d_GH(X, X) != 0");
    Ok("50 triples".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        (
            "AC1",
            "U equals minimax closure oracle",
            5,
            ac1_oracle_equivalence,
        ),
        (
            "AC2",
            "fixed points and idempotence of U",
            2,
            ac2_fixed_points_and_idempotence,
        ),
        (
            "AC3",
            "exact solver equals enumeration",
            60,
            ac3_solver_vs_enumeration,
        ),
        (
            "AC4",
            "d_GH(X,Y) >= d_GH(U(X),U(Y))",
            120,
            ac4_ultrametric_lower_bound,
        ),
        (
            "AC5",
            "U(X x_rho Y) = U(X) x_inf U(Y)",
            10,
            ac5_product_formula,
        ),
        (
            "AC6",
            "X -> X x A is 1-Lipschitz",
            120,
            ac6_product_is_one_lipschitz,
        ),
        (
            "AC7",
            "X -> X x A isometric on ultrametrics (grid surrogate)",
            300,
            ac7_psi_isometry_on_ultrametrics,
        ),
        (
            "AC8",
            "ultrametric spaces form a closed class",
            120,
            ac8_ult_is_closed,
        ),
        (
            "AC9",
            "d_GH(X, D_t) <= t/2 and D_c connectivity",
            30,
            ac9_dt_distortion_bound,
        ),
        (
            "AC10",
            "connecting scale = bottleneck = diam U; q_2 growth",
            5,
            ac10_identities,
        ),
        (
            "AC11",
            "d_GH symmetry and triangle inequality",
            180,
            ac11_pseudometric_laws,
        ),
    ];

    let mut failures = 0;
    for (id, title, budget, run) in criteria {
        let start = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let budget = Duration::from_secs(budget);
        let verdict = match outcome {
            Ok(detail) if elapsed <= budget => Ok(detail),
            Ok(detail) => Err(format!("{detail}; over time budget")),
            Err(e) => Err(e),
        };
        match verdict {
            Ok(detail) => println!(
                "[PASS] {id} {title} ({:.2}s / {}s): {detail}",
                elapsed.as_secs_f64(),
                budget.as_secs()
            ),
            Err(e) => {
                failures += 1;
                println!(
                    "[FAIL] {id} {title} ({:.2}s / {}s): {e}",
                    elapsed.as_secs_f64(),
                    budget.as_secs()
                );
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", 11 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
