//! Acceptance suite. Each test prints one `criterion N: PASS|FAIL` line and
//! fails if its check or its runtime budget is missed.
//!
//! Run with `cargo test -p nilmix --test acceptance -- --nocapture`.

use std::time::{Duration, Instant};

use nilmix::collect::{
    binomial_mod_p_maxprob, collect_step2, subgroup_generation_moment, unif_span_check, WalkWord,
};
use nilmix::ensemble::{run_ensemble_on, ExperimentConfig, Mode};
use nilmix::entropic::{entropic_time, gaussian_approximation};
use nilmix::geometry::{
    bfs_distances, diam_bound_rhs, diam_subgroup, gcd_subgroup_law, greedy_power_decomposition,
    layer_diameters, triangle_decomposition_check, GeneratorSet,
};
use nilmix::group::{uniform_elements, Element, GroupSpec, GroupTable, DEFAULT_CAP};
use nilmix::mixing::{projected_start_identity_check, reduction_gap, RelaxMode, RelaxationSandwich};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn build(spec: GroupSpec) -> GroupTable {
    GroupTable::build(&spec, DEFAULT_CAP).unwrap()
}

fn verdict(n: u32, name: &str, ok: bool, detail: &str, start: Instant, budget: Duration) {
    let elapsed = start.elapsed();
    let in_time = elapsed <= budget;
    let pass = ok && in_time;
    println!(
        "criterion {n}: {} {name}: {detail} ({:.2}s of {}s)",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs()
    );
    assert!(ok, "criterion {n} ({name}) failed: {detail}");
    assert!(in_time, "criterion {n} ({name}) exceeded {budget:?}: {elapsed:?}");
}

#[test]
fn criterion_01_projection_identity() {
    let start = Instant::now();
    let times = [0.5, 1.0, 2.0, 4.0];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    let mut cases = 0;
    for spec in [GroupSpec::heisenberg(3, 1), GroupSpec::unitriangular(2, 4)] {
        let g = build(spec);
        for _ in 0..10 {
            let k = rng.random_range(2..=4);
            let s = GeneratorSet::random(&g, k, &mut rng);
            for c in projected_start_identity_check(&g, &s, &times).unwrap() {
                worst = worst.max(c.diff());
                cases += 1;
            }
        }
    }
    verdict(
        1,
        "projection identity",
        worst <= 1e-12,
        &format!("max |TV_lifted - TV_projected| = {worst:.3e} over {cases} cases"),
        start,
        Duration::from_secs(30),
    );
}

#[test]
fn criterion_02_step2_collection() {
    let start = Instant::now();
    let g = build(GroupSpec::heisenberg(5, 1));
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let k = 4;
    let mut agree = 0;
    let total = 1000;
    for _ in 0..total {
        let gens = uniform_elements(&g, k, &mut rng);
        let len = rng.random_range(0..=40);
        let pairs: Vec<(u32, i8)> = (0..len)
            .map(|_| (rng.random_range(1..=k as u32), if rng.random_bool(0.5) { 1 } else { -1 }))
            .collect();
        let w = WalkWord::from_pairs(k, &pairs);
        if collect_step2(&g, &w, &gens).unwrap() == w.evaluate(&g, &gens) {
            agree += 1;
        }
    }
    verdict(
        2,
        "step-2 collection identity",
        agree == total,
        &format!("{agree}/{total} words equal"),
        start,
        Duration::from_secs(10),
    );
}

#[test]
fn criterion_03_diameter_bounds() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut failures = Vec::new();
    let mut sets = 0;
    for spec in [
        GroupSpec::heisenberg(3, 1),
        GroupSpec::heisenberg(5, 1),
        GroupSpec::unitriangular(2, 4),
        GroupSpec::unitriangular(3, 3),
    ] {
        let g = build(spec);
        let mut all = vec![GeneratorSet::canonical(&g)];
        for _ in 0..20 {
            let k = rng.random_range(g.rank()..=g.rank() + 2);
            all.push(GeneratorSet::random_generating(&g, k, &mut rng, 10_000).unwrap());
        }
        for s in &all {
            sets += 1;
            let field = bfs_distances(&g, s);
            let diam_g2 = diam_subgroup(&field, g.series_term(2)).unwrap();
            let layers = layer_diameters(&g, s).unwrap();
            let layer_sum: u32 = layers[1..].iter().sum();
            if diam_g2 > layer_sum {
                failures.push(format!("{}: (a) {diam_g2} > {layer_sum}", g.spec().label()));
            }
            let rhs = diam_bound_rhs(s.orientation().len() as u64, g.step(), layers[0] as u64);
            if diam_g2 as u128 > rhs {
                failures.push(format!("{}: (b) {diam_g2} > {rhs}", g.spec().label()));
            }
            for i in 1..=g.step() {
                for j in i + 1..=g.step() + 1 {
                    let t = triangle_decomposition_check(&g, s, g.series_term(j), g.series_term(i))
                        .unwrap();
                    if !t.holds() {
                        failures.push(format!("{}: (c) G_{i} over G_{j}: {t:?}", g.spec().label()));
                    }
                }
            }
        }
    }
    verdict(
        3,
        "diameter bounds",
        failures.is_empty(),
        &format!("{sets} generating sets, violations: {failures:?}"),
        start,
        Duration::from_secs(60),
    );
}

#[test]
fn criterion_04_greedy_decomposition() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut bad = Vec::new();
    for _ in 0..1000 {
        let m = rng.random_range(1..=1_000_000_000u64);
        let step = rng.random_range(2..=5u32);
        let i = rng.random_range(2..=step);
        let d = greedy_power_decomposition(m, i, step).unwrap();
        // Real m^{1/i} is at least its integer floor, so this bound is no
        // looser than the real-valued one.
        let bound = (1u128 << (5 * i + 6)) * ((1u128 << (2 * i)) + step as u128 * d_floor_root(m, i));
        if d.reconstruct() != m as u128 || d.cost > bound {
            bad.push((m, i, step));
        }
    }
    verdict(
        4,
        "greedy decomposition",
        bad.is_empty(),
        &format!("1000 cases, failures: {bad:?}"),
        start,
        Duration::from_secs(5),
    );
}

fn d_floor_root(m: u64, i: u32) -> u128 {
    nilmix::geometry::floor_root(m as u128, i)
}

#[test]
fn criterion_05_relaxation_sandwich() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut failures = Vec::new();
    let mut checked = 0;
    let mut equalities = 0;
    for spec in [
        GroupSpec::heisenberg(3, 1),
        GroupSpec::heisenberg(5, 1),
        GroupSpec::heisenberg(7, 1),
        GroupSpec::unitriangular(2, 4),
        GroupSpec::unitriangular(3, 3),
        GroupSpec::unitriangular(2, 5),
        GroupSpec::abelian([7, 7]),
        GroupSpec::abelian([4, 6]),
    ] {
        let g = build(spec);
        for _ in 0..20 {
            let k = rng.random_range(g.rank()..=g.rank() + 2);
            let s = GeneratorSet::random_generating(&g, k, &mut rng, 10_000).unwrap();
            let sw = RelaxationSandwich::compute(&g, &s, RelaxMode::Auto).unwrap();
            checked += 1;
            if sw.t_rel_gab >= sw.commutator_scale {
                equalities += 1;
            }
            if !sw.holds(1e-9) {
                failures.push(format!("{}: {sw:?}", g.spec().label()));
            }
        }
    }
    verdict(
        5,
        "relaxation sandwich",
        failures.is_empty(),
        &format!("{checked} walks, {equalities} with equality forced, violations: {failures:?}"),
        start,
        Duration::from_secs(120),
    );
}

#[test]
fn criterion_06_commutator_layer_bound() {
    let start = Instant::now();
    let g = build(GroupSpec::heisenberg(3, 1));
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let times = [1.0, 2.0, 5.0, 10.0, 20.0];
    let mut sets = vec![GeneratorSet::canonical(&g)];
    for _ in 0..10 {
        let k = rng.random_range(2..=4);
        sets.push(GeneratorSet::random_generating(&g, k, &mut rng, 10_000).unwrap());
    }
    let mut bad = Vec::new();
    for s in &sets {
        for r in reduction_gap(&g, s, &times).unwrap() {
            if !r.holds() {
                bad.push(r);
            }
        }
    }
    verdict(
        6,
        "commutator-layer mixing bound",
        bad.is_empty(),
        &format!("{} sets x {} times, violations: {bad:?}", sets.len(), times.len()),
        start,
        Duration::from_secs(10),
    );
}

#[test]
fn criterion_07_entropic_solver() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for k in [2, 4, 16, 64] {
        for n in [1e3, 1e6, 1e9] {
            let sol = entropic_time(k, n).unwrap();
            worst = worst.max(sol.residual / n.ln());
        }
    }
    let gaps: Vec<f64> = [1e4, 1e8, 1e12]
        .iter()
        .map(|&n| (entropic_time(4, n).unwrap().t0 / gaussian_approximation(4, n) - 1.0).abs())
        .collect();
    let monotone = gaps.windows(2).all(|w| w[1] < w[0]);
    verdict(
        7,
        "entropic solver",
        worst <= 1e-9 && monotone,
        &format!("max residual/log N = {worst:.3e}; |ratio - 1| at k=4: {gaps:.3?}"),
        start,
        Duration::from_secs(10),
    );
}

#[test]
fn criterion_08_uniformity_oracles() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut notes = Vec::new();

    let z12 = build(GroupSpec::abelian([12]));
    for v in [[2i64, 3], [4, 6], [0, 0]] {
        let r = gcd_subgroup_law(&z12, &v, 0, &mut rng).unwrap();
        if !(r.exact && r.uniform && r.support_within_target) {
            notes.push(format!("gcd law {v:?}: {r:?}"));
        }
    }

    let h3 = build(GroupSpec::heisenberg(3, 1));
    let elems: Vec<Element> = h3.elements().collect();
    let mut span_cases = 0;
    for &a in &elems {
        for hs in std::iter::once(vec![a]).chain(elems.iter().map(|&b| vec![a, b])) {
            let r = unif_span_check(&h3, &hs, 1, 0, &mut rng).unwrap();
            span_cases += 1;
            if !(r.exact && r.uniform && r.support_within_target) {
                notes.push(format!("span {hs:?}: {r:?}"));
            }
        }
    }

    let mut modp = 0;
    for p in [2, 3, 5, 7] {
        for n in 1..=30 {
            let r = binomial_mod_p_maxprob(n, p).unwrap();
            modp += 1;
            if !r.holds() {
                notes.push(format!("mod p n={n} p={p}: {r:?}"));
            }
        }
    }

    let gm = subgroup_generation_moment(3, 2, 2, 100_000, &mut rng).unwrap();
    if !gm.holds() {
        notes.push(format!("generation moment: {gm:?}"));
    }
    verdict(
        8,
        "algebraic uniformity oracles",
        notes.is_empty(),
        &format!(
            "3 gcd vectors, {span_cases} span lists, {modp} (n, p) pairs, moment {:.4} +- {:.4} vs bound {:.4}; failures: {notes:?}",
            gm.estimate, gm.std_err, gm.bound
        ),
        start,
        Duration::from_secs(60),
    );
}

#[test]
fn criterion_09_cutoff_smoke() {
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut ok = true;
    for (spec, k) in [(GroupSpec::abelian([101, 101]), 6), (GroupSpec::heisenberg(7, 1), 5)] {
        let g = build(spec.clone());
        let mut cfg = ExperimentConfig::new(spec, k, 30, 9);
        cfg.multipliers = vec![0.5, 2.0];
        cfg.t_mix = false;
        let e = run_ensemble_on(&g, &cfg).unwrap();
        let early = e.median_at(0.5).unwrap();
        let late = e.median_at(2.0).unwrap();
        let pass = early >= 0.6 && late <= 0.25;
        ok &= pass;
        lines.push(format!(
            "{} k={k}: t*={:.3}, median d(0.5t*)={early:.3} (>= 0.6), median d(2t*)={late:.3} (<= 0.25) {}",
            g.spec().label(),
            e.params.t_star,
            if pass { "ok" } else { "MISS" }
        ));
    }
    verdict(
        9,
        "cutoff smoke",
        ok,
        &format!("{}; thresholds are desk-scale engineering choices", lines.join("; ")),
        start,
        Duration::from_secs(300),
    );
}

#[test]
fn criterion_10_determinism() {
    let start = Instant::now();
    let spec = GroupSpec::heisenberg(5, 1);
    let g = build(spec.clone());
    let run = |cfg: &ExperimentConfig, threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let e = pool.install(|| run_ensemble_on(&g, cfg)).unwrap();
        let mut a = Vec::new();
        e.write_csv(&mut a).unwrap();
        e.write_summary_csv(&mut a).unwrap();
        a
    };
    let exact = ExperimentConfig::new(spec.clone(), 3, 12, 10);
    let mut collision = ExperimentConfig::new(spec, 3, 4, 10);
    collision.mode = Mode::Collision;
    collision.pairs = 2000;
    let mut same = true;
    for cfg in [&exact, &collision] {
        let first = run(cfg, 1);
        same &= first == run(cfg, 1) && first == run(cfg, 4);
    }
    verdict(
        10,
        "determinism",
        same,
        "exact and collision ensembles byte-identical across repeats and 1 vs 4 threads",
        start,
        Duration::from_secs(60),
    );
}
