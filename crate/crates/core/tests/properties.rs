mod common;

use ising_gof::bounds::lifted_from_kappa;
use ising_gof::exact::{
    binomial_mixture_bound, grouped_widget, hypergeometric_mixture, tensorize, Chi2Method, Chi2Value, PairMoments,
};
use ising_gof::harness::{estimate_risk, AlternateMode, FixedAlternate, Heatmap, RandomDeletion, RiskEstimate, TrialSettings};
use ising_gof::io::{format_model, parse_model};
use ising_gof::model::{build_uniform_tree, build_widget, lift, random_edge_deletion, TreeShape};
use ising_gof::sampler::{apply_glauber_transition, stream_rng};
use ising_gof::stattests::{chow_liu_from_moments, forest_deletion, forest_moments_under, statistic_t};
use ising_gof::{Enumerator, GofTest, GraphStructure, IsingModel, SampleBatch, Sampler, SamplerConfig, WidgetSpec};
use proptest::prelude::*;
use rand::seq::SliceRandom;

use common::rel_err;

fn weight() -> impl Strategy<Value = f64> {
    prop_oneof![-1.5..-0.05f64, 0.05..1.5f64]
}

fn widget() -> impl Strategy<Value = WidgetSpec> {
    let lam = 0.05..2.5f64;
    prop_oneof![
        weight().prop_map(WidgetSpec::single_edge),
        (lam.clone(), weight()).prop_map(|(l, m)| WidgetSpec::triangle(l, m)),
        (lam.clone(), weight(), (1..=6usize).prop_flat_map(|b| (Just(b), 1..=b)))
            .prop_map(|(l, m, (b, k))| WidgetSpec::fan(l, m, b, k)),
        (lam.clone(), weight(), 1..=13usize).prop_map(|(l, m, d)| WidgetSpec::clique_minus_edge(l, m, d)),
        (lam.clone(), weight(), (2..=13usize).prop_flat_map(|d| (Just(d), 1..d)))
            .prop_map(|(l, m, (d, h))| WidgetSpec::clique_with_hole(l, m, d, h)),
        (lam.clone(), weight(), (1..=5usize).prop_flat_map(|e| (Just(e), 1..=(13 / (e + 1)).max(1))), any::<bool>())
            .prop_map(|(l, m, (e, g), extra)| if extra {
                WidgetSpec::emmentaler_extra_node(l, m, (e + 1) * g, e)
            } else {
                WidgetSpec::emmentaler_vs_full(l, m, (e + 1) * g, e)
            }),
        (weight(), 2..=14usize).prop_map(|(m, k)| WidgetSpec::clique_vs_empty(m, k)),
    ]
}

/// Random model on `p` nodes with each pair present with probability ~1/2.
fn model(max_p: usize) -> impl Strategy<Value = IsingModel> {
    (2..=max_p).prop_flat_map(|p| {
        proptest::collection::vec(prop_oneof![Just(0.0), -1.2..1.2f64], p * (p - 1) / 2).prop_map(move |w| {
            let mut m = IsingModel::empty(p).unwrap();
            let mut k = 0;
            for i in 0..p {
                for j in (i + 1)..p {
                    m.set_weight(i, j, w[k]).unwrap();
                    k += 1;
                }
            }
            m
        })
    })
}

/// Random labeled tree on `p` nodes from a Prüfer-like parent sequence.
fn forest(max_p: usize) -> impl Strategy<Value = IsingModel> {
    (2..=max_p).prop_flat_map(|p| {
        (proptest::collection::vec((any::<prop::sample::Index>(), any::<bool>(), 0.05..1.5f64), p - 1)).prop_map(
            move |parents| {
                let mut m = IsingModel::empty(p).unwrap();
                for (k, (idx, keep, w)) in parents.into_iter().enumerate() {
                    if keep {
                        m.set_weight(k + 1, idx.index(k + 1), w).unwrap();
                    }
                }
                m
            },
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn widget_sigma_and_degree_match_the_family(spec in widget()) {
        let pair = build_widget(&spec).unwrap();
        prop_assert_eq!(pair.sigma(), spec.stated_sigma());
        prop_assert!(pair.null.network_structure().max_degree() <= spec.degree_bound());
        prop_assert!(pair.alternate.network_structure().max_degree() <= spec.degree_bound());
        for m in [&pair.null, &pair.alternate] {
            let g = m.network_structure();
            for i in 0..m.p() {
                for j in (i + 1)..m.p() {
                    prop_assert_eq!(g.contains(i, j), m.weight(i, j) != 0.0);
                }
            }
        }
    }

    #[test]
    fn lifted_alternates_differ_in_t_sigma_edges(spec in widget(), extra in 0..6usize, t_pick in any::<prop::sample::Index>()) {
        let pair = build_widget(&spec).unwrap();
        let nu = spec.node_count();
        let p = 3 * nu + extra;
        let t = 1 + t_pick.index(3);
        let ens = lift(&pair.null, &pair.alternate, p, t).unwrap();
        let base = ens.base.network_structure();
        let mut rng = stream_rng(11, &[]);
        for _ in 0..4 {
            let q = ens.random_alternate(&mut rng).unwrap();
            prop_assert_eq!(base.symmetric_difference(&q.network_structure()).unwrap().len(), t * pair.sigma());
        }
    }

    #[test]
    fn edge_deletion_is_reproducible(p in 3..40usize, alpha in 0.05..1.0f64, seed in any::<u64>(), s_pick in any::<prop::sample::Index>()) {
        let m = build_uniform_tree(TreeShape::Path, p, alpha).unwrap();
        let s = 1 + s_pick.index(p - 1);
        let a = random_edge_deletion(&m, s, seed).unwrap();
        let b = random_edge_deletion(&m, s, seed).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(m.network_structure().symmetric_difference(&a.network_structure()).unwrap().len(), s);
    }

    #[test]
    fn chi_square_routes_agree(spec in widget()) {
        prop_assume!(spec.node_count() <= 14);
        let pair = build_widget(&spec).unwrap();
        let e = Enumerator::default();
        let identity = e.chi_square_with(&pair.alternate, &pair.null, Chi2Method::Identity).unwrap().value();
        let stable = e.chi_square_with(&pair.alternate, &pair.null, Chi2Method::Enumeration).unwrap().value();
        let brute = common::chi_square(&pair.alternate, &pair.null);
        prop_assert!(rel_err(stable, brute) <= 1e-10 || (stable - brute).abs() <= 1e-13, "{stable} vs {brute}");
        prop_assert!(rel_err(identity, stable) <= 1e-10 || (identity - stable).abs() <= 1e-13, "{identity} vs {stable}");
    }

    #[test]
    fn chi_square_is_nonnegative_and_label_free(q in model(7), scale in -1.0..1.0f64, seed in any::<u64>()) {
        let p_model = q.combine(scale, &q, 0.0).unwrap();
        let e = Enumerator::default();
        let chi = e.chi_square(&q, &p_model).unwrap().value();
        prop_assert!(chi >= 0.0);
        prop_assert_eq!(e.chi_square(&q, &q).unwrap().value(), 0.0);
        let mut perm: Vec<usize> = (0..q.p()).collect();
        perm.shuffle(&mut stream_rng(seed, &[]));
        let relabeled = e.chi_square(&q.relabel(&perm).unwrap(), &p_model.relabel(&perm).unwrap()).unwrap().value();
        prop_assert!(rel_err(chi, relabeled) <= 1e-10 || (chi - relabeled).abs() <= 1e-13);
    }

    #[test]
    fn tensorization_matches_products(q in model(4), shift in -0.8..0.8f64, n in 1..=3usize) {
        let p_model = q.combine(1.0, &build_uniform_tree(TreeShape::Path, q.p(), 1.0).unwrap(), shift).unwrap();
        let kappa = common::chi_square(&q, &p_model);
        let qs = vec![&q; n];
        let ps = vec![&p_model; n];
        let explicit = common::chi_square(
            &IsingModel::disjoint_union(&qs).unwrap(),
            &IsingModel::disjoint_union(&ps).unwrap(),
        );
        let t = tensorize(Chi2Value::new(kappa), n as u64).value();
        prop_assert!(rel_err(t, explicit) <= 1e-10 || (t - explicit).abs() <= 1e-14, "{t} vs {explicit}");
    }

    #[test]
    fn mixture_is_dominated(m in 1..200u64, t_pick in any::<prop::sample::Index>(), a in 0.0..5.0f64) {
        let t = 1 + t_pick.index(m as usize) as u64;
        let exact = hypergeometric_mixture(m, t, a);
        prop_assert!(exact <= binomial_mixture_bound(m, t, a) * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn grouped_partition_matches_enumeration(spec in widget()) {
        prop_assume!(spec.node_count() <= 14);
        if let Ok((gn, ga)) = grouped_widget(&spec) {
            let pair = build_widget(&spec).unwrap();
            prop_assert!(rel_err(gn.log_partition().unwrap(), common::log_partition(&pair.null)) <= 1e-10);
            prop_assert!(rel_err(ga.log_partition().unwrap(), common::log_partition(&pair.alternate)) <= 1e-10);
        }
    }

    #[test]
    fn glauber_step_fixes_the_boltzmann_law(m in model(8)) {
        let pi = common::probabilities(&m);
        let next = apply_glauber_transition(&m, &pi).unwrap();
        let tv: f64 = 0.5 * pi.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum::<f64>();
        prop_assert!(tv < 1e-12);
    }

    #[test]
    fn sampling_is_reproducible(m in model(6), seed in any::<u64>(), exact in any::<bool>()) {
        let config = if exact { SamplerConfig::exact(seed) } else { SamplerConfig::glauber(50, seed) };
        let a = Sampler::new(&m, config).unwrap().draw(64, &[3]).unwrap();
        let b = Sampler::new(&m, config).unwrap().draw(64, &[3]).unwrap();
        prop_assert_eq!(a.rows().collect::<Vec<_>>(), b.rows().collect::<Vec<_>>());
        let longer = Sampler::new(&m, config).unwrap().draw(100, &[3]).unwrap();
        let head = longer.prefix(64).unwrap();
        prop_assert_eq!(head.rows().collect::<Vec<_>>(), a.rows().collect::<Vec<_>>());
    }

    #[test]
    fn statistic_ignores_order_and_global_flips(m in forest(8), seed in any::<u64>(), flips in proptest::collection::vec(any::<bool>(), 40)) {
        let batch = Sampler::new(&m, SamplerConfig::exact(seed)).unwrap().draw(40, &[]).unwrap();
        let g = m.network_structure();
        let mut rows: Vec<Vec<i8>> = batch.rows().map(|r| r.to_vec()).collect();
        rows.shuffle(&mut stream_rng(seed, &[1]));
        for (r, &f) in rows.iter_mut().zip(&flips) {
            if f {
                r.iter_mut().for_each(|x| *x = -*x);
            }
        }
        let other = SampleBatch::from_rows(m.p(), &rows).unwrap();
        let a = statistic_t(&batch, &g).unwrap();
        let b = statistic_t(&other, &g).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn forest_moments_match_enumeration(m in forest(10), g_seed in any::<u64>()) {
        let p = m.p();
        // arbitrary graph to average over, not just G(P)
        let mut g = GraphStructure::new(p);
        let mut rng = stream_rng(g_seed, &[]);
        for i in 0..p {
            for j in (i + 1)..p {
                if rand::Rng::random_bool(&mut rng, 0.4) {
                    g.insert(i, j).unwrap();
                }
            }
        }
        let fm = forest_moments_under(&g, &m).unwrap();
        let probs = common::probabilities(&m);
        let (mut mean, mut second) = (0.0, 0.0);
        for (k, pr) in probs.iter().enumerate() {
            let x = common::spins(k, p);
            let t: f64 = g.edges().map(|(i, j)| x[i] * x[j]).sum();
            mean += pr * t;
            second += pr * t * t;
        }
        prop_assert!((fm.mean - mean).abs() <= 1e-10 * mean.abs().max(1.0));
        prop_assert!((fm.variance_n1 - (second - mean * mean)).abs() <= 1e-10 * second.max(1.0));
    }

    #[test]
    fn decisions_depend_only_on_the_statistic(p_pick in 0..3usize, alpha in 0.05..1.0f64, s_pick in any::<prop::sample::Index>(), seed in any::<u64>()) {
        let p = [7, 15, 31][p_pick];
        let null = build_uniform_tree(TreeShape::CompleteBinary, p, alpha).unwrap();
        let s = 1 + s_pick.index(p - 1);
        let test = forest_deletion(&null, s).unwrap();
        let batch = Sampler::new(&null, SamplerConfig::glauber(200, seed)).unwrap().draw(30, &[]).unwrap();
        let a = test.decide(&batch).unwrap();
        let b = test.decide(&batch).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a, test.decide_value(statistic_t(&batch, test.graph()).unwrap()));
    }

    #[test]
    fn deleting_a_ferromagnetic_edge_never_raises_correlations(m in model(9), pick in any::<prop::sample::Index>()) {
        let p = m.p();
        let mut ferro = IsingModel::empty(p).unwrap();
        for (i, j, w) in m.edges() {
            ferro.set_weight(i, j, w.abs() * 0.25).unwrap();
        }
        let edges = ferro.edges();
        prop_assume!(!edges.is_empty());
        let (i, j, _) = edges[pick.index(edges.len())];
        let mut q = ferro.clone();
        q.set_weight(i, j, 0.0).unwrap();
        let (before, after) = (common::pair_moments(&ferro), common::pair_moments(&q));
        for k in 0..p * p {
            prop_assert!(after[k] <= before[k] + 1e-12);
        }
    }

    #[test]
    fn lifted_bounds_are_monotone(kappa in 1e-4..2.0f64, factor in 1.0..3.0f64, m in 20..5000usize, t in 1..10usize) {
        let a = lifted_from_kappa(kappa, m, t, 1).unwrap();
        prop_assert!(lifted_from_kappa(kappa, m, t + 1, 1).unwrap().n_gof <= a.n_gof);
        prop_assert!(lifted_from_kappa(kappa * factor, m, t, 1).unwrap().n_gof <= a.n_gof);
    }

    #[test]
    fn heatmap_csv_round_trips(counts in proptest::collection::vec((0..=50usize, 0..=50usize), 6), s0 in 1..30usize) {
        let cells = counts.iter().map(|&(f, m)| RiskEstimate { false_alarms: f, missed_detections: m, trials: 50 }).collect();
        let map = Heatmap { s_grid: vec![s0, s0 + 3], n_grid: vec![20, 40, 60], cells };
        prop_assert_eq!(Heatmap::from_csv(&map.to_csv().unwrap()).unwrap(), map);
    }

    #[test]
    fn model_files_round_trip(m in model(8)) {
        prop_assert_eq!(parse_model(&format_model(&m)).unwrap(), m);
    }
}

fn prufer_tree(code: &[usize], p: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1; p];
    for &c in code {
        degree[c] += 1;
    }
    let mut edges = Vec::with_capacity(p - 1);
    for &c in code {
        let leaf = (0..p).find(|&v| degree[v] == 1).unwrap();
        edges.push((leaf.min(c), leaf.max(c)));
        degree[leaf] -= 1;
        degree[c] -= 1;
    }
    let rest: Vec<usize> = (0..p).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// E[X_u X_v] = tanh(α)^dist(u, v) on a tree with uniform weight α.
fn tree_moments(p: usize, edges: &[(usize, usize)], alpha: f64) -> PairMoments {
    let mut adj = vec![Vec::new(); p];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let r = alpha.tanh();
    let mut values = vec![0.0; p * p];
    for src in 0..p {
        let mut dist = vec![usize::MAX; p];
        dist[src] = 0;
        let mut queue = std::collections::VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        for v in 0..p {
            values[src * p + v] = r.powi(dist[v] as i32);
        }
    }
    PairMoments::from_matrix(p, values).unwrap()
}

#[test]
fn chow_liu_recovers_every_small_tree_from_exact_moments() {
    for p in 2..=8usize {
        let total = p.pow(p.saturating_sub(2) as u32);
        for index in 0..total {
            let mut code = Vec::with_capacity(p - 2);
            let mut k = index;
            for _ in 0..p.saturating_sub(2) {
                code.push(k % p);
                k /= p;
            }
            let edges = prufer_tree(&code, p);
            let truth = GraphStructure::from_edges(p, edges.iter().copied()).unwrap();
            let learned = chow_liu_from_moments(&tree_moments(p, &edges, 0.4));
            assert_eq!(learned, truth, "p = {p}, code {code:?}");
        }
    }
    // spot-check the closed-form moments against enumeration
    let edges = prufer_tree(&[2, 2, 4], 5);
    let m = IsingModel::from_edges(5, &edges.iter().map(|&(a, b)| (a, b, 0.4)).collect::<Vec<_>>()).unwrap();
    let exact = Enumerator::default().pair_moments(&m).unwrap();
    let closed = tree_moments(5, &edges, 0.4);
    for i in 0..5 {
        for j in 0..5 {
            assert!((exact.get(i, j) - closed.get(i, j)).abs() < 1e-12);
        }
    }
}

#[test]
fn glauber_and_exact_batches_agree_on_moments() {
    let m = IsingModel::from_edges(5, &[(0, 1, 0.6), (1, 2, -0.4), (2, 3, 0.9), (3, 4, 0.3), (0, 4, -0.5), (1, 3, 0.2)])
        .unwrap();
    let n = 1_000_000;
    let glauber = Sampler::new(&m, SamplerConfig::glauber(200, 5)).unwrap().draw(n, &[]).unwrap();
    let exact = Sampler::new(&m, SamplerConfig::exact(6)).unwrap().draw(n, &[]).unwrap();
    let moment = |b: &SampleBatch, i: usize, j: usize| b.rows().map(|x| f64::from(x[i] * x[j])).sum::<f64>() / n as f64;
    let truth = common::pair_moments(&m);
    for i in 0..5 {
        for j in (i + 1)..5 {
            let v = 1.0 - truth[i * 5 + j].powi(2);
            let se = (2.0 * v / n as f64).sqrt();
            let diff = moment(&glauber, i, j) - moment(&exact, i, j);
            assert!(diff.abs() <= 5.0 * se, "({i},{j}): {diff} vs se {se}");
        }
    }
}

#[test]
fn risk_does_not_depend_on_thread_count() {
    let null = build_uniform_tree(TreeShape::CompleteBinary, 15, 0.3).unwrap();
    let test = forest_deletion(&null, 4).unwrap();
    let settings = TrialSettings {
        trials: 40,
        sampler: SamplerConfig::glauber(100, 77),
        alternates: AlternateMode::Fresh,
        row: 2,
    };
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| estimate_risk(&null, &RandomDeletion { s: 4 }, &test, 50, &settings).unwrap())
    };
    assert_eq!(run(1), run(3));
}

/// Law of the per-sample statistic as (value, probability) over integer
/// edge sums, from enumeration.
fn statistic_law(model: &IsingModel, g: &GraphStructure) -> Vec<f64> {
    let k = g.len();
    let mut law = vec![0.0; 2 * k + 1];
    for (idx, pr) in common::probabilities(model).iter().enumerate() {
        let x = common::spins(idx, model.p());
        let t: f64 = g.edges().map(|(i, j)| x[i] * x[j]).sum();
        law[(t + k as f64) as usize] += pr;
    }
    law
}

fn convolve_power(law: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![1.0];
    for _ in 0..n {
        let mut next = vec![0.0; out.len() + law.len() - 1];
        for (a, pa) in out.iter().enumerate() {
            for (b, pb) in law.iter().enumerate() {
                next[a + b] += pa * pb;
            }
        }
        out = next;
    }
    out
}

#[test]
fn empirical_risk_brackets_the_exact_risk() {
    let null = build_uniform_tree(TreeShape::Path, 6, 0.7).unwrap();
    let mut alt = null.clone();
    alt.set_weight(1, 2, 0.0).unwrap();
    alt.set_weight(3, 4, 0.0).unwrap();
    let s = 2;
    let n = 12;
    let test = forest_deletion(&null, s).unwrap();
    let g = null.network_structure();
    let k = g.len() as f64;
    // sum of n per-sample edge sums takes values j - n k for j = 0..=2nk
    let exact_side = |model: &IsingModel, want_null: bool| -> f64 {
        convolve_power(&statistic_law(model, &g), n)
            .iter()
            .enumerate()
            .filter(|(j, _)| {
                let mean = (*j as f64 - n as f64 * k) / n as f64;
                (test.decide_value(mean).verdict == ising_gof::Verdict::Null) == want_null
            })
            .map(|(_, p)| p)
            .sum()
    };
    let exact_risk = exact_side(&null, false) + exact_side(&alt, true);
    let settings = TrialSettings { trials: 4000, sampler: SamplerConfig::exact(99), alternates: AlternateMode::Fixed, row: 0 };
    let est = estimate_risk(&null, &FixedAlternate(alt), &test, n, &settings).unwrap();
    assert!(
        (est.risk() - exact_risk).abs() <= 3.0 * est.ci95(),
        "empirical {} vs exact {exact_risk} (ci95 {})",
        est.risk(),
        est.ci95()
    );
}
