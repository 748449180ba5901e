use nlocal_core::models::evaluate_triangle;
use nlocal_core::strategies::strategy_count;
use nlocal_core::{
    canonicalize, decode, decompose_rs, deterministic_ct, distance, encode, evaluate_bilocal,
    evaluate_nlocal, marginal, mix, nonsignaling_check, party_marginal, product_ct, random,
    strategy_matrix, uniform_ct, validate, DiscreteNLocalModel, Party, ResponseMatrix, Scenario,
    Tolerances, TriangleModel,
};
use proptest::prelude::*;

fn sup(a: &nlocal_core::CorrelationTensor, b: &nlocal_core::CorrelationTensor) -> f64 {
    distance(a, b).unwrap().max_abs
}

fn scenario() -> impl Strategy<Value = Scenario> {
    (2usize..=3)
        .prop_flat_map(|n| {
            (
                proptest::collection::vec((1usize..=3, 1usize..=3), n),
                1usize..=3,
                1usize..=3,
            )
        })
        .prop_map(|(edges, ob, mb)| {
            let (o, m) = edges.into_iter().unzip();
            Scenario::new(o, m, ob, mb).unwrap()
        })
}

fn model() -> impl Strategy<Value = DiscreteNLocalModel> {
    (scenario(), any::<u64>()).prop_flat_map(|(s, seed)| {
        proptest::collection::vec(1usize..=3, s.edges()).prop_map(move |dims| {
            let mut rng = random::rng(seed);
            random::model(&s, &dims, &mut rng).unwrap()
        })
    })
}

fn stochastic() -> impl Strategy<Value = ResponseMatrix> {
    (1usize..=5, 1usize..=5, any::<u64>())
        .prop_map(|(m, o, seed)| random::response_matrix(m, o, &mut random::rng(seed)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn strategy_codes_roundtrip(m in 1usize..=4, o in 1usize..=4, pick in any::<u64>()) {
        let k = (pick % strategy_count(m, o) as u64) as usize;
        let s = decode(k, m, o).unwrap();
        prop_assert_eq!(encode(&s), k);
    }

    #[test]
    fn decomposition_reconstructs(b in stochastic()) {
        let d = decompose_rs(&b, 1e-12).unwrap();
        let back = d.reconstruct();
        let err = b.data().iter().zip(back.data()).fold(0.0f64, |e, (x, y)| e.max((x - y).abs()));
        prop_assert!(err <= 1e-12, "reconstruction error {err}");
        prop_assert!((d.weight_sum() - 1.0).abs() <= 1e-12);
        prop_assert!(d.terms.len() <= b.inputs() * (b.outcomes() - 1) + 1);
        prop_assert!(d.terms.iter().all(|t| t.weight > 0.0));
    }

    #[test]
    fn vertices_decompose_to_themselves(m in 1usize..=4, o in 1usize..=4, pick in any::<u64>()) {
        let k = (pick % strategy_count(m, o) as u64) as usize;
        let d = decompose_rs(&strategy_matrix(&decode(k, m, o).unwrap()), 1e-12).unwrap();
        prop_assert_eq!(d.terms.len(), 1);
        prop_assert_eq!(d.terms[0].weight, 1.0);
        prop_assert_eq!(d.terms[0].strategy, k);
    }

    // Relabeling the inputs permutes the terms but not their weights.
    #[test]
    fn decomposition_is_input_permutation_covariant(b in stochastic(), shift in 0usize..5) {
        let m = b.inputs();
        let perm: Vec<usize> = (0..m).map(|x| (x + shift) % m).collect();
        let rows: Vec<&[f64]> = perm.iter().map(|&x| b.row(x)).collect();
        let pb = ResponseMatrix::from_rows(&rows).unwrap();
        let d = decompose_rs(&b, 1e-12).unwrap();
        let pd = decompose_rs(&pb, 1e-12).unwrap();
        prop_assert_eq!(d.terms.len(), pd.terms.len());
        for (t, pt) in d.terms.iter().zip(&pd.terms) {
            prop_assert!((t.weight - pt.weight).abs() <= 1e-12);
            let (st, pst) = (decode(t.strategy, m, b.outcomes()).unwrap(), decode(pt.strategy, m, b.outcomes()).unwrap());
            let moved: Vec<usize> = perm.iter().map(|&x| st.output(x)).collect();
            prop_assert_eq!(&moved[..], pst.assignment());
        }
    }

    #[test]
    fn uniform_is_valid_and_nonsignaling(s in scenario()) {
        let u = uniform_ct(&s);
        prop_assert!(validate(&u, &Tolerances::default()).ok);
        prop_assert!(nonsignaling_check(&u, &Tolerances::default()).ok);
    }

    #[test]
    fn mixing_is_linear(m1 in model(), seed in any::<u64>(), w in 0.0f64..=1.0) {
        let s = m1.scenario().clone();
        let dims = vec![2; s.edges()];
        let m2 = random::model(&s, &dims, &mut random::rng(seed)).unwrap();
        let (t1, t2) = (evaluate_nlocal(&m1).unwrap(), evaluate_nlocal(&m2).unwrap());
        let t = mix(&[(w, &t1), (1.0 - w, &t2)]).unwrap();
        for ((v, a), b) in t.values().iter().zip(t1.values()).zip(t2.values()) {
            prop_assert!((v - (w * a + (1.0 - w) * b)).abs() <= 1e-15);
        }
    }

    #[test]
    fn product_marginals_are_factors(s in scenario(), seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let factors: Vec<ResponseMatrix> = s
            .parties()
            .map(|p| random::response_matrix(s.inputs(p), s.outcomes(p), &mut rng))
            .collect();
        let t = product_ct(&factors).unwrap();
        for (p, f) in s.parties().zip(&factors) {
            let pm = party_marginal(&t, p, 1e-12).unwrap();
            let err = pm.data().iter().zip(f.data()).fold(0.0f64, |e, (x, y)| e.max((x - y).abs()));
            prop_assert!(err <= 1e-12);
        }
    }

    #[test]
    fn models_are_valid_and_nonsignaling(m in model()) {
        let t = evaluate_nlocal(&m).unwrap();
        prop_assert!(validate(&t, &Tolerances::default()).ok);
        prop_assert!(nonsignaling_check(&t, &Tolerances::default()).ok);
    }

    #[test]
    fn edge_parties_factorize(m in model()) {
        let t = evaluate_nlocal(&m).unwrap();
        let n = m.edges();
        let edges: Vec<Party> = (0..n).map(Party::Edge).collect();
        let joint = marginal(&t, &edges, 1e-10).unwrap().tensor;
        let mut factors: Vec<ResponseMatrix> = edges.iter().map(|&p| party_marginal(&t, p, 1e-10).unwrap()).collect();
        factors.push(ResponseMatrix::uniform(1, 1));
        prop_assert!(sup(&joint, &product_ct(&factors).unwrap()) <= 1e-12);
    }

    // Dropping an edge party leaves a model on the remaining parties, with
    // the dropped source folded into the hub.
    #[test]
    fn dropping_an_edge_stays_nlocal(m in model(), pick in any::<usize>()) {
        let s = m.scenario();
        let n = s.edges();
        let k = pick % n;
        let t = evaluate_nlocal(&m).unwrap();
        let keep: Vec<Party> = s.parties().filter(|&p| p != Party::Edge(k)).collect();
        let dropped = marginal(&t, &keep, 1e-10).unwrap().tensor;

        let mut eo = s.edge_outcomes().to_vec();
        let mut ei = s.edge_inputs().to_vec();
        eo[k] = 1;
        ei[k] = 1;
        let rs = Scenario::new(eo, ei, s.hub_outcomes(), s.hub_inputs()).unwrap();
        let dims = m.source_dims();
        let mut sources: Vec<Vec<f64>> = (0..n).map(|i| m.source_dist(i).to_vec()).collect();
        sources[k] = vec![1.0];
        let edges: Vec<Vec<f64>> = (0..n)
            .map(|i| if i == k { vec![1.0] } else { m.edge_response(i).to_vec() })
            .collect();
        // hub rows averaged over λ_k
        let (ob, mb) = (s.hub_outcomes(), s.hub_inputs());
        let stride: usize = dims[..k].iter().product();
        let hidden: usize = dims.iter().product();
        let mut hub = vec![0.0; hidden / dims[k] * mb * ob];
        let qk = m.source_dist(k);
        for f in 0..hidden {
            let lk = (f / stride) % dims[k];
            let g = f % stride + stride * (f / (stride * dims[k]));
            for j in 0..mb * ob {
                hub[g * mb * ob + j] += qk[lk] * m.hub_response()[f * mb * ob + j];
            }
        }
        let reduced = DiscreteNLocalModel::new(rs, sources, edges, hub).unwrap();
        prop_assert!(sup(&dropped, &evaluate_nlocal(&reduced).unwrap()) <= 1e-12);
    }

    #[test]
    fn canonical_form_reproduces_model(m in model()) {
        let c = canonicalize(&m).unwrap();
        prop_assert!(sup(&c.evaluate().unwrap(), &evaluate_nlocal(&m).unwrap()) <= 1e-10);
        let again = canonicalize(&c.to_model()).unwrap();
        prop_assert!(sup(&again.evaluate().unwrap(), &c.evaluate().unwrap()) <= 1e-10);
    }

    #[test]
    fn triangle_with_trivial_third_source_is_bilocal(seed in any::<u64>(), o in 1usize..=3) {
        let s = Scenario::probability(vec![o, o], o).unwrap();
        let m = random::model(&s, &[2, 3], &mut random::rng(seed)).unwrap();
        let tri = TriangleModel::from_bilocal(&m).unwrap();
        prop_assert!(sup(&evaluate_triangle(&tri).unwrap(), &evaluate_bilocal(&m).unwrap()) <= 1e-12);
    }

    #[test]
    fn deterministic_tensors_are_zero_one(s in scenario(), seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = random::rng(seed);
        let picks: Vec<usize> = s.parties().map(|p| rng.random_range(0..s.strategy_count(p))).collect();
        let t = deterministic_ct(&s, &picks).unwrap();
        prop_assert!(t.values().iter().all(|&v| v == 0.0 || v == 1.0));
        prop_assert!(validate(&t, &Tolerances::default()).ok);
    }
}
