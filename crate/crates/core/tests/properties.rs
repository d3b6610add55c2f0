use proptest::prelude::*;

use latent_hops::embed::{classical_mds, procrustes_align};
use latent_hops::geometry::{pairwise_distances, sample_uniform, Coords, DistanceMatrix, Domain};
use latent_hops::harness::Manifest;
use latent_hops::hopdist::{all_pairs_hops, scale_hops, INF_HOPS};
use latent_hops::io::{read_adjacency_binary, write_adjacency_binary};
use latent_hops::linkgraph::{couple_thin, generate_graph, Adjacency, LinkFunction};

fn graph(n: usize, bits: &[bool]) -> Adjacency {
    let mut k = 0;
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if bits[k % bits.len()] {
                edges.push((i, j));
            }
            k += 1;
        }
    }
    Adjacency::from_edges(n, edges).unwrap()
}

fn points() -> impl Strategy<Value = Vec<[f64; 2]>> {
    prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64).prop_map(|(a, b)| [a, b]), 4..30)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hops_obey_triangle_inequality(n in 1usize..48, bits in prop::collection::vec(prop::bool::weighted(0.1), 1..200)) {
        let h = all_pairs_hops(&graph(n, &bits)).unwrap();
        let add = |a: u16, b: u16| if a == INF_HOPS || b == INF_HOPS { u32::MAX } else { u32::from(a) + u32::from(b) };
        for i in 0..n {
            prop_assert_eq!(h.get(i, i), 0);
            for j in 0..n {
                prop_assert_eq!(h.get(i, j), h.get(j, i));
                let hij = if h.get(i, j) == INF_HOPS { u32::MAX } else { u32::from(h.get(i, j)) };
                for k in 0..n {
                    prop_assert!(hij <= add(h.get(i, k), h.get(k, j)));
                }
            }
        }
    }

    #[test]
    fn scaled_hops_never_underestimate(seed in 0u64..1000, n in 20usize..150, r in 0.15..0.6f64, which in 0usize..3) {
        let cfg = sample_uniform(&Domain::rectangle(2.0, 1.0).unwrap(), n, seed).unwrap();
        let link = match which {
            0 => LinkFunction::indicator(r),
            1 => LinkFunction::polynomial_edge(r, 1.0, 2.0),
            _ => LinkFunction::scaled_indicator(r, 0.5),
        }.unwrap();
        let est = scale_hops(&all_pairs_hops(&generate_graph(&cfg, &link, seed)).unwrap(), r).unwrap();
        let truth = pairwise_distances(&cfg);
        for i in 0..n {
            for j in 0..n {
                prop_assert!(est.get(i, j) >= truth.get(i, j) - 1e-12);
            }
        }
    }

    #[test]
    fn classical_mds_recovers_planar_distances(pts in points()) {
        let c = Coords::from_rows(&pts).unwrap();
        let d = DistanceMatrix::from_coords(&c);
        let emb = classical_mds(&d, 2).unwrap();
        let back = DistanceMatrix::from_coords(&emb.coords);
        for (a, b) in d.as_slice().iter().zip(back.as_slice()) {
            prop_assert!((a - b).abs() < 1e-8, "{} vs {}", a, b);
        }
    }

    #[test]
    fn procrustes_undoes_similarity(pts in points(), th in 0.0..std::f64::consts::TAU, s in 0.1..10.0f64, flip in any::<bool>(), tx in -3.0..3.0f64) {
        let f = if flip { -1.0 } else { 1.0 };
        let moved: Vec<[f64; 2]> = pts.iter().map(|p| {
            let (a, b) = (f * p[0], p[1]);
            [s * (a * th.cos() - b * th.sin()) + tx, s * (a * th.sin() + b * th.cos()) - tx]
        }).collect();
        let src = Coords::from_rows(&pts).unwrap();
        let dst = Coords::from_rows(&moved).unwrap();
        let pr = procrustes_align(&src, &dst).unwrap();
        prop_assert!(pr.rmse < 1e-9 * (1.0 + s));
        prop_assert!((pr.scale - s).abs() < 1e-9 * s);
    }

    #[test]
    fn thinning_gives_subgraphs(n in 2usize..60, bits in prop::collection::vec(prop::bool::weighted(0.4), 1..100), keep in 0.0..=1.0f64, seed in any::<u64>()) {
        let g = graph(n, &bits);
        let t = couple_thin(&g, keep, seed).unwrap();
        prop_assert!(t.is_subgraph_of(&g));
        prop_assert_eq!(&t, &couple_thin(&g, keep, seed).unwrap());
    }

    #[test]
    fn binary_adjacency_round_trips(n in 0usize..70, bits in prop::collection::vec(any::<bool>(), 1..300)) {
        let g = graph(n, &bits);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("g.lga");
        write_adjacency_binary(&p, &g).unwrap();
        prop_assert_eq!(read_adjacency_binary(&p).unwrap(), g);
    }

    #[test]
    fn manifest_floats_round_trip(vals in prop::collection::vec(any::<f64>(), 1..20)) {
        let mut m = Manifest::new();
        for (i, v) in vals.iter().enumerate() {
            m.set_f64(format!("k{i:02}"), *v);
        }
        let back = Manifest::from_json(&m.to_json()).unwrap();
        for (i, v) in vals.iter().enumerate() {
            let got = back.get_f64(&format!("k{i:02}")).unwrap();
            prop_assert!(got.to_bits() == v.to_bits() || (got.is_nan() && v.is_nan()));
        }
        prop_assert_eq!(back.to_json(), m.to_json());
    }
}
