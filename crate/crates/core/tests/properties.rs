use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use shellsat_core::certificates::run_chain;
use shellsat_core::collapse::{is_collapsible, verify_collapse};
use shellsat_core::format::{parse_sc, write_sc};
use shellsat_core::harness::canon::{complex_from_triangles, Triangle};
use shellsat_core::harness::{oracle_collapsible, oracle_shelling};
use shellsat_core::shelling::{find_shelling, verify_shelling};
use shellsat_core::wsat::{extract_saturation_order, k3_closure, verify_saturation};
use shellsat_core::{Budget, Complex, Graph, StageStatus};

fn triangle_sets(max_vertices: u8, max_triangles: usize) -> impl Strategy<Value = Vec<Triangle>> {
    prop::collection::btree_set(
        (0..max_vertices, 0..max_vertices, 0..max_vertices)
            .prop_filter("distinct", |(a, b, c)| a != b && b != c && a != c)
            .prop_map(|(a, b, c)| {
                let mut t = [a, b, c];
                t.sort_unstable();
                t
            }),
        1..=max_triangles,
    )
    .prop_map(|s| s.into_iter().collect())
}

fn complexes() -> impl Strategy<Value = Complex> {
    triangle_sets(7, 8).prop_map(|t| complex_from_triangles(&t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn downward_closure_is_idempotent(k in complexes()) {
        let again = Complex::from_faces(k.faces().iter().cloned(), k.labels().clone()).unwrap();
        prop_assert_eq!(&again, &k);
        prop_assert_eq!(again.faces(), k.faces());
    }

    #[test]
    fn subdivision_laws(k in complexes()) {
        let f = k.f_vector();
        let (n, m, t) = (f.get(0), f.get(1), f.get(2));
        let sd = k.barycentric_subdivision();
        let counts = sd.f_vector();
        prop_assert_eq!(counts.counts(), &[1, n + m + t, 2 * m + 6 * t, 6 * t][..]);
        prop_assert_eq!(sd.reduced_euler_characteristic(), k.reduced_euler_characteristic());
        prop_assert!(sd.is_flag2().unwrap());
        prop_assert_eq!(sd.is_connected(), k.is_connected());
        prop_assert_eq!(sd.is_pure(), k.is_pure());
    }

    #[test]
    fn fingerprint_ignores_line_order(k in complexes(), seed in any::<u64>()) {
        let mut lines: Vec<String> = write_sc(&k).lines().map(String::from).collect();
        lines.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let shuffled = parse_sc(&lines.join("\n")).unwrap().complex;
        prop_assert_eq!(shuffled.fingerprint(), k.fingerprint());
        prop_assert_eq!(shuffled.f_vector(), k.f_vector());
    }

    #[test]
    fn found_shellings_verify(k in complexes()) {
        let outcome = find_shelling(&k, &mut Budget::default()).unwrap();
        if let Some(cert) = outcome.clone().found() {
            prop_assert!(verify_shelling(&k, &cert).unwrap().is_accepted());
        }
        if k.facets().len() <= 8 {
            prop_assert_eq!(outcome.is_found(), oracle_shelling(&k).unwrap());
        }
    }

    #[test]
    fn found_collapses_verify(k in complexes()) {
        let outcome = is_collapsible(&k, &mut Budget::default());
        if let Some(cert) = outcome.clone().found() {
            prop_assert!(cert.targets_point());
            prop_assert!(verify_collapse(&k, &cert).unwrap().is_accepted());
            prop_assert_eq!(k.reduced_euler_characteristic(), 0);
        }
        if let Ok(want) = oracle_collapsible(&k) {
            prop_assert_eq!(outcome.is_found(), want);
        }
    }

    #[test]
    fn closure_is_monotone_and_idempotent(k in complexes(), keep in prop::collection::vec(any::<bool>(), 40)) {
        let host = Graph::one_skeleton(&k);
        let start = host
            .with_edges(host.edges().iter().zip(keep.iter().cycle()).filter(|(_, &b)| b).map(|(e, _)| *e))
            .unwrap();
        let closed = k3_closure(&host, &start).unwrap();
        prop_assert!(start.edges().is_subset(closed.edges()));
        prop_assert_eq!(&k3_closure(&host, &closed).unwrap(), &closed);
        // the recorded order replays to the same closure
        match extract_saturation_order(&host, &start).unwrap().found() {
            Some(cert) => {
                prop_assert_eq!(closed.num_edges(), host.num_edges());
                prop_assert!(verify_saturation(&host, &cert).unwrap().is_accepted());
            }
            None => prop_assert!(closed.num_edges() < host.num_edges()),
        }
    }

    #[test]
    fn chain_holds_on_shellable_flag_complexes(tris in triangle_sets(5, 5)) {
        let k = complex_from_triangles(&tris);
        prop_assume!(k.is_connected());
        let l = k.barycentric_subdivision();
        let report = run_chain(&l, &mut Budget::default()).unwrap();
        prop_assert_eq!(report.subdivisions, 0);
        if report.refuted() {
            prop_assert!(!find_shelling(&l, &mut Budget::default()).unwrap().is_found());
        } else {
            prop_assert!(report.all_passed(), "{:?}", report.stages);
            prop_assert_eq!(report.removed_count, Some(report.chi as usize));
            let tree = report.saturation.as_ref().unwrap().start.num_edges();
            prop_assert_eq!(tree + 1, l.num_vertices());
        }
        prop_assert!(report.stages.iter().all(|s| !matches!(s.status, StageStatus::Failed(_))));
    }
}
