//! Golden-file check of the graph text serialization, plus property tests
//! of the rewriting invariants on randomized operation sequences.

use locallaw::expansion::{
    build_delta, build_tree, enumerate_partitions, rho_expand, tau_split, ExpansionGraph,
};
use proptest::prelude::*;

#[test]
fn serialization_golden() {
    let partitions = enumerate_partitions(2).unwrap();
    let singles = partitions.iter().find(|p| p.blocks().len() == 4).unwrap();
    let delta = build_delta(singles).unwrap();
    assert_eq!(
        delta.serialize(),
        "expansion-graph v1\n\
         black 4\n\
         white 0\n\
         prefactor + zt^0 ztc^0 mt^0 mtc^0\n\
         edge 0: G num 0->1 upper {}\n\
         edge 1: G* num 2->3 upper {}\n\
         end\n"
    );
    let (tau0, tau1) = tau_split(&delta).unwrap();
    assert_eq!(
        tau0.serialize(),
        "expansion-graph v1\n\
         black 4\n\
         white 0\n\
         prefactor + zt^0 ztc^0 mt^0 mtc^0\n\
         edge 0: G num 0->1 upper {2}\n\
         edge 1: G* num 2->3 upper {}\n\
         end\n"
    );
    assert_eq!(
        tau1.serialize(),
        "expansion-graph v1\n\
         black 4\n\
         white 0\n\
         prefactor + zt^0 ztc^0 mt^0 mtc^0\n\
         edge 0: G* num 2->3 upper {}\n\
         edge 1: G num 0->2 upper {}\n\
         edge 2: G num 2->1 upper {}\n\
         edge 3: G den 2->2 upper {}\n\
         end\n"
    );

    // a two-vertex root where every edge is already maximally expanded,
    // so rho fires on both and appends two R-groups
    let paired = partitions
        .iter()
        .find(|p| {
            p.blocks().len() == 2
                && p.blocks()[0].contains(&(1, 1))
                && p.blocks()[0].contains(&(2, 1))
        })
        .unwrap();
    let delta2 = build_delta(paired).unwrap();
    assert_eq!(
        rho_expand(&delta2).serialize(),
        "expansion-graph v1\n\
         black 2\n\
         white 4\n\
         prefactor + zt^1 ztc^1 mt^0 mtc^0\n\
         edge 0: G num 0->0 upper {}\n\
         edge 1: G num 1->1 upper {0}\n\
         edge 2: X num 0->2 upper {}\n\
         edge 3: R num 2->3 upper {}\n\
         edge 4: X* num 3->1 upper {}\n\
         edge 5: G* num 0->0 upper {}\n\
         edge 6: G* num 1->1 upper {0}\n\
         edge 7: X num 0->4 upper {}\n\
         edge 8: R* num 4->5 upper {}\n\
         edge 9: X* num 5->1 upper {}\n\
         end\n"
    );
}

fn arbitrary_root() -> impl Strategy<Value = ExpansionGraph> {
    (1usize..=2, 0usize..7).prop_map(|(p, which)| {
        let partitions = enumerate_partitions(p).unwrap();
        let partition = &partitions[which % partitions.len()];
        build_delta(partition).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Structural properties, black-vertex conservation, d-monotonicity and
    /// degree parity hold along arbitrary tau/rho paths.
    #[test]
    fn rewriting_invariants_hold_along_random_paths(
        root in arbitrary_root(),
        path in proptest::collection::vec(any::<bool>(), 0..10),
    ) {
        let parity: Vec<usize> = (0..root.n_black()).map(|v| root.degree(v) % 2).collect();
        let mut graph = root.clone();
        for &take_tau1 in &path {
            let Ok((tau0, tau1)) = tau_split(&graph) else { break };
            prop_assert_eq!(tau0.d(), graph.d());
            prop_assert!(tau1.d() > graph.d());
            let next = rho_expand(if take_tau1 { &tau1 } else { &tau0 });
            prop_assert_eq!(next.d(), if take_tau1 { tau1.d() } else { tau0.d() });
            next.assert_structural().unwrap();
            prop_assert_eq!(next.n_black(), root.n_black());
            let new_parity: Vec<usize> =
                (0..next.n_black()).map(|v| next.degree(v) % 2).collect();
            prop_assert_eq!(&new_parity, &parity);
            graph = next;
        }
    }

    /// Tree depth stays within the bound and every address has at most
    /// ell ones.
    #[test]
    fn tree_bounds(root in arbitrary_root(), ell in 1usize..=3) {
        let tree = build_tree(&root, ell, 100_000).unwrap();
        let p = root.edges().len();
        prop_assert!(tree.depth() <= 2 * p * (p + 6 * ell));
        for idx in 0..tree.node_count() {
            prop_assert!(tree.ones(idx) <= ell);
        }
    }
}
