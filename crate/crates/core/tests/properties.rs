use proptest::prelude::*;

use tww_core::approx::{approximate_twinwidth, refine_to_partition, ApproxOutcome, ApproxParams};
use tww_core::contraction::{exact_twinwidth, verify_sequence};
use tww_core::divisions::{count_distinct_rows, Division};
use tww_core::folog::{parse_formula, Formula, Signature};
use tww_core::io;
use tww_core::patterns::{
    decode_f, decode_matching_to_graph, encode_graph_as_matching, f_matrix_eta, EncodingEta, Permutation,
};
use tww_core::{OrderedGraph, OrderedMatrix};

fn matrix(max: usize) -> impl Strategy<Value = OrderedMatrix> {
    (1..=max, 1..=max).prop_flat_map(|(n, m)| {
        prop::collection::vec(any::<bool>(), n * m)
            .prop_map(move |bits| OrderedMatrix::binary_from_fn(n, m, |i, j| bits[i * m + j]))
    })
}

fn permutation(max: usize) -> impl Strategy<Value = Permutation> {
    (1..=max).prop_flat_map(|n| Just((0..n).collect::<Vec<usize>>()).prop_shuffle())
        .prop_map(|v| Permutation::new(v).unwrap())
}

fn graph(max: usize) -> impl Strategy<Value = OrderedGraph> {
    (1..=max).prop_flat_map(|n| {
        prop::collection::vec(any::<bool>(), n * n).prop_map(move |bits| {
            OrderedGraph::from_fn(n, |u, v| bits[u * n + v]).unwrap()
        })
    })
}

fn formula() -> impl Strategy<Value = Formula> {
    let var = prop::sample::select(vec!["x", "y", "z"]).prop_map(String::from);
    let leaf = prop_oneof![
        Just(Formula::True),
        Just(Formula::False),
        (var.clone(), var.clone()).prop_map(|(a, b)| Formula::Less(a, b)),
        (var.clone(), var.clone()).prop_map(|(a, b)| Formula::Equal(a, b)),
        var.clone().prop_map(|a| Formula::Unary("U".into(), a)),
        (var.clone(), var.clone()).prop_map(|(a, b)| Formula::Binary("E".into(), a, b)),
    ];
    leaf.prop_recursive(4, 24, 2, move |inner| {
        let var = prop::sample::select(vec!["x", "y", "z"]).prop_map(String::from);
        prop_oneof![
            inner.clone().prop_map(|a| Formula::Not(Box::new(a))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::And(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::Or(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::Implies(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::Iff(Box::new(a), Box::new(b))),
            (var.clone(), inner.clone()).prop_map(|(v, a)| Formula::Exists(v, None, Box::new(a))),
            (var, inner).prop_map(|(v, a)| Formula::Forall(v, None, Box::new(a))),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matrix_text_round_trip(m in matrix(7)) {
        prop_assert_eq!(io::parse_matrix(&io::serialize_matrix(&m)).unwrap(), m);
    }

    #[test]
    fn transpose_is_an_involution(m in matrix(7)) {
        prop_assert_eq!(m.transpose().transpose(), m);
    }

    #[test]
    fn submatrix_is_found(m in matrix(6), rmask in any::<u8>(), cmask in any::<u8>()) {
        let rows: Vec<usize> = (0..m.n_rows()).filter(|i| rmask >> i & 1 == 1).collect();
        let cols: Vec<usize> = (0..m.n_cols()).filter(|j| cmask >> j & 1 == 1).collect();
        prop_assume!(!rows.is_empty() && !cols.is_empty());
        let sub = m.submatrix(&rows, &cols).unwrap();
        let at = m.contains_submatrix(&sub).expect("a submatrix is contained");
        prop_assert_eq!(m.submatrix(&at.rows, &at.cols).unwrap(), sub);
    }

    #[test]
    fn inverse_composes_to_identity(p in permutation(8)) {
        let inv = p.inverse();
        for i in 0..p.len() {
            prop_assert_eq!(inv.apply(p.apply(i)), i);
        }
    }

    #[test]
    fn encodings_decode(p in permutation(7), bits in 0usize..16) {
        let eta = EncodingEta::all()[bits];
        let m = f_matrix_eta(eta, &p).unwrap();
        prop_assert_eq!(decode_f(eta, &m), Some(p));
    }

    #[test]
    fn matching_encoding_decodes(g in graph(5)) {
        let h = encode_graph_as_matching(&g);
        prop_assert_eq!(decode_matching_to_graph(&h), Some(g));
    }

    #[test]
    fn formula_print_parse(f in formula()) {
        let sig = Signature { unary: vec!["U".into()], binary: vec!["E".into()] };
        prop_assert_eq!(parse_formula(&f.to_string(), &sig).unwrap(), f);
    }

    #[test]
    fn rich_or_sequence_verifies(m in matrix(9), k in 1usize..=2) {
        match approximate_twinwidth(&m, k).unwrap() {
            ApproxOutcome::Sequence { sequence, profile, .. } => {
                prop_assert_eq!(verify_sequence(&m, &sequence).unwrap(), profile);
            }
            ApproxOutcome::Rich { .. } => {}
        }
    }

    #[test]
    fn refinement_refines_the_division(m in matrix(8), rc in any::<u8>(), cc in any::<u8>()) {
        let cuts = |mask: u8, n: usize| (1..n).filter(|c| mask >> c & 1 == 1).collect::<Vec<usize>>();
        let d = Division::new(m.n_rows(), m.n_cols(), cuts(rc, m.n_rows()), cuts(cc, m.n_cols())).unwrap();
        let (rows, cols) = refine_to_partition(&m, &d, ApproxParams::new(1, 2).unwrap().r).unwrap();
        let (dr, dc) = d.to_partitions();
        prop_assert!(rows.refines(&dr));
        prop_assert!(cols.refines(&dc));
    }

    #[test]
    fn twin_width_is_transpose_invariant(m in matrix(3)) {
        let (a, _) = exact_twinwidth(&m, 10).unwrap();
        let (b, _) = exact_twinwidth(&m.transpose(), 10).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn distinct_rows_bounded(m in matrix(8)) {
        let d = count_distinct_rows(&m, 0..m.n_rows(), 0..m.n_cols());
        prop_assert!(d >= 1 && d <= m.n_rows());
    }
}
