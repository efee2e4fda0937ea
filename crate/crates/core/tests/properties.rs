use proptest::prelude::*;

use projcode::matrix::{export_matrix, import_matrix};
use projcode::{build_code, IndexSet, PrimeField, SubsetFamily};

fn family_strategy() -> impl Strategy<Value = (u64, SubsetFamily)> {
    (prop_oneof![Just(3u64), Just(5)], 2usize..=4).prop_flat_map(|(p, m)| {
        let subset = (1u32..(1 << m)).prop_map(IndexSet::from_bits);
        let block = prop::collection::vec(subset, 1..=2);
        prop::collection::vec(block, 1..=2)
            .prop_map(move |blocks| (p, SubsetFamily::new(m, blocks).unwrap()))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matrix_text_round_trips((p, fam) in family_strategy()) {
        let built = build_code(&fam, &PrimeField::new(p).unwrap());
        prop_assume!(built.is_ok());
        let dc = built.unwrap();
        let text = export_matrix(dc.code());
        let back = import_matrix(&text).unwrap();
        prop_assert_eq!(back.columns(), dc.code().columns());
        prop_assert_eq!(export_matrix(&back), text);
    }

    #[test]
    fn closed_forms_match_enumeration((p, fam) in family_strategy()) {
        let field = PrimeField::new(p).unwrap();
        let built = build_code(&fam, &field);
        prop_assume!(built.is_ok());
        let dc = built.unwrap();
        let params = dc.parameters().unwrap();
        let predicted = fam.predicted_parameters(field.p()).unwrap();
        prop_assert_eq!(params.n as i128, predicted.n);
        if fam.construction_hypotheses(field.p()).holds {
            prop_assert_eq!(params.k, predicted.k);
            prop_assert_eq!(params.d.map(|d| d as i128), Some(predicted.d));
        }
        for x in field.all_vectors(fam.m()).filter(|x| !x.is_zero()) {
            prop_assert_eq!(dc.weight_via_complements(&x).unwrap(), dc.code().weight_of(&x).unwrap());
        }
    }

    #[test]
    fn weights_sum_to_message_count((p, fam) in family_strategy()) {
        let built = build_code(&fam, &PrimeField::new(p).unwrap());
        prop_assume!(built.is_ok());
        let dc = built.unwrap();
        let k = dc.parameters().unwrap().k;
        prop_assert_eq!(dc.weight_distribution().unwrap().total(), p.pow(k as u32));
    }
}
