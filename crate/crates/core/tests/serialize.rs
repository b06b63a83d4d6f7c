mod common;

use common::*;
use proptest::prelude::*;
use zenn::serialize::{deserialize_model, serialize_model, AnyModel};
use zenn::{Activation, ZennError};

fn round_trip(model: AnyModel) {
    let text = serialize_model(&model);
    let back = deserialize_model(&text).unwrap();
    assert_eq!(back, model);
    assert_eq!(serialize_model(&back), text, "serialization is a fixed point");
}

#[test]
fn every_layer_kind_round_trips_bit_exactly() {
    for (k, kind) in LAYER_KINDS.iter().enumerate() {
        for act in [Activation::Sine, Activation::ReLU, Activation::Sigmoid] {
            round_trip(random_deep(kind, act, 100 + k as u64).into());
        }
    }
}

#[test]
fn shallow_models_round_trip() {
    for act in [Activation::Sine, Activation::Cosine, Activation::ReLU, Activation::Identity] {
        round_trip(random_zenn(13, 1.1, act, 3).into());
        round_trip(random_mlp(13, 0.5, act, 4).into());
    }
}

#[test]
fn reloaded_models_predict_identically() {
    let model = random_deep("radzenn", Activation::Sine, 7);
    let AnyModel::Deep(back) = deserialize_model(&serialize_model(&model.clone().into())).unwrap() else {
        panic!("expected a deep model");
    };
    let d = model.input_dim();
    for x in [vec![0.1; d], vec![-0.7; d]] {
        assert_eq!(model.forward(&x).unwrap(), back.forward(&x).unwrap());
    }
}

#[test]
fn corrupted_documents_are_rejected() {
    let text = serialize_model(&random_zenn(3, 1.1, Activation::Sine, 1).into());
    assert!(matches!(deserialize_model(""), Err(ZennError::Malformed(_))));
    assert!(deserialize_model(&text.replace("zenn-model 1", "zenn-model 9")).is_err());
    let dropped: String = text.lines().filter(|l| *l != "end").map(|l| format!("{l}\n")).collect();
    assert!(deserialize_model(&dropped).is_err());
    let garbled = text.replacen("e0\n", "e0x\n", 1);
    assert!(deserialize_model(&garbled).is_err());
}

proptest! {
    #[test]
    fn arbitrary_finite_parameters_survive(values in prop::collection::vec(-1e300f64..1e300, 4 * 5)) {
        let mut m = random_zenn(5, 1.7, Activation::Sigmoid, 0);
        m.set_params(&values).unwrap();
        let back = deserialize_model(&serialize_model(&m.clone().into())).unwrap();
        prop_assert_eq!(back, AnyModel::ShallowZeNN(m));
    }
}
