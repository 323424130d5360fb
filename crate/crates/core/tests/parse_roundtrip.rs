use pltl_teach::{Formula, State};
use proptest::prelude::*;

fn formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        Just(Formula::True),
        (0u32..20).prop_map(Formula::threshold),
        "[A-Za-z][A-Za-z0-9_]{0,6}".prop_map(|s| Formula::label(&s)),
    ];
    leaf.prop_recursive(5, 48, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (0u32..30, inner.clone()).prop_map(|(t, a)| Formula::eventually(t, a)),
            (0u32..30, inner).prop_map(|(t, a)| Formula::always(t, a)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn render_then_parse_is_identity(f in formula()) {
        let text = f.render();
        prop_assert_eq!(text.parse::<Formula>().unwrap(), f);
    }

    #[test]
    fn serde_roundtrip(f in formula()) {
        let json = serde_json::to_string(&f).unwrap();
        prop_assert_eq!(serde_json::from_str::<Formula>(&json).unwrap(), f);
    }
}

#[test]
fn states_render_like_their_atoms() {
    assert_eq!(State::Num(3).to_string(), "3");
    assert_eq!(State::sym("Red").to_string(), "Red");
}
