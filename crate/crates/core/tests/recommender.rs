use proptest::prelude::*;
use sparse_bayes::mard::CredibleRegion;
use sparse_bayes::recommender::{recommend, Catalog, CatalogItem, Ranking};

fn item(id: &str, a: f64, v: f64) -> CatalogItem {
    CatalogItem { song_id: id.into(), arousal: a, valence: v }
}

#[test]
fn five_item_catalog_by_hand() {
    let catalog = Catalog::new(vec![
        item("calm", -0.6, 0.4),
        item("happy", 0.5, 0.6),
        item("tense", 0.7, -0.5),
        item("sad", -0.5, -0.6),
        item("upbeat", 0.3, 0.3),
    ])
    .unwrap();
    let region = CredibleRegion { a_interval: (0.0, 1.0), v_interval: (0.0, 1.0) };
    let ids = |r: Vec<&CatalogItem>| r.iter().map(|i| i.song_id.clone()).collect::<Vec<_>>();
    // centre (0.5, 0.5): happy is 0.1 away, upbeat about 0.28
    assert_eq!(ids(recommend(&catalog, &region, 5, None, Ranking::Distance).unwrap()), ["happy", "upbeat"]);
    assert_eq!(ids(recommend(&catalog, &region, 5, Some("happy"), Ranking::Distance).unwrap()), ["upbeat"]);
    assert_eq!(ids(recommend(&catalog, &region, 1, None, Ranking::Distance).unwrap()), ["happy"]);
    let nothing = CredibleRegion { a_interval: (0.9, 1.0), v_interval: (0.9, 1.0) };
    assert!(recommend(&catalog, &nothing, 3, None, Ranking::Distance).unwrap().is_empty());
    let everything = CredibleRegion { a_interval: (-1.0, 1.0), v_interval: (-1.0, 1.0) };
    let mut shuffled = ids(recommend(&catalog, &everything, 5, None, Ranking::Random { seed: 4 }).unwrap());
    shuffled.sort();
    assert_eq!(shuffled, ["calm", "happy", "sad", "tense", "upbeat"]);
}

fn catalog() -> impl Strategy<Value = Catalog> {
    prop::collection::vec((-1.0f64..=1.0, -1.0f64..=1.0), 1..60).prop_map(|pts| {
        Catalog::new(pts.iter().enumerate().map(|(i, (a, v))| item(&format!("s{i}"), *a, *v)).collect()).unwrap()
    })
}

proptest! {
    #[test]
    fn enlarging_the_region_never_loses_songs(cat in catalog(), ca in -1.0f64..1.0, cv in -1.0f64..1.0, r in 0.0f64..1.0, grow in 0.0f64..1.0) {
        let small = CredibleRegion { a_interval: (ca - r, ca + r), v_interval: (cv - r, cv + r) };
        let big = CredibleRegion { a_interval: (ca - r - grow, ca + r + grow), v_interval: (cv - r - grow, cv + r + grow) };
        let all = cat.items.len();
        let inner = recommend(&cat, &small, all, None, Ranking::Distance).unwrap();
        let outer = recommend(&cat, &big, all, None, Ranking::Distance).unwrap();
        for it in &inner {
            prop_assert!(outer.iter().any(|o| o.song_id == it.song_id));
        }
        // brute-force membership and ordering
        let expected = cat.items.iter().filter(|i| small.contains(i.arousal, i.valence)).count();
        prop_assert_eq!(inner.len(), expected);
        let d = |i: &CatalogItem| (i.arousal - ca).hypot(i.valence - cv);
        prop_assert!(inner.windows(2).all(|w| d(w[0]) <= d(w[1]) + 1e-12));
    }
}
